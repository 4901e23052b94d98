//! Ball-in-boxes strategies: a ball sits in one of the boxes, and each test
//! asks whether it is in a given set of boxes.
//!
//! Tests that are exclusive must ask about disjoint box sets. Dually, for each
//! box b the tests answering yes, U_b, form an independent set.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::Assignment;
use crate::error::{Error, Result};
use crate::graph::ExclusivityGraph;

/// Boxes used, and for each test the boxes on which it answers yes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxStrategy {
    pub boxes: Vec<u32>,
    pub tests: BTreeMap<u32, BTreeSet<u32>>,
}

#[derive(Serialize)]
struct StrategyDocument<'a> {
    boxes: &'a [u32],
    tests: &'a BTreeMap<u32, BTreeSet<u32>>,
    dual_sets: BTreeMap<u32, Vec<u32>>,
}

impl BoxStrategy {
    /// Strategy with one box per set; box b answers yes on `sets[b-1]`.
    pub fn from_dual_sets(labels: &[u32], sets: &[Vec<u32>]) -> Self {
        let mut tests: BTreeMap<u32, BTreeSet<u32>> =
            labels.iter().map(|&l| (l, BTreeSet::new())).collect();
        for (b, set) in sets.iter().enumerate() {
            for &v in set {
                tests.entry(v).or_default().insert(b as u32 + 1);
            }
        }
        BoxStrategy {
            boxes: (1..=sets.len() as u32).collect(),
            tests,
        }
    }

    /// U_b for every box.
    pub fn dual_sets(&self) -> BTreeMap<u32, Vec<u32>> {
        let mut out: BTreeMap<u32, Vec<u32>> = self.boxes.iter().map(|&b| (b, Vec::new())).collect();
        for (&t, boxes) in &self.tests {
            for b in boxes {
                out.entry(*b).or_default().push(t);
            }
        }
        out
    }

    /// Answers when the ball is in box `b`.
    pub fn assignment_for_box(&self, b: u32) -> Assignment {
        Assignment {
            values: self.tests.iter().map(|(&t, s)| (t, s.contains(&b))).collect(),
        }
    }

    /// JSON with `boxes`, `tests` and the derived `dual_sets`.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(StrategyDocument {
            boxes: &self.boxes,
            tests: &self.tests,
            dual_sets: self.dual_sets(),
        })
        .expect("strategy serialises")
    }

    /// Reads `boxes` and `tests`; any `dual_sets` field is ignored and recomputed.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrategyReport {
    /// Adjacent tests sharing a box: (test, test, box).
    pub exclusivity_violations: Vec<(u32, u32, u32)>,
    /// Boxes whose yes-set contains an edge: (box, test, test).
    pub dependent_boxes: Vec<(u32, u32, u32)>,
    /// Number of yes-boxes per test.
    pub boxes_per_test: BTreeMap<u32, usize>,
    /// Number of tests answering yes per box (Σ for that ball placement).
    pub yes_per_box: BTreeMap<u32, usize>,
    pub min_sigma: usize,
    pub max_sigma: usize,
    pub mean_sigma: f64,
    /// Whether the U_b sets cover every edge of the complement graph.
    pub covers_complement: bool,
}

impl StrategyReport {
    /// Human-readable failures of the exclusivity, independence and balance checks.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for &(a, b, x) in &self.exclusivity_violations {
            out.push(format!("exclusivity: tests {a} and {b} are exclusive but share box {x}"));
        }
        for &(x, a, b) in &self.dependent_boxes {
            out.push(format!("independence: box {x} makes exclusive tests {a} and {b} both yes"));
        }
        let counts: BTreeSet<usize> = self.boxes_per_test.values().copied().collect();
        if counts.len() > 1 {
            for (t, c) in &self.boxes_per_test {
                if Some(c) != self.boxes_per_test.values().max() {
                    out.push(format!("balance: test {t} answers yes on {c} boxes"));
                }
            }
        }
        if self.min_sigma != self.max_sigma {
            out.push(format!(
                "balance: sigma ranges from {} to {} over ball placements",
                self.min_sigma, self.max_sigma
            ));
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Checks exclusivity, independence of every U_b, balance, and Σ over placements.
pub fn validate_box_strategy(g: &ExclusivityGraph, s: &BoxStrategy) -> StrategyReport {
    let empty = BTreeSet::new();
    let tests_of = |l: u32| s.tests.get(&l).unwrap_or(&empty);
    let mut exclusivity_violations = Vec::new();
    let mut dependent_boxes = Vec::new();
    for (a, b) in g.labelled_edges() {
        for &x in tests_of(a).intersection(tests_of(b)) {
            exclusivity_violations.push((a, b, x));
            dependent_boxes.push((x, a, b));
        }
    }
    dependent_boxes.sort();
    let boxes_per_test = g.labels().iter().map(|&l| (l, tests_of(l).len())).collect();
    let duals = s.dual_sets();
    let yes_per_box: BTreeMap<u32, usize> = duals.iter().map(|(&b, u)| (b, u.len())).collect();
    let min_sigma = yes_per_box.values().copied().min().unwrap_or(0);
    let max_sigma = yes_per_box.values().copied().max().unwrap_or(0);
    let mean_sigma = if yes_per_box.is_empty() {
        0.0
    } else {
        yes_per_box.values().sum::<usize>() as f64 / yes_per_box.len() as f64
    };
    let covers_complement = g.complement().labelled_edges().iter().all(|&(a, b)| {
        duals.values().any(|u| u.contains(&a) && u.contains(&b))
    });
    StrategyReport {
        exclusivity_violations,
        dependent_boxes,
        boxes_per_test,
        yes_per_box,
        min_sigma,
        max_sigma,
        mean_sigma,
        covers_complement,
    }
}

struct BoxSearch<'a> {
    g: &'a ExclusivityGraph,
    /// Independent sets of the target size, as masks, in lexicographic order.
    cands: Vec<u64>,
    /// Complement edges as vertex-pair masks.
    comp_edges: Vec<u64>,
    per_vertex: usize,
    boxes: usize,
    count: Vec<usize>,
    used: Vec<bool>,
    chosen: Vec<usize>,
    nodes: u64,
}

impl BoxSearch<'_> {
    fn fits(&self, c: usize) -> bool {
        !self.used[c] && crate::graph::iter_bits(self.cands[c]).all(|v| self.count[v] < self.per_vertex)
    }

    fn search(&mut self) -> bool {
        self.nodes += 1;
        if self.chosen.len() == self.boxes {
            return self.count.iter().all(|&c| c == self.per_vertex)
                && self.comp_edges.iter().all(|&e| self.chosen.iter().any(|&c| self.cands[c] & e == e));
        }
        // Branch on the uncovered complement edge with fewest options, else on
        // the lowest vertex still short of its quota.
        let mut options: Option<Vec<usize>> = None;
        for &e in &self.comp_edges {
            if self.chosen.iter().any(|&c| self.cands[c] & e == e) {
                continue;
            }
            let opts: Vec<usize> = (0..self.cands.len())
                .filter(|&c| self.cands[c] & e == e && self.fits(c))
                .collect();
            if opts.is_empty() {
                return false;
            }
            if options.as_ref().is_none_or(|o| opts.len() < o.len()) {
                options = Some(opts);
            }
        }
        let options = match options {
            Some(o) => o,
            None => {
                let Some(v) = (0..self.g.n()).find(|&v| self.count[v] < self.per_vertex) else {
                    return false;
                };
                (0..self.cands.len())
                    .filter(|&c| self.cands[c] >> v & 1 == 1 && self.fits(c))
                    .collect()
            }
        };
        for c in options {
            self.used[c] = true;
            self.chosen.push(c);
            for v in crate::graph::iter_bits(self.cands[c]) {
                self.count[v] += 1;
            }
            if self.search() {
                return true;
            }
            for v in crate::graph::iter_bits(self.cands[c]) {
                self.count[v] -= 1;
            }
            self.chosen.pop();
            self.used[c] = false;
        }
        false
    }
}

/// Balanced strategy from maximum independent sets: as many boxes as vertices,
/// every box makes exactly α tests true and every test is true on α boxes.
/// The box sets are chosen so that together they also cover every edge of the
/// complement graph.
pub fn construct_box_strategy(g: &ExclusivityGraph) -> Result<BoxStrategy> {
    let alpha = crate::invariants::independence_number(g)?.alpha;
    let n = g.n();
    if n == 0 || alpha == 0 {
        return Err(Error::NoBoxStrategy);
    }
    let mut cands: Vec<u64> = Vec::new();
    k_subsets(n, alpha, &mut |m| {
        if g.is_independent(m) {
            cands.push(m);
        }
    });
    let comp = g.complement();
    let mut search = BoxSearch {
        g,
        cands,
        comp_edges: comp.edges().into_iter().map(|(i, j)| 1u64 << i | 1u64 << j).collect(),
        per_vertex: alpha,
        boxes: n,
        count: vec![0; n],
        used: Vec::new(),
        chosen: Vec::new(),
        nodes: 0,
    };
    search.used = vec![false; search.cands.len()];
    if !search.search() {
        return Err(Error::NoBoxStrategy);
    }
    let sets: Vec<Vec<u32>> = search.chosen.iter().map(|&c| g.labels_of(search.cands[c])).collect();
    Ok(BoxStrategy::from_dual_sets(g.labels(), &sets))
}

/// Calls `f` on every `k`-element subset of `0..n` as a mask, in lexicographic order.
fn k_subsets(n: usize, k: usize, f: &mut impl FnMut(u64)) {
    fn rec(start: usize, n: usize, k: usize, acc: u64, f: &mut impl FnMut(u64)) {
        if k == 0 {
            f(acc);
            return;
        }
        for i in start..=n.saturating_sub(k) {
            rec(i + 1, n, k - 1, acc | 1 << i, f);
        }
    }
    rec(0, n, k, 0, f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::classical_sigma;
    use crate::invariants::{clique_edge_cover_complement, CoverBudget};
    use crate::ksets::{ks18_vectors, orthogonality_graph};

    fn ks18() -> ExclusivityGraph {
        orthogonality_graph(&ks18_vectors()).unwrap()
    }

    #[test]
    fn ks18_strategy_is_balanced() {
        let g = ks18();
        let s = construct_box_strategy(&g).unwrap();
        assert_eq!(s.boxes.len(), 18);
        let r = validate_box_strategy(&g, &s);
        assert!(r.passed(), "{:?}", r.failures());
        assert_eq!((r.min_sigma, r.max_sigma), (4, 4));
        assert!(r.boxes_per_test.values().all(|&c| c == 4));
        assert!(r.covers_complement);
        // Probability that a given test says yes for a uniformly placed ball.
        let p = s.tests[&1].len() as f64 / s.boxes.len() as f64;
        assert!((p - 4.0 / 18.0).abs() < 1e-12);
    }

    #[test]
    fn every_box_induces_an_admissible_assignment() {
        let g = ks18();
        let s = construct_box_strategy(&g).unwrap();
        for &b in &s.boxes {
            let a = s.assignment_for_box(b);
            assert_eq!(classical_sigma(&g, &a).unwrap(), 4);
        }
    }

    #[test]
    fn box_count_matches_clique_cover() {
        let g = ks18();
        let s = construct_box_strategy(&g).unwrap();
        let cover = clique_edge_cover_complement(&g, CoverBudget::seconds(0));
        assert_eq!(s.boxes.len(), cover.cover.len());
    }

    #[test]
    fn shared_box_between_exclusive_tests_fails() {
        let g = ks18();
        let mut s = construct_box_strategy(&g).unwrap();
        let b = *s.tests[&2].iter().next().unwrap();
        s.tests.get_mut(&1).unwrap().insert(b);
        let r = validate_box_strategy(&g, &s);
        assert!(!r.passed());
        assert!(r.failures()[0].starts_with("exclusivity: tests 1 and 2"));
    }

    #[test]
    fn dropping_a_box_unbalances() {
        let g = ks18();
        let mut s = construct_box_strategy(&g).unwrap();
        let b = *s.tests[&5].iter().next().unwrap();
        s.tests.get_mut(&5).unwrap().remove(&b);
        let r = validate_box_strategy(&g, &s);
        assert_eq!(r.boxes_per_test[&5], 3);
        assert_eq!(r.min_sigma, 3);
        assert!(r.failures().iter().any(|f| f == "balance: test 5 answers yes on 3 boxes"));
    }

    #[test]
    fn json_round_trip() {
        let g = ks18();
        let s = construct_box_strategy(&g).unwrap();
        let text = s.to_json_value().to_string();
        assert!(text.contains("dual_sets"));
        assert_eq!(BoxStrategy::from_json(&text).unwrap(), s);
    }

    #[test]
    fn subsets_are_lexicographic() {
        let mut seen = Vec::new();
        k_subsets(4, 2, &mut |m| seen.push(m));
        assert_eq!(seen, vec![0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]);
    }
}

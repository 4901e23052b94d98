//! Clique edge covers of the complement graph Ḡ.
//!
//! The smallest such cover has ϑ'(Ḡ) cliques (the intersection number of Ḡ).
//! A deterministic node-limited search finds a cover first; an exhaustive
//! branch-and-bound then tries to prove it minimal within a time budget.

use std::time::{Duration, Instant};

use serde::Serialize;

use super::{maximal_clique_masks, Clique};
use crate::graph::{iter_bits, ExclusivityGraph};

/// Node limit for each target size tried by the constructive phase.
const CONSTRUCT_NODE_LIMIT: u64 = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverBudget {
    /// Wall-clock time for the minimality proof. Zero skips it and the result is reported as an upper bound.
    pub time: Duration,
}

impl Default for CoverBudget {
    fn default() -> Self {
        CoverBudget {
            time: Duration::from_secs(60),
        }
    }
}

impl CoverBudget {
    pub fn seconds(s: u64) -> Self {
        CoverBudget {
            time: Duration::from_secs(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Minimality {
    Proven,
    UpperBoundOnly,
}

/// Cliques of Ḡ (independent sets of G), by label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliqueEdgeCover {
    pub cliques: Vec<Clique>,
}

impl CliqueEdgeCover {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    /// First problem found: a clique that is not independent in `g`, or an
    /// uncovered complement edge.
    pub fn validate(&self, g: &ExclusivityGraph) -> std::result::Result<(), String> {
        let mut masks = Vec::with_capacity(self.cliques.len());
        for c in &self.cliques {
            let mask = g.mask_of(&c.members).map_err(|e| e.to_string())?;
            if !g.is_independent(mask) {
                return Err(format!("clique {:?} is not independent in the graph", c.members));
            }
            masks.push(mask);
        }
        let h = g.complement();
        for (i, j) in h.edges() {
            let pair = 1u64 << i | 1u64 << j;
            if !masks.iter().any(|m| m & pair == pair) {
                return Err(format!(
                    "complement edge {{{}, {}}} is not covered",
                    g.label(i),
                    g.label(j)
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverResult {
    pub cover: CliqueEdgeCover,
    pub minimality: Minimality,
    /// Best proven lower bound on the cover size.
    pub lower_bound: usize,
    /// Search nodes visited, both phases.
    pub nodes: u64,
}

struct Search {
    /// Endpoints of each complement edge, by vertex index.
    edges: Vec<(usize, usize)>,
    /// Candidate cliques (maximal cliques of Ḡ) as vertex masks.
    cands: Vec<u64>,
    /// Edge bitset covered by each candidate.
    cov: Vec<Vec<u64>>,
    /// Candidates covering each edge.
    by_edge: Vec<Vec<usize>>,
    omega: usize,
    n: usize,
    nodes: u64,
    node_limit: u64,
    deadline: Option<Instant>,
    aborted: bool,
    chosen: Vec<usize>,
    best: Option<Vec<usize>>,
}

fn count(bits: &[u64]) -> usize {
    bits.iter().map(|w| w.count_ones() as usize).sum()
}

fn ones(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter()
        .enumerate()
        .flat_map(|(w, &word)| iter_bits(word).map(move |b| w * 64 + b))
}

impl Search {
    fn new(g: &ExclusivityGraph) -> Self {
        let h = g.complement();
        let edges = h.edges();
        let words = edges.len().div_ceil(64);
        let mut cands: Vec<u64> = maximal_clique_masks(&h)
            .into_iter()
            .filter(|m| m.count_ones() >= 2)
            .collect();
        cands.sort_by(|a, b| {
            b.count_ones()
                .cmp(&a.count_ones())
                .then_with(|| h.labels_of(*a).cmp(&h.labels_of(*b)))
        });
        let mut cov = vec![vec![0u64; words]; cands.len()];
        let mut by_edge = vec![Vec::new(); edges.len()];
        for (e, &(i, j)) in edges.iter().enumerate() {
            let pair = 1u64 << i | 1u64 << j;
            for (c, &m) in cands.iter().enumerate() {
                if m & pair == pair {
                    cov[c][e / 64] |= 1 << (e % 64);
                    by_edge[e].push(c);
                }
            }
        }
        let omega = cands.iter().map(|m| m.count_ones() as usize).max().unwrap_or(0);
        Search {
            edges,
            cands,
            cov,
            by_edge,
            omega,
            n: g.n(),
            nodes: 0,
            node_limit: u64::MAX,
            deadline: None,
            aborted: false,
            chosen: Vec::new(),
            best: None,
        }
    }

    fn all_uncovered(&self) -> Vec<u64> {
        let mut u = vec![0u64; self.edges.len().div_ceil(64)];
        for e in 0..self.edges.len() {
            u[e / 64] |= 1 << (e % 64);
        }
        u
    }

    /// Lower bound on the cliques still needed to cover `uncovered`.
    fn bound(&self, uncovered: &[u64]) -> usize {
        let remaining = count(uncovered);
        if remaining == 0 {
            return 0;
        }
        let max_gain = self
            .cov
            .iter()
            .map(|c| c.iter().zip(uncovered).map(|(a, b)| (a & b).count_ones() as usize).sum())
            .max()
            .unwrap_or(1)
            .max(1);
        let by_edges = remaining.div_ceil(max_gain);
        // A clique through v covers at most ω-1 of v's edges and holds at most ω vertices.
        let mut degree = vec![0usize; self.n];
        for e in ones(uncovered) {
            let (i, j) = self.edges[e];
            degree[i] += 1;
            degree[j] += 1;
        }
        let per_vertex: usize = degree.iter().map(|d| d.div_ceil(self.omega - 1)).sum();
        by_edges.max(per_vertex.div_ceil(self.omega))
    }

    /// Depth-first search for a cover with at most `k` cliques.
    fn find(&mut self, uncovered: &[u64], k: usize) -> bool {
        self.nodes += 1;
        if self.nodes > self.node_limit
            || (self.nodes % 1024 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d))
        {
            self.aborted = true;
        }
        if self.aborted {
            return false;
        }
        if count(uncovered) == 0 {
            self.best = Some(self.chosen.clone());
            return true;
        }
        if self.chosen.len() + self.bound(uncovered) > k {
            return false;
        }
        let edge = ones(uncovered)
            .min_by_key(|&e| (self.by_edge[e].len(), e))
            .expect("uncovered is nonempty");
        let mut options: Vec<(usize, usize)> = self.by_edge[edge]
            .iter()
            .map(|&c| {
                let gain = self.cov[c].iter().zip(uncovered).map(|(a, b)| (a & b).count_ones() as usize).sum();
                (gain, c)
            })
            .collect();
        options.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, c) in options {
            let next: Vec<u64> = uncovered.iter().zip(&self.cov[c]).map(|(u, v)| u & !v).collect();
            self.chosen.push(c);
            let found = self.find(&next, k);
            self.chosen.pop();
            if found || self.aborted {
                return found;
            }
        }
        false
    }

    fn greedy(&self) -> Vec<usize> {
        let mut uncovered = self.all_uncovered();
        let mut out = Vec::new();
        while count(&uncovered) > 0 {
            let (c, _) = self
                .cov
                .iter()
                .enumerate()
                .map(|(c, cv)| (c, count(&cv.iter().zip(&uncovered).map(|(a, b)| a & b).collect::<Vec<_>>())))
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                .expect("candidates cover every edge");
            for (u, v) in uncovered.iter_mut().zip(&self.cov[c]) {
                *u &= !v;
            }
            out.push(c);
        }
        out
    }
}

/// Finds a clique edge cover of Ḡ and tries to prove it minimal within `budget`.
pub fn clique_edge_cover_complement(g: &ExclusivityGraph, budget: CoverBudget) -> CoverResult {
    let mut s = Search::new(g);
    if s.edges.is_empty() {
        return CoverResult {
            cover: CliqueEdgeCover { cliques: Vec::new() },
            minimality: Minimality::Proven,
            lower_bound: 0,
            nodes: 0,
        };
    }
    let full = s.all_uncovered();
    let mut lower = s.bound(&full);

    // Constructive phase: smallest target first, each with a node limit.
    let greedy = s.greedy();
    let mut best = greedy.clone();
    for k in lower..greedy.len() {
        s.node_limit = s.nodes + CONSTRUCT_NODE_LIMIT;
        s.aborted = false;
        s.best = None;
        if s.find(&full, k) {
            best = s.best.take().expect("found");
            break;
        }
        if !s.aborted && lower == k {
            lower = k + 1;
        }
    }

    // Proof phase: exhaustive search for anything smaller, within the time limit.
    if lower < best.len() && !budget.time.is_zero() {
        s.node_limit = u64::MAX;
        s.deadline = Some(Instant::now() + budget.time);
        s.aborted = false;
        while lower < best.len() {
            s.best = None;
            if s.find(&full, best.len() - 1) {
                best = s.best.take().expect("found");
            } else if s.aborted {
                break;
            } else {
                lower = best.len();
            }
        }
    }

    let mut cliques: Vec<Clique> = best
        .iter()
        .map(|&c| Clique {
            members: g.labels_of(s.cands[c]),
        })
        .collect();
    cliques.sort();
    CoverResult {
        cover: CliqueEdgeCover { cliques },
        // A zero budget asks for a cover only, so no minimality claim is made.
        minimality: if lower >= best.len() && !budget.time.is_zero() {
            Minimality::Proven
        } else {
            Minimality::UpperBoundOnly
        },
        lower_bound: lower,
        nodes: s.nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ksets::{ks18_vectors, orthogonality_graph};

    /// Smallest cover by exhaustive subset enumeration over complement edges
    /// and its maximal cliques; only for tiny graphs.
    fn brute_cover_size(g: &ExclusivityGraph) -> usize {
        let h = g.complement();
        let cands: Vec<u64> = maximal_clique_masks(&h)
            .into_iter()
            .filter(|m| m.count_ones() >= 2)
            .collect();
        let edges = h.edges();
        (0u64..1 << cands.len())
            .filter(|sel| {
                edges.iter().all(|&(i, j)| {
                    let pair = 1u64 << i | 1u64 << j;
                    iter_bits(*sel).any(|c| cands[c] & pair == pair)
                })
            })
            .map(|sel| sel.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn ks18_cover_has_18_cliques_of_size_four() {
        let g = orthogonality_graph(&ks18_vectors()).unwrap();
        let r = clique_edge_cover_complement(&g, CoverBudget::default());
        assert_eq!(r.cover.len(), 18);
        assert!(r.cover.cliques.iter().all(|c| c.len() == 4));
        assert_eq!(r.cover.validate(&g), Ok(()));
        assert_eq!(r.lower_bound, 18);
        assert_eq!(r.minimality, Minimality::Proven);
    }

    #[test]
    fn zero_budget_still_constructs() {
        let g = orthogonality_graph(&ks18_vectors()).unwrap();
        let r = clique_edge_cover_complement(&g, CoverBudget::seconds(0));
        assert_eq!(r.cover.len(), 18);
        assert_eq!(r.cover.validate(&g), Ok(()));
        assert_eq!(r.minimality, Minimality::UpperBoundOnly);
        assert_eq!(r.lower_bound, 18);
    }

    #[test]
    fn complete_graph_needs_nothing() {
        let r = clique_edge_cover_complement(&ExclusivityGraph::complete(5), CoverBudget::default());
        assert!(r.cover.is_empty());
        assert_eq!(r.minimality, Minimality::Proven);
    }

    #[test]
    fn five_cycle_needs_five_edges() {
        let g = ExclusivityGraph::cycle(5);
        let r = clique_edge_cover_complement(&g, CoverBudget::default());
        assert_eq!(r.cover.len(), brute_cover_size(&g));
        assert_eq!(r.cover.len(), 5);
        assert!(r.cover.cliques.iter().all(|c| c.len() == 2));
        assert_eq!(r.cover.validate(&g), Ok(()));
    }

    #[test]
    fn small_graphs_match_brute_force() {
        let graphs = [
            ExclusivityGraph::path(5),
            ExclusivityGraph::cycle(6),
            ExclusivityGraph::cycle(7),
            ExclusivityGraph::edgeless(4),
        ];
        for g in &graphs {
            let r = clique_edge_cover_complement(g, CoverBudget::default());
            assert_eq!(r.cover.validate(g), Ok(()));
            assert_eq!(r.cover.len(), brute_cover_size(g));
            assert_eq!(r.minimality, Minimality::Proven);
        }
    }

    #[test]
    fn validation_reports_uncovered_edge() {
        let g = ExclusivityGraph::edgeless(3);
        let cover = CliqueEdgeCover {
            cliques: vec![Clique { members: vec![1, 2] }],
        };
        assert_eq!(
            cover.validate(&g),
            Err("complement edge {1, 3} is not covered".to_string())
        );
    }
}

//! Graph invariants bounding classical, quantum and postquantum performance:
//! independence number, fractional packing number, Lovász number, and
//! clique edge covers of the complement.

mod cover;
mod lp;
mod sdp;
mod theta;

use serde::Serialize;

pub use cover::{
    clique_edge_cover_complement, CliqueEdgeCover, CoverBudget, CoverResult, Minimality,
};
pub use lp::{fractional_packing, FractionalPacking, WeightVector, TOL_LP};
pub use sdp::{lovasz_theta_sdp, SdpSolution, SDP_MAX_VERTICES};
pub use theta::{lovasz_theta, ThetaCertificate, ThetaMethod, ThetaOptions, ThetaResult, TOL_SDP};

use crate::error::{Error, Result};
use crate::graph::{iter_bits, ExclusivityGraph};

/// Default vertex limit for the exact independence-number search.
pub const EXACT_LIMIT: usize = 40;

/// A set of pairwise adjacent vertices, by label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Clique {
    pub members: Vec<u32>,
}

impl Clique {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependentSet {
    pub alpha: usize,
    /// A maximum independent set (labels, ascending); the lexicographically
    /// first one in vertex-index order.
    pub witness: Vec<u32>,
}

/// Exact independence number with the default size limit.
pub fn independence_number(g: &ExclusivityGraph) -> Result<IndependentSet> {
    independence_number_with_limit(g, EXACT_LIMIT)
}

pub fn independence_number_with_limit(g: &ExclusivityGraph, limit: usize) -> Result<IndependentSet> {
    if g.n() > limit {
        return Err(Error::TooLarge { n: g.n(), limit });
    }
    let mut best = 0u64;
    let mut best_size = 0usize;
    mis_branch(g, 0, g.all_mask(), &mut best, &mut best_size);
    Ok(IndependentSet {
        alpha: best_size,
        witness: g.labels_of(best),
    })
}

/// Number of cliques in a greedy clique partition of `p`; bounds any independent subset of `p`.
fn greedy_clique_cover(g: &ExclusivityGraph, mut p: u64) -> usize {
    let mut count = 0;
    while p != 0 {
        let v = p.trailing_zeros() as usize;
        let mut clique = 1u64 << v;
        let mut cand = p & g.neighbors(v);
        while cand != 0 {
            let u = cand.trailing_zeros() as usize;
            clique |= 1 << u;
            cand &= g.neighbors(u);
        }
        p &= !clique;
        count += 1;
    }
    count
}

fn mis_branch(g: &ExclusivityGraph, current: u64, p: u64, best: &mut u64, best_size: &mut usize) {
    let size = current.count_ones() as usize;
    if p == 0 {
        if size > *best_size {
            *best = current;
            *best_size = size;
        }
        return;
    }
    if size + greedy_clique_cover(g, p) <= *best_size {
        return;
    }
    let v = p.trailing_zeros() as usize;
    let bit = 1u64 << v;
    mis_branch(g, current | bit, p & !bit & !g.neighbors(v), best, best_size);
    mis_branch(g, current, p & !bit, best, best_size);
}

/// All maximal cliques (Bron–Kerbosch with pivoting), sorted by size
/// descending, then lexicographically by label.
pub fn maximal_cliques(g: &ExclusivityGraph) -> Vec<Clique> {
    let mut masks = Vec::new();
    bron_kerbosch(g, 0, g.all_mask(), 0, &mut masks);
    let mut out: Vec<Clique> = masks
        .into_iter()
        .map(|m| Clique {
            members: g.labels_of(m),
        })
        .collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.members.cmp(&b.members)));
    out
}

/// Maximal cliques as index bitmasks, unsorted.
pub(crate) fn maximal_clique_masks(g: &ExclusivityGraph) -> Vec<u64> {
    let mut masks = Vec::new();
    bron_kerbosch(g, 0, g.all_mask(), 0, &mut masks);
    masks.sort_unstable();
    masks
}

fn bron_kerbosch(g: &ExclusivityGraph, r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 && r != 0 {
            out.push(r);
        }
        return;
    }
    let pivot = iter_bits(p | x)
        .max_by_key(|&u| ((p & g.neighbors(u)).count_ones(), std::cmp::Reverse(u)))
        .expect("p is nonempty");
    for v in iter_bits(p & !g.neighbors(pivot)) {
        let nv = g.neighbors(v);
        bron_kerbosch(g, r | 1 << v, p & nv, x & nv, out);
        p &= !(1u64 << v);
        x |= 1 << v;
    }
}

/// The three invariants with their per-test probabilities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub n: usize,
    pub alpha: usize,
    pub alpha_star: f64,
    pub theta: f64,
    pub alpha_over_n: f64,
    pub theta_over_n: f64,
}

/// Bundles α, α*, ϑ and the per-test yes-probabilities α/n and ϑ/n.
pub fn classical_quantum_gap(g: &ExclusivityGraph) -> Result<GapReport> {
    let alpha = independence_number(g)?.alpha;
    let alpha_star = fractional_packing(g).value;
    let theta = lovasz_theta(g, &ThetaOptions::default())?.theta;
    let n = g.n();
    let per = |x: f64| if n == 0 { 0.0 } else { x / n as f64 };
    Ok(GapReport {
        n,
        alpha,
        alpha_star,
        theta,
        alpha_over_n: per(alpha as f64),
        theta_over_n: per(theta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ksets::{ks18_vectors, orthogonality_graph};

    fn ks18() -> ExclusivityGraph {
        orthogonality_graph(&ks18_vectors()).unwrap()
    }

    /// Exhaustive oracle over all 2^n subsets.
    fn brute_alpha(g: &ExclusivityGraph) -> usize {
        (0u64..1 << g.n())
            .filter(|&m| g.is_independent(m))
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn alpha_examples() {
        let r = independence_number(&ks18()).unwrap();
        assert_eq!(r.alpha, 4);
        assert_eq!(r.witness.len(), 4);
        let g = ks18();
        assert!(g.is_independent(g.mask_of(&r.witness).unwrap()));
        assert_eq!(independence_number(&ExclusivityGraph::complete(4)).unwrap().alpha, 1);
        assert_eq!(independence_number(&ExclusivityGraph::edgeless(5)).unwrap().alpha, 5);
    }

    #[test]
    fn alpha_matches_brute_force_on_ks18() {
        assert_eq!(brute_alpha(&ks18()), 4);
    }

    #[test]
    fn alpha_witness_is_lexicographically_first() {
        // Path 1-2-3-4: maximum independent sets {1,3}, {1,4}, {2,4}.
        let r = independence_number(&ExclusivityGraph::path(4)).unwrap();
        assert_eq!(r.witness, vec![1, 3]);
    }

    #[test]
    fn too_large_for_exact_mode() {
        let g = ExclusivityGraph::edgeless(41);
        assert_eq!(
            independence_number(&g).unwrap_err().to_string(),
            "instance too large for exact mode (n = 41, limit = 40)"
        );
    }

    #[test]
    fn clique_examples() {
        let cliques = maximal_cliques(&ks18());
        assert_eq!(cliques.iter().filter(|c| c.len() == 4).count(), 9);
        // Triangles such as {1, 2, 18} take each edge from a different basis.
        assert_eq!(cliques.iter().filter(|c| c.len() == 3).count(), 6);
        assert_eq!(cliques.iter().filter(|c| c.len() == 2).count(), 9);
        assert_eq!(cliques.len(), 24);
        assert!(cliques.contains(&Clique { members: vec![1, 2, 18] }));
        assert_eq!(cliques[0].members, vec![1, 2, 3, 4]);

        let tri = maximal_cliques(&ExclusivityGraph::complete(3));
        assert_eq!(tri, vec![Clique { members: vec![1, 2, 3] }]);

        let p3 = maximal_cliques(&ExclusivityGraph::path(3));
        assert_eq!(
            p3,
            vec![Clique { members: vec![1, 2] }, Clique { members: vec![2, 3] }]
        );
    }

    #[test]
    fn isolated_vertices_are_singleton_cliques() {
        let g = ExclusivityGraph::edgeless(3);
        assert_eq!(maximal_cliques(&g).len(), 3);
    }

    #[test]
    fn gap_reports() {
        let r = classical_quantum_gap(&ks18()).unwrap();
        assert_eq!((r.n, r.alpha), (18, 4));
        assert!((r.alpha_star - 4.5).abs() < 1e-12);
        assert!((r.theta - 4.5).abs() < 1e-6);
        assert!((r.alpha_over_n - 4.0 / 18.0).abs() < 1e-12);
        assert!((r.theta_over_n - 0.25).abs() < 1e-6);

        let k4 = classical_quantum_gap(&ExclusivityGraph::complete(4)).unwrap();
        assert_eq!(k4.alpha, 1);
        assert!((k4.alpha_star - 1.0).abs() < 1e-12 && (k4.theta - 1.0).abs() < 1e-6);
        assert!((k4.alpha_over_n - 0.25).abs() < 1e-12);

        let e3 = classical_quantum_gap(&ExclusivityGraph::edgeless(3)).unwrap();
        assert_eq!(e3.alpha, 3);
        assert!((e3.alpha_star - 3.0).abs() < 1e-12 && (e3.theta - 3.0).abs() < 1e-6);
        assert!((e3.theta_over_n - 1.0).abs() < 1e-6);
    }
}

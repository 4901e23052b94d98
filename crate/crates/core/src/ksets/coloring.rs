//! Backtracking search for a noncontextual 0/1 assignment.
//!
//! Constraint (i): no edge has both endpoints assigned 1.
//! Constraint (ii): every basis has exactly one member assigned 1.

use serde::Serialize;

use super::Basis;
use crate::classical::Assignment;
use crate::graph::ExclusivityGraph;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Partial assignments visited.
    pub nodes: u64,
    /// Branches refuted by a constraint.
    pub conflicts: u64,
    pub max_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Colorability {
    /// No admissible assignment exists.
    Uncolorable(SearchStats),
    Colorable {
        assignment: Assignment,
        stats: SearchStats,
    },
}

impl Colorability {
    pub fn is_uncolorable(&self) -> bool {
        matches!(self, Colorability::Uncolorable(_))
    }

    pub fn stats(&self) -> &SearchStats {
        match self {
            Colorability::Uncolorable(s) => s,
            Colorability::Colorable { stats, .. } => stats,
        }
    }
}

struct Solver<'a> {
    g: &'a ExclusivityGraph,
    /// Basis membership as index bitmasks.
    bases: Vec<u64>,
    /// Bases containing each vertex index.
    incident: Vec<Vec<usize>>,
    order: Vec<usize>,
    ones: u64,
    zeros: u64,
    stats: SearchStats,
}

impl Solver<'_> {
    fn consistent(&self, v: usize) -> bool {
        let bit = 1u64 << v;
        if self.ones & bit != 0 {
            if self.g.neighbors(v) & self.ones != 0 {
                return false;
            }
            for &b in &self.incident[v] {
                if (self.bases[b] & self.ones).count_ones() > 1 {
                    return false;
                }
            }
        } else {
            for &b in &self.incident[v] {
                let members = self.bases[b];
                if members & self.ones == 0 && members & !self.zeros == 0 {
                    return false;
                }
            }
        }
        true
    }

    fn search(&mut self, depth: usize) -> bool {
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        if depth == self.order.len() {
            return true;
        }
        let v = self.order[depth];
        let bit = 1u64 << v;
        for value in [true, false] {
            if value {
                self.ones |= bit;
            } else {
                self.zeros |= bit;
            }
            if self.consistent(v) {
                if self.search(depth + 1) {
                    return true;
                }
            } else {
                self.stats.conflicts += 1;
            }
            self.ones &= !bit;
            self.zeros &= !bit;
        }
        false
    }
}

/// Decides whether a 0/1 assignment satisfying both conditions exists.
///
/// Vertices are branched in order of decreasing degree (ties by label), trying
/// 1 before 0, so the search and its statistics are deterministic.
pub fn verify_ks_uncolorability(g: &ExclusivityGraph, bases: &[Basis]) -> Colorability {
    let n = g.n();
    let mut basis_masks = Vec::with_capacity(bases.len());
    let mut incident = vec![Vec::new(); n];
    for basis in bases {
        let mask = basis
            .members
            .iter()
            .filter_map(|&l| g.index_of(l))
            .fold(0u64, |m, i| m | 1 << i);
        let idx = basis_masks.len();
        basis_masks.push(mask);
        for i in crate::graph::iter_bits(mask) {
            incident[i].push(idx);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(g.label(a).cmp(&g.label(b))));

    // A basis with no members in the graph can never receive its required 1.
    if basis_masks.iter().any(|&m| m == 0) {
        return Colorability::Uncolorable(SearchStats::default());
    }

    let mut solver = Solver {
        g,
        bases: basis_masks,
        incident,
        order,
        ones: 0,
        zeros: 0,
        stats: SearchStats::default(),
    };
    if solver.search(0) {
        let values = (0..n).map(|i| (g.label(i), solver.ones >> i & 1 == 1)).collect();
        Colorability::Colorable {
            assignment: Assignment { values },
            stats: solver.stats,
        }
    } else {
        Colorability::Uncolorable(solver.stats)
    }
}

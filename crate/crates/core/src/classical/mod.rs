//! Noncontextual deterministic models: 0/1 assignments and box strategies.

mod boxes;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use boxes::{construct_box_strategy, validate_box_strategy, BoxStrategy, StrategyReport};

use crate::error::{Error, Result};
use crate::graph::ExclusivityGraph;
use crate::invariants::independence_number;

/// Deterministic answers, vertex label → yes (`true`) / no (`false`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub values: BTreeMap<u32, bool>,
}

impl Assignment {
    /// Yes exactly on `yes`, no on every other vertex of `g`.
    pub fn indicator(g: &ExclusivityGraph, yes: &[u32]) -> Self {
        Assignment {
            values: g.labels().iter().map(|&l| (l, yes.contains(&l))).collect(),
        }
    }

    pub fn all_zero(g: &ExclusivityGraph) -> Self {
        Self::indicator(g, &[])
    }

    pub fn get(&self, label: u32) -> bool {
        self.values.get(&label).copied().unwrap_or(false)
    }

    /// Rejects the first edge (in lexicographic order) with both ends yes.
    pub fn check_admissible(&self, g: &ExclusivityGraph) -> Result<()> {
        for (a, b) in g.labelled_edges() {
            if self.get(a) && self.get(b) {
                return Err(Error::InadmissibleAssignment(a, b));
            }
        }
        Ok(())
    }
}

/// Number of yes answers of an admissible assignment.
pub fn classical_sigma(g: &ExclusivityGraph, a: &Assignment) -> Result<usize> {
    a.check_admissible(g)?;
    Ok(g.labels().iter().filter(|&&l| a.get(l)).count())
}

/// Best deterministic Σ: α(G), with a maximum independent set as witness.
pub fn max_classical_sigma(g: &ExclusivityGraph) -> Result<(usize, Assignment)> {
    let mis = independence_number(g)?;
    Ok((mis.alpha, Assignment::indicator(g, &mis.witness)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ksets::{ks18_vectors, orthogonality_graph};

    fn ks18() -> ExclusivityGraph {
        orthogonality_graph(&ks18_vectors()).unwrap()
    }

    #[test]
    fn sigma_examples() {
        let g = ks18();
        assert_eq!(classical_sigma(&g, &Assignment::all_zero(&g)).unwrap(), 0);
        let (best, witness) = max_classical_sigma(&g).unwrap();
        assert_eq!(best, 4);
        assert_eq!(classical_sigma(&g, &witness).unwrap(), 4);
        let bad = Assignment::indicator(&g, &[1, 2]);
        let err = classical_sigma(&g, &bad).unwrap_err();
        assert_eq!(err, Error::InadmissibleAssignment(1, 2));
        assert!(err.to_string().contains("{1, 2}"));
    }

    #[test]
    fn max_sigma_on_trivial_graphs() {
        assert_eq!(max_classical_sigma(&ExclusivityGraph::complete(4)).unwrap().0, 1);
        assert_eq!(max_classical_sigma(&ExclusivityGraph::edgeless(18)).unwrap().0, 18);
    }

    #[test]
    fn no_admissible_assignment_beats_four() {
        let g = ks18();
        for mask in 0u64..1 << 18 {
            if g.is_independent(mask) {
                let a = Assignment::indicator(&g, &g.labels_of(mask));
                assert!(classical_sigma(&g, &a).unwrap() <= 4);
            }
        }
    }
}

//! The 18-test Kochen-Specker set in dimension four.

mod catalog;
mod coloring;
mod document;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use catalog::{catalog_state, state_catalog, KsCatalogEntry, StateCode, PSI};
pub use coloring::{verify_ks_uncolorability, Colorability, SearchStats};
pub use document::{KsSetDocument, VertexRecord};

use crate::algebra::{HermitianOperator, Projector, QMatrix};
use crate::error::{Error, Result};
use crate::graph::{iter_bits, ExclusivityGraph};

/// Number of pairwise exclusivity relations quoted in the experiment's prose.
/// The vectors themselves give 63; both numbers are reported, neither is assumed.
pub const QUOTED_EXCLUSIVITY_RELATIONS: usize = 42;

/// A yes-no test given by an integer vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KsVector {
    pub id: u32,
    pub components: Vec<i64>,
}

impl KsVector {
    pub fn new(id: u32, components: Vec<i64>) -> Self {
        KsVector { id, components }
    }

    pub fn dot(&self, other: &KsVector) -> i64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn projector(&self) -> Result<Projector> {
        Projector::from_integers(&self.components)
    }
}

const KS18: [[i64; 4]; 18] = [
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 1, 1],
    [0, 0, 1, -1],
    [1, -1, 0, 0],
    [1, 1, -1, -1],
    [1, 1, 1, 1],
    [1, -1, 1, -1],
    [1, 0, -1, 0],
    [0, 1, 0, -1],
    [1, 0, 1, 0],
    [1, 1, -1, 1],
    [-1, 1, 1, 1],
    [1, 1, 1, -1],
    [1, 0, 0, 1],
    [0, 1, -1, 0],
    [0, 1, 1, 0],
    [0, 0, 0, 1],
];

/// States 19–24: the six extra eigenstates that complete the measurement contexts.
const EXTRA: [[i64; 4]; 6] = [
    [0, 0, 1, 0],
    [1, 1, 0, 0],
    [0, 1, 0, 1],
    [1, -1, -1, 1],
    [1, -1, 1, 1],
    [1, 0, 0, -1],
];

/// The 18 vectors `v_1 … v_18`, in id order.
pub fn ks18_vectors() -> Vec<KsVector> {
    KS18.iter()
        .enumerate()
        .map(|(i, c)| KsVector::new(i as u32 + 1, c.to_vec()))
        .collect()
}

/// The auxiliary vectors `v_19 … v_24`.
pub fn extra_vectors() -> Vec<KsVector> {
    EXTRA
        .iter()
        .enumerate()
        .map(|(i, c)| KsVector::new(i as u32 + 19, c.to_vec()))
        .collect()
}

/// Vectors `v_1 … v_24`.
pub fn all_vectors() -> Vec<KsVector> {
    let mut v = ks18_vectors();
    v.extend(extra_vectors());
    v
}

fn check_vectors(vectors: &[KsVector]) -> Result<usize> {
    let dim = vectors.first().map(|v| v.components.len()).unwrap_or(0);
    for v in vectors {
        if v.components.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.components.len(),
            });
        }
        if v.components.iter().all(|&c| c == 0) {
            return Err(Error::DegenerateVector);
        }
    }
    Ok(dim)
}

/// Orthogonality graph: an edge wherever the integer dot product vanishes.
pub fn orthogonality_graph(vectors: &[KsVector]) -> Result<ExclusivityGraph> {
    check_vectors(vectors)?;
    let mut g = ExclusivityGraph::new(vectors.iter().map(|v| v.id).collect())?;
    for i in 0..vectors.len() {
        for j in (i + 1)..vectors.len() {
            if vectors[i].dot(&vectors[j]) == 0 {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

/// A complete orthogonal basis drawn from the vector set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Basis {
    pub members: Vec<u32>,
}

impl Basis {
    pub fn new(mut members: Vec<u32>) -> Self {
        members.sort_unstable();
        Basis { members }
    }

    pub fn contains(&self, id: u32) -> bool {
        self.members.contains(&id)
    }
}

fn projector_map(vectors: &[KsVector]) -> Result<BTreeMap<u32, Projector>> {
    vectors.iter().map(|v| Ok((v.id, v.projector()?))).collect()
}

/// All `d`-cliques of `g` whose projectors sum exactly to the identity.
pub fn find_bases(g: &ExclusivityGraph, vectors: &[KsVector]) -> Result<Vec<Basis>> {
    let dim = check_vectors(vectors)?;
    if dim == 0 {
        return Ok(Vec::new());
    }
    let projectors = projector_map(vectors)?;
    let identity = QMatrix::identity(dim);
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(dim);
    extend_cliques(g, 0, g.all_mask(), dim, &mut stack, &mut |members| {
        let labels: Vec<u32> = members.iter().map(|&i| g.label(i)).collect();
        let sum = labels
            .iter()
            .filter_map(|l| projectors.get(l))
            .fold(QMatrix::zeros(dim), |acc, p| &acc + p.exact());
        if labels.iter().all(|l| projectors.contains_key(l)) && sum == identity {
            out.push(Basis::new(labels));
        }
    });
    out.sort();
    Ok(out)
}

/// Enumerates all cliques of exactly `size` vertices, members in increasing index order.
fn extend_cliques(
    g: &ExclusivityGraph,
    start: usize,
    candidates: u64,
    size: usize,
    stack: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if stack.len() == size {
        emit(stack);
        return;
    }
    let allowed = candidates & !((1u64 << start) - 1);
    for v in iter_bits(allowed) {
        stack.push(v);
        extend_cliques(g, v + 1, candidates & g.neighbors(v), size, stack, emit);
        stack.pop();
    }
}

/// `Σ_i |v_i⟩⟨v_i| / ⟨v_i|v_i⟩` as an exact operator.
pub fn operator_completeness(vectors: &[KsVector]) -> Result<HermitianOperator> {
    let dim = check_vectors(vectors)?;
    let mut sum = QMatrix::zeros(dim);
    for v in vectors {
        sum = &sum + v.projector()?.exact();
    }
    HermitianOperator::new(sum)
}

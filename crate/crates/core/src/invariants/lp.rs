//! Fractional packing number: max Σ w_i over w ∈ [0,1]^n with Σ_{i∈c} w_i ≤ 1
//! for every maximal clique c.
//!
//! Solved with a dense tableau simplex (Bland's rule). Graphs with at most
//! `EXACT_LP_LIMIT` vertices are solved over the rationals; larger ones in
//! floating point.

use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{maximal_clique_masks, Clique};
use crate::graph::{iter_bits, ExclusivityGraph};

/// Feasibility tolerance for the floating-point LP and for weight checks.
pub const TOL_LP: f64 = 1e-9;

/// Largest vertex count solved with exact rational arithmetic.
pub const EXACT_LP_LIMIT: usize = 24;

pub(crate) trait LpScalar:
    Clone
    + Zero
    + One
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn is_pos(&self) -> bool;
    fn to_f64(&self) -> f64;
}

impl LpScalar for BigRational {
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl LpScalar for f64 {
    fn is_pos(&self) -> bool {
        *self > TOL_LP
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Maximises `c·x` subject to `A x ≤ b`, `x ≥ 0`, with `b ≥ 0` (the origin is feasible).
/// Returns the optimal `x` and objective, or `None` when unbounded.
pub(crate) fn simplex_max<T: LpScalar>(a: &[Vec<T>], b: &[T], c: &[T]) -> Option<(Vec<T>, T)> {
    let m = a.len();
    let n = c.len();
    let width = n + m + 1;
    // Rows 0..m: constraints with slacks; last row: reduced costs (-c).
    let mut t: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    for (i, row) in a.iter().enumerate() {
        let mut r = vec![T::zero(); width];
        r[..n].clone_from_slice(row);
        r[n + i] = T::one();
        r[width - 1] = b[i].clone();
        t.push(r);
    }
    let mut obj = vec![T::zero(); width];
    for (j, cj) in c.iter().enumerate() {
        obj[j] = T::zero() - cj.clone();
    }
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        // Bland: lowest-index column with negative reduced cost.
        let Some(enter) = (0..n + m).find(|&j| (T::zero() - t[m][j].clone()).is_pos()) else {
            break;
        };
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            if !t[i][enter].is_pos() {
                continue;
            }
            let ratio = t[i][width - 1].clone() / t[i][enter].clone();
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (row, _) = leave?;
        let pivot = t[row][enter].clone();
        for v in t[row].iter_mut() {
            *v = v.clone() / pivot.clone();
        }
        let pivot_row = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[enter].clone();
            if f.is_zero() {
                continue;
            }
            for (v, p) in r.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * p.clone();
            }
        }
        basis[row] = enter;
    }
    let mut x = vec![T::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].clone();
        }
    }
    Some((x, t[m][width - 1].clone()))
}

/// Per-vertex weights, indexed like the graph's vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightVector {
    pub labels: Vec<u32>,
    pub w: Vec<f64>,
    /// Exact weights as `"p/q"` strings when the rational solver was used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<String>>,
}

impl WeightVector {
    /// Largest violation of `0 ≤ w_i ≤ 1` and of the clique constraints.
    pub fn max_violation(&self, g: &ExclusivityGraph, constraints: &[Clique]) -> f64 {
        let mut worst: f64 = 0.0;
        for &x in &self.w {
            worst = worst.max(-x).max(x - 1.0);
        }
        for c in constraints {
            let s: f64 = c
                .members
                .iter()
                .filter_map(|&l| g.index_of(l))
                .map(|i| self.w[i])
                .sum();
            worst = worst.max(s - 1.0);
        }
        worst
    }

    pub fn total(&self) -> f64 {
        self.w.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FractionalPacking {
    pub value: f64,
    /// Exact optimum as `"p/q"` (or an integer) when solved over the rationals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_value: Option<String>,
    pub weights: WeightVector,
    /// The clique constraints used (all maximal cliques).
    pub constraints: Vec<Clique>,
}

impl FractionalPacking {
    pub fn exact_ratio(&self) -> Option<BigRational> {
        let s = self.exact_value.as_ref()?;
        let mut parts = s.split('/');
        let num: BigInt = parts.next()?.parse().ok()?;
        let den: BigInt = parts.next().map(|d| d.parse().ok()).unwrap_or(Some(BigInt::one()))?;
        Some(BigRational::new(num, den))
    }
}

fn ratio_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn build_system<T: LpScalar>(g: &ExclusivityGraph, cliques: &[u64]) -> (Vec<Vec<T>>, Vec<T>, Vec<T>) {
    let n = g.n();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for &mask in cliques {
        let mut row = vec![T::zero(); n];
        for i in iter_bits(mask) {
            row[i] = T::one();
        }
        a.push(row);
        b.push(T::one());
    }
    for i in 0..n {
        let mut row = vec![T::zero(); n];
        row[i] = T::one();
        a.push(row);
        b.push(T::one());
    }
    (a, b, vec![T::one(); n])
}

/// Fractional packing number over all maximal-clique constraints.
pub fn fractional_packing(g: &ExclusivityGraph) -> FractionalPacking {
    let masks = maximal_clique_masks(g);
    let constraints: Vec<Clique> = super::maximal_cliques(g);
    let labels = g.labels().to_vec();
    if g.n() <= EXACT_LP_LIMIT {
        let (a, b, c) = build_system::<BigRational>(g, &masks);
        let (x, value) = simplex_max(&a, &b, &c).expect("bounded: every w_i ≤ 1");
        FractionalPacking {
            value: LpScalar::to_f64(&value),
            exact_value: Some(ratio_string(&value)),
            weights: WeightVector {
                labels,
                w: x.iter().map(LpScalar::to_f64).collect(),
                exact: Some(x.iter().map(ratio_string).collect()),
            },
            constraints,
        }
    } else {
        let (a, b, c) = build_system::<f64>(g, &masks);
        let (x, value) = simplex_max(&a, &b, &c).expect("bounded: every w_i ≤ 1");
        FractionalPacking {
            value,
            exact_value: None,
            weights: WeightVector {
                labels,
                w: x,
                exact: None,
            },
            constraints,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ksets::{ks18_vectors, orthogonality_graph};

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ks18_is_nine_halves_exactly() {
        let g = orthogonality_graph(&ks18_vectors()).unwrap();
        let fp = fractional_packing(&g);
        assert_eq!(fp.exact_ratio().unwrap(), ratio(9, 2));
        assert_eq!(fp.exact_value.as_deref(), Some("9/2"));
        assert!(fp.weights.max_violation(&g, &fp.constraints) <= 0.0);
        assert!((fp.weights.total() - 4.5).abs() < 1e-15);
    }

    #[test]
    fn uniform_quarter_weights_are_optimal_on_ks18() {
        let g = orthogonality_graph(&ks18_vectors()).unwrap();
        let fp = fractional_packing(&g);
        let uniform = WeightVector {
            labels: g.labels().to_vec(),
            w: vec![0.25; 18],
            exact: None,
        };
        assert!(uniform.max_violation(&g, &fp.constraints) <= 0.0);
        assert_eq!(uniform.total(), fp.value);
    }

    #[test]
    fn small_graphs() {
        assert_eq!(fractional_packing(&ExclusivityGraph::complete(4)).value, 1.0);
        // Oracle for C5: uniform 1/2 is feasible (value 5/2) and summing the
        // five edge constraints gives 2 Σw ≤ 5, so 5/2 is optimal.
        let c5 = fractional_packing(&ExclusivityGraph::cycle(5));
        assert_eq!(c5.exact_ratio().unwrap(), ratio(5, 2));
        assert_eq!(fractional_packing(&ExclusivityGraph::edgeless(3)).value, 3.0);
    }

    #[test]
    fn float_path_agrees_with_exact_path() {
        let g = ExclusivityGraph::cycle(7);
        let masks = maximal_clique_masks(&g);
        let (a, b, c) = build_system::<f64>(&g, &masks);
        let (_, v) = simplex_max(&a, &b, &c).unwrap();
        assert!((v - 3.5).abs() < 1e-9);
        assert_eq!(fractional_packing(&g).exact_ratio().unwrap(), ratio(7, 2));
    }

    #[test]
    fn large_graph_uses_float_solver() {
        let g = ExclusivityGraph::cycle(25);
        let fp = fractional_packing(&g);
        assert!(fp.exact_value.is_none());
        assert!((fp.value - 12.5).abs() < 1e-9);
        assert!(fp.weights.max_violation(&g, &fp.constraints) <= TOL_LP);
    }
}

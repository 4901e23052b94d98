//! Linear algebra for small Hermitian operators, projectors and density matrices.
//!
//! Two representations coexist. Objects built from integer vectors or Pauli
//! products ([`Projector`], [`HermitianOperator`]) carry an exact
//! complex-rational matrix; generic states ([`PureState`], [`DensityMatrix`])
//! are floating point.

mod dense;
mod eigen;
pub mod exact;

use std::fmt;

use num_complex::{Complex, Complex64};
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

pub use dense::ComplexMatrix;
pub use eigen::{hermitian_eigenvalues, symmetric_eigenvalues};
pub use exact::{QComplex, QMatrix};

use crate::error::{Error, Result};

/// Default absolute tolerance for floating-point assertions.
pub const TOL_ALG: f64 = 1e-12;

/// Hermitian operator with exact entries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HermitianOperator {
    matrix: QMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: QMatrix) -> Result<Self> {
        if !matrix.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        Ok(HermitianOperator { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator {
            matrix: QMatrix::identity(dim),
        }
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_involution(&self) -> bool {
        &self.matrix * &self.matrix == QMatrix::identity(self.dim())
    }

    pub fn commutes_with(&self, other: &HermitianOperator) -> bool {
        &self.matrix * &other.matrix == &other.matrix * &self.matrix
    }

    pub fn to_float(&self) -> ComplexMatrix {
        self.matrix.to_float()
    }
}

/// Orthogonal projector with exact entries.
#[derive(Clone)]
pub struct Projector {
    exact: QMatrix,
    rank: usize,
    float: ComplexMatrix,
}

// The float view is derived from the exact one; equality is decided exactly.
impl PartialEq for Projector {
    fn eq(&self, other: &Self) -> bool {
        self.exact == other.exact
    }
}

impl Eq for Projector {}

impl Projector {
    /// Validates idempotence and Hermiticity exactly.
    pub fn from_exact(m: QMatrix) -> Result<Self> {
        if !m.is_hermitian() {
            return Err(Error::NotProjector("not Hermitian".into()));
        }
        if &m * &m != m {
            return Err(Error::NotProjector("not idempotent".into()));
        }
        let tr = m.trace();
        if !tr.im.is_zero() || !tr.re.is_integer() {
            return Err(Error::NotProjector(format!("trace {tr} is not an integer")));
        }
        let rank = tr.re.to_integer() as usize;
        let float = m.to_float();
        Ok(Projector {
            exact: m,
            rank,
            float,
        })
    }

    /// `|v⟩⟨v| / ⟨v|v⟩` for a vector with Gaussian-integer components.
    pub fn from_vector(v: &[Complex<i64>]) -> Result<Self> {
        let norm2: i64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0 {
            return Err(Error::DegenerateVector);
        }
        let n = v.len();
        let denom = Rational64::from_integer(norm2);
        let mut m = QMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let z = v[i] * v[j].conj();
                m[(i, j)] = Complex::new(
                    Rational64::from_integer(z.re) / denom,
                    Rational64::from_integer(z.im) / denom,
                );
            }
        }
        let float = m.to_float();
        Ok(Projector {
            exact: m,
            rank: 1,
            float,
        })
    }

    pub fn from_integers(v: &[i64]) -> Result<Self> {
        let v: Vec<Complex<i64>> = v.iter().map(|&x| Complex::new(x, 0)).collect();
        Self::from_vector(&v)
    }

    pub fn zero(dim: usize) -> Self {
        Projector {
            exact: QMatrix::zeros(dim),
            rank: 0,
            float: ComplexMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Projector {
            exact: QMatrix::identity(dim),
            rank: dim,
            float: ComplexMatrix::identity(dim),
        }
    }

    pub fn exact(&self) -> &QMatrix {
        &self.exact
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.float
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.exact.dim()
    }

    /// Exact `trace(P Q)`; zero iff the ranges are orthogonal.
    pub fn overlap(&self, other: &Projector) -> Rational64 {
        self.exact.trace_product(&other.exact).re
    }

    pub fn is_orthogonal_to(&self, other: &Projector) -> bool {
        self.overlap(other).is_zero()
    }

    /// The product `self · other` when it is again a projector (commuting factors).
    pub fn compose(&self, other: &Projector) -> Result<Projector> {
        Projector::from_exact(&self.exact * &other.exact)
    }
}

impl fmt::Debug for Projector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Projector(rank {}) {:?}", self.rank, self.exact)
    }
}

/// `projector_from_vector` over plain integer components.
pub fn projector_from_vector(v: &[i64]) -> Result<Projector> {
    Projector::from_integers(v)
}

/// The ±1 eigenprojectors `(𝕀 + O)/2` and `(𝕀 − O)/2` of an involution.
pub fn eigenprojectors_pm(op: &HermitianOperator) -> Result<(Projector, Projector)> {
    if !op.is_involution() {
        return Err(Error::NotInvolution);
    }
    let id = QMatrix::identity(op.dim());
    let half = exact::q(1, 2);
    let plus = (&id + op.matrix()).scale(half);
    let minus = (&id - op.matrix()).scale(half);
    Ok((Projector::from_exact(plus)?, Projector::from_exact(minus)?))
}

/// Unit vector of complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > TOL_ALG {
            return Err(Error::InvalidState(format!("norm² = {norm2}, expected 1")));
        }
        Ok(PureState { amplitudes })
    }

    /// Normalises any nonzero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 || !norm2.is_finite() {
            return Err(Error::DegenerateVector);
        }
        let s = 1.0 / norm2.sqrt();
        Ok(PureState {
            amplitudes: amplitudes.into_iter().map(|z| z * s).collect(),
        })
    }

    pub fn from_integers(v: &[i64]) -> Result<Self> {
        Self::normalized(v.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }
}

/// Which density-matrix property failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityViolation {
    NonFinite,
    NotHermitian,
    TraceNotOne,
    NegativeEigenvalue,
}

impl fmt::Display for DensityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensityViolation::NonFinite => "non-finite entry",
            DensityViolation::NotHermitian => "not Hermitian",
            DensityViolation::TraceNotOne => "trace is not 1",
            DensityViolation::NegativeEigenvalue => "negative eigenvalue",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityCheck {
    pub ok: bool,
    pub violation: Option<DensityViolation>,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

/// Checks Hermiticity, unit trace and positive semidefiniteness.
pub fn is_density_matrix(m: &ComplexMatrix, tol: f64) -> DensityCheck {
    let fail = |v, trace, min_eigenvalue| DensityCheck {
        ok: false,
        violation: Some(v),
        trace,
        min_eigenvalue,
    };
    if !m.is_finite() {
        return fail(DensityViolation::NonFinite, f64::NAN, f64::NAN);
    }
    let trace = m.trace();
    if !m.is_hermitian(tol) {
        return fail(DensityViolation::NotHermitian, trace.re, f64::NAN);
    }
    let ev = hermitian_eigenvalues(m);
    let min_eigenvalue = ev.first().copied().unwrap_or(0.0);
    if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
        return fail(DensityViolation::TraceNotOne, trace.re, min_eigenvalue);
    }
    if min_eigenvalue < -tol {
        return fail(DensityViolation::NegativeEigenvalue, trace.re, min_eigenvalue);
    }
    DensityCheck {
        ok: true,
        violation: None,
        trace: trace.re,
        min_eigenvalue,
    }
}

/// Validated density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, TOL_ALG)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let check = is_density_matrix(&m, tol);
        match check.violation {
            None => Ok(DensityMatrix { matrix: m }),
            Some(v) => Err(Error::InvalidState(v.to_string())),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::EmptyInput);
        };
        let dim = first.dim();
        let mut acc = ComplexMatrix::zeros(dim);
        let mut total = 0.0;
        for (w, rho) in parts {
            if *w < 0.0 {
                return Err(Error::InvalidState(format!("negative weight {w}")));
            }
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rho.dim(),
                });
            }
            acc = &acc + &rho.matrix.scale(*w);
            total += w;
        }
        if (total - 1.0).abs() > TOL_ALG {
            return Err(Error::InvalidState(format!("weights sum to {total}")));
        }
        Ok(DensityMatrix { matrix: acc })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Lüders update `P ρ P` without renormalisation.
    pub fn project(&self, p: &Projector) -> ComplexMatrix {
        let pm = p.matrix();
        &(pm * &self.matrix) * pm
    }
}

/// Born-rule probability `trace(ρ P)`, clamped to [0, 1] when within `TOL_ALG` of the boundary.
pub fn expectation(rho: &DensityMatrix, p: &Projector) -> Result<f64> {
    if rho.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: p.dim(),
        });
    }
    let v = rho.matrix().trace_product(p.matrix()).re;
    Ok(clamp_probability(v, TOL_ALG))
}

pub(crate) fn clamp_probability(v: f64, tol: f64) -> f64 {
    if v < 0.0 && v > -tol {
        0.0
    } else if v > 1.0 && v < 1.0 + tol {
        1.0
    } else {
        v
    }
}

pub(crate) fn rational_to_f64(r: &Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::exact::q;
    use super::*;

    fn pauli(name: char) -> QMatrix {
        let mut m = QMatrix::zeros(2);
        match name {
            'x' => {
                m[(0, 1)] = q(1, 1);
                m[(1, 0)] = q(1, 1);
            }
            'y' => {
                m[(0, 1)] = exact::qi(-1, 1);
                m[(1, 0)] = exact::qi(1, 1);
            }
            'z' => {
                m[(0, 0)] = q(1, 1);
                m[(1, 1)] = q(-1, 1);
            }
            _ => m = QMatrix::identity(2),
        }
        m
    }

    fn op(a: char, b: char) -> HermitianOperator {
        HermitianOperator::new(pauli(a).kron(&pauli(b))).unwrap()
    }

    #[test]
    fn basis_state_projector() {
        let p = projector_from_vector(&[1, 0, 0, 0]).unwrap();
        let expected = QMatrix::diagonal(&[q(1, 1), q(0, 1), q(0, 1), q(0, 1)]);
        assert_eq!(p.exact(), &expected);
        assert_eq!(p.rank(), 1);
    }

    #[test]
    fn bell_like_projector() {
        let p = projector_from_vector(&[1, 0, 0, 1]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let corner = matches!((i, j), (0, 0) | (0, 3) | (3, 0) | (3, 3));
                let want = if corner { q(1, 2) } else { q(0, 1) };
                assert_eq!(p.exact()[(i, j)], want, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn uniform_projector_matches_outer_product_oracle() {
        // Oracle: v vᵀ / (vᵀ v) computed entry by entry in floating point.
        let v = [1.0, 1.0, 1.0, 1.0];
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        let p = projector_from_vector(&[1, 1, 1, 1]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(p.exact()[(i, j)], q(1, 4));
                assert!((p.matrix()[(i, j)].re - v[i] * v[j] / norm2).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_vector_is_rejected() {
        assert_eq!(
            projector_from_vector(&[0, 0, 0, 0]).unwrap_err().to_string(),
            "degenerate vector"
        );
    }

    #[test]
    fn eigenprojectors_of_diagonal_observables() {
        let (p, m) = eigenprojectors_pm(&op('z', 'i')).unwrap();
        assert_eq!(p.exact(), &QMatrix::diagonal(&[q(1, 1), q(1, 1), q(0, 1), q(0, 1)]));
        assert_eq!(m.exact(), &QMatrix::diagonal(&[q(0, 1), q(0, 1), q(1, 1), q(1, 1)]));
        let (p, _) = eigenprojectors_pm(&op('i', 'z')).unwrap();
        assert_eq!(p.exact(), &QMatrix::diagonal(&[q(1, 1), q(0, 1), q(1, 1), q(0, 1)]));
    }

    #[test]
    fn eigenprojectors_of_xx_match_matrix_oracle() {
        // Oracle: (I + X⊗X)/2 written out by hand.
        let (p, m) = eigenprojectors_pm(&op('x', 'x')).unwrap();
        let h = q(1, 2);
        let z = q(0, 1);
        let expected = QMatrix::from_vec(
            4,
            vec![h, z, z, h, z, h, h, z, z, h, h, z, h, z, z, h],
        );
        assert_eq!(p.exact(), &expected);
        assert_eq!(&p.exact().clone() + m.exact(), QMatrix::identity(4));
        assert!((p.exact() * m.exact()).is_zero());
    }

    #[test]
    fn non_involution_is_rejected() {
        let two = HermitianOperator::new(QMatrix::identity(4).scale(q(2, 1))).unwrap();
        assert_eq!(
            eigenprojectors_pm(&two).unwrap_err().to_string(),
            "observable is not ±1-valued"
        );
    }

    #[test]
    fn expectation_examples() {
        let e1 = projector_from_vector(&[1, 0, 0, 0]).unwrap();
        let rho1 = PureState::from_integers(&[1, 0, 0, 0]).unwrap().density();
        assert_eq!(expectation(&rho1, &e1).unwrap(), 1.0);
        let mixed = DensityMatrix::maximally_mixed(4);
        let p = projector_from_vector(&[1, -1, 1, -1]).unwrap();
        assert!((expectation(&mixed, &p).unwrap() - 0.25).abs() < TOL_ALG);
        // |⟨e1|v7⟩|² = (1/2)² by hand.
        let rho7 = PureState::from_integers(&[1, 1, 1, 1]).unwrap().density();
        assert!((expectation(&rho7, &e1).unwrap() - 0.25).abs() < TOL_ALG);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let p = projector_from_vector(&[1, 0]).unwrap();
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(matches!(
            expectation(&rho, &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn density_checks() {
        assert!(is_density_matrix(&ComplexMatrix::identity(4).scale(0.25), TOL_ALG).ok);
        assert!(is_density_matrix(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0]), TOL_ALG).ok);
        let bad = is_density_matrix(&ComplexMatrix::from_real_diagonal(&[2.0, -1.0, 0.0, 0.0]), TOL_ALG);
        assert!(!bad.ok);
        assert_eq!(bad.violation.unwrap().to_string(), "negative eigenvalue");
        let not_unit = is_density_matrix(&ComplexMatrix::identity(4), TOL_ALG);
        assert_eq!(not_unit.violation, Some(DensityViolation::TraceNotOne));
    }
}

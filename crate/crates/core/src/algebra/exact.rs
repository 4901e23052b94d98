//! Exact complex-rational matrices.
//!
//! Everything built from integer vectors and Pauli products lives here, so
//! orthogonality and completeness identities are checked with zero tolerance.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};

use super::ComplexMatrix;

/// A complex number with rational real and imaginary parts.
pub type QComplex = Complex<Rational64>;

pub fn q(n: i64, d: i64) -> QComplex {
    Complex::new(Rational64::new(n, d), Rational64::zero())
}

pub fn qi(n: i64, d: i64) -> QComplex {
    Complex::new(Rational64::zero(), Rational64::new(n, d))
}

pub fn q_to_f64(z: &QComplex) -> Complex64 {
    Complex64::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// Dense square matrix over the Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    dim: usize,
    data: Vec<QComplex>,
}

impl QMatrix {
    pub fn zeros(dim: usize) -> Self {
        QMatrix {
            dim,
            data: vec![QComplex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = QComplex::one();
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics if `data` is not `dim * dim` long.
    pub fn from_vec(dim: usize, data: Vec<QComplex>) -> Self {
        assert_eq!(data.len(), dim * dim, "QMatrix::from_vec: wrong length");
        QMatrix { dim, data }
    }

    pub fn from_integer_rows(rows: &[&[i64]]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "QMatrix::from_integer_rows: ragged rows");
            data.extend(r.iter().map(|&x| q(x, 1)));
        }
        QMatrix { dim, data }
    }

    pub fn diagonal(entries: &[QComplex]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = *e;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[QComplex] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> QComplex {
        (0..self.dim).fold(QComplex::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn scale(&self, s: QComplex) -> Self {
        QMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &QMatrix) -> Self {
        let (a, b) = (self.dim, other.dim);
        let n = a * b;
        let mut out = Self::zeros(n);
        for i in 0..a {
            for j in 0..a {
                let s = self[(i, j)];
                if s.is_zero() {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        out[(i * b + k, j * b + l)] = s * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Real part of `trace(self · other)`, which is the overlap for Hermitian arguments.
    pub fn trace_product(&self, other: &QMatrix) -> QComplex {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = QComplex::zero();
        for i in 0..n {
            for k in 0..n {
                acc = acc + self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn to_float(&self) -> ComplexMatrix {
        ComplexMatrix::from_vec(self.dim, self.data.iter().map(q_to_f64).collect())
    }

    /// Rank of the matrix by exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let n = self.dim;
        let mut m = self.data.clone();
        let mut rank = 0;
        for col in 0..n {
            let Some(p) = (rank..n).find(|&r| !m[r * n + col].is_zero()) else {
                continue;
            };
            for c in 0..n {
                m.swap(rank * n + c, p * n + c);
            }
            let pivot = m[rank * n + col];
            for r in 0..n {
                if r == rank || m[r * n + col].is_zero() {
                    continue;
                }
                let f = m[r * n + col] / pivot;
                for c in 0..n {
                    let v = m[rank * n + c];
                    m[r * n + c] = m[r * n + c] - f * v;
                }
            }
            rank += 1;
        }
        rank
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = QComplex;
    fn index(&self, (i, j): (usize, usize)) -> &QComplex {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut QComplex {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.dim, rhs.dim);
        QMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.dim, rhs.dim);
        QMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = QMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

fn fmt_q(z: &QComplex) -> String {
    match (z.re.is_zero(), z.im.is_zero()) {
        (_, true) => z.re.to_string(),
        (true, false) => format!("{}i", z.im),
        (false, false) => format!("{}{:+}i", z.re, z.im),
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| fmt_q(&self[(i, j)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = QMatrix::identity(2);
        assert_eq!(i2.kron(&i2), QMatrix::identity(4));
    }

    #[test]
    fn rank_counts_independent_rows() {
        let m = QMatrix::from_integer_rows(&[&[1, 1, 0], &[2, 2, 0], &[0, 0, 3]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(QMatrix::identity(4).rank(), 4);
        assert_eq!(QMatrix::zeros(3).rank(), 0);
    }

    #[test]
    fn adjoint_conjugates() {
        let mut m = QMatrix::zeros(2);
        m[(0, 1)] = qi(1, 2);
        let a = m.adjoint();
        assert_eq!(a[(1, 0)], qi(-1, 2));
        assert!(!m.is_hermitian());
        let h = &m + &a;
        assert!(h.is_hermitian());
    }
}

//! Lovász number as a semidefinite program:
//! ϑ(G) = max ⟨J, X⟩ s.t. tr X = 1, X_ij = 0 for every edge ij, X ⪰ 0.
//!
//! Solved by a primal-dual interior-point method (HKM direction, Mehrotra
//! predictor-corrector). In standard form: min ⟨C, X⟩ with C = -J and
//! constraints A_0 = I (b = 1), A_e = E_ij + E_ji (b = 0).

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ExclusivityGraph;

/// Largest graph handed to the SDP solver.
pub const SDP_MAX_VERTICES: usize = 32;

const MAX_ITERATIONS: usize = 100;
const STEP_FRACTION: f64 = 0.95;
const STOP_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SdpSolution {
    /// Midpoint of the primal and dual objectives.
    pub value: f64,
    /// ⟨J, X⟩ at the final primal iterate (a lower bound up to infeasibility).
    pub primal: f64,
    /// Dual objective (an upper bound up to infeasibility).
    pub dual: f64,
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
}

struct Problem {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Problem {
    fn m(&self) -> usize {
        self.edges.len() + 1
    }

    /// A(W)_k = ⟨A_k, W⟩.
    fn apply(&self, w: &DMatrix<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m());
        out[0] = w.trace();
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            out[k + 1] = w[(a, b)] + w[(b, a)];
        }
        out
    }

    /// Aᵀ(y) = Σ_k y_k A_k.
    fn adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::identity(self.n, self.n) * y[0];
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            out[(a, b)] += y[k + 1];
            out[(b, a)] += y[k + 1];
        }
        out
    }

    fn rhs(&self) -> DVector<f64> {
        let mut b = DVector::zeros(self.m());
        b[0] = 1.0;
        b
    }

    /// Schur complement M_kl = ⟨A_k, X A_l Z⁻¹⟩.
    fn schur(&self, x: &DMatrix<f64>, zinv: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.m();
        let mut out = DMatrix::zeros(m, m);
        for l in 0..m {
            let w = if l == 0 {
                x * zinv
            } else {
                let (i, j) = self.edges[l - 1];
                x.column(i) * zinv.row(j) + x.column(j) * zinv.row(i)
            };
            out.set_column(l, &self.apply(&w));
        }
        out
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest α ≤ 1 keeping `x + α dx` positive definite, scaled by `STEP_FRACTION`.
fn step_length(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let Some(chol) = x.clone().cholesky() else {
        return 0.0;
    };
    let l = chol.l();
    let Some(linv) = l.try_inverse() else {
        return 0.0;
    };
    let scaled = symmetrize(&(&linv * dx * linv.transpose()));
    let min_eig = scaled.symmetric_eigenvalues().min();
    if min_eig >= 0.0 {
        1.0
    } else {
        (STEP_FRACTION * -1.0 / min_eig).min(1.0)
    }
}

struct Direction {
    dx: DMatrix<f64>,
    dy: DVector<f64>,
    dz: DMatrix<f64>,
}

#[allow(clippy::too_many_arguments)]
fn direction(
    p: &Problem,
    x: &DMatrix<f64>,
    zinv: &DMatrix<f64>,
    schur: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    rp: &DVector<f64>,
    rd: &DMatrix<f64>,
    sigma_mu: f64,
    corr: Option<&DMatrix<f64>>,
) -> Option<Direction> {
    // ΔX = σμZ⁻¹ − X − X ΔZ Z⁻¹ − Corr, with ΔZ = Rd − AᵀΔy.
    let mut base = zinv * sigma_mu - x - x * rd * zinv;
    if let Some(c) = corr {
        base -= c;
    }
    let dy = schur.solve(&(rp - p.apply(&base)))?;
    let dz = rd - p.adjoint(&dy);
    let mut dx = zinv * sigma_mu - x - x * &dz * zinv;
    if let Some(c) = corr {
        dx -= c;
    }
    Some(Direction {
        dx: symmetrize(&dx),
        dy,
        dz: symmetrize(&dz),
    })
}

/// Lovász number by interior-point SDP; graphs up to [`SDP_MAX_VERTICES`].
pub fn lovasz_theta_sdp(g: &ExclusivityGraph) -> Result<SdpSolution> {
    let n = g.n();
    if n > SDP_MAX_VERTICES {
        return Err(Error::TooLarge {
            n,
            limit: SDP_MAX_VERTICES,
        });
    }
    if n == 0 {
        return Ok(SdpSolution {
            value: 0.0,
            primal: 0.0,
            dual: 0.0,
            gap: 0.0,
            primal_infeasibility: 0.0,
            dual_infeasibility: 0.0,
            iterations: 0,
        });
    }
    let p = Problem {
        n,
        edges: g.edges(),
    };
    let c = -DMatrix::from_element(n, n, 1.0);
    let b = p.rhs();
    let nf = n as f64;

    let mut x = DMatrix::identity(n, n) / nf;
    let mut y = DVector::zeros(p.m());
    y[0] = -(nf + 1.0);
    let mut z = &c - p.adjoint(&y);

    let mut iterations = 0;
    loop {
        let rp = &b - p.apply(&x);
        let rd = &c - &z - p.adjoint(&y);
        let primal_obj = (&c).dot(&x);
        let dual_obj = b.dot(&y);
        let gap = (primal_obj - dual_obj).abs() / (1.0 + primal_obj.abs() + dual_obj.abs());
        let pinf = rp.norm();
        let dinf = rd.norm();
        if (gap < STOP_TOL && pinf < STOP_TOL && dinf < STOP_TOL) || iterations == MAX_ITERATIONS {
            if iterations == MAX_ITERATIONS && (gap > 1e-7 || pinf > 1e-7 || dinf > 1e-7) {
                return Err(Error::Sdp(format!(
                    "no convergence after {iterations} iterations (gap {gap:.2e})"
                )));
            }
            return Ok(SdpSolution {
                value: -(primal_obj + dual_obj) / 2.0,
                primal: -primal_obj,
                dual: -dual_obj,
                gap,
                primal_infeasibility: pinf,
                dual_infeasibility: dinf,
                iterations,
            });
        }
        iterations += 1;

        let zinv = z
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Sdp("dual iterate left the cone".into()))?
            .inverse();
        let mu = x.dot(&z) / nf;
        let schur = p.schur(&x, &zinv).lu();
        let solve_err = || Error::Sdp("singular Schur complement".into());

        let aff = direction(&p, &x, &zinv, &schur, &rp, &rd, 0.0, None).ok_or_else(solve_err)?;
        let ap = step_length(&x, &aff.dx);
        let ad = step_length(&z, &aff.dz);
        let mu_aff = (&x + &aff.dx * ap).dot(&(&z + &aff.dz * ad)) / nf;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        let corr = &aff.dx * &aff.dz * &zinv;

        let d = direction(&p, &x, &zinv, &schur, &rp, &rd, sigma * mu, Some(&corr))
            .ok_or_else(solve_err)?;
        let ap = step_length(&x, &d.dx);
        let ad = step_length(&z, &d.dz);
        x += &d.dx * ap;
        x = symmetrize(&x);
        y += &d.dy * ad;
        z += &d.dz * ad;
        z = symmetrize(&z);
    }
}

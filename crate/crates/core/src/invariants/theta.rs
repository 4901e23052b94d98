//! Lovász number ϑ(G) = max Σ_i |⟨ψ|v_i⟩|² over orthonormal representations.
//!
//! An explicit representation gives a lower bound; the fractional packing
//! number gives an upper bound. When the two meet the value is pinched
//! without an SDP solve.

use num_complex::Complex64;
use serde::Serialize;

use super::lp::fractional_packing;
use super::sdp::{lovasz_theta_sdp, SdpSolution};
use crate::algebra::{PureState, TOL_ALG};
use crate::error::{Error, Result};
use crate::graph::ExclusivityGraph;
use crate::ksets::KsVector;

/// Target accuracy for ϑ.
pub const TOL_SDP: f64 = 1e-6;

/// A handle |ψ⟩ and one unit vector per vertex, orthogonal on every edge.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaCertificate {
    handle: PureState,
    vectors: Vec<PureState>,
}

impl ThetaCertificate {
    /// Checks dimensions and orthogonality of adjacent vertices' vectors.
    pub fn new(g: &ExclusivityGraph, handle: PureState, vectors: Vec<PureState>) -> Result<Self> {
        if vectors.len() != g.n() {
            return Err(Error::DimensionMismatch {
                expected: g.n(),
                found: vectors.len(),
            });
        }
        for v in &vectors {
            if v.dim() != handle.dim() {
                return Err(Error::DimensionMismatch {
                    expected: handle.dim(),
                    found: v.dim(),
                });
            }
        }
        for (i, j) in g.edges() {
            let overlap = vectors[i].inner(&vectors[j]).norm();
            if overlap > TOL_ALG {
                return Err(Error::Graph(format!(
                    "vectors of adjacent vertices {} and {} overlap by {overlap:.3e}",
                    g.label(i),
                    g.label(j)
                )));
            }
        }
        Ok(ThetaCertificate { handle, vectors })
    }

    /// Certificate from integer vectors (normalised), one per vertex in order.
    pub fn from_vectors(g: &ExclusivityGraph, handle: PureState, vectors: &[KsVector]) -> Result<Self> {
        let states = vectors
            .iter()
            .map(|v| PureState::from_integers(&v.components))
            .collect::<Result<Vec<_>>>()?;
        Self::new(g, handle, states)
    }

    /// The umbrella representation of the 5-cycle, which attains √5.
    pub fn five_cycle_umbrella() -> Self {
        let cos2 = 1.0 / 5f64.sqrt();
        let (c, s) = (cos2.sqrt(), (1.0 - cos2).sqrt());
        let rib = |k: usize| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
            vec![c, s * phi.cos(), s * phi.sin()]
        };
        // Consecutive cycle vertices get ribs two steps apart, which are orthogonal.
        let vectors = (0..5)
            .map(|i| {
                let amps = rib(2 * i % 5).into_iter().map(|x| Complex64::new(x, 0.0)).collect();
                PureState::normalized(amps).expect("unit rib")
            })
            .collect();
        let handle = PureState::normalized(vec![Complex64::new(1.0, 0.0), 0.0.into(), 0.0.into()])
            .expect("unit handle");
        ThetaCertificate::new(&ExclusivityGraph::cycle(5), handle, vectors)
            .expect("umbrella ribs are orthogonal on the cycle")
    }

    pub fn handle(&self) -> &PureState {
        &self.handle
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    /// Σ_i |⟨ψ|v_i⟩|².
    pub fn value(&self) -> f64 {
        self.vectors
            .iter()
            .map(|v| self.handle.inner(v).norm_sqr())
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct ThetaOptions {
    pub certificate: Option<ThetaCertificate>,
    /// Fall back to the SDP when there is no certificate or the bounds do not meet.
    pub allow_sdp: bool,
    pub tol: f64,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        Self::sdp()
    }
}

impl ThetaOptions {
    pub fn sdp() -> Self {
        ThetaOptions {
            certificate: None,
            allow_sdp: true,
            tol: TOL_SDP,
        }
    }

    pub fn certificate(cert: ThetaCertificate, allow_sdp: bool) -> Self {
        ThetaOptions {
            certificate: Some(cert),
            allow_sdp,
            tol: TOL_SDP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaMethod {
    Certificate,
    Sdp,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaResult {
    pub theta: f64,
    pub method: ThetaMethod,
    /// Certificate value, when a certificate was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    /// Fractional packing number, when computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sdp: Option<SdpSolution>,
}

/// ϑ(G) by certificate pinching, else by SDP when allowed.
pub fn lovasz_theta(g: &ExclusivityGraph, opts: &ThetaOptions) -> Result<ThetaResult> {
    let tol = if opts.tol > 0.0 { opts.tol } else { TOL_SDP };
    let (mut lower, mut upper) = (None, None);
    if let Some(cert) = &opts.certificate {
        let lo = cert.value();
        let hi = fractional_packing(g).value;
        if (hi - lo).abs() <= tol {
            return Ok(ThetaResult {
                theta: hi,
                method: ThetaMethod::Certificate,
                lower: Some(lo),
                upper: Some(hi),
                sdp: None,
            });
        }
        lower = Some(lo);
        upper = Some(hi);
    }
    if !opts.allow_sdp {
        let hi = upper.unwrap_or_else(|| fractional_packing(g).value);
        return Err(Error::ThetaUndetermined {
            lower: lower.unwrap_or(0.0),
            upper: hi,
        });
    }
    let sol = lovasz_theta_sdp(g)?;
    Ok(ThetaResult {
        theta: sol.value,
        method: ThetaMethod::Sdp,
        lower,
        upper,
        sdp: Some(sol),
    })
}

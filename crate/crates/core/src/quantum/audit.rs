//! Empirical checks that a context behaves like a set of compatible observables
//! under sequential measurement.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{random_pure_state, sequence_probability, Context};
use crate::algebra::{expectation, DensityMatrix, TOL_ALG};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub context: String,
    pub states: usize,
    pub seed: u64,
    /// Largest change in any outcome probability when an earlier observable is measured again.
    pub repeat_deviation: f64,
    /// Largest difference between joint distributions of two orderings.
    pub order_deviation: f64,
    /// Largest difference between a single-observable marginal and its direct probability.
    pub marginal_deviation: f64,
    pub passed: bool,
}

const ORDERINGS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn bits(k: u8) -> [u8; 3] {
    [k >> 2 & 1, k >> 1 & 1, k & 1]
}

/// Joint distribution indexed by outcomes in the context's own order.
fn joint(rho: &DensityMatrix, ids: [u8; 3], order: [usize; 3]) -> Result<[f64; 8]> {
    let mut out = [0.0; 8];
    for (k, slot) in out.iter_mut().enumerate() {
        let o = bits(k as u8);
        let steps: Vec<(u8, u8)> = order.iter().map(|&i| (ids[i], o[i])).collect();
        *slot = sequence_probability(rho, &steps)?;
    }
    Ok(out)
}

/// Audits repeatability, order independence and marginal consistency over
/// `states` Haar-random pure states drawn from `seed`.
pub fn compatibility_audit(ctx: &Context, states: usize, seed: u64) -> Result<AuditReport> {
    let ids = ctx.ids();
    let obs = ctx.observables();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut repeat, mut order, mut marginal) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..states {
        let rho = random_pure_state(&mut rng).density();
        let reference = joint(&rho, ids, [0, 1, 2])?;
        for k in 0..8u8 {
            let o = bits(k);
            let base: Vec<(u8, u8)> = (0..3).map(|i| (ids[i], o[i])).collect();
            for again in 0..3 {
                for b in 0..2u8 {
                    let mut steps = base.clone();
                    steps.push((ids[again], b));
                    let p = sequence_probability(&rho, &steps)?;
                    let expected = if b == o[again] { reference[k as usize] } else { 0.0 };
                    repeat = repeat.max((p - expected).abs());
                }
            }
        }
        for ord in ORDERINGS {
            let dist = joint(&rho, ids, ord)?;
            for k in 0..8 {
                order = order.max((dist[k] - reference[k]).abs());
            }
            for (i, o) in obs.iter().enumerate() {
                for b in 0..2u8 {
                    let m: f64 = (0..8u8).filter(|&k| bits(k)[i] == b).map(|k| dist[k as usize]).sum();
                    let direct = expectation(&rho, &super::outcome_projector(o, b))?;
                    marginal = marginal.max((m - direct).abs());
                }
            }
        }
    }
    Ok(AuditReport {
        context: ctx.to_string(),
        states,
        seed,
        repeat_deviation: repeat,
        order_deviation: order,
        marginal_deviation: marginal,
        passed: repeat <= TOL_ALG && order <= TOL_ALG && marginal <= TOL_ALG,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::DEFAULT_SEED;

    #[test]
    fn inequality_contexts_pass() {
        for ctx in Context::inequality_contexts() {
            let r = compatibility_audit(&ctx, 100, DEFAULT_SEED).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn lueders_sequence_detects_incompatibility() {
        // Not a context, but the raw sequence machinery shows order dependence.
        let rho = crate::algebra::PureState::from_integers(&[1, 0, 0, 0]).unwrap().density();
        let zx = sequence_probability(&rho, &[(0, 1), (4, 1)]).unwrap();
        let xz = sequence_probability(&rho, &[(4, 1), (0, 1)]).unwrap();
        assert!((zx - 0.5).abs() < TOL_ALG);
        assert!((xz - 0.25).abs() < TOL_ALG);
    }
}

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::algebra::{ComplexMatrix, DensityMatrix, PureState};
use crate::error::{Error, Result};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 7;

/// Input-state noise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseChannel {
    None,
    /// `Vρ + (1 − V) I/d`.
    Visibility { v: f64 },
}

impl NoiseChannel {
    pub fn visibility(v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::VisibilityOutOfRange(v));
        }
        Ok(NoiseChannel::Visibility { v })
    }
}

pub fn apply_noise(rho: &DensityMatrix, ch: NoiseChannel) -> Result<DensityMatrix> {
    match ch {
        NoiseChannel::None => Ok(rho.clone()),
        NoiseChannel::Visibility { v } => {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::VisibilityOutOfRange(v));
            }
            let mixed = DensityMatrix::maximally_mixed(rho.dim());
            DensityMatrix::mixture(&[(v, rho), (1.0 - v, &mixed)])
        }
    }
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-random two-qubit pure state: four standard-normal complex amplitudes, normalised.
pub fn random_pure_state(rng: &mut impl Rng) -> PureState {
    let amps = (0..4).map(|_| gaussian(rng)).collect();
    PureState::normalized(amps).expect("nonzero with probability one")
}

/// Random full-rank mixed state `G G† / tr(G G†)` with `G` a complex Gaussian matrix.
pub fn random_mixed_state(rng: &mut impl Rng) -> DensityMatrix {
    let g = ComplexMatrix::from_vec(4, (0..16).map(|_| gaussian(rng)).collect());
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.scale(1.0 / tr).hermitian_part()).expect("positive by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{is_density_matrix, TOL_ALG};
    use crate::quantum::{sequential_probability, sigma, xi};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn visibility_extremes() {
        let rho = PureState::from_integers(&[1, 0, 0, 0]).unwrap().density();
        let same = apply_noise(&rho, NoiseChannel::visibility(1.0).unwrap()).unwrap();
        assert!(same.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        let mixed = apply_noise(&rho, NoiseChannel::visibility(0.0).unwrap()).unwrap();
        assert!(mixed.matrix().max_abs_diff(DensityMatrix::maximally_mixed(4).matrix()) < 1e-15);
        assert_eq!(NoiseChannel::visibility(1.5), Err(Error::VisibilityOutOfRange(1.5)));
    }

    #[test]
    fn noisy_v1() {
        let rho = PureState::from_integers(&[1, 0, 0, 0]).unwrap().density();
        let noisy = apply_noise(&rho, NoiseChannel::visibility(0.9).unwrap()).unwrap();
        assert!((sigma(&noisy).unwrap() - 4.5).abs() < TOL_ALG);
        let p = sequential_probability(&noisy, &"111|012".parse().unwrap()).unwrap();
        assert!((p - 0.925).abs() < TOL_ALG);
    }

    #[test]
    fn random_states_are_valid_and_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
        let mut b = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
        for _ in 0..50 {
            let m = random_mixed_state(&mut a);
            assert!(is_density_matrix(m.matrix(), TOL_ALG).ok);
            assert_eq!(m, random_mixed_state(&mut b));
            assert!((xi(&m).unwrap() - 4.5).abs() < 1e-12);
        }
    }
}

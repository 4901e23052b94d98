//! The 28 prepared states: `v_1 … v_24` and the mixtures `ρ_25 … ρ_28`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::all_vectors;
use crate::algebra::{DensityMatrix, PureState};
use crate::error::{Error, Result};

/// Catalog label: `v1 … v24` for pure states, `rho25 … rho28` for mixtures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateCode {
    Vector(u32),
    Mixture(u32),
}

impl StateCode {
    /// Position in the 1..=28 numbering.
    pub fn number(&self) -> u32 {
        match self {
            StateCode::Vector(n) | StateCode::Mixture(n) => *n,
        }
    }

    pub fn all() -> Vec<StateCode> {
        (1..=24)
            .map(StateCode::Vector)
            .chain((25..=28).map(StateCode::Mixture))
            .collect()
    }
}

impl fmt::Display for StateCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateCode::Vector(n) => write!(f, "v{n}"),
            StateCode::Mixture(n) => write!(f, "rho{n}"),
        }
    }
}

impl FromStr for StateCode {
    type Err = Error;

    /// Accepts `v7`, `v_7`, `v_{7}`, `rho28`, `rho_28`, `ρ_28`, case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_lowercase();
        let cleaned: String = lower
            .chars()
            .filter(|c| !matches!(c, '_' | '{' | '}' | ' '))
            .collect();
        let (prefix, digits) = if let Some(d) = cleaned.strip_prefix("rho") {
            ("rho", d)
        } else if let Some(d) = cleaned.strip_prefix('ρ') {
            ("rho", d)
        } else if let Some(d) = cleaned.strip_prefix('v') {
            ("v", d)
        } else {
            return Err(Error::UnknownState(s.to_string()));
        };
        let n: u32 = digits
            .parse()
            .map_err(|_| Error::UnknownState(s.to_string()))?;
        match (prefix, n) {
            ("v", 1..=24) => Ok(StateCode::Vector(n)),
            ("rho", 25..=28) => Ok(StateCode::Mixture(n)),
            _ => Err(Error::UnknownState(s.to_string())),
        }
    }
}

impl Serialize for StateCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StateCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug)]
pub struct KsCatalogEntry {
    pub code: StateCode,
    pub state: DensityMatrix,
    /// Integer components, for pure entries.
    pub components: Option<Vec<i64>>,
    pub description: String,
}

const DESCRIPTIONS: [&str; 24] = [
    "|H,+2>",
    "|H,-2>",
    "|V,h>",
    "|V,v>",
    "|H,v>",
    "|D,h>",
    "|A,h>",
    "|A,v>",
    "|D,+2>",
    "|D,-2>",
    "|A,+2>",
    "(|D,+2> + |A,-2>)/sqrt2",
    "(|A,-2> - |D,+2>)/sqrt2",
    "(|A,+2> + |D,-2>)/sqrt2",
    "psi1 = (|H,+2> + |V,-2>)/sqrt2",
    "psi3 = (|H,-2> - |V,+2>)/sqrt2",
    "psi4 = (|H,-2> + |V,+2>)/sqrt2",
    "|V,-2>",
    "|V,+2>",
    "|H,h>",
    "|A,-2>",
    "|D,v>",
    "(|A,+2> - |D,-2>)/sqrt2",
    "psi2 = (|H,+2> - |V,-2>)/sqrt2",
];

/// Weight on `|ψ_1⟩⟨ψ_1|` for each mixture; the remainder is split evenly over ψ_2..ψ_4.
const MIXTURE_WEIGHTS: [(u32, i64, i64, &str); 4] = [
    (25, 13, 16, "13/16 |psi1><psi1| + 1/16 sum_{j=2..4} |psij><psij|"),
    (26, 5, 8, "5/8 |psi1><psi1| + 1/8 sum_{j=2..4} |psij><psij|"),
    (27, 7, 16, "7/16 |psi1><psi1| + 3/16 sum_{j=2..4} |psij><psij|"),
    (28, 1, 4, "1/4 sum_{j=1..4} |psij><psij|"),
];

/// The Bell-like states ψ_1 … ψ_4 as integer vectors.
pub const PSI: [[i64; 4]; 4] = [[1, 0, 0, 1], [1, 0, 0, -1], [0, 1, -1, 0], [0, 1, 1, 0]];

/// All 28 catalog states, in numbering order.
pub fn state_catalog() -> Vec<KsCatalogEntry> {
    let mut out: Vec<KsCatalogEntry> = all_vectors()
        .into_iter()
        .map(|v| KsCatalogEntry {
            code: StateCode::Vector(v.id),
            state: PureState::from_integers(&v.components)
                .expect("catalog vectors are nonzero")
                .density(),
            description: DESCRIPTIONS[v.id as usize - 1].to_string(),
            components: Some(v.components),
        })
        .collect();
    let psi: Vec<DensityMatrix> = PSI
        .iter()
        .map(|c| PureState::from_integers(c).expect("nonzero").density())
        .collect();
    for (n, num, den, desc) in MIXTURE_WEIGHTS {
        let w1 = num as f64 / den as f64;
        let rest = (1.0 - w1) / 3.0;
        let parts = [(w1, &psi[0]), (rest, &psi[1]), (rest, &psi[2]), (rest, &psi[3])];
        out.push(KsCatalogEntry {
            code: StateCode::Mixture(n),
            state: DensityMatrix::mixture(&parts).expect("weights sum to one"),
            components: None,
            description: desc.to_string(),
        });
    }
    out
}

/// Looks a state up by code.
pub fn catalog_state(code: StateCode) -> Result<DensityMatrix> {
    state_catalog()
        .into_iter()
        .find(|e| e.code == code)
        .map(|e| e.state)
        .ok_or_else(|| Error::UnknownState(code.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{is_density_matrix, ComplexMatrix, TOL_ALG};

    #[test]
    fn codes_parse_in_all_spellings() {
        assert_eq!("v7".parse::<StateCode>().unwrap(), StateCode::Vector(7));
        assert_eq!("v_{24}".parse::<StateCode>().unwrap(), StateCode::Vector(24));
        assert_eq!("ρ_28".parse::<StateCode>().unwrap(), StateCode::Mixture(28));
        assert_eq!("rho25".parse::<StateCode>().unwrap(), StateCode::Mixture(25));
        assert!("v25".parse::<StateCode>().is_err());
        assert!("rho3".parse::<StateCode>().is_err());
        assert!("w1".parse::<StateCode>().is_err());
        assert_eq!(StateCode::Mixture(26).to_string(), "rho26");
    }

    #[test]
    fn catalog_has_28_valid_states() {
        let cat = state_catalog();
        assert_eq!(cat.len(), 28);
        for e in &cat {
            assert!(is_density_matrix(e.state.matrix(), TOL_ALG).ok, "{}", e.code);
        }
    }

    #[test]
    fn v24_is_psi2() {
        let rho = catalog_state(StateCode::Vector(24)).unwrap();
        let m = rho.matrix();
        assert!((m[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((m[(0, 3)].re + 0.5).abs() < 1e-15);
        assert!((m[(3, 3)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rho28_is_maximally_mixed() {
        let rho = catalog_state(StateCode::Mixture(28)).unwrap();
        assert!(rho.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale(0.25)) < 1e-15);
    }

    #[test]
    fn rho26_weights() {
        let rho = catalog_state(StateCode::Mixture(26)).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        // ⟨ψ1|ρ26|ψ1⟩ = 5/8
        let psi1 = PureState::from_integers(&PSI[0]).unwrap();
        let overlap = rho.matrix().trace_product(psi1.density().matrix()).re;
        assert!((overlap - 5.0 / 8.0).abs() < 1e-15);
    }
}

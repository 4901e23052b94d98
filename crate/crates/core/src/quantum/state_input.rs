//! State files: a catalog code, four amplitudes, or a 4×4 density matrix.
//!
//! ```json
//! {"code": "rho26"}
//! {"amplitudes": [[0.6, 0], [0, 0.8], 0, 0]}
//! {"matrix": [[0.5, 0, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0], [0.5, 0, 0, 0.5]]}
//! ```
//!
//! A complex entry is `[re, im]`; a plain number is real. Amplitudes are
//! normalised; matrices must already be valid density matrices.

use num_complex::Complex64;
use serde::Deserialize;

use crate::algebra::{ComplexMatrix, DensityMatrix, PureState};
use crate::error::{Error, Result};
use crate::ksets::{catalog_state, StateCode};

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(&self) -> Complex64 {
        match *self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    code: Option<String>,
    #[serde(default)]
    amplitudes: Option<Vec<Entry>>,
    #[serde(default)]
    matrix: Option<Vec<Vec<Entry>>>,
}

#[derive(Clone, Debug)]
pub struct StateInput {
    pub label: String,
    pub state: DensityMatrix,
}

pub fn parse_state_json(text: &str) -> Result<StateInput> {
    let raw: RawState = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let given = [raw.code.is_some(), raw.amplitudes.is_some(), raw.matrix.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Error::InvalidState(
            "give exactly one of `code`, `amplitudes`, `matrix`".into(),
        ));
    }
    let (default_label, state) = if let Some(code) = raw.code {
        let code: StateCode = code.parse()?;
        (code.to_string(), catalog_state(code)?)
    } else if let Some(amps) = raw.amplitudes {
        if amps.len() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: amps.len(),
            });
        }
        let psi = PureState::normalized(amps.iter().map(Entry::value).collect())?;
        ("custom".to_string(), psi.density())
    } else {
        let rows = raw.matrix.expect("checked above");
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(Entry::value).collect())
            .collect();
        let m = ComplexMatrix::try_from_rows(rows)?;
        if m.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: m.dim(),
            });
        }
        ("custom".to_string(), DensityMatrix::new(m)?)
    };
    Ok(StateInput {
        label: raw.label.unwrap_or(default_label),
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_forms() {
        let a = parse_state_json(r#"{"code": "rho_26"}"#).unwrap();
        assert_eq!(a.label, "rho26");
        let b = parse_state_json(r#"{"amplitudes": [[0.6, 0], [0, 0.8], 0, 0], "label": "x"}"#).unwrap();
        assert_eq!(b.label, "x");
        assert!((b.state.matrix()[(1, 1)].re - 0.64).abs() < 1e-15);
        let c = parse_state_json(
            r#"{"matrix": [[0.5, 0, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0], [0.5, 0, 0, 0.5]]}"#,
        )
        .unwrap();
        assert!((c.state.matrix()[(0, 3)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_state_json(r#"{"code": "v99"}"#).is_err());
        assert!(parse_state_json(r#"{"amplitudes": [1, 0, 0]}"#).is_err());
        assert!(parse_state_json(r#"{"amplitudes": [0, 0, 0, 0]}"#).is_err());
        assert!(parse_state_json(r#"{"matrix": [[1, 0], [0, 0]]}"#).is_err());
        // Trace 2.
        assert!(parse_state_json(
            r#"{"matrix": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]}"#
        )
        .is_err());
        assert!(parse_state_json(r#"{"code": "v1", "amplitudes": [1, 0, 0, 0]}"#).is_err());
        assert!(parse_state_json("{").is_err());
    }
}

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::Serialize;

use super::{MeasurementRecord, Quantity, RecordKey};
use crate::algebra::rational_to_f64;
use crate::error::{Error, Result};
use crate::ksets::{ks18_vectors, orthogonality_graph, StateCode};
use crate::quantum::{inequality_terms, Proposition};

/// Quantum prediction for Σ and ξ, independent of the state.
pub const QUANTUM_VALUE: f64 = 4.5;

/// The rounded noise threshold quoted alongside the exact one.
pub const PAPER_THRESHOLD: f64 = 0.035;

const CLASSICAL_BOUND: i64 = 4;
const TESTS: i64 = 18;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseParams {
    pub epsilon: f64,
    pub epsilon_uncertainty: f64,
}

impl NoiseParams {
    pub fn new(epsilon: f64, epsilon_uncertainty: f64) -> Result<Self> {
        let p = NoiseParams {
            epsilon,
            epsilon_uncertainty,
        };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::EpsilonOutOfRange(self.epsilon));
        }
        if !(self.epsilon_uncertainty >= 0.0 && self.epsilon_uncertainty.is_finite()) {
            return Err(Error::ValueOutOfRange {
                record: "epsilon uncertainty".into(),
                value: self.epsilon_uncertainty,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonEstimate {
    pub params: NoiseParams,
    pub count: usize,
    /// Directed pairs that are not edges of the vector-derived graph.
    pub non_edges: Vec<(u32, u32)>,
    /// Directed edges of the graph with no record.
    pub missing: Vec<(u32, u32)>,
    /// Directed pairs given more than once.
    pub repeated: Vec<(u32, u32)>,
}

/// Unweighted mean of all edge records with the standard error of the mean.
/// Records that are not edge probabilities are ignored.
pub fn estimate_epsilon(records: &[MeasurementRecord]) -> Result<EpsilonEstimate> {
    let pairs: Vec<((u32, u32), f64)> = records
        .iter()
        .filter_map(|r| match r.key {
            RecordKey::Edge { i, j } => Some(((i, j), r.value)),
            _ => None,
        })
        .collect();
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = pairs.len() as f64;
    let mean = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let se = if pairs.len() > 1 {
        let var = pairs.iter().map(|p| (p.1 - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };

    let g = orthogonality_graph(&ks18_vectors())?;
    let mut counts: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for (p, _) in &pairs {
        *counts.entry(*p).or_default() += 1;
    }
    let non_edges = counts
        .keys()
        .filter(|(i, j)| !g.has_edge_by_label(*i, *j))
        .copied()
        .collect();
    let missing = g
        .labelled_edges()
        .into_iter()
        .flat_map(|(a, b)| [(a, b), (b, a)])
        .filter(|p| !counts.contains_key(p))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let repeated = counts.iter().filter(|(_, &c)| c > 1).map(|(p, _)| *p).collect();
    Ok(EpsilonEstimate {
        params: NoiseParams::new(mean.max(0.0), se)?,
        count: pairs.len(),
        non_edges,
        missing,
        repeated,
    })
}

/// `4(1 − ε) + 18ε = 4 + 14ε`: the classical bound when each exclusive pair
/// may both answer yes with probability ε.
pub fn corrected_classical_bound(p: &NoiseParams) -> Result<f64> {
    p.check()?;
    Ok(CLASSICAL_BOUND as f64 + (TESTS - CLASSICAL_BOUND) as f64 * p.epsilon)
}

/// `[4.5(1 − ε), 4.5(1 − ε) + 18ε]`.
pub fn expected_band(p: &NoiseParams) -> Result<(f64, f64)> {
    p.check()?;
    let lo = QUANTUM_VALUE * (1.0 - p.epsilon);
    Ok((lo, lo + TESTS as f64 * p.epsilon))
}

/// The ε at which the corrected bound reaches 4.5, exactly: 1/28.
pub fn advantage_threshold() -> Rational64 {
    (Rational64::new(9, 2) - CLASSICAL_BOUND) / (TESTS - CLASSICAL_BOUND)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    QuantumAdvantage,
    NoAdvantage,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateVerdict {
    pub state: StateCode,
    pub quantity: Quantity,
    pub value: f64,
    pub uncertainty: Option<f64>,
    /// `value − uncertainty − bound`; positive means advantage.
    pub margin: f64,
    pub verdict: Verdict,
    pub in_band: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdCheck {
    pub exact: String,
    pub exact_value: f64,
    pub rounded: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    pub noise: NoiseParams,
    pub corrected_bound: f64,
    pub band: (f64, f64),
    pub quantum_value: f64,
    pub threshold: ThresholdCheck,
    /// Set when the corrected bound reaches the quantum value.
    pub gate_message: Option<String>,
    pub states: Vec<StateVerdict>,
    pub advantage_count: usize,
    pub in_band_count: usize,
    pub flags: Vec<String>,
}

impl CertificationReport {
    pub fn all_advantage(&self) -> bool {
        self.advantage_count == self.states.len()
    }

    pub fn out_of_band(&self) -> Vec<&StateVerdict> {
        self.states.iter().filter(|s| !s.in_band).collect()
    }
}

/// Per-state verdicts for Σ or ξ totals. A missing uncertainty counts as zero.
pub fn certify(records: &[MeasurementRecord], p: &NoiseParams) -> Result<CertificationReport> {
    let bound = corrected_classical_bound(p)?;
    let band = expected_band(p)?;
    let threshold = advantage_threshold();
    let threshold_value = rational_to_f64(&threshold);
    let passed = bound < QUANTUM_VALUE;
    let states: Vec<StateVerdict> = records
        .iter()
        .filter(|r| r.key == RecordKey::Total)
        .filter_map(|r| r.state.map(|s| (s, r)))
        .map(|(state, r)| {
            let margin = r.value - r.uncertainty.unwrap_or(0.0) - bound;
            StateVerdict {
                state,
                quantity: r.quantity,
                value: r.value,
                uncertainty: r.uncertainty,
                margin,
                verdict: if margin > 0.0 {
                    Verdict::QuantumAdvantage
                } else {
                    Verdict::NoAdvantage
                },
                in_band: band.0 <= r.value && r.value <= band.1,
            }
        })
        .collect();
    let mut flags = Vec::new();
    for s in states.iter().filter(|s| !s.in_band) {
        flags.push(format!(
            "{} {} = {} outside band [{:.6}, {:.6}]",
            s.state, s.quantity, s.value, band.0, band.1
        ));
    }
    Ok(CertificationReport {
        noise: *p,
        corrected_bound: bound,
        band,
        quantum_value: QUANTUM_VALUE,
        threshold: ThresholdCheck {
            exact: threshold.to_string(),
            exact_value: threshold_value,
            rounded: PAPER_THRESHOLD,
            passed,
        },
        gate_message: (!passed).then(|| {
            format!("classical bound exceeds quantum value: {bound} >= {QUANTUM_VALUE}")
        }),
        advantage_count: states.iter().filter(|s| s.verdict == Verdict::QuantumAdvantage).count(),
        in_band_count: states.iter().filter(|s| s.in_band).count(),
        states,
        flags,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiSum {
    pub state: StateCode,
    pub sum: f64,
    /// Quadrature sum of the per-term uncertainties; missing ones count as zero.
    pub uncertainty: f64,
}

/// Sums the 18 ξ terms of every state, in catalog order.
pub fn recompute_xi_from_terms(records: &[MeasurementRecord]) -> Result<Vec<XiSum>> {
    let wanted = inequality_terms();
    let mut by_state: BTreeMap<StateCode, BTreeMap<Proposition, &MeasurementRecord>> = BTreeMap::new();
    for r in records {
        let (Some(state), RecordKey::Term { proposition }) = (r.state, r.key) else {
            return Err(Error::UnexpectedRecord(r.name()));
        };
        if !wanted.contains(&proposition) {
            return Err(Error::UnexpectedRecord(format!("{} (not a term of xi)", r.name())));
        }
        if by_state.entry(state).or_default().insert(proposition, r).is_some() {
            return Err(Error::UnexpectedRecord(format!("{} (repeated)", r.name())));
        }
    }
    if by_state.is_empty() {
        return Err(Error::EmptyInput);
    }
    by_state
        .into_iter()
        .map(|(state, terms)| {
            let missing: Vec<String> = wanted
                .iter()
                .filter(|p| !terms.contains_key(p))
                .map(|p| p.to_string())
                .collect();
            if !missing.is_empty() {
                return Err(Error::MissingTerms {
                    state: state.to_string(),
                    missing,
                });
            }
            // Printed order, so the floating-point sum is reproducible.
            let ordered = wanted.iter().map(|p| terms[p]);
            let sum = ordered.clone().map(|r| r.value).sum();
            let var: f64 = ordered.map(|r| r.uncertainty.unwrap_or(0.0).powi(2)).sum();
            Ok(XiSum {
                state,
                sum,
                uncertainty: var.sqrt(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiComparison {
    pub state: StateCode,
    pub recomputed: f64,
    pub recomputed_uncertainty: f64,
    pub reported: Option<f64>,
    pub reported_uncertainty: Option<f64>,
    pub difference: Option<f64>,
    /// `max(1e-3, combined uncertainty)`.
    pub tolerance: f64,
    pub matches: bool,
}

const XI_TOLERANCE_FLOOR: f64 = 1e-3;

/// Compares recomputed sums against reported ξ totals.
pub fn compare_xi(sums: &[XiSum], reported: &[MeasurementRecord]) -> Vec<XiComparison> {
    sums.iter()
        .map(|s| {
            let r = reported
                .iter()
                .find(|r| r.state == Some(s.state) && r.key == RecordKey::Total);
            let ru = r.and_then(|r| r.uncertainty).unwrap_or(0.0);
            let tolerance = XI_TOLERANCE_FLOOR.max(s.uncertainty.hypot(ru));
            let difference = r.map(|r| s.sum - r.value);
            XiComparison {
                state: s.state,
                recomputed: s.sum,
                recomputed_uncertainty: s.uncertainty,
                reported: r.map(|r| r.value),
                reported_uncertainty: r.and_then(|r| r.uncertainty),
                difference,
                tolerance,
                matches: difference.is_some_and(|d| d.abs() <= tolerance),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation over √n; zero for a single record.
    pub standard_error: f64,
    pub min: f64,
    pub max: f64,
    /// Inverse-variance weighted mean, when every record has a positive uncertainty.
    pub weighted_mean: Option<f64>,
    pub weighted_uncertainty: Option<f64>,
}

pub fn summary_statistics(records: &[MeasurementRecord]) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let xs: Vec<f64> = records.iter().map(|r| r.value).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let standard_error = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    let weights: Option<Vec<f64>> = records
        .iter()
        .map(|r| r.uncertainty.filter(|&u| u > 0.0).map(|u| 1.0 / (u * u)))
        .collect();
    let (weighted_mean, weighted_uncertainty) = match weights {
        Some(w) => {
            let total: f64 = w.iter().sum();
            let m = w.iter().zip(&xs).map(|(w, x)| w * x).sum::<f64>() / total;
            (Some(m), Some(total.sqrt().recip()))
        }
        None => (None, None),
    };
    Ok(Summary {
        count: xs.len(),
        mean,
        standard_error,
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        weighted_mean,
        weighted_uncertainty,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{load_embedded_terms, parse_table, TableId};

    fn embedded(id: TableId) -> Vec<MeasurementRecord> {
        parse_table(id.id(), id.embedded(), id.quantity()).unwrap().records
    }

    fn eps(e: f64) -> NoiseParams {
        NoiseParams::new(e, 0.0).unwrap()
    }

    #[test]
    fn epsilon_from_exclusivity_table() {
        let records = embedded(TableId::Exclusivity);
        let est = estimate_epsilon(&records).unwrap();
        // Independent oracle: the plain arithmetic mean of the printed column.
        let printed: f64 = records.iter().map(|r| r.printed_value().parse::<f64>().unwrap()).sum();
        assert!((est.params.epsilon - printed / 126.0).abs() < 1e-15);
        assert!((est.params.epsilon - 0.014).abs() < 0.002);
        assert!((est.params.epsilon - 0.0142777777).abs() < 1e-9);
        assert!((est.params.epsilon_uncertainty - 0.0015654864).abs() < 1e-9);
        assert_eq!(est.count, 126);
        assert!(est.non_edges.is_empty());
        assert_eq!(est.repeated, vec![(8, 7)]);
        assert_eq!(est.missing, vec![(8, 9)]);
    }

    #[test]
    fn epsilon_trivial_inputs() {
        let zeros: Vec<_> = (2..=5).map(|j| MeasurementRecord::edge(1, j, 0.0)).collect();
        assert_eq!(estimate_epsilon(&zeros).unwrap().params.epsilon, 0.0);
        let one = estimate_epsilon(&[MeasurementRecord::edge(1, 2, 0.02)]).unwrap();
        assert_eq!(one.params, NoiseParams { epsilon: 0.02, epsilon_uncertainty: 0.0 });
        assert_eq!(estimate_epsilon(&[]), Err(Error::EmptyInput));
        let odd = estimate_epsilon(&[MeasurementRecord::edge(1, 3, 0.0)]).unwrap();
        // Vectors 1 and 3 are orthogonal; 1 and 5 are not.
        assert!(odd.non_edges.is_empty());
        let bad = estimate_epsilon(&[MeasurementRecord::edge(1, 5, 0.0)]).unwrap();
        assert_eq!(bad.non_edges, vec![(1, 5)]);
    }

    #[test]
    fn bound_and_band_values() {
        assert_eq!(corrected_classical_bound(&eps(0.0)).unwrap(), 4.0);
        assert!((corrected_classical_bound(&eps(0.035)).unwrap() - 4.49).abs() < 1e-12);
        assert!((corrected_classical_bound(&eps(0.014)).unwrap() - 4.196).abs() < 1e-12);
        assert_eq!(expected_band(&eps(0.0)).unwrap(), (4.5, 4.5));
        let (lo, hi) = expected_band(&eps(0.014)).unwrap();
        assert!((lo - 4.437).abs() < 1e-12 && (hi - 4.689).abs() < 1e-12);
        let (lo, hi) = expected_band(&eps(1.0 / 18.0)).unwrap();
        assert!((lo - 4.25).abs() < 1e-12 && (hi - 5.25).abs() < 1e-12);
        let bad = NoiseParams { epsilon: 1.0, epsilon_uncertainty: 0.0 };
        assert_eq!(corrected_classical_bound(&bad), Err(Error::EpsilonOutOfRange(1.0)));
        assert!(expected_band(&NoiseParams { epsilon: -0.1, epsilon_uncertainty: 0.0 }).is_err());
        assert!(NoiseParams::new(0.5, -1.0).is_err());
    }

    #[test]
    fn threshold_is_one_twenty_eighth() {
        assert_eq!(advantage_threshold(), Rational64::new(1, 28));
        let t = rational_to_f64(&advantage_threshold());
        assert!((corrected_classical_bound(&eps(t)).unwrap() - 4.5).abs() < 1e-15);
        assert!(t > PAPER_THRESHOLD);
    }

    #[test]
    fn table_iv_certification() {
        let report = certify(&embedded(TableId::SigmaAll), &eps(0.014)).unwrap();
        assert_eq!(report.states.len(), 28);
        assert!(report.all_advantage());
        assert!(report.threshold.passed);
        assert!(report.gate_message.is_none());
        // Four printed values sit below 4.5(1 − ε).
        let low: Vec<String> = report.out_of_band().iter().map(|s| s.state.to_string()).collect();
        assert_eq!(low, vec!["v12", "v17", "v21", "v23"]);
        assert_eq!(report.in_band_count, 24);
        assert_eq!(report.flags.len(), 4);
    }

    #[test]
    fn synthetic_verdicts_and_gate() {
        let low = MeasurementRecord::total(StateCode::Vector(1), Quantity::Sigma, 4.1, None);
        let r = certify(&[low], &eps(0.014)).unwrap();
        assert_eq!(r.states[0].verdict, Verdict::NoAdvantage);
        // The uncertainty is subtracted before comparing.
        let close = MeasurementRecord::total(StateCode::Vector(1), Quantity::Sigma, 4.25, Some(0.06));
        assert_eq!(certify(&[close], &eps(0.014)).unwrap().states[0].verdict, Verdict::NoAdvantage);
        let r = certify(&embedded(TableId::SigmaAll), &eps(0.05)).unwrap();
        assert!(!r.threshold.passed);
        assert!(r.gate_message.unwrap().starts_with("classical bound exceeds quantum value"));
    }

    #[test]
    fn xi_recomputation_matches_reported() {
        let terms = load_embedded_terms().unwrap();
        let sums = recompute_xi_from_terms(&terms.records).unwrap();
        assert_eq!(sums.len(), 15);
        let v1 = &sums[0];
        assert_eq!(v1.state, StateCode::Vector(1));
        assert!((v1.sum - 4.19531).abs() < 1e-9);
        let cmp = compare_xi(&sums, &embedded(TableId::Xi));
        assert!(cmp.iter().all(|c| c.matches), "{cmp:?}");
        assert!(cmp.iter().all(|c| c.difference.unwrap().abs() < 2e-3));
        let rho28 = cmp.iter().find(|c| c.state == StateCode::Mixture(28)).unwrap();
        assert_eq!(rho28.reported, Some(4.3968));
    }

    #[test]
    fn xi_recomputation_errors() {
        let flat: Vec<_> = inequality_terms()
            .into_iter()
            .map(|p| MeasurementRecord::term(StateCode::Mixture(28), p, 0.25, None))
            .collect();
        assert_eq!(recompute_xi_from_terms(&flat).unwrap()[0].sum, 4.5);
        let short = &flat[1..];
        match recompute_xi_from_terms(short) {
            Err(Error::MissingTerms { state, missing }) => {
                assert_eq!(state, "rho28");
                assert_eq!(missing, vec!["P(001|012)"]);
            }
            other => panic!("{other:?}"),
        }
        let mut doubled = flat.clone();
        doubled.push(flat[0].clone());
        assert!(matches!(recompute_xi_from_terms(&doubled), Err(Error::UnexpectedRecord(_))));
        let omitted = crate::quantum::omitted_terms()[0];
        let mut extra = flat.clone();
        extra.push(MeasurementRecord::term(StateCode::Mixture(28), omitted, 0.0, None));
        assert!(matches!(recompute_xi_from_terms(&extra), Err(Error::UnexpectedRecord(_))));
        assert_eq!(recompute_xi_from_terms(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn summaries() {
        let t1 = summary_statistics(&embedded(TableId::SigmaSelected)).unwrap();
        assert_eq!(t1.count, 15);
        // The quoted 4.512 ± 0.005 is the inverse-variance weighted mean.
        assert!((t1.weighted_mean.unwrap() - 4.512).abs() < 1e-3);
        assert!((t1.weighted_uncertainty.unwrap() - 0.005).abs() < 5e-4);
        assert!((t1.mean - 4.518666).abs() < 1e-5);
        let t4 = summary_statistics(&embedded(TableId::SigmaAll)).unwrap();
        assert!((t4.mean - 4.51).abs() < 0.01);
        assert_eq!(t4.weighted_mean, None);
        let one = summary_statistics(&[MeasurementRecord::total(StateCode::Vector(3), Quantity::Sigma, 4.4, None)]).unwrap();
        assert_eq!((one.mean, one.standard_error), (4.4, 0.0));
        assert_eq!(summary_statistics(&[]), Err(Error::EmptyInput));
    }
}

//! Quantum predictions for the two-qubit (path ⊗ polarization) implementation:
//! the nine Pauli-product observables, their six commuting contexts,
//! sequential projective measurements, and the sums Σ and ξ.
//!
//! Outcome bit 1 stands for eigenvalue +1, bit 0 for eigenvalue −1.

mod audit;
mod noise;
mod state_input;

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use audit::{compatibility_audit, AuditReport};
pub use noise::{apply_noise, random_mixed_state, random_pure_state, NoiseChannel, DEFAULT_SEED};
pub use state_input::{parse_state_json, StateInput};

use crate::algebra::exact::{q, qi};
use crate::algebra::{clamp_probability, DensityMatrix, HermitianOperator, Projector, QMatrix, TOL_ALG};
use crate::error::{Error, Result};
use crate::ksets::{all_vectors, ks18_vectors, StateCode};

fn pauli(name: char) -> QMatrix {
    let mut m = QMatrix::zeros(2);
    match name {
        'i' => return QMatrix::identity(2),
        'x' => {
            m[(0, 1)] = q(1, 1);
            m[(1, 0)] = q(1, 1);
        }
        'y' => {
            m[(0, 1)] = qi(-1, 1);
            m[(1, 0)] = qi(1, 1);
        }
        'z' => {
            m[(0, 0)] = q(1, 1);
            m[(1, 1)] = q(-1, 1);
        }
        _ => unreachable!("unknown Pauli matrix {name}"),
    }
    m
}

/// Path and polarization Pauli factors of observables 0–8.
const OBSERVABLE_FACTORS: [(char, char); 9] = [
    ('z', 'i'),
    ('i', 'z'),
    ('z', 'z'),
    ('i', 'x'),
    ('x', 'i'),
    ('x', 'x'),
    ('z', 'x'),
    ('x', 'z'),
    ('y', 'y'),
];

/// A ±1-valued two-qubit Pauli product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observable {
    id: u8,
    operator: HermitianOperator,
}

impl Observable {
    pub fn new(id: u8) -> Result<Self> {
        let &(a, b) = OBSERVABLE_FACTORS
            .get(id as usize)
            .ok_or_else(|| Error::IncompatibleSequence(format!("no observable {id}")))?;
        let operator = HermitianOperator::new(pauli(a).kron(&pauli(b)))?;
        if !operator.is_involution() {
            return Err(Error::NotInvolution);
        }
        Ok(Observable { id, operator })
    }

    pub fn id(&self) -> u8 {
        self.id
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    /// e.g. `σz⊗I`.
    pub fn name(&self) -> String {
        let (a, b) = OBSERVABLE_FACTORS[self.id as usize];
        let f = |c: char| if c == 'i' { "I".to_string() } else { format!("σ{c}") };
        format!("{}⊗{}", f(a), f(b))
    }
}

/// Observables 0–8.
pub fn observables() -> Vec<Observable> {
    (0..9).map(|i| Observable::new(i).expect("fixed table")).collect()
}

/// An ordered triple of pairwise commuting observables, measured in sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context {
    ids: [u8; 3],
}

impl Context {
    pub fn new(x: u8, y: u8, z: u8) -> Result<Self> {
        let obs = [Observable::new(x)?, Observable::new(y)?, Observable::new(z)?];
        for i in 0..3 {
            for j in (i + 1)..3 {
                if !obs[i].operator.commutes_with(&obs[j].operator) {
                    return Err(Error::IncompatibleSequence(format!(
                        "observables {} ({}) and {} ({}) do not commute",
                        obs[i].id,
                        obs[i].name(),
                        obs[j].id,
                        obs[j].name()
                    )));
                }
            }
        }
        Ok(Context { ids: [x, y, z] })
    }

    pub fn ids(&self) -> [u8; 3] {
        self.ids
    }

    pub fn observables(&self) -> [Observable; 3] {
        self.ids.map(|i| Observable::new(i).expect("validated"))
    }

    /// The six contexts of the noncontextuality inequality, in printed order.
    pub fn inequality_contexts() -> Vec<Context> {
        [[0, 1, 2], [0, 3, 6], [3, 4, 5], [1, 4, 7], [6, 7, 8], [2, 5, 8]]
            .iter()
            .map(|&[x, y, z]| Context::new(x, y, z).expect("commuting"))
            .collect()
    }

    /// `+1` or `−1` when the product of the three operators is `±I`, else `None`.
    pub fn parity(&self) -> Option<i32> {
        let [a, b, c] = self.observables();
        let prod = &(a.operator.matrix() * b.operator.matrix()) * c.operator.matrix();
        let id = QMatrix::identity(4);
        if prod == id {
            Some(1)
        } else if prod == -&id {
            Some(-1)
        } else {
            None
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.ids[0], self.ids[1], self.ids[2])
    }
}

impl FromStr for Context {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '(' | ')' | ',' | ' '))
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::IncompatibleSequence(format!("bad context `{s}`")))?;
        match digits[..] {
            [x, y, z] => Context::new(x, y, z),
            _ => Err(Error::IncompatibleSequence(format!("bad context `{s}`"))),
        }
    }
}

/// Outcomes `(a, b, c)` of a context measured in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Proposition {
    pub outcomes: [u8; 3],
    pub context: Context,
}

impl Proposition {
    pub fn new(outcomes: [u8; 3], context: Context) -> Result<Self> {
        if outcomes.iter().any(|&b| b > 1) {
            return Err(Error::IncompatibleSequence(format!(
                "outcomes must be bits, got {outcomes:?}"
            )));
        }
        Ok(Proposition { outcomes, context })
    }

    /// Outcome string such as `001`.
    pub fn outcome_string(&self) -> String {
        self.outcomes.iter().map(|b| char::from(b'0' + b)).collect()
    }

    /// Whether the signed outcome product matches the context's parity.
    pub fn respects_parity(&self) -> bool {
        let sign: i32 = self.outcomes.iter().map(|&b| if b == 1 { 1 } else { -1 }).product();
        self.context.parity() == Some(sign)
    }
}

impl fmt::Display for Proposition {
    /// Table header form, `P(001|012)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({}|{})", self.outcome_string(), self.context)
    }
}

impl FromStr for Proposition {
    type Err = Error;

    /// Accepts `P(001|012)` or `001|012`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix("P(").and_then(|r| r.strip_suffix(')')).unwrap_or(t);
        let (out, ctx) = t
            .split_once('|')
            .ok_or_else(|| Error::IncompatibleSequence(format!("bad proposition `{s}`")))?;
        let bits: Vec<u8> = out
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Some(0),
                '1' => Some(1),
                _ => None,
            })
            .collect::<Option<_>>()
            .ok_or_else(|| Error::IncompatibleSequence(format!("bad outcomes in `{s}`")))?;
        let outcomes: [u8; 3] = bits
            .try_into()
            .map_err(|_| Error::IncompatibleSequence(format!("bad outcomes in `{s}`")))?;
        Proposition::new(outcomes, ctx.parse()?)
    }
}

impl Serialize for Proposition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Proposition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Projector onto outcome `a` of `obs`: `(I + sO)/2`, `s = +1` for `a = 1`.
pub fn outcome_projector(obs: &Observable, a: u8) -> Projector {
    let sign = if a == 1 { 1 } else { -1 };
    let m = &QMatrix::identity(4) + &obs.operator.matrix().scale(q(sign, 1));
    Projector::from_exact(m.scale(q(1, 2))).expect("eigenprojector of an involution")
}

fn step_projectors(prop: &Proposition) -> [Projector; 3] {
    let obs = prop.context.observables();
    [0, 1, 2].map(|k| outcome_projector(&obs[k], prop.outcomes[k]))
}

/// `P_a P_b P_c`; a projector because the context commutes.
pub fn proposition_projector(prop: &Proposition) -> Projector {
    let [pa, pb, pc] = step_projectors(prop);
    pa.compose(&pb)
        .and_then(|p| p.compose(&pc))
        .expect("commuting projectors compose to a projector")
}

/// Probability of the outcome sequence under Lüders updates,
/// `tr(P_c P_b P_a ρ P_a P_b P_c)`, cross-checked against `tr(ρ P_a P_b P_c)`.
pub fn sequential_probability(rho: &DensityMatrix, prop: &Proposition) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let [pa, pb, pc] = step_projectors(prop);
    let mut m = rho.matrix().clone();
    for p in [&pa, &pb, &pc] {
        m = &(p.matrix() * &m) * p.matrix();
    }
    let lueders = m.trace().re;
    let product = rho.matrix().trace_product(proposition_projector(prop).matrix()).re;
    if (lueders - product).abs() > TOL_ALG {
        return Err(Error::IncompatibleSequence(format!(
            "{prop}: sequential {lueders} differs from joint {product}"
        )));
    }
    Ok(clamp_probability(lueders, TOL_ALG))
}

/// Probability of an arbitrary outcome sequence `(observable, bit)` under Lüders updates.
pub fn sequence_probability(rho: &DensityMatrix, steps: &[(u8, u8)]) -> Result<f64> {
    let mut m = rho.matrix().clone();
    for &(id, bit) in steps {
        let p = outcome_projector(&Observable::new(id)?, bit);
        m = &(p.matrix() * &m) * p.matrix();
    }
    Ok(m.trace().re)
}

/// The 18 terms of ξ, in printed order.
pub fn inequality_terms() -> Vec<Proposition> {
    const OUTCOMES: [[&str; 3]; 6] = [
        ["001", "111", "100"],
        ["010", "001", "100"],
        ["100", "111", "010"],
        ["100", "001", "111"],
        ["100", "001", "111"],
        ["110", "000", "011"],
    ];
    Context::inequality_contexts()
        .into_iter()
        .zip(OUTCOMES)
        .flat_map(|(ctx, outs)| {
            outs.map(|o| format!("{o}|{ctx}").parse::<Proposition>().expect("fixed table"))
        })
        .collect()
}

/// For each context, the parity-respecting outcome triple left out of ξ.
pub fn omitted_terms() -> Vec<Proposition> {
    let terms = inequality_terms();
    let mut out = Vec::new();
    for ctx in Context::inequality_contexts() {
        for bits in 0..8u8 {
            let outcomes = [bits >> 2 & 1, bits >> 1 & 1, bits & 1];
            let p = Proposition::new(outcomes, ctx).expect("bits");
            if p.respects_parity() && !terms.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Σ = Σ_{i=1}^{18} tr(ρ Π_i).
pub fn sigma(rho: &DensityMatrix) -> Result<f64> {
    let mut total = 0.0;
    for v in ks18_vectors() {
        total += rho.matrix().trace_product(v.projector()?.matrix()).re;
    }
    Ok(total)
}

/// ξ: the sum of the 18 sequential probabilities.
pub fn xi(rho: &DensityMatrix) -> Result<f64> {
    inequality_terms()
        .iter()
        .map(|p| sequential_probability(rho, p))
        .sum()
}

/// Vertex whose projector equals the proposition's, among `candidates`.
fn match_vertex(prop: &Proposition, candidates: &[(u32, Projector)]) -> Result<u32> {
    let p = proposition_projector(prop);
    let hits: Vec<u32> = candidates.iter().filter(|(_, q)| *q == p).map(|(id, _)| *id).collect();
    match hits[..] {
        [id] => Ok(id),
        _ => Err(Error::CorrespondenceBroken(format!(
            "{prop} matches {} vertices",
            hits.len()
        ))),
    }
}

/// The bijection between the 18 terms of ξ and vertices 1–18, by exact projector equality.
pub fn proposition_vertex_map() -> Result<Vec<(Proposition, u32)>> {
    let candidates: Vec<(u32, Projector)> = ks18_vectors()
        .iter()
        .map(|v| Ok((v.id, v.projector()?)))
        .collect::<Result<_>>()?;
    let map: Vec<(Proposition, u32)> = inequality_terms()
        .into_iter()
        .map(|p| Ok((p, match_vertex(&p, &candidates)?)))
        .collect::<Result<_>>()?;
    let mut ids: Vec<u32> = map.iter().map(|(_, v)| *v).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != 18 {
        return Err(Error::CorrespondenceBroken(format!(
            "only {} distinct vertices are hit",
            ids.len()
        )));
    }
    Ok(map)
}

/// The six omitted outcome triples matched to the extra states 19–24.
pub fn omitted_vertex_map() -> Result<Vec<(Proposition, u32)>> {
    let candidates: Vec<(u32, Projector)> = all_vectors()
        .iter()
        .map(|v| Ok((v.id, v.projector()?)))
        .collect::<Result<_>>()?;
    omitted_terms()
        .into_iter()
        .map(|p| Ok((p, match_vertex(&p, &candidates)?)))
        .collect()
}

/// Ideal probability of every ξ term for a catalog state, keyed like the table headers.
pub fn ideal_probability_table(code: StateCode) -> Result<Vec<(Proposition, f64)>> {
    let rho = crate::ksets::catalog_state(code)?;
    probability_table(&rho)
}

pub fn probability_table(rho: &DensityMatrix) -> Result<Vec<(Proposition, f64)>> {
    inequality_terms()
        .into_iter()
        .map(|p| Ok((p, sequential_probability(rho, &p)?)))
        .collect()
}

/// Exact probability of a proposition for an integer-vector state, `|⟨v|P|v⟩| / ⟨v|v⟩`.
pub fn exact_probability(components: &[i64], prop: &Proposition) -> Rational64 {
    let p = proposition_projector(prop);
    let state = Projector::from_integers(components).expect("nonzero vector");
    p.overlap(&state)
}

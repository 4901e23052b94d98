//! The `ks18` command line.
//!
//! Exit codes: 0 on success, 1 when a verification or certification check
//! fails, 2 on usage or input errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{DensityMatrix, PureState, QMatrix};
use crate::certify::{
    self, band_chart, compare_xi, estimate_epsilon, load_embedded_terms, load_table,
    recompute_xi_from_terms, summary_statistics, CertificationReport, DedupePolicy, NoiseParams,
    Quantity, Table, TableId, TableSource, Verdict,
};
use crate::classical::{construct_box_strategy, validate_box_strategy, BoxStrategy};
use crate::error::Error;
use crate::graph::ExclusivityGraph;
use crate::invariants::{
    clique_edge_cover_complement, fractional_packing, independence_number, lovasz_theta,
    lovasz_theta_sdp, CoverBudget, Minimality, ThetaCertificate, ThetaMethod, ThetaOptions, TOL_SDP,
};
use crate::ksets::{
    catalog_state, ks18_vectors, operator_completeness, orthogonality_graph,
    verify_ks_uncolorability, Basis, Colorability, KsSetDocument, KsVector, StateCode,
};
use crate::quantum::{
    apply_noise, omitted_vertex_map, parse_state_json, probability_table,
    proposition_vertex_map, random_mixed_state, random_pure_state, sigma, xi, Context,
    NoiseChannel, DEFAULT_SEED,
};
use crate::report::{format_float, to_canonical_json};

const DEFAULT_STATE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
    Text,
}

#[derive(Parser, Debug)]
#[command(
    name = "ks18",
    version,
    about = "Verify, simulate and certify the 18-test Kochen-Specker set"
)]
pub struct Cli {
    /// Output format (default: text).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for random states.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Numerical tolerance for state-independence sweeps and theta pinching.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Data file (graph --check-table-v) or directory of CSV files (certify).
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit the vectors, the derived exclusivity graph and the bases.
    Graph(GraphArgs),
    /// Check uncolorability, the completeness identity, parities and the term correspondence.
    Verify(VerifyArgs),
    /// Compute α, α*, ϑ and a clique edge cover of the complement.
    Invariants(InvariantsArgs),
    /// Σ, ξ and term probabilities for a state, or a random-state sweep.
    Simulate(SimulateArgs),
    /// Estimate ε from the exclusivity data and certify the measured values.
    Certify(CertifyArgs),
    /// Construct or validate a classical box strategy.
    Strategy(StrategyArgs),
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    /// ks-set.json with vector components to use instead of the built-in set.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Check the exclusivity table (embedded, or --data) against the derived edges.
    #[arg(long)]
    pub check_table_v: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Drop the N-th basis (1-based, sorted order) from the one-true-per-basis constraint.
    #[arg(long, value_name = "N")]
    pub drop_basis: Option<usize>,
    /// ks-set.json to verify instead of the built-in set.
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InvariantsArgs {
    /// Graph as ks-set.json or a plain edge list.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Time allowed for proving cover minimality, e.g. `60s`, `500ms`, `0s`.
    #[arg(long, default_value = "60s", value_parser = humantime::parse_duration)]
    pub budget: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QuantityArg {
    Sigma,
    Xi,
    Both,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Catalog state code such as `v7` or `rho28`.
    #[arg(long, conflicts_with_all = ["state_file", "random", "mixed"])]
    pub state: Option<String>,
    /// JSON state file: {"code"}, {"amplitudes"} or {"matrix"}.
    #[arg(long, conflicts_with_all = ["random", "mixed"])]
    pub state_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    pub quantity: QuantityArg,
    /// Include the 18 term probabilities of ξ.
    #[arg(long)]
    pub terms: bool,
    /// Number of random pure states to sweep.
    #[arg(long, value_name = "N")]
    pub random: Option<usize>,
    /// Number of random mixed states to sweep.
    #[arg(long, value_name = "M")]
    pub mixed: Option<usize>,
    /// Visibility V of the channel ρ ↦ Vρ + (1 − V)I/4.
    #[arg(long, value_name = "V")]
    pub noise: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Σ values (`state_code,value,uncertainty`); default is the 28-state table.
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    /// Exclusivity probabilities (`i,j,value`).
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// ξ terms (`state_code,context,outcomes,value,uncertainty`).
    #[arg(long)]
    pub terms: Option<PathBuf>,
    /// Reported ξ totals (`state_code,value,uncertainty`).
    #[arg(long)]
    pub xi: Option<PathBuf>,
    /// Use this ε instead of the estimate.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Exit 1 unless every state shows an advantage and all checks pass.
    #[arg(long)]
    pub strict: bool,
    /// Also write the band chart here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// How to treat repeated keys in the input tables.
    #[arg(long, default_value = "keep-all", value_parser = parse_dedupe)]
    pub dedupe: DedupePolicy,
    /// Write the embedded CSV tables into DIR and exit.
    #[arg(long, value_name = "DIR")]
    pub dump_fixtures: Option<PathBuf>,
}

fn parse_dedupe(s: &str) -> Result<DedupePolicy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug)]
pub struct StrategyArgs {
    /// Validate this strategy file instead of constructing one.
    #[arg(long)]
    pub validate: Option<PathBuf>,
}

/// A failed run: exit code and message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::Io(_)
            | Error::UnknownState(_)
            | Error::InvalidState(_)
            | Error::DimensionMismatch { .. }
            | Error::ValueOutOfRange { .. }
            | Error::EpsilonOutOfRange(_)
            | Error::VisibilityOutOfRange(_)
            | Error::EmptyInput
            | Error::MissingTerms { .. }
            | Error::UnexpectedRecord(_)
            | Error::TooLarge { .. }
            | Error::Graph(_)
            | Error::DegenerateVector => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// What a command produced: the report, and an optional failure reported after it.
struct Outcome {
    body: String,
    failure: Option<String>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome { body, failure: None }
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if let Err(f) = emit(&cli, &outcome.body, stdout) {
                let _ = writeln!(stderr, "error: {}", f.message);
                return f.code;
            }
            match outcome.failure {
                Some(msg) => {
                    let _ = writeln!(stderr, "{msg}");
                    1
                }
                None => 0,
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(cli: &Cli, body: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => write_file(path, body),
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| Failure::from(Error::from(e))),
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    std::fs::write(path, body)
        .map_err(|e| Failure::from(Error::Io(format!("{}: {e}", path.display()))))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::from(Error::Io(format!("{}: {e}", path.display()))))
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Graph(a) => cmd_graph(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Invariants(a) => cmd_invariants(cli, a),
        Command::Simulate(a) => cmd_simulate(cli, a),
        Command::Certify(a) => cmd_certify(cli, a),
        Command::Strategy(a) => cmd_strategy(cli, a),
    }
}

fn format_of(cli: &Cli, command: &str, allowed: &[Format]) -> Result<Format, Failure> {
    let f = cli.format.unwrap_or(Format::Text);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::usage(format!(
            "{command} does not support --format {}",
            f.to_possible_value().expect("no skipped variants").get_name()
        )))
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn load_document(path: &Path) -> Result<KsSetDocument, Failure> {
    Ok(KsSetDocument::from_json(&read_file(path)?)?)
}

fn document_vectors(doc: &KsSetDocument) -> Result<Vec<KsVector>, Failure> {
    doc.vectors()
        .ok_or_else(|| Failure::usage("the document must give components for every vertex"))
}

// graph

fn cmd_graph(cli: &Cli, a: &GraphArgs) -> Result<Outcome, Failure> {
    if cli.format.is_none() && cli.out.is_none() && !a.check_table_v && a.vectors.is_none() {
        return Err(Failure::usage(
            "graph needs --format, --out, --check-table-v or --vectors",
        ));
    }
    let format = match (cli.format, &cli.out) {
        (None, Some(_)) => Format::Json,
        _ => format_of(cli, "graph", &[Format::Json, Format::Csv, Format::Text])?,
    };
    let (vectors, builtin) = match &a.vectors {
        Some(path) => (document_vectors(&load_document(path)?)?, false),
        None => (ks18_vectors(), true),
    };
    let mut doc = KsSetDocument::from_vectors(&vectors)?;
    if builtin {
        doc = doc.with_quoted_edge_count_check();
    }
    if a.check_table_v {
        return check_table_v(cli, format);
    }
    let g = orthogonality_graph(&vectors)?;
    let body = match format {
        Format::Json => to_canonical_json(&doc),
        Format::Csv => csv_text(
            &["i", "j"],
            g.labelled_edges().into_iter().map(|(i, j)| vec![i.to_string(), j.to_string()]),
        ),
        _ => {
            let degrees: std::collections::BTreeSet<usize> = (0..g.n()).map(|i| g.degree(i)).collect();
            let mut t = String::new();
            writeln!(t, "vertices: {}", g.n()).unwrap();
            writeln!(t, "edges: {}", g.edge_count()).unwrap();
            writeln!(t, "degrees: {}", join(degrees.iter())).unwrap();
            writeln!(t, "bases: {}", doc.basis_count.unwrap_or(0)).unwrap();
            for b in doc.bases.iter().flatten() {
                writeln!(t, "  {{{}}}", join(b.iter())).unwrap();
            }
            for d in &doc.discrepancies {
                writeln!(t, "discrepancy: {d}").unwrap();
            }
            t
        }
    };
    Ok(Outcome::ok(body))
}

fn join<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Serialize)]
struct TableVCheck {
    source: String,
    records: usize,
    unmatched: Vec<(u32, u32)>,
    missing: Vec<(u32, u32)>,
    duplicates: Vec<certify::DuplicateKey>,
    epsilon: f64,
    epsilon_uncertainty: f64,
}

fn check_table_v(cli: &Cli, format: Format) -> Result<Outcome, Failure> {
    let table = match &cli.data {
        Some(path) => load_table(&TableSource::File {
            path: path.clone(),
            quantity: Quantity::EdgeProbability,
        })?,
        None => load_table(&TableSource::Embedded(TableId::Exclusivity))?,
    };
    let est = estimate_epsilon(&table.records)?;
    let check = TableVCheck {
        source: table.name.clone(),
        records: table.records.len(),
        unmatched: est.non_edges.clone(),
        missing: est.missing.clone(),
        duplicates: table.duplicates.clone(),
        epsilon: est.params.epsilon,
        epsilon_uncertainty: est.params.epsilon_uncertainty,
    };
    let body = match format {
        Format::Json => to_canonical_json(&check),
        Format::Csv => csv_text(
            &["i", "j", "status"],
            check
                .unmatched
                .iter()
                .map(|p| (p, "unmatched"))
                .chain(check.missing.iter().map(|p| (p, "missing")))
                .map(|((i, j), s)| vec![i.to_string(), j.to_string(), s.to_string()]),
        ),
        _ => {
            let mut t = String::new();
            writeln!(t, "source: {}", check.source).unwrap();
            writeln!(t, "records: {}", check.records).unwrap();
            writeln!(t, "unmatched directed pairs: {}", check.unmatched.len()).unwrap();
            for (i, j) in &check.unmatched {
                writeln!(t, "  p_{{{i},{j}}} is not an edge").unwrap();
            }
            writeln!(t, "missing directed pairs: {}", check.missing.len()).unwrap();
            for (i, j) in &check.missing {
                writeln!(t, "  p_{{{i},{j}}}").unwrap();
            }
            for d in &check.duplicates {
                writeln!(t, "duplicate: {} on lines {}", d.key, join(d.lines.iter())).unwrap();
            }
            writeln!(
                t,
                "epsilon: {} ± {}",
                format_float(check.epsilon),
                format_float(check.epsilon_uncertainty)
            )
            .unwrap();
            t
        }
    };
    let failure = (!check.unmatched.is_empty()).then(|| {
        format!(
            "check failed: {} directed pairs are not edges of the graph",
            check.unmatched.len()
        )
    });
    Ok(Outcome { body, failure })
}

// verify

#[derive(Serialize)]
struct Certificate {
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport {
    vertices: usize,
    edges: usize,
    bases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    dropped_basis: Option<Vec<u32>>,
    certificates: Vec<Certificate>,
    passed: bool,
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<Outcome, Failure> {
    let format = format_of(cli, "verify", &[Format::Json, Format::Text])?;
    let (g, mut bases, vectors, builtin) = match &a.graph {
        Some(path) => {
            let doc = load_document(path)?;
            (doc.graph()?, doc.bases()?, doc.vectors(), false)
        }
        None => {
            let v = ks18_vectors();
            let doc = KsSetDocument::from_vectors(&v)?;
            (doc.graph()?, doc.bases()?, Some(v), true)
        }
    };
    let basis_count = bases.len();
    let dropped = match a.drop_basis {
        Some(k) if k == 0 || k > bases.len() => {
            return Err(Failure::usage(format!(
                "--drop-basis {k}: there are {} bases",
                bases.len()
            )))
        }
        Some(k) => Some(bases.remove(k - 1).members),
        None => None,
    };

    let mut certs = vec![uncolorability(&g, &bases)];
    if let Some(v) = &vectors {
        certs.push(completeness(v, builtin)?);
    }
    if builtin {
        certs.push(parity_certificate());
        certs.push(correspondence_certificate());
    }
    let report = VerifyReport {
        vertices: g.n(),
        edges: g.edge_count(),
        bases: basis_count,
        dropped_basis: dropped,
        passed: certs.iter().all(|c| c.passed),
        certificates: certs,
    };
    let body = match format {
        Format::Json => to_canonical_json(&report),
        _ => {
            let mut t = String::new();
            if let Some(d) = &report.dropped_basis {
                writeln!(t, "dropped basis: {{{}}}", join(d.iter())).unwrap();
            }
            for c in &report.certificates {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                writeln!(t, "{mark} {}: {}", c.name, c.detail).unwrap();
            }
            t
        }
    };
    let failed: Vec<String> = report
        .certificates
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} ({})", c.name, c.detail))
        .collect();
    let failure = (!failed.is_empty()).then(|| format!("verification failed: {}", failed.join("; ")));
    Ok(Outcome { body, failure })
}

fn uncolorability(g: &ExclusivityGraph, bases: &[Basis]) -> Certificate {
    match verify_ks_uncolorability(g, bases) {
        Colorability::Uncolorable(stats) => Certificate {
            name: "uncolorability",
            passed: true,
            detail: format!(
                "no admissible 0/1 assignment ({} nodes, {} conflicts)",
                stats.nodes, stats.conflicts
            ),
        },
        Colorability::Colorable { assignment, .. } => {
            let yes: Vec<u32> = assignment.values.iter().filter(|(_, &v)| v).map(|(&k, _)| k).collect();
            Certificate {
                name: "uncolorability",
                passed: false,
                detail: format!("assignment found: yes on {{{}}}", join(yes.iter())),
            }
        }
    }
}

fn completeness(vectors: &[KsVector], builtin: bool) -> Result<Certificate, Failure> {
    let total = operator_completeness(vectors)?;
    let m = total.matrix();
    let c = m[(0, 0)];
    let scalar = *m == QMatrix::identity(m.dim()).scale(c);
    let expected = crate::algebra::exact::q(9, 2);
    let passed = scalar && (!builtin || c == expected);
    let detail = if scalar {
        format!("sum of projectors = {} I", c.re)
    } else {
        "sum of projectors is not a multiple of the identity".to_string()
    };
    Ok(Certificate {
        name: "completeness",
        passed,
        detail,
    })
}

fn parity_certificate() -> Certificate {
    let parities: Vec<(Context, Option<i32>)> = Context::inequality_contexts()
        .into_iter()
        .map(|c| (c, c.parity()))
        .collect();
    let all_fixed = parities.iter().all(|(_, p)| p.is_some());
    let product: i32 = parities.iter().map(|(_, p)| p.unwrap_or(0)).product();
    let detail = parities
        .iter()
        .map(|(c, p)| match p {
            Some(1) => format!("{c}:+1"),
            Some(_) => format!("{c}:-1"),
            None => format!("{c}:none"),
        })
        .collect::<Vec<_>>()
        .join(" ");
    Certificate {
        name: "parity",
        passed: all_fixed && product == -1,
        detail: format!("{detail}; product {product}"),
    }
}

fn correspondence_certificate() -> Certificate {
    let result = proposition_vertex_map().and_then(|m| Ok((m, omitted_vertex_map()?)));
    match result {
        Ok((map, omitted)) => {
            let extra: Vec<u32> = omitted.iter().map(|(_, v)| *v).collect();
            let mut sorted = extra.clone();
            sorted.sort_unstable();
            Certificate {
                name: "correspondence",
                passed: map.len() == 18 && sorted == (19..=24).collect::<Vec<_>>(),
                detail: format!(
                    "bijection of size {}; omitted outcomes map to {{{}}}",
                    map.len(),
                    join(sorted.iter())
                ),
            }
        }
        Err(e) => Certificate {
            name: "correspondence",
            passed: false,
            detail: e.to_string(),
        },
    }
}

// invariants

fn load_graph(path: &Path) -> Result<(ExclusivityGraph, Option<Vec<KsVector>>), Failure> {
    let text = read_file(path)?;
    if text.trim_start().starts_with('{') {
        let doc = KsSetDocument::from_json(&text)?;
        Ok((doc.graph()?, doc.vectors()))
    } else {
        Ok((ExclusivityGraph::parse_edge_list(&text)?, None))
    }
}

fn cmd_invariants(cli: &Cli, a: &InvariantsArgs) -> Result<Outcome, Failure> {
    let format = format_of(cli, "invariants", &[Format::Json, Format::Text])?;
    let (g, vectors) = match &a.graph {
        Some(path) => load_graph(path)?,
        None => {
            let v = ks18_vectors();
            (orthogonality_graph(&v)?, Some(v))
        }
    };
    let alpha = independence_number(&g)?;
    let packing = fractional_packing(&g);

    let tol = cli.tolerance.unwrap_or(TOL_SDP);
    let certificate = vectors.as_ref().and_then(|v| {
        let dim = v.first()?.components.len();
        let mut handle = vec![0i64; dim];
        handle[0] = 1;
        ThetaCertificate::from_vectors(&g, PureState::from_integers(&handle).ok()?, v).ok()
    });
    let mut opts = match certificate {
        Some(c) => ThetaOptions::certificate(c, true),
        None => ThetaOptions::sdp(),
    };
    opts.tol = tol;
    let theta = lovasz_theta(&g, &opts)?;
    let sdp = match &theta.sdp {
        Some(s) => s.clone(),
        None => lovasz_theta_sdp(&g)?,
    };
    let cover = clique_edge_cover_complement(&g, CoverBudget { time: a.budget });
    let n = g.n().max(1) as f64;

    let report = json!({
        "n": g.n(),
        "edges": g.edge_count(),
        "alpha": alpha.alpha,
        "alpha_witness": alpha.witness,
        "alpha_star": packing.value,
        "alpha_star_exact": packing.exact_value,
        "theta": theta.theta,
        "theta_method": theta.method,
        "theta_lower": theta.lower,
        "theta_upper": theta.upper,
        "theta_sdp": {
            "value": sdp.value,
            "gap": sdp.gap,
            "iterations": sdp.iterations,
        },
        "alpha_over_n": alpha.alpha as f64 / n,
        "theta_over_n": theta.theta / n,
        "cover": {
            "size": cover.cover.len(),
            "minimality": cover.minimality,
            "lower_bound": cover.lower_bound,
            "valid": cover.cover.validate(&g).is_ok(),
            "cliques": cover.cover.cliques.iter().map(|c| c.members.clone()).collect::<Vec<_>>(),
        },
    });
    let body = match format {
        Format::Json => to_canonical_json(&report),
        _ => {
            let mut t = String::new();
            writeln!(t, "alpha: {}  witness {{{}}}", alpha.alpha, join(alpha.witness.iter())).unwrap();
            writeln!(
                t,
                "alpha*: {}{}",
                format_float(packing.value),
                packing.exact_value.as_ref().map(|e| format!(" ({e})")).unwrap_or_default()
            )
            .unwrap();
            let method = match theta.method {
                ThetaMethod::Certificate => "certificate pinching",
                ThetaMethod::Sdp => "sdp",
            };
            writeln!(t, "theta: {} ({method})", format_float(theta.theta)).unwrap();
            writeln!(t, "theta (sdp): {}", format_float(sdp.value)).unwrap();
            writeln!(
                t,
                "cover of complement: {} cliques, {} (lower bound {})",
                cover.cover.len(),
                match cover.minimality {
                    Minimality::Proven => "proven minimal",
                    Minimality::UpperBoundOnly => "upper bound only",
                },
                cover.lower_bound
            )
            .unwrap();
            t
        }
    };
    Ok(Outcome::ok(body))
}

// simulate

fn cmd_simulate(cli: &Cli, a: &SimulateArgs) -> Result<Outcome, Failure> {
    let format = format_of(cli, "simulate", &[Format::Json, Format::Csv, Format::Text])?;
    let channel = match a.noise {
        Some(v) => NoiseChannel::visibility(v)?,
        None => NoiseChannel::None,
    };
    if a.random.is_some() || a.mixed.is_some() {
        return simulate_sweep(cli, a, format, channel);
    }
    let (label, rho) = match (&a.state, &a.state_file) {
        (Some(code), None) => {
            let code: StateCode = code.parse()?;
            (code.to_string(), catalog_state(code)?)
        }
        (None, Some(path)) => {
            let input = parse_state_json(&read_file(path)?)?;
            (input.label, input.state)
        }
        _ => {
            return Err(Failure::usage(
                "simulate needs --state, --state-file, --random or --mixed",
            ))
        }
    };
    let rho = apply_noise(&rho, channel)?;
    let want_sigma = a.quantity != QuantityArg::Xi;
    let want_xi = a.quantity != QuantityArg::Sigma;
    let s = want_sigma.then(|| sigma(&rho)).transpose()?;
    let x = want_xi.then(|| xi(&rho)).transpose()?;
    let terms = if a.terms { Some(probability_table(&rho)?) } else { None };

    let body = match format {
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("state".into(), json!(label));
            obj.insert("noise".into(), json!(channel));
            if let Some(s) = s {
                obj.insert("sigma".into(), json!(s));
            }
            if let Some(x) = x {
                obj.insert("xi".into(), json!(x));
            }
            if let Some(terms) = &terms {
                let list: Vec<Value> = terms
                    .iter()
                    .map(|(p, v)| json!({"proposition": p, "probability": v}))
                    .collect();
                obj.insert("terms".into(), Value::Array(list));
                obj.insert("terms_sum".into(), json!(terms.iter().map(|t| t.1).sum::<f64>()));
            }
            to_canonical_json(&Value::Object(obj))
        }
        Format::Csv => match &terms {
            Some(terms) => csv_text(
                &["state_code", "context", "outcomes", "value", "uncertainty"],
                terms.iter().map(|(p, v)| {
                    vec![
                        label.clone(),
                        p.context.to_string(),
                        p.outcome_string(),
                        format_float(*v),
                        String::new(),
                    ]
                }),
            ),
            None => csv_text(
                &["state_code", "quantity", "value"],
                [("sigma", s), ("xi", x)]
                    .into_iter()
                    .filter_map(|(q, v)| v.map(|v| vec![label.clone(), q.to_string(), format_float(v)])),
            ),
        },
        _ => {
            let mut t = String::new();
            if let Some(s) = s {
                writeln!(t, "{label} sigma {}", format_float(s)).unwrap();
            }
            if let Some(x) = x {
                writeln!(t, "{label} xi {}", format_float(x)).unwrap();
            }
            if let Some(terms) = &terms {
                for (p, v) in terms {
                    writeln!(t, "{p} {}", format_float(*v)).unwrap();
                }
                writeln!(t, "sum {}", format_float(terms.iter().map(|t| t.1).sum())).unwrap();
            }
            t
        }
    };
    Ok(Outcome::ok(body))
}

#[derive(Serialize)]
struct Sweep {
    seed: u64,
    pure: usize,
    mixed: usize,
    noise: NoiseChannel,
    max_sigma_deviation: f64,
    max_xi_deviation: f64,
    tolerance: f64,
    passed: bool,
}

fn simulate_sweep(cli: &Cli, a: &SimulateArgs, format: Format, channel: NoiseChannel) -> Result<Outcome, Failure> {
    let tolerance = cli.tolerance.unwrap_or(DEFAULT_STATE_TOLERANCE);
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let pure = a.random.unwrap_or(0);
    let mixed = a.mixed.unwrap_or(0);
    let mut states: Vec<DensityMatrix> = Vec::with_capacity(pure + mixed);
    for _ in 0..pure {
        states.push(random_pure_state(&mut rng).density());
    }
    for _ in 0..mixed {
        states.push(random_mixed_state(&mut rng));
    }
    let (mut ds, mut dx) = (0.0f64, 0.0f64);
    for rho in &states {
        let rho = apply_noise(rho, channel)?;
        if a.quantity != QuantityArg::Xi {
            ds = ds.max((sigma(&rho)? - certify::QUANTUM_VALUE).abs());
        }
        if a.quantity != QuantityArg::Sigma {
            dx = dx.max((xi(&rho)? - certify::QUANTUM_VALUE).abs());
        }
    }
    let sweep = Sweep {
        seed: cli.seed,
        pure,
        mixed,
        noise: channel,
        max_sigma_deviation: ds,
        max_xi_deviation: dx,
        tolerance,
        passed: ds < tolerance && dx < tolerance,
    };
    let body = match format {
        Format::Json => to_canonical_json(&sweep),
        Format::Csv => csv_text(
            &["seed", "pure", "mixed", "max_sigma_deviation", "max_xi_deviation", "passed"],
            [vec![
                sweep.seed.to_string(),
                pure.to_string(),
                mixed.to_string(),
                format!("{ds:e}"),
                format!("{dx:e}"),
                sweep.passed.to_string(),
            ]],
        ),
        _ => format!(
            "states: {pure} pure, {mixed} mixed (seed {})\nmax |sigma - 4.5|: {ds:e}\nmax |xi - 4.5|: {dx:e}\n{}\n",
            cli.seed,
            if sweep.passed { "state independent within tolerance" } else { "tolerance exceeded" }
        ),
    };
    let failure = (!sweep.passed).then(|| format!("state independence violated beyond {tolerance:e}"));
    Ok(Outcome { body, failure })
}

// certify

struct Inputs {
    sigma: Option<PathBuf>,
    edges: Option<PathBuf>,
    terms: Option<PathBuf>,
    xi: Option<PathBuf>,
}

fn resolve_inputs(cli: &Cli, a: &CertifyArgs) -> Inputs {
    let from_dir = |name: &str| {
        cli.data
            .as_ref()
            .map(|d| d.join(name))
            .filter(|p| p.is_file())
    };
    Inputs {
        sigma: a.sigma.clone().or_else(|| from_dir("sigma.csv")),
        edges: a.edges.clone().or_else(|| from_dir("edges.csv")),
        terms: a.terms.clone().or_else(|| from_dir("terms.csv")),
        xi: a.xi.clone().or_else(|| from_dir("xi.csv")),
    }
}

fn table_or_embedded(path: &Option<PathBuf>, quantity: Quantity, id: TableId, policy: DedupePolicy) -> Result<Table, Failure> {
    let t = match path {
        Some(p) => load_table(&TableSource::File {
            path: p.clone(),
            quantity,
        })?,
        None => load_table(&TableSource::Embedded(id))?,
    };
    Ok(t.dedupe(policy))
}

fn duplicate_flags(t: &Table) -> Vec<String> {
    t.duplicates
        .iter()
        .map(|d| format!("{}: {} repeated on lines {}", t.name, d.key, join(d.lines.iter())))
        .collect()
}

fn cmd_certify(cli: &Cli, a: &CertifyArgs) -> Result<Outcome, Failure> {
    if let Some(dir) = &a.dump_fixtures {
        let paths = certify::dump_fixtures(dir)?;
        let body = paths.iter().map(|p| format!("{}\n", p.display())).collect();
        return Ok(Outcome::ok(body));
    }
    let format = format_of(cli, "certify", &[Format::Json, Format::Csv, Format::Svg, Format::Text])?;
    let inputs = resolve_inputs(cli, a);

    let edges = table_or_embedded(&inputs.edges, Quantity::EdgeProbability, TableId::Exclusivity, a.dedupe)?;
    let estimate = estimate_epsilon(&edges.records)?;
    let noise = match a.epsilon {
        Some(e) => NoiseParams::new(e, 0.0)?,
        None => estimate.params,
    };
    let sigma_table = table_or_embedded(&inputs.sigma, Quantity::Sigma, TableId::SigmaAll, a.dedupe)?;
    let mut report = certify::certify(&sigma_table.records, &noise)?;

    let terms = match &inputs.terms {
        Some(p) => load_table(&TableSource::File {
            path: p.clone(),
            quantity: Quantity::TermProbability,
        })?,
        None => load_embedded_terms()?,
    }
    .dedupe(a.dedupe);
    let xi_table = table_or_embedded(&inputs.xi, Quantity::Xi, TableId::Xi, a.dedupe)?;
    let sums = recompute_xi_from_terms(&terms.records)?;
    let comparisons = compare_xi(&sums, &xi_table.records);
    let xi_matched = comparisons.iter().filter(|c| c.matches).count();

    let mut flags = Vec::new();
    for t in [&edges, &sigma_table, &terms, &xi_table] {
        flags.extend(duplicate_flags(t));
    }
    for (i, j) in &estimate.non_edges {
        flags.push(format!("p_{{{i},{j}}} is not an edge of the derived graph"));
    }
    for (i, j) in &estimate.missing {
        flags.push(format!("no record for directed edge p_{{{i},{j}}}"));
    }
    flags.append(&mut report.flags);
    for c in comparisons.iter().filter(|c| !c.matches) {
        flags.push(format!("{} xi recomputation differs from the reported value", c.state));
    }
    report.flags = flags;

    let mut summaries = serde_json::Map::new();
    summaries.insert("sigma".into(), json!(summary_statistics(&sigma_table.records)?));
    summaries.insert("xi".into(), json!(summary_statistics(&xi_table.records)?));
    if inputs.sigma.is_none() {
        let selected = load_table(&TableSource::Embedded(TableId::SigmaSelected))?;
        summaries.insert("sigma_selected".into(), json!(summary_statistics(&selected.records)?));
    }

    let gate_ok = report.threshold.passed;
    let passed = gate_ok && report.all_advantage() && xi_matched == comparisons.len();
    let document = json!({
        "sources": {
            "edges": edges.name,
            "sigma": sigma_table.name,
            "terms": terms.name,
            "xi": xi_table.name,
        },
        "epsilon": {
            "source": if a.epsilon.is_some() { "given" } else { "estimated" },
            "estimate": estimate.params.epsilon,
            "estimate_uncertainty": estimate.params.epsilon_uncertainty,
            "records": estimate.count,
            "used": noise.epsilon,
            "unmatched_pairs": estimate.non_edges,
            "missing_pairs": estimate.missing,
            "repeated_pairs": estimate.repeated,
        },
        "certification": report,
        "xi_consistency": {
            "matched": xi_matched,
            "total": comparisons.len(),
            "comparisons": comparisons,
        },
        "summaries": summaries,
        "passed": passed,
    });

    if let Some(path) = &a.svg {
        write_file(path, &band_chart(&report))?;
    }
    let body = match format {
        Format::Json => to_canonical_json(&document),
        Format::Svg => band_chart(&report),
        Format::Csv => verdict_csv(&report),
        _ => certify_text(&report, &estimate.params, xi_matched, comparisons.len()),
    };

    let mut problems = Vec::new();
    if let Some(msg) = &report.gate_message {
        problems.push(msg.clone());
    }
    let missing = report.states.len() - report.advantage_count;
    if missing > 0 {
        problems.push(format!("{missing} states show no advantage"));
    }
    if xi_matched != comparisons.len() {
        problems.push(format!("{} xi recomputations do not match", comparisons.len() - xi_matched));
    }
    let failure = (a.strict && !problems.is_empty())
        .then(|| format!("certification failed: {}", problems.join("; ")));
    Ok(Outcome { body, failure })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::QuantumAdvantage => "quantum advantage",
        Verdict::NoAdvantage => "no advantage",
    }
}

fn verdict_csv(report: &CertificationReport) -> String {
    csv_text(
        &["state_code", "quantity", "value", "uncertainty", "corrected_bound", "margin", "verdict", "in_band"],
        report.states.iter().map(|s| {
            vec![
                s.state.to_string(),
                s.quantity.to_string(),
                format_float(s.value),
                s.uncertainty.map(format_float).unwrap_or_default(),
                format_float(report.corrected_bound),
                format_float(s.margin),
                verdict_name(s.verdict).to_string(),
                s.in_band.to_string(),
            ]
        }),
    )
}

fn certify_text(report: &CertificationReport, estimate: &NoiseParams, xi_matched: usize, xi_total: usize) -> String {
    let mut t = String::new();
    writeln!(
        t,
        "epsilon: {} (estimate {} ± {})",
        format_float(report.noise.epsilon),
        format_float(estimate.epsilon),
        format_float(estimate.epsilon_uncertainty)
    )
    .unwrap();
    writeln!(t, "corrected classical bound: {}", format_float(report.corrected_bound)).unwrap();
    writeln!(
        t,
        "expected band: [{}, {}]",
        format_float(report.band.0),
        format_float(report.band.1)
    )
    .unwrap();
    writeln!(
        t,
        "threshold: epsilon < {} ({}; rounded {}): {}",
        report.threshold.exact,
        format_float(report.threshold.exact_value),
        report.threshold.rounded,
        if report.threshold.passed { "ok" } else { "FAIL" }
    )
    .unwrap();
    if let Some(msg) = &report.gate_message {
        writeln!(t, "{msg}").unwrap();
    }
    for s in &report.states {
        writeln!(
            t,
            "{:<6} {:<8} {}{}",
            s.state.to_string(),
            format_float(s.value),
            verdict_name(s.verdict),
            if s.in_band { "" } else { " (outside band)" }
        )
        .unwrap();
    }
    writeln!(t, "advantage: {}/{}", report.advantage_count, report.states.len()).unwrap();
    writeln!(t, "in band: {}/{}", report.in_band_count, report.states.len()).unwrap();
    writeln!(t, "xi recomputation: {xi_matched}/{xi_total} match").unwrap();
    for f in &report.flags {
        writeln!(t, "flag: {f}").unwrap();
    }
    t
}

// strategy

fn cmd_strategy(cli: &Cli, a: &StrategyArgs) -> Result<Outcome, Failure> {
    let format = format_of(cli, "strategy", &[Format::Json, Format::Csv, Format::Text])?;
    let g = orthogonality_graph(&ks18_vectors())?;
    let strategy = match &a.validate {
        Some(path) => BoxStrategy::from_json(&read_file(path)?)?,
        None => construct_box_strategy(&g)?,
    };
    let report = validate_box_strategy(&g, &strategy);
    let failures = report.failures();
    let body = match format {
        Format::Json => {
            let mut v = strategy.to_json_value();
            let obj = v.as_object_mut().expect("strategy is an object");
            obj.insert("validation".into(), json!(report));
            obj.insert("failures".into(), json!(failures));
            to_canonical_json(&v)
        }
        Format::Csv => csv_text(
            &["box", "tests"],
            strategy
                .dual_sets()
                .into_iter()
                .map(|(b, tests)| vec![b.to_string(), join(tests.iter()).replace(", ", " ")]),
        ),
        _ => {
            let mut t = String::new();
            let per_test: std::collections::BTreeSet<usize> = report.boxes_per_test.values().copied().collect();
            writeln!(t, "boxes: {}", strategy.boxes.len()).unwrap();
            writeln!(t, "yes-boxes per test: {}", join(per_test.iter())).unwrap();
            writeln!(
                t,
                "sigma over ball placements: min {} max {} mean {}",
                report.min_sigma,
                report.max_sigma,
                format_float(report.mean_sigma)
            )
            .unwrap();
            for (b, tests) in strategy.dual_sets() {
                writeln!(t, "  box {b}: {{{}}}", join(tests.iter())).unwrap();
            }
            for f in &failures {
                writeln!(t, "FAIL {f}").unwrap();
            }
            t
        }
    };
    let failure = (!failures.is_empty()).then(|| format!("strategy invalid: {}", failures.join("; ")));
    Ok(Outcome { body, failure })
}

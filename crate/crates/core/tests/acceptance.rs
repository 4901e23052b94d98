//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the report is always printed.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ks18::algebra::exact::q;
use ks18::algebra::{PureState, QMatrix};
use ks18::certify::{
    advantage_threshold, certify, compare_xi, corrected_classical_bound, estimate_epsilon,
    expected_band, load_embedded_terms, load_table, recompute_xi_from_terms, summary_statistics,
    NoiseParams, TableId, TableSource,
};
use ks18::classical::{construct_box_strategy, validate_box_strategy};
use ks18::invariants::{
    clique_edge_cover_complement, fractional_packing, independence_number, lovasz_theta,
    CoverBudget, Minimality, ThetaCertificate, ThetaMethod, ThetaOptions,
};
use ks18::ksets::{
    find_bases, ks18_vectors, operator_completeness, orthogonality_graph, state_catalog,
    verify_ks_uncolorability, Basis, QUOTED_EXCLUSIVITY_RELATIONS,
};
use ks18::quantum::{
    compatibility_audit, omitted_vertex_map, proposition_projector, proposition_vertex_map,
    random_mixed_state, random_pure_state, sequential_probability, sigma, xi, Context,
    Proposition, DEFAULT_SEED,
};

enum Status {
    Pass,
    /// The computable parts hold; a stated claim is contradicted by the printed data.
    Deviation,
}

type Outcome = Result<(Status, String), String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table(id: TableId) -> Vec<ks18::certify::MeasurementRecord> {
    load_table(&TableSource::Embedded(id)).expect("embedded table").records
}

fn c1_exactness() -> Outcome {
    let v = ks18_vectors();
    let g = orthogonality_graph(&v).map_err(|e| e.to_string())?;
    for (a, b) in g.labelled_edges() {
        let dot = v[a as usize - 1].dot(&v[b as usize - 1]);
        check(dot == 0, || format!("edge {{{a}, {b}}} has dot product {dot}"))?;
    }
    let degrees: Vec<usize> = (0..g.n()).map(|i| g.degree(i)).collect();
    check(degrees.iter().all(|&d| d == 7), || format!("degrees {degrees:?}"))?;
    check(g.edge_count() == 63, || format!("{} edges", g.edge_count()))?;
    let bases = find_bases(&g, &v).map_err(|e| e.to_string())?;
    check(bases.len() == 9, || format!("{} bases", bases.len()))?;
    for id in 1..=18 {
        let k = bases.iter().filter(|b| b.contains(id)).count();
        check(k == 2, || format!("vertex {id} lies in {k} bases"))?;
    }
    Ok((
        Status::Pass,
        format!(
            "63 edges, 7-regular, 9 bases, each vertex in 2 (prose quotes {QUOTED_EXCLUSIVITY_RELATIONS} relations; reported as a discrepancy)"
        ),
    ))
}

fn c2_uncolorability() -> Outcome {
    let v = ks18_vectors();
    let g = orthogonality_graph(&v).map_err(|e| e.to_string())?;
    let bases = find_bases(&g, &v).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let r = verify_ks_uncolorability(&g, &bases);
    let elapsed = start.elapsed();
    check(r.is_uncolorable(), || "assignment found".into())?;
    check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<u32> = (1..=18).collect();
        perm.shuffle(&mut rng);
        let relabel = |l: u32| perm[l as usize - 1];
        let mut order: Vec<usize> = (0..18).collect();
        order.shuffle(&mut rng);
        let h = g
            .relabel(relabel)
            .and_then(|h| h.permute(&order))
            .map_err(|e| e.to_string())?;
        let hb: Vec<Basis> = bases
            .iter()
            .map(|b| Basis::new(b.members.iter().map(|&l| relabel(l)).collect()))
            .collect();
        check(verify_ks_uncolorability(&h, &hb).is_uncolorable(), || {
            format!("permutation seed {seed} is colorable")
        })?;
    }
    Ok((
        Status::Pass,
        format!("UNSAT in {:.3} ms ({} nodes); UNSAT under 10 label permutations", elapsed.as_secs_f64() * 1e3, r.stats().nodes),
    ))
}

fn c3_completeness() -> Outcome {
    let total = operator_completeness(&ks18_vectors()).map_err(|e| e.to_string())?;
    check(*total.matrix() == QMatrix::identity(4).scale(q(9, 2)), || {
        "sum of projectors is not 9/2 I".into()
    })?;
    Ok((Status::Pass, "sum of the 18 projectors = 9/2 I in rational arithmetic".into()))
}

fn c4_invariants() -> Outcome {
    let v = ks18_vectors();
    let g = orthogonality_graph(&v).map_err(|e| e.to_string())?;
    let alpha = independence_number(&g).map_err(|e| e.to_string())?.alpha;
    check(alpha == 4, || format!("alpha = {alpha}"))?;
    let packing = fractional_packing(&g);
    let exact = packing.exact_ratio();
    check(exact == Some(BigRational::new(BigInt::from(9), BigInt::from(2))), || {
        format!("alpha* = {:?}", packing.exact_value)
    })?;
    let handle = PureState::from_integers(&[1, 0, 0, 0]).map_err(|e| e.to_string())?;
    let cert = ThetaCertificate::from_vectors(&g, handle, &v).map_err(|e| e.to_string())?;
    let pinched = lovasz_theta(&g, &ThetaOptions::certificate(cert, false)).map_err(|e| e.to_string())?;
    check(pinched.method == ThetaMethod::Certificate && (pinched.theta - 4.5).abs() < 1e-6, || {
        format!("pinched theta {}", pinched.theta)
    })?;
    let sdp = lovasz_theta(&g, &ThetaOptions::sdp()).map_err(|e| e.to_string())?;
    check((sdp.theta - 4.5).abs() < 1e-6, || format!("sdp theta {}", sdp.theta))?;
    let cover = clique_edge_cover_complement(&g, CoverBudget::default());
    check(cover.cover.len() == 18, || format!("cover of size {}", cover.cover.len()))?;
    cover.cover.validate(&g)?;
    check(cover.minimality == Minimality::Proven, || "minimality not proven".into())?;
    Ok((
        Status::Pass,
        format!(
            "alpha = 4, alpha* = 9/2, theta = {:.9} (pinching) / {:.9} (sdp), cover of 18 cliques validated and minimal",
            pinched.theta, sdp.theta
        ),
    ))
}

fn c5_state_independence() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut record = |rho: &ks18::algebra::DensityMatrix| -> Result<(), String> {
        let s = sigma(rho).map_err(|e| e.to_string())?;
        let x = xi(rho).map_err(|e| e.to_string())?;
        worst = worst.max((s - 4.5).abs()).max((x - 4.5).abs());
        count += 1;
        Ok(())
    };
    for entry in state_catalog() {
        record(&entry.state)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for _ in 0..1000 {
        record(&random_pure_state(&mut rng).density())?;
    }
    for _ in 0..100 {
        record(&random_mixed_state(&mut rng))?;
    }
    check(worst < 1e-12, || format!("max deviation {worst:e}"))?;
    Ok((Status::Pass, format!("{count} states, max |value - 4.5| = {worst:.2e}")))
}

fn c6_correspondence() -> Outcome {
    let map = proposition_vertex_map().map_err(|e| e.to_string())?;
    let vectors = ks18_vectors();
    let mut hit: Vec<u32> = Vec::new();
    for (prop, id) in &map {
        let p = proposition_projector(prop);
        let vp = vectors[*id as usize - 1].projector().map_err(|e| e.to_string())?;
        check(p.exact() == vp.exact(), || format!("{prop} does not equal vertex {id}"))?;
        hit.push(*id);
    }
    hit.sort_unstable();
    check(hit == (1..=18).collect::<Vec<_>>(), || format!("vertices hit: {hit:?}"))?;
    let mut extra: Vec<u32> = omitted_vertex_map().map_err(|e| e.to_string())?.iter().map(|(_, v)| *v).collect();
    extra.sort_unstable();
    check(extra == (19..=24).collect::<Vec<_>>(), || format!("omitted outcomes map to {extra:?}"))?;

    let forbidden: Vec<Proposition> = Context::inequality_contexts()
        .into_iter()
        .flat_map(|c| (0..8u8).map(move |k| Proposition::new([k >> 2 & 1, k >> 1 & 1, k & 1], c).unwrap()))
        .filter(|p| !p.respects_parity())
        .collect();
    check(forbidden.len() == 24, || format!("{} parity-violating outcomes", forbidden.len()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rho = random_pure_state(&mut rng).density();
        for p in &forbidden {
            worst = worst.max(sequential_probability(&rho, p).map_err(|e| e.to_string())?.abs());
        }
    }
    check(worst < 1e-12, || format!("parity-violating probability {worst:e}"))?;
    Ok((
        Status::Pass,
        format!("18 exact projector matches, omitted outcomes -> v19..v24, 24 forbidden outcomes max p = {worst:.1e}"),
    ))
}

fn c7_audit() -> Outcome {
    let mut worst = 0.0f64;
    for ctx in Context::inequality_contexts() {
        let r = compatibility_audit(&ctx, 100, DEFAULT_SEED).map_err(|e| e.to_string())?;
        check(r.passed, || format!("context {ctx}: {r:?}"))?;
        worst = worst.max(r.order_deviation).max(r.repeat_deviation);
    }
    Ok((Status::Pass, format!("6 contexts x 100 states, max deviation {worst:.1e}")))
}

fn c8_noise() -> Outcome {
    let edges = table(TableId::Exclusivity);
    let est = estimate_epsilon(&edges).map_err(|e| e.to_string())?;
    let eps = est.params.epsilon;
    check((eps - 0.014).abs() < 0.002, || format!("epsilon {eps}"))?;
    let p = NoiseParams::new(0.014, 0.0).map_err(|e| e.to_string())?;
    let bound = corrected_classical_bound(&p).map_err(|e| e.to_string())?;
    check((bound - 4.196).abs() < 1e-12, || format!("bound {bound}"))?;
    check(advantage_threshold() == Rational64::new(1, 28), || "threshold is not 1/28".into())?;
    let (lo, hi) = expected_band(&p).map_err(|e| e.to_string())?;
    check((lo - 4.437).abs() < 1e-12 && (hi - 4.689).abs() < 1e-12, || format!("band [{lo}, {hi}]"))?;
    let report = certify(&table(TableId::SigmaAll), &p).map_err(|e| e.to_string())?;
    check(report.states.len() == 28 && report.all_advantage(), || {
        format!("{}/{} show an advantage", report.advantage_count, report.states.len())
    })?;
    let outside: Vec<String> = report
        .out_of_band()
        .iter()
        .map(|s| format!("{}={}", s.state, s.value))
        .collect();
    let summary = format!(
        "epsilon = {eps:.7}, bound(0.014) = 4.196, threshold 1/28 (quoted 0.035), band [4.437, 4.689], 28/28 above bound"
    );
    if outside.is_empty() {
        Ok((Status::Pass, format!("{summary}, 28/28 in band")))
    } else {
        // The printed values below 4.5(1 - 0.014) are data, not a computation error.
        check(outside == ["v12=4.42", "v17=4.41", "v21=4.37", "v23=4.42"], || {
            format!("unexpected out-of-band set {outside:?}")
        })?;
        Ok((
            Status::Deviation,
            format!(
                "{summary}; only {}/28 in band, below band: {}",
                report.in_band_count,
                outside.join(", ")
            ),
        ))
    }
}

fn c9_consistency() -> Outcome {
    let terms = load_embedded_terms().map_err(|e| e.to_string())?;
    let sums = recompute_xi_from_terms(&terms.records).map_err(|e| e.to_string())?;
    let cmp = compare_xi(&sums, &table(TableId::Xi));
    check(cmp.len() == 15, || format!("{} states", cmp.len()))?;
    let worst = cmp
        .iter()
        .map(|c| c.difference.map_or(f64::INFINITY, f64::abs))
        .fold(0.0f64, f64::max);
    check(worst < 2e-3, || format!("max xi difference {worst}"))?;
    let t1 = summary_statistics(&table(TableId::SigmaSelected)).map_err(|e| e.to_string())?;
    let weighted = t1.weighted_mean.ok_or("table I has no uncertainties")?;
    check((weighted - 4.512).abs() < 1e-3, || format!("table I mean {weighted}"))?;
    let t4 = summary_statistics(&table(TableId::SigmaAll)).map_err(|e| e.to_string())?;
    check((t4.mean - 4.51).abs() < 0.01, || format!("table IV mean {}", t4.mean))?;
    Ok((
        Status::Pass,
        format!(
            "15/15 xi sums within {worst:.1e}; table I weighted mean {weighted:.4} (plain mean {:.4}); table IV mean {:.4}",
            t1.mean, t4.mean
        ),
    ))
}

fn c10_box_strategy() -> Outcome {
    let g = orthogonality_graph(&ks18_vectors()).map_err(|e| e.to_string())?;
    let s = construct_box_strategy(&g).map_err(|e| e.to_string())?;
    let r = validate_box_strategy(&g, &s);
    check(r.passed(), || r.failures().join("; "))?;
    check(s.boxes.len() == 18, || format!("{} boxes", s.boxes.len()))?;
    check(r.boxes_per_test.values().all(|&c| c == 4), || "unbalanced".into())?;
    check(r.min_sigma == 4 && r.max_sigma == 4, || format!("sigma {}..{}", r.min_sigma, r.max_sigma))?;
    check(r.covers_complement, || "complement not covered".into())?;

    let mut exclusive = s.clone();
    let box_of_2 = *s.tests[&2].iter().next().unwrap();
    exclusive.tests.get_mut(&1).unwrap().insert(box_of_2);
    let f = validate_box_strategy(&g, &exclusive).failures();
    check(f.iter().any(|m| m.starts_with("exclusivity: tests 1 and 2")), || format!("{f:?}"))?;

    let mut unbalanced = s.clone();
    let first = *s.tests[&5].iter().next().unwrap();
    unbalanced.tests.get_mut(&5).unwrap().remove(&first);
    let f = validate_box_strategy(&g, &unbalanced).failures();
    check(f.iter().any(|m| m.starts_with("balance: test 5")), || format!("{f:?}"))?;
    Ok((
        Status::Pass,
        "18 boxes, 4 yes-boxes per test (4/18 = 0.222), sigma = 4 in every box; tampered strategies rejected (exclusivity, balance)".into(),
    ))
}

const CLI_SUITE: &[&[&str]] = &[
    &["graph", "--format", "json"],
    &["graph", "--check-table-v", "--format", "json"],
    &["verify", "--format", "json"],
    &["invariants", "--format", "json"],
    &["simulate", "--state", "rho28", "--terms", "--format", "json"],
    &["simulate", "--random", "200", "--mixed", "20", "--format", "json"],
    &["certify", "--format", "json"],
    &["certify", "--format", "svg"],
    &["strategy", "--format", "json"],
];

fn run_suite() -> Result<Vec<Vec<u8>>, String> {
    CLI_SUITE
        .iter()
        .map(|args| {
            let o = Command::new(env!("CARGO_BIN_EXE_ks18"))
                .args(*args)
                .args(["--seed", "7"])
                .env_remove("KS_FIXTURES_DIR")
                .output()
                .map_err(|e| e.to_string())?;
            if !o.status.success() {
                return Err(format!("`ks18 {}` exited with {}", args.join(" "), o.status));
            }
            Ok(o.stdout)
        })
        .collect()
}

fn c11_determinism() -> Outcome {
    let a = run_suite()?;
    let b = run_suite()?;
    for (args, (x, y)) in CLI_SUITE.iter().zip(a.iter().zip(&b)) {
        check(x == y, || format!("`ks18 {}` differs between runs", args.join(" ")))?;
    }
    let bytes: usize = a.iter().map(Vec::len).sum();
    Ok((Status::Pass, format!("{} commands, {bytes} bytes identical across two runs", CLI_SUITE.len())))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("KS-set exactness", c1_exactness),
        ("uncolorability", c2_uncolorability),
        ("completeness identity", c3_completeness),
        ("graph invariants", c4_invariants),
        ("state independence", c5_state_independence),
        ("proposition correspondence", c6_correspondence),
        ("compatibility audit", c7_audit),
        ("noise certification", c8_noise),
        ("data consistency", c9_consistency),
        ("classical optimum", c10_box_strategy),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let line = match run() {
            Ok((Status::Pass, detail)) => format!("PASS      {name}: {detail}"),
            Ok((Status::Deviation, detail)) => format!("DEVIATION {name}: {detail}"),
            Err(e) => {
                failed += 1;
                format!("FAIL      {name}: {e}")
            }
        };
        println!("criterion {:>2} {line}", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

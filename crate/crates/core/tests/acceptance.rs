//! The acceptance gate: every criterion runs and prints one pass/fail line,
//! then the test fails if any criterion did.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use monolab::func::{BitTableFunction, LtfSpec, MidLayerSpec};
use monolab::harness::streams::{default_workers, stream_rng};
use monolab::harness::{certify_no_draws, lower_bound, scaling, Family};
use monolab::hypergrid::{
    even_block_pairing, grid_preceq, grid_table_distance, phi_even, phi_odd, GridTable, OddGadget,
};
use monolab::lower_bound::{
    fourier_distance_lower_bound, is_nice, moment_match_check, sample_no, sample_yes, BoundMode,
    QueryMatrix,
};
use monolab::oracle::{
    brute_force_distance_with, dichotomy_scan, exact_distance, random_monotone, MonotoneFamily,
};
use monolab::pairs::{
    conditional_law, d_marginal, d_prime_hit_probability, edge_inequality_holds, sample_d,
    sample_d_prime, sample_d_prime_given, score, PointSet,
};
use monolab::stats::chi_square;
use monolab::testers::{
    calibrate_repetition_constant, combined_runs, default_repetitions, exact_weighted_rejection,
    rejection_probability, run_trials, BaselinePathTester, CombinedTester, EdgeTester,
    TesterConfig, TesterKind, TrialTally, WeightedPathTester,
};

const SEED: u64 = 20_240_601;

/// Smallest `v·σ/ε²` over all non-monotone functions on four variables.
const DICHOTOMY_N4_MIN: (i64, i64) = (1, 1);
const DICHOTOMY_N4_ARGMIN: &str = "0800";

/// Chi-square p-value below which a sampler is rejected.
const CHI_SQUARE_ALPHA: f64 = 1e-3;

struct Outcome {
    pass: bool,
    detail: String,
    /// Stable summary of every random quantity, compared across reruns.
    digest: Option<String>,
}

impl Outcome {
    fn exact(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
            digest: None,
        }
    }

    fn sampled(pass: bool, detail: impl Into<String>, digest: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
            digest: Some(digest.into()),
        }
    }
}

fn all_tables(n: usize) -> impl Iterator<Item = BitTableFunction> {
    (0..1u64 << (1 << n)).map(move |w| BitTableFunction::from_words(n, vec![w]).unwrap())
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut mismatches = 0;
    let mut checked = 0;
    for n in 1..=3 {
        let family = MonotoneFamily::enumerate(n).unwrap();
        for f in all_tables(n) {
            mismatches += (exact_distance(&f).unwrap().distance
                != brute_force_distance_with(&family, &f).unwrap())
                as u32;
            checked += 1;
        }
    }
    let family = MonotoneFamily::enumerate(4).unwrap();
    let mut rng = stream_rng(SEED, "acceptance/oracle", 0);
    for _ in 0..10_000 {
        let f = BitTableFunction::random(4, &mut rng).unwrap();
        mismatches += (exact_distance(&f).unwrap().distance
            != brute_force_distance_with(&family, &f).unwrap()) as u32;
        checked += 1;
    }
    Outcome::exact(
        mismatches == 0,
        format!("{checked} functions, {mismatches} mismatches"),
    )
}

fn zero_iff_monotone() -> Outcome {
    let mut bad = 0;
    for n in 1..=3 {
        for f in all_tables(n) {
            bad += (exact_distance(&f).unwrap().distance.is_zero() != f.is_monotone()) as u32;
        }
    }
    Outcome::exact(
        bad == 0,
        format!("{bad} disagreements over all functions with n <= 3"),
    )
}

fn dichotomy() -> Outcome {
    let tables: Vec<BitTableFunction> = all_tables(4).collect();
    let scan = dichotomy_scan(tables.iter()).unwrap();
    let frozen = Rational64::new(DICHOTOMY_N4_MIN.0, DICHOTOMY_N4_MIN.1);
    let min = scan.min_ratio.unwrap();
    let pass = min > Rational64::zero()
        && min == frozen
        && scan.argmin_hex.as_deref() == Some(DICHOTOMY_N4_ARGMIN);
    Outcome::exact(
        pass,
        format!(
            "{} far functions, min v*sigma/eps^2 = {min} at {:?} (frozen {frozen})",
            scan.far_functions, scan.argmin_hex
        ),
    )
}

fn band_set<R: Rng>(spec: &MidLayerSpec, p: f64, rng: &mut R) -> PointSet {
    PointSet::new(
        spec.n(),
        (0..1u64 << spec.n()).filter(|&x| spec.contains(x) && rng.random_bool(p)),
    )
}

fn score_identity_and_samplers() -> Outcome {
    let spec = MidLayerSpec::new(8, 0.5).unwrap();
    let l = BigRational::from_integer(BigInt::from(spec.layer_count()));
    let mut rng = stream_rng(SEED, "acceptance/score", 0);
    let mut identity_failures = 0;
    for _ in 0..5 {
        let a = band_set(&spec, 0.3, &mut rng);
        for x in (0..256u64).filter(|&x| spec.contains(x)) {
            let p = score(x, &a, &spec).unwrap();
            identity_failures += (d_prime_hit_probability(&spec, x, &a)
                != (&p.score_down + &p.score_up) / &l) as u32;
        }
    }
    let mut pvalues = Vec::new();
    // The conditional law of y given x, for three fixed x.
    for x in [0b0000_1111u64, 0b0101_0001, 0b1110_1101] {
        let law = conditional_law(&spec, x);
        let index: BTreeMap<u64, usize> =
            law.iter().enumerate().map(|(i, (z, _))| (*z, i)).collect();
        let mut counts = vec![0u64; law.len()];
        for _ in 0..1_000_000 {
            counts[index[&sample_d_prime_given(&spec, x, &mut rng).y]] += 1;
        }
        let probs: Vec<f64> = law.iter().map(|(_, p)| to_f64(p)).collect();
        pvalues.push(chi_square(&counts, &probs).unwrap().1);
    }
    // D': (|x|, |y|) layer pairs, exact probability C(n,a)/|band| · 1/L.
    let band = spec.point_count().unwrap() as f64;
    let layers = spec.layer_list();
    let cell = |a: usize, b: usize| {
        layers.iter().position(|&w| w == a).unwrap() * layers.len()
            + layers.iter().position(|&w| w == b).unwrap()
    };
    let mut counts = vec![0u64; layers.len() * layers.len()];
    for _ in 0..1_000_000 {
        let p = sample_d_prime(&spec, &mut rng);
        counts[cell(p.x.count_ones() as usize, p.y.count_ones() as usize)] += 1;
    }
    let mut probs = vec![0.0; counts.len()];
    for &a in &layers {
        for &b in &layers {
            probs[cell(a, b)] =
                num_integer::binomial(8u64, a as u64) as f64 / band / layers.len() as f64;
        }
    }
    pvalues.push(chi_square(&counts, &probs).unwrap().1);
    // D: the point marginal of x.
    let mut counts = vec![0u64; 256];
    for _ in 0..1_000_000 {
        counts[sample_d(&spec, &mut rng).x as usize] += 1;
    }
    let probs: Vec<f64> = (0..256u64).map(|z| to_f64(&d_marginal(&spec, z))).collect();
    let support: Vec<usize> = (0..256).filter(|&i| probs[i] > 0.0).collect();
    pvalues.push(
        chi_square(
            &support.iter().map(|&i| counts[i]).collect::<Vec<_>>(),
            &support.iter().map(|&i| probs[i]).collect::<Vec<_>>(),
        )
        .unwrap()
        .1,
    );
    let pass = identity_failures == 0 && pvalues.iter().all(|&p| p > CHI_SQUARE_ALPHA);
    let shown: Vec<String> = pvalues.iter().map(|p| format!("{p:.4}")).collect();
    Outcome::sampled(
        pass,
        format!(
            "identity failures {identity_failures}; chi-square p-values [{}]",
            shown.join(", ")
        ),
        format!("{pvalues:?}"),
    )
}

fn edge_inequality() -> Outcome {
    let mut rng = stream_rng(SEED, "acceptance/edge-inequality", 0);
    let (mut edges, mut failures) = (0u64, 0u64);
    for t in 0..100 {
        let n = 4 + t % 7;
        let spec = MidLayerSpec::clamped(n, 0.5).unwrap();
        let f = BitTableFunction::random(n, &mut rng).unwrap();
        // A: the band points where the random function is 1.
        let a = PointSet::new(
            n,
            (0..1u64 << n).filter(|&x| spec.contains(x) && f.value(x)),
        );
        for x in 0..1u64 << n {
            for i in (0..n).filter(|&i| x >> i & 1 == 0) {
                edges += 1;
                failures += !edge_inequality_holds(x, i, &a).unwrap() as u64;
            }
        }
    }
    Outcome::exact(
        failures == 0,
        format!("{edges} edges over 100 instances, {failures} failures"),
    )
}

fn tally_kind(f: &BitTableFunction, kind: TesterKind, trials: u64, seed: u64) -> TrialTally {
    let n = f.n();
    let spec = MidLayerSpec::clamped(n, 0.5).unwrap();
    let plan = monolab::harness::streams::BlockPlan::new(
        seed,
        format!("acceptance/onesided/{}", kind.name()),
        trials,
    )
    .with_workers(default_workers());
    match kind {
        TesterKind::Edge => run_trials(&EdgeTester::new(n).unwrap(), f, &plan),
        TesterKind::Weighted => run_trials(&WeightedPathTester::from_spec(spec), f, &plan),
        TesterKind::Baseline => run_trials(&BaselinePathTester::from_spec(spec), f, &plan),
        TesterKind::Combined => run_trials(&CombinedTester::new(n, 0.5, 0.5).unwrap(), f, &plan),
    }
    .unwrap()
}

fn one_sided() -> Outcome {
    let kinds = [
        TesterKind::Edge,
        TesterKind::Weighted,
        TesterKind::Baseline,
        TesterKind::Combined,
    ];
    let mut total = TrialTally::default();
    let mut functions = 0;
    for n in 1..=4 {
        for (j, f) in MonotoneFamily::enumerate(n)
            .unwrap()
            .functions()
            .enumerate()
        {
            functions += 1;
            for kind in kinds {
                if kind == TesterKind::Combined && n < 2 {
                    continue;
                }
                total = total.merge(tally_kind(&f, kind, 500, (n * 1000 + j) as u64));
            }
        }
    }
    let mut rng = stream_rng(SEED, "acceptance/onesided", 0);
    for j in 0..1000u64 {
        let f = random_monotone(12, &mut rng).unwrap();
        functions += 1;
        for kind in kinds {
            total = total.merge(tally_kind(&f, kind, 100, 10_000 + j));
        }
    }
    let pass = total.violations == 0
        && total.unsound == 0
        && total.trials >= 100_000
        && total.queries_accounted();
    Outcome::sampled(
        pass,
        format!(
            "{functions} monotone functions, {} trials, {} rejections",
            total.trials, total.violations
        ),
        format!("{total:?}"),
    )
}

fn exact_vs_sampled() -> Outcome {
    let spec = MidLayerSpec::new(8, 0.5).unwrap();
    let mut rng = stream_rng(SEED, "acceptance/exact-vs-sampled", 0);
    let mut worst: f64 = 0.0;
    let mut digest = Vec::new();
    let mut far = 0;
    for j in 0..20u64 {
        let f = BitTableFunction::random(8, &mut rng).unwrap();
        far += (exact_distance(&f).unwrap().distance >= Rational64::new(1, 10)) as u32;
        let exact = to_f64(&exact_weighted_rejection(&f, &spec).unwrap());
        let t = rejection_probability(
            &f,
            TesterKind::Weighted,
            0.5,
            200_000,
            SEED + j,
            default_workers(),
        )
        .unwrap();
        let r = t.rate();
        worst = worst.max((r.p - exact).abs() / r.stderr.max(f64::MIN_POSITIVE));
        digest.push(t.violations);
    }
    Outcome::sampled(
        worst <= 4.0 && far == 20,
        format!(
            "{far}/20 functions at distance >= 1/10, worst deviation {worst:.2} standard errors"
        ),
        format!("{digest:?}"),
    )
}

fn scaling_law() -> Outcome {
    let (table, report) = scaling(
        Family::AntiDictator,
        &[8, 12, 16, 20, 24],
        TesterKind::Weighted,
        0.5,
        2_000_000,
        SEED,
        default_workers(),
    )
    .unwrap();
    let slope = report["slope"].as_f64().unwrap();
    let rates = table.column("rate").unwrap().join(", ");
    Outcome::sampled(
        (-0.8..=-0.35).contains(&slope),
        format!("rates [{rates}], log-log slope {slope:.3} (target [-0.8, -0.35])"),
        table.to_csv().unwrap(),
    )
}

fn edge_rate() -> Outcome {
    let f = BitTableFunction::anti_dictator(8, 0).unwrap();
    let t = rejection_probability(
        &f,
        TesterKind::Edge,
        0.5,
        1_000_000,
        SEED,
        default_workers(),
    )
    .unwrap();
    let r = t.rate();
    Outcome::sampled(
        r.agrees_with(1.0 / 8.0, 3.0),
        format!("rate {:.5} +- {:.5} against 1/8", r.p, r.stderr),
        format!("{t:?}"),
    )
}

fn combined() -> Outcome {
    let workers = default_workers();
    let c = calibrate_repetition_constant(
        &BitTableFunction::anti_dictator(8, 0).unwrap(),
        0.5,
        0.5,
        2.0 / 3.0,
    )
    .unwrap();
    let reps = default_repetitions(16, 0.5, c);
    let anti = BitTableFunction::anti_dictator(16, 0).unwrap();
    let runs = combined_runs(&anti, &TesterConfig::new(0.5, reps, SEED), 200, workers).unwrap();
    let rejected = runs.iter().filter(|r| r.reject).count();
    let mut rng = stream_rng(SEED, "acceptance/combined-monotone", 0);
    let mut monotone = vec![
        BitTableFunction::majority(16).unwrap(),
        BitTableFunction::or(16).unwrap(),
        BitTableFunction::and(16).unwrap(),
        BitTableFunction::dictator(16, 3).unwrap(),
        BitTableFunction::constant(16, false).unwrap(),
    ];
    for _ in 0..5 {
        monotone.push(random_monotone(16, &mut rng).unwrap());
    }
    let mut false_rejections = 0;
    for (j, f) in monotone.iter().enumerate() {
        let runs = combined_runs(
            f,
            &TesterConfig::new(0.5, reps, SEED + 1 + j as u64),
            200,
            workers,
        )
        .unwrap();
        false_rejections += runs.iter().filter(|r| r.reject).count();
    }
    Outcome::sampled(
        3 * rejected >= 2 * 200 && false_rejections == 0,
        format!(
            "C = {c}, {reps} repetitions: rejected {rejected}/200 anti-dictator runs, {false_rejections} rejections over 2000 monotone runs"
        ),
        format!("{rejected} {false_rejections}"),
    )
}

fn lower_bound_ensemble() -> Outcome {
    let workers = default_workers();
    let mut rng = stream_rng(SEED, "acceptance/ensemble", 0);
    let mut non_monotone = 0;
    for n in 1..=12 {
        for _ in 0..50 {
            non_monotone += !sample_yes(n, &mut rng)
                .unwrap()
                .to_ltf()
                .unwrap()
                .to_table()
                .unwrap()
                .is_monotone() as u32;
        }
    }
    let nice = (0..1000)
        .filter(|_| is_nice(&sample_no(10_000, &mut rng).unwrap()).unwrap())
        .count();
    let certify: Vec<_> = [400usize, 1600]
        .iter()
        .map(|&n| certify_no_draws(n, 100, 1 << 17, SEED, workers).unwrap())
        .collect();
    let mut bound_violations = 0;
    for n in 1..=10 {
        for _ in 0..20 {
            let weights: Vec<i64> = (0..n).map(|_| rng.random_range(-5..=5)).collect();
            let ltf = LtfSpec::from_integers(&weights, rng.random_range(-3..=3)).unwrap();
            let table = BitTableFunction::random(n, &mut rng).unwrap();
            for f in [ltf.to_table().unwrap(), table] {
                let b = fourier_distance_lower_bound(&f, BoundMode::Exact, &mut rng).unwrap();
                bound_violations +=
                    (b.exact.unwrap() > exact_distance(&f).unwrap().distance) as u32;
            }
        }
    }
    let certified_ok = certify
        .iter()
        .all(|c| c.nice > 0 && c.certified as f64 >= 0.95 * c.nice as f64);
    let parts = [
        format!("(a) {non_monotone} non-monotone yes-draws"),
        format!("(b) nice fraction {:.3} at n=10^4", nice as f64 / 1000.0),
        format!(
            "(c) certified {} at n=400, {} at n=1600 (mean bound {:.4}, {:.4})",
            format!("{}/{}", certify[0].certified, certify[0].nice),
            format!("{}/{}", certify[1].certified, certify[1].nice),
            certify[0].mean_bound,
            certify[1].mean_bound
        ),
        format!("(d) {bound_violations} bound violations"),
    ];
    let pass = non_monotone == 0 && nice >= 990 && certified_ok && bound_violations == 0;
    Outcome::sampled(pass, parts.join("; "), format!("{nice} {:?}", certify))
}

fn indistinguishability() -> Outcome {
    let mut decreasing = 0;
    let mut lines = Vec::new();
    for s in 0..5u64 {
        let (table, _) = lower_bound(
            4,
            &[100, 400, 1600],
            100_000,
            true,
            0,
            0,
            SEED + s,
            default_workers(),
        )
        .unwrap();
        let tv: Vec<f64> = table
            .column("tv")
            .unwrap()
            .iter()
            .map(|v| v.parse().unwrap())
            .collect();
        decreasing += (tv[0] > tv[1] && tv[1] > tv[2]) as u32;
        lines.push(format!("[{:.4} {:.4} {:.4}]", tv[0], tv[1], tv[2]));
    }
    Outcome::sampled(
        decreasing >= 4,
        format!("{decreasing}/5 strictly decreasing: {}", lines.join(" ")),
        lines.join(" "),
    )
}

fn moments() -> Outcome {
    let mut rng = stream_rng(SEED, "acceptance/moments", 0);
    let (mut analytic, mut sampled) = (0, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let q = QueryMatrix::random(3, 1000, &mut rng).unwrap();
        let r = moment_match_check(&q, 100_000, &mut rng).unwrap();
        analytic += r.analytic_match as u32;
        sampled += (r.yes.within(4.0) && r.no.within(4.0)) as u32;
        worst = worst
            .max(r.yes.max_mean_z)
            .max(r.yes.max_cov_z)
            .max(r.no.max_mean_z)
            .max(r.no.max_cov_z);
    }
    Outcome::sampled(
        analytic == 5 && sampled == 5,
        format!(
            "analytic identities {analytic}/5, sample moments {sampled}/5 (worst z {worst:.2})"
        ),
        format!("{worst}"),
    )
}

fn hypergrid() -> Outcome {
    let mut failures = Vec::new();
    for n in 1..=3 {
        for f in all_tables(n) {
            let even = GridTable::from_function(&phi_even(&f, 4).unwrap()).unwrap();
            if even.is_monotone() != f.is_monotone() {
                failures.push(format!("even monotonicity n={n} {}", f.to_hex()));
            }
            if grid_table_distance(&even).unwrap().distance < exact_distance(&f).unwrap().distance {
                failures.push(format!("even distance n={n} {}", f.to_hex()));
            }
            let odd = GridTable::from_function(&phi_odd(&f, 3).unwrap()).unwrap();
            if odd.is_monotone() != f.is_monotone() {
                failures.push(format!("odd monotonicity n={n} {}", f.to_hex()));
            }
        }
    }
    for x in 0..4u64 {
        for y in (0..4u64).filter(|&y| y & x == x && y != x) {
            if !even_block_pairing(x, y, 2, 4)
                .iter()
                .all(|(a, b)| grid_preceq(a, b) && a != b)
            {
                failures.push(format!("pairing {x}->{y}"));
            }
        }
    }
    for m in [3, 5, 7] {
        for k in 1..=3 {
            if !OddGadget::new(m, k).unwrap().check().holds() {
                failures.push(format!("gadget m={m} k={k}"));
            }
        }
    }
    Outcome::exact(
        failures.is_empty(),
        format!("{} failures {:?}", failures.len(), failures),
    )
}

#[test]
fn acceptance() {
    type Criterion = fn() -> Outcome;
    let criteria: Vec<(u32, &str, Criterion)> = vec![
        (1, "oracle equivalence", oracle_equivalence),
        (2, "distance zero iff monotone", zero_iff_monotone),
        (3, "dichotomy scan", dichotomy),
        (
            4,
            "score identity and samplers",
            score_identity_and_samplers,
        ),
        (5, "edge density inequality", edge_inequality),
        (6, "one-sided testers", one_sided),
        (7, "exact vs sampled weighted rate", exact_vs_sampled),
        (8, "anti-dictator scaling slope", scaling_law),
        (9, "edge tester rate", edge_rate),
        (10, "combined tester", combined),
        (11, "lower-bound ensembles", lower_bound_ensemble),
        (12, "indistinguishability decay", indistinguishability),
        (13, "moment matching", moments),
        (14, "hypergrid reductions", hypergrid),
    ];
    let mut results = Vec::new();
    let mut digests = Vec::new();
    for (id, name, run) in &criteria {
        let start = std::time::Instant::now();
        let o = run();
        println!(
            "criterion {id:>2} [{}] {name}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if o.digest.is_some() {
            digests.push((*id, *run, o.digest.clone()));
        }
        results.push((*id, o.pass));
    }
    // Criterion 15: every randomized criterion again, compared byte for byte.
    let start = std::time::Instant::now();
    let differing: Vec<u32> = digests
        .iter()
        .filter(|(_, run, d)| run().digest != *d)
        .map(|(id, _, _)| *id)
        .collect();
    let pass = differing.is_empty();
    println!(
        "criterion 15 [{}] reproducibility: {} randomized criteria rerun, differing {differing:?} ({:.1}s)",
        if pass { "PASS" } else { "FAIL" },
        digests.len(),
        start.elapsed().as_secs_f64()
    );
    results.push((15, pass));
    let failed: Vec<u32> = results
        .iter()
        .filter(|(_, p)| !p)
        .map(|(id, _)| *id)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

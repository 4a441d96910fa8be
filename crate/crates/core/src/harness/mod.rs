//! Experiment configuration, dispatch and CSV/JSON output for the CLI.
//!
//! A run produces an [`ExperimentRecord`]: the echoed configuration, an
//! optional result table (written as CSV) and a JSON report. Everything in
//! the record except `wall_clock_ms` is a pure function of the configuration,
//! so two runs with the same seed and worker count produce identical bytes.

pub mod selftest;
pub mod streams;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{LabError, Result};
use crate::func::{BitTableFunction, FunctionFile, MidLayerSpec};
use crate::hypergrid::{hypergrid_distance, phi_even, phi_odd, GridTable, HypergridFunction};
use crate::lower_bound::{
    fourier_distance_lower_bound, is_nice, response_distribution_seeded, sample_no, tv_estimate,
    BoundMode, EnsembleKind, QueryMatrix,
};
use crate::oracle::{distance_report, exact_distance};
use crate::stats::log_log_slope;
use crate::testers::{
    combined_tester, exact_baseline_rejection, exact_edge_rejection, exact_weighted_rejection,
    run_trials, BaselinePathTester, CombinedTester, EdgeTester, TesterConfig, TesterKind,
    TrialTally, WeightedPathTester,
};
use streams::{stream_rng, BlockPlan};

/// Version of the record layout below.
pub const SCHEMA_VERSION: u32 = 1;

/// Certified distance a nice no-draw has to reach in the lower-bound report.
pub const CERTIFY_THRESHOLD: f64 = 0.01;

/// Largest `n` for which `test` also reports the exact single-trial rate.
pub const EXACT_RATE_MAX_N: usize = 12;

/// Named function families for scaling runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    AntiDictator,
    Dictator,
    Parity,
    Majority,
    /// A uniformly random table, drawn from the run's seed.
    Random,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::AntiDictator => "anti-dictator",
            Family::Dictator => "dictator",
            Family::Parity => "parity",
            Family::Majority => "majority",
            Family::Random => "random",
        }
    }

    pub fn build(&self, n: usize, seed: u64) -> Result<BitTableFunction> {
        match self {
            Family::AntiDictator => BitTableFunction::anti_dictator(n, 0),
            Family::Dictator => BitTableFunction::dictator(n, 0),
            Family::Parity => BitTableFunction::parity(n),
            Family::Majority => BitTableFunction::majority(n),
            Family::Random => {
                BitTableFunction::random(n, &mut stream_rng(seed, "family/random", n as u64))
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        [
            Family::AntiDictator,
            Family::Dictator,
            Family::Parity,
            Family::Majority,
            Family::Random,
        ]
        .into_iter()
        .find(|f| f.name() == s)
        .ok_or_else(|| LabError::InvalidArgument(format!("unknown family {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridCheck {
    Monotone,
    Distance,
}

impl FromStr for GridCheck {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monotone" => Ok(GridCheck::Monotone),
            "distance" => Ok(GridCheck::Distance),
            other => Err(LabError::InvalidArgument(format!(
                "unknown check {other:?}"
            ))),
        }
    }
}

/// One experiment and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Experiment {
    Oracle {
        input: PathBuf,
        /// Band parameter for `sigma`; defaults to the exact distance clamped
        /// into `[1/n, 1/2]`.
        eps: Option<f64>,
    },
    Test {
        input: PathBuf,
        tester: TesterKind,
        eps: f64,
        /// Trials, or repetitions for the combined tester.
        trials: u64,
        seed: u64,
    },
    Scaling {
        family: Family,
        ns: Vec<usize>,
        tester: TesterKind,
        eps: f64,
        trials: u64,
        seed: u64,
    },
    LowerBound {
        q: usize,
        ns: Vec<usize>,
        samples: u64,
        balanced: bool,
        /// No-draws per `n` for the niceness and certification report.
        draws: u64,
        /// Uniform points per Fourier estimate.
        certify_samples: u64,
        seed: u64,
    },
    Hypergrid {
        m: usize,
        input: PathBuf,
        check: GridCheck,
    },
}

impl Experiment {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Experiment::Test { seed, .. }
            | Experiment::Scaling { seed, .. }
            | Experiment::LowerBound { seed, .. } => Some(*seed),
            Experiment::Oracle { .. } | Experiment::Hypergrid { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, workers: usize) -> Self {
        Self {
            experiment,
            workers,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(LabError::InvalidArgument(
                "worker count must be at least 1".into(),
            ));
        }
        let positive = |name: &str, v: u64| {
            if v == 0 {
                Err(LabError::InvalidArgument(format!(
                    "{name} must be at least 1"
                )))
            } else {
                Ok(())
            }
        };
        match &self.experiment {
            Experiment::Test { trials, .. } => positive("trials", *trials),
            Experiment::Scaling { ns, trials, .. } => {
                if ns.len() < 2 {
                    return Err(LabError::InvalidArgument(
                        "scaling needs at least two values of n".into(),
                    ));
                }
                positive("trials", *trials)
            }
            Experiment::LowerBound { q, ns, samples, .. } => {
                if *q == 0 || ns.is_empty() {
                    return Err(LabError::InvalidArgument(
                        "lowerbound needs q >= 1 and a list of n".into(),
                    ));
                }
                positive("samples", *samples)
            }
            Experiment::Oracle { .. } | Experiment::Hypergrid { .. } => Ok(()),
        }
    }
}

/// A header and string rows, as written to CSV.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| LabError::Format(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| LabError::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| LabError::Format(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    pub software_version: &'static str,
    pub config: ExperimentConfig,
    pub seed: Option<u64>,
    pub table: Option<Table>,
    pub report: Value,
    pub wall_clock_ms: u64,
}

impl ExperimentRecord {
    /// The record as JSON, without the wall-clock field when `stable`.
    pub fn to_json(&self, stable: bool) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if stable {
            v.as_object_mut()
                .expect("record is an object")
                .remove("wall_clock_ms");
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentRecord> {
    config.validate()?;
    let start = Instant::now();
    let (table, report) = match &config.experiment {
        Experiment::Oracle { input, eps } => {
            (None, oracle(&FunctionFile::load(input)?.to_table()?, *eps)?)
        }
        Experiment::Test {
            input,
            tester,
            eps,
            trials,
            seed,
        } => (
            None,
            test(
                &FunctionFile::load(input)?.to_table()?,
                *tester,
                *eps,
                *trials,
                *seed,
                config.workers,
            )?,
        ),
        Experiment::Scaling {
            family,
            ns,
            tester,
            eps,
            trials,
            seed,
        } => {
            let (t, r) = scaling(*family, ns, *tester, *eps, *trials, *seed, config.workers)?;
            (Some(t), r)
        }
        Experiment::LowerBound {
            q,
            ns,
            samples,
            balanced,
            draws,
            certify_samples,
            seed,
        } => {
            let (t, r) = lower_bound(
                *q,
                ns,
                *samples,
                *balanced,
                *draws,
                *certify_samples,
                *seed,
                config.workers,
            )?;
            (Some(t), r)
        }
        Experiment::Hypergrid { m, input, check } => (
            None,
            hypergrid(&FunctionFile::load(input)?.to_table()?, *m, *check)?,
        ),
    };
    Ok(ExperimentRecord {
        schema_version: SCHEMA_VERSION,
        software_version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        seed: config.experiment.seed(),
        table,
        report,
        wall_clock_ms: start.elapsed().as_millis() as u64,
    })
}

/// Distance, `v` and `sigma` of a table as JSON.
pub fn oracle(f: &BitTableFunction, eps: Option<f64>) -> Result<Value> {
    let eps = match eps {
        Some(e) => e,
        None => {
            let d = exact_distance(f)?.distance.to_f64().unwrap();
            if d == 0.0 {
                0.5
            } else {
                d
            }
        }
    };
    let spec = MidLayerSpec::clamped(f.n(), eps)?;
    Ok(serde_json::to_value(distance_report(f, &spec)?)?)
}

fn run_kind(
    f: &BitTableFunction,
    kind: TesterKind,
    eps: f64,
    plan: &BlockPlan,
) -> Result<TrialTally> {
    let n = f.n();
    match kind {
        TesterKind::Edge => run_trials(&EdgeTester::new(n)?, f, plan),
        TesterKind::Weighted => run_trials(&WeightedPathTester::new(n, eps)?, f, plan),
        TesterKind::Baseline => run_trials(&BaselinePathTester::new(n, eps)?, f, plan),
        TesterKind::Combined => run_trials(&CombinedTester::new(n, eps, 0.5)?, f, plan),
    }
}

/// Exact single-trial rejection rate, when it is cheap to enumerate.
pub fn exact_rate(f: &BitTableFunction, kind: TesterKind, eps: f64) -> Result<Option<f64>> {
    if f.n() > EXACT_RATE_MAX_N {
        return Ok(None);
    }
    let rate = match kind {
        TesterKind::Edge => exact_edge_rejection(f).to_f64(),
        TesterKind::Weighted => {
            exact_weighted_rejection(f, &MidLayerSpec::new(f.n(), eps)?)?.to_f64()
        }
        TesterKind::Baseline => {
            exact_baseline_rejection(f, &MidLayerSpec::new(f.n(), eps)?)?.to_f64()
        }
        TesterKind::Combined => None,
    };
    Ok(rate)
}

/// A verdict plus the Monte Carlo rejection estimate. For the combined
/// tester `trials` is the repetition count of a single run.
pub fn test(
    f: &BitTableFunction,
    kind: TesterKind,
    eps: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<Value> {
    if kind == TesterKind::Combined {
        let report = combined_tester(f, &TesterConfig::new(eps, trials, seed))?;
        return Ok(
            json!({ "tester": kind, "n": f.n(), "eps": eps, "seed": seed, "verdict": report }),
        );
    }
    let plan = BlockPlan::new(seed, format!("test/{}", kind.name()), trials).with_workers(workers);
    let tally = run_kind(f, kind, eps, &plan)?;
    let rate = tally.rate();
    Ok(json!({
        "tester": kind,
        "n": f.n(),
        "eps": eps,
        "seed": seed,
        "reject": tally.violations > 0,
        "trials": tally.trials,
        "violations": tally.violations,
        "feasible": tally.feasible,
        "queries": tally.queries,
        "unsound": tally.unsound,
        "estimate": rate.p,
        "stderr": rate.stderr,
        "exact": exact_rate(f, kind, eps)?,
    }))
}

/// Rejection rate of `kind` on `family` across `ns`, with the log-log slope.
pub fn scaling(
    family: Family,
    ns: &[usize],
    kind: TesterKind,
    eps: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<(Table, Value)> {
    let mut table = Table::new(&["n", "trials", "violations", "rate", "stderr"]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &n in ns {
        let f = family.build(n, seed)?;
        let plan = BlockPlan::new(
            seed,
            format!("scaling/{family}/{}/{n}", kind.name()),
            trials,
        )
        .with_workers(workers);
        let tally = run_kind(&f, kind, eps, &plan)?;
        let rate = tally.rate();
        table.push(vec![
            n.to_string(),
            tally.trials.to_string(),
            tally.violations.to_string(),
            format!("{:.9e}", rate.p),
            format!("{:.9e}", rate.stderr),
        ]);
        xs.push(n as f64);
        ys.push(rate.p);
    }
    let slope = if ys.iter().all(|&y| y > 0.0) {
        Some(log_log_slope(&xs, &ys)?)
    } else {
        None
    };
    Ok((
        table,
        json!({ "family": family, "tester": kind, "eps": eps, "slope": slope }),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationSummary {
    pub n: usize,
    pub draws: u64,
    pub nice: u64,
    /// Nice draws whose certified bound reaches [`CERTIFY_THRESHOLD`].
    pub certified: u64,
    pub mean_bound: f64,
    pub max_bound: f64,
}

impl CertificationSummary {
    pub fn nice_fraction(&self) -> f64 {
        self.nice as f64 / self.draws as f64
    }

    pub fn certified_fraction(&self) -> f64 {
        if self.nice == 0 {
            0.0
        } else {
            self.certified as f64 / self.nice as f64
        }
    }
}

/// Niceness and sampled Fourier certification over `draws` no-draws.
pub fn certify_no_draws(
    n: usize,
    draws: u64,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<CertificationSummary> {
    let plan = BlockPlan::new(seed, format!("certify/{n}"), draws)
        .with_block(1)
        .with_workers(workers);
    let bounds: Vec<Option<f64>> = plan.run(
        |rng, _| {
            let d = sample_no(n, rng).expect("n >= 1");
            if is_nice(&d).expect("no-draw") {
                let b = fourier_distance_lower_bound(&d, BoundMode::Sampled { samples }, rng)
                    .expect("samples >= 2");
                vec![Some(b.bound)]
            } else {
                vec![None]
            }
        },
        Vec::new(),
        |mut a, b| {
            a.extend(b);
            a
        },
    )?;
    let nice: Vec<f64> = bounds.iter().flatten().copied().collect();
    Ok(CertificationSummary {
        n,
        draws,
        nice: nice.len() as u64,
        certified: nice.iter().filter(|&&b| b >= CERTIFY_THRESHOLD).count() as u64,
        mean_bound: if nice.is_empty() {
            0.0
        } else {
            nice.iter().sum::<f64>() / nice.len() as f64
        },
        max_bound: nice.iter().copied().fold(0.0, f64::max),
    })
}

/// The query matrix used for `n` in a lower-bound run.
pub fn lower_bound_matrix(q: usize, n: usize, balanced: bool, seed: u64) -> Result<QueryMatrix> {
    let mut rng = stream_rng(seed, "lowerbound/q", n as u64);
    if balanced {
        QueryMatrix::balanced(q, n, &mut rng)
    } else {
        QueryMatrix::random(q, n, &mut rng)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn lower_bound(
    q: usize,
    ns: &[usize],
    samples: u64,
    balanced: bool,
    draws: u64,
    certify_samples: u64,
    seed: u64,
    workers: usize,
) -> Result<(Table, Value)> {
    let mut table = Table::new(&["n", "q", "tv", "ci_low", "ci_high"]);
    let mut certification = Vec::new();
    for &n in ns {
        let m = lower_bound_matrix(q, n, balanced, seed)?;
        let yes = response_distribution_seeded(&m, EnsembleKind::Yes, samples, seed, workers)?;
        let no = response_distribution_seeded(&m, EnsembleKind::No, samples, seed, workers)?;
        let tv = tv_estimate(
            &yes,
            &no,
            &mut stream_rng(seed, "lowerbound/bootstrap", n as u64),
        )?;
        table.push(vec![
            n.to_string(),
            q.to_string(),
            format!("{:.9e}", tv.tv),
            format!("{:.9e}", tv.ci_low),
            format!("{:.9e}", tv.ci_high),
        ]);
        if draws > 0 {
            certification.push(certify_no_draws(n, draws, certify_samples, seed, workers)?);
        }
    }
    Ok((
        table,
        json!({ "threshold": CERTIFY_THRESHOLD, "certify_samples": certify_samples, "certification": certification }),
    ))
}

/// Monotonicity (and optionally distance) of `f` and its lift to `[m]`.
pub fn hypergrid(f: &BitTableFunction, m: usize, check: GridCheck) -> Result<Value> {
    fn report<G: HypergridFunction>(
        f: &BitTableFunction,
        g: &G,
        check: GridCheck,
    ) -> Result<Value> {
        let table = GridTable::from_function(g)?;
        let mut v = json!({
            "m": g.side(),
            "cube_n": f.n(),
            "grid_dim": g.dim(),
            "points": table.size(),
            "cube_monotone": f.is_monotone(),
            "grid_monotone": table.is_monotone(),
        });
        if check == GridCheck::Distance {
            let cube = exact_distance(f)?.distance;
            let grid = hypergrid_distance(g)?;
            v["cube_distance"] = json!(format!("{cube}"));
            v["grid_distance"] = json!(format!("{}", grid.distance));
            v["grid_matching"] = json!(grid.matching_size);
            v["grid_at_least_cube"] = json!(grid.distance >= cube);
        }
        Ok(v)
    }
    if m % 2 == 0 {
        report(f, &phi_even(f, m)?, check)
    } else {
        report(f, &phi_odd(f, m)?, check)
    }
}

/// Parses `"2e6"`, `"1000"` or `"1_000_000"` as a count.
pub fn parse_count(s: &str) -> Result<u64> {
    let t = s.trim().replace('_', "");
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    let bad = || LabError::InvalidArgument(format!("{s:?} is not a count"));
    let v: f64 = t.parse().map_err(|_| bad())?;
    if !(v >= 0.0 && v.fract() == 0.0 && v < 1.8e19) {
        return Err(bad());
    }
    Ok(v as u64)
}

/// Parses `"8,12,16"`.
pub fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| LabError::InvalidArgument(format!("{t:?} is not an integer")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_lists() {
        assert_eq!(parse_count("2e6").unwrap(), 2_000_000);
        assert_eq!(parse_count("1_000").unwrap(), 1000);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
        assert_eq!(parse_list("8, 12,16").unwrap(), vec![8, 12, 16]);
        assert!(parse_list("8,x").is_err());
    }

    #[test]
    fn oracle_on_parity() {
        let f = BitTableFunction::parity(2).unwrap();
        let v = oracle(&f, None).unwrap();
        assert_eq!(v["distance"], "1/4");
        assert_eq!(v["v"], "1/2");
        assert_eq!(v["monotone"], false);
    }

    #[test]
    fn scaling_is_reproducible() {
        let run = |workers| {
            let c = ExperimentConfig::new(
                Experiment::Scaling {
                    family: Family::AntiDictator,
                    ns: vec![6, 8],
                    tester: TesterKind::Weighted,
                    eps: 0.5,
                    trials: 40_000,
                    seed: 4,
                },
                workers,
            );
            let r = run(&c).unwrap();
            (r.table.unwrap().to_csv().unwrap(), r.report)
        };
        let (a, ra) = run(1);
        let (b, rb) = run(1);
        let (c, _) = run(3);
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(ra, rb);
        assert!(a.starts_with("n,trials,violations,rate,stderr\n6,40000,"));
    }

    #[test]
    fn hypergrid_report() {
        let f = BitTableFunction::parity(2).unwrap();
        let v = hypergrid(&f, 4, GridCheck::Distance).unwrap();
        assert_eq!(v["grid_monotone"], false);
        assert_eq!(v["grid_at_least_cube"], true);
        assert_eq!(v["cube_distance"], "1/4");
    }

    #[test]
    fn invalid_configs() {
        let c = ExperimentConfig::new(
            Experiment::Scaling {
                family: Family::Parity,
                ns: vec![8],
                tester: TesterKind::Edge,
                eps: 0.5,
                trials: 10,
                seed: 0,
            },
            1,
        );
        assert!(run(&c).is_err());
        assert!(Family::from_str("nope").is_err());
        assert_eq!(
            Family::from_str("anti-dictator").unwrap(),
            Family::AntiDictator
        );
    }
}

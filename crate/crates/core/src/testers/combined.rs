use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    exact_edge_rejection, exact_weighted_rejection, EdgeTester, Tester, TesterKind, TesterVerdict,
    WeightedPathTester,
};
use crate::error::{LabError, Result};
use crate::func::{BitTableFunction, CubeOracle, MidLayerSpec, WideOracle};
use crate::harness::streams::{stream_rng, BlockPlan};

/// `⌈C · n^{5/6} · ε^{-4} · ln n⌉`, at least 1.
pub fn default_repetitions(n: usize, eps: f64, c: f64) -> u64 {
    let n = n as f64;
    let r = (c * n.powf(5.0 / 6.0) * eps.powi(-4) * n.ln().max(1.0)).ceil();
    (r as u64).max(1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TesterConfig {
    pub eps: f64,
    pub repetitions: u64,
    /// Probability of an edge trial; the rest are weighted path trials.
    pub mix: f64,
    pub seed: u64,
}

impl TesterConfig {
    pub fn new(eps: f64, repetitions: u64, seed: u64) -> Self {
        Self {
            eps,
            repetitions,
            mix: 0.5,
            seed,
        }
    }

    /// Repetitions from [`default_repetitions`] with calibration constant `c`.
    pub fn calibrated(n: usize, eps: f64, c: f64, seed: u64) -> Self {
        Self::new(eps, default_repetitions(n, eps, c), seed)
    }

    fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(LabError::InvalidArgument(
                "repetitions must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.mix) {
            return Err(LabError::InvalidArgument(format!(
                "mix {} outside [0, 1]",
                self.mix
            )));
        }
        if !(self.eps > 0.0) {
            return Err(LabError::InvalidArgument(format!(
                "eps {} must be positive",
                self.eps
            )));
        }
        Ok(())
    }
}

/// Per trial: an edge trial with probability `mix`, else a weighted path
/// trial. Below `ε = 1/n` only edge trials are used.
#[derive(Clone, Debug)]
pub struct CombinedTester {
    edge: EdgeTester,
    weighted: Option<WeightedPathTester>,
    mix: f64,
}

impl CombinedTester {
    pub fn new(n: usize, eps: f64, mix: f64) -> Result<Self> {
        let edge = EdgeTester::new(n)?;
        let weighted = if eps * (n as f64) < 1.0 {
            None
        } else {
            // Above 1/2 the band for 1/2 is used: every function is then close
            // to a constant anyway.
            Some(WeightedPathTester::from_spec(MidLayerSpec::new(
                n,
                eps.min(0.5),
            )?))
        };
        Ok(Self {
            edge,
            weighted,
            mix,
        })
    }

    pub fn edge_only(&self) -> bool {
        self.weighted.is_none()
    }
}

impl Tester for CombinedTester {
    fn kind(&self) -> TesterKind {
        TesterKind::Combined
    }

    fn trial<O: CubeOracle + ?Sized>(&self, f: &O, rng: &mut ChaCha8Rng) -> TesterVerdict {
        match &self.weighted {
            Some(w) if !rng.random_bool(self.mix) => w.trial_with(f, rng),
            _ => self.edge.trial_with(f, rng),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CombinedReport {
    pub reject: bool,
    pub repetitions: u64,
    pub edge_trials: u64,
    pub weighted_trials: u64,
    pub violations: u64,
    pub queries: u64,
    pub first_violation: Option<TesterVerdict>,
}

fn run_once<O: CubeOracle + ?Sized>(
    tester: &CombinedTester,
    f: &O,
    reps: u64,
    rng: &mut ChaCha8Rng,
) -> CombinedReport {
    let mut report = CombinedReport {
        reject: false,
        repetitions: reps,
        edge_trials: 0,
        weighted_trials: 0,
        violations: 0,
        queries: 0,
        first_violation: None,
    };
    // All repetitions run even after a hit: the tester is non-adaptive, and
    // the per-kind counts stay meaningful.
    for _ in 0..reps {
        let v = tester.trial(f, rng);
        match v.meta.tester {
            TesterKind::Edge => report.edge_trials += 1,
            _ => report.weighted_trials += 1,
        }
        report.queries += v.queried().len() as u64;
        if v.found() {
            report.violations += 1;
            report.first_violation.get_or_insert(v);
        }
    }
    report.reject = report.violations > 0;
    report
}

/// One run of the combined tester: reject iff any repetition finds a violation.
pub fn combined_tester<O: CubeOracle + ?Sized>(
    f: &O,
    config: &TesterConfig,
) -> Result<CombinedReport> {
    config.validate()?;
    let tester = CombinedTester::new(f.dim(), config.eps, config.mix)?;
    let mut rng = stream_rng(config.seed, "combined", 0);
    Ok(run_once(&tester, f, config.repetitions, &mut rng))
}

/// The combined tester on functions wider than one mask word. Only the
/// edge-only regime (`ε < 1/n`) is available there, since the weighted path
/// trial samples single-word points. Trial points are not recorded.
pub fn combined_tester_wide<O: WideOracle + ?Sized>(
    f: &O,
    config: &TesterConfig,
) -> Result<CombinedReport> {
    config.validate()?;
    let n = f.width();
    if config.eps * n as f64 >= 1.0 {
        if n <= crate::func::POINT_MAX_N {
            return Err(LabError::InvalidArgument(
                "use combined_tester for n <= 63".into(),
            ));
        }
        return Err(LabError::UnsupportedDimension {
            n,
            min: 1,
            max: crate::func::POINT_MAX_N,
        });
    }
    let words = n.div_ceil(64);
    let mut rng = stream_rng(config.seed, "combined", 0);
    let mut x = vec![0u64; words];
    let mut report = CombinedReport {
        reject: false,
        repetitions: config.repetitions,
        edge_trials: 0,
        weighted_trials: 0,
        violations: 0,
        queries: 0,
        first_violation: None,
    };
    for _ in 0..config.repetitions {
        for (j, w) in x.iter_mut().enumerate() {
            let bits = (n - 64 * j).min(64);
            *w = rng.random::<u64>() & crate::func::full_mask(bits);
        }
        let i = rng.random_range(0..n);
        let (word, bit) = (i / 64, 1u64 << (i % 64));
        x[word] |= bit;
        let upper = f.query_words(&x);
        x[word] &= !bit;
        let lower = f.query_words(&x);
        report.edge_trials += 1;
        report.queries += 2;
        report.violations += (lower && !upper) as u64;
    }
    report.reject = report.violations > 0;
    Ok(report)
}

/// `runs` independent runs; run `r` uses stream `r` of the config seed.
pub fn combined_runs<O: CubeOracle + Sync + ?Sized>(
    f: &O,
    config: &TesterConfig,
    runs: u64,
    workers: usize,
) -> Result<Vec<CombinedReport>> {
    config.validate()?;
    let tester = CombinedTester::new(f.dim(), config.eps, config.mix)?;
    let plan = BlockPlan::new(config.seed, "combined", runs)
        .with_block(1)
        .with_workers(workers);
    plan.run(
        |rng, _| vec![run_once(&tester, f, config.repetitions, rng)],
        Vec::new(),
        |mut a, b| {
            a.extend(b);
            a
        },
    )
}

/// Smallest `C` on a `1/1000` grid for which the default repetition count
/// reaches rejection probability `target` on `f`, using the exact
/// single-trial rate of the combined tester.
pub fn calibrate_repetition_constant(
    f: &BitTableFunction,
    eps: f64,
    mix: f64,
    target: f64,
) -> Result<f64> {
    if !(0.0 < target && target < 1.0) {
        return Err(LabError::InvalidArgument(format!(
            "target {target} outside (0, 1)"
        )));
    }
    let n = f.n();
    let edge = exact_edge_rejection(f).to_f64().unwrap();
    let p = if eps * (n as f64) < 1.0 {
        edge
    } else {
        let spec = MidLayerSpec::new(n, eps.min(0.5))?;
        mix * edge + (1.0 - mix) * exact_weighted_rejection(f, &spec)?.to_f64().unwrap()
    };
    if p <= 0.0 {
        return Err(LabError::InvalidArgument(
            "function is never rejected".into(),
        ));
    }
    let needed = ((1.0 - target).ln() / (1.0 - p).ln()).ceil() as u64;
    let mut c = 0.001;
    while default_repetitions(n, eps, c) < needed {
        c += 0.001;
    }
    Ok((c * 1000.0).round() / 1000.0)
}

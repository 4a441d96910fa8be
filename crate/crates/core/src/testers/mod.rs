//! One-sided non-adaptive monotonicity testers.
//!
//! Each tester exposes a single randomized trial that queries (at most) two
//! points and reports whether they form a violated pair. Repetition,
//! parallel execution and rate estimation are layered on top.

mod combined;
mod exact;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::func::{full_mask, CubeOracle, MidLayerSpec, POINT_MAX_N};
use crate::harness::streams::BlockPlan;
use crate::pairs::{sample_d, BucketSpec};
use crate::stats::Proportion;

pub use combined::{
    calibrate_repetition_constant, combined_runs, combined_tester, combined_tester_wide,
    default_repetitions, CombinedReport, CombinedTester, TesterConfig,
};
pub use exact::{exact_baseline_rejection, exact_edge_rejection, exact_weighted_rejection};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TesterKind {
    Edge,
    Weighted,
    Baseline,
    Combined,
}

impl TesterKind {
    pub fn name(&self) -> &'static str {
        match self {
            TesterKind::Edge => "edge",
            TesterKind::Weighted => "weighted",
            TesterKind::Baseline => "baseline",
            TesterKind::Combined => "combined",
        }
    }
}

impl std::str::FromStr for TesterKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge" => Ok(TesterKind::Edge),
            "weighted" => Ok(TesterKind::Weighted),
            "baseline" => Ok(TesterKind::Baseline),
            "combined" => Ok(TesterKind::Combined),
            other => Err(LabError::InvalidArgument(format!(
                "unknown tester {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    ViolationFound,
    NoViolation,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Query {
    pub point: u64,
    pub value: bool,
}

/// What a trial drew. `x` is the lower point of the checked pair and `y` the
/// upper one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrialMeta {
    pub tester: TesterKind,
    pub x: Option<u64>,
    pub y: Option<u64>,
    pub direction: Option<u32>,
    pub ell: Option<u32>,
    pub k: Option<u32>,
    /// False when the drawn distance exceeds the weight of `y`; such a trial
    /// makes no queries.
    pub feasible: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TesterVerdict {
    pub outcome: Outcome,
    queries: [Query; 2],
    query_count: u8,
    pub meta: TrialMeta,
}

impl Serialize for TesterVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TesterVerdict", 3)?;
        st.serialize_field("outcome", &self.outcome)?;
        st.serialize_field("queried", self.queried())?;
        st.serialize_field("meta", &self.meta)?;
        st.end()
    }
}

impl TesterVerdict {
    /// Queries `lower` and `upper` and checks `f(lower) = 1, f(upper) = 0`.
    fn check<O: CubeOracle + ?Sized>(f: &O, lower: u64, upper: u64, meta: TrialMeta) -> Self {
        let lo = f.query(lower);
        let hi = f.query(upper);
        let violated = lo && !hi && lower != upper;
        Self {
            outcome: if violated {
                Outcome::ViolationFound
            } else {
                Outcome::NoViolation
            },
            queries: [
                Query {
                    point: lower,
                    value: lo,
                },
                Query {
                    point: upper,
                    value: hi,
                },
            ],
            query_count: 2,
            meta,
        }
    }

    fn infeasible(meta: TrialMeta) -> Self {
        Self {
            outcome: Outcome::NoViolation,
            queries: [Query::default(); 2],
            query_count: 0,
            meta,
        }
    }

    pub fn found(&self) -> bool {
        self.outcome == Outcome::ViolationFound
    }

    pub fn queried(&self) -> &[Query] {
        &self.queries[..self.query_count as usize]
    }

    /// One-sided soundness: a reported violation is a genuine violated pair.
    pub fn is_sound<O: CubeOracle + ?Sized>(&self, f: &O) -> bool {
        if !self.found() {
            return true;
        }
        let [lo, hi] = self.queries;
        lo.point & hi.point == lo.point
            && lo.point != hi.point
            && f.query(lo.point)
            && !f.query(hi.point)
    }
}

/// A randomized trial against query access to `f`.
pub trait Tester: Sync {
    fn kind(&self) -> TesterKind;
    fn trial<O: CubeOracle + ?Sized>(&self, f: &O, rng: &mut ChaCha8Rng) -> TesterVerdict;
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > POINT_MAX_N {
        return Err(LabError::UnsupportedDimension {
            n,
            min: 1,
            max: POINT_MAX_N,
        });
    }
    Ok(())
}

/// Uniform random hypercube edge.
#[derive(Clone, Debug)]
pub struct EdgeTester {
    n: usize,
}

impl EdgeTester {
    pub fn new(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { n })
    }

    pub fn trial_with<O: CubeOracle + ?Sized, R: Rng + ?Sized>(
        &self,
        f: &O,
        rng: &mut R,
    ) -> TesterVerdict {
        let x = rng.random::<u64>() & full_mask(self.n);
        let i = rng.random_range(0..self.n as u32);
        let (lower, upper) = (x & !(1 << i), x | 1 << i);
        let meta = TrialMeta {
            tester: TesterKind::Edge,
            x: Some(lower),
            y: Some(upper),
            direction: Some(i),
            ell: None,
            k: None,
            feasible: true,
        };
        TesterVerdict::check(f, lower, upper, meta)
    }
}

impl Tester for EdgeTester {
    fn kind(&self) -> TesterKind {
        TesterKind::Edge
    }
    fn trial<O: CubeOracle + ?Sized>(&self, f: &O, rng: &mut ChaCha8Rng) -> TesterVerdict {
        self.trial_with(f, rng)
    }
}

/// Point-uniform `y` in the middle layers, a bucket `ℓ`, a distance `k` from
/// the shifted bucket `B'_ℓ`, and a uniform `x` that far below `y`.
#[derive(Clone, Debug)]
pub struct WeightedPathTester {
    spec: MidLayerSpec,
    buckets: BucketSpec,
}

impl WeightedPathTester {
    pub fn new(n: usize, eps: f64) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::from_spec(MidLayerSpec::new(n, eps)?))
    }

    pub fn from_spec(spec: MidLayerSpec) -> Self {
        let buckets = BucketSpec::new(spec.n());
        Self { spec, buckets }
    }

    pub fn spec(&self) -> &MidLayerSpec {
        &self.spec
    }

    pub fn buckets(&self) -> &BucketSpec {
        &self.buckets
    }

    pub fn trial_with<O: CubeOracle + ?Sized, R: Rng + ?Sized>(
        &self,
        f: &O,
        rng: &mut R,
    ) -> TesterVerdict {
        let y = self.spec.sample_point(rng);
        let ell = rng.random_range(0..=self.buckets.m);
        let k = rng.random_range(self.buckets.shifted(ell));
        let mut meta = TrialMeta {
            tester: TesterKind::Weighted,
            x: None,
            y: Some(y),
            direction: None,
            ell: Some(ell as u32),
            k: Some(k as u32),
            feasible: false,
        };
        if k > y.count_ones() as usize {
            return TesterVerdict::infeasible(meta);
        }
        let x = y ^ crate::func::random_submask(y, k, rng);
        meta.x = Some(x);
        meta.feasible = true;
        TesterVerdict::check(f, x, y, meta)
    }
}

impl Tester for WeightedPathTester {
    fn kind(&self) -> TesterKind {
        TesterKind::Weighted
    }
    fn trial<O: CubeOracle + ?Sized>(&self, f: &O, rng: &mut ChaCha8Rng) -> TesterVerdict {
        self.trial_with(f, rng)
    }
}

/// A pair drawn from the path distribution `D`, oriented by containment.
#[derive(Clone, Debug)]
pub struct BaselinePathTester {
    spec: MidLayerSpec,
}

impl BaselinePathTester {
    pub fn new(n: usize, eps: f64) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            spec: MidLayerSpec::new(n, eps)?,
        })
    }

    pub fn from_spec(spec: MidLayerSpec) -> Self {
        Self { spec }
    }

    pub fn trial_with<O: CubeOracle + ?Sized, R: Rng + ?Sized>(
        &self,
        f: &O,
        rng: &mut R,
    ) -> TesterVerdict {
        let (lower, upper) = sample_d(&self.spec, rng).oriented();
        let meta = TrialMeta {
            tester: TesterKind::Baseline,
            x: Some(lower),
            y: Some(upper),
            direction: None,
            ell: None,
            k: Some((upper ^ lower).count_ones()),
            feasible: true,
        };
        TesterVerdict::check(f, lower, upper, meta)
    }
}

impl Tester for BaselinePathTester {
    fn kind(&self) -> TesterKind {
        TesterKind::Baseline
    }
    fn trial<O: CubeOracle + ?Sized>(&self, f: &O, rng: &mut ChaCha8Rng) -> TesterVerdict {
        self.trial_with(f, rng)
    }
}

/// Aggregate of many independent trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TrialTally {
    pub trials: u64,
    pub violations: u64,
    pub feasible: u64,
    pub queries: u64,
    /// Violations whose pair failed the soundness re-check (always zero for
    /// a correct tester).
    pub unsound: u64,
}

impl TrialTally {
    pub fn merge(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            violations: self.violations + o.violations,
            feasible: self.feasible + o.feasible,
            queries: self.queries + o.queries,
            unsound: self.unsound + o.unsound,
        }
    }

    pub fn rate(&self) -> Proportion {
        Proportion::new(self.violations, self.trials)
    }

    /// Every feasible trial made exactly two queries, the others none.
    pub fn queries_accounted(&self) -> bool {
        self.queries == 2 * self.feasible
    }
}

/// Runs `trials` trials of `tester` on `f` under the block plan's streams.
pub fn run_trials<T: Tester, O: CubeOracle + Sync + ?Sized>(
    tester: &T,
    f: &O,
    plan: &BlockPlan,
) -> Result<TrialTally> {
    plan.run(
        |rng, len| {
            let mut t = TrialTally::default();
            for _ in 0..len {
                let v = tester.trial(f, rng);
                t.trials += 1;
                t.violations += v.found() as u64;
                t.feasible += v.meta.feasible as u64;
                t.queries += v.queried().len() as u64;
                t.unsound += (!v.is_sound(f)) as u64;
            }
            t
        },
        TrialTally::default(),
        TrialTally::merge,
    )
}

/// Monte Carlo rejection rate of `kind` on `f`, with binomial standard error.
/// `eps` fixes the middle-layer band for the path testers.
pub fn rejection_probability<O: CubeOracle + Sync + ?Sized>(
    f: &O,
    kind: TesterKind,
    eps: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<TrialTally> {
    if trials == 0 {
        return Err(LabError::InvalidArgument(
            "trials must be at least 1".into(),
        ));
    }
    let n = f.dim();
    let plan =
        BlockPlan::new(seed, format!("rejection/{}", kind.name()), trials).with_workers(workers);
    match kind {
        TesterKind::Edge => run_trials(&EdgeTester::new(n)?, f, &plan),
        TesterKind::Weighted => run_trials(&WeightedPathTester::new(n, eps)?, f, &plan),
        TesterKind::Baseline => run_trials(&BaselinePathTester::new(n, eps)?, f, &plan),
        TesterKind::Combined => run_trials(&CombinedTester::new(n, eps, 0.5)?, f, &plan),
    }
}

//! The yes/no ensembles of random LTFs behind the non-adaptive lower bound.
//!
//! A yes-draw is `sign(Σ σ_i x_i)` with `σ_i` uniform on `{1, 3}`; a no-draw
//! is `sign(Σ ν_i x_i)` with `ν_i = -1` with probability `1/10` and `7/3`
//! otherwise. Both weight laws have mean 2 and variance 1, which is what
//! makes the two ensembles hard to tell apart with few queries.
//!
//! Weights are handled scaled by 3 (`{3, 9}` and `{-3, 7}`), so every dot
//! product is an exact integer and `sign(0) = +1` ties are decided exactly.

mod response;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::func::{estimate_deg1, fourier_deg1, BitTableFunction, LtfSpec, WideOracle};

pub use response::{
    moment_match_check, response_distribution, response_distribution_explicit,
    response_distribution_seeded, tv_distance, tv_estimate, vector_sum, weight_moments,
    MomentReport, QueryMatrix, ResponseDistribution, SampleMoments, TvEstimate, VectorSumSample,
    BOOTSTRAP_RESAMPLES, RESPONSE_MAX_Q,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Yes,
    No,
}

impl EnsembleKind {
    /// `(unmarked, marked)` weights scaled by 3.
    pub(crate) fn scaled_weights(self) -> (i64, i64) {
        match self {
            EnsembleKind::Yes => (3, 9),
            EnsembleKind::No => (7, -3),
        }
    }

    /// Probability that a coordinate is marked, as `(numerator, denominator)`.
    pub(crate) fn mark_ratio(self) -> (u32, u32) {
        match self {
            EnsembleKind::Yes => (1, 2),
            EnsembleKind::No => (1, 10),
        }
    }
}

/// One realised weight vector. A set bit in `marks` is a weight-3
/// coordinate for yes-draws and a weight `-1` coordinate for no-draws.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnsembleDraw {
    kind: EnsembleKind,
    n: usize,
    marks: Vec<u64>,
}

impl EnsembleDraw {
    pub fn from_marks(kind: EnsembleKind, n: usize, marks: Vec<u64>) -> Result<Self> {
        if n == 0 || marks.len() != n.div_ceil(64) {
            return Err(LabError::InvalidArgument(format!(
                "{} mark words do not fit n = {n}",
                marks.len()
            )));
        }
        if n % 64 != 0 && marks[marks.len() - 1] >> (n % 64) != 0 {
            return Err(LabError::InvalidArgument("marks set beyond n".into()));
        }
        Ok(Self { kind, n, marks })
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn marks(&self) -> &[u64] {
        &self.marks
    }

    pub fn is_marked(&self, i: usize) -> bool {
        self.marks[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn marked_count(&self) -> usize {
        self.marks.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of `-1` weights (zero for yes-draws).
    pub fn negatives(&self) -> usize {
        match self.kind {
            EnsembleKind::Yes => 0,
            EnsembleKind::No => self.marked_count(),
        }
    }

    pub fn weights(&self) -> Vec<Rational64> {
        let (u, m) = self.kind.scaled_weights();
        (0..self.n)
            .map(|i| Rational64::new(if self.is_marked(i) { m } else { u }, 3))
            .collect()
    }

    pub fn to_ltf(&self) -> Result<LtfSpec> {
        LtfSpec::new(self.weights(), Rational64::zero())
    }

    /// `3 (w · x)` for a packed `±1` point (bit 1 is `+1`).
    pub fn scaled_dot(&self, x: &[u64]) -> i64 {
        let (u, m) = self.kind.scaled_weights();
        let n = self.n as i64;
        let total_marked = self.marked_count() as i64;
        let plus: i64 = x.iter().map(|w| w.count_ones() as i64).sum();
        let plus_marked: i64 = x
            .iter()
            .zip(&self.marks)
            .map(|(a, b)| (a & b).count_ones() as i64)
            .sum();
        let plus_unmarked = plus - plus_marked;
        let minus_marked = total_marked - plus_marked;
        let minus_unmarked = n - plus - minus_marked;
        u * (plus_unmarked - minus_unmarked) + m * (plus_marked - minus_marked)
    }
}

impl WideOracle for EnsembleDraw {
    fn width(&self) -> usize {
        self.n
    }

    fn query_words(&self, x: &[u64]) -> bool {
        self.scaled_dot(x) >= 0
    }
}

fn sample(kind: EnsembleKind, n: usize, rng: &mut (impl Rng + ?Sized)) -> Result<EnsembleDraw> {
    if n == 0 {
        return Err(LabError::UnsupportedDimension {
            n,
            min: 1,
            max: usize::MAX,
        });
    }
    let words = n.div_ceil(64);
    let mut marks = vec![0u64; words];
    match kind {
        EnsembleKind::Yes => {
            for w in marks.iter_mut() {
                *w = rng.random();
            }
        }
        EnsembleKind::No => {
            let (p, q) = kind.mark_ratio();
            for i in 0..n {
                if rng.random_ratio(p, q) {
                    marks[i / 64] |= 1 << (i % 64);
                }
            }
        }
    }
    if n % 64 != 0 {
        marks[words - 1] &= (1u64 << (n % 64)) - 1;
    }
    Ok(EnsembleDraw { kind, n, marks })
}

pub fn sample_yes<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<EnsembleDraw> {
    sample(EnsembleKind::Yes, n, rng)
}

pub fn sample_no<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<EnsembleDraw> {
    sample(EnsembleKind::No, n, rng)
}

/// Half-width `√(n ln n)` of the niceness window around `n/10`.
pub fn niceness_window(n: usize) -> f64 {
    let n = n as f64;
    (n * n.ln()).sqrt()
}

/// A no-draw is nice when its count of `-1` weights is within
/// `√(n ln n)` of `n/10`.
pub fn is_nice(draw: &EnsembleDraw) -> Result<bool> {
    if draw.kind != EnsembleKind::No {
        return Err(LabError::InvalidArgument(
            "niceness is defined for no-draws".into(),
        ));
    }
    Ok(count_is_nice(draw.n, draw.negatives()))
}

pub fn count_is_nice(n: usize, negatives: usize) -> bool {
    (negatives as f64 - n as f64 / 10.0).abs() <= niceness_window(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMode {
    /// Exact degree-1 coefficients from the truth table (`n <= 16`).
    Exact,
    /// Sampled coefficients from this many uniform points.
    Sampled { samples: u64 },
}

pub const EXACT_BOUND_MAX_N: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierBound {
    pub n: usize,
    pub bound: f64,
    /// Exact value when computed from the table.
    #[serde(serialize_with = "crate::stats::ser_opt_ratio")]
    pub exact: Option<Rational64>,
    /// Coordinates counted as negative.
    pub negative_coordinates: usize,
    /// Sampled mode: the raw sum before the deduction, and the deduction.
    pub raw: f64,
    pub deduction: f64,
}

/// `dist(f, monotone) >= (1/4) Σ_{i : f̂(i) < 0} f̂(i)^2`.
///
/// In sampled mode a coordinate only counts when its first-moment estimate
/// is at least three standard errors below zero, and three standard errors
/// of the summed square estimates are taken off the result. Any packed
/// oracle works here; [`LtfSpec`] and [`EnsembleDraw`] both qualify.
pub fn fourier_distance_lower_bound<F, R>(
    f: &F,
    mode: BoundMode,
    rng: &mut R,
) -> Result<FourierBound>
where
    F: WideOracle + ?Sized,
    R: Rng + ?Sized,
{
    let n = f.width();
    match mode {
        BoundMode::Exact => {
            if n > EXACT_BOUND_MAX_N {
                return Err(LabError::UnsupportedDimension {
                    n,
                    min: 1,
                    max: EXACT_BOUND_MAX_N,
                });
            }
            let table = BitTableFunction::from_fn(n, |x| f.query_words(&[x]))?;
            let negative: Vec<Rational64> = fourier_deg1(&table)
                .into_iter()
                .filter(|c| *c < Rational64::zero())
                .collect();
            let exact = negative.iter().map(|c| c * c).sum::<Rational64>() / 4;
            let value = exact.to_f64().unwrap();
            Ok(FourierBound {
                n,
                bound: value,
                exact: Some(exact),
                negative_coordinates: negative.len(),
                raw: value,
                deduction: 0.0,
            })
        }
        BoundMode::Sampled { samples } => {
            let est = estimate_deg1(f, samples, rng)?;
            let mut raw = 0.0;
            let mut var = 0.0;
            let mut count = 0;
            for (first, square) in est.first.iter().zip(&est.square) {
                if first.value <= -3.0 * first.stderr {
                    raw += square.value;
                    var += square.stderr * square.stderr;
                    count += 1;
                }
            }
            let deduction = 3.0 * var.sqrt();
            Ok(FourierBound {
                n,
                bound: ((raw - deduction) / 4.0).max(0.0),
                exact: None,
                negative_coordinates: count,
                raw: raw / 4.0,
                deduction: deduction / 4.0,
            })
        }
    }
}

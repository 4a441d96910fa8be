//! Response vectors of a fixed query matrix under the two ensembles.
//!
//! A row `Q_i` of the matrix answers `sign(Q_i · w)`. Only the column sign
//! pattern matters for the joint law: columns sharing a pattern `c` add
//! their weights into one class sum, and each class sum is an affine image
//! of a single binomial. Sampling a response therefore costs one binomial
//! per nonempty class instead of `n` coin flips.

use std::collections::BTreeMap;

use num_rational::Rational64;
use rand::seq::index::sample as index_sample;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use super::{EnsembleDraw, EnsembleKind};
use crate::error::{LabError, Result};
use crate::harness::streams::BlockPlan;

/// Largest number of queries for a dense response table (`2^q` cells).
pub const RESPONSE_MAX_Q: usize = 20;

/// Bootstrap resamples used by [`tv_estimate`].
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// `q × n` matrix over `{-1, 1}`, one packed row per query (bit 1 is `+1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryMatrix {
    q: usize,
    n: usize,
    rows: Vec<Vec<u64>>,
}

fn row_tail_mask(n: usize) -> u64 {
    if n % 64 == 0 {
        u64::MAX
    } else {
        (1u64 << (n % 64)) - 1
    }
}

impl QueryMatrix {
    pub fn from_rows(n: usize, rows: Vec<Vec<u64>>) -> Result<Self> {
        if rows.is_empty() || n == 0 {
            return Err(LabError::InvalidArgument(
                "a query matrix needs q >= 1 and n >= 1".into(),
            ));
        }
        let words = n.div_ceil(64);
        for r in &rows {
            if r.len() != words || r[words - 1] & !row_tail_mask(n) != 0 {
                return Err(LabError::InvalidArgument(format!(
                    "row does not fit n = {n}"
                )));
            }
        }
        Ok(Self {
            q: rows.len(),
            n,
            rows,
        })
    }

    /// Rows from `±1` entries.
    pub fn from_signs(rows: &[Vec<i8>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let mut packed = Vec::with_capacity(rows.len());
        for r in rows {
            if r.len() != n {
                return Err(LabError::DimensionMismatch {
                    expected: n,
                    actual: r.len(),
                });
            }
            let mut words = vec![0u64; n.div_ceil(64)];
            for (j, &s) in r.iter().enumerate() {
                match s {
                    1 => words[j / 64] |= 1 << (j % 64),
                    -1 => {}
                    _ => return Err(LabError::InvalidArgument(format!("entry {s} is not ±1"))),
                }
            }
            packed.push(words);
        }
        Self::from_rows(n, packed)
    }

    /// Every entry uniform on `{-1, 1}`.
    pub fn random<R: Rng + ?Sized>(q: usize, n: usize, rng: &mut R) -> Result<Self> {
        let words = n.div_ceil(64);
        let rows = (0..q)
            .map(|_| {
                let mut r: Vec<u64> = (0..words).map(|_| rng.random()).collect();
                if let Some(last) = r.last_mut() {
                    *last &= row_tail_mask(n);
                }
                r
            })
            .collect();
        Self::from_rows(n, rows)
    }

    /// Each row has exactly `⌈n/2⌉` entries equal to `+1`, placed uniformly.
    pub fn balanced<R: Rng + ?Sized>(q: usize, n: usize, rng: &mut R) -> Result<Self> {
        let words = n.div_ceil(64);
        let rows = (0..q)
            .map(|_| {
                let mut r = vec![0u64; words];
                for j in index_sample(rng, n, n.div_ceil(2)) {
                    r[j / 64] |= 1 << (j % 64);
                }
                r
            })
            .collect();
        Self::from_rows(n, rows)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        if self.rows[i][j / 64] >> (j % 64) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    /// Column sign patterns with their multiplicities. Bit `i` of a pattern
    /// is set when the column has `+1` in row `i`.
    pub fn column_classes(&self) -> Vec<(u32, u64)> {
        let mut classes = BTreeMap::new();
        for j in 0..self.n {
            let pattern = (0..self.q).fold(0u32, |p, i| {
                p | ((self.rows[i][j / 64] >> (j % 64) & 1) as u32) << i
            });
            *classes.entry(pattern).or_insert(0u64) += 1;
        }
        classes.into_iter().collect()
    }

    fn check_q(&self) -> Result<()> {
        if self.q > RESPONSE_MAX_Q {
            return Err(LabError::BudgetExceeded(format!(
                "q = {} exceeds {RESPONSE_MAX_Q}",
                self.q
            )));
        }
        Ok(())
    }
}

/// Realisation of `Q w`, stored scaled by 3 so that every entry is an integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VectorSumSample {
    pub scaled: Vec<i64>,
}

impl VectorSumSample {
    pub fn values(&self) -> Vec<f64> {
        self.scaled.iter().map(|&v| v as f64 / 3.0).collect()
    }

    /// Response pattern, bit `i` set when entry `i` is `>= 0`.
    pub fn pattern(&self) -> u32 {
        self.scaled
            .iter()
            .enumerate()
            .fold(0, |p, (i, &v)| p | ((v >= 0) as u32) << i)
    }
}

/// `Q w` for an explicit draw.
pub fn vector_sum(q: &QueryMatrix, draw: &EnsembleDraw) -> Result<VectorSumSample> {
    if q.n != draw.n() {
        return Err(LabError::DimensionMismatch {
            expected: q.n,
            actual: draw.n(),
        });
    }
    Ok(VectorSumSample {
        scaled: q.rows.iter().map(|r| draw.scaled_dot(r)).collect(),
    })
}

/// Samples `Q w` through the column classes.
struct ClassSampler {
    q: usize,
    /// `(pattern, class size, law of the marked count)`.
    classes: Vec<(u32, i64, Binomial)>,
    kind: EnsembleKind,
}

impl ClassSampler {
    fn new(m: &QueryMatrix, kind: EnsembleKind) -> Self {
        let (a, b) = kind.mark_ratio();
        let p = a as f64 / b as f64;
        let classes = m
            .column_classes()
            .into_iter()
            .map(|(c, s)| (c, s as i64, Binomial::new(s, p).expect("valid binomial")))
            .collect();
        Self {
            q: m.q,
            classes,
            kind,
        }
    }

    fn sample_into<R: Rng + ?Sized>(&self, out: &mut [i64], rng: &mut R) {
        let (u, mk) = self.kind.scaled_weights();
        out.iter_mut().for_each(|v| *v = 0);
        for (c, s, law) in &self.classes {
            let marked = law.sample(rng) as i64;
            let w = u * (s - marked) + mk * marked;
            for (i, v) in out.iter_mut().enumerate().take(self.q) {
                if c >> i & 1 == 1 {
                    *v += w;
                } else {
                    *v -= w;
                }
            }
        }
    }
}

/// Counts of the `2^q` response patterns over `samples` draws.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResponseDistribution {
    pub q: usize,
    pub kind: EnsembleKind,
    pub samples: u64,
    pub counts: Vec<u64>,
}

impl ResponseDistribution {
    fn empty(q: usize, kind: EnsembleKind) -> Self {
        Self {
            q,
            kind,
            samples: 0,
            counts: vec![0; 1 << q],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.samples += other.samples;
        self.counts
            .iter_mut()
            .zip(&other.counts)
            .for_each(|(a, b)| *a += b);
        self
    }

    pub fn frequency(&self, pattern: u32) -> f64 {
        self.counts[pattern as usize] as f64 / self.samples as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.samples as f64)
            .collect()
    }
}

/// `samples` independent draws of the response pattern.
pub fn response_distribution<R: Rng + ?Sized>(
    q: &QueryMatrix,
    kind: EnsembleKind,
    samples: u64,
    rng: &mut R,
) -> Result<ResponseDistribution> {
    q.check_q()?;
    let sampler = ClassSampler::new(q, kind);
    let mut dist = ResponseDistribution::empty(q.q, kind);
    let mut buf = vec![0i64; q.q];
    for _ in 0..samples {
        sampler.sample_into(&mut buf, rng);
        let pattern = buf
            .iter()
            .enumerate()
            .fold(0usize, |p, (i, &v)| p | ((v >= 0) as usize) << i);
        dist.counts[pattern] += 1;
    }
    dist.samples = samples;
    Ok(dist)
}

/// The same law, sampled by drawing every coordinate weight.
pub fn response_distribution_explicit<R: Rng + ?Sized>(
    q: &QueryMatrix,
    kind: EnsembleKind,
    samples: u64,
    rng: &mut R,
) -> Result<ResponseDistribution> {
    q.check_q()?;
    let mut dist = ResponseDistribution::empty(q.q, kind);
    for _ in 0..samples {
        let draw = super::sample(kind, q.n, rng)?;
        dist.counts[vector_sum(q, &draw)?.pattern() as usize] += 1;
    }
    dist.samples = samples;
    Ok(dist)
}

/// [`response_distribution`] over seeded parallel blocks. The experiment id
/// is derived from the ensemble kind and `n`.
pub fn response_distribution_seeded(
    q: &QueryMatrix,
    kind: EnsembleKind,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<ResponseDistribution> {
    q.check_q()?;
    let tag = match kind {
        EnsembleKind::Yes => "yes",
        EnsembleKind::No => "no",
    };
    let plan =
        BlockPlan::new(seed, format!("response/{tag}/{}", q.n), samples).with_workers(workers);
    plan.run(
        |rng, len| response_distribution(q, kind, len, rng).expect("q checked"),
        ResponseDistribution::empty(q.q, kind),
        ResponseDistribution::merge,
    )
}

/// Plug-in total variation distance `(1/2) Σ |p̂₁ - p̂₂|`.
pub fn tv_distance(a: &ResponseDistribution, b: &ResponseDistribution) -> Result<f64> {
    if a.q != b.q {
        return Err(LabError::DimensionMismatch {
            expected: a.q,
            actual: b.q,
        });
    }
    if a.samples == 0 || b.samples == 0 {
        return Err(LabError::InvalidArgument(
            "empty response distribution".into(),
        ));
    }
    Ok(tv_of(&a.frequencies(), &b.frequencies()))
}

fn tv_of(p: &[f64], r: &[f64]) -> f64 {
    0.5 * p.iter().zip(r).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// A multinomial resample of `counts`, by conditional binomials.
fn resample<R: Rng + ?Sized>(counts: &[u64], total: u64, rng: &mut R) -> Vec<f64> {
    let mut left = total;
    let mut mass = total;
    let mut out = Vec::with_capacity(counts.len());
    for &c in counts {
        let k = if left == 0 || c == 0 {
            0
        } else if c >= mass {
            left
        } else {
            Binomial::new(left, c as f64 / mass as f64)
                .expect("valid binomial")
                .sample(rng)
        };
        out.push(k as f64 / total as f64);
        left -= k;
        mass -= c;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TvEstimate {
    pub tv: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub resamples: usize,
}

/// Plug-in TV with a percentile bootstrap interval (2.5% and 97.5%).
pub fn tv_estimate<R: Rng + ?Sized>(
    a: &ResponseDistribution,
    b: &ResponseDistribution,
    rng: &mut R,
) -> Result<TvEstimate> {
    let tv = tv_distance(a, b)?;
    let mut boots: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            tv_of(
                &resample(&a.counts, a.samples, rng),
                &resample(&b.counts, b.samples, rng),
            )
        })
        .collect();
    boots.sort_by(f64::total_cmp);
    let at = |p: f64| boots[((p * (BOOTSTRAP_RESAMPLES - 1) as f64).round()) as usize];
    Ok(TvEstimate {
        tv,
        ci_low: at(0.025),
        ci_high: at(0.975),
        resamples: BOOTSTRAP_RESAMPLES,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleMoments {
    pub max_mean_z: f64,
    pub max_cov_z: f64,
}

impl SampleMoments {
    pub fn within(&self, sigmas: f64) -> bool {
        self.max_mean_z <= sigmas && self.max_cov_z <= sigmas
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub q: usize,
    pub n: usize,
    pub samples: u64,
    /// Weight means and variances of both laws, as exact fractions.
    #[serde(serialize_with = "crate::stats::ser_ratio")]
    pub yes_mean: Rational64,
    #[serde(serialize_with = "crate::stats::ser_ratio")]
    pub yes_var: Rational64,
    #[serde(serialize_with = "crate::stats::ser_ratio")]
    pub no_mean: Rational64,
    #[serde(serialize_with = "crate::stats::ser_ratio")]
    pub no_var: Rational64,
    /// Exact `E = 2 Q 1` and `Cov = Q Qᵀ` for both ensembles.
    pub analytic_match: bool,
    pub yes: SampleMoments,
    pub no: SampleMoments,
}

/// Exact mean and variance of one coordinate weight.
pub fn weight_moments(kind: EnsembleKind) -> (Rational64, Rational64) {
    let (u, m) = kind.scaled_weights();
    let (a, b) = kind.mark_ratio();
    let p = Rational64::new(a as i64, b as i64);
    let (u, m) = (Rational64::new(u, 3), Rational64::new(m, 3));
    let mean = p * m + (Rational64::from_integer(1) - p) * u;
    let second = p * m * m + (Rational64::from_integer(1) - p) * u * u;
    (mean, second - mean * mean)
}

fn analytic_match(q: &QueryMatrix) -> bool {
    [EnsembleKind::Yes, EnsembleKind::No]
        .into_iter()
        .all(|kind| {
            let (mean, var) = weight_moments(kind);
            (0..q.q).all(|i| {
                let e: Rational64 = (0..q.n).map(|j| mean * q.entry(i, j)).sum();
                let target: i64 = (0..q.n).map(|j| 2 * q.entry(i, j)).sum();
                e == Rational64::from_integer(target)
                    && (0..q.q).all(|k| {
                        let c: Rational64 = (0..q.n)
                            .map(|j| var * (q.entry(i, j) * q.entry(k, j)))
                            .sum();
                        c == Rational64::from_integer(
                            (0..q.n).map(|j| q.entry(i, j) * q.entry(k, j)).sum(),
                        )
                    })
            })
        })
}

fn sample_moments<R: Rng + ?Sized>(
    q: &QueryMatrix,
    kind: EnsembleKind,
    samples: u64,
    rng: &mut R,
) -> SampleMoments {
    let sampler = ClassSampler::new(q, kind);
    let dim = q.q;
    let mean_target: Vec<f64> = (0..dim)
        .map(|i| (0..q.n).map(|j| 2.0 * q.entry(i, j) as f64).sum())
        .collect();
    let gram: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|k| {
                    (0..q.n)
                        .map(|j| (q.entry(i, j) * q.entry(k, j)) as f64)
                        .sum()
                })
                .collect()
        })
        .collect();
    let mut draws = Vec::with_capacity(samples as usize);
    let mut buf = vec![0i64; dim];
    for _ in 0..samples {
        sampler.sample_into(&mut buf, rng);
        draws.push(buf.iter().map(|&v| v as f64 / 3.0).collect::<Vec<f64>>());
    }
    let nf = samples as f64;
    let mut max_mean_z: f64 = 0.0;
    let means: Vec<f64> = (0..dim)
        .map(|i| draws.iter().map(|d| d[i]).sum::<f64>() / nf)
        .collect();
    for i in 0..dim {
        let se = (gram[i][i] / nf).sqrt();
        max_mean_z = max_mean_z.max((means[i] - mean_target[i]).abs() / se);
    }
    let mut max_cov_z: f64 = 0.0;
    for i in 0..dim {
        for k in i..dim {
            let prods: Vec<f64> = draws
                .iter()
                .map(|d| (d[i] - means[i]) * (d[k] - means[k]))
                .collect();
            let cov = prods.iter().sum::<f64>() / (nf - 1.0);
            let spread = prods.iter().map(|p| (p - cov) * (p - cov)).sum::<f64>() / (nf - 1.0);
            let se = (spread / nf).sqrt();
            max_cov_z = max_cov_z.max((cov - gram[i][k]).abs() / se);
        }
    }
    SampleMoments {
        max_mean_z,
        max_cov_z,
    }
}

/// Exact moment identities for `Q`, plus sample moments of `Qσ` and `Qν`.
pub fn moment_match_check<R: Rng + ?Sized>(
    q: &QueryMatrix,
    samples: u64,
    rng: &mut R,
) -> Result<MomentReport> {
    if samples < 2 {
        return Err(LabError::InvalidArgument(
            "need at least two samples".into(),
        ));
    }
    let (yes_mean, yes_var) = weight_moments(EnsembleKind::Yes);
    let (no_mean, no_var) = weight_moments(EnsembleKind::No);
    Ok(MomentReport {
        q: q.q,
        n: q.n,
        samples,
        yes_mean,
        yes_var,
        no_mean,
        no_var,
        analytic_match: analytic_match(q),
        yes: sample_moments(q, EnsembleKind::Yes, samples, rng),
        no: sample_moments(q, EnsembleKind::No, samples, rng),
    })
}

//! Influences, degree-1 Fourier coefficients and the full Walsh–Hadamard
//! transform of truth tables, plus a sampled estimator for LTFs of any size.
//!
//! Fourier quantities use the `{-1,1}` convention: a `{0,1}` table value `b`
//! and a coordinate bit `x_i` are read as `2b - 1` and `2x_i - 1`.

use num_rational::Rational64;
use rand::Rng;

use super::ltf::LtfSpec;
use super::table::{BitTableFunction, WideOracle};
use crate::error::{LabError, Result};

/// Largest dimension accepted by the full transform.
pub const WHT_MAX_N: usize = 20;

/// `Inf_i[f] = Pr_x[f(x) ≠ f(x ⊕ e_i)]`, exactly.
pub fn influence(f: &BitTableFunction, i: usize) -> Result<Rational64> {
    if i >= f.n() {
        return Err(LabError::InvalidArgument(format!(
            "coordinate {i} out of range for n = {}",
            f.n()
        )));
    }
    let mut sensitive = 0i64;
    f.for_each_violated_edge_in_direction(i, |_| sensitive += 1);
    // Edges where the value rises are the other sensitive edges in direction i.
    let ones_up = f.count_ones_with_coordinate(i) as i64;
    let ones_down = f.count_ones() as i64 - ones_up;
    // ones_down = violated + (edges with both ends 1); ones_up = rising + (both 1).
    let rising = ones_up - (ones_down - sensitive);
    let total = 2 * (sensitive + rising);
    Ok(Rational64::new(total, f.size() as i64))
}

/// Degree-1 coefficients `f̂(i) = E[f(x) x_i]`, exactly.
pub fn fourier_deg1(f: &BitTableFunction) -> Vec<Rational64> {
    let ones = f.count_ones() as i64;
    let size = f.size() as i64;
    (0..f.n())
        .map(|i| {
            let c = f.count_ones_with_coordinate(i) as i64;
            Rational64::new(4 * c - 2 * ones, size)
        })
        .collect()
}

/// Unnormalised Walsh–Hadamard spectrum: entry `S` is `Σ_x F(x) χ_S(x)`,
/// i.e. `2^n f̂(S)`.
pub fn walsh_hadamard(f: &BitTableFunction) -> Result<Vec<i64>> {
    if f.n() > WHT_MAX_N {
        return Err(LabError::UnsupportedDimension {
            n: f.n(),
            min: 1,
            max: WHT_MAX_N,
        });
    }
    let mut a: Vec<i64> = (0..f.size())
        .map(|x| if f.value(x) { 1 } else { -1 })
        .collect();
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                // Bit 1 reads as +1, so the upper half carries the positive sign.
                let (s, t) = (*u + *v, *v - *u);
                *u = s;
                *v = t;
            }
        }
        h *= 2;
    }
    Ok(a)
}

/// Parseval for `±1`-valued functions: `Σ_S f̂(S)^2 = 1`, checked in
/// integers as `Σ_S (2^n f̂(S))^2 = 4^n`.
pub fn parseval_holds(f: &BitTableFunction) -> Result<bool> {
    let spectrum = walsh_hadamard(f)?;
    let total: i128 = spectrum.iter().map(|&c| (c as i128) * (c as i128)).sum();
    Ok(total == 1i128 << (2 * f.n()))
}

/// Mean with a standard error.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.value - target).abs() <= sigmas * self.stderr + 1e-12
    }
}

/// Sampled degree-1 statistics for every coordinate of an LTF.
#[derive(Clone, Debug)]
pub struct Deg1Estimates {
    pub samples: u64,
    /// Estimates of `f̂(i)`.
    pub first: Vec<Estimate>,
    /// Unbiased estimates of `f̂(i)^2`.
    pub square: Vec<Estimate>,
}

/// Per-lane counters for bit columns of a stream of packed rows, using eight
/// carry-save planes flushed every 255 rows.
struct ColumnCounter {
    planes: Vec<[u64; 8]>,
    totals: Vec<u64>,
    pending: u32,
}

impl ColumnCounter {
    fn new(words: usize) -> Self {
        Self {
            planes: vec![[0; 8]; words],
            totals: vec![0; words * 64],
            pending: 0,
        }
    }

    fn add(&mut self, row: &[u64]) {
        for (planes, &w) in self.planes.iter_mut().zip(row) {
            let mut carry = w;
            for p in planes.iter_mut() {
                if carry == 0 {
                    break;
                }
                let next = *p & carry;
                *p ^= carry;
                carry = next;
            }
        }
        self.pending += 1;
        if self.pending == 255 {
            self.flush();
        }
    }

    fn flush(&mut self) {
        for (w, planes) in self.planes.iter_mut().enumerate() {
            for (bit, p) in planes.iter().enumerate() {
                let mut m = *p;
                while m != 0 {
                    self.totals[w * 64 + m.trailing_zeros() as usize] += 1 << bit;
                    m &= m - 1;
                }
            }
            *planes = [0; 8];
        }
        self.pending = 0;
    }

    fn into_totals(mut self) -> Vec<u64> {
        self.flush();
        self.totals
    }
}

/// Samples `samples` uniform points of `{-1,1}^n` and returns, for every
/// coordinate of `f` (an LTF, an ensemble draw or any packed oracle), the first-moment estimate of `f̂(i)` and the all-pairs
/// U-statistic `(S_i^2 - N) / (N(N-1))` for `f̂(i)^2`, where
/// `S_i = Σ_s f(x_s) x_{s,i}`. Averaging `f(x)x_i f(x')x'_i` over every
/// unordered pair of distinct samples gives exactly that statistic.
pub fn estimate_deg1<O: WideOracle + ?Sized, R: Rng + ?Sized>(
    f: &O,
    samples: u64,
    rng: &mut R,
) -> Result<Deg1Estimates> {
    if samples < 2 {
        return Err(LabError::InvalidArgument(
            "need at least two samples".into(),
        ));
    }
    let n = f.width();
    let words = n.div_ceil(64);
    let tail = if n % 64 == 0 {
        u64::MAX
    } else {
        (1u64 << (n % 64)) - 1
    };
    let mut plus = ColumnCounter::new(words);
    let mut minus = ColumnCounter::new(words);
    let (mut n_plus, mut n_minus) = (0u64, 0u64);
    let mut row = vec![0u64; words];
    for _ in 0..samples {
        for w in row.iter_mut() {
            *w = rng.random();
        }
        row[words - 1] &= tail;
        if f.query_words(&row) {
            n_plus += 1;
            plus.add(&row);
        } else {
            n_minus += 1;
            minus.add(&row);
        }
    }
    let plus = plus.into_totals();
    let minus = minus.into_totals();
    let nf = samples as f64;
    let mut first = Vec::with_capacity(n);
    let mut square = Vec::with_capacity(n);
    for i in 0..n {
        let s = 2 * plus[i] as i64 - n_plus as i64 - 2 * minus[i] as i64 + n_minus as i64;
        let mean = s as f64 / nf;
        let var1 = (1.0 - mean * mean).max(0.0);
        first.push(Estimate {
            value: mean,
            stderr: (var1 / nf).sqrt(),
        });
        let sf = s as f64;
        let u = (sf * sf - nf) / (nf * (nf - 1.0));
        // Var of the order-2 U-statistic: (4(N-2)ζ1 + 2ζ2) / (N(N-1)).
        let m2 = u.clamp(0.0, 1.0);
        let zeta1 = m2 * (1.0 - m2);
        let zeta2 = 1.0 - m2 * m2;
        let var = (4.0 * (nf - 2.0) * zeta1 + 2.0 * zeta2) / (nf * (nf - 1.0));
        square.push(Estimate {
            value: u,
            stderr: var.sqrt(),
        });
    }
    Ok(Deg1Estimates {
        samples,
        first,
        square,
    })
}

/// Sampled estimate of `f̂(i)^2` for the single coordinate `i`.
pub fn fourier_deg1_sq_estimate<R: Rng + ?Sized>(
    ltf: &LtfSpec,
    i: usize,
    samples: u64,
    rng: &mut R,
) -> Result<Estimate> {
    if i >= ltf.n() {
        return Err(LabError::InvalidArgument(format!(
            "coordinate {i} out of range for n = {}",
            ltf.n()
        )));
    }
    Ok(estimate_deg1(ltf, samples, rng)?.square[i])
}

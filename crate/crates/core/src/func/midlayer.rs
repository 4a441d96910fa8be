use std::ops::RangeInclusive;

use rand::Rng;
use statrs::function::factorial::ln_binomial;

use super::point::{random_layer_point, Point, POINT_MAX_N};
use crate::error::{LabError, Result};

/// The band of middle layers used by the path testers.
///
/// `d = 2⌈√(2n ln(100/ε))⌉` and the band holds every integer layer in the
/// closed interval `[(n-d)/2, (n+d)/2]`, clamped to `[0, n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MidLayerSpec {
    n: usize,
    eps: f64,
    d: usize,
    lo: usize,
    hi: usize,
    /// Cumulative layer sizes `|L_lo| + ... + |L_i|`, present when points fit
    /// in a mask.
    cumulative: Option<Vec<u64>>,
}

pub fn band_width(n: usize, eps: f64) -> usize {
    2 * (2.0 * n as f64 * (100.0 / eps).ln()).sqrt().ceil() as usize
}

impl MidLayerSpec {
    /// Requires `1/n <= eps <= 1/2`.
    pub fn new(n: usize, eps: f64) -> Result<Self> {
        if n == 0 {
            return Err(LabError::UnsupportedDimension {
                n,
                min: 1,
                max: usize::MAX,
            });
        }
        if !(eps.is_finite() && eps * n as f64 >= 1.0 && eps <= 0.5) {
            return Err(LabError::EpsOutOfRange { eps, n });
        }
        Ok(Self::build(n, eps))
    }

    /// Same band with `eps` clamped into `[1/n, 1/2]` first; for `n = 1`
    /// the interval is empty and `eps = 1/2` is used.
    pub fn clamped(n: usize, eps: f64) -> Result<Self> {
        if n == 0 {
            return Err(LabError::UnsupportedDimension {
                n,
                min: 1,
                max: usize::MAX,
            });
        }
        let eps = if eps.is_nan() {
            0.5
        } else {
            eps.clamp((1.0 / n as f64).min(0.5), 0.5)
        };
        Ok(Self::build(n, eps))
    }

    fn build(n: usize, eps: f64) -> Self {
        let d = band_width(n, eps);
        let (ni, di) = (n as i64, d as i64);
        // ceil((n-d)/2) and floor((n+d)/2); both sides are integers when n is even.
        let lo = (ni - di + 1).div_euclid(2).max(0) as usize;
        let hi = ((ni + di).div_euclid(2) as usize).min(n);
        let cumulative = (n <= POINT_MAX_N).then(|| {
            let mut acc = 0u64;
            (lo..=hi)
                .map(|i| {
                    acc += num_integer::binomial(n as u64, i as u64);
                    acc
                })
                .collect()
        });
        Self {
            n,
            eps,
            d,
            lo,
            hi,
            cumulative,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn layers(&self) -> RangeInclusive<usize> {
        self.lo..=self.hi
    }

    pub fn layer_list(&self) -> Vec<usize> {
        self.layers().collect()
    }

    /// `L`, the number of middle layers.
    pub fn layer_count(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn covers_all_layers(&self) -> bool {
        self.lo == 0 && self.hi == self.n
    }

    pub fn contains_layer(&self, w: usize) -> bool {
        self.lo <= w && w <= self.hi
    }

    pub fn contains(&self, x: u64) -> bool {
        self.contains_layer(x.count_ones() as usize)
    }

    pub fn contains_point(&self, x: &Point) -> bool {
        x.n() == self.n && self.contains_layer(x.weight())
    }

    /// `|L_mid|`, available for `n <= 63`.
    pub fn point_count(&self) -> Option<u64> {
        self.cumulative.as_ref().map(|c| *c.last().unwrap())
    }

    /// Uniform point of `L_mid` (point-uniform, not layer-uniform).
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let cumulative = self
            .cumulative
            .as_ref()
            .expect("point sampling needs n <= 63");
        let total = *cumulative.last().unwrap();
        let t = rng.random_range(0..total);
        let idx = cumulative.partition_point(|&c| c <= t);
        random_layer_point(self.n, self.lo + idx, rng)
    }

    /// Uniform layer index among the middle layers.
    pub fn sample_layer<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(self.lo..=self.hi)
    }

    /// Fraction of `{0,1}^n` outside the band: exact integer arithmetic up
    /// to `n = 120`, log-space binomials beyond.
    pub fn outside_fraction(&self) -> f64 {
        if self.n <= 120 {
            let c = |k: usize| -> u128 {
                let mut v = 1u128;
                for j in 0..k {
                    v = v * (self.n - j) as u128 / (j + 1) as u128;
                }
                v
            };
            let outside: u128 = (0..=self.n)
                .filter(|&k| !self.contains_layer(k))
                .map(c)
                .sum();
            outside as f64 / 2f64.powi(self.n as i32)
        } else {
            let ln2n = self.n as f64 * std::f64::consts::LN_2;
            (0..=self.n)
                .filter(|&k| !self.contains_layer(k))
                .map(|k| (ln_binomial(self.n as u64, k as u64) - ln2n).exp())
                .sum()
        }
    }
}

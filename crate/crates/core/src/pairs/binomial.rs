use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::error::Result;
use crate::func::MidLayerSpec;

/// Exhaustive scan of the two binomial ratios that bound how far `D`
/// and `D'` can drift apart inside the band.
#[derive(Clone, Debug, Serialize)]
pub struct BinomialRatioReport {
    pub n: usize,
    pub eps: f64,
    pub d: usize,
    pub lo: usize,
    pub hi: usize,
    /// `max_{a>b} ln C(a, a-b) / C(n-b, a-b)` over band layers.
    pub first_log_max: f64,
    pub first_argmax: (usize, usize),
    /// `max_a ln C(n, ⌊n/2⌋) / C(n, a)`.
    pub second_log_max: f64,
    pub second_argmax: usize,
    /// `Σ_{i=0}^{d/2-1} (d/2)/((n/2) - i)`, infinite once a term's
    /// denominator reaches zero.
    pub log_bound: f64,
    pub first_within_bound: bool,
    pub second_within_bound: bool,
}

fn ln_c(n: usize, k: usize) -> f64 {
    ln_binomial(n as u64, k as u64)
}

pub fn binomial_ratio_check(n: usize, eps: f64) -> Result<BinomialRatioReport> {
    let spec = MidLayerSpec::new(n, eps)?;
    let (lo, hi) = (*spec.layers().start(), *spec.layers().end());
    let mut first = (f64::NEG_INFINITY, (hi, lo));
    for a in lo..=hi {
        for b in lo..a {
            let r = ln_c(a, a - b) - ln_c(n - b, a - b);
            // Ties keep the larger a, then the larger b, making the scan order-independent.
            if r > first.0 + 1e-12 || ((r - first.0).abs() <= 1e-12 && (a, b) > first.1) {
                first = (r, (a, b));
            }
        }
    }
    if lo == hi {
        first = (0.0, (hi, lo));
    }
    let mut second = (f64::NEG_INFINITY, lo);
    for a in lo..=hi {
        let r = ln_c(n, n / 2) - ln_c(n, a);
        if r > second.0 + 1e-12 {
            second = (r, a);
        }
    }
    let half_d = spec.d() / 2;
    let half_n = n as f64 / 2.0;
    let log_bound = (0..half_d)
        .map(|i| {
            let denom = half_n - i as f64;
            if denom <= 0.0 {
                f64::INFINITY
            } else {
                half_d as f64 / denom
            }
        })
        .sum::<f64>();
    let slack = 1e-9;
    Ok(BinomialRatioReport {
        n,
        eps,
        d: spec.d(),
        lo,
        hi,
        first_log_max: first.0,
        first_argmax: first.1,
        second_log_max: second.0,
        second_argmax: second.1,
        log_bound,
        first_within_bound: first.0 <= log_bound + slack,
        second_within_bound: second.0 <= log_bound + slack,
    })
}

//! Exact single-trial rejection probabilities, by enumerating each tester's
//! discrete distribution over a truth table.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;

use crate::error::{LabError, Result};
use crate::func::{BitTableFunction, MidLayerSpec, SubmasksOfSize};
use crate::pairs::BucketSpec;

/// Largest dimension for the enumerations below (they cost about `3^n`).
pub const EXACT_TESTER_MAX_N: usize = 16;

fn check(f: &BitTableFunction, spec: &MidLayerSpec) -> Result<()> {
    if f.n() != spec.n() {
        return Err(LabError::DimensionMismatch {
            expected: spec.n(),
            actual: f.n(),
        });
    }
    if f.n() > EXACT_TESTER_MAX_N {
        return Err(LabError::BudgetExceeded(format!(
            "exact tester enumeration needs n <= {EXACT_TESTER_MAX_N}"
        )));
    }
    Ok(())
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

/// `violated edges / (n 2^{n-1})`.
pub fn exact_edge_rejection(f: &BitTableFunction) -> Rational64 {
    let n = f.n() as i64;
    Rational64::new(f.violated_edge_count() as i64, n << (n - 1))
}

/// For each upper point, the number of `1`-points at each distance below it.
fn ones_below(f: &BitTableFunction, y: u64, w: usize) -> Vec<u64> {
    let mut counts = vec![0u64; w + 1];
    for k in 1..=w {
        counts[k] = SubmasksOfSize::new(y, w - k)
            .filter(|&x| f.value(x))
            .count() as u64;
    }
    counts
}

/// Exact rejection probability of one weighted path trial.
pub fn exact_weighted_rejection(f: &BitTableFunction, spec: &MidLayerSpec) -> Result<BigRational> {
    check(f, spec)?;
    let buckets = BucketSpec::new(f.n());
    let mut total = BigRational::zero();
    for y in (0..f.size()).filter(|&y| spec.contains(y) && !f.value(y)) {
        let w = y.count_ones() as usize;
        let below = ones_below(f, y, w);
        for ell in 0..buckets.count() {
            let range = buckets.shifted(ell);
            let width = big((range.end() - range.start() + 1) as u64);
            for k in range.filter(|&k| k <= w) {
                if below[k] > 0 {
                    let ways = num_integer::binomial(w as u64, k as u64);
                    total += BigRational::new(big(below[k]), big(ways) * &width);
                }
            }
        }
    }
    let points = spec.point_count().expect("n is small");
    Ok(total / BigRational::from_integer(big(points) * big(buckets.count() as u64)))
}

/// Exact rejection probability of one baseline trial: two independent
/// uniform band layers, a uniform point on the higher one and a uniform
/// subset of it on the lower one.
pub fn exact_baseline_rejection(f: &BitTableFunction, spec: &MidLayerSpec) -> Result<BigRational> {
    check(f, spec)?;
    let n = f.n();
    let mut sum = BigRational::zero();
    for top in (0..f.size()).filter(|&y| spec.contains(y) && !f.value(y)) {
        let a = top.count_ones() as usize;
        let below = ones_below(f, top, a);
        for b in spec.layers().filter(|&b| b < a) {
            let k = a - b;
            if below[k] > 0 {
                let ways = num_integer::binomial(n as u64, a as u64)
                    * num_integer::binomial(a as u64, b as u64);
                sum += BigRational::new(big(below[k]), big(ways));
            }
        }
    }
    // Either order of the two layer draws gives the same oriented pair.
    let l = big(spec.layer_count() as u64);
    Ok(sum * BigRational::new(big(2), &l * &l))
}

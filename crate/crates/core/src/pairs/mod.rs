//! Distributions over comparable pairs built from random monotone paths, and
//! the density/score bookkeeping used to analyse the path testers.
//!
//! Paths are never materialised. A uniform path from `0^n` to `1^n` meets
//! layer `i` at a uniform point of that layer, and given that point the lower
//! part of the path passes through a uniform subset of it, so both samplers
//! only draw a layer pair and one random subset or superset.

mod binomial;
mod score;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::func::{full_mask, random_layer_point, random_submask, MidLayerSpec};

pub use binomial::{binomial_ratio_check, BinomialRatioReport};
pub use score::{
    dens_down, dens_up, edge_inequality_holds, score, BucketSpec, Density, PointSet, ScoreProfile,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relationship {
    Equal,
    XBelowY,
    YBelowX,
}

/// Two comparable points of `{0,1}^n`, in the order the sampler drew them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ComparablePair {
    pub x: u64,
    pub y: u64,
}

impl ComparablePair {
    pub fn relationship(&self) -> Relationship {
        if self.x == self.y {
            Relationship::Equal
        } else if self.x & self.y == self.x {
            Relationship::XBelowY
        } else {
            debug_assert_eq!(self.x & self.y, self.y);
            Relationship::YBelowX
        }
    }

    /// `(lower, upper)` by mask containment.
    pub fn oriented(&self) -> (u64, u64) {
        match self.relationship() {
            Relationship::YBelowX => (self.y, self.x),
            _ => (self.x, self.y),
        }
    }
}

/// Moves from `x` to a uniform point of layer `j` on a uniform path through `x`.
fn along_path<R: Rng + ?Sized>(n: usize, x: u64, j: usize, rng: &mut R) -> u64 {
    let w = x.count_ones() as usize;
    if j <= w {
        random_submask(x, j, rng)
    } else {
        x | random_submask(full_mask(n) & !x, j - w, rng)
    }
}

/// A draw from `D`: a uniform path and two independent uniform positions on
/// its middle-layer portion.
pub fn sample_d<R: Rng + ?Sized>(spec: &MidLayerSpec, rng: &mut R) -> ComparablePair {
    let a = spec.sample_layer(rng);
    let b = spec.sample_layer(rng);
    let top = random_layer_point(spec.n(), a.max(b), rng);
    let bottom = random_submask(top, a.min(b), rng);
    if a >= b {
        ComparablePair { x: top, y: bottom }
    } else {
        ComparablePair { x: bottom, y: top }
    }
}

/// A draw from `D'`: `x` uniform over the middle layers, then a uniform
/// middle-layer position on a uniform path through `x`.
pub fn sample_d_prime<R: Rng + ?Sized>(spec: &MidLayerSpec, rng: &mut R) -> ComparablePair {
    let x = spec.sample_point(rng);
    sample_d_prime_given(spec, x, rng)
}

/// A draw from `D'` conditioned on its first point being `x`.
pub fn sample_d_prime_given<R: Rng + ?Sized>(
    spec: &MidLayerSpec,
    x: u64,
    rng: &mut R,
) -> ComparablePair {
    let j = spec.sample_layer(rng);
    ComparablePair {
        x,
        y: along_path(spec.n(), x, j, rng),
    }
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// `Pr[y = z | x]` under `D` (equivalently `D'`): `1 / (L · C(|x|, |x|-|z|))`
/// below `x`, `1 / (L · C(n-|x|, |z|-|x|))` above, zero elsewhere.
pub fn conditional_probability(spec: &MidLayerSpec, x: u64, z: u64) -> BigRational {
    let (wx, wz) = (x.count_ones() as usize, z.count_ones() as usize);
    if !spec.contains_layer(wz) {
        return BigRational::zero();
    }
    let ways = if z & x == z {
        binomial_big(wx, wx - wz)
    } else if z & x == x {
        binomial_big(spec.n() - wx, wz - wx)
    } else {
        return BigRational::zero();
    };
    BigRational::new(BigInt::one(), ways * BigInt::from(spec.layer_count()))
}

/// The full conditional law of `y` given `x`, as `(point, probability)` over
/// every point comparable to `x`. Needs `2^n` work.
pub fn conditional_law(spec: &MidLayerSpec, x: u64) -> Vec<(u64, BigRational)> {
    (0..1u64 << spec.n())
        .filter(|&z| z & x == z || z & x == x)
        .map(|z| (z, conditional_probability(spec, x, z)))
        .filter(|(_, p)| !p.is_zero())
        .collect()
}

/// `Pr[x = z]` under `D'` (point-uniform over the band).
pub fn d_prime_marginal(spec: &MidLayerSpec, z: u64) -> BigRational {
    match spec.point_count() {
        Some(total) if spec.contains(z) => BigRational::new(BigInt::one(), BigInt::from(total)),
        _ => BigRational::zero(),
    }
}

/// `Pr[x = z]` under `D` (layer-uniform, then uniform within the layer).
pub fn d_marginal(spec: &MidLayerSpec, z: u64) -> BigRational {
    let w = z.count_ones() as usize;
    if !spec.contains_layer(w) {
        return BigRational::zero();
    }
    BigRational::new(
        BigInt::one(),
        binomial_big(spec.n(), w) * BigInt::from(spec.layer_count()),
    )
}

/// Exact `Pr_{D'}[y ∈ A | x]` by summing the closed-form law over `A`.
pub fn d_prime_hit_probability(spec: &MidLayerSpec, x: u64, a: &PointSet) -> BigRational {
    a.members()
        .iter()
        .map(|&z| conditional_probability(spec, x, z))
        .sum()
}

use std::cmp::Ordering;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::func::MidLayerSpec;

/// A sorted, duplicate-free set of points of `{0,1}^n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointSet {
    n: usize,
    members: Vec<u64>,
}

impl PointSet {
    pub fn new(n: usize, points: impl IntoIterator<Item = u64>) -> Self {
        let mut members: Vec<u64> = points.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Self { n, members }
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            members: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn contains(&self, x: u64) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn within(&self, spec: &MidLayerSpec) -> bool {
        self.members.iter().all(|&x| spec.contains(x))
    }
}

/// `count / total`, kept as integers so comparisons are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Density {
    pub count: u64,
    pub total: u64,
}

impl Density {
    pub const ZERO: Density = Density { count: 0, total: 1 };

    pub fn to_f64(&self) -> f64 {
        self.count as f64 / self.total as f64
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(self.count), BigInt::from(self.total))
    }
}

impl PartialOrd for Density {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Density {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.count as u128 * other.total as u128).cmp(&(other.count as u128 * self.total as u128))
    }
}

impl Serialize for Density {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_ratio().to_string())
    }
}

fn ser_big<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_big_vec<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

/// Counts of `A`-points below and above `x` at each distance.
fn distance_counts(n: usize, x: u64, a: &PointSet) -> (Vec<u64>, Vec<u64>) {
    let w = x.count_ones();
    let mut down = vec![0u64; n + 1];
    let mut up = vec![0u64; n + 1];
    for &z in a.members() {
        if z & x == z {
            down[(w - z.count_ones()) as usize] += 1;
        }
        if z & x == x {
            up[(z.count_ones() - w) as usize] += 1;
        }
    }
    (down, up)
}

/// Fraction of the points `k` below `x` (distance `k`, `y ⪯ x`) lying in `A`.
pub fn dens_down(x: u64, a: &PointSet, k: usize) -> Density {
    let w = x.count_ones() as usize;
    if k > w {
        return Density::ZERO;
    }
    let count = a
        .members()
        .iter()
        .filter(|&&z| z & x == z && w - z.count_ones() as usize == k)
        .count();
    Density {
        count: count as u64,
        total: num_integer::binomial(w as u64, k as u64),
    }
}

/// Fraction of the points `k` above `x` lying in `A`.
pub fn dens_up(x: u64, a: &PointSet, k: usize) -> Density {
    let w = x.count_ones() as usize;
    if k > a.n() - w {
        return Density::ZERO;
    }
    let count = a
        .members()
        .iter()
        .filter(|&&z| z & x == x && z.count_ones() as usize - w == k)
        .count();
    Density {
        count: count as u64,
        total: num_integer::binomial((a.n() - w) as u64, k as u64),
    }
}

/// The bucket partition `B_0 = {0}`, `B_i = {2^{i-1}, ..., 2^i - 1}` for
/// `i = 1..=m`, `m = ⌈log2(n+1)⌉`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BucketSpec {
    pub n: usize,
    pub m: usize,
}

impl BucketSpec {
    pub fn new(n: usize) -> Self {
        // ⌈log2(n+1)⌉ is the bit length of n.
        let m = (usize::BITS - n.leading_zeros()) as usize;
        Self { n, m }
    }

    pub fn count(&self) -> usize {
        self.m + 1
    }

    pub fn bucket(&self, i: usize) -> RangeInclusive<usize> {
        assert!(i <= self.m, "bucket {i} out of range 0..={}", self.m);
        if i == 0 {
            0..=0
        } else {
            (1 << (i - 1))..=((1 << i) - 1)
        }
    }

    /// `B'_i = {j + 1 : j ∈ B_i}`.
    pub fn shifted(&self, i: usize) -> RangeInclusive<usize> {
        let b = self.bucket(i);
        (b.start() + 1)..=(b.end() + 1)
    }

    pub fn bucket_of(&self, k: usize) -> usize {
        (usize::BITS - k.leading_zeros()) as usize
    }
}

/// Densities of `A` around one point and their sums.
#[derive(Clone, Debug, Serialize)]
pub struct ScoreProfile {
    pub point: u64,
    pub dens_down: Vec<Density>,
    pub dens_up: Vec<Density>,
    /// `Σ_{k=0..n} dens↓_k`.
    #[serde(serialize_with = "ser_big")]
    pub score_down: BigRational,
    /// `Σ_{k=1..n} dens↑_k`.
    #[serde(serialize_with = "ser_big")]
    pub score_up: BigRational,
    /// `Σ_{k ∈ B_i} dens↓_k` for each bucket.
    #[serde(serialize_with = "ser_big_vec")]
    pub bucket_down: Vec<BigRational>,
}

/// Full density/score profile of `x` against `A ⊆ L_mid`.
pub fn score(x: u64, a: &PointSet, spec: &MidLayerSpec) -> Result<ScoreProfile> {
    if a.n() != spec.n() {
        return Err(LabError::DimensionMismatch {
            expected: spec.n(),
            actual: a.n(),
        });
    }
    if !a.within(spec) {
        return Err(LabError::NotInMiddleLayers);
    }
    let n = spec.n();
    let w = x.count_ones() as usize;
    let (down, up) = distance_counts(n, x, a);
    let dens_down: Vec<Density> = (0..=n)
        .map(|k| {
            if k > w {
                Density::ZERO
            } else {
                Density {
                    count: down[k],
                    total: num_integer::binomial(w as u64, k as u64),
                }
            }
        })
        .collect();
    let dens_up: Vec<Density> = (0..=n)
        .map(|k| {
            if k > n - w {
                Density::ZERO
            } else {
                Density {
                    count: up[k],
                    total: num_integer::binomial((n - w) as u64, k as u64),
                }
            }
        })
        .collect();
    let buckets = BucketSpec::new(n);
    let mut bucket_down = vec![BigRational::zero(); buckets.count()];
    for (k, d) in dens_down.iter().enumerate() {
        if d.count > 0 {
            bucket_down[buckets.bucket_of(k)] += d.to_ratio();
        }
    }
    let score_down = bucket_down.iter().sum();
    let score_up = dens_up
        .iter()
        .skip(1)
        .filter(|d| d.count > 0)
        .map(Density::to_ratio)
        .sum();
    Ok(ScoreProfile {
        point: x,
        dens_down,
        dens_up,
        score_down,
        score_up,
        bucket_down,
    })
}

/// `dens↓_{k+1}(x + e_i, A) >= (k+1)/(|x|+1) · dens↓_k(x, A)` for every `k`,
/// on the edge from `x` up through coordinate `i`.
pub fn edge_inequality_holds(x: u64, i: usize, a: &PointSet) -> Result<bool> {
    let n = a.n();
    if i >= n || x >> i & 1 == 1 || x >> n != 0 {
        return Err(LabError::InvalidArgument(format!(
            "no upward edge from {x:#x} in direction {i}"
        )));
    }
    let y = x | 1 << i;
    let wx = x.count_ones() as u64;
    let (below_x, _) = distance_counts(n, x, a);
    let (below_y, _) = distance_counts(n, y, a);
    // Cross-multiplied: below_y[k+1] / C(wx+1, k+1) >= (k+1)/(wx+1) · below_x[k] / C(wx, k).
    Ok((0..=wx as usize).all(|k| {
        let cy = BigInt::from(num_integer::binomial(wx + 1, k as u64 + 1));
        let cx = BigInt::from(num_integer::binomial(wx, k as u64));
        BigInt::from(below_y[k + 1]) * &cx * BigInt::from(wx + 1)
            >= BigInt::from(k + 1) * BigInt::from(below_x[k]) * &cy
    }))
}

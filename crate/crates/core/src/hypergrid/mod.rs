//! Functions on the hypergrid `[m]^n` and the reductions that lift cube
//! functions onto it.
//!
//! Coordinates are 1-based, as in `[m] = {1, ..., m}`. Values are `bool`
//! with `true` for `+1`, matching the cube tables.

mod lift;

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::matching::BipartiteGraph;

pub use lift::{
    even_block, even_block_pairing, odd_arity, odd_block, odd_block_pairing, phi_even, phi_odd,
    CountingOracle, EvenLift, GadgetReport, OddGadget, OddLift,
};

/// Largest grid handled by the exact oracles.
pub const HYPERGRID_MAX_POINTS: usize = 10_000;

/// Query access to `g : [m]^n -> {0,1}`.
pub trait HypergridFunction {
    fn side(&self) -> usize;
    fn dim(&self) -> usize;
    /// `x` has `dim()` entries in `1..=side()`.
    fn eval(&self, x: &[usize]) -> bool;
}

impl<T: HypergridFunction + ?Sized> HypergridFunction for &T {
    fn side(&self) -> usize {
        (**self).side()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[usize]) -> bool {
        (**self).eval(x)
    }
}

/// `x ⪯ y` coordinate-wise.
pub fn grid_preceq(x: &[usize], y: &[usize]) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(a, b)| a <= b)
}

/// All points of `[m]^n` in index order (coordinate 0 varies fastest).
pub fn grid_points(m: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = m.checked_pow(n as u32).unwrap_or(usize::MAX);
    (0..total).map(move |i| decode(i, m, n))
}

fn decode(mut index: usize, m: usize, n: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let c = index % m + 1;
            index /= m;
            c
        })
        .collect()
}

fn encode(x: &[usize], m: usize) -> usize {
    x.iter().rev().fold(0, |acc, &c| acc * m + (c - 1))
}

fn grid_size(m: usize, n: usize) -> Result<usize> {
    match m.checked_pow(n as u32) {
        Some(s) if s <= HYPERGRID_MAX_POINTS => Ok(s),
        _ => Err(LabError::BudgetExceeded(format!(
            "[{m}]^{n} has more than {HYPERGRID_MAX_POINTS} points"
        ))),
    }
}

/// Full table of a hypergrid function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridTable {
    m: usize,
    n: usize,
    values: Vec<bool>,
}

impl GridTable {
    pub fn from_fn(m: usize, n: usize, f: impl Fn(&[usize]) -> bool) -> Result<Self> {
        if m < 2 || n == 0 {
            return Err(LabError::InvalidArgument(format!(
                "grid [{m}]^{n} needs m >= 2 and n >= 1"
            )));
        }
        let size = grid_size(m, n)?;
        Ok(Self {
            m,
            n,
            values: (0..size).map(|i| f(&decode(i, m, n))).collect(),
        })
    }

    pub fn from_function<G: HypergridFunction + ?Sized>(g: &G) -> Result<Self> {
        Self::from_fn(g.side(), g.dim(), |x| g.eval(x))
    }

    pub fn from_values(m: usize, n: usize, values: Vec<bool>) -> Result<Self> {
        let size = grid_size(m, n)?;
        if values.len() != size {
            return Err(LabError::DimensionMismatch {
                expected: size,
                actual: values.len(),
            });
        }
        Ok(Self { m, n, values })
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn value_at(&self, index: usize) -> bool {
        self.values[index]
    }

    /// Checks every covering pair `x`, `x + e_i`.
    pub fn is_monotone(&self) -> bool {
        let mut stride = 1;
        for _ in 0..self.n {
            for idx in 0..self.size() {
                // Coordinate value at this stride is `(idx / stride) % m`.
                if (idx / stride) % self.m + 1 < self.m
                    && self.values[idx]
                    && !self.values[idx + stride]
                {
                    return false;
                }
            }
            stride *= self.m;
        }
        true
    }

    /// Violated comparable pairs `(lower, upper)` as point indices.
    pub fn violated_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for lo in (0..self.size()).filter(|&i| self.values[i]) {
            let a = decode(lo, self.m, self.n);
            let mut b = a.clone();
            // Odometer over the up-set of `a`.
            loop {
                let mut i = 0;
                while i < self.n && b[i] == self.m {
                    b[i] = a[i];
                    i += 1;
                }
                if i == self.n {
                    break;
                }
                b[i] += 1;
                let hi = encode(&b, self.m);
                if !self.values[hi] {
                    pairs.push((lo, hi));
                }
            }
        }
        pairs
    }

    pub fn hamming(&self, other: &Self) -> Result<usize> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(LabError::DimensionMismatch {
                expected: self.size(),
                actual: other.size(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| a != b)
            .count())
    }
}

impl HypergridFunction for GridTable {
    fn side(&self) -> usize {
        self.m
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, x: &[usize]) -> bool {
        self.values[encode(x, self.m)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridDistance {
    pub points: usize,
    pub violated_pairs: usize,
    pub matching_size: usize,
    #[serde(serialize_with = "crate::stats::ser_ratio")]
    pub distance: Rational64,
}

/// Maximum matching of violated comparable pairs, over `m^n`.
pub fn hypergrid_distance<G: HypergridFunction + ?Sized>(g: &G) -> Result<GridDistance> {
    let table = GridTable::from_function(g)?;
    grid_table_distance(&table)
}

pub fn grid_table_distance(table: &GridTable) -> Result<GridDistance> {
    let pairs = table.violated_pairs();
    if pairs.len() as u64 > crate::oracle::PAIR_EDGE_BUDGET {
        return Err(LabError::BudgetExceeded(format!(
            "{} violated pairs",
            pairs.len()
        )));
    }
    // Left side: points with value 1; right side: points with value 0.
    let mut left_id = vec![u32::MAX; table.size()];
    let mut right_id = vec![u32::MAX; table.size()];
    let (mut left, mut right) = (0u32, 0u32);
    for (i, &v) in table.values.iter().enumerate() {
        if v {
            left_id[i] = left;
            left += 1;
        } else {
            right_id[i] = right;
            right += 1;
        }
    }
    let edges: Vec<(u32, u32)> = pairs
        .iter()
        .map(|&(lo, hi)| (left_id[lo], right_id[hi]))
        .collect();
    let matching =
        BipartiteGraph::from_edges(left as usize, right as usize, &edges).maximum_matching();
    Ok(GridDistance {
        points: table.size(),
        violated_pairs: pairs.len(),
        matching_size: matching.size,
        distance: Rational64::new(matching.size as i64, table.size() as i64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Minimum Hamming distance to a monotone table, over all `2^{m^n}` tables.
    pub(super) fn brute_grid_distance(g: &GridTable) -> Rational64 {
        let size = g.size();
        assert!(size <= 16);
        let best = (0..1u32 << size)
            .filter_map(|bits| {
                let h = GridTable::from_values(
                    g.m,
                    g.n,
                    (0..size).map(|i| bits >> i & 1 == 1).collect(),
                )
                .unwrap();
                h.is_monotone().then(|| g.hamming(&h).unwrap())
            })
            .min()
            .unwrap();
        Rational64::new(best as i64, size as i64)
    }

    #[test]
    fn indexing_round_trips() {
        for (i, x) in grid_points(3, 3).enumerate() {
            assert_eq!(encode(&x, 3), i);
            assert!(x.iter().all(|&c| (1..=3).contains(&c)));
        }
        assert_eq!(grid_points(4, 2).count(), 16);
    }

    #[test]
    fn monotone_has_zero_distance() {
        let g = GridTable::from_fn(4, 2, |x| x[0] + x[1] >= 5).unwrap();
        assert!(g.is_monotone());
        assert!(g.violated_pairs().is_empty());
        assert_eq!(
            grid_table_distance(&g).unwrap().distance,
            Rational64::from_integer(0)
        );
    }

    #[test]
    fn anti_dictator_on_3_by_3() {
        // -sign(x1 - 2) with sign(0) = +1 reads as: value 1 iff x1 <= 2.
        let g = GridTable::from_fn(3, 2, |x| x[0] <= 2).unwrap();
        let d = grid_table_distance(&g).unwrap();
        assert_eq!(d.distance, brute_grid_distance(&g));
        assert_eq!(d.distance, Rational64::new(3, 9));
    }

    #[test]
    fn matching_equals_brute_force_on_small_grids() {
        for (m, n) in [(2usize, 2usize), (3, 2), (4, 2), (2, 3), (2, 4)] {
            let size = m.pow(n as u32);
            for seed in 0..40u64 {
                let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
                let values: Vec<bool> = (0..size)
                    .map(|_| {
                        state ^= state << 13;
                        state ^= state >> 7;
                        state ^= state << 17;
                        state & 1 == 1
                    })
                    .collect();
                let g = GridTable::from_values(m, n, values).unwrap();
                assert_eq!(
                    grid_table_distance(&g).unwrap().distance,
                    brute_grid_distance(&g),
                    "m={m} n={n}"
                );
                assert_eq!(g.is_monotone(), g.violated_pairs().is_empty());
            }
        }
    }

    #[test]
    fn budget() {
        assert!(GridTable::from_fn(10, 5, |_| true).is_err());
        assert!(GridTable::from_fn(10, 4, |_| true).is_ok());
    }
}

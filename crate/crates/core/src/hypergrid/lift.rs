//! The lifts `Φ[f]` of cube functions onto the hypergrid.
//!
//! For even `m`, coordinate `x_i` is rounded to the bit `[x_i > m/2]`. For odd
//! `m` the cube coordinate is replaced by a block of `k = ⌈log₂ n⌉` grid
//! coordinates read through a monotone gadget `h : [m]^k -> {0,1}` that is
//! balanced up to its centre point.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use super::{grid_points, grid_preceq, HypergridFunction};
use crate::error::{LabError, Result};
use crate::func::CubeOracle;

/// Wraps an oracle and counts its queries.
#[derive(Debug)]
pub struct CountingOracle<O> {
    inner: O,
    queries: AtomicU64,
}

impl<O: CubeOracle> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            queries: AtomicU64::new(0),
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }
}

impl<O: CubeOracle> CubeOracle for CountingOracle<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn query(&self, x: u64) -> bool {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.inner.query(x)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > crate::func::POINT_MAX_N {
        return Err(LabError::UnsupportedDimension {
            n,
            min: 1,
            max: crate::func::POINT_MAX_N,
        });
    }
    Ok(())
}

/// `Φ[f](x) = f([x_1 > m/2], ..., [x_n > m/2])` for even `m`.
#[derive(Debug)]
pub struct EvenLift<O> {
    f: O,
    m: usize,
}

pub fn phi_even<O: CubeOracle>(f: O, m: usize) -> Result<EvenLift<O>> {
    if m % 2 != 0 || m == 0 {
        return Err(LabError::WrongParity {
            m,
            expected: "even",
        });
    }
    check_dim(f.dim())?;
    Ok(EvenLift { f, m })
}

impl<O: CubeOracle> EvenLift<O> {
    pub fn cube_point(&self, x: &[usize]) -> u64 {
        x.iter()
            .enumerate()
            .fold(0, |acc, (i, &c)| acc | ((c > self.m / 2) as u64) << i)
    }

    pub fn inner(&self) -> &O {
        &self.f
    }
}

impl<O: CubeOracle> HypergridFunction for EvenLift<O> {
    fn side(&self) -> usize {
        self.m
    }
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn eval(&self, x: &[usize]) -> bool {
        self.f.query(self.cube_point(x))
    }
}

/// `S(x)`: the grid points that round to cube point `x`.
pub fn even_block(x: u64, n: usize, m: usize) -> Vec<Vec<usize>> {
    let half = m / 2;
    grid_points(half, n)
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(i, &c)| if x >> i & 1 == 1 { c + half } else { c })
                .collect()
        })
        .collect()
}

/// Pairs `a ∈ S(x)` with the `b ∈ S(y)` agreeing with it modulo `m/2`.
pub fn even_block_pairing(x: u64, y: u64, n: usize, m: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let half = m / 2;
    even_block(x, n, m)
        .into_iter()
        .map(|a| {
            let b = (0..n)
                .map(|i| {
                    let base = (a[i] - 1) % half + 1;
                    if y >> i & 1 == 1 {
                        base + half
                    } else {
                        base
                    }
                })
                .collect();
            (a, b)
        })
        .collect()
}

/// The gadget `h` on `[m]^k` for odd `m`, with its matching `ψ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OddGadget {
    m: usize,
    k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GadgetReport {
    pub m: usize,
    pub k: usize,
    pub ones: usize,
    pub zeros: usize,
    pub monotone: bool,
    pub psi_dominates: bool,
    pub psi_bijective: bool,
}

impl GadgetReport {
    pub fn holds(&self) -> bool {
        self.ones == self.zeros + 1 && self.monotone && self.psi_dominates && self.psi_bijective
    }
}

impl OddGadget {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        if m % 2 == 0 {
            return Err(LabError::WrongParity { m, expected: "odd" });
        }
        if m < 3 || k == 0 {
            return Err(LabError::InvalidArgument(format!(
                "gadget needs m >= 3 and k >= 1, got m = {m}, k = {k}"
            )));
        }
        Ok(Self { m, k })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn center(&self) -> usize {
        self.m.div_ceil(2)
    }

    fn first_off_center(&self, x: &[usize]) -> Option<usize> {
        x.iter().position(|&c| c != self.center())
    }

    /// `1` at the centre point, else the side of the centre the first
    /// off-centre coordinate lies on.
    pub fn h(&self, x: &[usize]) -> bool {
        match self.first_off_center(x) {
            None => true,
            Some(i) => x[i] > self.center(),
        }
    }

    /// Reflects the first off-centre coordinate, `x_i -> m + 1 - x_i`.
    /// Defined on `h⁻¹(0)`.
    pub fn psi(&self, x: &[usize]) -> Option<Vec<usize>> {
        if self.h(x) {
            return None;
        }
        let i = self.first_off_center(x)?;
        let mut y = x.to_vec();
        y[i] = self.m + 1 - x[i];
        Some(y)
    }

    pub fn check(&self) -> GadgetReport {
        let points: Vec<Vec<usize>> = grid_points(self.m, self.k).collect();
        let ones = points.iter().filter(|x| self.h(x)).count();
        let zeros = points.len() - ones;
        let monotone = points.iter().all(|x| {
            (0..self.k).all(|i| {
                if x[i] == self.m {
                    return true;
                }
                let mut y = x.clone();
                y[i] += 1;
                !self.h(x) || self.h(&y)
            })
        });
        let images: Vec<Vec<usize>> = points.iter().filter_map(|x| self.psi(x)).collect();
        let psi_dominates = points
            .iter()
            .filter_map(|x| self.psi(x).map(|y| (x, y)))
            .all(|(x, y)| grid_preceq(x, &y) && *x != y && self.h(&y));
        let centre = vec![self.center(); self.k];
        let mut sorted = images.clone();
        sorted.sort();
        sorted.dedup();
        let psi_bijective =
            sorted.len() == images.len() && images.len() == ones - 1 && !sorted.contains(&centre);
        GadgetReport {
            m: self.m,
            k: self.k,
            ones,
            zeros,
            monotone,
            psi_dominates,
            psi_bijective,
        }
    }
}

/// `max(1, ⌈log₂ n⌉)`.
pub fn odd_arity(n: usize) -> usize {
    (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1) as usize
}

/// `Φ[f](x¹, ..., xⁿ) = f(h(x¹), ..., h(xⁿ))` on `[m]^{kn}` for odd `m`.
#[derive(Debug)]
pub struct OddLift<O> {
    f: O,
    gadget: OddGadget,
}

pub fn phi_odd<O: CubeOracle>(f: O, m: usize) -> Result<OddLift<O>> {
    if m % 2 == 0 {
        return Err(LabError::WrongParity { m, expected: "odd" });
    }
    check_dim(f.dim())?;
    let gadget = OddGadget::new(m, odd_arity(f.dim()))?;
    Ok(OddLift { f, gadget })
}

impl<O: CubeOracle> OddLift<O> {
    pub fn gadget(&self) -> &OddGadget {
        &self.gadget
    }

    pub fn cube_point(&self, x: &[usize]) -> u64 {
        x.chunks(self.gadget.k)
            .enumerate()
            .fold(0, |acc, (i, block)| {
                acc | (self.gadget.h(block) as u64) << i
            })
    }
}

impl<O: CubeOracle> HypergridFunction for OddLift<O> {
    fn side(&self) -> usize {
        self.gadget.m
    }
    fn dim(&self) -> usize {
        self.gadget.k * self.f.dim()
    }
    fn eval(&self, x: &[usize]) -> bool {
        self.f.query(self.cube_point(x))
    }
}

/// `S(x)` for the odd lift: every block lies in `h⁻¹(x_j)` off the centre.
pub fn odd_block(x: u64, n: usize, gadget: &OddGadget) -> Vec<Vec<usize>> {
    let centre = vec![gadget.center(); gadget.k];
    let sides: [Vec<Vec<usize>>; 2] = [false, true].map(|v| {
        grid_points(gadget.m, gadget.k)
            .filter(|p| gadget.h(p) == v && *p != centre)
            .collect()
    });
    let mut out = vec![Vec::new()];
    for j in 0..n {
        let options = &sides[(x >> j & 1) as usize];
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                options.iter().map(move |p| {
                    let mut q = prefix.clone();
                    q.extend_from_slice(p);
                    q
                })
            })
            .collect();
    }
    out
}

/// Pairs `a ∈ S(x)` with `b ∈ S(y)` by applying `ψ` to the blocks where `x`
/// has `0` and `y` has `1`. Requires `x ⪯ y`.
pub fn odd_block_pairing(
    x: u64,
    y: u64,
    n: usize,
    gadget: &OddGadget,
) -> Vec<(Vec<usize>, Vec<usize>)> {
    let k = gadget.k;
    odd_block(x, n, gadget)
        .into_iter()
        .map(|a| {
            let mut b = a.clone();
            for j in (0..n).filter(|&j| x >> j & 1 == 0 && y >> j & 1 == 1) {
                let image = gadget
                    .psi(&a[j * k..(j + 1) * k])
                    .expect("block lies in h⁻¹(0)");
                b[j * k..(j + 1) * k].copy_from_slice(&image);
            }
            (a, b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::BitTableFunction;
    use crate::hypergrid::{grid_table_distance, GridTable};
    use num_rational::Rational64;

    #[test]
    fn even_lift_examples() {
        let or = BitTableFunction::or(2).unwrap();
        let g = GridTable::from_function(&phi_even(&or, 4).unwrap()).unwrap();
        assert_eq!(g.size(), 16);
        assert!(g.is_monotone());
        let parity = BitTableFunction::parity(2).unwrap();
        let lift = phi_even(&parity, 4).unwrap();
        let d = grid_table_distance(&GridTable::from_function(&lift).unwrap())
            .unwrap()
            .distance;
        assert!(d >= Rational64::new(1, 4));
        assert_eq!(
            d,
            super::super::tests::brute_grid_distance(&GridTable::from_function(&lift).unwrap())
        );
        for x in 0..4u64 {
            let block = even_block(x, 2, 4);
            assert_eq!(block.len(), 4);
            assert!(block.iter().all(|a| lift.eval(a) == parity.query(x)));
        }
        assert!(phi_even(&parity, 3).is_err());
    }

    #[test]
    fn even_pairing_is_comparable() {
        for x in 0..4u64 {
            for y in (0..4u64).filter(|&y| y & x == x && y != x) {
                for (a, b) in even_block_pairing(x, y, 2, 4) {
                    assert!(grid_preceq(&a, &b) && a != b);
                    assert!(even_block(y, 2, 4).contains(&b));
                }
            }
        }
    }

    #[test]
    fn gadget_examples() {
        let g = OddGadget::new(3, 1).unwrap();
        assert_eq!([1, 2, 3].map(|c| g.h(&[c])), [false, true, true]);
        assert_eq!(g.psi(&[1]), Some(vec![3]));
        assert_eq!(g.psi(&[2]), None);
        let r = OddGadget::new(3, 2).unwrap().check();
        assert_eq!((r.ones, r.zeros), (5, 4));
        assert!(OddGadget::new(4, 1).is_err());
    }

    #[test]
    fn gadget_invariants_exhaustive() {
        for m in [3, 5, 7] {
            for k in 1..=3 {
                let r = OddGadget::new(m, k).unwrap().check();
                assert!(r.holds(), "{r:?}");
                assert_eq!(r.zeros, (m.pow(k as u32) - 1) / 2);
            }
        }
    }

    #[test]
    fn arity() {
        assert_eq!([1, 2, 3, 4, 5, 8, 9].map(odd_arity), [1, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn odd_lift_examples() {
        let or = BitTableFunction::or(2).unwrap();
        assert!(GridTable::from_function(&phi_odd(&or, 3).unwrap())
            .unwrap()
            .is_monotone());
        let parity = BitTableFunction::parity(2).unwrap();
        let lift = phi_odd(&parity, 3).unwrap();
        let table = GridTable::from_function(&lift).unwrap();
        // Frozen from the matching oracle on the 9 grid points.
        assert_eq!(
            grid_table_distance(&table).unwrap().distance,
            Rational64::new(4, 9)
        );
        assert_eq!(
            grid_table_distance(&table).unwrap().distance,
            super::super::tests::brute_grid_distance(&table)
        );
        let gadget = *lift.gadget();
        for x in 0..4u64 {
            assert_eq!(odd_block(x, 2, &gadget).len(), 1);
        }
        let g5 = OddGadget::new(5, 2).unwrap();
        assert_eq!(odd_block(0b101, 3, &g5).len(), 12usize.pow(3));
    }

    #[test]
    fn odd_pairing_is_comparable() {
        let g = OddGadget::new(3, 2).unwrap();
        for x in 0..8u64 {
            for y in (0..8u64).filter(|&y| y & x == x && y != x) {
                let target = odd_block(y, 3, &g);
                let pairs = odd_block_pairing(x, y, 3, &g);
                let mut images: Vec<_> = pairs.iter().map(|(_, b)| b.clone()).collect();
                images.sort();
                images.dedup();
                assert_eq!(images.len(), pairs.len());
                for (a, b) in pairs {
                    assert!(grid_preceq(&a, &b) && a != b && target.contains(&b));
                }
            }
        }
    }

    #[test]
    fn one_query_per_eval() {
        let f = CountingOracle::new(BitTableFunction::parity(3).unwrap());
        let even = phi_even(&f, 4).unwrap();
        for x in grid_points(4, 3) {
            even.eval(&x);
        }
        assert_eq!(f.queries(), 64);
        f.reset();
        let odd = phi_odd(&f, 3).unwrap();
        for x in grid_points(3, 6) {
            odd.eval(&x);
        }
        assert_eq!(f.queries(), 729);
    }
}

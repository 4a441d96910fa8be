use rand::Rng;

use crate::error::{LabError, Result};

/// Largest dimension representable by a [`Point`] mask.
pub const POINT_MAX_N: usize = 63;

/// A vertex of `{0,1}^n`. Coordinate `i` is bit `i` of the mask, so the
/// lexicographic index of a point is the integer value of its mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    bits: u64,
    n: u8,
}

impl Point {
    pub fn new(bits: u64, n: usize) -> Result<Self> {
        if n == 0 || n > POINT_MAX_N {
            return Err(LabError::UnsupportedDimension {
                n,
                min: 1,
                max: POINT_MAX_N,
            });
        }
        if bits >> n != 0 {
            return Err(LabError::PointOutOfRange { bits, n });
        }
        Ok(Self { bits, n: n as u8 })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Hamming weight `||x||_1`, i.e. the layer the point lives in.
    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn coordinate(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn flip(&self, i: usize) -> Self {
        Self {
            bits: self.bits ^ (1 << i),
            n: self.n,
        }
    }

    /// `self ⪯ other` in the coordinate-wise order.
    pub fn preceq(&self, other: &Point) -> bool {
        self.bits & other.bits == self.bits
    }

    /// `self ≺ other`: coordinate-wise below and distinct.
    pub fn precedes(&self, other: &Point) -> bool {
        self.bits != other.bits && self.preceq(other)
    }

    pub fn comparable(&self, other: &Point) -> bool {
        self.preceq(other) || other.preceq(self)
    }

    pub fn distance(&self, other: &Point) -> usize {
        (self.bits ^ other.bits).count_ones() as usize
    }

    /// Image of the point in `{-1,1}^n` under `b ↦ 2b - 1`.
    pub fn to_pm(&self) -> Vec<i8> {
        (0..self.n()).map(|i| pm(self.coordinate(i))).collect()
    }

    pub fn from_pm(x: &[i8]) -> Result<Self> {
        let mut bits = 0u64;
        for (i, &v) in x.iter().enumerate() {
            match v {
                1 => bits |= 1 << i,
                -1 => {}
                _ => return Err(LabError::InvalidArgument(format!("entry {v} is not ±1"))),
            }
        }
        Self::new(bits, x.len())
    }
}

/// Bridge from `{0,1}` to `{-1,1}`.
#[inline]
pub fn pm(b: bool) -> i8 {
    if b {
        1
    } else {
        -1
    }
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Uniformly random `k`-element subset of the set bits of `mask`, returned as
/// a submask. Requires `k <= mask.count_ones()`.
pub fn random_submask<R: Rng + ?Sized>(mask: u64, k: usize, rng: &mut R) -> u64 {
    let w = mask.count_ones() as usize;
    debug_assert!(k <= w);
    if k == 0 {
        return 0;
    }
    if k == w {
        return mask;
    }
    let mut pos = [0u8; 64];
    let mut len = 0;
    let mut m = mask;
    while m != 0 {
        pos[len] = m.trailing_zeros() as u8;
        len += 1;
        m &= m - 1;
    }
    // Shuffle out whichever side is smaller.
    let pick = k.min(w - k);
    for i in 0..pick {
        let j = rng.random_range(i..len);
        pos.swap(i, j);
    }
    let chosen = pos[..pick].iter().fold(0u64, |acc, &p| acc | 1 << p);
    if pick == k {
        chosen
    } else {
        mask & !chosen
    }
}

/// Uniform point of layer `w` in `{0,1}^n`.
pub fn random_layer_point<R: Rng + ?Sized>(n: usize, w: usize, rng: &mut R) -> u64 {
    random_submask(full_mask(n), w, rng)
}

/// Deposits the low bits of `src` into the set-bit positions of `mask`.
#[inline]
fn deposit(mut src: u64, mut mask: u64) -> u64 {
    let mut out = 0;
    while mask != 0 && src != 0 {
        let low = mask & mask.wrapping_neg();
        if src & 1 == 1 {
            out |= low;
        }
        src >>= 1;
        mask ^= low;
    }
    out
}

/// Iterator over the submasks of `mask` with exactly `k` set bits, in
/// increasing order of the compressed index (Gosper's hack).
pub struct SubmasksOfSize {
    mask: u64,
    width: u32,
    current: Option<u64>,
}

impl SubmasksOfSize {
    pub fn new(mask: u64, k: usize) -> Self {
        let width = mask.count_ones();
        let current = if k as u32 > width {
            None
        } else if k == 0 {
            Some(0)
        } else {
            Some((1u64 << k) - 1)
        };
        Self {
            mask,
            width,
            current,
        }
    }
}

impl Iterator for SubmasksOfSize {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let c = self.current?;
        let out = deposit(c, self.mask);
        self.current = if c == 0 {
            None
        } else {
            let low = c & c.wrapping_neg();
            let ripple = c + low;
            let next = (((ripple ^ c) >> 2) / low) | ripple;
            if self.width < 64 && next >> self.width != 0 {
                None
            } else {
                Some(next)
            }
        };
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn order_relations() {
        let a = Point::new(0b0100, 4).unwrap();
        let b = Point::new(0b1100, 4).unwrap();
        assert!(a.precedes(&b));
        assert!(!b.precedes(&a));
        assert!(!a.precedes(&a));
        assert!(a.comparable(&a));
        assert!(!Point::new(0b0011, 4).unwrap().comparable(&b));
        assert_eq!(a.distance(&b), 1);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Point::new(0b10000, 4).is_err());
        assert!(Point::new(0, 0).is_err());
        assert!(Point::new(0, 64).is_err());
    }

    #[test]
    fn pm_bridge_round_trips() {
        let p = Point::new(0b1011, 4).unwrap();
        assert_eq!(p.to_pm(), vec![1, 1, -1, 1]);
        assert_eq!(Point::from_pm(&p.to_pm()).unwrap(), p);
    }

    #[test]
    fn submask_enumeration_counts() {
        let mask = 0b1011_0110u64;
        for k in 0..=6 {
            let subs: Vec<u64> = SubmasksOfSize::new(mask, k).collect();
            let expected = num_integer::binomial(5u64, k as u64) as usize;
            assert_eq!(subs.len(), if k <= 5 { expected } else { 0 });
            for s in &subs {
                assert_eq!(s & !mask, 0);
                assert_eq!(s.count_ones() as usize, k);
            }
            let mut dedup = subs.clone();
            dedup.sort_unstable();
            dedup.dedup();
            assert_eq!(dedup.len(), subs.len());
        }
    }

    #[test]
    fn random_submask_is_uniform_enough() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mask = 0b1100u64;
        let mut counts = [0u32; 16];
        for _ in 0..20_000 {
            let s = random_submask(mask, 1, &mut rng);
            counts[s as usize] += 1;
        }
        assert_eq!(counts[0b0100] + counts[0b1000], 20_000);
        assert!((counts[0b0100] as i32 - 10_000).abs() < 500);
    }
}

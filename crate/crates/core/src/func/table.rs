use rand::Rng;

use super::point::{full_mask, Point};
use crate::error::{LabError, Result};

/// Largest dimension for which full truth tables are materialised (32 MiB).
pub const EXACT_MAX_N: usize = 28;

/// Query access to a Boolean function on `{0,1}^n` with values in `{0,1}`.
///
/// Testers only see functions through this trait, so anything that can answer
/// point queries (a truth table, an LTF, a counting wrapper) can be tested.
pub trait CubeOracle {
    fn dim(&self) -> usize;
    fn query(&self, x: u64) -> bool;
}

impl<T: CubeOracle + ?Sized> CubeOracle for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn query(&self, x: u64) -> bool {
        (**self).query(x)
    }
}

/// Query access for dimensions beyond a single mask word: point `x` is
/// packed little-endian into `ceil(n/64)` words.
pub trait WideOracle {
    fn width(&self) -> usize;
    fn query_words(&self, x: &[u64]) -> bool;
}

impl<T: WideOracle + ?Sized> WideOracle for &T {
    fn width(&self) -> usize {
        (**self).width()
    }
    fn query_words(&self, x: &[u64]) -> bool {
        (**self).query_words(x)
    }
}

/// A function given by a closure, for dimensions too large to tabulate.
#[derive(Clone, Copy)]
pub struct FnOracle<F> {
    n: usize,
    f: F,
}

impl<F: Fn(u64) -> bool> FnOracle<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F: Fn(u64) -> bool> CubeOracle for FnOracle<F> {
    fn dim(&self) -> usize {
        self.n
    }
    fn query(&self, x: u64) -> bool {
        (self.f)(x)
    }
}

impl<F> std::fmt::Debug for FnOracle<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnOracle")
            .field("n", &self.n)
            .finish_non_exhaustive()
    }
}

/// Truth table of `f : {0,1}^n -> {0,1}` packed 64 points per word; point
/// `x` is bit `x % 64` of word `x / 64`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitTableFunction {
    n: usize,
    words: Vec<u64>,
}

/// Positions `x` within a word whose coordinate `i` (for `i < 6`) is zero.
const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

fn word_count(n: usize) -> usize {
    if n >= 6 {
        1 << (n - 6)
    } else {
        1
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > EXACT_MAX_N {
        return Err(LabError::UnsupportedDimension {
            n,
            min: 1,
            max: EXACT_MAX_N,
        });
    }
    Ok(())
}

impl BitTableFunction {
    pub fn from_fn(n: usize, f: impl Fn(u64) -> bool) -> Result<Self> {
        check_dim(n)?;
        let size = 1u64 << n;
        let mut words = vec![0u64; word_count(n)];
        for x in 0..size {
            if f(x) {
                words[(x >> 6) as usize] |= 1 << (x & 63);
            }
        }
        Ok(Self { n, words })
    }

    /// Builds a table from packed words. Bits beyond `2^n` must be zero.
    pub fn from_words(n: usize, words: Vec<u64>) -> Result<Self> {
        check_dim(n)?;
        if words.len() != word_count(n) {
            return Err(LabError::InvalidArgument(format!(
                "expected {} words for n = {n}, got {}",
                word_count(n),
                words.len()
            )));
        }
        if n < 6 && words[0] >> (1u32 << n) != 0 {
            return Err(LabError::InvalidArgument("bits set beyond 2^n".into()));
        }
        Ok(Self { n, words })
    }

    /// Uniformly random function.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_dim(n)?;
        let mut words: Vec<u64> = (0..word_count(n)).map(|_| rng.random()).collect();
        if n < 6 {
            words[0] &= full_mask(1 << n);
        }
        Ok(Self { n, words })
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Self::from_fn(n, |_| value)
    }

    /// `f(x) = x_i`.
    pub fn dictator(n: usize, i: usize) -> Result<Self> {
        Self::check_coordinate(n, i)?;
        Self::from_fn(n, |x| x >> i & 1 == 1)
    }

    /// `f(x) = 1 - x_i`, the canonical far-from-monotone function.
    pub fn anti_dictator(n: usize, i: usize) -> Result<Self> {
        Self::check_coordinate(n, i)?;
        Self::from_fn(n, |x| x >> i & 1 == 0)
    }

    pub fn and(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x == full_mask(n))
    }

    pub fn or(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x != 0)
    }

    pub fn parity(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x.count_ones() % 2 == 1)
    }

    /// Majority with ties broken towards 1 (matches `sign(0) = +1`).
    pub fn majority(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| 2 * x.count_ones() as usize >= n)
    }

    fn check_coordinate(n: usize, i: usize) -> Result<()> {
        if i >= n {
            return Err(LabError::InvalidArgument(format!(
                "coordinate {i} out of range for n = {n}"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points, `2^n`.
    pub fn size(&self) -> u64 {
        1u64 << self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn eval(&self, x: Point) -> Result<bool> {
        if x.n() != self.n {
            return Err(LabError::DimensionMismatch {
                expected: self.n,
                actual: x.n(),
            });
        }
        Ok(self.value(x.bits()))
    }

    /// Unchecked evaluation at mask `x < 2^n`.
    #[inline]
    pub fn value(&self, x: u64) -> bool {
        debug_assert!(x < self.size());
        self.words[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Number of points with `f(x) = 1` and `x_i = 1`.
    pub(crate) fn count_ones_with_coordinate(&self, i: usize) -> u64 {
        if i < 6 {
            let sel = !LOW_HALF[i];
            self.words
                .iter()
                .map(|w| (w & sel).count_ones() as u64)
                .sum()
        } else {
            let stride = 1usize << (i - 6);
            self.words
                .iter()
                .enumerate()
                .filter(|(idx, _)| idx & stride != 0)
                .map(|(_, w)| w.count_ones() as u64)
                .sum()
        }
    }

    /// Calls `visit(lower)` for every violated edge in direction `i`:
    /// `f(lower) = 1`, `f(lower | e_i) = 0`.
    pub fn for_each_violated_edge_in_direction(&self, i: usize, mut visit: impl FnMut(u64)) {
        let emit = |base: u64, mut bits: u64, visit: &mut dyn FnMut(u64)| {
            while bits != 0 {
                visit(base + bits.trailing_zeros() as u64);
                bits &= bits - 1;
            }
        };
        if i < 6 {
            let shift = 1u32 << i;
            let mask = if self.n < 6 {
                LOW_HALF[i] & full_mask(1 << self.n)
            } else {
                LOW_HALF[i]
            };
            for (idx, &w) in self.words.iter().enumerate() {
                let lower = w & mask;
                let upper = (w >> shift) & mask;
                emit((idx as u64) << 6, lower & !upper, &mut visit);
            }
        } else {
            let stride = 1usize << (i - 6);
            for idx in (0..self.words.len()).filter(|idx| idx & stride == 0) {
                let bad = self.words[idx] & !self.words[idx | stride];
                emit((idx as u64) << 6, bad, &mut visit);
            }
        }
    }

    pub fn violated_edge_count(&self) -> u64 {
        let mut count = 0u64;
        for i in 0..self.n {
            self.for_each_violated_edge_in_direction(i, |_| count += 1);
        }
        count
    }

    /// `f(x) <= f(y)` for every edge `x ≺ y`; by transitivity this covers all
    /// comparable pairs.
    pub fn is_monotone(&self) -> bool {
        (0..self.n).all(|i| {
            let mut clean = true;
            self.for_each_violated_edge_in_direction(i, |_| clean = false);
            clean
        })
    }

    /// Smallest monotone function above `f`: `g(y) = OR_{x ⪯ y} f(x)`.
    pub fn upward_closure(&self) -> Self {
        let mut words = self.words.clone();
        for i in 0..self.n {
            if i < 6 {
                let shift = 1u32 << i;
                for w in words.iter_mut() {
                    *w |= (*w & LOW_HALF[i]) << shift;
                }
            } else {
                let stride = 1usize << (i - 6);
                for idx in (0..words.len()).filter(|idx| idx & stride == 0) {
                    words[idx | stride] |= words[idx];
                }
            }
        }
        Self { n: self.n, words }
    }

    /// Hamming distance to another table of the same dimension.
    pub fn hamming(&self, other: &Self) -> Result<u64> {
        if self.n != other.n {
            return Err(LabError::DimensionMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum())
    }

    /// Hex encoding: digit `j` holds points `4j..4j+3`, point `4j+b` at bit `b`
    /// of the digit; `ceil(2^n / 4)` lowercase digits.
    pub fn to_hex(&self) -> String {
        let digits = ((1usize << self.n) + 3) / 4;
        (0..digits)
            .map(|j| {
                let word = self.words[j / 16];
                let nibble = (word >> ((j % 16) * 4)) & 0xf;
                char::from_digit(nibble as u32, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        check_dim(n)?;
        let digits = ((1usize << n) + 3) / 4;
        if hex.len() != digits {
            return Err(LabError::Format(format!(
                "n = {n} needs {digits} hex digits, got {}",
                hex.len()
            )));
        }
        let mut words = vec![0u64; word_count(n)];
        for (j, c) in hex.chars().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| LabError::Format(format!("invalid hex digit {c:?}")))?
                as u64;
            words[j / 16] |= nibble << ((j % 16) * 4);
        }
        Self::from_words(n, words).map_err(|_| LabError::Format("bits set beyond 2^n".into()))
    }
}

impl WideOracle for BitTableFunction {
    fn width(&self) -> usize {
        self.n
    }
    fn query_words(&self, x: &[u64]) -> bool {
        self.value(x[0])
    }
}

impl CubeOracle for BitTableFunction {
    fn dim(&self) -> usize {
        self.n
    }
    #[inline]
    fn query(&self, x: u64) -> bool {
        self.value(x)
    }
}

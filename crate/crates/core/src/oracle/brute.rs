use num_rational::Rational64;

use crate::error::{LabError, Result};
use crate::func::BitTableFunction;

pub const BRUTE_FORCE_MAX_N: usize = 4;

/// Every monotone function on `n <= 4` variables, each stored as a `2^n`-bit
/// truth-table word (bit `x` is `f(x)`).
#[derive(Clone, Debug)]
pub struct MonotoneFamily {
    n: usize,
    tables: Vec<u64>,
}

/// Bits `x` of a `2^n`-point table with coordinate `i` clear.
fn low_mask(n: usize, i: usize) -> u64 {
    (0..1u64 << n)
        .filter(|x| x >> i & 1 == 0)
        .fold(0, |m, x| m | 1 << x)
}

fn table_is_monotone(n: usize, t: u64, low: &[u64]) -> bool {
    // f(x) = 1 and f(x + e_i) = 0 is a violation; shift the upper half down.
    (0..n).all(|i| t & low[i] & !(t >> (1 << i)) == 0)
}

impl MonotoneFamily {
    /// Filters all `2^{2^n}` tables.
    pub fn enumerate(n: usize) -> Result<Self> {
        if n == 0 || n > BRUTE_FORCE_MAX_N {
            return Err(LabError::UnsupportedDimension {
                n,
                min: 1,
                max: BRUTE_FORCE_MAX_N,
            });
        }
        let low: Vec<u64> = (0..n).map(|i| low_mask(n, i)).collect();
        let tables = (0..1u64 << (1 << n))
            .filter(|&t| table_is_monotone(n, t, &low))
            .collect();
        Ok(Self { n, tables })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn tables(&self) -> &[u64] {
        &self.tables
    }

    pub fn functions(&self) -> impl Iterator<Item = BitTableFunction> + '_ {
        self.tables
            .iter()
            .map(move |&t| table_to_function(self.n, t))
    }

    /// `min_g |f xor g|` over the family, as a point count.
    pub fn min_hamming(&self, f: &BitTableFunction) -> Result<u64> {
        if f.n() != self.n {
            return Err(LabError::DimensionMismatch {
                expected: self.n,
                actual: f.n(),
            });
        }
        let t = function_to_table(f);
        Ok(self
            .tables
            .iter()
            .map(|&g| (g ^ t).count_ones() as u64)
            .min()
            .unwrap())
    }
}

pub(crate) fn table_to_function(n: usize, t: u64) -> BitTableFunction {
    BitTableFunction::from_words(n, vec![t]).expect("table fits in one word")
}

fn function_to_table(f: &BitTableFunction) -> u64 {
    f.words()[0]
}

/// Distance to the nearest monotone function by exhaustive search.
pub fn brute_force_distance(f: &BitTableFunction) -> Result<Rational64> {
    let family = MonotoneFamily::enumerate(f.n())?;
    brute_force_distance_with(&family, f)
}

/// Same as [`brute_force_distance`] with a reusable family.
pub fn brute_force_distance_with(
    family: &MonotoneFamily,
    f: &BitTableFunction,
) -> Result<Rational64> {
    Ok(Rational64::new(
        family.min_hamming(f)? as i64,
        f.size() as i64,
    ))
}

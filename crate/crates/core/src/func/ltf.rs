use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use super::point::POINT_MAX_N;
use super::table::{BitTableFunction, CubeOracle, WideOracle, EXACT_MAX_N};
use crate::error::{LabError, Result};

/// Linear threshold function `x ↦ sign(w·x - θ)` on `{-1,1}^n` with
/// `sign(0) = +1`.
///
/// Weights are exact 64-bit rationals; evaluation multiplies through by the
/// common denominator so ties at zero are decided exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct LtfSpec {
    weights: Vec<Rational64>,
    theta: Rational64,
    scaled: Vec<i64>,
    scaled_theta: i64,
    classes: Option<Vec<WeightClass>>,
}

/// Coordinates sharing one scaled weight, as a packed mask.
#[derive(Clone, Debug, PartialEq)]
struct WeightClass {
    weight: i64,
    mask: Vec<u64>,
    size: i64,
}

const MAX_CLASSES: usize = 8;

impl LtfSpec {
    pub fn new(weights: Vec<Rational64>, theta: Rational64) -> Result<Self> {
        if weights.is_empty() {
            return Err(LabError::InvalidArgument(
                "an LTF needs at least one weight".into(),
            ));
        }
        let denom = weights
            .iter()
            .chain(std::iter::once(&theta))
            .try_fold(1i64, |acc, w| {
                let l = acc.lcm(w.denom());
                (l > 0 && l < (1 << 40)).then_some(l)
            })
            .ok_or_else(|| LabError::InvalidArgument("weight denominators too large".into()))?;
        let scale = |w: &Rational64| -> Result<i64> {
            w.numer()
                .checked_mul(denom / w.denom())
                .ok_or_else(|| LabError::InvalidArgument("scaled weight overflows i64".into()))
        };
        let scaled = weights.iter().map(scale).collect::<Result<Vec<_>>>()?;
        let scaled_theta = scale(&theta)?;
        let total: i128 =
            scaled.iter().map(|&w| (w as i128).abs()).sum::<i128>() + (scaled_theta as i128).abs();
        if total > i64::MAX as i128 {
            return Err(LabError::InvalidArgument(
                "weight magnitudes too large".into(),
            ));
        }
        let classes = Self::build_classes(&scaled);
        Ok(Self {
            weights,
            theta,
            scaled,
            scaled_theta,
            classes,
        })
    }

    pub fn from_integers(weights: &[i64], theta: i64) -> Result<Self> {
        Self::new(
            weights
                .iter()
                .map(|&w| Rational64::from_integer(w))
                .collect(),
            Rational64::from_integer(theta),
        )
    }

    /// Converts floating-point weights to nearby rationals first.
    pub fn from_f64(weights: &[f64], theta: f64) -> Result<Self> {
        let conv = |v: f64| {
            if !v.is_finite() {
                return Err(LabError::InvalidArgument(format!("non-finite weight {v}")));
            }
            Rational64::approximate_float(v)
                .ok_or_else(|| LabError::InvalidArgument(format!("weight {v} not representable")))
        };
        Self::new(
            weights.iter().map(|&w| conv(w)).collect::<Result<_>>()?,
            conv(theta)?,
        )
    }

    /// `sign(x_1 + ... + x_n)`.
    pub fn majority(n: usize) -> Result<Self> {
        Self::from_integers(&vec![1; n], 0)
    }

    fn build_classes(scaled: &[i64]) -> Option<Vec<WeightClass>> {
        let words = scaled.len().div_ceil(64);
        let mut classes: Vec<WeightClass> = Vec::new();
        for (i, &w) in scaled.iter().enumerate() {
            let pos = match classes.iter().position(|c| c.weight == w) {
                Some(p) => p,
                None => {
                    if classes.len() == MAX_CLASSES {
                        return None;
                    }
                    classes.push(WeightClass {
                        weight: w,
                        mask: vec![0; words],
                        size: 0,
                    });
                    classes.len() - 1
                }
            };
            classes[pos].mask[i / 64] |= 1 << (i % 64);
            classes[pos].size += 1;
        }
        Some(classes)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational64] {
        &self.weights
    }

    pub fn theta(&self) -> Rational64 {
        self.theta
    }

    /// Whether every weight is non-negative (which makes the LTF monotone).
    pub fn has_nonnegative_weights(&self) -> bool {
        self.scaled.iter().all(|&w| w >= 0)
    }

    fn sign_of(&self, dot: i128) -> bool {
        dot - self.scaled_theta as i128 >= 0
    }

    /// Evaluation on a `±1` vector, returning `±1`.
    pub fn eval(&self, x: &[i8]) -> Result<i8> {
        if x.len() != self.n() {
            return Err(LabError::DimensionMismatch {
                expected: self.n(),
                actual: x.len(),
            });
        }
        let mut dot = 0i128;
        for (&w, &xi) in self.scaled.iter().zip(x) {
            match xi {
                1 => dot += w as i128,
                -1 => dot -= w as i128,
                _ => return Err(LabError::InvalidArgument(format!("entry {xi} is not ±1"))),
            }
        }
        Ok(if self.sign_of(dot) { 1 } else { -1 })
    }

    /// Evaluation on a packed `{0,1}` point (bit 1 ↦ +1, bit 0 ↦ -1), returning
    /// `true` for `+1`. `x` holds `ceil(n/64)` words with no bits past `n`.
    pub fn eval_packed(&self, x: &[u64]) -> bool {
        debug_assert_eq!(x.len(), self.n().div_ceil(64));
        let dot = match &self.classes {
            Some(classes) => classes
                .iter()
                .map(|c| {
                    let ones: i64 = c
                        .mask
                        .iter()
                        .zip(x)
                        .map(|(m, w)| (m & w).count_ones() as i64)
                        .sum();
                    c.weight as i128 * (2 * ones - c.size) as i128
                })
                .sum(),
            None => {
                let mut dot = 0i128;
                for (i, &w) in self.scaled.iter().enumerate() {
                    if x[i / 64] >> (i % 64) & 1 == 1 {
                        dot += w as i128;
                    } else {
                        dot -= w as i128;
                    }
                }
                dot
            }
        };
        self.sign_of(dot)
    }

    /// Materialises the LTF as a `{0,1}`-valued truth table over `{0,1}^n`.
    pub fn to_table(&self) -> Result<BitTableFunction> {
        if self.n() > EXACT_MAX_N {
            return Err(LabError::UnsupportedDimension {
                n: self.n(),
                min: 1,
                max: EXACT_MAX_N,
            });
        }
        let base: i128 = -self.scaled.iter().map(|&w| w as i128).sum::<i128>();
        BitTableFunction::from_fn(self.n(), |x| {
            let mut dot = base;
            let mut m = x;
            while m != 0 {
                dot += 2 * self.scaled[m.trailing_zeros() as usize] as i128;
                m &= m - 1;
            }
            self.sign_of(dot)
        })
    }

    /// Rational weights rendered as JSON-friendly numbers or `"p/q"` strings.
    pub(crate) fn weight_to_json(w: &Rational64) -> serde_json::Value {
        if w.is_integer() {
            serde_json::Value::from(w.to_integer())
        } else {
            serde_json::Value::from(w.to_string())
        }
    }

    pub(crate) fn weight_from_json(v: &serde_json::Value) -> Result<Rational64> {
        match v {
            serde_json::Value::Number(num) => {
                if let Some(i) = num.as_i64() {
                    Ok(Rational64::from_integer(i))
                } else {
                    let f = num.as_f64().unwrap_or(f64::NAN);
                    Rational64::approximate_float(f)
                        .ok_or_else(|| LabError::Format(format!("weight {f} not representable")))
                }
            }
            serde_json::Value::String(s) => s
                .trim()
                .parse::<Rational64>()
                .map_err(|e| LabError::Format(format!("weight {s:?}: {e}"))),
            other => Err(LabError::Format(format!(
                "weight must be a number or \"p/q\" string, got {other}"
            ))),
        }
    }

    pub fn to_f64_weights(&self) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| w.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn is_zero_weight(&self, i: usize) -> bool {
        self.weights[i].is_zero()
    }
}

impl CubeOracle for LtfSpec {
    fn dim(&self) -> usize {
        self.n()
    }

    fn query(&self, x: u64) -> bool {
        debug_assert!(self.n() <= POINT_MAX_N);
        self.eval_packed(&[x])
    }
}

impl WideOracle for LtfSpec {
    fn width(&self) -> usize {
        self.n()
    }

    fn query_words(&self, x: &[u64]) -> bool {
        self.eval_packed(x)
    }
}

//! Small statistical helpers shared by the experiments.

use num_rational::Rational64;
use serde::{Serialize, Serializer};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{LabError, Result};

/// Serialises an exact ratio as the string `"p/q"` (or `"p"` for integers).
pub fn ser_ratio<S: Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn ser_opt_ratio<S: Serializer>(
    r: &Option<Rational64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Proportion `hits / trials` with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
    pub p: f64,
    pub stderr: f64,
}

impl Proportion {
    pub fn new(hits: u64, trials: u64) -> Self {
        let p = if trials == 0 {
            0.0
        } else {
            hits as f64 / trials as f64
        };
        let stderr = if trials == 0 {
            0.0
        } else {
            (p * (1.0 - p) / trials as f64).sqrt()
        };
        Self {
            hits,
            trials,
            p,
            stderr,
        }
    }

    /// `|p - target| <= sigmas * stderr`, using the standard error of the
    /// target rate so an estimate of exactly zero hits is still judged.
    pub fn agrees_with(&self, target: f64, sigmas: f64) -> bool {
        let se = (target * (1.0 - target) / self.trials as f64)
            .sqrt()
            .max(self.stderr);
        (self.p - target).abs() <= sigmas * se
    }
}

/// Pearson chi-square statistic and upper-tail p-value of observed counts
/// against expected probabilities. Cells with zero expectation must be empty.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> Result<(f64, f64)> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(LabError::InvalidArgument(
            "observed and expected cell counts differ".into(),
        ));
    }
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * total as f64;
        if e == 0.0 {
            if o != 0 {
                return Ok((f64::INFINITY, 0.0));
            }
            continue;
        }
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    if cells < 2 {
        return Ok((stat, 1.0));
    }
    let dist = ChiSquared::new((cells - 1) as f64)
        .map_err(|e| LabError::InvalidArgument(e.to_string()))?;
    Ok((stat, 1.0 - dist.cdf(stat)))
}

/// Least-squares line through `(x, y)`: returns `(slope, intercept)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(LabError::InvalidArgument(
            "a fit needs at least two paired points".into(),
        ));
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(LabError::InvalidArgument("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.iter().chain(ys).any(|&v| v <= 0.0) {
        return Err(LabError::InvalidArgument(
            "log-log fit needs positive values".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    Ok(linear_fit(&lx, &ly)?.0)
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportion() {
        let p = Proportion::new(25, 100);
        assert_eq!(p.p, 0.25);
        assert!((p.stderr - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert!(p.agrees_with(0.3, 2.0));
        assert!(!p.agrees_with(0.5, 3.0));
    }

    #[test]
    fn chi_square_fair_die() {
        let (stat, pv) = chi_square(&[100, 100, 100, 100], &[0.25; 4]).unwrap();
        assert_eq!(stat, 0.0);
        assert!((pv - 1.0).abs() < 1e-12);
        let (_, pv) = chi_square(&[400, 0, 0, 0], &[0.25; 4]).unwrap();
        assert!(pv < 1e-6);
        // chi2(1) upper tail at 3.841 is 0.05.
        let (stat, pv) = chi_square(&[5980, 4020], &[0.5, 0.5]).unwrap();
        assert!((stat - 384.16).abs() < 1e-9);
        assert!(pv < 1e-10);
    }

    #[test]
    fn fits() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.5)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() + 0.5).abs() < 1e-12);
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn ratio_serialisation() {
        #[derive(Serialize)]
        struct W {
            #[serde(serialize_with = "ser_ratio")]
            r: Rational64,
        }
        let s = serde_json::to_string(&W {
            r: Rational64::new(2, 8),
        })
        .unwrap();
        assert_eq!(s, r#"{"r":"1/4"}"#);
    }
}

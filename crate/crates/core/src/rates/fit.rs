//! Power-law fits `d ≈ C·ε^e` by least squares on `(ln ε, ln d)`.

use serde::{Deserialize, Serialize};

use super::RateError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    #[serde(rename = "C")]
    pub c: f64,
    pub exponent: f64,
    /// Root-mean-square residual in `ln d`.
    pub residual: f64,
    /// Largest absolute residual in `ln d`.
    pub max_residual: f64,
    pub used: usize,
    /// Points with `d ≤ 0`, left out of the fit.
    pub dropped: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

impl ExponentFit {
    pub fn predict(&self, eps: f64) -> f64 {
        self.c * eps.powf(self.exponent)
    }
}

/// Fits `(ε, d)` points. Points with `d ≤ 0` (or not finite) are dropped
/// with a warning; fewer than three remaining is an error.
pub fn exponent_fit(points: &[(f64, f64)]) -> Result<ExponentFit, RateError> {
    let mut warnings = Vec::new();
    let mut dropped = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(e, d) in points {
        if !(e > 0.0 && e.is_finite()) {
            return Err(RateError::InvalidEpsilon(e));
        }
        if d > 0.0 && d.is_finite() {
            xs.push(e.ln());
            ys.push(d.ln());
        } else {
            warnings.push(format!("dropped eps = {e:e}: decrease {d:e} is not positive"));
            dropped.push((e, d));
        }
    }
    let n = xs.len();
    if n < 3 {
        return Err(RateError::TooFewPoints { kept: n });
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(RateError::InvalidOptions("exponent fit needs at least two distinct eps".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let res: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - intercept - exponent * x).collect();
    Ok(ExponentFit {
        c: intercept.exp(),
        exponent,
        residual: (res.iter().map(|r| r * r).sum::<f64>() / n as f64).sqrt(),
        max_residual: res.iter().fold(0.0, |m, r| m.max(r.abs())),
        used: n,
        dropped,
        warnings,
    })
}

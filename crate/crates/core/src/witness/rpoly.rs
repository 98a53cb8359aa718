//! The quadratic `r(α, γ, z) = (αz + 1)² − γ(α + z)` and the admissible
//! half-width κ around `α = 1.1`.

use serde::Serialize;

use super::WitnessError;

pub const ALPHA0: f64 = 1.1;
pub const GAMMA: f64 = 1.63;
pub const R_BOUND: f64 = 0.99;
/// Resolution of the outer α sweep in [`kappa_search`].
pub const KAPPA_STEP: f64 = 1e-5;
/// A bound counts as achievable at `α₀` only with this much room.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RPolynomial {
    pub alpha: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RExtrema {
    pub at_minus_one: f64,
    pub at_one: f64,
    /// Value at the vertex `z* = −(2α − γ)/(2α²)`, if it lies in `[−1, 1]`.
    pub critical: Option<f64>,
    pub critical_z: f64,
}

impl RExtrema {
    pub fn max_abs(&self) -> f64 {
        let m = self.at_minus_one.abs().max(self.at_one.abs());
        self.critical.map_or(m, |c| m.max(c.abs()))
    }
}

impl RPolynomial {
    pub fn new(alpha: f64, gamma: f64) -> Self {
        Self { alpha, gamma }
    }

    pub fn eval(&self, z: f64) -> f64 {
        r_eval(self.alpha, self.gamma, z)
    }

    /// Coefficients `[c0, c1, c2]` of `c0 + c1 z + c2 z²`.
    pub fn coefficients(&self) -> [f64; 3] {
        let (a, g) = (self.alpha, self.gamma);
        [1.0 - g * a, 2.0 * a - g, a * a]
    }

    pub fn extrema(&self) -> RExtrema {
        r_extrema(self.alpha, self.gamma)
    }
}

pub fn r_eval(alpha: f64, gamma: f64, z: f64) -> f64 {
    (alpha * z + 1.0).powi(2) - gamma * (alpha + z)
}

pub fn r_extrema(alpha: f64, gamma: f64) -> RExtrema {
    let zc = if alpha == 0.0 { f64::NAN } else { -(2.0 * alpha - gamma) / (2.0 * alpha * alpha) };
    RExtrema {
        at_minus_one: r_eval(alpha, gamma, -1.0),
        at_one: r_eval(alpha, gamma, 1.0),
        critical: (zc.abs() <= 1.0).then(|| r_eval(alpha, gamma, zc)),
        critical_z: zc,
    }
}

/// `max_{|z|≤1} |c0 + c1 z + c2 z²|` from the endpoints and the vertex.
pub fn quadratic_max_abs(c0: f64, c1: f64, c2: f64) -> f64 {
    let at = |z: f64| c0 + z * (c1 + z * c2);
    let mut m = at(-1.0).abs().max(at(1.0).abs());
    if c2 != 0.0 {
        let z = -c1 / (2.0 * c2);
        if z.abs() <= 1.0 {
            m = m.max(at(z).abs());
        }
    }
    m
}

/// Largest `κ` on the grid `k·KAPPA_STEP` such that
/// `max_{|z|≤1} |r(α, γ, z)| < bound` for every grid `α` in `[α₀ − κ, α₀ + κ]`.
pub fn kappa_search(gamma: f64, bound: f64, alpha0: f64) -> Result<f64, WitnessError> {
    let at0 = r_extrema(alpha0, gamma).max_abs();
    if !(bound < 1.0) || at0 >= bound - BOUND_SLACK {
        return Err(WitnessError::Unachievable { bound, at_alpha0: at0 });
    }
    let ok = |a: f64| r_extrema(a, gamma).max_abs() < bound;
    let mut k: u64 = 0;
    loop {
        let d = (k + 1) as f64 * KAPPA_STEP;
        if d >= alpha0.abs() || !ok(alpha0 - d) || !ok(alpha0 + d) {
            return Ok(k as f64 * KAPPA_STEP);
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_match_expansion() {
        let r = RPolynomial::new(1.3, 0.7);
        let [c0, c1, c2] = r.coefficients();
        for z in [-1.0, -0.3, 0.0, 0.8] {
            assert!((c0 + c1 * z + c2 * z * z - r.eval(z)).abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_max() {
        assert_eq!(quadratic_max_abs(0.0, 0.0, 1.0), 1.0);
        assert_eq!(quadratic_max_abs(-0.5, 0.0, 0.0), 0.5);
        assert!((quadratic_max_abs(0.1, 0.0, -1.0) - 0.9).abs() < 1e-15);
    }
}

//! C⁴ smooth steps and plateau cutoffs with closed-form derivatives.

use serde::{Deserialize, Serialize};

use super::jetfield::JetField;
use super::FieldError;

/// `S(x) = 126x⁵ − 420x⁶ + 540x⁷ − 315x⁸ + 70x⁹` on `[0, 1]`, clamped to 0
/// and 1 outside; `S′ = 630x⁴(1−x)⁴`. Returns `S, S′, …, S⁽⁴⁾`.
pub fn smoothstep(x: f64) -> [f64; 5] {
    if x <= 0.0 {
        return [0.0; 5];
    }
    if x >= 1.0 {
        return [1.0, 0.0, 0.0, 0.0, 0.0];
    }
    let y = 1.0 - x;
    let s = x.powi(5) * (126.0 + x * (-420.0 + x * (540.0 + x * (-315.0 + 70.0 * x))));
    let d1 = 630.0 * x.powi(4) * y.powi(4);
    // d/dx [x⁴y⁴] = 4x³y³(y − x)
    let d2 = 630.0 * 4.0 * x.powi(3) * y.powi(3) * (y - x);
    // d/dx [x³y³(1−2x)] = 3x²y²(1−2x)² − 2x³y³
    let d3 = 2520.0 * (3.0 * x * x * y * y * (1.0 - 2.0 * x).powi(2) - 2.0 * x.powi(3) * y.powi(3));
    // d/dx of the bracket above
    let d4 = 2520.0
        * (6.0 * x * y * (1.0 - 2.0 * x).powi(3) - 12.0 * x * x * y * y * (1.0 - 2.0 * x)
            - 6.0 * x * x * y * y * (1.0 - 2.0 * x));
    [s, d1, d2, d3, d4]
}

/// `1` on `[lo, hi]`, rising over `[lo − ramp, lo]` and falling over
/// `[hi, hi + ramp]` by a smoothstep, `0` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub lo: f64,
    pub hi: f64,
    pub ramp: f64,
}

impl Plateau {
    pub fn new(lo: f64, hi: f64, ramp: f64) -> Result<Self, FieldError> {
        if !(hi >= lo && ramp > 0.0) {
            return Err(FieldError::Precondition(format!("bad plateau [{lo}, {hi}] ramp {ramp}")));
        }
        Ok(Self { lo, hi, ramp })
    }

    pub fn eval(&self, x: f64) -> [f64; 5] {
        if x < self.lo {
            let mut d = smoothstep((x - (self.lo - self.ramp)) / self.ramp);
            for (k, v) in d.iter_mut().enumerate() {
                *v /= self.ramp.powi(k as i32);
            }
            d
        } else if x <= self.hi {
            [1.0, 0.0, 0.0, 0.0, 0.0]
        } else {
            let mut d = smoothstep((self.hi + self.ramp - x) / self.ramp);
            for (k, v) in d.iter_mut().enumerate() {
                *v *= (-1.0 / self.ramp).powi(k as i32);
            }
            d
        }
    }

    /// `[lo − ramp, hi + ramp]`.
    pub fn support(&self) -> (f64, f64) {
        (self.lo - self.ramp, self.hi + self.ramp)
    }
}

/// `φ(p, q) = φ_p(p)·φ_q(q)`.
pub fn plateau_field(pp: Plateau, pq: Plateau) -> JetField {
    let a = JetField::of_p("phi_p", move |p| pp.eval(p));
    let b = JetField::of_q("phi_q", move |q| pq.eval(q));
    a.try_mul(&b).expect("analytic fields share no domain").with_label("phi")
}

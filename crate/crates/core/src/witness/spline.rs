//! Piecewise polynomials in a normalized local variable, with exact
//! derivatives and antiderivatives.

use serde::Serialize;

use super::WitnessError;

/// Coefficients of the smoothstep `S(s) = 126s⁵ − 420s⁶ + 540s⁷ − 315s⁸ + 70s⁹`.
pub const SMOOTHSTEP: [f64; 10] = [0.0, 0.0, 0.0, 0.0, 0.0, 126.0, -420.0, 540.0, -315.0, 70.0];

/// Polynomial helpers on coefficient vectors `c[k]·sᵏ`.
pub mod poly {
    pub fn constant(v: f64) -> Vec<f64> {
        vec![v]
    }

    /// `a + b·c(s)`.
    pub fn affine(c: &[f64], a: f64, b: f64) -> Vec<f64> {
        let mut out: Vec<f64> = c.iter().map(|x| b * x).collect();
        if out.is_empty() {
            out.push(0.0);
        }
        out[0] += a;
        out
    }

    /// `c(1 − s)`.
    pub fn reflect(c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; c.len()];
        // (1 − s)^m = Σ_k C(m,k)(−s)^k
        for (m, &cm) in c.iter().enumerate() {
            let mut binom = 1.0;
            for (k, o) in out.iter_mut().enumerate().take(m + 1) {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                *o += cm * binom * sign;
                binom = binom * (m - k) as f64 / (k + 1) as f64;
            }
        }
        out
    }

    /// `∫₀^s c`.
    pub fn integral(c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; c.len() + 1];
        for (k, &x) in c.iter().enumerate() {
            out[k + 1] = x / (k + 1) as f64;
        }
        out
    }

    /// Value and the first `D − 1` derivatives in `s`.
    pub fn eval<const D: usize>(c: &[f64], s: f64) -> [f64; D] {
        let mut out = [0.0; D];
        for (k, o) in out.iter_mut().enumerate() {
            if k >= c.len() {
                break;
            }
            // Σ_{m≥k} c_m · m!/(m−k)! · s^{m−k}
            let mut acc = 0.0;
            for m in (k..c.len()).rev() {
                let mut f = 1.0;
                for t in 0..k {
                    f *= (m - t) as f64;
                }
                acc = acc * s + c[m] * f;
            }
            *o = acc;
        }
        out
    }
}

/// A function given by polynomials on consecutive intervals
/// `[knots[i], knots[i+1]]`, each in `s = (x − knots[i]) / (knots[i+1] − knots[i])`,
/// extended by constants outside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spline {
    knots: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
    left: f64,
    right: f64,
}

impl Spline {
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    /// Value outside the support on the right.
    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0)
    }

    /// `f, f′, …, f⁽⁴⁾` at `x`.
    pub fn derivs(&self, x: f64) -> [f64; 5] {
        let (k0, k1) = self.support();
        if x < k0 {
            return [self.left, 0.0, 0.0, 0.0, 0.0];
        }
        if x > k1 {
            return [self.right, 0.0, 0.0, 0.0, 0.0];
        }
        let i = self.knots.partition_point(|&k| k <= x).clamp(1, self.coeffs.len()) - 1;
        self.piece_derivs(i, (x - self.knots[i]) / (self.knots[i + 1] - self.knots[i]))
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivs(x)[0]
    }

    fn piece_derivs(&self, i: usize, s: f64) -> [f64; 5] {
        let len = self.knots[i + 1] - self.knots[i];
        let mut d = poly::eval::<5>(&self.coeffs[i], s);
        let mut scale = 1.0;
        for v in d.iter_mut() {
            *v *= scale;
            scale /= len;
        }
        d
    }

    /// Bound on `|f⁽ᵏ⁾|` over piece `i` from its coefficients.
    fn piece_scale(&self, i: usize) -> [f64; 5] {
        let len = self.knots[i + 1] - self.knots[i];
        let c: Vec<f64> = self.coeffs[i].iter().map(|x| x.abs()).collect();
        let mut d = poly::eval::<5>(&c, 1.0);
        let mut scale = 1.0;
        for v in d.iter_mut() {
            *v *= scale;
            scale /= len;
        }
        d
    }

    /// Largest jump of `f, …, f⁽⁴⁾` across any knot, including the two ends,
    /// relative to `1 +` the size of that derivative on the adjacent pieces.
    pub fn max_jump(&self) -> f64 {
        let n = self.coeffs.len();
        let edge = [self.left, 0.0, 0.0, 0.0, 0.0];
        let right = [self.right, 0.0, 0.0, 0.0, 0.0];
        let mut worst: f64 = 0.0;
        for i in 0..=n {
            let (a, sa) = if i == 0 { (edge, edge.map(f64::abs)) } else { (self.piece_derivs(i - 1, 1.0), self.piece_scale(i - 1)) };
            let (b, sb) = if i == n { (right, right.map(f64::abs)) } else { (self.piece_derivs(i, 0.0), self.piece_scale(i)) };
            for k in 0..5 {
                worst = worst.max((a[k] - b[k]).abs() / (1.0 + sa[k].max(sb[k])));
            }
        }
        worst
    }

    /// The antiderivative vanishing on the left. The integrand must vanish
    /// outside its support; a right-hand value within `snap` of zero is
    /// treated as zero.
    pub fn integral(&self, snap: f64) -> Result<Spline, WitnessError> {
        if self.left != 0.0 || self.right.abs() > snap {
            return Err(WitnessError::Infeasible(format!(
                "integrand does not vanish outside its support (left {}, right {})",
                self.left, self.right
            )));
        }
        let mut base = 0.0;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let len = self.knots[i + 1] - self.knots[i];
            let mut ic = poly::integral(c);
            for x in ic.iter_mut() {
                *x *= len;
            }
            ic[0] = base;
            base = ic.iter().sum();
            coeffs.push(ic);
        }
        Ok(Spline {
            knots: self.knots.clone(),
            coeffs,
            left: 0.0,
            right: base,
        })
    }

    /// Same function with the right-hand value replaced by `0` when it is
    /// within `snap` of zero.
    pub fn snapped(mut self, snap: f64) -> Result<Spline, WitnessError> {
        if self.right.abs() > snap {
            return Err(WitnessError::Infeasible(format!("spline does not return to zero: {}", self.right)));
        }
        self.right = 0.0;
        Ok(self)
    }
}

/// Appends pieces left to right.
#[derive(Debug, Clone)]
pub struct SplineBuilder {
    knots: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
}

impl SplineBuilder {
    pub fn new(start: f64) -> Self {
        Self { knots: vec![start], coeffs: Vec::new() }
    }

    pub fn end(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// Polynomial `c(s)` over `[end, end + len]`; zero-length pieces are skipped.
    pub fn piece(&mut self, len: f64, c: Vec<f64>) -> &mut Self {
        if len > 0.0 {
            self.knots.push(self.end() + len);
            self.coeffs.push(c);
        }
        self
    }

    pub fn flat(&mut self, len: f64, v: f64) -> &mut Self {
        self.piece(len, poly::constant(v))
    }

    /// Extends with the constant `v` up to `x`.
    pub fn flat_to(&mut self, x: f64, v: f64) -> Result<&mut Self, WitnessError> {
        if x < self.end() {
            return Err(WitnessError::Infeasible(format!("piece at {} overlaps the previous one ending at {}", x, self.end())));
        }
        Ok(self.flat(x - self.end(), v))
    }

    /// `base + h·S(s)`: smooth step from `base` to `base + h`.
    pub fn step(&mut self, len: f64, base: f64, h: f64) -> &mut Self {
        self.piece(len, poly::affine(&SMOOTHSTEP, base, h))
    }

    /// `base + h·S(1 − s)`: smooth step from `base + h` down to `base`.
    pub fn step_down(&mut self, len: f64, base: f64, h: f64) -> &mut Self {
        self.piece(len, poly::affine(&poly::reflect(&SMOOTHSTEP), base, h))
    }

    /// Trapezoid pulse of height `h` over `len` with smooth corners of length
    /// `corner`; integrates to `h·(len − corner)`.
    pub fn pulse(&mut self, len: f64, corner: f64, h: f64) -> &mut Self {
        self.step(corner, 0.0, h).flat(len - 2.0 * corner, h).step_down(corner, 0.0, h)
    }

    pub fn build(&self) -> Result<Spline, WitnessError> {
        if self.coeffs.is_empty() {
            return Err(WitnessError::Infeasible("empty spline".into()));
        }
        Ok(Spline {
            knots: self.knots.clone(),
            coeffs: self.coeffs.clone(),
            left: 0.0,
            right: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflect_and_integrate() {
        let c = vec![1.0, 2.0, 3.0];
        // 1 + 2(1−s) + 3(1−s)² = 6 − 8s + 3s²
        assert_eq!(poly::reflect(&c), vec![6.0, -8.0, 3.0]);
        assert_eq!(poly::integral(&SMOOTHSTEP).iter().sum::<f64>(), 0.5);
        let d = poly::eval::<3>(&c, 2.0);
        assert_eq!(d, [17.0, 14.0, 6.0]);
    }

    #[test]
    fn pulse_integral_and_smoothness() {
        let mut b = SplineBuilder::new(1.0);
        b.pulse(10.0, 2.0, 0.5);
        let s = b.build().unwrap();
        assert!(s.max_jump() < 1e-12);
        let i = s.integral(0.0).unwrap();
        assert!((i.right() - 0.5 * 8.0).abs() < 1e-13);
        assert_eq!(s.derivs(6.0), [0.5, 0.0, 0.0, 0.0, 0.0]);
        let x = 1.7;
        let e = 1e-6;
        let fd = (i.value(x + e) - i.value(x - e)) / (2.0 * e);
        assert!((fd - s.value(x)).abs() < 1e-9);
    }
}

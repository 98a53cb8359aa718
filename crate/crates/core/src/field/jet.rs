//! Truncated bivariate Taylor jets of order ≤ 4 in `(p, q)`.

use std::ops::{Add, Mul, Neg, Sub};

pub const MAX_JET_ORDER: usize = 4;
const LEN: usize = 15;

const FACT: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[inline]
fn idx(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

#[inline]
fn len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Taylor coefficients `c[i,j] = ∂_p^i ∂_q^j f / (i! j!)` for `i + j ≤ order`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    order: usize,
    c: [f64; LEN],
}

impl Jet {
    pub fn constant(v: f64, order: usize) -> Self {
        assert!(order <= MAX_JET_ORDER);
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { order, c }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(0.0, order)
    }

    /// The coordinate function `p` expanded at `p`.
    pub fn var_p(p: f64, order: usize) -> Self {
        let mut j = Self::constant(p, order);
        if order >= 1 {
            j.c[idx(1, 0)] = 1.0;
        }
        j
    }

    pub fn var_q(q: f64, order: usize) -> Self {
        let mut j = Self::constant(q, order);
        if order >= 1 {
            j.c[idx(0, 1)] = 1.0;
        }
        j
    }

    /// Builds a jet from partial derivatives `d(i, j) = ∂_p^i ∂_q^j f`.
    pub fn from_partials(order: usize, mut d: impl FnMut(usize, usize) -> f64) -> Self {
        let mut out = Self::zero(order);
        for deg in 0..=order {
            for j in 0..=deg {
                let i = deg - j;
                out.c[idx(i, j)] = d(i, j) / (FACT[i] * FACT[j]);
            }
        }
        out
    }

    /// Jet of `f(p)` from `f, f', f'', …` at the point.
    pub fn univariate_p(derivs: &[f64], order: usize) -> Self {
        Self::from_partials(order, |i, j| if j == 0 { derivs[i] } else { 0.0 })
    }

    pub fn univariate_q(derivs: &[f64], order: usize) -> Self {
        Self::from_partials(order, |i, j| if i == 0 { derivs[j] } else { 0.0 })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient of `δp^i δq^j`.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            return 0.0;
        }
        self.c[idx(i, j)]
    }

    /// Partial derivative `∂_p^i ∂_q^j` at the expansion point.
    pub fn deriv(&self, i: usize, j: usize) -> f64 {
        self.coeff(i, j) * FACT[i] * FACT[j]
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        let mut out = Jet::zero(order);
        out.c[..len(order)].copy_from_slice(&self.c[..len(order)]);
        out
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = *self;
        out.c.iter_mut().for_each(|x| *x *= s);
        out
    }

    /// `∂_p`, one order lower.
    pub fn d_p(&self) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let mut out = Jet::zero(order);
        for deg in 0..=order {
            for j in 0..=deg {
                let i = deg - j;
                out.c[idx(i, j)] = (i + 1) as f64 * self.c[idx(i + 1, j)];
            }
        }
        out
    }

    pub fn d_q(&self) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let mut out = Jet::zero(order);
        for deg in 0..=order {
            for j in 0..=deg {
                let i = deg - j;
                out.c[idx(i, j)] = (j + 1) as f64 * self.c[idx(i, j + 1)];
            }
        }
        out
    }

    /// `g ∘ self` where `derivs[k] = g^{(k)}(self.value())`, `k = 0..=order`.
    pub fn compose(&self, derivs: &[f64]) -> Jet {
        let mut delta = *self;
        delta.c[0] = 0.0;
        let mut out = Jet::constant(derivs[0], self.order);
        let mut power = Jet::constant(1.0, self.order);
        for (k, d) in derivs.iter().enumerate().take(self.order + 1).skip(1) {
            power = power * delta;
            let s = d / FACT[k];
            for (o, x) in out.c.iter_mut().zip(&power.c) {
                *o += s * x;
            }
        }
        out
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose(&[s, c, -s, -c, s])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose(&[c, -s, -c, s, c])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(&[e; 5])
    }

    pub fn ln(&self) -> Jet {
        let x = self.value();
        self.compose(&[x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / x.powi(3), -6.0 / x.powi(4)])
    }

    pub fn powi(&self, n: i32) -> Jet {
        let x = self.value();
        let mut d = [0.0; 5];
        let mut coef = 1.0;
        for (k, dk) in d.iter_mut().enumerate() {
            let e = n - k as i32;
            *dk = if coef == 0.0 { 0.0 } else { coef * x.powi(e) };
            coef *= e as f64;
        }
        self.compose(&d)
    }

    /// `{a, b} = a_q b_p − a_p b_q`, one order lower.
    pub fn poisson(&self, other: &Jet) -> Jet {
        self.d_q() * other.d_p() - self.d_p() * other.d_q()
    }

    /// Raw Taylor coefficients in graded order.
    pub fn coefficients(&self) -> &[f64] {
        &self.c[..len(self.order)]
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet::zero(order);
        for k in 0..len(order) {
            out.c[k] = self.c[k] + rhs.c[k];
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet::zero(order);
        for k in 0..len(order) {
            out.c[k] = self.c[k] - rhs.c[k];
        }
        out
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet::zero(order);
        for d1 in 0..=order {
            for j1 in 0..=d1 {
                let a = self.c[idx(d1 - j1, j1)];
                if a == 0.0 {
                    continue;
                }
                for d2 in 0..=order - d1 {
                    for j2 in 0..=d2 {
                        out.c[idx(d1 - j1 + d2 - j2, j1 + j2)] += a * rhs.c[idx(d2 - j2, j2)];
                    }
                }
            }
        }
        out
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn product_of_coordinates() {
        let p = Jet::var_p(2.0, 4);
        let q = Jet::var_q(3.0, 4);
        let pq = p * q;
        assert_eq!(pq.value(), 6.0);
        assert_eq!(pq.deriv(1, 0), 3.0);
        assert_eq!(pq.deriv(0, 1), 2.0);
        assert_eq!(pq.deriv(1, 1), 1.0);
        assert_eq!(pq.deriv(2, 0), 0.0);
    }

    #[test]
    fn sin_derivatives() {
        let x = 0.7;
        let s = Jet::var_p(x, 4).sin();
        let expected = [x.sin(), x.cos(), -x.sin(), -x.cos(), x.sin()];
        for (k, e) in expected.iter().enumerate() {
            assert_relative_eq!(s.deriv(k, 0), *e, epsilon = 1e-14);
        }
    }

    #[test]
    fn chain_rule_mixed() {
        // exp(p q) at (1, 2): ∂p∂q = (1 + pq) e^{pq}
        let j = (Jet::var_p(1.0, 4) * Jet::var_q(2.0, 4)).exp();
        assert_relative_eq!(j.deriv(1, 1), 3.0 * 2f64.exp(), epsilon = 1e-12);
        // ∂p²∂q² = (2 + 4pq + p²q²) e^{pq}
        assert_relative_eq!(j.deriv(2, 2), (2.0 + 8.0 + 4.0) * 2f64.exp(), epsilon = 1e-11);
    }

    #[test]
    fn poisson_of_coordinates() {
        let p = Jet::var_p(0.3, 4);
        let q = Jet::var_q(0.4, 4);
        assert_eq!(p.poisson(&q).value(), -1.0);
        assert_eq!(q.poisson(&p).value(), 1.0);
    }

    #[test]
    fn powi_and_ln() {
        let x = Jet::var_q(1.5, 4);
        let c = x.powi(3);
        assert_relative_eq!(c.deriv(0, 3), 6.0, epsilon = 1e-12);
        let l = x.ln();
        assert_relative_eq!(l.deriv(0, 2), -1.0 / 2.25, epsilon = 1e-12);
        let inv = x.powi(-1);
        assert_relative_eq!(inv.deriv(0, 1), -1.0 / 2.25, epsilon = 1e-12);
    }
}

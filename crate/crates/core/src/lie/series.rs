//! Truncated power series in the path parameter `τ` with Lie-polynomial
//! coefficients.

use std::fmt;

use num_traits::One;

use super::poly::{bracket, rat, LiePoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieSeries {
    /// `coeffs[k]` multiplies `τ^k`; always `order + 1` entries.
    coeffs: Vec<LiePoly>,
    max_degree: usize,
}

impl LieSeries {
    pub fn zero(order: usize, max_degree: usize) -> Self {
        Self {
            coeffs: vec![LiePoly::zero(max_degree); order + 1],
            max_degree,
        }
    }

    /// `c · τ^k` (dropped if `k` exceeds the order).
    pub fn monomial(c: &LiePoly, k: usize, order: usize, max_degree: usize) -> Self {
        let mut s = Self::zero(order, max_degree);
        if k <= order {
            s.coeffs[k] = c.truncate(max_degree);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn coeff(&self, k: usize) -> &LiePoly {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[LiePoly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LiePoly::is_zero)
    }

    pub fn set_coeff(&mut self, k: usize, c: LiePoly) {
        self.coeffs[k] = c.truncate(self.max_degree);
    }

    pub fn add(&self, other: &LieSeries) -> LieSeries {
        self.combine(other, &Rational::one())
    }

    pub fn sub(&self, other: &LieSeries) -> LieSeries {
        self.combine(other, &-Rational::one())
    }

    fn combine(&self, other: &LieSeries, s: &Rational) -> LieSeries {
        let order = self.order().min(other.order());
        let md = self.max_degree.min(other.max_degree);
        let coeffs = (0..=order)
            .map(|k| {
                let mut c = self.coeffs[k].truncate(md);
                c.add_scaled(&other.coeffs[k], s);
                c
            })
            .collect();
        LieSeries {
            coeffs,
            max_degree: md,
        }
    }

    pub fn scale(&self, s: &Rational) -> LieSeries {
        LieSeries {
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
            max_degree: self.max_degree,
        }
    }

    pub fn neg(&self) -> LieSeries {
        self.scale(&-Rational::one())
    }

    /// Cauchy product of brackets: `[Σ a_i τ^i, Σ b_j τ^j]`.
    pub fn bracket(&self, other: &LieSeries) -> LieSeries {
        let order = self.order().min(other.order());
        let md = self.max_degree.min(other.max_degree);
        let mut out = LieSeries::zero(order, md);
        for i in 0..=order {
            for j in 0..=order - i {
                let b = bracket(&self.coeffs[i], &other.coeffs[j], md);
                out.coeffs[i + j].add_scaled(&b, &Rational::one());
            }
        }
        out
    }

    /// `d/dτ`; the top coefficient becomes zero.
    pub fn derivative(&self) -> LieSeries {
        let order = self.order();
        let mut out = LieSeries::zero(order, self.max_degree);
        for k in 0..order {
            out.coeffs[k] = self.coeffs[k + 1].scale(&rat(k as i64 + 1, 1));
        }
        out
    }

    /// `∫_0^τ`, with the top term discarded by truncation.
    pub fn integral(&self) -> LieSeries {
        let order = self.order();
        let mut out = LieSeries::zero(order, self.max_degree);
        for k in 1..=order {
            out.coeffs[k] = self.coeffs[k - 1].scale(&rat(1, k as i64));
        }
        out
    }

    /// Applies `H ↦ H ∘ a_τ^{-1}` where `a_τ` is the path generated by `self`
    /// and `a_0` is the identity: the operator `Π_τ` solves
    /// `d/dτ Π_τ(X) = -{Π_τ(X), A(τ)}`, `Π_0 = id`, order by order.
    pub fn pullback(&self, h: &LieSeries) -> LieSeries {
        let order = self.order().min(h.order());
        let md = self.max_degree.min(h.max_degree);
        let mut out = LieSeries::zero(order, md);
        for m in 0..=order {
            if h.coeffs[m].is_zero() {
                continue;
            }
            let layers = self.pullback_layers(&h.coeffs[m], order - m, md);
            for (k, layer) in layers.iter().enumerate() {
                out.coeffs[m + k].add_scaled(layer, &Rational::one());
            }
        }
        out
    }

    /// `[L_0(x), …, L_depth(x)]` with `Π_τ(x) = Σ_k τ^k L_k(x)`.
    fn pullback_layers(&self, x: &LiePoly, depth: usize, md: usize) -> Vec<LiePoly> {
        let mut layers = vec![x.truncate(md)];
        for k in 0..depth {
            let mut next = LiePoly::zero(md);
            for i in 0..=k {
                let j = k - i;
                if j > self.order() {
                    continue;
                }
                let b = bracket(&layers[i], &self.coeffs[j], md);
                next.add_scaled(&b, &Rational::one());
            }
            layers.push(next.scale(&rat(-1, k as i64 + 1)));
        }
        layers
    }

    /// Solves `self + Π^a(Ā) ≡ 0` for the generator `Ā` of the inverse path
    /// of `a`, triangularly: the τ^n equation only involves `Ā_0..Ā_n`.
    pub fn inverse_generator(&self) -> LieSeries {
        let order = self.order();
        let md = self.max_degree;
        let mut inv = LieSeries::zero(order, md);
        for n in 0..=order {
            // Π^a(Ā)_n = Ā_n + Σ_{m<n} L_{n-m}(Ā_m)
            let mut rhs = -&self.coeffs[n];
            for m in 0..n {
                if inv.coeffs[m].is_zero() {
                    continue;
                }
                let layers = self.pullback_layers(&inv.coeffs[m], n - m, md);
                rhs.add_scaled(&layers[n - m], &-Rational::one());
            }
            inv.coeffs[n] = rhs;
        }
        inv
    }

    /// Pullback by the fixed time-`s` flow of `x`:
    /// `H ↦ H ∘ φ_x^{-s} = Σ_k (-s)^k / k! · {…{H, x}, …, x}`, truncated by degree.
    pub fn conjugate_fixed(&self, x: &LiePoly, s: &Rational) -> LieSeries {
        LieSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| flow_pullback(c, x, s, self.max_degree))
                .collect(),
            max_degree: self.max_degree,
        }
    }
}

/// `h ∘ φ_x^{-s}` in the truncated free Lie algebra.
pub fn flow_pullback(h: &LiePoly, x: &LiePoly, s: &Rational, max_degree: usize) -> LiePoly {
    let mut out = h.truncate(max_degree);
    let mut term = h.truncate(max_degree);
    let mut k = 1i64;
    loop {
        term = bracket(&term, x, max_degree).scale(&(-s / rat(k, 1)));
        if term.is_zero() {
            break;
        }
        out.add_scaled(&term, &Rational::one());
        k += 1;
    }
    out
}

impl fmt::Display for LieSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "t^{k}*({c})")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.order() + 1)
    }
}

//! Words in Hamiltonian flows and the generating Hamiltonian of the path they trace.

use std::fmt;

use num_traits::{One, Zero};

use super::poly::{rat, LiePoly, Rational};
use super::series::LieSeries;
use super::LieError;

pub const DEFAULT_ORDER: usize = 5;
pub const MAX_ORDER: usize = 8;

/// Polynomial time `c(τ) = Σ c_k τ^k` with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimePoly {
    coeffs: Vec<Rational>,
}

impl TimePoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `c · τ`.
    pub fn linear(c: Rational) -> Self {
        Self::new(vec![Rational::zero(), c])
    }

    pub fn tau() -> Self {
        Self::linear(Rational::one())
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_linear(&self) -> bool {
        self.coeffs.len() <= 2
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for TimePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 if c.is_one() => write!(f, "t")?,
                1 if *c == -Rational::one() => write!(f, "-t")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A path `τ ↦ word(τ)` in the group of Hamiltonian diffeomorphisms.
///
/// `Product(a, b, …)` is the group product `a ∘ b ∘ …`; `Factor(X, c)` is the
/// time-`c(τ)` flow of the autonomous Hamiltonian `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowWord {
    Factor { generator: LiePoly, time: TimePoly },
    Product(Vec<FlowWord>),
    Inverse(Box<FlowWord>),
    Conjugate { word: Box<FlowWord>, by: Box<FlowWord> },
}

impl FlowWord {
    pub fn factor(generator: LiePoly, time: TimePoly) -> Self {
        FlowWord::Factor { generator, time }
    }

    pub fn product(children: Vec<FlowWord>) -> Self {
        FlowWord::Product(children)
    }

    pub fn inverse(w: FlowWord) -> Self {
        FlowWord::Inverse(Box::new(w))
    }

    pub fn conjugate(word: FlowWord, by: FlowWord) -> Self {
        FlowWord::Conjugate {
            word: Box::new(word),
            by: Box::new(by),
        }
    }

    /// Group commutator `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(a: FlowWord, b: FlowWord) -> Self {
        FlowWord::Product(vec![
            a.clone(),
            b.clone(),
            FlowWord::inverse(a),
            FlowWord::inverse(b),
        ])
    }

    pub fn validate(&self) -> Result<(), LieError> {
        match self {
            FlowWord::Factor { generator, time } => {
                if generator.is_zero() || !generator.is_homogeneous_of(1) {
                    return Err(LieError::InvalidWord(format!(
                        "factor generator must be a nonzero degree-1 polynomial, got {generator}"
                    )));
                }
                if !time.coeff(0).is_zero() {
                    return Err(LieError::InvalidWord(format!(
                        "factor time {time} must vanish at τ = 0"
                    )));
                }
                Ok(())
            }
            FlowWord::Product(children) => {
                if children.is_empty() {
                    return Err(LieError::InvalidWord("empty product".into()));
                }
                children.iter().try_for_each(FlowWord::validate)
            }
            FlowWord::Inverse(w) => w.validate(),
            FlowWord::Conjugate { word, by } => {
                word.validate()?;
                by.validate()
            }
        }
    }

    /// Rewrites every `Conjugate(a, c)` as `Product(c, a, Inverse(c))`.
    pub fn normalize(&self) -> FlowWord {
        match self {
            FlowWord::Factor { .. } => self.clone(),
            FlowWord::Product(ch) => FlowWord::Product(ch.iter().map(|c| c.normalize()).collect()),
            FlowWord::Inverse(w) => FlowWord::inverse(w.normalize()),
            FlowWord::Conjugate { word, by } => {
                let c = by.normalize();
                FlowWord::Product(vec![c.clone(), word.normalize(), FlowWord::inverse(c)])
            }
        }
    }

    /// `true` if every factor time is linear in `τ`.
    pub fn has_linear_times(&self) -> bool {
        match self {
            FlowWord::Factor { time, .. } => time.is_linear(),
            FlowWord::Product(ch) => ch.iter().all(FlowWord::has_linear_times),
            FlowWord::Inverse(w) => w.has_linear_times(),
            FlowWord::Conjugate { word, by } => word.has_linear_times() && by.has_linear_times(),
        }
    }
}

impl fmt::Display for FlowWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowWord::Factor { generator, time } => write!(f, "phi[{time}]({generator})"),
            FlowWord::Product(ch) => {
                write!(f, "(")?;
                for (i, c) in ch.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            FlowWord::Inverse(w) => write!(f, "{w}^-1"),
            FlowWord::Conjugate { word, by } => write!(f, "conj[{by}]{word}"),
        }
    }
}

/// Generating Hamiltonian of the path `τ ↦ word(τ)`, as a Lie series
/// truncated at `τ^order`. Lie degrees are truncated at `order + 1`, which
/// loses nothing because the `τ^k` coefficient of any word has degree at most
/// `k + 1`.
pub fn path_generator(word: &FlowWord, order: usize) -> Result<LieSeries, LieError> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(LieError::Bounds {
            what: "T",
            value: order as i64,
            lo: 1,
            hi: MAX_ORDER as i64,
        });
    }
    word.validate()?;
    Ok(generator_of(&word.normalize(), order, order + 1))
}

fn generator_of(word: &FlowWord, order: usize, md: usize) -> LieSeries {
    match word {
        // c'(τ) · X
        FlowWord::Factor { generator, time } => {
            let mut s = LieSeries::zero(order, md);
            for k in 0..=order {
                let c = time.coeff(k + 1) * rat(k as i64 + 1, 1);
                s.set_coeff(k, generator.scale(&c));
            }
            s
        }
        // gen(c1 · rest) = C1 + Π^{c1}(gen(rest)), folded from the right.
        FlowWord::Product(children) => {
            let mut iter = children.iter().rev();
            let last = iter.next().expect("validated nonempty product");
            let mut acc = generator_of(last, order, md);
            for child in iter {
                let c = generator_of(child, order, md);
                acc = c.add(&c.pullback(&acc));
            }
            acc
        }
        FlowWord::Inverse(w) => generator_of(w, order, md).inverse_generator(),
        FlowWord::Conjugate { .. } => generator_of(&word.normalize(), order, md),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::poly::bracket;

    fn f(md: usize) -> LiePoly {
        LiePoly::f(md)
    }
    fn g(md: usize) -> LiePoly {
        LiePoly::g(md)
    }

    #[test]
    fn factor_times_its_inverse_vanishes() {
        let a = FlowWord::factor(f(6), TimePoly::tau());
        let w = FlowWord::product(vec![a.clone(), FlowWord::inverse(a)]);
        assert!(path_generator(&w, 5).unwrap().is_zero());
    }

    #[test]
    fn product_of_two_flows_first_order() {
        // Hand expansion: F + Π^f(G) = F + G - τ{G,F} + O(τ²) = F + G + τ{F,G}.
        let w = FlowWord::product(vec![
            FlowWord::factor(f(6), TimePoly::tau()),
            FlowWord::factor(g(6), TimePoly::tau()),
        ]);
        let s = path_generator(&w, 3).unwrap();
        assert_eq!(s.coeff(0), &(&f(4) + &g(4)));
        assert_eq!(s.coeff(1), &bracket(&f(4), &g(4), 4));
    }

    #[test]
    fn conjugate_normalizes_to_product() {
        let a = FlowWord::factor(f(3), TimePoly::tau());
        let c = FlowWord::factor(g(3), TimePoly::linear(rat(1, 2)));
        let conj = FlowWord::conjugate(a.clone(), c.clone());
        let prod = FlowWord::product(vec![c.clone(), a, FlowWord::inverse(c)]);
        assert_eq!(conj.normalize(), prod);
        assert_eq!(path_generator(&conj, 4).unwrap(), path_generator(&prod, 4).unwrap());
    }

    #[test]
    fn rejects_bad_words() {
        let fg = bracket(&f(3), &g(3), 3);
        let bad_gen = FlowWord::factor(fg, TimePoly::tau());
        assert!(matches!(path_generator(&bad_gen, 3), Err(LieError::InvalidWord(_))));
        let offset = FlowWord::factor(f(3), TimePoly::new(vec![rat(1, 1), rat(1, 1)]));
        assert!(path_generator(&offset, 3).is_err());
        assert!(path_generator(&FlowWord::product(vec![]), 3).is_err());
        let ok = FlowWord::factor(f(3), TimePoly::tau());
        assert!(matches!(path_generator(&ok, 0), Err(LieError::Bounds { .. })));
        assert!(matches!(path_generator(&ok, 9), Err(LieError::Bounds { .. })));
    }

    #[test]
    fn quadratic_time_factor() {
        // c(τ) = τ² generates 2τ·X.
        let w = FlowWord::factor(f(3), TimePoly::new(vec![rat(0, 1), rat(0, 1), rat(1, 1)]));
        let s = path_generator(&w, 3).unwrap();
        assert!(s.coeff(0).is_zero());
        assert_eq!(s.coeff(1), &f(4).scale(&rat(2, 1)));
        assert!(!w.has_linear_times());
    }
}

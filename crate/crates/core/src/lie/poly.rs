//! Exact Lie polynomials in the Lyndon basis of the free Lie algebra on `{F, G}`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::lyndon::{Letter, LyndonWord};

pub type Rational = BigRational;

/// Shorthand for an exact rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A finite linear combination of Lyndon basis elements, truncated above
/// `max_degree`. Keys are the Lyndon words whose standard bracketing is the
/// basis element; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiePoly {
    terms: BTreeMap<LyndonWord, Rational>,
    max_degree: usize,
}

impl LiePoly {
    pub fn zero(max_degree: usize) -> Self {
        Self {
            terms: BTreeMap::new(),
            max_degree,
        }
    }

    /// The basis element indexed by `w` (zero if `w` is above `max_degree`).
    pub fn basis(w: LyndonWord, max_degree: usize) -> Self {
        let mut p = Self::zero(max_degree);
        p.add_term(w, Rational::one());
        p
    }

    pub fn generator(l: Letter, max_degree: usize) -> Self {
        Self::basis(LyndonWord::letter(l), max_degree)
    }

    pub fn f(max_degree: usize) -> Self {
        Self::generator(Letter::F, max_degree)
    }

    pub fn g(max_degree: usize) -> Self {
        Self::generator(Letter::G, max_degree)
    }

    /// Builds a polynomial from `(word, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(terms: I, max_degree: usize) -> Self
    where
        I: IntoIterator<Item = (LyndonWord, Rational)>,
    {
        let mut p = Self::zero(max_degree);
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LyndonWord, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &LyndonWord) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    /// Distinct degrees of the stored monomials, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|w| w.degree()).collect();
        d.dedup();
        d
    }

    /// `true` if every monomial has degree exactly `d` (vacuously for zero).
    pub fn is_homogeneous_of(&self, d: usize) -> bool {
        self.terms.keys().all(|w| w.degree() == d)
    }

    /// Lowest degree present; `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().next().map(|w| w.degree())
    }

    pub fn add_term(&mut self, w: LyndonWord, c: Rational) {
        if c.is_zero() || w.degree() > self.max_degree {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &LiePoly, s: &Rational) {
        if s.is_zero() {
            return;
        }
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c * s);
        }
    }

    pub fn scale(&self, s: &Rational) -> LiePoly {
        let mut out = LiePoly::zero(self.max_degree);
        out.add_scaled(self, s);
        out
    }

    /// Same terms, new truncation bound (terms above it are dropped).
    pub fn truncate(&self, max_degree: usize) -> LiePoly {
        let mut out = LiePoly::zero(max_degree);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    /// Homogeneous component of degree `d`.
    pub fn component(&self, d: usize) -> LiePoly {
        LiePoly::from_terms(
            self.terms
                .iter()
                .filter(|(w, _)| w.degree() == d)
                .map(|(w, c)| (w.clone(), c.clone())),
            self.max_degree,
        )
    }
}

impl Add for &LiePoly {
    type Output = LiePoly;
    fn add(self, rhs: &LiePoly) -> LiePoly {
        let mut out = self.truncate(self.max_degree.min(rhs.max_degree));
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &LiePoly {
    type Output = LiePoly;
    fn sub(self, rhs: &LiePoly) -> LiePoly {
        let mut out = self.truncate(self.max_degree.min(rhs.max_degree));
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &LiePoly {
    type Output = LiePoly;
    fn neg(self) -> LiePoly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for LiePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if a.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{a}*{w}")?;
            }
        }
        Ok(())
    }
}

/// Lie bracket `[p, q]` in the Lyndon basis, truncated at `max_degree`.
pub fn bracket(p: &LiePoly, q: &LiePoly, max_degree: usize) -> LiePoly {
    let mut out = LiePoly::zero(max_degree);
    for (a, ca) in &p.terms {
        for (b, cb) in &q.terms {
            if a.degree() + b.degree() > max_degree {
                continue;
            }
            let coeff = ca * cb;
            let prod = bracket_basis(a, b);
            out.add_scaled(&prod, &coeff);
        }
    }
    out
}

thread_local! {
    static BASIS_BRACKETS: RefCell<HashMap<(LyndonWord, LyndonWord), LiePoly>> =
        RefCell::new(HashMap::new());
}

/// `[b(a), b(b)]` for basis elements, expanded in the Lyndon basis.
///
/// The result is homogeneous of degree `deg a + deg b` and is memoized per
/// thread.
fn bracket_basis(a: &LyndonWord, b: &LyndonWord) -> LiePoly {
    let key = (a.clone(), b.clone());
    if let Some(hit) = BASIS_BRACKETS.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }
    let result = bracket_basis_uncached(a, b);
    BASIS_BRACKETS.with(|c| c.borrow_mut().insert(key, result.clone()));
    result
}

fn bracket_basis_uncached(a: &LyndonWord, b: &LyndonWord) -> LiePoly {
    let degree = a.degree() + b.degree();
    match a.lex_cmp(b) {
        std::cmp::Ordering::Equal => LiePoly::zero(degree),
        std::cmp::Ordering::Greater => -&bracket_basis(b, a),
        std::cmp::Ordering::Less => match a.standard_factorization() {
            // ab is Lyndon with standard factorization (a, b).
            None => LiePoly::basis(a.concat(b), degree),
            Some((_, ref a2)) if a2.lex_cmp(b) != std::cmp::Ordering::Less => {
                LiePoly::basis(a.concat(b), degree)
            }
            // a = (a1, a2) with a2 < b: [[a1,a2],b] = [a1,[a2,b]] + [[a1,b],a2].
            Some((a1, a2)) => {
                let a1p = LiePoly::basis(a1.clone(), degree);
                let a2p = LiePoly::basis(a2.clone(), degree);
                let inner = bracket_basis(&a2, b);
                let mut out = bracket(&a1p, &inner, degree);
                let inner = bracket_basis(&a1, b);
                let second = bracket(&inner, &a2p, degree);
                out.add_scaled(&second, &Rational::one());
                out
            }
        },
    }
}

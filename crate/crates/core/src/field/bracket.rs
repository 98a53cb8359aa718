//! Iterated Poisson brackets of two fields, described by nesting patterns.

use std::fmt;
use std::str::FromStr;

use super::jet::{Jet, MAX_JET_ORDER};
use super::jetfield::JetField;
use super::FieldError;

/// Largest letter count evaluable with order-4 jets.
pub const MAX_LETTERS: usize = MAX_JET_ORDER + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sym {
    F,
    G,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BracketWord {
    Leaf(Sym),
    Bracket(Box<BracketWord>, Box<BracketWord>),
}

impl BracketWord {
    pub fn f() -> Self {
        BracketWord::Leaf(Sym::F)
    }

    pub fn g() -> Self {
        BracketWord::Leaf(Sym::G)
    }

    pub fn bracket(a: BracketWord, b: BracketWord) -> Self {
        BracketWord::Bracket(Box::new(a), Box::new(b))
    }

    /// `{{F,G},F}`.
    pub fn fgf() -> Self {
        Self::bracket(Self::bracket(Self::f(), Self::g()), Self::f())
    }

    /// `{{F,G},G}`.
    pub fn fgg() -> Self {
        Self::bracket(Self::bracket(Self::f(), Self::g()), Self::g())
    }

    /// `(ad_X)^n Y = {…{{Y,X},X}…,X}`.
    pub fn ad_power(x: BracketWord, n: usize, y: BracketWord) -> Self {
        (0..n).fold(y, |acc, _| Self::bracket(acc, x.clone()))
    }

    /// `(ad_F)^n G`.
    pub fn ad_f_power(n: usize) -> Self {
        Self::ad_power(Self::f(), n, Self::g())
    }

    /// `(ad_H)^m G` with `H = (ad_G)^k F`.
    pub fn ad_h_power(k: usize, m: usize) -> Self {
        let h = Self::ad_power(Self::g(), k, Self::f());
        Self::ad_power(h, m, Self::g())
    }

    pub fn letters(&self) -> usize {
        match self {
            BracketWord::Leaf(_) => 1,
            BracketWord::Bracket(a, b) => a.letters() + b.letters(),
        }
    }

    /// Nesting depth: number of derivative orders the evaluation consumes.
    pub fn depth(&self) -> usize {
        match self {
            BracketWord::Leaf(_) => 0,
            BracketWord::Bracket(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if self.letters() > MAX_LETTERS {
            return Err(FieldError::JetOrder {
                needed: self.letters() - 1,
                available: MAX_JET_ORDER,
            });
        }
        Ok(())
    }

    /// Evaluates from the inputs' jets at one point. The jets must have order
    /// at least `depth()`.
    pub fn eval_jets(&self, jf: &Jet, jg: &Jet) -> Jet {
        match self {
            BracketWord::Leaf(Sym::F) => *jf,
            BracketWord::Leaf(Sym::G) => *jg,
            BracketWord::Bracket(a, b) => a.eval_jets(jf, jg).poisson(&b.eval_jets(jf, jg)),
        }
    }

    /// Value at a point, using jets of order `depth()`.
    pub fn value_at(&self, f: &JetField, g: &JetField, p: f64, q: f64) -> f64 {
        let k = self.depth();
        let jf = f.jet_order(p, q, k);
        let jg = g.jet_order(p, q, k);
        self.eval_jets(&jf, &jg).value()
    }
}

impl fmt::Display for BracketWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketWord::Leaf(Sym::F) => write!(f, "F"),
            BracketWord::Leaf(Sym::G) => write!(f, "G"),
            BracketWord::Bracket(a, b) => write!(f, "{{{a},{b}}}"),
        }
    }
}

impl FromStr for BracketWord {
    type Err = FieldError;

    /// Parses `F`, `G` and `{X,Y}` (whitespace ignored).
    fn from_str(s: &str) -> Result<Self, FieldError> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let w = parse(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(FieldError::Parse(format!("trailing input in bracket word {s:?}")));
        }
        Ok(w)
    }
}

fn parse(c: &[char], pos: &mut usize) -> Result<BracketWord, FieldError> {
    let err = |msg: &str, at: usize| FieldError::Parse(format!("{msg} at offset {at} in bracket word"));
    match c.get(*pos) {
        Some('F') => {
            *pos += 1;
            Ok(BracketWord::f())
        }
        Some('G') => {
            *pos += 1;
            Ok(BracketWord::g())
        }
        Some('{') => {
            *pos += 1;
            let a = parse(c, pos)?;
            if c.get(*pos) != Some(&',') {
                return Err(err("expected ','", *pos));
            }
            *pos += 1;
            let b = parse(c, pos)?;
            if c.get(*pos) != Some(&'}') {
                return Err(err("expected '}'", *pos));
            }
            *pos += 1;
            Ok(BracketWord::bracket(a, b))
        }
        _ => Err(err("expected F, G or '{'", *pos)),
    }
}

/// `{F, G}` as a field with output order `order_out` (see
/// [`JetField::poisson`]).
pub fn poisson(f: &JetField, g: &JetField, order_out: Option<usize>) -> Result<JetField, FieldError> {
    f.poisson(g, order_out)
}

/// The iterated bracket described by `word` as a field, folded from the
/// leaves with [`JetField::poisson`].
pub fn iterated_bracket(word: &BracketWord, f: &JetField, g: &JetField) -> Result<JetField, FieldError> {
    word.validate()?;
    match word {
        BracketWord::Leaf(Sym::F) => Ok(f.clone()),
        BracketWord::Leaf(Sym::G) => Ok(g.clone()),
        BracketWord::Bracket(a, b) => {
            let fa = iterated_bracket(a, f, g)?;
            let fb = iterated_bracket(b, f, g)?;
            fa.poisson(&fb, None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["F", "{F,G}", "{{F,G},F}", "{{{F,G},G},G}", "{{G,{F,G}},{F,G}}"] {
            let w: BracketWord = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
        assert!("{F,G".parse::<BracketWord>().is_err());
        assert!("{F;G}".parse::<BracketWord>().is_err());
        assert!("FG".parse::<BracketWord>().is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(BracketWord::fgf().letters(), 3);
        assert_eq!(BracketWord::ad_f_power(3).to_string(), "{{{G,F},F},F}");
        let h = BracketWord::ad_h_power(1, 2);
        assert_eq!(h.to_string(), "{{G,{F,G}},{F,G}}");
        assert_eq!(h.letters(), 5);
        assert_eq!(h.depth(), 3);
        assert!(BracketWord::ad_f_power(5).validate().is_err());
    }
}

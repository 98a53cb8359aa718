//! Lyndon words over the ordered alphabet `F < G`.

use std::cmp::Ordering;
use std::fmt;

use super::LieError;

/// Largest degree accepted by [`lyndon_basis`].
pub const MAX_BASIS_DEGREE: usize = 12;

/// One of the two free generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    F,
    G,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::F => 'F',
            Letter::G => 'G',
        }
    }
}

/// A Lyndon word: strictly smaller than each of its proper rotations.
///
/// Ordering on `LyndonWord` is graded: first by degree, then
/// lexicographically. The rewriting algorithm needs the plain lexicographic
/// order, available through [`LyndonWord::lex_cmp`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LyndonWord {
    letters: Vec<Letter>,
}

impl LyndonWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self, LieError> {
        if !is_lyndon(&letters) {
            let s: String = letters.iter().map(|l| l.as_char()).collect();
            return Err(LieError::NotLyndon(s));
        }
        Ok(Self { letters })
    }

    pub fn letter(l: Letter) -> Self {
        Self { letters: vec![l] }
    }

    pub(crate) fn from_vec_unchecked(letters: Vec<Letter>) -> Self {
        debug_assert!(is_lyndon(&letters));
        Self { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn degree(&self) -> usize {
        self.letters.len()
    }

    pub fn is_letter(&self) -> bool {
        self.letters.len() == 1
    }

    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.letters.cmp(&other.letters)
    }

    /// Right standard factorization `w = u v` with `v` the longest proper
    /// Lyndon suffix. `None` for single letters.
    pub fn standard_factorization(&self) -> Option<(LyndonWord, LyndonWord)> {
        if self.is_letter() {
            return None;
        }
        let n = self.letters.len();
        (1..n)
            .find(|&i| is_lyndon(&self.letters[i..]))
            .map(|i| {
                (
                    Self::from_vec_unchecked(self.letters[..i].to_vec()),
                    Self::from_vec_unchecked(self.letters[i..].to_vec()),
                )
            })
    }

    /// Concatenation `self · other`; Lyndon whenever `self < other` lexicographically.
    pub(crate) fn concat(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self::from_vec_unchecked(letters)
    }
}

impl std::str::FromStr for LyndonWord {
    type Err = LieError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .chars()
            .map(|c| match c {
                'F' => Ok(Letter::F),
                'G' => Ok(Letter::G),
                _ => Err(LieError::NotLyndon(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(letters)
    }
}

impl Ord for LyndonWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for LyndonWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

/// Rotation test: nonempty and strictly smaller than every proper rotation.
pub fn is_lyndon(w: &[Letter]) -> bool {
    let n = w.len();
    if n == 0 {
        return false;
    }
    (1..n).all(|k| {
        let rotated = w[k..].iter().chain(w[..k].iter());
        w.iter().cmp(rotated) == Ordering::Less
    })
}

/// All Lyndon words of degree `1..=max_degree`, in (degree, lexicographic) order.
///
/// Generated with Duval's successor algorithm, which walks the Lyndon words
/// of length at most `n` in lexicographic order.
pub fn lyndon_basis(max_degree: usize) -> Result<Vec<LyndonWord>, LieError> {
    if !(1..=MAX_BASIS_DEGREE).contains(&max_degree) {
        return Err(LieError::Bounds {
            what: "max_degree",
            value: max_degree as i64,
            lo: 1,
            hi: MAX_BASIS_DEGREE as i64,
        });
    }
    let mut out = Vec::new();
    let mut w: Vec<u8> = vec![0];
    loop {
        out.push(LyndonWord::from_vec_unchecked(
            w.iter()
                .map(|&b| if b == 0 { Letter::F } else { Letter::G })
                .collect(),
        ));
        // Duval: repeat w up to length n, then strip trailing maximal letters
        // and bump the last one.
        let m = w.len();
        while w.len() < max_degree {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&1) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out.sort();
    Ok(out)
}

/// Dimension of the degree-`d` component of the free Lie algebra on
/// `letters` generators: `(1/d) Σ_{e | d} μ(d/e) letters^e`.
pub fn witt_number(d: usize, letters: u64) -> u64 {
    assert!(d >= 1);
    let mut sum: i128 = 0;
    for e in 1..=d {
        if d % e == 0 {
            sum += mobius(d / e) as i128 * (letters as i128).pow(e as u32);
        }
    }
    (sum / d as i128) as u64
}

fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> LyndonWord {
        s.parse().unwrap()
    }

    #[test]
    fn degree_one_basis() {
        let b = lyndon_basis(1).unwrap();
        assert_eq!(b, vec![word("F"), word("G")]);
    }

    #[test]
    fn degree_three_basis() {
        let b: Vec<String> = lyndon_basis(3).unwrap().iter().map(|w| w.to_string()).collect();
        assert_eq!(b, ["F", "G", "FG", "FFG", "FGG"]);
    }

    #[test]
    fn out_of_range() {
        assert!(lyndon_basis(0).is_err());
        assert!(lyndon_basis(13).is_err());
    }

    #[test]
    fn witt_values() {
        let w: Vec<u64> = (1..=8).map(|d| witt_number(d, 2)).collect();
        assert_eq!(w, [2, 1, 2, 3, 6, 9, 18, 30]);
    }

    #[test]
    fn rotation_test_rejects() {
        assert!(!is_lyndon(&[]));
        assert!(!is_lyndon(&[Letter::G, Letter::F]));
        assert!(!is_lyndon(&[Letter::F, Letter::F]));
        assert!("GF".parse::<LyndonWord>().is_err());
    }

    #[test]
    fn standard_factorizations() {
        let (u, v) = word("FFG").standard_factorization().unwrap();
        assert_eq!((u.to_string(), v.to_string()), ("F".into(), "FG".into()));
        let (u, v) = word("FGG").standard_factorization().unwrap();
        assert_eq!((u.to_string(), v.to_string()), ("FG".into(), "G".into()));
        let (u, v) = word("FFGFG").standard_factorization().unwrap();
        assert_eq!((u.to_string(), v.to_string()), ("FFG".into(), "FG".into()));
        assert!(word("G").standard_factorization().is_none());
    }
}

//! Trigonometric polynomials on the torus with exact jets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::jet::{Jet, MAX_JET_ORDER};
use super::jetfield::{JetField, Provenance};

/// `a·cos(kp·p + kq·q) + b·sin(kp·p + kq·q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub kp: i32,
    pub kq: i32,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        Self { terms }
    }

    /// Random polynomial with `n_terms` terms, frequencies in `[-max_freq, max_freq]²`
    /// (never both zero) and coefficients uniform in `[-1, 1]`.
    pub fn random(seed: u64, n_terms: usize, max_freq: i32) -> Self {
        Self::random_with(&mut ChaCha8Rng::seed_from_u64(seed), n_terms, max_freq)
    }

    pub fn random_with<R: Rng>(rng: &mut R, n_terms: usize, max_freq: i32) -> Self {
        let terms = (0..n_terms)
            .map(|_| {
                let (kp, kq) = loop {
                    let kp = rng.gen_range(-max_freq..=max_freq);
                    let kq = rng.gen_range(-max_freq..=max_freq);
                    if kp != 0 || kq != 0 {
                        break (kp, kq);
                    }
                };
                TrigTerm {
                    kp,
                    kq,
                    a: rng.gen_range(-1.0..=1.0),
                    b: rng.gen_range(-1.0..=1.0),
                }
            })
            .collect();
        Self { terms }
    }

    /// `Σ |a| + |b|`, an upper bound on the uniform norm.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.a.abs() + t.b.abs()).sum()
    }

    pub fn scaled(&self, s: f64) -> TrigPoly {
        TrigPoly {
            terms: self
                .terms
                .iter()
                .map(|t| TrigTerm {
                    a: t.a * s,
                    b: t.b * s,
                    ..*t
                })
                .collect(),
        }
    }

    pub fn value(&self, p: f64, q: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let (s, c) = (t.kp as f64 * p + t.kq as f64 * q).sin_cos();
                t.a * c + t.b * s
            })
            .sum()
    }

    /// Order-`k` jet: `∂_p^i ∂_q^j` of each term is `kp^i kq^j` times the
    /// `(i+j)`-th derivative of the phase function.
    pub fn jet(&self, p: f64, q: f64, order: usize) -> Jet {
        let mut d = [[0.0; MAX_JET_ORDER + 1]; MAX_JET_ORDER + 1];
        for t in &self.terms {
            let (s, c) = (t.kp as f64 * p + t.kq as f64 * q).sin_cos();
            // m-th derivative of a cos θ + b sin θ
            let dm = [
                t.a * c + t.b * s,
                -t.a * s + t.b * c,
                -t.a * c - t.b * s,
                t.a * s - t.b * c,
                t.a * c + t.b * s,
            ];
            let (kp, kq) = (t.kp as f64, t.kq as f64);
            for deg in 0..=order {
                for j in 0..=deg {
                    let i = deg - j;
                    d[i][j] += kp.powi(i as i32) * kq.powi(j as i32) * dm[deg];
                }
            }
        }
        Jet::from_partials(order, |i, j| d[i][j])
    }

    pub fn into_field(self, label: impl Into<String>) -> JetField {
        JetField::from_fn(label, MAX_JET_ORDER, Provenance::Analytic, None, move |p, q, k| {
            self.jet(p, q, k)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_matches_generic_jet_arithmetic() {
        let t = TrigPoly::random(7, 4, 3);
        let f = t.clone().into_field("t");
        let (p, q) = (0.37, 1.9);
        let generic = t.terms.iter().fold(Jet::zero(4), |acc, term| {
            let th = Jet::var_p(p, 4) * term.kp as f64 + Jet::var_q(q, 4) * term.kq as f64;
            acc + th.cos() * term.a + th.sin() * term.b
        });
        let j = f.jet(p, q);
        for (a, b) in j.coefficients().iter().zip(generic.coefficients()) {
            assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn seeded_is_reproducible() {
        assert_eq!(TrigPoly::random(3, 5, 2), TrigPoly::random(3, 5, 2));
        assert_ne!(TrigPoly::random(3, 5, 2), TrigPoly::random(4, 5, 2));
    }
}

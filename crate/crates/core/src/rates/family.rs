//! Parametric perturbation families. Every member moves `F` and `G` by at
//! most `ε` in the uniform norm, for any parameter vector inside the box.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::field::{FieldError, JetField, TrigPoly};

use super::RateError;

pub const RANDOM_TERMS: usize = 6;
pub const RANDOM_MAX_FREQ: i32 = 4;
const LAMBDA_MIN: f64 = 0.25;
const MU_MAX: f64 = 4.0;
const PHASES: [f64; 4] = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `F′ = F + θ_F ε sin(λ_F F + φ_F)`, `G′ = G + θ_G ε sin(λ_G G + φ_G)`.
    Oscillatory,
    /// `F′ = F + θ ε cos(μ G + ψ) sin(λ F + φ)`, `G′ = G`. For split pairs
    /// `F = u(p)`, `G = v(q)` this is `F + ε a(q) sin(λ u(p))`.
    Modulated,
    /// `F′ = F + θ ε s_F`, `G′ = G + θ ε s_G` with `s = T / ‖T‖₁` for random
    /// trigonometric polynomials `T` drawn from `(seed, index)`.
    RandomFourier,
}

/// Axis-aligned parameter box; members outside it are clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ParamBox {
    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(v, (lo, hi))| if v.is_nan() { *lo } else { v.clamp(*lo, *hi) })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

/// Default frequency ceiling `ε^{-1/2}`.
pub fn default_lambda_max(eps: f64) -> f64 {
    eps.powf(-0.5).max(1.0)
}

/// `λ` seeds `1, ε^{-1/4}, ε^{-1/3}, ε^{-1/2}`.
fn lambda_seeds(eps: f64) -> Vec<f64> {
    let mut s = vec![1.0, eps.powf(-0.25), eps.powf(-1.0 / 3.0), eps.powf(-0.5)];
    s.retain(|l| *l >= LAMBDA_MIN);
    s.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    s
}

/// Derivatives of `x ↦ x + a sin(λx + φ)`.
fn osc_derivs(x: f64, a: f64, lam: f64, phi: f64) -> [f64; 5] {
    let (s, c) = (lam * x + phi).sin_cos();
    let l2 = lam * lam;
    [x + a * s, 1.0 + a * lam * c, -a * l2 * s, -a * l2 * lam * c, a * l2 * l2 * s]
}

/// Derivatives of `x ↦ sin(λx + φ)`.
fn sin_derivs(x: f64, lam: f64, phi: f64) -> [f64; 5] {
    let (s, c) = (lam * x + phi).sin_cos();
    let l2 = lam * lam;
    [s, lam * c, -l2 * s, -l2 * lam * c, l2 * l2 * s]
}

fn oscillate(f: &JetField, a: f64, lam: f64, phi: f64) -> JetField {
    if a == 0.0 {
        return f.clone();
    }
    f.map(format!("{} + {a:e}*sin({lam}*{} + {phi})", f.label(), f.label()), move |x| {
        osc_derivs(x, a, lam, phi)
    })
}

fn random_direction(seed: u64, index: u64) -> (TrigPoly, TrigPoly) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let tf = TrigPoly::random_with(&mut rng, RANDOM_TERMS, RANDOM_MAX_FREQ);
    let tg = TrigPoly::random_with(&mut rng, RANDOM_TERMS, RANDOM_MAX_FREQ);
    let nf = tf.l1_norm();
    let ng = tg.l1_norm();
    (tf.scaled(1.0 / nf), tg.scaled(1.0 / ng))
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 3] = [FamilyKind::Oscillatory, FamilyKind::Modulated, FamilyKind::RandomFourier];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Oscillatory => "oscillatory",
            FamilyKind::Modulated => "modulated",
            FamilyKind::RandomFourier => "random-fourier",
        }
    }

    /// Names of the search coordinates. Frequencies `λ` are searched as `ln λ`.
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            FamilyKind::Oscillatory => &["theta_f", "ln_lambda_f", "phi_f", "theta_g", "ln_lambda_g", "phi_g"],
            FamilyKind::Modulated => &["theta", "ln_lambda", "phi", "mu", "psi"],
            FamilyKind::RandomFourier => &["theta", "index"],
        }
    }

    /// Random members have a discrete index and are only swept.
    pub fn is_discrete(&self) -> bool {
        matches!(self, FamilyKind::RandomFourier)
    }

    pub fn param_box(&self, lambda_max: f64, budget: usize) -> ParamBox {
        let (l0, l1) = (LAMBDA_MIN.ln(), lambda_max.max(LAMBDA_MIN).ln());
        match self {
            FamilyKind::Oscillatory => ParamBox {
                lo: vec![0.0, l0, 0.0, 0.0, l0, 0.0],
                hi: vec![1.0, l1, TAU, 1.0, l1, TAU],
            },
            FamilyKind::Modulated => ParamBox {
                lo: vec![0.0, l0, 0.0, 0.0, 0.0],
                hi: vec![1.0, l1, TAU, MU_MAX, TAU],
            },
            FamilyKind::RandomFourier => ParamBox {
                lo: vec![0.0, 0.0],
                hi: vec![1.0, budget.saturating_sub(1) as f64],
            },
        }
    }

    /// Initial simplex offsets for local refinement.
    pub fn simplex_steps(&self) -> Vec<f64> {
        match self {
            FamilyKind::Oscillatory => vec![-0.25, 0.3, PI / 4.0, -0.25, 0.3, PI / 4.0],
            FamilyKind::Modulated => vec![-0.25, 0.3, PI / 4.0, 0.5, PI / 4.0],
            FamilyKind::RandomFourier => vec![-0.25, 1.0],
        }
    }

    /// Coarse sweep: full amplitude, `λ` at the seeds, four phases. Points
    /// outside the box are clamped by the caller.
    pub fn sweep(&self, eps: f64, budget: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        match self {
            FamilyKind::Oscillatory => {
                for l in lambda_seeds(eps) {
                    for ph in PHASES {
                        out.push(vec![1.0, l.ln(), ph, 1.0, l.ln(), ph]);
                    }
                }
            }
            FamilyKind::Modulated => {
                for l in lambda_seeds(eps) {
                    for ph in PHASES {
                        out.push(vec![1.0, l.ln(), ph, 0.0, 0.0]);
                    }
                }
            }
            FamilyKind::RandomFourier => {
                for i in 0..budget {
                    out.push(vec![1.0, i as f64]);
                }
            }
        }
        out
    }

    /// The same perturbation expressed at a larger radius `eps_new ≥ eps_old`.
    pub fn rescale(&self, x: &[f64], eps_old: f64, eps_new: f64) -> Vec<f64> {
        let r = if eps_new > 0.0 { (eps_old / eps_new).min(1.0) } else { 0.0 };
        let mut y = x.to_vec();
        match self {
            FamilyKind::Oscillatory => {
                y[0] *= r;
                y[3] *= r;
            }
            FamilyKind::Modulated | FamilyKind::RandomFourier => y[0] *= r,
        }
        y
    }

    /// Parameters with frequencies reported as `λ` rather than `ln λ`.
    pub fn named(&self, x: &[f64]) -> BTreeMap<String, f64> {
        self.param_names()
            .iter()
            .zip(x)
            .map(|(n, v)| match n.strip_prefix("ln_") {
                Some(base) => (base.to_string(), v.exp()),
                None => (n.to_string(), *v),
            })
            .collect()
    }

    /// Largest spatial frequency of the perturbation given gradient bounds
    /// of `F` and `G`.
    pub fn frequency(&self, x: &[f64], lip_f: f64, lip_g: f64) -> f64 {
        match self {
            FamilyKind::Oscillatory => (x[1].exp() * lip_f).max(x[4].exp() * lip_g),
            FamilyKind::Modulated => (x[1].exp() * lip_f).max(x[3] * lip_g),
            FamilyKind::RandomFourier => RANDOM_MAX_FREQ as f64,
        }
    }

    /// The perturbed pair. `x` must already lie in the box.
    pub fn member(&self, f: &JetField, g: &JetField, eps: f64, x: &[f64], seed: u64) -> Result<(JetField, JetField), FieldError> {
        match self {
            FamilyKind::Oscillatory => Ok((
                oscillate(f, x[0] * eps, x[1].exp(), x[2]),
                oscillate(g, x[3] * eps, x[4].exp(), x[5]),
            )),
            FamilyKind::Modulated => {
                let a = x[0] * eps;
                if a == 0.0 {
                    return Ok((f.clone(), g.clone()));
                }
                let (lam, phi, mu, psi) = (x[1].exp(), x[2], x[3], x[4]);
                let s = f.map(format!("sin({lam}*{} + {phi})", f.label()), move |v| sin_derivs(v, lam, phi));
                let c = g.map(format!("cos({mu}*{} + {psi})", g.label()), move |v| {
                    sin_derivs(v, mu, psi + FRAC_PI_2)
                });
                Ok((f.try_add(&s.try_mul(&c)?.scale(a))?, g.clone()))
            }
            FamilyKind::RandomFourier => {
                let a = x[0] * eps;
                if a == 0.0 {
                    return Ok((f.clone(), g.clone()));
                }
                let (sf, sg) = random_direction(seed, x[1].round() as u64);
                Ok((
                    f.try_add(&sf.scaled(a).into_field("s_f"))?,
                    g.try_add(&sg.scaled(a).into_field("s_g"))?,
                ))
            }
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = RateError;

    fn from_str(s: &str) -> Result<Self, RateError> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| RateError::InvalidOptions(format!("unknown family {s:?}")))
    }
}

//! `Φ(F, G)` as a sum of maxima of bracket words. Grid maxima are refined by
//! Newton ascent on the jets of each word, so an oscillation the grid
//! straddles is still located.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::field::{BracketWord, Domain2, DomainKind, FieldError, GridValues, JetField, Provenance};

use super::RateError;

/// Grid local maxima refined per word.
pub const REFINE_CANDIDATES: usize = 6;
const NEWTON_STEPS: usize = 30;
const HALVINGS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhiSpec {
    /// `max {F,G}`.
    #[serde(rename = "maxFG")]
    MaxFG,
    /// `max {{F,G},F} + max {{F,G},G}`.
    #[serde(rename = "double")]
    Double,
}

impl PhiSpec {
    pub fn words(&self) -> Vec<BracketWord> {
        match self {
            PhiSpec::MaxFG => vec![BracketWord::bracket(BracketWord::f(), BracketWord::g())],
            PhiSpec::Double => vec![BracketWord::fgf(), BracketWord::fgg()],
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            PhiSpec::MaxFG => 1,
            PhiSpec::Double => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PhiSpec::MaxFG => "maxFG",
            PhiSpec::Double => "double",
        }
    }
}

impl fmt::Display for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhiSpec {
    type Err = RateError;

    fn from_str(s: &str) -> Result<Self, RateError> {
        match s {
            "maxFG" => Ok(PhiSpec::MaxFG),
            "double" => Ok(PhiSpec::Double),
            _ => Err(RateError::InvalidOptions(format!("unknown functional {s:?} (expected maxFG or double)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhiEvaluator {
    spec: PhiSpec,
    words: Vec<BracketWord>,
    kind: DomainKind,
    candidates: usize,
}

impl PhiEvaluator {
    pub fn new(spec: PhiSpec, kind: DomainKind) -> Self {
        Self {
            spec,
            words: spec.words(),
            kind,
            candidates: REFINE_CANDIDATES,
        }
    }

    /// Number of grid local maxima refined per word; `0` keeps raw grid maxima.
    pub fn with_candidates(mut self, k: usize) -> Self {
        self.candidates = k;
        self
    }

    pub fn spec(&self) -> PhiSpec {
        self.spec
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    /// `Φ(F, G)` on an `n × n` grid.
    pub fn evaluate(&self, f: &JetField, g: &JetField, n: usize) -> Result<f64, FieldError> {
        Ok(self.parts(f, g, n)?.iter().sum())
    }

    /// The maximum of each word. Fields tied to a sampled domain are
    /// evaluated on their own grid without refinement.
    pub fn parts(&self, f: &JetField, g: &JetField, n: usize) -> Result<Vec<f64>, FieldError> {
        let depth = self.spec.depth();
        let avail = f.order().min(g.order());
        if avail < depth {
            return Err(FieldError::JetOrder { needed: depth, available: avail });
        }
        let fixed = f.domain().or(g.domain()).copied();
        let domain = match fixed {
            Some(d) => d,
            None => Domain2::new(self.kind, n)?,
        };
        let grid = domain.grid();
        f.check_grid(&grid)?;
        g.check_grid(&grid)?;
        let words = &self.words;
        let [a, b] = grid.eval_many(|p, q| {
            let jf = f.jet_order(p, q, depth);
            let jg = g.jet_order(p, q, depth);
            let second = words.get(1).map_or(0.0, |w| w.eval_jets(&jf, &jg).value());
            [words[0].eval_jets(&jf, &jg).value(), second]
        });
        let refine = self.candidates > 0
            && fixed.is_none()
            && f.provenance() == Provenance::Analytic
            && g.provenance() == Provenance::Analytic
            && avail >= depth + 2;
        let bounds = match domain.kind {
            DomainKind::Torus => None,
            DomainKind::Rectangle { p, q, .. } => Some((p, q)),
        };
        let h = domain.h();
        let mut out = Vec::with_capacity(words.len());
        for (w, vals) in words.iter().zip([a, b]) {
            let mut best = vals.max();
            if refine {
                for (i, j) in local_maxima(&vals, domain.is_periodic(), self.candidates) {
                    let x = (grid.p()[i], grid.q()[j]);
                    best = best.max(newton_ascent(w, f, g, x, h, bounds));
                }
            }
            out.push(best);
        }
        Ok(out)
    }
}

/// The `k` largest grid local maxima (3×3 neighbourhoods, wrapped when
/// periodic), largest first.
pub fn local_maxima(v: &GridValues, periodic: bool, k: usize) -> Vec<(usize, usize)> {
    let (np, nq) = v.shape();
    let mut found: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..np {
        for j in 0..nq {
            let x = v.get(i, j);
            let mut is_max = true;
            'nb: for di in [-1i64, 0, 1] {
                for dj in [-1i64, 0, 1] {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    let (a, b) = if periodic {
                        (a.rem_euclid(np as i64), b.rem_euclid(nq as i64))
                    } else if a < 0 || b < 0 || a >= np as i64 || b >= nq as i64 {
                        continue;
                    } else {
                        (a, b)
                    };
                    if v.get(a as usize, b as usize) > x {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                found.push((x, i, j));
            }
        }
    }
    found.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    found.into_iter().take(k).map(|(_, i, j)| (i, j)).collect()
}

type Bounds = Option<((f64, f64), (f64, f64))>;

/// Monotone ascent from `x0`: Newton steps where the Hessian is negative
/// definite, gradient steps otherwise, each capped at length `h` and halved
/// until the value increases. Returns the best value seen.
fn newton_ascent(w: &BracketWord, f: &JetField, g: &JetField, x0: (f64, f64), h: f64, bounds: Bounds) -> f64 {
    let k = w.depth() + 2;
    let eval = |x: (f64, f64)| w.eval_jets(&f.jet_order(x.0, x.1, k), &g.jet_order(x.0, x.1, k));
    let clamp = |x: (f64, f64)| match bounds {
        Some((bp, bq)) => (x.0.clamp(bp.0, bp.1), x.1.clamp(bq.0, bq.1)),
        None => x,
    };
    let mut x = x0;
    let mut j = eval(x);
    let mut best = j.value();
    for _ in 0..NEWTON_STEPS {
        let (gp, gq) = (j.deriv(1, 0), j.deriv(0, 1));
        let (hpp, hpq, hqq) = (j.deriv(2, 0), j.deriv(1, 1), j.deriv(0, 2));
        let det = hpp * hqq - hpq * hpq;
        let (mut dp, mut dq) = if hpp < 0.0 && det > 0.0 {
            (-(hqq * gp - hpq * gq) / det, -(hpp * gq - hpq * gp) / det)
        } else {
            (gp, gq)
        };
        let len = dp.hypot(dq);
        if !(len > 1e-15) {
            break;
        }
        let cap = h / len;
        if cap < 1.0 || !(hpp < 0.0 && det > 0.0) {
            dp *= cap;
            dq *= cap;
        }
        let mut moved = false;
        for _ in 0..HALVINGS {
            let y = clamp((x.0 + dp, x.1 + dq));
            let jy = eval(y);
            if jy.value().partial_cmp(&best) == Some(Ordering::Greater) {
                x = y;
                j = jy;
                best = jy.value();
                moved = true;
                break;
            }
            dp *= 0.5;
            dq *= 0.5;
        }
        if !moved {
            break;
        }
    }
    best
}

//! Upper bounds on `Φ̄_ε` by searching a perturbation family: a parallel
//! coarse sweep, then Nelder–Mead inside the parameter box.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::Mutex;

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::{Domain2, DomainKind, JetField};

use super::family::{default_lambda_max, FamilyKind, ParamBox};
use super::phi::{PhiEvaluator, PhiSpec, REFINE_CANDIDATES};
use super::RateError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchOptions {
    /// Family members evaluated per `(ε, family)`, the baseline excluded.
    pub budget: usize,
    pub seed: u64,
    /// Base grid size; members with fast oscillations get finer grids.
    pub grid_n: usize,
    pub max_grid_n: usize,
    /// Grid nodes per oscillation period of a member.
    pub points_per_wave: f64,
    /// Frequency ceiling; `ε^{-1/2}` when unset.
    pub lambda_max: Option<f64>,
    /// Grid local maxima refined by Newton ascent per bracket word.
    pub refine: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            budget: 60,
            seed: 0,
            grid_n: 128,
            max_grid_n: 768,
            points_per_wave: 4.0,
            lambda_max: None,
            refine: REFINE_CANDIDATES,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<(), RateError> {
        let bad = |m: String| Err(RateError::InvalidOptions(m));
        if self.budget == 0 {
            return bad("budget must be at least 1".into());
        }
        if self.grid_n < 16 || self.max_grid_n < self.grid_n {
            return bad(format!("grid sizes {} / {} invalid", self.grid_n, self.max_grid_n));
        }
        if !(self.points_per_wave > 0.0 && self.points_per_wave.is_finite()) {
            return bad(format!("points_per_wave = {}", self.points_per_wave));
        }
        if let Some(l) = self.lambda_max {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("lambda_max = {l}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiBarResult {
    pub eps: f64,
    pub family: FamilyKind,
    /// `Φ` of the best member found, or `Φ(F, G)` if none improved on it.
    pub best: f64,
    pub baseline: f64,
    pub decrease: f64,
    /// Search coordinates of the best member; empty when it is `(F, G)`.
    pub params: Vec<f64>,
    pub named: BTreeMap<String, f64>,
    pub evaluations: usize,
    pub improved: bool,
    pub warnings: Vec<String>,
}

/// A pair `(F, G)` and a functional `Φ`, with the baseline `Φ(F, G)` cached.
#[derive(Debug, Clone)]
pub struct RateProblem {
    f: JetField,
    g: JetField,
    domain: Domain2,
    evaluator: PhiEvaluator,
    opts: SearchOptions,
    lip_f: f64,
    lip_g: f64,
    extent: f64,
    baseline: f64,
}

#[derive(Debug, Default)]
struct Track {
    used: usize,
    best: Option<(f64, Vec<f64>)>,
    error: Option<RateError>,
}

impl Track {
    fn offer(&mut self, v: f64, x: &[f64]) {
        if self.best.as_ref().is_none_or(|(b, _)| v < *b) {
            self.best = Some((v, x.to_vec()));
        }
    }
}

struct Objective<'a> {
    problem: &'a RateProblem,
    family: FamilyKind,
    eps: f64,
    bx: &'a ParamBox,
    limit: usize,
    track: &'a Mutex<Track>,
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> Result<f64, argmin::core::Error> {
        let mut t = self.track.lock().expect("search state poisoned");
        if t.used >= self.limit {
            return Ok(f64::INFINITY);
        }
        t.used += 1;
        let y = self.bx.clamp(x);
        match self.problem.evaluate_in_box(self.family, self.eps, &y) {
            Ok(v) => {
                t.offer(v, &y);
                Ok(v)
            }
            Err(e) => {
                t.error = Some(e.clone());
                Err(argmin::core::Error::msg(e.to_string()))
            }
        }
    }
}

fn gradient_bound(f: &JetField, domain: &Domain2) -> f64 {
    domain
        .grid()
        .eval(|p, q| {
            let j = f.jet_order(p, q, 1);
            j.deriv(1, 0).abs().max(j.deriv(0, 1).abs())
        })
        .max()
}

impl RateProblem {
    pub fn new(f: &JetField, g: &JetField, kind: DomainKind, spec: PhiSpec, opts: SearchOptions) -> Result<Self, RateError> {
        opts.validate()?;
        let domain = match f.domain().or(g.domain()) {
            Some(d) => *d,
            None => Domain2::new(kind, opts.grid_n)?,
        };
        let evaluator = PhiEvaluator::new(spec, domain.kind).with_candidates(opts.refine);
        let baseline = evaluator.evaluate(f, g, domain.n)?;
        let extent = match domain.kind {
            DomainKind::Torus => TAU,
            DomainKind::Rectangle { p, q, .. } => (p.1 - p.0).max(q.1 - q.0),
        };
        Ok(Self {
            lip_f: gradient_bound(f, &domain),
            lip_g: gradient_bound(g, &domain),
            f: f.clone(),
            g: g.clone(),
            domain,
            evaluator,
            opts,
            extent,
            baseline,
        })
    }

    /// `Φ(F, G)` on the base grid.
    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    pub fn options(&self) -> &SearchOptions {
        &self.opts
    }

    pub fn spec(&self) -> PhiSpec {
        self.evaluator.spec()
    }

    pub fn domain(&self) -> &Domain2 {
        &self.domain
    }

    pub fn fields(&self) -> (&JetField, &JetField) {
        (&self.f, &self.g)
    }

    pub fn param_box(&self, family: FamilyKind, eps: f64) -> ParamBox {
        let lam = self.opts.lambda_max.unwrap_or_else(|| default_lambda_max(eps));
        family.param_box(lam, self.opts.budget)
    }

    /// Grid size resolving member `x` with the configured points per period.
    pub fn grid_for(&self, family: FamilyKind, x: &[f64]) -> usize {
        let freq = family.frequency(x, self.lip_f, self.lip_g);
        let need = (self.opts.points_per_wave * freq * self.extent / TAU).ceil();
        let n = if need.is_finite() { need as usize } else { self.opts.max_grid_n };
        let n = n.clamp(self.domain.n, self.opts.max_grid_n.max(self.domain.n));
        n + n % 2
    }

    /// The perturbed pair for `x` (clamped into the box).
    pub fn member(&self, family: FamilyKind, eps: f64, x: &[f64]) -> Result<(JetField, JetField), RateError> {
        let y = self.param_box(family, eps).clamp(x);
        Ok(family.member(&self.f, &self.g, eps, &y, self.opts.seed)?)
    }

    /// `Φ` of member `x` (clamped into the box).
    pub fn evaluate(&self, family: FamilyKind, eps: f64, x: &[f64]) -> Result<f64, RateError> {
        check_eps(eps)?;
        let y = self.param_box(family, eps).clamp(x);
        self.evaluate_in_box(family, eps, &y)
    }

    fn evaluate_in_box(&self, family: FamilyKind, eps: f64, y: &[f64]) -> Result<f64, RateError> {
        let (fp, gp) = family.member(&self.f, &self.g, eps, y, self.opts.seed)?;
        Ok(self.evaluator.evaluate(&fp, &gp, self.grid_for(family, y))?)
    }

    /// Best member of `family` in the `ε`-ball. `warm` is a member found at
    /// a smaller radius; it is re-expressed at `ε` and evaluated first, so
    /// results are monotone along an increasing `ε` sequence.
    pub fn phi_bar_upper(&self, family: FamilyKind, eps: f64, warm: Option<(&[f64], f64)>) -> Result<PhiBarResult, RateError> {
        check_eps(eps)?;
        let mut out = PhiBarResult {
            eps,
            family,
            best: self.baseline,
            baseline: self.baseline,
            decrease: 0.0,
            params: Vec::new(),
            named: BTreeMap::new(),
            evaluations: 0,
            improved: false,
            warnings: Vec::new(),
        };
        if eps == 0.0 {
            return Ok(out);
        }
        let budget = self.opts.budget;
        let bx = self.param_box(family, eps);
        let mut cands: Vec<Vec<f64>> = Vec::new();
        if let Some((x, e0)) = warm {
            if x.len() == bx.dim() && e0 <= eps {
                cands.push(bx.clamp(&family.rescale(x, e0, eps)));
            }
        }
        cands.extend(family.sweep(eps, budget).iter().map(|x| bx.clamp(x)));
        if cands.len() > budget {
            cands.truncate(budget);
            out.warnings.push(format!("budget {budget} exhausted during the coarse sweep"));
        }
        let values: Vec<f64> = cands
            .par_iter()
            .map(|x| self.evaluate_in_box(family, eps, x))
            .collect::<Result<_, _>>()?;
        let mut track = Track {
            used: cands.len(),
            ..Default::default()
        };
        for (v, x) in values.iter().zip(&cands) {
            track.offer(*v, x);
        }

        let remaining = budget - track.used;
        if !family.is_discrete() && remaining > bx.dim() {
            if let Some((_, x0)) = track.best.clone() {
                let simplex = initial_simplex(&x0, &family.simplex_steps(), &bx);
                let limit = budget;
                let track_m = Mutex::new(track);
                let obj = Objective {
                    problem: self,
                    family,
                    eps,
                    bx: &bx,
                    limit,
                    track: &track_m,
                };
                let solver = NelderMead::new(simplex)
                    .with_sd_tolerance(1e-12)
                    .map_err(|e| RateError::Optimizer(e.to_string()))?;
                let run = Executor::new(obj, solver).configure(|s| s.max_iters(remaining as u64)).run().map(|_| ());
                track = track_m.into_inner().expect("search state poisoned");
                if let Some(e) = track.error.take() {
                    return Err(e);
                }
                run.map_err(|e| RateError::Optimizer(e.to_string()))?;
            }
        }

        out.evaluations = track.used;
        match track.best {
            Some((v, x)) if v < self.baseline => {
                out.best = v;
                out.decrease = self.baseline - v;
                out.named = family.named(&x);
                out.params = x;
                out.improved = true;
            }
            _ => out.warnings.push("no member improved on the unperturbed value".into()),
        }
        Ok(out)
    }
}

fn check_eps(eps: f64) -> Result<(), RateError> {
    if eps >= 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(RateError::InvalidEpsilon(eps))
    }
}

/// `x0` plus one vertex per coordinate; a step that the box would cancel is
/// taken in the opposite direction.
fn initial_simplex(x0: &[f64], steps: &[f64], bx: &ParamBox) -> Vec<Vec<f64>> {
    let mut s = vec![x0.to_vec()];
    for (i, &h) in steps.iter().enumerate() {
        let mut v = x0.to_vec();
        v[i] += h;
        let c = bx.clamp(&v);
        if (c[i] - x0[i]).abs() < 0.5 * h.abs() {
            v[i] = x0[i] - h;
        }
        s.push(bx.clamp(&v));
    }
    s
}

/// One-shot search on a fresh problem.
pub fn phi_bar_upper(
    f: &JetField,
    g: &JetField,
    kind: DomainKind,
    eps: f64,
    spec: PhiSpec,
    family: FamilyKind,
    opts: SearchOptions,
) -> Result<PhiBarResult, RateError> {
    RateProblem::new(f, g, kind, spec, opts)?.phi_bar_upper(family, eps, None)
}

//! Construction of the profiles `u, w, v, a` and the fields `F, G, F_N, R`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::rpoly::{kappa_search, ALPHA0, GAMMA, R_BOUND};
use super::spline::{Spline, SplineBuilder};
use super::WitnessError;
use crate::field::jet::MAX_JET_ORDER;
use crate::field::{Jet, JetField, Provenance};

/// `w′(c₂)`; also the level of the slow part of `w′` on `[c₂, c₃]`.
pub const W_PRIME_EDGE: f64 = 0.001;
/// Slope caps outside the wiggle: `|w′| ≤ 0.01`, `|a′| ≤ 0.03`.
pub const W_SLOPE_CAP: f64 = 0.01;
pub const A_SLOPE_CAP: f64 = 0.03;
pub const W_CAP: f64 = 3.0;
pub const A_CAP: f64 = 2.0;
/// Corner length of trapezoid pulses as a fraction of the pulse length.
const CORNER: f64 = 1.0 / 16.0;
/// Tolerance for splines that should return exactly to zero.
const SNAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WitnessConfig {
    pub delta: f64,
    pub c1: f64,
    /// `None`: the largest admissible value from [`kappa_search`].
    pub kappa: Option<f64>,
    pub n_list: Vec<u64>,
    pub grid_n: usize,
    /// Length of the slow rise and fall of `w`.
    pub tail_len: f64,
    /// Length of the taper of `a` to zero.
    pub taper_len: f64,
    /// Value of `w` on `[c₁, c₄]` away from the wiggle.
    pub plateau: f64,
    /// Depth of the negative lobe of `w`.
    pub lobe_depth: f64,
    /// Flat run of `w` between the tails and `[c₁, c₄]`.
    pub gap: f64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            delta: 0.05,
            c1: 126.0,
            kappa: None,
            n_list: vec![100, 1000, 10000],
            grid_n: 2048,
            tail_len: 120.0,
            taper_len: 40.0,
            plateau: 1.05,
            lobe_depth: 1.0,
            gap: 5.0,
        }
    }
}

impl WitnessConfig {
    pub fn validate(&self) -> Result<(), WitnessError> {
        let bad = |m: String| Err(WitnessError::InvalidConfig(m));
        if !(self.delta > 0.0) {
            return bad(format!("delta must be positive, got {}", self.delta));
        }
        if !(self.c1 > 0.0) {
            return bad(format!("c1 must be positive, got {}", self.c1));
        }
        if let Some(k) = self.kappa {
            if !(k > 0.0) {
                return bad(format!("kappa must be positive, got {k}"));
            }
        }
        if self.n_list.iter().any(|&n| n == 0) {
            return bad("every N must be at least 1".into());
        }
        if self.grid_n < 16 {
            return bad(format!("grid resolution {} is below 16", self.grid_n));
        }
        if !(self.plateau >= 1.0 && self.plateau < 2.0) {
            return bad(format!("plateau {} must lie in [1, 2)", self.plateau));
        }
        if !(self.lobe_depth > 0.0 && self.lobe_depth <= W_CAP) {
            return bad(format!("lobe depth {} must lie in (0, 3]", self.lobe_depth));
        }
        if !(self.tail_len > 0.0 && self.taper_len > 0.0 && self.gap > 0.0) {
            return bad("tail, taper and gap lengths must be positive".into());
        }
        Ok(())
    }

    pub fn c(&self) -> [f64; 4] {
        let d = self.delta;
        [self.c1, self.c1 + d, self.c1 + 2.0 * d, self.c1 + 3.0 * d]
    }
}

/// The 1-D profiles behind the fields.
#[derive(Debug, Clone, Serialize)]
pub struct Profiles {
    pub du: Spline,
    pub u: Spline,
    pub dw: Spline,
    pub w: Spline,
    pub v: Spline,
    /// `a` away from `[c₁, c₄]`.
    pub a_outer: Spline,
    pub da_outer: Spline,
    /// On `[c₁, c₄]`, `a = a_base − γ·ln(w / w_ref)`.
    pub zone: (f64, f64),
    pub a_base: f64,
    pub w_ref: f64,
}

fn derivs_of(j: &Jet) -> [f64; 5] {
    std::array::from_fn(|k| if k <= j.order() { j.deriv(0, k) } else { 0.0 })
}

impl Profiles {
    fn in_zone(&self, q: f64) -> bool {
        q >= self.zone.0 && q <= self.zone.1
    }

    pub fn a(&self, q: f64) -> [f64; 5] {
        if !self.in_zone(q) {
            return self.a_outer.derivs(q);
        }
        let ln = Jet::univariate_q(&self.w.derivs(q), MAX_JET_ORDER).ln();
        let mut d = derivs_of(&ln);
        d[0] -= self.w_ref.ln();
        let mut out = d.map(|x| -GAMMA * x);
        out[0] += self.a_base;
        out
    }

    /// `a′, a″, …, a⁽⁵⁾`.
    pub fn da(&self, q: f64) -> [f64; 5] {
        if !self.in_zone(q) {
            return self.da_outer.derivs(q);
        }
        let w = Jet::univariate_q(&self.w.derivs(q), MAX_JET_ORDER);
        let dw = Jet::univariate_q(&self.dw.derivs(q), MAX_JET_ORDER);
        derivs_of(&((dw * w.powi(-1)) * -GAMMA))
    }
}

#[derive(Debug, Clone)]
pub struct WitnessFields {
    pub config: WitnessConfig,
    pub kappa: f64,
    pub c: [f64; 4],
    pub spike_halfwidth: f64,
    /// Peaks of `w′ = 1` and `w′ = −1`.
    pub spikes: [f64; 2],
    /// Length of the flat part of the negative lobe, solved for `∫w = 0`.
    pub lobe_flat: f64,
    pub profiles: Arc<Profiles>,
}

fn pulse_height(rise: f64, len: f64, cap: f64, what: &str) -> Result<f64, WitnessError> {
    let h = rise / (len * (1.0 - CORNER));
    if h.abs() > cap {
        return Err(WitnessError::Infeasible(format!(
            "{what}: length {len} needs slope {:.4} above the cap {cap}",
            h.abs()
        )));
    }
    Ok(h)
}

fn build_dw(cfg: &WitnessConfig, c: [f64; 4], h: f64, spikes: [f64; 2], lobe_flat: f64) -> Result<Spline, WitnessError> {
    let (t, d) = (cfg.tail_len, cfg.delta);
    let start = c[0] - cfg.gap - t;
    if start < 0.0 {
        return Err(WitnessError::Infeasible(format!("w would start at {start} < 0; increase c1")));
    }
    let e = W_PRIME_EDGE;
    let peak = 1.0 - e;
    let mut b = SplineBuilder::new(start);
    b.pulse(t, t * CORNER, pulse_height(cfg.plateau, t, W_SLOPE_CAP, "rise of w")?);
    b.flat_to(c[1] - 0.15 * d, 0.0)?;
    b.step(0.15 * d, 0.0, e);
    b.flat_to(spikes[0] - h, e)?;
    b.step(h, e, peak).step_down(h, e, peak);
    b.flat_to(c[1] + 0.35 * d, e)?;
    b.step(0.3 * d, e, -2.0 * e);
    b.flat_to(spikes[1] - h, -e)?;
    b.step(h, -e, -peak).step_down(h, -e, -peak);
    b.flat_to(c[2], -e)?;
    b.step(0.15 * d, -e, e);
    b.flat_to(c[3] + cfg.gap, 0.0)?;
    let fall = cfg.plateau + cfg.lobe_depth;
    b.pulse(2.0 * t, 2.0 * t * CORNER, -pulse_height(fall, 2.0 * t, W_SLOPE_CAP, "fall of w")?);
    b.flat(lobe_flat, 0.0);
    b.pulse(t, t * CORNER, pulse_height(cfg.lobe_depth, t, W_SLOPE_CAP, "return of w")?);
    b.build()
}

fn build_da(cfg: &WitnessConfig, c: [f64; 4]) -> Result<Spline, WitnessError> {
    let t = cfg.taper_len;
    let start = c[0] - cfg.gap / 2.0 - t;
    if start < 0.0 {
        return Err(WitnessError::Infeasible(format!("a would start at {start} < 0; increase c1")));
    }
    let h = pulse_height(ALPHA0, t, A_SLOPE_CAP, "taper of a")?;
    let mut b = SplineBuilder::new(start);
    b.pulse(t, t * CORNER, h);
    b.flat_to(c[3] + cfg.gap / 2.0, 0.0)?;
    b.pulse(t, t * CORNER, -h);
    b.build()
}

/// Builds `u, w, v, a` for `cfg`.
pub fn build_witness(cfg: &WitnessConfig) -> Result<WitnessFields, WitnessError> {
    cfg.validate()?;
    let kappa = match cfg.kappa {
        Some(k) => k,
        None => kappa_search(GAMMA, R_BOUND, ALPHA0)?,
    };
    let c = cfg.c();
    let d = cfg.delta;
    // The spikes of w′ must fit inside the flat parts of its slow component,
    // and their area bounds how far ln w, hence a, moves on [c₁, c₄].
    let h = (0.08 * d).min(kappa * cfg.plateau / (2.0 * GAMMA));
    let spikes = [c[1] + 0.25 * d, c[2] - 0.25 * d];

    // u′ = σ(p − 1) − σ(p − 3) with σ(x) = S(1 − |x|).
    let mut b = SplineBuilder::new(0.0);
    b.step(1.0, 0.0, 1.0).step_down(1.0, 0.0, 1.0).step(1.0, 0.0, -1.0).step_down(1.0, 0.0, -1.0);
    let du = b.build()?;
    let u = du.integral(0.0)?.snapped(SNAP)?;

    let dw0 = build_dw(cfg, c, h, spikes, 0.0)?;
    let i0 = dw0.integral(0.0)?.snapped(SNAP)?.integral(0.0)?.right();
    let lobe_flat = i0 / cfg.lobe_depth;
    if lobe_flat < 0.0 {
        return Err(WitnessError::Infeasible(format!("negative lobe would need length {lobe_flat}")));
    }
    let dw = build_dw(cfg, c, h, spikes, lobe_flat)?;
    let w = dw.integral(0.0)?.snapped(SNAP)?;
    let v = w.integral(0.0)?;

    let da_outer = build_da(cfg, c)?;
    let a_outer = da_outer.integral(0.0)?.snapped(SNAP)?;

    let profiles = Profiles {
        a_base: a_outer.value(c[0]),
        w_ref: w.value(c[0]),
        zone: (c[0], c[3]),
        du,
        u,
        dw,
        w,
        v,
        a_outer,
        da_outer,
    };
    Ok(WitnessFields {
        config: cfg.clone(),
        kappa,
        c,
        spike_halfwidth: h,
        spikes,
        lobe_flat,
        profiles: Arc::new(profiles),
    })
}

impl WitnessFields {
    /// Support of `u` (the interval `I`).
    pub fn support_p(&self) -> (f64, f64) {
        self.profiles.u.support()
    }

    /// Interval `J` containing the supports of `v` and `a`.
    pub fn support_q(&self) -> (f64, f64) {
        let (a0, a1) = self.profiles.a_outer.support();
        let (w0, w1) = self.profiles.w.support();
        (a0.min(w0), a1.max(w1))
    }

    /// `∫w` over ℝ.
    pub fn w_integral(&self) -> f64 {
        self.profiles.v.right()
    }

    pub fn u(&self, p: f64) -> [f64; 5] {
        self.profiles.u.derivs(p)
    }

    pub fn w(&self, q: f64) -> [f64; 5] {
        self.profiles.w.derivs(q)
    }

    /// `w′, …, w⁽⁵⁾`.
    pub fn dw(&self, q: f64) -> [f64; 5] {
        self.profiles.dw.derivs(q)
    }

    pub fn v(&self, q: f64) -> [f64; 5] {
        self.profiles.v.derivs(q)
    }

    pub fn a(&self, q: f64) -> [f64; 5] {
        self.profiles.a(q)
    }

    pub fn da(&self, q: f64) -> [f64; 5] {
        self.profiles.da(q)
    }

    /// `F = u(p)`.
    pub fn f(&self) -> JetField {
        let pr = self.profiles.clone();
        JetField::of_p("F", move |p| pr.u.derivs(p))
    }

    /// `G = −v(q)`.
    pub fn g(&self) -> JetField {
        let pr = self.profiles.clone();
        JetField::of_q("G", move |q| pr.v.derivs(q).map(|x| -x))
    }

    /// `F_N = u(p) + a(q)·sin(N u(p)) / N`.
    pub fn f_n(&self, n: u64) -> JetField {
        let pr = self.profiles.clone();
        let nf = n as f64;
        JetField::from_fn(format!("F_{n}"), MAX_JET_ORDER, Provenance::Analytic, None, move |p, q, k| {
            let ju = Jet::univariate_p(&pr.u.derivs(p), k);
            let ja = Jet::univariate_q(&pr.a(q), k);
            ju + ja * (ju * nf).sin() * (1.0 / nf)
        })
    }

    /// `R = w′(a cos Nu + 1)² + a′w(a + cos Nu)`.
    pub fn r_field(&self, n: u64) -> JetField {
        let pr = self.profiles.clone();
        let nf = n as f64;
        JetField::from_fn(format!("R_{n}"), MAX_JET_ORDER, Provenance::Analytic, None, move |p, q, k| {
            let z = (Jet::univariate_p(&pr.u.derivs(p), k) * nf).cos();
            let w = Jet::univariate_q(&pr.w.derivs(q), k);
            let dw = Jet::univariate_q(&pr.dw.derivs(q), k);
            let a = Jet::univariate_q(&pr.a(q), k);
            let da = Jet::univariate_q(&pr.da(q), k);
            let s = a * z + 1.0;
            dw * s * s + da * w * (a + z)
        })
    }

    /// Knots and coefficients of every spline, with the constants needed to
    /// rebuild `a` on `[c₁, c₄]`.
    pub fn knots_json(&self) -> serde_json::Value {
        let pr = &*self.profiles;
        let spline = |s: &Spline| json!({ "knots": s.knots(), "coeffs": s.coeffs(), "degree": s.degree() });
        json!({
            "config": self.config,
            "kappa": self.kappa,
            "c": self.c,
            "spike_halfwidth": self.spike_halfwidth,
            "spikes": self.spikes,
            "lobe_flat": self.lobe_flat,
            "w_integral": self.w_integral(),
            "basis": "piece i is a polynomial in s = (x - knots[i]) / (knots[i+1] - knots[i]); zero outside the knots",
            "splines": {
                "u": spline(&pr.u),
                "w": spline(&pr.w),
                "v": spline(&pr.v),
                "a_outer": spline(&pr.a_outer),
            },
            "a_zone": {
                "interval": [pr.zone.0, pr.zone.1],
                "formula": "a = a_base - gamma * ln(w / w_ref)",
                "a_base": pr.a_base,
                "w_ref": pr.w_ref,
                "gamma": GAMMA,
            },
        })
    }
}

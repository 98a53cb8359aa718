//! Invariant checks, the `|R| ≤ 0.99` certificate, the double-bracket ratios
//! for `F_N`, and the compact-support cutoff.

use rayon::prelude::*;
use serde::Serialize;

use super::build::{WitnessFields, A_CAP, A_SLOPE_CAP, W_CAP, W_PRIME_EDGE, W_SLOPE_CAP};
use super::rpoly::{quadratic_max_abs, ALPHA0, GAMMA, R_BOUND};
use super::WitnessError;
use crate::field::{cutoff_residual, plateau_field, CutoffReport, Grid, Jet, Plateau};

/// Slack for equalities that hold exactly in real arithmetic.
pub const EXACT_TOL: f64 = 1e-12;
/// `|∫w|` limit.
pub const INTEGRAL_TOL: f64 = 1e-10;
/// `|R|` limit on `ℝ₊ ∖ [c₁, c₄]`.
pub const OUTSIDE_R_BOUND: f64 = 0.36;
/// Tolerance of the cutoff identities.
pub const CUTOFF_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub checks: Vec<InvariantCheck>,
    pub pass: bool,
}

impl InvariantReport {
    pub fn failures(&self) -> Vec<&InvariantCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

fn uniform(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    (0..=n).map(move |i| lo + (hi - lo) * i as f64 / n as f64)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// A 1-D grid in `q` with spacing at most `δ/100` over the support of `w`
/// and `a`, `h/50` around the spikes of `w′`, plus every knot.
pub fn fine_q_nodes(fields: &WitnessFields) -> Vec<f64> {
    let (lo, hi) = fields.support_q();
    let h = fields.spike_halfwidth;
    let mut v: Vec<f64> = uniform(lo - 1.0, hi + 1.0, fields.config.delta / 100.0).collect();
    for s in fields.spikes {
        v.extend(uniform(s - 1.5 * h, s + 1.5 * h, h / 50.0));
    }
    v.extend_from_slice(fields.profiles.dw.knots());
    v.extend_from_slice(fields.profiles.da_outer.knots());
    sorted(v)
}

/// Checks every structural condition on `u, w, a` on [`fine_q_nodes`].
pub fn check_invariants(fields: &WitnessFields) -> InvariantReport {
    let [c1, c2, c3, c4] = fields.c;
    let qs = fine_q_nodes(fields);
    let pr = &*fields.profiles;
    let mut checks = Vec::new();
    let mut push = |name: &str, value: f64, limit: f64, pass: bool| {
        checks.push(InvariantCheck { name: name.into(), value, limit, pass });
    };

    let mut max_in = f64::MIN;
    let mut min_in = f64::MAX;
    let (mut max_g, mut min_g) = (f64::MIN, f64::MAX);
    let (mut w_lo, mut w_hi) = (f64::MAX, f64::MIN);
    let mut dw_out: f64 = 0.0;
    let mut w_out: f64 = 0.0;
    let mut a_dev: f64 = 0.0;
    let mut a_ode: f64 = 0.0;
    let (mut da_out, mut a_out): (f64, f64) = (0.0, 0.0);
    for &q in &qs {
        let w = pr.w.value(q);
        let dw = pr.dw.value(q);
        let a = fields.a(q)[0];
        let da = fields.da(q)[0];
        max_g = max_g.max(dw);
        min_g = min_g.min(dw);
        if (c2..=c3).contains(&q) {
            max_in = max_in.max(dw);
            min_in = min_in.min(dw);
        } else if q >= 0.0 {
            dw_out = dw_out.max(dw.abs());
        }
        if (c1..=c4).contains(&q) {
            w_lo = w_lo.min(w);
            w_hi = w_hi.max(w);
            a_dev = a_dev.max((a - ALPHA0).abs());
            a_ode = a_ode.max((da + GAMMA * dw / w).abs());
        } else if q >= 0.0 {
            w_out = w_out.max(w.abs());
            da_out = da_out.max(da.abs());
            a_out = a_out.max(a.abs());
        }
    }
    let e = W_PRIME_EDGE;
    push("w' max on [c2,c3] = 1", max_in, 1.0, (max_in - 1.0).abs() <= EXACT_TOL);
    push("w' min on [c2,c3] = -1", min_in, -1.0, (min_in + 1.0).abs() <= EXACT_TOL);
    push("w'(c2) = 0.001", pr.dw.value(c2), e, (pr.dw.value(c2) - e).abs() <= EXACT_TOL);
    push("w'(c3) = -0.001", pr.dw.value(c3), -e, (pr.dw.value(c3) + e).abs() <= EXACT_TOL);
    push("min w on [c1,c4] >= 1", w_lo, 1.0, w_lo >= 1.0);
    push("max w on [c1,c4] <= 2", w_hi, 2.0, w_hi <= 2.0);
    push("|w'| <= 0.01 off [c2,c3]", dw_out, W_SLOPE_CAP, dw_out <= W_SLOPE_CAP);
    push("|w| <= 3 off [c1,c4]", w_out, W_CAP, w_out <= W_CAP);
    push("max w' = 1 globally", max_g, 1.0, (max_g - 1.0).abs() <= EXACT_TOL);
    push("min w' = -1 globally", min_g, -1.0, (min_g + 1.0).abs() <= EXACT_TOL);
    let iw = fields.w_integral();
    push("integral of w = 0", iw.abs(), INTEGRAL_TOL, iw.abs() <= INTEGRAL_TOL);
    push("a' = -1.63 w'/w on [c1,c4]", a_ode, EXACT_TOL, a_ode <= EXACT_TOL);
    push("|a - 1.1| <= kappa on [c1,c4]", a_dev, fields.kappa, a_dev <= fields.kappa);
    push("|a'| <= 0.03 off [c1,c4]", da_out, A_SLOPE_CAP, da_out <= A_SLOPE_CAP + EXACT_TOL);
    push("|a| <= 2 off [c1,c4]", a_out, A_CAP, a_out <= A_CAP);

    // u: compact support, max |u'| = 1.
    let (p0, p1) = pr.u.support();
    let max_du = uniform(p0, p1, 1e-4).map(|p| pr.du.value(p).abs()).fold(0.0, f64::max);
    push("max |u'| = 1", max_du, 1.0, (max_du - 1.0).abs() <= EXACT_TOL);
    let ends = [pr.u.derivs(p0 - 1.0)[0], pr.u.derivs(p1 + 1.0)[0], pr.v.derivs(qs[0])[0], pr.v.right(), pr.a_outer.right()];
    let tail = ends.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    push("u, v, a vanish outside their supports", tail, INTEGRAL_TOL, tail <= INTEGRAL_TOL);
    let jump = [&pr.du, &pr.u, &pr.dw, &pr.w, &pr.v, &pr.da_outer, &pr.a_outer]
        .iter()
        .map(|s| s.max_jump())
        .fold(0.0, f64::max);
    push("C4 matching at every knot", jump, 1e-9, jump <= 1e-9);
    let pass = checks.iter().all(|c| c.pass);
    InvariantReport { checks, pass }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeReport {
    /// `max_q max_{|z|≤1} |w′(az+1)² + a′w(a+z)|`.
    pub max_abs_r: f64,
    pub worst_q: f64,
    /// The same maximum over `ℝ₊ ∖ [c₁, c₄]`.
    pub max_abs_r_outside: f64,
    /// `max env(q) / |w′(q)|` over `[c₁, c₄]` where `w′ ≠ 0`.
    pub max_ratio_in_zone: f64,
}

/// `max_{|z|≤1} |R|` at `q`; `z` stands for `cos N u(p)`.
pub fn r_envelope_at(fields: &WitnessFields, q: f64) -> f64 {
    let w = fields.w(q)[0];
    let dw = fields.dw(q)[0];
    let a = fields.a(q)[0];
    let da = fields.da(q)[0];
    // w′(a z + 1)² + a′w(a + z) = c0 + c1 z + c2 z²
    quadratic_max_abs(dw + da * w * a, 2.0 * a * dw + da * w, dw * a * a)
}

/// Certifies `|R| ≤ 0.99` for every `N` and `p`, and the `0.36` bound away
/// from `[c₁, c₄]`.
pub fn r_envelope(fields: &WitnessFields) -> Result<EnvelopeReport, WitnessError> {
    let [c1, _, _, c4] = fields.c;
    let mut rep = EnvelopeReport { max_abs_r: 0.0, worst_q: f64::NAN, max_abs_r_outside: 0.0, max_ratio_in_zone: 0.0 };
    for q in fine_q_nodes(fields) {
        let env = r_envelope_at(fields, q);
        if env > rep.max_abs_r {
            rep.max_abs_r = env;
            rep.worst_q = q;
        }
        if (c1..=c4).contains(&q) {
            let dw = fields.dw(q)[0].abs();
            if dw > 0.0 {
                rep.max_ratio_in_zone = rep.max_ratio_in_zone.max(env / dw);
            }
        } else if q >= 0.0 {
            rep.max_abs_r_outside = rep.max_abs_r_outside.max(env);
        }
    }
    if rep.max_abs_r > R_BOUND {
        return Err(WitnessError::BoundViolated { what: "|R|", q: rep.worst_q, value: rep.max_abs_r, limit: R_BOUND });
    }
    if rep.max_abs_r_outside > OUTSIDE_R_BOUND {
        return Err(WitnessError::BoundViolated {
            what: "|R| off [c1,c4]",
            q: f64::NAN,
            value: rep.max_abs_r_outside,
            limit: OUTSIDE_R_BOUND,
        });
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem41Row {
    #[serde(rename = "N")]
    pub n: u64,
    /// `max{{F_N,G},F_N} / max{{F,G},F}`.
    pub ratio_max: f64,
    /// `min{{F_N,G},F_N} / min{{F,G},F}`.
    pub ratio_min: f64,
    /// `‖{{F_N,G},F_N} − u′²R‖` on the grid.
    pub residual: f64,
    /// `max|w a′| · max|u″| · (1 + max|a|) / N`, which bounds the residual.
    pub residual_bound: f64,
    /// `max |R|` on the grid.
    #[serde(rename = "maxR")]
    pub max_r: f64,
    pub max_fgf: f64,
    pub min_fgf: f64,
    pub grid_points: usize,
}

impl Theorem41Row {
    /// Both ratios are below `0.99` up to the `O(1/N)` remainder.
    pub fn within_bound(&self) -> bool {
        let slack = self.residual_bound / self.max_fgf.min(-self.min_fgf);
        self.ratio_max <= R_BOUND + slack && self.ratio_min <= R_BOUND + slack
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem41Report {
    pub rows: Vec<Theorem41Row>,
    pub envelope: EnvelopeReport,
}

/// Grid for the double bracket at frequency `n`: `grid_n` nodes across each
/// support, refined where `u′² = 1` so that `cos Nu` is resolved, and around
/// the spikes of `w′`.
pub fn verification_grid(fields: &WitnessFields, n: u64, grid_n: usize) -> Grid {
    let (p0, p1) = fields.support_p();
    let (q0, q1) = fields.support_q();
    let nf = n as f64;
    let mut ps: Vec<f64> = uniform(p0, p1, (p1 - p0) / grid_n as f64).collect();
    // u′ = ±1 at p = 1, 3.
    let half = (4.0 * std::f64::consts::PI / nf).min(0.25);
    for c in [1.0, 3.0] {
        ps.extend(uniform(c - half, c + half, 0.1 / nf));
    }
    let mut qs: Vec<f64> = uniform(q0, q1, (q1 - q0) / grid_n as f64).collect();
    let [c1, _, _, c4] = fields.c;
    qs.extend(uniform(c1, c4, fields.config.delta / 200.0));
    let h = fields.spike_halfwidth;
    for s in fields.spikes {
        qs.extend(uniform(s - 1.5 * h, s + 1.5 * h, h / 40.0));
    }
    qs.extend(fields.profiles.dw.knots().iter().filter(|&&k| (c1..=c4).contains(&k)));
    Grid::tensor(sorted(ps), sorted(qs))
}

struct Acc {
    max_d: f64,
    min_d: f64,
    max_e: f64,
    min_e: f64,
    res: f64,
    max_r: f64,
}

impl Acc {
    fn new() -> Self {
        Acc { max_d: f64::MIN, min_d: f64::MAX, max_e: f64::MIN, min_e: f64::MAX, res: 0.0, max_r: 0.0 }
    }

    fn merge(self, o: Acc) -> Acc {
        Acc {
            max_d: self.max_d.max(o.max_d),
            min_d: self.min_d.min(o.min_d),
            max_e: self.max_e.max(o.max_e),
            min_e: self.min_e.min(o.min_e),
            res: self.res.max(o.res),
            max_r: self.max_r.max(o.max_r),
        }
    }
}

/// Evaluates `{{F_N,G},F_N}` with order-2 jets on `grid` and compares it with
/// `{{F,G},F}` and `u′²R`.
pub fn theorem41_row(fields: &WitnessFields, n: u64, grid: &Grid) -> Result<Theorem41Row, WitnessError> {
    let nf = n as f64;
    let up: Vec<[f64; 5]> = grid.p().iter().map(|&p| fields.u(p)).collect();
    let qd: Vec<([f64; 5], [f64; 5], [f64; 5], [f64; 5])> =
        grid.q().iter().map(|&q| (fields.v(q), fields.a(q), fields.da(q), fields.dw(q))).collect();
    let acc = up
        .par_iter()
        .map(|u| {
            let ju = Jet::univariate_p(&u[..3], 2);
            let phase = ju * nf;
            let (sn, cs) = (phase.sin(), u[0].mul_add(nf, 0.0).cos());
            let mut acc = Acc::new();
            for (v, a, da, dw) in &qd {
                let jg = Jet::univariate_q(&[-v[0], -v[1], -v[2]], 2);
                let ja = Jet::univariate_q(&a[..3], 2);
                let jf = ju + ja * sn * (1.0 / nf);
                let d = jf.poisson(&jg).poisson(&jf).value();
                let e = ju.poisson(&jg).poisson(&ju).value();
                let (w, a0) = (v[1], a[0]);
                let s = a0 * cs + 1.0;
                let r = dw[0] * s * s + da[0] * w * (a0 + cs);
                acc.max_d = acc.max_d.max(d);
                acc.min_d = acc.min_d.min(d);
                acc.max_e = acc.max_e.max(e);
                acc.min_e = acc.min_e.min(e);
                acc.res = acc.res.max((d - u[1] * u[1] * r).abs());
                acc.max_r = acc.max_r.max(r.abs());
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Acc::new(), Acc::merge);
    if !(acc.max_e > 0.0 && acc.min_e < 0.0) {
        return Err(WitnessError::Infeasible("{{F,G},F} does not change sign on the grid".into()));
    }
    // Residual = w a′ u″ (1 + a cos Nu) sin Nu / N, bounded factor by factor.
    let qs = fine_q_nodes(fields);
    let wa = qs.iter().map(|&q| (fields.w(q)[0] * fields.da(q)[0]).abs()).fold(0.0, f64::max);
    let amax = qs.iter().map(|&q| fields.a(q)[0].abs()).fold(0.0, f64::max);
    let (p0, p1) = fields.support_p();
    let upp = uniform(p0, p1, 1e-4).map(|p| fields.u(p)[2].abs()).fold(0.0, f64::max);
    let residual_bound = wa * upp * (1.0 + amax) / nf * (1.0 + 1e-6) + EXACT_TOL;
    let row = Theorem41Row {
        n,
        ratio_max: acc.max_d / acc.max_e,
        ratio_min: acc.min_d / acc.min_e,
        residual: acc.res,
        residual_bound,
        max_r: acc.max_r,
        max_fgf: acc.max_e,
        min_fgf: acc.min_e,
        grid_points: grid.len(),
    };
    if row.residual > row.residual_bound {
        return Err(WitnessError::ResidualNotDecaying { n, residual: row.residual, bound: row.residual_bound });
    }
    Ok(row)
}

/// One row per `N`, after certifying the `|R|` envelope.
pub fn verify_theorem41(fields: &WitnessFields, n_list: &[u64], grid_n: usize) -> Result<Theorem41Report, WitnessError> {
    if grid_n < 2048 {
        return Err(WitnessError::InvalidConfig(format!("verification needs grid_n >= 2048, got {grid_n}")));
    }
    if n_list.iter().any(|&n| n == 0) {
        return Err(WitnessError::InvalidConfig("every N must be at least 1".into()));
    }
    let envelope = r_envelope(fields)?;
    let rows = n_list
        .iter()
        .map(|&n| theorem41_row(fields, n, &verification_grid(fields, n, grid_n)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Theorem41Report { rows, envelope })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffWitnessReport {
    pub plateau_p: Plateau,
    pub plateau_q: Plateau,
    /// `(F, G)`: residual of `{φF,φG} = φ²{F,G}` and the maxima.
    pub max_side: CutoffReport,
    /// Same for `(−F, −G)`, whose double bracket is `−{{F,G},F}`: the minima.
    pub min_side: CutoffReport,
    /// `(F_N, G)` when a frequency was given.
    pub f_n: Option<(u64, CutoffReport, CutoffReport)>,
    pub pass: bool,
}

/// Multiplies by a plateau `φ ≡ 1` on `I × J` widened by `margin` (ramps of
/// length `ramp`) and checks the cutoff identities on a grid of about `n²`
/// points covering the ramps.
pub fn cutoff_witness(
    fields: &WitnessFields,
    margin: f64,
    ramp: f64,
    n: usize,
    freq: Option<u64>,
) -> Result<CutoffWitnessReport, WitnessError> {
    if !(margin >= 0.0) || !(ramp > 0.0) {
        return Err(WitnessError::PlateauTooSmall(format!(
            "plateau must contain I x J: margin {margin}, ramp {ramp}"
        )));
    }
    let (p0, p1) = fields.support_p();
    let (q0, q1) = fields.support_q();
    let pp = Plateau::new(p0 - margin, p1 + margin, ramp)?;
    let pq = Plateau::new(q0 - margin, q1 + margin, ramp)?;
    let phi = plateau_field(pp, pq);
    let base = verification_grid(fields, freq.unwrap_or(1), n.max(16));
    let ext = margin + ramp + 0.5;
    let mut ps: Vec<f64> = base.p().to_vec();
    ps.extend(uniform(p0 - ext, p1 + ext, (p1 - p0 + 2.0 * ext) / n as f64));
    let mut qs: Vec<f64> = base.q().to_vec();
    qs.extend(uniform(q0 - ext, q1 + ext, (q1 - q0 + 2.0 * ext) / n as f64));
    let grid = Grid::tensor(sorted(ps), sorted(qs));

    let (f, g) = (fields.f(), fields.g());
    let max_side = cutoff_residual(&f, &g, &phi, &grid)?;
    let min_side = cutoff_residual(&f.neg(), &g.neg(), &phi, &grid)?;
    let f_n = match freq {
        Some(nn) => {
            let fnn = fields.f_n(nn);
            Some((nn, cutoff_residual(&fnn, &g, &phi, &grid)?, cutoff_residual(&fnn.neg(), &g.neg(), &phi, &grid)?))
        }
        None => None,
    };
    let ok = |r: &CutoffReport| {
        r.bracket_residual <= CUTOFF_TOL && r.max_residual <= CUTOFF_TOL * (1.0 + r.uncut_max.abs())
    };
    let pass = ok(&max_side) && ok(&min_side) && f_n.as_ref().is_none_or(|(_, a, b)| ok(a) && ok(b));
    Ok(CutoffWitnessReport { plateau_p: pp, plateau_q: pq, max_side, min_side, f_n, pass })
}

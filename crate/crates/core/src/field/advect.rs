//! Transport of functions along Hamiltonian flows.

use serde::{Deserialize, Serialize};

use super::bracket::BracketWord;
use super::domain::{DomainKind, Grid, GridValues};
use super::jetfield::JetField;
use super::ops::{eval_words, Tolerances};
use super::FieldError;

pub const MIN_STEPS: usize = 4;

/// `sgrad H = (−H_q, H_p)` at `(p, q)`.
fn sgrad(h: &JetField, p: f64, q: f64) -> (f64, f64) {
    let j = h.jet_order(p, q, 1);
    (-j.deriv(0, 1), j.deriv(1, 0))
}

/// Image of `(p, q)` under the time-`t` flow of `H`, classical RK4 with
/// `steps` steps.
pub fn flow_point(h: &JetField, p: f64, q: f64, t: f64, steps: usize) -> (f64, f64) {
    let dt = t / steps as f64;
    let (mut x, mut y) = (p, q);
    for _ in 0..steps {
        let k1 = sgrad(h, x, y);
        let k2 = sgrad(h, x + 0.5 * dt * k1.0, y + 0.5 * dt * k1.1);
        let k3 = sgrad(h, x + 0.5 * dt * k2.0, y + 0.5 * dt * k2.1);
        let k4 = sgrad(h, x + dt * k3.0, y + dt * k3.1);
        x += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        y += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    (x, y)
}

/// Grid values of `K ∘ φ_H^t`.
pub fn advect(h: &JetField, k: &JetField, t: f64, steps: usize, grid: &Grid) -> Result<GridValues, FieldError> {
    if steps < MIN_STEPS {
        return Err(FieldError::Advect(format!("need at least {MIN_STEPS} steps, got {steps}")));
    }
    if h.order() < 1 {
        return Err(FieldError::JetOrder { needed: 1, available: 0 });
    }
    h.check_grid(grid)?;
    k.check_grid(grid)?;
    let bounds = match grid.domain().map(|d| d.kind) {
        Some(DomainKind::Rectangle { p, q, .. }) => Some((p, q)),
        _ => None,
    };
    let out = grid.eval(|p, q| {
        let (x, y) = flow_point(h, p, q, t, steps);
        if let Some((bp, bq)) = bounds {
            if x < bp.0 || x > bp.1 || y < bq.0 || y > bq.1 {
                return f64::NAN;
            }
        }
        k.value(x, y)
    });
    if out.data().iter().any(|v| v.is_nan()) {
        return Err(FieldError::Advect("a trajectory left the rectangle".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YBoundReport {
    pub max_y: f64,
    /// `(max {{sF,tG},sF} + max {{sF,tG},tG}) / 2`
    pub bound: f64,
    pub slack: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks `max Y ≤ (max {{F̃,G̃},F̃} + max {{F̃,G̃},G̃}) / 2` for `F̃ = sF`,
/// `G̃ = tG`, where `Y = G̃ + F̃∘φ_{G̃} − G̃∘φ_{−F̃} − F̃` with time-1 maps.
pub fn y_bound_check(
    f: &JetField,
    g: &JetField,
    s: f64,
    t: f64,
    steps: usize,
    grid: &Grid,
    tol: &Tolerances,
) -> Result<YBoundReport, FieldError> {
    let (fs, gt) = (f.scale(s), g.scale(t));
    let f_after_g = advect(&gt, &fs, 1.0, steps, grid)?;
    let g_after_minus_f = advect(&fs.neg(), &gt, 1.0, steps, grid)?;
    let [fv, gv, x, yb] = eval_words(
        [&BracketWord::f(), &BracketWord::g(), &BracketWord::fgf(), &BracketWord::fgg()],
        &fs,
        &gt,
        grid,
    )?;
    let y = GridValues::from_vec(
        fv.shape().0,
        fv.shape().1,
        (0..fv.data().len())
            .map(|i| gv.data()[i] + f_after_g.data()[i] - g_after_minus_f.data()[i] - fv.data()[i])
            .collect(),
    );
    let max_y = y.max();
    let bound = (x.max() + yb.max()) / 2.0;
    let slack = bound - max_y;
    Ok(YBoundReport {
        max_y,
        bound,
        slack,
        tol: tol.flow,
        pass: slack >= -tol.flow,
    })
}

//! Bracket functionals, the rigidity inequalities and the integral identities.

use serde::{Deserialize, Serialize};

use super::bracket::BracketWord;
use super::domain::{Grid, GridValues};
use super::jet::Jet;
use super::jetfield::JetField;
use super::FieldError;

/// Discretization tolerances: `tol_disc = disc_factor · h²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub disc_factor: f64,
    pub quad: f64,
    pub flow: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            disc_factor: 10.0,
            quad: 1e-6,
            flow: 1e-4,
        }
    }
}

impl Tolerances {
    pub fn disc(&self, grid: &Grid) -> f64 {
        self.disc_factor * grid.h().powi(2)
    }
}

/// Weights `v ∈ ℝ⁴₊ \ {0}` of the functional `Φ^v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct FunctionalVector([f64; 4]);

impl FunctionalVector {
    pub fn new(v: [f64; 4]) -> Result<Self, FieldError> {
        if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(FieldError::InvalidVector(format!("{v:?} has a negative or non-finite entry")));
        }
        if v.iter().all(|x| *x == 0.0) {
            return Err(FieldError::InvalidVector("v must be non-zero".into()));
        }
        Ok(Self(v))
    }

    pub fn get(&self) -> [f64; 4] {
        self.0
    }

    /// `(v2, v1, v3, v4)`: `Φ^v(F, −G) = Φ^{Av}(F, G)`.
    pub fn a(&self) -> Self {
        let [v1, v2, v3, v4] = self.0;
        Self([v2, v1, v3, v4])
    }

    /// `(v1, v2, v4, v3)`: `Φ^v(−F, G) = Φ^{Bv}(F, G)`.
    pub fn b(&self) -> Self {
        let [v1, v2, v3, v4] = self.0;
        Self([v1, v2, v4, v3])
    }

    /// `(v3, v4, v1, v2)`: `Φ^v(−G, −F) = Φ^{Cv}(F, G)`.
    pub fn c(&self) -> Self {
        let [v1, v2, v3, v4] = self.0;
        Self([v3, v4, v1, v2])
    }

    /// `(α²β v1, α²β v2, αβ² v3, αβ² v4)`: `Φ^v(αF, βG) = Φ^w(F, G)`, since
    /// `{{F,G},F}` scales by `α²β` and `{{F,G},G}` by `αβ²`.
    pub fn scaled(&self, alpha: f64, beta: f64) -> Self {
        let [v1, v2, v3, v4] = self.0;
        let (x, y) = (alpha * alpha * beta, alpha * beta * beta);
        Self([x * v1, x * v2, y * v3, y * v4])
    }
}

impl TryFrom<[f64; 4]> for FunctionalVector {
    type Error = FieldError;
    fn try_from(v: [f64; 4]) -> Result<Self, FieldError> {
        Self::new(v)
    }
}

impl From<FunctionalVector> for [f64; 4] {
    fn from(v: FunctionalVector) -> Self {
        v.0
    }
}

fn check_pair(f: &JetField, g: &JetField, grid: &Grid, depth: usize) -> Result<(), FieldError> {
    f.check_grid(grid)?;
    g.check_grid(grid)?;
    if f.domain().is_some() && g.domain().is_some() && f.domain() != g.domain() {
        return Err(FieldError::DomainMismatch);
    }
    let avail = f.order().min(g.order());
    if avail < depth {
        return Err(FieldError::JetOrder {
            needed: depth,
            available: avail,
        });
    }
    Ok(())
}

/// Evaluates several bracket words on the grid, sharing the input jets per
/// node.
pub fn eval_words<const K: usize>(
    words: [&BracketWord; K],
    f: &JetField,
    g: &JetField,
    grid: &Grid,
) -> Result<[GridValues; K], FieldError> {
    for w in &words {
        w.validate()?;
    }
    let depth = words.iter().map(|w| w.depth()).max().unwrap_or(0);
    check_pair(f, g, grid, depth)?;
    Ok(grid.eval_many(|p, q| {
        let jf = f.jet_order(p, q, depth);
        let jg = g.jet_order(p, q, depth);
        std::array::from_fn(|k| words[k].eval_jets(&jf, &jg).value())
    }))
}

/// Grid extrema of the two double brackets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleBracketExtrema {
    pub max_fgf: f64,
    pub min_fgf: f64,
    pub max_fgg: f64,
    pub min_fgg: f64,
}

impl DoubleBracketExtrema {
    pub fn from_values(fgf: &GridValues, fgg: &GridValues) -> Self {
        Self {
            max_fgf: fgf.max(),
            min_fgf: fgf.min(),
            max_fgg: fgg.max(),
            min_fgg: fgg.min(),
        }
    }

    /// `v1·max X − v2·min X + v3·max Y − v4·min Y`.
    pub fn phi(&self, v: &FunctionalVector) -> f64 {
        let [v1, v2, v3, v4] = v.get();
        v1 * self.max_fgf - v2 * self.min_fgf + v3 * self.max_fgg - v4 * self.min_fgg
    }
}

pub fn double_bracket_extrema(f: &JetField, g: &JetField, grid: &Grid) -> Result<DoubleBracketExtrema, FieldError> {
    let [x, y] = eval_words([&BracketWord::fgf(), &BracketWord::fgg()], f, g, grid)?;
    Ok(DoubleBracketExtrema::from_values(&x, &y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiReport {
    pub value: f64,
    pub extrema: DoubleBracketExtrema,
    /// `value ≥ −tol_disc`.
    pub nonnegative: bool,
}

/// `Φ^v(F, G)` with extrema over grid nodes.
pub fn phi_v(v: &FunctionalVector, f: &JetField, g: &JetField, grid: &Grid, tol: &Tolerances) -> Result<PhiReport, FieldError> {
    let extrema = double_bracket_extrema(f, g, grid)?;
    let value = extrema.phi(v);
    Ok(PhiReport {
        value,
        extrema,
        nonnegative: value >= -tol.disc(grid),
    })
}

/// `Ψ(F, G) = ‖{{{F,G},F},F} + {{{F,G},G},G}‖` over grid nodes.
pub fn psi(f: &JetField, g: &JetField, grid: &Grid) -> Result<f64, FieldError> {
    Ok(i_values(f, g, grid)?.sup_norm())
}

/// Grid values of `I = {{{F,G},F},F} + {{{F,G},G},G}`.
pub fn i_values(f: &JetField, g: &JetField, grid: &Grid) -> Result<GridValues, FieldError> {
    check_pair(f, g, grid, 3)?;
    Ok(grid.eval(|p, q| {
        let jf = f.jet_order(p, q, 3);
        let jg = g.jet_order(p, q, 3);
        i_jet(&jf, &jg).value()
    }))
}

fn i_jet(jf: &Jet, jg: &Jet) -> Jet {
    let pj = jf.poisson(jg);
    let x = pj.poisson(jf);
    let y = pj.poisson(jg);
    x.poisson(jf) + y.poisson(jg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LhReport {
    /// `max {{F,G},F}`
    pub lhs: f64,
    /// `‖{F,G}‖² / (2 osc G)`
    pub rhs: f64,
    pub margin: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Landau–Hadamard type bound `max {{F,G},F} ≥ ‖{F,G}‖² / (2 osc G)`.
pub fn lh_check(f: &JetField, g: &JetField, grid: &Grid, tol: &Tolerances) -> Result<LhReport, FieldError> {
    let pb: BracketWord = BracketWord::bracket(BracketWord::f(), BracketWord::g());
    let [gv, pv, x] = eval_words([&BracketWord::g(), &pb, &BracketWord::fgf()], f, g, grid)?;
    let osc = gv.osc();
    if gv.sup_norm() == 0.0 {
        return Err(FieldError::Precondition("G vanishes identically".into()));
    }
    if osc == 0.0 {
        return Err(FieldError::Precondition("G is constant (osc G = 0)".into()));
    }
    let lhs = x.max();
    let rhs = pv.sup_norm().powi(2) / (2.0 * osc);
    let margin = lhs - rhs;
    let t = tol.disc(grid);
    Ok(LhReport {
        lhs,
        rhs,
        margin,
        tol: t,
        pass: margin >= -t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KolmogorovMode {
    /// `osc (ad_F)^N G`.
    Power { n: usize },
    /// `osc (ad_H)^m G`, `H = (ad_G)^k F`.
    Iterated { k: usize, m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KolmogorovReport {
    pub mode: KolmogorovMode,
    pub word: String,
    pub osc_value: f64,
    pub bracket_norm: f64,
    pub ratio: f64,
}

/// Ratio of `osc (ad_F)^N G` to `‖{F,G}‖^N / ‖G‖^{N−1}` (or the iterated
/// analogue `‖{F,G}‖^{(k+1)m} / (‖F‖^{km} ‖G‖^{m−1})`).
pub fn kolmogorov_ratio(f: &JetField, g: &JetField, mode: KolmogorovMode, grid: &Grid) -> Result<KolmogorovReport, FieldError> {
    let (word, total) = match mode {
        KolmogorovMode::Power { n } => (BracketWord::ad_f_power(n), n),
        KolmogorovMode::Iterated { k, m } => (BracketWord::ad_h_power(k, m), (k + 1) * m),
    };
    if total == 0 || total > 4 {
        return Err(FieldError::JetOrder {
            needed: total,
            available: 4,
        });
    }
    let pb = BracketWord::bracket(BracketWord::f(), BracketWord::g());
    let [fv, gv, pv, wv] = eval_words([&BracketWord::f(), &BracketWord::g(), &pb, &word], f, g, grid)?;
    let bracket_norm = pv.sup_norm();
    if bracket_norm <= 1e-12 {
        return Err(FieldError::Precondition("{F,G} vanishes on the grid".into()));
    }
    let osc_value = wv.osc();
    let (fnorm, gnorm) = (fv.sup_norm(), gv.sup_norm());
    let ratio = match mode {
        KolmogorovMode::Power { n } => osc_value * gnorm.powi(n as i32 - 1) / bracket_norm.powi(n as i32),
        KolmogorovMode::Iterated { k, m } => {
            osc_value * fnorm.powi((k * m) as i32) * gnorm.powi(m as i32 - 1) / bracket_norm.powi(((k + 1) * m) as i32)
        }
    };
    Ok(KolmogorovReport {
        mode,
        word: word.to_string(),
        osc_value,
        bracket_norm,
        ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs|` over the L¹ size of the integrands (0 when both vanish).
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
}

fn identity_report(lhs: f64, rhs: f64, scale: f64, tol: f64) -> IdentityReport {
    let rel_err = if scale > 0.0 { (lhs - rhs).abs() / scale } else { 0.0 };
    IdentityReport {
        lhs,
        rhs,
        rel_err,
        tol,
        pass: rel_err <= tol,
    }
}

fn jets3(a: &JetField, b: &JetField, c: &JetField, grid: &Grid) -> Result<(), FieldError> {
    for x in [a, b, c] {
        x.check_grid(grid)?;
        if x.order() < 1 {
            return Err(FieldError::JetOrder { needed: 1, available: 0 });
        }
    }
    Ok(())
}

/// `∫{P,Q}R ω = ∫{R,P}Q ω`.
pub fn integral_identity_check(
    p_field: &JetField,
    q_field: &JetField,
    r_field: &JetField,
    grid: &Grid,
    tol: &Tolerances,
) -> Result<IdentityReport, FieldError> {
    jets3(p_field, q_field, r_field, grid)?;
    let [l, r] = grid.eval_many(|p, q| {
        let jp = p_field.jet_order(p, q, 1);
        let jq = q_field.jet_order(p, q, 1);
        let jr = r_field.jet_order(p, q, 1);
        [jp.poisson(&jq).value() * jr.value(), jr.poisson(&jp).value() * jq.value()]
    });
    grid.check_margin(&l, "{P,Q}R")?;
    grid.check_margin(&r, "{R,P}Q")?;
    let scale = grid.integrate(&l.map(f64::abs)) + grid.integrate(&r.map(f64::abs));
    Ok(identity_report(grid.integrate(&l), grid.integrate(&r), scale, tol.quad))
}

/// `∫ I·{F,G} ω = −∫ ({{F,G},F}² + {{F,G},G}²) ω`.
pub fn corollary_identity_check(f: &JetField, g: &JetField, grid: &Grid, tol: &Tolerances) -> Result<IdentityReport, FieldError> {
    check_pair(f, g, grid, 3)?;
    let [l, r] = grid.eval_many(|p, q| {
        let jf = f.jet_order(p, q, 3);
        let jg = g.jet_order(p, q, 3);
        let pj = jf.poisson(&jg);
        let x = pj.poisson(&jf).value();
        let y = pj.poisson(&jg).value();
        [i_jet(&jf, &jg).value() * pj.value(), -(x * x + y * y)]
    });
    grid.check_margin(&l, "I{F,G}")?;
    grid.check_margin(&r, "double brackets")?;
    let scale = grid.integrate(&l.map(f64::abs)) + grid.integrate(&r.map(f64::abs));
    Ok(identity_report(grid.integrate(&l), grid.integrate(&r), scale, tol.quad))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub residual: f64,
    pub scale: f64,
}

/// `|∫{F,G} ω|` against `∫|{F,G}| ω`.
pub fn zero_mean_residual(f: &JetField, g: &JetField, grid: &Grid) -> Result<ResidualReport, FieldError> {
    let pb = BracketWord::bracket(BracketWord::f(), BracketWord::g());
    let [v] = eval_words([&pb], f, g, grid)?;
    grid.check_margin(&v, "{F,G}")?;
    Ok(ResidualReport {
        residual: grid.integrate(&v).abs(),
        scale: grid.integrate(&v.map(f64::abs)),
    })
}

/// `‖{{F,G},H} + {{G,H},F} + {{H,F},G}‖` against the largest term norm.
pub fn jacobi_residual(f: &JetField, g: &JetField, h: &JetField, grid: &Grid) -> Result<ResidualReport, FieldError> {
    for x in [f, g, h] {
        x.check_grid(grid)?;
        if x.order() < 2 {
            return Err(FieldError::JetOrder {
                needed: 2,
                available: x.order(),
            });
        }
    }
    let [sum, scale] = grid.eval_many(|p, q| {
        let (a, b, c) = (f.jet_order(p, q, 2), g.jet_order(p, q, 2), h.jet_order(p, q, 2));
        let t1 = a.poisson(&b).poisson(&c).value();
        let t2 = b.poisson(&c).poisson(&a).value();
        let t3 = c.poisson(&a).poisson(&b).value();
        [t1 + t2 + t3, t1.abs().max(t2.abs()).max(t3.abs())]
    });
    Ok(ResidualReport {
        residual: sum.sup_norm(),
        scale: scale.sup_norm(),
    })
}

/// `‖{FG, H} − F{G,H} − {F,H}G‖`.
pub fn leibniz_residual(f: &JetField, g: &JetField, h: &JetField, grid: &Grid) -> Result<ResidualReport, FieldError> {
    for x in [f, g, h] {
        x.check_grid(grid)?;
    }
    let [res, scale] = grid.eval_many(|p, q| {
        let (a, b, c) = (f.jet_order(p, q, 1), g.jet_order(p, q, 1), h.jet_order(p, q, 1));
        let lhs = (a * b).poisson(&c).value();
        let rhs = a.value() * b.poisson(&c).value() + a.poisson(&c).value() * b.value();
        [lhs - rhs, lhs.abs()]
    });
    Ok(ResidualReport {
        residual: res.sup_norm(),
        scale: scale.sup_norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryElement {
    A,
    B,
    C,
    Scale { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub element: SymmetryElement,
    /// `Φ^v` of the transformed pair.
    pub transformed: f64,
    /// `Φ^{gv}(F, G)`.
    pub image: f64,
    pub rel_err: f64,
    pub pass: bool,
}

pub const SYMMETRY_REL_TOL: f64 = 1e-12;

/// Compares `Φ^v` of the transformed pair with `Φ` of the original pair under
/// the transformed weights.
pub fn symmetry_check(
    v: &FunctionalVector,
    f: &JetField,
    g: &JetField,
    element: SymmetryElement,
    grid: &Grid,
) -> Result<SymmetryReport, FieldError> {
    let (tf, tg, w) = match element {
        SymmetryElement::A => (f.clone(), g.neg(), v.a()),
        SymmetryElement::B => (f.neg(), g.clone(), v.b()),
        SymmetryElement::C => (g.neg(), f.neg(), v.c()),
        SymmetryElement::Scale { alpha, beta } => {
            if !(alpha > 0.0 && beta > 0.0) {
                return Err(FieldError::Precondition(format!("scaling needs α, β > 0, got {alpha}, {beta}")));
            }
            (f.scale(alpha), g.scale(beta), v.scaled(alpha, beta))
        }
    };
    let transformed = double_bracket_extrema(&tf, &tg, grid)?.phi(v);
    let image = double_bracket_extrema(f, g, grid)?.phi(&w);
    let scale = transformed.abs().max(image.abs());
    let rel_err = if scale > 0.0 { (transformed - image).abs() / scale } else { 0.0 };
    Ok(SymmetryReport {
        element,
        transformed,
        image,
        rel_err,
        pass: rel_err <= SYMMETRY_REL_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffReport {
    /// `‖{φF, φG} − φ²{F,G}‖`
    pub bracket_residual: f64,
    /// `max {{φF,φG},φF}` and `max {{F,G},F}`
    pub cut_max: f64,
    pub uncut_max: f64,
    pub max_residual: f64,
}

/// Compares brackets of the cut-off pair `(φF, φG)` with those of `(F, G)`.
pub fn cutoff_residual(f: &JetField, g: &JetField, phi: &JetField, grid: &Grid) -> Result<CutoffReport, FieldError> {
    let (cf, cg) = (phi.try_mul(f)?, phi.try_mul(g)?);
    check_pair(f, g, grid, 2)?;
    check_pair(&cf, &cg, grid, 2)?;
    let [diff, cut, uncut] = grid.eval_many(|p, q| {
        let (jf, jg) = (f.jet_order(p, q, 2), g.jet_order(p, q, 2));
        let (kf, kg) = (cf.jet_order(p, q, 2), cg.jet_order(p, q, 2));
        let phi0 = phi.value(p, q);
        let pb = jf.poisson(&jg);
        let cb = kf.poisson(&kg);
        [
            cb.value() - phi0 * phi0 * pb.value(),
            cb.poisson(&kf).value(),
            pb.poisson(&jf).value(),
        ]
    });
    let (cut_max, uncut_max) = (cut.max(), uncut.max());
    Ok(CutoffReport {
        bracket_residual: diff.sup_norm(),
        cut_max,
        uncut_max,
        max_residual: (cut_max - uncut_max).abs(),
    })
}

//! Exact checks of the two flow expansions: the conjugated commutator
//! `φ_{τ(F+G)/2} f_{-τ} g_{-τ} f_τ g_τ φ_{-τ(F+G)/2}` and the conjugated
//! double commutator `φ_{τ(F-G)/6} θ(τF, τG) φ⁻¹_{τ(F-G)/6}`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::flow::{path_generator, FlowWord, TimePoly};
use super::poly::{bracket, rat, LiePoly, Rational};
use super::series::LieSeries;
use super::LieError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub lyndon: String,
    pub num: i64,
    pub den: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub tau_power: usize,
    pub terms: Vec<TermRecord>,
}

/// JSON-facing expansion report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub word: String,
    #[serde(rename = "T")]
    pub order: usize,
    pub coefficients: Vec<CoefficientRecord>,
    #[serde(rename = "match")]
    pub matches: bool,
    /// Names of the individual assertions that failed (empty on a match).
    pub failures: Vec<String>,
}

/// Result of an expansion check: the exact series plus the report.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub word: FlowWord,
    pub series: LieSeries,
    pub report: ExpansionReport,
}

fn to_i64(x: &BigInt) -> Result<i64, LieError> {
    x.to_i64().ok_or_else(|| LieError::Overflow(x.to_string()))
}

pub fn coefficient_records(series: &LieSeries) -> Result<Vec<CoefficientRecord>, LieError> {
    series
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let terms = c
                .terms()
                .map(|(w, r)| {
                    Ok(TermRecord {
                        lyndon: w.to_string(),
                        num: to_i64(r.numer())?,
                        den: to_i64(r.denom())?,
                    })
                })
                .collect::<Result<Vec<_>, LieError>>()?;
            Ok(CoefficientRecord {
                tau_power: k,
                terms,
            })
        })
        .collect()
}

fn flow(generator: LiePoly, c: Rational) -> FlowWord {
    FlowWord::factor(generator, TimePoly::linear(c))
}

/// `φ_{τ(F+G)/2} f_{-τ} g_{-τ} f_τ g_τ φ_{-τ(F+G)/2}`.
pub fn word_32(md: usize) -> FlowWord {
    let f = LiePoly::f(md);
    let g = LiePoly::g(md);
    let sum = &f + &g;
    FlowWord::product(vec![
        flow(sum.clone(), rat(1, 2)),
        flow(f.clone(), rat(-1, 1)),
        flow(g.clone(), rat(-1, 1)),
        flow(f, rat(1, 1)),
        flow(g, rat(1, 1)),
        flow(sum, rat(-1, 2)),
    ])
}

/// `θ(sF, sG) = [φ_{-sF} φ_{-sG}, φ_{s(F+G)}]` with `s = τ`.
pub fn theta_word(md: usize) -> FlowWord {
    let f = LiePoly::f(md);
    let g = LiePoly::g(md);
    let x = FlowWord::product(vec![flow(f.clone(), rat(-1, 1)), flow(g.clone(), rat(-1, 1))]);
    let y = flow(&f + &g, rat(1, 1));
    FlowWord::commutator(x, y)
}

/// `φ_{τ(F-G)/6} ∘ θ(τF, τG) ∘ φ⁻¹_{τ(F-G)/6}`.
pub fn word_33(md: usize) -> FlowWord {
    let f = LiePoly::f(md);
    let g = LiePoly::g(md);
    FlowWord::conjugate(theta_word(md), flow(&f - &g, rat(1, 6)))
}

/// `P = {F,G}` and `I = {{P,F},F} + {{P,G},G}`.
pub fn p_and_i(md: usize) -> (LiePoly, LiePoly) {
    let f = LiePoly::f(md);
    let g = LiePoly::g(md);
    let p = bracket(&f, &g, md);
    let pff = bracket(&bracket(&p, &f, md), &f, md);
    let pgg = bracket(&bracket(&p, &g, md), &g, md);
    (p, &pff + &pgg)
}

/// `A = ½{{F,G},F}`, `B = ½{{F,G},G}`.
pub fn a_and_b(md: usize) -> (LiePoly, LiePoly) {
    let f = LiePoly::f(md);
    let g = LiePoly::g(md);
    let p = bracket(&f, &g, md);
    (
        bracket(&p, &f, md).scale(&rat(1, 2)),
        bracket(&p, &g, md).scale(&rat(1, 2)),
    )
}

fn check(failures: &mut Vec<String>, ok: bool, what: &str) {
    if !ok {
        failures.push(what.to_string());
    }
}

fn coeff_or_zero(series: &LieSeries, k: usize) -> LiePoly {
    if k <= series.order() {
        series.coeff(k).clone()
    } else {
        LiePoly::zero(series.max_degree())
    }
}

/// Checks `V(τ) = 2τP + (τ³/6) I + O(τ⁴)` exactly. Requires `order ≥ 3`.
pub fn verify_expansion_32(order: usize) -> Result<Expansion, LieError> {
    if order < 3 {
        return Err(LieError::Bounds {
            what: "T",
            value: order as i64,
            lo: 3,
            hi: super::flow::MAX_ORDER as i64,
        });
    }
    let md = order + 1;
    let word = word_32(md);
    let series = path_generator(&word, order)?;
    let (p, i) = p_and_i(md);
    let mut failures = Vec::new();
    check(&mut failures, series.coeff(0).is_zero(), "tau^0 != 0");
    check(&mut failures, *series.coeff(1) == p.scale(&rat(2, 1)), "tau^1 != 2P");
    check(&mut failures, series.coeff(2).is_zero(), "tau^2 != 0");
    check(&mut failures, coeff_or_zero(&series, 3) == i.scale(&rat(1, 6)), "tau^3 != I/6");
    let report = ExpansionReport {
        word: word.to_string(),
        order,
        coefficients: coefficient_records(&series)?,
        matches: failures.is_empty(),
        failures,
    };
    Ok(Expansion {
        word,
        series,
        report,
    })
}

/// Checks `V(τ) = 3τ²(A+B) + τ⁴Q + O(τ⁵)` exactly, with `Q` homogeneous of
/// degree 5. Requires `order ≥ 4`.
pub fn verify_expansion_33(order: usize) -> Result<Expansion, LieError> {
    if order < 4 {
        return Err(LieError::Bounds {
            what: "T",
            value: order as i64,
            lo: 4,
            hi: super::flow::MAX_ORDER as i64,
        });
    }
    let md = order + 1;
    let word = word_33(md);
    let series = path_generator(&word, order)?;
    let (a, b) = a_and_b(md);
    let mut failures = Vec::new();
    check(&mut failures, series.coeff(0).is_zero(), "tau^0 != 0");
    check(&mut failures, series.coeff(1).is_zero(), "tau^1 != 0");
    check(
        &mut failures,
        *series.coeff(2) == (&a + &b).scale(&rat(3, 1)),
        "tau^2 != 3(A+B)",
    );
    check(&mut failures, series.coeff(3).is_zero(), "tau^3 != 0");
    let q = series.coeff(4);
    check(
        &mut failures,
        !q.is_zero() && q.is_homogeneous_of(5),
        "tau^4 not purely degree 5",
    );
    let report = ExpansionReport {
        word: word.to_string(),
        order,
        coefficients: coefficient_records(&series)?,
        matches: failures.is_empty(),
        failures,
    };
    Ok(Expansion {
        word,
        series,
        report,
    })
}

/// The `τ⁴` coefficient `Q` of the double-commutator expansion.
pub fn q_polynomial(order: usize) -> Result<LiePoly, LieError> {
    Ok(verify_expansion_33(order.max(4))?.series.coeff(4).clone())
}

use poisson_rigidity::field::{
    corollary_identity_check, eval_words, integral_identity_check, kolmogorov_ratio, lh_check, psi, symmetry_check,
    y_bound_check, BracketWord, Domain2, FunctionalVector, JetField, KolmogorovMode, SymmetryElement,
};
use poisson_rigidity::lie::{verify_expansion_32, verify_expansion_33};
use poisson_rigidity::rates::{log_grid, rate_report, ScanOptions};
use poisson_rigidity::witness::{
    build_witness, check_invariants, kappa_search, r_envelope_at, r_eval, r_extrema, verify_theorem41, WitnessError,
};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::emit::{Cell, Table};
use crate::error::CliError;
use crate::fields::{pick_domain, resolve};

/// Ratio limit for the counterexample at finite `N`.
pub const RATIO_LIMIT: f64 = 0.995;
pub const R_LIMIT: f64 = 0.99;
/// Allowed spread of `residual · N` across the `N` values.
pub const RESIDUAL_SPREAD: f64 = 2.0;
const PROFILE_SAMPLES: usize = 2001;

pub struct Outcome {
    pub pass: bool,
    pub result: Value,
    pub table: Option<Table>,
    pub summary: String,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        "bch" => bch(cfg),
        "lemma-r" => lemma_r(cfg),
        "witness-build" => witness_build(cfg),
        "witness-verify" => witness_verify(cfg),
        _ => field_command(cfg),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report is serializable")
}

fn bch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let e = match cfg.bch.which.as_str() {
        "3.2" => verify_expansion_32(cfg.bch.t)?,
        _ => verify_expansion_33(cfg.bch.t)?,
    };
    let r = &e.report;
    Ok(Outcome {
        pass: r.matches,
        summary: format!("word {} to order {}: match={}", r.word, r.order, r.matches),
        result: to_value(r),
        table: None,
    })
}

fn lemma_r(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let s = &cfg.lemma_r;
    let ext = r_extrema(s.alpha, s.gamma);
    let max_abs = ext.max_abs();
    let kappa = match kappa_search(s.gamma, s.bound, s.alpha) {
        Ok(k) => Some(k),
        Err(WitnessError::Unachievable { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut t = Table::new(&["z", "r"]);
    for i in 0..s.samples {
        let z = -1.0 + 2.0 * i as f64 / (s.samples - 1) as f64;
        t.push(vec![Cell::F(z), Cell::F(r_eval(s.alpha, s.gamma, z))]);
    }
    let pass = max_abs < s.bound;
    Ok(Outcome {
        pass,
        summary: format!(
            "r(-1)={:.6} r(1)={:.6} critical={} max|r|={:.6} (bound {})",
            ext.at_minus_one,
            ext.at_one,
            ext.critical.map_or("none".into(), |c| format!("{c:.6}")),
            max_abs,
            s.bound
        ),
        result: json!({
            "alpha": s.alpha,
            "gamma": s.gamma,
            "bound": s.bound,
            "r_minus_one": ext.at_minus_one,
            "r_one": ext.at_one,
            "critical": ext.critical,
            "critical_z": ext.critical_z,
            "max_abs": max_abs,
            "kappa": kappa,
        }),
        table: Some(t),
    })
}

fn witness_build(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let w = build_witness(&cfg.witness)?;
    let inv = check_invariants(&w);
    let (q0, q1) = w.support_q();
    let mut t = Table::new(&["q", "w", "w_prime", "a", "a_prime", "r_envelope"]);
    for i in 0..PROFILE_SAMPLES {
        let q = q0 + (q1 - q0) * i as f64 / (PROFILE_SAMPLES - 1) as f64;
        t.push(vec![
            Cell::F(q),
            Cell::F(w.w(q)[0]),
            Cell::F(w.dw(q)[0]),
            Cell::F(w.a(q)[0]),
            Cell::F(w.da(q)[0]),
            Cell::F(r_envelope_at(&w, q)),
        ]);
    }
    let failed: Vec<&str> = inv.failures().iter().map(|c| c.name.as_str()).collect();
    Ok(Outcome {
        pass: inv.pass,
        summary: format!(
            "kappa={} invariants {}",
            w.kappa,
            if inv.pass { "pass".to_string() } else { format!("failed: {}", failed.join(", ")) }
        ),
        result: json!({
            "knots": w.knots_json(),
            "kappa": w.kappa,
            "support_p": [w.support_p().0, w.support_p().1],
            "support_q": [w.support_q().0, w.support_q().1],
            "invariants": to_value(&inv),
        }),
        table: Some(t),
    })
}

fn witness_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let w = build_witness(&cfg.witness)?;
    let rep = verify_theorem41(&w, &cfg.witness.n_list, cfg.witness.grid_n)?;
    let mut t = Table::new(&["N", "ratio_max", "ratio_min", "residual", "maxR"]);
    for r in &rep.rows {
        t.push(vec![
            Cell::I(r.n as i64),
            Cell::F(r.ratio_max),
            Cell::F(r.ratio_min),
            Cell::F(r.residual),
            Cell::F(r.max_r),
        ]);
    }
    let scaled: Vec<f64> = rep.rows.iter().map(|r| r.residual * r.n as f64).collect();
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().cloned().fold(0.0, f64::max);
    let spread = if lo > 0.0 { hi / lo } else if hi == 0.0 { 1.0 } else { f64::INFINITY };
    let ratios_ok = rep.rows.iter().all(|r| r.ratio_max <= RATIO_LIMIT && r.ratio_min <= RATIO_LIMIT);
    let r_ok = rep.envelope.max_abs_r <= R_LIMIT && rep.rows.iter().all(|r| r.max_r <= R_LIMIT);
    let spread_ok = spread <= RESIDUAL_SPREAD;
    let worst = rep.rows.iter().map(|r| r.ratio_max.max(r.ratio_min)).fold(f64::NEG_INFINITY, f64::max);
    Ok(Outcome {
        pass: ratios_ok && r_ok && spread_ok,
        summary: format!(
            "N={:?}: worst ratio {:.6} (limit {RATIO_LIMIT}), max|R| {:.6}, residual*N spread {:.3}",
            cfg.witness.n_list, worst, rep.envelope.max_abs_r, spread
        ),
        result: json!({
            "rows": to_value(&rep.rows),
            "envelope": to_value(&rep.envelope),
            "residual_times_n": scaled,
            "residual_spread": spread,
            "checks": {
                "ratios_ok": ratios_ok,
                "max_r_ok": r_ok,
                "residual_spread_ok": spread_ok,
                "ratio_limit": RATIO_LIMIT,
                "r_limit": R_LIMIT,
                "spread_limit": RESIDUAL_SPREAD,
            },
        }),
        table: Some(t),
    })
}

fn pair<'a>(fields: &'a [JetField], command: &str) -> Result<(&'a JetField, &'a JetField), CliError> {
    match fields {
        [f, g] => Ok((f, g)),
        _ => Err(CliError::Usage(format!("{command} needs exactly two fields, got {}", fields.len()))),
    }
}

fn functional(name: &str, value: f64, domain: &Domain2, rest: Value) -> Value {
    let mut v = json!({ "functional": name, "value": value, "grid": to_value(domain) });
    if let (Some(o), Value::Object(r)) = (v.as_object_mut(), rest) {
        o.extend(r);
    }
    v
}

fn field_command(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let resolved = resolve(&cfg.grid.fields, &cfg.witness)?;
    let domain = pick_domain(&resolved, &cfg.grid.domain, cfg.grid.n)?;
    let grid = domain.grid();
    let tol = &cfg.grid.tolerances;
    let fields = &resolved.fields;
    let cmd = cfg.command;
    match cmd {
        "lh-check" => {
            let (f, g) = pair(fields, cmd)?;
            let r = lh_check(f, g, &grid, tol)?;
            Ok(Outcome {
                pass: r.pass,
                summary: format!("lhs={:.9} rhs={:.9} margin={:.3e} tol={:.3e}", r.lhs, r.rhs, r.margin, r.tol),
                result: functional("lh", r.margin, &domain, to_value(&r)),
                table: None,
            })
        }
        "kolmogorov" => {
            let (f, g) = pair(fields, cmd)?;
            let k = &cfg.kolmogorov;
            let mode = match (k.n, k.k, k.m) {
                (Some(n), _, _) => KolmogorovMode::Power { n },
                (None, Some(k), Some(m)) => KolmogorovMode::Iterated { k, m },
                _ => return Err(CliError::Usage("give either --N or both --k and --m".into())),
            };
            let r = kolmogorov_ratio(f, g, mode, &grid)?;
            let pass = k.c_n.is_none_or(|c| r.ratio >= c);
            Ok(Outcome {
                pass,
                summary: format!(
                    "{}: osc={:.9} ratio={:.9}{}",
                    r.word,
                    r.osc_value,
                    r.ratio,
                    k.c_n.map_or(String::new(), |c| format!(" (threshold {c})"))
                ),
                result: functional("kolmogorov", r.ratio, &domain, json!({ "report": to_value(&r), "c_n": k.c_n })),
                table: None,
            })
        }
        "integral-identity" => match fields.as_slice() {
            [p, q, r] => {
                let rep = integral_identity_check(p, q, r, &grid, tol)?;
                Ok(Outcome {
                    pass: rep.pass,
                    summary: format!("lhs={:.12e} rhs={:.12e} rel_err={:.3e}", rep.lhs, rep.rhs, rep.rel_err),
                    result: functional("integral_identity", rep.rel_err, &domain, to_value(&rep)),
                    table: None,
                })
            }
            [f, g] => {
                let rep = corollary_identity_check(f, g, &grid, tol)?;
                let ps = psi(f, g, &grid)?;
                Ok(Outcome {
                    pass: rep.pass,
                    summary: format!("rel_err={:.3e} psi={:.12}", rep.rel_err, ps),
                    result: functional(
                        "corollary_identity",
                        rep.rel_err,
                        &domain,
                        json!({ "identity": to_value(&rep), "psi": ps }),
                    ),
                    table: None,
                })
            }
            _ => Err(CliError::Usage(format!("integral-identity needs two or three fields, got {}", fields.len()))),
        },
        "y-bound" => {
            let (f, g) = pair(fields, cmd)?;
            let y = &cfg.y_bound;
            let r = y_bound_check(f, g, y.s, y.t, y.steps, &grid, tol)?;
            Ok(Outcome {
                pass: r.pass,
                summary: format!("max Y={:.9e} bound={:.9e} slack={:.3e}", r.max_y, r.bound, r.slack),
                result: functional("y_bound", r.slack, &domain, to_value(&r)),
                table: None,
            })
        }
        "symmetry" => {
            let (f, g) = pair(fields, cmd)?;
            let s = &cfg.symmetry;
            let v = FunctionalVector::new(s.v)?;
            let mut t = Table::new(&["element", "transformed", "image", "rel_err", "pass"]);
            let mut reports = Vec::new();
            for name in &s.elements {
                let el = match name.to_ascii_lowercase().as_str() {
                    "a" => SymmetryElement::A,
                    "b" => SymmetryElement::B,
                    "c" => SymmetryElement::C,
                    "scale" => SymmetryElement::Scale { alpha: s.alpha, beta: s.beta },
                    other => return Err(CliError::Usage(format!("unknown symmetry element {other:?}"))),
                };
                let r = symmetry_check(&v, f, g, el, &grid)?;
                t.push(vec![
                    Cell::S(name.to_ascii_lowercase()),
                    Cell::F(r.transformed),
                    Cell::F(r.image),
                    Cell::F(r.rel_err),
                    Cell::S(r.pass.to_string()),
                ]);
                reports.push(r);
            }
            let worst = reports.iter().map(|r| r.rel_err).fold(0.0, f64::max);
            Ok(Outcome {
                pass: reports.iter().all(|r| r.pass),
                summary: format!("{} elements, worst rel_err {:.3e}", reports.len(), worst),
                result: functional("symmetry", worst, &domain, json!({ "reports": to_value(&reports) })),
                table: Some(t),
            })
        }
        "rate-scan" => {
            let (f, g) = pair(fields, cmd)?;
            let rs = &cfg.rate_scan;
            let eps = log_grid(rs.eps_min, rs.eps_max, rs.eps_count);
            let opts = ScanOptions {
                families: rs.families.clone(),
                search: rs.search.clone(),
            };
            let rep = rate_report(f, g, domain.kind, &eps, rs.which, &opts)?;
            let mut t = Table::new(&["eps", "best_phi", "decrease", "family", "params"]);
            for r in &rep.rows {
                let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={}", crate::emit::float(*v))).collect();
                t.push(vec![
                    Cell::F(r.eps),
                    Cell::F(r.best_phi),
                    Cell::F(r.decrease),
                    Cell::S(r.family.to_string()),
                    Cell::S(params.join(";")),
                ]);
            }
            let mut result = to_value(&rep);
            if let Some(o) = result.as_object_mut() {
                o.insert("C".into(), json!(rep.fit.as_ref().map(|f| f.c)));
                o.insert("exponent".into(), json!(rep.fit.as_ref().map(|f| f.exponent)));
                o.insert("residual".into(), json!(rep.fit.as_ref().map(|f| f.residual)));
                o.insert("pass".into(), json!(rep.checks.pass));
            }
            Ok(Outcome {
                pass: rep.checks.pass,
                summary: match &rep.fit {
                    Some(fit) => format!(
                        "{}: C={:.6} exponent={:.4} residual={:.4} psi={:.6}",
                        rep.which, fit.c, fit.exponent, fit.residual, rep.psi
                    ),
                    None => format!("{}: no fit ({})", rep.which, rep.fit_error.clone().unwrap_or_default()),
                },
                result,
                table: Some(t),
            })
        }
        "bracket-eval" => {
            let (f, g) = pair(fields, cmd)?;
            let word: BracketWord = cfg.bracket_eval.word.parse()?;
            word.validate()?;
            let [vals] = eval_words([&word], f, g, &grid)?;
            let mut t = Table::new(&["p", "q", "value"]);
            for (i, p) in grid.p().iter().enumerate() {
                for (j, q) in grid.q().iter().enumerate() {
                    t.push(vec![Cell::F(*p), Cell::F(*q), Cell::F(vals.get(i, j))]);
                }
            }
            Ok(Outcome {
                pass: true,
                summary: format!("{word}: max={:.9} min={:.9}", vals.max(), vals.min()),
                result: functional(
                    "bracket",
                    vals.max(),
                    &domain,
                    json!({ "word": word.to_string(), "max": vals.max(), "min": vals.min(), "sup_norm": vals.sup_norm() }),
                ),
                table: Some(t),
            })
        }
        other => Err(CliError::Usage(format!("unknown command {other:?}"))),
    }
}

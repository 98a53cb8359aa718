use std::path::Path;

use poisson_rigidity::field::io::load_field;
use poisson_rigidity::field::{Domain2, DomainKind, JetField, TrigPoly};
use poisson_rigidity::witness::{build_witness, WitnessConfig, WitnessFields};

use crate::error::CliError;

const TRIG_TERMS: usize = 4;
const TRIG_MAX_FREQ: i32 = 3;
/// Band of zero nodes kept around the default rectangle of the witness.
const WITNESS_MARGIN: usize = 2;
const WITNESS_PAD: f64 = 0.05;

const BUILTINS: [&str; 11] = [
    "zero", "p", "q", "sin-p", "sin-q", "cos-p", "cos-q", "sin-sin", "witness", "witness-f", "witness-g",
];

fn trig_seed(spec: &str) -> Option<Result<u64, CliError>> {
    spec.strip_prefix("trig:")
        .map(|s| s.parse().map_err(|_| CliError::Usage(format!("bad trig seed in field spec {spec:?}"))))
}

/// Rejects unknown names and missing CSV files before anything runs.
pub fn check_spec(spec: &str) -> Result<(), CliError> {
    if BUILTINS.contains(&spec) {
        return Ok(());
    }
    if let Some(s) = trig_seed(spec) {
        return s.map(|_| ());
    }
    let path = Path::new(spec);
    if path.is_file() {
        Ok(())
    } else if spec.contains('/') || spec.contains('\\') || path.extension().is_some() {
        Err(CliError::MissingFile(spec.to_string()))
    } else {
        Err(CliError::Usage(format!("unknown field spec {spec:?}")))
    }
}

/// Fields named by `specs` (pair shorthands expanded) plus the rectangle
/// spanned by the witness supports, if the witness was used.
pub struct Resolved {
    pub fields: Vec<JetField>,
    pub witness_rect: Option<((f64, f64), (f64, f64))>,
}

pub fn resolve(specs: &[String], wcfg: &WitnessConfig) -> Result<Resolved, CliError> {
    let mut witness: Option<WitnessFields> = None;
    let mut get_witness = || -> Result<WitnessFields, CliError> {
        if witness.is_none() {
            witness = Some(build_witness(wcfg)?);
        }
        Ok(witness.clone().expect("just built"))
    };
    let mut fields = Vec::new();
    let mut rect = None;
    for spec in specs {
        check_spec(spec)?;
        match spec.as_str() {
            "zero" => fields.push(JetField::zero()),
            "p" => fields.push(JetField::coord_p()),
            "q" => fields.push(JetField::coord_q()),
            "sin-p" => fields.push(JetField::sin_p()),
            "sin-q" => fields.push(JetField::sin_q()),
            "cos-p" => fields.push(JetField::cos_p()),
            "cos-q" => fields.push(JetField::cos_q()),
            "sin-sin" => fields.extend([JetField::sin_p(), JetField::sin_q()]),
            "witness" | "witness-f" | "witness-g" => {
                let w = get_witness()?;
                rect = Some((w.support_p(), w.support_q()));
                match spec.as_str() {
                    "witness-f" => fields.push(w.f()),
                    "witness-g" => fields.push(w.g()),
                    _ => fields.extend([w.f(), w.g()]),
                }
            }
            s => match trig_seed(s) {
                Some(seed) => fields.push(TrigPoly::random(seed?, TRIG_TERMS, TRIG_MAX_FREQ).into_field(s)),
                None => fields.push(load_field(Path::new(s)).map_err(|e| match e {
                    poisson_rigidity::field::FieldError::Io(m) => CliError::Io(m),
                    other => CliError::Usage(format!("{s}: {other}")),
                })?),
            },
        }
    }
    Ok(Resolved { fields, witness_rect: rect })
}

/// Parses `torus` or `rect:p0,p1,q0,q1[,margin]`.
pub fn parse_domain(spec: &str, n: usize) -> Result<Domain2, CliError> {
    if spec == "torus" {
        return Ok(Domain2::torus(n)?);
    }
    let body = spec
        .strip_prefix("rect:")
        .ok_or_else(|| CliError::Usage(format!("unknown domain {spec:?} (expected torus or rect:p0,p1,q0,q1[,margin])")))?;
    let parts: Vec<&str> = body.split(',').map(str::trim).collect();
    if !(parts.len() == 4 || parts.len() == 5) {
        return Err(CliError::Usage(format!("rect domain needs 4 or 5 numbers, got {spec:?}")));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| CliError::Usage(format!("bad number {s:?} in domain {spec:?}")));
    let margin = match parts.get(4) {
        Some(m) => m.parse().map_err(|_| CliError::Usage(format!("bad margin {m:?} in domain {spec:?}")))?,
        None => 0,
    };
    Ok(Domain2::rectangle((num(parts[0])?, num(parts[1])?), (num(parts[2])?, num(parts[3])?), n, margin)?)
}

/// The evaluation domain: a sampled field's own domain, else `--domain`.
/// `auto` is the padded witness rectangle when the witness is in use and
/// the torus otherwise.
pub fn pick_domain(resolved: &Resolved, domain: &str, n: usize) -> Result<Domain2, CliError> {
    if let Some(d) = resolved.fields.iter().find_map(|f| f.domain()) {
        return Ok(*d);
    }
    match (domain, resolved.witness_rect) {
        ("auto", Some((p, q))) => {
            let pad = |(a, b): (f64, f64)| (a - WITNESS_PAD * (b - a), b + WITNESS_PAD * (b - a));
            Ok(Domain2::new(DomainKind::Rectangle { p: pad(p), q: pad(q), margin: WITNESS_MARGIN }, n)?)
        }
        ("auto", None) => Ok(Domain2::torus(n)?),
        _ => parse_domain(domain, n),
    }
}

//! CSV import/export of sampled fields.
//!
//! Layout: a header record `n,h,kind`, one record with those values, then `n`
//! records of `n` values each (record `i` holds `p = p_i`, column `j` holds
//! `q = q_j`). Rectangles are anchored at the origin: `[0, (n−1)h]²`.

use std::io::{Read, Write};

use super::domain::{Domain2, DomainKind, GridValues};
use super::jetfield::JetField;
use super::FieldError;

pub fn write_csv<W: Write>(w: W, domain: &Domain2, values: &GridValues) -> Result<(), FieldError> {
    let mut out = csv::WriterBuilder::new().flexible(true).from_writer(w);
    let csv_err = |e: csv::Error| FieldError::Io(e.to_string());
    out.write_record(["n", "h", "kind"]).map_err(csv_err)?;
    out.write_record([
        domain.n.to_string(),
        format!("{:.16e}", domain.h()),
        domain.kind_name().to_string(),
    ])
    .map_err(csv_err)?;
    let (np, nq) = values.shape();
    for i in 0..np {
        let row: Vec<String> = (0..nq).map(|j| format!("{:.16e}", values.get(i, j))).collect();
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush().map_err(|e| FieldError::Io(e.to_string()))
}

/// Reads a field and its domain. Rectangles get a zero-width margin band.
pub fn read_csv<R: Read>(r: R) -> Result<(Domain2, GridValues), FieldError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).has_headers(true).from_reader(r);
    let headers = rdr.headers().map_err(|e| FieldError::Parse(e.to_string()))?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["n", "h", "kind"] {
        return Err(FieldError::Parse(format!("expected header n,h,kind, got {headers:?}")));
    }
    let mut records = rdr.records();
    let meta = records
        .next()
        .ok_or_else(|| FieldError::Parse("missing n,h,kind record".into()))?
        .map_err(|e| FieldError::Parse(e.to_string()))?;
    let get = |k: usize| meta.get(k).map(str::trim).unwrap_or("");
    let n: usize = get(0).parse().map_err(|_| FieldError::Parse(format!("bad n {:?}", get(0))))?;
    let h: f64 = get(1).parse().map_err(|_| FieldError::Parse(format!("bad h {:?}", get(1))))?;
    let domain = match get(2) {
        "torus" => {
            let d = Domain2::torus(n)?;
            if (d.h() - h).abs() > 1e-9 * h.abs().max(1.0) {
                return Err(FieldError::Parse(format!("torus spacing {h} inconsistent with n = {n}")));
            }
            d
        }
        "rectangle" => {
            let side = h * (n as f64 - 1.0);
            Domain2::new(
                DomainKind::Rectangle {
                    p: (0.0, side),
                    q: (0.0, side),
                    margin: 0,
                },
                n,
            )?
        }
        other => return Err(FieldError::Parse(format!("unknown kind {other:?}"))),
    };
    let mut data = Vec::with_capacity(n * n);
    for rec in records {
        let rec = rec.map_err(|e| FieldError::Parse(e.to_string()))?;
        if rec.len() != n {
            return Err(FieldError::Parse(format!("row has {} values, expected {n}", rec.len())));
        }
        for v in rec.iter() {
            data.push(
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| FieldError::Parse(format!("bad value {v:?}")))?,
            );
        }
    }
    if data.len() != n * n {
        return Err(FieldError::Parse(format!("expected {n} rows, got {}", data.len() / n.max(1))));
    }
    Ok((domain, GridValues::from_vec(n, n, data)))
}

/// Reads a CSV file into a sampled [`JetField`].
pub fn load_field(path: &std::path::Path) -> Result<JetField, FieldError> {
    let file = std::fs::File::open(path).map_err(|e| FieldError::Io(format!("{}: {e}", path.display())))?;
    let (domain, values) = read_csv(file)?;
    JetField::from_samples(&domain, &values, path.display().to_string())
}

//! Acceptance criteria 1 to 11. Each prints one PASS/FAIL line; the test
//! fails if any criterion does.

use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use poisson_rigidity::field::{
    jacobi_residual, lh_check, plateau_field, symmetry_check, zero_mean_residual, cutoff_residual, Domain2,
    FunctionalVector, Grid, Plateau, SymmetryElement, Tolerances, TrigPoly,
};
use poisson_rigidity::lie::{bracket, lyndon_basis, rat, LiePoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

const BCH32_SECS: f64 = 5.0;
const BCH33_SECS: f64 = 30.0;
const LEMMA_ENDPOINT_TOL: f64 = 1e-12;
const LEMMA_CRITICAL_TOL: f64 = 1e-3;
const WITNESS_SECS: f64 = 120.0;
const R_MAX: f64 = 0.99;
const RATIO_MAX: f64 = 0.995;
const RESIDUAL_FACTOR: f64 = 2.0;
const LH_PAIRS: u64 = 200;
const LH_N: usize = 256;
const LH_DISC_FACTOR: f64 = 10.0;
const LH_SECS: f64 = 60.0;
const IDENTITY_TOL: f64 = 1e-6;
const PSI_TOL: f64 = 1e-6;
const JACOBI_TOL: f64 = 1e-8;
const ZERO_MEAN_TOL: f64 = 1e-8;
const CUTOFF_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-12;
const LIE_TRIPLES: usize = 100;
const RATE_SECS: f64 = 600.0;
const RATE_MIN_EXPONENT: f64 = 0.55;
const RATE_LAW_CONSTANT: f64 = 5.0;
const Y_SLACK_TOL: f64 = -1e-4;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn prig(args: &[&str], out: &Path) -> Result<(i32, Duration), String> {
    let t = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_prig"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("PRIG_OUT_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    let code = o.status.code().ok_or("killed by a signal")?;
    if code >= 2 {
        return Err(format!("prig {args:?} exited {code}: {}", String::from_utf8_lossy(&o.stderr)));
    }
    Ok((code, t.elapsed()))
}

fn json(path: &Path) -> Result<Value, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn csv(path: &Path) -> Result<Vec<Vec<String>>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect())
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or(f64::NAN)
}

fn torus(n: usize) -> Grid {
    Domain2::torus(n).unwrap().grid()
}

/// Terms of the τ^k coefficient as `(lyndon word, num, den)`.
fn coefficient(j: &Value, k: usize) -> Vec<(String, i64, i64)> {
    j["coefficients"]
        .as_array()
        .and_then(|a| a.iter().find(|c| c["tau_power"] == k))
        .and_then(|c| c["terms"].as_array())
        .map(|ts| {
            ts.iter()
                .map(|t| {
                    (
                        t["lyndon"].as_str().unwrap_or("").to_string(),
                        t["num"].as_i64().unwrap_or(0),
                        t["den"].as_i64().unwrap_or(0),
                    )
                })
                .collect()
        })
        .unwrap_or_default()
}

fn same_terms(got: &[(String, i64, i64)], want: &[(&str, i64, i64)]) -> bool {
    got.len() == want.len()
        && want.iter().all(|(w, n, d)| got.iter().any(|(gw, gn, gd)| gw == w && gn * d == n * gd && *gd != 0))
}

// In the Lyndon basis over F < G the standard bracketings are
// FG = [F,G], FFG = [F,[F,G]], FGG = [[F,G],G], FFFG = [F,[F,[F,G]]] and
// FGGG = [[[F,G],G],G]. Hence {{P,F},F} = FFFG and {{P,G},G} = FGGG for
// P = {F,G}, while {{F,G},F} = -FFG.

fn criterion_1(dir: &Path) -> Check {
    let (code, t) = prig(&["bch", "--which", "3.2", "-T", "5"], dir)?;
    let j = json(&dir.join("bch.json"))?;
    ensure(code == 0 && j["match"] == true, || format!("exit {code}, failures {}", j["failures"]))?;
    ensure(coefficient(&j, 0).is_empty(), || "tau^0 is not zero".into())?;
    ensure(same_terms(&coefficient(&j, 1), &[("FG", 2, 1)]), || format!("tau^1 = {:?}", coefficient(&j, 1)))?;
    ensure(coefficient(&j, 2).is_empty(), || "tau^2 is not zero".into())?;
    ensure(same_terms(&coefficient(&j, 3), &[("FFFG", 1, 6), ("FGGG", 1, 6)]), || {
        format!("tau^3 = {:?}", coefficient(&j, 3))
    })?;
    ensure(t.as_secs_f64() < BCH32_SECS, || format!("took {:.2} s", t.as_secs_f64()))?;
    Ok(format!("exact match to order 5 in {:.2} s", t.as_secs_f64()))
}

fn criterion_2(dir: &Path) -> Check {
    let (code, t) = prig(&["bch", "--which", "3.3", "-T", "5"], dir)?;
    let j = json(&dir.join("bch.json"))?;
    ensure(code == 0 && j["match"] == true, || format!("exit {code}, failures {}", j["failures"]))?;
    ensure(coefficient(&j, 0).is_empty() && coefficient(&j, 1).is_empty(), || "tau^0 or tau^1 is not zero".into())?;
    ensure(same_terms(&coefficient(&j, 2), &[("FFG", -3, 2), ("FGG", 3, 2)]), || {
        format!("tau^2 = {:?}", coefficient(&j, 2))
    })?;
    ensure(coefficient(&j, 3).is_empty(), || "tau^3 is not zero".into())?;
    let c4 = coefficient(&j, 4);
    ensure(!c4.is_empty() && c4.iter().all(|(w, _, _)| w.len() == 5), || format!("tau^4 = {c4:?}"))?;
    ensure(t.as_secs_f64() < BCH33_SECS, || format!("took {:.2} s", t.as_secs_f64()))?;
    Ok(format!("exact match to order 5 in {:.2} s, tau^4 has {} degree-5 terms", t.as_secs_f64(), c4.len()))
}

fn criterion_3(dir: &Path) -> Check {
    let (code, _) = prig(&["lemma-r"], dir)?;
    let j = json(&dir.join("lemma-r.json"))?;
    let get = |k: &str| j[k].as_f64().unwrap_or(f64::NAN);
    let (rm, rp, rc) = (get("r_minus_one"), get("r_one"), get("critical"));
    // r(z) = (αz + 1)² − γ(α + z), vertex at z* = −(2α − γ)/(2α²).
    let (a, g) = (1.1f64, 1.63f64);
    let zs = -(2.0 * a - g) / (2.0 * a * a);
    let oracle = (a * zs + 1.0).powi(2) - g * (a + zs);
    ensure(code == 0, || format!("exit {code}"))?;
    ensure((rm + 0.153).abs() <= LEMMA_ENDPOINT_TOL, || format!("r(-1) = {rm}"))?;
    ensure((rp - 0.987).abs() <= LEMMA_ENDPOINT_TOL, || format!("r(1) = {rp}"))?;
    ensure((rc + 0.860).abs() <= LEMMA_CRITICAL_TOL, || format!("critical value {rc}"))?;
    ensure((rc - oracle).abs() <= 1e-14, || format!("critical value {rc} vs oracle {oracle}"))?;
    Ok(format!("r(-1) = {rm:.15}, r(1) = {rp:.15}, critical {rc:.6}"))
}

fn criterion_4(dir: &Path) -> Check {
    let (code, t) = prig(&["witness-verify", "--N", "100,1000,10000", "--grid-n", "2048"], dir)?;
    let rows = csv(&dir.join("witness-verify.csv"))?;
    let j = json(&dir.join("witness-verify.json"))?;
    ensure(rows.len() == 3, || format!("{} rows", rows.len()))?;
    let mut scaled = Vec::new();
    for r in &rows {
        let (n, rmax, rmin, res, max_r) = (num(&r[0]), num(&r[1]), num(&r[2]), num(&r[3]), num(&r[4]));
        ensure(max_r <= R_MAX, || format!("N = {n}: max|R| = {max_r}"))?;
        ensure(rmax <= RATIO_MAX && rmin <= RATIO_MAX, || format!("N = {n}: ratios {rmax}, {rmin}"))?;
        scaled.push(res * n);
    }
    let env = j["envelope"]["max_abs_r"].as_f64().unwrap_or(f64::NAN);
    ensure(env <= R_MAX, || format!("envelope max|R| = {env}"))?;
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().cloned().fold(0.0, f64::max);
    ensure(lo > 0.0 && hi / lo <= RESIDUAL_FACTOR, || format!("residual*N = {scaled:?}"))?;
    ensure(code == 0, || format!("exit {code}"))?;
    ensure(t.as_secs_f64() < WITNESS_SECS, || format!("took {:.1} s", t.as_secs_f64()))?;
    let worst = rows.iter().map(|r| num(&r[1]).max(num(&r[2]))).fold(0.0, f64::max);
    Ok(format!(
        "worst ratio {worst:.5}, max|R| {env:.5}, residual*N spread {:.3}, {:.1} s",
        hi / lo,
        t.as_secs_f64()
    ))
}

fn criterion_5() -> Check {
    let t = Instant::now();
    let grid = torus(LH_N);
    let tol = Tolerances::default();
    let h = std::f64::consts::TAU / LH_N as f64;
    let floor = -LH_DISC_FACTOR * h * h;
    let mut worst = f64::INFINITY;
    for s in 0..LH_PAIRS {
        let f = TrigPoly::random(2 * s, 3, 2).into_field("f");
        let g = TrigPoly::random(2 * s + 1, 3, 2).into_field("g");
        let r = lh_check(&f, &g, &grid, &tol).map_err(|e| format!("pair {s}: {e}"))?;
        ensure(r.margin >= floor, || format!("pair {s}: margin {} < {floor}", r.margin))?;
        worst = worst.min(r.margin);
    }
    ensure(t.elapsed().as_secs_f64() < LH_SECS, || format!("took {:.1} s", t.elapsed().as_secs_f64()))?;
    Ok(format!("{LH_PAIRS} pairs, smallest margin {worst:.4e} (floor {floor:.3e}), {:.1} s", t.elapsed().as_secs_f64()))
}

fn criterion_6(dir: &Path) -> Check {
    let (code, _) = prig(&["integral-identity", "--fields", "sin-p,sin-q", "--n", "256"], dir)?;
    let j = json(&dir.join("integral-identity.json"))?;
    let rel = j["identity"]["rel_err"].as_f64().unwrap_or(f64::NAN);
    let rhs = j["identity"]["rhs"].as_f64().unwrap_or(f64::NAN);
    let psi = j["psi"].as_f64().unwrap_or(f64::NAN);
    // {{F,G},F} = cos²p sin q and {{F,G},G} = −sin p cos²q; each squared
    // integral is (3π/4)·π.
    let pi2 = std::f64::consts::PI.powi(2);
    let expected = 1.5 * pi2;
    ensure(code == 0, || format!("exit {code}"))?;
    ensure(rel <= IDENTITY_TOL, || format!("relative error {rel}"))?;
    ensure((rhs + expected).abs() <= 1e-9 * expected, || format!("rhs {rhs} vs {}", -expected))?;
    ensure((psi - 2.0).abs() <= PSI_TOL, || format!("psi = {psi}"))?;
    Ok(format!("relative error {rel:.2e}, psi = {psi:.12}"))
}

fn criterion_7() -> Check {
    let grid = torus(128);
    let (mut jac, mut zm) = (0.0f64, 0.0f64);
    for s in 0..20u64 {
        let f = TrigPoly::random(3 * s, 3, 2).into_field("f");
        let g = TrigPoly::random(3 * s + 1, 3, 2).into_field("g");
        let h = TrigPoly::random(3 * s + 2, 3, 2).into_field("h");
        jac = jac.max(jacobi_residual(&f, &g, &h, &grid).map_err(|e| e.to_string())?.residual);
        zm = zm.max(zero_mean_residual(&f, &g, &grid).map_err(|e| e.to_string())?.residual);
    }
    ensure(jac <= JACOBI_TOL, || format!("Jacobi residual {jac}"))?;
    ensure(zm <= ZERO_MEAN_TOL, || format!("zero-mean residual {zm}"))?;
    // F and G live in boxes whose union sits inside the plateau of phi.
    let b = Plateau::new(-0.4, 0.4, 0.3).unwrap();
    let cut = Plateau::new(-1.1, 1.1, 0.5).unwrap();
    let phi = plateau_field(cut, cut);
    let rect = Domain2::rectangle((-2.0, 2.0), (-2.0, 2.0), 161, 0).unwrap().grid();
    let mut cres = 0.0f64;
    for s in 0..10u64 {
        let shift = -0.3 + 0.06 * s as f64;
        let f = plateau_field(b, b).try_mul(&TrigPoly::random(s, 2, 2).into_field("t1")).unwrap();
        let bs = Plateau::new(-0.4 + shift, 0.4 + shift, 0.3).unwrap();
        let g = plateau_field(bs, b).try_mul(&TrigPoly::random(s ^ 1, 2, 2).into_field("t2")).unwrap();
        cres = cres.max(cutoff_residual(&f, &g, &phi, &rect).map_err(|e| e.to_string())?.bracket_residual);
    }
    ensure(cres <= CUTOFF_TOL, || format!("cutoff residual {cres}"))?;
    Ok(format!("Jacobi {jac:.2e}, zero-mean {zm:.2e}, cutoff {cres:.2e}"))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid = torus(96);
    let mut worst = 0.0f64;
    for s in 0..20u64 {
        let f = TrigPoly::random(rng.gen(), 3, 2).into_field("f");
        let g = TrigPoly::random(rng.gen(), 3, 2).into_field("g");
        let v = FunctionalVector::new([rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0)])
            .map_err(|e| e.to_string())?;
        let (alpha, beta) = (rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0));
        for e in [SymmetryElement::A, SymmetryElement::B, SymmetryElement::C, SymmetryElement::Scale { alpha, beta }] {
            let r = symmetry_check(&v, &f, &g, e, &grid).map_err(|e| e.to_string())?;
            ensure(r.rel_err <= SYMMETRY_TOL, || format!("pair {s}, {e:?}: {}", r.rel_err))?;
            worst = worst.max(r.rel_err);
        }
    }
    Ok(format!("20 pairs x 4 elements, worst relative error {worst:.2e}"))
}

fn mobius(n: usize) -> i64 {
    let (mut m, mut k, mut sign) = (n, 2, 1);
    while k * k <= m {
        if m % k == 0 {
            m /= k;
            if m % k == 0 {
                return 0;
            }
            sign = -sign;
        }
        k += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

fn criterion_9() -> Check {
    let basis = lyndon_basis(8).map_err(|e| e.to_string())?;
    let counts: Vec<usize> = (1..=8).map(|d| basis.iter().filter(|w| w.degree() == d).count()).collect();
    // Witt's formula (1/d) Σ_{k|d} μ(k) 2^{d/k}.
    let witt: Vec<usize> = (1..=8)
        .map(|d| ((1..=d).filter(|k| d % k == 0).map(|k| mobius(k) * (1i64 << (d / k))).sum::<i64>() / d as i64) as usize)
        .collect();
    ensure(counts == [2, 1, 2, 3, 6, 9, 18, 30] && counts == witt, || format!("counts {counts:?}, Witt {witt:?}"))?;

    let small = lyndon_basis(6).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let random_poly = |rng: &mut ChaCha8Rng| {
        let k = rng.gen_range(1..=3);
        LiePoly::from_terms(
            (0..k).map(|_| (small[rng.gen_range(0..small.len())].clone(), rat(rng.gen_range(-4..=4), rng.gen_range(1..=3)))),
            18,
        )
    };
    let md = 18;
    for i in 0..LIE_TRIPLES {
        let (x, y, z) = (random_poly(&mut rng), random_poly(&mut rng), random_poly(&mut rng));
        ensure(bracket(&x, &y, md) == -&bracket(&y, &x, md), || format!("triple {i}: antisymmetry"))?;
        let j1 = bracket(&bracket(&x, &y, md), &z, md);
        let j2 = bracket(&bracket(&y, &z, md), &x, md);
        let j3 = bracket(&bracket(&z, &x, md), &y, md);
        ensure((&(&j1 + &j2) + &j3).is_zero(), || format!("triple {i}: Jacobi"))?;
    }
    Ok(format!("Witt counts {counts:?}; {LIE_TRIPLES} triples exact"))
}

/// Least squares for `ln d = ln C + e ln ε`: `(C, e, rms, max |residual|)`.
fn ols(points: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let e = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let b = (sy - e * sx) / n;
    let res: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - b - e * x).collect();
    let rms = (res.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
    (b.exp(), e, rms, res.iter().fold(0.0, |m, r| m.max(r.abs())))
}

fn criterion_10(dir: &Path) -> Check {
    let t = Instant::now();
    let (a, b, c) = (dir.join("max-a"), dir.join("max-b"), dir.join("double"));
    let (code_a, _) = prig(&["rate-scan", "--which", "maxFG", "--seed", "0"], &a)?;
    let (code_b, _) = prig(&["rate-scan", "--which", "maxFG", "--seed", "0"], &b)?;
    let (code_c, _) = prig(&["rate-scan", "--which", "double", "--seed", "0"], &c)?;
    for f in ["rate-scan.csv", "rate-scan.json"] {
        let same = fs::read(a.join(f)).ok() == fs::read(b.join(f)).ok();
        ensure(same, || format!("{f} differs between identical runs"))?;
    }
    let points = |dir: &Path| -> Result<Vec<(f64, f64)>, String> {
        Ok(csv(&dir.join("rate-scan.csv"))?.iter().map(|r| (num(&r[0]), num(&r[2]))).collect())
    };
    let max_pts = points(&a)?;
    ensure(max_pts.len() == 10, || format!("{} maxFG rows", max_pts.len()))?;
    ensure(max_pts.iter().all(|p| p.1 > 0.0), || format!("non-strict decrease in {max_pts:?}"))?;
    let (_, e_max, _, _) = ols(&max_pts);
    ensure(e_max >= RATE_MIN_EXPONENT, || format!("maxFG exponent {e_max}"))?;
    // Ψ(sin p, sin q) = 2.
    let law = |eps: f64| RATE_LAW_CONSTANT * 2f64.cbrt() * eps.powf(2.0 / 3.0);
    for &(eps, d) in &max_pts {
        ensure(d <= law(eps), || format!("eps {eps:e}: d = {d} > {}", law(eps)))?;
    }

    let dbl = points(&c)?;
    ensure(dbl.len() == 10 && dbl.iter().all(|p| p.1 > 0.0), || format!("double rows {dbl:?}"))?;
    let (c_fit, e_dbl, rms, max_res) = ols(&dbl);
    let j = json(&c.join("rate-scan.json"))?;
    let reported = j["residual"].as_f64().unwrap_or(f64::NAN);
    let reported_c = j["C"].as_f64().unwrap_or(f64::NAN);
    ensure((reported - rms).abs() <= 1e-9 && (reported_c / c_fit - 1.0).abs() <= 1e-9, || {
        format!("reported fit C = {reported_c}, residual = {reported} vs oracle {c_fit}, {rms}")
    })?;
    for &(eps, d) in &dbl {
        let bound = c_fit * eps.cbrt() * max_res.exp();
        ensure(d <= bound, || format!("double eps {eps:e}: d = {d} > {bound}"))?;
    }
    ensure(code_a == 0 && code_b == 0 && code_c == 0, || format!("exit codes {code_a} {code_b} {code_c}"))?;
    ensure(t.elapsed().as_secs_f64() < RATE_SECS, || format!("took {:.1} s", t.elapsed().as_secs_f64()))?;
    Ok(format!(
        "maxFG exponent {e_max:.3}; double C_fit {c_fit:.3}, exponent {e_dbl:.3}, residual {rms:.3}; {:.1} s",
        t.elapsed().as_secs_f64()
    ))
}

fn criterion_11(dir: &Path) -> Check {
    let (code, _) = prig(&["y-bound", "--fields", "sin-p,sin-q", "--s", "0.1", "--t", "0.1", "--steps", "64"], dir)?;
    let j = json(&dir.join("y-bound.json"))?;
    let slack = j["slack"].as_f64().unwrap_or(f64::NAN);
    ensure(code == 0 && slack >= Y_SLACK_TOL, || format!("exit {code}, slack {slack}"))?;
    let (my, bound) = (j["max_y"].as_f64().unwrap_or(f64::NAN), j["bound"].as_f64().unwrap_or(f64::NAN));
    Ok(format!("max Y {my:.6e} <= bound {bound:.6e}, slack {slack:.3e}"))
}

#[test]
fn acceptance_criteria() {
    let tmp = TempDir::new().unwrap();
    let d = |name: &str| tmp.path().join(name);
    let criteria: Vec<Criterion> = vec![
        ("flow expansion 3.2", Box::new(|| criterion_1(&d("c1")))),
        ("flow expansion 3.3", Box::new(|| criterion_2(&d("c2")))),
        ("quadratic r extrema", Box::new(|| criterion_3(&d("c3")))),
        ("counterexample ratios", Box::new(|| criterion_4(&d("c4")))),
        ("Landau-Hadamard bound", Box::new(criterion_5)),
        ("integral identity and Psi", Box::new(|| criterion_6(&d("c6")))),
        ("Jacobi, zero mean, cutoff", Box::new(criterion_7)),
        ("dihedral and scaling symmetries", Box::new(criterion_8)),
        ("free Lie algebra", Box::new(criterion_9)),
        ("rate scan", Box::new(|| criterion_10(&d("c10")))),
        ("Y bound", Box::new(|| criterion_11(&d("c11")))),
    ];
    let mut failed = Vec::new();
    std::io::stdout().lock().write_all(b"\n").unwrap();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let line = match &outcome {
            Ok(detail) => format!("criterion {:>2}: PASS  {name}: {detail}\n", i + 1),
            Err(detail) => format!("criterion {:>2}: FAIL  {name}: {detail}\n", i + 1),
        };
        // Written to the raw handle so the lines show up without --nocapture.
        let mut out = std::io::stdout().lock();
        out.write_all(line.as_bytes()).unwrap();
        out.flush().unwrap();
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

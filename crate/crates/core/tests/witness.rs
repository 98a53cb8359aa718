use std::sync::OnceLock;

use poisson_rigidity::field::{cutoff_residual, iterated_bracket, BracketWord, Domain2, Grid, JetField};
use poisson_rigidity::witness::*;
use proptest::prelude::*;

fn default_witness() -> &'static WitnessFields {
    static W: OnceLock<WitnessFields> = OnceLock::new();
    W.get_or_init(|| build_witness(&WitnessConfig::default()).unwrap())
}

// ---------------------------------------------------------------------------
// r(α, γ, z)

#[test]
fn r_values_at_lemma_point() {
    let r = RPolynomial::new(1.1, 1.63);
    let [c0, c1, c2] = r.coefficients();
    assert!((c2 - 1.21).abs() < 1e-15 && (c1 - 0.57).abs() < 1e-15 && (c0 + 0.793).abs() < 1e-15);
    let e = r.extrema();
    assert!((e.at_minus_one + 0.153).abs() < 1e-12);
    assert!((e.at_one - 0.987).abs() < 1e-12);
    let crit = e.critical.unwrap();
    assert!((crit - (-0.57f64.powi(2) / (4.0 * 1.21) - 0.793)).abs() < 1e-12);
    assert!((crit + 0.86).abs() < 1e-3);
    assert!(e.max_abs() < 0.99);
}

/// Largest κ on the 1e−5 grid, with the inner max over z taken by a dense scan.
fn kappa_oracle(bound: f64) -> f64 {
    let max_abs = |a: f64| {
        (0..=20_000)
            .map(|i| r_eval(a, 1.63, -1.0 + i as f64 * 1e-4))
            .fold(0.0f64, |m, x| m.max(x.abs()))
    };
    let mut k = 0;
    loop {
        let d = (k + 1) as f64 * 1e-5;
        if max_abs(1.1 - d) >= bound || max_abs(1.1 + d) >= bound {
            return k as f64 * 1e-5;
        }
        k += 1;
    }
}

#[test]
fn kappa_matches_grid_scan() {
    let k = kappa_search(1.63, 0.99, 1.1).unwrap();
    assert!((k - kappa_oracle(0.99)).abs() <= 1e-5 + 1e-15, "{k}");
    // margin 0.003 at z = 1 over ∂r/∂α = 2(α + 1) − γ = 2.57
    assert!((k - 0.003 / 2.57).abs() < 2e-5, "{k}");
}

#[test]
fn kappa_errors_and_monotonicity() {
    assert!(matches!(kappa_search(1.63, 0.987, 1.1), Err(WitnessError::Unachievable { .. })));
    assert!(kappa_search(1.63, 1.0, 1.1).is_err());
    let k = kappa_search(1.63, 0.99, 1.1).unwrap();
    assert!(kappa_search(1.63, 1.0 - 1e-9, 1.1).unwrap() > k);
}

#[test]
fn lemma_holds_on_kappa_rectangle() {
    let k = kappa_search(1.63, 0.99, 1.1).unwrap();
    let n = (2.0 * k / 1e-4).ceil() as usize;
    for i in 0..=n {
        let a = 1.1 - k + 2.0 * k * i as f64 / n as f64;
        for j in 0..=20_000 {
            let z = -1.0 + j as f64 * 1e-4;
            assert!(r_eval(a, 1.63, z).abs() < 0.99, "alpha {a} z {z}");
        }
    }
}

// ---------------------------------------------------------------------------
// Construction

#[test]
fn default_construction_satisfies_every_condition() {
    let w = default_witness();
    let rep = check_invariants(w);
    assert!(rep.pass, "{:#?}", rep.failures());
    assert_eq!(rep.checks.len(), 18);
    assert_eq!(w.kappa, kappa_search(1.63, 0.99, 1.1).unwrap());
    assert!(w.c[0] > 0.0);
    for i in 0..3 {
        assert!((w.c[i + 1] - w.c[i] - 0.05).abs() < 1e-12);
    }
}

#[test]
fn integral_of_w_vanishes() {
    let w = default_witness();
    assert!(w.w_integral().abs() <= 1e-10);
    // Composite Simpson on each knot interval.
    let pr = &w.profiles;
    let knots = pr.w.knots();
    let mut total = 0.0;
    for win in knots.windows(2) {
        let (a, b) = (win[0], win[1]);
        let m = 64;
        let h = (b - a) / m as f64;
        let mut s = pr.w.value(a) + pr.w.value(b);
        for i in 1..m {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * pr.w.value(a + i as f64 * h);
        }
        total += s * h / 3.0;
    }
    assert!(total.abs() < 1e-9, "{total}");
}

#[test]
fn profile_derivatives_match_finite_differences() {
    let w = default_witness();
    let [c1, c2, _, c4] = w.c;
    let h = w.spike_halfwidth;
    let fd = |f: &dyn Fn(f64) -> [f64; 5], x: f64, k: usize, e: f64| (f(x + e)[k] - f(x - e)[k]) / (2.0 * e);
    let check = |f: &dyn Fn(f64) -> [f64; 5], x: f64, e: f64, tol: f64| {
        let d = f(x);
        for k in 0..3 {
            let approx = fd(f, x, k, e);
            assert!((approx - d[k + 1]).abs() <= tol * (1.0 + d[k + 1].abs()), "x {x} k {k}: {approx} vs {}", d[k + 1]);
        }
    };
    for p in [0.3, 1.0, 1.7, 2.5, 3.9] {
        check(&|x| w.u(x), p, 1e-5, 1e-5);
    }
    for q in [10.0, 60.0, c1 - 1.0, c4 + 100.0, 450.0] {
        check(&|x| w.w(x), q, 1e-4, 1e-5);
        check(&|x| w.a(x), q, 1e-4, 1e-5);
    }
    // Inside the wiggle: a = 1.1 − 1.63 ln(w/w(c₁)) and its derivative a′.
    for q in [w.spikes[0] - 0.5 * h, w.spikes[0] + 0.3 * h, c2 + 0.5 * 0.05, w.spikes[1] + 0.2 * h] {
        check(&|x| w.a(x), q, h * 1e-3, 1e-4);
        check(&|x| w.da(x), q, h * 1e-3, 1e-4);
        let a = w.a(q);
        assert!((a[1] - w.da(q)[0]).abs() < 1e-12 * (1.0 + a[1].abs()));
        let direct = 1.1 - 1.63 * (w.w(q)[0] / w.w(c1)[0]).ln();
        assert!((a[0] - direct).abs() < 1e-14);
    }
}

#[test]
fn f_n_converges_uniformly() {
    let w = default_witness();
    let (f, n) = (w.f(), 100);
    let fnn = w.f_n(n);
    let amax = fine_q_nodes(w).iter().map(|&q| w.a(q)[0].abs()).fold(0.0, f64::max);
    assert!(amax <= 1.2);
    let (q0, q1) = w.support_q();
    let grid = Grid::tensor((0..=400).map(|i| i as f64 * 0.01).collect(), (0..=800).map(|i| q0 + (q1 - q0) * i as f64 / 800.0).chain([w.spikes[0], w.c[1]]).collect());
    let diff = grid.eval(|p, q| fnn.value(p, q) - f.value(p, q));
    assert!(diff.sup_norm() <= amax / n as f64 + 1e-15);
    assert!(diff.sup_norm() <= 0.02 * 1.2);
}

#[test]
fn config_errors() {
    let bad = |f: fn(&mut WitnessConfig)| {
        let mut c = WitnessConfig::default();
        f(&mut c);
        build_witness(&c)
    };
    assert!(matches!(bad(|c| c.delta = 0.0), Err(WitnessError::InvalidConfig(_))));
    assert!(matches!(bad(|c| c.kappa = Some(-1.0)), Err(WitnessError::InvalidConfig(_))));
    assert!(matches!(bad(|c| c.n_list = vec![10, 0]), Err(WitnessError::InvalidConfig(_))));
    assert!(matches!(bad(|c| c.c1 = -1.0), Err(WitnessError::InvalidConfig(_))));
    assert!(matches!(bad(|c| c.tail_len = 50.0), Err(WitnessError::Infeasible(_))));
    assert!(matches!(bad(|c| c.taper_len = 20.0), Err(WitnessError::Infeasible(_))));
    assert!(matches!(bad(|c| c.c1 = 100.0), Err(WitnessError::Infeasible(_))));
}

#[test]
fn config_json_round_trip_rejects_unknown_keys() {
    let c = WitnessConfig::default();
    let s = serde_json::to_string(&c).unwrap();
    assert_eq!(serde_json::from_str::<WitnessConfig>(&s).unwrap(), c);
    assert_eq!(serde_json::from_str::<WitnessConfig>("{}").unwrap(), c);
    assert!(serde_json::from_str::<WitnessConfig>(r#"{"delta":0.05,"bogus":1}"#).is_err());
}

#[test]
fn knots_json_shape() {
    let w = default_witness();
    let j = w.knots_json();
    for key in ["config", "kappa", "c", "splines", "a_zone", "w_integral", "lobe_flat"] {
        assert!(j.get(key).is_some(), "{key}");
    }
    for s in ["u", "w", "v", "a_outer"] {
        let sp = &j["splines"][s];
        let knots = sp["knots"].as_array().unwrap().len();
        assert_eq!(sp["coeffs"].as_array().unwrap().len(), knots - 1);
        assert!(sp["degree"].as_u64().unwrap() <= 11);
    }
}

// ---------------------------------------------------------------------------
// R and the double bracket

#[test]
fn r_envelope_bounds() {
    let w = default_witness();
    let env = r_envelope(w).unwrap();
    assert!(env.max_abs_r <= 0.99, "{env:?}");
    assert!(env.max_abs_r_outside <= 0.36, "{env:?}");
    assert!(env.max_ratio_in_zone <= 0.99, "{env:?}");
    // Case 1 saturates near r(1) = 0.987.
    assert!(env.max_ratio_in_zone > 0.98);
}

#[test]
fn r_field_matches_formula_and_vanishes_off_support() {
    let w = default_witness();
    let n = 37;
    let r = w.r_field(n);
    let (q0, _) = w.support_q();
    for (p, q) in [(0.7, w.spikes[0]), (1.2, w.c[2]), (3.3, 40.0), (2.0, w.c[3] + 20.0)] {
        let z = (n as f64 * w.u(p)[0]).cos();
        let (ww, dw, a, da) = (w.w(q)[0], w.dw(q)[0], w.a(q)[0], w.da(q)[0]);
        let expected = dw * (a * z + 1.0).powi(2) + da * ww * (a + z);
        assert!((r.value(p, q) - expected).abs() < 1e-12);
        assert!(r.value(p, q).abs() <= 0.99);
    }
    for p in [0.1, 1.0, 2.9] {
        assert_eq!(r.value(p, q0 - 0.5), 0.0);
    }
}

#[test]
fn double_brackets_match_closed_forms() {
    let w = default_witness();
    let (f, g) = (w.f(), w.g());
    let fgf = iterated_bracket(&BracketWord::fgf(), &f, &g).unwrap();
    let [c1, c2, _, c4] = w.c;
    let qs = [w.spikes[0], w.spikes[1] + 1e-4, c2 + 0.02, c1 + 0.001, c4 + 30.0, 60.0];
    let ps = [0.25, 1.0, 1.37, 2.2, 3.0, 3.8];
    for &p in &ps {
        for &q in &qs {
            let u = w.u(p);
            // {{F,G},F} = u′² v″ = u′² w′
            assert!((fgf.value(p, q) - u[1] * u[1] * w.dw(q)[0]).abs() < 1e-12);
        }
    }
    for n in [10u64, 1000, 100_000] {
        let nf = n as f64;
        let fnn = w.f_n(n);
        let d = iterated_bracket(&BracketWord::fgf(), &fnn, &g).unwrap();
        for &p in &ps {
            for &q in &qs {
                let u = w.u(p);
                let (ww, dw, a, da) = (w.w(q)[0], w.dw(q)[0], w.a(q)[0], w.da(q)[0]);
                let (s, c) = (nf * u[0]).sin_cos();
                let r = dw * (a * c + 1.0).powi(2) + da * ww * (a + c);
                // {{F_N,G},F_N} = u′²R − w a′ u″ sin(Nu)(1 + a cos Nu)/N
                let expected = u[1] * u[1] * r - ww * da * u[2] * s * (1.0 + a * c) / nf;
                let got = d.value(p, q);
                assert!((got - expected).abs() < 1e-9 * (1.0 + expected.abs()), "N {n} ({p},{q}): {got} vs {expected}");
            }
        }
    }
}

#[test]
fn theorem41_ratios() {
    let w = default_witness();
    let rep = verify_theorem41(w, &[100, 1000, 10000], 2048).unwrap();
    assert_eq!(rep.rows.len(), 3);
    for row in &rep.rows {
        assert!((row.max_fgf - 1.0).abs() < 1e-9 && (row.min_fgf + 1.0).abs() < 1e-9, "{row:?}");
        assert!(row.within_bound(), "{row:?}");
        assert!(row.max_r <= 0.99);
        assert!(row.residual <= row.residual_bound);
        if row.n >= 1000 {
            assert!(row.ratio_max <= 0.995 && row.ratio_min <= 0.995, "{row:?}");
        }
    }
    let scaled: Vec<f64> = rep.rows.iter().map(|r| r.residual * r.n as f64).collect();
    let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi / lo < 2.0, "residual·N {scaled:?}");
    assert!(matches!(verify_theorem41(w, &[100], 1024), Err(WitnessError::InvalidConfig(_))));
}

#[test]
fn cutoff_identities() {
    let w = default_witness();
    let rep = cutoff_witness(w, 0.5, 1.0, 128, Some(50)).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!((rep.max_side.cut_max - rep.max_side.uncut_max).abs() <= 1e-9);
    assert!(matches!(cutoff_witness(w, -0.2, 1.0, 128, None), Err(WitnessError::PlateauTooSmall(_))));

    // φ ≡ 1: trivial equality.
    let grid = Domain2::rectangle((0.0, 4.0), (w.c[0] - 1.0, w.c[3] + 1.0), 64, 0).unwrap().grid();
    let r = cutoff_residual(&w.f(), &w.g(), &JetField::constant(1.0), &grid).unwrap();
    assert_eq!(r.bracket_residual, 0.0);
    assert_eq!(r.max_residual, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn varied_configs_keep_every_condition(delta in 0.02f64..0.1, plateau in 1.0f64..1.1, c1 in 130.0f64..200.0, depth in 0.5f64..1.1) {
        let cfg = WitnessConfig { delta, plateau, c1, lobe_depth: depth, ..WitnessConfig::default() };
        let w = build_witness(&cfg).unwrap();
        let rep = check_invariants(&w);
        prop_assert!(rep.pass, "{:#?}", rep.failures());
        let env = r_envelope(&w).unwrap();
        prop_assert!(env.max_abs_r <= 0.99);
    }
}

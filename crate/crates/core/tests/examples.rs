//! Worked examples for each module, checked against hand-computed values.

use num_complex::Complex64;

use bwshift::presets::load_preset;
use bwshift::{
    analyze, apply, check_boundedness, check_chaotic, check_dichotomy_preconditions,
    check_divergent_subspace, check_generic_criteria, check_hypercyclic, check_mixing,
    check_supercyclic, coefficient_functional_bound, decompose, detect_limit_point,
    essential_spectrum_estimate, eval_sequence, evaluate, laurent_from_schauder, monomial_norm,
    parse_expression, schauder_from_laurent, simulate_orbit, slog_product, vector_norm,
    AnalysisParams, BasisTag, BilateralVector, ExperimentConfig, Schedule, SequenceSpec,
    SpaceParams, Status, WeightedShift, Window,
};

fn preset(name: &str) -> WeightedShift {
    WeightedShift::new(load_preset(name).unwrap().shift).unwrap()
}

fn shift(a: &str, b: Option<&str>, w: &str, extra: &str) -> WeightedShift {
    let b = b.map_or(String::new(), |b| {
        format!(r#""b": [{{"where": "otherwise", "expr": "{b}"}}],"#)
    });
    let json = format!(
        r#"{{
            "p": 2, {extra}
            "a": [{{"where": "otherwise", "expr": "{a}"}}], {b}
            "w": [{{"where": "otherwise", "expr": "{w}"}}]
        }}"#
    );
    WeightedShift::new(ExperimentConfig::from_json(&json).unwrap().shift).unwrap()
}

fn params() -> AnalysisParams {
    AnalysisParams::default()
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * y.abs().max(1.0)
}

#[test]
fn expressions_and_sequences() {
    assert_eq!(parse_expression("2^n").unwrap().eval(3), 8.0);
    assert_eq!(parse_expression("n*2^(n-2)").unwrap().eval(-1), -0.125);
    assert_eq!(
        parse_expression("(1-2^(-2*(n+1)))/(2*(n+1))")
            .unwrap()
            .eval(0),
        0.375
    );
    assert_eq!(parse_expression("-2^2").unwrap().eval(0), -4.0);

    let w = SequenceSpec::parse("w", [("n>=0", "2"), ("n<=-1", "2^n")], false).unwrap();
    assert_eq!(eval_sequence(&w, -3).unwrap(), 0.125);
    let b = SequenceSpec::parse("b", [("n==0", "1"), ("n>=1", "1/n")], true).unwrap();
    assert_eq!(eval_sequence(&b, -5).unwrap(), 0.0);
    let a = SequenceSpec::parse("a", [("n>=0", "1"), ("n<=-1", "2^n")], false).unwrap();
    assert_eq!(eval_sequence(&a, -2).unwrap(), 0.25);
}

#[test]
fn classical_shift_is_valid_and_degenerate() {
    let op = shift("1", None, "1", "");
    assert!(matches!(
        op.validation().growth,
        bwshift::seqexpr::GrowthCondition::Degenerate { .. }
    ));
    assert!(op.validation().radii.degenerate);
}

#[test]
fn signed_log_products() {
    let p = slog_product([2.0, 2.0, 2.0, 2.0]);
    assert_eq!(p.sign(), 1);
    assert!(close(p.ln_mag(), 4.0 * 2f64.ln(), 1e-15));
    let empty = slog_product(std::iter::empty());
    assert_eq!((empty.sign(), empty.ln_mag()), (1, 0.0));
    let inv = slog_product((0..10).map(|k| 2f64.powi(-k))).recip();
    assert!(close(inv.ln_mag(), 45.0 * 2f64.ln(), 1e-15));
}

#[test]
fn vector_norms() {
    let w = Window::default();
    let sp = SpaceParams::default();
    let e7 = BilateralVector::unit(w, 7, BasisTag::Schauder);
    assert_eq!(vector_norm(&e7, &sp).unwrap(), 1.0);
    let ones =
        BilateralVector::from_entries(w, (0..4).map(|n| (n, 1.0)), BasisTag::Schauder).unwrap();
    assert_eq!(vector_norm(&ones, &sp).unwrap(), 2.0);
    let u = BilateralVector::from_entries(
        w,
        (1..=4).map(|k| (1i64 << k, 2f64.powi(-(1 << k)))),
        BasisTag::Schauder,
    )
    .unwrap();
    let want = (2f64.powi(-4) + 2f64.powi(-8) + 2f64.powi(-16) + 2f64.powi(-32)).sqrt();
    assert!(close(vector_norm(&u, &sp).unwrap(), want, 1e-15));
}

#[test]
fn monomial_norms() {
    let op = preset("zero_one_failure");
    for nu in 0..=4 {
        let n = monomial_norm(&op, nu).unwrap().norm;
        assert!(close(n * n, 4.0 / 3.0, 1e-14), "nu = {nu}: {n}");
    }
    // single-term expansion: ‖z^ν‖ = 1 / |a_ν| = 2^3
    assert_eq!(monomial_norm(&op, -3).unwrap().norm, 8.0);
    let classical = preset("classical_rolewicz");
    for nu in -5..=5 {
        assert_eq!(monomial_norm(&classical, nu).unwrap().norm, 1.0);
    }
}

#[test]
fn laurent_coordinates() {
    let full = shift("2", Some("1"), "1", r#""basis_variant": "full_affine","#);
    let w = full.window();
    let e0 = BilateralVector::unit(w, 0, BasisTag::Schauder);
    let l = laurent_from_schauder(&full, &e0).unwrap();
    assert_eq!((l.get(0), l.get(1)), (2.0, 1.0));
    assert_eq!(l.iter().filter(|(_, x)| *x != 0.0).count(), 2);
    let back = schauder_from_laurent(&full, &l).unwrap();
    assert!(back.sub(&e0).coeffs().iter().all(|x| x.abs() < 1e-15));

    let op = preset("zero_one_failure");
    let em1 = BilateralVector::unit(op.window(), -1, BasisTag::Schauder);
    let l = laurent_from_schauder(&op, &em1).unwrap();
    assert_eq!(l.get(-1), 0.5);
    assert_eq!(l.iter().filter(|(_, x)| *x != 0.0).count(), 1);

    let pair = BilateralVector::from_entries(op.window(), [(0, 1.0), (1, 1.0)], BasisTag::Schauder)
        .unwrap();
    let l = laurent_from_schauder(&op, &pair).unwrap();
    assert_eq!((l.get(0), l.get(1), l.get(2)), (1.0, 1.5, 0.5));
}

#[test]
fn point_evaluation() {
    let zeta = Complex64::new(0.75, 0.0);
    let mut cfg = load_preset("zero_one_failure").unwrap();
    cfg.shift.params.variant = bwshift::BasisVariant::FullAffine;
    let full = WeightedShift::new(cfg.shift).unwrap();
    let e0 = BilateralVector::unit(full.window(), 0, BasisTag::Schauder);
    assert_eq!(
        evaluate(&full, &e0, zeta).unwrap(),
        Complex64::new(1.0 + 0.75 * 0.5, 0.0)
    );

    let op = preset("zero_one_failure");
    let em1 = BilateralVector::unit(op.window(), -1, BasisTag::Schauder);
    let f = evaluate(&op, &em1, zeta).unwrap();
    assert!((f.re - 2.0 / 3.0).abs() < 1e-15 && f.im == 0.0);
    let zero = BilateralVector::zeros(op.window(), BasisTag::Schauder);
    assert_eq!(
        evaluate(&op, &zero, zeta).unwrap(),
        Complex64::new(0.0, 0.0)
    );
    let e0 = BilateralVector::unit(op.window(), 0, BasisTag::Schauder);
    assert!((evaluate(&op, &e0, zeta).unwrap().re - (1.0 + 0.75 * 0.5)).abs() < 1e-15);
    assert!(evaluate(&op, &e0, Complex64::new(0.25, 0.0)).is_err());
}

#[test]
fn coefficient_functional_bounds() {
    let op = preset("zero_one_failure");
    assert!(close(
        coefficient_functional_bound(&op, 1).unwrap(),
        1.25f64.sqrt(),
        1e-15
    ));
    let classical = shift("3", None, "1", "");
    assert_eq!(coefficient_functional_bound(&classical, 4).unwrap(), 3.0);
    let mut cfg = load_preset("example_chaotic").unwrap();
    cfg.shift.params.norm = bwshift::NormKind::C0;
    let c0 = WeightedShift::new(cfg.shift).unwrap();
    assert_eq!(coefficient_functional_bound(&c0, 2).unwrap(), 2.0);
}

#[test]
fn classical_shift_moves_unit_vectors() {
    let op = preset("classical_rolewicz");
    for n in -10..=10 {
        let e = BilateralVector::unit(op.window(), n, BasisTag::Schauder);
        let img = apply(&op, 1, &e).unwrap();
        let want = BilateralVector::unit(op.window(), n - 1, BasisTag::Schauder).scale(2.0);
        assert_eq!(img.vector, want);
    }
}

#[test]
fn essential_spectrum_annuli() {
    let s =
        essential_spectrum_estimate(&decompose(&preset("classical_rolewicz"), 8).unwrap()).unwrap();
    assert!(close(s.inner, 2.0, 1e-12) && close(s.outer, 2.0, 1e-12));
    assert!(!s.meets_unit_circle);

    let s =
        essential_spectrum_estimate(&decompose(&preset("zero_one_failure"), 8).unwrap()).unwrap();
    assert!(
        close(s.inner, 2.0, 1e-9) && close(s.outer, 4.0, 1e-9),
        "{s:?}"
    );
    assert!(!s.meets_unit_circle);

    // γ_{-m} grows like 4^m / m, so on the negative side
    // α_n = (1/4) sqrt(γ_n / γ_{n+1}) tends to 1/2, not 1/4
    let s = essential_spectrum_estimate(&decompose(&preset("bergman"), 8).unwrap()).unwrap();
    // sqrt((n+2)/(n+1)) approaches 1 only like 1 + 1/(2n), so the
    // outer estimate lags well behind the inner one on a finite block
    assert!((s.outer - 4.0).abs() < 0.2, "{s:?}");
    assert!((s.inner - 0.5).abs() < 0.05, "{s:?}");
    assert!(s.meets_unit_circle);
}

#[test]
fn boundedness() {
    assert_eq!(
        check_boundedness(&preset("example_chaotic"), &params())
            .unwrap()
            .status,
        Status::Holds
    );
    let zero_one = check_boundedness(&preset("zero_one_failure"), &params()).unwrap();
    assert_eq!(zero_one.status, Status::Holds);
    let growing = shift("1", None, "abs(n)+1", "");
    let v = check_boundedness(&growing, &params()).unwrap();
    assert_eq!(v.status, Status::Fails);
    assert!(v.certificate.is_some());
}

#[test]
fn hypercyclicity_and_mixing() {
    let p = params();
    assert_eq!(
        check_hypercyclic(&preset("example_chaotic"), &p)
            .unwrap()
            .status,
        Status::Holds
    );
    let v = check_hypercyclic(&preset("example_supercyclic_only"), &p).unwrap();
    assert_eq!(v.status, Status::Fails);
    assert!(v.certificate.unwrap().ends_with("sup = 1e0"));
    assert_eq!(
        check_hypercyclic(&preset("zero_one_failure"), &p)
            .unwrap()
            .status,
        Status::Fails
    );
    assert_eq!(
        check_mixing(&preset("example_chaotic"), &p).unwrap().status,
        Status::Holds
    );
    assert_eq!(
        check_mixing(&preset("bergman"), &p).unwrap().status,
        Status::Holds
    );

    // blocks of eight weights 2 followed by eight weights 1/2: products
    // oscillate, so there is no full limit
    let blocks: Vec<(String, String)> = (-64..=64)
        .map(|n: i64| {
            let up = (n.rem_euclid(16)) < 8;
            (format!("n=={n}"), if up { "2" } else { "1/2" }.to_string())
        })
        .chain(std::iter::once(("otherwise".to_string(), "1".to_string())))
        .collect();
    let pieces: Vec<String> = blocks
        .iter()
        .map(|(c, e)| format!(r#"{{"where": "{c}", "expr": "{e}"}}"#))
        .collect();
    let json = format!(
        r#"{{"p": 2, "a": [{{"where": "otherwise", "expr": "1"}}], "w": [{}]}}"#,
        pieces.join(",")
    );
    let op = WeightedShift::new(ExperimentConfig::from_json(&json).unwrap().shift).unwrap();
    assert_ne!(check_mixing(&op, &p).unwrap().status, Status::Holds);
}

#[test]
fn supercyclicity() {
    let p = params();
    assert_eq!(
        check_supercyclic(&preset("example_supercyclic_only"), &p)
            .unwrap()
            .status,
        Status::Holds
    );
    assert_eq!(
        check_supercyclic(&preset("zero_one_failure"), &p)
            .unwrap()
            .status,
        Status::Fails
    );
    // constant weights: the forward and backward products cancel exactly
    assert_eq!(
        check_supercyclic(&preset("classical_rolewicz"), &p)
            .unwrap()
            .status,
        Status::Fails
    );
}

#[test]
fn chaos() {
    let p = params();
    assert_eq!(
        check_chaotic(&preset("example_chaotic"), &p)
            .unwrap()
            .status,
        Status::Holds
    );
    assert_eq!(
        check_chaotic(&preset("zero_one_failure"), &p)
            .unwrap()
            .status,
        Status::Fails
    );
    // negative-side terms w_0⋯w_{-n+1} / a_{-n} = 2^n
    assert_eq!(
        check_chaotic(&preset("classical_rolewicz"), &p)
            .unwrap()
            .status,
        Status::Fails
    );
    let mut cfg = load_preset("example_chaotic").unwrap();
    cfg.shift.params.norm = bwshift::NormKind::C0;
    let c0 = WeightedShift::new(cfg.shift).unwrap();
    let v = check_chaotic(&c0, &p).unwrap();
    assert_eq!(v.status, Status::Inconclusive);
    assert!(v.reason.unwrap().contains("ScopeError"));
}

#[test]
fn generic_criteria() {
    let p = params();
    let g = check_generic_criteria(&preset("example_chaotic"), &p).unwrap();
    assert_eq!(g.hypercyclic.status, Status::Holds);
    let g = check_generic_criteria(&preset("zero_one_failure"), &p).unwrap();
    for v in [&g.hypercyclic, &g.mixing, &g.supercyclic, &g.chaotic] {
        assert_ne!(v.status, Status::Holds);
        assert!(v.sufficient_only);
    }
}

#[test]
fn dichotomy_preconditions() {
    let p = params();
    let v = check_dichotomy_preconditions(&preset("zero_one_failure"), &p).unwrap();
    assert_eq!(v.status, Status::Fails);
    let half = shift("1", None, "1/2", "");
    assert_eq!(
        check_dichotomy_preconditions(&half, &p).unwrap().status,
        Status::Holds
    );
    let report = analyze(&preset("example_chaotic"), &p).unwrap();
    assert_eq!(report.dichotomy_preconditions.evidence.len(), 3);
}

#[test]
fn contraction_orbits() {
    let op = shift("1", None, "1/2", "");
    let w = op.window();
    let e0 = BilateralVector::unit(w, 0, BasisTag::Schauder);
    let half = e0.scale(0.5);
    let run = simulate_orbit(&op, &e0, 20, std::slice::from_ref(&half), Schedule::All).unwrap();
    for r in &run.records {
        assert!(close(r.norm.to_real(), 2f64.powi(-r.step as i32), 1e-14));
    }
    assert!(!detect_limit_point(&run, &[half], 1e-3)[0].detected);

    let d = &check_divergent_subspace(&op, 0..=0, 16).unwrap()[0];
    assert!(d.ratios.iter().all(|r| close(*r, 0.5, 1e-14)));
    assert_eq!(d.status, Status::Fails);
}

#[test]
fn zero_one_orbit_at_two() {
    let cfg = load_preset("zero_one_failure").unwrap();
    let op = WeightedShift::new(cfg.shift.clone()).unwrap();
    let u = cfg
        .orbit
        .unwrap()
        .vector
        .unwrap()
        .to_vector(op.window())
        .unwrap();
    let img = apply(&op, 2, &u).unwrap();
    let d2: f64 = op
        .window()
        .indices()
        .map(|n| (img.value(n).to_real() - if n == 0 { 1.0 } else { 0.0 }).powi(2))
        .sum();
    // d^2 = sum_{j=2}^{5} 2^{2(2 - 2^j)}
    let want: f64 = (2..=5).map(|j| 2f64.powi(2 * (2 - (1 << j)))).sum();
    assert!((d2 - want).abs() < 1e-15, "{d2}");
}

#[test]
fn monomial_orbit_from_zero_decays() {
    // ‖B^n z^0‖ = |w_0 w_{-1}⋯w_{-n+1}| / |a_{-n}| = 2^{1-n(n-1)/2} · 2^{n+2} / n
    let op = preset("example_chaotic");
    let d = &check_divergent_subspace(&op, 0..=0, 12).unwrap()[0];
    for (i, norm) in d.norms.iter().enumerate() {
        let n = i as f64 + 1.0;
        let want = 2f64.powf(1.0 - n * (n - 1.0) / 2.0 + n + 2.0) / n;
        assert!(close(norm.to_real(), want, 1e-12), "n = {n}");
    }
    assert_eq!(d.status, Status::Fails);
}

use std::f64::consts::TAU;

use kcontour::classify::{classify, ChartKind, HeightField, SampleGrid, Verdict};
use kcontour::families::{HelicoidParams, PFamilyParams, XFamilyParams};
use kcontour::jet::Expr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
enum Expected {
    X { m: f64, c: f64 },
    P { k: f64, c: f64 },
    Helicoid { a: f64 },
}

fn matrix() -> Vec<(Expr, ChartKind, Expected)> {
    let mut out = Vec::new();
    for m in [-2.0, -1.0, -0.5, 0.5, 2.0, 3.0] {
        for c in [0.5, 1.0, 2.0] {
            let p = XFamilyParams::new(m, c).unwrap();
            out.push((p.height(), ChartKind::Polar, Expected::X { m, c }));
        }
    }
    for k in [-1.0, 1.0, 2.0] {
        for c in [0.5, 1.0] {
            let p = PFamilyParams::new(k, c).unwrap();
            out.push((p.height(), ChartKind::Cartesian, Expected::P { k, c }));
        }
    }
    for (a, profile) in [(1.0, Expr::constant(0.0)), (2.0, Expr::u().ln()), (0.5, Expr::u().powi(2))] {
        let h = HelicoidParams::new(a, profile).unwrap();
        out.push((h.height(), ChartKind::Polar, Expected::Helicoid { a }));
    }
    out
}

// tabulated fields need the finer grid so that finite-difference error sits
// well below the 1e-3 default tolerance
fn grid_n(chart: ChartKind, n: usize) -> SampleGrid {
    match chart {
        ChartKind::Polar => SampleGrid::new(n, n, (0.2, 2.0), (0.0, TAU)).unwrap(),
        ChartKind::Cartesian => SampleGrid::new(n, n, (-1.0, 1.0), (-1.0, 1.0)).unwrap(),
    }
}

fn fields(f: &Expr, chart: ChartKind) -> [HeightField; 2] {
    [HeightField::analytic(f.clone(), grid_n(chart, 64)), HeightField::sample(f, grid_n(chart, 128)).unwrap()]
}

fn grid(chart: ChartKind) -> SampleGrid {
    grid_n(chart, 128)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Largest relative parameter error, or `None` on the wrong verdict.
fn parameter_error(v: &Verdict, e: Expected) -> Option<f64> {
    match (v, e) {
        (Verdict::XFamily { m, c, .. }, Expected::X { m: m0, c: c0 }) => Some(rel(*m, m0).max(rel(*c, c0))),
        (Verdict::PFamily { k, c, .. }, Expected::P { k: k0, c: c0 }) => Some(rel(*k, k0).max(rel(*c, c0))),
        (Verdict::Helicoidal { a, .. }, Expected::Helicoid { a: a0 }) => Some(rel(*a, a0)),
        _ => None,
    }
}

#[test]
fn noiseless_round_trip_on_jets_and_tables() {
    for (f, chart, expected) in matrix() {
        for field in fields(&f, chart) {
            let rep = classify(&field, chart, field.default_tol()).unwrap();
            let err = parameter_error(&rep.verdict, expected)
                .unwrap_or_else(|| panic!("{expected:?} tabulated={} -> {rep:#?}", field.is_tabulated()));
            assert!(err <= 1e-5, "{expected:?}: parameter error {err}");
            assert!(rep.residuals.reconstruction.unwrap() <= 1e-8, "{expected:?}: {rep:?}");
        }
    }
}

#[test]
fn helicoid_profiles_are_recovered() {
    let f = Expr::v() * 2.0 + Expr::u().ln();
    let rep = classify(&HeightField::sample(&f, grid(ChartKind::Polar)).unwrap(), ChartKind::Polar, 1e-3).unwrap();
    let Verdict::Helicoidal { profile, .. } = rep.verdict else { panic!("{rep:?}") };
    for (r, a) in profile {
        assert!((a - r.ln()).abs() < 1e-6);
    }
}

#[test]
fn small_noise_barely_moves_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (f, chart, expected) in matrix() {
        let g = grid(chart);
        let clean = HeightField::sample(&f, g).unwrap();
        let values = clean.values().unwrap();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let scale = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64).sqrt();
        let noisy: Vec<f64> = values.iter().map(|v| v + 1e-6 * scale * rng.gen_range(-1.0..1.0)).collect();
        let field = HeightField::tabulated(g, noisy).unwrap();
        let rep = classify(&field, chart, 1e-3).unwrap();
        let err = parameter_error(&rep.verdict, expected).unwrap_or_else(|| panic!("{expected:?} -> {rep:#?}"));
        assert!(err <= 1e-4, "{expected:?}: {err}");
    }
}

#[test]
fn verdicts_are_stable_under_tolerance_changes() {
    for (f, chart, _) in matrix() {
        for field in fields(&f, chart) {
            let tol = field.default_tol();
            let names: Vec<&str> = [tol / 2.0, tol, 2.0 * tol]
                .iter()
                .map(|t| classify(&field, chart, *t).unwrap().verdict.name())
                .collect();
            assert!(names.iter().all(|n| *n == names[0]), "{names:?}");
        }
    }
}

#[test]
fn counterexamples_stay_unclassified_on_tables() {
    let polar = Expr::u().powi(2) * (Expr::v() * 2.0).cos() + Expr::u().powi(3) * (Expr::v() * 3.0).cos();
    let field = HeightField::sample(&polar, grid(ChartKind::Polar)).unwrap();
    assert_eq!(classify(&field, ChartKind::Polar, 1e-3).unwrap().verdict, Verdict::Unclassified);
    let cart = (Expr::u() * 2.0).exp() * (Expr::v() * 2.0).cos() + Expr::u().exp() * Expr::v().cos();
    let field = HeightField::sample(&cart, grid(ChartKind::Cartesian)).unwrap();
    assert_eq!(classify(&field, ChartKind::Cartesian, 1e-3).unwrap().verdict, Verdict::Unclassified);
}

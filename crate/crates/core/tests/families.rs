//! Randomised checks of the family closed forms and their symmetries.

use std::f64::consts::TAU;

use kcontour::families::{
    helicoid_patch, p_family_k, p_family_normal, p_family_patch, x_family_k, x_family_normal, x_family_patch,
    HelicoidParams, PFamilyParams, XFamilyParams,
};
use kcontour::jet::Expr;
use kcontour::symmetry::rotate_about_axis;
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![-3.0..-0.1f64, 0.1..0.9f64, 1.1..3.5f64]
}

fn coefficient() -> impl Strategy<Value = f64> {
    prop_oneof![-2.0..-0.2f64, 0.2..2.0f64]
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

proptest! {
    #[test]
    fn x_family_pipeline_matches_closed_form(m in exponent(), c in coefficient(), r in 0.2..2.0f64, t in 0.0..TAU) {
        let q = XFamilyParams::new(m, c).unwrap();
        let s = x_family_patch(&q).unwrap();
        let ff = s.fundamental_forms((r, t)).unwrap();
        prop_assert!(close(ff.k, x_family_k(&q, r).unwrap()));
        prop_assert!((ff.normal - x_family_normal(&q, r, t).unwrap()).amax() <= 1e-12);
        prop_assert!((ff.normal.norm() - 1.0).abs() <= 1e-14);
        prop_assert!(ff.normal.z > 0.0);
    }

    #[test]
    fn x_family_normal_rotates_by_one_minus_m(m in exponent(), c in coefficient(), r in 0.2..2.0f64, t in 0.0..3.0f64, s in -1.0..1.0f64) {
        let q = XFamilyParams::new(m, c).unwrap();
        let n0 = x_family_normal(&q, r, t).unwrap();
        let n1 = x_family_normal(&q, r, t + s).unwrap();
        prop_assert!((n1 - rotate_about_axis(&n0, (1.0 - m) * s)).amax() <= 1e-12);
    }

    #[test]
    fn p_family_pipeline_matches_closed_form(k in coefficient(), c in coefficient(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let q = PFamilyParams::new(k, c).unwrap();
        let ff = p_family_patch(&q).unwrap().fundamental_forms((x, y)).unwrap();
        prop_assert!(close(ff.k, p_family_k(&q, x)));
        prop_assert!((ff.normal - p_family_normal(&q, x, y)).amax() <= 1e-12);
    }

    #[test]
    fn p_family_normal_rotates_by_minus_k(k in coefficient(), c in coefficient(), x in -1.0..1.0f64, y in -1.0..1.0f64, s in -1.0..1.0f64) {
        let q = PFamilyParams::new(k, c).unwrap();
        let n0 = p_family_normal(&q, x, y);
        let n1 = p_family_normal(&q, x, y + s);
        prop_assert!((n1 - rotate_about_axis(&n0, -k * s)).amax() <= 1e-12);
    }

    #[test]
    fn helicoid_curvature_ignores_theta(a in -3.0..3.0f64, b in -1.0..1.0f64, r in 0.2..2.0f64, t in 0.0..TAU, s in -2.0..2.0f64) {
        let h = HelicoidParams::new(a, b * Expr::u().powi(2) + Expr::u().ln()).unwrap();
        let p = helicoid_patch(&h).unwrap();
        let k0 = p.gaussian_curvature((r, t)).unwrap();
        let k1 = p.gaussian_curvature((r, (t + s).rem_euclid(TAU))).unwrap();
        prop_assert!(close(k1, k0));
    }
}

//! Forward-mode jets against the central-difference oracle on the family fields.

use std::f64::consts::TAU;

use kcontour::families::{HelicoidParams, PFamilyParams, XFamilyParams};
use kcontour::jet::{eval_jet2, finite_difference_jet2, Expr, Jet2, DEFAULT_FD_STEP};
use proptest::prelude::*;

/// Name, height function, u span, v span.
type Field = (String, Expr, (f64, f64), (f64, f64));

fn family_fields() -> Vec<Field> {
    let mut out = Vec::new();
    for m in [-2.0, -1.0, -0.5, 0.5, 2.0, 3.0] {
        for c in [0.5, 1.0, 2.0] {
            out.push((format!("x({m},{c})"), XFamilyParams::new(m, c).unwrap().height(), (0.2, 2.0), (0.0, TAU)));
        }
    }
    for k in [-1.0, 1.0, 2.0] {
        for c in [0.5, 1.0] {
            out.push((format!("p({k},{c})"), PFamilyParams::new(k, c).unwrap().height(), (-1.0, 1.0), (-1.0, 1.0)));
        }
    }
    for (a, prof) in [(1.0, Expr::constant(0.0)), (2.0, Expr::u().ln()), (0.5, Expr::u().powi(2))] {
        out.push((format!("helicoid a={a}"), HelicoidParams::new(a, prof).unwrap().height(), (0.2, 2.0), (0.0, TAU)));
    }
    out
}

fn gap(a: &Jet2, b: &Jet2) -> f64 {
    a.as_array().iter().zip(b.as_array()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn scale(j: &Jet2) -> f64 {
    j.as_array().iter().map(|x| x.abs()).fold(1.0, f64::max)
}

// Large jets near r = 0.2 for negative m make an absolute bound meaningless
// (F_rr of x(-2,2) is 7500 there), so the gap is measured against the jet's
// own magnitude.
#[test]
fn default_step_gap_is_small_on_every_test_grid() {
    for (name, f, us, vs) in family_fields() {
        let mut worst: f64 = 0.0;
        for i in 0..32 {
            for j in 0..32 {
                let p = (us.0 + (us.1 - us.0) * i as f64 / 31.0, vs.0 + (vs.1 - vs.0) * j as f64 / 31.0);
                let exact = eval_jet2(&f, p).unwrap();
                let fd = finite_difference_jet2(&f, p, DEFAULT_FD_STEP, None).unwrap();
                worst = worst.max(gap(&exact, &fd) / scale(&exact));
            }
        }
        assert!(worst <= 1e-5, "{name}: scaled gap {worst:e}");
    }
}

#[test]
fn gap_shrinks_like_h_squared() {
    let f = XFamilyParams::new(3.0, 1.0).unwrap().height();
    let p = (1.3, 0.4);
    let exact = eval_jet2(&f, p).unwrap();
    let g1 = gap(&exact, &finite_difference_jet2(&f, p, 1e-2, None).unwrap());
    let g2 = gap(&exact, &finite_difference_jet2(&f, p, 5e-3, None).unwrap());
    let ratio = g1 / g2;
    assert!((3.5..4.5).contains(&ratio), "{g1:e} / {g2:e}");
}

proptest! {
    #[test]
    fn random_points_agree(m in 0.5..3.5f64, c in 0.3..2.0f64, r in 0.3..2.0f64, t in 0.0..TAU) {
        let f = XFamilyParams::new(m, c).unwrap().height();
        let exact = eval_jet2(&f, (r, t)).unwrap();
        let fd = finite_difference_jet2(&f, (r, t), DEFAULT_FD_STEP, None).unwrap();
        prop_assert!(gap(&exact, &fd) <= 1e-5 * scale(&exact));
    }
}

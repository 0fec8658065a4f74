//! Contour accuracy as the grid is refined.

use kcontour::contour::{extract_contours, project_contours, sample_k_grid, ReferencePlane};
use kcontour::families::{x_family_patch, XFamilyParams};
use kcontour::fitgeom::fit_circle;

/// Radius error of the `K = −0.16` ring of `x_{2,1}`, which is the unit circle.
fn ring_error(nu: usize) -> f64 {
    let s = x_family_patch(&XFamilyParams::new(2.0, 1.0).unwrap()).unwrap();
    let g = sample_k_grid(&s, nu, 64).unwrap();
    let cs = project_contours(&s, &extract_contours(&g, &[-0.16]), ReferencePlane::Xy).unwrap();
    assert_eq!(cs.chain_count(), 1, "nu = {nu}");
    let (_, chain) = cs.chains().next().unwrap();
    assert!(chain.closed);
    let fit = fit_circle(&chain.projected).unwrap();
    assert!(fit.center[0].hypot(fit.center[1]) < 1e-12);
    (fit.radius - 1.0).abs()
}

#[test]
fn ring_radius_converges_quadratically() {
    // r = 1 sits 0.44 of a cell past a node on each of these grids, so the
    // interpolation error is comparable across levels of refinement
    let errs: Vec<f64> = [20, 38, 74, 146].into_iter().map(ring_error).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..5.0).contains(&ratio), "{errs:?}");
    }
    assert!(errs[3] < 1e-3, "{errs:?}");
}

use super::{Expr, Jet2, JetError, Rect};

/// Second-order central-difference estimate of every entry of a [`Jet2`].
///
/// Truncation error is `O(h²)`; roundoff grows like `ε/h²` for the second
/// partials. Uses only point values of `f`, so it is independent of the jet
/// arithmetic and serves as its oracle. When `domain` is given the whole
/// stencil must lie inside it.
pub fn finite_difference_jet2(
    f: &Expr,
    p: (f64, f64),
    h: f64,
    domain: Option<&Rect>,
) -> Result<Jet2, JetError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(JetError::InvalidStep(h));
    }
    if let Some(d) = domain {
        let inside = d.contains((p.0 - h, p.1 - h)) && d.contains((p.0 + h, p.1 + h));
        if !inside {
            return Err(JetError::StencilOutsideDomain { u: p.0, v: p.1, h });
        }
    }
    let (u, v) = p;
    let at = |du: f64, dv: f64| f.eval((u + du * h, v + dv * h));

    let f00 = at(0.0, 0.0)?;
    let fp0 = at(1.0, 0.0)?;
    let fm0 = at(-1.0, 0.0)?;
    let f0p = at(0.0, 1.0)?;
    let f0m = at(0.0, -1.0)?;
    let fpp = at(1.0, 1.0)?;
    let fpm = at(1.0, -1.0)?;
    let fmp = at(-1.0, 1.0)?;
    let fmm = at(-1.0, -1.0)?;

    let h2 = h * h;
    Ok(Jet2 {
        value: f00,
        d_u: (fp0 - fm0) / (2.0 * h),
        d_v: (f0p - f0m) / (2.0 * h),
        d_uu: (fp0 - 2.0 * f00 + fm0) / h2,
        d_uv: (fpp - fpm - fmp + fmm) / (4.0 * h2),
        d_vv: (f0p - 2.0 * f00 + f0m) / h2,
    })
}

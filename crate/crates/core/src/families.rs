//! Concrete surfaces with closed-form curvature: the polar family
//! `F = c r^m cos mθ`, the exponential family `F = c e^{kx} cos ky`,
//! helicoidal graphs `F = aθ + A(r)` and the plane.
//!
//! The closed forms here never touch the jet pipeline and act as oracles
//! for [`crate::surface`].

use std::f64::consts::TAU;

use nalgebra::Vector3;
use thiserror::Error;

use crate::jet::{Expr, Rect};
use crate::surface::{SurfaceError, SurfacePatch};

/// Default radial interval for polar charts; stays clear of the puncture at
/// the origin and of large-r conditioning loss.
pub const DEFAULT_R_SPAN: (f64, f64) = (0.2, 2.0);
pub const DEFAULT_THETA_SPAN: (f64, f64) = (0.0, TAU);
pub const DEFAULT_XY_SPAN: (f64, f64) = (-1.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("invalid family parameters: {0}")]
    InvalidParams(String),
    #[error("closed form undefined at r = {0}")]
    BadRadius(f64),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

fn check_span(name: &str, span: (f64, f64)) -> Result<(), FamilyError> {
    if span.0.is_finite() && span.1.is_finite() && span.0 < span.1 {
        Ok(())
    } else {
        Err(FamilyError::InvalidParams(format!("{name} span {span:?} is empty or non-finite")))
    }
}

/// Parameters of `F(r, θ) = c r^m cos mθ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XFamilyParams {
    m: f64,
    c: f64,
    pub r_span: (f64, f64),
    pub theta_span: (f64, f64),
}

impl XFamilyParams {
    /// Rejects `m ∈ {0, 1}` and `c = 0`, where the graph is a plane.
    pub fn new(m: f64, c: f64) -> Result<Self, FamilyError> {
        if !(m.is_finite() && c.is_finite()) {
            return Err(FamilyError::InvalidParams(format!("m = {m}, c = {c} must be finite")));
        }
        if m == 0.0 || m == 1.0 {
            return Err(FamilyError::InvalidParams(format!("m = {m} gives a plane")));
        }
        if c == 0.0 {
            return Err(FamilyError::InvalidParams("c = 0 gives a plane".into()));
        }
        Ok(Self { m, c, r_span: DEFAULT_R_SPAN, theta_span: DEFAULT_THETA_SPAN })
    }

    pub fn with_spans(mut self, r_span: (f64, f64), theta_span: (f64, f64)) -> Result<Self, FamilyError> {
        check_span("r", r_span)?;
        check_span("theta", theta_span)?;
        if r_span.0 <= 0.0 {
            return Err(FamilyError::InvalidParams(format!("r span {r_span:?} must exclude the origin")));
        }
        self.r_span = r_span;
        self.theta_span = theta_span;
        Ok(self)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn height(&self) -> Expr {
        self.c * Expr::u().powf(self.m) * (self.m * Expr::v()).cos()
    }

    fn a2(&self, r: f64) -> f64 {
        // c² m² r^{2m−2}
        (self.c * self.m).powi(2) * r.powf(2.0 * self.m - 2.0)
    }
}

pub fn x_family_patch(params: &XFamilyParams) -> Result<SurfacePatch, FamilyError> {
    let d = Rect::new(params.r_span.0, params.r_span.1, params.theta_span.0, params.theta_span.1);
    let full_turn = (params.theta_span.1 - params.theta_span.0 - TAU).abs() < 1e-12;
    let periodic = full_turn && params.m.fract() == 0.0;
    Ok(SurfacePatch::polar(params.height(), d)?.with_periodic_v(periodic))
}

/// `K(r) = −c²m²(m−1)² r^{2m−4} / (1 + c²m² r^{2m−2})²`.
pub fn x_family_k(params: &XFamilyParams, r: f64) -> Result<f64, FamilyError> {
    let m = params.m;
    if r < 0.0 || !r.is_finite() || (r == 0.0 && 2.0 * m - 4.0 < 0.0) {
        return Err(FamilyError::BadRadius(r));
    }
    let num = (params.c * m * (m - 1.0)).powi(2) * r.powf(2.0 * m - 4.0);
    Ok(-num / (1.0 + params.a2(r)).powi(2))
}

/// `H(r, θ) = −c³m³(m−1) r^{3m−4} cos mθ / (2 (1 + c²m² r^{2m−2})^{3/2})`.
pub fn x_family_h(params: &XFamilyParams, r: f64, theta: f64) -> Result<f64, FamilyError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(FamilyError::BadRadius(r));
    }
    let (m, c) = (params.m, params.c);
    let num = c.powi(3) * m.powi(3) * (m - 1.0) * r.powf(3.0 * m - 4.0) * (m * theta).cos();
    Ok(-num / (2.0 * (1.0 + params.a2(r)).powf(1.5)))
}

/// `n = (−cm r^m cos (m−1)θ, cm r^m sin (m−1)θ, r) / (r √(1 + c²m² r^{2m−2}))`.
pub fn x_family_normal(params: &XFamilyParams, r: f64, theta: f64) -> Result<Vector3<f64>, FamilyError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(FamilyError::BadRadius(r));
    }
    let (m, c) = (params.m, params.c);
    let w = c * m * r.powf(m);
    let (s, co) = ((m - 1.0) * theta).sin_cos();
    Ok(Vector3::new(-w * co, w * s, r) / (r * (1.0 + params.a2(r)).sqrt()))
}

/// Parameters of `F(x, y) = c e^{kx} cos ky`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PFamilyParams {
    k: f64,
    c: f64,
    pub x_span: (f64, f64),
    pub y_span: (f64, f64),
}

impl PFamilyParams {
    pub fn new(k: f64, c: f64) -> Result<Self, FamilyError> {
        if !(k.is_finite() && c.is_finite()) || k == 0.0 || c == 0.0 {
            return Err(FamilyError::InvalidParams(format!("k = {k}, c = {c} must be finite and non-zero")));
        }
        Ok(Self { k, c, x_span: DEFAULT_XY_SPAN, y_span: DEFAULT_XY_SPAN })
    }

    pub fn with_spans(mut self, x_span: (f64, f64), y_span: (f64, f64)) -> Result<Self, FamilyError> {
        check_span("x", x_span)?;
        check_span("y", y_span)?;
        self.x_span = x_span;
        self.y_span = y_span;
        Ok(self)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn height(&self) -> Expr {
        self.c * (self.k * Expr::u()).exp() * (self.k * Expr::v()).cos()
    }

    fn b2(&self, x: f64) -> f64 {
        // c² k² e^{2kx}
        (self.c * self.k).powi(2) * (2.0 * self.k * x).exp()
    }
}

pub fn p_family_patch(params: &PFamilyParams) -> Result<SurfacePatch, FamilyError> {
    let d = Rect::new(params.x_span.0, params.x_span.1, params.y_span.0, params.y_span.1);
    Ok(SurfacePatch::cartesian(params.height(), d)?)
}

/// `K(x) = −c²k⁴ e^{2kx} / (1 + c²k² e^{2kx})²`.
pub fn p_family_k(params: &PFamilyParams, x: f64) -> f64 {
    let b2 = params.b2(x);
    -b2 * params.k * params.k / (1.0 + b2).powi(2)
}

/// `H(x, y) = −c³k⁴ e^{3kx} cos ky / (2 (1 + c²k² e^{2kx})^{3/2})`.
pub fn p_family_h(params: &PFamilyParams, x: f64, y: f64) -> f64 {
    let (k, c) = (params.k, params.c);
    let num = c.powi(3) * k.powi(4) * (3.0 * k * x).exp() * (k * y).cos();
    -num / (2.0 * (1.0 + params.b2(x)).powf(1.5))
}

/// `n = (−ck e^{kx} cos ky, ck e^{kx} sin ky, 1) / √(1 + c²k² e^{2kx})`.
pub fn p_family_normal(params: &PFamilyParams, x: f64, y: f64) -> Vector3<f64> {
    let w = params.c * params.k * (params.k * x).exp();
    let (s, co) = (params.k * y).sin_cos();
    Vector3::new(-w * co, w * s, 1.0) / (1.0 + params.b2(x)).sqrt()
}

/// Helicoidal graph `F(r, θ) = aθ + A(r)`. The profile is an expression in
/// the first coordinate only.
#[derive(Debug, Clone)]
pub struct HelicoidParams {
    pub a: f64,
    pub profile: Expr,
    pub r_span: (f64, f64),
    pub theta_span: (f64, f64),
}

impl HelicoidParams {
    pub fn new(a: f64, profile: Expr) -> Result<Self, FamilyError> {
        if !a.is_finite() {
            return Err(FamilyError::InvalidParams(format!("a = {a} must be finite")));
        }
        Ok(Self { a, profile, r_span: DEFAULT_R_SPAN, theta_span: DEFAULT_THETA_SPAN })
    }

    /// The right helicoid `F = aθ`.
    pub fn right(a: f64) -> Result<Self, FamilyError> {
        Self::new(a, Expr::constant(0.0))
    }

    pub fn with_spans(mut self, r_span: (f64, f64), theta_span: (f64, f64)) -> Result<Self, FamilyError> {
        check_span("r", r_span)?;
        check_span("theta", theta_span)?;
        if r_span.0 <= 0.0 {
            return Err(FamilyError::InvalidParams(format!("r span {r_span:?} must exclude the origin")));
        }
        self.r_span = r_span;
        self.theta_span = theta_span;
        Ok(self)
    }

    pub fn height(&self) -> Expr {
        self.a * Expr::v() + self.profile.clone()
    }
}

pub fn helicoid_patch(params: &HelicoidParams) -> Result<SurfacePatch, FamilyError> {
    let d = Rect::new(params.r_span.0, params.r_span.1, params.theta_span.0, params.theta_span.1);
    let full_turn = (params.theta_span.1 - params.theta_span.0 - TAU).abs() < 1e-12;
    let patch = SurfacePatch::polar(params.height(), d)?.with_periodic_v(full_turn);
    // the profile must be smooth on the declared interval
    let probe = [params.r_span.0, 0.5 * (params.r_span.0 + params.r_span.1), params.r_span.1];
    for r in probe {
        params.profile.eval_jet2((r, 0.0)).map_err(SurfaceError::from)?;
    }
    Ok(patch)
}

/// Which chart a plane is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneChart {
    Polar,
    Cartesian,
}

/// The degenerate member `F ≡ 0`.
pub fn plane_patch(chart: PlaneChart, domain: Rect) -> Result<SurfacePatch, FamilyError> {
    let zero = Expr::constant(0.0);
    Ok(match chart {
        PlaneChart::Polar => {
            let full_turn = (domain.v_span() - TAU).abs() < 1e-12;
            SurfacePatch::polar(zero, domain)?.with_periodic_v(full_turn)
        }
        PlaneChart::Cartesian => SurfacePatch::cartesian(zero, domain)?,
    })
}

/// `(K, H, n)` at one point.
pub type ClosedForm = (f64, f64, Vector3<f64>);

/// A named surface with the closed forms that go with it.
#[derive(Debug, Clone)]
pub enum Family {
    X(XFamilyParams),
    P(PFamilyParams),
    Helicoid(HelicoidParams),
    Plane { chart: PlaneChart, domain: Rect },
}

impl Family {
    pub fn patch(&self) -> Result<SurfacePatch, FamilyError> {
        match self {
            Family::X(p) => x_family_patch(p),
            Family::P(p) => p_family_patch(p),
            Family::Helicoid(p) => helicoid_patch(p),
            Family::Plane { chart, domain } => plane_patch(*chart, *domain),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::X(_) => "x",
            Family::P(_) => "p",
            Family::Helicoid(_) => "helicoid",
            Family::Plane { .. } => "plane",
        }
    }

    /// Closed-form `(K, H, n)` at a chart point, when one is known.
    pub fn closed_form(&self, p: (f64, f64)) -> Option<Result<ClosedForm, FamilyError>> {
        match self {
            Family::X(x) => Some((|| {
                Ok((x_family_k(x, p.0)?, x_family_h(x, p.0, p.1)?, x_family_normal(x, p.0, p.1)?))
            })()),
            Family::P(q) => Some(Ok((
                p_family_k(q, p.0),
                p_family_h(q, p.0, p.1),
                p_family_normal(q, p.0, p.1),
            ))),
            Family::Plane { .. } => Some(Ok((0.0, 0.0, Vector3::z()))),
            Family::Helicoid(h) => {
                // only the right helicoid has a profile-free closed form here
                let a = h.a;
                h.profile.as_constant().map(|_| {
                    let (r, t) = p;
                    let d = (r * r + a * a).sqrt();
                    Ok((-a * a / (d * d * d * d), 0.0, Vector3::new(a * t.sin(), -a * t.cos(), r) / d))
                })
            }
        }
    }
}

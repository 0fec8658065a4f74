//! Surface charts and the classical apparatus on them: fundamental forms,
//! unit normal, area element, Gaussian and mean curvature.
//!
//! Normals of graph charts are oriented with positive third component;
//! generic immersions use `∂_u × ∂_v`. Flipping the normal flips the sign of
//! `H` and of the second form but leaves `K` unchanged.

use nalgebra::Vector3;
use thiserror::Error;

use crate::jet::{Expr, Jet2, JetError, Rect};

/// Relative threshold on `EG − F²` against `E·G` below which the metric is
/// treated as degenerate.
pub const DEGENERATE_METRIC_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("point ({u}, {v}) lies outside the chart domain")]
    OutOfDomain { u: f64, v: f64 },
    #[error("degenerate metric at ({u}, {v}): EG - F^2 = {det:e}")]
    DegenerateMetric { u: f64, v: f64, det: f64 },
    #[error("invalid chart domain: {0}")]
    InvalidDomain(String),
    #[error("polar formulas need r > 0, got r = {0}")]
    NonPositiveRadius(f64),
}

/// How the chart parameters map into ℝ³.
#[derive(Debug, Clone)]
pub enum Chart {
    /// `(r, θ) ↦ (r cos θ, r sin θ, F(r, θ))`, with `u = r`, `v = θ`.
    PolarGraph(Expr),
    /// `(x, y) ↦ (x, y, F(x, y))`.
    CartesianGraph(Expr),
    /// `(u, v) ↦ (X, Y, Z)`.
    Immersion([Expr; 3]),
}

impl Chart {
    pub fn is_graph(&self) -> bool {
        !matches!(self, Chart::Immersion(_))
    }

    /// The height function of a graph chart.
    pub fn height(&self) -> Option<&Expr> {
        match self {
            Chart::PolarGraph(f) | Chart::CartesianGraph(f) => Some(f),
            Chart::Immersion(_) => None,
        }
    }
}

/// A chart together with its parameter rectangle.
#[derive(Debug, Clone)]
pub struct SurfacePatch {
    chart: Chart,
    domain: Rect,
    components: [Expr; 3],
    periodic_v: bool,
}

impl SurfacePatch {
    pub fn new(chart: Chart, domain: Rect) -> Result<Self, SurfaceError> {
        if !domain.is_valid() {
            return Err(SurfaceError::InvalidDomain(format!("{domain:?} is empty or non-finite")));
        }
        if matches!(chart, Chart::PolarGraph(_)) && domain.u_min <= 0.0 {
            return Err(SurfaceError::InvalidDomain(format!(
                "polar graph needs r > 0 on the domain, got r_min = {}",
                domain.u_min
            )));
        }
        let components = match &chart {
            Chart::PolarGraph(f) => {
                let (r, t) = (Expr::u(), Expr::v());
                [&r * &t.cos(), &r * &t.sin(), f.clone()]
            }
            Chart::CartesianGraph(f) => [Expr::u(), Expr::v(), f.clone()],
            Chart::Immersion(c) => c.clone(),
        };
        Ok(Self { chart, domain, components, periodic_v: false })
    }

    pub fn polar(f: Expr, domain: Rect) -> Result<Self, SurfaceError> {
        Self::new(Chart::PolarGraph(f), domain)
    }

    pub fn cartesian(f: Expr, domain: Rect) -> Result<Self, SurfaceError> {
        Self::new(Chart::CartesianGraph(f), domain)
    }

    /// Marks the second parameter as periodic with period equal to the domain
    /// span. Grid sampling then wraps the last column onto the first.
    pub fn with_periodic_v(mut self, periodic: bool) -> Self {
        self.periodic_v = periodic;
        self
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn domain(&self) -> &Rect {
        &self.domain
    }

    pub fn periodic_v(&self) -> bool {
        self.periodic_v
    }

    fn check(&self, p: (f64, f64)) -> Result<(), SurfaceError> {
        if self.domain.contains(p) {
            Ok(())
        } else {
            Err(SurfaceError::OutOfDomain { u: p.0, v: p.1 })
        }
    }

    pub fn position(&self, p: (f64, f64)) -> Result<Vector3<f64>, SurfaceError> {
        self.check(p)?;
        let mut out = Vector3::zeros();
        for (o, c) in out.iter_mut().zip(self.components.iter()) {
            *o = c.eval(p)?;
        }
        Ok(out)
    }

    /// Jets of the three coordinate functions at `p`.
    pub fn component_jets(&self, p: (f64, f64)) -> Result<[Jet2; 3], SurfaceError> {
        self.check(p)?;
        Ok([
            self.components[0].eval_jet2(p)?,
            self.components[1].eval_jet2(p)?,
            self.components[2].eval_jet2(p)?,
        ])
    }

    pub fn fundamental_forms(&self, p: (f64, f64)) -> Result<FundForms, SurfaceError> {
        let j = self.component_jets(p)?;
        let pick = |f: fn(&Jet2) -> f64| Vector3::new(f(&j[0]), f(&j[1]), f(&j[2]));
        let xu = pick(|j| j.d_u);
        let xv = pick(|j| j.d_v);
        let xuu = pick(|j| j.d_uu);
        let xuv = pick(|j| j.d_uv);
        let xvv = pick(|j| j.d_vv);

        let e = xu.dot(&xu);
        let f = xu.dot(&xv);
        let g = xv.dot(&xv);
        let mut cross = xu.cross(&xv);
        // |X_u × X_v|² avoids the cancellation in EG − F² on steep charts
        let det = cross.norm_squared();
        if !(det.is_finite() && det > DEGENERATE_METRIC_TOL * e * g) || det == 0.0 {
            return Err(SurfaceError::DegenerateMetric { u: p.0, v: p.1, det });
        }
        if self.chart.is_graph() && cross.z < 0.0 {
            cross = -cross;
        }
        let delta = det.sqrt();
        let normal = cross / delta;
        let l = xuu.dot(&normal);
        let m = xuv.dot(&normal);
        let n = xvv.dot(&normal);
        Ok(FundForms {
            e,
            f,
            g,
            l,
            m,
            n,
            normal,
            delta,
            k: (l * n - m * m) / det,
            h: (e * n - 2.0 * f * m + g * l) / (2.0 * det),
        })
    }

    pub fn gaussian_curvature(&self, p: (f64, f64)) -> Result<f64, SurfaceError> {
        Ok(self.fundamental_forms(p)?.k)
    }

    pub fn mean_curvature(&self, p: (f64, f64)) -> Result<f64, SurfaceError> {
        Ok(self.fundamental_forms(p)?.h)
    }

    /// Area-element density `Δ = √(EG − F²)`.
    pub fn area_element(&self, p: (f64, f64)) -> Result<f64, SurfaceError> {
        Ok(self.fundamental_forms(p)?.delta)
    }

    pub fn normal(&self, p: (f64, f64)) -> Result<Vector3<f64>, SurfaceError> {
        Ok(self.fundamental_forms(p)?.normal)
    }
}

/// First and second fundamental form coefficients and derived quantities at
/// one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub normal: Vector3<f64>,
    pub delta: f64,
    pub k: f64,
    pub h: f64,
}

/// Gaussian curvature of the polar graph `(r cos θ, r sin θ, F)` straight
/// from the jet of `F`:
///
/// `K = {r² F_rr (r F_r + F_θθ) − (F_θ − r F_rθ)²} / Δ⁴`,
/// `Δ² = r² + r² F_r² + F_θ²`.
pub fn polar_graph_k_from_jet(r: f64, f: &Jet2) -> Result<f64, SurfaceError> {
    if !(r > 0.0) {
        return Err(SurfaceError::NonPositiveRadius(r));
    }
    let delta2 = polar_graph_delta_from_jet(r, f)?.powi(2);
    let num = r * r * f.d_uu * (r * f.d_u + f.d_vv) - (f.d_v - r * f.d_uv).powi(2);
    Ok(num / (delta2 * delta2))
}

/// `Δ = √(r² + r² F_r² + F_θ²)` for a polar graph.
pub fn polar_graph_delta_from_jet(r: f64, f: &Jet2) -> Result<f64, SurfaceError> {
    if !(r > 0.0) {
        return Err(SurfaceError::NonPositiveRadius(r));
    }
    Ok((r * r + (r * f.d_u).powi(2) + f.d_v * f.d_v).sqrt())
}

/// Polar-graph normal `(F_θ sin θ − r F_r cos θ, −r F_r sin θ − F_θ cos θ, r) / Δ`.
pub fn polar_graph_normal_from_jet(r: f64, theta: f64, f: &Jet2) -> Result<Vector3<f64>, SurfaceError> {
    let delta = polar_graph_delta_from_jet(r, f)?;
    let (s, c) = theta.sin_cos();
    Ok(Vector3::new(
        f.d_v * s - r * f.d_u * c,
        -r * f.d_u * s - f.d_v * c,
        r,
    ) / delta)
}

/// [`polar_graph_k_from_jet`] applied to an expression for `F(r, θ)`.
pub fn polar_graph_k(f: &Expr, p: (f64, f64)) -> Result<f64, SurfaceError> {
    if !(p.0 > 0.0) {
        return Err(SurfaceError::NonPositiveRadius(p.0));
    }
    polar_graph_k_from_jet(p.0, &f.eval_jet2(p)?)
}

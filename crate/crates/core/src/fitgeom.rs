//! Least-squares circle and line fits, and the concentricity / parallelism
//! verdicts built on them.

use nalgebra::{DMatrix, DVector, Vector2};
use thiserror::Error;

use crate::contour::ContourSet;

/// Default relative tolerance of the symmetry verdicts.
pub const DEFAULT_VERDICT_TOL: f64 = 1e-2;
/// Chains with fewer vertices are skipped by the verdicts.
pub const MIN_CHAIN_VERTICES: usize = 8;

// relative singular-value floor below which a point set counts as collinear
const COLLINEAR_RCOND: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("points are collinear; no finite circle fits them")]
    Collinear,
    #[error("points coincide; no line direction is defined")]
    Coincident,
    #[error("non-finite input point")]
    NonFinite,
    #[error("only {fitted} chains could be fitted, need at least 2")]
    TooFewChains { fitted: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit {
    pub center: [f64; 2],
    pub radius: f64,
    /// RMS of point-to-circle geometric distances.
    pub rms_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    /// Unit direction; first non-zero component positive.
    pub direction: [f64; 2],
    /// Signed distance of the line from the origin along the normal
    /// `(d_y, −d_x)`.
    pub offset: f64,
    /// RMS of perpendicular distances.
    pub rms_residual: f64,
    /// Length of the point set's projection onto the direction.
    pub extent: f64,
}

fn check_points(points: &[[f64; 2]], needed: usize) -> Result<(), FitError> {
    if points.len() < needed {
        return Err(FitError::TooFewPoints { needed, got: points.len() });
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(FitError::NonFinite);
    }
    Ok(())
}

fn centroid(points: &[[f64; 2]]) -> Vector2<f64> {
    let n = points.len() as f64;
    points.iter().fold(Vector2::zeros(), |acc, p| acc + Vector2::new(p[0], p[1])) / n
}

/// Kåsa algebraic circle fit: linear least squares on
/// `x² + y² + D x + E y + F = 0`, solved on centred and scaled coordinates.
pub fn fit_circle(points: &[[f64; 2]]) -> Result<CircleFit, FitError> {
    check_points(points, 3)?;
    let c0 = centroid(points);
    let scale = (points
        .iter()
        .map(|p| (Vector2::new(p[0], p[1]) - c0).norm_squared())
        .sum::<f64>()
        / points.len() as f64)
        .sqrt();
    if scale == 0.0 {
        return Err(FitError::Collinear);
    }
    let n = points.len();
    let mut a = DMatrix::zeros(n, 3);
    let mut b = DVector::zeros(n);
    for (k, p) in points.iter().enumerate() {
        let x = (p[0] - c0.x) / scale;
        let y = (p[1] - c0.y) / scale;
        a[(k, 0)] = x;
        a[(k, 1)] = y;
        a[(k, 2)] = 1.0;
        b[k] = -(x * x + y * y);
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > COLLINEAR_RCOND * smax) {
        return Err(FitError::Collinear);
    }
    let sol = svd.solve(&b, 0.0).map_err(|_| FitError::Collinear)?;
    let (d, e, f) = (sol[0], sol[1], sol[2]);
    let r2 = 0.25 * (d * d + e * e) - f;
    if !(r2 > 0.0) {
        return Err(FitError::Collinear);
    }
    let center = Vector2::new(-0.5 * d, -0.5 * e) * scale + c0;
    let radius = r2.sqrt() * scale;
    let ms = points
        .iter()
        .map(|p| ((Vector2::new(p[0], p[1]) - center).norm() - radius).powi(2))
        .sum::<f64>()
        / n as f64;
    Ok(CircleFit { center: [center.x, center.y], radius, rms_residual: ms.sqrt() })
}

fn canonical_direction(d: Vector2<f64>) -> Vector2<f64> {
    let d = d.normalize();
    let lead = if d.x.abs() > 1e-12 { d.x } else { d.y };
    if lead < 0.0 {
        -d
    } else {
        d
    }
}

/// Total-least-squares line: the principal direction of the centred points.
pub fn fit_line(points: &[[f64; 2]]) -> Result<LineFit, FitError> {
    check_points(points, 2)?;
    let c = centroid(points);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let dx = p[0] - c.x;
        let dy = p[1] - c.y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let scale = points.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max).max(1.0);
    if sxx + syy <= (1e-15 * scale).powi(2) * points.len() as f64 {
        return Err(FitError::Coincident);
    }
    // major axis of the 2x2 scatter matrix
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let dir = canonical_direction(Vector2::new(angle.cos(), angle.sin()));
    let normal = Vector2::new(dir.y, -dir.x);
    let offset = normal.dot(&c);
    let (mut ss, mut lo, mut hi) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        let q = Vector2::new(p[0], p[1]);
        ss += (normal.dot(&q) - offset).powi(2);
        let t = dir.dot(&q);
        lo = lo.min(t);
        hi = hi.max(t);
    }
    Ok(LineFit {
        direction: [dir.x, dir.y],
        offset,
        rms_residual: (ss / points.len() as f64).sqrt(),
        extent: hi - lo,
    })
}

/// Outcome of fitting one chain.
#[derive(Debug, Clone, PartialEq)]
pub enum ChainFit<T> {
    Fitted { level: f64, fit: T },
    /// Fewer than [`MIN_CHAIN_VERTICES`] vertices.
    Skipped { level: f64, vertices: usize },
    Failed { level: f64, error: FitError },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryVerdict<T> {
    pub holds: bool,
    /// Worst normalised deviation; `holds` iff `spread <= tol`.
    pub spread: f64,
    pub tol: f64,
    /// Joint mean center (concentricity) or mean direction (parallelism).
    pub common: [f64; 2],
    pub levels_tested: Vec<f64>,
    pub per_contour: Vec<ChainFit<T>>,
}

impl<T> SymmetryVerdict<T> {
    pub fn fitted(&self) -> impl Iterator<Item = &T> {
        self.per_contour.iter().filter_map(|c| match c {
            ChainFit::Fitted { fit, .. } => Some(fit),
            _ => None,
        })
    }

    pub fn skipped(&self) -> usize {
        self.per_contour.iter().filter(|c| matches!(c, ChainFit::Skipped { .. })).count()
    }
}

fn fit_chains<T>(
    cs: &ContourSet,
    fit: impl Fn(&[[f64; 2]]) -> Result<T, FitError>,
) -> Vec<ChainFit<T>> {
    cs.chains()
        .map(|(level, ch)| {
            if ch.projected.len() < MIN_CHAIN_VERTICES {
                ChainFit::Skipped { level, vertices: ch.projected.len() }
            } else {
                match fit(&ch.projected) {
                    Ok(fit) => ChainFit::Fitted { level, fit },
                    Err(error) => ChainFit::Failed { level, error },
                }
            }
        })
        .collect()
}

fn tested_levels(cs: &ContourSet) -> Vec<f64> {
    cs.levels.iter().filter(|l| !l.chains.is_empty()).map(|l| l.level).collect()
}

/// Fits a circle to every projected chain. Holds iff each chain's RMS
/// residual is within `tol · radius` and every center lies within
/// `tol · (min radius)` of the joint mean center. A chain whose fit fails
/// (e.g. a straight line) makes the verdict fail.
pub fn concentricity_verdict(cs: &ContourSet, tol: f64) -> Result<SymmetryVerdict<CircleFit>, FitError> {
    let per = fit_chains(cs, fit_circle);
    let fits: Vec<&CircleFit> = per
        .iter()
        .filter_map(|c| match c {
            ChainFit::Fitted { fit, .. } => Some(fit),
            _ => None,
        })
        .collect();
    let failed = per.iter().any(|c| matches!(c, ChainFit::Failed { .. }));
    if fits.len() < 2 && !failed {
        return Err(FitError::TooFewChains { fitted: fits.len() });
    }
    let n = fits.len().max(1) as f64;
    let mean = fits.iter().fold([0.0, 0.0], |a, f| [a[0] + f.center[0] / n, a[1] + f.center[1] / n]);
    let min_r = fits.iter().map(|f| f.radius).fold(f64::INFINITY, f64::min);
    let mut spread: f64 = if failed { f64::INFINITY } else { 0.0 };
    for f in &fits {
        spread = spread.max(f.rms_residual / f.radius);
        let dc = ((f.center[0] - mean[0]).powi(2) + (f.center[1] - mean[1]).powi(2)).sqrt();
        spread = spread.max(dc / min_r);
    }
    Ok(SymmetryVerdict { holds: spread <= tol, spread, tol, common: mean, levels_tested: tested_levels(cs), per_contour: per })
}

/// Fits a line to every projected chain. Holds iff each chain's RMS residual
/// is within `tol · extent` and all pairs of directions agree to within
/// `tol` radians (as undirected lines).
pub fn parallelism_verdict(cs: &ContourSet, tol: f64) -> Result<SymmetryVerdict<LineFit>, FitError> {
    let per = fit_chains(cs, fit_line);
    let fits: Vec<&LineFit> = per
        .iter()
        .filter_map(|c| match c {
            ChainFit::Fitted { fit, .. } => Some(fit),
            _ => None,
        })
        .collect();
    let failed = per.iter().any(|c| matches!(c, ChainFit::Failed { .. }));
    if fits.len() < 2 && !failed {
        return Err(FitError::TooFewChains { fitted: fits.len() });
    }
    let mut spread: f64 = if failed { f64::INFINITY } else { 0.0 };
    let mut sum = Vector2::zeros();
    let reference = fits.first().map(|f| Vector2::new(f.direction[0], f.direction[1]));
    for (i, f) in fits.iter().enumerate() {
        spread = spread.max(if f.extent > 0.0 { f.rms_residual / f.extent } else { f64::INFINITY });
        let d = Vector2::new(f.direction[0], f.direction[1]);
        for g in &fits[i + 1..] {
            let e = Vector2::new(g.direction[0], g.direction[1]);
            // angle between undirected lines
            spread = spread.max(d.perp(&e).abs().atan2(d.dot(&e).abs()));
        }
        let aligned = match reference {
            Some(r) if r.dot(&d) < 0.0 => -d,
            _ => d,
        };
        sum += aligned;
    }
    let common = if sum.norm() > 0.0 { canonical_direction(sum) } else { Vector2::zeros() };
    Ok(SymmetryVerdict {
        holds: spread <= tol,
        spread,
        tol,
        common: [common.x, common.y],
        levels_tested: tested_levels(cs),
        per_contour: per,
    })
}

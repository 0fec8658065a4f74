//! Gauss-map equivariance under coordinate shifts.
//!
//! A shift `φ_t` of the chart parameters either rotates the projected
//! position about the third axis (`θ ↦ θ + t`) or translates it along the
//! second axis (`y ↦ y + t`). The probes here measure by how much the unit
//! normal rotates about the third axis per unit shift, and how far the
//! surface is from rotating by exactly `k·t`.
//!
//! The axis is the `+z` direction and the plane is the `xy`-plane with its
//! standard orientation, so the sign of the rotation constant is fixed.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use nalgebra::{Vector2, Vector3};
use thiserror::Error;

use crate::surface::{Chart, SurfaceError, SurfacePatch};

/// Horizontal normal components shorter than this leave the rotation angle
/// undefined; such samples are skipped.
pub const MIN_HORIZONTAL_NORMAL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("every sample has a vertical normal; the rotation angle is undefined")]
    AllSamplesSkipped,
    #[error("domain span {span} in the shift direction cannot hold a total shift of {shift}")]
    DomainTooSmall { span: f64, shift: f64 },
    #[error("a {kind:?} shift does not act on a {chart} chart")]
    ChartMismatch { kind: ShiftKind, chart: &'static str },
    #[error("invalid sample specification: {0}")]
    BadSampleSpec(String),
}

/// Which one-parameter group acts on the chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftKind {
    /// `θ ↦ θ + t`; the projection rotates by `t`.
    Rotational,
    /// `y ↦ y + t`; the projection translates by `t·(0, 1)`.
    Translational,
}

/// A shift group together with the constant `k` of `n ∘ φ_t = R_{kt} ∘ n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryProbe {
    pub kind: ShiftKind,
    pub rotation_constant: f64,
}

impl SymmetryProbe {
    pub fn new(kind: ShiftKind, rotation_constant: f64) -> Self {
        Self { kind, rotation_constant }
    }

    /// The axis `l`; always the third coordinate axis.
    pub fn axis(&self) -> Vector3<f64> {
        Vector3::z()
    }

    /// Unit normal of the plane `P`; parallel to the axis.
    pub fn plane_normal(&self) -> Vector3<f64> {
        Vector3::z()
    }

    /// Translation direction `v` of the translational kind.
    pub fn translation(&self) -> Vector2<f64> {
        Vector2::y()
    }
}

/// Base-point grid and shift schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub n_u: usize,
    pub n_v: usize,
    pub n_shifts: usize,
    /// Largest shift before any step-size reduction.
    pub max_shift: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self { n_u: 16, n_v: 16, n_shifts: 8, max_shift: FRAC_PI_4 }
    }
}

impl SampleSpec {
    fn validate(&self) -> Result<(), SymmetryError> {
        if self.n_u == 0 || self.n_v == 0 || self.n_shifts == 0 {
            return Err(SymmetryError::BadSampleSpec("sample counts must be positive".into()));
        }
        if !(self.max_shift > 0.0 && self.max_shift.is_finite()) {
            return Err(SymmetryError::BadSampleSpec(format!("max_shift = {}", self.max_shift)));
        }
        Ok(())
    }
}

/// Rotation about the third axis by `angle`.
pub fn rotate_about_axis(vec: &Vector3<f64>, angle: f64) -> Vector3<f64> {
    let (s, c) = angle.sin_cos();
    Vector3::new(c * vec.x - s * vec.y, s * vec.x + c * vec.y, vec.z)
}

fn check_kind(s: &SurfacePatch, kind: ShiftKind) -> Result<(), SymmetryError> {
    match (s.chart(), kind) {
        (Chart::CartesianGraph(_), ShiftKind::Rotational) => {
            Err(SymmetryError::ChartMismatch { kind, chart: "cartesian graph" })
        }
        (Chart::PolarGraph(_), ShiftKind::Translational) => {
            Err(SymmetryError::ChartMismatch { kind, chart: "polar graph" })
        }
        _ => Ok(()),
    }
}

fn shifted(p: (f64, f64), t: f64) -> (f64, f64) {
    // both kinds act on the second chart parameter
    (p.0, p.1 + t)
}

fn base_points(s: &SurfacePatch, spec: &SampleSpec, total_shift: f64) -> Result<Vec<(f64, f64)>, SymmetryError> {
    let d = s.domain();
    if total_shift >= d.v_span() {
        return Err(SymmetryError::DomainTooSmall { span: d.v_span(), shift: total_shift });
    }
    let v_hi = d.v_max - total_shift;
    let lerp = |a: f64, b: f64, k: usize, n: usize| if n == 1 { 0.5 * (a + b) } else { a + (b - a) * k as f64 / (n - 1) as f64 };
    let mut pts = Vec::with_capacity(spec.n_u * spec.n_v);
    for i in 0..spec.n_u {
        for j in 0..spec.n_v {
            pts.push((lerp(d.u_min, d.u_max, i, spec.n_u), lerp(d.v_min, v_hi, j, spec.n_v)));
        }
    }
    Ok(pts)
}

fn horizontal(n: &Vector3<f64>) -> Vector2<f64> {
    Vector2::new(n.x, n.y)
}

fn signed_angle(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.perp(b).atan2(a.dot(b))
}

/// Result of [`estimate_rotation_constant`].
#[derive(Debug, Clone, PartialEq)]
pub struct RotationEstimate {
    pub k_hat: f64,
    /// Largest `|angle − k̂ t|` over the regression table.
    pub max_residual: f64,
    pub shift_step: f64,
    pub samples_used: usize,
    pub samples_skipped: usize,
}

/// Least-squares slope of the normal's rotation angle against the shift.
///
/// A coarse two-point estimate first bounds the step so that consecutive
/// angles differ by at most `π/2`; angles are then unwrapped by
/// nearest-branch continuation from `t = 0` and regressed through the
/// origin.
pub fn estimate_rotation_constant(
    s: &SurfacePatch,
    kind: ShiftKind,
    spec: &SampleSpec,
) -> Result<RotationEstimate, SymmetryError> {
    spec.validate()?;
    check_kind(s, kind)?;
    let mut step = spec.max_shift / spec.n_shifts as f64;
    let base = base_points(s, spec, spec.max_shift)?;

    let usable = |p: (f64, f64)| -> Result<Option<Vector2<f64>>, SymmetryError> {
        let h = horizontal(&s.normal(p)?);
        Ok((h.norm() >= MIN_HORIZONTAL_NORMAL).then_some(h))
    };

    // coarse estimate from a small shift at the first usable base point
    let probe = step / 16.0;
    let mut k_coarse = None;
    for &p in &base {
        if let (Some(h0), Some(h1)) = (usable(p)?, usable(shifted(p, probe))?) {
            k_coarse = Some(signed_angle(&h0, &h1) / probe);
            break;
        }
    }
    let k_coarse = k_coarse.ok_or(SymmetryError::AllSamplesSkipped)?;
    if k_coarse.abs() > 0.0 {
        step = step.min(FRAC_PI_2 / k_coarse.abs());
    }

    let mut table: Vec<(f64, f64)> = Vec::new();
    let (mut used, mut skipped) = (0, 0);
    'samples: for &p in &base {
        let Some(h0) = usable(p)? else {
            skipped += 1;
            continue;
        };
        let mut rows = Vec::with_capacity(spec.n_shifts);
        let (mut prev, mut acc) = (h0, 0.0);
        for j in 1..=spec.n_shifts {
            let t = step * j as f64;
            let Some(h) = usable(shifted(p, t))? else {
                skipped += 1;
                continue 'samples;
            };
            acc += signed_angle(&prev, &h);
            prev = h;
            rows.push((t, acc));
        }
        used += 1;
        table.extend(rows);
    }
    if used == 0 {
        return Err(SymmetryError::AllSamplesSkipped);
    }
    let stt: f64 = table.iter().map(|(t, _)| t * t).sum();
    let sta: f64 = table.iter().map(|(t, a)| t * a).sum();
    let k_hat = sta / stt;
    let max_residual = table.iter().map(|(t, a)| (a - k_hat * t).abs()).fold(0.0, f64::max);
    Ok(RotationEstimate { k_hat, max_residual, shift_step: step, samples_used: used, samples_skipped: skipped })
}

/// Largest deviation from exact equivariance at shift `t`, over all base
/// points: the maximum of `‖n(φ_t p) − R_{kt} n(p)‖` and of the gap between
/// the shifted point's projection and the rotated or translated original.
pub fn equivariance_residual_at(
    s: &SurfacePatch,
    probe: &SymmetryProbe,
    spec: &SampleSpec,
    t: f64,
) -> Result<f64, SymmetryError> {
    spec.validate()?;
    check_kind(s, probe.kind)?;
    let base = base_points(s, spec, spec.max_shift.max(t.abs()))?;
    let mut worst: f64 = 0.0;
    for p in base {
        let q = shifted(p, t);
        let n0 = s.normal(p)?;
        let n1 = s.normal(q)?;
        worst = worst.max((n1 - rotate_about_axis(&n0, probe.rotation_constant * t)).norm());
        let x0 = s.position(p)?;
        let x1 = s.position(q)?;
        let expected = match probe.kind {
            ShiftKind::Rotational => rotate_about_axis(&x0, t),
            ShiftKind::Translational => x0 + Vector3::new(0.0, t, 0.0),
        };
        worst = worst.max(((x1 - expected).xy()).norm());
    }
    Ok(worst)
}

/// [`equivariance_residual_at`] maximised over the shifts `t_j = j ·
/// max_shift / n_shifts`.
pub fn equivariance_residual(s: &SurfacePatch, probe: &SymmetryProbe, spec: &SampleSpec) -> Result<f64, SymmetryError> {
    let mut worst: f64 = 0.0;
    for j in 1..=spec.n_shifts {
        let t = spec.max_shift * j as f64 / spec.n_shifts as f64;
        worst = worst.max(equivariance_residual_at(s, probe, spec, t)?);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryLabel {
    /// Rotational shift with `k = 1` (helicoidal surfaces).
    Rotational,
    StrictlySemiRotational,
    /// Translational shift with `k = 0` (cylindrical surfaces).
    Parallel,
    StrictlyQuasiRotational,
}

impl SymmetryLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SymmetryLabel::Rotational => "rotational",
            SymmetryLabel::StrictlySemiRotational => "strictly semi-rotational",
            SymmetryLabel::Parallel => "parallel",
            SymmetryLabel::StrictlyQuasiRotational => "strictly quasi-rotational",
        }
    }
}

/// Tolerance for `k̂ ≈ 1` / `k̂ ≈ 0` in [`classify_symmetry_kind`].
pub const LABEL_TOL: f64 = 1e-6;

pub fn classify_symmetry_kind(k_hat: f64, kind: ShiftKind) -> SymmetryLabel {
    match kind {
        ShiftKind::Rotational if (k_hat - 1.0).abs() <= LABEL_TOL => SymmetryLabel::Rotational,
        ShiftKind::Rotational => SymmetryLabel::StrictlySemiRotational,
        ShiftKind::Translational if k_hat.abs() <= LABEL_TOL => SymmetryLabel::Parallel,
        ShiftKind::Translational => SymmetryLabel::StrictlyQuasiRotational,
    }
}

/// Reduces an angle to `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{
        helicoid_patch, p_family_patch, x_family_patch, HelicoidParams, PFamilyParams, XFamilyParams,
    };
    use crate::jet::{Expr, Rect};

    fn close(a: &Vector3<f64>, b: &Vector3<f64>) -> bool {
        (a - b).amax() < 1e-15
    }

    #[test]
    fn rotations_about_the_axis() {
        assert!(close(&rotate_about_axis(&Vector3::x(), FRAC_PI_2), &Vector3::y()));
        let v = Vector3::new(0.3, -2.0, 5.0);
        assert_eq!(rotate_about_axis(&v, 0.0), v);
        assert!(close(&rotate_about_axis(&Vector3::new(1.0, 0.0, 1.0), PI), &Vector3::new(-1.0, 0.0, 1.0)));
    }

    #[test]
    fn monkey_saddle_rotation_constant() {
        let s = x_family_patch(&XFamilyParams::new(3.0, 1.0).unwrap()).unwrap();
        let est = estimate_rotation_constant(&s, ShiftKind::Rotational, &SampleSpec::default()).unwrap();
        assert!((est.k_hat + 2.0).abs() < 1e-8, "{est:?}");
        assert_eq!(est.samples_skipped, 0);
    }

    #[test]
    fn helicoid_and_p_family_constants() {
        let h = helicoid_patch(&HelicoidParams::right(1.0).unwrap()).unwrap();
        let e = estimate_rotation_constant(&h, ShiftKind::Rotational, &SampleSpec::default()).unwrap();
        assert!((e.k_hat - 1.0).abs() < 1e-8);
        let p = p_family_patch(&PFamilyParams::new(1.0, 1.0).unwrap()).unwrap();
        let e = estimate_rotation_constant(&p, ShiftKind::Translational, &SampleSpec::default()).unwrap();
        assert!((e.k_hat + 1.0).abs() < 1e-8);
    }

    #[test]
    fn equivariance_holds_with_the_right_constant_only() {
        let s = x_family_patch(&XFamilyParams::new(3.0, 1.0).unwrap()).unwrap();
        let spec = SampleSpec::default();
        let good = SymmetryProbe::new(ShiftKind::Rotational, -2.0);
        assert!(equivariance_residual(&s, &good, &spec).unwrap() <= 1e-10);
        let wrong = SymmetryProbe::new(ShiftKind::Rotational, 0.0);
        assert!(equivariance_residual_at(&s, &wrong, &spec, FRAC_PI_4).unwrap() >= 0.1);
        let p = p_family_patch(&PFamilyParams::new(2.0, 0.5).unwrap()).unwrap();
        let probe = SymmetryProbe::new(ShiftKind::Translational, -2.0);
        assert!(equivariance_residual(&p, &probe, &SampleSpec { max_shift: 0.5, ..spec }).unwrap() <= 1e-10);
    }

    #[test]
    fn vertical_normals_are_skipped() {
        // a plane has no horizontal normal anywhere
        let s = SurfacePatch::polar(Expr::constant(1.0), Rect::new(0.5, 1.0, 0.0, TAU)).unwrap();
        assert_eq!(
            estimate_rotation_constant(&s, ShiftKind::Rotational, &SampleSpec::default()),
            Err(SymmetryError::AllSamplesSkipped)
        );
        // z = (r-1)² has a vertical normal on the ring r = 1 only
        let bowl = SurfacePatch::polar((Expr::u() - 1.0).powi(2), Rect::new(0.5, 1.5, 0.0, TAU)).unwrap();
        let spec = SampleSpec { n_u: 3, ..SampleSpec::default() };
        let e = estimate_rotation_constant(&bowl, ShiftKind::Rotational, &spec).unwrap();
        assert_eq!(e.samples_skipped, spec.n_v);
        assert!((e.k_hat - 1.0).abs() < 1e-8);
    }

    #[test]
    fn labels() {
        assert_eq!(classify_symmetry_kind(-2.0, ShiftKind::Rotational), SymmetryLabel::StrictlySemiRotational);
        assert_eq!(classify_symmetry_kind(1.0, ShiftKind::Rotational), SymmetryLabel::Rotational);
        assert_eq!(classify_symmetry_kind(0.0, ShiftKind::Translational), SymmetryLabel::Parallel);
        assert_eq!(classify_symmetry_kind(-1.0, ShiftKind::Translational), SymmetryLabel::StrictlyQuasiRotational);
    }

    #[test]
    fn kind_must_match_chart() {
        let p = p_family_patch(&PFamilyParams::new(1.0, 1.0).unwrap()).unwrap();
        assert!(matches!(
            estimate_rotation_constant(&p, ShiftKind::Rotational, &SampleSpec::default()),
            Err(SymmetryError::ChartMismatch { .. })
        ));
    }

    #[test]
    fn shift_too_large_for_domain() {
        let p = p_family_patch(&PFamilyParams::new(1.0, 1.0).unwrap()).unwrap();
        let spec = SampleSpec { max_shift: 3.0, ..SampleSpec::default() };
        assert!(matches!(
            estimate_rotation_constant(&p, ShiftKind::Translational, &spec),
            Err(SymmetryError::DomainTooSmall { .. })
        ));
    }
}

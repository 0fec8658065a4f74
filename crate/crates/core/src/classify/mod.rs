//! Classification of sampled height fields with concentric or parallel
//! K-contours.
//!
//! The decision procedure follows the structure of the classification
//! theorems: check that `K` is non-constant and that the area element is
//! invariant along the contour direction, factor the gradient as
//! `α(cos β, sin β)`, and then split on the slope `φ = β_v`. A zero slope
//! means a helicoidal surface `F = aθ + A(r)`; a constant nonzero slope
//! means a member of `x_{m,c}` (polar) or `p_{k,c}` (Cartesian). Parameters
//! always come from a direct fit of the height values, and no verdict other
//! than [`Verdict::Unclassified`] is issued unless that fit reconstructs
//! the field to the requested tolerance.

mod alphabeta;
mod field;
mod fit;

pub use alphabeta::{recover_alpha_beta, AlphaBetaField, FLAT_ALPHA};
pub use field::{HeightField, SampleGrid, MIN_TABULATED_NODES};
pub use fit::{fit_helicoid, fit_mode, HelicoidFit, ModeFit};

use thiserror::Error;

use crate::jet::{Jet2, JetError};
use crate::surface::{polar_graph_delta_from_jet, polar_graph_k_from_jet, SurfaceError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("invalid sample grid: {0}")]
    InvalidGrid(String),
    #[error("expected {expected} samples, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("non-finite height at node ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("polar samples need r > 0, got r_min = {0}")]
    NonPositiveRadius(f64),
    #[error("gradient vanishes on a region near node ({i}, {j}); β is undefined there")]
    FlatRegion { i: usize, j: usize },
    #[error("least-squares system is rank deficient")]
    SingularFit,
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    /// `(u, v) = (r, θ)`.
    Polar,
    /// `(u, v) = (x, y)`.
    Cartesian,
}

impl ChartKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChartKind::Polar => "polar",
            ChartKind::Cartesian => "cartesian",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// `K ≡ 0` on the samples.
    Plane,
    /// `F = aθ + A(r)`; `profile` holds `(r_i, A(r_i))`.
    Helicoidal { a: f64, profile: Vec<(f64, f64)> },
    /// `F = c r^m cos(mθ + phase) + offset`.
    XFamily { m: f64, c: f64, phase: f64, offset: f64 },
    /// `F = c e^{kx} cos(ky + phase) + offset`.
    PFamily { k: f64, c: f64, phase: f64, offset: f64 },
    Unclassified,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Plane => "plane",
            Verdict::Helicoidal { .. } => "helicoidal",
            Verdict::XFamily { .. } => "x-family",
            Verdict::PFamily { .. } => "p-family",
            Verdict::Unclassified => "unclassified",
        }
    }

    pub fn is_classified(&self) -> bool {
        !matches!(self, Verdict::Unclassified)
    }
}

/// Per-stage diagnostics. Stages that were not reached stay `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Residuals {
    /// `max |K| · L²`, with `L` the largest coordinate extent.
    pub k_scale: Option<f64>,
    /// `(max K − min K) · L²`.
    pub k_range: Option<f64>,
    /// Worst per-row `(max K − min K) / max |K|`.
    pub k_invariance: Option<f64>,
    /// Worst per-row `(max Δ − min Δ) / mean Δ`.
    pub delta_invariance: Option<f64>,
    pub phi_mean: Option<f64>,
    pub phi_spread: Option<f64>,
    pub beta_linearity: Option<f64>,
    pub log_alpha_slope: Option<f64>,
    /// Helicoid branch: `max |F_v − a| / (1 + |a|)`.
    pub pitch_spread: Option<f64>,
    /// Helicoid branch reconstruction, kept when the x-family fallback wins.
    pub helicoid_reconstruction: Option<f64>,
    /// `rms(F − F_fit) / rms(F − mean F)` of the model behind the verdict.
    pub reconstruction: Option<f64>,
    /// Max gap of the proof identity for `K` (polar charts only).
    pub identity: Option<f64>,
}

impl Residuals {
    pub fn entries(&self) -> [(&'static str, Option<f64>); 12] {
        [
            ("k_scale", self.k_scale),
            ("k_range", self.k_range),
            ("k_invariance", self.k_invariance),
            ("delta_invariance", self.delta_invariance),
            ("phi_mean", self.phi_mean),
            ("phi_spread", self.phi_spread),
            ("beta_linearity", self.beta_linearity),
            ("log_alpha_slope", self.log_alpha_slope),
            ("pitch_spread", self.pitch_spread),
            ("helicoid_reconstruction", self.helicoid_reconstruction),
            ("reconstruction", self.reconstruction),
            ("identity", self.identity),
        ]
    }
}

/// Hypotheses checked on the way; `None` when not reached.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Preconditions {
    pub k_nonconstant: Option<bool>,
    pub k_invariant: Option<bool>,
    pub delta_invariant: Option<bool>,
    pub phi_constant: Option<bool>,
}

impl Preconditions {
    pub fn entries(&self) -> [(&'static str, Option<bool>); 4] {
        [
            ("k_nonconstant", self.k_nonconstant),
            ("k_invariant", self.k_invariant),
            ("delta_invariant", self.delta_invariant),
            ("phi_constant", self.phi_constant),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub chart: ChartKind,
    pub tol: f64,
    pub verdict: Verdict,
    pub residuals: Residuals,
    pub preconditions: Preconditions,
    pub notes: Vec<String>,
}

pub fn classify_polar(field: &HeightField, tol: f64) -> Result<ClassificationReport, ClassifyError> {
    classify(field, ChartKind::Polar, tol)
}

pub fn classify_cartesian(field: &HeightField, tol: f64) -> Result<ClassificationReport, ClassifyError> {
    classify(field, ChartKind::Cartesian, tol)
}

fn cartesian_k_delta(f: &Jet2) -> (f64, f64) {
    let w = 1.0 + f.d_u * f.d_u + f.d_v * f.d_v;
    ((f.d_uu * f.d_vv - f.d_uv * f.d_uv) / (w * w), w.sqrt())
}

fn k_and_delta(chart: ChartKind, grid: &SampleGrid, jets: &[Jet2]) -> Result<(Vec<f64>, Vec<f64>), ClassifyError> {
    let mut k = Vec::with_capacity(jets.len());
    let mut d = Vec::with_capacity(jets.len());
    for i in 0..grid.nu {
        let u = grid.u_at(i);
        for j in 0..grid.nv {
            let f = &jets[grid.index(i, j)];
            let (kk, dd) = match chart {
                ChartKind::Polar => (polar_graph_k_from_jet(u, f)?, polar_graph_delta_from_jet(u, f)?),
                ChartKind::Cartesian => cartesian_k_delta(f),
            };
            k.push(kk);
            d.push(dd);
        }
    }
    Ok((k, d))
}

fn rms_spread(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Runs the decision procedure on `field` read in `chart` coordinates.
pub fn classify(field: &HeightField, chart: ChartKind, tol: f64) -> Result<ClassificationReport, ClassifyError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(ClassifyError::BadTolerance(tol));
    }
    let grid = *field.grid();
    if chart == ChartKind::Polar && grid.u_range.0 <= 0.0 {
        return Err(ClassifyError::NonPositiveRadius(grid.u_range.0));
    }
    let mut report = ClassificationReport {
        chart,
        tol,
        verdict: Verdict::Unclassified,
        residuals: Residuals::default(),
        preconditions: Preconditions::default(),
        notes: Vec::new(),
    };
    let jets = field.node_jets()?;
    let values: Vec<f64> = jets.iter().map(|j| j.value).collect();
    let (k, delta) = k_and_delta(chart, &grid, &jets)?;

    let margin = field.margin();
    let rows = margin..grid.nu - margin;
    let cols = margin..grid.nv - margin;
    let window = || rows.clone().flat_map(|i| cols.clone().map(move |j| (i, j)));

    let length = match chart {
        ChartKind::Polar => grid.u_range.1,
        ChartKind::Cartesian => {
            let ext = |(a, b): (f64, f64)| a.abs().max(b.abs());
            ext(grid.u_range).max(ext(grid.v_range))
        }
    };
    let l2 = length * length;
    let k_abs = window().map(|(i, j)| k[grid.index(i, j)].abs()).fold(0.0, f64::max);
    let (k_lo, k_hi) = window()
        .map(|(i, j)| k[grid.index(i, j)])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    report.residuals.k_scale = Some(k_abs * l2);
    report.residuals.k_range = Some((k_hi - k_lo) * l2);

    if k_abs * l2 <= tol {
        report.verdict = Verdict::Plane;
        report.residuals.reconstruction = Some(k_abs * l2);
        report.preconditions.k_nonconstant = Some(false);
        report.notes.push("K vanishes on the samples; the surface is flat".into());
        return Ok(report);
    }
    let nonconstant = (k_hi - k_lo) * l2 > tol;
    report.preconditions.k_nonconstant = Some(nonconstant);
    if !nonconstant {
        report.notes.push("K is a nonzero constant; outside the non-constant curvature assumption".into());
        return Ok(report);
    }

    let mut k_inv: f64 = 0.0;
    let mut d_inv: f64 = 0.0;
    for i in rows.clone() {
        let row = |q: &[f64]| {
            cols.clone()
                .map(|j| q[grid.index(i, j)])
                .fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, s), v| (lo.min(v), hi.max(v), s + v))
        };
        let (lo, hi, _) = row(&k);
        k_inv = k_inv.max((hi - lo) / k_abs);
        let (lo, hi, s) = row(&delta);
        d_inv = d_inv.max((hi - lo) / (s / cols.len() as f64));
    }
    report.residuals.k_invariance = Some(k_inv);
    report.residuals.delta_invariance = Some(d_inv);
    let contour_dir = match chart {
        ChartKind::Polar => "θ",
        ChartKind::Cartesian => "y",
    };
    // second derivatives make this one noisy on tabulated data, so it is
    // reported rather than enforced
    report.preconditions.k_invariant = Some(k_inv <= tol);
    if k_inv > tol {
        report.notes.push(format!("K varies along {contour_dir} by {k_inv:e} of its maximum"));
    }
    report.preconditions.delta_invariant = Some(d_inv <= tol);
    if d_inv > tol {
        report.notes.push(format!("area element varies along {contour_dir}"));
        return Ok(report);
    }

    let ab = alphabeta::from_jets(field, chart, &jets)?;
    let (phi_mean, phi_spread) = ab.phi_stats();
    let slope = ab.log_alpha_slope();
    report.residuals.phi_mean = Some(phi_mean);
    report.residuals.phi_spread = Some(phi_spread);
    report.residuals.beta_linearity = Some(ab.beta_linearity());
    report.residuals.log_alpha_slope = Some(slope);
    if chart == ChartKind::Polar {
        report.residuals.identity = Some(identity_gap(field, &ab, &jets, &k, &delta));
    }
    let phi_constant = phi_spread <= tol * (1.0 + phi_mean.abs());
    report.preconditions.phi_constant = Some(phi_constant);
    if !phi_constant {
        report.notes.push(format!("β is not linear in {contour_dir} with a constant slope"));
        return Ok(report);
    }

    let scale = rms_spread(&values).max(f64::MIN_POSITIVE);
    let mode_verdict = |e0: f64| -> Option<(Verdict, f64)> {
        let fit = fit_mode(&grid, chart, &values, e0).ok()?;
        let (c, phase) = fit.amplitude_phase();
        let verdict = match chart {
            ChartKind::Polar => Verdict::XFamily { m: fit.exponent, c, phase, offset: fit.offset },
            ChartKind::Cartesian => Verdict::PFamily { k: fit.exponent, c, phase, offset: fit.offset },
        };
        Some((verdict, fit.rms / scale))
    };

    if phi_mean.abs() <= tol {
        if chart == ChartKind::Cartesian {
            report.notes.push("β is constant along rows, which forces K ≡ 0; contradicts the sampled K".into());
            return Ok(report);
        }
        let hf = fit_helicoid(&grid, &values);
        let pitch = window()
            .map(|(i, j)| (jets[grid.index(i, j)].d_v - hf.a).abs())
            .fold(0.0, f64::max)
            / (1.0 + hf.a.abs());
        let h_err = hf.rms / scale;
        report.residuals.pitch_spread = Some(pitch);
        report.residuals.helicoid_reconstruction = Some(h_err);
        let helicoid = (pitch <= tol && h_err <= tol).then(|| Verdict::Helicoidal {
            a: hf.a,
            profile: (0..grid.nu).map(|i| (grid.u_at(i), hf.profile[i])).collect(),
        });
        // the two cases only overlap on degenerate data; reconstruction decides
        let fallback = (slope.abs() >= 1e-3).then(|| mode_verdict(slope)).flatten();
        match (helicoid, fallback) {
            (_, Some((v, err))) if err <= tol && err * 10.0 < h_err => {
                report.notes.push("x-family fit reconstructs 10× better than the helicoid".into());
                report.verdict = v;
                report.residuals.reconstruction = Some(err);
            }
            (Some(v), _) => {
                report.verdict = v;
                report.residuals.reconstruction = Some(h_err);
            }
            (None, _) => {
                report.residuals.reconstruction = Some(h_err);
                report.notes.push("helicoid fit exceeds tolerance".into());
            }
        }
        return Ok(report);
    }

    // φ = −m (polar) or −k (Cartesian); the log-α slope estimates the same
    // exponent and seeds the fit
    let seed = if slope.is_finite() && slope.abs() >= 1e-3 { slope } else { -phi_mean };
    match mode_verdict(seed) {
        Some((v, err)) => {
            report.residuals.reconstruction = Some(err);
            if err <= tol {
                report.verdict = v;
            } else {
                report.notes.push("mode fit exceeds tolerance".into());
            }
        }
        None => report.notes.push("mode fit is singular".into()),
    }
    Ok(report)
}

fn identity_gap(field: &HeightField, ab: &AlphaBetaField, jets: &[Jet2], k: &[f64], delta: &[f64]) -> f64 {
    let grid = ab.grid;
    let exact = (!field.is_tabulated()).then_some(jets);
    let dalpha = ab.alpha_prime(exact);
    let mut worst: f64 = 0.0;
    for i in ab.rows.clone() {
        let r = grid.u_at(i);
        let a = ab.alpha_row[i];
        for j in ab.cols.clone() {
            let idx = grid.index(i, j);
            let rhs = a * (1.0 + ab.phi[i]) * (r * dalpha[i] - a) / delta[idx].powi(4);
            worst = worst.max((k[idx] - rhs).abs());
        }
    }
    worst
}

/// Max over the grid of `|K − α(1 + φ)(rα′ − α)/Δ⁴|`, the left side from the
/// polar-graph curvature formula and the right side from the recovered
/// `α(r)` and `φ(r)`.
pub fn proof_identity_residual(field: &HeightField) -> Result<f64, ClassifyError> {
    let grid = *field.grid();
    let jets = field.node_jets()?;
    let ab = alphabeta::from_jets(field, ChartKind::Polar, &jets)?;
    let (k, delta) = k_and_delta(ChartKind::Polar, &grid, &jets)?;
    Ok(identity_gap(field, &ab, &jets, &k, &delta))
}

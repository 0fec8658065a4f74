//! Polar factorisation of the height-field gradient.
//!
//! For a polar graph `rF_r = α cos β`, `F_θ = α sin β`; for a Cartesian graph
//! `F_x = α cos β`, `F_y = α sin β`. With `α ≥ 0` the pair is single-valued
//! up to the branch of `β`, which is fixed by continuity.

use std::f64::consts::{PI, TAU};
use std::ops::Range;

use crate::jet::Jet2;

use super::field::{diff1, HeightField, SampleGrid};
use super::{ChartKind, ClassifyError};

/// `α` below this on a 2×2 block of nodes, or on a whole row, is a flat
/// region where `β` carries no information.
pub const FLAT_ALPHA: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaBetaField {
    pub chart: ChartKind,
    pub grid: SampleGrid,
    /// Per node, row-major.
    pub alpha: Vec<f64>,
    /// Row means of `alpha` over the diagnostic columns.
    pub alpha_row: Vec<f64>,
    /// Per node, unwrapped.
    pub beta: Vec<f64>,
    /// Slope of `β` against the second coordinate, per row.
    pub phi: Vec<f64>,
    /// Intercept of the same regression, per row.
    pub psi: Vec<f64>,
    /// Rows and columns that enter the regressions and diagnostics.
    pub rows: Range<usize>,
    pub cols: Range<usize>,
}

impl AlphaBetaField {
    /// Largest `|β − (φ v + ψ)|` over the diagnostic window.
    pub fn beta_linearity(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in self.rows.clone() {
            for j in self.cols.clone() {
                let fit = self.phi[i] * self.grid.v_at(j) + self.psi[i];
                worst = worst.max((self.beta[self.grid.index(i, j)] - fit).abs());
            }
        }
        worst
    }

    /// `(mean φ, max |φ − mean|)` over the diagnostic rows.
    pub fn phi_stats(&self) -> (f64, f64) {
        let phis = &self.phi[self.rows.clone()];
        let mean = phis.iter().sum::<f64>() / phis.len() as f64;
        (mean, phis.iter().map(|p| (p - mean).abs()).fold(0.0, f64::max))
    }

    /// Least-squares slope of `log α` against `log r` (polar) or `x`
    /// (Cartesian) over the diagnostic rows.
    pub fn log_alpha_slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .rows
            .clone()
            .map(|i| {
                let u = self.grid.u_at(i);
                let x = match self.chart {
                    ChartKind::Polar => u.ln(),
                    ChartKind::Cartesian => u,
                };
                (x, self.alpha_row[i].ln())
            })
            .collect();
        linear_regression(&pts).0
    }

    /// `dα/du` per row. Analytic fields pass their node jets so the
    /// derivative is exact; tabulated fields differentiate the row means.
    pub(crate) fn alpha_prime(&self, jets: Option<&[Jet2]>) -> Vec<f64> {
        match jets {
            Some(jets) => (0..self.grid.nu)
                .map(|i| {
                    let r = self.grid.u_at(i);
                    let sum: f64 = self
                        .cols
                        .clone()
                        .map(|j| {
                            let k = self.grid.index(i, j);
                            let f = &jets[k];
                            let (a, b) = gradient_pair(self.chart, r, f);
                            let (da, db) = match self.chart {
                                ChartKind::Polar => (f.d_u + r * f.d_uu, f.d_uv),
                                ChartKind::Cartesian => (f.d_uu, f.d_uv),
                            };
                            (a * da + b * db) / self.alpha[k]
                        })
                        .sum();
                    sum / self.cols.len() as f64
                })
                .collect(),
            None => diff1(&self.alpha_row, self.grid.du()),
        }
    }
}

/// `(a, b)` with `a = α cos β`, `b = α sin β`.
pub(crate) fn gradient_pair(chart: ChartKind, u: f64, f: &Jet2) -> (f64, f64) {
    match chart {
        ChartKind::Polar => (u * f.d_u, f.d_v),
        ChartKind::Cartesian => (f.d_u, f.d_v),
    }
}

/// `(slope, intercept)` of the ordinary least-squares line through `pts`.
pub(crate) fn linear_regression(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

fn nearest_branch(prev: f64, b: f64) -> f64 {
    b + TAU * ((prev - b) / TAU).round()
}

/// Recovers `α`, `β`, `φ`, `ψ` from `field` in the given chart.
pub fn recover_alpha_beta(field: &HeightField, chart: ChartKind) -> Result<AlphaBetaField, ClassifyError> {
    let jets = field.node_jets()?;
    from_jets(field, chart, &jets)
}

pub(crate) fn from_jets(field: &HeightField, chart: ChartKind, jets: &[Jet2]) -> Result<AlphaBetaField, ClassifyError> {
    let grid = *field.grid();
    if chart == ChartKind::Polar && grid.u_range.0 <= 0.0 {
        return Err(ClassifyError::NonPositiveRadius(grid.u_range.0));
    }
    let (nu, nv) = (grid.nu, grid.nv);
    let margin = field.margin();
    let rows = margin..nu - margin;
    let cols = margin..nv - margin;

    let mut alpha = vec![0.0; nu * nv];
    let mut raw = vec![0.0; nu * nv];
    for i in 0..nu {
        let u = grid.u_at(i);
        for j in 0..nv {
            let k = grid.index(i, j);
            let (a, b) = gradient_pair(chart, u, &jets[k]);
            alpha[k] = a.hypot(b);
            raw[k] = b.atan2(a);
        }
    }
    for i in 0..nu {
        if (0..nv).all(|j| alpha[grid.index(i, j)] < FLAT_ALPHA) {
            return Err(ClassifyError::FlatRegion { i, j: 0 });
        }
    }
    for i in 0..nu - 1 {
        for j in 0..nv - 1 {
            let block = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
            if block.iter().all(|&(a, b)| alpha[grid.index(a, b)] < FLAT_ALPHA) {
                return Err(ClassifyError::FlatRegion { i, j });
            }
        }
    }

    // first column by continuity in u, then every row in v
    let mut beta = raw.clone();
    for i in 1..nu {
        beta[grid.index(i, 0)] = nearest_branch(beta[grid.index(i - 1, 0)], raw[grid.index(i, 0)]);
    }
    for i in 0..nu {
        for j in 1..nv {
            let k = grid.index(i, j);
            beta[k] = nearest_branch(beta[k - 1], raw[k]);
        }
    }
    // keep the principal branch on the first node
    let shift = TAU * ((beta[0] + PI) / TAU).floor();
    if shift != 0.0 {
        beta.iter_mut().for_each(|b| *b -= shift);
    }

    let mut alpha_row = vec![0.0; nu];
    let mut phi = vec![0.0; nu];
    let mut psi = vec![0.0; nu];
    for i in 0..nu {
        let pts: Vec<(f64, f64)> = cols.clone().map(|j| (grid.v_at(j), beta[grid.index(i, j)])).collect();
        (phi[i], psi[i]) = linear_regression(&pts);
        alpha_row[i] = cols.clone().map(|j| alpha[grid.index(i, j)]).sum::<f64>() / cols.len() as f64;
    }
    Ok(AlphaBetaField { chart, grid, alpha, alpha_row, beta, phi, psi, rows, cols })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Expr;
    use std::f64::consts::FRAC_PI_2;

    fn polar_grid() -> SampleGrid {
        SampleGrid::new(16, 33, (0.2, 2.0), (0.0, TAU)).unwrap()
    }

    #[test]
    fn monkey_saddle_factorisation() {
        let f = Expr::u().powi(3) * (Expr::v() * 3.0).cos();
        let ab = recover_alpha_beta(&HeightField::analytic(f, polar_grid()), ChartKind::Polar).unwrap();
        let g = ab.grid;
        for i in 0..g.nu {
            let r = g.u_at(i);
            assert!((ab.alpha_row[i] - 3.0 * r.powi(3)).abs() < 1e-12 * r.powi(3));
            assert!((ab.phi[i] + 3.0).abs() < 1e-12);
            for j in 0..g.nv {
                assert!((ab.beta[g.index(i, j)] + 3.0 * g.v_at(j)).abs() < 1e-10);
            }
        }
        assert!((ab.log_alpha_slope() - 3.0).abs() < 1e-12);
        assert!(ab.beta_linearity() < 1e-10);
    }

    #[test]
    fn right_helicoid_factorisation() {
        let ab = recover_alpha_beta(&HeightField::analytic(Expr::v(), polar_grid()), ChartKind::Polar).unwrap();
        assert!(ab.alpha.iter().all(|a| (a - 1.0).abs() < 1e-15));
        assert!(ab.beta.iter().all(|b| (b - FRAC_PI_2).abs() < 1e-15));
        assert!(ab.phi.iter().all(|p| p.abs() < 1e-15));
    }

    #[test]
    fn zero_field_is_flat() {
        let r = recover_alpha_beta(&HeightField::analytic(Expr::constant(0.0), polar_grid()), ChartKind::Polar);
        assert!(matches!(r, Err(ClassifyError::FlatRegion { .. })));
    }

    #[test]
    fn polar_needs_positive_radius() {
        let g = SampleGrid::new(8, 8, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let r = recover_alpha_beta(&HeightField::analytic(Expr::v(), g), ChartKind::Polar);
        assert_eq!(r.unwrap_err(), ClassifyError::NonPositiveRadius(0.0));
    }

    #[test]
    fn unwrapped_beta_has_no_jumps() {
        let f = Expr::u().powi(-2) * (Expr::v() * -2.0).cos();
        let ab = recover_alpha_beta(&HeightField::analytic(f, polar_grid()), ChartKind::Polar).unwrap();
        let g = ab.grid;
        for i in 0..g.nu {
            for j in 1..g.nv {
                assert!((ab.beta[g.index(i, j)] - ab.beta[g.index(i, j - 1)]).abs() < PI);
            }
        }
    }
}

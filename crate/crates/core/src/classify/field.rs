//! Height fields on uniform grids, either analytic or tabulated.

use crate::jet::{Expr, Jet2};

use super::ClassifyError;

/// Smallest grid edge accepted for tabulated data; the five-point stencils
/// need room and diagnostics skip two boundary layers.
pub const MIN_TABULATED_NODES: usize = 7;

/// Uniform grid with both endpoints included: node `(i, j)` sits at
/// `(u_at(i), v_at(j))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    pub nu: usize,
    pub nv: usize,
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
}

impl SampleGrid {
    pub fn new(nu: usize, nv: usize, u_range: (f64, f64), v_range: (f64, f64)) -> Result<Self, ClassifyError> {
        if nu < 2 || nv < 2 {
            return Err(ClassifyError::InvalidGrid(format!("{nu}×{nv} grid; need at least 2×2")));
        }
        let ok = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a < b;
        if !ok(u_range) || !ok(v_range) {
            return Err(ClassifyError::InvalidGrid(format!("ranges {u_range:?} × {v_range:?}")));
        }
        Ok(Self { nu, nv, u_range, v_range })
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    pub fn du(&self) -> f64 {
        (self.u_range.1 - self.u_range.0) / (self.nu - 1) as f64
    }

    pub fn dv(&self) -> f64 {
        (self.v_range.1 - self.v_range.0) / (self.nv - 1) as f64
    }

    pub fn u_at(&self, i: usize) -> f64 {
        if i + 1 == self.nu {
            self.u_range.1
        } else {
            self.u_range.0 + self.du() * i as f64
        }
    }

    pub fn v_at(&self, j: usize) -> f64 {
        if j + 1 == self.nv {
            self.v_range.1
        } else {
            self.v_range.0 + self.dv() * j as f64
        }
    }
}

#[derive(Debug, Clone)]
pub enum HeightField {
    /// Derivatives come from jets at the nodes.
    Analytic { f: Expr, grid: SampleGrid },
    /// Row-major values (`u` outer); derivatives by finite differences.
    Tabulated { grid: SampleGrid, values: Vec<f64> },
}

impl HeightField {
    pub fn analytic(f: Expr, grid: SampleGrid) -> Self {
        HeightField::Analytic { f, grid }
    }

    pub fn tabulated(grid: SampleGrid, values: Vec<f64>) -> Result<Self, ClassifyError> {
        if values.len() != grid.len() {
            return Err(ClassifyError::SizeMismatch { expected: grid.len(), got: values.len() });
        }
        if grid.nu < MIN_TABULATED_NODES || grid.nv < MIN_TABULATED_NODES {
            return Err(ClassifyError::InvalidGrid(format!(
                "tabulated fields need at least {MIN_TABULATED_NODES} nodes per direction, got {}×{}",
                grid.nu, grid.nv
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(ClassifyError::NonFinite { i: k / grid.nv, j: k % grid.nv });
        }
        Ok(HeightField::Tabulated { grid, values })
    }

    /// Tabulates `f` on `grid`.
    pub fn sample(f: &Expr, grid: SampleGrid) -> Result<Self, ClassifyError> {
        let field = HeightField::analytic(f.clone(), grid);
        let values = field.values()?;
        HeightField::tabulated(grid, values)
    }

    pub fn grid(&self) -> &SampleGrid {
        match self {
            HeightField::Analytic { grid, .. } | HeightField::Tabulated { grid, .. } => grid,
        }
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self, HeightField::Tabulated { .. })
    }

    /// Default tolerance for the classifier: tight for jets, loose enough
    /// for finite-difference error on tabulated input.
    pub fn default_tol(&self) -> f64 {
        if self.is_tabulated() {
            1e-3
        } else {
            1e-6
        }
    }

    /// Boundary layers excluded from derivative-based diagnostics.
    pub(crate) fn margin(&self) -> usize {
        if self.is_tabulated() {
            2
        } else {
            0
        }
    }

    pub fn values(&self) -> Result<Vec<f64>, ClassifyError> {
        match self {
            HeightField::Tabulated { values, .. } => Ok(values.clone()),
            HeightField::Analytic { f, grid } => {
                let mut out = Vec::with_capacity(grid.len());
                for i in 0..grid.nu {
                    for j in 0..grid.nv {
                        let v = f.eval((grid.u_at(i), grid.v_at(j)))?;
                        if !v.is_finite() {
                            return Err(ClassifyError::NonFinite { i, j });
                        }
                        out.push(v);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Value and first and second partials at every node, row-major.
    pub fn node_jets(&self) -> Result<Vec<Jet2>, ClassifyError> {
        match self {
            HeightField::Analytic { f, grid } => {
                let mut out = Vec::with_capacity(grid.len());
                for i in 0..grid.nu {
                    for j in 0..grid.nv {
                        out.push(f.eval_jet2((grid.u_at(i), grid.v_at(j)))?);
                    }
                }
                Ok(out)
            }
            HeightField::Tabulated { grid, values } => Ok(tabulated_jets(grid, values)),
        }
    }
}

/// First derivative of a uniformly sampled sequence: fourth-order central
/// differences inside, second-order central next to the ends and
/// second-order one-sided at the ends.
pub(crate) fn diff1(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|i| {
            if i >= 2 && i + 2 < n {
                (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h)
            } else if i >= 1 && i + 1 < n {
                (f[i + 1] - f[i - 1]) / (2.0 * h)
            } else if i == 0 {
                (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
            } else {
                (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h)
            }
        })
        .collect()
}

pub(crate) fn diff2(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let h2 = h * h;
    (0..n)
        .map(|i| {
            if i >= 2 && i + 2 < n {
                (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / (12.0 * h2)
            } else if i >= 1 && i + 1 < n {
                (f[i - 1] - 2.0 * f[i] + f[i + 1]) / h2
            } else if i == 0 {
                (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2
            } else {
                (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2
            }
        })
        .collect()
}

fn tabulated_jets(g: &SampleGrid, values: &[f64]) -> Vec<Jet2> {
    let (nu, nv) = (g.nu, g.nv);
    let (hu, hv) = (g.du(), g.dv());
    let mut fv = vec![0.0; nu * nv];
    let mut fvv = vec![0.0; nu * nv];
    for i in 0..nu {
        let row = &values[i * nv..(i + 1) * nv];
        fv[i * nv..(i + 1) * nv].copy_from_slice(&diff1(row, hv));
        fvv[i * nv..(i + 1) * nv].copy_from_slice(&diff2(row, hv));
    }
    let mut fu = vec![0.0; nu * nv];
    let mut fuu = vec![0.0; nu * nv];
    let mut fuv = vec![0.0; nu * nv];
    let mut col = vec![0.0; nu];
    for j in 0..nv {
        for i in 0..nu {
            col[i] = values[i * nv + j];
        }
        let (d1, d2) = (diff1(&col, hu), diff2(&col, hu));
        for i in 0..nu {
            col[i] = fv[i * nv + j];
        }
        let dm = diff1(&col, hu);
        for i in 0..nu {
            let k = i * nv + j;
            fu[k] = d1[i];
            fuu[k] = d2[i];
            fuv[k] = dm[i];
        }
    }
    (0..nu * nv).map(|k| Jet2::new(values[k], fu[k], fv[k], fuu[k], fuv[k], fvv[k])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_are_exact_on_low_degree_polynomials() {
        let h = 0.1;
        let f: Vec<f64> = (0..9).map(|i| (i as f64 * h).powi(2) * 3.0 - i as f64 * h).collect();
        for (i, d) in diff1(&f, h).iter().enumerate() {
            assert!((d - (6.0 * i as f64 * h - 1.0)).abs() < 1e-12, "{i}: {d}");
        }
        for d in diff2(&f, h) {
            assert!((d - 6.0).abs() < 1e-10);
        }
        // the interior first-derivative stencil is exact through degree 4
        let q: Vec<f64> = (0..9).map(|i| (i as f64 * h).powi(4)).collect();
        let d = diff1(&q, h);
        assert!((d[4] - 4.0 * 0.4f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn tabulated_jets_match_analytic_jets() {
        let f = Expr::u().powi(2) * Expr::v().sin() + Expr::v();
        let grid = SampleGrid::new(21, 33, (0.5, 1.5), (0.0, 2.0)).unwrap();
        let tab = HeightField::sample(&f, grid).unwrap().node_jets().unwrap();
        let ana = HeightField::analytic(f, grid).node_jets().unwrap();
        for i in 2..grid.nu - 2 {
            for j in 2..grid.nv - 2 {
                let k = grid.index(i, j);
                assert!(tab[k].max_abs_diff(&ana[k]) < 1e-4, "{i},{j}");
            }
        }
    }

    #[test]
    fn tabulated_validation() {
        let grid = SampleGrid::new(7, 7, (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert!(matches!(HeightField::tabulated(grid, vec![0.0; 48]), Err(ClassifyError::SizeMismatch { .. })));
        let mut v = vec![0.0; 49];
        v[10] = f64::NAN;
        assert_eq!(HeightField::tabulated(grid, v).unwrap_err(), ClassifyError::NonFinite { i: 1, j: 3 });
        let small = SampleGrid::new(5, 9, (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert!(HeightField::tabulated(small, vec![0.0; 45]).is_err());
        assert!(SampleGrid::new(4, 4, (1.0, 1.0), (0.0, 1.0)).is_err());
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = SampleGrid::new(64, 10, (0.2, 2.0), (0.0, 3.0)).unwrap();
        assert_eq!(g.u_at(0), 0.2);
        assert_eq!(g.u_at(63), 2.0);
        assert_eq!(g.v_at(9), 3.0);
    }
}

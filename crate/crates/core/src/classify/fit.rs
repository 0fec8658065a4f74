//! Direct least-squares fits of height values against the model families.

use nalgebra::{DMatrix, DVector};

use super::field::SampleGrid;
use super::{ChartKind, ClassifyError};

/// `F ≈ a v + A(u)`, with `A` one value per row.
#[derive(Debug, Clone, PartialEq)]
pub struct HelicoidFit {
    pub a: f64,
    pub profile: Vec<f64>,
    pub rms: f64,
}

pub fn fit_helicoid(grid: &SampleGrid, values: &[f64]) -> HelicoidFit {
    let (nu, nv) = (grid.nu, grid.nv);
    let vs: Vec<f64> = (0..nv).map(|j| grid.v_at(j)).collect();
    let vbar = vs.iter().sum::<f64>() / nv as f64;
    let svv: f64 = vs.iter().map(|v| (v - vbar).powi(2)).sum();
    let row_mean = |i: usize| values[i * nv..(i + 1) * nv].iter().sum::<f64>() / nv as f64;
    let means: Vec<f64> = (0..nu).map(row_mean).collect();
    let mut svf = 0.0;
    for i in 0..nu {
        for j in 0..nv {
            svf += (vs[j] - vbar) * (values[grid.index(i, j)] - means[i]);
        }
    }
    let a = svf / (nu as f64 * svv);
    let profile: Vec<f64> = means.iter().map(|m| m - a * vbar).collect();
    let mut ss = 0.0;
    for i in 0..nu {
        for j in 0..nv {
            ss += (values[grid.index(i, j)] - a * vs[j] - profile[i]).powi(2);
        }
    }
    HelicoidFit { a, profile, rms: (ss / grid.len() as f64).sqrt() }
}

/// `F ≈ A w cos(e v) + B w sin(e v) + C` with `w = u^e` (polar) or
/// `w = e^{e u}` (Cartesian).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeFit {
    pub exponent: f64,
    pub a: f64,
    pub b: f64,
    pub offset: f64,
    pub rms: f64,
    pub iterations: usize,
}

impl ModeFit {
    /// `c ≥ 0` and phase `l` in `F = c w cos(e v + l) + C`.
    pub fn amplitude_phase(&self) -> (f64, f64) {
        (self.a.hypot(self.b), (-self.b).atan2(self.a))
    }
}

const MAX_ITERATIONS: usize = 100;

struct Basis {
    g: Vec<f64>,
    h: Vec<f64>,
    gm: Vec<f64>,
    hm: Vec<f64>,
}

fn basis(grid: &SampleGrid, chart: ChartKind, e: f64) -> Basis {
    let n = grid.len();
    let mut out = Basis { g: Vec::with_capacity(n), h: Vec::with_capacity(n), gm: Vec::with_capacity(n), hm: Vec::with_capacity(n) };
    for i in 0..grid.nu {
        let u = grid.u_at(i);
        let lw = match chart {
            ChartKind::Polar => u.ln(),
            ChartKind::Cartesian => u,
        };
        let w = (e * lw).exp();
        for j in 0..grid.nv {
            let v = grid.v_at(j);
            let (s, c) = (e * v).sin_cos();
            out.g.push(w * c);
            out.h.push(w * s);
            out.gm.push(w * (lw * c - v * s));
            out.hm.push(w * (lw * s + v * c));
        }
    }
    out
}

fn lstsq(cols: &[&[f64]], rhs: &[f64]) -> Result<DVector<f64>, ClassifyError> {
    let a = DMatrix::from_fn(rhs.len(), cols.len(), |r, c| cols[c][r]);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax > 0.0) || svd.singular_values.min() <= 1e-13 * smax {
        return Err(ClassifyError::SingularFit);
    }
    svd.solve(&DVector::from_column_slice(rhs), 0.0).map_err(|_| ClassifyError::SingularFit)
}

fn linear_part(grid: &SampleGrid, chart: ChartKind, values: &[f64], e: f64) -> Result<(Basis, [f64; 3], f64), ClassifyError> {
    let bs = basis(grid, chart, e);
    let ones = vec![1.0; values.len()];
    let x = lstsq(&[&bs.g, &bs.h, &ones], values)?;
    let coef = [x[0], x[1], x[2]];
    let ss: f64 = (0..values.len())
        .map(|k| (values[k] - coef[0] * bs.g[k] - coef[1] * bs.h[k] - coef[2]).powi(2))
        .sum();
    Ok((bs, coef, ss))
}

/// Gauss–Newton on `(A, B, C, e)` from the starting exponent `e0`, with
/// the linear coefficients initialised by least squares at `e0`.
pub fn fit_mode(grid: &SampleGrid, chart: ChartKind, values: &[f64], e0: f64) -> Result<ModeFit, ClassifyError> {
    let n = values.len();
    let ones = vec![1.0; n];
    let mut e = e0;
    let (mut bs, mut coef, mut ss) = linear_part(grid, chart, values, e)?;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let resid: Vec<f64> =
            (0..n).map(|k| values[k] - coef[0] * bs.g[k] - coef[1] * bs.h[k] - coef[2]).collect();
        let dm: Vec<f64> = (0..n).map(|k| coef[0] * bs.gm[k] + coef[1] * bs.hm[k]).collect();
        let step = lstsq(&[&bs.g, &bs.h, &ones, &dm], &resid)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-6 {
            let e_try = e + lambda * step[3];
            let (bs_try, coef_try, ss_try) = linear_part(grid, chart, values, e_try)?;
            if ss_try <= ss {
                e = e_try;
                bs = bs_try;
                coef = coef_try;
                ss = ss_try;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted || (lambda * step[3]).abs() <= 1e-15 * (1.0 + e.abs()) {
            break;
        }
    }
    Ok(ModeFit { exponent: e, a: coef[0], b: coef[1], offset: coef[2], rms: (ss / n as f64).sqrt(), iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn sample(grid: &SampleGrid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..grid.nu {
            for j in 0..grid.nv {
                out.push(f(grid.u_at(i), grid.v_at(j)));
            }
        }
        out
    }

    #[test]
    fn helicoid_fit_recovers_pitch_and_profile() {
        let g = SampleGrid::new(20, 30, (0.2, 2.0), (0.0, TAU)).unwrap();
        let vals = sample(&g, |r, t| 2.0 * t + r.ln());
        let fit = fit_helicoid(&g, &vals);
        assert!((fit.a - 2.0).abs() < 1e-12);
        for i in 0..g.nu {
            assert!((fit.profile[i] - g.u_at(i).ln()).abs() < 1e-12);
        }
        assert!(fit.rms < 1e-12);
    }

    #[test]
    fn mode_fit_converges_from_a_nearby_exponent() {
        let g = SampleGrid::new(24, 24, (0.2, 2.0), (0.0, TAU)).unwrap();
        let vals = sample(&g, |r, t| 1.5 * r.powf(2.5) * (2.5 * t + 0.3).cos() - 0.7);
        let fit = fit_mode(&g, ChartKind::Polar, &vals, 2.45).unwrap();
        assert!((fit.exponent - 2.5).abs() < 1e-10, "{fit:?}");
        let (c, l) = fit.amplitude_phase();
        assert!((c - 1.5).abs() < 1e-10 && (l - 0.3).abs() < 1e-10);
        assert!((fit.offset + 0.7).abs() < 1e-10);
        assert!(fit.rms < 1e-10);
    }

    #[test]
    fn cartesian_mode_fit() {
        let g = SampleGrid::new(16, 16, (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let vals = sample(&g, |x, y| 0.5 * (2.0 * x).exp() * (2.0 * y).cos());
        let fit = fit_mode(&g, ChartKind::Cartesian, &vals, 1.9).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-10);
        assert!((fit.amplitude_phase().0 - 0.5).abs() < 1e-10);
    }

    #[test]
    fn degenerate_exponent_is_singular() {
        let g = SampleGrid::new(8, 8, (0.2, 2.0), (0.0, 1.0)).unwrap();
        let vals = vec![1.0; g.len()];
        assert_eq!(fit_mode(&g, ChartKind::Polar, &vals, 0.0), Err(ClassifyError::SingularFit));
    }
}

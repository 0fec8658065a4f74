//! Sampling the Gaussian curvature on a parameter grid, extracting its level
//! sets with marching squares, and projecting them orthogonally onto a
//! coordinate plane.

use std::collections::HashMap;

use thiserror::Error;

use crate::surface::{SurfaceError, SurfacePatch};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContourError {
    #[error("grid needs at least 2 nodes per direction, got {nu}x{nv}")]
    GridTooSmall { nu: usize, nv: usize },
    #[error("grid has {got} values, expected {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("no node of the grid has a well-defined value")]
    EmptyValidRegion,
    #[error("invalid grid range {0:?}")]
    BadRange((f64, f64)),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Scalar samples on a uniform `nu × nv` node grid, row-major with the first
/// parameter as the row index (`index = i * nv + j`).
///
/// When `periodic_v` is set the second direction is half-open:
/// `v_j = v_min + j · span / nv`, and cells wrap from column `nv − 1` back to
/// column `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    nu: usize,
    nv: usize,
    u_range: (f64, f64),
    v_range: (f64, f64),
    periodic_v: bool,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl ScalarGrid {
    pub fn new(
        nu: usize,
        nv: usize,
        u_range: (f64, f64),
        v_range: (f64, f64),
        periodic_v: bool,
        values: Vec<f64>,
        mask: Vec<bool>,
    ) -> Result<Self, ContourError> {
        if nu < 2 || nv < 2 {
            return Err(ContourError::GridTooSmall { nu, nv });
        }
        for r in [u_range, v_range] {
            if !(r.0.is_finite() && r.1.is_finite() && r.0 < r.1) {
                return Err(ContourError::BadRange(r));
            }
        }
        for len in [values.len(), mask.len()] {
            if len != nu * nv {
                return Err(ContourError::SizeMismatch { expected: nu * nv, got: len });
            }
        }
        let mask: Vec<bool> = mask.iter().zip(&values).map(|(m, v)| *m && v.is_finite()).collect();
        if !mask.iter().any(|m| *m) {
            return Err(ContourError::EmptyValidRegion);
        }
        Ok(Self { nu, nv, u_range, v_range, periodic_v, values, mask })
    }

    /// A fully valid grid.
    pub fn from_values(
        nu: usize,
        nv: usize,
        u_range: (f64, f64),
        v_range: (f64, f64),
        values: Vec<f64>,
    ) -> Result<Self, ContourError> {
        let mask = vec![true; values.len()];
        Self::new(nu, nv, u_range, v_range, false, values, mask)
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.u_range
    }

    pub fn v_range(&self) -> (f64, f64) {
        self.v_range
    }

    pub fn periodic_v(&self) -> bool {
        self.periodic_v
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    pub fn u_at(&self, i: usize) -> f64 {
        let (a, b) = self.u_range;
        if i == self.nu - 1 {
            return b;
        }
        a + (b - a) * i as f64 / (self.nu - 1) as f64
    }

    /// Second coordinate of column `j`; for periodic grids `j = nv` is the
    /// seam at `v_max`.
    pub fn v_at(&self, j: usize) -> f64 {
        let (a, b) = self.v_range;
        let cells = if self.periodic_v { self.nv } else { self.nv - 1 };
        if j == cells {
            return b;
        }
        a + (b - a) * j as f64 / cells as f64
    }

    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        let k = self.index(i, j);
        self.mask[k].then_some(self.values[k])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn valid_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().zip(&self.mask).filter(|(_, m)| **m).map(|(v, _)| *v)
    }

    /// `(min, max)` over valid nodes.
    pub fn range(&self) -> (f64, f64) {
        self.valid_values()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

/// Evaluates `K` on an `nu × nv` grid over the patch domain. Nodes where the
/// metric degenerates or a primitive leaves its domain are masked.
pub fn sample_k_grid(s: &SurfacePatch, nu: usize, nv: usize) -> Result<ScalarGrid, ContourError> {
    sample_grid(s, nu, nv, |ff| ff.k)
}

/// Grid sampling of any pointwise quantity derived from the fundamental forms.
pub fn sample_grid(
    s: &SurfacePatch,
    nu: usize,
    nv: usize,
    quantity: impl Fn(&crate::surface::FundForms) -> f64,
) -> Result<ScalarGrid, ContourError> {
    if nu < 2 || nv < 2 {
        return Err(ContourError::GridTooSmall { nu, nv });
    }
    let d = s.domain();
    let shape = ScalarGrid {
        nu,
        nv,
        u_range: (d.u_min, d.u_max),
        v_range: (d.v_min, d.v_max),
        periodic_v: s.periodic_v(),
        values: Vec::new(),
        mask: Vec::new(),
    };
    let mut values = Vec::with_capacity(nu * nv);
    let mut mask = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            match s.fundamental_forms((shape.u_at(i), shape.v_at(j))) {
                Ok(ff) => {
                    values.push(quantity(&ff));
                    mask.push(true);
                }
                Err(SurfaceError::DegenerateMetric { .. } | SurfaceError::Jet(_)) => {
                    values.push(f64::NAN);
                    mask.push(false);
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    ScalarGrid::new(nu, nv, shape.u_range, shape.v_range, shape.periodic_v, values, mask)
}

/// `count` levels at the interior quantiles `i / (count + 1)` of the valid
/// samples. A level that lands on a sampled value (within `1e-9` of the
/// range) is moved to the midpoint of the neighbouring distinct samples so
/// that no contour runs along grid nodes.
pub fn quantile_levels(g: &ScalarGrid, count: usize) -> Vec<f64> {
    let mut vals: Vec<f64> = g.valid_values().collect();
    vals.sort_by(f64::total_cmp);
    let n = vals.len();
    if n < 2 || vals[n - 1] <= vals[0] {
        return Vec::new();
    }
    let (lo, hi) = (vals[0], vals[n - 1]);
    let eps = 1e-9 * (hi - lo);
    let mut levels = Vec::with_capacity(count);
    for i in 1..=count {
        let pos = i as f64 / (count + 1) as f64 * (n - 1) as f64;
        let k = pos.floor() as usize;
        let t = pos - k as f64;
        let mut q = if k + 1 < n { vals[k] * (1.0 - t) + vals[k + 1] * t } else { vals[k] };
        let below = vals.partition_point(|v| *v < q - eps);
        let above = vals.partition_point(|v| *v <= q + eps);
        if below < above && below > 0 && above < n {
            q = 0.5 * (vals[below - 1] + vals[above]);
        }
        if q > lo && q < hi {
            levels.push(q);
        }
    }
    levels
}

/// A polyline in parameter space and, once projected, in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub vertices: Vec<[f64; 2]>,
    pub projected: Vec<[f64; 2]>,
    /// The last vertex connects back to the first (not repeated).
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourLevel {
    pub level: f64,
    pub chains: Vec<Chain>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContourSet {
    pub levels: Vec<ContourLevel>,
}

impl ContourSet {
    /// Builds a set directly from projected chains.
    pub fn from_projected(levels: Vec<(f64, Vec<Vec<[f64; 2]>>)>) -> Self {
        ContourSet {
            levels: levels
                .into_iter()
                .map(|(level, chains)| ContourLevel {
                    level,
                    chains: chains
                        .into_iter()
                        .map(|pts| Chain { vertices: pts.clone(), projected: pts, closed: false })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn chain_count(&self) -> usize {
        self.levels.iter().map(|l| l.chains.len()).sum()
    }

    pub fn chains(&self) -> impl Iterator<Item = (f64, &Chain)> {
        self.levels.iter().flat_map(|l| l.chains.iter().map(move |c| (l.level, c)))
    }
}

type EdgeKey = (usize, usize);

fn edge_key(a: usize, b: usize) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

// Segments per corner configuration. Corners: a=(i,j) bit 0, b=(i+1,j) bit 1,
// c=(i+1,j+1) bit 2, d=(i,j+1) bit 3. Edges: 0=ab, 1=bc, 2=dc, 3=ad.
fn cell_segments(case: u8, center_above: bool) -> &'static [(u8, u8)] {
    match case {
        0 | 15 => &[],
        1 | 14 => &[(3, 0)],
        2 | 13 => &[(0, 1)],
        3 | 12 => &[(3, 1)],
        4 | 11 => &[(1, 2)],
        6 | 9 => &[(0, 2)],
        7 | 8 => &[(3, 2)],
        // saddles: the centre decides which diagonal pair stays connected
        5 if center_above => &[(0, 1), (2, 3)],
        5 => &[(3, 0), (1, 2)],
        10 if center_above => &[(3, 0), (1, 2)],
        10 => &[(0, 1), (2, 3)],
        _ => unreachable!(),
    }
}

/// Marching-squares level sets of `g` at each requested level, with linear
/// interpolation along cell edges. Chains are emitted in scan order: open
/// chains first (from their first endpoint met in scan order), then closed
/// loops. A level outside the sampled range yields no chains.
pub fn extract_contours(g: &ScalarGrid, levels: &[f64]) -> ContourSet {
    ContourSet { levels: levels.iter().map(|&l| extract_level(g, l)).collect() }
}

fn extract_level(g: &ScalarGrid, level: f64) -> ContourLevel {
    let cols = if g.periodic_v { g.nv } else { g.nv - 1 };
    let mut points: HashMap<EdgeKey, [f64; 2]> = HashMap::new();
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();

    for i in 0..g.nu - 1 {
        for jc in 0..cols {
            let j1 = (jc + 1) % g.nv;
            let corners = [(i, jc), (i + 1, jc), (i + 1, j1), (i, j1)];
            let mut vals = [0.0; 4];
            let mut ok = true;
            for (slot, &(ci, cj)) in vals.iter_mut().zip(&corners) {
                match g.value(ci, cj) {
                    Some(v) => *slot = v,
                    None => ok = false,
                }
            }
            if !ok {
                continue;
            }
            let case = vals
                .iter()
                .enumerate()
                .fold(0u8, |acc, (b, v)| if *v > level { acc | (1 << b) } else { acc });
            let center_above = vals.iter().sum::<f64>() / 4.0 > level;
            let segs = cell_segments(case, center_above);
            if segs.is_empty() {
                continue;
            }
            // parameter coordinates of the corners, with the seam column at v_max
            let coords = [
                [g.u_at(i), g.v_at(jc)],
                [g.u_at(i + 1), g.v_at(jc)],
                [g.u_at(i + 1), g.v_at(jc + 1)],
                [g.u_at(i), g.v_at(jc + 1)],
            ];
            let edge_nodes = [(0usize, 1usize), (1, 2), (3, 2), (0, 3)];
            let mut crossing = |e: u8| -> EdgeKey {
                let (p, q) = edge_nodes[e as usize];
                let (ip, jp) = corners[p];
                let (iq, jq) = corners[q];
                let key = edge_key(g.index(ip, jp), g.index(iq, jq));
                points.entry(key).or_insert_with(|| {
                    let t = (level - vals[p]) / (vals[q] - vals[p]);
                    let (a, b) = (coords[p], coords[q]);
                    let mut pt = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                    // a crossing on the seam column is stored at v_min
                    if g.periodic_v && jp == 0 && jq == 0 {
                        pt[1] = g.v_range.0;
                    }
                    pt
                });
                key
            };
            for &(e0, e1) in segs {
                let k0 = crossing(e0);
                let k1 = crossing(e1);
                segments.push((k0, k1));
            }
        }
    }

    let mut incident: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        incident.entry(*a).or_default().push(s);
        incident.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();

    let walk = |start: EdgeKey, first: usize, used: &mut Vec<bool>| -> Vec<EdgeKey> {
        let mut keys = vec![start];
        let mut at = start;
        let mut seg = first;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            keys.push(next);
            at = next;
            match incident[&at].iter().find(|s| !used[**s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        keys
    };

    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        let (a, b) = segments[s];
        let start = if incident[&a].len() == 1 {
            a
        } else if incident[&b].len() == 1 {
            b
        } else {
            continue;
        };
        let keys = walk(start, s, &mut used);
        chains.push(Chain { vertices: keys.iter().map(|k| points[k]).collect(), projected: Vec::new(), closed: false });
    }
    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        let mut keys = walk(segments[s].0, s, &mut used);
        if keys.len() > 1 && keys.first() == keys.last() {
            keys.pop();
        }
        let closed = keys.len() > 2;
        chains.push(Chain { vertices: keys.iter().map(|k| points[k]).collect(), projected: Vec::new(), closed });
    }
    chains.retain(|c| c.vertices.len() >= 2);
    ContourLevel { level, chains }
}

/// The plane a contour set is projected onto; the named coordinate is the
/// one kept first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferencePlane {
    /// Drops the third coordinate; base plane of both graph charts.
    Xy,
    Xz,
    Yz,
}

/// Maps every vertex through the chart and drops the coordinate normal to
/// `plane`.
pub fn project_contours(
    s: &SurfacePatch,
    cs: &ContourSet,
    plane: ReferencePlane,
) -> Result<ContourSet, ContourError> {
    let mut out = cs.clone();
    for lvl in &mut out.levels {
        for ch in &mut lvl.chains {
            ch.projected = ch
                .vertices
                .iter()
                .map(|p| {
                    let x = s.position((p[0], p[1]))?;
                    Ok(match plane {
                        ReferencePlane::Xy => [x.x, x.y],
                        ReferencePlane::Xz => [x.x, x.z],
                        ReferencePlane::Yz => [x.y, x.z],
                    })
                })
                .collect::<Result<_, SurfaceError>>()?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{p_family_patch, plane_patch, x_family_patch, PFamilyParams, PlaneChart, XFamilyParams};
    use crate::jet::{Expr, Rect};
    use std::f64::consts::{FRAC_PI_2, TAU};

    #[test]
    fn x21_grid_value_range() {
        let s = x_family_patch(&XFamilyParams::new(2.0, 1.0).unwrap()).unwrap();
        let g = sample_k_grid(&s, 64, 64).unwrap();
        let (lo, hi) = g.range();
        assert!(lo > -4.0 && hi < 0.0);
        // extremes sit on the first and last r rows
        assert!((lo - (-4.0 / 1.16f64.powi(2))).abs() < 1e-12);
        assert!((hi - (-4.0 / 289.0)).abs() < 1e-12);
    }

    #[test]
    fn plane_samples_to_zero() {
        let s = plane_patch(PlaneChart::Cartesian, Rect::new(-1.0, 1.0, -1.0, 1.0)).unwrap();
        let g = sample_k_grid(&s, 8, 8).unwrap();
        assert!(g.valid_values().all(|v| v == 0.0));
        let cs = extract_contours(&g, &[0.1, -0.1]);
        assert_eq!(cs.chain_count(), 0);
    }

    #[test]
    fn p11_grid_columns_are_constant_in_y() {
        let s = p_family_patch(&PFamilyParams::new(1.0, 1.0).unwrap()).unwrap();
        let g = sample_k_grid(&s, 33, 17).unwrap();
        for i in 0..g.nu() {
            let v0 = g.value(i, 0).unwrap();
            for j in 0..g.nv() {
                assert!((g.value(i, j).unwrap() - v0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn x21_unit_circle_contour() {
        let s = x_family_patch(&XFamilyParams::new(2.0, 1.0).unwrap()).unwrap();
        // 60 rows keep r = 1 off the grid nodes
        let g = sample_k_grid(&s, 60, 64).unwrap();
        assert!(g.periodic_v());
        let cs = extract_contours(&g, &[-0.16]);
        assert_eq!(cs.levels[0].chains.len(), 1);
        let ch = &cs.levels[0].chains[0];
        assert!(ch.closed);
        assert_eq!(ch.vertices.len(), 64);
        assert!(ch.vertices.iter().all(|p| (p[0] - 1.0).abs() < 2e-3));
        let pc = project_contours(&s, &cs, ReferencePlane::Xy).unwrap();
        let pch = &pc.levels[0].chains[0];
        assert_eq!(pch.projected.len(), pch.vertices.len());
    }

    #[test]
    fn p11_peak_level_gives_lines_near_zero() {
        // the peak -1/4 itself is the grid extreme; a level just inside it
        // yields the pair x = ±acosh(1/(2√0.2499)) ≈ ±0.02
        let s = p_family_patch(&PFamilyParams::new(1.0, 1.0).unwrap()).unwrap();
        let g = sample_k_grid(&s, 64, 64).unwrap();
        let cs = extract_contours(&g, &[-0.2499]);
        let chains = &cs.levels[0].chains;
        assert_eq!(chains.len(), 2);
        for ch in chains {
            assert!(!ch.closed);
            assert!(ch.vertices.iter().all(|p| p[0].abs() < 0.03));
            let ys: Vec<f64> = ch.vertices.iter().map(|p| p[1]).collect();
            let span = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - ys.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!((span - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_of_chart_vertices() {
        let s = plane_patch(PlaneChart::Polar, Rect::new(0.5, 2.0, 0.0, TAU)).unwrap();
        let cs = ContourSet {
            levels: vec![ContourLevel {
                level: 0.0,
                chains: vec![Chain { vertices: vec![[1.0, FRAC_PI_2], [2.0, 0.0]], projected: vec![], closed: false }],
            }],
        };
        let p = project_contours(&s, &cs, ReferencePlane::Xy).unwrap();
        let q = &p.levels[0].chains[0].projected;
        assert!(q[0][0].abs() < 1e-15 && (q[0][1] - 1.0).abs() < 1e-15);
        let c = crate::surface::SurfacePatch::cartesian(Expr::u() * Expr::v(), Rect::new(-3.0, 3.0, -3.0, 3.0)).unwrap();
        let cs2 = ContourSet::from_projected(vec![(0.0, vec![vec![[0.5, -1.5], [2.0, 1.0]]])]);
        let p2 = project_contours(&c, &cs2, ReferencePlane::Xy).unwrap();
        assert_eq!(p2.levels[0].chains[0].projected, vec![[0.5, -1.5], [2.0, 1.0]]);
    }

    #[test]
    fn saddle_cells_follow_the_cell_average() {
        // a single cell with high corners on one diagonal
        let g = ScalarGrid::from_values(2, 2, (0.0, 1.0), (0.0, 1.0), vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        // average 0.5: a level below it keeps the high diagonal connected
        let low = extract_contours(&g, &[0.4]);
        let high = extract_contours(&g, &[0.6]);
        assert_eq!(low.levels[0].chains.len(), 2);
        assert_eq!(high.levels[0].chains.len(), 2);
        let corner_cut = |cs: &ContourSet| -> Vec<Vec<[f64; 2]>> {
            cs.levels[0].chains.iter().map(|c| c.vertices.clone()).collect()
        };
        assert_ne!(corner_cut(&low), corner_cut(&high));
        // low level: the isolated low corners (1,0) and (0,1) are cut off
        for ch in &low.levels[0].chains {
            let mid = [(ch.vertices[0][0] + ch.vertices[1][0]) / 2.0, (ch.vertices[0][1] + ch.vertices[1][1]) / 2.0];
            let d_low = ((mid[0] - 1.0).powi(2) + mid[1].powi(2)).min(mid[0].powi(2) + (mid[1] - 1.0).powi(2));
            assert!(d_low < 0.5);
        }
    }

    #[test]
    fn masked_nodes_are_never_crossed() {
        let mut vals: Vec<f64> = (0..25).map(|k| (k / 5) as f64).collect();
        let mut mask = vec![true; 25];
        mask[12] = false;
        vals[12] = f64::NAN;
        let g = ScalarGrid::new(5, 5, (0.0, 4.0), (0.0, 4.0), false, vals, mask).unwrap();
        let cs = extract_contours(&g, &[1.5, 2.5]);
        for (_, ch) in cs.chains() {
            for p in &ch.vertices {
                // the four cells around node (2,2) cover the open square (1,3)²
                let inside = p[0] > 1.0 && p[0] < 3.0 && p[1] > 1.0 && p[1] < 3.0;
                assert!(!inside, "{p:?}");
            }
        }
        assert!(cs.chain_count() >= 2);
    }

    #[test]
    fn quantile_levels_avoid_sample_values() {
        let s = x_family_patch(&XFamilyParams::new(3.0, 1.0).unwrap()).unwrap();
        let g = sample_k_grid(&s, 64, 64).unwrap();
        let levels = quantile_levels(&g, 5);
        assert_eq!(levels.len(), 5);
        let (lo, hi) = g.range();
        for l in levels {
            assert!(l > lo && l < hi);
            assert!(g.valid_values().all(|v| (v - l).abs() > 1e-10 * (hi - lo)));
        }
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(
            ScalarGrid::from_values(1, 3, (0.0, 1.0), (0.0, 1.0), vec![0.0; 3]),
            Err(ContourError::GridTooSmall { .. })
        ));
        assert!(matches!(
            ScalarGrid::from_values(2, 2, (0.0, 1.0), (0.0, 1.0), vec![0.0; 3]),
            Err(ContourError::SizeMismatch { .. })
        ));
        assert!(matches!(
            ScalarGrid::new(2, 2, (0.0, 1.0), (0.0, 1.0), false, vec![f64::NAN; 4], vec![true; 4]),
            Err(ContourError::EmptyValidRegion)
        ));
    }
}

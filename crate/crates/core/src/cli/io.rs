//! Height-field and contour CSV files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::classify::SampleGrid;
use crate::contour::ContourSet;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}, line {line}: {msg}")]
    Malformed { path: String, line: usize, msg: String },
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    fs::write(path, bytes).map_err(|source| IoError::Io { path: path.display().to_string(), source })
}

pub fn height_csv(grid: &SampleGrid, values: &[f64]) -> String {
    let mut out = String::from("u,v,F\n");
    for i in 0..grid.nu {
        for j in 0..grid.nv {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", grid.u_at(i), grid.v_at(j), values[grid.index(i, j)]);
        }
    }
    out
}

/// Reads a height field written row-major with `u` outer. The grid must be
/// complete and uniform in both directions.
pub fn read_height_csv(path: &Path) -> Result<(SampleGrid, Vec<f64>), IoError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| IoError::Io { path: name.clone(), source })?;
    parse_height_csv(&text).map_err(|(line, msg)| IoError::Malformed { path: name, line, msg })
}

pub fn parse_height_csv(text: &str) -> Result<(SampleGrid, Vec<f64>), (usize, String)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.split(',').map(str::trim).eq(["u", "v", "F"]) => {}
        Some((n, _)) => return Err((n + 1, "expected header u,v,F".into())),
        None => return Err((1, "empty file".into())),
    }
    let mut rows: Vec<(usize, [f64; 3])> = Vec::new();
    for (n, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err((n + 1, format!("expected 3 fields, got {}", fields.len())));
        }
        let mut row = [0.0; 3];
        for (slot, f) in row.iter_mut().zip(&fields) {
            *slot = f.parse::<f64>().map_err(|_| (n + 1, format!("not a number: {f:?}")))?;
            if !slot.is_finite() {
                return Err((n + 1, format!("non-finite value {f}")));
            }
        }
        rows.push((n + 1, row));
    }
    if rows.is_empty() {
        return Err((1, "no data rows".into()));
    }
    let u0 = rows[0].1[0];
    let nv = rows.iter().take_while(|(_, r)| r[0] == u0).count();
    if !rows.len().is_multiple_of(nv) {
        return Err((rows.last().unwrap().0, format!("{} rows do not fill a grid with {nv} columns", rows.len())));
    }
    let nu = rows.len() / nv;
    if nu < 2 || nv < 2 {
        return Err((1, format!("grid is {nu}×{nv}; need at least 2×2")));
    }
    let us: Vec<f64> = (0..nu).map(|i| rows[i * nv].1[0]).collect();
    let vs: Vec<f64> = (0..nv).map(|j| rows[j].1[1]).collect();
    for (k, (line, r)) in rows.iter().enumerate() {
        if r[0] != us[k / nv] || r[1] != vs[k % nv] {
            return Err((*line, "rows are not in row-major grid order (u outer)".into()));
        }
    }
    let uniform = |xs: &[f64]| {
        let (a, b) = (xs[0], xs[xs.len() - 1]);
        let h = (b - a) / (xs.len() - 1) as f64;
        h > 0.0 && xs.iter().enumerate().all(|(i, x)| (x - (a + h * i as f64)).abs() <= 1e-9 * (b - a))
    };
    if !uniform(&us) || !uniform(&vs) {
        return Err((rows[0].0, "grid spacing is not uniform and increasing".into()));
    }
    let grid = SampleGrid::new(nu, nv, (us[0], us[nu - 1]), (vs[0], vs[nv - 1])).map_err(|e| (1, e.to_string()))?;
    Ok((grid, rows.iter().map(|(_, r)| r[2]).collect()))
}

/// `level,chain,seq,px,py` with chains numbered per level.
pub fn contour_csv(cs: &ContourSet) -> String {
    let mut out = String::from("level,chain,seq,px,py\n");
    for lvl in &cs.levels {
        for (c, ch) in lvl.chains.iter().enumerate() {
            for (s, p) in ch.projected.iter().enumerate() {
                let _ = writeln!(out, "{:.16e},{c},{s},{:.16e},{:.16e}", lvl.level, p[0], p[1]);
            }
        }
    }
    out
}

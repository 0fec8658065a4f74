use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{classify, proof_identity_residual, ClassificationReport, HeightField, SampleGrid, Verdict};
use crate::contour::{extract_contours, project_contours, quantile_levels, sample_k_grid, ReferencePlane, ScalarGrid};
use crate::families::Family;
use crate::fitgeom::{concentricity_verdict, parallelism_verdict, ChainFit, SymmetryVerdict};
use crate::symmetry::{
    classify_symmetry_kind, equivariance_residual, estimate_rotation_constant, SampleSpec, ShiftKind, SymmetryProbe,
};

use super::config::{Check, ConfigError, Levels, PgmFormat, RunConfig, Source};
use super::io::{contour_csv, height_csv, read_height_csv, write_file};
use super::render::{contour_svg, pgm};
use super::report::Report;
use super::CliError;

/// A finished command: its report and whether every requested check held.
pub struct Outcome {
    pub report: Report,
    pub success: bool,
}

fn path(cfg: &RunConfig, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}{suffix}", cfg.out_prefix))
}

fn write(cfg: &RunConfig, report: &mut Report, key: &str, suffix: &str, bytes: &[u8]) -> Result<(), CliError> {
    let p = path(cfg, suffix);
    write_file(&p, bytes)?;
    report.push(format!("file.{key}"), p.display().to_string());
    Ok(())
}

fn header(cfg: &RunConfig) -> Report {
    let mut r = Report::new();
    r.push("tool", "kcontour");
    r.push("tool_version", env!("CARGO_PKG_VERSION"));
    for (k, v) in cfg.echo() {
        r.push(format!("input.{k}"), v);
    }
    r
}

fn family(cfg: &RunConfig) -> Result<Family, CliError> {
    Ok(cfg.family()?)
}

fn surface_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(ConfigError(e.to_string()))
}

pub fn analyze(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fam = family(cfg)?;
    let s = fam.patch().map_err(surface_err)?;
    let g = sample_k_grid(&s, cfg.nu, cfg.nv).map_err(surface_err)?;
    let mut report = header(cfg);
    let mut table = String::from("u,v,x,y,z,K,H,nx,ny,nz,delta\n");
    let (mut dk, mut dh, mut dn): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut masked = 0;
    let mut has_closed = false;
    for i in 0..g.nu() {
        for j in 0..g.nv() {
            let p = (g.u_at(i), g.v_at(j));
            let x = s.position(p).map_err(surface_err)?;
            match s.fundamental_forms(p) {
                Ok(ff) => {
                    let n = ff.normal;
                    let _ = writeln!(
                        table,
                        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                        p.0, p.1, x.x, x.y, x.z, ff.k, ff.h, n.x, n.y, n.z, ff.delta
                    );
                    if let Some(cf) = fam.closed_form(p) {
                        let (k, h, nc) = cf.map_err(surface_err)?;
                        has_closed = true;
                        dk = dk.max((ff.k - k).abs());
                        dh = dh.max((ff.h - h).abs());
                        dn = dn.max((n - nc).amax());
                    }
                }
                Err(_) => {
                    masked += 1;
                    let _ = writeln!(table, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},nan,nan,nan,nan,nan,nan", p.0, p.1, x.x, x.y, x.z);
                }
            }
        }
    }
    let (lo, hi) = g.range();
    let mut v_spread: f64 = 0.0;
    for i in 0..g.nu() {
        let row: Vec<f64> = (0..g.nv()).filter_map(|j| g.value(i, j)).collect();
        if let (Some(a), Some(b)) = (row.iter().copied().reduce(f64::min), row.iter().copied().reduce(f64::max)) {
            v_spread = v_spread.max(b - a);
        }
    }
    report.push("analyze.nodes", g.nu() * g.nv());
    report.push("analyze.masked", masked);
    report.push("analyze.k_min", lo);
    report.push("analyze.k_max", hi);
    report.push("analyze.k_v_spread", v_spread);
    if has_closed {
        report.push("closed_form.max_abs_dk", dk);
        report.push("closed_form.max_abs_dh", dh);
        report.push("closed_form.max_abs_dn", dn);
    } else {
        report.push("closed_form", "none");
    }
    write(cfg, &mut report, "table", ".analyze.csv", table.as_bytes())?;
    Ok(Outcome { report, success: true })
}

fn levels_for(cfg: &RunConfig, g: &ScalarGrid, report: &mut Report) -> Vec<f64> {
    let levels = match &cfg.levels {
        Levels::Count(n) => {
            report.push("levels.source", "quantile");
            quantile_levels(g, *n)
        }
        Levels::List(l) => {
            report.push("levels.source", "explicit");
            l.clone()
        }
    };
    report.push("levels.values", levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","));
    levels
}

fn push_fits<T>(report: &mut Report, v: &SymmetryVerdict<T>) {
    let count = |f: fn(&ChainFit<T>) -> bool| v.per_contour.iter().filter(|c| f(c)).count();
    report.push("check.holds", v.holds);
    report.push("check.spread", v.spread);
    report.push("check.tol", v.tol);
    report.push("check.common_x", v.common[0]);
    report.push("check.common_y", v.common[1]);
    report.push("check.levels_tested", v.levels_tested.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","));
    report.push("check.chains_fitted", count(|c| matches!(c, ChainFit::Fitted { .. })));
    report.push("check.chains_skipped", count(|c| matches!(c, ChainFit::Skipped { .. })));
    report.push("check.chains_failed", count(|c| matches!(c, ChainFit::Failed { .. })));
}

pub fn contours(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let s = family(cfg)?.patch().map_err(surface_err)?;
    let g = sample_k_grid(&s, cfg.nu, cfg.nv).map_err(surface_err)?;
    let mut report = header(cfg);
    let levels = levels_for(cfg, &g, &mut report);
    let cs = extract_contours(&g, &levels);
    let pc = project_contours(&s, &cs, ReferencePlane::Xy).map_err(surface_err)?;
    report.push("contours.chains", pc.chain_count());
    write(cfg, &mut report, "csv", ".contours.csv", contour_csv(&pc).as_bytes())?;
    write(cfg, &mut report, "svg", ".contours.svg", contour_svg(&pc).as_bytes())?;
    let mut success = true;
    match cfg.check {
        None => report.push("check", "none"),
        Some(check) => {
            report.push("check", if check == Check::Concentric { "concentric" } else { "parallel" });
            let result = match check {
                Check::Concentric => concentricity_verdict(&pc, cfg.tol).map(|v| {
                    push_fits(&mut report, &v);
                    v.holds
                }),
                Check::Parallel => parallelism_verdict(&pc, cfg.tol).map(|v| {
                    push_fits(&mut report, &v);
                    v.holds
                }),
            };
            match result {
                Ok(holds) => success = holds,
                Err(e) => {
                    report.push("check.holds", false);
                    report.push("check.error", e.to_string());
                    success = false;
                }
            }
        }
    }
    Ok(Outcome { report, success })
}

fn sample_grid(cfg: &RunConfig) -> Result<SampleGrid, CliError> {
    let d = cfg.domain();
    SampleGrid::new(cfg.nu, cfg.nv, (d.u_min, d.u_max), (d.v_min, d.v_max)).map_err(surface_err)
}

fn family_height(fam: &Family) -> crate::jet::Expr {
    match fam {
        Family::X(p) => p.height(),
        Family::P(p) => p.height(),
        Family::Helicoid(p) => p.height(),
        Family::Plane { .. } => crate::jet::Expr::constant(0.0),
    }
}

fn push_classification(report: &mut Report, rep: &ClassificationReport) {
    report.push("classify.chart", rep.chart.as_str());
    report.push("classify.tol", rep.tol);
    report.push("verdict", rep.verdict.name());
    match &rep.verdict {
        Verdict::Helicoidal { a, profile } => {
            report.push("verdict.a", a);
            report.push("verdict.profile_points", profile.len());
        }
        Verdict::XFamily { m, c, phase, offset } => {
            report.push("verdict.m", m);
            report.push("verdict.c", c);
            report.push("verdict.phase", phase);
            report.push("verdict.offset", offset);
        }
        Verdict::PFamily { k, c, phase, offset } => {
            report.push("verdict.k", k);
            report.push("verdict.c", c);
            report.push("verdict.phase", phase);
            report.push("verdict.offset", offset);
        }
        Verdict::Plane | Verdict::Unclassified => {}
    }
    for (k, v) in rep.residuals.entries() {
        report.push_opt(format!("residual.{k}"), v);
    }
    for (k, v) in rep.preconditions.entries() {
        report.push_opt(format!("precondition.{k}"), v);
    }
    for (i, n) in rep.notes.iter().enumerate() {
        report.push(format!("note.{i}"), n.as_str());
    }
}

pub fn classify_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let field = match &cfg.source {
        Source::File(p) => {
            let (grid, values) = read_height_csv(p)?;
            HeightField::tabulated(grid, values).map_err(surface_err)?
        }
        // the same tabulated path a generated CSV would take
        Source::Family(_) => HeightField::sample(&family_height(&family(cfg)?), sample_grid(cfg)?).map_err(surface_err)?,
    };
    let rep = classify(&field, cfg.chart, cfg.tol).map_err(surface_err)?;
    let mut report = header(cfg);
    let g = field.grid();
    report.push("grid.nu", g.nu);
    report.push("grid.nv", g.nv);
    report.push("grid.u_min", g.u_range.0);
    report.push("grid.u_max", g.u_range.1);
    report.push("grid.v_min", g.v_range.0);
    report.push("grid.v_max", g.v_range.1);
    push_classification(&mut report, &rep);
    if let Verdict::Helicoidal { profile, .. } = &rep.verdict {
        let mut csv = String::from("r,A\n");
        for (r, a) in profile {
            let _ = writeln!(csv, "{r:.16e},{a:.16e}");
        }
        write(cfg, &mut report, "profile", ".profile.csv", csv.as_bytes())?;
    }
    Ok(Outcome { report, success: true })
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fam = family(cfg)?;
    let (kind, expected) = match &fam {
        Family::X(p) => (ShiftKind::Rotational, 1.0 - p.m()),
        Family::P(p) => (ShiftKind::Translational, -p.k()),
        Family::Helicoid(_) => (ShiftKind::Rotational, 1.0),
        Family::Plane { .. } => {
            return Err(CliError::Input(ConfigError("verify needs x, p or helicoid; a plane has no rotating normal".into())))
        }
    };
    let s = fam.patch().map_err(surface_err)?;
    let spec = SampleSpec { max_shift: FRAC_PI_4.min(0.5 * s.domain().v_span()), ..SampleSpec::default() };
    let est = estimate_rotation_constant(&s, kind, &spec).map_err(surface_err)?;
    let probe = SymmetryProbe::new(kind, est.k_hat);
    let eq = equivariance_residual(&s, &probe, &spec).map_err(surface_err)?;
    let label = classify_symmetry_kind(est.k_hat, kind);
    let mut report = header(cfg);
    report.push("verify.kind", if kind == ShiftKind::Rotational { "rotational" } else { "translational" });
    report.push("verify.k_hat", est.k_hat);
    report.push("verify.k_expected", expected);
    report.push("verify.k_error", (est.k_hat - expected).abs());
    report.push("verify.regression_residual", est.max_residual);
    report.push("verify.samples_used", est.samples_used);
    report.push("verify.samples_skipped", est.samples_skipped);
    report.push("verify.equivariance_residual", eq);
    report.push("verify.label", label.as_str());
    let mut worst = (est.k_hat - expected).abs().max(est.max_residual).max(eq);
    if cfg.chart == crate::classify::ChartKind::Polar {
        let field = HeightField::analytic(family_height(&fam), sample_grid(cfg)?);
        let id = proof_identity_residual(&field).map_err(surface_err)?;
        report.push("verify.identity_residual", id);
        worst = worst.max(id);
    }
    report.push("verify.tol", cfg.tol);
    let success = worst <= cfg.tol;
    report.push("verify.passed", success);
    Ok(Outcome { report, success })
}

pub fn render(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let s = family(cfg)?.patch().map_err(surface_err)?;
    let g = sample_k_grid(&s, cfg.nu, cfg.nv).map_err(surface_err)?;
    let mut report = header(cfg);
    let (lo, hi) = g.range();
    report.push("render.k_min", lo);
    report.push("render.k_max", hi);
    report.push("render.width", g.nu());
    report.push("render.height", g.nv());
    report.push("render.masked", g.mask().iter().filter(|m| !**m).count());
    let ext = if cfg.format == PgmFormat::P5 { ".k.p5.pgm" } else { ".k.pgm" };
    write(cfg, &mut report, "pgm", ext, &pgm(&g, cfg.format))?;
    let levels = levels_for(cfg, &g, &mut report);
    let pc = project_contours(&s, &extract_contours(&g, &levels), ReferencePlane::Xy).map_err(surface_err)?;
    write(cfg, &mut report, "svg", ".contours.svg", contour_svg(&pc).as_bytes())?;
    Ok(Outcome { report, success: true })
}

pub fn generate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fam = family(cfg)?;
    let grid = sample_grid(cfg)?;
    let field = HeightField::sample(&family_height(&fam), grid).map_err(surface_err)?;
    let mut values = field.values().map_err(surface_err)?;
    let mut report = header(cfg);
    if cfg.noise > 0.0 {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let rms = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        let amp = cfg.noise * rms;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        values.iter_mut().for_each(|v| *v += amp * rng.gen_range(-1.0..=1.0));
        report.push("generate.noise_amplitude", amp);
    }
    report.push("generate.rows", values.len());
    write(cfg, &mut report, "csv", ".csv", height_csv(&grid, &values).as_bytes())?;
    Ok(Outcome { report, success: true })
}

//! Flat key-value run configuration.

use std::f64::consts::TAU;
use std::fmt;
use std::path::PathBuf;

use crate::classify::ChartKind;
use crate::families::{Family, HelicoidParams, PFamilyParams, PlaneChart, XFamilyParams};
use crate::jet::{Expr, Rect};

/// Every recognised key with a one-line description, in documentation order.
pub const KEYS: &[(&str, &str)] = &[
    ("command", "analyze | contours | classify | verify | render | generate"),
    ("family", "x | p | helicoid | plane"),
    ("input", "height-field CSV (header u,v,F) used instead of a family"),
    ("m", "x-family exponent (default 2)"),
    ("c", "x- and p-family amplitude (default 1)"),
    ("k", "p-family wave number (default 1)"),
    ("a", "helicoid pitch (default 1)"),
    ("profile", "helicoid profile A(r): zero | log | linear | quadratic (default zero)"),
    ("chart", "polar | cartesian; follows the family when omitted, polar for files"),
    ("r_min", "polar domain (default 0.2)"),
    ("r_max", "polar domain (default 2)"),
    ("theta_min", "polar domain (default 0)"),
    ("theta_max", "polar domain (default 2π)"),
    ("x_min", "cartesian domain (default -1)"),
    ("x_max", "cartesian domain (default 1)"),
    ("y_min", "cartesian domain (default -1)"),
    ("y_max", "cartesian domain (default 1)"),
    ("nu", "grid nodes along r or x (default 128)"),
    ("nv", "grid nodes along θ or y (default 128)"),
    ("levels", "number of quantile levels, or a comma-separated list of K levels (default 5)"),
    ("tol", "tolerance; defaults: contours 1e-2, verify 1e-8, classify 1e-3"),
    ("check", "contours verdict: concentric | parallel (default none)"),
    ("format", "PGM variant for render: p2 | p5 (default p2)"),
    ("noise", "generate: uniform noise amplitude relative to the field's rms (default 0)"),
    ("out_prefix", "prefix of every written file (default kcontour)"),
    ("seed", "seed for the noise generator (default 0)"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Analyze,
    Contours,
    Classify,
    Verify,
    Render,
    Generate,
}

impl CommandKind {
    pub const ALL: [CommandKind; 6] = [
        CommandKind::Analyze,
        CommandKind::Contours,
        CommandKind::Classify,
        CommandKind::Verify,
        CommandKind::Render,
        CommandKind::Generate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Analyze => "analyze",
            CommandKind::Contours => "contours",
            CommandKind::Classify => "classify",
            CommandKind::Verify => "verify",
            CommandKind::Render => "render",
            CommandKind::Generate => "generate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyName {
    X,
    P,
    Helicoid,
    Plane,
}

impl FamilyName {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "x" => FamilyName::X,
            "p" => FamilyName::P,
            "helicoid" => FamilyName::Helicoid,
            "plane" => FamilyName::Plane,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyName::X => "x",
            FamilyName::P => "p",
            FamilyName::Helicoid => "helicoid",
            FamilyName::Plane => "plane",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Family(FamilyName),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Zero,
    Log,
    Linear,
    Quadratic,
}

impl Profile {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "zero" => Profile::Zero,
            "log" => Profile::Log,
            "linear" => Profile::Linear,
            "quadratic" => Profile::Quadratic,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Profile::Zero => "zero",
            Profile::Log => "log",
            Profile::Linear => "linear",
            Profile::Quadratic => "quadratic",
        }
    }

    pub fn expr(&self) -> Expr {
        match self {
            Profile::Zero => Expr::constant(0.0),
            Profile::Log => Expr::u().ln(),
            Profile::Linear => Expr::u(),
            Profile::Quadratic => Expr::u().powi(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Levels {
    Count(usize),
    List(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Concentric,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    P2,
    P5,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub source: Source,
    pub m: f64,
    pub c: f64,
    pub k: f64,
    pub a: f64,
    pub profile: Profile,
    pub chart: ChartKind,
    pub r_span: (f64, f64),
    pub theta_span: (f64, f64),
    pub x_span: (f64, f64),
    pub y_span: (f64, f64),
    pub nu: usize,
    pub nv: usize,
    pub levels: Levels,
    pub tol: f64,
    pub check: Option<Check>,
    pub format: PgmFormat,
    pub noise: f64,
    pub out_prefix: String,
    pub seed: u64,
}

/// Parses a configuration file: one `key = value` per line, `#` starts a
/// comment, blank lines are ignored.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return err(format!("config line {}: expected key = value", n + 1));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError(format!("{key}: cannot parse {v:?}")))
}

fn finite(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = num(key, v)?;
    if !x.is_finite() {
        return err(format!("{key} must be finite, got {v}"));
    }
    Ok(x)
}

impl RunConfig {
    /// Builds a configuration from `(key, value)` pairs; later pairs win.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut merged: Vec<(&str, &str)> = Vec::new();
        for (k, v) in pairs {
            if !KEYS.iter().any(|(name, _)| name == k) {
                return err(format!("unknown key {k:?}"));
            }
            merged.retain(|(name, _)| name != k);
            merged.push((k, v));
        }
        let get = |key: &str| merged.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);

        let command = match get("command") {
            Some(c) => CommandKind::parse(c).ok_or_else(|| ConfigError(format!("unknown command {c:?}")))?,
            None => return err("no command given"),
        };
        let source = match (get("family"), get("input")) {
            (Some(_), Some(_)) => return err("give either a family or an input file, not both"),
            (Some(f), None) => {
                Source::Family(FamilyName::parse(f).ok_or_else(|| ConfigError(format!("unknown family {f:?}")))?)
            }
            (None, Some(p)) => Source::File(PathBuf::from(p)),
            (None, None) => return err("no family or input file given"),
        };
        let f64_or = |key: &str, default: f64| get(key).map_or(Ok(default), |v| finite(key, v));
        let chart = match get("chart") {
            Some("polar") => ChartKind::Polar,
            Some("cartesian") => ChartKind::Cartesian,
            Some(other) => return err(format!("unknown chart {other:?}")),
            None => match source {
                Source::Family(FamilyName::P) => ChartKind::Cartesian,
                _ => ChartKind::Polar,
            },
        };
        let span = |lo: &str, hi: &str, d: (f64, f64)| -> Result<(f64, f64), ConfigError> {
            let s = (f64_or(lo, d.0)?, f64_or(hi, d.1)?);
            if s.0 >= s.1 {
                return err(format!("{lo} must be below {hi}"));
            }
            Ok(s)
        };
        let grid = |key: &str| -> Result<usize, ConfigError> {
            let n = get(key).map_or(Ok(128), |v| num::<usize>(key, v))?;
            if n < 2 {
                return err(format!("{key} must be at least 2"));
            }
            Ok(n)
        };
        let levels = match get("levels") {
            None => Levels::Count(5),
            Some(v) if v.contains(',') || v.contains('.') || v.starts_with('-') => {
                let list = v.split(',').map(|s| finite("levels", s.trim())).collect::<Result<Vec<_>, _>>()?;
                Levels::List(list)
            }
            Some(v) => {
                let n = num::<usize>("levels", v)?;
                if n == 0 {
                    return err("levels must be positive");
                }
                Levels::Count(n)
            }
        };
        let default_tol = match command {
            CommandKind::Contours => 1e-2,
            CommandKind::Verify => 1e-8,
            _ => 1e-3,
        };
        let tol = f64_or("tol", default_tol)?;
        if tol <= 0.0 {
            return err("tol must be positive");
        }
        let noise = f64_or("noise", 0.0)?;
        if noise < 0.0 {
            return err("noise must be non-negative");
        }
        let cfg = RunConfig {
            command,
            source,
            m: f64_or("m", 2.0)?,
            c: f64_or("c", 1.0)?,
            k: f64_or("k", 1.0)?,
            a: f64_or("a", 1.0)?,
            profile: match get("profile") {
                None => Profile::Zero,
                Some(p) => Profile::parse(p).ok_or_else(|| ConfigError(format!("unknown profile {p:?}")))?,
            },
            chart,
            r_span: span("r_min", "r_max", (0.2, 2.0))?,
            theta_span: span("theta_min", "theta_max", (0.0, TAU))?,
            x_span: span("x_min", "x_max", (-1.0, 1.0))?,
            y_span: span("y_min", "y_max", (-1.0, 1.0))?,
            nu: grid("nu")?,
            nv: grid("nv")?,
            levels,
            tol,
            check: match get("check") {
                None | Some("none") => None,
                Some("concentric") => Some(Check::Concentric),
                Some("parallel") => Some(Check::Parallel),
                Some(other) => return err(format!("unknown check {other:?}")),
            },
            format: match get("format") {
                None | Some("p2") => PgmFormat::P2,
                Some("p5") => PgmFormat::P5,
                Some(other) => return err(format!("unknown format {other:?}")),
            },
            noise,
            out_prefix: get("out_prefix").unwrap_or("kcontour").to_string(),
            seed: get("seed").map_or(Ok(0), |v| num("seed", v))?,
        };
        if let Source::Family(f) = cfg.source {
            // surface the constructor's complaint now rather than mid-run
            if f != FamilyName::Plane {
                cfg.family()?;
            }
        }
        Ok(cfg)
    }

    /// Domain of the active chart.
    pub fn domain(&self) -> Rect {
        match self.chart {
            ChartKind::Polar => Rect::new(self.r_span.0, self.r_span.1, self.theta_span.0, self.theta_span.1),
            ChartKind::Cartesian => Rect::new(self.x_span.0, self.x_span.1, self.y_span.0, self.y_span.1),
        }
    }

    pub fn family(&self) -> Result<Family, ConfigError> {
        let Source::Family(name) = self.source else {
            return err(format!("{} needs a named family, not an input file", self.command.as_str()));
        };
        let want = match name {
            FamilyName::P => ChartKind::Cartesian,
            FamilyName::X | FamilyName::Helicoid => ChartKind::Polar,
            FamilyName::Plane => self.chart,
        };
        if want != self.chart {
            return err(format!("family {} lives in the {} chart", name.as_str(), want.as_str()));
        }
        let fam = |e: crate::families::FamilyError| ConfigError(e.to_string());
        Ok(match name {
            FamilyName::X => {
                Family::X(XFamilyParams::new(self.m, self.c).and_then(|p| p.with_spans(self.r_span, self.theta_span)).map_err(fam)?)
            }
            FamilyName::P => {
                Family::P(PFamilyParams::new(self.k, self.c).and_then(|p| p.with_spans(self.x_span, self.y_span)).map_err(fam)?)
            }
            FamilyName::Helicoid => Family::Helicoid(
                HelicoidParams::new(self.a, self.profile.expr())
                    .and_then(|p| p.with_spans(self.r_span, self.theta_span))
                    .map_err(fam)?,
            ),
            FamilyName::Plane => Family::Plane {
                chart: match self.chart {
                    ChartKind::Polar => PlaneChart::Polar,
                    ChartKind::Cartesian => PlaneChart::Cartesian,
                },
                domain: self.domain(),
            },
        })
    }

    /// Canonical `(key, value)` echo of the effective configuration.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![("command", self.command.as_str().to_string())];
        match &self.source {
            Source::Family(f) => out.push(("family", f.as_str().to_string())),
            Source::File(p) => out.push(("input", p.display().to_string())),
        }
        out.push(("chart", self.chart.as_str().to_string()));
        if let Source::Family(f) = self.source {
            match f {
                FamilyName::X => {
                    out.push(("m", self.m.to_string()));
                    out.push(("c", self.c.to_string()));
                }
                FamilyName::P => {
                    out.push(("k", self.k.to_string()));
                    out.push(("c", self.c.to_string()));
                }
                FamilyName::Helicoid => {
                    out.push(("a", self.a.to_string()));
                    out.push(("profile", self.profile.as_str().to_string()));
                }
                FamilyName::Plane => {}
            }
        }
        match self.chart {
            ChartKind::Polar => {
                out.push(("r_min", self.r_span.0.to_string()));
                out.push(("r_max", self.r_span.1.to_string()));
                out.push(("theta_min", self.theta_span.0.to_string()));
                out.push(("theta_max", self.theta_span.1.to_string()));
            }
            ChartKind::Cartesian => {
                out.push(("x_min", self.x_span.0.to_string()));
                out.push(("x_max", self.x_span.1.to_string()));
                out.push(("y_min", self.y_span.0.to_string()));
                out.push(("y_max", self.y_span.1.to_string()));
            }
        }
        out.push(("nu", self.nu.to_string()));
        out.push(("nv", self.nv.to_string()));
        out.push((
            "levels",
            match &self.levels {
                Levels::Count(n) => n.to_string(),
                Levels::List(l) => l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            },
        ));
        out.push(("tol", self.tol.to_string()));
        out.push((
            "check",
            match self.check {
                None => "none",
                Some(Check::Concentric) => "concentric",
                Some(Check::Parallel) => "parallel",
            }
            .to_string(),
        ));
        out.push((
            "format",
            match self.format {
                PgmFormat::P2 => "p2",
                PgmFormat::P5 => "p5",
            }
            .to_string(),
        ));
        out.push(("noise", self.noise.to_string()));
        out.push(("out_prefix", self.out_prefix.clone()));
        out.push(("seed", self.seed.to_string()));
        out
    }
}

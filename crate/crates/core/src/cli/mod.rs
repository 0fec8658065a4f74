//! Command-line front end.
//!
//! ```text
//! kcontour [OPTIONS] [COMMAND] [FAMILY|FILE] [KEY=VALUE]...
//! ```
//!
//! Settings are merged from a `--config` file, then positional `key=value`
//! pairs, then flags; later sources win. Every command prints its report to
//! stdout and writes it to `<out_prefix>.report.txt`.
//!
//! Exit codes: 0 on success, 1 when a requested verdict or tolerance check
//! fails, 2 on any input or I/O error.

mod commands;
pub mod config;
pub mod io;
pub mod render;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use thiserror::Error;

pub use commands::Outcome;
pub use config::{CommandKind, ConfigError, RunConfig, KEYS};
pub use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] io::IoError),
}

fn after_help() -> String {
    let mut s = String::from("Commands: analyze, contours, classify, verify, render, generate\n\nConfiguration keys:\n");
    for (k, d) in KEYS {
        s.push_str(&format!("  {k:<11} {d}\n"));
    }
    s.push_str("\nExit codes: 0 success, 1 verdict or tolerance failure, 2 input error");
    s
}

#[derive(Debug, Parser)]
#[command(
    name = "kcontour",
    version,
    about = "Curvature contours, Gauss-map symmetry and classification of graph surfaces",
    after_help = after_help()
)]
struct Args {
    /// Flat `key = value` configuration file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Level count or comma-separated level list.
    #[arg(long, allow_hyphen_values = true)]
    levels: Option<String>,
    /// concentric | parallel
    #[arg(long)]
    check: Option<String>,
    /// polar | cartesian
    #[arg(long)]
    chart: Option<String>,
    #[arg(long, value_name = "PREFIX")]
    out_prefix: Option<String>,
    /// p2 | p5
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    nu: Option<String>,
    #[arg(long)]
    nv: Option<String>,
    #[arg(long)]
    noise: Option<String>,
    /// [COMMAND] [FAMILY|FILE] [KEY=VALUE]...
    #[arg(value_name = "ARGS")]
    rest: Vec<String>,
}

fn collect_pairs(args: &Args) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|source| io::IoError::Io { path: path.display().to_string(), source })?;
        pairs.extend(config::parse_config_text(&text)?);
    }
    let mut rest = args.rest.iter().peekable();
    if let Some(c) = rest.peek() {
        if CommandKind::parse(c).is_some() {
            pairs.push(("command".into(), c.to_string()));
            rest.next();
        }
    }
    let mut target_seen = false;
    for item in rest {
        if let Some((k, v)) = item.split_once('=') {
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        } else if !target_seen {
            target_seen = true;
            let key = if config::FamilyName::parse(item).is_some() { "family" } else { "input" };
            // a positional target replaces whichever source the file named
            pairs.retain(|(k, _)| k != "family" && k != "input");
            pairs.push((key.into(), item.clone()));
        } else {
            return Err(ConfigError(format!("unexpected argument {item:?}")).into());
        }
    }
    let flags = [
        ("levels", &args.levels),
        ("check", &args.check),
        ("chart", &args.chart),
        ("out_prefix", &args.out_prefix),
        ("format", &args.format),
        ("tol", &args.tol),
        ("seed", &args.seed),
        ("nu", &args.nu),
        ("nv", &args.nv),
        ("noise", &args.noise),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            pairs.push((k.into(), v.clone()));
        }
    }
    Ok(pairs)
}

/// Runs one command on a parsed configuration.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut outcome = match cfg.command {
        CommandKind::Analyze => commands::analyze(cfg),
        CommandKind::Contours => commands::contours(cfg),
        CommandKind::Classify => commands::classify_cmd(cfg),
        CommandKind::Verify => commands::verify(cfg),
        CommandKind::Render => commands::render(cfg),
        CommandKind::Generate => commands::generate(cfg),
    }?;
    outcome.report.push("success", outcome.success);
    let path = PathBuf::from(format!("{}.report.txt", cfg.out_prefix));
    io::write_file(&path, outcome.report.to_string().as_bytes())?;
    Ok(outcome)
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run_from<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = collect_pairs(&args).and_then(|pairs| Ok(RunConfig::from_pairs(&pairs)?)).and_then(|cfg| execute(&cfg));
    match result {
        Ok(outcome) => {
            print!("{}", outcome.report);
            if outcome.success {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}

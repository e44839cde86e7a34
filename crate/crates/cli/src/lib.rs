//! Command-line front end for `dioph-core`: configuration, reports and the
//! acceptance checks.

pub mod checks;
pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::time::Instant;

use clap::Parser;

use crate::commands::{Cli, Failure};
use crate::config::{Config, ConfigError, Format};
use crate::report::{Report, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn resolve(cli: &Cli) -> Result<Config, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(ConfigError::Value { key: "workers".into(), msg: "must be positive".into() });
        }
        cfg.workers = w;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

/// Parse `args` (program name first), run, write the report, and return the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cfg = match resolve(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("dioph: {e}");
            return EXIT_USAGE;
        }
    };
    let command = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut report = Report::new(command, &cfg);
    let start = Instant::now();
    match commands::execute(&cli.command, &cfg, &mut report) {
        Ok(()) => {}
        Err(Failure::Usage(msg)) => {
            eprintln!("dioph: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Check(msg)) => report.fail(msg),
    }
    report.timing.insert("total".into(), start.elapsed().as_secs_f64() * 1e3);
    let text = match cfg.format {
        Format::Json => report.render_json(),
        Format::Text => report.render_text(),
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("dioph: {e}");
        return EXIT_FAILURE;
    }
    match report.status {
        Status::Ok => EXIT_OK,
        Status::Failed => EXIT_FAILURE,
    }
}

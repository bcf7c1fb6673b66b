mod commands;
mod config;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use thiserror::Error;

use config::{Cli, ExperimentConfig};
use report::{Report, Timing};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] spacestat::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(spacestat::Error::Invalid(_)) => 2,
            CliError::Core(spacestat::Error::Cap { .. }) => 3,
            _ => 1,
        }
    }

    fn status(&self) -> &'static str {
        match self.exit_code() {
            2 => "usage_error",
            3 => "cap_violation",
            _ => "error",
        }
    }
}

fn load_config(cli: Cli) -> Result<ExperimentConfig, CliError> {
    match (cli.config, cli.command) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed config {}: {e}", path.display())))
        }
        (None, Some(command)) => Ok(ExperimentConfig {
            common: cli.common,
            command,
        }),
        _ => Err(CliError::Usage("give a command or --config".into())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("cannot start {w} workers: {e}");
            return ExitCode::from(2);
        }
    }
    let config = match load_config(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let mut report = Report::default();
    let outcome = commands::run(&config, &mut report);
    let timing = Timing {
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        workers: rayon::current_num_threads(),
    };
    let (status, error, code) = match &outcome {
        Ok(()) if report.passed() => ("ok", None, 0),
        Ok(()) => ("check_failed", None, 1),
        Err(e) => (e.status(), Some(e.to_string()), e.exit_code()),
    };
    if let Some(e) = &error {
        eprintln!("{e}");
    }
    let text = match report.render(&config, status, error.as_deref(), &timing) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    let written = match &config.common.out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("cannot write the report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}

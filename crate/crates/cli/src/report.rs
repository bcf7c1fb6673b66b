use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::CliError;

pub const SCHEMA: &str = "spacestat-report/1";

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Default)]
pub struct Report {
    checks: Vec<Check>,
    results: BTreeMap<String, Value>,
    tables: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct Body<'a> {
    schema: &'static str,
    config: &'a ExperimentConfig,
    status: &'a str,
    error: Option<&'a str>,
    checks: &'a [Check],
    results: &'a BTreeMap<String, Value>,
    /// CSV text per table.
    tables: &'a BTreeMap<String, String>,
}

#[derive(Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
    pub workers: usize,
}

impl Report {
    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) -> Result<(), CliError> {
        self.results.insert(key.into(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn table<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        self.tables
            .insert(name.into(), String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(())
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Pretty JSON with `timing` as the last key, on a line of its own, so the
    /// body is the file minus that line.
    pub fn render(
        &self,
        config: &ExperimentConfig,
        status: &str,
        error: Option<&str>,
        timing: &Timing,
    ) -> Result<String, CliError> {
        let body = serde_json::to_string_pretty(&Body {
            schema: SCHEMA,
            config,
            status,
            error,
            checks: &self.checks,
            results: &self.results,
            tables: &self.tables,
        })?;
        let head = body.strip_suffix('}').expect("an object").trim_end();
        Ok(format!(
            "{head},\n  \"timing\": {}\n}}\n",
            serde_json::to_string(timing)?
        ))
    }
}

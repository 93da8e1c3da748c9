use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sphereiso::suites::SuiteReport;

pub const SCHEMA_VERSION: u32 = 1;

/// The document printed by every command. `wall_time_ms` comes last so that
/// reports of identical runs differ only on their final field.
#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
    pub wall_time_ms: u64,
}

impl Report {
    pub fn new(command: &str, config: serde_json::Value, suites: Vec<SuiteReport>, started: Instant) -> Self {
        let passed = suites.iter().all(|s| s.passed);
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config,
            suites,
            passed,
            wall_time_ms: started.elapsed().as_millis() as u64,
        }
    }

    /// Prints the report and writes it to `out` when given.
    pub fn emit(&self, out: Option<&Path>) -> sphereiso::Result<bool> {
        if let Some(path) = out {
            sphereiso::io::write_json(path, self)?;
        }
        print_json(self);
        Ok(self.passed)
    }
}

/// Pretty-prints `value` to stdout. A closed pipe is not an error.
pub fn print_json(value: &impl Serialize) {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

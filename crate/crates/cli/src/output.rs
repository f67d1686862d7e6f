//! Schema-versioned JSON and CSV emission, and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use uamo_core::localization::content_hash;

use crate::error::{CliError, CliResult, Exit};

/// Version of every JSON document and CSV table written by the tool.
pub const SCHEMA_VERSION: u32 = 1;

/// Result of one subcommand before formatting.
pub struct Outcome {
    pub command: &'static str,
    pub exit: Exit,
    /// Effective configuration after flags, file and defaults were combined.
    pub config: Value,
    pub seed: Option<u64>,
    pub result: Value,
    /// CSV without the schema column, header first.
    pub csv: Vec<u8>,
    pub summary: String,
}

impl Outcome {
    pub fn status(&self) -> &'static str {
        match self.exit {
            Exit::Pass => "pass",
            Exit::GateFailure => "fail",
            Exit::Usage => "error",
        }
    }

    pub fn json(&self) -> String {
        #[derive(Serialize)]
        struct Envelope<'a> {
            schema_version: u32,
            command: &'a str,
            status: &'a str,
            config: &'a Value,
            result: &'a Value,
        }
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            command: self.command,
            status: self.status(),
            config: &self.config,
            result: &self.result,
        };
        serde_json::to_string_pretty(&env).expect("json value serializes") + "\n"
    }

    /// The CSV with a leading `schema_version` column.
    pub fn csv(&self) -> CliResult<Vec<u8>> {
        let mut rd = csv::ReaderBuilder::new().has_headers(false).from_reader(self.csv.as_slice());
        let mut wr = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
        for (i, rec) in rd.records().enumerate() {
            let rec = rec.map_err(err)?;
            let first = if i == 0 { "schema_version".to_string() } else { SCHEMA_VERSION.to_string() };
            wr.write_record(std::iter::once(first.as_str()).chain(rec.iter())).map_err(err)?;
        }
        wr.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))
    }
}

/// Serializes rows with a header; used by subcommands whose tables are built here.
pub fn csv_rows<T: Serialize>(rows: &[T]) -> CliResult<Vec<u8>> {
    let mut wr = csv::Writer::from_writer(Vec::new());
    for r in rows {
        wr.serialize(r).map_err(|e| CliError::Config(format!("csv: {e}")))?;
    }
    wr.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

/// Everything needed to re-run a command and compare its outputs byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command_line: Vec<String>,
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub input_hashes: BTreeMap<String, String>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub outputs: Vec<String>,
    pub exit_code: i32,
}

pub fn unix_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

/// Writes `<command>.json`, `<command>.csv` and `manifest.json` into `dir`.
pub fn write_run(
    dir: &Path,
    outcome: &Outcome,
    command_line: Vec<String>,
    config_file: Option<&[u8]>,
    started: u128,
) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let json_name = format!("{}.json", outcome.command);
    let csv_name = format!("{}.csv", outcome.command);
    std::fs::write(dir.join(&json_name), outcome.json())?;
    std::fs::write(dir.join(&csv_name), outcome.csv()?)?;
    let mut input_hashes = BTreeMap::new();
    let canonical = serde_json::to_vec(&outcome.config).expect("json value serializes");
    input_hashes.insert("effective_config".to_string(), content_hash(&canonical));
    if let Some(bytes) = config_file {
        input_hashes.insert("config_file".to_string(), content_hash(bytes));
    }
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        tool: "uamo-lab",
        tool_version: env!("CARGO_PKG_VERSION"),
        command_line,
        command: outcome.command.to_string(),
        config: outcome.config.clone(),
        seed: outcome.seed,
        input_hashes,
        started_unix_ms: started,
        finished_unix_ms: unix_ms(),
        outputs: vec![json_name, csv_name],
        exit_code: outcome.exit as i32,
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")?;
    Ok(path)
}

//! JSON config files: one object per subcommand, overlaid by the flags that were given.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Default file written by `verify --suite poisson --calibrate` when no `--config` is given.
pub const DEFAULT_CONFIG_PATH: &str = "uamo-lab.json";

pub struct ConfigFile {
    pub root: Map<String, Value>,
    /// Raw bytes as read, for the manifest hash.
    pub bytes: Vec<u8>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let root = match serde_json::from_slice(&bytes) {
            Ok(Value::Object(m)) => m,
            Ok(_) => return Err(CliError::Config(format!("{}: top level must be an object", path.display()))),
            Err(e) => return Err(CliError::Config(format!("{}: {e}", path.display()))),
        };
        Ok(Self { root, bytes })
    }

    pub fn section(&self, name: &str) -> CliResult<Map<String, Value>> {
        match self.root.get(name) {
            None => Ok(Map::new()),
            Some(Value::Object(m)) => Ok(m.clone()),
            Some(_) => Err(CliError::Config(format!("section `{name}` must be an object"))),
        }
    }
}

/// Keys that select the same thing; a flag for one discards the file entry of the other.
const EXCLUSIVE: [(&str, &str); 2] = [("omega", "quotients"), ("theta", "theta_resonant")];

/// Flags over file over defaults: every non-null, non-false flag value replaces the
/// file entry of the same name; the struct's own `Default` fills whatever is left.
pub fn overlay<T: Serialize + DeserializeOwned>(flags: &T, file: Option<&ConfigFile>, section: &str) -> CliResult<T> {
    let mut merged = match file {
        Some(f) => f.section(section)?,
        None => Map::new(),
    };
    let Value::Object(given) = serde_json::to_value(flags).map_err(|e| CliError::Config(e.to_string()))? else {
        return Err(CliError::Config("flags do not serialize to an object".into()));
    };
    for (a, b) in EXCLUSIVE {
        if given.get(a).is_some_and(|v| !v.is_null()) {
            merged.remove(b);
        }
        if given.get(b).is_some_and(|v| !v.is_null()) {
            merged.remove(a);
        }
    }
    for (k, v) in given {
        if !(v.is_null() || v == Value::Bool(false)) {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Config(format!("section `{section}`: {e}")))
}

/// Sets `section.key = value` in the JSON file at `path`, creating file and section as needed.
pub fn write_entry(path: &Path, section: &str, key: &str, value: Value) -> CliResult<()> {
    let mut root = if path.exists() { ConfigFile::load(path)?.root } else { Map::new() };
    let entry = root.entry(section.to_string()).or_insert_with(|| Value::Object(Map::new()));
    let Value::Object(m) = entry else {
        return Err(CliError::Config(format!("section `{section}` must be an object")));
    };
    m.insert(key.to_string(), value);
    let text = serde_json::to_string_pretty(&Value::Object(root)).expect("json value serializes");
    std::fs::write(path, text + "\n")?;
    Ok(())
}

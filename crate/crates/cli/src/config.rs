//! JSON run configuration. Every flag has a config key of the same name;
//! flags given on the command line take precedence.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{invalid, CliError, Result};
use crate::io::read_json;

/// Keys accepted by every command.
pub const GLOBAL_KEYS: [&str; 2] = ["threads", "strict"];

pub fn load(path: &Path) -> Result<Map<String, Value>> {
    match read_json::<Value>(path)? {
        Value::Object(map) => Ok(map),
        _ => Err(invalid("config", "top level must be a JSON object")),
    }
}

/// Overlay the non-null fields of `flags` on `config`.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: &Map<String, Value>) -> Result<T> {
    let Value::Object(flag_map) = serde_json::to_value(flags).map_err(json_err)? else {
        unreachable!("argument structs serialize to objects")
    };
    let mut merged = Map::new();
    for (key, value) in config {
        if GLOBAL_KEYS.contains(&key.as_str()) {
            continue;
        }
        if !flag_map.contains_key(key) {
            return Err(invalid(key.clone(), "unknown config key for this command"));
        }
        merged.insert(key.clone(), value.clone());
    }
    for (key, value) in flag_map {
        if !value.is_null() {
            merged.insert(key, value);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| invalid("config", e.to_string()))
}

fn json_err(source: serde_json::Error) -> CliError {
    invalid("arguments", source.to_string())
}

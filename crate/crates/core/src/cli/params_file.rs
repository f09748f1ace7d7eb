//! Flat `key = value` parameter files.
//!
//! Either `a, b, c, rho, v0` or `vbar, lambda, c, rho, v0`; mixing the two
//! spellings is rejected, as is any other key.

use std::collections::BTreeMap;

use super::CliError;
use crate::model::ModelParams;

const DIRECT: [&str; 5] = ["a", "b", "c", "rho", "v0"];
const MEAN_REVERSION: [&str; 5] = ["vbar", "lambda", "c", "rho", "v0"];

pub fn parse(text: &str) -> Result<ModelParams, CliError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(format!("parameter file: {}", e.message())))?;
    let mut values = BTreeMap::new();
    for (key, value) in &table {
        let v = match value {
            toml::Value::Float(f) => *f,
            toml::Value::Integer(i) => *i as f64,
            other => {
                return Err(CliError::Config(format!(
                    "parameter `{key}` must be a number, got {}",
                    other.type_str()
                )))
            }
        };
        if !DIRECT.contains(&key.as_str()) && !MEAN_REVERSION.contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown parameter `{key}`")));
        }
        values.insert(key.as_str(), v);
    }
    let direct = values.contains_key("a") || values.contains_key("b");
    let reverting = values.contains_key("vbar") || values.contains_key("lambda");
    let get = |names: [&str; 5]| -> Result<[f64; 5], CliError> {
        let mut out = [0.0; 5];
        for (slot, name) in out.iter_mut().zip(names) {
            *slot = *values
                .get(name)
                .ok_or_else(|| CliError::Config(format!("parameter `{name}` is missing")))?;
        }
        Ok(out)
    };
    let params = match (direct, reverting) {
        (true, true) => {
            return Err(CliError::Config(
                "give either {a, b} or {vbar, lambda}, not both".into(),
            ))
        }
        (false, true) => {
            let [vbar, lambda, c, rho, v0] = get(MEAN_REVERSION)?;
            ModelParams::from_mean_reversion(vbar, lambda, c, rho, v0)?
        }
        _ => {
            let [a, b, c, rho, v0] = get(DIRECT)?;
            ModelParams::new(a, b, c, rho, v0)?
        }
    };
    Ok(params)
}

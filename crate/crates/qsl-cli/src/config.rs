use std::collections::{BTreeMap, HashMap};
use std::fmt::Display;
use std::path::Path;

use qsl_core::matrix::Fnv1a;
use qsl_core::{Error, Result};

/// Key=value file, one pair per line, `#` comments. Later lines win.
#[derive(Debug, Default)]
pub struct ConfigFile {
    map: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    Error::Config(format!(
                        "line {} is not key=value: {raw:?}",
                        lineno + 1
                    ))
                })?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(ConfigFile { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }
}

/// The parameters a run actually used, in canonical order. Hashing this map
/// ties every output file to its exact inputs.
#[derive(Debug, Default)]
pub struct Effective {
    map: BTreeMap<String, String>,
}

impl Effective {
    pub fn put(&mut self, key: &str, value: impl Display) {
        self.map.insert(key.to_string(), value.to_string());
    }

    pub fn hash(&self) -> String {
        let mut h = Fnv1a::new();
        for (k, v) in &self.map {
            h.write_bytes(k.as_bytes());
            h.write_bytes(b"=");
            h.write_bytes(v.as_bytes());
            h.write_bytes(b"\n");
        }
        format!("{:016x}", h.finish())
    }
}

/// CLI flag beats config file beats default. The winning value lands in
/// `effective` under `key`.
pub fn resolve<T>(
    cli: Option<T>,
    file: &ConfigFile,
    key: &str,
    default: T,
    effective: &mut Effective,
) -> Result<T>
where
    T: Display + std::str::FromStr,
    T::Err: Display,
{
    let value = match cli {
        Some(v) => v,
        None => match file.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|e| Error::Config(format!("bad value for {key}: {e}")))?,
            None => default,
        },
    };
    effective.put(key, &value);
    Ok(value)
}

/// Like `resolve`, for parameters that have no default and must be given.
pub fn resolve_required<T>(
    cli: Option<T>,
    file: &ConfigFile,
    key: &str,
    effective: &mut Effective,
) -> Result<T>
where
    T: Display + std::str::FromStr,
    T::Err: Display,
{
    let value = match cli {
        Some(v) => v,
        None => match file.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|e| Error::Config(format!("bad value for {key}: {e}")))?,
            None => return Err(Error::Config(format!("missing required parameter {key}"))),
        },
    };
    effective.put(key, &value);
    Ok(value)
}

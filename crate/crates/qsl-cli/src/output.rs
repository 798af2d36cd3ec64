use std::path::Path;

use qsl_core::{Error, Result};

/// First line of every output file: enough to reproduce the run exactly.
/// The hash covers the resolved physics parameters and seed, not plumbing
/// like the output directory or thread count, so identical runs into
/// different directories stay byte-identical.
pub fn header_line(config_hash: &str, seed: u64) -> String {
    format!(
        "# config_hash={config_hash} seed={seed} version={}",
        env!("CARGO_PKG_VERSION")
    )
}

pub fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body)?;
    Ok(())
}

/// CSV cell for a value that may be undefined; undefined stays empty.
pub fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Pretty JSON with a trailing newline; keys serialize in sorted order.
pub fn to_pretty(value: &serde_json::Value) -> Result<String> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serializing report: {e}")))?;
    Ok(format!("{text}\n"))
}

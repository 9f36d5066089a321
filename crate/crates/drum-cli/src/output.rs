//! File output helpers: atomic writes, the commented metadata header that
//! makes every CSV self-describing, and its parser.

use crate::config::RunConfig;
use crate::CliError;
use std::path::Path;

pub const METADATA_MAGIC: &str = "# drum-config-v1";

/// Write bytes to `path` atomically (temp file in the same directory, then
/// rename over the target).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)
        .map_err(|e| CliError::Runtime(format!("write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::Runtime(format!("rename to {}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

/// Commented header embedding the full run configuration, so every output
/// file re-parses to the exact config that produced it.
pub fn metadata_header(config: &RunConfig) -> String {
    let mut out = String::from(METADATA_MAGIC);
    out.push('\n');
    for line in config.to_toml().lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("# end-config\n");
    out
}

/// Recover the configuration from a file carrying a metadata header.
pub fn parse_metadata(text: &str) -> Result<RunConfig, CliError> {
    let mut toml_text = String::new();
    let mut in_header = false;
    for line in text.lines() {
        if line.trim() == METADATA_MAGIC {
            in_header = true;
            continue;
        }
        if !in_header {
            continue;
        }
        if line.trim() == "# end-config" {
            let config: RunConfig = toml::from_str(&toml_text)
                .map_err(|e| CliError::Validation(format!("metadata header: {e}")))?;
            return Ok(config);
        }
        toml_text.push_str(line.strip_prefix("# ").unwrap_or(line));
        toml_text.push('\n');
    }
    Err(CliError::Validation("no metadata header found".into()))
}

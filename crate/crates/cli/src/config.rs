//! Configuration file handling.

use std::fs;
use std::path::Path;

use opinet_core::SimConfig;

use crate::CliError;

/// Read and validate a JSON simulation config. Unknown fields are rejected;
/// omitted optional fields take the standard defaults (upd_prob 0.25,
/// unf_thresh 0.5, unf_prob 0.9, friend_prob 0.05, small-world generator,
/// all masks visible, constant unit weights).
pub fn parse_config(path: &Path) -> Result<SimConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let config: SimConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    config
        .validate()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(config)
}

//! `--config` file support. The file is JSON with one optional section per
//! subcommand; every field mirrors the long flag of the same name
//! (snake_case). Precedence everywhere: command-line flag, then config file,
//! then built-in default. Unknown keys are rejected so typos fail loudly.
//!
//! ```json
//! {
//!   "extract_k": { "f0": 3.65e9, "fp": 1e10, "bandwidth": 3.5e8, "alpha": 3.0 },
//!   "compare": { "n_modes": 4 }
//! }
//! ```

use std::path::Path;

use resonest::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub gen: GenConfig,
    #[serde(default)]
    pub extract_k: ExtractKConfig,
    #[serde(default)]
    pub extract_qe: ExtractQeConfig,
    #[serde(default)]
    pub synth: SynthConfig,
    #[serde(default)]
    pub invert: InvertConfig,
    #[serde(default)]
    pub compare: CompareConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    #[serde(default)]
    pub pulse: GenPulseConfig,
    #[serde(default)]
    pub two_tone: GenTwoToneConfig,
    #[serde(default)]
    pub ode: GenOdeConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenPulseConfig {
    pub fp: Option<f64>,
    pub dt: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenTwoToneConfig {
    pub f0: Option<f64>,
    pub k: Option<f64>,
    pub damping: Option<f64>,
    pub amplitude_minus: Option<f64>,
    pub amplitude_plus: Option<f64>,
    pub phase_minus: Option<f64>,
    pub phase_plus: Option<f64>,
    pub dt: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenOdeConfig {
    pub f0: Option<f64>,
    pub k: Option<f64>,
    pub fp: Option<f64>,
    pub damping: Option<f64>,
    pub dt: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractKConfig {
    pub f0: Option<f64>,
    pub fp: Option<f64>,
    pub bandwidth: Option<f64>,
    pub alpha: Option<f64>,
    pub correlation_order: Option<usize>,
    pub n_modes: Option<usize>,
    pub pairing_tolerance: Option<f64>,
    pub selection_band: Option<f64>,
    pub trim_front: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractQeConfig {
    pub f_min: Option<f64>,
    pub f_max: Option<f64>,
    pub nfft: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub g: Option<Vec<f64>>,
    pub fc: Option<f64>,
    pub bandwidth: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvertConfig {
    pub target: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub correlation_order: Option<usize>,
    pub n_modes: Option<usize>,
    pub pairing_tolerance: Option<f64>,
    pub band_center: Option<f64>,
    pub band_width: Option<f64>,
    pub nfft_factor: Option<usize>,
}

/// Loads the config file, or an all-defaults one when no path was given.
pub fn load(path: Option<&Path>) -> Result<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("config file {}: {e}", path.display())))
}

/// Flag value, else config value, else the built-in default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Flag value, else config value; an error naming the flag otherwise.
pub fn require<T>(flag: Option<T>, config: Option<T>, flag_name: &str) -> Result<T> {
    flag.or(config).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "missing --{flag_name}: pass the flag or set `{}` in the config file",
            flag_name.replace('-', "_")
        ))
    })
}

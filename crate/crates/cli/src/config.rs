//! Defaults, the optional TOML file named by `HOPF_LAB_CONFIG`, and flag
//! overrides, applied in that order.

use std::path::Path;

use clap::ValueEnum;
use serde::Deserialize;

pub const CONFIG_ENV: &str = "HOPF_LAB_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliConfig {
    pub format: Format,
    pub extended_lemmas: bool,
    /// Largest group order the finite oracle accepts.
    pub bound: u64,
    pub n: usize,
    pub k: u32,
    pub seed: u64,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig { format: Format::Text, extended_lemmas: false, bound: 256, n: 4, k: 2, seed: 0 }
    }
}

/// Every key is optional; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    format: Option<Format>,
    extended_lemmas: Option<bool>,
    bound: Option<u64>,
    #[serde(rename = "N")]
    n: Option<usize>,
    #[serde(rename = "K")]
    k: Option<u32>,
    seed: Option<u64>,
}

impl CliConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let f: FileConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        let d = CliConfig::default();
        Ok(CliConfig {
            format: f.format.unwrap_or(d.format),
            extended_lemmas: f.extended_lemmas.unwrap_or(d.extended_lemmas),
            bound: f.bound.unwrap_or(d.bound),
            n: f.n.unwrap_or(d.n),
            k: f.k.unwrap_or(d.k),
            seed: f.seed.unwrap_or(d.seed),
        })
    }

    /// The file at `path`, or the one named by the environment, or defaults.
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let env = std::env::var_os(CONFIG_ENV);
        let Some(path) = path.or(env.as_deref().map(Path::new)) else {
            return Ok(CliConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(CliConfig::from_toml("").unwrap(), CliConfig::default());
    }

    #[test]
    fn keys_override_defaults() {
        let c = CliConfig::from_toml("format = \"json\"\nN = 3\nK = 1\nseed = 9\nextended_lemmas = true").unwrap();
        assert_eq!(c.format, Format::Json);
        assert_eq!((c.n, c.k, c.seed, c.bound), (3, 1, 9, 256));
        assert!(c.extended_lemmas);
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(CliConfig::from_toml("colour = 1").is_err());
        assert!(CliConfig::from_toml("format = \"yaml\"").is_err());
        assert!(CliConfig::from_toml("N = -1").is_err());
    }
}

//! Line-based `key = value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! preset = dfs
//! features = char:3, char:4, word:3
//! c = 100
//! c_values = 0.001, 0.01, 0.1, 1, 10, 100, 1000
//! combination = char:3,char:4,char:5
//! combination = char:3,char:4,char:5,char:6,word:3
//! tolerance = 0.0001
//! max_epochs = 1000
//! seed = 42
//! skip_exact = false
//! ```
//!
//! `combination` may repeat; every other key may appear once.

use std::fs;
use std::path::Path;

use varid_core::features::{parse_spec_list, FeatureLimits};
use varid_core::{FeatureSpec, Preset, TrainConfig};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub features: Option<Vec<FeatureSpec>>,
    pub c: Option<f64>,
    pub c_values: Option<Vec<f64>>,
    pub combinations: Vec<Vec<FeatureSpec>>,
    pub tolerance: Option<f64>,
    pub max_epochs: Option<usize>,
    pub seed: Option<u64>,
    pub skip_exact: bool,
}

fn parse_number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value {value:?} for {key}"))
}

pub fn parse_c_values(value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| parse_number("c_values", v))
        .collect()
}

pub fn parse_specs(value: &str) -> Result<Vec<FeatureSpec>, String> {
    parse_spec_list(value, &FeatureLimits::default()).map_err(|e| e.to_string())
}

impl RunConfig {
    pub fn parse(content: &str) -> Result<Self, String> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in content.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| format!("config line {}: {msg}", i + 1);
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| at("expected `key = value`".into()))?;
            if key != "combination" {
                if seen.iter().any(|k| k == key) {
                    return Err(at(format!("duplicate key {key}")));
                }
                seen.push(key.to_owned());
            }
            match key {
                "preset" => {
                    cfg.preset = Some(
                        value
                            .parse()
                            .map_err(|e: varid_core::Error| at(e.to_string()))?,
                    )
                }
                "features" => cfg.features = Some(parse_specs(value).map_err(at)?),
                "c" => cfg.c = Some(parse_number(key, value).map_err(at)?),
                "c_values" => cfg.c_values = Some(parse_c_values(value).map_err(at)?),
                "combination" => cfg.combinations.push(parse_specs(value).map_err(at)?),
                "tolerance" => cfg.tolerance = Some(parse_number(key, value).map_err(at)?),
                "max_epochs" => cfg.max_epochs = Some(parse_number(key, value).map_err(at)?),
                "seed" => cfg.seed = Some(parse_number(key, value).map_err(at)?),
                "skip_exact" => cfg.skip_exact = parse_number(key, value).map_err(at)?,
                _ => return Err(at(format!("unknown key {key:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let content = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::parse(&content).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(mut self, other: RunConfig) -> Self {
        self.preset = other.preset.or(self.preset);
        self.features = other.features.or(self.features);
        self.c = other.c.or(self.c);
        self.c_values = other.c_values.or(self.c_values);
        if !other.combinations.is_empty() {
            self.combinations = other.combinations;
        }
        self.tolerance = other.tolerance.or(self.tolerance);
        self.max_epochs = other.max_epochs.or(self.max_epochs);
        self.seed = other.seed.or(self.seed);
        self.skip_exact |= other.skip_exact;
        self
    }

    /// Solver settings; C falls back to the preset's, then to 1.
    pub fn train_config(&self) -> TrainConfig {
        let defaults = TrainConfig::default();
        TrainConfig {
            c: self.c.or(self.preset.map(Preset::c)).unwrap_or(defaults.c),
            tolerance: self.tolerance.unwrap_or(defaults.tolerance),
            max_epochs: self.max_epochs.unwrap_or(defaults.max_epochs),
            seed: self.seed.unwrap_or(defaults.seed),
        }
    }

    fn adjust(&self, specs: Vec<FeatureSpec>) -> Vec<FeatureSpec> {
        if self.skip_exact {
            specs.into_iter().map(FeatureSpec::exact_skips).collect()
        } else {
            specs
        }
    }

    /// Explicit features, else the preset's.
    pub fn feature_specs(&self) -> Option<Vec<FeatureSpec>> {
        self.features
            .clone()
            .or_else(|| self.preset.map(Preset::feature_specs))
            .map(|s| self.adjust(s))
    }

    /// Grid combinations: explicit ones, else the explicit feature list as a
    /// single combination, else `None` for the default menu.
    pub fn grid_combinations(&self) -> Option<Vec<Vec<FeatureSpec>>> {
        if !self.combinations.is_empty() {
            Some(
                self.combinations
                    .iter()
                    .map(|c| self.adjust(c.clone()))
                    .collect(),
            )
        } else {
            self.feature_specs().map(|s| vec![s])
        }
    }
}

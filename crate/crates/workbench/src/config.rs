//! Experiment configuration: a flat JSON file, field-by-field overridable
//! from the command line.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Random symbol ensembles used by the equivalence experiments.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    /// iid standard complex Gaussian entries on Haar nodes.
    #[default]
    Gaussian,
    /// Exactly `floor(node_count / 8)` nonzero Gaussian entries.
    Sparse,
    /// One Gaussian entry per level.
    Lacunary,
    /// Gaussian, rescaled to Carleson-measure norm 1.
    CarlesonNormalized,
}

impl std::str::FromStr for SymbolKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gaussian" => SymbolKind::Gaussian,
            "sparse" => SymbolKind::Sparse,
            "lacunary" => SymbolKind::Lacunary,
            "carleson_normalized" | "carleson-normalized" => SymbolKind::CarlesonNormalized,
            other => bail!("unknown symbol kind {other:?}"),
        })
    }
}

/// Dense oracles cap the usable depth.
pub const MAX_EXPERIMENT_DEPTH: usize = 12;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "defaults::depth")]
    pub depth: usize,
    #[serde(default = "defaults::trials")]
    pub trials: u64,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    #[serde(default)]
    pub symbol_kind: SymbolKind,
    /// Residual tolerance for the exact-identity suite.
    #[serde(default = "defaults::tolerance")]
    pub tolerance: f64,
    /// Sanity ceiling on sufficiency ratios.
    #[serde(default = "defaults::ceiling")]
    pub ceiling: f64,
}

mod defaults {
    pub fn depth() -> usize {
        6
    }
    pub fn trials() -> u64 {
        20
    }
    pub fn seed() -> u64 {
        1
    }
    pub fn tolerance() -> f64 {
        1e-10
    }
    pub fn ceiling() -> f64 {
        100.0
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            depth: defaults::depth(),
            trials: defaults::trials(),
            seed: defaults::seed(),
            symbol_kind: SymbolKind::default(),
            tolerance: defaults::tolerance(),
            ceiling: defaults::ceiling(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 || self.depth > MAX_EXPERIMENT_DEPTH {
            bail!("depth {} outside 1..={MAX_EXPERIMENT_DEPTH}", self.depth);
        }
        if self.trials == 0 {
            bail!("trials must be >= 1");
        }
        if !self.tolerance.is_finite() || self.tolerance < 0.0 {
            bail!("tolerance must be a nonnegative finite number");
        }
        if !self.ceiling.is_finite() || self.ceiling <= 0.0 {
            bail!("ceiling must be a positive finite number");
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).context("parsing config JSON")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_json(&text)
    }
}

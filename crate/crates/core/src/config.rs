//! Run configuration.
//!
//! The document is sectioned key-value text in TOML syntax: `[section]`
//! headers, `key = value` lines and `#` comments. Dotted keys such as
//! `policy.conpa.c_db = -65` work anywhere. Every key is optional; an empty
//! document yields the default evaluation setup. Unknown keys are rejected.
//!
//! ```text
//! [deployment]
//! n_bss = 4
//! side_d = 2.0
//!
//! [policy]
//! kind = "conpa"
//! conpa.c_db = -70
//! ```

use serde::{Deserialize, Serialize};

use crate::access::{PolicyRegistry, PolicySection};
use crate::channel::RadioParams;
use crate::ctmc::CtmcConfig;
use crate::error::{Error, Result};
use crate::phy::{PhyConfig, PhyProfile};
use crate::scenario::DEFAULT_MIN_DISTANCE_M;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeploymentSection {
    pub n_bss: usize,
    /// Cubicle side D, meters.
    pub side_d: f64,
    /// Number of random drops K.
    pub drops: usize,
    pub master_seed: u64,
    /// Lower clamp on every link distance, meters.
    pub min_distance_m: f64,
}

impl Default for DeploymentSection {
    fn default() -> Self {
        DeploymentSection { n_bss: 2, side_d: 2.0, drops: 1000, master_seed: 1, min_distance_m: DEFAULT_MIN_DISTANCE_M }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficSection {
    pub alpha: f64,
}

impl Default for TrafficSection {
    fn default() -> Self {
        TrafficSection { alpha: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// CSV destination; standard output when absent.
    pub path: Option<String>,
    /// Emit per-drop and per-BSS rows in addition to aggregates.
    pub per_drop: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { path: None, per_drop: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub deployment: DeploymentSection,
    pub radio: RadioParams,
    pub phy: PhyConfig,
    pub policy: PolicySection,
    pub traffic: TrafficSection,
    pub ctmc: CtmcConfig,
    pub output: OutputSection,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn value_error(key: &str, message: impl Into<String>) -> Error {
    Error::ConfigValue { key: key.to_string(), message: message.into() }
}

pub fn parse_config(document: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(document).map_err(|e| {
        let line = e.span().map_or(0, |s| line_of(document, s.start));
        Error::ConfigSyntax { line, message: e.message().trim().to_string() }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let d = &self.deployment;
        if d.n_bss == 0 {
            return Err(value_error("deployment.n_bss", "must be at least 1"));
        }
        if !(d.side_d.is_finite() && d.side_d > 0.0) {
            return Err(value_error("deployment.side_d", "must be positive"));
        }
        if d.drops == 0 {
            return Err(value_error("deployment.drops", "must be at least 1"));
        }
        if !(d.min_distance_m.is_finite() && d.min_distance_m > 0.0) {
            return Err(value_error("deployment.min_distance_m", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.traffic.alpha) {
            return Err(value_error("traffic.alpha", format!("must lie in [0, 1], got {}", self.traffic.alpha)));
        }
        if self.ctmc.cw < 2 {
            return Err(value_error("ctmc.cw", "must be at least 2"));
        }
        if self.ctmc.state_cap == 0 {
            return Err(value_error("ctmc.state_cap", "must be at least 1"));
        }
        self.radio.validate()?;
        PhyProfile::from_config(&self.phy)?;
        let registry = PolicyRegistry::builtin();
        if !registry.contains(&self.policy.kind) {
            return Err(value_error(
                "policy.kind",
                format!(
                    "unknown policy `{}` (expected one of: {})",
                    self.policy.kind,
                    registry.names().collect::<Vec<_>>().join(", ")
                ),
            ));
        }
        for name in registry.names() {
            registry.build(name, &self.policy)?;
        }
        Ok(())
    }

    pub fn phy_profile(&self) -> Result<PhyProfile> {
        PhyProfile::from_config(&self.phy)
    }
}

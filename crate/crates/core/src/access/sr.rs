use serde::{Deserialize, Serialize};

use super::{sensed_power_transmitters, AccessPolicy, Activity, JoinDecision};
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// OBSS/PD spatial-reuse parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SrConfig {
    pub cca_thr_dbm: f64,
    pub obsspd_thr_dbm: f64,
    pub obsspd_min_dbm: f64,
    /// Reference power P_rx^ref used by the SR power limit.
    pub p_ref_dbm: f64,
}

impl Default for SrConfig {
    fn default() -> Self {
        SrConfig { cca_thr_dbm: -82.0, obsspd_thr_dbm: -72.0, obsspd_min_dbm: -82.0, p_ref_dbm: 21.0 }
    }
}

/// Transmit power allowed during an SR TXOP.
pub fn sr_power_limit(cfg: &SrConfig, p_max_dbm: f64) -> f64 {
    (cfg.p_ref_dbm - (cfg.obsspd_thr_dbm - cfg.obsspd_min_dbm)).min(p_max_dbm)
}

pub fn sr_join(sensed_dbm: f64, cfg: &SrConfig, p_max_dbm: f64, holder: Option<usize>) -> Result<JoinDecision> {
    if sensed_dbm < cfg.cca_thr_dbm {
        return Ok(JoinDecision::Full { tx_dbm: p_max_dbm });
    }
    if sensed_dbm < cfg.obsspd_thr_dbm {
        let holder = holder.ok_or_else(|| {
            Error::InvalidInput("spatial-reuse TXOP requested with no active full-power holder".into())
        })?;
        return Ok(JoinDecision::SrLimited { tx_dbm: sr_power_limit(cfg, p_max_dbm), holder });
    }
    Ok(JoinDecision::Blocked)
}

#[derive(Debug, Clone)]
pub struct SpatialReuse {
    pub cfg: SrConfig,
    pub p_max_dbm: f64,
}

impl AccessPolicy for SpatialReuse {
    fn name(&self) -> &'static str {
        "sr"
    }

    fn p_max_dbm(&self) -> f64 {
        self.p_max_dbm
    }

    fn join(&self, scenario: &Scenario, active: &Activity, bss: usize) -> Result<JoinDecision> {
        let sensed = sensed_power_transmitters(bss, active, scenario);
        sr_join(sensed, &self.cfg, self.p_max_dbm, active.first_full())
    }

    fn order_sensitive(&self) -> bool {
        true
    }
}

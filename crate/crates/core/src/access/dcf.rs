use serde::{Deserialize, Serialize};

use super::{sensed_power_transmitters, AccessPolicy, Activity, JoinDecision};
use crate::error::Result;
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DcfConfig {
    pub cca_thr_dbm: f64,
}

impl Default for DcfConfig {
    fn default() -> Self {
        DcfConfig { cca_thr_dbm: -82.0 }
    }
}

/// CCA test: the channel is idle only while the sensed power stays strictly
/// below the threshold.
pub fn dcf_join(sensed_dbm: f64, cfg: &DcfConfig, p_max_dbm: f64) -> JoinDecision {
    if sensed_dbm < cfg.cca_thr_dbm {
        JoinDecision::Full { tx_dbm: p_max_dbm }
    } else {
        JoinDecision::Blocked
    }
}

#[derive(Debug, Clone)]
pub struct Dcf {
    pub cfg: DcfConfig,
    pub p_max_dbm: f64,
}

impl AccessPolicy for Dcf {
    fn name(&self) -> &'static str {
        "dcf"
    }

    fn p_max_dbm(&self) -> f64 {
        self.p_max_dbm
    }

    fn join(&self, scenario: &Scenario, active: &Activity, bss: usize) -> Result<JoinDecision> {
        let sensed = sensed_power_transmitters(bss, active, scenario);
        Ok(dcf_join(sensed, &self.cfg, self.p_max_dbm))
    }

    fn order_sensitive(&self) -> bool {
        false
    }
}

use serde::{Deserialize, Serialize};

use super::{sensed_power_receivers, AccessPolicy, Activity, JoinDecision};
use crate::channel::sum_power_dbm;
use crate::error::Result;
use crate::scenario::Scenario;

/// Power at which the receivers of ongoing transmissions are assumed to emit
/// when a ConPA transmitter senses them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StaTxPower {
    /// Same power as the STA's own AP in the current state.
    #[default]
    MatchAp,
    /// Always the maximum transmit power.
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConPaConfig {
    pub p_min_dbm: f64,
    /// Mapping constant C, dB.
    pub c_db: f64,
    /// Filled from `policy.p_max_dbm`.
    #[serde(skip)]
    pub p_max_dbm: f64,
    pub sta_tx_power: StaTxPower,
    /// Add the noise floor to the sensed interference.
    pub include_noise: bool,
}

impl Default for ConPaConfig {
    fn default() -> Self {
        ConPaConfig {
            p_min_dbm: 1.0,
            c_db: -65.0,
            p_max_dbm: 20.0,
            sta_tx_power: StaTxPower::MatchAp,
            include_noise: false,
        }
    }
}

/// Interference-to-power mapping `clamp(C - P̄_rx, P_min, P_max)`. Never blocks.
pub fn conpa_power(p_bar_rx_dbm: f64, cfg: &ConPaConfig) -> JoinDecision {
    // -inf sensed power maps to +inf before the ceiling applies.
    let tx_dbm = (cfg.c_db - p_bar_rx_dbm).min(cfg.p_max_dbm).max(cfg.p_min_dbm);
    JoinDecision::ConPaLimited { tx_dbm }
}

#[derive(Debug, Clone)]
pub struct ConPa {
    pub cfg: ConPaConfig,
}

impl ConPa {
    fn sensed(&self, scenario: &Scenario, active: &Activity, bss: usize) -> f64 {
        let sta_power = match self.cfg.sta_tx_power {
            StaTxPower::MatchAp => None,
            StaTxPower::Max => Some(self.cfg.p_max_dbm),
        };
        let p = sensed_power_receivers(bss, active, scenario, sta_power);
        if self.cfg.include_noise {
            sum_power_dbm([p, scenario.radio.noise_dbm])
        } else {
            p
        }
    }
}

impl AccessPolicy for ConPa {
    fn name(&self) -> &'static str {
        "conpa"
    }

    fn p_max_dbm(&self) -> f64 {
        self.cfg.p_max_dbm
    }

    fn join(&self, scenario: &Scenario, active: &Activity, bss: usize) -> Result<JoinDecision> {
        Ok(conpa_power(self.sensed(scenario, active, bss), &self.cfg))
    }

    /// Recomputes powers in join order: each transmitter only senses the
    /// receivers of the transmissions that started before it.
    fn settle(&self, scenario: &Scenario, activity: Activity) -> Result<Activity> {
        let mut settled = Activity::empty();
        for e in activity.entries() {
            let decision = self.join(scenario, &settled, e.bss)?;
            let entry = decision.into_entry(e.bss).expect("ConPA never blocks");
            settled = settled.with(entry);
        }
        Ok(settled)
    }

    fn order_sensitive(&self) -> bool {
        true
    }
}

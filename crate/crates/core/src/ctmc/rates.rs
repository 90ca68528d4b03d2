use serde::{Deserialize, Serialize};

use super::CtmcState;
use crate::error::{Error, Result};
use crate::kpi::{link_of, LinkMetrics};

/// How the mean backoff duration is derived from the contention window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BackoffFormula {
    /// `E[BO] = (CW - 1) / 2 · T_e`, the mean of a uniform draw in `[0, CW-1]` slots.
    #[default]
    StandardMean,
    /// `E[BO] = 2 / (CW - 1) · T_e`.
    Reciprocal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams {
    pub cw: u32,
    /// Empty-slot duration, seconds.
    pub t_e: f64,
    /// Probability of having a packet ready when the backoff expires.
    pub alpha: f64,
    pub backoff_formula: BackoffFormula,
}

impl RateParams {
    pub fn validate(&self) -> Result<()> {
        if self.cw < 2 {
            return Err(Error::InvalidInput(format!("contention window must be >= 2, got {}", self.cw)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidInput(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if !(self.t_e.is_finite() && self.t_e > 0.0) {
            return Err(Error::InvalidInput(format!("slot duration must be positive, got {}", self.t_e)));
        }
        Ok(())
    }
}

pub fn expected_backoff(rp: &RateParams) -> f64 {
    let cw_minus_one = f64::from(rp.cw) - 1.0;
    match rp.backoff_formula {
        BackoffFormula::StandardMean => cw_minus_one / 2.0 * rp.t_e,
        BackoffFormula::Reciprocal => 2.0 / cw_minus_one * rp.t_e,
    }
}

/// Channel-access attempt rate `α / E[BO]`, in 1/s.
pub fn access_rate(rp: &RateParams) -> Result<f64> {
    rp.validate()?;
    Ok(rp.alpha / expected_backoff(rp))
}

/// Departure rate `1/T` of `bss` in `state`, with `T` the successful or
/// failed exchange duration depending on the state's SINR.
pub fn departure_rate(state: &CtmcState, bss: usize, links: &[LinkMetrics], mu_fail_uses_tfail: bool) -> Result<f64> {
    if !state.activity.contains(bss) {
        return Err(Error::InvalidInput(format!("BSS {bss} is not active in state {}", state.key)));
    }
    let link = link_of(links, bss)
        .ok_or_else(|| Error::InvalidInput(format!("no link metrics for BSS {bss} in state {}", state.key)))?;
    Ok(1.0 / link.txop_duration(mu_fail_uses_tfail))
}

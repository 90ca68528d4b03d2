//! Log-distance path loss with obstacles, plus received-power and SINR
//! arithmetic.
//!
//! Powers cross module boundaries in dBm. Aggregation happens in linear
//! milliwatts. Zero power is represented by [`ZERO_POWER_DBM`]
//! (negative infinity), which converts to exactly 0 mW.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Zero-power sentinel: `10·log10(0 mW)`.
pub const ZERO_POWER_DBM: f64 = f64::NEG_INFINITY;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioParams {
    /// Loss at the reference distance, dB.
    pub pl0: f64,
    /// Path-loss exponent.
    pub nu: f64,
    /// Shadowing factor, dB. Enters as the deterministic mean term σ/2.
    pub sigma: f64,
    /// Obstacles factor, dB per 10 m, halved.
    pub omega: f64,
    pub noise_dbm: f64,
    pub gain_tx_dbi: f64,
    pub gain_rx_dbi: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams { pl0: 5.0, nu: 4.4, sigma: 9.5, omega: 30.0, noise_dbm: -95.0, gain_tx_dbi: 0.0, gain_rx_dbi: 0.0 }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::ConfigValue { key: "radio.nu".into(), message: "must be positive".into() });
        }
        for (key, v) in [
            ("radio.pl0", self.pl0),
            ("radio.sigma", self.sigma),
            ("radio.omega", self.omega),
            ("radio.noise_dbm", self.noise_dbm),
            ("radio.gain_tx_dbi", self.gain_tx_dbi),
            ("radio.gain_rx_dbi", self.gain_rx_dbi),
        ] {
            if !v.is_finite() {
                return Err(Error::ConfigValue { key: key.into(), message: "must be finite".into() });
            }
        }
        Ok(())
    }
}

pub fn path_loss(d: f64, p: &RadioParams) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidInput(format!("path loss needs a positive distance, got {d}")));
    }
    Ok(p.pl0 + 10.0 * p.nu * d.log10() + p.sigma / 2.0 + (p.omega / 2.0) * (d / 10.0))
}

pub fn rx_power(tx_dbm: f64, d: f64, p: &RadioParams) -> Result<f64> {
    Ok(tx_dbm + p.gain_tx_dbi + p.gain_rx_dbi - path_loss(d, p)?)
}

#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

#[inline]
pub fn mw_to_dbm(mw: f64) -> f64 {
    if mw <= 0.0 {
        ZERO_POWER_DBM
    } else {
        10.0 * mw.log10()
    }
}

/// Aggregate power of independent signals. A single non-zero contribution is
/// returned unchanged, so the dB → mW → dB conversion never perturbs it.
pub fn sum_power_dbm<I>(levels: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut total_mw = 0.0;
    let mut only = None;
    let mut count = 0usize;
    for level in levels {
        if level == ZERO_POWER_DBM {
            continue;
        }
        count += 1;
        only = Some(level);
        total_mw += dbm_to_mw(level);
    }
    match (count, only) {
        (1, Some(level)) => level,
        _ => mw_to_dbm(total_mw),
    }
}

pub fn sinr(signal_dbm: f64, interferers: &[f64], p: &RadioParams) -> f64 {
    let floor = sum_power_dbm(interferers.iter().copied().chain(std::iter::once(p.noise_dbm)));
    signal_dbm - floor
}

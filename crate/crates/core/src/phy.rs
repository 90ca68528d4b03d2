//! 802.11ax PHY profile: MCS table, A-MPDU sizing under the TXOP limit and
//! RTS/CTS exchange durations for successful and failed transmissions.
//!
//! Control-frame durations and MCS sensitivity thresholds are configurable
//! defaults, not measured values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MODULATIONS: [(&str, &str); 12] = [
    ("BPSK", "1/2"),
    ("QPSK", "1/2"),
    ("QPSK", "3/4"),
    ("16-QAM", "1/2"),
    ("16-QAM", "3/4"),
    ("64-QAM", "2/3"),
    ("64-QAM", "3/4"),
    ("64-QAM", "5/6"),
    ("256-QAM", "3/4"),
    ("256-QAM", "5/6"),
    ("1024-QAM", "3/4"),
    ("1024-QAM", "5/6"),
];

/// HE-MCS 0..11 single-stream rates at 80 MHz, 0.8 µs GI.
pub const DEFAULT_RATES_MBPS: [f64; 12] =
    [36.0, 72.1, 108.1, 144.1, 216.2, 288.2, 324.3, 360.3, 432.4, 480.4, 540.4, 600.5];

/// Minimum RSSI per MCS for PER ≤ 10% at 80 MHz (20 MHz receiver minimum
/// sensitivities shifted by +6 dB).
pub const DEFAULT_MIN_RSSI_DBM: [f64; 12] =
    [-76.0, -73.0, -71.0, -68.0, -64.0, -60.0, -59.0, -58.0, -53.0, -51.0, -48.0, -46.0];

#[derive(Debug, Clone, PartialEq)]
pub struct McsEntry {
    pub index: usize,
    pub modulation: String,
    pub coding_rate: String,
    pub rate_per_ss_bps: f64,
    pub min_rssi_dbm: f64,
}

/// Serializable PHY section of the run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhyConfig {
    pub bandwidth_hz: f64,
    /// Reported only; the path-loss model has no frequency term.
    pub carrier_hz: f64,
    pub suss: u32,
    pub t_empty_slot_s: f64,
    pub t_sifs_s: f64,
    pub t_difs_s: f64,
    pub t_rts_s: f64,
    pub t_cts_s: f64,
    pub t_ack_s: f64,
    pub t_phy_preamble_s: f64,
    pub mac_overhead_bits: f64,
    pub l_data_bits: f64,
    pub txop_max_s: f64,
    pub max_aggregation_cap: usize,
    pub capture_threshold_db: f64,
    pub mcs_rates_mbps: Vec<f64>,
    pub mcs_min_rssi_dbm: Vec<f64>,
}

impl Default for PhyConfig {
    fn default() -> Self {
        PhyConfig {
            bandwidth_hz: 80e6,
            carrier_hz: 6e9,
            suss: 2,
            t_empty_slot_s: 9e-6,
            t_sifs_s: 16e-6,
            t_difs_s: 34e-6,
            t_rts_s: 28e-6,
            t_cts_s: 24e-6,
            t_ack_s: 28e-6,
            t_phy_preamble_s: 40e-6,
            mac_overhead_bits: 320.0,
            l_data_bits: 12000.0,
            txop_max_s: 5.484e-3,
            max_aggregation_cap: 256,
            capture_threshold_db: 10.0,
            mcs_rates_mbps: DEFAULT_RATES_MBPS.to_vec(),
            mcs_min_rssi_dbm: DEFAULT_MIN_RSSI_DBM.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhyProfile {
    pub mcs_table: Vec<McsEntry>,
    pub bandwidth_hz: f64,
    pub carrier_hz: f64,
    pub suss: u32,
    pub t_empty_slot_s: f64,
    pub t_sifs_s: f64,
    pub t_difs_s: f64,
    pub t_rts_s: f64,
    pub t_cts_s: f64,
    pub t_ack_s: f64,
    pub t_phy_preamble_s: f64,
    pub mac_overhead_bits: f64,
    pub l_data_bits: f64,
    pub txop_max_s: f64,
    pub max_aggregation_cap: usize,
    /// Capture-effect threshold γ_CE, dB.
    pub capture_threshold_db: f64,
}

impl Default for PhyProfile {
    fn default() -> Self {
        PhyProfile::from_config(&PhyConfig::default()).expect("default PHY profile is valid")
    }
}

fn bad(key: &str, message: impl Into<String>) -> Error {
    Error::ConfigValue { key: format!("phy.{key}"), message: message.into() }
}

impl PhyProfile {
    pub fn from_config(c: &PhyConfig) -> Result<Self> {
        for (key, v) in [
            ("bandwidth_hz", c.bandwidth_hz),
            ("t_empty_slot_s", c.t_empty_slot_s),
            ("t_sifs_s", c.t_sifs_s),
            ("t_difs_s", c.t_difs_s),
            ("t_rts_s", c.t_rts_s),
            ("t_cts_s", c.t_cts_s),
            ("t_ack_s", c.t_ack_s),
            ("t_phy_preamble_s", c.t_phy_preamble_s),
            ("l_data_bits", c.l_data_bits),
            ("txop_max_s", c.txop_max_s),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(key, "must be positive"));
            }
        }
        if !(c.mac_overhead_bits.is_finite() && c.mac_overhead_bits >= 0.0) {
            return Err(bad("mac_overhead_bits", "must be non-negative"));
        }
        if !c.capture_threshold_db.is_finite() {
            return Err(bad("capture_threshold_db", "must be finite"));
        }
        if c.suss == 0 {
            return Err(bad("suss", "must be at least 1"));
        }
        if c.max_aggregation_cap == 0 {
            return Err(bad("max_aggregation_cap", "must be at least 1"));
        }
        if c.mcs_rates_mbps.is_empty() || c.mcs_rates_mbps.len() > MODULATIONS.len() {
            return Err(bad("mcs_rates_mbps", "needs between 1 and 12 entries"));
        }
        if c.mcs_rates_mbps.len() != c.mcs_min_rssi_dbm.len() {
            return Err(bad("mcs_min_rssi_dbm", "must have one entry per MCS rate"));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]) && v.iter().all(|x| x.is_finite());
        if !increasing(&c.mcs_rates_mbps) || c.mcs_rates_mbps[0] <= 0.0 {
            return Err(bad("mcs_rates_mbps", "must be positive and strictly increasing"));
        }
        if !increasing(&c.mcs_min_rssi_dbm) {
            return Err(bad("mcs_min_rssi_dbm", "must be strictly increasing"));
        }

        let mcs_table = c
            .mcs_rates_mbps
            .iter()
            .zip(&c.mcs_min_rssi_dbm)
            .enumerate()
            .map(|(index, (&rate, &rssi))| McsEntry {
                index,
                modulation: MODULATIONS[index].0.to_string(),
                coding_rate: MODULATIONS[index].1.to_string(),
                rate_per_ss_bps: rate * 1e6,
                min_rssi_dbm: rssi,
            })
            .collect();

        Ok(PhyProfile {
            mcs_table,
            bandwidth_hz: c.bandwidth_hz,
            carrier_hz: c.carrier_hz,
            suss: c.suss,
            t_empty_slot_s: c.t_empty_slot_s,
            t_sifs_s: c.t_sifs_s,
            t_difs_s: c.t_difs_s,
            t_rts_s: c.t_rts_s,
            t_cts_s: c.t_cts_s,
            t_ack_s: c.t_ack_s,
            t_phy_preamble_s: c.t_phy_preamble_s,
            mac_overhead_bits: c.mac_overhead_bits,
            l_data_bits: c.l_data_bits,
            txop_max_s: c.txop_max_s,
            max_aggregation_cap: c.max_aggregation_cap,
            capture_threshold_db: c.capture_threshold_db,
        })
    }
}

pub fn data_rate(mcs: &McsEntry, profile: &PhyProfile) -> f64 {
    mcs.rate_per_ss_bps * profile.suss as f64
}

/// Highest MCS whose sensitivity threshold is met; `None` means outage.
pub fn select_mcs(rssi_dbm: f64, profile: &PhyProfile) -> Option<&McsEntry> {
    profile.mcs_table.iter().rev().find(|m| m.min_rssi_dbm <= rssi_dbm)
}

pub fn tx_duration_fail(profile: &PhyProfile) -> f64 {
    profile.t_rts_s + profile.t_sifs_s + profile.t_cts_s + profile.t_difs_s + profile.t_empty_slot_s
}

/// Duration of the A-MPDU data segment including its PHY preamble.
pub fn data_duration(n_agg: usize, mcs: &McsEntry, profile: &PhyProfile) -> f64 {
    profile.t_phy_preamble_s
        + n_agg as f64 * (profile.l_data_bits + profile.mac_overhead_bits) / data_rate(mcs, profile)
}

pub fn tx_duration_success(n_agg: usize, mcs: &McsEntry, profile: &PhyProfile) -> f64 {
    profile.t_rts_s
        + 3.0 * profile.t_sifs_s
        + profile.t_cts_s
        + data_duration(n_agg, mcs, profile)
        + profile.t_ack_s
        + profile.t_difs_s
        + profile.t_empty_slot_s
}

/// Largest A-MPDU size whose successful exchange fits in the TXOP limit,
/// clamped to `[1, max_aggregation_cap]`.
pub fn max_aggregation(mcs: &McsEntry, profile: &PhyProfile) -> usize {
    let fits = |n: usize| tx_duration_success(n, mcs, profile) <= profile.txop_max_s;
    if !fits(1) {
        return 1;
    }
    // invariant: fits(lo) && (hi == cap + 1 || !fits(hi))
    let (mut lo, mut hi) = (1usize, profile.max_aggregation_cap + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

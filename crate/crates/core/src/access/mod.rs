//! Channel-access policies.
//!
//! Each mechanism implements [`AccessPolicy`]: given the ongoing
//! transmissions it decides whether an idle BSS may start one and at which
//! power. Policies are looked up by name in a [`PolicyRegistry`] so the
//! experiment driver can select them from configuration.

mod activity;
mod conpa;
mod dcf;
mod registry;
mod sr;

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

pub use activity::{bss_label, Activity, Entry, JoinDecision, JoinKind, KeyKind, StateKey};
pub use conpa::{conpa_power, ConPa, ConPaConfig, StaTxPower};
pub use dcf::{dcf_join, Dcf, DcfConfig};
pub use registry::{PolicyFactory, PolicyRegistry};
pub use sr::{sr_join, sr_power_limit, SpatialReuse, SrConfig};

use crate::channel::sum_power_dbm;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

pub trait AccessPolicy: Debug + Send + Sync {
    /// Registry name (`dcf`, `sr`, `conpa`).
    fn name(&self) -> &'static str;

    /// Maximum transmit power, dBm.
    fn p_max_dbm(&self) -> f64;

    /// Decides how the idle BSS `bss` joins the ongoing `active` transmissions.
    fn join(&self, scenario: &Scenario, active: &Activity, bss: usize) -> Result<JoinDecision>;

    /// Re-derives transmit powers after a departure. Policies whose powers do
    /// not depend on the remaining transmissions return the input unchanged.
    fn settle(&self, _scenario: &Scenario, activity: Activity) -> Result<Activity> {
        Ok(activity)
    }

    /// Whether the join order distinguishes otherwise identical sets of
    /// transmissions.
    fn order_sensitive(&self) -> bool;

    fn state_key(&self, activity: &Activity) -> StateKey {
        activity.key(self.order_sensitive())
    }

    /// The activity left after `bss` ends its TXOP, with powers settled.
    fn depart(&self, scenario: &Scenario, activity: &Activity, bss: usize) -> Result<Activity> {
        if !activity.has_own_clock(bss) {
            return Err(Error::InvalidInput(format!("BSS {bss} has no departure of its own in this state")));
        }
        self.settle(scenario, activity.without(bss))
    }
}

/// Aggregate power sensed at `bss`'s AP from the APs currently transmitting.
pub fn sensed_power_transmitters(bss: usize, active: &Activity, scenario: &Scenario) -> f64 {
    let at = scenario.ap(bss);
    sum_power_dbm(
        active.entries().iter().filter(|e| e.bss != bss).map(|e| scenario.rx_power(e.tx_dbm, scenario.ap(e.bss), at)),
    )
}

/// Aggregate power sensed at `bss`'s AP from the receivers (STAs) of the
/// ongoing transmissions. Each STA emits at its own AP's current power, or at
/// `sta_power_override` when given.
pub fn sensed_power_receivers(
    bss: usize,
    active: &Activity,
    scenario: &Scenario,
    sta_power_override: Option<f64>,
) -> f64 {
    let at = scenario.ap(bss);
    sum_power_dbm(active.entries().iter().filter(|e| e.bss != bss).map(|e| {
        let tx = sta_power_override.unwrap_or(e.tx_dbm);
        scenario.rx_power(tx, scenario.sta(e.bss), at)
    }))
}

/// Policy section of the run configuration: the selected kind plus the
/// parameters of every registered policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicySection {
    pub kind: String,
    pub p_max_dbm: f64,
    pub dcf: DcfConfig,
    pub sr: SrConfig,
    pub conpa: ConPaConfig,
}

impl Default for PolicySection {
    fn default() -> Self {
        PolicySection {
            kind: "conpa".to_string(),
            p_max_dbm: 20.0,
            dcf: DcfConfig::default(),
            sr: SrConfig::default(),
            conpa: ConPaConfig::default(),
        }
    }
}

/// The resolved parameters of one policy.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyConfig {
    Dcf(DcfConfig),
    Sr(SrConfig),
    ConPa(ConPaConfig),
}

impl PolicyConfig {
    pub fn validate(&self, p_max_dbm: f64) -> Result<()> {
        let bad = |key: &str, message: &str| Error::ConfigValue { key: key.into(), message: message.into() };
        if !p_max_dbm.is_finite() {
            return Err(bad("policy.p_max_dbm", "must be finite"));
        }
        match self {
            PolicyConfig::Dcf(c) if !c.cca_thr_dbm.is_finite() => Err(bad("policy.dcf.cca_thr_dbm", "must be finite")),
            PolicyConfig::Sr(c) => {
                let all = [c.cca_thr_dbm, c.obsspd_thr_dbm, c.obsspd_min_dbm, c.p_ref_dbm];
                if all.iter().any(|v| !v.is_finite()) {
                    Err(bad("policy.sr", "thresholds must be finite"))
                } else if c.obsspd_thr_dbm < c.cca_thr_dbm {
                    Err(bad("policy.sr.obsspd_thr_dbm", "must be >= cca_thr_dbm"))
                } else {
                    Ok(())
                }
            }
            PolicyConfig::ConPa(c) => {
                if !c.p_min_dbm.is_finite() || !c.c_db.is_finite() {
                    Err(bad("policy.conpa", "p_min_dbm and c_db must be finite"))
                } else if c.p_min_dbm > p_max_dbm {
                    Err(bad("policy.conpa.p_min_dbm", "must be <= policy.p_max_dbm"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{RadioParams, ZERO_POWER_DBM};
    use crate::deployment::{Deployment, Point};
    use crate::phy::PhyProfile;

    fn scenario(pairs: &[(Point, Point)]) -> Scenario {
        Scenario::new(Deployment::from_positions(pairs), RadioParams::default(), PhyProfile::default(), 0.1).unwrap()
    }

    fn full(bss: usize, tx_dbm: f64) -> Entry {
        Entry { bss, tx_dbm, kind: JoinKind::Full }
    }

    #[test]
    fn transmitter_sensing() {
        let s =
            scenario(&[(Point::new(0.0, 0.0), Point::new(0.0, 1.0)), (Point::new(10.0, 0.0), Point::new(10.0, 1.0))]);
        assert_eq!(sensed_power_transmitters(0, &Activity::empty(), &s), ZERO_POWER_DBM);
        let one = Activity::empty().with(full(1, 20.0));
        assert!((sensed_power_transmitters(0, &one, &s) - -48.75).abs() < 1e-12);
    }

    #[test]
    fn transmitter_sensing_sums_linearly() {
        // Two APs 10 m away transmitting at 8.75 dBm each arrive at -60 dBm.
        let s = scenario(&[
            (Point::new(0.0, 0.0), Point::new(0.0, 1.0)),
            (Point::new(10.0, 0.0), Point::new(10.0, 1.0)),
            (Point::new(0.0, 10.0), Point::new(1.0, 10.0)),
        ]);
        let act = Activity::empty().with(full(1, 8.75)).with(full(2, 8.75));
        let got = sensed_power_transmitters(0, &act, &s);
        assert!((got - 10.0 * 2e-6f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn receiver_sensing() {
        let s = scenario(&[
            (Point::new(0.0, 0.0), Point::new(0.0, 0.5)),
            (Point::new(5.0, 0.0), Point::new(1.0, 0.0)),
            (Point::new(0.0, 5.0), Point::new(0.0, 2.0)),
        ]);
        assert_eq!(sensed_power_receivers(0, &Activity::empty(), &s, None), ZERO_POWER_DBM);
        let one = Activity::empty().with(full(1, 20.0));
        assert!((sensed_power_receivers(0, &one, &s, None) - 8.75).abs() < 1e-12);

        let two = one.with(full(2, 14.0));
        let brute = 10.0
            * (10f64.powf((20.0 - 11.25) / 10.0)
                + 10f64.powf((14.0 - (5.0 + 44.0 * 2f64.log10() + 4.75 + 3.0)) / 10.0))
            .log10();
        assert!((sensed_power_receivers(0, &two, &s, None) - brute).abs() < 1e-9);
        // Overriding STA power ignores the AP power.
        assert!((sensed_power_receivers(0, &one, &s, Some(0.0)) - -11.25).abs() < 1e-12);
    }

    #[test]
    fn policy_validation() {
        let sr = SrConfig { obsspd_thr_dbm: -90.0, ..SrConfig::default() };
        assert!(PolicyConfig::Sr(sr).validate(20.0).is_err());
        let cp = ConPaConfig { p_min_dbm: 25.0, ..ConPaConfig::default() };
        assert!(PolicyConfig::ConPa(cp).validate(20.0).is_err());
        assert!(PolicyConfig::Dcf(DcfConfig::default()).validate(20.0).is_ok());
    }
}

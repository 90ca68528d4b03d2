use crate::channel::{self, RadioParams};
use crate::deployment::{self, Deployment, Point};
use crate::error::{Error, Result};
use crate::phy::PhyProfile;

/// Default lower bound on link distances. The log-distance model diverges at 0.
pub const DEFAULT_MIN_DISTANCE_M: f64 = 0.1;

/// One deployment together with the radio and PHY constants it is evaluated under.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub deployment: Deployment,
    pub radio: RadioParams,
    pub phy: PhyProfile,
    min_distance_m: f64,
}

impl Scenario {
    pub fn new(deployment: Deployment, radio: RadioParams, phy: PhyProfile, min_distance_m: f64) -> Result<Self> {
        if !(min_distance_m.is_finite() && min_distance_m > 0.0) {
            return Err(Error::InvalidInput(format!("minimum distance must be positive, got {min_distance_m}")));
        }
        let finite = |p: Point| p.x.is_finite() && p.y.is_finite();
        if let Some(b) = deployment.bss_list.iter().find(|b| !finite(b.ap) || !finite(b.sta)) {
            return Err(Error::InvalidInput(format!("BSS {} has a non-finite position", b.id)));
        }
        radio.validate()?;
        Ok(Scenario { deployment, radio, phy, min_distance_m })
    }

    pub fn n_bss(&self) -> usize {
        self.deployment.len()
    }

    pub fn min_distance_m(&self) -> f64 {
        self.min_distance_m
    }

    pub fn ap(&self, bss: usize) -> Point {
        self.deployment.bss_list[bss].ap
    }

    pub fn sta(&self, bss: usize) -> Point {
        self.deployment.bss_list[bss].sta
    }

    /// Link distance with the minimum-separation clamp applied.
    pub fn link_distance(&self, a: Point, b: Point) -> f64 {
        deployment::distance(a, b).max(self.min_distance_m)
    }

    pub fn rx_power(&self, tx_dbm: f64, from: Point, to: Point) -> f64 {
        channel::rx_power(tx_dbm, self.link_distance(from, to), &self.radio)
            .expect("clamped link distance is positive and finite")
    }
}

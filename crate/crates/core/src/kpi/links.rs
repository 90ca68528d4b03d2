use crate::access::Activity;
use crate::channel::{sinr, sum_power_dbm};
use crate::phy::{data_rate, max_aggregation, select_mcs, tx_duration_fail, tx_duration_success};
use crate::scenario::Scenario;

/// Downlink quality of one active BSS in one chain state.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkMetrics {
    pub bss: usize,
    pub tx_dbm: f64,
    /// Signal power at the BSS's own STA.
    pub rssi_dbm: f64,
    /// Aggregate power at the STA from the other active APs.
    pub interference_dbm: f64,
    pub sinr_db: f64,
    /// `None` when the RSSI is below the MCS0 sensitivity (outage).
    pub mcs: Option<usize>,
    pub n_agg: usize,
    /// Zero in outage.
    pub rate_bps: f64,
    /// Successful-exchange duration. Outage links use MCS0 here.
    pub t_success_s: f64,
    pub t_fail_s: f64,
    /// SINR reaches the capture threshold and the link is not in outage.
    pub decodable: bool,
}

impl LinkMetrics {
    /// TXOP duration that governs the departure of this transmission.
    pub fn txop_duration(&self, mu_fail_uses_tfail: bool) -> f64 {
        if self.decodable || !mu_fail_uses_tfail {
            self.t_success_s
        } else {
            self.t_fail_s
        }
    }

    /// Payload bits delivered per second of TXOP while this state lasts.
    pub fn delivered_rate_bps(&self, l_data_bits: f64) -> f64 {
        if self.decodable {
            self.n_agg as f64 * l_data_bits / self.t_success_s
        } else {
            0.0
        }
    }
}

/// Per-state link metrics: one entry per active BSS, in join order.
pub type StateLinkMetrics = Vec<LinkMetrics>;

pub fn evaluate_links(scenario: &Scenario, activity: &Activity) -> StateLinkMetrics {
    let phy = &scenario.phy;
    activity
        .entries()
        .iter()
        .map(|e| {
            let sta = scenario.sta(e.bss);
            let rssi_dbm = scenario.rx_power(e.tx_dbm, scenario.ap(e.bss), sta);
            let interferers: Vec<f64> = activity
                .entries()
                .iter()
                .filter(|o| o.bss != e.bss)
                .map(|o| scenario.rx_power(o.tx_dbm, scenario.ap(o.bss), sta))
                .collect();
            let sinr_db = sinr(rssi_dbm, &interferers, &scenario.radio);
            let chosen = select_mcs(rssi_dbm, phy);
            let mcs_entry = chosen.unwrap_or(&phy.mcs_table[0]);
            let n_agg = max_aggregation(mcs_entry, phy);
            LinkMetrics {
                bss: e.bss,
                tx_dbm: e.tx_dbm,
                rssi_dbm,
                interference_dbm: sum_power_dbm(interferers.iter().copied()),
                sinr_db,
                mcs: chosen.map(|m| m.index),
                n_agg,
                rate_bps: chosen.map_or(0.0, |m| data_rate(m, phy)),
                t_success_s: tx_duration_success(n_agg, mcs_entry, phy),
                t_fail_s: tx_duration_fail(phy),
                decodable: chosen.is_some() && sinr_db >= phy.capture_threshold_db,
            }
        })
        .collect()
}

pub fn link_of(links: &[LinkMetrics], bss: usize) -> Option<&LinkMetrics> {
    links.iter().find(|l| l.bss == bss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::{Entry, JoinKind};
    use crate::channel::RadioParams;
    use crate::deployment::{Deployment, Point};
    use crate::phy::PhyProfile;

    fn two_links() -> Scenario {
        Scenario::new(
            Deployment::from_positions(&[
                (Point::new(0.0, 0.0), Point::new(10.0, 0.0)),
                (Point::new(100.0, 0.0), Point::new(101.0, 0.0)),
            ]),
            RadioParams::default(),
            PhyProfile::default(),
            0.1,
        )
        .unwrap()
    }

    #[test]
    fn solo_link_budget() {
        let s = two_links();
        let act = Activity::empty().with(Entry { bss: 0, tx_dbm: 20.0, kind: JoinKind::Full });
        let l = &evaluate_links(&s, &act)[0];
        assert!((l.rssi_dbm - -48.75).abs() < 1e-12);
        assert!((l.sinr_db - 46.25).abs() < 1e-12);
        assert_eq!(l.mcs, Some(9));
        assert_eq!(l.n_agg, 256);
        assert!(l.decodable);
        assert_eq!(l.txop_duration(true), l.t_success_s);
    }

    #[test]
    fn outage_is_never_decodable() {
        let s = two_links();
        // 10 m at -20 dBm gives -88.75 dBm, below MCS0 sensitivity.
        let act = Activity::empty().with(Entry { bss: 0, tx_dbm: -20.0, kind: JoinKind::Full });
        let l = &evaluate_links(&s, &act)[0];
        assert_eq!(l.mcs, None);
        assert!(!l.decodable);
        assert_eq!(l.rate_bps, 0.0);
        assert_eq!(l.delivered_rate_bps(12000.0), 0.0);
        assert_eq!(l.txop_duration(true), l.t_fail_s);
        assert_eq!(l.txop_duration(false), l.t_success_s);
    }
}

//! Per-BSS performance indicators derived from the steady-state
//! distribution: throughput, airtime, airtime efficiency, mean MCS and mean
//! SINR.
//!
//! Averages of MCS and SINR are π-weighted over the states in which the BSS
//! transmits. SINR is averaged in dB. Throughput credits each decodable state
//! with `N_a · L_D / T_succ`, the payload rate of one TXOP.

mod links;

pub use links::{evaluate_links, link_of, LinkMetrics, StateLinkMetrics};

use crate::ctmc::{ChainAnalysis, StateSpace};

#[derive(Debug, Clone, PartialEq)]
pub struct BssKpi {
    pub bss: usize,
    pub throughput_bps: f64,
    pub airtime_pct: f64,
    /// 100 when the BSS never transmits; see `idle`.
    pub airtime_efficiency_pct: f64,
    pub mean_mcs: Option<f64>,
    pub mean_sinr_db: Option<f64>,
    /// The BSS has zero airtime.
    pub idle: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KpiReport {
    pub per_bss: Vec<BssKpi>,
    pub mean_throughput_bps: f64,
    pub min_throughput_bps: f64,
    pub mean_airtime_pct: f64,
    pub min_airtime_pct: f64,
    pub mean_airtime_efficiency_pct: f64,
    pub mean_mcs: Option<f64>,
    pub mean_sinr_db: Option<f64>,
}

fn active_states(links: &[StateLinkMetrics], bss: usize) -> impl Iterator<Item = (usize, &LinkMetrics)> {
    links.iter().enumerate().filter_map(move |(s, l)| link_of(l, bss).map(|m| (s, m)))
}

pub fn throughput(pi: &[f64], links: &[StateLinkMetrics], bss: usize, l_data_bits: f64) -> f64 {
    active_states(links, bss).map(|(s, m)| pi[s] * m.delivered_rate_bps(l_data_bits)).sum()
}

pub fn airtime(pi: &[f64], space: &StateSpace, bss: usize) -> f64 {
    100.0 * space.states.iter().zip(pi).filter(|(s, _)| s.activity.contains(bss)).map(|(_, p)| p).sum::<f64>()
}

pub fn airtime_efficiency(pi: &[f64], links: &[StateLinkMetrics], bss: usize) -> f64 {
    let (mut active, mut ok) = (0.0, 0.0);
    for (s, m) in active_states(links, bss) {
        active += pi[s];
        if m.decodable {
            ok += pi[s];
        }
    }
    if active > 0.0 {
        100.0 * ok / active
    } else {
        100.0
    }
}

fn weighted_mean<'a>(pi: &[f64], items: impl Iterator<Item = (usize, Option<f64>)> + 'a) -> Option<f64> {
    let (mut w, mut acc) = (0.0, 0.0);
    for (s, v) in items {
        if let Some(v) = v {
            w += pi[s];
            acc += pi[s] * v;
        }
    }
    (w > 0.0).then(|| acc / w)
}

/// π-weighted MCS index over active, non-outage states.
pub fn mean_mcs(pi: &[f64], links: &[StateLinkMetrics], bss: usize) -> Option<f64> {
    weighted_mean(pi, active_states(links, bss).map(|(s, m)| (s, m.mcs.map(|i| i as f64))))
}

pub fn mean_sinr(pi: &[f64], links: &[StateLinkMetrics], bss: usize) -> Option<f64> {
    weighted_mean(pi, active_states(links, bss).map(|(s, m)| (s, Some(m.sinr_db))))
}

pub fn bss_kpi(pi: &[f64], space: &StateSpace, links: &[StateLinkMetrics], bss: usize, l_data_bits: f64) -> BssKpi {
    let airtime_pct = airtime(pi, space, bss);
    BssKpi {
        bss,
        throughput_bps: throughput(pi, links, bss, l_data_bits),
        airtime_pct,
        airtime_efficiency_pct: airtime_efficiency(pi, links, bss),
        mean_mcs: mean_mcs(pi, links, bss),
        mean_sinr_db: mean_sinr(pi, links, bss),
        idle: airtime_pct == 0.0,
    }
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (n, s) = v.fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

fn mean_present(v: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let xs: Vec<f64> = v.flatten().collect();
    (!xs.is_empty()).then(|| mean(xs.into_iter()))
}

impl KpiReport {
    pub fn from_bss(per_bss: Vec<BssKpi>) -> Self {
        let min = |f: fn(&BssKpi) -> f64| per_bss.iter().map(f).fold(f64::INFINITY, f64::min);
        KpiReport {
            mean_throughput_bps: mean(per_bss.iter().map(|k| k.throughput_bps)),
            min_throughput_bps: min(|k| k.throughput_bps),
            mean_airtime_pct: mean(per_bss.iter().map(|k| k.airtime_pct)),
            min_airtime_pct: min(|k| k.airtime_pct),
            mean_airtime_efficiency_pct: mean(per_bss.iter().map(|k| k.airtime_efficiency_pct)),
            mean_mcs: mean_present(per_bss.iter().map(|k| k.mean_mcs)),
            mean_sinr_db: mean_present(per_bss.iter().map(|k| k.mean_sinr_db)),
            per_bss,
        }
    }
}

pub fn compute_kpis(analysis: &ChainAnalysis, l_data_bits: f64) -> KpiReport {
    let per_bss = (0..analysis.space.n_bss)
        .map(|b| bss_kpi(analysis.pi(), &analysis.space, &analysis.links, b, l_data_bits))
        .collect();
    KpiReport::from_bss(per_bss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::{Activity, Entry, JoinKind};
    use crate::ctmc::{CtmcState, StateSpace};

    fn link(bss: usize, mcs: Option<usize>, sinr_db: f64, decodable: bool, n_agg: usize, t: f64) -> LinkMetrics {
        LinkMetrics {
            bss,
            tx_dbm: 20.0,
            rssi_dbm: -40.0,
            interference_dbm: f64::NEG_INFINITY,
            sinr_db,
            mcs,
            n_agg,
            rate_bps: 1e9,
            t_success_s: t,
            t_fail_s: 1e-4,
            decodable,
        }
    }

    fn space(states: &[&[usize]]) -> StateSpace {
        let states = states
            .iter()
            .map(|bs| {
                let a = Activity::from_entries(
                    bs.iter().map(|&bss| Entry { bss, tx_dbm: 20.0, kind: JoinKind::Full }).collect(),
                );
                CtmcState { key: a.key(true), activity: a }
            })
            .collect();
        StateSpace::from_parts(2, states, vec![]).unwrap()
    }

    #[test]
    fn throughput_examples() {
        let links = vec![vec![], vec![link(0, Some(11), 40.0, true, 10, 1e-3)]];
        let pi = [1.0 / 3.0, 2.0 / 3.0];
        let g = throughput(&pi, &links, 0, 12000.0);
        assert!((g - 8.0e7).abs() < 1e-6, "{g}");
        assert_eq!(throughput(&pi, &links, 1, 12000.0), 0.0);

        let failed = vec![vec![], vec![link(0, Some(11), 3.0, false, 10, 1e-3)]];
        assert_eq!(throughput(&pi, &failed, 0, 12000.0), 0.0);
    }

    #[test]
    fn airtime_and_efficiency() {
        let sp = space(&[&[], &[0], &[1], &[0, 1]]);
        let pi = [0.1, 0.3, 0.2, 0.4];
        assert!((airtime(&pi, &sp, 0) - 70.0).abs() < 1e-12);
        assert!((airtime(&pi, &sp, 1) - 60.0).abs() < 1e-12);

        let links = vec![
            vec![],
            vec![link(0, Some(9), 30.0, true, 1, 1e-3)],
            vec![link(1, Some(9), 30.0, true, 1, 1e-3)],
            vec![link(0, Some(3), 5.0, false, 1, 1e-3), link(1, Some(3), 12.0, true, 1, 1e-3)],
        ];
        assert!((airtime_efficiency(&pi, &links, 0) - 100.0 * 0.3 / 0.7).abs() < 1e-12);
        assert!((airtime_efficiency(&pi, &links, 1) - 100.0).abs() < 1e-12);

        let half = [0.0, 0.5, 0.0, 0.5];
        assert!((airtime_efficiency(&half, &links, 0) - 50.0).abs() < 1e-12);
        let none = vec![vec![], vec![link(0, Some(1), 1.0, false, 1, 1e-3)]];
        assert_eq!(airtime_efficiency(&[0.5, 0.5], &none, 0), 0.0);
        assert_eq!(airtime_efficiency(&[1.0, 0.0], &none, 0), 100.0);
    }

    #[test]
    fn weighted_means() {
        let single = vec![vec![], vec![link(0, Some(7), 20.0, true, 1, 1e-3)]];
        assert_eq!(mean_mcs(&[0.5, 0.5], &single, 0), Some(7.0));

        let two = vec![vec![link(0, Some(4), 40.0, true, 1, 1e-3)], vec![link(0, Some(8), 10.0, true, 1, 1e-3)]];
        assert_eq!(mean_mcs(&[0.3, 0.3], &two, 0), Some(6.0));
        let s = mean_sinr(&[0.75, 0.25], &two, 0).unwrap();
        assert!((s - 32.5).abs() < 1e-12);
        assert_eq!(mean_mcs(&[0.3, 0.3], &two, 1), None);
        assert_eq!(mean_sinr(&[0.3, 0.3], &two, 1), None);
    }

    #[test]
    fn report_aggregates() {
        let k = |bss, t| BssKpi {
            bss,
            throughput_bps: t,
            airtime_pct: 50.0,
            airtime_efficiency_pct: 100.0,
            mean_mcs: None,
            mean_sinr_db: Some(t / 10.0),
            idle: false,
        };
        let r = KpiReport::from_bss(vec![k(0, 10.0), k(1, 30.0)]);
        assert_eq!(r.mean_throughput_bps, 20.0);
        assert_eq!(r.min_throughput_bps, 10.0);
        assert_eq!(r.mean_mcs, None);
        assert_eq!(r.mean_sinr_db, Some(2.0));
    }
}

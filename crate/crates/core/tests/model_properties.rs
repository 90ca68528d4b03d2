use std::collections::BTreeMap;

use proptest::prelude::*;

use ctmc_wlan::access::{
    sensed_power_transmitters, AccessPolicy, Activity, DcfConfig, Entry, JoinKind, PolicyRegistry, PolicySection,
    StateKey,
};
use ctmc_wlan::channel::RadioParams;
use ctmc_wlan::ctmc::{
    analyze, enumerate_states, steady_state, BackoffFormula, CtmcConfig, EdgeKind, RateParams, DEFAULT_STATE_CAP,
};
use ctmc_wlan::deployment::{generate_seeded_drop, Deployment};
use ctmc_wlan::kpi::compute_kpis;
use ctmc_wlan::oracle::simulate;
use ctmc_wlan::phy::PhyProfile;
use ctmc_wlan::scenario::Scenario;

fn scenario_of(deployment: Deployment) -> Scenario {
    Scenario::new(deployment, RadioParams::default(), PhyProfile::default(), 0.1).unwrap()
}

fn drop(n: usize, d: f64, drop_id: u64) -> Scenario {
    scenario_of(generate_seeded_drop(n, d, 11, drop_id).unwrap())
}

fn policy(name: &str) -> Box<dyn AccessPolicy> {
    PolicyRegistry::builtin().build(name, &PolicySection::default()).unwrap()
}

fn policies() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["dcf", "sr", "conpa"])
}

fn sides() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![2.0, 4.0, 8.0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn empty_state_has_one_forward_edge_per_bss(name in policies(), n in 1usize..=4, d in sides(), id in 0u64..1000) {
        let s = drop(n, d, id);
        let space = enumerate_states(&s, policy(name).as_ref(), DEFAULT_STATE_CAP).unwrap();
        prop_assert!(space.states[0].activity.is_empty());
        let mut out: Vec<usize> = space
            .transitions
            .iter()
            .filter(|t| t.from == 0)
            .map(|t| match t.kind {
                EdgeKind::Forward(b) => b,
                EdgeKind::Backward(_) => usize::MAX,
            })
            .collect();
        out.sort();
        prop_assert_eq!(out, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn zero_load_keeps_all_mass_on_the_empty_state(name in policies(), n in 1usize..=4, id in 0u64..1000) {
        let a = analyze(&drop(n, 2.0, id), policy(name).as_ref(), &CtmcConfig::default(), 0.0).unwrap();
        prop_assert_eq!(a.pi()[0], 1.0);
        prop_assert!(a.pi()[1..].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn bss_relabeling_permutes_the_solution(name in policies(), d in sides(), id in 0u64..1000, perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
        let s = drop(4, d, id);
        let p = policy(name);
        let a = analyze(&s, p.as_ref(), &CtmcConfig::default(), 1.0).unwrap();

        // perm[old] = new: BSS `old` of the original becomes BSS `new`.
        let mut bss = s.deployment.bss_list.clone();
        for (old, &new) in perm.iter().enumerate() {
            bss[new] = s.deployment.bss_list[old].clone();
            bss[new].id = new;
        }
        let permuted = Scenario::new(
            Deployment { bss_list: bss, ..s.deployment.clone() },
            s.radio.clone(),
            s.phy.clone(),
            s.min_distance_m(),
        )
        .unwrap();
        let b = analyze(&permuted, p.as_ref(), &CtmcConfig::default(), 1.0).unwrap();
        prop_assert_eq!(a.space.len(), b.space.len());

        let relabeled: BTreeMap<StateKey, f64> = a
            .space
            .states
            .iter()
            .zip(a.pi())
            .map(|(st, &pi)| (st.key.relabel(&perm, p.order_sensitive()), pi))
            .collect();
        for (st, &pi) in b.space.states.iter().zip(b.pi()) {
            let expected = relabeled.get(&st.key).copied();
            prop_assert!(expected.is_some(), "state {} missing after relabeling", st.key);
            prop_assert!((expected.unwrap() - pi).abs() < 1e-9);
        }
        let ka = compute_kpis(&a, 12000.0);
        let kb = compute_kpis(&b, 12000.0);
        for (old, &new) in perm.iter().enumerate() {
            let rel = (ka.per_bss[old].throughput_bps - kb.per_bss[new].throughput_bps).abs();
            prop_assert!(rel <= 1e-6 * ka.per_bss[old].throughput_bps.max(1.0));
        }
    }

    #[test]
    fn rescaling_time_leaves_the_steady_state_unchanged(name in policies(), n in prop::sample::select(vec![2usize, 4]), d in sides(), id in 0u64..1000, k in 1e-3f64..1e3) {
        let a = analyze(&drop(n, d, id), policy(name).as_ref(), &CtmcConfig::default(), 1.0).unwrap();
        let scaled = steady_state(&(a.q.clone() * k)).unwrap();
        for (x, y) in a.pi().iter().zip(&scaled.pi) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn concurrent_dcf_transmitters_sense_each_other_below_cca(n in 2usize..=4, d in sides(), id in 0u64..1000) {
        let s = drop(n, d, id);
        let space = enumerate_states(&s, policy("dcf").as_ref(), DEFAULT_STATE_CAP).unwrap();
        let cca = DcfConfig::default().cca_thr_dbm;
        for st in &space.states {
            for e in st.activity.entries() {
                for other in st.activity.entries().iter().filter(|o| o.bss != e.bss) {
                    let alone = Activity::empty().with(Entry { bss: other.bss, tx_dbm: other.tx_dbm, kind: JoinKind::Full });
                    prop_assert!(sensed_power_transmitters(e.bss, &alone, &s) < cca);
                }
            }
        }
    }

    #[test]
    fn states_respect_policy_power_bounds(name in policies(), n in 2usize..=4, d in sides(), id in 0u64..1000) {
        let s = drop(n, d, id);
        let p = policy(name);
        let space = enumerate_states(&s, p.as_ref(), DEFAULT_STATE_CAP).unwrap();
        for st in &space.states {
            for e in st.activity.entries() {
                prop_assert!(e.tx_dbm <= p.p_max_dbm());
                if let JoinKind::SrLimited { holder } = e.kind {
                    prop_assert!(st.activity.contains(holder));
                }
            }
        }
    }
}

fn rates(alpha: f64) -> RateParams {
    RateParams { cw: 16, t_e: 9e-6, alpha, backoff_formula: BackoffFormula::StandardMean }
}

#[test]
fn oracle_matches_the_isolated_two_state_chain() {
    // One BSS alone: {∅, A} with λ from the backoff and μ from the TXOP.
    let s = drop(1, 2.0, 0);
    let p = policy("dcf");
    let a = analyze(&s, p.as_ref(), &CtmcConfig::default(), 1.0).unwrap();
    let sim = simulate(&s, p.as_ref(), &rates(1.0), true, 1_000_000, 5).unwrap();
    let active = a.space.states[1].key.clone();
    let emp = sim.occupancy[&active];
    assert!((emp - a.pi()[1]).abs() < 0.005, "{emp} vs {}", a.pi()[1]);
    assert!((sim.per_bss[0].airtime_pct - 100.0 * a.pi()[1]).abs() < 0.5);
    let total: f64 = sim.occupancy.values().sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn oracle_matches_the_five_state_conpa_chain() {
    let s = drop(2, 2.0, 3);
    let p = policy("conpa");
    let a = analyze(&s, p.as_ref(), &CtmcConfig::default(), 1.0).unwrap();
    assert_eq!(a.space.len(), 5);
    let sim = simulate(&s, p.as_ref(), &rates(1.0), true, 1_000_000, 9).unwrap();
    for (st, &pi) in a.space.states.iter().zip(a.pi()) {
        let emp = sim.occupancy.get(&st.key).copied().unwrap_or(0.0);
        assert!((emp - pi).abs() < 0.005, "{}: {emp} vs {pi}", st.key);
    }
}

#[test]
fn oracle_at_zero_load_never_leaves_the_empty_state() {
    let s = drop(3, 2.0, 1);
    let sim = simulate(&s, policy("sr").as_ref(), &rates(0.0), true, 1000, 1).unwrap();
    assert_eq!(sim.occupancy.len(), 1);
    assert_eq!(sim.occupancy[&StateKey::default()], 1.0);
}

#[test]
fn oracle_is_deterministic_per_seed() {
    let s = drop(4, 4.0, 2);
    let p = policy("conpa");
    let a = simulate(&s, p.as_ref(), &rates(1.0), true, 20_000, 42).unwrap();
    let b = simulate(&s, p.as_ref(), &rates(1.0), true, 20_000, 42).unwrap();
    let c = simulate(&s, p.as_ref(), &rates(1.0), true, 20_000, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.occupancy, c.occupancy);
}

#[test]
fn state_cap_is_enforced() {
    let cfg = CtmcConfig { state_cap: 64, ..CtmcConfig::default() };
    assert!(analyze(&drop(4, 2.0, 0), policy("conpa").as_ref(), &cfg, 1.0).is_err());
}

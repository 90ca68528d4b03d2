//! Monte Carlo simulator of the same continuous-time process the chain
//! describes, used to cross-check enumeration and the steady-state solve.
//!
//! Every idle BSS runs an exponential access clock and every transmission
//! with a departure of its own runs an exponential TXOP clock. All clocks are
//! redrawn after each event, which is exact for exponential clocks. The
//! simulator consults the access policy for join and departure outcomes but
//! never touches a [`StateSpace`](crate::ctmc::StateSpace) or rate matrix.
//!
//! Randomness: BSS `b` draws from a ChaCha8 stream `b + 1` seeded with the
//! simulation seed, using inverse-CDF exponential sampling.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::access::{AccessPolicy, Activity, StateKey};
use crate::ctmc::{access_rate, RateParams, StateSpace};
use crate::error::{Error, Result};
use crate::kpi::evaluate_links;
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalKpi {
    pub airtime_pct: f64,
    pub throughput_bps: f64,
    pub airtime_efficiency_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Fraction of simulated time spent in each visited state.
    pub occupancy: BTreeMap<StateKey, f64>,
    /// Label of each visited state, as printed by `Activity::label`.
    pub labels: BTreeMap<StateKey, String>,
    pub event_count: u64,
    pub total_time: f64,
    pub per_bss: Vec<EmpiricalKpi>,
}

struct Clock {
    bss: usize,
    rate: f64,
    next: Activity,
}

/// Everything the simulator needs to know about one state.
struct Step {
    clocks: Vec<Clock>,
    /// (bss, delivered payload rate, decodable)
    active: Vec<(usize, f64, bool)>,
}

fn build_step(
    scenario: &Scenario,
    policy: &dyn AccessPolicy,
    activity: &Activity,
    lambda: f64,
    mu_fail_uses_tfail: bool,
) -> Result<Step> {
    let mut clocks = Vec::new();
    if lambda > 0.0 {
        for bss in (0..scenario.n_bss()).filter(|&b| !activity.contains(b)) {
            if let Some(entry) = policy.join(scenario, activity, bss)?.into_entry(bss) {
                clocks.push(Clock { bss, rate: lambda, next: activity.with(entry) });
            }
        }
    }
    let links = evaluate_links(scenario, activity);
    for l in &links {
        if activity.has_own_clock(l.bss) {
            clocks.push(Clock {
                bss: l.bss,
                rate: 1.0 / l.txop_duration(mu_fail_uses_tfail),
                next: policy.depart(scenario, activity, l.bss)?,
            });
        }
    }
    let active = links.iter().map(|l| (l.bss, l.delivered_rate_bps(scenario.phy.l_data_bits), l.decodable)).collect();
    Ok(Step { clocks, active })
}

fn exponential(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    let u: f64 = rng.gen();
    -(1.0 - u).ln() / rate
}

pub fn simulate(
    scenario: &Scenario,
    policy: &dyn AccessPolicy,
    rate_params: &RateParams,
    mu_fail_uses_tfail: bool,
    n_events: u64,
    seed: u64,
) -> Result<SimResult> {
    if n_events == 0 {
        return Err(Error::InvalidInput("simulation needs at least one event".into()));
    }
    let lambda = access_rate(rate_params)?;
    let n = scenario.n_bss();
    let mut rngs: Vec<ChaCha8Rng> = (0..n)
        .map(|b| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(b as u64 + 1);
            r
        })
        .collect();

    let mut steps: HashMap<StateKey, Step> = HashMap::new();
    let mut time_in: HashMap<StateKey, f64> = HashMap::new();
    let mut labels = BTreeMap::new();
    let mut active_time = vec![0.0; n];
    let mut decodable_time = vec![0.0; n];
    let mut delivered = vec![0.0; n];
    let mut total_time = 0.0;
    let mut events = 0u64;

    let mut activity = Activity::empty();
    let mut key = policy.state_key(&activity);
    while events < n_events {
        if !steps.contains_key(&key) {
            steps.insert(key.clone(), build_step(scenario, policy, &activity, lambda, mu_fail_uses_tfail)?);
            labels.insert(key.clone(), activity.label(policy.p_max_dbm()));
        }
        let step = &steps[&key];

        let mut winner: Option<(f64, usize)> = None;
        for (i, c) in step.clocks.iter().enumerate() {
            let t = exponential(&mut rngs[c.bss], c.rate);
            if winner.map_or(true, |(best, _)| t < best) {
                winner = Some((t, i));
            }
        }
        let Some((dwell, i)) = winner else {
            // Absorbing state: it holds all remaining time.
            let dwell = 1.0;
            *time_in.entry(key.clone()).or_default() += dwell;
            total_time += dwell;
            for &(b, rate, ok) in &step.active {
                active_time[b] += dwell;
                delivered[b] += rate * dwell;
                if ok {
                    decodable_time[b] += dwell;
                }
            }
            break;
        };

        *time_in.entry(key.clone()).or_default() += dwell;
        total_time += dwell;
        for &(b, rate, ok) in &step.active {
            active_time[b] += dwell;
            delivered[b] += rate * dwell;
            if ok {
                decodable_time[b] += dwell;
            }
        }
        activity = step.clocks[i].next.clone();
        key = policy.state_key(&activity);
        events += 1;
    }

    let occupancy = time_in.into_iter().map(|(k, t)| (k, t / total_time)).collect();
    let per_bss = (0..n)
        .map(|b| EmpiricalKpi {
            airtime_pct: 100.0 * active_time[b] / total_time,
            throughput_bps: delivered[b] / total_time,
            airtime_efficiency_pct: if active_time[b] > 0.0 {
                100.0 * decodable_time[b] / active_time[b]
            } else {
                100.0
            },
        })
        .collect();
    Ok(SimResult { occupancy, labels, event_count: events, total_time, per_bss })
}

/// Steady-state probabilities keyed by state identity.
pub fn keyed_distribution(space: &StateSpace, pi: &[f64]) -> BTreeMap<StateKey, f64> {
    space.states.iter().zip(pi).map(|(s, &p)| (s.key.clone(), p)).collect()
}

/// Total-variation distance over the union of both supports.
pub fn tv_distance(a: &BTreeMap<StateKey, f64>, b: &BTreeMap<StateKey, f64>) -> f64 {
    let mut sum = 0.0;
    for (k, pa) in a {
        sum += (pa - b.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, pb) in b {
        if !a.contains_key(k) {
            sum += pb.abs();
        }
    }
    0.5 * sum
}

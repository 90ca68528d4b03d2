//! Continuous-time Markov chain of concurrent transmissions.
//!
//! States are the feasible sets of ongoing transmissions (ordered by access
//! time where the policy needs it), forward edges are channel accesses at rate
//! `λ = α / E[BO]` and backward edges are TXOP completions at rate `1/T`.

mod rates;
mod solver;
mod space;

use serde::{Deserialize, Serialize};

pub use rates::{access_rate, departure_rate, expected_backoff, BackoffFormula, RateParams};
pub use solver::{build_rate_matrix, residual, steady_state, RateMatrix, SteadyState, RESIDUAL_TOLERANCE};
pub use space::{enumerate_states, CtmcState, EdgeKind, StateSpace, Transition, DEFAULT_STATE_CAP};

use crate::access::AccessPolicy;
use crate::error::{Error, Result};
use crate::kpi::{evaluate_links, StateLinkMetrics};
use crate::scenario::Scenario;

/// Chain-construction section of the run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CtmcConfig {
    pub cw: u32,
    pub backoff_formula: BackoffFormula,
    /// Failed exchanges (SINR below capture) release the channel after the
    /// aborted RTS/CTS handshake instead of a full TXOP.
    pub mu_fail_uses_tfail: bool,
    pub state_cap: usize,
}

impl Default for CtmcConfig {
    fn default() -> Self {
        CtmcConfig {
            cw: 16,
            backoff_formula: BackoffFormula::StandardMean,
            mu_fail_uses_tfail: true,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

impl CtmcConfig {
    pub fn rate_params(&self, t_e: f64, alpha: f64) -> RateParams {
        RateParams { cw: self.cw, t_e, alpha, backoff_formula: self.backoff_formula }
    }
}

/// A solved chain for one scenario and policy.
#[derive(Debug, Clone)]
pub struct ChainAnalysis {
    pub space: StateSpace,
    /// Link metrics of every state, aligned with `space.states`.
    pub links: Vec<StateLinkMetrics>,
    /// Per-BSS channel-access rate.
    pub access_rates: Vec<f64>,
    pub q: RateMatrix,
    pub steady: SteadyState,
}

impl ChainAnalysis {
    pub fn pi(&self) -> &[f64] {
        &self.steady.pi
    }
}

/// Enumerates, fills and solves the chain of `scenario` under `policy`.
pub fn analyze(scenario: &Scenario, policy: &dyn AccessPolicy, cfg: &CtmcConfig, alpha: f64) -> Result<ChainAnalysis> {
    let rp = cfg.rate_params(scenario.phy.t_empty_slot_s, alpha);
    let lambda = access_rate(&rp)?;
    let space = enumerate_states(scenario, policy, cfg.state_cap)?;
    let links: Vec<StateLinkMetrics> = space.states.iter().map(|s| evaluate_links(scenario, &s.activity)).collect();
    let access_rates = vec![lambda; scenario.n_bss()];

    let mut departures = vec![vec![f64::NAN; scenario.n_bss()]; space.len()];
    for (i, state) in space.states.iter().enumerate() {
        for e in state.activity.entries() {
            departures[i][e.bss] = departure_rate(state, e.bss, &links[i], cfg.mu_fail_uses_tfail)?;
        }
    }
    let q = build_rate_matrix(&space, &access_rates, &|s, b| departures[s][b])?;
    let steady = if lambda == 0.0 {
        // Nothing ever accesses the channel: all mass stays on the empty state.
        let mut pi = vec![0.0; space.len()];
        pi[0] = 1.0;
        SteadyState { residual: residual(&q, &pi), pi }
    } else {
        steady_state(&q)?
    };
    if steady.pi.len() != space.len() {
        return Err(Error::MalformedChain("steady-state length mismatch".into()));
    }
    Ok(ChainAnalysis { space, links, access_rates, q, steady })
}

//! Analytical evaluation of concurrent channel access in dense WLAN
//! deployments.
//!
//! A deployment of BSSs is dropped at random, an access policy decides which
//! transmissions may coexist and at what power, and a continuous-time Markov
//! chain over the sets of ongoing transmissions yields steady-state
//! probabilities from which throughput, airtime and link-quality indicators
//! follow.
//!
//! Policies are trait objects registered by name in a
//! [`PolicyRegistry`](access::PolicyRegistry): `dcf`, `sr` (OBSS/PD spatial
//! reuse) and `conpa` (power-adaptive concurrent access).
//!
//! ```
//! use ctmc_wlan::access::{ConPa, ConPaConfig};
//! use ctmc_wlan::ctmc::{analyze, CtmcConfig};
//! use ctmc_wlan::deployment::generate_seeded_drop;
//! use ctmc_wlan::kpi::compute_kpis;
//! use ctmc_wlan::scenario::Scenario;
//!
//! let deployment = generate_seeded_drop(2, 2.0, 1, 0).unwrap();
//! let scenario = Scenario::new(deployment, Default::default(), Default::default(), 0.1).unwrap();
//! let policy = ConPa { cfg: ConPaConfig::default() };
//! let chain = analyze(&scenario, &policy, &CtmcConfig::default(), 1.0).unwrap();
//! assert_eq!(chain.space.len(), 5);
//! let kpis = compute_kpis(&chain, 12000.0);
//! assert!(kpis.mean_throughput_bps > 0.0);
//! ```

pub mod access;
pub mod channel;
pub mod config;
pub mod ctmc;
pub mod deployment;
pub mod error;
pub mod experiment;
pub mod kpi;
pub mod oracle;
pub mod phy;
pub mod scenario;

pub use error::{Error, Result};

//! Random-drop experiments, parameter sweeps and CSV reporting.
//!
//! Drop `i` always uses the geometry generated from `(master_seed, i)`, so
//! every policy, C value or load in a sweep is evaluated on the same drops.
//! Drops run in parallel; results are collected in drop order so the CSV does
//! not depend on the thread count.
//!
//! CSV columns:
//!
//! ```text
//! row_type,drop_id,policy,n_bss,side_d,alpha,c_db,bss,stat,
//! throughput_bps,airtime_pct,airtime_efficiency_pct,mean_mcs,mean_sinr_db,n_states,note
//! ```
//!
//! * `bss` rows: one per BSS and drop (`stat = value`); `note = idle` when
//!   the BSS never transmits (efficiency then reads 100).
//! * `drop` rows: `stat = mean` and `stat = min` across the BSSs of a drop.
//! * `error` rows: a drop whose chain could not be built or solved; `note`
//!   holds the message. The run continues.
//! * `aggregate` rows: one block per parameter combination. `bss_*` stats
//!   summarize per-BSS values over all drops (mean, median, q1, q3, min, max);
//!   `drop_*` stats summarize per-drop means and minima.
//!
//! `c_db` is empty for policies other than ConPA. Absent values are empty
//! fields. Numbers carry 6 significant digits.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::access::PolicyRegistry;
use crate::config::RunConfig;
use crate::ctmc::{analyze, ChainAnalysis};
use crate::deployment::generate_seeded_drop;
use crate::error::{Error, Result};
use crate::kpi::{compute_kpis, KpiReport};
use crate::scenario::Scenario;

pub const CSV_HEADER: &str = "row_type,drop_id,policy,n_bss,side_d,alpha,c_db,bss,stat,throughput_bps,airtime_pct,airtime_efficiency_pct,mean_mcs,mean_sinr_db,n_states,note";

/// Builds the scenario of drop `drop_id` under `cfg`.
pub fn drop_scenario(cfg: &RunConfig, drop_id: u64) -> Result<Scenario> {
    let d = &cfg.deployment;
    let deployment = generate_seeded_drop(d.n_bss, d.side_d, d.master_seed, drop_id)?;
    Scenario::new(deployment, cfg.radio.clone(), cfg.phy_profile()?, d.min_distance_m)
}

/// Solves the chain of drop `drop_id` under the configured policy.
pub fn analyze_drop(cfg: &RunConfig, registry: &PolicyRegistry, drop_id: u64) -> Result<(Scenario, ChainAnalysis)> {
    let scenario = drop_scenario(cfg, drop_id)?;
    let policy = registry.build_selected(&cfg.policy)?;
    let analysis = analyze(&scenario, policy.as_ref(), &cfg.ctmc, cfg.traffic.alpha)?;
    Ok((scenario, analysis))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropOutcome {
    pub drop_id: u64,
    pub result: std::result::Result<(KpiReport, usize), String>,
}

/// Parameters identifying one row group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupKey {
    pub policy: String,
    pub n_bss: usize,
    pub side_d: f64,
    pub alpha: f64,
    pub c_db: Option<f64>,
}

impl GroupKey {
    fn of(cfg: &RunConfig) -> Self {
        GroupKey {
            policy: cfg.policy.kind.clone(),
            n_bss: cfg.deployment.n_bss,
            side_d: cfg.deployment.side_d,
            alpha: cfg.traffic.alpha,
            c_db: (cfg.policy.kind == "conpa").then_some(cfg.policy.conpa.c_db),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupResult {
    pub key: GroupKey,
    pub drops: Vec<DropOutcome>,
}

impl GroupResult {
    pub fn ok_reports(&self) -> impl Iterator<Item = &KpiReport> {
        self.drops.iter().filter_map(|d| d.result.as_ref().ok().map(|(r, _)| r))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunReport {
    pub groups: Vec<GroupResult>,
}

fn evaluate_group(cfg: &RunConfig, registry: &PolicyRegistry) -> Result<GroupResult> {
    cfg.validate()?;
    let l_data_bits = cfg.phy.l_data_bits;
    let drops = (0..cfg.deployment.drops as u64)
        .into_par_iter()
        .map(|drop_id| {
            let result = analyze_drop(cfg, registry, drop_id)
                .map(|(_, a)| (compute_kpis(&a, l_data_bits), a.space.len()))
                .map_err(|e| e.to_string());
            DropOutcome { drop_id, result }
        })
        .collect();
    Ok(GroupResult { key: GroupKey::of(cfg), drops })
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidInput(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Evaluates `cfg.deployment.drops` drops of the configured scenario.
pub fn run_experiment(cfg: &RunConfig, jobs: Option<usize>) -> Result<RunReport> {
    sweep(cfg, &[], jobs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    CDb,
    SideD,
    Alpha,
    Policy,
    NBss,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "c_db" | "c" => SweepAxis::CDb,
            "side_d" | "d" => SweepAxis::SideD,
            "alpha" => SweepAxis::Alpha,
            "policy" => SweepAxis::Policy,
            "n_bss" | "n" => SweepAxis::NBss,
            other => return Err(Error::InvalidInput(format!("unknown sweep axis `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub axis: SweepAxis,
    pub values: Vec<String>,
}

impl FromStr for AxisSpec {
    type Err = Error;

    /// Parses `name=v1,v2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, values) =
            s.split_once('=').ok_or_else(|| Error::InvalidInput(format!("axis `{s}` must look like name=v1,v2")))?;
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
        if values.is_empty() {
            return Err(Error::InvalidInput(format!("axis `{name}` has no values")));
        }
        Ok(AxisSpec { axis: name.trim().parse()?, values })
    }
}

fn apply(cfg: &mut RunConfig, axis: SweepAxis, value: &str) -> Result<()> {
    let num =
        || value.parse::<f64>().map_err(|_| Error::InvalidInput(format!("sweep value `{value}` is not a number")));
    match axis {
        SweepAxis::CDb => cfg.policy.conpa.c_db = num()?,
        SweepAxis::SideD => cfg.deployment.side_d = num()?,
        SweepAxis::Alpha => cfg.traffic.alpha = num()?,
        SweepAxis::NBss => {
            cfg.deployment.n_bss =
                value.parse().map_err(|_| Error::InvalidInput(format!("sweep value `{value}` is not a BSS count")))?
        }
        SweepAxis::Policy => cfg.policy.kind = value.to_string(),
    }
    Ok(())
}

/// Cross product of `axes` applied on top of `cfg`. Axis order sets the
/// nesting: the last axis varies fastest.
pub fn sweep(cfg: &RunConfig, axes: &[AxisSpec], jobs: Option<usize>) -> Result<RunReport> {
    let registry = PolicyRegistry::builtin();
    let sweeps_policy = axes.iter().any(|a| a.axis == SweepAxis::Policy);
    if axes.iter().any(|a| a.axis == SweepAxis::CDb) && !sweeps_policy && cfg.policy.kind != "conpa" {
        return Err(Error::InvalidInput(format!(
            "the c_db axis only applies to conpa, but the configured policy is `{}`",
            cfg.policy.kind
        )));
    }
    let mut configs = vec![cfg.clone()];
    for spec in axes {
        let mut next = Vec::with_capacity(configs.len() * spec.values.len());
        for base in &configs {
            for v in &spec.values {
                let mut c = base.clone();
                apply(&mut c, spec.axis, v)?;
                c.validate().map_err(|e| Error::InvalidInput(format!("sweep value `{v}`: {e}")))?;
                next.push(c);
            }
        }
        configs = next;
    }
    let groups = with_jobs(jobs, || configs.iter().map(|c| evaluate_group(c, &registry)).collect::<Result<Vec<_>>>())??;
    Ok(RunReport { groups })
}

/// `%g`-style formatting with 6 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return String::new();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // The exponent is taken after rounding to 6 digits, so 999999.7 reads 1e6.
    let sci = format!("{:.5e}", x);
    let (mantissa, e) = sci.split_once('e').unwrap();
    let e: i32 = e.parse().unwrap();
    if (-5..6).contains(&e) {
        let decimals = (5 - e).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        trim_zeros(&s)
    } else {
        format!("{}e{}", trim_zeros(mantissa), e)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.filter(|x| !x.is_nan()).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Summary statistics over a set of values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summarize(values: impl Iterator<Item = f64>) -> Summary {
    let v = sorted(values);
    let mean = if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
    Summary {
        mean,
        median: quantile(&v, 0.5),
        q1: quantile(&v, 0.25),
        q3: quantile(&v, 0.75),
        min: v.first().copied().unwrap_or(f64::NAN),
        max: v.last().copied().unwrap_or(f64::NAN),
    }
}

/// The five reported metrics of one row.
#[derive(Debug, Clone, Copy)]
struct Metrics {
    throughput: f64,
    airtime: f64,
    efficiency: f64,
    mcs: Option<f64>,
    sinr: Option<f64>,
}

impl GroupResult {
    fn bss_metrics(&self) -> Vec<Metrics> {
        self.ok_reports()
            .flat_map(|r| r.per_bss.iter())
            .map(|k| Metrics {
                throughput: k.throughput_bps,
                airtime: k.airtime_pct,
                efficiency: k.airtime_efficiency_pct,
                mcs: k.mean_mcs,
                sinr: k.mean_sinr_db,
            })
            .collect()
    }

    /// Summary of one per-BSS metric across all drops.
    pub fn bss_summary(&self, f: impl Fn(&crate::kpi::BssKpi) -> Option<f64>) -> Summary {
        summarize(self.ok_reports().flat_map(|r| r.per_bss.iter()).filter_map(f))
    }
}

fn min_opt(v: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    v.flatten().reduce(f64::min)
}

impl RunReport {
    pub fn to_csv(&self, per_drop: bool) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for g in &self.groups {
            let k = &g.key;
            let prefix = |row_type: &str, drop: &str| {
                format!(
                    "{row_type},{drop},{},{},{},{},{}",
                    k.policy,
                    k.n_bss,
                    fmt_num(k.side_d),
                    fmt_num(k.alpha),
                    opt(k.c_db)
                )
            };
            let row = |out: &mut String, pre: &str, bss: &str, stat: &str, m: Metrics, states: &str, note: &str| {
                let _ = writeln!(
                    out,
                    "{pre},{bss},{stat},{},{},{},{},{},{states},{note}",
                    fmt_num(m.throughput),
                    fmt_num(m.airtime),
                    fmt_num(m.efficiency),
                    opt(m.mcs),
                    opt(m.sinr)
                );
            };

            if per_drop {
                for d in &g.drops {
                    let pre = prefix("", &d.drop_id.to_string());
                    match &d.result {
                        Ok((r, n_states)) => {
                            let states = n_states.to_string();
                            for b in &r.per_bss {
                                let m = Metrics {
                                    throughput: b.throughput_bps,
                                    airtime: b.airtime_pct,
                                    efficiency: b.airtime_efficiency_pct,
                                    mcs: b.mean_mcs,
                                    sinr: b.mean_sinr_db,
                                };
                                let note = if b.idle { "idle" } else { "" };
                                row(&mut out, &format!("bss{pre}"), &b.bss.to_string(), "value", m, &states, note);
                            }
                            let mean = Metrics {
                                throughput: r.mean_throughput_bps,
                                airtime: r.mean_airtime_pct,
                                efficiency: r.mean_airtime_efficiency_pct,
                                mcs: r.mean_mcs,
                                sinr: r.mean_sinr_db,
                            };
                            row(&mut out, &format!("drop{pre}"), "", "mean", mean, &states, "");
                            let min = Metrics {
                                throughput: r.min_throughput_bps,
                                airtime: r.min_airtime_pct,
                                efficiency: r
                                    .per_bss
                                    .iter()
                                    .map(|b| b.airtime_efficiency_pct)
                                    .fold(f64::INFINITY, f64::min),
                                mcs: min_opt(r.per_bss.iter().map(|b| b.mean_mcs)),
                                sinr: min_opt(r.per_bss.iter().map(|b| b.mean_sinr_db)),
                            };
                            row(&mut out, &format!("drop{pre}"), "", "min", min, &states, "");
                        }
                        Err(msg) => {
                            let _ = writeln!(out, "error{pre},,,,,,,,,{}", msg.replace([',', '\n'], ";"));
                        }
                    }
                }
            }

            let pre = prefix("aggregate", "");
            let ok = g.ok_reports().count();
            let note = format!("drops={} ok={}", g.drops.len(), ok);
            let bss = g.bss_metrics();
            let col = |f: fn(&Metrics) -> Option<f64>| summarize(bss.iter().filter_map(f));
            let sums = [
                col(|m| Some(m.throughput)),
                col(|m| Some(m.airtime)),
                col(|m| Some(m.efficiency)),
                col(|m| m.mcs),
                col(|m| m.sinr),
            ];
            let pick = |f: fn(&Summary) -> f64| Metrics {
                throughput: f(&sums[0]),
                airtime: f(&sums[1]),
                efficiency: f(&sums[2]),
                mcs: Some(f(&sums[3])).filter(|x| !x.is_nan()),
                sinr: Some(f(&sums[4])).filter(|x| !x.is_nan()),
            };
            let stats: [(&str, fn(&Summary) -> f64); 6] = [
                ("bss_mean", |s| s.mean),
                ("bss_median", |s| s.median),
                ("bss_q1", |s| s.q1),
                ("bss_q3", |s| s.q3),
                ("bss_min", |s| s.min),
                ("bss_max", |s| s.max),
            ];
            for (name, f) in stats {
                row(&mut out, &pre, "", name, pick(f), "", &note);
            }

            let drop_col = |f: fn(&KpiReport) -> Option<f64>| summarize(g.ok_reports().filter_map(f));
            let means = [
                drop_col(|r| Some(r.mean_throughput_bps)),
                drop_col(|r| Some(r.mean_airtime_pct)),
                drop_col(|r| Some(r.mean_airtime_efficiency_pct)),
                drop_col(|r| r.mean_mcs),
                drop_col(|r| r.mean_sinr_db),
            ];
            let mins = [
                drop_col(|r| Some(r.min_throughput_bps)),
                drop_col(|r| Some(r.min_airtime_pct)),
                drop_col(|r| r.per_bss.iter().map(|b| b.airtime_efficiency_pct).reduce(f64::min)),
                drop_col(|r| min_opt(r.per_bss.iter().map(|b| b.mean_mcs))),
                drop_col(|r| min_opt(r.per_bss.iter().map(|b| b.mean_sinr_db))),
            ];
            let from = |s: &[Summary; 5], f: fn(&Summary) -> f64| Metrics {
                throughput: f(&s[0]),
                airtime: f(&s[1]),
                efficiency: f(&s[2]),
                mcs: Some(f(&s[3])).filter(|x| !x.is_nan()),
                sinr: Some(f(&s[4])).filter(|x| !x.is_nan()),
            };
            row(&mut out, &pre, "", "drop_mean_of_means", from(&means, |s| s.mean), "", &note);
            row(&mut out, &pre, "", "drop_median_of_means", from(&means, |s| s.median), "", &note);
            row(&mut out, &pre, "", "drop_mean_of_mins", from(&mins, |s| s.mean), "", &note);
        }
        out
    }
}

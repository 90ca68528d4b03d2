use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ctmc_wlan::access::PolicyRegistry;
use ctmc_wlan::config::{parse_config, RunConfig};
use ctmc_wlan::experiment::{analyze_drop, drop_scenario, fmt_num, sweep, AxisSpec};
use ctmc_wlan::oracle::{keyed_distribution, simulate, tv_distance};
use ctmc_wlan::{Error, Result};

#[derive(Parser)]
#[command(name = "ctmc-wlan", version, about = "Markov-chain evaluation of WLAN channel access policies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long, env = "CTMC_WLAN_CONFIG")]
    config: Option<PathBuf>,
    /// Overrides deployment.master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides policy.kind.
    #[arg(long)]
    policy: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate K drops of the configured scenario and write CSV.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        drops: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Evaluate the cross product of one or more parameter axes.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `name=v1,v2,...` with name one of c_db, side_d, alpha, policy, n_bss.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        #[arg(long)]
        drops: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Write the states, rate matrix and steady state of one drop.
    DumpCtmc {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        drop: u64,
        /// Output directory for states.csv, q.csv and pi.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the analytical steady state of one drop with a simulation.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        drop: u64,
        #[arg(long, default_value_t = 1_000_000)]
        events: u64,
        /// Simulation seed (default: the master seed).
        #[arg(long)]
        sim_seed: Option<u64>,
    },
}

fn load(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => parse_config(&fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.deployment.master_seed = seed;
    }
    if let Some(kind) = &common.policy {
        cfg.policy.kind = kind.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn set_drops(cfg: &mut RunConfig, drops: Option<usize>) -> Result<()> {
    if let Some(k) = drops {
        cfg.deployment.drops = k;
        cfg.validate()?;
    }
    Ok(())
}

fn write_output(cfg: &RunConfig, out: Option<PathBuf>, text: &str) -> Result<()> {
    match out.or_else(|| cfg.output.path.as_ref().map(PathBuf::from)) {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dump_ctmc(cfg: &RunConfig, drop_id: u64, dir: &Path) -> Result<()> {
    let registry = PolicyRegistry::builtin();
    let policy = registry.build_selected(&cfg.policy)?;
    let (_, chain) = analyze_drop(cfg, &registry, drop_id)?;
    fs::create_dir_all(dir)?;

    let mut states = String::from("index,label,key,tx_dbm,pi\n");
    for (i, s) in chain.space.states.iter().enumerate() {
        let powers: Vec<String> = s.activity.entries().iter().map(|e| fmt_num(e.tx_dbm)).collect();
        states.push_str(&format!(
            "{i},{},{},{},{}\n",
            s.activity.label(policy.p_max_dbm()),
            s.key,
            powers.join(";"),
            chain.pi()[i]
        ));
    }
    fs::write(dir.join("states.csv"), states)?;

    let mut q = String::new();
    for r in 0..chain.q.nrows() {
        let row: Vec<String> = (0..chain.q.ncols()).map(|c| format!("{}", chain.q[(r, c)])).collect();
        q.push_str(&row.join(","));
        q.push('\n');
    }
    fs::write(dir.join("q.csv"), q)?;

    let pi: Vec<String> = chain.pi().iter().map(|p| format!("{p}")).collect();
    fs::write(dir.join("pi.csv"), pi.join("\n") + "\n")?;
    println!("{} states, residual {:e}, written to {}", chain.space.len(), chain.steady.residual, dir.display());
    Ok(())
}

fn validate(cfg: &RunConfig, drop_id: u64, events: u64, sim_seed: Option<u64>) -> Result<()> {
    let registry = PolicyRegistry::builtin();
    let policy = registry.build_selected(&cfg.policy)?;
    let scenario = drop_scenario(cfg, drop_id)?;
    let (_, chain) = analyze_drop(cfg, &registry, drop_id)?;
    let rp = cfg.ctmc.rate_params(scenario.phy.t_empty_slot_s, cfg.traffic.alpha);
    let sim = simulate(
        &scenario,
        policy.as_ref(),
        &rp,
        cfg.ctmc.mu_fail_uses_tfail,
        events,
        sim_seed.unwrap_or(cfg.deployment.master_seed),
    )?;

    let analytic = keyed_distribution(&chain.space, chain.pi());
    println!("{:<16} {:>12} {:>12}", "state", "analytic", "empirical");
    for s in &chain.space.states {
        let label = s.activity.label(policy.p_max_dbm());
        let emp = sim.occupancy.get(&s.key).copied().unwrap_or(0.0);
        println!("{:<16} {:>12.6} {:>12.6}", label, analytic[&s.key], emp);
    }
    for (k, p) in &sim.occupancy {
        if !analytic.contains_key(k) {
            println!("{:<16} {:>12} {:>12.6}  (not enumerated)", sim.labels[k], "-", p);
        }
    }
    println!("events {}, total variation {:.6}", sim.event_count, tv_distance(&analytic, &sim.occupancy));
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common, drops, out, jobs } => {
            let mut cfg = load(&common)?;
            set_drops(&mut cfg, drops)?;
            let report = sweep(&cfg, &[], jobs)?;
            write_output(&cfg, out, &report.to_csv(cfg.output.per_drop))
        }
        Command::Sweep { common, axes, drops, out, jobs } => {
            let mut cfg = load(&common)?;
            set_drops(&mut cfg, drops)?;
            let axes = axes.iter().map(|a| a.parse()).collect::<Result<Vec<AxisSpec>>>()?;
            let report = sweep(&cfg, &axes, jobs)?;
            write_output(&cfg, out, &report.to_csv(cfg.output.per_drop))
        }
        Command::DumpCtmc { common, drop, out } => dump_ctmc(&load(&common)?, drop, &out),
        Command::Validate { common, drop, events, sim_seed } => validate(&load(&common)?, drop, events, sim_seed),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::StateCap { .. } | Error::MalformedChain(_) | Error::Singular(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

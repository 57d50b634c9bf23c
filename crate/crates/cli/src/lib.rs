//! Command-line front end: argument parsing, command dispatch and
//! JSON/CSV emission. `main.rs` only maps the outcome to an exit code.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use stochastic_knapsack::batch::{self, PriceDependentOptions};
use stochastic_knapsack::bounds::gap_study;
use stochastic_knapsack::config::InstanceConfig;
use stochastic_knapsack::dp::{check_structure, extract_thresholds, solve_dp};
use stochastic_knapsack::experiments::{bundled_config, reproduce_from, PricingCase, ARTIFACTS};
use stochastic_knapsack::model::{delta_for_load, discretize, BatchModel, ProblemInstance};
use stochastic_knapsack::pricing::{
    solve_pricing, solve_pricing_with_p1, DemandFunction, DemandKind, PricingFrame, PricingMethod,
};
use stochastic_knapsack::sim::{compare_policies, simulate, Policy};
use stochastic_knapsack::switchover::{self, SwitchOverSolution};
use stochastic_knapsack::Error as CoreError;
use thiserror::Error;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SKNAP_OUT_DIR";

/// DP step used when neither `--delta` nor the config sets one: the
/// per-period arrival probability is at most this.
pub const DEFAULT_DP_LOAD: f64 = 0.05;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Validation(_) => 4,
            CliError::Solver(_) => 5,
            CliError::Io(_) => 6,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Validation(_) => "validation",
            CliError::Solver(_) => "solver",
            CliError::Io(_) => "io",
        }
    }

    /// Machine-readable error record written to stderr.
    pub fn record(&self) -> Value {
        json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() })
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::InvalidInstance(_)
            | CoreError::InvalidArgument(_)
            | CoreError::Discretization(_)
            | CoreError::Unsupported(_) => CliError::Validation(msg),
            CoreError::Solver(_) => CliError::Solver(msg),
            CoreError::Config(_) => CliError::Config(msg),
            CoreError::Io(_) => CliError::Io(msg),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "sknap", version, about = "Stochastic knapsack solvers, simulator and experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output directory; defaults to $SKNAP_OUT_DIR, then the current directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Monte Carlo replications.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub reps: usize,

    /// DP clock step; overrides the config's `delta`.
    #[arg(long, global = true)]
    pub delta: Option<f64>,

    /// Worker threads for sweeps and simulation.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact DP on a discretized clock.
    SolveDp(ConfigArg),
    /// Optimal switch-over times.
    OptimizeSwitchover(SwitchoverArgs),
    /// Optimal markdown ladder.
    OptimizePricing(PricingArgs),
    /// Simulate one policy.
    Simulate(SimulateArgs),
    /// Simulate several policies on common random numbers.
    Compare(CompareArgs),
    /// Upper and lower revenue bounds, optionally over a sweep.
    Bounds(BoundsArgs),
    /// Regenerate a bundled experiment.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Instance JSON.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct SwitchoverArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Use the batch-order solver.
    #[arg(long)]
    pub batch: bool,
    /// Earlier `optimize-switchover` JSON to start from.
    #[arg(long)]
    pub warm_start: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PricingArgs {
    /// Pricing case JSON (`W`, `periods`, `p1`, `demand`); flags fill in when absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_demand_kind)]
    pub demand: Option<DemandKind>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// Number of price periods.
    #[arg(long)]
    pub periods: Option<usize>,
    #[arg(long)]
    pub inventory: Option<usize>,
    #[arg(long)]
    pub p1: Option<f64>,
    /// Optimize the first-period price too.
    #[arg(long)]
    pub free_p1: bool,
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    SwitchOver,
    Fcfs,
    EqualSpaced,
    DpOptimal,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum, default_value_t = PolicyArg::SwitchOver)]
    pub policy: PolicyArg,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Policies to compare; all four by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub policy: Vec<PolicyArg>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Comma-separated `W` (horizon scaled with `W`) or `W:T` entries.
    #[arg(long)]
    pub sweep: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// One of table1..table5, figure1.
    pub artifact: String,
    /// Replace the bundled definition.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_demand_kind(s: &str) -> std::result::Result<DemandKind, String> {
    s.parse::<DemandKind>().map_err(|e| e.to_string())
}

/// A finished command: file stem, structured result and CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub stem: String,
    pub json: Value,
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
}

/// Paths written by [`write_report`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Written {
    pub json: PathBuf,
    pub csv: PathBuf,
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| CliError::Io(format!("serializing result: {e}")))
}

fn load_instance(path: &Path) -> Result<(InstanceConfig, ProblemInstance)> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    let cfg = InstanceConfig::from_json(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let inst = cfg.to_instance()?;
    Ok((cfg, inst))
}

fn dp_delta(cli: &Cli, cfg: &InstanceConfig, inst: &ProblemInstance) -> f64 {
    cli.delta
        .or(cfg.delta)
        .unwrap_or_else(|| delta_for_load(inst, DEFAULT_DP_LOAD))
}

/// Optimized switch-over solution for any batch model, with its largest
/// first-order residual.
fn optimize_switch(inst: &ProblemInstance, warm: Option<Vec<f64>>) -> Result<(SwitchOverSolution, f64)> {
    if inst.is_unit_batch() {
        let sol = switchover::solve_unit(inst)?;
        let residual = switchover::kkt_check(inst, &sol).max_residual();
        return Ok((sol, residual));
    }
    match inst.batches() {
        BatchModel::Homogeneous(_) => {
            let sol = batch::solve_homogeneous(inst)?;
            let residual = batch::kkt_check(inst, &sol)?.max_residual();
            Ok((sol, residual))
        }
        BatchModel::PriceDependent(_) => {
            let opts = PriceDependentOptions {
                warm_start: warm,
                ..PriceDependentOptions::default()
            };
            let out = batch::solve_price_dependent(inst, &opts)?;
            Ok((out.solution, out.residual))
        }
    }
}

fn solve_dp_cmd(cli: &Cli, args: &ConfigArg) -> Result<Report> {
    let (cfg, inst) = load_instance(&args.config)?;
    let delta = dp_delta(cli, &cfg, &inst);
    let disc = discretize(&inst, delta)?;
    let table = solve_dp(&disc);
    let thresholds = if disc.is_unit_batch() {
        Some(extract_thresholds(&table, &disc)?)
    } else {
        None
    };
    let json = json!({
        "command": "solve-dp",
        "W": inst.inventory(),
        "T": inst.horizon(),
        "delta": delta,
        "periods": table.periods(),
        "optimal_value": table.optimal_value(),
        "structure": to_value(&check_structure(&table))?,
        "thresholds": to_value(&thresholds)?,
    });
    let records = table
        .entries()
        .map(|(n, d, v)| vec![n.to_string(), d.to_string(), num(v)])
        .collect();
    Ok(Report {
        stem: "solve_dp".into(),
        json,
        header: vec!["n".into(), "d".into(), "value".into()],
        records,
    })
}

fn optimize_switchover_cmd(args: &SwitchoverArgs) -> Result<Report> {
    let (_, inst) = load_instance(&args.config)?;
    if !args.batch && !inst.is_unit_batch() {
        return Err(CliError::Validation(
            "instance has batch orders; pass --batch to use the batch solver".into(),
        ));
    }
    let warm = match &args.warm_start {
        Some(path) => Some(read_warm_start(path, inst.classes())?),
        None => None,
    };
    let (sol, residual) = optimize_switch(&inst, warm.clone())?;
    let warm_change = warm.map(|w| {
        w.iter()
            .zip(&sol.y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    });
    let records = (1..=inst.classes())
        .map(|l| {
            vec![
                l.to_string(),
                num(sol.t[l]),
                num(sol.mu[l - 1]),
                num(sol.y[l - 1]),
            ]
        })
        .collect();
    let json = json!({
        "command": "optimize-switchover",
        "W": inst.inventory(),
        "T": inst.horizon(),
        "batch_solver": args.batch,
        "solution": to_value(&sol)?,
        "switch_times": sol.switch_times(),
        "max_residual": residual,
        "warm_start_max_change": warm_change,
    });
    Ok(Report {
        stem: "switchover".into(),
        json,
        header: vec!["l".into(), "t".into(), "mu".into(), "y".into()],
        records,
    })
}

/// Segment lengths from an earlier switch-over result or a bare solution.
fn read_warm_start(path: &Path, classes: usize) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let solution = value.get("solution").cloned().unwrap_or(value);
    let sol: SwitchOverSolution = serde_json::from_value(solution)
        .map_err(|e| CliError::Config(format!("{}: not a switch-over solution: {e}", path.display())))?;
    if sol.y.len() != classes {
        return Err(CliError::Validation(format!(
            "warm start has {} segments for {classes} classes",
            sol.y.len()
        )));
    }
    Ok(sol.y)
}

fn pricing_case(args: &PricingArgs) -> Result<PricingCase> {
    let base: Option<PricingCase> = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
            Some(
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let missing = |what: &str| CliError::Usage(format!("--{what} is required without --config"));
    let demand = match (&base, args.demand, args.a, args.b) {
        (_, Some(kind), Some(a), Some(b)) => DemandFunction::new(kind, a, b)?,
        (Some(c), _, _, _) => {
            let d = &c.demand;
            let kind = args.demand.unwrap_or(d.kind);
            let f = DemandFunction::new(kind, args.a.unwrap_or(d.a), args.b.unwrap_or(d.b))?;
            match &d.period_scale {
                Some(s) => f.with_period_scale(s.clone())?,
                None => f,
            }
        }
        (None, None, _, _) => return Err(missing("demand")),
        (None, _, None, _) => return Err(missing("a")),
        (None, _, _, None) => return Err(missing("b")),
    };
    Ok(PricingCase {
        inventory: args
            .inventory
            .or(base.as_ref().map(|c| c.inventory))
            .ok_or_else(|| missing("inventory"))?,
        periods: args
            .periods
            .or(base.as_ref().map(|c| c.periods))
            .ok_or_else(|| missing("periods"))?,
        p1: args.p1.or(base.as_ref().map(|c| c.p1)).unwrap_or(1.0),
        demand,
        reference_prices: None,
        reference_objective: None,
    })
}

fn optimize_pricing_cmd(args: &PricingArgs) -> Result<Report> {
    let case = pricing_case(args)?;
    let frame = PricingFrame::new(case.inventory, case.periods, case.p1, case.demand.clone())?;
    let method = match args.method {
        MethodArg::Exact => PricingMethod::Exact,
        MethodArg::Approx => PricingMethod::Approximate,
    };
    let sol = if args.free_p1 {
        solve_pricing_with_p1(&frame, method)?
    } else {
        solve_pricing(&frame, method)?
    };
    let records = sol
        .prices
        .iter()
        .zip(&sol.r)
        .enumerate()
        .map(|(i, (p, r))| vec![(i + 1).to_string(), num(*p), num(*r)])
        .collect();
    let json = json!({
        "command": "optimize-pricing",
        "case": to_value(&case)?,
        "free_p1": args.free_p1,
        "solution": to_value(&sol)?,
    });
    Ok(Report {
        stem: "pricing".into(),
        json,
        header: vec!["period".into(), "price".into(), "markdown".into()],
        records,
    })
}

fn build_policy(cli: &Cli, cfg: &InstanceConfig, inst: &ProblemInstance, which: PolicyArg) -> Result<Policy> {
    Ok(match which {
        PolicyArg::SwitchOver => {
            let (sol, _) = optimize_switch(inst, None)?;
            Policy::switch_over(sol.switch_times().to_vec(), inst.horizon())?
        }
        PolicyArg::Fcfs => Policy::Fcfs,
        PolicyArg::EqualSpaced => Policy::EqualSpaced,
        PolicyArg::DpOptimal => {
            let delta = dp_delta(cli, cfg, inst);
            Policy::dp_table(solve_dp(&discretize(inst, delta)?), delta)?
        }
    })
}

const SIM_HEADER: [&str; 6] = ["policy", "W", "T", "mean", "ci99", "pct_off_best"];

fn sim_record(policy: &str, inst: &ProblemInstance, mean: f64, hw: f64, pct: f64) -> Vec<String> {
    vec![
        policy.to_string(),
        inst.inventory().to_string(),
        num(inst.horizon()),
        num(mean),
        num(hw),
        num(pct),
    ]
}

fn simulate_cmd(cli: &Cli, args: &SimulateArgs) -> Result<Report> {
    let (cfg, inst) = load_instance(&args.config)?;
    let policy = build_policy(cli, &cfg, &inst, args.policy)?;
    let est = simulate(&inst, &policy, cli.reps, cli.seed)?;
    let json = json!({
        "command": "simulate",
        "policy": policy.name(),
        "W": inst.inventory(),
        "T": inst.horizon(),
        "estimate": to_value(&est)?,
    });
    Ok(Report {
        stem: "simulate".into(),
        json,
        header: SIM_HEADER.iter().map(|s| s.to_string()).collect(),
        records: vec![sim_record(policy.name(), &inst, est.mean, est.half_width, 0.0)],
    })
}

fn compare_cmd(cli: &Cli, args: &CompareArgs) -> Result<Report> {
    let (cfg, inst) = load_instance(&args.config)?;
    let which = if args.policy.is_empty() {
        vec![PolicyArg::SwitchOver, PolicyArg::Fcfs, PolicyArg::EqualSpaced, PolicyArg::DpOptimal]
    } else {
        args.policy.clone()
    };
    let policies = which
        .iter()
        .map(|w| {
            let p = build_policy(cli, &cfg, &inst, *w)?;
            Ok((p.name().to_string(), p))
        })
        .collect::<Result<Vec<_>>>()?;
    let cmp = compare_policies(&inst, &policies, cli.reps, cli.seed)?;
    let records = cmp
        .rows
        .iter()
        .map(|r| sim_record(&r.policy, &inst, r.estimate.mean, r.estimate.half_width, r.pct_off_best))
        .collect();
    let json = json!({
        "command": "compare",
        "W": inst.inventory(),
        "T": inst.horizon(),
        "comparison": to_value(&cmp)?,
    });
    Ok(Report {
        stem: "compare".into(),
        json,
        header: SIM_HEADER.iter().map(|s| s.to_string()).collect(),
        records,
    })
}

/// Parses `W` or `W:T` entries; bare `W` keeps `T / W` of the base instance.
pub fn parse_sweep(spec: &str, base: &ProblemInstance) -> Result<Vec<(usize, f64)>> {
    let bad = |item: &str| CliError::Usage(format!("bad sweep entry {item:?}; expected W or W:T"));
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (w, t) = match item.split_once(':') {
                Some((w, t)) => (w, Some(t)),
                None => (item, None),
            };
            let w: usize = w.trim().parse().map_err(|_| bad(item))?;
            let t = match t {
                Some(t) => t.trim().parse().map_err(|_| bad(item))?,
                None if base.inventory() > 0 => base.horizon() * w as f64 / base.inventory() as f64,
                None => return Err(CliError::Usage("sweep without T needs a base instance with W > 0".into())),
            };
            Ok((w, t))
        })
        .collect()
}

fn bounds_cmd(args: &BoundsArgs) -> Result<Report> {
    let (_, inst) = load_instance(&args.config)?;
    let pairs = match &args.sweep {
        Some(spec) => parse_sweep(spec, &inst)?,
        None => vec![(inst.inventory(), inst.horizon())],
    };
    if pairs.is_empty() {
        return Err(CliError::Usage("empty sweep".into()));
    }
    let study = gap_study(&inst, &pairs)?;
    let records = study
        .rows
        .iter()
        .map(|r| {
            vec![
                r.inventory.to_string(),
                num(r.horizon),
                num(r.upper),
                num(r.lower),
                num(r.switch),
                num(r.rel_gap),
            ]
        })
        .collect();
    let json = json!({ "command": "bounds", "study": to_value(&study)? });
    Ok(Report {
        stem: "bounds".into(),
        json,
        header: ["W", "T", "upper", "lower", "switch", "rel_gap"].iter().map(|s| s.to_string()).collect(),
        records,
    })
}

fn reproduce_cmd(args: &ReproduceArgs) -> Result<Report> {
    let name = args.artifact.as_str();
    if !ARTIFACTS.contains(&name) {
        return Err(CliError::Usage(format!(
            "unknown artifact {name:?}; expected one of {}",
            ARTIFACTS.join(", ")
        )));
    }
    let text = match &args.config {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?,
        None => bundled_config(name).expect("every artifact is bundled").to_string(),
    };
    let artifact = reproduce_from(name, &text)?;
    let (header, records) = artifact.table();
    Ok(Report {
        stem: name.to_string(),
        json: json!({ "command": "reproduce", "artifact": name, "rows": to_value(&artifact)? }),
        header: header.iter().map(|s| s.to_string()).collect(),
        records,
    })
}

/// Runs a parsed command without touching the filesystem beyond reading inputs.
pub fn execute(cli: &Cli) -> Result<Report> {
    if cli.reps == 0 {
        return Err(CliError::Usage("--reps must be positive".into()));
    }
    if let Some(d) = cli.delta {
        if !(d.is_finite() && d > 0.0) {
            return Err(CliError::Usage(format!("--delta must be positive, got {d}")));
        }
    }
    let go = || match &cli.command {
        Command::SolveDp(a) => solve_dp_cmd(cli, a),
        Command::OptimizeSwitchover(a) => optimize_switchover_cmd(a),
        Command::OptimizePricing(a) => optimize_pricing_cmd(a),
        Command::Simulate(a) => simulate_cmd(cli, a),
        Command::Compare(a) => compare_cmd(cli, a),
        Command::Bounds(a) => bounds_cmd(a),
        Command::Reproduce(a) => reproduce_cmd(a),
    };
    match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(go),
        None => go(),
    }
}

/// Output directory from `--out`, then the environment, then `.`.
pub fn output_dir(cli: &Cli) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn csv_bytes(report: &Report) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(format!("writing CSV: {e}"));
    w.write_record(&report.header).map_err(io)?;
    for r in &report.records {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(format!("writing CSV: {e}")))
}

/// Writes `<stem>.json` and `<stem>.csv`. Both are staged under temporary
/// names first so a failure leaves neither behind.
pub fn write_report(dir: &Path, report: &Report) -> Result<Written> {
    let io = |what: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", what.display()));
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let json_path = dir.join(format!("{}.json", report.stem));
    let csv_path = dir.join(format!("{}.csv", report.stem));
    let json_tmp = dir.join(format!(".{}.json.tmp", report.stem));
    let csv_tmp = dir.join(format!(".{}.csv.tmp", report.stem));
    let mut json_text = serde_json::to_string_pretty(&report.json)
        .map_err(|e| CliError::Io(format!("serializing result: {e}")))?;
    json_text.push('\n');
    let staged = fs::write(&json_tmp, json_text)
        .map_err(|e| io(&json_tmp, e))
        .and_then(|_| fs::write(&csv_tmp, csv_bytes(report)?).map_err(|e| io(&csv_tmp, e)))
        .and_then(|_| fs::rename(&json_tmp, &json_path).map_err(|e| io(&json_path, e)))
        .and_then(|_| fs::rename(&csv_tmp, &csv_path).map_err(|e| io(&csv_path, e)));
    if let Err(e) = staged {
        for p in [&json_tmp, &csv_tmp] {
            let _ = fs::remove_file(p);
        }
        return Err(e);
    }
    Ok(Written {
        json: json_path,
        csv: csv_path,
    })
}

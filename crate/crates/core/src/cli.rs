//! Command-line front end. `run` returns the process exit code.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::experiments::{self, ExperimentKind, ExperimentSpec, ResultRow, SpecOverrides};
use crate::model::{PathSpec, PlanDocument, SwapPlan};
use crate::model::InterferenceProfile;
use crate::planners::{plan_optimal_with_bound, PlannerError, PlannerKind, DEFAULT_OPTIMAL_BOUND};
use crate::sim::{
    check_protocol, run_simulation, run_simulation_traced, AttemptModel, Metrics, SimConfig,
    SimError, TRACE_HEADER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TIMEOUT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Refused(String),
    Io(String),
    TimedOut(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Refused(_) => EXIT_REFUSED,
            CliError::Io(_) => EXIT_IO,
            CliError::TimedOut(_) => EXIT_TIMEOUT,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Refused(m) | CliError::Io(m) | CliError::TimedOut(m) => m,
        }
    }
}

impl From<PlannerError> for CliError {
    fn from(e: PlannerError) -> Self {
        match e {
            PlannerError::BoundExceeded { .. } => CliError::Refused(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::TimedOut(_) => CliError::TimedOut(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<experiments::ExperimentError> for CliError {
    fn from(e: experiments::ExperimentError) -> Self {
        use experiments::ExperimentError as E;
        match e {
            E::Io { .. } | E::Csv(_) => CliError::Io(e.to_string()),
            E::Sim(s) => s.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pses", version, about = "Plan and simulate layered entanglement swapping on repeater chains")]
pub struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a swap plan and print it as JSON.
    Plan(PlanArgs),
    /// Simulate a plan and print per-trial metrics.
    Simulate(SimulateArgs),
    /// Exhaustive minimum-cost plan for small paths.
    Oracle(OracleArgs),
    /// Run an experiment pipeline and write CSV plus manifest.
    Experiment(ExperimentArgs),
    /// Simulate once and print the event trace.
    Trace(TraceArgs),
}

#[derive(Debug, Args)]
pub struct PathArgs {
    /// Comma-separated repeater costs in expected attempts.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "profiles")]
    pub costs: Option<Vec<String>>,
    /// TOML file with one [[profile]] table (dpzr, dpsr, qlir, qln) per repeater.
    #[arg(long)]
    pub profiles: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long, default_value = "pses-layer-greedy")]
    pub strategy: String,
    #[command(flatten)]
    pub path: PathArgs,
    /// Override whether the greedy strategies may form composite parents.
    #[arg(long)]
    pub composite: Option<bool>,
    /// Also write the plan document to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimSource {
    /// Plan document written by `plan --out`.
    #[arg(long, conflicts_with_all = ["costs", "profiles"])]
    pub plan_file: Option<PathBuf>,
    #[arg(long, default_value = "pses-layer-greedy")]
    pub strategy: String,
    #[command(flatten)]
    pub path: PathArgs,
}

#[derive(Debug, Args)]
pub struct SimFlags {
    /// on-demand or full-path.
    #[arg(long)]
    pub policy: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Every swap succeeds and lasts exactly its cost.
    #[arg(long)]
    pub deterministic: bool,
    /// Time per swap attempt.
    #[arg(long)]
    pub attempt_latency: Option<f64>,
    /// One-way controller message delay.
    #[arg(long)]
    pub classical_latency: Option<f64>,
    /// Time to prepare a batch of elementary pairs.
    #[arg(long)]
    pub prep_latency: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: SimSource,
    #[command(flatten)]
    pub sim: SimFlags,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub source: SimSource,
    #[command(flatten)]
    pub sim: SimFlags,
    /// Write the trace here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub path: PathArgs,
    /// Largest repeater count searched.
    #[arg(long, default_value_t = DEFAULT_OPTIMAL_BOUND)]
    pub bound: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// hops-sweep, std-sweep, retrans-compare or planner-bench.
    #[arg(long)]
    pub kind: String,
    #[arg(long, default_value = "results")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
}

/// Config file layout. Every key is optional; unknown keys are errors.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub sim: Option<SimConfig>,
    pub experiment: Option<SpecOverrides>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfilesFile {
    profile: Vec<InterferenceProfile>,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn load_config(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = read_text(p)?;
            toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
        }
    }
}

fn load_path(args: &PathArgs) -> Result<PathSpec, CliError> {
    match (&args.costs, &args.profiles) {
        (Some(costs), None) => {
            let values = costs
                .iter()
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Input(format!("invalid cost {c:?}: expected a number")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            PathSpec::from_costs(&values).map_err(|e| CliError::Input(e.to_string()))
        }
        (None, Some(file)) => {
            let text = read_text(file)?;
            let parsed: ProfilesFile =
                toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
            PathSpec::from_profiles(&parsed.profile).map_err(|e| CliError::Input(e.to_string()))
        }
        (None, None) => Err(CliError::Input("one of --costs or --profiles is required".into())),
        (Some(_), Some(_)) => Err(CliError::Input("--costs and --profiles are mutually exclusive".into())),
    }
}

fn parse_strategy(name: &str, composite: Option<bool>) -> Result<PlannerKind, CliError> {
    let kind: PlannerKind = name.parse().map_err(|e: PlannerError| CliError::Input(e.to_string()))?;
    Ok(match composite {
        Some(flag) => PlannerKind::new(kind.algorithm(), flag),
        None => kind,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn effective_sim(config: &ConfigFile, flags: &SimFlags) -> Result<SimConfig, CliError> {
    let mut sim = config.sim.clone().unwrap_or_default();
    if let Some(seed) = config.seed {
        sim.seed = seed;
    }
    if let Some(seed) = flags.seed {
        sim.seed = seed;
    }
    if let Some(policy) = &flags.policy {
        sim.policy = policy.parse().map_err(CliError::Input)?;
    }
    if let Some(v) = flags.attempt_latency {
        sim.attempt_latency = v;
    }
    if let Some(v) = flags.classical_latency {
        sim.classical_latency = v;
    }
    if let Some(v) = flags.prep_latency {
        sim.prep_latency = v;
    }
    if flags.deterministic {
        sim.attempt_model = AttemptModel::Deterministic;
    }
    sim.validate()?;
    Ok(sim)
}

fn load_plan(source: &SimSource) -> Result<SwapPlan, CliError> {
    match &source.plan_file {
        Some(file) => {
            let text = read_text(file)?;
            let doc = PlanDocument::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
            doc.to_plan().map_err(|e| CliError::Input(format!("{}: {e}", file.display())))
        }
        None => {
            let path = load_path(&source.path)?;
            let kind = parse_strategy(&source.strategy, None)?;
            Ok(kind.plan(&path)?.plan)
        }
    }
}

fn metrics_line(trial: usize, m: &Metrics) -> String {
    format!(
        "{trial},{},{},{},{},{},{}",
        m.completion_time, m.pairs_prepared, m.attempts, m.retransmissions, m.failures, m.restarts
    )
}

fn cmd_plan(config: &ConfigFile, args: &PlanArgs, out: &mut dyn Write) -> Result<(), CliError> {
    eprintln!("seed = {}", config.seed.unwrap_or(0));
    let path = load_path(&args.path)?;
    let kind = parse_strategy(&args.strategy, args.composite)?;
    let report = kind.plan(&path)?;
    let text = report.to_document().to_json();
    if let Some(file) = &args.out {
        write_file(file, &text)?;
    }
    out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

fn cmd_oracle(config: &ConfigFile, args: &OracleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    eprintln!("seed = {}", config.seed.unwrap_or(0));
    let path = load_path(&args.path)?;
    let report = plan_optimal_with_bound(&path, args.bound)?;
    let text = report.to_document().to_json();
    if let Some(file) = &args.out {
        write_file(file, &text)?;
    }
    out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

fn cmd_simulate(config: &ConfigFile, args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sim = effective_sim(config, &args.sim)?;
    eprintln!("seed = {}", sim.seed);
    let plan = load_plan(&args.source)?;
    if args.trials == 0 {
        return Err(CliError::Input("--trials must be >= 1".into()));
    }
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    writeln!(out, "# policy = {}, seed = {}", sim.policy, sim.seed).map_err(io)?;
    writeln!(out, "trial,completion_time,pairs_prepared,attempts,retransmissions,failures,restarts").map_err(io)?;
    let mut all = Vec::with_capacity(args.trials);
    for trial in 0..args.trials {
        // trial t runs with seed + t
        let config = SimConfig {
            seed: sim.seed.wrapping_add(trial as u64),
            ..sim.clone()
        };
        match run_simulation(&plan, &config) {
            Ok(m) => {
                writeln!(out, "{}", metrics_line(trial, &m)).map_err(io)?;
                all.push(m);
            }
            Err(SimError::TimedOut(m)) => {
                writeln!(out, "{},timed_out", metrics_line(trial, &m)).map_err(io)?;
                return Err(CliError::TimedOut(format!(
                    "trial {trial} reached the cutoff at time {}",
                    sim.max_sim_time
                )));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let n = all.len() as f64;
    let mean = |f: fn(&Metrics) -> f64| all.iter().map(f).sum::<f64>() / n;
    writeln!(
        out,
        "mean,{},{},{},{},{},{}",
        mean(|m| m.completion_time),
        mean(|m| m.pairs_prepared as f64),
        mean(|m| m.attempts as f64),
        mean(|m| m.retransmissions as f64),
        mean(|m| m.failures as f64),
        mean(|m| m.restarts as f64)
    )
    .map_err(io)?;
    Ok(())
}

fn cmd_trace(config: &ConfigFile, args: &TraceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sim = effective_sim(config, &args.sim)?;
    eprintln!("seed = {}", sim.seed);
    let plan = load_plan(&args.source)?;
    let (metrics, trace) = run_simulation_traced(&plan, &sim)?;
    let mut text = String::new();
    text.push_str(TRACE_HEADER);
    text.push('\n');
    for e in &trace {
        text.push_str(&e.to_string());
        text.push('\n');
    }
    match &args.out {
        Some(file) => write_file(file, &text)?,
        None => out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?,
    }
    let report = check_protocol(&plan, &trace);
    eprintln!(
        "completion_time = {}, barrier_violations = {}, overlapping_attempts = {}",
        metrics.completion_time, report.barrier_violations, report.overlapping_attempts
    );
    Ok(())
}

fn summary_line(r: &ResultRow) -> String {
    format!("{:<30} hops {:>2}  std {:<4} {:<28} {:.4}", r.strategy, r.hops, r.cost_std, r.metric, r.value)
}

fn cmd_experiment(config: &ConfigFile, args: &ExperimentArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let kind: ExperimentKind = args.kind.parse().map_err(CliError::Input)?;
    let mut spec = ExperimentSpec::defaults(kind);
    if let Some(sim) = &config.sim {
        spec.sim = sim.clone();
    }
    if let Some(seed) = config.seed {
        spec.seed = seed;
    }
    if let Some(o) = &config.experiment {
        spec = spec.with_overrides(o);
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(n) = args.instances {
        spec.instances = n;
    }
    if let Some(n) = args.trials {
        spec.trials_per_instance = n;
    }
    spec.validate()?;
    eprintln!("seed = {}", spec.seed);
    // fail on an unwritable directory before spending time on the run
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let set = experiments::run_experiment(&spec)?;
    let csv = experiments::write_csv(&args.out_dir, &spec, &set)?;
    let manifest = experiments::write_manifest(&args.out_dir, &spec, &set)?;
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    for r in set.rows.iter().filter(|r| r.trial.is_none() && r.instance.is_none()) {
        if r.metric.starts_with("mean_completion")
            || r.metric.starts_with("diff_")
            || r.metric.starts_with("reduction_")
            || r.metric == "mean_pairs_prepared"
            || r.metric == "median_wall_time_us"
        {
            writeln!(out, "{}", summary_line(r)).map_err(io)?;
        }
    }
    writeln!(out, "wrote {} ({} rows) and {}", csv.display(), set.rows.len(), manifest.display()).map_err(io)?;
    if set.timeouts > 0 {
        eprintln!("warning: {} trials reached the simulation cutoff", set.timeouts);
    }
    Ok(())
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = load_config(cli.config.as_deref()).and_then(|config| match &cli.command {
        Command::Plan(a) => cmd_plan(&config, a, out),
        Command::Simulate(a) => cmd_simulate(&config, a, out),
        Command::Oracle(a) => cmd_oracle(&config, a, out),
        Command::Experiment(a) => cmd_experiment(&config, a, out),
        Command::Trace(a) => cmd_trace(&config, a, out),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use spacetime_perc::experiment::{self, validation, ExperimentConfig, EXIT_ERROR, EXIT_OK, EXIT_VALIDATION_FAILED};
use spacetime_perc::{Error, Result};

/// Simulation and verification of percolation, random-cluster and quantum
/// Ising models on space-time G × ℝ.
#[derive(Parser)]
#[command(name = "stperc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// P(origin cluster reaches radius R) for undirected space-time
    /// percolation, with the log-survival slope [connectivity].
    PercolationDecay(RunArgs),
    /// The same radius curves for the contact process: paths move forward
    /// in time along directed bridges [connectivity].
    Contact(RunArgs),
    /// Swendsen-Wang chains for the continuum random-cluster measure
    /// weighted by q^(number of clusters) [rc_sampler].
    RcChain(RunArgs),
    /// Random-cluster estimates of the transverse-field Ising Gibbs state
    /// (or a reduced state) against exact diagonalisation [quantum].
    QuantumValidate(RunArgs),
    /// Ground-state entanglement entropy of a chain block and the distance
    /// between block states as the surrounding chain grows [quantum].
    EntanglementSweep(RunArgs),
    /// Largest cluster of K_n × [0, β] against β times the branching
    /// survival probability [meanfield].
    MeanfieldGiant(RunArgs),
    /// Survival probability of the branching process approximating the
    /// mean-field cluster: fixed point and simulation [meanfield].
    Branching(RunArgs),
    /// Runs any experiment; the kind comes from the config file.
    Run(RunArgs),
    /// Runs the acceptance suite and prints one pass/fail line per
    /// criterion.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for replica-level parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parameter override `key=value` (TOML value syntax), repeatable.
    #[arg(short = 'p', long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Args)]
struct ValidateArgs {
    /// quick or full.
    #[arg(long, default_value = "quick")]
    level: validation::Level,
    #[arg(long, default_value_t = 20261016)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    /// Directory for report.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn set_workers(workers: Option<usize>) -> Result<()> {
    if let Some(n) = workers {
        if n == 0 {
            return Err(Error::InvalidParameter("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    }
    Ok(())
}

fn parse_override(kv: &str) -> Result<(String, toml::Value)> {
    let (key, raw) = kv.split_once('=').ok_or_else(|| Error::InvalidParameter(format!("override `{kv}` is not KEY=VALUE")))?;
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_owned()));
    Ok((key.trim().to_owned(), value))
}

fn load(args: &RunArgs, kind: Option<&str>) -> Result<ExperimentConfig> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)?,
        None => String::new(),
    };
    if args.params.is_empty() {
        return ExperimentConfig::parse(&text, kind, args.seed);
    }
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::InvalidParameter(format!("config: {}", e.message())))?;
    let params = table
        .entry("params")
        .or_insert_with(|| toml::Value::Table(toml::Table::new()))
        .as_table_mut()
        .ok_or_else(|| Error::InvalidParameter("config: `params` must be a table".into()))?;
    for kv in &args.params {
        let (k, v) = parse_override(kv)?;
        params.insert(k, v);
    }
    let merged = toml::to_string(&table).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
    ExperimentConfig::parse(&merged, kind, args.seed)
}

fn run_experiment(args: &RunArgs, kind: Option<&str>) -> Result<i32> {
    set_workers(args.workers)?;
    let config = load(args, kind)?;
    let start = Instant::now();
    let output = experiment::run(&config)?;
    let elapsed = start.elapsed().as_secs_f64();
    let dir = args
        .out
        .clone()
        .or_else(|| config.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| Path::new("results").join(format!("{}-{}", config.experiment.kind(), config.seed)));
    experiment::write_outputs(&dir, &config, &output, elapsed)?;
    for f in &output.files {
        println!("{}", dir.join(&f.name).display());
    }
    println!("{}", dir.join("manifest.json").display());
    Ok(match output.passed {
        Some(false) => EXIT_VALIDATION_FAILED,
        _ => EXIT_OK,
    })
}

fn run_validate(args: &ValidateArgs) -> Result<i32> {
    set_workers(args.workers)?;
    let formulas = validation::FormulaSet::default();
    let mut criteria = Vec::new();
    for id in 1..=9u8 {
        let r = validation::run_criterion(id, args.level, args.seed.wrapping_add(u64::from(id)), &formulas);
        println!("criterion {}: {} ({}, {:.1} s) {}", r.id, if r.passed { "PASS" } else { "FAIL" }, r.name, r.seconds, r.detail);
        criteria.push(r);
    }
    let report = validation::SuiteReport { level: args.level, seed: args.seed, criteria };
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        let json = serde_json::to_string_pretty(&report).map_err(|e| Error::InvalidParameter(format!("report: {e}")))?;
        std::fs::write(dir.join("report.json"), json + "\n")?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_VALIDATION_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match &cli.command {
        Command::PercolationDecay(a) => run_experiment(a, Some("percolation-decay")),
        Command::Contact(a) => run_experiment(a, Some("contact")),
        Command::RcChain(a) => run_experiment(a, Some("rc-chain")),
        Command::QuantumValidate(a) => run_experiment(a, Some("quantum-validate")),
        Command::EntanglementSweep(a) => run_experiment(a, Some("entanglement-sweep")),
        Command::MeanfieldGiant(a) => run_experiment(a, Some("meanfield-giant")),
        Command::Branching(a) => run_experiment(a, Some("branching")),
        Command::Run(a) => run_experiment(a, None),
        Command::Validate(a) => run_validate(a),
    };
    match status {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("stperc: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

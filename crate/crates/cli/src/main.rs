use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tm_contend_core::engine::{run, validate_trace, ExecutionTrace};
use tm_contend_core::experiment::{run_experiment, ExperimentConfig};
use tm_contend_core::generator::{generate, parse_ratio, GeneratorParams};
use tm_contend_core::model::Workload;
use tm_contend_core::oracle::{
    lower_bound, optimal_makespan, reduce_coloring_to_scheduling, UndirectedGraph,
    DEFAULT_ORACLE_LIMIT,
};
use tm_contend_core::{ClairvoyantPolicy, NonClairvoyantPolicy};

#[derive(Parser)]
#[command(
    name = "tm-contend",
    version,
    about = "Simulate greedy transactional-memory contention management and check it against exact oracles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random workload file.
    Gen(GenArgs),
    /// Run one contention manager on a workload and export the trace.
    Run(RunArgs),
    /// Exact oracles: optimal makespan or certified lower bounds.
    Oracle(OracleArgs),
    /// Turn a graph file into the equivalent scheduling workload.
    Reduce(ReduceArgs),
    /// Execute an experiment config and write CSV/JSON reports.
    Experiment(ExperimentArgs),
}

fn ratio_arg(s: &str) -> Result<num_rational::Rational64, String> {
    parse_ratio(s)
}

#[derive(Args)]
struct GenArgs {
    /// Number of transactions.
    #[arg(long)]
    n: usize,
    /// Number of shared resources.
    #[arg(long)]
    s: u32,
    /// Minimum balancing ratio for writers, e.g. "1/2" or "0.5".
    #[arg(long, value_parser = ratio_arg, default_value = "1/2")]
    beta: num_rational::Rational64,
    /// Fraction of read-only transactions, e.g. "1/4".
    #[arg(long = "read-only-frac", value_parser = ratio_arg, default_value = "0")]
    read_only_frac: num_rational::Rational64,
    #[arg(long, default_value_t = 1)]
    tau_min: u64,
    #[arg(long, default_value_t = 1)]
    tau_max: u64,
    #[arg(long, default_value_t = 1)]
    lambda_min: u64,
    #[arg(long, default_value_t = 1)]
    lambda_max: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Workload JSON output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Algo {
    Clairvoyant,
    NonClairvoyant,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    /// Workload JSON file.
    #[arg(long)]
    workload: PathBuf,
    /// Seed for the randomized policy; ignored by the clairvoyant one.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the trace as flat CSV (step,kind,loser,winner).
    #[arg(long)]
    trace_csv: Option<PathBuf>,
    /// Clairvoyant only: write per-step high/low priority sets as JSON.
    #[arg(long)]
    dump_priorities: Option<PathBuf>,
    /// Non-clairvoyant only: write per-step random priorities as JSON.
    #[arg(long)]
    dump_r: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Workload JSON file.
    #[arg(long)]
    workload: PathBuf,
    /// Compute the exact optimal makespan.
    #[arg(long, conflicts_with = "lower_bound", required_unless_present = "lower_bound")]
    optimal: bool,
    /// Compute certified makespan lower bounds.
    #[arg(long)]
    lower_bound: bool,
    /// Size cap for the exact search.
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    limit: usize,
}

#[derive(Args)]
struct ReduceArgs {
    /// Graph file: `p <vertices> <edges>` then `e <u> <v>` lines.
    #[arg(long)]
    graph: PathBuf,
    /// Workload JSON output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.csv and report.json.
    #[arg(long)]
    out_dir: PathBuf,
}

fn load_workload(path: &PathBuf) -> Result<Workload> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("failed to read workload file {}", path.display()))?;
    Workload::from_json_str(&text)
        .with_context(|| format!("invalid workload file {}", path.display()))
}

fn write_trace_outputs(args: &RunArgs, trace: &ExecutionTrace) -> Result<()> {
    if let Some(path) = &args.trace {
        fs::write(path, trace.to_json_string())
            .with_context(|| format!("failed to write {}", path.display()))?;
    }
    if let Some(path) = &args.trace_csv {
        fs::write(path, trace.to_csv_string())
            .with_context(|| format!("failed to write {}", path.display()))?;
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let params = GeneratorParams {
        n: args.n,
        resource_count: args.s,
        beta_target: args.beta,
        read_only_fraction: args.read_only_frac,
        tau_min: args.tau_min,
        tau_max: args.tau_max,
        lambda_min: args.lambda_min,
        lambda_max: args.lambda_max,
        seed: args.seed,
    };
    let workload = generate(&params)?;
    fs::write(&args.out, workload.to_json_string())
        .with_context(|| format!("failed to write {}", args.out.display()))?;
    println!(
        "wrote {}: n={} s={} beta={}",
        args.out.display(),
        workload.len(),
        workload.resource_count(),
        workload.global_beta()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let workload = load_workload(&args.workload)?;
    let trace = match args.algo {
        Algo::Clairvoyant => {
            if args.dump_r.is_some() {
                bail!("--dump-r applies to --algo non-clairvoyant only");
            }
            if args.dump_priorities.is_some() {
                let mut policy = ClairvoyantPolicy::with_priority_log(&workload);
                let trace = run(&workload, &mut policy)?;
                let path = args.dump_priorities.as_ref().unwrap();
                fs::write(path, serde_json::to_string_pretty(policy.priority_log())?)
                    .with_context(|| format!("failed to write {}", path.display()))?;
                trace
            } else {
                run(&workload, &mut ClairvoyantPolicy::new(&workload))?
            }
        }
        Algo::NonClairvoyant => {
            if args.dump_priorities.is_some() {
                bail!("--dump-priorities applies to --algo clairvoyant only");
            }
            if args.dump_r.is_some() {
                let mut policy = NonClairvoyantPolicy::with_priority_log(&workload, args.seed);
                let trace = run(&workload, &mut policy)?;
                let path = args.dump_r.as_ref().unwrap();
                fs::write(path, serde_json::to_string_pretty(policy.priority_log())?)
                    .with_context(|| format!("failed to write {}", path.display()))?;
                trace
            } else {
                run(&workload, &mut NonClairvoyantPolicy::new(&workload, args.seed))?
            }
        }
    };
    let violations = validate_trace(&workload, &trace);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("trace violation: {v}");
        }
        bail!("engine produced an inconsistent trace");
    }
    write_trace_outputs(&args, &trace)?;
    println!("makespan={} aborts={}", trace.makespan, trace.total_aborts());
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode> {
    let workload = load_workload(&args.workload)?;
    if args.optimal {
        let value = optimal_makespan(&workload, args.limit)?;
        println!("{}", serde_json::json!({ "optimal_makespan": value }));
    } else {
        let report = lower_bound(&workload);
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reduce(args: ReduceArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.graph)
        .with_context(|| format!("failed to read graph file {}", args.graph.display()))?;
    let graph = UndirectedGraph::parse(&text)?;
    let workload = reduce_coloring_to_scheduling(&graph)?;
    fs::write(&args.out, workload.to_json_string())
        .with_context(|| format!("failed to write {}", args.out.display()))?;
    println!(
        "wrote {}: {} vertices -> {} transactions over {} resources",
        args.out.display(),
        graph.vertex_count(),
        workload.len(),
        workload.resource_count()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_experiment(args: ExperimentArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("failed to read config {}", args.config.display()))?;
    let config = ExperimentConfig::from_json_str(&text)
        .with_context(|| format!("invalid experiment config {}", args.config.display()))?;
    let report = run_experiment(&config)?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("failed to create {}", args.out_dir.display()))?;
    let csv_path = args.out_dir.join("report.csv");
    let json_path = args.out_dir.join("report.json");
    fs::write(&csv_path, report.to_csv_string())
        .with_context(|| format!("failed to write {}", csv_path.display()))?;
    fs::write(&json_path, report.to_json_string())
        .with_context(|| format!("failed to write {}", json_path.display()))?;
    println!(
        "rows={} mean_ratio={:.4} max_ratio={:.4} bound_violations={}",
        report.aggregate.rows,
        report.aggregate.mean_ratio,
        report.aggregate.max_ratio,
        report.aggregate.bound_violations
    );
    if report.violations() > 0 {
        eprintln!("{} bound violation(s); see {}", report.violations(), csv_path.display());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Experiment(args) => cmd_experiment(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

//! Benchmark command line for the `postvrp` solver library.
//!
//! `solve` runs the genetic solver once and writes its per-generation log;
//! `experiment` sweeps configurations and seeds over a set of instances;
//! `baseline` runs one constructive heuristic; `convert` turns a JSON point
//! list into a `.postvrp` file; `gap` scores experiment summaries against
//! the fleet size declared in each instance name.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use postvrp::constructive::{clarke_wright, sweep};
use postvrp::genetic::{evolve, init_population, Crossover, GaConfig, GaResult};
use postvrp::io::{parse_instance_name, write_postvrp, InstanceFile, InstanceName};
use postvrp::{compare_fitness, Constraint, Error, Instance, Objectives, Solution};

#[derive(Parser)]
#[command(name = "postvrp", version, about = "Benchmark harness for route-length and capacity constrained vehicle routing")]
struct Cli {
    /// Worker threads (default: all cores; results are seed-deterministic at
    /// any count, and 1 also forces fully sequential execution).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the genetic solver once and write its per-generation log
    Solve(SolveArgs),
    /// Run a grid of configurations and seeds over a set of instances
    Experiment(ExperimentArgs),
    /// Run one constructive heuristic and print its objectives
    Baseline(BaselineArgs),
    /// Convert a JSON point list into a .postvrp instance file
    Convert(ConvertArgs),
    /// Score experiment summaries against name-declared fleet sizes
    Gap(GapArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (.vrp or .postvrp)
    #[arg(long)]
    instance: PathBuf,
    /// Solver configuration (default bcr-ls)
    #[arg(long, value_enum)]
    config: Option<ConfigName>,
    /// Random seed (overrides a params-file seed)
    #[arg(long)]
    seed: Option<u64>,
    /// Extra solver parameters, one key=value per line
    #[arg(long)]
    params: Option<PathBuf>,
    /// Run log CSV path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the best solution to this file
    #[arg(long)]
    solution: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Instance file; repeat the flag for several
    #[arg(long = "instance")]
    instances: Vec<PathBuf>,
    /// Comma-separated configurations (default: all four)
    #[arg(long, value_enum, value_delimiter = ',')]
    configs: Vec<ConfigName>,
    /// Seeded runs per configuration
    #[arg(long, default_value_t = 10)]
    runs: usize,
    /// Base seed; run r uses seed base+r, the same set for every configuration
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extra solver parameters, one key=value per line
    #[arg(long)]
    params: Option<PathBuf>,
    /// Output directory for run logs and summary.csv
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BaselineArgs {
    /// Instance file (.vrp or .postvrp)
    #[arg(long)]
    instance: PathBuf,
    /// Constructive method
    #[arg(long, value_enum)]
    method: BaselineMethod,
    /// Seed for the random baseline
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the solution to this file
    #[arg(long)]
    solution: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    /// JSON input (see the README for the schema)
    #[arg(long)]
    input: PathBuf,
    /// Output .postvrp path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GapArgs {
    /// summary.csv files produced by the experiment subcommand
    #[arg(required = true)]
    summaries: Vec<PathBuf>,
}

/// The four benchmark configurations: crossover operator times whether 2-opt
/// runs every generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConfigName {
    /// Best-cost route-insertion crossover with per-generation 2-opt
    BcrLs,
    /// Best-cost route-insertion crossover, no per-generation 2-opt
    BcrNols,
    /// Order crossover with per-generation 2-opt
    OxLs,
    /// Order crossover, no per-generation 2-opt
    OxNols,
}

impl ConfigName {
    const ALL: [ConfigName; 4] =
        [ConfigName::BcrLs, ConfigName::BcrNols, ConfigName::OxLs, ConfigName::OxNols];

    fn label(self) -> &'static str {
        match self {
            ConfigName::BcrLs => "bcr-ls",
            ConfigName::BcrNols => "bcr-nols",
            ConfigName::OxLs => "ox-ls",
            ConfigName::OxNols => "ox-nols",
        }
    }

    fn apply(self, cfg: &mut GaConfig) {
        cfg.crossover = match self {
            ConfigName::BcrLs | ConfigName::BcrNols => Crossover::RouteInsertion,
            ConfigName::OxLs | ConfigName::OxNols => Crossover::Order,
        };
        cfg.local_search = matches!(self, ConfigName::BcrLs | ConfigName::OxLs);
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BaselineMethod {
    /// Parallel savings merge
    Cws,
    /// Polar-angle clusters, one route each
    Sweep,
    /// Seeded random permutation split into feasible routes
    Random,
}

/// Failure carrying the process exit code: 1 usage, 2 instance or input
/// data, 3 internal (unwritable output and the like).
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: 1, message: message.into() }
    }

    fn instance(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Failure {
        Failure { code: 3, message: message.into() }
    }
}

type CmdResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests land here too; they are not errors.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    if let Err(failure) = run(cli) {
        eprintln!("error: {}", failure.message);
        return ExitCode::from(failure.code);
    }
    ExitCode::SUCCESS
}

fn run(cli: Cli) -> CmdResult<()> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::Convert(args) => cmd_convert(args),
        Command::Gap(args) => cmd_gap(args),
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) -> CmdResult<()> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(Failure::usage("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::internal(format!("thread pool setup failed: {e}")))
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(threads: Option<usize>) -> CmdResult<()> {
    if threads.is_some_and(|n| n > 1) {
        eprintln!("note: built without the parallel feature, running sequentially");
    }
    Ok(())
}

/// Index-ordered map over a work grid, parallel when the feature is on.
#[cfg(feature = "parallel")]
fn grid_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn grid_map<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

fn load_instance(path: &Path) -> CmdResult<InstanceFile> {
    InstanceFile::open(path).map_err(|e| Failure::instance(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CmdResult<()> {
    std::fs::write(path, text)
        .map_err(|e| Failure::internal(format!("cannot write {}: {e}", path.display())))
}

/// Errors from solver calls on an instance that already loaded: a rejected
/// configuration is a usage error, everything else is an instance problem.
fn solve_failure(e: Error) -> Failure {
    match e {
        Error::Unsupported(_) => Failure::usage(e.to_string()),
        other => Failure::instance(other.to_string()),
    }
}

/// Applies `key=value` parameter lines to a solver config. `#` starts a
/// comment; unknown keys and malformed values are usage errors.
fn apply_params(cfg: &mut GaConfig, text: &str, origin: &Path) -> CmdResult<()> {
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |what: String| Failure::usage(format!("{}:{}: {what}", origin.display(), idx + 1));
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(format!("expected key=value, got {line:?}")));
        };
        let (key, value) = (key.trim(), value.trim());
        let ok = match key {
            "population_size" => value.parse().map(|v| cfg.population_size = v).is_ok(),
            "max_generations" => value.parse().map(|v| cfg.max_generations = v).is_ok(),
            "crossover_rate" => value.parse().map(|v| cfg.crossover_rate = v).is_ok(),
            "mutation_rate" => value.parse().map(|v| cfg.mutation_rate = v).is_ok(),
            "candidate_pool_size" => value.parse().map(|v| cfg.candidate_pool_size = v).is_ok(),
            "stall_generations" => value.parse().map(|v| cfg.stall_generations = v).is_ok(),
            "seed" => value.parse().map(|v| cfg.seed = v).is_ok(),
            "exchange_segment_len" => value.parse().map(|v| cfg.exchange_segment_len = v).is_ok(),
            "exchange_trials" => value.parse().map(|v| cfg.exchange_trials = v).is_ok(),
            "local_search" => value.parse().map(|v| cfg.local_search = v).is_ok(),
            "crossover" => match value {
                "bcr" | "route-insertion" => {
                    cfg.crossover = Crossover::RouteInsertion;
                    true
                }
                "ox" | "order" => {
                    cfg.crossover = Crossover::Order;
                    true
                }
                _ => false,
            },
            _ => return Err(err(format!("unknown parameter {key:?}"))),
        };
        if !ok {
            return Err(err(format!("bad value {value:?} for {key}")));
        }
    }
    Ok(())
}

fn build_config(
    params: Option<&Path>,
    config: Option<ConfigName>,
    seed: Option<u64>,
) -> CmdResult<GaConfig> {
    let mut cfg = GaConfig::default();
    if let Some(path) = params {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        apply_params(&mut cfg, &text, path)?;
    }
    if let Some(name) = config {
        name.apply(&mut cfg);
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

const RUN_CSV_HEADER: &str = "generation,best_vehicles,best_length,best_spread,mean_length";

/// One row per generation plus a final row for the post-run polish of the
/// best individual. The polish is not a generation, so its row reuses the
/// last population mean and takes the next generation index; it never yields
/// a worse fitness, which keeps the whole column non-increasing and makes
/// the last row the run's final result.
fn run_csv(result: &GaResult) -> String {
    let mut out = String::from(RUN_CSV_HEADER);
    out.push('\n');
    for row in &result.log {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.generation, row.best_vehicles, row.best_length, row.best_spread, row.mean_length
        );
    }
    let last = result.log.last().expect("a run always logs generation 0");
    let best = &result.best.objectives;
    let _ = writeln!(
        out,
        "{},{},{},{},{}",
        last.generation + 1,
        best.vehicles,
        best.total_length,
        best.length_spread,
        last.mean_length
    );
    out
}

fn solution_text(inst: &Instance, sol: &Solution) -> String {
    let mut out = String::new();
    for (i, route) in sol.routes.iter().enumerate() {
        let _ = write!(out, "route {}:", i + 1);
        for &stop in &route.stops {
            let _ = write!(out, " {}", inst.label(stop));
        }
        out.push('\n');
    }
    let o = &sol.objectives;
    let _ = writeln!(out, "vehicles {}", o.vehicles);
    let _ = writeln!(out, "total_length {}", o.total_length);
    let _ = writeln!(out, "length_spread {}", o.length_spread);
    out
}

fn objectives_line(o: &Objectives) -> String {
    format!(
        "vehicles={} total_length={} length_spread={}",
        o.vehicles, o.total_length, o.length_spread
    )
}

fn cmd_solve(args: SolveArgs) -> CmdResult<()> {
    let file = load_instance(&args.instance)?;
    let cfg = build_config(args.params.as_deref(), args.config, args.seed)?;
    let result = evolve(&file.instance, &cfg).map_err(solve_failure)?;
    let csv = run_csv(&result);
    match &args.out {
        Some(path) => {
            write_file(path, &csv)?;
            println!("{}", objectives_line(&result.best.objectives));
        }
        // Without --out the log itself is the output; keep stdout pure CSV.
        None => print!("{csv}"),
    }
    if let Some(path) = &args.solution {
        write_file(path, &solution_text(&file.instance, &result.best))?;
    }
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> CmdResult<()> {
    let file = load_instance(&args.instance)?;
    let inst = &file.instance;
    let sol = match args.method {
        BaselineMethod::Cws => clarke_wright(inst),
        BaselineMethod::Sweep => sweep(inst).map_err(|e| Failure::instance(e.to_string()))?,
        // One slot of the genetic initializer is exactly a seeded uniform
        // random permutation split into feasible routes.
        BaselineMethod::Random => init_population(inst, 1, args.seed).remove(0).decoded,
    };
    println!("{}", objectives_line(&sol.objectives));
    if let Some(path) = &args.solution {
        write_file(path, &solution_text(inst, &sol))?;
    }
    Ok(())
}

/// Replaces anything a filesystem might dislike in an instance name.
fn file_token(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '-' })
        .collect()
}

const SUMMARY_CSV_HEADER: &str = "instance,best_k,best_length,config_winner,total_time";

enum InstanceOutcome {
    /// Summary row for the instance.
    Row(String),
    /// Recorded failure; the sweep continues.
    Failed(String),
}

fn cmd_experiment(args: ExperimentArgs) -> CmdResult<()> {
    if args.runs == 0 {
        return Err(Failure::usage("--runs must be at least 1"));
    }
    let mut configs: Vec<ConfigName> = Vec::new();
    for c in if args.configs.is_empty() { ConfigName::ALL.to_vec() } else { args.configs.clone() } {
        if !configs.contains(&c) {
            configs.push(c);
        }
    }
    let base_cfg = build_config(args.params.as_deref(), None, None)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Failure::internal(format!("cannot create {}: {e}", args.out.display())))?;

    let mut summary = String::from(SUMMARY_CSV_HEADER);
    summary.push('\n');
    let mut failures: Vec<String> = Vec::new();
    for path in &args.instances {
        match experiment_instance(path, &configs, args.runs, args.seed, &base_cfg, &args.out)? {
            InstanceOutcome::Row(row) => summary.push_str(&row),
            InstanceOutcome::Failed(message) => {
                eprintln!("warning: {message}");
                failures.push(message);
            }
        }
    }
    write_file(&args.out.join("summary.csv"), &summary)?;
    if !failures.is_empty() {
        write_file(&args.out.join("failures.txt"), &(failures.join("\n") + "\n"))?;
    }
    Ok(())
}

/// Runs the whole config x seed grid for one instance and writes its run
/// logs. Instance-level problems become `Failed`; a rejected configuration
/// or an unwritable output directory aborts the sweep.
fn experiment_instance(
    path: &Path,
    configs: &[ConfigName],
    runs: usize,
    base_seed: u64,
    base_cfg: &GaConfig,
    out_dir: &Path,
) -> CmdResult<InstanceOutcome> {
    let file = match InstanceFile::open(path) {
        Ok(file) => file,
        Err(e) => return Ok(InstanceOutcome::Failed(format!("{}: {e}", path.display()))),
    };
    let inst = &file.instance;
    let started = Instant::now();

    // Config-major grid: entry i runs configs[i / runs] with seed base + i % runs.
    let results: Vec<postvrp::Result<GaResult>> = grid_map(configs.len() * runs, |i| {
        let mut cfg = base_cfg.clone();
        configs[i / runs].apply(&mut cfg);
        cfg.seed = base_seed + (i % runs) as u64;
        evolve(inst, &cfg)
    });

    let mut per_config: Vec<Option<Objectives>> = vec![None; configs.len()];
    for (i, result) in results.iter().enumerate() {
        let result = match result {
            Ok(result) => result,
            Err(Error::Unsupported(message)) => return Err(Failure::usage(message.clone())),
            Err(e) => return Ok(InstanceOutcome::Failed(format!("{}: {e}", path.display()))),
        };
        let config = configs[i / runs];
        let seed = base_seed + (i % runs) as u64;
        let name = format!("{}_{}_s{seed}.csv", file_token(inst.name()), config.label());
        write_file(&out_dir.join(name), &run_csv(result))?;
        let o = result.best.objectives;
        let slot = &mut per_config[i / runs];
        let better = slot.is_none_or(|cur| compare_fitness(&o, &cur).is_lt());
        if better {
            *slot = Some(o);
        }
    }

    let best = per_config
        .iter()
        .filter_map(|o| *o)
        .min_by(|a, b| compare_fitness(a, b))
        .expect("at least one configuration ran");
    let winners: Vec<&str> = configs
        .iter()
        .zip(&per_config)
        .filter(|(_, o)| o.is_some_and(|o| compare_fitness(&o, &best).is_eq()))
        .map(|(c, _)| c.label())
        .collect();
    let elapsed = started.elapsed().as_secs_f64();
    eprintln!(
        "{}: vehicles={} length={} winner={} ({} configs x {runs} runs in {elapsed:.1}s)",
        inst.name(),
        best.vehicles,
        best.total_length,
        winners.join("+"),
        configs.len()
    );
    Ok(InstanceOutcome::Row(format!(
        "{},{},{},{},{elapsed:.3}\n",
        inst.name(),
        best.vehicles,
        best.total_length,
        winners.join("+")
    )))
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonInstance {
    name: String,
    rmax: f64,
    #[serde(default)]
    depot: Option<JsonPoint>,
    #[serde(default)]
    deliveries: Vec<JsonDelivery>,
    /// Row-major (n+1) x (n+1) travel times, row 0 the depot. Mutually
    /// exclusive with coordinates.
    #[serde(default)]
    matrix: Option<Vec<Vec<f64>>>,
}

#[derive(serde::Deserialize)]
struct JsonPoint {
    x: f64,
    y: f64,
}

#[derive(serde::Deserialize)]
struct JsonDelivery {
    id: u64,
    x: f64,
    y: f64,
}

fn cmd_convert(args: ConvertArgs) -> CmdResult<()> {
    let bad = |what: String| Failure::instance(format!("{}: {what}", args.input.display()));
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Failure::instance(format!("{}: {e}", args.input.display())))?;
    let json: JsonInstance = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;

    let inst = if let Some(matrix) = json.matrix {
        if json.depot.is_some() || !json.deliveries.is_empty() {
            return Err(bad("matrix and coordinates are mutually exclusive".into()));
        }
        if matrix.len() < 2 {
            return Err(bad("matrix needs a depot row and at least one delivery".into()));
        }
        if matrix.iter().any(|row| row.len() != matrix.len()) {
            return Err(bad("matrix must be square".into()));
        }
        let n = matrix.len() - 1;
        let flat: Vec<f64> = matrix.into_iter().flatten().collect();
        Instance::from_matrix(&json.name, n, flat, None, Constraint::MaxRouteLength(json.rmax))
    } else {
        let Some(depot) = json.depot else {
            return Err(bad("depot coordinates are required".into()));
        };
        if json.deliveries.is_empty() {
            return Err(bad("no deliveries".into()));
        }
        let points: Vec<(u64, f64, f64)> =
            json.deliveries.iter().map(|d| (d.id, d.x, d.y)).collect();
        Instance::from_points(
            &json.name,
            (depot.x, depot.y),
            &points,
            None,
            false,
            Constraint::MaxRouteLength(json.rmax),
        )
    }
    .map_err(|e| bad(e.to_string()))?;

    let text = write_postvrp(&inst).map_err(|e| bad(e.to_string()))?;
    write_file(&args.out, &text)?;
    eprintln!("wrote {} ({} deliveries)", args.out.display(), inst.num_deliveries());
    Ok(())
}

/// Ratio test done in integers so 11 versus 10 lands inside the bucket.
fn within_ten_percent(best_k: usize, k_opt: usize) -> bool {
    best_k * 10 <= k_opt * 11
}

/// Pulls (instance, best_k) pairs out of a summary CSV, tolerating extra
/// columns and `#` trailer lines.
fn parse_summary(text: &str, origin: &Path, rows: &mut Vec<(String, usize)>) -> CmdResult<()> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(Failure::instance(format!("{}: empty summary", origin.display())));
    };
    let cols: Vec<&str> = header.split(',').collect();
    let (Some(name_col), Some(k_col)) = (
        cols.iter().position(|c| *c == "instance"),
        cols.iter().position(|c| *c == "best_k"),
    ) else {
        return Err(Failure::instance(format!(
            "{}: summary header must have instance and best_k columns",
            origin.display()
        )));
    };
    for (idx, line) in lines {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |what: String| Failure::instance(format!("{}:{}: {what}", origin.display(), idx + 1));
        let fields: Vec<&str> = line.split(',').collect();
        let name = *fields.get(name_col).ok_or_else(|| err("missing instance column".into()))?;
        let raw_k = *fields.get(k_col).ok_or_else(|| err("missing best_k column".into()))?;
        let best_k = raw_k.parse().map_err(|_| err(format!("bad best_k {raw_k:?}")))?;
        rows.push((name.to_string(), best_k));
    }
    Ok(())
}

fn cmd_gap(args: GapArgs) -> CmdResult<()> {
    let mut rows: Vec<(String, usize)> = Vec::new();
    for path in &args.summaries {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::instance(format!("{}: {e}", path.display())))?;
        parse_summary(&text, path, &mut rows)?;
    }
    let mut out = String::from("instance,best_k,k_opt,ratio\n");
    let (mut scored, mut exact, mut within) = (0usize, 0usize, 0usize);
    for (name, best_k) in &rows {
        let k_opt = match parse_instance_name(name) {
            InstanceName::Cvrplib { vehicles, .. } if vehicles > 0 => vehicles,
            _ => {
                eprintln!("warning: {name}: no fleet size in the name, skipped");
                continue;
            }
        };
        scored += 1;
        exact += usize::from(*best_k == k_opt);
        within += usize::from(within_ten_percent(*best_k, k_opt));
        let _ = writeln!(out, "{name},{best_k},{k_opt},{:.3}", *best_k as f64 / k_opt as f64);
    }
    let _ = writeln!(out, "# exact {exact}/{scored}");
    let _ = writeln!(out, "# within_10pct {within}/{scored}");
    print!("{out}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use postvrp::genetic::GenerationLog;
    use std::time::Duration;

    #[test]
    fn params_override_defaults() {
        let mut cfg = GaConfig::default();
        let text = "population_size = 8 # small\n\nmax_generations=5\ncrossover=ox\nlocal_search=false\n";
        apply_params(&mut cfg, text, Path::new("p.conf")).unwrap();
        assert_eq!(cfg.population_size, 8);
        assert_eq!(cfg.max_generations, 5);
        assert_eq!(cfg.crossover, Crossover::Order);
        assert!(!cfg.local_search);
    }

    #[test]
    fn params_reject_unknown_keys_and_bad_values() {
        let mut cfg = GaConfig::default();
        let err = apply_params(&mut cfg, "pop=3\n", Path::new("p.conf")).unwrap_err();
        assert_eq!(err.code, 1);
        assert!(err.message.contains("unknown parameter"));
        let err = apply_params(&mut cfg, "mutation_rate=often\n", Path::new("p.conf")).unwrap_err();
        assert_eq!(err.code, 1);
        assert!(err.message.contains("bad value"));
    }

    #[test]
    fn config_names_map_to_operator_and_local_search() {
        for (name, crossover, ls) in [
            (ConfigName::BcrLs, Crossover::RouteInsertion, true),
            (ConfigName::BcrNols, Crossover::RouteInsertion, false),
            (ConfigName::OxLs, Crossover::Order, true),
            (ConfigName::OxNols, Crossover::Order, false),
        ] {
            let mut cfg = GaConfig::default();
            name.apply(&mut cfg);
            assert_eq!(cfg.crossover, crossover, "{}", name.label());
            assert_eq!(cfg.local_search, ls, "{}", name.label());
        }
    }

    #[test]
    fn run_csv_ends_with_the_polish_row() {
        let inst = Instance::from_points(
            "two",
            (0.0, 0.0),
            &[(1, 1.0, 0.0), (2, 2.0, 0.0)],
            None,
            false,
            Constraint::Capacity(10),
        )
        .unwrap();
        let best = Solution::new(&inst, vec![vec![1, 2]]);
        let log = vec![GenerationLog {
            generation: 0,
            best_vehicles: 2,
            best_length: 6.0,
            best_spread: 1.0,
            mean_length: 6.5,
            elapsed: Duration::from_millis(1),
        }];
        let csv = run_csv(&GaResult { best, log });
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], RUN_CSV_HEADER);
        assert_eq!(lines[1], "0,2,6,1,6.5");
        assert_eq!(lines[2], "1,1,4,0,6.5");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn ten_percent_bucket_boundaries() {
        assert!(within_ten_percent(25, 25));
        assert!(within_ten_percent(27, 25));
        assert!(within_ten_percent(11, 10));
        assert!(!within_ten_percent(12, 10));
        assert!(!within_ten_percent(28, 25));
    }

    #[test]
    fn summary_parsing_tolerates_trailers_and_extra_columns() {
        let text = "instance,best_k,best_length,config_winner,total_time\n\
                    X-n101-k25,26,27591.5,bcr-ls,12.0\n\
                    # exact 0/1\n";
        let mut rows = Vec::new();
        parse_summary(text, Path::new("s.csv"), &mut rows).unwrap();
        assert_eq!(rows, vec![("X-n101-k25".to_string(), 26)]);

        let err = parse_summary("a,b\n", Path::new("s.csv"), &mut rows).unwrap_err();
        assert_eq!(err.code, 2);
    }

    #[test]
    fn file_tokens_are_path_safe() {
        assert_eq!(file_token("X-n101-k25"), "X-n101-k25");
        assert_eq!(file_token("weird name/1"), "weird-name-1");
    }
}

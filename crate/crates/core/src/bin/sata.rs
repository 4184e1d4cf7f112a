//! `sata` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 unparseable input
//! (instance file, config file, or arguments), 3 solver error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sata::experiment::{
    actual_histogram, episode_summary_csv, histogram_csv, run_episodes, run_solver, run_sweep, summarize,
    summary_csv, sweep_rows_csv, verify_suite, write_atomic, SolveOptions, Solver, SweepSpec,
};
use sata::gen::{generate, generate_best_effort, measure_phi, GenConfig, WeightMode};
use sata::lp::check_lemma1_equivalence;
use sata::model::{instance_to_json, read_instance};
use sata::oracle::{brute_force_bottleneck, brute_force_wta};
use sata::tracking::{write_episode_csv, Policy, SimConfig};
use sata::{Error, Instance};

#[derive(Parser)]
#[command(name = "sata", version, about = "Simultaneous action and target assignment toolkit")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (gen, solve, episode) or directory (sweep). Stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the greedy per-step trace as JSON.
    #[arg(long, global = true)]
    emit_trace: Option<PathBuf>,
    /// Write per-message round logs as CSV.
    #[arg(long, global = true)]
    emit_rounds: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Solve one instance and print the result as JSON.
    Solve(SolveArgs),
    /// Run solvers over generated instances and write rows.csv and summary.csv.
    Sweep(SweepArgs),
    /// Simulate tracking episodes and write per-step rows as CSV.
    Episode(EpisodeArgs),
    /// Exact optima of both objectives for a small instance.
    Oracle { instance: PathBuf },
    /// Check the integer-program equivalence and greedy's one-half bound.
    Verify {
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    robots: usize,
    #[arg(long, default_value_t = 2)]
    primitives: usize,
    #[arg(long)]
    targets: usize,
    #[arg(long)]
    phi: f64,
    #[arg(long, default_value = "binary")]
    weights: WeightMode,
    /// Return the smallest construction when phi is below it.
    #[arg(long)]
    best_effort: bool,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "greedy")]
    solver: String,
    #[arg(long, default_value_t = 2)]
    h: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Greedy order as one-based robot ids, e.g. 2,1,3.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
    /// Write robot,primitive,x,chosen rows.
    #[arg(long)]
    x_csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    robots: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    targets: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    phi: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "binary")]
    weights: Vec<WeightMode>,
    #[arg(long, default_value_t = 2)]
    primitives: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "greedy,oracle-wta,random")]
    solvers: Vec<String>,
    #[arg(long = "h", value_delimiter = ',', default_value = "1,2,5,8")]
    hs: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
}

#[derive(Args)]
struct EpisodeArgs {
    /// Preset name (gazebo-like, parker-cmp) or JSON config path.
    #[arg(long, default_value = "parker-cmp")]
    config: String,
    #[arg(long, value_delimiter = ',', default_value = "greedy,parker")]
    policies: Vec<String>,
    /// Episode seeds; the global seed alone when absent.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Target counts; the config's count when absent.
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<usize>>,
    #[arg(long)]
    robots: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, default_value_t = 2)]
    h: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Write per (targets, policy) aggregates.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Write a histogram of targets in view per step.
    #[arg(long)]
    histogram: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(e: impl std::fmt::Display) -> Self {
        Failure { code: 2, message: e.to_string() }
    }

    fn solver(e: impl std::fmt::Display) -> Self {
        Failure { code: 3, message: e.to_string() }
    }

    fn io(e: impl std::fmt::Display) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(args) => cmd_gen(&cli, args),
        Command::Solve(args) => cmd_solve(&cli, args),
        Command::Sweep(args) => cmd_sweep(&cli, args),
        Command::Episode(args) => cmd_episode(&cli, args),
        Command::Oracle { instance } => cmd_oracle(&cli, instance),
        Command::Verify { count } => cmd_verify(&cli, *count),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult {
    match out {
        Some(path) => write_atomic(path, bytes).map_err(Failure::io),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).map_err(Failure::io)
        }
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    read_instance(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn cmd_gen(cli: &Cli, a: &GenArgs) -> CliResult {
    let cfg = GenConfig {
        robot_count: a.robots,
        primitives_per_robot: a.primitives,
        target_count: a.targets,
        phi_percent: a.phi,
        weight_mode: a.weights,
        seed: cli.seed,
    };
    let inst = if a.best_effort { generate_best_effort(&cfg) } else { generate(&cfg) };
    let inst = inst.map_err(Failure::solver)?;
    let phi = measure_phi(&inst).map_err(Failure::solver)?;
    eprintln!("phi = {phi:.4}% ({} edges)", inst.edge_count());
    let mut text = instance_to_json(&inst);
    text.push('\n');
    emit(cli.out.as_deref(), text.as_bytes())
}

fn cmd_solve(cli: &Cli, a: &SolveArgs) -> CliResult {
    let inst = load(&a.instance)?;
    let solver: Solver = a.solver.parse().map_err(Failure::parse)?;
    let order = match &a.order {
        Some(ids) => Some(
            ids.iter()
                .map(|&id| id.checked_sub(1).ok_or_else(|| Failure::parse("robot ids in --order start at 1")))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let opts = SolveOptions { h: a.h, epsilon: a.epsilon, order, seed: cli.seed, ..SolveOptions::default() };
    let start = Instant::now();
    let out = run_solver(&inst, solver, &opts).map_err(Failure::solver)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    if let (Some(path), Some(trace)) = (&cli.emit_trace, &out.trace) {
        write_atomic(path, trace.to_json().as_bytes()).map_err(Failure::io)?;
    }
    if let (Some(path), Some(log)) = (&cli.emit_rounds, &out.log) {
        let mut buf = Vec::new();
        log.write_csv(&mut buf).map_err(Failure::io)?;
        write_atomic(path, &buf).map_err(Failure::io)?;
    }
    if let Some(path) = &a.x_csv {
        let mut buf = String::from("robot,primitive,x,chosen\n");
        for i in 0..inst.robot_count() {
            for m in 0..inst.primitive_count(i) {
                let chosen = out.chosen.as_ref().map(|c| c[i] == m);
                let x = match (&out.fractional, chosen) {
                    (Some(f), _) => f.x[i][m],
                    (None, Some(c)) => c as u8 as f64,
                    (None, None) => 0.0,
                };
                let chosen = chosen.map_or(String::new(), |c| (c as u8).to_string());
                buf.push_str(&format!("{},{},{},{}\n", i + 1, m + 1, x, chosen));
            }
        }
        write_atomic(path, buf.as_bytes()).map_err(Failure::io)?;
    }

    let report = json!({
        "solver": out.solver.name(),
        "objective": out.objective.to_string(),
        "value": out.value.is_finite().then_some(out.value),
        "vacuous": out.value.is_infinite(),
        "assignment": out.chosen.as_ref().map(|c| c.iter().map(|m| m + 1).collect::<Vec<_>>()),
        "lp_value": out.fractional.as_ref().map(|f| f.w).filter(|w| w.is_finite()),
        "rounds": out.rounds,
        "bytes": out.log.as_ref().map_or(0, |l| l.total_bytes()),
        "wall_ms": wall_ms,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(cli.out.as_deref(), text.as_bytes())
}

fn cmd_sweep(cli: &Cli, a: &SweepArgs) -> CliResult {
    let solvers = a.solvers.iter().map(|s| s.parse()).collect::<Result<Vec<Solver>, _>>().map_err(Failure::parse)?;
    let spec = SweepSpec {
        robots: a.robots.clone(),
        targets: a.targets.clone(),
        phis: a.phi.clone(),
        weights: a.weights.clone(),
        primitives_per_robot: a.primitives,
        trials: a.trials,
        seed: cli.seed,
        solvers,
        hs: a.hs.clone(),
        epsilon: a.epsilon,
    };
    spec.validate().map_err(Failure::parse)?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("sweep-out"));
    std::fs::create_dir_all(&dir).map_err(Failure::io)?;
    let rows = run_sweep(&spec).map_err(Failure::solver)?;
    let summary = summarize(&rows);
    write_atomic(&dir.join("rows.csv"), &sweep_rows_csv(&rows).map_err(Failure::io)?).map_err(Failure::io)?;
    write_atomic(&dir.join("summary.csv"), &summary_csv(&summary).map_err(Failure::io)?).map_err(Failure::io)?;
    eprintln!("{} rows, {} summary rows written to {}", rows.len(), summary.len(), dir.display());
    Ok(())
}

fn cmd_episode(cli: &Cli, a: &EpisodeArgs) -> CliResult {
    let mut cfg = SimConfig::load(&a.config).map_err(Failure::parse)?;
    if let Some(r) = a.robots {
        cfg.robot_count = r;
    }
    if let Some(s) = a.steps {
        cfg.horizon = s;
    }
    cfg.validate().map_err(Failure::parse)?;
    let policies = a
        .policies
        .iter()
        .map(|p| {
            if p == "local" {
                return Ok(Policy::Local { h: a.h, epsilon: a.epsilon });
            }
            Ok(match p.parse()? {
                Policy::Local { h, .. } => Policy::Local { h, epsilon: a.epsilon },
                other => other,
            })
        })
        .collect::<Result<Vec<_>, Error>>()
        .map_err(Failure::parse)?;
    let seeds = a.seeds.clone().unwrap_or_else(|| vec![cli.seed]);
    let targets = a.targets.clone().unwrap_or_else(|| vec![cfg.target_count]);
    let reports = run_episodes(&cfg, &targets, &seeds, &policies).map_err(Failure::solver)?;

    for r in &reports {
        eprintln!(
            "seed {} policy {} targets {}: start {} mean actual {:.4}, {} assumption violations",
            r.seed,
            r.policy,
            r.rows.first().map_or(cfg.target_count, |row| row.targets),
            &r.initial_hash[..16],
            r.mean_actual(),
            r.assumption_violations
        );
    }
    let rows: Vec<_> = reports.iter().flat_map(|r| r.rows.iter().cloned()).collect();
    let mut buf = Vec::new();
    write_episode_csv(&rows, &mut buf).map_err(Failure::io)?;
    emit(cli.out.as_deref(), &buf)?;
    if let Some(path) = &a.summary {
        let csv = episode_summary_csv(&sata::experiment::summarize_episodes(&reports)).map_err(Failure::io)?;
        write_atomic(path, &csv).map_err(Failure::io)?;
    }
    if let Some(path) = &a.histogram {
        write_atomic(path, &histogram_csv(&actual_histogram(&reports)).map_err(Failure::io)?).map_err(Failure::io)?;
    }
    Ok(())
}

fn cmd_oracle(cli: &Cli, path: &Path) -> CliResult {
    let inst = load(path)?;
    let wta = brute_force_wta(&inst).map_err(Failure::solver)?;
    let bottleneck = brute_force_bottleneck(&inst).map_err(Failure::solver)?;
    let eq = check_lemma1_equivalence(&inst).map_err(Failure::solver)?;
    let one_based = |c: &[usize]| c.iter().map(|m| m + 1).collect::<Vec<_>>();
    let report = json!({
        "wta": {
            "optimum": wta.optimum,
            "assignment": one_based(&wta.best_assignment.chosen),
            "enumerated": wta.enumerated,
        },
        "bottleneck": {
            "optimum": bottleneck.optimum.is_finite().then_some(bottleneck.optimum),
            "assignment": one_based(&bottleneck.best_assignment.chosen),
            "enumerated": bottleneck.enumerated,
        },
        "equivalence": eq,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(cli.out.as_deref(), text.as_bytes())
}

fn cmd_verify(cli: &Cli, count: usize) -> CliResult {
    let r = verify_suite(cli.seed, count).map_err(Failure::solver)?;
    let mut text = serde_json::to_string_pretty(&json!({ "pass": r.pass(), "report": r })).expect("serializes");
    text.push('\n');
    emit(cli.out.as_deref(), text.as_bytes())?;
    if r.pass() {
        Ok(())
    } else {
        Err(Failure::solver("verification failed"))
    }
}

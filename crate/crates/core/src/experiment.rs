//! Solver registry, parameter sweeps, episode batches, and the
//! verification suites behind the command-line tool.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gen::{generate_best_effort, measure_phi, GenConfig, WeightMode};
use crate::greedy::{ascending_order, greedy_bottleneck, greedy_distributed_on, greedy_wta, GreedyTrace, TieBreak};
use crate::local::{round_solution, solve_local, LocalParams};
use crate::lp::{check_lemma1_equivalence, solve_instance_lp, LpOptions};
use crate::model::{derive_comm_graph, eval_bottleneck, eval_wta_from_x, FractionalSolution, Instance};
use crate::netsim::{csv_err, gather_scatter, RoundLog};
use crate::oracle::{brute_force_bottleneck, brute_force_wta, lp_round_baseline, random_baseline};
use crate::seed::SeedPath;
use crate::tracking::{run_episode, EpisodeReport, Policy, SimConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    Greedy,
    GreedyBottleneck,
    Local,
    Lp,
    LpRound,
    OracleWta,
    OracleBottleneck,
    Random,
    GatherScatter,
}

pub const SOLVER_NAMES: &str =
    "greedy|greedy-bottleneck|local|lp|lp-round|oracle-wta|oracle-bottleneck|oracle|random|gather-scatter";

impl Solver {
    pub fn objective(self) -> Objective {
        match self {
            Solver::Greedy | Solver::OracleWta | Solver::Random | Solver::GatherScatter => Objective::Wta,
            _ => Objective::Bottleneck,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Solver::Greedy => "greedy",
            Solver::GreedyBottleneck => "greedy-bottleneck",
            Solver::Local => "local",
            Solver::Lp => "lp",
            Solver::LpRound => "lp-round",
            Solver::OracleWta => "oracle-wta",
            Solver::OracleBottleneck => "oracle-bottleneck",
            Solver::Random => "random",
            Solver::GatherScatter => "gather-scatter",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "greedy" => Solver::Greedy,
            "greedy-bottleneck" => Solver::GreedyBottleneck,
            "local" => Solver::Local,
            "lp" => Solver::Lp,
            "lp-round" => Solver::LpRound,
            "oracle-wta" | "oracle" => Solver::OracleWta,
            "oracle-bottleneck" => Solver::OracleBottleneck,
            "random" => Solver::Random,
            "gather-scatter" => Solver::GatherScatter,
            _ => return Err(Error::Param(format!("unknown solver {s:?} ({SOLVER_NAMES})"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    Wta,
    Bottleneck,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Wta => "wta",
            Objective::Bottleneck => "bottleneck",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub h: usize,
    pub epsilon: f64,
    /// Greedy processing order; ascending ids when absent.
    pub order: Option<Vec<usize>>,
    /// Seed for the random baseline.
    pub seed: u64,
    pub lp: LpOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { h: 2, epsilon: 0.1, order: None, seed: 0, lp: LpOptions::default() }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub solver: Solver,
    pub objective: Objective,
    /// Objective value of the integral assignment, or the LP optimum for
    /// [`Solver::Lp`]. `+inf` for a bottleneck without targets.
    pub value: f64,
    pub chosen: Option<Vec<usize>>,
    pub fractional: Option<FractionalSolution>,
    pub rounds: usize,
    pub log: Option<RoundLog>,
    pub trace: Option<GreedyTrace>,
}

fn bottleneck_of(inst: &Instance, chosen: &[usize]) -> Result<f64> {
    Ok(eval_bottleneck(inst, &crate::model::Assignment::new(chosen.to_vec()))?.value())
}

pub fn run_solver(inst: &Instance, solver: Solver, opts: &SolveOptions) -> Result<SolveOutcome> {
    let order = opts.order.clone().unwrap_or_else(|| ascending_order(inst));
    let mut out = SolveOutcome {
        solver,
        objective: solver.objective(),
        value: 0.0,
        chosen: None,
        fractional: None,
        rounds: 0,
        log: None,
        trace: None,
    };
    let chosen = match solver {
        Solver::Greedy => {
            let (_, trace) = greedy_wta(inst, &order)?;
            let dist = greedy_distributed_on(inst, &derive_comm_graph(inst), &order)?;
            out.trace = Some(trace);
            out.rounds = dist.rounds();
            out.log = Some(dist.log);
            dist.assignment.chosen
        }
        Solver::GreedyBottleneck => greedy_bottleneck(inst, &order, TieBreak::Lowest)?.chosen,
        Solver::Local => {
            let mut params = LocalParams::new(opts.h, opts.epsilon)?;
            params.lp = opts.lp;
            let sol = solve_local(inst, &params)?;
            let a = round_solution(inst, &sol.fractional)?;
            out.rounds = sol.rounds();
            out.log = Some(sol.log);
            out.fractional = Some(sol.fractional);
            a.chosen
        }
        Solver::Lp => {
            let frac = solve_instance_lp(inst, &opts.lp)?;
            out.value = eval_bottleneck(inst, &frac)?.value();
            out.fractional = Some(frac);
            return Ok(out);
        }
        Solver::LpRound => lp_round_baseline(inst, &opts.lp)?.chosen,
        Solver::OracleWta => brute_force_wta(inst)?.best_assignment.chosen,
        Solver::OracleBottleneck => brute_force_bottleneck(inst)?.best_assignment.chosen,
        Solver::Random => random_baseline(inst, opts.seed).chosen,
        Solver::GatherScatter => {
            let central = |sub: &Instance| brute_force_wta(sub).map(|r| r.best_assignment.chosen);
            let (chosen, log) = gather_scatter(inst, &derive_comm_graph(inst), &central)?;
            out.rounds = log.rounds;
            out.log = Some(log);
            chosen
        }
    };
    out.value = match out.objective {
        Objective::Wta => eval_wta_from_x(inst, &chosen)?.0,
        Objective::Bottleneck => bottleneck_of(inst, &chosen)?,
    };
    out.chosen = Some(chosen);
    Ok(out)
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub robots: Vec<usize>,
    pub targets: Vec<usize>,
    pub phis: Vec<f64>,
    pub weights: Vec<WeightMode>,
    pub primitives_per_robot: usize,
    pub trials: usize,
    pub seed: u64,
    pub solvers: Vec<Solver>,
    /// Horizons for [`Solver::Local`]; one row per value.
    pub hs: Vec<usize>,
    pub epsilon: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Param("trial count must be at least 1".into()));
        }
        for (name, empty) in [
            ("robots", self.robots.is_empty()),
            ("targets", self.targets.is_empty()),
            ("phi", self.phis.is_empty()),
            ("weights", self.weights.is_empty()),
            ("solvers", self.solvers.is_empty()),
        ] {
            if empty {
                return Err(Error::Param(format!("sweep needs at least one {name} value")));
            }
        }
        if self.solvers.contains(&Solver::Local) && self.hs.is_empty() {
            return Err(Error::Param("local solver needs at least one h".into()));
        }
        Ok(())
    }

    fn cases(&self) -> Vec<SweepCase> {
        let mut out = Vec::new();
        for &robots in &self.robots {
            for &targets in &self.targets {
                for &phi in &self.phis {
                    for &weights in &self.weights {
                        out.push(SweepCase { robots, targets, phi, weights });
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct SweepCase {
    robots: usize,
    targets: usize,
    phi: f64,
    weights: WeightMode,
}

impl SweepCase {
    fn label(&self) -> String {
        format!("r{}-t{}-phi{}-{}", self.robots, self.targets, self.phi, self.weights)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub case: String,
    pub robots: usize,
    pub targets: usize,
    pub phi: f64,
    pub phi_measured: f64,
    pub weights: String,
    pub trial: usize,
    /// Generator seed of the instance: `gen --seed` with the case's
    /// parameters reproduces it.
    pub seed: u64,
    pub solver: String,
    pub h: Option<usize>,
    pub objective: String,
    pub value: f64,
    pub rounds: usize,
}

/// Seed of one sweep instance; depends only on the master seed, the case
/// and the trial.
pub fn sweep_instance_seed(master: u64, case: &str, trial: usize) -> u64 {
    SeedPath::new(master).child("sweep").child(case).index(trial as u64).value()
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let jobs: Vec<(SweepCase, usize)> =
        spec.cases().into_iter().flat_map(|c| (0..spec.trials).map(move |t| (c, t))).collect();
    let per_job: Vec<Result<Vec<SweepRow>>> = jobs
        .par_iter()
        .map(|&(case, trial)| {
            let label = case.label();
            let seed = sweep_instance_seed(spec.seed, &label, trial);
            let cfg = GenConfig {
                robot_count: case.robots,
                primitives_per_robot: spec.primitives_per_robot,
                target_count: case.targets,
                phi_percent: case.phi,
                weight_mode: case.weights,
                seed,
            };
            let inst = generate_best_effort(&cfg)?;
            let phi_measured = measure_phi(&inst)?;
            let mut rows = Vec::new();
            for &solver in &spec.solvers {
                let hs: Vec<Option<usize>> =
                    if solver == Solver::Local { spec.hs.iter().map(|&h| Some(h)).collect() } else { vec![None] };
                for h in hs {
                    let opts = SolveOptions {
                        h: h.unwrap_or(0),
                        epsilon: spec.epsilon,
                        seed: SeedPath::new(seed).child("random").value(),
                        ..SolveOptions::default()
                    };
                    let out = run_solver(&inst, solver, &opts)?;
                    rows.push(SweepRow {
                        case: label.clone(),
                        robots: case.robots,
                        targets: case.targets,
                        phi: case.phi,
                        phi_measured,
                        weights: case.weights.to_string(),
                        trial,
                        seed,
                        solver: solver.to_string(),
                        h,
                        objective: out.objective.to_string(),
                        value: out.value,
                        rounds: out.rounds,
                    });
                }
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_job {
        rows.extend(r?);
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub case: String,
    pub solver: String,
    pub h: Option<usize>,
    pub count: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

/// Min, mean and max value per case, solver and horizon.
pub fn summarize(rows: &[SweepRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, String, Option<usize>), Vec<f64>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.case.clone(), r.solver.clone(), r.h)).or_default().push(r.value);
    }
    groups
        .into_iter()
        .map(|((case, solver, h), v)| SummaryRow {
            case,
            solver,
            h,
            count: v.len(),
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
        .collect()
}

fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

pub const SWEEP_HEADER: [&str; 13] =
    ["case", "robots", "targets", "phi", "phi_measured", "weights", "trial", "seed", "solver", "h", "objective", "value", "rounds"];
pub const SUMMARY_HEADER: [&str; 7] = ["case", "solver", "h", "count", "min", "mean", "max"];

pub fn sweep_rows_csv(rows: &[SweepRow]) -> Result<Vec<u8>> {
    to_csv(rows, &SWEEP_HEADER)
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<Vec<u8>> {
    to_csv(rows, &SUMMARY_HEADER)
}

/// Runs every (target count, seed, policy) episode; reports come back in
/// that nesting order.
pub fn run_episodes(
    base: &SimConfig,
    target_counts: &[usize],
    seeds: &[u64],
    policies: &[Policy],
) -> Result<Vec<EpisodeReport>> {
    let mut jobs = Vec::new();
    for &t in target_counts {
        for &seed in seeds {
            for &p in policies {
                let mut cfg = base.clone();
                cfg.target_count = t;
                cfg.seed = seed;
                jobs.push((cfg, p));
            }
        }
    }
    jobs.par_iter().map(|(cfg, p)| run_episode(cfg, *p)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpisodeSummary {
    pub targets: usize,
    pub policy: String,
    pub episodes: usize,
    /// Mean over episodes of the time-averaged actual objective.
    pub mean_actual: f64,
    pub std_actual: f64,
    pub mean_estimated: f64,
    pub mean_rounds: f64,
    pub assumption_violations: usize,
}

pub const EPISODE_SUMMARY_HEADER: [&str; 8] = [
    "targets",
    "policy",
    "episodes",
    "mean_actual",
    "std_actual",
    "mean_estimated",
    "mean_rounds",
    "assumption_violations",
];

pub fn summarize_episodes(reports: &[EpisodeReport]) -> Vec<EpisodeSummary> {
    let mut groups: BTreeMap<(usize, String), Vec<&EpisodeReport>> = BTreeMap::new();
    for r in reports {
        let targets = r.rows.first().map_or(0, |row| row.targets);
        groups.entry((targets, r.policy.to_string())).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((targets, policy), reps)| {
            let n = reps.len() as f64;
            let actual: Vec<f64> = reps.iter().map(|r| r.mean_actual()).collect();
            let mean = actual.iter().sum::<f64>() / n;
            let var = actual.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
            let steps: usize = reps.iter().map(|r| r.rows.len()).sum();
            let rounds: usize = reps.iter().flat_map(|r| &r.rows).map(|row| row.rounds).sum();
            EpisodeSummary {
                targets,
                policy,
                episodes: reps.len(),
                mean_actual: mean,
                std_actual: var.sqrt(),
                mean_estimated: reps.iter().map(|r| r.mean_estimated()).sum::<f64>() / n,
                mean_rounds: if steps == 0 { 0.0 } else { rounds as f64 / steps as f64 },
                assumption_violations: reps.iter().map(|r| r.assumption_violations).sum(),
            }
        })
        .collect()
}

pub fn episode_summary_csv(rows: &[EpisodeSummary]) -> Result<Vec<u8>> {
    to_csv(rows, &EPISODE_SUMMARY_HEADER)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct HistogramRow {
    pub targets: usize,
    pub policy: String,
    /// Number of targets in view after a step.
    pub observed: usize,
    pub steps: usize,
}

/// How many steps ended with each number of targets in view.
pub fn actual_histogram(reports: &[EpisodeReport]) -> Vec<HistogramRow> {
    let mut counts: BTreeMap<(usize, String, usize), usize> = BTreeMap::new();
    for r in reports {
        for row in &r.rows {
            *counts.entry((row.targets, row.policy.clone(), row.actual as usize)).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .map(|((targets, policy, observed), steps)| HistogramRow { targets, policy, observed, steps })
        .collect()
}

pub fn histogram_csv(rows: &[HistogramRow]) -> Result<Vec<u8>> {
    to_csv(rows, &["targets", "policy", "observed", "steps"])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub instances: usize,
    pub equivalence_passed: usize,
    /// Smallest and mean greedy / optimum ratio over instances with a
    /// positive optimum.
    pub min_greedy_ratio: f64,
    pub mean_greedy_ratio: f64,
    pub half_bound_violations: usize,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.equivalence_passed == self.instances && self.half_bound_violations == 0
    }
}

/// Equivalence of the integer max-min program and greedy's one-half bound
/// on `count` small generated instances.
pub fn verify_suite(seed: u64, count: usize) -> Result<VerifyReport> {
    let results: Vec<Result<(bool, Option<f64>)>> = (0..count)
        .into_par_iter()
        .map(|k| {
            let path = SeedPath::new(seed).child("verify").index(k as u64);
            let robots = 2 + k % 3;
            let targets = [4, 6][k / 3 % 2];
            let phi = [15.0, 25.0, 40.0][k / 6 % 3];
            let mut cfg = GenConfig::new(robots, targets, phi, path.value());
            if k % 2 == 1 {
                cfg.weight_mode = WeightMode::Uniform;
            }
            let inst = generate_best_effort(&cfg)?;
            let eq = check_lemma1_equivalence(&inst)?.pass;
            let opt = brute_force_wta(&inst)?.optimum;
            let greedy = greedy_wta(&inst, &ascending_order(&inst))?.0;
            let value = eval_wta_from_x(&inst, &greedy.chosen)?.0;
            Ok((eq, (opt > 0.0).then(|| value / opt)))
        })
        .collect();
    let mut report = VerifyReport {
        instances: count,
        equivalence_passed: 0,
        min_greedy_ratio: f64::INFINITY,
        mean_greedy_ratio: 0.0,
        half_bound_violations: 0,
    };
    let mut ratios = Vec::new();
    for r in results {
        let (eq, ratio) = r?;
        report.equivalence_passed += eq as usize;
        if let Some(ratio) = ratio {
            report.min_greedy_ratio = report.min_greedy_ratio.min(ratio);
            report.half_bound_violations += (ratio < 0.5) as usize;
            ratios.push(ratio);
        }
    }
    report.mean_greedy_ratio = if ratios.is_empty() { 1.0 } else { ratios.iter().sum::<f64>() / ratios.len() as f64 };
    Ok(report)
}

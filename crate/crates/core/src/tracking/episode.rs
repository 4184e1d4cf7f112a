use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::parker::{parker_displacement, PositionNode};
use super::world::{
    build_primitives, observed_count, disk_graph, estimated_quality, predict_targets, snapshot_instance,
    step_targets, Point, WorldState,
};
use crate::error::{Error, Result};
use crate::greedy::{ascending_order, greedy_distributed_on};
use crate::local::{round_solution, solve_local_on, LocalParams};
use crate::model::{derive_comm_graph, eval_wta_from_x, CommGraph};
use crate::netsim::{csv_err, run_rounds};
use crate::oracle::random_baseline;
use crate::seed::SeedPath;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Policy {
    Greedy,
    Local { h: usize, epsilon: f64 },
    Random,
    Parker,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Greedy => f.write_str("greedy"),
            Policy::Local { h, .. } => write!(f, "local-h{h}"),
            Policy::Random => f.write_str("random"),
            Policy::Parker => f.write_str("parker"),
        }
    }
}

impl FromStr for Policy {
    type Err = Error;

    /// `greedy`, `random`, `parker`, or `local` (h = 2, epsilon = 0.1)
    /// optionally written `local-h<h>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Policy::Greedy),
            "random" => Ok(Policy::Random),
            "parker" => Ok(Policy::Parker),
            "local" => Ok(Policy::Local { h: 2, epsilon: 0.1 }),
            _ => match s.strip_prefix("local-h").map(str::parse) {
                Some(Ok(h)) => Ok(Policy::Local { h, epsilon: 0.1 }),
                _ => Err(Error::Param(format!("unknown policy {s:?} (greedy|local|local-h<h>|random|parker)"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpisodeRow {
    pub seed: u64,
    pub targets: usize,
    pub step: usize,
    pub policy: String,
    /// Value of the selection against predicted target positions.
    pub estimated: f64,
    /// Targets in view of some robot after robots and targets have moved.
    pub actual: f64,
    pub rounds: usize,
    pub bytes: usize,
}

pub const EPISODE_HEADER: [&str; 8] = ["seed", "targets", "step", "policy", "estimated", "actual", "rounds", "bytes"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpisodeReport {
    pub policy: Policy,
    pub seed: u64,
    /// Hash of the world before the first step.
    pub initial_hash: String,
    pub rows: Vec<EpisodeRow>,
    /// Robot pairs that shared a target while out of communication range,
    /// summed over steps.
    pub assumption_violations: usize,
}

impl EpisodeReport {
    pub fn mean_actual(&self) -> f64 {
        mean(self.rows.iter().map(|r| r.actual))
    }

    pub fn mean_estimated(&self) -> f64 {
        mean(self.rows.iter().map(|r| r.estimated))
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn write_episode_csv<W: Write>(rows: &[EpisodeRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EPISODE_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.seed.to_string(),
            r.targets.to_string(),
            r.step.to_string(),
            r.policy.clone(),
            r.estimated.to_string(),
            r.actual.to_string(),
            r.rounds.to_string(),
            r.bytes.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// The initial world for a seed. Policies never draw from this stream, so
/// every policy starts from the same state.
pub fn initial_world(config: &SimConfig) -> WorldState {
    WorldState::random(config, &mut SeedPath::new(config.seed).child("world").rng())
}

struct Decision {
    next: Vec<Point>,
    estimated: f64,
    rounds: usize,
    bytes: usize,
}

fn union(a: &CommGraph, b: &CommGraph) -> CommGraph {
    CommGraph::from_edges(a.node_count(), a.edges().into_iter().chain(b.edges()))
}

/// Runs `config.horizon` select-then-execute steps.
pub fn run_episode(config: &SimConfig, policy: Policy) -> Result<EpisodeReport> {
    config.validate()?;
    let local = match policy {
        Policy::Local { h, epsilon } => {
            let mut p = LocalParams::new(h, epsilon)?;
            p.lp.max_primitives = usize::MAX;
            Some(p)
        }
        _ => None,
    };
    let root = SeedPath::new(config.seed);
    let mut world = initial_world(config);
    let initial_hash = world.hash();
    let mut target_rng = root.child("targets").rng();
    let mut prim_rng = root.child("primitives").rng();
    let random_path = root.child("policy-random");
    let mut rows = Vec::with_capacity(config.horizon);
    let mut violations = 0;

    for step in 0..config.horizon {
        let robots = world.robot_positions();
        let disk = disk_graph(&robots, config.comm_range);
        let decision = if policy == Policy::Parker {
            let mut nodes: Vec<PositionNode> =
                robots.iter().map(|&pos| PositionNode { pos, heard: Vec::new(), done: false }).collect();
            let log = run_rounds(&disk, &mut nodes, 1)?;
            let targets = world.target_positions();
            let next: Vec<Point> = nodes
                .iter()
                .map(|node| {
                    let d = parker_displacement(node.pos, &targets, &node.heard, config);
                    [
                        (node.pos[0] + d[0]).clamp(0.0, config.arena),
                        (node.pos[1] + d[1]).clamp(0.0, config.arena),
                    ]
                })
                .collect();
            let prims = build_primitives(&world, config, &mut prim_rng);
            let estimated = estimated_quality(&next, &predict_targets(&world, config), &prims.observed, config);
            Decision { next, estimated, rounds: log.rounds, bytes: log.total_bytes() }
        } else {
            let prims = build_primitives(&world, config, &mut prim_rng);
            let inst = snapshot_instance(&world, &prims, config);
            let derived = derive_comm_graph(&inst);
            violations += derived.edges().into_iter().filter(|&(a, b)| !disk.has_edge(a, b)).count();
            let graph = union(&disk, &derived);
            let (chosen, rounds, bytes) = match policy {
                Policy::Greedy => {
                    let out = greedy_distributed_on(&inst, &graph, &ascending_order(&inst))?;
                    (out.assignment.chosen, out.log.rounds, out.log.total_bytes())
                }
                Policy::Local { .. } => {
                    let params = local.as_ref().expect("local params are set");
                    let out = solve_local_on(&inst, &graph, params)?;
                    let a = round_solution(&inst, &out.fractional)?;
                    (a.chosen, out.log.rounds, out.log.total_bytes())
                }
                Policy::Random => (random_baseline(&inst, random_path.index(step as u64).value()).chosen, 0, 0),
                Policy::Parker => unreachable!(),
            };
            let estimated = eval_wta_from_x(&inst, &chosen)?.0;
            let next = chosen.iter().enumerate().map(|(i, &m)| prims.poses[i][m]).collect();
            Decision { next, estimated, rounds, bytes }
        };

        world.move_robots(&decision.next);
        world = step_targets(&world, config, &mut target_rng);
        let actual = observed_count(&world.robot_positions(), &world.target_positions(), config.sensing_range) as f64;
        rows.push(EpisodeRow {
            seed: config.seed,
            targets: config.target_count,
            step,
            policy: policy.to_string(),
            estimated: decision.estimated,
            actual,
            rounds: decision.rounds,
            bytes: decision.bytes,
        });
    }
    Ok(EpisodeReport { policy, seed: config.seed, initial_hash, rows, assumption_violations: violations })
}

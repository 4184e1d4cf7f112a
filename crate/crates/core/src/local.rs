//! The local algorithm for the relaxed bottleneck objective.
//!
//! Every robot floods its local sensing data for `h` synchronous rounds, so
//! afterwards it knows the sensing subgraph of all robots within `h` hops.
//! It solves the max-min LP restricted to that view, counting only in-view
//! primitives towards each target, and keeps the values of its own
//! primitives. Rounding takes the per-robot argmax.
//!
//! The number of rounds is exactly `h` regardless of the number of robots.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{solve_maxmin_lp, LpOptions, MaxMinLp};
use crate::model::{
    check_chosen, derive_comm_graph, eval_bottleneck, Assignment, CommGraph, FractionalSolution, Instance,
};
use crate::netsim::codec::{decode_records, encode_records, RobotRecord};
use crate::netsim::{run_rounds, Message, NodeProgram, Outgoing, RoundLog};

/// Values within this distance of the row maximum count as tied when rounding.
pub const ROUNDING_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalParams {
    pub h: usize,
    /// Accuracy parameter. Views are solved exactly, so it only enters the
    /// reported approximation bound.
    pub epsilon: f64,
    #[serde(skip)]
    pub lp: LpOptions,
}

impl LocalParams {
    pub fn new(h: usize, epsilon: f64) -> Result<Self> {
        let p = LocalParams { h, epsilon, lp: LpOptions::default() };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Param(format!("epsilon must be positive and finite, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// What one robot knows after `h` rounds.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalView {
    pub center: usize,
    pub horizon: usize,
    /// Robots within `horizon` hops, ascending.
    pub robots: Vec<usize>,
    /// Targets seen by some in-view primitive, ascending.
    pub targets: Vec<usize>,
    /// Per entry of `targets`: whether a robot outside the view also sees it.
    pub boundary: Vec<bool>,
    /// `coverage[k][m]` for `robots[k]`, as gathered.
    pub coverage: Vec<Vec<Vec<(usize, f64)>>>,
}

impl LocalView {
    pub fn problem(&self) -> Result<MaxMinLp> {
        MaxMinLp::new(self.robots.clone(), self.coverage.clone(), self.targets.clone())
    }
}

/// Each covered target is realized by the lowest-id robot with a primitive
/// seeing it; uncovered targets are unrealized.
pub fn realize_targets(inst: &Instance) -> Vec<Option<usize>> {
    inst.target_robots().into_iter().map(|rs| rs.first().copied()).collect()
}

/// `(max_i |P^i|, max_j #{(i, m) : c[i][m][j] > 0})`.
pub fn instance_degrees(inst: &Instance) -> (usize, usize) {
    let dr = inst.primitives_per_robot().into_iter().max().unwrap_or(0);
    let dt = inst.target_degrees().into_iter().max().unwrap_or(0);
    (dr, dt)
}

/// The approximation factor `dR (1 + eps)(1 + 1/h)(1 - 1/dT)` stated for the
/// layered local algorithm; `+inf` for `h = 0`.
pub fn layered_bound(delta_r: usize, delta_t: usize, h: usize, epsilon: f64) -> f64 {
    if h == 0 {
        return f64::INFINITY;
    }
    let dt = delta_t.max(1) as f64;
    delta_r as f64 * (1.0 + epsilon) * (1.0 + 1.0 / h as f64) * (1.0 - 1.0 / dt)
}

struct ViewNode {
    horizon: usize,
    known: BTreeMap<usize, RobotRecord>,
    fresh: Vec<usize>,
    rounds_seen: usize,
}

impl NodeProgram for ViewNode {
    fn send(&mut self, _round: usize) -> Vec<Outgoing> {
        if self.fresh.is_empty() {
            return Vec::new();
        }
        let fresh: Vec<&RobotRecord> = self.fresh.iter().map(|r| &self.known[r]).collect();
        let payload = encode_records(&fresh);
        self.fresh.clear();
        vec![Outgoing::Broadcast(payload)]
    }

    fn receive(&mut self, round: usize, inbox: &[Message]) {
        for msg in inbox {
            if let Ok(records) = decode_records(&msg.payload) {
                for rec in records {
                    if !self.known.contains_key(&rec.robot) {
                        self.fresh.push(rec.robot);
                        self.known.insert(rec.robot, rec);
                    }
                }
            }
        }
        self.fresh.sort_unstable();
        self.rounds_seen = round;
    }

    fn halted(&self) -> bool {
        self.rounds_seen >= self.horizon
    }
}

/// Floods local data for exactly `params.h` rounds over the communication
/// graph derived from `inst`.
pub fn gather_views(inst: &Instance, params: &LocalParams) -> Result<(Vec<LocalView>, RoundLog)> {
    gather_views_on(inst, &derive_comm_graph(inst), params)
}

pub fn gather_views_on(inst: &Instance, graph: &CommGraph, params: &LocalParams) -> Result<(Vec<LocalView>, RoundLog)> {
    params.validate()?;
    let n = inst.robot_count();
    let mut nodes: Vec<ViewNode> = (0..n)
        .map(|r| {
            let rec = crate::netsim::gather::local_record(inst, graph, r);
            ViewNode { horizon: params.h, known: BTreeMap::from([(r, rec)]), fresh: vec![r], rounds_seen: 0 }
        })
        .collect();
    let log = run_rounds(graph, &mut nodes, params.h)?;
    let target_robots = inst.target_robots();
    let views = nodes
        .into_iter()
        .enumerate()
        .map(|(center, node)| {
            let robots: Vec<usize> = node.known.keys().copied().collect();
            let coverage: Vec<Vec<Vec<(usize, f64)>>> =
                node.known.into_values().map(|rec| rec.primitives).collect();
            let mut seen = BTreeMap::new();
            for list in coverage.iter().flatten() {
                for &(t, _) in list {
                    seen.insert(t, ());
                }
            }
            let targets: Vec<usize> = seen.into_keys().collect();
            let boundary = targets
                .iter()
                .map(|&t| target_robots[t].iter().any(|r| robots.binary_search(r).is_err()))
                .collect();
            LocalView { center, horizon: params.h, robots, targets, boundary, coverage }
        })
        .collect();
    Ok((views, log))
}

#[derive(Clone, Debug)]
pub struct LocalSolution {
    pub fractional: FractionalSolution,
    pub log: RoundLog,
}

impl LocalSolution {
    pub fn rounds(&self) -> usize {
        self.log.rounds
    }
}

/// Runs the local algorithm; the returned `w` is the min coverage of the
/// assembled fractional solution (`+inf` without targets).
pub fn solve_local(inst: &Instance, params: &LocalParams) -> Result<LocalSolution> {
    solve_local_on(inst, &derive_comm_graph(inst), params)
}

pub fn solve_local_on(inst: &Instance, graph: &CommGraph, params: &LocalParams) -> Result<LocalSolution> {
    let (views, log) = gather_views_on(inst, graph, params)?;
    let mut x = FractionalSolution::zeros(inst).x;
    // robots with identical views solve identical programs
    let mut cache: HashMap<Vec<usize>, FractionalSolution> = HashMap::new();
    for view in &views {
        if view.targets.is_empty() {
            continue;
        }
        if !cache.contains_key(&view.robots) {
            let sol = solve_maxmin_lp(&view.problem()?, &params.lp)?;
            cache.insert(view.robots.clone(), sol);
        }
        let sol = &cache[&view.robots];
        let k = view.robots.binary_search(&view.center).expect("center is in its own view");
        x[view.center] = sol.x[k].clone();
    }
    let mut fractional = FractionalSolution { x, w: 0.0 };
    fractional.w = eval_bottleneck(inst, &fractional)?.value();
    Ok(LocalSolution { fractional, log })
}

/// Per robot, the primitive with the largest value (lowest index among
/// values within [`ROUNDING_TIE_TOLERANCE`] of the maximum; all-zero rows
/// pick the first primitive).
pub fn round_solution(inst: &Instance, frac: &FractionalSolution) -> Result<Assignment> {
    frac.check(inst)?;
    let chosen: Vec<usize> = frac
        .x
        .iter()
        .map(|row| {
            let max = row.iter().copied().fold(0.0f64, f64::max);
            if max <= 0.0 {
                0
            } else {
                row.iter().position(|&v| v >= max - ROUNDING_TIE_TOLERANCE).unwrap_or(0)
            }
        })
        .collect();
    check_chosen(inst, &chosen)?;
    Ok(Assignment::new(chosen))
}

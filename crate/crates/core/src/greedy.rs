//! Sequential greedy selection for the winner-takes-all objective, the
//! bottleneck-greedy variant that shows why greedy is unsuitable for the
//! min-coverage objective, and a distributed run over the network simulator.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{derive_comm_graph, induced_owners, Assignment, CommGraph, Instance};
use crate::netsim::codec::{Decoder, Encoder};
use crate::netsim::{run_rounds, Message, NodeProgram, Outgoing, RoundLog};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyStep {
    pub robot: usize,
    pub chosen: usize,
    /// `w'(p_m) = sum_j max(w(t_j), c[i][m][j])` for every primitive `m`.
    pub scores: Vec<f64>,
    /// `w(t_j)` after this robot's update.
    pub coverage: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyTrace {
    pub order: Vec<usize>,
    pub steps: Vec<GreedyStep>,
    pub rounds_used: usize,
}

impl GreedyTrace {
    /// JSON with one-based robot and primitive ids.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Step<'a> {
            robot: usize,
            chosen: usize,
            scores: &'a [f64],
            coverage: &'a [f64],
        }
        #[derive(Serialize)]
        struct Trace<'a> {
            order: Vec<usize>,
            steps: Vec<Step<'a>>,
            rounds_used: usize,
        }
        let t = Trace {
            order: self.order.iter().map(|r| r + 1).collect(),
            steps: self
                .steps
                .iter()
                .map(|s| Step { robot: s.robot + 1, chosen: s.chosen + 1, scores: &s.scores, coverage: &s.coverage })
                .collect(),
            rounds_used: self.rounds_used,
        };
        serde_json::to_string_pretty(&t).expect("serializable")
    }
}

pub fn check_order(inst: &Instance, order: &[usize]) -> Result<()> {
    let n = inst.robot_count();
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::BadOrder(format!("{} entries for {} robots", order.len(), n)));
    }
    for &r in order {
        if r >= n || std::mem::replace(&mut seen[r], true) {
            return Err(Error::BadOrder(format!("robot {} repeated or out of range", r + 1)));
        }
    }
    Ok(())
}

pub fn ascending_order(inst: &Instance) -> Vec<usize> {
    (0..inst.robot_count()).collect()
}

/// Marginal gain of a primitive over the current per-target quality, summed
/// in target order over the targets the primitive sees.
fn gain(cov: &[(usize, f64)], w: impl Fn(usize) -> f64) -> f64 {
    cov.iter().map(|&(j, c)| (c - w(j)).max(0.0)).sum()
}

/// First index of the maximum; `f64` comparisons are exact.
fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (m, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = m;
        }
    }
    best
}

/// Each robot in `order` picks the primitive with the largest
/// `sum_j max(w(t_j), c[i][m][j])` (lowest index on ties) and raises `w`;
/// every target is then owned by the robot whose chosen primitive sees it
/// best, lowest robot id on ties.
///
/// The argmax is taken over the marginal gain `w'(p_m) - sum_j w(t_j)`,
/// which orders primitives identically and does not depend on targets the
/// robot cannot see.
pub fn greedy_wta(inst: &Instance, order: &[usize]) -> Result<(Assignment, GreedyTrace)> {
    check_order(inst, order)?;
    let mut w = vec![0.0; inst.target_count()];
    let mut chosen = vec![0; inst.robot_count()];
    let mut steps = Vec::with_capacity(order.len());
    for &i in order {
        let gains: Vec<f64> =
            (0..inst.primitive_count(i)).map(|m| gain(inst.coverage(i, m), |j| w[j])).collect();
        let scores: Vec<f64> = (0..inst.primitive_count(i))
            .map(|m| (0..inst.target_count()).map(|j| w[j].max(inst.weight(i, m, j))).sum())
            .collect();
        let m = argmax_first(&gains);
        for &(j, c) in inst.coverage(i, m) {
            w[j] = w[j].max(c);
        }
        chosen[i] = m;
        steps.push(GreedyStep { robot: i, chosen: m, scores, coverage: w.clone() });
    }
    let owners = induced_owners(inst, &chosen);
    let trace = GreedyTrace { order: order.to_vec(), steps, rounds_used: order.len() };
    Ok((Assignment::with_owners(chosen, owners), trace))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    /// Lowest primitive index among tied options.
    Lowest,
    /// Highest primitive index among tied options.
    Adversarial,
}

/// Greedy on the min-coverage objective: each robot in `order` picks the
/// primitive maximizing the minimum target coverage given its predecessors'
/// picks, with robots not yet decided contributing nothing.
pub fn greedy_bottleneck(inst: &Instance, order: &[usize], tie_break: TieBreak) -> Result<Assignment> {
    check_order(inst, order)?;
    let mut cov = vec![0.0; inst.target_count()];
    let mut chosen = vec![0; inst.robot_count()];
    for &i in order {
        let values: Vec<f64> = (0..inst.primitive_count(i))
            .map(|m| {
                let mut trial = cov.clone();
                for &(j, c) in inst.coverage(i, m) {
                    trial[j] += c;
                }
                trial.into_iter().fold(f64::INFINITY, f64::min)
            })
            .collect();
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tied = values.iter().enumerate().filter(|&(_, &v)| v == best).map(|(m, _)| m);
        let m = match tie_break {
            TieBreak::Lowest => tied.min(),
            TieBreak::Adversarial => tied.max(),
        }
        .expect("robots have at least one primitive");
        for &(j, c) in inst.coverage(i, m) {
            cov[j] += c;
        }
        chosen[i] = m;
    }
    Ok(Assignment::new(chosen))
}

/// Greedy run by the robots themselves. Within each component the robot at
/// position `k` of the order selects in round `k` and broadcasts the
/// coverage of its chosen primitive. Every robot whose choice can affect a
/// neighbor's gains shares a target with it, so the local quality view is
/// exact wherever it matters.
struct GreedyNode<'a> {
    robot: usize,
    turn: usize,
    component_len: usize,
    inst: &'a Instance,
    w: BTreeMap<usize, f64>,
    heard: BTreeMap<usize, Vec<(usize, f64)>>,
    chosen: Option<usize>,
    rounds_seen: usize,
}

impl NodeProgram for GreedyNode<'_> {
    fn send(&mut self, round: usize) -> Vec<Outgoing> {
        if round != self.turn {
            return Vec::new();
        }
        let inst = self.inst;
        let i = self.robot;
        let gains: Vec<f64> = (0..inst.primitive_count(i))
            .map(|m| gain(inst.coverage(i, m), |j| self.w.get(&j).copied().unwrap_or(0.0)))
            .collect();
        let m = argmax_first(&gains);
        let cov = inst.coverage(i, m);
        for &(j, c) in cov {
            let e = self.w.entry(j).or_insert(0.0);
            *e = e.max(c);
        }
        self.chosen = Some(m);
        let mut enc = Encoder::new();
        enc.u32(i).u32(m).u32(cov.len());
        for &(j, c) in cov {
            enc.u32(j).f64(c);
        }
        vec![Outgoing::Broadcast(enc.finish())]
    }

    fn receive(&mut self, round: usize, inbox: &[Message]) {
        for msg in inbox {
            let mut dec = Decoder::new(&msg.payload);
            let parsed = (|| -> Result<(usize, Vec<(usize, f64)>)> {
                let robot = dec.u32()?;
                let _m = dec.u32()?;
                let n = dec.u32()?;
                let cov = (0..n).map(|_| Ok((dec.u32()?, dec.f64()?))).collect::<Result<_>>()?;
                Ok((robot, cov))
            })();
            if let Ok((robot, cov)) = parsed {
                for &(j, c) in &cov {
                    let e = self.w.entry(j).or_insert(0.0);
                    *e = e.max(c);
                }
                self.heard.insert(robot, cov);
            }
        }
        self.rounds_seen = round;
    }

    fn halted(&self) -> bool {
        self.rounds_seen >= self.component_len
    }
}

impl GreedyNode<'_> {
    /// Owners for the targets this robot realizes (it is the lowest-id robot
    /// with a primitive seeing them).
    fn owners(&self, realizer: &[Option<usize>]) -> Vec<(usize, Option<usize>)> {
        let mut candidates: BTreeMap<usize, Vec<(usize, f64)>> = self.heard.clone();
        if let Some(m) = self.chosen {
            candidates.insert(self.robot, self.inst.coverage(self.robot, m).to_vec());
        }
        realizer
            .iter()
            .enumerate()
            .filter(|&(_, r)| *r == Some(self.robot))
            .map(|(j, _)| {
                let mut best: Option<(usize, f64)> = None;
                for (&robot, cov) in &candidates {
                    if let Ok(k) = cov.binary_search_by_key(&j, |&(t, _)| t) {
                        let c = cov[k].1;
                        if best.is_none_or(|(_, b)| c > b) {
                            best = Some((robot, c));
                        }
                    }
                }
                (j, best.map(|(r, _)| r))
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct DistributedGreedy {
    pub assignment: Assignment,
    pub log: RoundLog,
}

impl DistributedGreedy {
    pub fn rounds(&self) -> usize {
        self.log.rounds
    }
}

/// Distributed greedy on the communication graph derived from `inst`, with
/// robots ordered by ascending id.
pub fn greedy_distributed(inst: &Instance) -> Result<DistributedGreedy> {
    greedy_distributed_on(inst, &derive_comm_graph(inst), &ascending_order(inst))
}

/// Distributed greedy over `graph`, which must contain every edge of the
/// graph derived from `inst`. `order` is restricted to each component.
pub fn greedy_distributed_on(inst: &Instance, graph: &CommGraph, order: &[usize]) -> Result<DistributedGreedy> {
    check_order(inst, order)?;
    let derived = derive_comm_graph(inst);
    if let Some((a, b)) = derived.edges().into_iter().find(|&(a, b)| !graph.has_edge(a, b)) {
        return Err(Error::Net(format!("robots {} and {} share a target but cannot communicate", a + 1, b + 1)));
    }
    let n = inst.robot_count();
    let comps = graph.components();
    let mut comp_of = vec![0; n];
    for (k, comp) in comps.iter().enumerate() {
        for &r in comp {
            comp_of[r] = k;
        }
    }
    let mut turn = vec![0; n];
    let mut filled = vec![0; comps.len()];
    for &r in order {
        filled[comp_of[r]] += 1;
        turn[r] = filled[comp_of[r]];
    }
    let mut nodes: Vec<GreedyNode<'_>> = (0..n)
        .map(|r| GreedyNode {
            robot: r,
            turn: turn[r],
            component_len: comps[comp_of[r]].len(),
            inst,
            w: BTreeMap::new(),
            heard: BTreeMap::new(),
            chosen: None,
            rounds_seen: 0,
        })
        .collect();
    let log = run_rounds(graph, &mut nodes, n + 1)?;

    let target_robots = inst.target_robots();
    let realizer: Vec<Option<usize>> = target_robots.iter().map(|rs| rs.first().copied()).collect();
    let mut owners = vec![None; inst.target_count()];
    for node in &nodes {
        for (j, owner) in node.owners(&realizer) {
            owners[j] = owner;
        }
    }
    let chosen = nodes.iter().map(|node| node.chosen.expect("every robot had a turn")).collect();
    Ok(DistributedGreedy { assignment: Assignment::with_owners(chosen, owners), log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eval_bottleneck, eval_wta, Bottleneck, WeightedEdge};

    #[test]
    fn counterexample_wta() {
        let inst = Instance::greedy_counterexample();
        let (a, trace) = greedy_wta(&inst, &[0, 1]).unwrap();
        assert_eq!(a.chosen, vec![0, 1]);
        assert_eq!(eval_wta(&inst, &a).unwrap(), 2.0);
        assert_eq!(trace.steps[0].scores, vec![1.0, 0.0]);
        assert_eq!(trace.steps[1].scores, vec![1.0, 2.0]);
        assert_eq!(trace.steps[1].coverage, vec![1.0, 1.0]);
    }

    #[test]
    fn single_robot_picks_larger_coverage() {
        let inst = Instance::from_edges(
            vec![2],
            3,
            [
                WeightedEdge::new(0, 0, 0, 3.0),
                WeightedEdge::new(0, 1, 1, 2.0),
                WeightedEdge::new(0, 1, 2, 3.0),
            ],
        )
        .unwrap();
        assert_eq!(greedy_wta(&inst, &[0]).unwrap().0.chosen, vec![1]);
    }

    #[test]
    fn bad_orders_are_rejected() {
        let inst = Instance::greedy_counterexample();
        assert!(matches!(greedy_wta(&inst, &[0, 0]), Err(Error::BadOrder(_))));
        assert!(matches!(greedy_wta(&inst, &[0]), Err(Error::BadOrder(_))));
        assert!(matches!(greedy_bottleneck(&inst, &[2, 0], TieBreak::Lowest), Err(Error::BadOrder(_))));
    }

    #[test]
    fn adversarial_bottleneck_greedy_fails_on_counterexample() {
        let inst = Instance::greedy_counterexample();
        let a = greedy_bottleneck(&inst, &[0, 1], TieBreak::Adversarial).unwrap();
        assert_eq!(eval_bottleneck(&inst, &a).unwrap(), Bottleneck::Value(0.0));
        assert_eq!(a.chosen[0], 1);
    }

    #[test]
    fn symmetric_coverage_is_tie_break_invariant() {
        let edges = (0..3).flat_map(|i| (0..2).flat_map(move |m| (0..2).map(move |j| WeightedEdge::new(i, m, j, 1.0))));
        let inst = Instance::from_edges(vec![2; 3], 2, edges).unwrap();
        let lo = greedy_bottleneck(&inst, &[0, 1, 2], TieBreak::Lowest).unwrap();
        let hi = greedy_bottleneck(&inst, &[0, 1, 2], TieBreak::Adversarial).unwrap();
        assert_eq!(eval_bottleneck(&inst, &lo).unwrap(), eval_bottleneck(&inst, &hi).unwrap());
    }

    #[test]
    fn distributed_rounds_follow_component_sizes() {
        // complete: five robots all seeing target 0
        let inst = Instance::from_edges(vec![1; 5], 1, (0..5).map(|i| WeightedEdge::new(i, 0, 0, 1.0))).unwrap();
        assert_eq!(greedy_distributed(&inst).unwrap().rounds(), 5);
        // components {0,1,2} and {3,4}
        let inst = Instance::from_edges(
            vec![1; 5],
            2,
            (0..3).map(|i| WeightedEdge::new(i, 0, 0, 1.0)).chain((3..5).map(|i| WeightedEdge::new(i, 0, 1, 1.0))),
        )
        .unwrap();
        assert_eq!(greedy_distributed(&inst).unwrap().rounds(), 3);
        let single = Instance::from_edges(vec![2], 1, [WeightedEdge::new(0, 1, 0, 1.0)]).unwrap();
        let d = greedy_distributed(&single).unwrap();
        assert_eq!(d.rounds(), 1);
        assert_eq!(d.assignment.chosen, vec![1]);
    }

    #[test]
    fn distributed_matches_central_on_counterexample() {
        let inst = Instance::greedy_counterexample();
        let d = greedy_distributed(&inst).unwrap();
        let (c, _) = greedy_wta(&inst, &[0, 1]).unwrap();
        assert_eq!(d.assignment, c);
    }
}

use std::collections::BTreeMap;

use super::codec::{decode_records, encode_records, Decoder, Encoder, RobotRecord};
use super::{run_rounds, Message, NodeProgram, Outgoing, RoundLog};
use crate::error::{Error, Result};
use crate::model::{CommGraph, Instance};

const TAG_RECORDS: u8 = 0;
const TAG_SOLUTION: u8 = 1;

pub type CentralSolver<'a> = dyn Fn(&Instance) -> Result<Vec<usize>> + 'a;

/// Centralized-equivalent baseline: every robot floods its local data until
/// the lowest-id robot of its component holds the whole component, that
/// robot solves centrally, and the answer is flooded back with a hop budget
/// equal to the leader's eccentricity.
pub struct GatherScatterProgram<'a> {
    node: usize,
    leader: bool,
    component_size: usize,
    target_count: usize,
    known: BTreeMap<usize, RobotRecord>,
    fresh: Vec<usize>,
    solution: Option<Vec<(usize, usize)>>,
    forward_ttl: Option<usize>,
    done: bool,
    solver: &'a CentralSolver<'a>,
    error: Option<Error>,
}

impl<'a> GatherScatterProgram<'a> {
    fn solve(&mut self) {
        let ids: Vec<usize> = self.known.keys().copied().collect();
        let local: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        let records: Vec<&RobotRecord> = self.known.values().collect();
        let sub = records_to_instance(&records, self.target_count);
        match sub.and_then(|inst| (self.solver)(&inst)) {
            Ok(chosen) => {
                self.solution = Some(ids.iter().map(|r| (*r, chosen[local[r]])).collect());
            }
            Err(e) => {
                self.error = Some(e);
                self.solution = Some(Vec::new());
            }
        }
        // eccentricity of the leader inside the gathered component
        let mut dist: BTreeMap<usize, usize> = BTreeMap::new();
        let mut frontier = vec![self.node];
        dist.insert(self.node, 0);
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for u in frontier {
                let d = dist[&u];
                for &v in &self.known[&u].neighbors {
                    if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(v) {
                        e.insert(d + 1);
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        let ecc = dist.values().copied().max().unwrap_or(0);
        self.forward_ttl = if ecc == 0 { None } else { Some(ecc - 1) };
    }

    fn encode_solution(&self, ttl: usize) -> Vec<u8> {
        let sol = self.solution.as_ref().unwrap();
        let mut enc = Encoder::new();
        enc.u8(TAG_SOLUTION).u32(ttl).u32(sol.len());
        for &(r, m) in sol {
            enc.u32(r).u32(m);
        }
        enc.finish()
    }

    pub fn chosen(&self) -> Option<usize> {
        self.solution
            .as_ref()
            .and_then(|s| s.iter().find(|(r, _)| *r == self.node).map(|&(_, m)| m))
    }
}

impl NodeProgram for GatherScatterProgram<'_> {
    fn send(&mut self, _round: usize) -> Vec<Outgoing> {
        if self.leader && self.solution.is_none() && self.known.len() == self.component_size {
            self.solve();
        }
        if self.solution.is_some() {
            self.done = true;
            return match self.forward_ttl.take() {
                Some(ttl) => vec![Outgoing::Broadcast(self.encode_solution(ttl))],
                None => Vec::new(),
            };
        }
        if self.fresh.is_empty() {
            return Vec::new();
        }
        let fresh: Vec<&RobotRecord> = self.fresh.drain(..).map(|r| &self.known[&r]).collect();
        let mut payload = vec![TAG_RECORDS];
        payload.extend(encode_records(&fresh));
        vec![Outgoing::Broadcast(payload)]
    }

    fn receive(&mut self, _round: usize, inbox: &[Message]) {
        for m in inbox {
            let Some((&tag, body)) = m.payload.split_first() else { continue };
            match tag {
                TAG_RECORDS => {
                    if let Ok(records) = decode_records(body) {
                        for r in records {
                            if !self.known.contains_key(&r.robot) {
                                self.fresh.push(r.robot);
                                self.known.insert(r.robot, r);
                            }
                        }
                    }
                }
                TAG_SOLUTION if self.solution.is_none() => {
                    let mut dec = Decoder::new(body);
                    let parsed = (|| -> Result<(usize, Vec<(usize, usize)>)> {
                        let ttl = dec.u32()?;
                        let n = dec.u32()?;
                        let sol = (0..n).map(|_| Ok((dec.u32()?, dec.u32()?))).collect::<Result<_>>()?;
                        Ok((ttl, sol))
                    })();
                    if let Ok((ttl, sol)) = parsed {
                        self.solution = Some(sol);
                        if ttl == 0 {
                            self.done = true;
                        } else {
                            self.forward_ttl = Some(ttl - 1);
                        }
                    }
                }
                _ => {}
            }
        }
    }

    fn halted(&self) -> bool {
        self.done
    }
}

pub(crate) fn records_to_instance(records: &[&RobotRecord], target_count: usize) -> Result<Instance> {
    let mut edges = Vec::new();
    let mut prims = Vec::with_capacity(records.len());
    for (k, rec) in records.iter().enumerate() {
        prims.push(rec.primitives.len());
        for (m, list) in rec.primitives.iter().enumerate() {
            for &(t, c) in list {
                edges.push(crate::model::WeightedEdge::new(k, m, t, c));
            }
        }
    }
    Ok(Instance::from_edges(prims, target_count, edges)?)
}

pub(crate) fn local_record(inst: &Instance, graph: &CommGraph, robot: usize) -> RobotRecord {
    RobotRecord {
        robot,
        neighbors: graph.neighbors(robot).to_vec(),
        primitives: (0..inst.primitive_count(robot)).map(|m| inst.coverage(robot, m).to_vec()).collect(),
    }
}

/// Runs the centralized-equivalent baseline on every component of `graph`
/// and returns each robot's chosen primitive.
pub fn gather_scatter(
    inst: &Instance,
    graph: &CommGraph,
    solver: &CentralSolver<'_>,
) -> Result<(Vec<usize>, RoundLog)> {
    let n = inst.robot_count();
    let mut size = vec![0; n];
    let mut leader = vec![0; n];
    for comp in graph.components() {
        for &r in &comp {
            size[r] = comp.len();
            leader[r] = comp[0];
        }
    }
    let mut programs: Vec<GatherScatterProgram<'_>> = (0..n)
        .map(|r| {
            let rec = local_record(inst, graph, r);
            let mut p = GatherScatterProgram {
                node: r,
                leader: leader[r] == r,
                component_size: size[r],
                target_count: inst.target_count(),
                known: BTreeMap::from([(r, rec)]),
                fresh: vec![r],
                solution: None,
                forward_ttl: None,
                done: false,
                solver,
                error: None,
            };
            if p.leader && p.component_size == 1 {
                p.solve();
                p.done = true;
            }
            p
        })
        .collect();
    let log = run_rounds(graph, &mut programs, 4 * n + 4)?;
    if let Some(e) = programs.iter_mut().find_map(|p| p.error.take()) {
        return Err(e);
    }
    let chosen = programs
        .iter()
        .map(|p| p.chosen().ok_or_else(|| Error::Net(format!("robot {} got no solution", p.node + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok((chosen, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WeightedEdge;

    fn complete_instance(n: usize) -> Instance {
        Instance::from_edges(
            vec![2; n],
            1,
            (0..n).map(|i| WeightedEdge::new(i, i % 2, 0, 1.0 + i as f64)),
        )
        .unwrap()
    }

    #[test]
    fn complete_graph_takes_two_rounds() {
        for n in 2..7 {
            let inst = complete_instance(n);
            let g = CommGraph::complete(n);
            let solver = |sub: &Instance| Ok(vec![1; sub.robot_count()]);
            let (chosen, log) = gather_scatter(&inst, &g, &solver).unwrap();
            assert_eq!(log.rounds, 2);
            assert_eq!(chosen, vec![1; n]);
        }
    }

    #[test]
    fn path_takes_twice_the_leader_eccentricity() {
        let inst = complete_instance(4);
        let g = CommGraph::path(4);
        let solver = |sub: &Instance| Ok((0..sub.robot_count()).map(|k| k % 2).collect());
        let (chosen, log) = gather_scatter(&inst, &g, &solver).unwrap();
        assert_eq!(log.rounds, 6);
        assert_eq!(chosen, vec![0, 1, 0, 1]);
    }

    #[test]
    fn isolated_robots_need_no_rounds() {
        let inst = complete_instance(3);
        let g = CommGraph::empty(3);
        let solver = |sub: &Instance| Ok(vec![1; sub.robot_count()]);
        let (chosen, log) = gather_scatter(&inst, &g, &solver).unwrap();
        assert_eq!(log.rounds, 0);
        assert_eq!(chosen, vec![1; 3]);
    }
}

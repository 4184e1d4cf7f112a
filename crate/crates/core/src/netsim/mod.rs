//! Deterministic synchronous-round message passing over a [`CommGraph`].
//!
//! Each round has two phases. Every running node first produces its outgoing
//! messages from its own state; the simulator then delivers all of them at
//! once. Nothing sent in round `k` is visible before the receive phase of
//! round `k`, and no node acts on it before round `k + 1`.

pub mod codec;
pub(crate) mod gather;

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::CommGraph;

pub use gather::{gather_scatter, GatherScatterProgram};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outgoing {
    /// Send to every neighbor.
    Broadcast(Vec<u8>),
    /// Send to one neighbor.
    To(usize, Vec<u8>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub from: usize,
    pub payload: Vec<u8>,
}

/// A node's behaviour. Implementations must be deterministic in their state
/// and inbox.
pub trait NodeProgram {
    /// Messages this node sends in `round` (starting at 1).
    fn send(&mut self, round: usize) -> Vec<Outgoing>;
    /// Messages delivered to this node at the end of `round`, ordered by sender.
    fn receive(&mut self, round: usize, inbox: &[Message]);
    fn halted(&self) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MessageRecord {
    pub sender: usize,
    pub receiver: usize,
    pub bytes: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RoundLog {
    pub rounds: usize,
    /// Messages sent in each executed round.
    pub per_round: Vec<Vec<MessageRecord>>,
    pub components: Vec<Vec<usize>>,
}

impl RoundLog {
    pub fn total_bytes(&self) -> usize {
        self.per_round.iter().flatten().map(|m| m.bytes).sum()
    }

    pub fn message_count(&self) -> usize {
        self.per_round.iter().map(Vec::len).sum()
    }

    /// Writes `round,sender,receiver,bytes` rows with one-based ids.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["round", "sender", "receiver", "bytes"]).map_err(csv_err)?;
        for (k, msgs) in self.per_round.iter().enumerate() {
            for m in msgs {
                w.write_record([
                    (k + 1).to_string(),
                    (m.sender + 1).to_string(),
                    (m.receiver + 1).to_string(),
                    m.bytes.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Appends another run's log as if both had executed side by side in
    /// the same rounds.
    pub fn merge_parallel(&mut self, other: RoundLog) {
        self.rounds = self.rounds.max(other.rounds);
        if self.per_round.len() < other.per_round.len() {
            self.per_round.resize(other.per_round.len(), Vec::new());
        }
        for (k, msgs) in other.per_round.into_iter().enumerate() {
            self.per_round[k].extend(msgs);
        }
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Connected components of the graph, ordered by smallest member.
pub fn components(graph: &CommGraph) -> Vec<Vec<usize>> {
    graph.components()
}

/// Runs lock-step rounds until every program has halted.
///
/// Fails if a program addresses a non-neighbor or if `max_rounds` rounds
/// pass without all programs halting.
pub fn run_rounds<P: NodeProgram>(
    graph: &CommGraph,
    programs: &mut [P],
    max_rounds: usize,
) -> Result<RoundLog> {
    let n = graph.node_count();
    if programs.len() != n {
        return Err(Error::Net(format!("{} programs for {} nodes", programs.len(), n)));
    }
    let mut log = RoundLog { components: graph.components(), ..RoundLog::default() };
    let mut round = 0;
    while programs.iter().any(|p| !p.halted()) {
        if round == max_rounds {
            return Err(Error::MaxRounds(max_rounds));
        }
        round += 1;
        let mut inboxes: Vec<Vec<Message>> = vec![Vec::new(); n];
        let mut sent = Vec::new();
        for (node, program) in programs.iter_mut().enumerate() {
            if program.halted() {
                continue;
            }
            for out in program.send(round) {
                match out {
                    Outgoing::Broadcast(payload) => {
                        for &to in graph.neighbors(node) {
                            sent.push(MessageRecord { sender: node, receiver: to, bytes: payload.len() });
                            inboxes[to].push(Message { from: node, payload: payload.clone() });
                        }
                    }
                    Outgoing::To(to, payload) => {
                        if to >= n || !graph.has_edge(node, to) {
                            return Err(Error::Net(format!(
                                "robot {} sent to non-neighbor {} in round {}",
                                node + 1,
                                to + 1,
                                round
                            )));
                        }
                        sent.push(MessageRecord { sender: node, receiver: to, bytes: payload.len() });
                        inboxes[to].push(Message { from: node, payload });
                    }
                }
            }
        }
        // barrier
        for (node, program) in programs.iter_mut().enumerate() {
            if !program.halted() {
                program.receive(round, &inboxes[node]);
            }
        }
        log.per_round.push(sent);
    }
    log.rounds = round;
    Ok(log)
}

/// Floods a token from `source`. A node stops once it holds the token and
/// knows every neighbor holds it too.
#[derive(Clone, Debug)]
pub struct FloodProgram {
    node: usize,
    neighbors: Vec<usize>,
    informed_at: Option<usize>,
    known_informed: Vec<bool>,
    forwarded: bool,
}

impl FloodProgram {
    pub fn network(graph: &CommGraph, source: usize) -> Vec<FloodProgram> {
        (0..graph.node_count())
            .map(|node| FloodProgram {
                node,
                neighbors: graph.neighbors(node).to_vec(),
                informed_at: (node == source).then_some(0),
                known_informed: vec![false; graph.neighbors(node).len()],
                forwarded: false,
            })
            .collect()
    }

    /// Round at the end of which this node first held the token.
    pub fn informed_at(&self) -> Option<usize> {
        self.informed_at
    }
}

impl NodeProgram for FloodProgram {
    fn send(&mut self, _round: usize) -> Vec<Outgoing> {
        if self.informed_at.is_none() || self.forwarded {
            return Vec::new();
        }
        self.forwarded = true;
        let out = self
            .neighbors
            .iter()
            .zip(&self.known_informed)
            .filter(|(_, &k)| !k)
            .map(|(&to, _)| Outgoing::To(to, vec![self.node as u8]))
            .collect();
        self.known_informed.iter_mut().for_each(|k| *k = true);
        out
    }

    fn receive(&mut self, round: usize, inbox: &[Message]) {
        for m in inbox {
            if let Ok(k) = self.neighbors.binary_search(&m.from) {
                self.known_informed[k] = true;
            }
        }
        if self.informed_at.is_none() && !inbox.is_empty() {
            self.informed_at = Some(round);
        }
    }

    fn halted(&self) -> bool {
        self.informed_at.is_some() && self.known_informed.iter().all(|&k| k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flood_reaches_end_of_path_in_n_minus_one_rounds() {
        for n in 2..8 {
            let g = CommGraph::path(n);
            let mut progs = FloodProgram::network(&g, 0);
            let log = run_rounds(&g, &mut progs, 100).unwrap();
            assert_eq!(progs[n - 1].informed_at(), Some(n - 1));
            assert_eq!(log.rounds, n - 1);
        }
    }

    #[test]
    fn flood_on_single_node_needs_no_rounds() {
        let g = CommGraph::empty(1);
        let mut progs = FloodProgram::network(&g, 0);
        assert_eq!(run_rounds(&g, &mut progs, 10).unwrap().rounds, 0);
    }

    #[test]
    fn unreachable_nodes_hit_the_round_cap() {
        let g = CommGraph::empty(2);
        let mut progs = FloodProgram::network(&g, 0);
        assert!(matches!(run_rounds(&g, &mut progs, 5), Err(Error::MaxRounds(5))));
    }

    struct Rogue;
    impl NodeProgram for Rogue {
        fn send(&mut self, _: usize) -> Vec<Outgoing> {
            vec![Outgoing::To(2, vec![1])]
        }
        fn receive(&mut self, _: usize, _: &[Message]) {}
        fn halted(&self) -> bool {
            false
        }
    }

    #[test]
    fn sending_to_non_neighbor_fails() {
        let g = CommGraph::path(3);
        let mut progs = vec![Rogue, Rogue, Rogue];
        assert!(matches!(run_rounds(&g, &mut progs, 5), Err(Error::Net(_))));
    }

    #[test]
    fn csv_export() {
        let g = CommGraph::path(2);
        let mut progs = FloodProgram::network(&g, 0);
        let log = run_rounds(&g, &mut progs, 10).unwrap();
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "round,sender,receiver,bytes\n1,1,2,1\n");
    }
}

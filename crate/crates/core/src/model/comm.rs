use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::Instance;

/// Undirected robot-to-robot communication graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommGraph {
    adj: Vec<Vec<usize>>,
}

impl CommGraph {
    pub fn empty(n: usize) -> Self {
        CommGraph { adj: vec![Vec::new(); n] }
    }

    /// Builds a graph from undirected edges. Self-loops and repeats are dropped.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut sets = vec![BTreeSet::new(); n];
        for (a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for {n} nodes");
            if a != b {
                sets[a].insert(b);
                sets[b].insert(a);
            }
        }
        CommGraph { adj: sets.into_iter().map(|s| s.into_iter().collect()).collect() }
    }

    pub fn complete(n: usize) -> Self {
        CommGraph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    }

    pub fn path(n: usize) -> Self {
        CommGraph::from_edges(n, (1..n).map(|b| (b - 1, b)))
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges as `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Hop distance from `source` to every node, `None` if unreachable.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Nodes within `radius` hops of `center`, ascending.
    pub fn ball(&self, center: usize, radius: usize) -> Vec<usize> {
        self.distances_from(center)
            .into_iter()
            .enumerate()
            .filter(|(_, d)| matches!(d, Some(d) if *d <= radius))
            .map(|(v, _)| v)
            .collect()
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.node_count()];
        let mut out = Vec::new();
        for start in 0..self.node_count() {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Largest eccentricity over all nodes, counting only reachable pairs.
    pub fn diameter(&self) -> usize {
        (0..self.node_count())
            .map(|s| self.distances_from(s).into_iter().flatten().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }
}

/// Robots `i != l` are adjacent iff some target is seen by a primitive of
/// each of them.
pub fn derive_comm_graph(inst: &Instance) -> CommGraph {
    let mut edges = Vec::new();
    for robots in inst.target_robots() {
        for (k, &a) in robots.iter().enumerate() {
            for &b in &robots[k + 1..] {
                edges.push((a, b));
            }
        }
    }
    CommGraph::from_edges(inst.robot_count(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WeightedEdge;

    #[test]
    fn counterexample_has_no_edges() {
        let g = derive_comm_graph(&Instance::greedy_counterexample());
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.components(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn shared_target_gives_one_edge() {
        let inst = Instance::from_edges(
            vec![1, 2],
            1,
            [WeightedEdge::new(0, 0, 0, 1.0), WeightedEdge::new(1, 1, 0, 2.0)],
        )
        .unwrap();
        assert_eq!(derive_comm_graph(&inst).edges(), vec![(0, 1)]);
    }

    #[test]
    fn sharing_is_pairwise_not_transitive() {
        let inst = Instance::from_edges(
            vec![1, 1, 1],
            2,
            [
                WeightedEdge::new(0, 0, 0, 1.0),
                WeightedEdge::new(1, 0, 0, 1.0),
                WeightedEdge::new(1, 0, 1, 1.0),
                WeightedEdge::new(2, 0, 1, 1.0),
            ],
        )
        .unwrap();
        let g = derive_comm_graph(&inst);
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert!(!g.has_edge(0, 2));
        assert_eq!(g.diameter(), 2);
    }

    #[test]
    fn ball_and_components() {
        let g = CommGraph::path(3);
        assert_eq!(g.ball(0, 1), vec![0, 1]);
        assert_eq!(g.ball(0, 0), vec![0]);
        assert_eq!(CommGraph::complete(4).components().len(), 1);
        assert_eq!(CommGraph::empty(5).components().len(), 5);
        assert_eq!(CommGraph::complete(5).diameter(), 1);
    }
}

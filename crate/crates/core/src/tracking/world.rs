use std::f64::consts::TAU;

use rand::Rng as _;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{PrimitiveLibrary, QualityMode, SimConfig, MIN_DISTANCE};
use crate::model::{CommGraph, Instance, WeightedEdge};
use crate::seed::Rng;

pub type Point = [f64; 2];

pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn offset(p: Point, heading: f64, len: f64) -> Point {
    [p[0] + len * heading.cos(), p[1] + len * heading.sin()]
}

fn inside(p: Point, arena: f64) -> bool {
    (0.0..=arena).contains(&p[0]) && (0.0..=arena).contains(&p[1])
}

fn clamp(p: Point, arena: f64) -> Point {
    [p[0].clamp(0.0, arena), p[1].clamp(0.0, arena)]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Pose {
    pub pos: Point,
    pub heading: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorldState {
    pub step: usize,
    pub robots: Vec<Pose>,
    pub targets: Vec<Pose>,
    /// Steps each target has moved since its last heading change.
    pub since_turn: Vec<usize>,
}

impl WorldState {
    /// Uniform random positions and headings.
    pub fn random(config: &SimConfig, rng: &mut Rng) -> Self {
        let pose = |rng: &mut Rng| Pose {
            pos: [rng.gen_range(0.0..=config.arena), rng.gen_range(0.0..=config.arena)],
            heading: rng.gen_range(0.0..TAU),
        };
        let robots = (0..config.robot_count).map(|_| pose(rng)).collect();
        let targets: Vec<Pose> = (0..config.target_count).map(|_| pose(rng)).collect();
        WorldState { step: 0, robots, since_turn: vec![0; targets.len()], targets }
    }

    pub fn robot_positions(&self) -> Vec<Point> {
        self.robots.iter().map(|p| p.pos).collect()
    }

    pub fn target_positions(&self) -> Vec<Point> {
        self.targets.iter().map(|p| p.pos).collect()
    }

    /// SHA-256 over the little-endian bytes of every pose and counter.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.step as u64).to_le_bytes());
        for pose in self.robots.iter().chain(&self.targets) {
            for v in [pose.pos[0], pose.pos[1], pose.heading] {
                h.update(v.to_le_bytes());
            }
        }
        for &c in &self.since_turn {
            h.update((c as u64).to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Moves robots to `next` and points them along their displacement.
    pub fn move_robots(&mut self, next: &[Point]) {
        for (pose, &to) in self.robots.iter_mut().zip(next) {
            if to != pose.pos {
                pose.heading = (to[1] - pose.pos[1]).atan2(to[0] - pose.pos[0]);
            }
            pose.pos = to;
        }
    }
}

/// Advances every target one step. A target that has moved `turn_period`
/// steps on one heading draws a new one; a heading that would leave the
/// arena is redrawn until the step stays inside.
pub fn step_targets(world: &WorldState, config: &SimConfig, rng: &mut Rng) -> WorldState {
    let mut next = world.clone();
    next.step += 1;
    for (pose, since) in next.targets.iter_mut().zip(&mut next.since_turn) {
        if *since >= config.turn_period {
            pose.heading = rng.gen_range(0.0..TAU);
            *since = 0;
        }
        let mut tries = 0;
        while !inside(offset(pose.pos, pose.heading, config.target_step), config.arena) {
            tries += 1;
            pose.heading = if tries < 1000 {
                rng.gen_range(0.0..TAU)
            } else {
                let c = config.arena / 2.0;
                (c - pose.pos[1]).atan2(c - pose.pos[0])
            };
        }
        pose.pos = clamp(offset(pose.pos, pose.heading, config.target_step), config.arena);
        *since += 1;
    }
    next
}

/// Candidate next positions per robot, plus the targets each robot
/// observes now (the only targets it may plan for).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimitiveStateSet {
    pub poses: Vec<Vec<Point>>,
    pub observed: Vec<Vec<usize>>,
}

/// Candidate poses; the stay primitive, when present, comes first.
pub fn build_primitives(world: &WorldState, config: &SimConfig, rng: &mut Rng) -> PrimitiveStateSet {
    let poses = world
        .robots
        .iter()
        .map(|robot| {
            let mut out = Vec::with_capacity(config.library.size());
            match config.library {
                PrimitiveLibrary::Fan { headings, include_stay } => {
                    if include_stay {
                        out.push(robot.pos);
                    }
                    for k in 0..headings {
                        let heading = TAU * k as f64 / headings as f64;
                        out.push(clamp(offset(robot.pos, heading, config.robot_step), config.arena));
                    }
                }
                PrimitiveLibrary::RandomForward { max_turn_deg, max_length, include_stay } => {
                    if include_stay {
                        out.push(robot.pos);
                    }
                    let turn = max_turn_deg.to_radians();
                    let heading = robot.heading + rng.gen_range(-turn..=turn);
                    let len = max_length * (1.0 - rng.gen::<f64>());
                    out.push(clamp(offset(robot.pos, heading, len), config.arena));
                }
            }
            out
        })
        .collect();
    let observed = world
        .robots
        .iter()
        .map(|robot| {
            (0..world.targets.len())
                .filter(|&j| distance(robot.pos, world.targets[j].pos) <= config.sensing_range)
                .collect()
        })
        .collect();
    PrimitiveStateSet { poses, observed }
}

/// Tracking quality of a target at distance `d`, or `None` out of range.
pub fn quality(d: f64, config: &SimConfig) -> Option<f64> {
    if d > config.sensing_range {
        return None;
    }
    Some(match config.quality {
        QualityMode::Count => 1.0,
        QualityMode::InverseDistance => 1.0 / d.max(MIN_DISTANCE),
    })
}

/// Target positions one step ahead, extrapolating each target's last
/// displacement.
pub fn predict_targets(world: &WorldState, config: &SimConfig) -> Vec<Point> {
    world.targets.iter().map(|t| offset(t.pos, t.heading, config.target_step)).collect()
}

/// The assignment instance for the coming step: robot `i`, primitive `m`
/// sees target `j` when `j` is currently observed by `i` and its predicted
/// position is in range of the candidate pose.
pub fn snapshot_instance(world: &WorldState, prims: &PrimitiveStateSet, config: &SimConfig) -> Instance {
    let predicted = predict_targets(world, config);
    let mut edges = Vec::new();
    for (i, poses) in prims.poses.iter().enumerate() {
        for (m, &pose) in poses.iter().enumerate() {
            for &j in &prims.observed[i] {
                if let Some(c) = quality(distance(pose, predicted[j]), config) {
                    edges.push(WeightedEdge::new(i, m, j, c));
                }
            }
        }
    }
    let sizes = prims.poses.iter().map(Vec::len).collect();
    Instance::from_edges(sizes, world.targets.len(), edges).expect("snapshot edges are valid")
}

/// Number of targets within sensing range of at least one robot.
pub fn observed_count(robots: &[Point], targets: &[Point], sensing_range: f64) -> usize {
    targets.iter().filter(|&&t| robots.iter().any(|&r| distance(r, t) <= sensing_range)).count()
}

/// Sum over targets of the best quality any robot will have of its
/// predicted position, counting for each robot only the targets it
/// observes.
pub fn estimated_quality(robots: &[Point], predicted: &[Point], observed: &[Vec<usize>], config: &SimConfig) -> f64 {
    let mut best = vec![0.0f64; predicted.len()];
    for (r, seen) in robots.iter().zip(observed) {
        for &j in seen {
            if let Some(c) = quality(distance(*r, predicted[j]), config) {
                best[j] = best[j].max(c);
            }
        }
    }
    best.iter().sum()
}

/// Robots within communication range of each other.
pub fn disk_graph(robots: &[Point], range: f64) -> CommGraph {
    let n = robots.len();
    let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
    CommGraph::from_edges(n, edges.filter(|&(a, b)| distance(robots[a], robots[b]) <= range))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use approx::assert_abs_diff_eq;

    fn one_target(pos: Point, heading: f64) -> WorldState {
        WorldState {
            step: 0,
            robots: vec![Pose { pos: [1.0, 1.0], heading: 0.0 }],
            targets: vec![Pose { pos, heading }],
            since_turn: vec![0],
        }
    }

    #[test]
    fn straight_line_step() {
        let cfg = SimConfig::gazebo_like();
        let w = one_target([15.0, 15.0], 0.3);
        let next = step_targets(&w, &cfg, &mut rng_from_seed(1));
        assert_abs_diff_eq!(distance(w.targets[0].pos, next.targets[0].pos), cfg.target_step, epsilon = 1e-12);
        assert_eq!(next.targets[0].heading, 0.3);
        assert_eq!(next.since_turn, vec![1]);
    }

    #[test]
    fn heading_redrawn_at_period() {
        let cfg = SimConfig::gazebo_like();
        let mut w = one_target([15.0, 15.0], 0.3);
        w.since_turn[0] = cfg.turn_period;
        let mut rng = rng_from_seed(4);
        let expected = rng_from_seed(4).gen_range(0.0..TAU);
        let next = step_targets(&w, &cfg, &mut rng);
        assert_eq!(next.targets[0].heading, expected);
        assert_eq!(next.since_turn, vec![1]);
    }

    #[test]
    fn walls_keep_targets_inside() {
        let cfg = SimConfig::parker_cmp();
        for seed in 0..200 {
            let w = one_target([199.0, 0.5], 0.0);
            let next = step_targets(&w, &cfg, &mut rng_from_seed(seed));
            assert!(inside(next.targets[0].pos, cfg.arena));
            assert_abs_diff_eq!(distance(w.targets[0].pos, next.targets[0].pos), cfg.target_step, epsilon = 1e-9);
        }
    }

    #[test]
    fn default_library_has_stay_and_twenty_headings() {
        let cfg = SimConfig::gazebo_like();
        let w = WorldState::random(&cfg, &mut rng_from_seed(2));
        let prims = build_primitives(&w, &cfg, &mut rng_from_seed(3));
        for (robot, poses) in w.robots.iter().zip(&prims.poses) {
            assert_eq!(poses.len(), 21);
            assert_eq!(poses[0], robot.pos);
            assert!(poses.iter().all(|&p| distance(p, robot.pos) <= cfg.robot_step + 1e-12));
        }
    }

    #[test]
    fn random_forward_library_has_two() {
        let mut cfg = SimConfig::gazebo_like();
        cfg.library = PrimitiveLibrary::RandomForward { max_turn_deg: 30.0, max_length: 1.0, include_stay: true };
        let w = WorldState::random(&cfg, &mut rng_from_seed(2));
        let prims = build_primitives(&w, &cfg, &mut rng_from_seed(3));
        assert!(prims.poses.iter().all(|p| p.len() == 2));
    }

    #[test]
    fn quality_modes() {
        let mut cfg = SimConfig::gazebo_like();
        cfg.quality = QualityMode::InverseDistance;
        assert_eq!(quality(2.0, &cfg), Some(0.5));
        assert_eq!(quality(0.05, &cfg), Some(10.0));
        assert_eq!(quality(cfg.sensing_range + 0.1, &cfg), None);
        cfg.quality = QualityMode::Count;
        assert_eq!(quality(2.0, &cfg), Some(1.0));
    }

    #[test]
    fn snapshot_respects_observation() {
        let cfg = SimConfig::gazebo_like();
        // target 4.9 m east of the robot, moving east: the stay pose loses it,
        // the east primitive keeps it
        let w = WorldState {
            step: 0,
            robots: vec![Pose { pos: [10.0, 10.0], heading: 0.0 }, Pose { pos: [25.0, 25.0], heading: 0.0 }],
            targets: vec![Pose { pos: [14.9, 10.0], heading: 0.0 }],
            since_turn: vec![0],
        };
        let prims = build_primitives(&w, &cfg, &mut rng_from_seed(0));
        assert_eq!(prims.observed, vec![vec![0], vec![]]);
        let inst = snapshot_instance(&w, &prims, &cfg);
        assert_eq!(inst.weight(0, 0, 0), 0.0);
        assert_eq!(inst.weight(0, 1, 0), 1.0);
        assert!((0..21).all(|m| inst.coverage(1, m).is_empty()));
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let cfg = SimConfig::gazebo_like();
        let a = WorldState::random(&cfg, &mut rng_from_seed(5));
        let b = WorldState::random(&cfg, &mut rng_from_seed(5));
        assert_eq!(a.hash(), b.hash());
        let mut c = b.clone();
        c.robots[0].pos[0] += 1e-9;
        assert_ne!(a.hash(), c.hash());
    }
}

//! Force-vector baseline: unit attraction towards every target in sensing
//! range, unit repulsion from every robot within half the communication
//! range, and a full step along the resulting direction.

use super::config::SimConfig;
use super::world::{distance, Point, WorldState};
use crate::netsim::codec::{Decoder, Encoder};
use crate::netsim::{Message, NodeProgram, Outgoing};

fn unit_towards(from: Point, to: Point) -> Point {
    let d = distance(from, to);
    if d == 0.0 {
        [0.0, 0.0]
    } else {
        [(to[0] - from[0]) / d, (to[1] - from[1]) / d]
    }
}

/// Displacement of a robot at `pos` given the targets and other robots it
/// knows about.
pub fn parker_displacement(pos: Point, targets: &[Point], robots: &[Point], config: &SimConfig) -> Point {
    let mut force = [0.0, 0.0];
    for &t in targets.iter().filter(|&&t| distance(pos, t) <= config.sensing_range) {
        let u = unit_towards(pos, t);
        force = [force[0] + u[0], force[1] + u[1]];
    }
    for &r in robots.iter().filter(|&&r| distance(pos, r) <= config.comm_range / 2.0) {
        let u = unit_towards(pos, r);
        force = [force[0] - u[0], force[1] - u[1]];
    }
    let norm = force[0].hypot(force[1]);
    if norm < 1e-12 {
        return [0.0, 0.0];
    }
    [config.robot_step * force[0] / norm, config.robot_step * force[1] / norm]
}

/// Per-robot displacement with every robot seeing every other robot.
pub fn parker_policy(world: &WorldState, config: &SimConfig) -> Vec<Point> {
    let robots = world.robot_positions();
    let targets = world.target_positions();
    (0..robots.len())
        .map(|i| {
            let others: Vec<Point> = robots.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &p)| p).collect();
            parker_displacement(robots[i], &targets, &others, config)
        })
        .collect()
}

/// Broadcasts its position once and collects its neighbors' positions.
pub(crate) struct PositionNode {
    pub pos: Point,
    pub heard: Vec<Point>,
    pub done: bool,
}

impl NodeProgram for PositionNode {
    fn send(&mut self, _round: usize) -> Vec<Outgoing> {
        let mut e = Encoder::new();
        e.f64(self.pos[0]);
        e.f64(self.pos[1]);
        vec![Outgoing::Broadcast(e.finish())]
    }

    fn receive(&mut self, _round: usize, inbox: &[Message]) {
        for m in inbox {
            let mut d = Decoder::new(&m.payload);
            if let (Ok(x), Ok(y)) = (d.f64(), d.f64()) {
                self.heard.push([x, y]);
            }
        }
        self.done = true;
    }

    fn halted(&self) -> bool {
        self.done
    }
}

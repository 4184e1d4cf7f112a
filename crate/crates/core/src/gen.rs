//! Seeded random sensing graphs with a requested coverage density.
//!
//! Density `phi` is the percentage of primitive-target pairs that are edges:
//! `phi = 100 * |E_S| / (sum_i |P^i| * |T|)`, equivalently the average
//! target degree divided by the number of primitives.
//!
//! Construction: every primitive gets one random target, every target gets
//! one random primitive, components of the induced communication graph are
//! joined by random primitive-target edges, and uniformly random absent
//! pairs are added until the density first reaches the request.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{derive_comm_graph, Instance, WeightedEdge};
use crate::seed::SeedPath;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// Every edge has weight 1 (quality = number of targets).
    Binary,
    /// Weights drawn uniformly from (0, 1].
    Uniform,
}

impl std::str::FromStr for WeightMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "binary" => Ok(WeightMode::Binary),
            "uniform" => Ok(WeightMode::Uniform),
            _ => Err(format!("unknown weight mode {s:?} (binary|uniform)")),
        }
    }
}

impl std::fmt::Display for WeightMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WeightMode::Binary => "binary",
            WeightMode::Uniform => "uniform",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub robot_count: usize,
    pub primitives_per_robot: usize,
    pub target_count: usize,
    pub phi_percent: f64,
    pub weight_mode: WeightMode,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(robot_count: usize, target_count: usize, phi_percent: f64, seed: u64) -> Self {
        GenConfig {
            robot_count,
            primitives_per_robot: 2,
            target_count,
            phi_percent,
            weight_mode: WeightMode::Binary,
            seed,
        }
    }

    pub fn total_primitives(&self) -> usize {
        self.robot_count * self.primitives_per_robot
    }

    /// Change in density caused by one edge.
    pub fn edge_quantum(&self) -> f64 {
        100.0 / (self.total_primitives() * self.target_count) as f64
    }

    /// Smallest edge count whose density reaches `phi_percent`.
    pub fn required_edges(&self) -> usize {
        let pairs = (self.total_primitives() * self.target_count) as f64;
        let e = (self.phi_percent / 100.0 * pairs - 1e-9).ceil();
        e.max(0.0) as usize
    }
}

/// Exact density as a fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn same_value(self, other: Ratio) -> bool {
        self.num as u128 * other.den as u128 == other.num as u128 * self.den as u128
    }

    pub fn percent(self) -> f64 {
        100.0 * self.num as f64 / self.den as f64
    }
}

/// Both forms of the density: through the average target degree, and
/// through the edge count.
pub fn phi_identities(inst: &Instance) -> Result<(Ratio, Ratio)> {
    if inst.target_count() == 0 {
        return Err(Error::Param("coverage density needs at least one target".into()));
    }
    let t = inst.target_count() as u64;
    let p = inst.total_primitives() as u64;
    // d_avg(T) = deg_sum / |T|, divided by sum |P^i|
    let deg_sum: u64 = inst.target_degrees().into_iter().map(|d| d as u64).sum();
    let via_degree = Ratio { num: deg_sum, den: t * p };
    let via_edges = Ratio { num: inst.edge_count() as u64, den: p * t };
    Ok((via_degree, via_edges))
}

/// Percentage of primitive-target pairs that are sensing edges.
pub fn measure_phi(inst: &Instance) -> Result<f64> {
    Ok(phi_identities(inst)?.1.percent())
}

struct Builder {
    primitives_per_robot: usize,
    targets: usize,
    present: Vec<bool>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn add(&mut self, prim: usize, target: usize) -> bool {
        let k = prim * self.targets + target;
        if self.present[k] {
            return false;
        }
        self.present[k] = true;
        self.edges.push((prim, target));
        true
    }

    fn instance(&self, robots: usize) -> Instance {
        let k = self.primitives_per_robot;
        Instance::from_edges(
            vec![k; robots],
            self.targets,
            self.edges.iter().map(|&(p, t)| WeightedEdge::new(p / k, p % k, t, 1.0)),
        )
        .expect("generated edges are in range")
    }
}

/// Generates an instance whose density is within one edge quantum of the
/// request. Fails when the request is below what the construction needs.
pub fn generate(config: &GenConfig) -> Result<Instance> {
    build(config, true)
}

/// Like [`generate`], but a request below the construction's minimum
/// yields the minimal construction instead of an error.
pub fn generate_best_effort(config: &GenConfig) -> Result<Instance> {
    build(config, false)
}

fn build(config: &GenConfig, strict: bool) -> Result<Instance> {
    if config.robot_count == 0 || config.primitives_per_robot == 0 || config.target_count == 0 {
        return Err(Error::Param("robot, primitive, and target counts must be positive".into()));
    }
    if !(config.phi_percent > 0.0 && config.phi_percent <= 100.0) {
        return Err(Error::Param(format!("phi must be in (0, 100], got {}", config.phi_percent)));
    }
    let prims = config.total_primitives();
    let targets = config.target_count;
    let required = config.required_edges();
    if strict && required < prims.max(targets) {
        return Err(Error::UnachievablePhi {
            requested: config.phi_percent,
            reason: format!(
                "needs {required} edges but every primitive and target must have one ({} minimum)",
                prims.max(targets)
            ),
        });
    }

    let root = SeedPath::new(config.seed).child("gen");
    let mut rng = root.child("topology").rng();
    let mut b = Builder {
        primitives_per_robot: config.primitives_per_robot,
        targets,
        present: vec![false; prims * targets],
        edges: Vec::new(),
    };
    for p in 0..prims {
        let t = rng.gen_range(0..targets);
        b.add(p, t);
    }
    for t in 0..targets {
        let p = rng.gen_range(0..prims);
        b.add(p, t);
    }
    loop {
        let inst = b.instance(config.robot_count);
        let comps = derive_comm_graph(&inst).components();
        if comps.len() <= 1 {
            break;
        }
        // a target seen from the first component, a primitive from another
        let first = &comps[0];
        let seen: Vec<usize> = (0..targets).filter(|&t| first.iter().any(|&r| inst.robot_sees(r, t))).collect();
        let other = &comps[rng.gen_range(1..comps.len())];
        let robot = other[rng.gen_range(0..other.len())];
        let prim = robot * config.primitives_per_robot + rng.gen_range(0..config.primitives_per_robot);
        let target = match seen.choose(&mut rng) {
            Some(&t) => t,
            // a component of robots that see nothing cannot be joined through a shared target
            None => rng.gen_range(0..targets),
        };
        b.add(prim, target);
    }
    if b.edges.len() < required {
        let mut absent: Vec<usize> = (0..prims * targets).filter(|&k| !b.present[k]).collect();
        while b.edges.len() < required {
            let idx = rng.gen_range(0..absent.len());
            let k = absent.swap_remove(idx);
            b.add(k / targets, k % targets);
        }
    }

    let quantum = config.edge_quantum();
    let measured = 100.0 * b.edges.len() as f64 / (prims * targets) as f64;
    if strict && (measured - config.phi_percent).abs() > quantum + 1e-9 {
        return Err(Error::UnachievablePhi {
            requested: config.phi_percent,
            reason: format!("the base construction already has {} edges (phi = {measured:.3})", b.edges.len()),
        });
    }

    b.edges.sort_unstable();
    let k = config.primitives_per_robot;
    let mut wrng = root.child("weights").rng();
    let edges: Vec<WeightedEdge> = b
        .edges
        .iter()
        .map(|&(p, t)| {
            let w = match config.weight_mode {
                WeightMode::Binary => 1.0,
                WeightMode::Uniform => 1.0 - wrng.gen::<f64>(),
            };
            WeightedEdge::new(p / k, p % k, t, w)
        })
        .collect();
    Ok(Instance::from_edges(vec![k; config.robot_count], targets, edges).expect("generated edges are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::derive_comm_graph;

    #[test]
    fn full_density_is_complete() {
        let inst = generate(&GenConfig::new(3, 4, 100.0, 1)).unwrap();
        assert_eq!(inst.edge_count(), 3 * 2 * 4);
        assert_eq!(measure_phi(&inst).unwrap(), 100.0);
    }

    #[test]
    fn density_within_one_quantum() {
        for seed in 0..20 {
            let cfg = GenConfig::new(6, 12, 25.0, seed);
            let inst = generate(&cfg).unwrap();
            let phi = measure_phi(&inst).unwrap();
            assert!((phi - 25.0).abs() <= cfg.edge_quantum() + 1e-12, "seed {seed}: {phi}");
            assert!(derive_comm_graph(&inst).is_connected());
            assert!(inst.target_degrees().iter().all(|&d| d > 0));
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let mut cfg = GenConfig::new(5, 8, 30.0, 99);
        cfg.weight_mode = WeightMode::Uniform;
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        let inst = generate(&cfg).unwrap();
        assert!(inst.edges().all(|e| e.weight > 0.0 && e.weight <= 1.0));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(generate(&GenConfig::new(2, 4, 0.0, 1)), Err(Error::Param(_))));
        assert!(matches!(generate(&GenConfig::new(2, 4, 101.0, 1)), Err(Error::Param(_))));
        assert!(matches!(generate(&GenConfig::new(0, 4, 50.0, 1)), Err(Error::Param(_))));
        // 4 primitives x 10 targets, 10% needs 4 edges but 10 targets need one each
        assert!(matches!(generate(&GenConfig::new(2, 10, 10.0, 1)), Err(Error::UnachievablePhi { .. })));
    }

    #[test]
    fn best_effort_returns_minimal_construction() {
        let cfg = GenConfig::new(2, 4, 15.0, 3);
        assert!(generate(&cfg).is_err());
        let inst = generate_best_effort(&cfg).unwrap();
        assert!(measure_phi(&inst).unwrap() >= 25.0);
        assert!(derive_comm_graph(&inst).is_connected());
        assert!(inst.target_degrees().iter().all(|&d| d > 0));
        let ok = GenConfig::new(6, 12, 25.0, 3);
        assert_eq!(generate_best_effort(&ok).unwrap(), generate(&ok).unwrap());
    }

    #[test]
    fn measure_counterexample() {
        let inst = Instance::greedy_counterexample();
        assert_eq!(measure_phi(&inst).unwrap(), 25.0);
        let (a, b) = phi_identities(&inst).unwrap();
        assert!(a.same_value(b));
        let empty = Instance::from_edges(vec![2], 3, []).unwrap();
        assert_eq!(measure_phi(&empty).unwrap(), 0.0);
        assert!(measure_phi(&Instance::from_edges(vec![2], 0, []).unwrap()).is_err());
    }
}

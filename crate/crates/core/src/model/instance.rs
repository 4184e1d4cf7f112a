use std::collections::BTreeSet;
use std::fmt;

/// One sensing edge `(robot, primitive) -> target` with its tracking quality.
///
/// Indices are zero-based here; they are shifted to one-based wherever they
/// are printed or written to a file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedEdge {
    pub robot: usize,
    pub primitive: usize,
    pub target: usize,
    pub weight: f64,
}

impl WeightedEdge {
    pub fn new(robot: usize, primitive: usize, target: usize, weight: f64) -> Self {
        WeightedEdge { robot, primitive, target, weight }
    }
}

/// A single invariant violation found by [`validate_instance`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NoRobots,
    EmptyPrimitiveSet { robot: usize },
    RobotOutOfRange { robot: usize, robot_count: usize },
    DuplicateRobotId { robot: usize },
    PrimitiveOutOfRange { robot: usize, primitive: usize, declared: usize },
    DuplicatePrimitiveId { robot: usize, primitive: usize },
    TargetOutOfRange { robot: usize, primitive: usize, target: usize, target_count: usize },
    NegativeWeight { robot: usize, primitive: usize, target: usize, weight: f64 },
    NonFiniteWeight { robot: usize, primitive: usize, target: usize },
    DuplicateEdge { robot: usize, primitive: usize, target: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match *self {
            NoRobots => write!(f, "instance has no robots"),
            EmptyPrimitiveSet { robot } => write!(f, "robot {} has no motion primitives", robot + 1),
            RobotOutOfRange { robot, robot_count } => {
                write!(f, "robot id {} outside 1..={}", robot + 1, robot_count)
            }
            DuplicateRobotId { robot } => write!(f, "robot id {} declared twice", robot + 1),
            PrimitiveOutOfRange { robot, primitive, declared } => write!(
                f,
                "primitive {} of robot {} outside 1..={}",
                primitive + 1,
                robot + 1,
                declared
            ),
            DuplicatePrimitiveId { robot, primitive } => {
                write!(f, "primitive {} of robot {} declared twice", primitive + 1, robot + 1)
            }
            TargetOutOfRange { robot, primitive, target, target_count } => write!(
                f,
                "edge (r{}, p{}, t{}): target outside 1..={}",
                robot + 1,
                primitive + 1,
                target + 1,
                target_count
            ),
            NegativeWeight { robot, primitive, target, weight } => write!(
                f,
                "edge (r{}, p{}, t{}) has negative weight {}",
                robot + 1,
                primitive + 1,
                target + 1,
                weight
            ),
            NonFiniteWeight { robot, primitive, target } => write!(
                f,
                "edge (r{}, p{}, t{}) has a non-finite weight",
                robot + 1,
                primitive + 1,
                target + 1
            ),
            DuplicateEdge { robot, primitive, target } => write!(
                f,
                "edge (r{}, p{}, t{}) appears more than once",
                robot + 1,
                primitive + 1,
                target + 1
            ),
        }
    }
}

/// Every violation found in a candidate instance.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl std::error::Error for ValidationReport {}

/// Unchecked instance data, as read from a file or assembled by hand.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawInstance {
    pub primitives_per_robot: Vec<usize>,
    pub target_count: usize,
    pub edges: Vec<WeightedEdge>,
}

/// Checks every instance invariant and reports all violations at once.
pub fn validate_instance(raw: &RawInstance) -> Result<(), ValidationReport> {
    let mut report = ValidationReport::default();
    let robots = raw.primitives_per_robot.len();
    if robots == 0 {
        report.violations.push(Violation::NoRobots);
    }
    for (robot, &count) in raw.primitives_per_robot.iter().enumerate() {
        if count == 0 {
            report.violations.push(Violation::EmptyPrimitiveSet { robot });
        }
    }
    let mut seen = BTreeSet::new();
    for e in &raw.edges {
        let WeightedEdge { robot, primitive, target, weight } = *e;
        if robot >= robots {
            report.violations.push(Violation::RobotOutOfRange { robot, robot_count: robots });
            continue;
        }
        let declared = raw.primitives_per_robot[robot];
        if primitive >= declared {
            report.violations.push(Violation::PrimitiveOutOfRange { robot, primitive, declared });
        }
        if target >= raw.target_count {
            report.violations.push(Violation::TargetOutOfRange {
                robot,
                primitive,
                target,
                target_count: raw.target_count,
            });
        }
        if !weight.is_finite() {
            report.violations.push(Violation::NonFiniteWeight { robot, primitive, target });
        } else if weight < 0.0 {
            report.violations.push(Violation::NegativeWeight { robot, primitive, target, weight });
        }
        if !seen.insert((robot, primitive, target)) {
            report.violations.push(Violation::DuplicateEdge { robot, primitive, target });
        }
    }
    if report.is_empty() {
        Ok(())
    } else {
        Err(report)
    }
}

/// A validated sensing graph: robots, their motion primitives, targets, and
/// the nonnegative weights `c[i][m][j]` on primitive-target edges.
///
/// Weights are stored sparsely; an absent entry means the target is not in
/// the primitive's sensing region. Zero-weight edges from the input are
/// dropped for the same reason.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    coverage: Vec<Vec<Vec<(usize, f64)>>>,
    target_count: usize,
}

impl Instance {
    pub fn from_raw(raw: &RawInstance) -> Result<Self, ValidationReport> {
        validate_instance(raw)?;
        let mut coverage: Vec<Vec<Vec<(usize, f64)>>> =
            raw.primitives_per_robot.iter().map(|&n| vec![Vec::new(); n]).collect();
        for e in &raw.edges {
            if e.weight > 0.0 {
                coverage[e.robot][e.primitive].push((e.target, e.weight));
            }
        }
        for prims in &mut coverage {
            for list in prims.iter_mut() {
                list.sort_by_key(|&(t, _)| t);
            }
        }
        Ok(Instance { coverage, target_count: raw.target_count })
    }

    pub fn from_edges(
        primitives_per_robot: Vec<usize>,
        target_count: usize,
        edges: impl IntoIterator<Item = WeightedEdge>,
    ) -> Result<Self, ValidationReport> {
        Instance::from_raw(&RawInstance {
            primitives_per_robot,
            target_count,
            edges: edges.into_iter().collect(),
        })
    }

    pub fn robot_count(&self) -> usize {
        self.coverage.len()
    }

    pub fn target_count(&self) -> usize {
        self.target_count
    }

    pub fn primitive_count(&self, robot: usize) -> usize {
        self.coverage[robot].len()
    }

    pub fn primitives_per_robot(&self) -> Vec<usize> {
        self.coverage.iter().map(Vec::len).collect()
    }

    pub fn total_primitives(&self) -> usize {
        self.coverage.iter().map(Vec::len).sum()
    }

    /// Positive-weight targets seen by one primitive, sorted by target.
    pub fn coverage(&self, robot: usize, primitive: usize) -> &[(usize, f64)] {
        &self.coverage[robot][primitive]
    }

    pub fn weight(&self, robot: usize, primitive: usize, target: usize) -> f64 {
        let list = &self.coverage[robot][primitive];
        match list.binary_search_by_key(&target, |&(t, _)| t) {
            Ok(k) => list[k].1,
            Err(_) => 0.0,
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = WeightedEdge> + '_ {
        self.coverage.iter().enumerate().flat_map(|(i, prims)| {
            prims.iter().enumerate().flat_map(move |(m, list)| {
                list.iter().map(move |&(j, c)| WeightedEdge::new(i, m, j, c))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.coverage.iter().flatten().map(Vec::len).sum()
    }

    /// Whether any primitive of `robot` sees `target`.
    pub fn robot_sees(&self, robot: usize, target: usize) -> bool {
        self.coverage[robot]
            .iter()
            .any(|list| list.binary_search_by_key(&target, |&(t, _)| t).is_ok())
    }

    /// Robots with at least one primitive covering each target.
    pub fn target_robots(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.target_count];
        for (i, prims) in self.coverage.iter().enumerate() {
            let mut seen: BTreeSet<usize> = BTreeSet::new();
            for list in prims {
                seen.extend(list.iter().map(|&(t, _)| t));
            }
            for t in seen {
                out[t].push(i);
            }
        }
        out
    }

    /// Number of positive-weight edges incident to each target.
    pub fn target_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.target_count];
        for list in self.coverage.iter().flatten() {
            for &(t, _) in list {
                deg[t] += 1;
            }
        }
        deg
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            primitives_per_robot: self.primitives_per_robot(),
            target_count: self.target_count,
            edges: self.edges().collect(),
        }
    }

    /// All weights multiplied by `factor` (must be positive and finite).
    pub fn scaled(&self, factor: f64) -> Instance {
        assert!(factor > 0.0 && factor.is_finite());
        let coverage = self
            .coverage
            .iter()
            .map(|prims| {
                prims
                    .iter()
                    .map(|list| list.iter().map(|&(t, c)| (t, c * factor)).collect())
                    .collect()
            })
            .collect();
        Instance { coverage, target_count: self.target_count }
    }

    /// Relabels robots: old robot `i` becomes robot `perm[i]`.
    pub fn relabel_robots(&self, perm: &[usize]) -> Instance {
        assert_eq!(perm.len(), self.robot_count());
        let mut coverage = vec![Vec::new(); self.robot_count()];
        for (old, prims) in self.coverage.iter().enumerate() {
            coverage[perm[old]] = prims.clone();
        }
        Instance { coverage, target_count: self.target_count }
    }

    /// Relabels targets: old target `j` becomes target `perm[j]`.
    pub fn relabel_targets(&self, perm: &[usize]) -> Instance {
        assert_eq!(perm.len(), self.target_count);
        let coverage = self
            .coverage
            .iter()
            .map(|prims| {
                prims
                    .iter()
                    .map(|list| {
                        let mut l: Vec<(usize, f64)> =
                            list.iter().map(|&(t, c)| (perm[t], c)).collect();
                        l.sort_by_key(|&(t, _)| t);
                        l
                    })
                    .collect()
            })
            .collect();
        Instance { coverage, target_count: self.target_count }
    }

    /// Sub-instance over `robots` (in the given order) with all targets kept.
    pub fn restrict_robots(&self, robots: &[usize]) -> Instance {
        Instance {
            coverage: robots.iter().map(|&i| self.coverage[i].clone()).collect(),
            target_count: self.target_count,
        }
    }

    /// The two-robot, two-target instance on which sequential greedy fails
    /// for the bottleneck objective: robot 1 sees target 1 only through its
    /// first primitive, robot 2 sees target 2 only through its second.
    pub fn greedy_counterexample() -> Instance {
        Instance::from_edges(
            vec![2, 2],
            2,
            [WeightedEdge::new(0, 0, 0, 1.0), WeightedEdge::new(1, 1, 1, 1.0)],
        )
        .expect("fixture is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_is_valid() {
        let inst = Instance::greedy_counterexample();
        assert!(validate_instance(&inst.to_raw()).is_ok());
        assert_eq!(inst.robot_count(), 2);
        assert_eq!(inst.total_primitives(), 4);
        assert_eq!(inst.edge_count(), 2);
    }

    #[test]
    fn negative_weight_is_named() {
        let raw = RawInstance {
            primitives_per_robot: vec![2],
            target_count: 1,
            edges: vec![WeightedEdge::new(0, 1, 0, -1.0)],
        };
        let err = validate_instance(&raw).unwrap_err();
        assert_eq!(
            err.violations,
            vec![Violation::NegativeWeight { robot: 0, primitive: 1, target: 0, weight: -1.0 }]
        );
        assert!(err.to_string().contains("(r1, p2, t1)"));
    }

    #[test]
    fn primitive_index_beyond_declared_count() {
        let raw = RawInstance {
            primitives_per_robot: vec![2],
            target_count: 1,
            edges: vec![WeightedEdge::new(0, 2, 0, 1.0)],
        };
        let err = validate_instance(&raw).unwrap_err();
        assert_eq!(
            err.violations,
            vec![Violation::PrimitiveOutOfRange { robot: 0, primitive: 2, declared: 2 }]
        );
    }

    #[test]
    fn every_violation_is_listed() {
        let raw = RawInstance {
            primitives_per_robot: vec![1, 0],
            target_count: 1,
            edges: vec![
                WeightedEdge::new(0, 0, 3, 1.0),
                WeightedEdge::new(0, 0, 0, f64::NAN),
                WeightedEdge::new(5, 0, 0, 1.0),
                WeightedEdge::new(0, 0, 3, 1.0),
            ],
        };
        let err = validate_instance(&raw).unwrap_err();
        assert_eq!(err.violations.len(), 6);
    }

    #[test]
    fn zero_weights_are_absent() {
        let inst = Instance::from_edges(vec![1], 2, [WeightedEdge::new(0, 0, 1, 0.0)]).unwrap();
        assert_eq!(inst.edge_count(), 0);
        assert_eq!(inst.weight(0, 0, 1), 0.0);
    }
}

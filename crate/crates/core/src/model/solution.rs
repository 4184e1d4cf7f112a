use serde::{Deserialize, Serialize};

use super::Instance;
use crate::error::{Error, Result};

/// Slack allowed on the per-robot simplex constraint of a fractional solution.
pub const SIMPLEX_SLACK: f64 = 1e-9;
/// Smallest admissible fractional value.
pub const NEGATIVE_SLACK: f64 = -1e-12;

/// An integral solution: exactly one primitive per robot, and optionally at
/// most one owning robot per target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// Zero-based primitive chosen by each robot.
    pub chosen: Vec<usize>,
    /// Owning robot per target, if owners have been assigned.
    pub owners: Option<Vec<Option<usize>>>,
}

impl Assignment {
    pub fn new(chosen: Vec<usize>) -> Self {
        Assignment { chosen, owners: None }
    }

    pub fn with_owners(chosen: Vec<usize>, owners: Vec<Option<usize>>) -> Self {
        Assignment { chosen, owners: Some(owners) }
    }

    pub fn check(&self, inst: &Instance) -> Result<()> {
        check_chosen(inst, &self.chosen)?;
        if let Some(owners) = &self.owners {
            if owners.len() != inst.target_count() {
                return Err(Error::DimensionMismatch(format!(
                    "{} owners for {} targets",
                    owners.len(),
                    inst.target_count()
                )));
            }
            if let Some(bad) = owners.iter().flatten().find(|&&r| r >= inst.robot_count()) {
                return Err(Error::DimensionMismatch(format!("owner robot {} out of range", bad + 1)));
            }
        }
        Ok(())
    }
}

pub(crate) fn check_chosen(inst: &Instance, chosen: &[usize]) -> Result<()> {
    if chosen.len() != inst.robot_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} choices for {} robots",
            chosen.len(),
            inst.robot_count()
        )));
    }
    for (i, &m) in chosen.iter().enumerate() {
        if m >= inst.primitive_count(i) {
            return Err(Error::DimensionMismatch(format!(
                "robot {} chose primitive {} of {}",
                i + 1,
                m + 1,
                inst.primitive_count(i)
            )));
        }
    }
    Ok(())
}

/// LP-relaxed solution: per-primitive values in `[0, 1]` with per-robot sums
/// at most one, and the bottleneck value `w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalSolution {
    pub x: Vec<Vec<f64>>,
    pub w: f64,
}

impl FractionalSolution {
    pub fn zeros(inst: &Instance) -> Self {
        FractionalSolution {
            x: inst.primitives_per_robot().into_iter().map(|n| vec![0.0; n]).collect(),
            w: 0.0,
        }
    }

    pub fn check(&self, inst: &Instance) -> Result<()> {
        if self.x.len() != inst.robot_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} robots in solution, {} in instance",
                self.x.len(),
                inst.robot_count()
            )));
        }
        for (i, row) in self.x.iter().enumerate() {
            if row.len() != inst.primitive_count(i) {
                return Err(Error::DimensionMismatch(format!(
                    "robot {} has {} values for {} primitives",
                    i + 1,
                    row.len(),
                    inst.primitive_count(i)
                )));
            }
            if row.iter().any(|&v| v.is_nan() || v < NEGATIVE_SLACK) {
                return Err(Error::DimensionMismatch(format!("robot {} has a negative value", i + 1)));
            }
            if row.iter().sum::<f64>() > 1.0 + SIMPLEX_SLACK {
                return Err(Error::DimensionMismatch(format!(
                    "robot {} violates its simplex constraint",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// Anything that assigns a (possibly fractional) value to each primitive.
pub trait Selection {
    fn check_dims(&self, inst: &Instance) -> Result<()>;
    /// Nonzero `(primitive, value)` pairs of one robot.
    fn support(&self, robot: usize) -> Vec<(usize, f64)>;
}

impl Selection for Assignment {
    fn check_dims(&self, inst: &Instance) -> Result<()> {
        check_chosen(inst, &self.chosen)
    }

    fn support(&self, robot: usize) -> Vec<(usize, f64)> {
        vec![(self.chosen[robot], 1.0)]
    }
}

impl Selection for FractionalSolution {
    fn check_dims(&self, inst: &Instance) -> Result<()> {
        self.check(inst)
    }

    fn support(&self, robot: usize) -> Vec<(usize, f64)> {
        self.x[robot]
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0.0)
            .map(|(m, &v)| (m, v))
            .collect()
    }
}

/// Minimum-coverage objective; `Vacuous` when there are no targets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bottleneck {
    Vacuous,
    Value(f64),
}

impl Bottleneck {
    /// The numeric value, with `+inf` standing in for the vacuous case.
    pub fn value(self) -> f64 {
        match self {
            Bottleneck::Vacuous => f64::INFINITY,
            Bottleneck::Value(v) => v,
        }
    }

    pub fn is_vacuous(self) -> bool {
        matches!(self, Bottleneck::Vacuous)
    }
}

/// Per-target coverage `sum_i sum_m c[i][m][j] * x[i][m]`.
pub fn target_coverage<S: Selection + ?Sized>(inst: &Instance, sol: &S) -> Result<Vec<f64>> {
    sol.check_dims(inst)?;
    let mut cov = vec![0.0; inst.target_count()];
    for i in 0..inst.robot_count() {
        for (m, x) in sol.support(i) {
            for &(j, c) in inst.coverage(i, m) {
                cov[j] += c * x;
            }
        }
    }
    Ok(cov)
}

pub fn eval_bottleneck<S: Selection + ?Sized>(inst: &Instance, sol: &S) -> Result<Bottleneck> {
    let cov = target_coverage(inst, sol)?;
    Ok(cov
        .into_iter()
        .reduce(f64::min)
        .map_or(Bottleneck::Vacuous, Bottleneck::Value))
}

/// Winner-takes-all objective: each target counts the coverage of its owner.
pub fn eval_wta(inst: &Instance, sol: &Assignment) -> Result<f64> {
    sol.check(inst)?;
    let owners = sol.owners.as_ref().ok_or(Error::MissingOwners)?;
    Ok(owners
        .iter()
        .enumerate()
        .filter_map(|(j, owner)| owner.map(|i| inst.weight(i, sol.chosen[i], j)))
        .sum())
}

/// Winner-takes-all value of a primitive choice, together with the induced
/// owners: each target goes to the robot whose chosen primitive sees it with
/// the largest weight, lowest robot id on ties. Uncovered targets stay
/// unowned.
pub fn eval_wta_from_x(inst: &Instance, chosen: &[usize]) -> Result<(f64, Vec<Option<usize>>)> {
    check_chosen(inst, chosen)?;
    let owners = induced_owners(inst, chosen);
    let value = owners
        .iter()
        .enumerate()
        .filter_map(|(j, owner)| owner.map(|i| inst.weight(i, chosen[i], j)))
        .sum();
    Ok((value, owners))
}

pub(crate) fn induced_owners(inst: &Instance, chosen: &[usize]) -> Vec<Option<usize>> {
    let mut best: Vec<Option<(usize, f64)>> = vec![None; inst.target_count()];
    for (i, &m) in chosen.iter().enumerate() {
        for &(j, c) in inst.coverage(i, m) {
            match best[j] {
                Some((_, b)) if b >= c => {}
                _ => best[j] = Some((i, c)),
            }
        }
    }
    best.into_iter().map(|b| b.map(|(i, _)| i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WeightedEdge;

    fn fixture() -> Instance {
        Instance::greedy_counterexample()
    }

    #[test]
    fn bottleneck_of_fixture_choices() {
        let inst = fixture();
        let good = Assignment::new(vec![0, 1]);
        let bad = Assignment::new(vec![1, 0]);
        assert_eq!(eval_bottleneck(&inst, &good).unwrap(), Bottleneck::Value(1.0));
        assert_eq!(eval_bottleneck(&inst, &bad).unwrap(), Bottleneck::Value(0.0));
    }

    #[test]
    fn zero_fractional_solution_has_zero_bottleneck() {
        let inst = fixture();
        let frac = FractionalSolution::zeros(&inst);
        assert_eq!(eval_bottleneck(&inst, &frac).unwrap(), Bottleneck::Value(0.0));
    }

    #[test]
    fn no_targets_is_vacuous() {
        let inst = Instance::from_edges(vec![2], 0, []).unwrap();
        let b = eval_bottleneck(&inst, &Assignment::new(vec![0])).unwrap();
        assert!(b.is_vacuous());
        assert_eq!(b.value(), f64::INFINITY);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let inst = fixture();
        assert!(matches!(
            eval_bottleneck(&inst, &Assignment::new(vec![0])),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            eval_bottleneck(&inst, &Assignment::new(vec![0, 2])),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn wta_with_explicit_owners() {
        let inst = fixture();
        let sol = Assignment::with_owners(vec![0, 1], vec![Some(0), Some(1)]);
        assert_eq!(eval_wta(&inst, &sol).unwrap(), 2.0);
        let swapped = Assignment::with_owners(vec![0, 1], vec![Some(1), Some(0)]);
        assert_eq!(eval_wta(&inst, &swapped).unwrap(), 0.0);
        assert!(matches!(eval_wta(&inst, &Assignment::new(vec![0, 1])), Err(Error::MissingOwners)));
    }

    #[test]
    fn wta_single_term() {
        let inst = Instance::from_edges(vec![1], 1, [WeightedEdge::new(0, 0, 0, 3.5)]).unwrap();
        let sol = Assignment::with_owners(vec![0], vec![Some(0)]);
        assert_eq!(eval_wta(&inst, &sol).unwrap(), 3.5);
    }

    #[test]
    fn wta_from_x_induces_owners() {
        let inst = fixture();
        assert_eq!(eval_wta_from_x(&inst, &[0, 1]).unwrap(), (2.0, vec![Some(0), Some(1)]));
        assert_eq!(eval_wta_from_x(&inst, &[1, 0]).unwrap(), (0.0, vec![None, None]));
    }

    #[test]
    fn wta_from_x_tie_goes_to_lowest_robot() {
        let inst = Instance::from_edges(
            vec![1, 1],
            1,
            [WeightedEdge::new(0, 0, 0, 1.0), WeightedEdge::new(1, 0, 0, 1.0)],
        )
        .unwrap();
        let (v, owners) = eval_wta_from_x(&inst, &[0, 0]).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(owners, vec![Some(0)]);
    }

    #[test]
    fn fractional_invariants() {
        let inst = fixture();
        let mut frac = FractionalSolution::zeros(&inst);
        frac.x[0] = vec![0.6, 0.4 + 5e-10];
        assert!(frac.check(&inst).is_ok());
        frac.x[0] = vec![0.6, 0.5];
        assert!(frac.check(&inst).is_err());
        frac.x[0] = vec![1.0, -1e-9];
        assert!(frac.check(&inst).is_err());
    }
}

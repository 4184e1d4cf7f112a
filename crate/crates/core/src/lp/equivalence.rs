use serde::Serialize;

use super::{solve_instance_lp, LpOptions};
use crate::error::Result;
use crate::model::Instance;
use crate::oracle::{brute_force_bottleneck, check_cap, for_each_choice};

pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// Optimum of the relaxed program with `x` restricted to `{0, 1}`,
    /// enumerated over "at most one primitive per robot".
    pub integer_program: f64,
    /// Optimum of the max-min objective over "exactly one primitive per robot".
    pub max_min: f64,
    /// Optimum of the relaxation itself, for reference.
    pub relaxation: f64,
    pub pass: bool,
}

/// Checks that the integer-constrained max-min LP and the integral max-min
/// objective have the same optimum, each computed by its own enumeration.
pub fn check_lemma1_equivalence(inst: &Instance) -> Result<EquivalenceReport> {
    check_cap(inst)?;
    let n = inst.robot_count();
    // an extra digit per robot encodes "no primitive"
    let radices: Vec<usize> = (0..n).map(|i| inst.primitive_count(i) + 1).collect();
    let mut integer_program = f64::NEG_INFINITY;
    let mut w = vec![0.0; inst.target_count()];
    for_each_choice(&radices, |digits| {
        w.iter_mut().for_each(|v| *v = 0.0);
        for (i, &d) in digits.iter().enumerate() {
            if d > 0 {
                for &(j, c) in inst.coverage(i, d - 1) {
                    w[j] += c;
                }
            }
        }
        let value = w.iter().copied().fold(f64::INFINITY, f64::min);
        integer_program = integer_program.max(value);
    });
    let max_min = brute_force_bottleneck(inst)?.optimum;
    let relaxation = solve_instance_lp(inst, &LpOptions::default())?.w;
    let pass = if integer_program.is_infinite() || max_min.is_infinite() {
        integer_program == max_min
    } else {
        (integer_program - max_min).abs() <= EQUIVALENCE_TOLERANCE
    };
    Ok(EquivalenceReport { integer_program, max_min, relaxation, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WeightedEdge;

    #[test]
    fn counterexample_passes() {
        let r = check_lemma1_equivalence(&Instance::greedy_counterexample()).unwrap();
        assert_eq!(r.integer_program, 1.0);
        assert_eq!(r.max_min, 1.0);
        assert!(r.pass);
    }

    #[test]
    fn single_edge() {
        let inst = Instance::from_edges(vec![1], 1, [WeightedEdge::new(0, 0, 0, 2.0)]).unwrap();
        let r = check_lemma1_equivalence(&inst).unwrap();
        assert_eq!((r.integer_program, r.max_min), (2.0, 2.0));
        assert!(r.pass);
    }
}

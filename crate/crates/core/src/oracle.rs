//! Exact solvers by exhaustive enumeration of primitive choices.
//!
//! For a fixed choice `x` the best owner map is the per-target argmax, so
//! enumerating `x` alone gives the winner-takes-all optimum.

use rand::Rng as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::local::round_solution;
use crate::lp::{solve_instance_lp, LpOptions};
use crate::model::{eval_wta_from_x, induced_owners, target_coverage, Assignment, Instance};
use crate::seed::rng_from_seed;

pub const ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub best_assignment: Assignment,
    pub optimum: f64,
    pub enumerated: u64,
}

/// Number of integral choices, `prod_i |P^i|`.
pub fn assignment_count(inst: &Instance) -> u128 {
    (0..inst.robot_count())
        .map(|i| inst.primitive_count(i) as u128)
        .try_fold(1u128, |acc, n| acc.checked_mul(n))
        .unwrap_or(u128::MAX)
}

pub(crate) fn check_cap(inst: &Instance) -> Result<u128> {
    let count = assignment_count(inst);
    if count > ENUMERATION_CAP {
        return Err(Error::EnumerationCap { count, cap: ENUMERATION_CAP });
    }
    Ok(count)
}

/// Visits every choice vector in lexicographic order (robot 0 most significant).
pub fn for_each_choice(radices: &[usize], mut visit: impl FnMut(&[usize])) -> u64 {
    if radices.contains(&0) {
        return 0;
    }
    let mut x = vec![0; radices.len()];
    let mut count = 0;
    loop {
        visit(&x);
        count += 1;
        let mut i = radices.len();
        loop {
            if i == 0 {
                return count;
            }
            i -= 1;
            x[i] += 1;
            if x[i] < radices[i] {
                break;
            }
            x[i] = 0;
        }
    }
}

fn maximize(inst: &Instance, objective: impl Fn(&[usize]) -> f64) -> Result<OracleResult> {
    check_cap(inst)?;
    let mut best: Option<(Vec<usize>, f64)> = None;
    let enumerated = for_each_choice(&inst.primitives_per_robot(), |x| {
        let v = objective(x);
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((x.to_vec(), v));
        }
    });
    let (chosen, optimum) = best.expect("instances have at least one robot and primitive");
    let owners = induced_owners(inst, &chosen);
    Ok(OracleResult { best_assignment: Assignment::with_owners(chosen, owners), optimum, enumerated })
}

/// Winner-takes-all optimum; ties go to the lexicographically smallest choice.
pub fn brute_force_wta(inst: &Instance) -> Result<OracleResult> {
    maximize(inst, |x| eval_wta_from_x(inst, x).expect("enumerated choices are in range").0)
}

/// Bottleneck optimum over integral choices; `+inf` when there are no targets.
pub fn brute_force_bottleneck(inst: &Instance) -> Result<OracleResult> {
    maximize(inst, |x| {
        let a = Assignment::new(x.to_vec());
        target_coverage(inst, &a)
            .expect("enumerated choices are in range")
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    })
}

/// Centralized relaxation followed by per-robot argmax rounding.
pub fn lp_round_baseline(inst: &Instance, opts: &LpOptions) -> Result<Assignment> {
    let frac = solve_instance_lp(inst, opts)?;
    let mut a = round_solution(inst, &frac)?;
    a.owners = Some(induced_owners(inst, &a.chosen));
    Ok(a)
}

/// Independent uniform primitive per robot, with owners induced as in the
/// winner-takes-all evaluator.
pub fn random_baseline(inst: &Instance, seed: u64) -> Assignment {
    let mut rng = rng_from_seed(seed);
    let chosen: Vec<usize> =
        (0..inst.robot_count()).map(|i| rng.gen_range(0..inst.primitive_count(i))).collect();
    let owners = induced_owners(inst, &chosen);
    Assignment::with_owners(chosen, owners)
}

use std::collections::BTreeMap;

use super::simplex::{self, LinearProgram, Sense};
use crate::error::{Error, Result};
use crate::model::{FractionalSolution, Instance};

/// Largest ratio between the biggest and smallest positive weight accepted.
pub const MAX_DYNAMIC_RANGE: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpOptions {
    /// Maximum number of primitive variables in one problem.
    pub max_primitives: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { max_primitives: 200 }
    }
}

/// The relaxed bottleneck problem on a subgraph:
///
/// ```text
/// maximize w
///   s.t.  sum_m x[i][m] <= 1                   for every robot i
///         sum_{i,m} c[i][m][j] x[i][m] >= w      for every target j
///         x >= 0
/// ```
///
/// Robots and targets carry their ids in the enclosing instance; weights are
/// stored against positions in `targets`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxMinLp {
    robots: Vec<usize>,
    targets: Vec<usize>,
    /// robot position -> primitive -> (target position, weight)
    coverage: Vec<Vec<Vec<(usize, f64)>>>,
}

impl MaxMinLp {
    /// `coverage[k][m]` lists `(target id, weight)` for primitive `m` of
    /// `robots[k]`. Edges to targets outside `targets` are ignored. Fails if
    /// some listed target has no positive-weight primitive.
    pub fn new(
        robots: Vec<usize>,
        coverage: Vec<Vec<Vec<(usize, f64)>>>,
        targets: Vec<usize>,
    ) -> Result<Self> {
        assert_eq!(robots.len(), coverage.len());
        let pos: BTreeMap<usize, usize> = targets.iter().enumerate().map(|(k, &t)| (t, k)).collect();
        let mut covered = vec![false; targets.len()];
        let coverage: Vec<Vec<Vec<(usize, f64)>>> = coverage
            .into_iter()
            .map(|prims| {
                prims
                    .into_iter()
                    .map(|list| {
                        list.into_iter()
                            .filter(|&(_, c)| c > 0.0)
                            .filter_map(|(t, c)| pos.get(&t).map(|&k| (k, c)))
                            .inspect(|&(k, _)| covered[k] = true)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        if let Some(k) = covered.iter().position(|&c| !c) {
            return Err(Error::UncoveredTarget(targets[k]));
        }
        Ok(MaxMinLp { robots, targets, coverage })
    }

    /// The problem over `robots` of `inst` and the given targets.
    pub fn restricted(inst: &Instance, robots: &[usize], targets: Vec<usize>) -> Result<Self> {
        let coverage = robots
            .iter()
            .map(|&i| (0..inst.primitive_count(i)).map(|m| inst.coverage(i, m).to_vec()).collect())
            .collect();
        MaxMinLp::new(robots.to_vec(), coverage, targets)
    }

    /// The whole instance, keeping only targets some primitive can see.
    pub fn from_instance(inst: &Instance) -> Result<Self> {
        let robots: Vec<usize> = (0..inst.robot_count()).collect();
        let targets = covered_targets(inst, &robots);
        MaxMinLp::restricted(inst, &robots, targets)
    }

    pub fn robots(&self) -> &[usize] {
        &self.robots
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn primitive_count(&self) -> usize {
        self.coverage.iter().map(Vec::len).sum()
    }

    pub fn coverage(&self) -> &[Vec<Vec<(usize, f64)>>] {
        &self.coverage
    }
}

/// Targets seen by at least one primitive of the given robots, ascending.
pub fn covered_targets(inst: &Instance, robots: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; inst.target_count()];
    for &i in robots {
        for m in 0..inst.primitive_count(i) {
            for &(t, _) in inst.coverage(i, m) {
                seen[t] = true;
            }
        }
    }
    (0..inst.target_count()).filter(|&t| seen[t]).collect()
}

/// Solves the max-min LP exactly. Rows of the returned `x` follow
/// `problem.robots()`; `w` is recomputed as the minimum target coverage of
/// the returned `x`. A problem without targets has `w = +inf` and `x = 0`.
pub fn solve_maxmin_lp(problem: &MaxMinLp, opts: &LpOptions) -> Result<FractionalSolution> {
    let p = problem.primitive_count();
    if p > opts.max_primitives {
        return Err(Error::LpCap { count: p, cap: opts.max_primitives });
    }
    let zeros: Vec<Vec<f64>> = problem.coverage.iter().map(|prims| vec![0.0; prims.len()]).collect();
    if problem.targets.is_empty() {
        return Ok(FractionalSolution { x: zeros, w: f64::INFINITY });
    }
    let (lo, hi) = problem
        .coverage
        .iter()
        .flatten()
        .flatten()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(_, c)| (lo.min(c), hi.max(c)));
    if hi / lo > MAX_DYNAMIC_RANGE {
        return Err(Error::Degenerate(hi / lo));
    }

    // variables: x in robot-major order, then w
    let nv = p + 1;
    let mut obj = vec![0.0; nv];
    obj[p] = 1.0;
    let mut lp = LinearProgram::new(obj);
    let mut offset = Vec::with_capacity(problem.robots.len());
    let mut next = 0;
    for prims in &problem.coverage {
        offset.push(next);
        if !prims.is_empty() {
            let mut row = vec![0.0; nv];
            row[next..next + prims.len()].iter_mut().for_each(|v| *v = 1.0);
            lp.constrain(row, Sense::Le, 1.0);
        }
        next += prims.len();
    }
    let mut target_rows = vec![vec![0.0; nv]; problem.targets.len()];
    for (k, prims) in problem.coverage.iter().enumerate() {
        for (m, list) in prims.iter().enumerate() {
            for &(t, c) in list {
                target_rows[t][offset[k] + m] = -c / hi;
            }
        }
    }
    for mut row in target_rows {
        row[p] = 1.0;
        lp.constrain(row, Sense::Le, 0.0);
    }
    let sol = simplex::solve(&lp)?;

    let mut x = zeros;
    for (k, row) in x.iter_mut().enumerate() {
        for (m, v) in row.iter_mut().enumerate() {
            *v = sol.x[offset[k] + m].clamp(0.0, 1.0);
        }
        let s: f64 = row.iter().sum();
        if s > 1.0 {
            row.iter_mut().for_each(|v| *v /= s);
        }
    }
    let mut cov = vec![0.0; problem.targets.len()];
    for (k, prims) in problem.coverage.iter().enumerate() {
        for (m, list) in prims.iter().enumerate() {
            for &(t, c) in list {
                cov[t] += c * x[k][m];
            }
        }
    }
    let w = cov.into_iter().fold(f64::INFINITY, f64::min);
    Ok(FractionalSolution { x, w })
}

/// Solves the relaxation over the whole instance and expands the result to
/// one row per robot. Targets no primitive can see are left out of the LP,
/// so `w` reports the optimum over coverable targets.
pub fn solve_instance_lp(inst: &Instance, opts: &LpOptions) -> Result<FractionalSolution> {
    let problem = MaxMinLp::from_instance(inst)?;
    solve_maxmin_lp(&problem, opts)
}

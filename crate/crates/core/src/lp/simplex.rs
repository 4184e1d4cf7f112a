//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Solves `maximize c·x` subject to rows `a·x {<=, >=, =} b` and `x >= 0`.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram { objective, constraints: Vec::new() }
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.objective.len());
        self.constraints.push(Constraint { coeffs, sense, rhs });
        self
    }

    pub fn var_count(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub pivots: usize,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs for the current phase objective (maximization).
    cost: Vec<f64>,
    value: f64,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        self.rhs[row] /= p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row];
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let f = self.rows[r][col];
            if f != 0.0 {
                for (v, &pv) in self.rows[r].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.rows[r][col] = 0.0;
                self.rhs[r] -= f * pivot_rhs;
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            for (v, &pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.cost[col] = 0.0;
            self.value += f * pivot_rhs;
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Sets the phase objective and prices out the basic columns.
    fn set_objective(&mut self, obj: &[f64]) {
        self.cost = obj.to_vec();
        self.value = 0.0;
        for r in 0..self.rows.len() {
            let b = self.basis[r];
            let f = self.cost[b];
            if f != 0.0 {
                for (v, &rv) in self.cost.iter_mut().zip(&self.rows[r]) {
                    *v -= f * rv;
                }
                self.value += f * self.rhs[r];
            }
        }
    }

    /// Runs Bland's rule over columns allowed by `eligible`.
    fn optimize(&mut self, eligible: &[bool], max_pivots: usize) -> Result<()> {
        loop {
            let Some(col) = (0..self.cost.len()).find(|&j| eligible[j] && self.cost[j] > PIVOT_EPS)
            else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col];
                if a > PIVOT_EPS {
                    let ratio = self.rhs[r] / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - 1e-12
                                || (ratio <= bratio + 1e-12 && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = best else {
                return Err(Error::Unbounded);
            };
            if self.pivots >= max_pivots {
                return Err(Error::PivotLimit(max_pivots));
            }
            self.pivot(row, col);
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    solve_with_limit(lp, 50_000)
}

pub fn solve_with_limit(lp: &LinearProgram, max_pivots: usize) -> Result<LpSolution> {
    let n = lp.var_count();
    let m = lp.constraints.len();
    // columns: originals, then one slack/surplus per inequality, then artificials
    let slack_count = lp.constraints.iter().filter(|c| c.sense != Sense::Eq).count();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut senses = Vec::with_capacity(m);
    for c in &lp.constraints {
        let (coeffs, sense, b) = if c.rhs < 0.0 {
            let flipped = match c.sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
            (c.coeffs.iter().map(|v| -v).collect::<Vec<_>>(), flipped, -c.rhs)
        } else {
            (c.coeffs.clone(), c.sense, c.rhs)
        };
        rows.push(coeffs);
        rhs.push(b);
        senses.push(sense);
    }
    let art_count = senses.iter().filter(|&&s| s != Sense::Le).count();
    let total = n + slack_count + art_count;
    let mut basis = vec![0; m];
    let mut slack = n;
    let mut art = n + slack_count;
    let mut is_art = vec![false; total];
    for (r, row) in rows.iter_mut().enumerate() {
        row.resize(total, 0.0);
        match senses[r] {
            Sense::Le => {
                row[slack] = 1.0;
                basis[r] = slack;
                slack += 1;
            }
            Sense::Ge => {
                row[slack] = -1.0;
                slack += 1;
                row[art] = 1.0;
                basis[r] = art;
                is_art[art] = true;
                art += 1;
            }
            Sense::Eq => {
                row[art] = 1.0;
                basis[r] = art;
                is_art[art] = true;
                art += 1;
            }
        }
    }
    let mut t = Tableau { rows, rhs, basis, cost: Vec::new(), value: 0.0, pivots: 0 };

    if art_count > 0 {
        let phase1: Vec<f64> = (0..total).map(|j| if is_art[j] { -1.0 } else { 0.0 }).collect();
        t.set_objective(&phase1);
        t.optimize(&vec![true; total], max_pivots)?;
        // phase-one optimum is minus the total artificial mass
        if t.value < -FEAS_EPS * (1.0 + t.rhs.iter().fold(0.0f64, |a, &b| a.max(b))) {
            return Err(Error::Infeasible);
        }
        // drive artificials out of the basis; drop rows that are redundant
        let mut r = 0;
        while r < t.rows.len() {
            if is_art[t.basis[r]] {
                match (0..total).find(|&j| !is_art[j] && t.rows[r][j].abs() > 1e-9) {
                    Some(col) => {
                        t.pivot(r, col);
                        r += 1;
                    }
                    None => {
                        t.rows.remove(r);
                        t.rhs.remove(r);
                        t.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }

    let mut phase2 = lp.objective.clone();
    phase2.resize(total, 0.0);
    t.set_objective(&phase2);
    let eligible: Vec<bool> = is_art.iter().map(|&a| !a).collect();
    t.optimize(&eligible, max_pivots)?;

    let mut x = vec![0.0; n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs[r].max(0.0);
        }
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { x, value, pivots: t.pivots })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Vertex enumeration: tries every choice of `n` tight constraints among
    /// rows and bounds, solves the square system, and keeps the best
    /// feasible point. Only for tiny programs; assumes a bounded optimum.
    pub(crate) fn vertex_oracle(lp: &LinearProgram) -> Option<f64> {
        let n = lp.var_count();
        let mut all: Vec<(Vec<f64>, f64)> =
            lp.constraints.iter().map(|c| (c.coeffs.clone(), c.rhs)).collect();
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            all.push((e, 0.0));
        }
        let feasible = |x: &[f64]| {
            x.iter().all(|&v| v >= -1e-9)
                && lp.constraints.iter().all(|c| {
                    let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
                    match c.sense {
                        Sense::Le => lhs <= c.rhs + 1e-9,
                        Sense::Ge => lhs >= c.rhs - 1e-9,
                        Sense::Eq => (lhs - c.rhs).abs() <= 1e-9,
                    }
                })
        };
        let mut best: Option<f64> = None;
        let k = all.len();
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let mut a: Vec<Vec<f64>> = idx.iter().map(|&i| all[i].0.clone()).collect();
            let mut b: Vec<f64> = idx.iter().map(|&i| all[i].1).collect();
            if let Some(x) = gauss(&mut a, &mut b) {
                if feasible(&x) {
                    let v: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                    best = Some(best.map_or(v, |bv: f64| bv.max(v)));
                }
            }
            // next combination
            let mut i = n;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if idx[i] < k - n + i {
                    idx[i] += 1;
                    for l in i + 1..n {
                        idx[l] = idx[l - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn gauss(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
            if a[piv][col].abs() < 1e-12 {
                return None;
            }
            a.swap(col, piv);
            b.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
        Some((0..n).map(|i| b[i] / a[i][i]).collect())
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(vec![3.0, 5.0]);
        lp.constrain(vec![1.0, 0.0], Sense::Le, 4.0)
            .constrain(vec![0.0, 2.0], Sense::Le, 12.0)
            .constrain(vec![3.0, 2.0], Sense::Le, 18.0);
        let s = solve(&lp).unwrap();
        assert_abs_diff_eq!(s.value, 36.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.x[0], 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.x[1], 6.0, epsilon = 1e-9);
    }

    #[test]
    fn phase_one_with_equalities_and_lower_bounds() {
        // max x + y, x + y = 3, x >= 1, y >= 1.5, x <= 2
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 1.0], Sense::Eq, 3.0)
            .constrain(vec![1.0, 0.0], Sense::Ge, 1.0)
            .constrain(vec![0.0, 1.0], Sense::Ge, 1.5)
            .constrain(vec![1.0, 0.0], Sense::Le, 2.0);
        let s = solve(&lp).unwrap();
        assert_abs_diff_eq!(s.value, 3.0, epsilon = 1e-9);
        assert!(s.x[0] >= 1.0 - 1e-9 && s.x[1] >= 1.5 - 1e-9);
        assert_abs_diff_eq!(s.value, vertex_oracle(&lp).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // max -x, -x <= -2  (x >= 2) -> -2
        let mut lp = LinearProgram::new(vec![-1.0]);
        lp.constrain(vec![-1.0], Sense::Le, -2.0);
        assert_abs_diff_eq!(solve(&lp).unwrap().value, -2.0, epsilon = 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.constrain(vec![1.0], Sense::Le, 1.0).constrain(vec![1.0], Sense::Ge, 2.0);
        assert!(matches!(solve(&lp), Err(Error::Infeasible)));
        let mut lp = LinearProgram::new(vec![1.0, 0.0]);
        lp.constrain(vec![0.0, 1.0], Sense::Le, 1.0);
        assert!(matches!(solve(&lp), Err(Error::Unbounded)));
    }

    #[test]
    fn redundant_equality_rows_are_dropped() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.constrain(vec![1.0, 1.0], Sense::Eq, 1.0).constrain(vec![2.0, 2.0], Sense::Eq, 2.0);
        let s = solve(&lp).unwrap();
        assert_abs_diff_eq!(s.value, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Beale's example cycles under the largest-coefficient rule.
        // min -3/4 x4 + 20 x5 - 1/2 x6 + 6 x7 written as a maximization.
        let mut lp = LinearProgram::new(vec![0.75, -20.0, 0.5, -6.0]);
        lp.constrain(vec![0.25, -8.0, -1.0, 9.0], Sense::Le, 0.0)
            .constrain(vec![0.5, -12.0, -0.5, 3.0], Sense::Le, 0.0)
            .constrain(vec![0.0, 0.0, 1.0, 0.0], Sense::Le, 1.0);
        let s = solve(&lp).unwrap();
        assert_abs_diff_eq!(s.value, 1.25, epsilon = 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]
            #[test]
            fn matches_vertex_enumeration(
                obj in proptest::collection::vec(-3i32..=5, 3),
                rows in proptest::collection::vec((proptest::collection::vec(0i32..=4, 3), 1i32..=6), 1..4),
            ) {
                // bounded: every variable appears in a <= row with positive coefficient via the cap row
                let mut lp = LinearProgram::new(obj.iter().map(|&v| v as f64).collect());
                for (a, b) in &rows {
                    lp.constrain(a.iter().map(|&v| v as f64).collect(), Sense::Le, *b as f64);
                }
                lp.constrain(vec![1.0; 3], Sense::Le, 10.0);
                let s = solve(&lp).unwrap();
                let oracle = vertex_oracle(&lp).unwrap();
                prop_assert!((s.value - oracle).abs() <= 1e-8, "simplex {} oracle {}", s.value, oracle);
            }
        }
    }
}

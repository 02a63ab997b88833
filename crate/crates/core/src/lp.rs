//! Dense two-phase simplex for the small linear programs used across this crate.
//!
//! Every consumer here is desk-scale: a handful of variables and at most a few
//! dozen rows. A tableau method with Bland's rule is deterministic, immune to
//! cycling, and small enough to audit line by line, which matters more than
//! speed because callers cross-check primal and dual routes at 1e-8 and any
//! solver noise shows up as a spurious duality gap.
//!
//! Variables are nonnegative unless marked free; free variables are split into
//! positive and negative parts internally. Unbounded problems come back with a
//! feasible descent ray so callers can surface a certificate rather than a
//! bare flag.

use thiserror::Error;

const TOL_COST: f64 = 1e-9;
const TOL_PIVOT: f64 = 1e-9;
const TOL_FEAS: f64 = 1e-8;
const PIVOT_BUDGET: usize = 200_000;

/// Comparison direction of one constraint row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

/// One constraint row `coeffs . x  cmp  rhs`.
#[derive(Clone, Debug)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub cmp: Cmp,
    pub rhs: f64,
}

impl LpRow {
    pub fn le(coeffs: Vec<f64>, rhs: f64) -> Self {
        LpRow { coeffs, cmp: Cmp::Le, rhs }
    }
    pub fn ge(coeffs: Vec<f64>, rhs: f64) -> Self {
        LpRow { coeffs, cmp: Cmp::Ge, rhs }
    }
    pub fn eq(coeffs: Vec<f64>, rhs: f64) -> Self {
        LpRow { coeffs, cmp: Cmp::Eq, rhs }
    }
}

/// Minimization problem. Variable `j` ranges over `[0, inf)` unless
/// `free[j]` is set, in which case it ranges over all reals.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub free: Vec<bool>,
}

impl LpProblem {
    /// Minimization with all variables nonnegative.
    pub fn minimize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem { objective, rows: Vec::new(), free: vec![false; n] }
    }

    /// Minimization with every variable free.
    pub fn minimize_free(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem { objective, rows: Vec::new(), free: vec![true; n] }
    }

    pub fn push(&mut self, row: LpRow) {
        self.rows.push(row);
    }
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    /// The objective decreases without bound along `ray` from some feasible
    /// point: `A . ray` respects every row direction and `c . ray < 0`.
    Unbounded { ray: Vec<f64> },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("constraint row has {got} coefficients, expected {want}")]
    RowShape { got: usize, want: usize },
    #[error("objective length {got} does not match free-flag length {want}")]
    FreeShape { got: usize, want: usize },
    #[error("simplex exceeded {0} pivots")]
    PivotBudget(usize),
}

struct Tableau {
    /// canonical-form constraint matrix, rows * cols
    a: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// columns that may never enter the basis (artificials in phase two)
    barred: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.a[row][col];
        let inv = 1.0 / p;
        for v in self.a[row].iter_mut() {
            *v *= inv;
        }
        self.rhs[row] *= inv;
        for i in 0..self.a.len() {
            if i == row {
                continue;
            }
            let f = self.a[i][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..self.a[i].len() {
                self.a[i][j] -= f * self.a[row][j];
            }
            self.rhs[i] -= f * self.rhs[row];
            self.a[i][col] = 0.0;
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Reduced cost of `col` under objective `cost`.
    fn reduced(&self, cost: &[f64], col: usize) -> f64 {
        let mut r = cost[col];
        for (i, &b) in self.basis.iter().enumerate() {
            r -= cost[b] * self.a[i][col];
        }
        r
    }

    /// Bland's rule iteration loop. Returns `Some(col)` when the objective is
    /// unbounded along the entering column, `None` at optimality.
    fn run(&mut self, cost: &[f64]) -> Result<Option<usize>, LpError> {
        loop {
            if self.pivots > PIVOT_BUDGET {
                return Err(LpError::PivotBudget(PIVOT_BUDGET));
            }
            let mut enter = None;
            for col in 0..cost.len() {
                if self.barred[col] {
                    continue;
                }
                if self.reduced(cost, col) < -TOL_COST {
                    enter = Some(col);
                    break;
                }
            }
            let Some(col) = enter else { return Ok(None) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.a.len() {
                let d = self.a[i][col];
                if d > TOL_PIVOT {
                    let ratio = self.rhs[i] / d;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-12
                                || (ratio < lr + 1e-12 && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return Ok(Some(col)),
            }
        }
    }

    fn values(&self, ncols: usize) -> Vec<f64> {
        let mut x = vec![0.0; ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[i];
        }
        x
    }
}

/// Solve a minimization problem with the two-phase simplex method.
pub fn solve(p: &LpProblem) -> Result<LpOutcome, LpError> {
    let n = p.objective.len();
    if p.free.len() != n {
        return Err(LpError::FreeShape { got: p.free.len(), want: n });
    }
    for row in &p.rows {
        if row.coeffs.len() != n {
            return Err(LpError::RowShape { got: row.coeffs.len(), want: n });
        }
    }

    // Column layout: positive part per variable, negative part per free
    // variable, one slack per inequality row, artificials last.
    let mut col_pos = vec![0usize; n];
    let mut col_neg = vec![usize::MAX; n];
    let mut ncols = 0usize;
    for j in 0..n {
        col_pos[j] = ncols;
        ncols += 1;
        if p.free[j] {
            col_neg[j] = ncols;
            ncols += 1;
        }
    }
    let n_struct = ncols;
    let m = p.rows.len();
    let slack_base = n_struct;
    let n_slack = p.rows.iter().filter(|r| r.cmp != Cmp::Eq).count();
    let art_base = slack_base + n_slack;

    // Assemble rows in equality form with nonnegative right-hand sides.
    let mut a = vec![vec![0.0; art_base]; m];
    let mut rhs = vec![0.0; m];
    let mut slack_col = vec![usize::MAX; m];
    let mut next_slack = slack_base;
    for (i, row) in p.rows.iter().enumerate() {
        for j in 0..n {
            a[i][col_pos[j]] = row.coeffs[j];
            if p.free[j] {
                a[i][col_neg[j]] = -row.coeffs[j];
            }
        }
        rhs[i] = row.rhs;
        match row.cmp {
            Cmp::Le => {
                a[i][next_slack] = 1.0;
                slack_col[i] = next_slack;
                next_slack += 1;
            }
            Cmp::Ge => {
                a[i][next_slack] = -1.0;
                slack_col[i] = next_slack;
                next_slack += 1;
            }
            Cmp::Eq => {}
        }
        if rhs[i] < 0.0 {
            for v in a[i].iter_mut() {
                *v = -*v;
            }
            rhs[i] = -rhs[i];
        }
    }

    // A slack with coefficient +1 can start basic; other rows get artificials.
    let mut basis = vec![usize::MAX; m];
    let mut n_art = 0usize;
    for i in 0..m {
        if slack_col[i] != usize::MAX && a[i][slack_col[i]] > 0.5 {
            basis[i] = slack_col[i];
        } else {
            n_art += 1;
        }
    }
    let ncols_total = art_base + n_art;
    let mut next_art = art_base;
    for row in a.iter_mut() {
        row.resize(ncols_total, 0.0);
    }
    for i in 0..m {
        if basis[i] == usize::MAX {
            a[i][next_art] = 1.0;
            basis[i] = next_art;
            next_art += 1;
        }
    }

    let mut t = Tableau { a, rhs, basis, barred: vec![false; ncols_total], pivots: 0 };

    // Phase one: drive the artificial mass to zero.
    if n_art > 0 {
        let mut cost1 = vec![0.0; ncols_total];
        for c in cost1.iter_mut().skip(art_base) {
            *c = 1.0;
        }
        // Canonicalize: basic artificial columns must price out to zero.
        if t.run(&cost1)?.is_some() {
            // A phase-one objective bounded below by zero cannot be unbounded;
            // reaching this means the tableau degenerated numerically.
            return Err(LpError::PivotBudget(PIVOT_BUDGET));
        }
        let infeas: f64 = t
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= art_base)
            .map(|(i, _)| t.rhs[i])
            .sum();
        if infeas > TOL_FEAS {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive leftover artificials out of the basis where a structural or
        // slack pivot exists; rows with none are redundant and stay put.
        for i in 0..m {
            if t.basis[i] >= art_base {
                if let Some(col) = (0..art_base).find(|&c| t.a[i][c].abs() > TOL_PIVOT) {
                    t.pivot(i, col);
                }
            }
        }
        for b in t.barred.iter_mut().skip(art_base) {
            *b = true;
        }
    }

    // Phase two under the real objective.
    let mut cost2 = vec![0.0; ncols_total];
    for j in 0..n {
        cost2[col_pos[j]] = p.objective[j];
        if p.free[j] {
            cost2[col_neg[j]] = -p.objective[j];
        }
    }
    let unbounded_col = t.run(&cost2)?;

    let fold = |cols: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|j| {
                let mut v = cols[col_pos[j]];
                if p.free[j] {
                    v -= cols[col_neg[j]];
                }
                v
            })
            .collect()
    };

    if let Some(col) = unbounded_col {
        let mut dir = vec![0.0; ncols_total];
        dir[col] = 1.0;
        for (i, &b) in t.basis.iter().enumerate() {
            dir[b] = -t.a[i][col];
        }
        return Ok(LpOutcome::Unbounded { ray: fold(&dir) });
    }

    let x = fold(&t.values(ncols_total));
    let value = x.iter().zip(&p.objective).map(|(a, b)| a * b).sum();
    Ok(LpOutcome::Optimal { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn bounded_box_corner() {
        let mut p = LpProblem::minimize(vec![-1.0, -1.0]);
        p.push(LpRow::le(vec![1.0, 1.0], 1.0));
        match solve(&p).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_close(value, -1.0),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn equality_pins_variable() {
        let mut p = LpProblem::minimize(vec![1.0]);
        p.push(LpRow::eq(vec![1.0], 3.0));
        match solve(&p).unwrap() {
            LpOutcome::Optimal { x, value } => {
                assert_close(x[0], 3.0);
                assert_close(value, 3.0);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn detects_infeasible_band() {
        let mut p = LpProblem::minimize(vec![0.0]);
        p.push(LpRow::ge(vec![1.0], 2.0));
        p.push(LpRow::le(vec![1.0], 1.0));
        assert!(matches!(solve(&p).unwrap(), LpOutcome::Infeasible));
    }

    #[test]
    fn free_variable_reaches_negative_optimum() {
        let mut p = LpProblem::minimize_free(vec![1.0]);
        p.push(LpRow::ge(vec![1.0], -5.0));
        match solve(&p).unwrap() {
            LpOutcome::Optimal { x, value } => {
                assert_close(x[0], -5.0);
                assert_close(value, -5.0);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn unbounded_free_descent_reports_ray() {
        let mut p = LpProblem::minimize_free(vec![1.0, 0.0]);
        p.push(LpRow::le(vec![0.0, 1.0], 4.0));
        match solve(&p).unwrap() {
            LpOutcome::Unbounded { ray } => {
                let drop: f64 = ray[0];
                assert!(drop < -1e-9, "ray {ray:?} does not descend");
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn hedging_shape_two_free_vars() {
        // min x  s.t.  x + h*(s1_i - s0) >= payoff_i, binomial s0=2, s1=(4,1)
        let payoff = [2.0, 0.0];
        let mut p = LpProblem::minimize_free(vec![1.0, 0.0]);
        p.push(LpRow::ge(vec![1.0, 2.0], payoff[0]));
        p.push(LpRow::ge(vec![1.0, -1.0], payoff[1]));
        match solve(&p).unwrap() {
            // replicating price (1/3)*2 = 2/3 with h = 2/3
            LpOutcome::Optimal { x, value } => {
                assert_close(value, 2.0 / 3.0);
                assert_close(x[1], 2.0 / 3.0);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn mixed_rows_with_negative_rhs() {
        // min 2a + 3b  s.t.  -a - b <= -4 (i.e. a+b >= 4), a <= 3
        let mut p = LpProblem::minimize(vec![2.0, 3.0]);
        p.push(LpRow::le(vec![-1.0, -1.0], -4.0));
        p.push(LpRow::le(vec![1.0, 0.0], 3.0));
        match solve(&p).unwrap() {
            LpOutcome::Optimal { x, value } => {
                assert_close(value, 2.0 * 3.0 + 3.0 * 1.0);
                assert_close(x[0], 3.0);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn beale_cycle_terminates() {
        // Classic cycling instance for the naive most-negative rule; Bland's
        // rule must terminate at the optimum -1/20.
        let mut p = LpProblem::minimize(vec![-0.75, 150.0, -0.02, 6.0]);
        p.push(LpRow::le(vec![0.25, -60.0, -0.04, 9.0], 0.0));
        p.push(LpRow::le(vec![0.5, -90.0, -0.02, 3.0], 0.0));
        p.push(LpRow::le(vec![0.0, 0.0, 1.0, 0.0], 1.0));
        match solve(&p).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_close(value, -0.05),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn redundant_equality_rows_do_not_block() {
        let mut p = LpProblem::minimize(vec![1.0, 1.0]);
        p.push(LpRow::eq(vec![1.0, 1.0], 1.0));
        p.push(LpRow::eq(vec![2.0, 2.0], 2.0));
        match solve(&p).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_close(value, 1.0),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn ray_respects_row_directions() {
        // min -a with a <= free direction along b: rows must stay satisfied
        // along the reported ray.
        let mut p = LpProblem::minimize(vec![-1.0, 0.0]);
        p.push(LpRow::le(vec![1.0, -1.0], 2.0));
        match solve(&p).unwrap() {
            LpOutcome::Unbounded { ray } => {
                // moving along the ray keeps a - b <= 2 satisfied
                let row_dir = ray[0] - ray[1];
                assert!(row_dir < 1e-9);
                assert!(-ray[0] < -1e-9, "objective must decrease along ray");
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}

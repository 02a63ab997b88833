//! Polytopes of probability weights: the feasible sets scenario weightings
//! are drawn from.
//!
//! A set here is cut out of the probability simplex by optional equality rows,
//! per-atom upper bounds, and a support mask of forced-zero atoms. Vertices
//! are enumerated exactly by brute force over active-constraint subsets, which
//! is viable because every consumer keeps the masked dimension at twelve or
//! below; wider sets skip the cache and answer linear questions through the
//! simplex solver instead. Vertex order is the deterministic enumeration
//! order, and ties in linear maximization resolve to the lowest index, so
//! reports are reproducible run to run.

use std::sync::Arc;

use thiserror::Error;

use crate::lp::{solve, LpOutcome, LpProblem, LpRow};
use crate::measure::{Measure, SampleSpace};

/// Largest masked dimension for which exact vertex enumeration runs.
pub const MAX_ENUM_DIM: usize = 12;

/// Vertices closer than this in the sup norm are considered the same point.
pub const TOL_VERTEX: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PolytopeError {
    #[error("polytopes live on different sample spaces")]
    SpaceMismatch,
    #[error("{what} has length {got}, expected {want}")]
    LengthMismatch { what: &'static str, got: usize, want: usize },
    #[error("upper bound {value} at atom {index} is negative or NaN")]
    BadUpperBound { index: usize, value: f64 },
    #[error("equality row {row} contains a non-finite coefficient")]
    NonFiniteRow { row: usize },
    #[error("masked dimension {dim} exceeds the exact enumeration limit {max}")]
    DimensionTooLarge { dim: usize, max: usize },
}

/// Feasible weight vectors: `q >= 0`, `sum q = 1`, `A q = b`, `q_i <= u_i`,
/// and `q_i = 0` wherever the support mask is off.
#[derive(Clone, Debug)]
pub struct QSetPolytope {
    space: Arc<SampleSpace>,
    eq_rows: Vec<(Vec<f64>, f64)>,
    upper: Vec<f64>,
    support: Vec<bool>,
    /// present whenever the masked dimension admits exact enumeration
    vertices: Option<Vec<Measure>>,
}

impl QSetPolytope {
    pub fn new(
        space: &Arc<SampleSpace>,
        eq_rows: Vec<(Vec<f64>, f64)>,
        upper: Vec<f64>,
        support: Vec<bool>,
    ) -> Result<Self, PolytopeError> {
        let n = space.len();
        if upper.len() != n {
            return Err(PolytopeError::LengthMismatch { what: "upper bounds", got: upper.len(), want: n });
        }
        if support.len() != n {
            return Err(PolytopeError::LengthMismatch { what: "support mask", got: support.len(), want: n });
        }
        for (index, &value) in upper.iter().enumerate() {
            if value.is_nan() || value < 0.0 {
                return Err(PolytopeError::BadUpperBound { index, value });
            }
        }
        for (row, (coeffs, rhs)) in eq_rows.iter().enumerate() {
            if coeffs.len() != n {
                return Err(PolytopeError::LengthMismatch { what: "equality row", got: coeffs.len(), want: n });
            }
            if coeffs.iter().any(|c| !c.is_finite()) || !rhs.is_finite() {
                return Err(PolytopeError::NonFiniteRow { row });
            }
        }
        let mut set = QSetPolytope {
            space: Arc::clone(space),
            eq_rows,
            upper,
            support,
            vertices: None,
        };
        if set.masked_dim() <= MAX_ENUM_DIM {
            set.vertices = Some(set.enumerate_vertices());
        }
        Ok(set)
    }

    /// The whole probability simplex over the space.
    pub fn simplex(space: &Arc<SampleSpace>) -> Self {
        let n = space.len();
        QSetPolytope::new(space, Vec::new(), vec![f64::INFINITY; n], vec![true; n])
            .expect("simplex data is well formed")
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn eq_rows(&self) -> &[(Vec<f64>, f64)] {
        &self.eq_rows
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn support(&self) -> &[bool] {
        &self.support
    }

    /// Number of atoms the support mask leaves in play.
    pub fn masked_dim(&self) -> usize {
        self.support.iter().filter(|&&s| s).count()
    }

    /// Exact vertex list, in deterministic enumeration order.
    pub fn vertices(&self) -> Result<&[Measure], PolytopeError> {
        match &self.vertices {
            Some(v) => Ok(v),
            None => Err(PolytopeError::DimensionTooLarge {
                dim: self.masked_dim(),
                max: MAX_ENUM_DIM,
            }),
        }
    }

    /// Intersect the support mask with `keep` and rebuild the vertex cache.
    /// Applying the same mask twice is a no-op beyond the rebuild.
    pub fn restrict(&self, keep: &[bool]) -> Result<Self, PolytopeError> {
        if keep.len() != self.space.len() {
            return Err(PolytopeError::LengthMismatch {
                what: "restriction mask",
                got: keep.len(),
                want: self.space.len(),
            });
        }
        let support: Vec<bool> =
            self.support.iter().zip(keep).map(|(&a, &b)| a && b).collect();
        QSetPolytope::new(&self.space, self.eq_rows.clone(), self.upper.clone(), support)
    }

    /// Constraint membership at tolerance `tol`.
    pub fn contains(&self, weights: &[f64], tol: f64) -> bool {
        if weights.len() != self.space.len() {
            return false;
        }
        let mut total = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !self.support[i] && w.abs() > tol {
                return false;
            }
            if w < -tol || w > self.upper[i] + tol {
                return false;
            }
            total += w;
        }
        if (total - 1.0).abs() > tol * self.space.len() as f64 {
            return false;
        }
        for (coeffs, rhs) in &self.eq_rows {
            let dot: f64 = coeffs.iter().zip(weights).map(|(c, w)| c * w).sum();
            if (dot - rhs).abs() > tol * (1.0 + rhs.abs()) {
                return false;
            }
        }
        true
    }

    /// Empty feasible region? Uses the cache when present, a feasibility LP
    /// otherwise.
    pub fn is_empty(&self) -> bool {
        match &self.vertices {
            Some(v) => v.is_empty(),
            None => self.solve_linear(&vec![0.0; self.space.len()]).is_none(),
        }
    }

    /// Maximize `sum_i c_i q_i` over the set. `None` when the set is empty.
    /// With a vertex cache the maximizing vertex of lowest index is returned;
    /// otherwise the simplex solver supplies an optimal basic point.
    pub fn linear_sup(&self, c: &[f64]) -> Option<(f64, Measure)> {
        if let Some(verts) = &self.vertices {
            let mut best: Option<(f64, &Measure)> = None;
            for v in verts {
                let val = v.expect(c);
                match best {
                    Some((bv, _)) if val <= bv + 1e-12 => {}
                    _ => best = Some((val, v)),
                }
            }
            return best.map(|(v, m)| (v, m.clone()));
        }
        self.solve_linear(c)
    }

    /// LP route for [`Self::linear_sup`]; maximization via minimizing `-c`.
    fn solve_linear(&self, c: &[f64]) -> Option<(f64, Measure)> {
        let midx: Vec<usize> = (0..self.space.len()).filter(|&i| self.support[i]).collect();
        if midx.is_empty() {
            return None;
        }
        let m = midx.len();
        let mut p = LpProblem::minimize(midx.iter().map(|&i| -c[i]).collect());
        p.push(LpRow::eq(vec![1.0; m], 1.0));
        for (coeffs, rhs) in &self.eq_rows {
            p.push(LpRow::eq(midx.iter().map(|&i| coeffs[i]).collect(), *rhs));
        }
        for (j, &i) in midx.iter().enumerate() {
            if self.upper[i].is_finite() {
                let mut row = vec![0.0; m];
                row[j] = 1.0;
                p.push(LpRow::le(row, self.upper[i]));
            }
        }
        match solve(&p).expect("weight-set LP is well formed") {
            LpOutcome::Optimal { x, value } => {
                let mut weights = vec![0.0; self.space.len()];
                for (j, &i) in midx.iter().enumerate() {
                    weights[i] = x[j].max(0.0);
                }
                let total: f64 = weights.iter().sum();
                weights.iter_mut().for_each(|w| *w /= total);
                let q = Measure::new(&self.space, weights).expect("LP point is a measure");
                Some((-value, q))
            }
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded { .. } => {
                unreachable!("subset of the probability simplex cannot be unbounded")
            }
        }
    }

    fn enumerate_vertices(&self) -> Vec<Measure> {
        let midx: Vec<usize> = (0..self.space.len()).filter(|&i| self.support[i]).collect();
        let m = midx.len();
        if m == 0 {
            return Vec::new();
        }
        let mut eqs: Vec<(Vec<f64>, f64)> = vec![(vec![1.0; m], 1.0)];
        for (coeffs, rhs) in &self.eq_rows {
            eqs.push((midx.iter().map(|&i| coeffs[i]).collect(), *rhs));
        }
        // candidate active rows pin one masked coordinate to a bound
        let mut pins: Vec<(usize, f64)> = Vec::new();
        for (j, &i) in midx.iter().enumerate() {
            pins.push((j, 0.0));
            if self.upper[i].is_finite() {
                pins.push((j, self.upper[i]));
            }
        }
        let rank = row_rank(&eqs, m);
        let k = m.saturating_sub(rank);
        let mut found: Vec<Vec<f64>> = Vec::new();
        let mut combo = Combinations::new(pins.len(), k);
        while let Some(active) = combo.next() {
            let mut sys = eqs.clone();
            for &ci in active {
                let (j, v) = pins[ci];
                let mut row = vec![0.0; m];
                row[j] = 1.0;
                sys.push((row, v));
            }
            let Some(sol) = solve_unique(&sys, m) else { continue };
            if !self.masked_feasible(&sol, &midx) {
                continue;
            }
            if found.iter().any(|f| sup_dist(f, &sol) < TOL_VERTEX) {
                continue;
            }
            found.push(sol);
        }
        found
            .into_iter()
            .map(|sol| {
                let mut weights = vec![0.0; self.space.len()];
                for (j, &i) in midx.iter().enumerate() {
                    weights[i] = sol[j].max(0.0);
                }
                let total: f64 = weights.iter().sum();
                weights.iter_mut().for_each(|w| *w /= total);
                Measure::new(&self.space, weights).expect("feasible vertex is a measure")
            })
            .collect()
    }

    fn masked_feasible(&self, sol: &[f64], midx: &[usize]) -> bool {
        for (j, &i) in midx.iter().enumerate() {
            if sol[j] < -TOL_VERTEX || sol[j] > self.upper[i] + TOL_VERTEX {
                return false;
            }
        }
        true
    }
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Rank of the coefficient rows by elimination with partial pivoting.
fn row_rank(rows: &[(Vec<f64>, f64)], m: usize) -> usize {
    let mut a: Vec<Vec<f64>> = rows.iter().map(|(c, _)| c.clone()).collect();
    let mut rank = 0;
    for col in 0..m {
        let Some(p) = (rank..a.len()).max_by(|&x, &y| {
            a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap()
        }) else {
            break;
        };
        if a[p][col].abs() < 1e-10 {
            continue;
        }
        a.swap(rank, p);
        for r in 0..a.len() {
            if r != rank && a[r][col].abs() > 0.0 {
                let f = a[r][col] / a[rank][col];
                for cc in col..m {
                    a[r][cc] -= f * a[rank][cc];
                }
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

/// Unique solution of a consistent (possibly overdetermined) linear system,
/// or `None` when the system is rank-deficient or inconsistent.
fn solve_unique(rows: &[(Vec<f64>, f64)], m: usize) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = rows
        .iter()
        .map(|(c, b)| {
            let mut r = c.clone();
            r.push(*b);
            r
        })
        .collect();
    let nrows = a.len();
    let mut pivot_of_col = vec![usize::MAX; m];
    let mut row = 0;
    for col in 0..m {
        let p = (row..nrows).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())?;
        if a[p][col].abs() < 1e-10 {
            continue;
        }
        a.swap(row, p);
        let inv = 1.0 / a[row][col];
        for cc in col..=m {
            a[row][cc] *= inv;
        }
        for r in 0..nrows {
            if r != row && a[r][col].abs() > 0.0 {
                let f = a[r][col];
                for cc in col..=m {
                    a[r][cc] -= f * a[row][cc];
                }
            }
        }
        pivot_of_col[col] = row;
        row += 1;
        if row == nrows {
            break;
        }
    }
    if pivot_of_col.iter().any(|&p| p == usize::MAX) {
        return None;
    }
    // remaining rows must have collapsed to 0 = 0
    for r in row..nrows {
        if a[r][..m].iter().all(|c| c.abs() < 1e-8) && a[r][m].abs() > 1e-8 {
            return None;
        }
    }
    Some((0..m).map(|col| a[pivot_of_col[col]][m]).collect())
}

/// Lexicographic k-subsets of `0..n`, yielded without allocation per step.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    fresh: bool,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations { n, idx: (0..k).collect(), fresh: true, done: k > n }
    }

    fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(&self.idx);
        }
        let k = self.idx.len();
        if k == 0 {
            self.done = true;
            return None;
        }
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            if self.idx[i] + (k - i) < self.n {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(&self.idx);
            }
        }
    }
}

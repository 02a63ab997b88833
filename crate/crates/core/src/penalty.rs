//! Penalty functions over scenario weightings and the operations that carve
//! them down to dominated carriers.
//!
//! A penalty assigns every weighting a cost in `(-inf, +inf]`; the engine only
//! ever needs suprema of `E_Q[-X] - alpha(Q)`, so each representation keeps
//! whatever finite certificate set makes that supremum computable: polytope
//! variants carry their vertex cache, tables carry their entries, and
//! one-parameter curves carry a scan grid plus explicitly listed boundary
//! candidates.
//!
//! Curve semantics are deliberately literal. The carrier is the curve over its
//! (possibly half-open) parameter interval together with the boundary entries;
//! no closure is taken. Supremum queries evaluate the continuous formula on
//! the closed interval, which is exact for suprema because a value at an open
//! endpoint enters as a limit, while membership queries at an open endpoint
//! say "outside" unless a boundary entry covers the point. This is what lets
//! a curve whose value jumps at the endpoint model a penalty that fails lower
//! semicontinuity, and such penalties are exactly the ones whose two
//! restriction orders disagree.

use std::sync::Arc;

use thiserror::Error;

use crate::lp::{solve, LpOutcome, LpProblem, LpRow};
use crate::measure::{same_space, total_variation, Measure, SampleSpace, TOL_ZERO};
use crate::polytope::{PolytopeError, QSetPolytope};

/// Weightings closer than this in total variation are identified.
pub const TOL_MATCH: f64 = 1e-9;

/// Parameter resolution of golden-section refinement on curves.
pub const TOL_CURVE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum PenaltyError {
    #[error("penalty and measure live on different sample spaces")]
    SpaceMismatch,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("acceptance set is infeasible")]
    InfeasibleAcceptanceSet,
    #[error("family contains no members")]
    EmptyFamily,
    #[error("curve is malformed: {0}")]
    BadCurve(&'static str),
    #[error("table value at entry {0} is not finite")]
    BadTableValue(usize),
}

/// The parameter-to-weighting map of a curve: either an exact closure or a
/// sampled path evaluated by linear interpolation between grid samples.
#[derive(Clone)]
pub enum CurveMap {
    Exact(Arc<dyn Fn(f64) -> (Vec<f64>, f64) + Send + Sync>),
    Sampled { weights: Vec<Vec<f64>>, alphas: Vec<f64> },
}

impl std::fmt::Debug for CurveMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurveMap::Exact(_) => f.write_str("CurveMap::Exact(..)"),
            CurveMap::Sampled { weights, .. } => {
                write!(f, "CurveMap::Sampled({} samples)", weights.len())
            }
        }
    }
}

/// One-parameter penalty curve with separately carried boundary candidates.
#[derive(Clone, Debug)]
pub struct CurvePenalty {
    space: Arc<SampleSpace>,
    grid: Vec<f64>,
    map: CurveMap,
    lo_open: bool,
    hi_open: bool,
    boundary: Vec<(Measure, f64)>,
    /// grid points admitted after a support restriction; `None` means all
    keep: Option<Vec<bool>>,
}

impl CurvePenalty {
    pub fn new(
        space: &Arc<SampleSpace>,
        grid: Vec<f64>,
        map: CurveMap,
        lo_open: bool,
        hi_open: bool,
        boundary: Vec<(Measure, f64)>,
    ) -> Result<Self, PenaltyError> {
        if grid.len() < 2 {
            return Err(PenaltyError::BadCurve("parameter grid needs at least two points"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PenaltyError::BadCurve("parameter grid must be strictly increasing"));
        }
        if let CurveMap::Sampled { weights, alphas } = &map {
            if weights.len() != grid.len() || alphas.len() != grid.len() {
                return Err(PenaltyError::BadCurve("sample count must match the grid"));
            }
            for w in weights {
                if w.len() != space.len() {
                    return Err(PenaltyError::BadCurve("sample width must match the space"));
                }
            }
        }
        for (q, _) in &boundary {
            if !same_space(q.space(), space) {
                return Err(PenaltyError::SpaceMismatch);
            }
        }
        Ok(CurvePenalty {
            space: Arc::clone(space),
            grid,
            map,
            lo_open,
            hi_open,
            boundary,
            keep: None,
        })
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn boundary(&self) -> &[(Measure, f64)] {
        &self.boundary
    }

    pub fn lo_open(&self) -> bool {
        self.lo_open
    }

    pub fn hi_open(&self) -> bool {
        self.hi_open
    }

    /// Weighting and penalty value of the continuous formula at parameter `t`.
    pub fn at(&self, t: f64) -> (Vec<f64>, f64) {
        match &self.map {
            CurveMap::Exact(f) => f(t),
            CurveMap::Sampled { weights, alphas } => {
                let n = self.grid.len();
                if t <= self.grid[0] {
                    return (weights[0].clone(), alphas[0]);
                }
                if t >= self.grid[n - 1] {
                    return (weights[n - 1].clone(), alphas[n - 1]);
                }
                let j = self.grid.partition_point(|&g| g <= t).min(n - 1);
                let (t0, t1) = (self.grid[j - 1], self.grid[j]);
                let lam = (t - t0) / (t1 - t0);
                let w = weights[j - 1]
                    .iter()
                    .zip(&weights[j])
                    .map(|(a, b)| a + lam * (b - a))
                    .collect();
                (w, alphas[j - 1] + lam * (alphas[j] - alphas[j - 1]))
            }
        }
    }

    fn kept_runs(&self) -> Vec<(usize, usize)> {
        let n = self.grid.len();
        let mut kept: Vec<bool> = match &self.keep {
            Some(k) => k.clone(),
            None => vec![true; n],
        };
        // an open endpoint with no kept neighbor is the limit of nothing
        if self.lo_open && kept[0] && (n < 2 || !kept[1]) {
            kept[0] = false;
        }
        if self.hi_open && kept[n - 1] && (n < 2 || !kept[n - 2]) {
            kept[n - 1] = false;
        }
        let mut runs = Vec::new();
        let mut start = None;
        for (i, &k) in kept.iter().enumerate() {
            match (k, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    runs.push((s, i - 1));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push((s, n - 1));
        }
        runs
    }

    /// Supremum of `q(t).objective - alpha(t)` over the carrier, including
    /// boundary candidates. Grid scan over the admitted runs, then
    /// golden-section refinement around the best bracket; the best evaluated
    /// point is returned, so suprema attained at grid points are exact.
    pub fn sup_objective(&self, objective: &[f64]) -> Option<(f64, Measure)> {
        let g = |t: f64| -> f64 {
            let (w, a) = self.at(t);
            dot(&w, objective) - a
        };
        let mut best: Option<(f64, f64)> = None; // (value, t)
        for (s, e) in self.kept_runs() {
            let mut local: Option<(f64, usize)> = None;
            for i in s..=e {
                let v = g(self.grid[i]);
                if local.map_or(true, |(bv, _)| v > bv + 1e-15) {
                    local = Some((v, i));
                }
                if best.map_or(true, |(bv, _)| v > bv + 1e-15) {
                    best = Some((v, self.grid[i]));
                }
            }
            if let Some((_, bi)) = local {
                let lo = self.grid[bi.max(s + 1) - 1];
                let hi = self.grid[(bi + 1).min(e)];
                if hi > lo {
                    let (tv, tt) = golden_max(g, lo, hi, TOL_CURVE);
                    if best.map_or(true, |(bv, _)| tv > bv + 1e-15) {
                        best = Some((tv, tt));
                    }
                }
            }
        }
        let mut out: Option<(f64, Measure)> = best.map(|(v, t)| {
            let (w, _) = self.at(t);
            (v, sanitize_measure(&self.space, w))
        });
        for (q, a) in &self.boundary {
            let v = q.expect(objective) - a;
            if out.as_ref().map_or(true, |(bv, _)| v > bv + 1e-15) {
                out = Some((v, q.clone()));
            }
        }
        out
    }

    /// Penalty value at `q`: the curve value when `q` sits on an admitted part
    /// of the curve, else the best matching boundary entry, else infinity.
    pub fn evaluate(&self, q: &Measure) -> f64 {
        let mut best = f64::INFINITY;
        for (b, a) in &self.boundary {
            if total_variation(b, q).map_or(false, |d| d < TOL_MATCH) {
                best = best.min(*a);
            }
        }
        let dist = |t: f64| -> f64 {
            let (w, _) = self.at(t);
            0.5 * w.iter().zip(q.weights()).map(|(a, b)| (a - b).abs()).sum::<f64>()
        };
        for (s, e) in self.kept_runs() {
            let mut local: Option<(f64, usize)> = None;
            for i in s..=e {
                let d = dist(self.grid[i]);
                if local.map_or(true, |(bd, _)| d < bd) {
                    local = Some((d, i));
                }
            }
            let Some((mut d, bi)) = local else { continue };
            let mut t = self.grid[bi];
            let lo = self.grid[bi.max(s + 1) - 1];
            let hi = self.grid[(bi + 1).min(e)];
            if hi > lo {
                let (dv, dt) = golden_max(|x| -dist(x), lo, hi, 1e-10);
                if -dv < d {
                    d = -dv;
                    t = dt;
                }
            }
            if d < TOL_MATCH && !self.excluded_endpoint(t) {
                let (_, a) = self.at(t);
                best = best.min(a);
            }
        }
        best
    }

    fn excluded_endpoint(&self, t: f64) -> bool {
        let n = self.grid.len();
        (self.lo_open && (t - self.grid[0]).abs() < 1e-12)
            || (self.hi_open && (t - self.grid[n - 1]).abs() < 1e-12)
    }

    /// Curve with only the parts whose weightings live inside `mask`. `None`
    /// when nothing survives.
    pub fn restrict(&self, mask: &[bool]) -> Option<CurvePenalty> {
        let keep: Vec<bool> = self
            .grid
            .iter()
            .map(|&t| {
                let (w, _) = self.at(t);
                w.iter().enumerate().all(|(i, &v)| mask[i] || v <= TOL_ZERO)
            })
            .collect();
        let keep = match &self.keep {
            Some(old) => old.iter().zip(&keep).map(|(&a, &b)| a && b).collect(),
            None => keep,
        };
        let boundary: Vec<(Measure, f64)> = self
            .boundary
            .iter()
            .filter(|(q, _)| q.support().iter().all(|&i| mask[i]))
            .cloned()
            .collect();
        let mut cut = self.clone();
        cut.boundary = boundary;
        cut.keep = Some(keep);
        if cut.kept_runs().is_empty() && cut.boundary.is_empty() {
            return None;
        }
        Some(cut)
    }

    /// Admitted grid weightings plus boundary entries, used as the finite
    /// certificate list for carrier comparisons.
    pub fn certificates(&self) -> Vec<(Measure, f64)> {
        let mut out = Vec::new();
        for (s, e) in self.kept_runs() {
            for i in s..=e {
                if self.excluded_endpoint(self.grid[i]) {
                    continue;
                }
                let (w, a) = self.at(self.grid[i]);
                out.push((sanitize_measure(&self.space, w), a));
            }
        }
        out.extend(self.boundary.iter().cloned());
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sanitize_measure(space: &Arc<SampleSpace>, mut w: Vec<f64>) -> Measure {
    for v in w.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= total;
    }
    Measure::new(space, w).expect("curve sample is a measure")
}

/// Golden-section maximization on `[lo, hi]`; returns the best point actually
/// evaluated, so maxima attained at the interval ends are exact.
fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut best = (f(a), a);
    for probe in [b, a + (b - a) * 0.5] {
        let v = f(probe);
        if v > best.0 {
            best = (v, probe);
        }
    }
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > best.0 {
            best = (fc, c);
        }
        if fd > best.0 {
            best = (fd, d);
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = f(d);
        }
    }
    best
}

/// A penalty function in one of the four supported representations.
#[derive(Clone, Debug)]
pub enum PenaltySpec {
    /// zero on the polytope, infinite outside
    IndicatorZero(QSetPolytope),
    /// a single finite value on the polytope, infinite outside
    Constant { set: QSetPolytope, value: f64 },
    /// finite list of weightings with individual values
    Table { space: Arc<SampleSpace>, entries: Vec<(Measure, f64)> },
    /// one-parameter curve plus boundary candidates
    Curve1D(CurvePenalty),
}

impl PenaltySpec {
    pub fn table(
        space: &Arc<SampleSpace>,
        entries: Vec<(Measure, f64)>,
    ) -> Result<Self, PenaltyError> {
        for (i, (q, v)) in entries.iter().enumerate() {
            if !same_space(q.space(), space) {
                return Err(PenaltyError::SpaceMismatch);
            }
            if !v.is_finite() {
                return Err(PenaltyError::BadTableValue(i));
            }
        }
        Ok(PenaltySpec::Table { space: Arc::clone(space), entries })
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        match self {
            PenaltySpec::IndicatorZero(set) => set.space(),
            PenaltySpec::Constant { set, .. } => set.space(),
            PenaltySpec::Table { space, .. } => space,
            PenaltySpec::Curve1D(c) => c.space(),
        }
    }

    /// Penalty value at `q`; infinity off the carrier. Table entries closer
    /// than the matching tolerance to `q` compete and the smallest value wins.
    pub fn evaluate(&self, q: &Measure) -> Result<f64, PenaltyError> {
        if !same_space(self.space(), q.space()) {
            return Err(PenaltyError::SpaceMismatch);
        }
        Ok(match self {
            PenaltySpec::IndicatorZero(set) => {
                if set.contains(q.weights(), TOL_MATCH) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            PenaltySpec::Constant { set, value } => {
                if set.contains(q.weights(), TOL_MATCH) {
                    *value
                } else {
                    f64::INFINITY
                }
            }
            PenaltySpec::Table { entries, .. } => entries
                .iter()
                .filter(|(e, _)| {
                    total_variation(e, q).map_or(false, |d| d < TOL_MATCH)
                })
                .map(|(_, v)| *v)
                .fold(f64::INFINITY, f64::min),
            PenaltySpec::Curve1D(c) => c.evaluate(q),
        })
    }

    /// Is the carrier empty?
    pub fn is_empty(&self) -> bool {
        match self {
            PenaltySpec::IndicatorZero(set) | PenaltySpec::Constant { set, .. } => set.is_empty(),
            PenaltySpec::Table { entries, .. } => entries.is_empty(),
            PenaltySpec::Curve1D(c) => c.kept_runs().is_empty() && c.boundary().is_empty(),
        }
    }

    /// Part of the carrier inside the support of `p`, with unchanged values.
    /// Applying the same restriction twice changes nothing, and shrinking the
    /// restricting support never grows the carrier.
    pub fn restrict_to_dominated(&self, p: &Measure) -> Result<RestrictedPenalty, PenaltyError> {
        if !same_space(self.space(), p.space()) {
            return Err(PenaltyError::SpaceMismatch);
        }
        let part = restrict_spec(self, &p.support_mask())?;
        Ok(RestrictedPenalty { parts: vec![part] })
    }

    /// Union of the dominated carriers over the family, values unchanged.
    pub fn family_penalty(&self, family: &[Measure]) -> Result<RestrictedPenalty, PenaltyError> {
        if family.is_empty() {
            return Err(PenaltyError::EmptyFamily);
        }
        let mut parts = Vec::with_capacity(family.len());
        for p in family {
            if !same_space(self.space(), p.space()) {
                return Err(PenaltyError::SpaceMismatch);
            }
            parts.push(restrict_spec(self, &p.support_mask())?);
        }
        Ok(RestrictedPenalty { parts })
    }
}

fn restrict_spec(spec: &PenaltySpec, mask: &[bool]) -> Result<PenaltySpec, PenaltyError> {
    Ok(match spec {
        PenaltySpec::IndicatorZero(set) => PenaltySpec::IndicatorZero(set.restrict(mask)?),
        PenaltySpec::Constant { set, value } => {
            PenaltySpec::Constant { set: set.restrict(mask)?, value: *value }
        }
        PenaltySpec::Table { space, entries } => PenaltySpec::Table {
            space: Arc::clone(space),
            entries: entries
                .iter()
                .filter(|(q, _)| q.support().iter().all(|&i| mask[i]))
                .cloned()
                .collect(),
        },
        PenaltySpec::Curve1D(c) => match c.restrict(mask) {
            Some(cut) => PenaltySpec::Curve1D(cut),
            None => PenaltySpec::Table { space: Arc::clone(c.space()), entries: Vec::new() },
        },
    })
}

/// A penalty restricted to one or more dominated carriers. One part per
/// restricting measure; the value at a weighting is the smallest value any
/// part assigns (parts agree wherever they overlap, since each keeps the base
/// values).
#[derive(Clone, Debug)]
pub struct RestrictedPenalty {
    parts: Vec<PenaltySpec>,
}

impl RestrictedPenalty {
    pub fn parts(&self) -> &[PenaltySpec] {
        &self.parts
    }

    pub fn evaluate(&self, q: &Measure) -> Result<f64, PenaltyError> {
        let mut best = f64::INFINITY;
        for part in &self.parts {
            best = best.min(part.evaluate(q)?);
        }
        Ok(best)
    }

    pub fn is_empty(&self) -> bool {
        self.parts.iter().all(|p| p.is_empty())
    }
}

/// Payoff vectors accepted by a polyhedral criterion: `{X : A X >= b}` row
/// by row.
#[derive(Clone, Debug)]
pub struct AcceptanceSet {
    space: Arc<SampleSpace>,
    rows: Vec<(Vec<f64>, f64)>,
}

impl AcceptanceSet {
    pub fn new(
        space: &Arc<SampleSpace>,
        rows: Vec<(Vec<f64>, f64)>,
    ) -> Result<Self, PenaltyError> {
        for (coeffs, rhs) in &rows {
            if coeffs.len() != space.len() {
                return Err(PenaltyError::BadCurve("acceptance row width must match the space"));
            }
            if coeffs.iter().any(|c| !c.is_finite()) || !rhs.is_finite() {
                return Err(PenaltyError::BadCurve("acceptance row must be finite"));
            }
        }
        Ok(AcceptanceSet { space: Arc::clone(space), rows })
    }

    /// Acceptance of everything at or above the constant level `a`.
    pub fn floor(space: &Arc<SampleSpace>, a: f64) -> Self {
        let n = space.len();
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![0.0; n];
                r[i] = 1.0;
                (r, a)
            })
            .collect();
        AcceptanceSet { space: Arc::clone(space), rows }
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn rows(&self) -> &[(Vec<f64>, f64)] {
        &self.rows
    }
}

/// Largest expected shortfall the acceptance set tolerates under `q`:
/// `sup { E_q[-X] : X in C }` by linear programming over free payoffs.
/// Infinite when the supremum is unbounded; an empty acceptance set is an
/// error.
pub fn alpha_min_polyhedral(c: &AcceptanceSet, q: &Measure) -> Result<f64, PenaltyError> {
    if !same_space(&c.space, q.space()) {
        return Err(PenaltyError::SpaceMismatch);
    }
    let mut lp = LpProblem::minimize_free(q.weights().to_vec());
    for (coeffs, rhs) in &c.rows {
        lp.push(LpRow::ge(coeffs.clone(), *rhs));
    }
    match solve(&lp).expect("acceptance LP is well formed") {
        LpOutcome::Optimal { value, .. } => Ok(-value),
        LpOutcome::Unbounded { .. } => Ok(f64::INFINITY),
        LpOutcome::Infeasible => Err(PenaltyError::InfeasibleAcceptanceSet),
    }
}

/// Does the union of dominated carriers over the family equal the carrier
/// dominated by `p`? Finite certificate comparison: every family-part
/// certificate must lie in the `p`-carrier, every `p`-carrier certificate
/// must be dominated by some member, and for polytope variants the maximal
/// support pattern of the `p`-carrier must fit inside a single member
/// (otherwise the relative interior is uncovered even when all vertices are).
/// On failure the witness is a weighting in the symmetric difference.
pub fn condition_ii_check(
    alpha: &PenaltySpec,
    family: &[Measure],
    p: &Measure,
) -> Result<(bool, Option<Measure>), PenaltyError> {
    let union = alpha.family_penalty(family)?;
    let restricted = alpha.restrict_to_dominated(p)?;
    let ref_part = &restricted.parts()[0];
    let ref_certs = certificates(ref_part)?;

    // family-side certificates must all live in the p-dominated carrier
    for part in union.parts() {
        for (q, _) in certificates(part)? {
            if ref_part.evaluate(&q)?.is_infinite() {
                return Ok((false, Some(q)));
            }
        }
    }
    // each p-carrier certificate needs a dominating member
    for (q, _) in &ref_certs {
        let covered = family
            .iter()
            .any(|m| q.support().iter().all(|&i| m.charges(i)));
        if !covered {
            return Ok((false, Some(q.clone())));
        }
    }
    // polytope carriers: the relative interior realizes the union of the
    // vertex supports, so a single member must dominate that whole pattern
    if matches!(alpha, PenaltySpec::IndicatorZero(_) | PenaltySpec::Constant { .. })
        && !ref_certs.is_empty()
    {
        let n = p.space().len();
        let mut bary = vec![0.0; n];
        for (q, _) in &ref_certs {
            for (b, w) in bary.iter_mut().zip(q.weights()) {
                *b += w / ref_certs.len() as f64;
            }
        }
        let bary = Measure::new(p.space(), bary).expect("certificate average is a measure");
        let covered = family
            .iter()
            .any(|m| bary.support().iter().all(|&i| m.charges(i)));
        if !covered {
            return Ok((false, Some(bary)));
        }
    }
    Ok((true, None))
}

/// Finite certificate list of one part: vertices, entries, or curve points.
fn certificates(part: &PenaltySpec) -> Result<Vec<(Measure, f64)>, PenaltyError> {
    Ok(match part {
        PenaltySpec::IndicatorZero(set) => {
            set.vertices()?.iter().map(|v| (v.clone(), 0.0)).collect()
        }
        PenaltySpec::Constant { set, value } => {
            set.vertices()?.iter().map(|v| (v.clone(), *value)).collect()
        }
        PenaltySpec::Table { entries, .. } => entries.clone(),
        PenaltySpec::Curve1D(c) => c.certificates(),
    })
}

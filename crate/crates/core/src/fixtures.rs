//! Worked instances with closed-form answers, shared by the acceptance
//! suite and the command-line reproduction registry.
//!
//! Everything here is deterministic and cheap to rebuild; the constructors
//! return owned values so callers can mutate their copies freely.

use std::sync::Arc;

use crate::market::{es_qset, OnePeriodMarket};
use crate::measure::{Measure, SampleSpace};
use crate::mixture::{GeneratorKind, ParametricFamily};
use crate::penalty::{CurveMap, CurvePenalty, PenaltySpec};
use crate::risk::Claim;

/// Three-scenario space for the one-period market examples.
pub fn trinomial_space() -> Arc<SampleSpace> {
    SampleSpace::indexed(3)
}

/// One risky asset at 2 today moving to 4, 3, or 1, with the uniform
/// real-world weighting. The call struck at 2 prices to 2/3 with hedge
/// ratio 2/3.
pub fn trinomial_market() -> (Arc<SampleSpace>, OnePeriodMarket, Measure) {
    let space = trinomial_space();
    let market =
        OnePeriodMarket::new(&space, 2.0, vec![4.0, 3.0, 1.0]).expect("prices are finite");
    let p = Measure::uniform(&space);
    (space, market, p)
}

pub fn trinomial_call(space: &Arc<SampleSpace>) -> Claim {
    Claim::new(space, vec![2.0, 1.0, 0.0]).expect("finite payoff")
}

/// Tail-average carrier at level 2/3 on the uniform trinomial weighting:
/// caps 1/2 per atom, so the extreme weightings split evenly over pairs.
pub fn trinomial_tail_penalty() -> (Arc<SampleSpace>, PenaltySpec, Measure) {
    let space = trinomial_space();
    let p = Measure::uniform(&space);
    let set = es_qset(&p, 2.0 / 3.0).expect("level inside (0,1]");
    (space, PenaltySpec::IndicatorZero(set), p)
}

/// Quadratic penalty curve whose infimum point is excluded from the
/// parameter range but present as a separately carried boundary weighting
/// at value 0. Restricted to the boundary weighting's support the penalty
/// keeps only that point, while every version must still pay the full
/// curve: at the zero claim the restricted value is 0 and the version
/// value is 1, an order-swap gap of exactly 1.
pub fn quadratic_curve_instance() -> (Arc<SampleSpace>, PenaltySpec, Measure) {
    let space = trinomial_space();
    let grid: Vec<f64> = (0..=256).map(|i| 0.5 * i as f64 / 256.0).collect();
    let map = CurveMap::Exact(Arc::new(|t: f64| {
        (vec![(1.0 - 2.0 * t) / 3.0, t, (2.0 + 2.0 * t) / 3.0 - t], t * t / 2.0 - 1.0)
    }));
    let boundary =
        vec![(Measure::new(&space, vec![1.0 / 3.0, 0.0, 2.0 / 3.0]).expect("weights"), 0.0)];
    let curve = CurvePenalty::new(&space, grid, map, true, false, boundary)
        .expect("grid is increasing");
    let p = Measure::new(&space, vec![1.0 / 3.0, 0.0, 2.0 / 3.0]).expect("weights");
    (space, PenaltySpec::Curve1D(curve), p)
}

/// Two-atom penalty dropping to -1 along the open segment toward the
/// second atom while the first point mass keeps value 0: under the point
/// mass at the first atom the restricted value of the payoff (k, 0) is -k
/// and the version value is 1 - k, a unit gap for every k.
pub fn unit_gap_instance() -> (Arc<SampleSpace>, PenaltySpec, Measure) {
    let space = SampleSpace::indexed(2);
    let grid: Vec<f64> = (0..=128).map(|i| i as f64 / 128.0).collect();
    let map = CurveMap::Exact(Arc::new(|t: f64| (vec![1.0 - t, t], -1.0)));
    let boundary = vec![(Measure::dirac(&space, 0), 0.0)];
    let curve = CurvePenalty::new(&space, grid, map, true, false, boundary)
        .expect("grid is increasing");
    let p = Measure::dirac(&space, 0);
    (space, PenaltySpec::Curve1D(curve), p)
}

/// `2n` half-open blocks of width `1/(2n)`, each component a point mass on
/// one cell, with the uniform prior; the mixture is the uniform weighting
/// on the cell grid. Every component is dominated yet, at tail level
/// `1/n`, no single component's carrier is feasible.
pub fn block_family(n: usize) -> (Arc<SampleSpace>, ParametricFamily, Vec<f64>) {
    let cells = 2 * n;
    let space = SampleSpace::unit_grid(cells);
    let gamma = 1.0 / n as f64;
    let grid: Vec<f64> = (0..cells).map(|k| k as f64 / cells as f64).collect();
    let family = ParametricFamily::new("blocks", GeneratorKind::BlockUniform { gamma }, grid, &space)
        .expect("blocks fit the unit interval");
    let prior = vec![1.0 / cells as f64; cells];
    (space, family, prior)
}

/// Loss of 1 on the first fifth of the grid: at level 1/10 both the
/// quantile bound and the tail average equal 1.
pub fn block_claim(space: &Arc<SampleSpace>) -> Claim {
    let n = space.len();
    let payoff = (0..n).map(|i| if i * 5 < n { -1.0 } else { 0.0 }).collect();
    Claim::new(space, payoff).expect("finite payoff")
}

/// Ramp components over midpoint parameters with the uniform prior; the
/// mixture mass below a cut c follows c(1 - ln c).
pub fn ramp_family(cells: usize, m: usize) -> (Arc<SampleSpace>, ParametricFamily, Vec<f64>) {
    let space = SampleSpace::unit_grid(cells);
    let grid: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) / m as f64).collect();
    let family = ParametricFamily::new("ramps", GeneratorKind::Ramp, grid, &space)
        .expect("midpoints lie inside (0, 1]");
    let prior = vec![1.0 / m as f64; m];
    (space, family, prior)
}

/// Nine ramps carrying all the prior mass plus one point mass on the last
/// cell at prior zero. The mixture never charges that cell, so exactly the
/// point-mass index escapes domination, with zero prior mass.
pub fn hybrid_family() -> (Arc<SampleSpace>, ParametricFamily, Vec<f64>) {
    let space = SampleSpace::unit_grid(10);
    let mut grid: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let ramps = ParametricFamily::new("ramps", GeneratorKind::Ramp, grid.clone(), &space)
        .expect("ramp parameters");
    let mut components: Vec<Measure> = (0..9).map(|k| ramps.component(k)).collect();
    components.push(Measure::dirac(&space, 9));
    grid.push(0.95);
    let family = ParametricFamily::from_components("ramps+tail", grid, components)
        .expect("grid stays increasing");
    let mut prior = vec![1.0 / 9.0; 9];
    prior.push(0.0);
    (space, family, prior)
}

/// Dyadic blocks over `levels` scales with the halving prior,
/// renormalized to the finite grid. The reciprocal claim stays bounded on
/// every component while its bound over the mixture's support doubles
/// with each added level.
pub fn dyadic_family(levels: u32) -> (Arc<SampleSpace>, ParametricFamily, Vec<f64>) {
    let cells = 1usize << levels;
    let space = SampleSpace::unit_grid(cells);
    let grid: Vec<f64> = (0..levels).map(|j| j as f64).collect();
    let family = ParametricFamily::new("dyadic", GeneratorKind::Dyadic, grid, &space)
        .expect("levels divide the grid");
    let mut prior: Vec<f64> = (0..levels).map(|j| (0.5f64).powi(j as i32 + 1)).collect();
    let total: f64 = prior.iter().sum();
    for v in prior.iter_mut() {
        *v /= total;
    }
    (space, family, prior)
}

/// Cell suprema of `1/omega`: `cells/i` on cell `i`, unbounded on the
/// origin cell that no dyadic block charges.
pub fn reciprocal_payoff(space: &Arc<SampleSpace>) -> Vec<f64> {
    let n = space.len();
    (0..n)
        .map(|i| if i == 0 { f64::INFINITY } else { n as f64 / i as f64 })
        .collect()
}

//! One-period market models and the classical risk functionals used as
//! independent oracles: superhedging with explicit hedge extraction,
//! expected shortfall in both its dual-set and sorted-tail forms, the
//! quantile level functional, and the worst-case functional.
//!
//! Superhedging is priced twice on purpose. The dual route maximizes the
//! claim's expectation over the polytope of absolutely continuous martingale
//! weightings; the primal route solves for the cheapest capital-and-position
//! pair dominating the claim pathwise on the reference support. The two
//! optima coincide by linear programming duality, and tests hold them to
//! 1e-8 of each other, so each one guards the other's implementation.

use std::sync::Arc;

use thiserror::Error;

use crate::lp::{solve, LpError, LpOutcome, LpProblem, LpRow};
use crate::measure::{same_space, Measure, SampleSpace, TOL_ZERO};
use crate::polytope::{PolytopeError, QSetPolytope};
use crate::risk::{Claim, RiskValue};

#[derive(Debug, Error)]
pub enum MarketError {
    #[error("market and measure live on different sample spaces")]
    SpaceMismatch,
    #[error("price vector must be finite and match the space")]
    BadPrices,
    #[error("no martingale weighting is dominated by the reference; the market admits arbitrage")]
    ArbitrageDetected,
    #[error("tail level must lie in (0, 1], got {0}")]
    BadTailLevel(f64),
    #[error("quantile level must lie in (0, 1), got {0}")]
    BadQuantileLevel(f64),
    #[error("claim has a non-finite payoff on charged atom {0}")]
    ClaimNotEvaluable(usize),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Single risky asset over one period: today's price and one terminal price
/// per scenario.
#[derive(Clone, Debug)]
pub struct OnePeriodMarket {
    space: Arc<SampleSpace>,
    s0: f64,
    s1: Vec<f64>,
}

impl OnePeriodMarket {
    pub fn new(space: &Arc<SampleSpace>, s0: f64, s1: Vec<f64>) -> Result<Self, MarketError> {
        if !s0.is_finite() || s1.len() != space.len() || s1.iter().any(|v| !v.is_finite()) {
            return Err(MarketError::BadPrices);
        }
        Ok(OnePeriodMarket { space: Arc::clone(space), s0, s1 })
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn s1(&self) -> &[f64] {
        &self.s1
    }
}

/// Martingale weightings dominated by `reference`:
/// `{q >= 0, sum q = 1, q . S1 = S0, supp(q) inside supp(reference)}`.
pub fn martingale_qset(
    market: &OnePeriodMarket,
    reference: &Measure,
) -> Result<QSetPolytope, MarketError> {
    if !same_space(&market.space, reference.space()) {
        return Err(MarketError::SpaceMismatch);
    }
    Ok(QSetPolytope::new(
        &market.space,
        vec![(market.s1.clone(), market.s0)],
        vec![f64::INFINITY; market.space.len()],
        reference.support_mask(),
    )?)
}

/// Capital and position whose terminal wealth dominates the claim pathwise.
#[derive(Clone, Copy, Debug)]
pub struct HedgePlan {
    pub x: f64,
    pub h: f64,
}

/// Cheapest pathwise dominance of the claim on the reference support, with
/// the dual price and the primal hedge. The price carries the attaining
/// martingale weighting.
pub fn superhedge_price(
    market: &OnePeriodMarket,
    reference: &Measure,
    claim: &Claim,
) -> Result<(RiskValue, HedgePlan), MarketError> {
    if !same_space(claim.space(), &market.space) {
        return Err(MarketError::SpaceMismatch);
    }
    let qset = martingale_qset(market, reference)?;
    let support = reference.support();
    for &i in &support {
        if !claim.payoff()[i].is_finite() {
            return Err(MarketError::ClaimNotEvaluable(i));
        }
    }
    let mut payoff = vec![0.0; market.space.len()];
    for &i in &support {
        payoff[i] = claim.payoff()[i];
    }
    let Some((dual, q)) = qset.linear_sup(&payoff) else {
        return Err(MarketError::ArbitrageDetected);
    };
    // primal: min x over (x, h) with x + h (S1_i - S0) >= X_i on the support
    let mut lp = LpProblem::minimize_free(vec![1.0, 0.0]);
    for &i in &support {
        lp.push(LpRow::ge(vec![1.0, market.s1[i] - market.s0], payoff[i]));
    }
    let hedge = match solve(&lp)? {
        LpOutcome::Optimal { x, .. } => HedgePlan { x: x[0], h: x[1] },
        // a nonempty martingale polytope bounds the primal below and the
        // rows are always satisfiable with large capital
        _ => unreachable!("superhedging primal is feasible and bounded"),
    };
    Ok((RiskValue { value: dual, argmax: Some(q), version: None, descent: false }, hedge))
}

/// Weightings whose density against `reference` is capped at the reciprocal
/// tail level: `{0 <= q_i <= reference_i / lambda, sum = 1}`.
pub fn es_qset(reference: &Measure, lambda: f64) -> Result<QSetPolytope, MarketError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(MarketError::BadTailLevel(lambda));
    }
    let upper: Vec<f64> = reference.weights().iter().map(|w| w / lambda).collect();
    Ok(QSetPolytope::new(
        reference.space(),
        Vec::new(),
        upper,
        reference.support_mask(),
    )?)
}

/// Average of the worst `lambda`-tail of losses under `reference`, with the
/// boundary atom split fractionally. Classical sorted-tail form, used as the
/// independent oracle for the dual-set form.
pub fn es_sort_oracle(
    claim: &Claim,
    reference: &Measure,
    lambda: f64,
) -> Result<f64, MarketError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(MarketError::BadTailLevel(lambda));
    }
    if !same_space(claim.space(), reference.space()) {
        return Err(MarketError::SpaceMismatch);
    }
    let mut atoms: Vec<(f64, f64)> = Vec::new(); // (loss, mass)
    for &i in reference.support().iter() {
        let x = claim.payoff()[i];
        if !x.is_finite() {
            return Err(MarketError::ClaimNotEvaluable(i));
        }
        atoms.push((-x, reference.weight(i)));
    }
    atoms.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite losses"));
    let mut remaining = lambda;
    let mut acc = 0.0;
    for (loss, mass) in atoms {
        if remaining <= 0.0 {
            break;
        }
        let take = mass.min(remaining);
        acc += loss * take;
        remaining -= take;
    }
    Ok(acc / lambda)
}

/// `inf { m : reference(X + m < 0) < gamma }`, scanned exactly over the
/// finitely many candidate levels `-X_i` on the support.
pub fn var_oracle(claim: &Claim, reference: &Measure, gamma: f64) -> Result<f64, MarketError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(MarketError::BadQuantileLevel(gamma));
    }
    if !same_space(claim.space(), reference.space()) {
        return Err(MarketError::SpaceMismatch);
    }
    let support = reference.support();
    let mut candidates: Vec<f64> = Vec::new();
    for &i in &support {
        let x = claim.payoff()[i];
        if !x.is_finite() {
            return Err(MarketError::ClaimNotEvaluable(i));
        }
        candidates.push(-x);
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("finite levels"));
    candidates.dedup_by(|a, b| (*a - *b).abs() <= TOL_ZERO);
    for m in candidates {
        // mass strictly below the level -m
        let mass: f64 = support
            .iter()
            .filter(|&&i| claim.payoff()[i] < -m - TOL_ZERO)
            .map(|&i| reference.weight(i))
            .sum();
        if mass < gamma {
            return Ok(m);
        }
    }
    unreachable!("the largest candidate level empties the event")
}

/// `-min X + a` over the reference support.
pub fn worst_case_rho(claim: &Claim, reference: &Measure, a: f64) -> Result<f64, MarketError> {
    if !same_space(claim.space(), reference.space()) {
        return Err(MarketError::SpaceMismatch);
    }
    let mut min = f64::INFINITY;
    for &i in reference.support().iter() {
        let x = claim.payoff()[i];
        if !x.is_finite() {
            return Err(MarketError::ClaimNotEvaluable(i));
        }
        min = min.min(x);
    }
    Ok(-min + a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penalty::PenaltySpec;
    use crate::risk::{rho_dual, rho_hat};

    fn trinomial() -> (Arc<SampleSpace>, OnePeriodMarket) {
        let s = SampleSpace::indexed(3);
        let m = OnePeriodMarket::new(&s, 2.0, vec![4.0, 3.0, 1.0]).unwrap();
        (s, m)
    }

    #[test]
    fn trinomial_martingale_vertices() {
        let (s, m) = trinomial();
        let qset = martingale_qset(&m, &Measure::uniform(&s)).unwrap();
        let verts = qset.vertices().unwrap();
        assert_eq!(verts.len(), 2);
        let has = |w: &[f64]| {
            verts.iter().any(|v| {
                v.weights().iter().zip(w).all(|(a, b)| (a - b).abs() < 1e-9)
            })
        };
        assert!(has(&[0.0, 0.5, 0.5]));
        assert!(has(&[1.0 / 3.0, 0.0, 2.0 / 3.0]));
    }

    #[test]
    fn binomial_martingale_point() {
        let s = SampleSpace::indexed(2);
        let m = OnePeriodMarket::new(&s, 2.0, vec![4.0, 1.0]).unwrap();
        let qset = martingale_qset(&m, &Measure::uniform(&s)).unwrap();
        let verts = qset.vertices().unwrap();
        assert_eq!(verts.len(), 1);
        assert!((verts[0].weight(0) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn flat_asset_spans_the_support_simplex() {
        let s = SampleSpace::indexed(3);
        let m = OnePeriodMarket::new(&s, 2.0, vec![2.0, 2.0, 2.0]).unwrap();
        let p = Measure::new(&s, vec![0.5, 0.0, 0.5]).unwrap();
        let qset = martingale_qset(&m, &p).unwrap();
        assert_eq!(qset.vertices().unwrap().len(), 2);
    }

    #[test]
    fn call_price_and_hedge() {
        let (s, m) = trinomial();
        let x = Claim::new(&s, vec![2.0, 1.0, 0.0]).unwrap();
        let (price, hedge) = superhedge_price(&m, &Measure::uniform(&s), &x).unwrap();
        assert!((price.value - 2.0 / 3.0).abs() < 1e-9);
        let q = price.argmax.unwrap();
        assert!((q.weight(0) - 1.0 / 3.0).abs() < 1e-9);
        assert!((hedge.x - 2.0 / 3.0).abs() < 1e-9);
        assert!((hedge.h - 2.0 / 3.0).abs() < 1e-9);
        // pathwise dominance
        for i in 0..3 {
            assert!(hedge.x + hedge.h * (m.s1()[i] - m.s0()) >= x.payoff()[i] - 1e-9);
        }
    }

    #[test]
    fn replicable_claim_prices_at_its_capital() {
        let (s, m) = trinomial();
        let x = Claim::new(&s, m.s1().iter().map(|v| v - 2.0).collect()).unwrap();
        let (price, hedge) = superhedge_price(&m, &Measure::uniform(&s), &x).unwrap();
        assert!(price.value.abs() < 1e-9);
        assert!(hedge.x.abs() < 1e-9);
        assert!((hedge.h - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_claim_needs_no_position() {
        let (s, m) = trinomial();
        let x = Claim::new(&s, vec![0.7; 3]).unwrap();
        let (price, hedge) = superhedge_price(&m, &Measure::uniform(&s), &x).unwrap();
        assert!((price.value - 0.7).abs() < 1e-9);
        assert!(hedge.h.abs() < 1e-9);
    }

    #[test]
    fn arbitrage_is_detected_on_an_impossible_support() {
        let (s, m) = trinomial();
        // only the top scenario charged: no weighting prices S0 = 2 there
        let p = Measure::dirac(&s, 0);
        let x = Claim::new(&s, vec![1.0; 3]).unwrap();
        assert!(matches!(
            superhedge_price(&m, &p, &x),
            Err(MarketError::ArbitrageDetected)
        ));
    }

    #[test]
    fn tail_set_bounds_and_degenerate_level() {
        let s = SampleSpace::indexed(3);
        let p = Measure::uniform(&s);
        let qset = es_qset(&p, 2.0 / 3.0).unwrap();
        for &u in qset.upper() {
            assert!((u - 0.5).abs() < 1e-12);
        }
        // level one collapses the set to the reference itself
        let tight = es_qset(&p, 1.0).unwrap();
        let verts = tight.vertices().unwrap();
        assert_eq!(verts.len(), 1);
        assert!((verts[0].weight(1) - 1.0 / 3.0).abs() < 1e-9);
        assert!(matches!(es_qset(&p, 0.0), Err(MarketError::BadTailLevel(_))));
    }

    #[test]
    fn small_level_admits_point_masses() {
        let s = SampleSpace::indexed(4);
        let p = Measure::uniform(&s);
        let qset = es_qset(&p, 0.2).unwrap();
        assert!(qset.contains(&[1.0, 0.0, 0.0, 0.0], 1e-9));
    }

    #[test]
    fn sorted_tail_matches_the_dual_set() {
        let s = SampleSpace::indexed(3);
        let p = Measure::uniform(&s);
        let x = Claim::new(&s, vec![1.0, 2.0, 4.0]).unwrap();
        let lambda = 2.0 / 3.0;
        let sorted = es_sort_oracle(&x, &p, lambda).unwrap();
        assert!((sorted + 1.5).abs() < 1e-12);
        let alpha = PenaltySpec::IndicatorZero(es_qset(&p, lambda).unwrap());
        let dual = rho_dual(&x, &alpha).unwrap();
        assert!((sorted - dual.value).abs() < 1e-9);
    }

    #[test]
    fn constant_claim_tail_is_cash() {
        let s = SampleSpace::indexed(5);
        let p = Measure::uniform(&s);
        let x = Claim::new(&s, vec![0.3; 5]).unwrap();
        assert!((es_sort_oracle(&x, &p, 0.4).unwrap() + 0.3).abs() < 1e-12);
    }

    #[test]
    fn smallest_level_takes_the_single_worst_loss() {
        let s = SampleSpace::indexed(4);
        let p = Measure::uniform(&s);
        let x = Claim::new(&s, vec![3.0, -2.0, 0.5, 1.0]).unwrap();
        assert!((es_sort_oracle(&x, &p, 0.25).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_level_on_the_block_indicator() {
        // twenty cells, the first four carry a unit loss: mass 0.2 of losses
        let s = SampleSpace::unit_grid(20);
        let p = Measure::uniform(&s);
        let mut x = vec![0.0; 20];
        for v in x.iter_mut().take(4) {
            *v = -1.0;
        }
        let claim = Claim::new(&s, x).unwrap();
        let v = var_oracle(&claim, &p, 0.1).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        // the matching tail average at the same level is also one
        assert!((es_sort_oracle(&claim, &p, 0.1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonnegative_claims_have_nonpositive_level() {
        let s = SampleSpace::indexed(3);
        let p = Measure::uniform(&s);
        let x = Claim::new(&s, vec![0.0, 1.0, 2.0]).unwrap();
        assert!(var_oracle(&x, &p, 0.25).unwrap() <= 0.0);
    }

    #[test]
    fn loose_level_drops_below_every_loss() {
        let s = SampleSpace::indexed(2);
        let p = Measure::uniform(&s);
        let x = Claim::new(&s, vec![0.0, 1.0]).unwrap();
        // both scenarios together carry mass 1, but each alone carries 0.5
        let v = var_oracle(&x, &p, 0.6).unwrap();
        assert!((v + 1.0).abs() < 1e-12);
    }

    #[test]
    fn worst_case_agrees_with_the_constant_penalty() {
        let s = SampleSpace::indexed(3);
        let x = Claim::new(&s, vec![3.0, 1.0, 2.0]).unwrap();
        let full = Measure::uniform(&s);
        assert!((worst_case_rho(&x, &full, 0.0).unwrap() + 1.0).abs() < 1e-12);
        let zero = Claim::new(&s, vec![0.0; 3]).unwrap();
        assert!((worst_case_rho(&zero, &full, 1.0).unwrap() - 1.0).abs() < 1e-12);
        // a null atom holding the minimum is invisible
        let p = Measure::new(&s, vec![0.5, 0.0, 0.5]).unwrap();
        assert!((worst_case_rho(&x, &p, 0.0).unwrap() + 2.0).abs() < 1e-12);
        for (a, reference) in [(0.0, &full), (0.25, &p)] {
            let alpha = PenaltySpec::Constant {
                set: crate::polytope::QSetPolytope::simplex(&s),
                value: -a,
            };
            let via_penalty = rho_hat(&x, &alpha, reference).unwrap();
            let direct = worst_case_rho(&x, reference, a).unwrap();
            assert!((via_penalty.value - direct).abs() < 1e-9);
        }
    }
}

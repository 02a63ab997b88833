//! Parametric measure families on a grid, priors over the parameter, and
//! the diagnostics that decide when a Bayesian mixture dominates its own
//! family.
//!
//! The parameter set is always a finite grid; the continuum statements the
//! generators come from are exercised through their grid-exact conclusions.
//! Components are produced on demand so a family can be wide (thousands of
//! parameters on a ten-thousand-cell grid) without ever materializing the
//! full component matrix; the cached list is available only under an
//! explicit size budget.
//!
//! Built-in generators, all on the unit-interval cell grid:
//! `ramp` spreads density `1/theta` over `[0, theta]`; `block_uniform`
//! concentrates density `2/gamma` on `[theta, theta + gamma/2]`; `dyadic`
//! puts the uniform weighting on the dyadic block `[2^-(j+1), 2^-j)`;
//! `dirac` is the point mass on the cell containing `theta`.

use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::measure::{
    generalized_equivalence, halmos_savage_equivalent, same_space, total_variation, Measure,
    MeasureError, SampleSpace, TOL_ZERO,
};
use crate::penalty::PenaltySpec;
use crate::risk::{rho_hat, rho_version_inf, Claim, RiskError};

/// Adjacent components further apart than this in total variation are
/// flagged as discontinuity candidates; point-mass jumps sit at 1, smooth
/// families at the grid step scale.
pub const TV_JUMP: f64 = 0.5;

/// Cached component lists are refused beyond this many grid cells in total.
pub const COMPONENT_BUDGET: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum MixtureError {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("parameter {theta} at grid index {index} is outside the generator's domain")]
    DomainViolation { index: usize, theta: f64 },
    #[error("parameter grid must be strictly increasing and nonempty")]
    BadGrid,
    #[error("prior must have one finite nonnegative weight per grid point")]
    BadPrior,
    #[error("prior weights sum to {0}, expected 1")]
    PriorNotNormalized(f64),
    #[error("family and measure live on different sample spaces")]
    SpaceMismatch,
    #[error("component list of {0} total cells exceeds the materialization budget")]
    ComponentBudget(usize),
    #[error("the dominated sub-family cannot reach the mixture: {0}")]
    HalmosSavageFailure(#[source] MeasureError),
    #[error(transparent)]
    Risk(#[from] RiskError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// How a parameter value turns into a measure on the cell grid. `Explicit`
/// marks a family built from a literal component list rather than a rule.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorKind {
    Ramp,
    BlockUniform { gamma: f64 },
    Dyadic,
    Dirac,
    Explicit,
}

impl GeneratorKind {
    pub fn parse(name: &str, gamma: Option<f64>) -> Result<Self, MixtureError> {
        match name {
            "ramp" => Ok(GeneratorKind::Ramp),
            "block_uniform" => {
                let gamma = gamma.filter(|g| g.is_finite() && *g > 0.0 && *g <= 1.0);
                gamma.map(|gamma| GeneratorKind::BlockUniform { gamma }).ok_or_else(|| {
                    MixtureError::UnknownGenerator("block_uniform without a valid gamma".into())
                })
            }
            "dyadic" => Ok(GeneratorKind::Dyadic),
            "dirac" => Ok(GeneratorKind::Dirac),
            other => Err(MixtureError::UnknownGenerator(other.to_string())),
        }
    }
}

/// A named family `theta -> P^theta` over a strictly increasing grid.
#[derive(Clone, Debug)]
pub struct ParametricFamily {
    name: String,
    space: Arc<SampleSpace>,
    theta_grid: Vec<f64>,
    generator: GeneratorKind,
    cache: OnceLock<Vec<Measure>>,
}

impl ParametricFamily {
    pub fn new(
        name: impl Into<String>,
        generator: GeneratorKind,
        theta_grid: Vec<f64>,
        space: &Arc<SampleSpace>,
    ) -> Result<Self, MixtureError> {
        if theta_grid.is_empty() || theta_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MixtureError::BadGrid);
        }
        let n = space.len();
        for (index, &theta) in theta_grid.iter().enumerate() {
            let ok = match generator {
                GeneratorKind::Ramp => theta > 0.0 && theta <= 1.0,
                GeneratorKind::BlockUniform { gamma } => {
                    theta >= 0.0 && theta + gamma / 2.0 <= 1.0 + 1e-12
                }
                GeneratorKind::Dyadic => {
                    let j = theta.round();
                    (theta - j).abs() < 1e-12
                        && j >= 0.0
                        && (n % (1usize << (j as usize + 1)) == 0)
                        && (1usize << (j as usize + 1)) < 2 * n
                }
                GeneratorKind::Dirac => (0.0..=1.0).contains(&theta),
                // literal families come through `from_components`
                GeneratorKind::Explicit => false,
            };
            if !ok {
                return Err(MixtureError::DomainViolation { index, theta });
            }
        }
        Ok(ParametricFamily {
            name: name.into(),
            space: Arc::clone(space),
            theta_grid,
            generator,
            cache: OnceLock::new(),
        })
    }

    /// Family given by a literal component list, one measure per grid
    /// point. The grid still indexes and orders the family but carries no
    /// generating rule.
    pub fn from_components(
        name: impl Into<String>,
        theta_grid: Vec<f64>,
        components: Vec<Measure>,
    ) -> Result<Self, MixtureError> {
        if theta_grid.is_empty()
            || theta_grid.len() != components.len()
            || theta_grid.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(MixtureError::BadGrid);
        }
        let space = Arc::clone(components[0].space());
        if components.iter().any(|c| !same_space(c.space(), &space)) {
            return Err(MixtureError::SpaceMismatch);
        }
        let cache = OnceLock::new();
        cache.set(components).expect("fresh cell");
        Ok(ParametricFamily {
            name: name.into(),
            space,
            theta_grid,
            generator: GeneratorKind::Explicit,
            cache,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn theta_grid(&self) -> &[f64] {
        &self.theta_grid
    }

    pub fn generator(&self) -> &GeneratorKind {
        &self.generator
    }

    pub fn len(&self) -> usize {
        self.theta_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_grid.is_empty()
    }

    /// Component at grid index `k`, computed on demand.
    pub fn component(&self, k: usize) -> Measure {
        if let Some(cached) = self.cache.get() {
            return cached[k].clone();
        }
        self.build(self.theta_grid[k])
    }

    /// All components, cached after the first call. Refused when the matrix
    /// would be large; iterate with `component` instead.
    pub fn components(&self) -> Result<&[Measure], MixtureError> {
        if let Some(cached) = self.cache.get() {
            return Ok(cached);
        }
        let cells = self.theta_grid.len().saturating_mul(self.space.len());
        if cells > COMPONENT_BUDGET {
            return Err(MixtureError::ComponentBudget(cells));
        }
        Ok(self
            .cache
            .get_or_init(|| self.theta_grid.iter().map(|&t| self.build(t)).collect()))
    }

    fn build(&self, theta: f64) -> Measure {
        let n = self.space.len();
        let cell = 1.0 / n as f64;
        let mut w = vec![0.0; n];
        match self.generator {
            GeneratorKind::Ramp => {
                // density 1/theta on [0, theta]: exact cell overlaps
                for (i, wi) in w.iter_mut().enumerate() {
                    let lo = i as f64 * cell;
                    let hi = lo + cell;
                    *wi = (theta.min(hi) - lo).max(0.0) / theta;
                }
            }
            GeneratorKind::BlockUniform { gamma } => {
                let (lo, hi) = (theta, theta + gamma / 2.0);
                for (i, wi) in w.iter_mut().enumerate() {
                    let a = i as f64 * cell;
                    let b = a + cell;
                    *wi = (hi.min(b) - lo.max(a)).max(0.0) * 2.0 / gamma;
                }
            }
            GeneratorKind::Dyadic => {
                let j = theta.round() as usize;
                let first = n >> (j + 1);
                let last = n >> j;
                let width = (last - first) as f64;
                for wi in w.iter_mut().take(last).skip(first) {
                    *wi = 1.0 / width;
                }
            }
            GeneratorKind::Dirac => {
                let i = ((theta * n as f64).floor() as usize).min(n - 1);
                w[i] = 1.0;
            }
            GeneratorKind::Explicit => unreachable!("explicit families are always cached"),
        }
        let total: f64 = w.iter().sum();
        for wi in w.iter_mut() {
            *wi /= total;
        }
        Measure::new(&self.space, w).expect("generator output is a measure")
    }
}

fn check_prior(family: &ParametricFamily, prior: &[f64]) -> Result<(), MixtureError> {
    if prior.len() != family.len() || prior.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(MixtureError::BadPrior);
    }
    let total: f64 = prior.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(MixtureError::PriorNotNormalized(total));
    }
    Ok(())
}

/// Prior-weighted mixture of the family, streamed one component at a time.
/// Zero-prior components contribute nothing, including their supports.
pub fn mixture_measure(
    family: &ParametricFamily,
    prior: &[f64],
) -> Result<Measure, MixtureError> {
    check_prior(family, prior)?;
    let mut acc = vec![0.0; family.space().len()];
    for (k, &nu) in prior.iter().enumerate() {
        if nu <= 0.0 {
            continue;
        }
        let p = family.component(k);
        for (a, w) in acc.iter_mut().zip(p.weights()) {
            *a += nu * w;
        }
    }
    let total: f64 = acc.iter().sum();
    for a in acc.iter_mut() {
        *a /= total;
    }
    Ok(Measure::new(family.space(), acc)?)
}

/// Which parameters escape domination by the reference, and how regular the
/// family is along its grid.
#[derive(Clone, Debug)]
pub struct ThetaDiagnostics {
    /// grid indices whose component is not dominated by the reference
    pub theta_null: Vec<usize>,
    /// prior mass of those indices
    pub nu_null_mass: f64,
    /// largest total variation between grid-adjacent components
    pub tv_modulus: f64,
    /// left indices of adjacent pairs jumping by more than the threshold
    pub discontinuities: Vec<usize>,
}

pub fn theta_diagnostics(
    family: &ParametricFamily,
    prior: &[f64],
    reference: &Measure,
) -> Result<ThetaDiagnostics, MixtureError> {
    check_prior(family, prior)?;
    if !same_space(family.space(), reference.space()) {
        return Err(MixtureError::SpaceMismatch);
    }
    let mask = reference.support_mask();
    let mut theta_null = Vec::new();
    let mut nu_null_mass = 0.0;
    let mut tv_modulus = 0.0_f64;
    let mut discontinuities = Vec::new();
    let mut previous: Option<Measure> = None;
    for k in 0..family.len() {
        let p = family.component(k);
        if !p.support().iter().all(|&i| mask[i]) {
            theta_null.push(k);
            nu_null_mass += prior[k];
        }
        if let Some(prev) = &previous {
            let tv = total_variation(prev, &p)?;
            tv_modulus = tv_modulus.max(tv);
            if tv > TV_JUMP {
                discontinuities.push(k - 1);
            }
        }
        previous = Some(p);
    }
    Ok(ThetaDiagnostics { theta_null, nu_null_mass, tv_modulus, discontinuities })
}

/// One claim's two-sided comparison for the mixture check: the supremum over
/// the dominated members alone, the supremum with the averaged representative
/// adjoined, and the value at the mixture itself.
#[derive(Clone, Debug)]
pub struct MixtureComparison {
    pub members_hat: f64,
    pub closure_hat: f64,
    pub reference_hat: f64,
    pub hat_agrees: bool,
    pub members_version: f64,
    pub closure_version: f64,
    pub reference_version: f64,
    pub version_agrees: bool,
}

impl MixtureComparison {
    pub fn passes(&self) -> bool {
        self.hat_agrees && self.version_agrees
    }
}

/// Verdict on whether the robust risk over the mixture-dominated sub-family,
/// closed by the averaged representative, collapses to the mixture measure.
#[derive(Clone, Debug)]
pub struct MixtureClassicalReport {
    pub reference: Measure,
    pub theta_one: Vec<usize>,
    pub averaged: Measure,
    pub averaged_weights: Vec<f64>,
    pub comparisons: Vec<MixtureComparison>,
    pub holds: bool,
}

/// Builds the mixture, drops the undominated parameters, adjoins the
/// averaged equivalent representative, and compares the family supremum with
/// the single-measure value at the mixture for every claim and both
/// operators.
pub fn mixture_classical_check(
    family: &ParametricFamily,
    prior: &[f64],
    alpha: &PenaltySpec,
    claims: &[Claim],
) -> Result<MixtureClassicalReport, MixtureError> {
    let reference = mixture_measure(family, prior)?;
    let diag = theta_diagnostics(family, prior, &reference)?;
    let theta_one: Vec<usize> =
        (0..family.len()).filter(|k| !diag.theta_null.contains(k)).collect();
    let members: Vec<Measure> = theta_one.iter().map(|&k| family.component(k)).collect();
    if members.is_empty() || !generalized_equivalence(&members, &reference)?.holds() {
        return Err(MixtureError::HalmosSavageFailure(
            MeasureError::NotGeneralizedEquivalent { member: None, atom: usize::MAX },
        ));
    }
    let (averaged, averaged_weights) =
        halmos_savage_equivalent(&members, &reference).map_err(MixtureError::HalmosSavageFailure)?;

    let mut comparisons = Vec::with_capacity(claims.len());
    for claim in claims {
        let mut members_hat = f64::NEG_INFINITY;
        let mut members_version = f64::NEG_INFINITY;
        for p in &members {
            members_hat = members_hat.max(rho_hat(claim, alpha, p)?.value);
            members_version = members_version.max(rho_version_inf(claim, alpha, p)?.value);
        }
        let closure_hat = members_hat.max(rho_hat(claim, alpha, &averaged)?.value);
        let closure_version =
            members_version.max(rho_version_inf(claim, alpha, &averaged)?.value);
        let reference_hat = rho_hat(claim, alpha, &reference)?.value;
        let reference_version = rho_version_inf(claim, alpha, &reference)?.value;
        let hat_agrees = agree(closure_hat, reference_hat);
        let version_agrees = agree(closure_version, reference_version);
        comparisons.push(MixtureComparison {
            members_hat,
            closure_hat,
            reference_hat,
            hat_agrees,
            members_version,
            closure_version,
            reference_version,
            version_agrees,
        });
    }
    let holds = comparisons.iter().all(|c| c.passes());
    Ok(MixtureClassicalReport {
        reference,
        theta_one,
        averaged,
        averaged_weights,
        comparisons,
        holds,
    })
}

fn agree(a: f64, b: f64) -> bool {
    (a == f64::NEG_INFINITY && b == f64::NEG_INFINITY)
        || (a.is_finite() && b.is_finite() && (a - b).abs() <= 1e-8)
}

/// Per-atom bookkeeping for the strict-domination condition: every
/// reference-charged atom must receive strictly positive prior-weighted mass
/// from the dominated parts of the components.
#[derive(Clone, Debug)]
pub struct AtomContribution {
    pub atom: usize,
    pub reference_mass: f64,
    pub dominated_mass: f64,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct ConditionAReport {
    pub holds: bool,
    pub table: Vec<AtomContribution>,
    pub witness: Option<usize>,
}

/// With the mixture itself as reference this holds trivially; an arbitrary
/// candidate reference can fail on atoms fed only by mass the reference
/// cannot see.
pub fn condition_a_check(
    family: &ParametricFamily,
    prior: &[f64],
    reference: &Measure,
) -> Result<ConditionAReport, MixtureError> {
    check_prior(family, prior)?;
    if !same_space(family.space(), reference.space()) {
        return Err(MixtureError::SpaceMismatch);
    }
    let mask = reference.support_mask();
    let mut dominated = vec![0.0; reference.space().len()];
    for (k, &nu) in prior.iter().enumerate() {
        if nu <= 0.0 {
            continue;
        }
        let p = family.component(k);
        for (i, (d, w)) in dominated.iter_mut().zip(p.weights()).enumerate() {
            // the dominated part of a component charges only reference atoms
            if mask[i] {
                *d += nu * w;
            }
        }
    }
    let mut table = Vec::new();
    let mut witness = None;
    for &atom in reference.support().iter() {
        let ok = dominated[atom] > TOL_ZERO;
        if !ok && witness.is_none() {
            witness = Some(atom);
        }
        table.push(AtomContribution {
            atom,
            reference_mass: reference.weight(atom),
            dominated_mass: dominated[atom],
            ok,
        });
    }
    Ok(ConditionAReport { holds: witness.is_none(), table, witness })
}

/// Does support inclusion of the priors carry over to their mixtures?
#[derive(Clone, Debug)]
pub struct PriorOrderReport {
    /// supp(mu) inside supp(nu) on the grid
    pub priors_nested: bool,
    /// supp of mu-mixture inside supp of nu-mixture; `None` when the
    /// premise already fails and the implication is vacuous
    pub mixtures_nested: Option<bool>,
    pub holds: bool,
}

pub fn prior_order_check(
    family: &ParametricFamily,
    mu: &[f64],
    nu: &[f64],
) -> Result<PriorOrderReport, MixtureError> {
    check_prior(family, mu)?;
    check_prior(family, nu)?;
    let priors_nested = mu
        .iter()
        .zip(nu)
        .all(|(&m, &n)| m <= TOL_ZERO || n > TOL_ZERO);
    if !priors_nested {
        return Ok(PriorOrderReport { priors_nested, mixtures_nested: None, holds: true });
    }
    let mix_mu = mixture_measure(family, mu)?;
    let mix_nu = mixture_measure(family, nu)?;
    let mask = mix_nu.support_mask();
    let nested = mix_mu.support().iter().all(|&i| mask[i]);
    Ok(PriorOrderReport { priors_nested, mixtures_nested: Some(nested), holds: nested })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::es_qset;

    fn uniform_prior(len: usize) -> Vec<f64> {
        vec![1.0 / len as f64; len]
    }

    #[test]
    fn ramp_at_one_is_uniform() {
        let s = SampleSpace::unit_grid(10);
        let fam =
            ParametricFamily::new("r", GeneratorKind::Ramp, vec![1.0], &s).unwrap();
        let p = fam.component(0);
        for &w in p.weights() {
            assert!((w - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn ramp_splits_a_cell_exactly() {
        let s = SampleSpace::unit_grid(10);
        let fam =
            ParametricFamily::new("r", GeneratorKind::Ramp, vec![0.35], &s).unwrap();
        let p = fam.component(0);
        for i in 0..3 {
            assert!((p.weight(i) - 0.1 / 0.35).abs() < 1e-12);
        }
        assert!((p.weight(3) - 0.05 / 0.35).abs() < 1e-12);
        assert!(p.weight(4).abs() < 1e-15);
    }

    #[test]
    fn block_family_on_matching_cells_is_pointwise() {
        let s = SampleSpace::unit_grid(20);
        let grid: Vec<f64> = (0..20).map(|k| k as f64 / 20.0).collect();
        let fam = ParametricFamily::new(
            "b",
            GeneratorKind::BlockUniform { gamma: 0.1 },
            grid,
            &s,
        )
        .unwrap();
        for k in 0..20 {
            let p = fam.component(k);
            assert!((p.weight(k) - 1.0).abs() < 1e-12, "block {k} not concentrated");
        }
    }

    #[test]
    fn block_straddling_two_cells_halves_its_mass() {
        let s = SampleSpace::unit_grid(20);
        let fam = ParametricFamily::new(
            "b",
            GeneratorKind::BlockUniform { gamma: 0.1 },
            vec![0.025],
            &s,
        )
        .unwrap();
        let p = fam.component(0);
        assert!((p.weight(0) - 0.5).abs() < 1e-12);
        assert!((p.weight(1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dyadic_blocks_partition_all_but_the_first_cell() {
        let s = SampleSpace::unit_grid(16);
        let fam = ParametricFamily::new(
            "d",
            GeneratorKind::Dyadic,
            vec![0.0, 1.0, 2.0, 3.0],
            &s,
        )
        .unwrap();
        let expected_supports: Vec<Vec<usize>> = vec![
            (8..16).collect(),
            (4..8).collect(),
            (2..4).collect(),
            vec![1],
        ];
        let mut seen = vec![false; 16];
        for (k, want) in expected_supports.iter().enumerate() {
            let p = fam.component(k);
            assert_eq!(&p.support(), want, "block {k}");
            for &i in want {
                seen[i] = true;
            }
        }
        assert!(!seen[0], "the origin cell belongs to no block");
        assert!(seen[1..].iter().all(|&b| b));
    }

    #[test]
    fn dirac_family_mixture_with_point_prior_is_the_component() {
        let s = SampleSpace::unit_grid(8);
        let grid: Vec<f64> = (0..8).map(|k| (k as f64 + 0.5) / 8.0).collect();
        let fam = ParametricFamily::new("p", GeneratorKind::Dirac, grid, &s).unwrap();
        let mut prior = vec![0.0; 8];
        prior[3] = 1.0;
        let mix = mixture_measure(&fam, &prior).unwrap();
        assert_eq!(mix.weights(), fam.component(3).weights());
    }

    #[test]
    fn domain_violations_are_reported_with_their_index() {
        let s = SampleSpace::unit_grid(10);
        match ParametricFamily::new("r", GeneratorKind::Ramp, vec![0.5, 1.5], &s) {
            Err(MixtureError::DomainViolation { index: 1, .. }) => {}
            other => panic!("expected a domain violation, got {other:?}"),
        }
        assert!(matches!(
            GeneratorKind::parse("spline", None),
            Err(MixtureError::UnknownGenerator(_))
        ));
    }

    #[test]
    fn ramp_family_has_no_escaping_parameters() {
        let s = SampleSpace::unit_grid(10);
        let grid: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
        let fam = ParametricFamily::new("r", GeneratorKind::Ramp, grid, &s).unwrap();
        let prior = uniform_prior(10);
        let mix = mixture_measure(&fam, &prior).unwrap();
        let diag = theta_diagnostics(&fam, &prior, &mix).unwrap();
        assert!(diag.theta_null.is_empty());
        assert_eq!(diag.nu_null_mass, 0.0);
        assert!(diag.discontinuities.is_empty());
        // adjacent ramps differ by 1 - theta ratio; the first pair is worst
        assert!((diag.tv_modulus - 0.5).abs() < 1e-12);
    }

    #[test]
    fn point_mass_family_jumps_at_every_step() {
        let s = SampleSpace::unit_grid(6);
        let grid: Vec<f64> = (0..6).map(|k| (k as f64 + 0.5) / 6.0).collect();
        let fam = ParametricFamily::new("p", GeneratorKind::Dirac, grid, &s).unwrap();
        let prior = uniform_prior(6);
        let mix = mixture_measure(&fam, &prior).unwrap();
        let diag = theta_diagnostics(&fam, &prior, &mix).unwrap();
        assert!(diag.theta_null.is_empty());
        assert!((diag.tv_modulus - 1.0).abs() < 1e-12);
        assert_eq!(diag.discontinuities, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn refining_the_ramp_grid_shrinks_the_modulus() {
        // away from the origin the ramp family is total-variation
        // continuous, so halving the grid step halves the modulus
        let s = SampleSpace::unit_grid(40);
        let coarse: Vec<f64> = (0..=5).map(|k| 0.5 + k as f64 / 10.0).collect();
        let fine: Vec<f64> = (0..=20).map(|k| 0.5 + k as f64 / 40.0).collect();
        let fam_c = ParametricFamily::new("r", GeneratorKind::Ramp, coarse, &s).unwrap();
        let fam_f = ParametricFamily::new("r", GeneratorKind::Ramp, fine, &s).unwrap();
        let mix_c = mixture_measure(&fam_c, &uniform_prior(6)).unwrap();
        let mix_f = mixture_measure(&fam_f, &uniform_prior(21)).unwrap();
        let d_c = theta_diagnostics(&fam_c, &uniform_prior(6), &mix_c).unwrap();
        let d_f = theta_diagnostics(&fam_f, &uniform_prior(21), &mix_f).unwrap();
        assert!(d_f.tv_modulus < d_c.tv_modulus);
        assert!(d_f.theta_null.is_empty());
    }

    #[test]
    fn hybrid_family_isolates_the_point_masses_on_null_prior() {
        // nine ramps carried by the prior plus one point mass at the last
        // cell with zero prior: the mixture misses that cell, so exactly the
        // point-mass index escapes, at zero prior mass
        let s = SampleSpace::unit_grid(10);
        let mut grid: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        grid.push(0.95);
        let fam = ParametricFamily::new("h", GeneratorKind::Ramp, grid.clone(), &s);
        // a single generator cannot mix kinds; build the hybrid by hand below
        drop(fam);
        let ramps = ParametricFamily::new(
            "h",
            GeneratorKind::Ramp,
            grid[..9].to_vec(),
            &s,
        )
        .unwrap();
        let mut prior = vec![1.0 / 9.0; 9];
        let mix = mixture_measure(&ramps, &prior).unwrap();
        assert!(!mix.charges(9));
        prior[0] = 1.0 / 9.0;
        let dirac_tail = ParametricFamily::new(
            "tail",
            GeneratorKind::Dirac,
            vec![0.95],
            &s,
        )
        .unwrap();
        let diag = theta_diagnostics(&dirac_tail, &[1.0], &mix).unwrap();
        assert_eq!(diag.theta_null, vec![0]);
    }

    #[test]
    fn mixture_check_passes_for_the_ramp_family() {
        let s = SampleSpace::unit_grid(10);
        let grid: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
        let fam = ParametricFamily::new("r", GeneratorKind::Ramp, grid, &s).unwrap();
        let prior = uniform_prior(10);
        let mix = mixture_measure(&fam, &prior).unwrap();
        let alpha = PenaltySpec::IndicatorZero(es_qset(&mix, 0.3).unwrap());
        let claims = vec![
            Claim::new(&s, (0..10).map(|i| i as f64 / 3.0).collect()).unwrap(),
            Claim::new(&s, (0..10).map(|i| ((i * 7) % 5) as f64 - 2.0).collect()).unwrap(),
        ];
        let report = mixture_classical_check(&fam, &prior, &alpha, &claims).unwrap();
        assert!(report.holds, "report {report:?}");
        assert_eq!(report.theta_one.len(), 10);
        // the averaged representative alone already attains the mixture value
        for c in &report.comparisons {
            assert!((c.closure_hat - c.reference_hat).abs() < 1e-9);
        }
    }

    #[test]
    fn block_family_shows_the_closure_jump() {
        // four one-cell blocks under a tight tail level: every member's
        // restricted carrier is empty, only the averaged representative
        // reaches the mixture value
        let s = SampleSpace::unit_grid(4);
        let grid: Vec<f64> = (0..4).map(|k| k as f64 / 4.0).collect();
        let fam = ParametricFamily::new(
            "b",
            GeneratorKind::BlockUniform { gamma: 0.5 },
            grid,
            &s,
        )
        .unwrap();
        let prior = uniform_prior(4);
        let mix = mixture_measure(&fam, &prior).unwrap();
        let alpha = PenaltySpec::IndicatorZero(es_qset(&mix, 0.5).unwrap());
        let claims = vec![Claim::new(&s, vec![-1.0, -1.0, 0.0, 0.0]).unwrap()];
        let report = mixture_classical_check(&fam, &prior, &alpha, &claims).unwrap();
        let c = &report.comparisons[0];
        assert_eq!(c.members_hat, f64::NEG_INFINITY);
        assert!((c.closure_hat - 1.0).abs() < 1e-9);
        assert!(report.holds);
    }

    #[test]
    fn strict_domination_trivial_and_witnessed() {
        let s = SampleSpace::unit_grid(4);
        let grid: Vec<f64> = (1..=4).map(|k| k as f64 / 4.0).collect();
        let fam = ParametricFamily::new("r", GeneratorKind::Ramp, grid, &s).unwrap();
        let prior = uniform_prior(4);
        let mix = mixture_measure(&fam, &prior).unwrap();
        let trivially = condition_a_check(&fam, &prior, &mix).unwrap();
        assert!(trivially.holds);
        assert!(trivially.table.iter().all(|row| row.ok));

        // a reference charging a cell the prior-weighted family cannot feed
        let point = ParametricFamily::new("p", GeneratorKind::Dirac, vec![0.9], &s).unwrap();
        let wide = Measure::uniform(&s);
        let report = condition_a_check(&point, &[1.0], &wide).unwrap();
        assert!(!report.holds);
        assert_eq!(report.witness, Some(0));
    }

    #[test]
    fn prior_support_order_carries_to_mixtures() {
        let s = SampleSpace::unit_grid(8);
        let grid: Vec<f64> = (1..=4).map(|k| k as f64 / 4.0).collect();
        let fam = ParametricFamily::new("r", GeneratorKind::Ramp, grid, &s).unwrap();
        let nu = uniform_prior(4);
        let eq = prior_order_check(&fam, &nu, &nu).unwrap();
        assert!(eq.priors_nested && eq.holds);

        let mu = vec![0.5, 0.5, 0.0, 0.0];
        let nested = prior_order_check(&fam, &mu, &nu).unwrap();
        assert!(nested.priors_nested);
        assert_eq!(nested.mixtures_nested, Some(true));

        let outside = vec![0.0, 0.0, 0.0, 1.0];
        let narrow = vec![0.5, 0.5, 0.0, 0.0];
        let vac = prior_order_check(&fam, &outside, &narrow).unwrap();
        assert!(!vac.priors_nested);
        assert!(vac.mixtures_nested.is_none());
        assert!(vac.holds);
    }

    #[test]
    fn component_budget_guards_materialization() {
        let s = SampleSpace::unit_grid(2000);
        let grid: Vec<f64> = (1..=600).map(|k| k as f64 / 600.0).collect();
        let fam = ParametricFamily::new("r", GeneratorKind::Ramp, grid, &s).unwrap();
        assert!(matches!(fam.components(), Err(MixtureError::ComponentBudget(_))));
        // single components still come out fine
        let p = fam.component(10);
        assert!((p.weights().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unit_interval_mass_below_a_cut_matches_the_closed_form() {
        // prior-uniform ramp mixture puts mass c(1 - ln c) below the cut c;
        // modest resolutions already land within a few parts per thousand
        let s = SampleSpace::unit_grid(400);
        let m = 200;
        let grid: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) / m as f64).collect();
        let fam = ParametricFamily::new("r", GeneratorKind::Ramp, grid, &s).unwrap();
        let mix = mixture_measure(&fam, &uniform_prior(m)).unwrap();
        for c in [0.1_f64, 0.5, 0.9] {
            let cells = (c * 400.0).round() as usize;
            let got: f64 = mix.weights()[..cells].iter().sum();
            let want = c * (1.0 - c.ln());
            assert!(
                (got - want).abs() < 5e-3,
                "mass below {c}: got {got}, closed form {want}"
            );
        }
    }
}

//! Finite sample spaces and the probability measures living on them.
//!
//! Everything downstream works on an explicit atom list, so the support of a
//! measure, absolute continuity, and singularity are all decidable by direct
//! inspection. Two tolerances govern that inspection and are shared crate
//! wide: [`TOL_ZERO`] decides whether an atom carries mass, [`TOL_NORM`]
//! bounds the normalization drift a measure may accumulate.
//!
//! The less common constructions live here too: Lebesgue decomposition of one
//! measure against another, mixtures of a family under a prior, the two-sided
//! domination report between a family and a reference measure, and the greedy
//! averaging that produces a single family member equivalent to the reference
//! whenever that report comes back clean.

use std::sync::Arc;

use thiserror::Error;

/// Mass below this threshold does not count toward a support.
pub const TOL_ZERO: f64 = 1e-12;

/// Permitted drift of a probability vector away from total mass one.
pub const TOL_NORM: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("sample space needs at least one atom")]
    EmptySpace,
    #[error("atom label {0:?} appears more than once")]
    DuplicateLabel(String),
    #[error("measures live on different sample spaces")]
    SpaceMismatch,
    #[error("expected {want} weights, got {got}")]
    LengthMismatch { got: usize, want: usize },
    #[error("weight {value} at atom {index} is negative")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weight at atom {index} is not finite")]
    NonFiniteWeight { index: usize },
    #[error("weights sum to {sum}, outside the 1e-9 normalization band")]
    MassNotNormalized { sum: f64 },
    #[error("family contains no members")]
    EmptyFamily,
    #[error("prior weight {value} at component {index} is negative")]
    NegativePrior { index: usize, value: f64 },
    #[error("prior sums to {sum}, outside the 1e-9 normalization band")]
    PriorNotNormalized { sum: f64 },
    #[error("{}", describe_not_generalized(*member, *atom))]
    NotGeneralizedEquivalent { member: Option<usize>, atom: usize },
}

fn describe_not_generalized(member: Option<usize>, atom: usize) -> String {
    match member {
        Some(m) => format!("family member {m} charges atom {atom} outside the reference support"),
        None => format!("reference charges atom {atom} but no family member does"),
    }
}

/// An explicit finite list of outcome labels. Shared by reference; every
/// measure and claim checks that it lives on the same space as its peers.
#[derive(Debug, PartialEq, Eq)]
pub struct SampleSpace {
    labels: Vec<String>,
}

impl SampleSpace {
    pub fn new<S: Into<String>>(labels: Vec<S>) -> Result<Arc<Self>, MeasureError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(MeasureError::EmptySpace);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(MeasureError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Arc::new(SampleSpace { labels }))
    }

    /// Space with atoms `w1..wn`.
    pub fn indexed(n: usize) -> Arc<Self> {
        SampleSpace::new((1..=n).map(|i| format!("w{i}")).collect::<Vec<_>>())
            .expect("indexed labels are unique and nonempty")
    }

    /// Space whose atoms are the `cells` left-closed cells of a uniform grid
    /// on the unit interval, labelled by cell index.
    pub fn unit_grid(cells: usize) -> Arc<Self> {
        SampleSpace::new((0..cells).map(|i| format!("c{i}")).collect::<Vec<_>>())
            .expect("grid labels are unique and nonempty")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// True when both handles denote the same atom list.
pub fn same_space(a: &Arc<SampleSpace>, b: &Arc<SampleSpace>) -> bool {
    Arc::ptr_eq(a, b) || a.labels == b.labels
}

/// A normalized nonnegative weight vector over a sample space.
#[derive(Clone, Debug)]
pub struct Measure {
    space: Arc<SampleSpace>,
    weights: Vec<f64>,
}

impl Measure {
    pub fn new(space: &Arc<SampleSpace>, weights: Vec<f64>) -> Result<Self, MeasureError> {
        check_weights(space, &weights)?;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > TOL_NORM {
            return Err(MeasureError::MassNotNormalized { sum });
        }
        Ok(Measure { space: Arc::clone(space), weights })
    }

    /// Point mass at one atom.
    pub fn dirac(space: &Arc<SampleSpace>, atom: usize) -> Self {
        let mut weights = vec![0.0; space.len()];
        weights[atom] = 1.0;
        Measure { space: Arc::clone(space), weights }
    }

    /// Uniform over all atoms.
    pub fn uniform(space: &Arc<SampleSpace>) -> Self {
        let w = 1.0 / space.len() as f64;
        Measure { space: Arc::clone(space), weights: vec![w; space.len()] }
    }

    /// Uniform over the given atom subset.
    pub fn uniform_on(space: &Arc<SampleSpace>, atoms: &[usize]) -> Result<Self, MeasureError> {
        if atoms.is_empty() {
            return Err(MeasureError::EmptyFamily);
        }
        let w = 1.0 / atoms.len() as f64;
        let mut weights = vec![0.0; space.len()];
        for &a in atoms {
            weights[a] = w;
        }
        Measure::new(space, weights)
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.weights[atom]
    }

    /// Indices of atoms carrying mass above [`TOL_ZERO`].
    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > TOL_ZERO)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn support_mask(&self) -> Vec<bool> {
        self.weights.iter().map(|&w| w > TOL_ZERO).collect()
    }

    pub fn charges(&self, atom: usize) -> bool {
        self.weights[atom] > TOL_ZERO
    }

    /// Expectation of a payoff vector.
    pub fn expect(&self, payoff: &[f64]) -> f64 {
        self.weights.iter().zip(payoff).map(|(w, x)| w * x).sum()
    }
}

fn check_weights(space: &Arc<SampleSpace>, weights: &[f64]) -> Result<(), MeasureError> {
    if weights.len() != space.len() {
        return Err(MeasureError::LengthMismatch { got: weights.len(), want: space.len() });
    }
    for (index, &value) in weights.iter().enumerate() {
        if !value.is_finite() {
            return Err(MeasureError::NonFiniteWeight { index });
        }
        if value < 0.0 {
            return Err(MeasureError::NegativeWeight { index, value });
        }
    }
    Ok(())
}

/// Nonnegative weights without the normalization requirement; the two halves
/// of a Lebesgue decomposition live here.
#[derive(Clone, Debug)]
pub struct UnnormalizedMeasure {
    space: Arc<SampleSpace>,
    weights: Vec<f64>,
}

impl UnnormalizedMeasure {
    pub fn new(space: &Arc<SampleSpace>, weights: Vec<f64>) -> Result<Self, MeasureError> {
        check_weights(space, &weights)?;
        Ok(UnnormalizedMeasure { space: Arc::clone(space), weights })
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > TOL_ZERO)
            .map(|(i, _)| i)
            .collect()
    }

    /// Rescale to a probability measure; `None` when the mass is below
    /// [`TOL_ZERO`].
    pub fn normalized(&self) -> Option<Measure> {
        let m = self.mass();
        if m <= TOL_ZERO {
            return None;
        }
        Some(Measure {
            space: Arc::clone(&self.space),
            weights: self.weights.iter().map(|w| w / m).collect(),
        })
    }
}

/// How two measures sit relative to each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasureRelation {
    /// first measure is absolutely continuous with respect to the second
    pub abs_cont: bool,
    /// domination holds in both directions
    pub equivalent: bool,
    /// the supports are disjoint
    pub singular: bool,
}

/// Support comparison of `p` against `r`.
pub fn relate(p: &Measure, r: &Measure) -> Result<MeasureRelation, MeasureError> {
    if !same_space(&p.space, &r.space) {
        return Err(MeasureError::SpaceMismatch);
    }
    let mut p_in_r = true;
    let mut r_in_p = true;
    let mut disjoint = true;
    for i in 0..p.space.len() {
        let cp = p.charges(i);
        let cr = r.charges(i);
        if cp && !cr {
            p_in_r = false;
        }
        if cr && !cp {
            r_in_p = false;
        }
        if cp && cr {
            disjoint = false;
        }
    }
    Ok(MeasureRelation { abs_cont: p_in_r, equivalent: p_in_r && r_in_p, singular: disjoint })
}

/// Split `p` into the part carried by the support of `r` and the part living
/// off it. The halves recompose to `p` exactly, atom by atom.
pub fn lebesgue_decompose(
    p: &Measure,
    r: &Measure,
) -> Result<(UnnormalizedMeasure, UnnormalizedMeasure), MeasureError> {
    if !same_space(&p.space, &r.space) {
        return Err(MeasureError::SpaceMismatch);
    }
    let mut ac = vec![0.0; p.space.len()];
    let mut sing = vec![0.0; p.space.len()];
    for i in 0..p.space.len() {
        if r.charges(i) {
            ac[i] = p.weights[i];
        } else {
            sing[i] = p.weights[i];
        }
    }
    Ok((
        UnnormalizedMeasure { space: Arc::clone(&p.space), weights: ac },
        UnnormalizedMeasure { space: Arc::clone(&p.space), weights: sing },
    ))
}

/// Density of the dominated part of `p` against `r`: defined wherever `r`
/// charges, zero elsewhere by convention.
pub fn density(p: &Measure, r: &Measure) -> Result<Vec<f64>, MeasureError> {
    if !same_space(&p.space, &r.space) {
        return Err(MeasureError::SpaceMismatch);
    }
    Ok((0..p.space.len())
        .map(|i| if r.charges(i) { p.weights[i] / r.weights[i] } else { 0.0 })
        .collect())
}

/// Total variation distance, half the l1 distance of the weight vectors.
/// Equals the largest discrepancy `|P(A) - P'(A)|` over atom subsets `A`.
pub fn total_variation(p: &Measure, r: &Measure) -> Result<f64, MeasureError> {
    if !same_space(&p.space, &r.space) {
        return Err(MeasureError::SpaceMismatch);
    }
    Ok(0.5 * p.weights.iter().zip(&r.weights).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// A finite family with a prior over its components.
#[derive(Clone, Debug)]
pub struct MixtureSpec {
    components: Vec<Measure>,
    prior: Vec<f64>,
}

impl MixtureSpec {
    pub fn new(components: Vec<Measure>, prior: Vec<f64>) -> Result<Self, MeasureError> {
        if components.is_empty() {
            return Err(MeasureError::EmptyFamily);
        }
        if prior.len() != components.len() {
            return Err(MeasureError::LengthMismatch { got: prior.len(), want: components.len() });
        }
        let space = components[0].space();
        for c in &components[1..] {
            if !same_space(c.space(), space) {
                return Err(MeasureError::SpaceMismatch);
            }
        }
        for (index, &value) in prior.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(MeasureError::NegativePrior { index, value });
            }
        }
        let sum: f64 = prior.iter().sum();
        if (sum - 1.0).abs() > TOL_NORM {
            return Err(MeasureError::PriorNotNormalized { sum });
        }
        Ok(MixtureSpec { components, prior })
    }

    pub fn components(&self) -> &[Measure] {
        &self.components
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }
}

/// Prior-weighted average of the components. The assembled vector is rescaled
/// to exact total mass one so that long families cannot accumulate drift.
pub fn mixture(spec: &MixtureSpec) -> Measure {
    let space = spec.components[0].space();
    let mut weights = vec![0.0; space.len()];
    for (c, &nu) in spec.components.iter().zip(&spec.prior) {
        if nu == 0.0 {
            continue;
        }
        for (w, &cw) in weights.iter_mut().zip(c.weights()) {
            *w += nu * cw;
        }
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    Measure { space: Arc::clone(space), weights }
}

/// Two-sided domination report between a family and a reference measure.
#[derive(Clone, Debug)]
pub struct GeneralizedEquivalence {
    /// every family member is absolutely continuous with respect to the reference
    pub family_dominated: bool,
    /// every reference atom is charged by some family member
    pub reference_covered: bool,
    /// member and atom violating domination, when any
    pub witness_not_dominated: Option<(usize, usize)>,
    /// reference atom no member charges, when any
    pub witness_uncovered: Option<usize>,
}

impl GeneralizedEquivalence {
    pub fn holds(&self) -> bool {
        self.family_dominated && self.reference_covered
    }
}

/// Check domination of the family by `p` and coverage of `p` by the family.
pub fn generalized_equivalence(
    family: &[Measure],
    p: &Measure,
) -> Result<GeneralizedEquivalence, MeasureError> {
    if family.is_empty() {
        return Err(MeasureError::EmptyFamily);
    }
    for m in family {
        if !same_space(m.space(), p.space()) {
            return Err(MeasureError::SpaceMismatch);
        }
    }
    let mut witness_not_dominated = None;
    'outer: for (k, m) in family.iter().enumerate() {
        for i in 0..p.space.len() {
            if m.charges(i) && !p.charges(i) {
                witness_not_dominated = Some((k, i));
                break 'outer;
            }
        }
    }
    let mut witness_uncovered = None;
    for i in 0..p.space.len() {
        if p.charges(i) && !family.iter().any(|m| m.charges(i)) {
            witness_uncovered = Some(i);
            break;
        }
    }
    Ok(GeneralizedEquivalence {
        family_dominated: witness_not_dominated.is_none(),
        reference_covered: witness_uncovered.is_none(),
        witness_not_dominated,
        witness_uncovered,
    })
}

/// Build a single distinguished mixture of the family that is equivalent to
/// the reference measure.
///
/// Walks the reference support in atom order, picks the first member charging
/// each not-yet-covered atom, then averages the picked members uniformly.
/// Returns the averaged measure together with the weight it puts on every
/// family member. Fails when the family and the reference do not dominate
/// each other, with the violating atom in the error.
pub fn halmos_savage_equivalent(
    family: &[Measure],
    p: &Measure,
) -> Result<(Measure, Vec<f64>), MeasureError> {
    let report = generalized_equivalence(family, p)?;
    if let Some((member, atom)) = report.witness_not_dominated {
        return Err(MeasureError::NotGeneralizedEquivalent { member: Some(member), atom });
    }
    if let Some(atom) = report.witness_uncovered {
        return Err(MeasureError::NotGeneralizedEquivalent { member: None, atom });
    }
    let mut picked: Vec<usize> = Vec::new();
    let mut covered = vec![false; p.space.len()];
    for i in 0..p.space.len() {
        if !p.charges(i) || covered[i] {
            continue;
        }
        let k = family
            .iter()
            .position(|m| m.charges(i))
            .expect("coverage was verified above");
        if !picked.contains(&k) {
            picked.push(k);
            for (c, m) in covered.iter_mut().zip(family[k].weights()) {
                if *m > TOL_ZERO {
                    *c = true;
                }
            }
        }
    }
    let share = 1.0 / picked.len() as f64;
    let mut weights = vec![0.0; family.len()];
    for &k in &picked {
        weights[k] = share;
    }
    let spec = MixtureSpec::new(family.to_vec(), weights.clone())?;
    Ok((mixture(&spec), weights))
}

//! Serialization boundary: the JSON scenario document and the conversions
//! into validated core types.
//!
//! A scenario is one JSON object naming everything a command might need:
//! the sample space, named measures and claims, at most one penalty, an
//! optional one-period market, an optional parametric family with its
//! prior. Conversion is strict; every rejected document names the
//! invariant it broke rather than the serde path that tripped over it.
//!
//! Weight vectors accept two spellings: a plain array in atom order, or an
//! object keyed by atom label with omitted labels meaning zero. Unbounded
//! cap entries are spelled `null`. Curve penalties travel as their dense
//! sample table; an exact-formula curve serializes by sampling itself at
//! its own grid.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market::OnePeriodMarket;
use crate::measure::{Measure, MeasureError, SampleSpace};
use crate::mixture::{GeneratorKind, MixtureError, ParametricFamily};
use crate::penalty::{CurveMap, CurvePenalty, PenaltyError, PenaltySpec};
use crate::polytope::{PolytopeError, QSetPolytope};
use crate::risk::{Claim, RiskError};

#[derive(Debug, Error)]
pub enum WireError {
    #[error("unknown atom label {0:?}")]
    UnknownLabel(String),
    #[error("no measure named {0:?} in the scenario")]
    UnknownMeasure(String),
    #[error("no claim named {0:?} in the scenario")]
    UnknownClaim(String),
    #[error("{what} has {got} entries, the space has {want} atoms")]
    WeightCount { what: &'static str, got: usize, want: usize },
    #[error("the scenario document declares no {0}")]
    MissingSection(&'static str),
    #[error("a family prior needs as many weights as the parameter grid")]
    PriorShape,
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Penalty(#[from] PenaltyError),
    #[error(transparent)]
    Market(#[from] crate::market::MarketError),
    #[error(transparent)]
    Mixture(#[from] MixtureError),
    #[error(transparent)]
    Risk(#[from] RiskError),
}

/// Sample space: explicit labels, or a cell count for the unit grid.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum SpaceDto {
    Labels(Vec<String>),
    Grid { grid: usize },
}

impl SpaceDto {
    pub fn build(&self) -> Result<Arc<SampleSpace>, WireError> {
        Ok(match self {
            SpaceDto::Labels(labels) => SampleSpace::new(labels.clone())?,
            SpaceDto::Grid { grid } => SampleSpace::unit_grid(*grid),
        })
    }
}

/// Weights in atom order, or keyed by label with absent labels zero.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum WeightsDto {
    Array(Vec<f64>),
    Map(BTreeMap<String, f64>),
}

impl WeightsDto {
    pub fn build(
        &self,
        space: &Arc<SampleSpace>,
        what: &'static str,
    ) -> Result<Vec<f64>, WireError> {
        match self {
            WeightsDto::Array(v) => {
                if v.len() != space.len() {
                    return Err(WireError::WeightCount { what, got: v.len(), want: space.len() });
                }
                Ok(v.clone())
            }
            WeightsDto::Map(m) => {
                let mut w = vec![0.0; space.len()];
                for (label, &value) in m {
                    let i = space
                        .index_of(label)
                        .ok_or_else(|| WireError::UnknownLabel(label.clone()))?;
                    w[i] = value;
                }
                Ok(w)
            }
        }
    }
}

/// Equality rows, per-atom caps (`null` meaning unbounded), support mask.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct PolytopeDto {
    #[serde(default)]
    pub eq: Vec<(Vec<f64>, f64)>,
    #[serde(default)]
    pub ub: Option<Vec<Option<f64>>>,
    #[serde(default)]
    pub support: Option<Vec<bool>>,
}

impl PolytopeDto {
    pub fn build(&self, space: &Arc<SampleSpace>) -> Result<QSetPolytope, WireError> {
        let n = space.len();
        let upper = match &self.ub {
            None => vec![f64::INFINITY; n],
            Some(v) => {
                if v.len() != n {
                    return Err(WireError::WeightCount { what: "cap list", got: v.len(), want: n });
                }
                v.iter().map(|c| c.unwrap_or(f64::INFINITY)).collect()
            }
        };
        let support = match &self.support {
            None => vec![true; n],
            Some(s) => {
                if s.len() != n {
                    return Err(WireError::WeightCount {
                        what: "support mask",
                        got: s.len(),
                        want: n,
                    });
                }
                s.clone()
            }
        };
        Ok(QSetPolytope::new(space, self.eq.clone(), upper, support)?)
    }

    pub fn from_set(set: &QSetPolytope) -> Self {
        PolytopeDto {
            eq: set.eq_rows().to_vec(),
            ub: Some(
                set.upper()
                    .iter()
                    .map(|&c| if c.is_finite() { Some(c) } else { None })
                    .collect(),
            ),
            support: Some(set.support().to_vec()),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct TableEntryDto {
    pub weights: WeightsDto,
    pub value: f64,
}

/// Penalty variants, tagged by `type`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PenaltyDto {
    IndicatorZero {
        set: PolytopeDto,
    },
    Constant {
        set: PolytopeDto,
        value: f64,
    },
    Table {
        entries: Vec<TableEntryDto>,
    },
    Curve1d {
        grid: Vec<f64>,
        samples: Vec<Vec<f64>>,
        values: Vec<f64>,
        #[serde(default)]
        lo_open: bool,
        #[serde(default)]
        hi_open: bool,
        #[serde(default)]
        boundary: Vec<TableEntryDto>,
    },
}

fn build_entries(
    entries: &[TableEntryDto],
    space: &Arc<SampleSpace>,
) -> Result<Vec<(Measure, f64)>, WireError> {
    entries
        .iter()
        .map(|e| {
            let w = e.weights.build(space, "table entry")?;
            Ok((Measure::new(space, w)?, e.value))
        })
        .collect()
}

impl PenaltyDto {
    pub fn build(&self, space: &Arc<SampleSpace>) -> Result<PenaltySpec, WireError> {
        Ok(match self {
            PenaltyDto::IndicatorZero { set } => PenaltySpec::IndicatorZero(set.build(space)?),
            PenaltyDto::Constant { set, value } => {
                PenaltySpec::Constant { set: set.build(space)?, value: *value }
            }
            PenaltyDto::Table { entries } => {
                PenaltySpec::table(space, build_entries(entries, space)?)?
            }
            PenaltyDto::Curve1d { grid, samples, values, lo_open, hi_open, boundary } => {
                let curve = CurvePenalty::new(
                    space,
                    grid.clone(),
                    CurveMap::Sampled { weights: samples.clone(), alphas: values.clone() },
                    *lo_open,
                    *hi_open,
                    build_entries(boundary, space)?,
                )?;
                PenaltySpec::Curve1D(curve)
            }
        })
    }

    /// Exact-formula curves are pinned to their grid samples here.
    pub fn from_penalty(alpha: &PenaltySpec) -> Self {
        match alpha {
            PenaltySpec::IndicatorZero(set) => {
                PenaltyDto::IndicatorZero { set: PolytopeDto::from_set(set) }
            }
            PenaltySpec::Constant { set, value } => {
                PenaltyDto::Constant { set: PolytopeDto::from_set(set), value: *value }
            }
            PenaltySpec::Table { entries, .. } => PenaltyDto::Table {
                entries: entries
                    .iter()
                    .map(|(q, a)| TableEntryDto {
                        weights: WeightsDto::Array(q.weights().to_vec()),
                        value: *a,
                    })
                    .collect(),
            },
            PenaltySpec::Curve1D(curve) => {
                let grid = curve.grid().to_vec();
                let mut samples = Vec::with_capacity(grid.len());
                let mut values = Vec::with_capacity(grid.len());
                for &t in &grid {
                    let (w, a) = curve.at(t);
                    samples.push(w);
                    values.push(a);
                }
                PenaltyDto::Curve1d {
                    grid,
                    samples,
                    values,
                    lo_open: curve.lo_open(),
                    hi_open: curve.hi_open(),
                    boundary: curve
                        .boundary()
                        .iter()
                        .map(|(q, a)| TableEntryDto {
                            weights: WeightsDto::Array(q.weights().to_vec()),
                            value: *a,
                        })
                        .collect(),
                }
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct MarketDto {
    pub s0: f64,
    pub s1: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct FamilyDto {
    #[serde(default)]
    pub name: Option<String>,
    pub generator: String,
    #[serde(default)]
    pub gamma: Option<f64>,
    pub theta_grid: Vec<f64>,
}

impl FamilyDto {
    pub fn build(&self, space: &Arc<SampleSpace>) -> Result<ParametricFamily, WireError> {
        let kind = GeneratorKind::parse(&self.generator, self.gamma)?;
        let name = self.name.clone().unwrap_or_else(|| self.generator.clone());
        Ok(ParametricFamily::new(name, kind, self.theta_grid.clone(), space)?)
    }
}

/// The raw scenario document.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ScenarioDto {
    pub space: SpaceDto,
    #[serde(default)]
    pub measures: BTreeMap<String, WeightsDto>,
    #[serde(default)]
    pub reference: Option<String>,
    #[serde(default)]
    pub penalty: Option<PenaltyDto>,
    #[serde(default)]
    pub market: Option<MarketDto>,
    #[serde(default)]
    pub family: Option<FamilyDto>,
    #[serde(default)]
    pub prior: Option<Vec<f64>>,
    #[serde(default)]
    pub claims: BTreeMap<String, WeightsDto>,
}

/// The validated scenario, every section converted.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub space: Arc<SampleSpace>,
    pub measures: BTreeMap<String, Measure>,
    pub reference: Option<String>,
    pub penalty: Option<PenaltySpec>,
    pub market: Option<OnePeriodMarket>,
    pub family: Option<ParametricFamily>,
    pub prior: Option<Vec<f64>>,
    pub claims: BTreeMap<String, Claim>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioParseError> {
        let dto: ScenarioDto = serde_json::from_str(text)?;
        Ok(Self::build(&dto)?)
    }

    pub fn build(dto: &ScenarioDto) -> Result<Self, WireError> {
        let space = dto.space.build()?;
        let mut measures = BTreeMap::new();
        for (name, w) in &dto.measures {
            measures.insert(name.clone(), Measure::new(&space, w.build(&space, "measure")?)?);
        }
        if let Some(name) = &dto.reference {
            if !measures.contains_key(name) {
                return Err(WireError::UnknownMeasure(name.clone()));
            }
        }
        let penalty = dto.penalty.as_ref().map(|p| p.build(&space)).transpose()?;
        let market = dto
            .market
            .as_ref()
            .map(|m| OnePeriodMarket::new(&space, m.s0, m.s1.clone()))
            .transpose()?;
        let family = dto.family.as_ref().map(|f| f.build(&space)).transpose()?;
        if let (Some(prior), Some(fam)) = (&dto.prior, &family) {
            if prior.len() != fam.len() {
                return Err(WireError::PriorShape);
            }
        }
        let mut claims = BTreeMap::new();
        for (name, w) in &dto.claims {
            claims.insert(name.clone(), Claim::new(&space, w.build(&space, "claim")?)?);
        }
        Ok(Scenario {
            space,
            measures,
            reference: dto.reference.clone(),
            penalty,
            market,
            family,
            prior: dto.prior.clone(),
            claims,
        })
    }

    /// The reference measure: the one named by the document, else the one
    /// named "P", else the only measure present.
    pub fn reference_measure(&self) -> Result<&Measure, WireError> {
        if let Some(name) = &self.reference {
            return self
                .measures
                .get(name)
                .ok_or_else(|| WireError::UnknownMeasure(name.clone()));
        }
        if let Some(p) = self.measures.get("P") {
            return Ok(p);
        }
        if self.measures.len() == 1 {
            return Ok(self.measures.values().next().expect("nonempty map"));
        }
        Err(WireError::MissingSection("reference measure"))
    }

    pub fn claim(&self, name: &str) -> Result<&Claim, WireError> {
        self.claims.get(name).ok_or_else(|| WireError::UnknownClaim(name.to_string()))
    }

    pub fn penalty(&self) -> Result<&PenaltySpec, WireError> {
        self.penalty.as_ref().ok_or(WireError::MissingSection("penalty"))
    }

    pub fn market(&self) -> Result<&OnePeriodMarket, WireError> {
        self.market.as_ref().ok_or(WireError::MissingSection("market"))
    }
}

/// Parse failure: malformed JSON, or a well-formed document breaking an
/// invariant.
#[derive(Debug, Error)]
pub enum ScenarioParseError {
    #[error("scenario is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] WireError),
}

/// Label-keyed map of a measure's weights, for human-facing output.
pub fn measure_to_map(m: &Measure) -> BTreeMap<String, f64> {
    m.space()
        .labels()
        .iter()
        .zip(m.weights())
        .filter(|(_, &w)| w != 0.0)
        .map(|(l, &w)| (l.clone(), w))
        .collect()
}

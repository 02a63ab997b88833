//! Command bodies: operator evaluation, family suprema, and the
//! verification campaign, each returning one renderable report.

use std::fmt;
use std::fs;
use std::path::Path;

use riskmeter_core::market::{
    es_qset, es_sort_oracle, superhedge_price, var_oracle, worst_case_rho, MarketError,
};
use riskmeter_core::measure::{Measure, MeasureError};
use riskmeter_core::mixture::{mixture_measure, MixtureError};
use riskmeter_core::penalty::PenaltySpec;
use riskmeter_core::risk::{
    classical_representation_check, minimax_gap, rho_dual, rho_hat, rho_tilde,
    rho_version_inf, robust, Claim, RiskError, RiskValue, WhichOperator,
};
use riskmeter_core::verify::{
    run_axiom_suite, run_oracle_suite, run_order_suite, run_proposition_suite, Campaign,
};
use riskmeter_core::wire::{measure_to_map, Scenario, ScenarioParseError, WireError};

use crate::report::{sig, Report, Row};
use crate::Op;

/// Failure with its exit code: 2 validation, 3 solver, 4 unknown example.
#[derive(Debug)]
pub enum AppError {
    Validation(String),
    Solver(String),
    UnknownExample { id: String, known: Vec<&'static str> },
}

impl AppError {
    pub fn code(&self) -> u8 {
        match self {
            AppError::Validation(_) => 2,
            AppError::Solver(_) => 3,
            AppError::UnknownExample { .. } => 4,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Validation(m) => write!(f, "{m}"),
            AppError::Solver(m) => write!(f, "solver: {m}"),
            AppError::UnknownExample { id, known } => {
                write!(f, "unknown example {id:?}; known examples: {}", known.join(", "))
            }
        }
    }
}

impl From<ScenarioParseError> for AppError {
    fn from(e: ScenarioParseError) -> Self {
        AppError::Validation(e.to_string())
    }
}

impl From<WireError> for AppError {
    fn from(e: WireError) -> Self {
        AppError::Validation(e.to_string())
    }
}

impl From<MeasureError> for AppError {
    fn from(e: MeasureError) -> Self {
        AppError::Validation(e.to_string())
    }
}

impl From<RiskError> for AppError {
    fn from(e: RiskError) -> Self {
        match e {
            RiskError::Lp(_) | RiskError::NonConvergence { .. } => AppError::Solver(e.to_string()),
            other => AppError::Validation(other.to_string()),
        }
    }
}

impl From<MarketError> for AppError {
    fn from(e: MarketError) -> Self {
        match e {
            MarketError::Lp(_) => AppError::Solver(e.to_string()),
            other => AppError::Validation(other.to_string()),
        }
    }
}

impl From<MixtureError> for AppError {
    fn from(e: MixtureError) -> Self {
        match e {
            MixtureError::Risk(inner) => inner.into(),
            other => AppError::Validation(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<Scenario, AppError> {
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::Validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(Scenario::from_json(&text)?)
}

fn selected<'a>(
    sc: &'a Scenario,
    claim: Option<&str>,
) -> Result<Vec<(&'a str, &'a Claim)>, AppError> {
    match claim {
        Some(name) => {
            let (key, value) = sc
                .claims
                .get_key_value(name)
                .ok_or_else(|| AppError::Validation(format!("no claim named {name:?} in the scenario")))?;
            Ok(vec![(key.as_str(), value)])
        }
        None => {
            if sc.claims.is_empty() {
                return Err(AppError::Validation(
                    "the scenario document declares no claims".to_string(),
                ));
            }
            Ok(sc.claims.iter().map(|(k, v)| (k.as_str(), v)).collect())
        }
    }
}

fn with_argmax(row: Row, v: &RiskValue) -> Row {
    match &v.argmax {
        Some(q) => {
            let parts: Vec<String> = measure_to_map(q)
                .into_iter()
                .map(|(label, w)| format!("{label}:{}", sig(w)))
                .collect();
            row.with("argmax", parts.join(" "))
        }
        None => row,
    }
}

fn need_level(lambda: Option<f64>, op: &str) -> Result<f64, AppError> {
    lambda.ok_or_else(|| AppError::Validation(format!("the {op} operator needs --lambda")))
}

pub fn eval(
    path: &Path,
    claim: Option<&str>,
    op: Op,
    lambda: Option<f64>,
    a: f64,
) -> Result<Report, AppError> {
    let sc = load(path)?;
    let mut report = Report::new("eval");
    for (name, x) in selected(&sc, claim)? {
        let row = match op {
            Op::Rho => {
                let v = rho_dual(x, sc.penalty()?)?;
                with_argmax(Row::value(name, "rho", v.value), &v)
            }
            Op::RhoHat => {
                let v = rho_hat(x, sc.penalty()?, sc.reference_measure()?)?;
                with_argmax(Row::value(name, "rho_hat", v.value), &v)
            }
            Op::RhoP => {
                let v = rho_version_inf(x, sc.penalty()?, sc.reference_measure()?)?;
                with_argmax(Row::value(name, "rho_p", v.value), &v)
            }
            Op::RhoTilde => {
                let v = rho_tilde(x, sc.penalty()?, sc.reference_measure()?)?;
                with_argmax(Row::value(name, "rho_tilde", v.value), &v)
            }
            Op::Gap => {
                let g = minimax_gap(x, sc.penalty()?, sc.reference_measure()?)?;
                Row::value(name, "gap", g.gap)
                    .with("restricted", sig(g.restricted.value))
                    .with("version", sig(g.version_inf.value))
            }
            Op::Superhedge => {
                let (dual, plan) = superhedge_price(sc.market()?, sc.reference_measure()?, x)?;
                with_argmax(
                    Row::value(name, "superhedge", plan.x)
                        .with("dual", sig(dual.value))
                        .with("h", sig(plan.h)),
                    &dual,
                )
            }
            Op::Es => {
                let level = need_level(lambda, "es")?;
                let p = sc.reference_measure()?;
                let v = rho_dual(x, &PenaltySpec::IndicatorZero(es_qset(p, level)?))?;
                let sorted = es_sort_oracle(x, p, level)?;
                with_argmax(Row::value(name, "es", v.value).with("sort_oracle", sig(sorted)), &v)
            }
            Op::Var => {
                let level = need_level(lambda, "var")?;
                Row::value(name, "var", var_oracle(x, sc.reference_measure()?, level)?)
            }
            Op::Worst => Row::value(name, "worst", worst_case_rho(x, sc.reference_measure()?, a)?),
        };
        report.push(row);
    }
    Ok(report)
}

pub fn robust_family(
    path: &Path,
    claim: Option<&str>,
    op: Op,
    classical: Option<&str>,
) -> Result<Report, AppError> {
    let sc = load(path)?;
    let which = match op {
        Op::RhoHat => WhichOperator::Hat,
        Op::RhoP => WhichOperator::VersionInf,
        _ => {
            return Err(AppError::Validation(
                "robust ranges over rho_hat or rho_p".to_string(),
            ))
        }
    };
    let alpha = sc.penalty()?;
    let (members, labels): (Vec<Measure>, Vec<String>) = match &sc.family {
        Some(fam) => (
            fam.components()?.to_vec(),
            fam.theta_grid().iter().map(|t| format!("{}[theta={t}]", fam.name())).collect(),
        ),
        None => {
            if sc.measures.is_empty() {
                return Err(AppError::Validation(
                    "the scenario declares neither a family nor measures".to_string(),
                ));
            }
            (sc.measures.values().cloned().collect(), sc.measures.keys().cloned().collect())
        }
    };
    let mixture = match (&sc.family, &sc.prior) {
        (Some(fam), Some(prior)) => Some(mixture_measure(fam, prior)?),
        _ => None,
    };
    let mut report = Report::new("robust");
    for (name, x) in selected(&sc, claim)? {
        let fr = robust(x, alpha, &members, which)?;
        let mut row = Row::value(name, "family_sup", fr.value);
        if let (Some(k), true) = (fr.argmax_member, fr.value > f64::NEG_INFINITY) {
            row = row.with("argmax_member", labels[k].clone());
        }
        report.push(row);
        if let Some(mix) = &mixture {
            let mut closed = members.clone();
            closed.push(mix.clone());
            let cr = robust(x, alpha, &closed, which)?;
            let mut row = Row::value(name, "family_plus_mixture_sup", cr.value);
            if let (Some(k), true) = (cr.argmax_member, cr.value > f64::NEG_INFINITY) {
                let label =
                    if k == labels.len() { "mixture".to_string() } else { labels[k].clone() };
                row = row.with("argmax_member", label);
            }
            report.push(row);
        }
    }
    if let Some(refname) = classical {
        let p = sc.measures.get(refname).ok_or_else(|| {
            AppError::Validation(format!("no measure named {refname:?} in the scenario"))
        })?;
        let claims: Vec<Claim> =
            selected(&sc, claim)?.into_iter().map(|(_, c)| c.clone()).collect();
        let rep = classical_representation_check(alpha, &members, p, &claims)?;
        report.push(
            Row::text("classical", "representation", if rep.holds { "holds" } else { "fails" })
                .passed(rep.holds)
                .with("equivalent", rep.equivalence.holds().to_string())
                .with("carrier_identity", rep.carrier_identity.to_string()),
        );
    }
    Ok(report)
}

pub fn verify(instances: usize, seed_flag: u64) -> Result<Report, AppError> {
    if instances == 0 {
        return Err(AppError::Validation("--instances must be at least 1".to_string()));
    }
    let seed = match std::env::var("RISKMETER_SEED") {
        Ok(text) => text.trim().parse::<u64>().map_err(|_| {
            AppError::Validation(format!(
                "RISKMETER_SEED must be an unsigned integer, got {text:?}"
            ))
        })?,
        Err(_) => seed_flag,
    };
    let campaign = |n: usize| Campaign { seed, instances: n, tolerance: 1e-8 };
    let suites = [
        run_axiom_suite(&campaign(instances)),
        run_order_suite(&campaign(instances)),
        run_proposition_suite(&campaign(instances)),
        run_oracle_suite(&campaign(instances.min(50))),
    ];
    let mut report = Report::new("verify");
    for suite in &suites {
        for e in suite.entries.iter().filter(|e| !e.pass) {
            report.push(
                Row::text(format!("{}#{}", suite.suite, e.id), e.property.clone(), e.details.clone())
                    .passed(false),
            );
        }
        report.push(
            Row::text(suite.suite.clone(), "checks", suite.entries.len().to_string())
                .passed(suite.all_pass())
                .with("seed", seed.to_string())
                .with("failures", suite.failures().to_string()),
        );
    }
    Ok(report)
}

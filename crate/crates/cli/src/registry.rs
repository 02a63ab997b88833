//! Packaged examples: each entry rebuilds its fixture from scratch,
//! computes the numbers the library promises for it, and reports computed
//! against expected, one PASS/FAIL row per comparison.

use riskmeter_core::fixtures;
use riskmeter_core::market::{es_qset, es_sort_oracle, superhedge_price, var_oracle};
use riskmeter_core::measure::Measure;
use riskmeter_core::mixture::{mixture_classical_check, mixture_measure, theta_diagnostics};
use riskmeter_core::penalty::PenaltySpec;
use riskmeter_core::risk::{
    claim_space_check, minimax_gap, rho_hat, rho_version_inf, robust, Claim, WhichOperator,
};

use crate::ops::AppError;
use crate::report::{sig, Report, Row};

type Example = fn(&mut Report) -> Result<(), AppError>;

const REGISTRY: &[(&str, Example)] = &[
    ("trinomial-superhedge", trinomial_superhedge),
    ("quadratic-gap", quadratic_gap),
    ("es-trinomial", es_trinomial),
    ("dirac-gap", dirac_gap),
    ("var-es-1overN", var_es_1over_n),
    ("mixture-lndensity", mixture_lndensity),
    ("theta-null", theta_null),
    ("claim-space", claim_space),
];

pub fn reproduce(id: Option<&str>) -> Result<Report, AppError> {
    let mut report = Report::new("reproduce");
    match id {
        Some(wanted) => {
            let Some((_, run)) = REGISTRY.iter().find(|(name, _)| *name == wanted) else {
                return Err(AppError::UnknownExample {
                    id: wanted.to_string(),
                    known: REGISTRY.iter().map(|(name, _)| *name).collect(),
                });
            };
            run(&mut report)?;
        }
        None => {
            for (_, run) in REGISTRY {
                run(&mut report)?;
            }
        }
    }
    Ok(report)
}

/// Call on the three-scenario market: price 2/3, and both operators reduce
/// to the expectation under the unique dominated martingale weighting.
fn trinomial_superhedge(report: &mut Report) -> Result<(), AppError> {
    let (space, market, uniform) = fixtures::trinomial_market();
    let p = Measure::new(&space, vec![0.5, 0.0, 0.5])?;
    let call = fixtures::trinomial_call(&space);
    let (dual, plan) = superhedge_price(&market, &p, &call)?;
    report.push(
        Row::check("trinomial-superhedge", "price", plan.x, 2.0 / 3.0, 1e-9)
            .with("dual", sig(dual.value))
            .with("h", sig(plan.h)),
    );
    let carrier = riskmeter_core::market::martingale_qset(&market, &uniform)?;
    let alpha = PenaltySpec::IndicatorZero(carrier);
    for (name, payoff) in [("call", vec![2.0, 1.0, 0.0]), ("skew", vec![3.0, 1.0, 2.0])] {
        let x = Claim::new(&space, payoff.clone())?;
        let want = -(payoff[0] / 3.0 + 2.0 * payoff[2] / 3.0);
        let hat = rho_hat(&x, &alpha, &p)?;
        let ver = rho_version_inf(&x, &alpha, &p)?;
        report.push(Row::check("trinomial-superhedge", format!("restricted({name})"), hat.value, want, 1e-8));
        report.push(Row::check("trinomial-superhedge", format!("version({name})"), ver.value, want, 1e-8));
    }
    Ok(())
}

/// Curve penalty approaching its excluded left endpoint: the restricted
/// value stays 0 while the version infimum reaches 1.
fn quadratic_gap(report: &mut Report) -> Result<(), AppError> {
    let (space, alpha, p) = fixtures::quadratic_curve_instance();
    let zero = Claim::new(&space, vec![0.0; 3])?;
    let g = minimax_gap(&zero, &alpha, &p)?;
    report.push(Row::check("quadratic-gap", "restricted", g.restricted.value, 0.0, 1e-6));
    report.push(Row::check("quadratic-gap", "version", g.version_inf.value, 1.0, 1e-6));
    report.push(Row::check("quadratic-gap", "gap", g.gap, 1.0, 1e-6));
    Ok(())
}

/// Tail averaging at level 2/3 under a two-point reference: both operators
/// average the two charged scenarios.
fn es_trinomial(report: &mut Report) -> Result<(), AppError> {
    let (space, alpha, _) = fixtures::trinomial_tail_penalty();
    let p = Measure::new(&space, vec![0.5, 0.0, 0.5])?;
    for (name, payoff) in [("call", vec![2.0, 1.0, 0.0]), ("skew", vec![3.0, 1.0, 2.0])] {
        let x = Claim::new(&space, payoff.clone())?;
        let want = -(payoff[0] + payoff[2]) / 2.0;
        let hat = rho_hat(&x, &alpha, &p)?;
        let ver = rho_version_inf(&x, &alpha, &p)?;
        report.push(Row::check("es-trinomial", format!("restricted({name})"), hat.value, want, 1e-8));
        report.push(Row::check("es-trinomial", format!("version({name})"), ver.value, want, 1e-8));
    }
    Ok(())
}

/// Two-atom jump penalty: the gap equals 1 for every height of the claim
/// on the uncharged atom.
fn dirac_gap(report: &mut Report) -> Result<(), AppError> {
    let (space, alpha, p) = fixtures::unit_gap_instance();
    for k in [0.0, 1.0, -2.0] {
        let x = Claim::new(&space, vec![k, 0.0])?;
        let g = minimax_gap(&x, &alpha, &p)?;
        report.push(
            Row::check("dirac-gap", format!("gap(k={k})"), g.gap, 1.0, 1e-9)
                .with("restricted", sig(g.restricted.value))
                .with("version", sig(g.version_inf.value)),
        );
    }
    Ok(())
}

/// Twenty one-cell blocks, tail level 1/10: every block alone is blind to
/// the loss, the mixture prices it at 1, and the quantile oracles agree.
fn var_es_1over_n(report: &mut Report) -> Result<(), AppError> {
    let (space, family, prior) = fixtures::block_family(10);
    let mix = mixture_measure(&family, &prior)?;
    let alpha = PenaltySpec::IndicatorZero(es_qset(&mix, 0.1)?);
    let x = fixtures::block_claim(&space);
    let members = family.components()?.to_vec();
    let blind = robust(&x, &alpha, &members, WhichOperator::Hat)?;
    report.push(Row::check("var-es-1overN", "members_sup", blind.value, f64::NEG_INFINITY, 0.0));
    let mut closed = members;
    closed.push(mix.clone());
    let seeing = robust(&x, &alpha, &closed, WhichOperator::Hat)?;
    report.push(Row::check("var-es-1overN", "with_mixture_sup", seeing.value, 1.0, 1e-9));
    report.push(Row::check("var-es-1overN", "var", var_oracle(&x, &mix, 0.1)?, 1.0, 1e-12));
    report.push(Row::check("var-es-1overN", "es", es_sort_oracle(&x, &mix, 0.1)?, 1.0, 1e-12));
    Ok(())
}

/// Mass of the ramp mixture below c against the closed form c(1 - ln c).
fn mixture_lndensity(report: &mut Report) -> Result<(), AppError> {
    let (_, family, prior) = fixtures::ramp_family(10_000, 2000);
    let mix = mixture_measure(&family, &prior)?;
    for c in [0.1_f64, 0.5, 0.9] {
        let cells = (c * 10_000.0).round() as usize;
        let got: f64 = mix.weights()[..cells].iter().sum();
        let want = c * (1.0 - c.ln());
        report.push(Row::check("mixture-lndensity", format!("mass_below({c})"), got, want, 1e-3));
    }
    Ok(())
}

/// Ramp family with one point mass on a never-covered cell: the point mass
/// escapes domination but carries zero prior, and the single-measure
/// comparison holds on the dominated parameters.
fn theta_null(report: &mut Report) -> Result<(), AppError> {
    let (space, family, prior) = fixtures::hybrid_family();
    let mix = mixture_measure(&family, &prior)?;
    let diag = theta_diagnostics(&family, &prior, &mix)?;
    report.push(
        Row::text("theta-null", "escaping_indices", format!("{:?}", diag.theta_null))
            .passed(diag.theta_null == vec![9])
            .with("expected", "[9]".to_string()),
    );
    report.push(Row::check("theta-null", "escaping_prior_mass", diag.nu_null_mass, 0.0, 0.0));
    let alpha = PenaltySpec::IndicatorZero(es_qset(&mix, 0.3)?);
    let n = space.len();
    let claims = vec![
        Claim::new(&space, (0..n).map(|i| if 2 * i < n { -1.0 } else { 0.0 }).collect())?,
        Claim::new(&space, (0..n).map(|i| i as f64 / n as f64).collect())?,
    ];
    let rep = mixture_classical_check(&family, &prior, &alpha, &claims)?;
    report.push(
        Row::text("theta-null", "classical_comparison", if rep.holds { "holds" } else { "fails" })
            .passed(rep.holds)
            .with("dominated_parameters", rep.theta_one.len().to_string()),
    );
    Ok(())
}

/// Reciprocal payoff on dyadic bands: each member's essential bound stays
/// fixed as the grid refines while the reference bound doubles per level.
fn claim_space(report: &mut Report) -> Result<(), AppError> {
    let mut first_sups: Option<Vec<f64>> = None;
    let mut stable = true;
    for levels in [4u32, 6, 8] {
        let (space, family, prior) = fixtures::dyadic_family(levels);
        let mix = mixture_measure(&family, &prior)?;
        let payoff = fixtures::reciprocal_payoff(&space);
        let check = claim_space_check(&payoff, family.components()?, &mix);
        let sups: Vec<String> = check.member_sups.iter().map(|&s| sig(s)).collect();
        report.push(
            Row::check(
                "claim-space",
                format!("reference_sup(levels={levels})"),
                check.reference_sup,
                (1u64 << levels) as f64,
                1e-9,
            )
            .with("member_sups", sups.join(" "))
            .with("bounded_per_member", check.in_intersection_space.to_string()),
        );
        match &first_sups {
            None => first_sups = Some(check.member_sups.clone()),
            Some(first) => {
                stable &= first
                    .iter()
                    .zip(check.member_sups.iter())
                    .all(|(a, b)| (a - b).abs() <= 1e-9);
            }
        }
    }
    report.push(
        Row::text("claim-space", "member_sups_stable_across_levels", stable.to_string())
            .passed(stable),
    );
    Ok(())
}

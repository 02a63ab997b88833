//! Acceptance gate: every closed-form instance and bulk property the
//! library promises, one test per promise, ordered by the `aNN` prefix so
//! the report reads as a checklist.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use riskmeter_core::fixtures;
use riskmeter_core::market::{
    es_qset, es_sort_oracle, superhedge_price, var_oracle, OnePeriodMarket,
};
use riskmeter_core::measure::{halmos_savage_equivalent, Measure, SampleSpace};
use riskmeter_core::mixture::{mixture_classical_check, theta_diagnostics};
use riskmeter_core::penalty::{CurveMap, CurvePenalty, PenaltySpec};
use riskmeter_core::polytope::QSetPolytope;
use riskmeter_core::risk::{
    classical_representation_check, minimax_gap, rho_dual, rho_hat, rho_tilde,
    rho_version_inf, robust, Claim, WhichOperator,
};
use riskmeter_core::verify::{
    run_axiom_suite, run_oracle_suite, run_order_suite, run_proposition_suite, Campaign,
};

fn gen_weights(rng: &mut ChaCha8Rng, mask: &[bool]) -> Vec<f64> {
    let mut w: Vec<f64> = mask
        .iter()
        .map(|&b| if b { rng.gen_range(0.1..1.0) } else { 0.0 })
        .collect();
    let total: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= total;
    }
    w
}

fn gen_measure(rng: &mut ChaCha8Rng, space: &Arc<SampleSpace>) -> Measure {
    let n = space.len();
    let mask = loop {
        let m: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.7)).collect();
        if m.iter().any(|&b| b) {
            break m;
        }
    };
    Measure::new(space, gen_weights(rng, &mask)).expect("normalized weights")
}

fn gen_claim(rng: &mut ChaCha8Rng, space: &Arc<SampleSpace>) -> Claim {
    let payoff = (0..space.len()).map(|_| rng.gen_range(-10.0..10.0)).collect();
    Claim::new(space, payoff).expect("finite payoff")
}

fn gen_caps_set(rng: &mut ChaCha8Rng, space: &Arc<SampleSpace>) -> QSetPolytope {
    let n = space.len();
    loop {
        let caps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.25..1.3)).collect();
        if caps.iter().sum::<f64>() >= 1.1 {
            return QSetPolytope::new(space, Vec::new(), caps, vec![true; n])
                .expect("cap rows");
        }
    }
}

fn gen_curve(rng: &mut ChaCha8Rng, space: &Arc<SampleSpace>) -> PenaltySpec {
    let n = space.len();
    let points = rng.gen_range(3..=6);
    let grid: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let weights: Vec<Vec<f64>> =
        (0..points).map(|_| gen_weights(rng, &vec![true; n])).collect();
    let alphas: Vec<f64> = (0..points).map(|_| rng.gen_range(-2.0..0.0)).collect();
    let lo_open = rng.gen_bool(0.3);
    let hi_open = rng.gen_bool(0.3);
    let boundary = if rng.gen_bool(0.3) {
        vec![(gen_measure(rng, space), rng.gen_range(-1.0..1.0))]
    } else {
        Vec::new()
    };
    let curve = CurveMap::Sampled { weights, alphas };
    PenaltySpec::Curve1D(
        CurvePenalty::new(space, grid, curve, lo_open, hi_open, boundary)
            .expect("increasing grid"),
    )
}

fn gen_penalty(rng: &mut ChaCha8Rng, space: &Arc<SampleSpace>) -> PenaltySpec {
    match rng.gen_range(0..4) {
        0 => PenaltySpec::IndicatorZero(gen_caps_set(rng, space)),
        1 => PenaltySpec::Constant {
            set: gen_caps_set(rng, space),
            value: rng.gen_range(-1.0..1.0),
        },
        2 => {
            let k = rng.gen_range(1..=4);
            let entries = (0..k)
                .map(|_| (gen_measure(rng, space), rng.gen_range(-2.0..2.0)))
                .collect();
            PenaltySpec::table(space, entries).expect("finite table")
        }
        _ => gen_curve(rng, space),
    }
}

#[test]
fn a01_pinned_martingale_closed_form() {
    let started = Instant::now();
    let (space, market, uniform) = fixtures::trinomial_market();
    let carrier = riskmeter_core::market::martingale_qset(&market, &uniform).unwrap();
    let alpha = PenaltySpec::IndicatorZero(carrier);
    let p = Measure::new(&space, vec![0.5, 0.0, 0.5]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let x = gen_claim(&mut rng, &space);
        let want = -(x.payoff()[0] / 3.0 + 2.0 * x.payoff()[2] / 3.0);
        let hat = rho_hat(&x, &alpha, &p).unwrap();
        let ver = rho_version_inf(&x, &alpha, &p).unwrap();
        worst = worst.max((hat.value - want).abs()).max((ver.value - want).abs());
    }
    assert!(worst <= 1e-8, "largest deviation {worst:.3e}");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("restricted and version operators both match -(x1/3 + 2 x3/3); worst {worst:.3e}, {elapsed:?}");
}

#[test]
fn a02_excluded_infimum_point_splits_the_operators() {
    let started = Instant::now();
    let (space, alpha, p) = fixtures::quadratic_curve_instance();
    let zero = Claim::new(&space, vec![0.0; 3]).unwrap();
    let hat = rho_hat(&zero, &alpha, &p).unwrap();
    let ver = rho_version_inf(&zero, &alpha, &p).unwrap();
    assert!(hat.value.abs() <= 1e-6, "restricted value {}", hat.value);
    assert!((ver.value - 1.0).abs() <= 1e-6, "version value {}", ver.value);
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("restricted 0, version 1 at the zero claim; {elapsed:?}");
}

#[test]
fn a03_tail_average_picks_the_worst_pair() {
    let (space, alpha, _) = fixtures::trinomial_tail_penalty();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let x = gen_claim(&mut rng, &space);
        let v = rho_dual(&x, &alpha).unwrap();
        let pairs = [(0, 1), (0, 2), (1, 2)];
        let want = pairs
            .iter()
            .map(|&(i, j)| -(x.payoff()[i] + x.payoff()[j]) / 2.0)
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((v.value - want).abs());
    }
    assert!(worst <= 1e-8, "largest deviation {worst:.3e}");
    println!("cap carrier at level 2/3 averages the two worst scenarios; worst {worst:.3e}");
}

#[test]
fn a04_tail_average_program_matches_the_sorting_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let space = SampleSpace::indexed(rng.gen_range(2..=8));
        let p = gen_measure(&mut rng, &space);
        let lambda = rng.gen_range(0.05..=1.0);
        let x = gen_claim(&mut rng, &space);
        let sorted = es_sort_oracle(&x, &p, lambda).unwrap();
        let alpha = PenaltySpec::IndicatorZero(es_qset(&p, lambda).unwrap());
        let dual = rho_dual(&x, &alpha).unwrap();
        worst = worst.max((sorted - dual.value).abs());
    }
    assert!(worst <= 1e-9, "largest deviation {worst:.3e}");
    println!("1000 random levels and weightings agree to {worst:.3e}");
}

#[test]
fn a05_hedging_duality_closes() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut worst = 0.0_f64;
    for _ in 0..500 {
        let space = SampleSpace::indexed(rng.gen_range(2..=6));
        let p = gen_measure(&mut rng, &space);
        let s1: Vec<f64> = (0..space.len()).map(|_| rng.gen_range(0.5..5.0)).collect();
        let support = p.support();
        let (lo, hi) = support.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &i| {
            (a.min(s1[i]), b.max(s1[i]))
        });
        let s0 = if hi - lo < 1e-9 {
            lo
        } else {
            lo + rng.gen_range(0.15..0.85) * (hi - lo)
        };
        let market = OnePeriodMarket::new(&space, s0, s1.clone()).unwrap();
        let x = gen_claim(&mut rng, &space);
        let (dual, plan) = superhedge_price(&market, &p, &x).unwrap();
        for &i in support.iter() {
            let covered = plan.x + plan.h * (s1[i] - s0) - x.payoff()[i];
            assert!(covered >= -1e-8, "hedge misses scenario {i} by {covered:.3e}");
        }
        worst = worst.max((plan.x - dual.value).abs());
    }
    assert!(worst <= 1e-8, "largest duality gap {worst:.3e}");
    println!("500 random arbitrage-free markets price equal on both sides; worst {worst:.3e}");
}

#[test]
fn a06_swapped_order_collapses_to_the_restriction() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut worst = 0.0_f64;
    for step in 0..1000 {
        let space = SampleSpace::indexed(rng.gen_range(2..=8));
        let p = gen_measure(&mut rng, &space);
        let alpha = gen_penalty(&mut rng, &space);
        let x = gen_claim(&mut rng, &space);
        let tilde = rho_tilde(&x, &alpha, &p).unwrap();
        let hat = rho_hat(&x, &alpha, &p).unwrap();
        let ver = rho_version_inf(&x, &alpha, &p).unwrap();
        match (tilde.is_neg_infinity(), hat.is_neg_infinity()) {
            (true, true) => {}
            (false, false) => {
                let d = (tilde.value - hat.value).abs();
                assert!(d <= 1e-10, "step {step}: swapped {} vs restricted {}", tilde.value, hat.value);
                worst = worst.max(d);
            }
            other => panic!("step {step}: operators disagree in kind: {other:?}"),
        }
        if !hat.is_neg_infinity() {
            assert!(
                !ver.is_neg_infinity() && hat.value <= ver.value + 1e-8,
                "step {step}: restricted {} above version {}",
                hat.value,
                ver.value
            );
        }
    }
    println!("1000 random penalties: swap agrees to {worst:.3e} and never exceeds the version value");
}

#[test]
fn a07_polytope_penalties_close_the_gap_and_the_jump_opens_it() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut worst = 0.0_f64;
    for _ in 0..500 {
        let space = SampleSpace::indexed(rng.gen_range(2..=8));
        let p = gen_measure(&mut rng, &space);
        let alpha = if rng.gen_bool(0.5) {
            PenaltySpec::IndicatorZero(gen_caps_set(&mut rng, &space))
        } else {
            PenaltySpec::Constant {
                set: gen_caps_set(&mut rng, &space),
                value: rng.gen_range(-1.0..1.0),
            }
        };
        let x = gen_claim(&mut rng, &space);
        let g = minimax_gap(&x, &alpha, &p).unwrap();
        assert!(g.gap.abs() <= 1e-8, "gap {:.3e}", g.gap);
        worst = worst.max(g.gap.abs());
    }
    let (space, alpha, p) = fixtures::unit_gap_instance();
    for k in [0.0, 1.0, -2.0] {
        let x = Claim::new(&space, vec![k, 0.0]).unwrap();
        let g = minimax_gap(&x, &alpha, &p).unwrap();
        assert!((g.gap - 1.0).abs() <= 1e-9, "jump gap {} at k={k}", g.gap);
    }
    println!("500 polytope penalties close to {worst:.3e}; the jump penalty opens exactly 1");
}

#[test]
fn a08_certificate_placement_and_operator_order_hold() {
    let prop = run_proposition_suite(&Campaign { seed: 108, instances: 200, tolerance: 1e-8 });
    let order = run_order_suite(&Campaign { seed: 1080, instances: 200, tolerance: 1e-8 });
    let bad: Vec<_> = prop
        .entries
        .iter()
        .chain(order.entries.iter())
        .filter(|e| !e.pass)
        .collect();
    assert!(bad.is_empty(), "failing entries: {bad:?}");
    println!(
        "200 instances each: {} placement checks and {} ordering checks, all passing",
        prop.entries.len(),
        order.entries.len()
    );
}

#[test]
fn a09_averaged_representative_carries_the_reference_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    for _ in 0..1000 {
        let space = SampleSpace::indexed(rng.gen_range(2..=8));
        let p = gen_measure(&mut rng, &space);
        let mask = p.support_mask();
        let mut family = vec![p.clone()];
        for _ in 0..rng.gen_range(1..=3) {
            family.push(Measure::new(&space, gen_weights(&mut rng, &mask)).unwrap());
        }
        let (averaged, _) = halmos_savage_equivalent(&family, &p).unwrap();
        assert_eq!(averaged.support(), p.support(), "support changed under averaging");
    }

    let space = SampleSpace::indexed(5);
    let mut rng = ChaCha8Rng::seed_from_u64(1090);
    let p = Measure::uniform(&space);
    let family = vec![
        p.clone(),
        Measure::new(&space, vec![0.4, 0.3, 0.1, 0.1, 0.1]).unwrap(),
        Measure::new(&space, vec![0.05, 0.05, 0.3, 0.3, 0.3]).unwrap(),
    ];
    let alpha = PenaltySpec::IndicatorZero(
        QSetPolytope::new(&space, Vec::new(), vec![1.0; 5], vec![true; 5]).unwrap(),
    );
    let claims: Vec<Claim> = (0..100).map(|_| gen_claim(&mut rng, &space)).collect();
    let report = classical_representation_check(&alpha, &family, &p, &claims).unwrap();
    assert!(report.equivalence.holds(), "family not equivalent to its reference");
    assert!(report.carrier_identity, "carrier certificates escaped the family");
    assert!(report.holds, "some claim comparison failed: {:?}",
        report.comparisons.iter().find(|c| !c.passes()));
    println!("1000 averaged representatives keep the support; 100-claim comparison holds");
}

#[test]
fn a10_every_block_is_blind_but_their_mixture_is_not() {
    let (space, family, prior) = fixtures::block_family(10);
    let mix = riskmeter_core::mixture::mixture_measure(&family, &prior).unwrap();
    let alpha = PenaltySpec::IndicatorZero(es_qset(&mix, 0.1).unwrap());
    let x = fixtures::block_claim(&space);

    let members: Vec<Measure> = (0..family.len()).map(|k| family.component(k)).collect();
    for (k, member) in members.iter().enumerate() {
        let v = rho_hat(&x, &alpha, member).unwrap();
        assert!(v.is_neg_infinity(), "block {k} unexpectedly feasible: {}", v.value);
    }
    let at_mix = rho_hat(&x, &alpha, &mix).unwrap();
    assert!((at_mix.value - 1.0).abs() <= 1e-9, "mixture value {}", at_mix.value);

    let blind = robust(&x, &alpha, &members, WhichOperator::Hat).unwrap();
    assert!(blind.value == f64::NEG_INFINITY, "family supremum {}", blind.value);
    let mut closed = members.clone();
    closed.push(mix.clone());
    let seeing = robust(&x, &alpha, &closed, WhichOperator::Hat).unwrap();
    assert!((seeing.value - 1.0).abs() <= 1e-9, "closure supremum {}", seeing.value);
    assert_eq!(seeing.argmax_member, Some(members.len()));

    assert!((var_oracle(&x, &mix, 0.1).unwrap() - 1.0).abs() <= 1e-12);
    assert!((es_sort_oracle(&x, &mix, 0.1).unwrap() - 1.0).abs() <= 1e-12);
    println!("20 blocks all bottom out; adjoining their mixture jumps the supremum to 1");
}

#[test]
fn a11_ramp_mixture_mass_matches_the_closed_form() {
    let (_, family, prior) = fixtures::ramp_family(10_000, 2000);
    let mix = riskmeter_core::mixture::mixture_measure(&family, &prior).unwrap();
    let mut worst = 0.0_f64;
    for c in [0.1_f64, 0.5, 0.9] {
        let cells = (c * 10_000.0).round() as usize;
        let got: f64 = mix.weights()[..cells].iter().sum();
        let want = c * (1.0 - c.ln());
        worst = worst.max((got - want).abs());
        assert!((got - want).abs() <= 1e-3, "mass below {c}: {got} vs {want}");
    }
    println!("mass below c matches c(1 - ln c) to {worst:.3e} on a 10000-cell grid");
}

#[test]
fn a12_hybrid_family_isolates_its_null_parameters() {
    let (space, family, prior) = fixtures::hybrid_family();
    let mix = riskmeter_core::mixture::mixture_measure(&family, &prior).unwrap();
    let diag = theta_diagnostics(&family, &prior, &mix).unwrap();
    assert_eq!(diag.theta_null, vec![9], "escaping parameters {:?}", diag.theta_null);
    assert_eq!(diag.nu_null_mass, 0.0, "null mass {}", diag.nu_null_mass);

    let alpha = PenaltySpec::IndicatorZero(es_qset(&mix, 0.3).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(112);
    let claims = vec![gen_claim(&mut rng, &space), gen_claim(&mut rng, &space)];
    let report = mixture_classical_check(&family, &prior, &alpha, &claims).unwrap();
    assert_eq!(report.theta_one.len(), 9);
    assert!(report.holds, "comparison failed: {:?}",
        report.comparisons.iter().find(|c| !c.passes()));
    println!("point mass at the uncovered cell escapes at zero prior; comparisons hold");
}

#[test]
fn a13_operator_axioms_survive_a_thousand_instances() {
    let report = run_axiom_suite(&Campaign { seed: 113, instances: 1000, tolerance: 1e-8 });
    let bad: Vec<_> = report.entries.iter().filter(|e| !e.pass).collect();
    assert!(bad.is_empty(), "failing entries: {bad:?}");
    println!("1000 instances, {} axiom checks, all passing", report.entries.len());
}

#[test]
fn a14_grid_scans_agree_with_the_programs() {
    let report = run_oracle_suite(&Campaign { seed: 114, instances: 50, tolerance: 5e-2 });
    let bad: Vec<_> = report.entries.iter().filter(|e| !e.pass).collect();
    assert!(bad.is_empty(), "failing entries: {bad:?}");
    println!("50 instances, {} grid cross-checks, all passing", report.entries.len());
}

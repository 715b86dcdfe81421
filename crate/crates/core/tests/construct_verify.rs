mod common;

use common::logistic_strategy;
use proptest::prelude::*;
use proptest::strategy::Strategy as _;
use qre_core::characterize::{
    complete_sqre_compromise, construct_qre, construct_sqre_symmetric, qre_indifferent_set,
    sqre_indifferent_set, vd_mean_from_indifferent_type, ConstructionStyle, SymmetricExtension,
    TailProfile,
};
use qre_core::verify::{
    recover_quantal_response, verify_qre, verify_sqre, ReasonCode, CONSTRUCTED_TOL,
};
use qre_core::{GameSpec, PiecewiseLinear, Strategy};

fn style() -> impl proptest::strategy::Strategy<Value = ConstructionStyle> {
    (1e-4f64..2e-2, 0.05f64..0.95).prop_map(|(w, f)| ConstructionStyle {
        moment: None,
        ramp_width: w,
        ramp_fraction: f,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn vd_constructions_verify(b in 1.01f64..1.99, u in 0.01f64..0.99, st in style()) {
        let game = GameSpec::volunteers_dilemma(b).unwrap();
        let r = qre_indifferent_set(&game);
        let sigma = construct_qre(&game, r.lower + u * (r.upper - r.lower), &st).unwrap();
        let rep = verify_qre(&game, &sigma, CONSTRUCTED_TOL);
        prop_assert!(rep.is_qre(), "{:?}", rep.reasons);

        let s = sqre_indifferent_set(&game);
        let t = s.lower + u * (s.upper - s.lower);
        let sigma = construct_sqre_symmetric(&game, t, &st).unwrap();
        let rep = verify_sqre(&game, &sigma, CONSTRUCTED_TOL);
        prop_assert!(rep.is_sqre(), "{:?}", rep.reasons);
        prop_assert!((sigma.mean() - vd_mean_from_indifferent_type(b, t)).abs() < 1e-10);
        prop_assert!((sigma.mean() - (1.0 - t / b)).abs() < 1e-10);
    }

    #[test]
    fn cg_constructions_verify(m in 0.05f64..=0.5, u in 0.01f64..0.99, st in style()) {
        let game = GameSpec::compromise_game(m).unwrap();
        let sigma = construct_qre(&game, u * m, &st).unwrap();
        let rep = verify_qre(&game, &sigma, CONSTRUCTED_TOL);
        prop_assert!(rep.is_qre(), "{:?}", rep.reasons);
    }

    #[test]
    fn gg_constructions_verify(
        k in 0.05f64..0.45,
        c in 0.05f64..0.5,
        eps in 0.02f64..0.2,
        u in 0.01f64..0.99,
        st in style(),
    ) {
        let Ok(game) = GameSpec::global_game(k, c, eps) else { return Ok(()) };
        let r = qre_indifferent_set(&game);
        // Types whose window leaves [0, 1] are rejected by construction.
        if let Ok(sigma) = construct_qre(&game, r.lower + u * (r.upper - r.lower), &st) {
            let rep = verify_qre(&game, &sigma, CONSTRUCTED_TOL);
            prop_assert!(rep.is_qre(), "{:?}", rep.reasons);
        }
        let t = sqre_indifferent_set(&game).lower;
        if let Ok(sigma) = construct_sqre_symmetric(&game, t, &st) {
            let rep = verify_sqre(&game, &sigma, CONSTRUCTED_TOL);
            prop_assert!(rep.is_sqre(), "{:?}", rep.reasons);
        }
    }

    #[test]
    fn extension_pieces_integrate_exactly(
        s in 0.05f64..0.5,
        top in 0.55f64..0.95,
        kink in 0.2f64..0.8,
        partition in 1usize..64,
    ) {
        let mid = 0.5 + (top - 0.5) * 0.6;
        let lower = PiecewiseLinear::new(vec![(0.0, top), (kink * s, mid), (s, 0.5)]).unwrap();
        let ext = SymmetricExtension::build(&lower, partition).unwrap();
        let tr = &ext.trace;
        for t in 0..partition {
            let area = ext.segment.integral(tr.vertices[t].0, tr.vertices[t + 1].0).unwrap();
            prop_assert!((area - tr.increments[t]).abs() < 1e-13);
            // σ(s_t) = 1 - σ(x_t) at vertices.
            prop_assert!((lower.eval(tr.types[t + 1]).unwrap() - (1.0 - tr.vertices[t + 1].1)).abs() < 1e-12);
            prop_assert!(tr.steps[t] > tr.types[t] - tr.types[t + 1]);
        }
    }

    #[test]
    fn verdicts_are_monotone_in_tolerance(
        center in 0.4f64..0.8,
        slope in 2.0f64..30.0,
        tols in prop::collection::vec(1e-12f64..1.0, 2..6),
    ) {
        let game = GameSpec::volunteers_dilemma(1.5).unwrap();
        let sigma = logistic_strategy(center, -slope);
        let mut tols = tols;
        tols.sort_by(f64::total_cmp);
        let verdicts: Vec<bool> = tols.iter().map(|&t| verify_qre(&game, &sigma, t).is_qre()).collect();
        prop_assert!(verdicts.windows(2).all(|w| !w[0] || w[1]), "{tols:?} -> {verdicts:?}");
    }
}

#[test]
fn random_cg_completions_verify_as_sqre() {
    let mut done = 0;
    for i in 0..400 {
        let m = 0.25 + 0.25 * (i % 17) as f64 / 16.0;
        let s = 0.05 + (m - 0.06) * ((i * 7) % 13) as f64 / 12.0;
        let top = 0.55 + 0.4 * ((i * 5) % 11) as f64 / 10.0;
        let lower = PiecewiseLinear::new(vec![(0.0, top), (s, 0.5)]).unwrap();
        let Ok(sigma) = complete_sqre_compromise(&lower, 4096, m, &TailProfile::linear()) else {
            continue;
        };
        let game = GameSpec::compromise_game(m).unwrap();
        let rep = verify_sqre(&game, &sigma, CONSTRUCTED_TOL);
        assert!(rep.is_sqre(), "M = {m}, s = {s}, top = {top}: {:?}", rep.reasons);
        done += 1;
    }
    assert!(done >= 10, "only {done} feasible completions");
}

#[test]
fn verify_rejects_multiple_crossings() {
    let game = GameSpec::compromise_game(0.39).unwrap();
    let wiggle = Strategy::new(vec![(0.0, 0.8), (0.3, 0.3), (0.5, 0.7), (1.0, 0.2)]).unwrap();
    let rep = verify_qre(&game, &wiggle, 1.0);
    assert!(!rep.is_qre());
    assert!(rep.reasons.contains(&ReasonCode::MultipleCrossings));
    let flat = Strategy::linear(0.9, 0.6).unwrap();
    let rep = verify_qre(&game, &flat, 1.0);
    assert!(rep.reasons.contains(&ReasonCode::NoCrossing));
}

#[test]
fn recovered_curve_round_trips() {
    let cases = [
        (GameSpec::volunteers_dilemma(1.5).unwrap(), 0.65),
        (GameSpec::compromise_game(0.39).unwrap(), 0.2),
        (GameSpec::global_game(0.25, 0.6, 0.15).unwrap(), 0.4),
        (GameSpec::global_game(0.25, 0.6, 0.15).unwrap(), 0.55),
    ];
    for (game, t) in cases {
        let sigma = construct_qre(&game, t, &ConstructionStyle::default()).unwrap();
        let curve = recover_quantal_response(&game, &sigma, 501).unwrap();
        assert!(curve.points.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1));
        let p = game.payoffs(&sigma).unwrap();
        for i in 0..=5000 {
            let x = i as f64 / 5000.0;
            let err = (curve.eval(p.delta_u(x)) - sigma.eval(x).unwrap()).abs();
            assert!(err < 1e-8, "{} t = {x}: error {err:e}", game.short_name());
        }
        for &(d, q) in &curve.points {
            assert!(curve.eval(d) == q);
        }
    }
}

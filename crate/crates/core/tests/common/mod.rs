#![allow(dead_code)]

use proptest::prelude::{prop, Strategy as Gen};
use qre_core::{GameSpec, Strategy};

/// Knot types `0 = t_0 < ... < t_n = 1` from `n` positive gaps.
fn knot_types(gaps: &[f64]) -> Vec<f64> {
    let total: f64 = gaps.iter().sum();
    let mut acc = 0.0;
    let mut ts = vec![0.0];
    for g in &gaps[..gaps.len() - 1] {
        acc += g / total;
        ts.push(acc);
    }
    ts.push(1.0);
    ts
}

/// Any strategy with 2 to 9 knots.
pub fn any_strategy() -> impl Gen<Value = Strategy> {
    prop::collection::vec((0.05f64..1.0, 0.0f64..=1.0), 2..10).prop_map(|raw| {
        let ts = knot_types(&raw[1..].iter().map(|r| r.0).collect::<Vec<_>>());
        Strategy::new(ts.into_iter().zip(raw.iter().map(|r| r.1)).collect()).unwrap()
    })
}

/// Strictly monotone interior strategy whose values straddle 1/2.
pub fn monotone_straddling(increasing: bool) -> impl Gen<Value = Strategy> {
    (
        prop::collection::vec(0.05f64..1.0, 1..9),
        0.5f64..1.5,
        0.01f64..0.45,
        0.55f64..0.99,
    )
        .prop_map(move |(gaps, power, lo, hi)| {
            let ts = knot_types(&gaps);
            let mut vs: Vec<f64> = ts.iter().map(|&t| lo + (hi - lo) * t.powf(power)).collect();
            if !increasing {
                vs.reverse();
            }
            Strategy::new(ts.into_iter().zip(vs).collect()).unwrap()
        })
}

pub fn vd_game() -> impl Gen<Value = GameSpec> {
    (1.01f64..1.99).prop_map(|b| GameSpec::volunteers_dilemma(b).unwrap())
}

pub fn cg_game() -> impl Gen<Value = GameSpec> {
    (0.01f64..=0.5).prop_map(|m| GameSpec::compromise_game(m).unwrap())
}

pub fn gg_game() -> impl Gen<Value = GameSpec> {
    (0.05f64..0.5, 0.05f64..0.45, 0.02f64..0.3)
        .prop_filter_map("invalid global game", |(k, c, e)| GameSpec::global_game(k, c, e).ok())
}

pub fn logistic_strategy(center: f64, slope: f64) -> Strategy {
    Strategy::from_fn(401, |t| 1.0 / (1.0 + (-(slope * (t - center))).exp())).unwrap()
}

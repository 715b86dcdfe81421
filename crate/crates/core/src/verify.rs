//! Equilibrium verification and recovery of the quantal response function.
//!
//! A strategy is a QRE exactly when it is continuous, strictly monotone in
//! the game's direction, interior, and its unique 1/2-crossing is the
//! indifferent type. It is a symmetric QRE when, in addition, types with
//! mirrored choice probabilities face mirrored payoff differences.

use std::io::Write;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::games::{GameSpec, Payoffs};
use crate::strategy::{Monotonicity, Strategy};

/// Tolerance for constructed strategies.
pub const CONSTRUCTED_TOL: f64 = 1e-8;
/// Tolerance for user-supplied or estimated strategies.
pub const ESTIMATED_TOL: f64 = 1e-3;
pub const DEFAULT_SYMMETRY_PAIRS: usize = 1000;
/// Rule id for the recovered curve's extension beyond observed payoffs.
pub const LOGISTIC_TAIL_RULE: &str = "logistic-value-slope";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    QreConsistent,
    SqreConsistent,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReasonCode {
    WrongDirection,
    NotInterior,
    NoCrossing,
    MultipleCrossings,
    Plateau,
    IndifferenceResidual,
    /// Payoffs could not be evaluated (global game with a non-monotone σ).
    PayoffsUnavailable,
    Asymmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub expected_shape: Monotonicity,
    pub classification: Monotonicity,
    pub shape_ok: bool,
    pub interior_ok: bool,
    pub crossing: Option<f64>,
    /// `|Δū_{t̃}(σ)|`, present whenever a unique crossing exists.
    pub indifference_residual: Option<f64>,
    pub symmetry_max_violation: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub reasons: Vec<ReasonCode>,
}

impl VerificationReport {
    pub fn is_qre(&self) -> bool {
        matches!(self.verdict, Verdict::QreConsistent | Verdict::SqreConsistent)
    }

    pub fn is_sqre(&self) -> bool {
        self.verdict == Verdict::SqreConsistent
    }
}

/// Theorem-style QRE check. Never fails; every problem is a reason code.
pub fn verify_qre(game: &GameSpec, sigma: &Strategy, tol: f64) -> VerificationReport {
    let expected = game.convention().expected_shape;
    let shape = sigma.check_shape(0.5);
    let mut reasons = Vec::new();
    let shape_ok = shape.classification == expected;
    if !shape_ok {
        reasons.push(ReasonCode::WrongDirection);
    }
    if !shape.interior {
        reasons.push(ReasonCode::NotInterior);
    }
    if shape.plateau {
        reasons.push(ReasonCode::Plateau);
    } else if shape.crossing_multiplicity == 0 {
        reasons.push(ReasonCode::NoCrossing);
    } else if shape.crossing_multiplicity > 1 {
        reasons.push(ReasonCode::MultipleCrossings);
    }
    let mut residual = None;
    if let Some(t) = shape.crossing_type {
        match game.payoffs(sigma) {
            Ok(p) => {
                let r = p.delta_u(t).abs();
                residual = Some(r);
                if !(r <= tol) {
                    reasons.push(ReasonCode::IndifferenceResidual);
                }
            }
            Err(_) => reasons.push(ReasonCode::PayoffsUnavailable),
        }
    }
    VerificationReport {
        expected_shape: expected,
        classification: shape.classification,
        shape_ok,
        interior_ok: shape.interior,
        crossing: shape.crossing_type,
        indifference_residual: residual,
        symmetry_max_violation: None,
        tolerance: tol,
        verdict: if reasons.is_empty() {
            Verdict::QreConsistent
        } else {
            Verdict::Rejected
        },
        reasons,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryCheck {
    pub max_violation: f64,
    /// Levels whose mirrored level lies in the range of σ.
    pub pairs_checked: usize,
    pub within_tolerance: bool,
}

/// Largest `|Δū_t + Δū_{t'}|` over level pairs `σ(t) = p`, `σ(t') = 1 - p`
/// on a grid of `pairs` levels in `(1/2, max σ]`.
pub fn verify_symmetry(
    game: &GameSpec,
    sigma: &Strategy,
    tol: f64,
    pairs: usize,
) -> Result<SymmetryCheck> {
    let shape = sigma.check_shape(0.5);
    if shape.classification == Monotonicity::Neither
        || !shape.interior
        || shape.crossing_type.is_none()
    {
        return domain(
            "symmetry check needs a strictly monotone interior strategy with a unique crossing",
        );
    }
    if pairs == 0 {
        return domain("symmetry check needs at least one level");
    }
    let payoffs = game.payoffs(sigma)?;
    let (lo, hi) = (sigma.min_value(), sigma.max_value());
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for j in 1..=pairs {
        let p = 0.5 + (hi - 0.5) * j as f64 / pairs as f64;
        let q = 1.0 - p;
        if q < lo {
            continue;
        }
        let t = sigma.inverse(p)?;
        let t2 = sigma.inverse(q)?;
        worst = worst.max((payoffs.delta_u(t) + payoffs.delta_u(t2)).abs());
        checked += 1;
    }
    Ok(SymmetryCheck {
        max_violation: worst,
        pairs_checked: checked,
        within_tolerance: worst <= tol,
    })
}

/// QRE check plus the symmetry condition.
pub fn verify_sqre(game: &GameSpec, sigma: &Strategy, tol: f64) -> VerificationReport {
    verify_sqre_with_pairs(game, sigma, tol, DEFAULT_SYMMETRY_PAIRS)
}

pub fn verify_sqre_with_pairs(
    game: &GameSpec,
    sigma: &Strategy,
    tol: f64,
    pairs: usize,
) -> VerificationReport {
    let mut report = verify_qre(game, sigma, tol);
    if report.verdict != Verdict::QreConsistent {
        return report;
    }
    match verify_symmetry(game, sigma, tol, pairs) {
        Ok(check) => {
            report.symmetry_max_violation = Some(check.max_violation);
            if check.within_tolerance {
                report.verdict = Verdict::SqreConsistent;
            } else {
                report.reasons.push(ReasonCode::Asymmetric);
            }
        }
        Err(_) => report.reasons.push(ReasonCode::Asymmetric),
    }
    report
}

/// Logistic continuation `1 / (1 + exp(-(a + b (d - d0))))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogisticTail {
    pub anchor: f64,
    pub intercept: f64,
    pub slope: f64,
}

impl LogisticTail {
    fn matching(d0: f64, q0: f64, dq: f64) -> Self {
        let q0 = q0.clamp(1e-300, 1.0 - 1e-16);
        Self {
            anchor: d0,
            intercept: (q0 / (1.0 - q0)).ln(),
            slope: dq / (q0 * (1.0 - q0)),
        }
    }

    pub fn eval(&self, d: f64) -> f64 {
        crate::logit::logistic(self.intercept + self.slope * (d - self.anchor))
    }
}

/// Recovered map from payoff differences to choice probabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantalResponseCurve {
    /// `(d, q)` with `d` strictly increasing.
    pub points: Vec<(f64, f64)>,
    pub tail_rule: &'static str,
    pub lower_tail: LogisticTail,
    pub upper_tail: LogisticTail,
}

impl QuantalResponseCurve {
    pub fn d_range(&self) -> (f64, f64) {
        (self.points[0].0, self.points.last().unwrap().0)
    }

    pub fn eval(&self, d: f64) -> f64 {
        let (lo, hi) = self.d_range();
        if d < lo {
            return self.lower_tail.eval(d);
        }
        if d > hi {
            return self.upper_tail.eval(d);
        }
        let j = self.points.partition_point(|&(x, _)| x < d);
        let (d1, q1) = self.points[j];
        if d1 == d || j == 0 {
            return q1;
        }
        let (d0, q0) = self.points[j - 1];
        q0 + (q1 - q0) * (d - d0) / (d1 - d0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve JSON serialization")
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["d", "q"])?;
        for &(d, q) in &self.points {
            wtr.write_record([d.to_string(), q.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Gap allowed between the linear `(d, q)` interpolant and σ at midpoints.
const REFINE_TOL: f64 = 1e-9;
const REFINE_CAP: usize = 1 << 20;

/// Recovers `Q̃(d) = σ(δ⁻¹(d))` with `δ(t) = Δū_t(σ)`, sampled at a uniform
/// grid of `samples` types plus every knot, the crossing, and the global
/// game's payoff kinks, then refined where the interpolant is not yet
/// accurate.
pub fn recover_quantal_response(
    game: &GameSpec,
    sigma: &Strategy,
    samples: usize,
) -> Result<QuantalResponseCurve> {
    let report = verify_qre(game, sigma, ESTIMATED_TOL);
    if !report.is_qre() {
        return domain(format!(
            "recovery needs a QRE; verification failed with {:?}",
            report.reasons
        ));
    }
    let payoffs = game.payoffs(sigma)?;
    let samples = samples.max(2);
    let mut types: Vec<f64> = (0..samples)
        .map(|i| i as f64 / (samples - 1) as f64)
        .chain(sigma.knot_types().iter().copied())
        .chain(report.crossing)
        .collect();
    if let (GameSpec::GlobalGame { noise, .. }, Some(th)) = (game, payoffs.threshold_state()) {
        types.extend([th - noise, th + noise].into_iter().filter(|t| (0.0..=1.0).contains(t)));
    }
    types.sort_by(f64::total_cmp);
    types.dedup();
    let types = refine(&payoffs, sigma, types);

    let mut points: Vec<(f64, f64)> = types
        .iter()
        .map(|&t| (payoffs.delta_u(t), sigma.at(t)))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points.dedup_by(|b, a| b.0 == a.0);
    if points.len() < 2 {
        return domain("payoff differences are constant; nothing to recover");
    }
    let n = points.len();
    let slope = |i: usize, j: usize| (points[j].1 - points[i].1) / (points[j].0 - points[i].0);
    let lower_tail = LogisticTail::matching(points[0].0, points[0].1, slope(0, 1));
    let upper_tail = LogisticTail::matching(points[n - 1].0, points[n - 1].1, slope(n - 2, n - 1));
    Ok(QuantalResponseCurve {
        points,
        tail_rule: LOGISTIC_TAIL_RULE,
        lower_tail,
        upper_tail,
    })
}

fn refine(payoffs: &Payoffs<'_>, sigma: &Strategy, mut types: Vec<f64>) -> Vec<f64> {
    loop {
        let mut next = Vec::with_capacity(types.len() * 2);
        let mut changed = false;
        for w in types.windows(2) {
            next.push(w[0]);
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                continue;
            }
            let (da, db, dm) = (payoffs.delta_u(a), payoffs.delta_u(b), payoffs.delta_u(mid));
            if da == db {
                continue;
            }
            let (qa, qb) = (sigma.at(a), sigma.at(b));
            let predicted = qa + (qb - qa) * (dm - da) / (db - da);
            if (predicted - sigma.at(mid)).abs() > REFINE_TOL {
                next.push(mid);
                changed = true;
            }
        }
        next.push(*types.last().unwrap());
        types = next;
        if !changed || types.len() > REFINE_CAP {
            return types;
        }
    }
}

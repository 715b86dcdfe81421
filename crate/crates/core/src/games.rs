//! The three binary-action games and their expected-payoff operators.
//!
//! Every game is two-action with types uniform on `[0, 1]`. `delta_u` is the
//! expected payoff of action 1 minus action 0 for a type facing symmetric
//! opponent play `σ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QreError, Result};
use crate::strategy::{Monotonicity, Strategy};

/// Absolute tolerance used by the threshold-state bisection.
pub const THRESHOLD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "game", content = "params")]
pub enum GameSpec {
    #[serde(rename = "vd")]
    VolunteersDilemma {
        #[serde(rename = "B")]
        benefit: f64,
    },
    #[serde(rename = "gg")]
    GlobalGame {
        #[serde(rename = "k")]
        attack_cost: f64,
        #[serde(rename = "c")]
        failure_penalty: f64,
        #[serde(rename = "eps")]
        noise: f64,
    },
    #[serde(rename = "cg")]
    CompromiseGame {
        #[serde(rename = "M")]
        compromise: f64,
    },
}

/// Labels and the equilibrium direction of the strategy for each game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ActionConvention {
    pub action_one: &'static str,
    pub action_zero: &'static str,
    pub expected_shape: Monotonicity,
}

/// Benchmark Nash equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NashEquilibrium {
    /// Action 1 is played for types strictly below (or above) `threshold`.
    Threshold { threshold: f64, action_one_below: bool },
    /// Action 1 is played with this constant probability by every type.
    Constant { probability: f64 },
}

impl NashEquilibrium {
    pub fn probability(&self, t: f64) -> f64 {
        match *self {
            NashEquilibrium::Threshold {
                threshold,
                action_one_below,
            } => {
                let below = t < threshold;
                let above = t > threshold;
                if (action_one_below && below) || (!action_one_below && above) {
                    1.0
                } else if t == threshold {
                    0.5
                } else {
                    0.0
                }
            }
            NashEquilibrium::Constant { probability } => probability,
        }
    }
}

impl GameSpec {
    pub fn volunteers_dilemma(benefit: f64) -> Result<Self> {
        let g = GameSpec::VolunteersDilemma { benefit };
        g.validate()?;
        Ok(g)
    }

    pub fn global_game(attack_cost: f64, failure_penalty: f64, noise: f64) -> Result<Self> {
        let g = GameSpec::GlobalGame {
            attack_cost,
            failure_penalty,
            noise,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn compromise_game(compromise: f64) -> Result<Self> {
        let g = GameSpec::CompromiseGame { compromise };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(QreError::InvalidGame(m));
        match *self {
            GameSpec::VolunteersDilemma { benefit: b } => {
                if !(b > 1.0 && b < 2.0) {
                    return bad(format!("volunteer's dilemma needs B in (1, 2), got {b}"));
                }
            }
            GameSpec::GlobalGame {
                attack_cost: k,
                failure_penalty: c,
                noise: eps,
            } => {
                if !(k > 0.0 && k < 1.0) || !(c > 0.0 && c < 1.0) || !(k + c < 1.0) {
                    return bad(format!(
                        "global game needs k, c, k + c in (0, 1), got k = {k}, c = {c}"
                    ));
                }
                let cap = k.min(1.0 - k - c);
                if !(eps > 0.0 && eps < cap) {
                    return bad(format!("global game needs 0 < eps < {cap}, got {eps}"));
                }
            }
            GameSpec::CompromiseGame { compromise: m } => {
                if !(m > 0.0 && m <= 0.5) {
                    return bad(format!("compromise game needs M in (0, 1/2], got {m}"));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: GameSpec = serde_json::from_str(s)?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("game JSON serialization")
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            GameSpec::VolunteersDilemma { .. } => "vd",
            GameSpec::GlobalGame { .. } => "gg",
            GameSpec::CompromiseGame { .. } => "cg",
        }
    }

    pub fn convention(&self) -> ActionConvention {
        match self {
            GameSpec::VolunteersDilemma { .. } => ActionConvention {
                action_one: "volunteer",
                action_zero: "abstain",
                expected_shape: Monotonicity::StrictlyDecreasing,
            },
            GameSpec::GlobalGame { .. } => ActionConvention {
                action_one: "attack",
                action_zero: "abstain",
                expected_shape: Monotonicity::StrictlyIncreasing,
            },
            GameSpec::CompromiseGame { .. } => ActionConvention {
                action_one: "flee",
                action_zero: "fight",
                expected_shape: Monotonicity::StrictlyDecreasing,
            },
        }
    }

    pub fn nash_equilibrium(&self) -> NashEquilibrium {
        match *self {
            GameSpec::VolunteersDilemma { benefit: b } => NashEquilibrium::Threshold {
                threshold: b / (b + 1.0),
                action_one_below: true,
            },
            GameSpec::GlobalGame {
                attack_cost: k,
                failure_penalty: c,
                ..
            } => NashEquilibrium::Threshold {
                threshold: (2.0 * k + c) / 2.0,
                action_one_below: false,
            },
            GameSpec::CompromiseGame { .. } => NashEquilibrium::Constant { probability: 0.0 },
        }
    }

    /// Precomputes the strategy summaries payoffs depend on.
    pub fn payoffs<'a>(&self, sigma: &'a Strategy) -> Result<Payoffs<'a>> {
        let summary = match *self {
            GameSpec::VolunteersDilemma { .. } | GameSpec::CompromiseGame { .. } => {
                Summary::Mean(sigma.mean())
            }
            GameSpec::GlobalGame { noise, .. } => {
                Summary::Threshold(failure_threshold(sigma, noise)?)
            }
        };
        Ok(Payoffs {
            game: *self,
            sigma,
            summary,
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Summary {
    Mean(f64),
    Threshold(f64),
}

/// Payoff operator for one game against one fixed opponent strategy.
#[derive(Debug, Clone)]
pub struct Payoffs<'a> {
    game: GameSpec,
    sigma: &'a Strategy,
    summary: Summary,
}

impl Payoffs<'_> {
    pub fn game(&self) -> GameSpec {
        self.game
    }

    /// Global game threshold state; `None` for the other games.
    pub fn threshold_state(&self) -> Option<f64> {
        match self.summary {
            Summary::Threshold(th) => Some(th),
            Summary::Mean(_) => None,
        }
    }

    /// Subjective failure probability (global game only).
    pub fn failure_prob(&self, x: f64) -> Option<f64> {
        match (self.game, self.summary) {
            (GameSpec::GlobalGame { noise, .. }, Summary::Threshold(th)) => {
                Some(failure_from_threshold(th, noise, x))
            }
            _ => None,
        }
    }

    pub fn delta_u(&self, t: f64) -> f64 {
        match (self.game, self.summary) {
            (GameSpec::VolunteersDilemma { benefit }, Summary::Mean(mean)) => {
                benefit * (1.0 - mean) - t
            }
            (GameSpec::CompromiseGame { compromise }, Summary::Mean(mean)) => {
                compromise * mean - self.sigma.lower_integral(t)
            }
            (
                GameSpec::GlobalGame {
                    attack_cost,
                    failure_penalty,
                    noise,
                },
                Summary::Threshold(th),
            ) => t - attack_cost - failure_penalty * failure_from_threshold(th, noise, t),
            _ => unreachable!("summary always matches the game"),
        }
    }

    /// `(ū¹, ū⁰)`: expected payoffs of action 1 and action 0.
    pub fn payoff_pair(&self, t: f64) -> (f64, f64) {
        match (self.game, self.summary) {
            (GameSpec::VolunteersDilemma { benefit }, Summary::Mean(mean)) => {
                (benefit - t, benefit * mean)
            }
            (GameSpec::CompromiseGame { compromise }, Summary::Mean(mean)) => {
                let lower = self.sigma.lower_integral(t);
                (compromise * mean + (t - lower), t)
            }
            (GameSpec::GlobalGame { .. }, Summary::Threshold(_)) => (self.delta_u(t), 0.0),
            _ => unreachable!("summary always matches the game"),
        }
    }

    /// Zero of `t ↦ Δū_t(σ)` in `[0, 1]`, if any. `Δū` is monotone in the
    /// type for every game, so the zero is unique when it exists.
    pub fn indifferent_type(&self) -> Option<f64> {
        if let (GameSpec::VolunteersDilemma { benefit }, Summary::Mean(mean)) =
            (self.game, self.summary)
        {
            let t = benefit * (1.0 - mean);
            return (0.0..=1.0).contains(&t).then_some(t);
        }
        let (d0, d1) = (self.delta_u(0.0), self.delta_u(1.0));
        if d0 == 0.0 {
            return Some(0.0);
        }
        if d1 == 0.0 {
            return Some(1.0);
        }
        if d0.signum() == d1.signum() {
            return None;
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let d = self.delta_u(mid);
            if d == 0.0 {
                return Some(mid);
            }
            if d.signum() == d0.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

fn check_type(t: f64) -> Result<()> {
    if t.is_nan() || !(0.0..=1.0).contains(&t) {
        return Err(QreError::Domain(format!("type {t} outside [0, 1]")));
    }
    Ok(())
}

pub fn delta_u(game: &GameSpec, sigma: &Strategy, t: f64) -> Result<f64> {
    check_type(t)?;
    Ok(game.payoffs(sigma)?.delta_u(t))
}

pub fn payoff_pair(game: &GameSpec, sigma: &Strategy, t: f64) -> Result<(f64, f64)> {
    check_type(t)?;
    Ok(game.payoffs(sigma)?.payoff_pair(t))
}

/// Mass of attackers in state `θ`: the mean of `σ` over the support of the
/// signal distribution, which is `[θ - ε, θ + ε]` in the interior and
/// `[0, 2θ]` or `[2θ - 1, 1]` near the boundary.
pub fn attack_mass(sigma: &Strategy, theta: f64, eps: f64) -> f64 {
    let theta = theta.clamp(0.0, 1.0);
    let (a, b) = if theta < eps {
        (0.0, 2.0 * theta)
    } else if theta > 1.0 - eps {
        (2.0 * theta - 1.0, 1.0)
    } else {
        (theta - eps, theta + eps)
    };
    if b - a <= 0.0 {
        return sigma.at(theta);
    }
    (sigma.lower_integral(b) - sigma.lower_integral(a)) / (b - a)
}

fn failure_from_threshold(theta_star: f64, eps: f64, x: f64) -> f64 {
    ((theta_star - x + eps) / (2.0 * eps)).clamp(0.0, 1.0)
}

/// `sup{θ ∈ [0, 1] : attack_mass(θ) <= 1/2}` for nondecreasing `σ`.
///
/// Attacks fail for states up to and including this value. It is `-∞` when
/// every state succeeds and `+∞` when every state fails.
fn failure_threshold(sigma: &Strategy, eps: f64) -> Result<f64> {
    if sigma.knot_values().windows(2).any(|w| w[1] < w[0]) {
        return Err(QreError::NonMonotone(
            "global game payoffs are implemented for nondecreasing strategies only; \
             other strategies need the raw double-integral failure probability"
                .into(),
        ));
    }
    if attack_mass(sigma, 0.0, eps) > 0.5 {
        return Ok(f64::NEG_INFINITY);
    }
    if attack_mass(sigma, 1.0, eps) <= 0.5 {
        return Ok(f64::INFINITY);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > THRESHOLD_TOL * 0.5 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if attack_mass(sigma, mid, eps) <= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn global_params(game: &GameSpec) -> Result<(f64, f64, f64)> {
    match *game {
        GameSpec::GlobalGame {
            attack_cost,
            failure_penalty,
            noise,
        } => Ok((attack_cost, failure_penalty, noise)),
        _ => Err(QreError::Domain(
            "threshold state and failure probability exist only in the global game".into(),
        )),
    }
}

/// Unique `θ` with `window_mean(σ, θ, ε) = 1/2` for strictly increasing `σ`.
pub fn threshold_state(game: &GameSpec, sigma: &Strategy) -> Result<f64> {
    let (_, _, eps) = global_params(game)?;
    if sigma.as_piecewise().monotonicity() != Monotonicity::StrictlyIncreasing {
        return Err(QreError::NonMonotone(
            "threshold state requires a strictly increasing strategy".into(),
        ));
    }
    let lo_mass = sigma.window_mean(eps, eps)?;
    let hi_mass = sigma.window_mean(1.0 - eps, eps)?;
    if lo_mass > 0.5 || hi_mass < 0.5 {
        return Err(QreError::DegenerateStrategy(format!(
            "window mean ranges over [{lo_mass}, {hi_mass}] and never equals 1/2"
        )));
    }
    let (mut lo, mut hi) = (eps, 1.0 - eps);
    while hi - lo > THRESHOLD_TOL * 0.5 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sigma.window_mean(mid, eps)? <= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Subjective probability that the attack fails, for signal `x`.
pub fn failure_prob(game: &GameSpec, sigma: &Strategy, x: f64) -> Result<f64> {
    let (_, _, eps) = global_params(game)?;
    check_type(x)?;
    let th = threshold_state(game, sigma)?;
    Ok(failure_from_threshold(th, eps, x))
}

pub fn ne_strategy(game: &GameSpec) -> NashEquilibrium {
    game.nash_equilibrium()
}

/// Simulation estimate of `Δū_t(σ)` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Opponents' signals averaged per sampled state in the global game.
const SIGNALS_PER_STATE: usize = 64;

/// Monte Carlo estimate of `Δū_t(σ)` from the primitive game description.
///
/// Draws opponents (and, in the global game, states and signals) and
/// averages realized payoff differences. Uses ChaCha8, a counter-based
/// generator, so results depend only on `seed`.
pub fn monte_carlo_delta_u(
    game: &GameSpec,
    sigma: &Strategy,
    t: f64,
    n: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_type(t)?;
    if n == 0 {
        return Err(QreError::Domain("Monte Carlo needs at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let draw = match *game {
            GameSpec::VolunteersDilemma { benefit } => {
                let other: f64 = rng.gen();
                let volunteers = rng.gen::<f64>() < sigma.at(other);
                let abstain = if volunteers { benefit } else { 0.0 };
                (benefit - t) - abstain
            }
            GameSpec::CompromiseGame { compromise } => {
                let other: f64 = rng.gen();
                let flees = rng.gen::<f64>() < sigma.at(other);
                // Equal strengths pay 0 to both when anyone fights.
                let wins = other < t;
                let win_payoff = if wins { 1.0 } else { 0.0 };
                let flee = if flees { compromise } else { win_payoff };
                let fight = win_payoff;
                flee - fight
            }
            GameSpec::GlobalGame {
                attack_cost,
                failure_penalty,
                noise,
            } => {
                let state = t - noise + 2.0 * noise * rng.gen::<f64>();
                let mass = simulated_mass(sigma, state, noise, &mut rng);
                let fails = mass <= 0.5;
                state - attack_cost - if fails { failure_penalty } else { 0.0 }
            }
        };
        sum += draw;
        sum_sq += draw * draw;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 {
        ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        estimate: mean,
        std_error: (var / nf).sqrt(),
        samples: n,
    })
}

/// Attack mass in `state`, averaged over stratified, jittered signal draws
/// from the state's signal distribution.
fn simulated_mass(sigma: &Strategy, state: f64, eps: f64, rng: &mut ChaCha8Rng) -> f64 {
    let (a, b) = if state <= 0.0 {
        (0.0, 0.0)
    } else if state < eps {
        (0.0, 2.0 * state)
    } else if state >= 1.0 {
        (1.0, 1.0)
    } else if state > 1.0 - eps {
        (2.0 * state - 1.0, 1.0)
    } else {
        (state - eps, state + eps)
    };
    let width = (b - a) / SIGNALS_PER_STATE as f64;
    let mut acc = 0.0;
    for j in 0..SIGNALS_PER_STATE {
        let x = a + width * (j as f64 + rng.gen::<f64>());
        acc += sigma.at(x);
    }
    acc / SIGNALS_PER_STATE as f64
}

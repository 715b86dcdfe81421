//! Logit QRE by damped fixed-point iteration on a uniform type grid.

use serde::Serialize;

use crate::error::{domain, QreError, Result};
use crate::games::{GameSpec, NashEquilibrium};
use crate::par::{self, Execution};
use crate::strategy::Strategy;

/// `1 / (1 + e^{-x})` without overflow for large `|x|`.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn logit_response(lambda: f64, d: f64) -> f64 {
    if lambda == 0.0 {
        return 0.5;
    }
    logistic(lambda * d)
}

/// Steepness of the logistic used to smooth the NE step.
const NE_SMOOTHING: f64 = 25.0;
/// Flee probability used to smooth the compromise game's fight-always NE.
const NE_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    ConstantHalf,
    NeStepSmoothed,
    User(Strategy),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid_size: usize,
    pub damping: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub init: InitialCondition,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid_size: 1001,
            damping: 0.5,
            tol: 1e-10,
            max_iters: 100_000,
            init: InitialCondition::ConstantHalf,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 3 {
            return domain("grid size must be at least 3");
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return domain(format!("damping must lie in (0, 1], got {}", self.damping));
        }
        if !(self.tol > 0.0) {
            return domain(format!("tolerance must be positive, got {}", self.tol));
        }
        if self.max_iters == 0 {
            return domain("max_iters must be at least 1");
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let last = (self.grid_size - 1) as f64;
        (0..self.grid_size)
            .map(|i| {
                if i + 1 == self.grid_size {
                    1.0
                } else {
                    i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogitSolution {
    pub lambda: f64,
    pub strategy: Strategy,
    pub iterations: usize,
    /// `max_t |σ(t) - logit(λ Δū_t(σ))|` over the grid at exit.
    pub residual: f64,
    /// Zero of `Δū_t(σ)`; coincides with the 1/2-crossing for `λ > 0`.
    pub indifferent_type: Option<f64>,
}

fn initial_values(game: &GameSpec, grid: &[f64], init: &InitialCondition) -> Vec<f64> {
    match init {
        InitialCondition::ConstantHalf => vec![0.5; grid.len()],
        InitialCondition::User(s) => grid.iter().map(|&t| s.at(t)).collect(),
        InitialCondition::NeStepSmoothed => match game.nash_equilibrium() {
            NashEquilibrium::Threshold {
                threshold,
                action_one_below,
            } => {
                let dir = if action_one_below { 1.0 } else { -1.0 };
                grid.iter()
                    .map(|&t| logistic(NE_SMOOTHING * dir * (threshold - t)))
                    .collect()
            }
            NashEquilibrium::Constant { probability } => {
                vec![probability.clamp(NE_FLOOR, 1.0 - NE_FLOOR); grid.len()]
            }
        },
    }
}

/// Solves `σ = logit(λ Δū(σ))` by `σ ← (1 - α) σ + α logit(λ Δū(σ))`.
pub fn solve_logit_qre(game: &GameSpec, lambda: f64, cfg: &SolverConfig) -> Result<LogitSolution> {
    game.validate()?;
    cfg.validate()?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return domain(format!("precision must be finite and nonnegative, got {lambda}"));
    }
    let grid = cfg.grid();
    if lambda == 0.0 {
        let strategy = Strategy::constant(0.5)?;
        let indifferent_type = game.payoffs(&strategy)?.indifferent_type();
        return Ok(LogitSolution {
            lambda,
            strategy,
            iterations: 1,
            residual: 0.0,
            indifferent_type,
        });
    }
    let mut values = initial_values(game, &grid, &cfg.init);
    let mut target = vec![0.0; grid.len()];
    let mut residual = f64::INFINITY;
    for iter in 1..=cfg.max_iters {
        let strategy = Strategy::new(grid.iter().copied().zip(values.iter().copied()).collect())?;
        let payoffs = game.payoffs(&strategy)?;
        residual = 0.0;
        for (i, &t) in grid.iter().enumerate() {
            target[i] = logit_response(lambda, payoffs.delta_u(t));
            residual = f64::max(residual, (values[i] - target[i]).abs());
        }
        if residual <= cfg.tol {
            let indifferent_type = payoffs.indifferent_type();
            return Ok(LogitSolution {
                lambda,
                strategy,
                iterations: iter,
                residual,
                indifferent_type,
            });
        }
        for (v, &q) in values.iter_mut().zip(&target) {
            *v = (1.0 - cfg.damping) * *v + cfg.damping * q;
        }
    }
    Err(QreError::Convergence {
        lambda,
        iterations: cfg.max_iters,
        residual,
    })
}

/// Solves along ascending precisions, warm-starting each from the previous
/// solution.
pub fn lambda_sweep(game: &GameSpec, lambdas: &[f64], cfg: &SolverConfig) -> Result<Vec<LogitSolution>> {
    if lambdas.is_empty() {
        return domain("λ list is empty");
    }
    if lambdas.windows(2).any(|w| !(w[1] >= w[0])) {
        return domain("λ list must be sorted ascending");
    }
    let mut out: Vec<LogitSolution> = Vec::with_capacity(lambdas.len());
    let mut step_cfg = cfg.clone();
    for &lambda in lambdas {
        if let Some(prev) = out.last() {
            step_cfg.init = InitialCondition::User(prev.strategy.clone());
        }
        out.push(solve_logit_qre(game, lambda, &step_cfg)?);
    }
    Ok(out)
}

/// Independent cold-start solves, one per precision, in input order.
pub fn solve_many(
    game: &GameSpec,
    lambdas: &[f64],
    cfg: &SolverConfig,
    mode: Execution,
) -> Vec<Result<LogitSolution>> {
    par::map_slice(mode, lambdas, |&l| solve_logit_qre(game, l, cfg))
}

use std::io::Write;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use qre_core::characterize::{
    complete_sqre_compromise, construct_qre, construct_sqre_compromise, construct_sqre_symmetric,
    qre_indifferent_set, sqre_indifferent_set, sqre_necessary_checks_compromise, vd_mean_range,
    ConstructionStyle, EquilibriumModel, TailProfile, TypeSet,
};
use qre_core::empirics::{
    bootstrap_ci, estimate_indifferent_type, kernel_estimate, monotonicity_diagnostic,
    silverman_bandwidth, simulate_dataset, BootstrapConfig, Dataset, ResampleUnit, TypeGrid,
};
use qre_core::logit::{lambda_sweep, solve_logit_qre, solve_many, InitialCondition, SolverConfig};
use qre_core::par::{self, Execution};
use qre_core::verify::{recover_quantal_response, verify_sqre_with_pairs};
use qre_core::{GameSpec, PiecewiseLinear, Strategy};

use crate::args::*;
use crate::output::{write_json, write_with_header};

fn game_json(game: &GameSpec) -> Value {
    serde_json::to_value(game).expect("game serializes")
}

pub fn characterize(a: &CharacterizeArgs) -> Result<()> {
    let game = a.game.resolve()?;
    let config = json!({ "command": "characterize", "game": game_json(&game) });
    let mut result = json!({
        "convention": game.convention(),
        "qre_indifferent_set": qre_indifferent_set(&game),
        "sqre_indifferent_set": sqre_indifferent_set(&game),
        "nash_equilibrium": game.nash_equilibrium(),
    });
    if let GameSpec::VolunteersDilemma { benefit } = game {
        result["mean_ranges"] = json!({
            "qre": vd_mean_range(benefit, EquilibriumModel::Qre)?,
            "sqre": vd_mean_range(benefit, EquilibriumModel::Sqre)?,
            "ne": vd_mean_range(benefit, EquilibriumModel::Ne)?,
        });
    }
    write_json(a.output.out.as_deref(), &config, &result)
}

fn midpoint(set: &TypeSet) -> f64 {
    0.5 * (set.lower + set.upper)
}

fn write_strategy(
    sigma: &Strategy,
    format: Format,
    config: &Value,
    out: Option<&std::path::Path>,
) -> Result<()> {
    match format {
        Format::Csv => write_with_header(out, config, |w| Ok(sigma.write_csv(w)?)),
        Format::Json | Format::Table => {
            // The strategy's own fields sit at the top level so the file
            // loads directly as a strategy.
            let mut doc = serde_json::to_value(sigma)?;
            doc["config"] = config.clone();
            let mut w = crate::output::sink(out)?;
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
            w.flush()?;
            Ok(())
        }
    }
}

pub fn construct(a: &ConstructArgs) -> Result<()> {
    let game = a.game.resolve()?;
    let style = ConstructionStyle {
        moment: a.moment,
        ramp_width: a.ramp_width,
        ramp_fraction: a.ramp_fraction,
    };
    let set = match a.model {
        Model::Qre => qre_indifferent_set(&game),
        Model::Sqre => sqre_indifferent_set(&game),
    };
    let t = a.indifferent.unwrap_or_else(|| midpoint(&set));
    let mut config = json!({
        "command": "construct",
        "game": game_json(&game),
        "model": format!("{:?}", a.model).to_lowercase(),
        "type": t,
        "moment": a.moment,
        "ramp_width": a.ramp_width,
        "ramp_fraction": a.ramp_fraction,
    });
    let sigma = match (a.model, game) {
        (Model::Qre, _) => construct_qre(&game, t, &style)?,
        (Model::Sqre, GameSpec::CompromiseGame { compromise }) => {
            config["sigma0"] = json!(a.sigma0);
            config["partition"] = json!(a.partition);
            config["tail"] = json!("linear");
            let lower = PiecewiseLinear::new(vec![(0.0, a.sigma0), (t, 0.5)])?;
            if let Some(path) = &a.trace {
                let ext = construct_sqre_compromise(&lower, a.partition)?;
                write_json(Some(path), &config, &ext.trace)?;
            }
            complete_sqre_compromise(&lower, a.partition, compromise, &TailProfile::linear())?
        }
        (Model::Sqre, _) => construct_sqre_symmetric(&game, t, &style)?,
    };
    write_strategy(&sigma, a.format, &config, a.output.out.as_deref())
}

pub fn verify(a: &VerifyArgs) -> Result<()> {
    let game = a.game.resolve()?;
    let sigma = Strategy::load(&a.strategy)
        .with_context(|| format!("cannot load strategy {}", a.strategy.display()))?;
    let config = json!({
        "command": "verify",
        "game": game_json(&game),
        "strategy": a.strategy,
        "tol": a.tol,
        "pairs": a.pairs,
    });
    let report = verify_sqre_with_pairs(&game, &sigma, a.tol, a.pairs);
    let mut result = json!({ "report": report });
    if let GameSpec::CompromiseGame { compromise } = game {
        if let Ok(checks) = sqre_necessary_checks_compromise(&sigma, compromise, a.pairs) {
            result["compromise_checks"] = json!(checks);
        }
    }
    if let Some(path) = &a.recover {
        if report.is_qre() {
            let curve = recover_quantal_response(&game, &sigma, 1001)?;
            write_with_header(Some(path), &config, |w| Ok(curve.write_csv(w)?))?;
            result["recovered_curve"] = json!({
                "path": path,
                "points": curve.points.len(),
                "tail_rule": curve.tail_rule,
            });
        }
    }
    write_json(a.output.out.as_deref(), &config, &result)
}

fn solver_config(s: &SolverArgs) -> Result<(SolverConfig, Value)> {
    let init = match s.init.as_str() {
        "half" => InitialCondition::ConstantHalf,
        "ne" => InitialCondition::NeStepSmoothed,
        path => InitialCondition::User(
            Strategy::load(path.as_ref())
                .with_context(|| format!("cannot load initial strategy {path}"))?,
        ),
    };
    let cfg = SolverConfig {
        grid_size: s.grid,
        damping: s.damping,
        tol: s.tol,
        max_iters: s.max_iters,
        init,
    };
    let echo = json!({
        "grid": s.grid,
        "damping": s.damping,
        "solver_tol": s.tol,
        "max_iters": s.max_iters,
        "init": s.init,
    });
    Ok((cfg, echo))
}

pub fn solve(a: &SolveArgs) -> Result<()> {
    let game = a.game.resolve()?;
    let (cfg, echo) = solver_config(&a.solver)?;
    let config = json!({
        "command": "solve",
        "game": game_json(&game),
        "lambda": a.lambda,
        "solver": echo,
    });
    let sol = solve_logit_qre(&game, a.lambda, &cfg)?;
    match a.format {
        Format::Csv => write_strategy(&sol.strategy, Format::Csv, &config, a.output.out.as_deref()),
        _ => write_json(a.output.out.as_deref(), &config, &sol),
    }
}

pub fn sweep(a: &SweepArgs) -> Result<()> {
    let game = a.game.resolve()?;
    let (cfg, echo) = solver_config(&a.solver)?;
    let config = json!({
        "command": "sweep",
        "game": game_json(&game),
        "lambdas": a.lambdas,
        "cold": a.cold,
        "jobs": a.jobs,
        "solver": echo,
    });
    let sols = if a.cold {
        par::with_jobs(a.jobs, || solve_many(&game, &a.lambdas, &cfg, Execution::Parallel))
            .into_iter()
            .collect::<qre_core::Result<Vec<_>>>()?
    } else {
        lambda_sweep(&game, &a.lambdas, &cfg)?
    };
    write_with_header(a.output.out.as_deref(), &config, |w| {
        writeln!(w, "lambda,iterations,residual,indifferent_type,mean")?;
        for s in &sols {
            let t = s.indifferent_type.map(|t| t.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{:e},{},{}",
                s.lambda,
                s.iterations,
                s.residual,
                t,
                s.strategy.mean()
            )?;
        }
        Ok(())
    })
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let game = a.game.resolve()?;
    let sigma = Strategy::load(&a.strategy)
        .with_context(|| format!("cannot load strategy {}", a.strategy.display()))?;
    let seed = resolve_seed(a.seed)?;
    let grid = match a.types {
        Types::Continuous => TypeGrid::Continuous,
        Types::Hundredths => TypeGrid::Hundredths,
    };
    let config = json!({
        "command": "simulate",
        "game": game_json(&game),
        "strategy": a.strategy,
        "n": a.n,
        "seed": seed,
        "types": grid,
    });
    let data = simulate_dataset(&game, &sigma, a.n, seed, grid)?;
    write_with_header(a.output.out.as_deref(), &config, |w| Ok(data.write_csv(w)?))
}

pub fn test(a: &TestArgs) -> Result<()> {
    let seed = resolve_seed(a.seed)?;
    let mut data = Dataset::load_csv(&a.data)
        .with_context(|| format!("cannot load data {}", a.data.display()))?;
    if let Some(label) = &a.treatment {
        data = data.filter_treatment(label)?;
    }
    let unit = match a.unit {
        Unit::Rows => ResampleUnit::Rows,
        Unit::Subjects => ResampleUnit::Subjects,
    };
    let config = json!({
        "command": "test",
        "data": a.data,
        "M": a.compromise,
        "treatment": a.treatment,
        "reps": a.reps,
        "seed": seed,
        "unit": unit,
        "fix_indifferent_type": a.fix_indifferent_type,
        "grid": a.grid,
        "jobs": a.jobs,
        "levels": [0.95, 0.99],
    });
    let cfg = BootstrapConfig {
        reps: a.reps,
        seed,
        unit,
        fix_indifferent_type: a.fix_indifferent_type,
        grid: a.grid,
        execution: Execution::Parallel,
    };
    let res = par::with_jobs(a.jobs, || bootstrap_ci(&data, a.compromise, &cfg))?;
    let kernel = kernel_estimate(&data, res.bandwidth, a.grid)?;
    let diagnostic = monotonicity_diagnostic(&kernel);
    if let Some(path) = &a.kernel_out {
        write_with_header(Some(path), &config, |w| Ok(kernel.write_csv(w)?))?;
    }
    let out = a.output.out.as_deref();
    match a.format {
        Format::Json => write_json(
            out,
            &config,
            &json!({
                "test": res,
                "monotonicity": {
                    "violations": diagnostic.violations,
                    "max_violation": diagnostic.max_violation,
                    "isotonic_distance": diagnostic.isotonic_distance,
                },
            }),
        ),
        Format::Table | Format::Csv => write_with_header(out, &config, |w| {
            w.write_all(res.to_table().as_bytes())?;
            writeln!(
                w,
                "n = {}, bandwidth = {:.4}, replicates = {} ({} failed), reject at 95%: {}, at 99%: {}",
                res.n, res.bandwidth, res.replicates, res.failed_replicates, res.reject_95, res.reject_99
            )?;
            writeln!(
                w,
                "monotonicity: {} increases (max {:.3}), isotonic distance {:.3}",
                diagnostic.violations, diagnostic.max_violation, diagnostic.isotonic_distance
            )?;
            Ok(())
        }),
    }
}

fn figure_default(figure: u8) -> GameSpec {
    match figure {
        1 => GameSpec::volunteers_dilemma(1.5),
        2 => GameSpec::global_game(0.25, 0.6, 0.15),
        _ => GameSpec::compromise_game(0.39),
    }
    .expect("default figure games are valid")
}

pub fn plot_data(a: &PlotDataArgs) -> Result<()> {
    if a.points < 2 {
        return usage("--points must be at least 2");
    }
    if a.figure == 4 {
        let Some(path) = &a.data else {
            return usage("--figure 4 needs --data");
        };
        let data = Dataset::load_csv(path)
            .with_context(|| format!("cannot load data {}", path.display()))?;
        let h = silverman_bandwidth(&data)?;
        let est = kernel_estimate(&data, h, a.points)?;
        let s_tilde = estimate_indifferent_type(&est).ok();
        let config = json!({
            "command": "plot-data",
            "figure": 4,
            "data": path,
            "points": a.points,
            "bandwidth": h,
            "s_tilde": s_tilde,
        });
        return write_with_header(a.output.out.as_deref(), &config, |w| Ok(est.write_csv(w)?));
    }
    let game = a.game.resolve_or(Some(figure_default(a.figure)))?;
    let sigma = match &a.strategy {
        Some(p) => Strategy::load(p).with_context(|| format!("cannot load strategy {}", p.display()))?,
        None => match game {
            GameSpec::GlobalGame { .. } => construct_sqre_symmetric(
                &game,
                sqre_indifferent_set(&game).lower,
                &ConstructionStyle::default(),
            )?,
            _ => construct_qre(
                &game,
                midpoint(&qre_indifferent_set(&game)),
                &ConstructionStyle::default(),
            )?,
        },
    };
    let payoffs = game.payoffs(&sigma)?;
    let config = json!({
        "command": "plot-data",
        "figure": a.figure,
        "game": game_json(&game),
        "strategy": a.strategy,
        "points": a.points,
        "qre_indifferent_set": qre_indifferent_set(&game),
        "sqre_indifferent_set": sqre_indifferent_set(&game),
        "indifferent_type": sigma.check_shape(0.5).crossing_type,
    });
    write_with_header(a.output.out.as_deref(), &config, |w| {
        writeln!(w, "t,sigma,delta_u")?;
        for i in 0..a.points {
            let t = if i + 1 == a.points {
                1.0
            } else {
                i as f64 / (a.points - 1) as f64
            };
            writeln!(w, "{},{},{}", t, sigma.eval(t)?, payoffs.delta_u(t))?;
        }
        Ok(())
    })
}

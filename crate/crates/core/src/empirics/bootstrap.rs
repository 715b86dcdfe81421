use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::dataset::Dataset;
use super::kernel::{first_down_crossing, uniform_grid, SortedSample, DEFAULT_GRID};
use crate::error::{domain, QreError, Result};
use crate::games::GameSpec;
use crate::par::{self, Execution};
use crate::strategy::Strategy;

pub const MIN_REPLICATES: usize = 100;
/// Largest tolerated share of failed replicates.
pub const MAX_FAILURE_SHARE: f64 = 0.10;

fn check_inputs(compromise: f64, s: f64) -> Result<()> {
    GameSpec::compromise_game(compromise)?;
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("indifferent type must lie in (0, 1), got {s}"));
    }
    Ok(())
}

fn beta_from_means(lower: f64, upper: f64, compromise: f64, s: f64) -> f64 {
    upper * (1.0 - s) - lower * s * (1.0 - compromise) / compromise
}

/// `β = E[a | t >= s̃](1 - s̃) - E[a | t <= s̃] s̃ (1 - M) / M` with raw
/// sample means on each side.
pub fn beta_statistic(data: &Dataset, compromise: f64, s: f64) -> Result<f64> {
    check_inputs(compromise, s)?;
    let sample = SortedSample::new(data);
    let (lower, upper) = sample.split_means(&sample.prefix(None), s)?;
    Ok(beta_from_means(lower, upper, compromise, s))
}

/// Population `β` from exact conditional means; `M β = Δū_{s̃}(σ)`.
pub fn beta_from_strategy(sigma: &Strategy, compromise: f64, s: f64) -> Result<f64> {
    check_inputs(compromise, s)?;
    let lower = sigma.conditional_mean(0.0, s)?;
    let upper = sigma.conditional_mean(s, 1.0)?;
    Ok(beta_from_means(lower, upper, compromise, s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ResampleUnit {
    #[default]
    Rows,
    /// Resample whole subjects, keeping each subject's rows together.
    Subjects,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig {
    pub reps: usize,
    pub seed: u64,
    pub unit: ResampleUnit,
    /// Keep `s̃` at the full-sample estimate instead of re-estimating it
    /// in every replicate.
    pub fix_indifferent_type: bool,
    pub grid: usize,
    pub execution: Execution,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            reps: 2000,
            seed: 0,
            unit: ResampleUnit::Rows,
            fix_indifferent_type: false,
            grid: DEFAULT_GRID,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub compromise: f64,
    pub n: usize,
    pub bandwidth: f64,
    pub s_tilde_hat: f64,
    pub beta_hat: f64,
    pub ci_95: (f64, f64),
    pub ci_99: (f64, f64),
    pub reject_95: bool,
    pub reject_99: bool,
    pub replicates: usize,
    pub failed_replicates: usize,
    pub seed: u64,
    pub resample_unit: ResampleUnit,
    pub indifferent_type_fixed: bool,
}

impl TestResult {
    /// One row in the layout of a results table: payoff, estimate, CIs.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<18} {:>10} {:>10} {:>22} {:>22}\n",
            "compromise payoff", "s~_hat", "beta_hat", "95% CI", "99% CI"
        ));
        let ci = |c: (f64, f64)| format!("({:.3}, {:.3})", c.0, c.1);
        out.push_str(&format!(
            "{:<18.2} {:>10.4} {:>10.4} {:>22} {:>22}\n",
            self.compromise,
            self.s_tilde_hat,
            self.beta_hat,
            ci(self.ci_95),
            ci(self.ci_99)
        ));
        out
    }
}

/// Type-7 (linear interpolation) sample quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

struct Resampler {
    sample: SortedSample,
    /// Row indices (in sorted order) of each cluster.
    clusters: Option<Vec<Vec<usize>>>,
}

impl Resampler {
    fn new(data: &Dataset, unit: ResampleUnit) -> Result<Self> {
        let mut rows: Vec<(f64, f64, Option<&str>)> = data
            .rows()
            .iter()
            .map(|r| (r.t, r.action as f64, r.subject.as_deref()))
            .collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let clusters = match unit {
            ResampleUnit::Rows => None,
            ResampleUnit::Subjects => {
                let mut ids: Vec<&str> = Vec::with_capacity(rows.len());
                for r in &rows {
                    ids.push(r.2.ok_or_else(|| {
                        QreError::InsufficientData(
                            "subject resampling needs a subject on every row".into(),
                        )
                    })?);
                }
                let mut names: Vec<&str> = ids.clone();
                names.sort_unstable();
                names.dedup();
                let mut groups = vec![Vec::new(); names.len()];
                for (i, id) in ids.iter().enumerate() {
                    let g = names.binary_search(id).expect("subject listed");
                    groups[g].push(i);
                }
                Some(groups)
            }
        };
        let sample = SortedSample {
            types: rows.iter().map(|r| r.0).collect(),
            actions: rows.iter().map(|r| r.1).collect(),
        };
        Ok(Self { sample, clusters })
    }

    fn weights(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.sample.len();
        let mut w = vec![0.0; n];
        match &self.clusters {
            None => {
                for _ in 0..n {
                    w[rng.gen_range(0..n)] += 1.0;
                }
            }
            Some(groups) => {
                for _ in 0..groups.len() {
                    for &i in &groups[rng.gen_range(0..groups.len())] {
                        w[i] += 1.0;
                    }
                }
            }
        }
        w
    }
}

/// Full pipeline on one (possibly reweighted) sample: bandwidth, kernel
/// estimate, indifferent type, `β`.
fn pipeline(
    sample: &SortedSample,
    weights: Option<&[f64]>,
    grid: &[f64],
    compromise: f64,
    fixed: Option<f64>,
) -> Result<(f64, f64, f64)> {
    let prefix = sample.prefix(weights);
    let h = sample.bandwidth(&prefix)?;
    let s = match fixed {
        Some(s) => s,
        None => {
            let (values, _) = sample.smooth(&prefix, h, grid);
            first_down_crossing(grid, &values)?
        }
    };
    if !(s > 0.0 && s < 1.0) {
        return Err(QreError::NoIndifferentType);
    }
    let (lower, upper) = sample.split_means(&prefix, s)?;
    Ok((h, s, beta_from_means(lower, upper, compromise, s)))
}

/// Percentile bootstrap of `β` at the 95% and 99% levels.
///
/// Replicate `r` draws from ChaCha8 seeded with `seed` on stream `r`, so the
/// result is identical in parallel and sequential execution.
pub fn bootstrap_ci(data: &Dataset, compromise: f64, cfg: &BootstrapConfig) -> Result<TestResult> {
    GameSpec::compromise_game(compromise)?;
    if cfg.reps < MIN_REPLICATES {
        return domain(format!(
            "bootstrap needs at least {MIN_REPLICATES} replicates, got {}",
            cfg.reps
        ));
    }
    if cfg.grid < 2 {
        return domain("kernel grid needs at least two points");
    }
    let resampler = Resampler::new(data, cfg.unit)?;
    let grid = uniform_grid(cfg.grid);
    let (bandwidth, s_hat, beta_hat) = pipeline(&resampler.sample, None, &grid, compromise, None)?;
    let fixed = cfg.fix_indifferent_type.then_some(s_hat);

    let draws: Vec<Option<f64>> = par::map_indexed(cfg.execution, cfg.reps, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(r as u64);
        let w = resampler.weights(&mut rng);
        pipeline(&resampler.sample, Some(&w), &grid, compromise, fixed)
            .ok()
            .map(|(_, _, b)| b)
    });
    let mut betas: Vec<f64> = draws.iter().flatten().copied().collect();
    let failed = cfg.reps - betas.len();
    if failed as f64 > MAX_FAILURE_SHARE * cfg.reps as f64 {
        return Err(QreError::UnstableEstimate {
            failed,
            reps: cfg.reps,
        });
    }
    betas.sort_by(f64::total_cmp);
    let ci = |level: f64| {
        let a = 0.5 * (1.0 - level);
        (quantile_sorted(&betas, a), quantile_sorted(&betas, 1.0 - a))
    };
    let (ci_95, ci_99) = (ci(0.95), ci(0.99));
    let excludes_zero = |c: (f64, f64)| !(c.0 <= 0.0 && 0.0 <= c.1);
    Ok(TestResult {
        compromise,
        n: data.len(),
        bandwidth,
        s_tilde_hat: s_hat,
        beta_hat,
        ci_95,
        ci_99,
        reject_95: excludes_zero(ci_95),
        reject_99: excludes_zero(ci_99),
        replicates: cfg.reps,
        failed_replicates: failed,
        seed: cfg.seed,
        resample_unit: cfg.unit,
        indifferent_type_fixed: cfg.fix_indifferent_type,
    })
}

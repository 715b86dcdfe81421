use std::io::Write;

use serde::Serialize;

use super::dataset::Dataset;
use crate::error::{domain, QreError, Result};

pub const DEFAULT_GRID: usize = 101;

/// Observations sorted by type, with optional per-row weights supplied at
/// query time. Bootstrap replicates are weight vectors over this order.
#[derive(Debug, Clone)]
pub(crate) struct SortedSample {
    pub types: Vec<f64>,
    pub actions: Vec<f64>,
}

/// Cumulative weights and weighted actions; entry `i` covers rows `..i`.
pub(crate) struct Prefix {
    w: Vec<f64>,
    wa: Vec<f64>,
}

impl Prefix {
    pub fn total(&self) -> f64 {
        *self.w.last().unwrap()
    }

    pub fn total_actions(&self) -> f64 {
        *self.wa.last().unwrap()
    }

    /// `(weight, weighted action sum)` over rows `lo..hi`.
    pub fn range(&self, lo: usize, hi: usize) -> (f64, f64) {
        (self.w[hi] - self.w[lo], self.wa[hi] - self.wa[lo])
    }
}

impl SortedSample {
    pub fn new(data: &Dataset) -> Self {
        let mut pairs: Vec<(f64, f64)> = data
            .rows()
            .iter()
            .map(|r| (r.t, r.action as f64))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let (types, actions) = pairs.into_iter().unzip();
        Self { types, actions }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn prefix(&self, weights: Option<&[f64]>) -> Prefix {
        let n = self.len();
        let mut w = Vec::with_capacity(n + 1);
        let mut wa = Vec::with_capacity(n + 1);
        w.push(0.0);
        wa.push(0.0);
        for i in 0..n {
            let wi = weights.map_or(1.0, |ws| ws[i]);
            w.push(w[i] + wi);
            wa.push(wa[i] + wi * self.actions[i]);
        }
        Prefix { w, wa }
    }

    /// Index range of rows with `a <= type <= b`.
    pub fn window(&self, a: f64, b: f64) -> (usize, usize) {
        let lo = self.types.partition_point(|&t| t < a);
        let hi = self.types.partition_point(|&t| t <= b);
        (lo, hi.max(lo))
    }

    pub fn bandwidth(&self, prefix: &Prefix) -> Result<f64> {
        let n = prefix.total();
        if n < 2.0 {
            return domain("bandwidth needs at least two observations");
        }
        // Actions are binary, so Σ w a² = Σ w a.
        let s = prefix.total_actions();
        let var = ((s - s * s / n) / (n - 1.0)).max(0.0);
        if var == 0.0 {
            return Err(QreError::DegenerateBandwidth(
                "all actions are identical, so the choice standard deviation is 0".into(),
            ));
        }
        Ok(n.powf(-0.2) * var.sqrt())
    }

    pub fn smooth(&self, prefix: &Prefix, h: f64, grid: &[f64]) -> (Vec<Option<f64>>, Vec<f64>) {
        grid.iter()
            .map(|&s| {
                let (lo, hi) = self.window(s - h, s + h);
                let (w, wa) = prefix.range(lo, hi);
                ((w > 0.0).then(|| wa / w), w)
            })
            .unzip()
    }

    /// Raw action means over `type <= s` and `type >= s`.
    pub fn split_means(&self, prefix: &Prefix, s: f64) -> Result<(f64, f64)> {
        let below = self.types.partition_point(|&t| t <= s);
        let above = self.types.partition_point(|&t| t < s);
        let (wl, al) = prefix.range(0, below);
        let (wu, au) = prefix.range(above, self.len());
        if wl <= 0.0 || wu <= 0.0 {
            return Err(QreError::InsufficientData(format!(
                "no observations on one side of s̃ = {s}"
            )));
        }
        Ok((al / wl, au / wu))
    }
}

pub(crate) fn uniform_grid(points: usize) -> Vec<f64> {
    let last = (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { 1.0 } else { i as f64 / last })
        .collect()
}

/// `h = n^{-1/5} ρ̂` with `ρ̂` the sample standard deviation of actions.
pub fn silverman_bandwidth(data: &Dataset) -> Result<f64> {
    let sample = SortedSample::new(data);
    sample.bandwidth(&sample.prefix(None))
}

/// Uniform-kernel estimate of the choice probability on a type grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelEstimate {
    pub bandwidth: f64,
    pub grid: Vec<f64>,
    /// `None` where no observation lies within the bandwidth.
    pub values: Vec<Option<f64>>,
    pub counts: Vec<usize>,
}

impl KernelEstimate {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["s", "sigma_hat", "count"])?;
        for ((s, v), c) in self.grid.iter().zip(&self.values).zip(&self.counts) {
            wtr.write_record([
                s.to_string(),
                v.map(|x| x.to_string()).unwrap_or_default(),
                c.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Mean action among observations with `|type - s| <= h`, for each `s` on
/// a uniform grid of `grid` points.
pub fn kernel_estimate(data: &Dataset, h: f64, grid: usize) -> Result<KernelEstimate> {
    if !(h > 0.0) || !h.is_finite() {
        return domain(format!("bandwidth must be positive, got {h}"));
    }
    if grid < 2 {
        return domain("kernel grid needs at least two points");
    }
    let sample = SortedSample::new(data);
    let prefix = sample.prefix(None);
    let points = uniform_grid(grid);
    let (values, weights) = sample.smooth(&prefix, h, &points);
    Ok(KernelEstimate {
        bandwidth: h,
        grid: points,
        values,
        counts: weights.into_iter().map(|w| w.round() as usize).collect(),
    })
}

pub(crate) fn first_down_crossing(grid: &[f64], values: &[Option<f64>]) -> Result<f64> {
    for i in 0..grid.len().saturating_sub(1) {
        let (Some(a), Some(b)) = (values[i], values[i + 1]) else {
            continue;
        };
        if a == 0.5 {
            return Ok(grid[i]);
        }
        if a > 0.5 && b < 0.5 {
            return Ok(grid[i] + (a - 0.5) / (a - b) * (grid[i + 1] - grid[i]));
        }
    }
    Err(QreError::NoIndifferentType)
}

/// First down-crossing of 1/2, interpolated linearly between grid points.
pub fn estimate_indifferent_type(est: &KernelEstimate) -> Result<f64> {
    first_down_crossing(&est.grid, &est.values)
}

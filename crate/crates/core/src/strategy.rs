//! Continuous piecewise-linear strategies and their exact integral calculus.
//!
//! A [`Strategy`] maps types in `[0, 1]` to the probability of action 1. It is
//! stored as knots with linear interpolation in between, so every integral
//! used by the equilibrium conditions (means, conditional means, window
//! means) is computed in closed form by the trapezoid rule over knots.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, QreError, Result};

/// Continuous piecewise-linear function on an arbitrary closed interval.
///
/// Used directly for partial objects such as the lower branch of a
/// compromise-game strategy or the segment produced by the symmetric
/// extension, whose domains are not `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    ts: Vec<f64>,
    ps: Vec<f64>,
    /// `cum[i]` is the integral from `ts[0]` to `ts[i]`.
    cum: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return domain("a piecewise-linear function needs at least two knots");
        }
        for &(t, p) in &knots {
            if !t.is_finite() || !p.is_finite() {
                return domain("knots must be finite");
            }
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return domain("knot types must be strictly increasing");
        }
        let (ts, ps): (Vec<f64>, Vec<f64>) = knots.into_iter().unzip();
        let mut cum = Vec::with_capacity(ts.len());
        cum.push(0.0);
        for i in 1..ts.len() {
            let area = 0.5 * (ts[i] - ts[i - 1]) * (ps[i] + ps[i - 1]);
            cum.push(cum[i - 1] + area);
        }
        Ok(Self { ts, ps, cum })
    }

    pub fn start(&self) -> f64 {
        self.ts[0]
    }

    pub fn end(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    pub fn knot_types(&self) -> &[f64] {
        &self.ts
    }

    pub fn knot_values(&self) -> &[f64] {
        &self.ps
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ts.iter().copied().zip(self.ps.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if t.is_nan() || t < self.start() || t > self.end() {
            return domain(format!(
                "t = {t} outside [{}, {}]",
                self.start(),
                self.end()
            ));
        }
        Ok(())
    }

    /// Index `i` of the segment `[ts[i], ts[i+1]]` containing `t`, with
    /// `ts[i] <= t`. Returns the last knot index when `t` equals the end.
    fn segment(&self, t: f64) -> usize {
        let idx = self.ts.partition_point(|&x| x <= t);
        idx.saturating_sub(1)
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        let i = self.segment(t);
        if self.ts[i] == t || i + 1 == self.ts.len() {
            return self.ps[i];
        }
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let (p0, p1) = (self.ps[i], self.ps[i + 1]);
        p0 + (p1 - p0) * (t - t0) / (t1 - t0)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.eval_unchecked(t))
    }

    /// Integral from the start of the domain to `t`.
    fn primitive(&self, t: f64) -> f64 {
        let i = self.segment(t);
        if self.ts[i] == t || i + 1 == self.ts.len() {
            return self.cum[i];
        }
        let v = self.eval_unchecked(t);
        self.cum[i] + 0.5 * (t - self.ts[i]) * (self.ps[i] + v)
    }

    /// Exact integral over `[a, b]` with `a <= b` inside the domain.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        self.check_domain(a)?;
        self.check_domain(b)?;
        if a > b {
            return domain(format!("integration bounds reversed: [{a}, {b}]"));
        }
        Ok(self.primitive(b) - self.primitive(a))
    }

    pub fn total_integral(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn monotonicity(&self) -> Monotonicity {
        let diffs = self.ps.windows(2).map(|w| w[1] - w[0]);
        let mut dec = true;
        let mut inc = true;
        for d in diffs {
            dec &= d < 0.0;
            inc &= d > 0.0;
        }
        match (dec, inc) {
            (true, _) => Monotonicity::StrictlyDecreasing,
            (_, true) => Monotonicity::StrictlyIncreasing,
            _ => Monotonicity::Neither,
        }
    }

    /// Unique `t` with value `p` for a strictly monotone function.
    pub fn inverse(&self, p: f64) -> Result<f64> {
        let increasing = match self.monotonicity() {
            Monotonicity::StrictlyIncreasing => true,
            Monotonicity::StrictlyDecreasing => false,
            Monotonicity::Neither => {
                return Err(QreError::NonMonotone(
                    "inverse requires a strictly monotone function".into(),
                ))
            }
        };
        let first = self.ps[0];
        let last = *self.ps.last().unwrap();
        let (lo, hi) = if increasing { (first, last) } else { (last, first) };
        if p.is_nan() || p < lo || p > hi {
            return domain(format!("p = {p} outside the range [{lo}, {hi}]"));
        }
        // Index of the first knot at or past `p` in the direction of travel.
        let j = if increasing {
            self.ps.partition_point(|&x| x < p)
        } else {
            self.ps.partition_point(|&x| x > p)
        };
        if self.ps[j] == p {
            return Ok(self.ts[j]);
        }
        let (t0, t1) = (self.ts[j - 1], self.ts[j]);
        let (p0, p1) = (self.ps[j - 1], self.ps[j]);
        Ok(t0 + (p - p0) * (t1 - t0) / (p1 - p0))
    }

    /// Components of the level set `{t : f(t) = level}`.
    pub fn level_set(&self, level: f64) -> Vec<LevelComponent> {
        let mut comps: Vec<LevelComponent> = Vec::new();
        let mut push = |c: LevelComponent| {
            if let Some(last) = comps.last_mut() {
                if c.lower <= last.upper {
                    last.upper = last.upper.max(c.upper);
                    return;
                }
            }
            comps.push(c);
        };
        for i in 0..self.ts.len() - 1 {
            let (t0, t1) = (self.ts[i], self.ts[i + 1]);
            let d0 = self.ps[i] - level;
            let d1 = self.ps[i + 1] - level;
            if d0 == 0.0 && d1 == 0.0 {
                push(LevelComponent { lower: t0, upper: t1 });
            } else if d0 == 0.0 {
                push(LevelComponent::point(t0));
            } else if d0 * d1 < 0.0 {
                let t = t0 + (level - self.ps[i]) * (t1 - t0) / (self.ps[i + 1] - self.ps[i]);
                push(LevelComponent::point(t));
            }
        }
        if *self.ps.last().unwrap() == level {
            push(LevelComponent::point(self.end()));
        }
        comps
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelComponent {
    pub lower: f64,
    pub upper: f64,
}

impl LevelComponent {
    fn point(t: f64) -> Self {
        Self { lower: t, upper: t }
    }

    pub fn is_plateau(&self) -> bool {
        self.upper > self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    StrictlyDecreasing,
    StrictlyIncreasing,
    Neither,
}

/// Outcome of [`Strategy::check_shape`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub classification: Monotonicity,
    pub interior: bool,
    /// Present iff the level set is a single point.
    pub crossing_type: Option<f64>,
    /// Number of connected components of the level set.
    pub crossing_multiplicity: usize,
    /// Some component of the level set has positive length.
    pub plateau: bool,
}

/// A strategy `[0, 1] -> [0, 1]`, piecewise linear between knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    f: PiecewiseLinear,
}

#[derive(Serialize, Deserialize)]
struct StrategyJson {
    knots: Vec<[f64; 2]>,
}

impl Strategy {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        let f = PiecewiseLinear::new(knots)?;
        if f.start() != 0.0 || f.end() != 1.0 {
            return domain("strategy knots must start at t = 0 and end at t = 1");
        }
        if f.ps.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return domain("strategy probabilities must lie in [0, 1]");
        }
        Ok(Self { f })
    }

    pub fn constant(p: f64) -> Result<Self> {
        Self::new(vec![(0.0, p), (1.0, p)])
    }

    pub fn linear(at_zero: f64, at_one: f64) -> Result<Self> {
        Self::new(vec![(0.0, at_zero), (1.0, at_one)])
    }

    /// Strategy with knots on the uniform grid `i / (n - 1)`.
    pub fn from_grid(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return domain("grid strategy needs at least two values");
        }
        let last = (n - 1) as f64;
        let knots = values
            .iter()
            .enumerate()
            .map(|(i, &p)| (if i == n - 1 { 1.0 } else { i as f64 / last }, p))
            .collect();
        Self::new(knots)
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return domain("grid strategy needs at least two values");
        }
        let last = (n - 1) as f64;
        let values: Vec<f64> = (0..n).map(|i| f(i as f64 / last)).collect();
        Self::from_grid(&values)
    }

    pub fn as_piecewise(&self) -> &PiecewiseLinear {
        &self.f
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.f.knots()
    }

    pub fn knot_types(&self) -> &[f64] {
        self.f.knot_types()
    }

    pub fn knot_values(&self) -> &[f64] {
        self.f.knot_values()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.f.eval(t)
    }

    /// Evaluation for callers that have already validated `t`; clamps into
    /// the domain.
    pub(crate) fn at(&self, t: f64) -> f64 {
        self.f.eval_unchecked(t.clamp(0.0, 1.0))
    }

    pub fn mean(&self) -> f64 {
        self.f.total_integral()
    }

    /// Exact integral over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        self.f.integral(a, b)
    }

    /// `∫_0^t σ`, the lower-type mass used by the compromise game.
    pub(crate) fn lower_integral(&self, t: f64) -> f64 {
        self.f.primitive(t.clamp(0.0, 1.0))
    }

    /// Average of the strategy over `[a, b]`.
    pub fn conditional_mean(&self, a: f64, b: f64) -> Result<f64> {
        if a.is_nan() || b.is_nan() || a < 0.0 || b > 1.0 || a >= b {
            return domain(format!("conditional mean needs 0 <= a < b <= 1, got [{a}, {b}]"));
        }
        Ok((self.f.primitive(b) - self.f.primitive(a)) / (b - a))
    }

    /// Average over `[θ - ε, θ + ε]`; the window must lie inside `[0, 1]`.
    pub fn window_mean(&self, theta: f64, eps: f64) -> Result<f64> {
        if eps.is_nan() || eps <= 0.0 {
            return domain(format!("window halfwidth must be positive, got {eps}"));
        }
        let (a, b) = (theta - eps, theta + eps);
        if a.is_nan() || a < 0.0 || b > 1.0 {
            return domain(format!("window [{a}, {b}] leaves the type space"));
        }
        Ok((self.f.primitive(b) - self.f.primitive(a)) / (2.0 * eps))
    }

    /// Average over `[θ - ε, θ + ε] ∩ [0, 1]`, normalized by the clipped length.
    pub fn window_mean_clipped(&self, theta: f64, eps: f64) -> Result<f64> {
        if eps.is_nan() || eps <= 0.0 {
            return domain(format!("window halfwidth must be positive, got {eps}"));
        }
        let a = (theta - eps).max(0.0);
        let b = (theta + eps).min(1.0);
        if !(a < b) {
            return domain(format!("window around {theta} does not meet the type space"));
        }
        Ok((self.f.primitive(b) - self.f.primitive(a)) / (b - a))
    }

    pub fn check_shape(&self, level: f64) -> ShapeReport {
        let comps = self.f.level_set(level);
        let plateau = comps.iter().any(LevelComponent::is_plateau);
        let crossing_type = match comps.as_slice() {
            [c] if !c.is_plateau() => Some(c.lower),
            _ => None,
        };
        ShapeReport {
            classification: self.f.monotonicity(),
            interior: self.f.ps.iter().all(|&p| p > 0.0 && p < 1.0),
            crossing_type,
            crossing_multiplicity: comps.len(),
            plateau,
        }
    }

    pub fn inverse(&self, p: f64) -> Result<f64> {
        self.f.inverse(p)
    }

    pub fn min_value(&self) -> f64 {
        self.f.ps.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.f.ps.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise map of the knot values, keeping knot types.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.knots().map(|(t, p)| (t, f(p))).collect())
    }

    pub fn to_json(&self) -> String {
        let doc = StrategyJson {
            knots: self.knots().map(|(t, p)| [t, p]).collect(),
        };
        serde_json::to_string(&doc).expect("strategy JSON serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: StrategyJson = serde_json::from_str(s)?;
        Self::new(doc.knots.into_iter().map(|[t, p]| (t, p)).collect())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["t", "p"])?;
        for (t, p) in self.knots() {
            wtr.write_record([t.to_string(), p.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let mut knots = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = rec.position().map_or(i as u64 + 2, |p| p.line());
            let field = |j: usize| -> Result<f64> {
                let raw = rec.get(j).ok_or_else(|| QreError::Parse {
                    line,
                    message: "expected two columns (t, p)".into(),
                })?;
                raw.trim().parse::<f64>().map_err(|e| QreError::Parse {
                    line,
                    message: format!("invalid number {raw:?}: {e}"),
                })
            };
            knots.push((field(0)?, field(1)?));
        }
        Self::new(knots)
    }

    /// Loads a strategy from a `.json` or `.csv` file, chosen by extension.
    pub fn load(path: &Path) -> Result<Self> {
        let is_csv = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if is_csv {
            Self::read_csv(std::fs::File::open(path)?)
        } else {
            Self::from_json(&std::fs::read_to_string(path)?)
        }
    }
}

impl Serialize for Strategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StrategyJson {
            knots: self.knots().map(|(t, p)| [t, p]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Strategy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = StrategyJson::deserialize(d)?;
        Strategy::new(doc.knots.into_iter().map(|[t, p]| (t, p)).collect())
            .map_err(serde::de::Error::custom)
    }
}

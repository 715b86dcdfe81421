//! Closed-form indifferent-type sets and explicit equilibrium construction.
//!
//! Constructed strategies replace the step families of the existence
//! arguments with a steep linear ramp of half-width `w / 2` through the
//! indifferent type. Flat levels are then solved in closed form so the
//! equilibrium moment condition holds exactly.

use serde::Serialize;

use crate::error::{domain, QreError, Result};
use crate::games::GameSpec;
use crate::strategy::{Monotonicity, PiecewiseLinear, Strategy};

/// Partition size used when completing a compromise-game SQRE. The
/// symmetry error of the extension shrinks like `1 / T²`.
pub const DEFAULT_COMPLETION_PARTITION: usize = 4096;

const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetKind {
    OpenInterval,
    Singleton,
}

/// An open interval or a single point of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeSet {
    pub kind: SetKind,
    pub lower: f64,
    pub upper: f64,
    pub measure: f64,
}

impl TypeSet {
    pub fn open(lower: f64, upper: f64) -> Self {
        debug_assert!(lower < upper);
        Self {
            kind: SetKind::OpenInterval,
            lower,
            upper,
            measure: upper - lower,
        }
    }

    pub fn singleton(at: f64) -> Self {
        Self {
            kind: SetKind::Singleton,
            lower: at,
            upper: at,
            measure: 0.0,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        match self.kind {
            SetKind::OpenInterval => self.lower < t && t < self.upper,
            SetKind::Singleton => t == self.lower,
        }
    }

    pub fn is_subset_of(&self, other: &TypeSet) -> bool {
        match (self.kind, other.kind) {
            (_, SetKind::OpenInterval) => {
                let inner_ok = self.kind == SetKind::OpenInterval
                    || other.contains(self.lower);
                inner_ok && other.lower <= self.lower && self.upper <= other.upper
            }
            (SetKind::Singleton, SetKind::Singleton) => self.lower == other.lower,
            (SetKind::OpenInterval, SetKind::Singleton) => false,
        }
    }
}

/// Indifferent types supportable by some QRE.
pub fn qre_indifferent_set(game: &GameSpec) -> TypeSet {
    match *game {
        GameSpec::VolunteersDilemma { benefit: b } => {
            TypeSet::open(b / (b + 2.0), 2.0 * b / (b + 2.0))
        }
        GameSpec::GlobalGame {
            attack_cost: k,
            failure_penalty: c,
            ..
        } => TypeSet::open(k, k + c),
        GameSpec::CompromiseGame { compromise: m } => TypeSet::open(0.0, m),
    }
}

/// Indifferent types supportable by some symmetric QRE.
pub fn sqre_indifferent_set(game: &GameSpec) -> TypeSet {
    match *game {
        GameSpec::VolunteersDilemma { benefit: b } => TypeSet::open(b / (b + 1.0), b / 2.0),
        GameSpec::GlobalGame {
            attack_cost: k,
            failure_penalty: c,
            ..
        } => TypeSet::singleton((2.0 * k + c) / 2.0),
        GameSpec::CompromiseGame { compromise: m } => TypeSet::open(0.0, m),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumModel {
    Qre,
    Sqre,
    Ne,
}

/// Attainable equilibrium volunteering rates in the volunteer's dilemma.
pub fn vd_mean_range(benefit: f64, model: EquilibriumModel) -> Result<TypeSet> {
    GameSpec::volunteers_dilemma(benefit).map_err(|e| QreError::Domain(e.to_string()))?;
    let b = benefit;
    Ok(match model {
        EquilibriumModel::Qre => TypeSet::open(b / (b + 2.0), (b + 1.0) / (b + 2.0)),
        EquilibriumModel::Sqre => TypeSet::open(0.5, b / (b + 1.0)),
        EquilibriumModel::Ne => TypeSet::singleton(b / (b + 1.0)),
    })
}

/// Equilibrium volunteering rate implied by the indifferent type.
pub fn vd_mean_from_indifferent_type(benefit: f64, indifferent: f64) -> f64 {
    1.0 - indifferent / benefit
}

/// Shape parameters for constructed equilibria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstructionStyle {
    /// QRE: the conditional mean `σ̃_H` above the indifferent type (volunteer's
    /// dilemma, global game) or `σ̃_L` below it (compromise game). Symmetric
    /// SQRE: the deviation from 1/2 at the ends of the symmetric part.
    /// `None` picks the midpoint of the admissible range.
    pub moment: Option<f64>,
    /// Full width of the ramp through the indifferent type.
    pub ramp_width: f64,
    /// Position of the ramp height inside its admissible range, in (0, 1).
    pub ramp_fraction: f64,
}

impl Default for ConstructionStyle {
    fn default() -> Self {
        Self {
            moment: None,
            ramp_width: 1e-3,
            ramp_fraction: 0.5,
        }
    }
}

impl ConstructionStyle {
    pub fn with_moment(moment: f64) -> Self {
        Self {
            moment: Some(moment),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.ramp_width > 0.0 && self.ramp_width.is_finite()) {
            return Err(QreError::ConstraintInfeasible(format!(
                "ramp width must be positive, got {}",
                self.ramp_width
            )));
        }
        if !(self.ramp_fraction > 0.0 && self.ramp_fraction < 1.0) {
            return Err(QreError::ConstraintInfeasible(format!(
                "ramp fraction must lie in (0, 1), got {}",
                self.ramp_fraction
            )));
        }
        Ok(())
    }

    fn pick_moment(&self, lo: f64, hi: f64, what: &str) -> Result<f64> {
        if !(lo < hi) {
            return Err(QreError::ConstraintInfeasible(format!(
                "{what} has an empty admissible range"
            )));
        }
        match self.moment {
            None => Ok(0.5 * (lo + hi)),
            Some(m) if m > lo && m < hi => Ok(m),
            Some(m) => Err(QreError::ConstraintInfeasible(format!(
                "{what} = {m} outside the admissible range ({lo}, {hi})"
            ))),
        }
    }
}

fn unsupportable(value: f64, set: &TypeSet) -> QreError {
    let reason = match set.kind {
        SetKind::OpenInterval => format!("supportable types are ({}, {})", set.lower, set.upper),
        SetKind::Singleton => format!("the only supportable type is {}", set.lower),
    };
    QreError::UnsupportableType { value, reason }
}

/// Outer value of a side that stays above 1/2: ramp from 1/2 to `1/2 + r`
/// over `hw`, then linear to the returned value at distance `len`, with
/// side mean `m`.
fn above_end(len: f64, hw: f64, r: f64, m: f64) -> f64 {
    (2.0 * m * len - hw * (1.0 + r)) / (len - hw) - 0.5 - r
}

/// Open interval of ramp heights `r` keeping `above_end` in `(1/2 + r, 1)`.
fn ramp_height_bounds(len: f64, hw: f64, m: f64) -> (f64, f64) {
    let a = len - hw;
    let x = (2.0 * m * len - hw) / a;
    let q = hw / a;
    ((x - 1.5) / (1.0 + q), (x - 1.0) / (2.0 + q))
}

/// Knots on `[a, b]` through `(t, 1/2)` with side means `m_left` on `[a, t]`
/// and `m_right` on `[t, b]`, strictly monotone in the given direction.
fn ramp_knots(
    a: f64,
    t: f64,
    b: f64,
    m_left: f64,
    m_right: f64,
    increasing: bool,
    style: &ConstructionStyle,
) -> Result<Vec<(f64, f64)>> {
    let (len_l, len_r) = (t - a, b - t);
    // Reflect the side below 1/2 so both sides are handled as "above".
    let (mu_l, mu_r) = if increasing {
        (1.0 - m_left, m_right)
    } else {
        (m_left, 1.0 - m_right)
    };
    for mu in [mu_l, mu_r] {
        if !(mu > 0.5 && mu < 1.0) {
            return Err(QreError::ConstraintInfeasible(format!(
                "side mean {mu} cannot be matched by a strictly monotone interior strategy"
            )));
        }
    }
    let hw = (0.5 * style.ramp_width)
        .min(0.25 * len_l.min(len_r))
        .min(2.0 * len_l * (1.0 - mu_l))
        .min(2.0 * len_r * (1.0 - mu_r));
    // Each side gets its own ramp height; σ stays strictly monotone through
    // t because both heights are positive.
    let height = |len: f64, mu: f64| {
        let (lo, hi) = ramp_height_bounds(len, hw, mu);
        let (lo, hi) = (lo.max(0.0), hi.min(0.5));
        if !(lo < hi) {
            return Err(QreError::ConstraintInfeasible(format!(
                "no ramp height matches side mean {mu} over length {len}"
            )));
        }
        Ok(lo + style.ramp_fraction * (hi - lo))
    };
    let (r_l, r_r) = (height(len_l, mu_l)?, height(len_r, mu_r)?);
    let v_l = above_end(len_l, hw, r_l, mu_l);
    let v_r = above_end(len_r, hw, r_r, mu_r);
    let s = if increasing { -1.0 } else { 1.0 };
    let flip = |v: f64| if increasing { 1.0 - v } else { v };
    Ok(vec![
        (a, flip(v_l)),
        (t - hw, 0.5 + s * r_l),
        (t, 0.5),
        (t + hw, 0.5 - s * r_r),
        (b, 1.0 - flip(v_r)),
    ])
}

fn finish(knots: Vec<(f64, f64)>, expected: Monotonicity) -> Result<Strategy> {
    let sigma = Strategy::new(knots).map_err(|e| QreError::ConstraintInfeasible(e.to_string()))?;
    let shape = sigma.check_shape(0.5);
    if shape.classification != expected || !shape.interior {
        return Err(QreError::ConstraintInfeasible(
            "constructed strategy lost strict monotonicity or interiority in rounding".into(),
        ));
    }
    Ok(sigma)
}

/// Threshold state implied by indifferent signal `x̃` in a global-game QRE.
pub fn gg_threshold_for(game: &GameSpec, indifferent: f64) -> Result<f64> {
    match *game {
        GameSpec::GlobalGame {
            attack_cost: k,
            failure_penalty: c,
            noise: eps,
        } => Ok(indifferent * (2.0 * eps + c) / c - eps * (2.0 * k + c) / c),
        _ => domain("threshold states exist only in the global game"),
    }
}

/// A QRE with indifferent type `t̃`.
pub fn construct_qre(game: &GameSpec, indifferent: f64, style: &ConstructionStyle) -> Result<Strategy> {
    game.validate()?;
    style.validate()?;
    let set = qre_indifferent_set(game);
    if !set.contains(indifferent) {
        return Err(unsupportable(indifferent, &set));
    }
    let t = indifferent;
    match *game {
        GameSpec::VolunteersDilemma { benefit: b } => {
            let lo = ((b - t - b * t) / (b * (1.0 - t))).max(0.0);
            let hi = ((b - t - 0.5 * b * t) / (b * (1.0 - t))).min(0.5);
            let high = style.pick_moment(lo, hi, "σ̃_H")?;
            let low = -high * (1.0 - t) / t + (b - t) / (b * t);
            let knots = ramp_knots(0.0, t, 1.0, low, high, false, style)?;
            finish(knots, Monotonicity::StrictlyDecreasing)
        }
        GameSpec::CompromiseGame { compromise: m } => {
            let hi = (m * (1.0 - t) / (2.0 * t * (1.0 - m))).min(1.0);
            let low = style.pick_moment(0.5, hi, "σ̃_L")?;
            let high = low * t * (1.0 - m) / (m * (1.0 - t));
            let knots = ramp_knots(0.0, t, 1.0, low, high, false, style)?;
            finish(knots, Monotonicity::StrictlyDecreasing)
        }
        GameSpec::GlobalGame { noise: eps, .. } => {
            let theta = gg_threshold_for(game, t)?;
            let (a, b) = (theta - eps, theta + eps);
            if a < 0.0 || b > 1.0 {
                return Err(QreError::ConstraintInfeasible(format!(
                    "threshold window [{a}, {b}] leaves the type space"
                )));
            }
            let alpha = (t - a) / (2.0 * eps);
            let hi = if alpha < 0.5 {
                (0.5 / (1.0 - alpha)).min(1.0)
            } else {
                1.0
            };
            let high = style.pick_moment(0.5, hi, "σ̃_H")?;
            let low = (0.5 - (1.0 - alpha) * high) / alpha;
            let mut knots = ramp_knots(a, t, b, low, high, true, style)?;
            if a > 0.0 {
                let va = knots[0].1;
                knots.insert(0, (0.0, 0.5 * va));
            }
            if b < 1.0 {
                let vb = knots.last().unwrap().1;
                knots.push((1.0, vb + 0.5 * (1.0 - vb)));
            }
            finish(knots, Monotonicity::StrictlyIncreasing)
        }
    }
}

/// A symmetric QRE with indifferent type `t̃` (volunteer's dilemma and
/// global game). Compromise-game SQRE are built by
/// [`complete_sqre_compromise`].
pub fn construct_sqre_symmetric(
    game: &GameSpec,
    indifferent: f64,
    style: &ConstructionStyle,
) -> Result<Strategy> {
    game.validate()?;
    style.validate()?;
    let set = sqre_indifferent_set(game);
    let t = indifferent;
    match *game {
        GameSpec::VolunteersDilemma { benefit: b } => {
            if !(t >= set.lower - BOUNDARY_TOL && t <= set.upper + BOUNDARY_TOL) {
                return Err(unsupportable(t, &set));
            }
            if t - set.lower <= BOUNDARY_TOL || set.upper - t <= BOUNDARY_TOL {
                return Err(QreError::ConstraintInfeasible(format!(
                    "type {t} lies on the boundary of ({}, {})",
                    set.lower, set.upper
                )));
            }
            let split = 2.0 * t - 1.0;
            let sigma_one = (b * t - t) / (2.0 * b * t - b);
            let outer = style.pick_moment(
                (2.0 * sigma_one - 1.5).max(0.0),
                (sigma_one - 0.5).min(0.5),
                "symmetric deviation",
            )?;
            let r = style.ramp_fraction * outer;
            let hw = (0.5 * style.ramp_width).min(0.25 * (1.0 - t));
            let knots = vec![
                (0.0, 2.0 * sigma_one - 0.5 - outer),
                (split, 0.5 + outer),
                (t - hw, 0.5 + r),
                (t, 0.5),
                (t + hw, 0.5 - r),
                (1.0, 0.5 - outer),
            ];
            finish(knots, Monotonicity::StrictlyDecreasing)
        }
        GameSpec::GlobalGame { .. } => {
            if (t - set.lower).abs() > BOUNDARY_TOL {
                return Err(unsupportable(t, &set));
            }
            let t = set.lower;
            let outer = style.pick_moment(0.0, 0.5, "symmetric deviation")?;
            let r = style.ramp_fraction * outer;
            let reach = t.min(1.0 - t);
            let hw = (0.5 * style.ramp_width).min(0.25 * reach);
            let left = if reach == t { 0.0 } else { t - reach };
            let right = if reach == t { t + reach } else { 1.0 };
            let mut knots = vec![
                (left, 0.5 - outer),
                (t - hw, 0.5 - r),
                (t, 0.5),
                (t + hw, 0.5 + r),
                (right, 0.5 + outer),
            ];
            if left > 0.0 {
                knots.insert(0, (0.0, 0.5 * (0.5 - outer)));
            }
            if right < 1.0 {
                knots.push((1.0, 0.5 + outer + 0.5 * (0.5 - outer)));
            }
            finish(knots, Monotonicity::StrictlyIncreasing)
        }
        GameSpec::CompromiseGame { .. } => domain(
            "compromise-game SQRE are pinned down by the strategy below the indifferent type; \
             use the symmetric extension",
        ),
    }
}

/// Audit record of the symmetric extension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricConstructionTrace {
    /// `h_0 = 1/2 < ... < h_T = σ(0)`.
    pub levels: Vec<f64>,
    /// `δ_t = h_{t+1} - h_t`.
    pub deltas: Vec<f64>,
    /// `s_t = σ⁻¹(h_t)`, from `s̃` down to 0.
    pub types: Vec<f64>,
    /// `D_t = ∫_{s_{t+1}}^{s_t} σ`.
    pub increments: Vec<f64>,
    /// `L_0 = 1/2`, `L_t = L_{t-1} - δ_{t-1}`.
    pub heights: Vec<f64>,
    /// `ε_1 .. ε_T`.
    pub steps: Vec<f64>,
    /// `(x_0, y_0) = (s̃, 1/2) .. (x_T, y_T)`.
    pub vertices: Vec<(f64, f64)>,
}

/// The extension of a lower branch above its indifferent type.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricExtension {
    /// Piecewise-linear extension on `[s̃, x_T]`.
    pub segment: PiecewiseLinear,
    pub trace: SymmetricConstructionTrace,
}

impl SymmetricExtension {
    /// Runs the construction with a uniform partition of `[1/2, σ(0)]` into
    /// `partition` intervals. Does not check that `x_T <= 1`.
    pub fn build(lower: &PiecewiseLinear, partition: usize) -> Result<Self> {
        validate_lower_branch(lower)?;
        if partition == 0 {
            return domain("partition size must be at least 1");
        }
        let n = partition;
        let top = lower.knot_values()[0];
        let s_tilde = lower.end();
        let levels: Vec<f64> = (0..=n)
            .map(|i| {
                if i == n {
                    top
                } else {
                    0.5 + (top - 0.5) * i as f64 / n as f64
                }
            })
            .collect();
        let deltas: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
        let mut types = Vec::with_capacity(n + 1);
        types.push(s_tilde);
        for &h in &levels[1..n] {
            types.push(lower.inverse(h)?);
        }
        types.push(0.0);
        let increments = types
            .windows(2)
            .map(|w| lower.integral(w[1], w[0]))
            .collect::<Result<Vec<f64>>>()?;
        let mut heights = Vec::with_capacity(n + 1);
        heights.push(0.5);
        for t in 1..=n {
            heights.push(heights[t - 1] - deltas[t - 1]);
        }
        let steps: Vec<f64> = (1..=n)
            .map(|t| increments[t - 1] / (0.5 * heights[t - 1] + 0.5 * heights[t]))
            .collect();
        let mut vertices = Vec::with_capacity(n + 1);
        vertices.push((s_tilde, 0.5));
        for t in 1..=n {
            let (x, y) = vertices[t - 1];
            vertices.push((x + steps[t - 1], y - deltas[t - 1]));
        }
        let segment = PiecewiseLinear::new(vertices.clone())?;
        Ok(Self {
            segment,
            trace: SymmetricConstructionTrace {
                levels,
                deltas,
                types,
                increments,
                heights,
                steps,
                vertices,
            },
        })
    }

    pub fn end_type(&self) -> f64 {
        self.segment.end()
    }
}

fn validate_lower_branch(lower: &PiecewiseLinear) -> Result<()> {
    if lower.start() != 0.0 {
        return domain("the lower branch must start at type 0");
    }
    let s_tilde = lower.end();
    if !(s_tilde > 0.0 && s_tilde < 1.0) {
        return domain(format!("indifferent type {s_tilde} must lie in (0, 1)"));
    }
    if lower.monotonicity() != Monotonicity::StrictlyDecreasing {
        return domain("the lower branch must be strictly decreasing");
    }
    let end = *lower.knot_values().last().unwrap();
    if (end - 0.5).abs() > BOUNDARY_TOL {
        return domain(format!("the lower branch must end at 1/2, got {end}"));
    }
    let top = lower.knot_values()[0];
    if top >= 1.0 {
        return domain(format!("σ(0) must be below 1, got {top}"));
    }
    Ok(())
}

/// The symmetric extension of `σ_low` on `[s̃, x_T]`, failing when it leaves
/// the type space.
pub fn construct_sqre_compromise(lower: &PiecewiseLinear, partition: usize) -> Result<SymmetricExtension> {
    let ext = SymmetricExtension::build(lower, partition)?;
    let x_end = ext.end_type();
    if x_end > 1.0 {
        return Err(QreError::InfeasibleExtension { x_end });
    }
    Ok(ext)
}

/// Shape of the strategy above `x_T`: `g` on `[0, 1]`, strictly decreasing
/// from 1 to 0. The tail is `e + (y_T - e)·g((t - x_T) / (1 - x_T))` with
/// `e` solved from the mean condition.
#[derive(Debug, Clone, PartialEq)]
pub struct TailProfile {
    g: PiecewiseLinear,
}

impl TailProfile {
    pub fn linear() -> Self {
        Self {
            g: PiecewiseLinear::new(vec![(0.0, 1.0), (1.0, 0.0)]).expect("linear profile"),
        }
    }

    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        let g = PiecewiseLinear::new(knots)?;
        let ok = g.start() == 0.0
            && g.end() == 1.0
            && g.knot_values()[0] == 1.0
            && *g.knot_values().last().unwrap() == 0.0
            && g.monotonicity() == Monotonicity::StrictlyDecreasing;
        if !ok {
            return domain("tail profile must decrease strictly from (0, 1) to (1, 0)");
        }
        Ok(Self { g })
    }

    pub fn mean(&self) -> f64 {
        self.g.total_integral()
    }
}

impl Default for TailProfile {
    fn default() -> Self {
        Self::linear()
    }
}

/// A full compromise-game SQRE: `σ_low` below `s̃`, the symmetric extension
/// up to `x_T`, then a tail meeting the mean condition `σ̄ = s̃·σ̃_L / M`.
pub fn complete_sqre_compromise(
    lower: &PiecewiseLinear,
    partition: usize,
    compromise: f64,
    tail: &TailProfile,
) -> Result<Strategy> {
    GameSpec::compromise_game(compromise)?;
    let ext = construct_sqre_compromise(lower, partition)?;
    let x_end = ext.end_type();
    if x_end >= 1.0 {
        return Err(QreError::InfeasibleExtension { x_end });
    }
    let s_tilde = lower.end();
    if s_tilde >= compromise {
        return Err(QreError::UnsupportableType {
            value: s_tilde,
            reason: format!("supportable types are (0, {compromise})"),
        });
    }
    let below = lower.total_integral();
    let target = below / compromise;
    let needed = target - below - ext.segment.total_integral();
    let len = 1.0 - x_end;
    let y_end = ext.trace.vertices.last().unwrap().1;
    let gbar = tail.mean();
    let e = (needed / len - y_end * gbar) / (1.0 - gbar);
    if !(e > 0.0 && e < y_end) {
        return Err(QreError::SlackInfeasible(format!(
            "the tail on [{x_end}, 1] would have to end at {e}, outside (0, {y_end})"
        )));
    }
    let mut knots: Vec<(f64, f64)> = lower.knots().collect();
    knots.extend(ext.segment.knots().skip(1));
    for (u, g) in tail.g.knots().skip(1) {
        let t = if u == 1.0 { 1.0 } else { x_end + u * len };
        knots.push((t, e + (y_end - e) * g));
    }
    finish(knots, Monotonicity::StrictlyDecreasing)
}

/// Necessary conditions for a compromise-game SQRE.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompromiseSymmetryReport {
    pub indifferent_type: f64,
    /// `σ(s̃ - e) > 1 - σ(s̃ + e)` on the checked grid; a violation signals
    /// types biased toward fighting.
    pub no_fight_bias: bool,
    /// Smallest grid `e` violating the first condition.
    pub fight_bias_witness: Option<f64>,
    /// For `M < 1/2`: types near 1 flee less than `1 - σ(0)`. `None` when
    /// `M = 1/2`, where the condition does not apply. A violation signals
    /// types biased toward fleeing.
    pub no_flee_bias: Option<bool>,
    /// Type beyond which `σ < 1 - σ(0)`, when the second condition holds.
    pub flee_bias_threshold: Option<f64>,
}

/// Checks both necessary symmetry conditions on an `e`-grid of size `grid`.
pub fn sqre_necessary_checks_compromise(
    sigma: &Strategy,
    compromise: f64,
    grid: usize,
) -> Result<CompromiseSymmetryReport> {
    GameSpec::compromise_game(compromise)?;
    let shape = sigma.check_shape(0.5);
    let s = match shape.crossing_type {
        Some(s) => s,
        None => return domain("strategy has no unique crossing of 1/2"),
    };
    if shape.classification != Monotonicity::StrictlyDecreasing {
        return domain("strategy must be strictly decreasing");
    }
    let reach = s.min(1.0 - s);
    let grid = grid.max(1);
    let mut witness = None;
    for i in 1..=grid {
        let e = reach * i as f64 / grid as f64;
        if sigma.at(s - e) <= 1.0 - sigma.at(s + e) {
            witness = Some(e);
            break;
        }
    }
    let top = sigma.at(0.0);
    let (no_flee_bias, threshold) = if compromise < 0.5 {
        let holds = sigma.at(1.0) < 1.0 - top;
        let threshold = if holds { sigma.inverse(1.0 - top).ok() } else { None };
        (Some(holds), threshold)
    } else {
        (None, None)
    };
    Ok(CompromiseSymmetryReport {
        indifferent_type: s,
        no_fight_bias: witness.is_none(),
        fight_bias_witness: witness,
        no_flee_bias,
        flee_bias_threshold: threshold,
    })
}

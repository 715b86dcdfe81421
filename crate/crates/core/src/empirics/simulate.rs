use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, Observation};
use crate::error::{domain, Result};
use crate::games::GameSpec;
use crate::strategy::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeGrid {
    #[default]
    Continuous,
    /// Types on `{0, 0.01, ..., 1}`.
    Hundredths,
}

/// Uniform types, actions Bernoulli(σ(type)). Deterministic given `seed`.
pub fn simulate_dataset(
    game: &GameSpec,
    sigma: &Strategy,
    n: usize,
    seed: u64,
    grid: TypeGrid,
) -> Result<Dataset> {
    game.validate()?;
    if n == 0 {
        return domain("simulation needs n >= 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| {
            let t = match grid {
                TypeGrid::Continuous => rng.gen::<f64>(),
                TypeGrid::Hundredths => rng.gen_range(0..=100u32) as f64 / 100.0,
            };
            let action = (rng.gen::<f64>() < sigma.at(t)) as u8;
            Observation::new(t, action)
        })
        .collect();
    Dataset::new(rows)
}

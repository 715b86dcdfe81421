//! Kernel estimation of choice curves and the moment test on choice data.

mod bootstrap;
mod dataset;
mod diagnostic;
mod kernel;
mod simulate;

pub use bootstrap::{
    beta_from_strategy, beta_statistic, bootstrap_ci, quantile_sorted, BootstrapConfig,
    ResampleUnit, TestResult, MAX_FAILURE_SHARE, MIN_REPLICATES,
};
pub use dataset::{Dataset, Observation};
pub use diagnostic::{isotonic_decreasing, monotonicity_diagnostic, MonotonicityReport};
pub use kernel::{
    estimate_indifferent_type, kernel_estimate, silverman_bandwidth, KernelEstimate, DEFAULT_GRID,
};
pub use simulate::{simulate_dataset, TypeGrid};

//! Quantal response equilibria in binary-action games with a continuum of
//! types.
//!
//! The crate covers three games (volunteer's dilemma, global game,
//! compromise game): closed-form characterization of the indifferent types
//! an equilibrium can support, explicit equilibrium construction,
//! verification of candidate strategies, a logit solver, and the
//! nonparametric moment test on `(type, action)` data.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characterize;
pub mod empirics;
pub mod error;
pub mod games;
pub mod logit;
pub mod par;
pub mod strategy;
pub mod verify;

pub use error::{QreError, Result};
pub use games::GameSpec;
pub use strategy::{Monotonicity, PiecewiseLinear, ShapeReport, Strategy};

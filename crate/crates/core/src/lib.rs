//! Exact computations on finite fragments of the rational Urysohn space:
//! metric construction, continuous-logic evaluation, structure cones and
//! approximate homogeneity checks.

pub mod cli;
pub mod error;
pub mod grey;
pub mod homog;
pub mod logic;
pub mod metric;
pub mod rat;
pub mod space;

pub use error::{Error, Result};

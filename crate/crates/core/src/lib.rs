//! Numerical laboratory for mean-value theorems and monotonicity formulae on
//! model geometries and flows.

pub mod cli;
pub mod elliptic;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod kernels;
pub mod mcf;
pub mod numerics;
pub mod parabolic;
pub mod reduced;
pub mod report;
pub mod regions;
pub mod suites;
pub mod sweep;

pub use error::{MvError, Result};

//! Numerical convex analysis over concrete set classes in R^n.
//!
//! The library evaluates Minkowski gauges, minimal time functions,
//! signed minimal time and signed distance functions over three set
//! representations (H-polyhedra, V-polytopes with recession rays, and
//! Euclidean balls), and answers certified membership queries for their
//! convex subdifferentials. Every closed-form path has an independent
//! brute-force oracle in [`oracle`], and [`verify`] bundles the oracle
//! sweeps into reproducible certification suites.
//!
//! All types are immutable values; every operation is a pure function of
//! its inputs and safe to call from any number of threads.

pub mod error;
pub mod fixtures;
pub mod gauge;
pub mod geometry;
pub mod lp;
pub mod mintime;
pub mod oracle;
pub mod schema;
pub mod signed;
pub mod verify;

pub use error::{Error, Result};

/// Dense column vector used throughout.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix used throughout.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Default absolute tolerance on constraint residuals and membership
/// tests.
pub const DEFAULT_TOL: f64 = 1e-7;

/// Default seed for randomized sweeps.
pub const DEFAULT_SEED: u64 = 0x5EED;

//! Compact realization spaces for group presentations, built as sampled
//! geometry in R⁴.
//!
//! The pipeline goes presentation → braided family of harmonic vases (one
//! per generator) → one attached disc per relator, each living in its own
//! height band. Every step ships with a verification routine so the claims
//! the construction relies on (disjointness, monotonicity, injectivity, the
//! fundamental group of finite truncations) can be checked numerically or
//! exactly.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, exports and
//! the command line live in the `hvase` companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod braid;
pub mod config;
pub mod disc;
pub mod nearest;
pub mod presentation;
pub mod realize;
pub mod relator_path;
pub mod roots;
pub mod vase;

pub use config::{BuildConfig, Resolution, Tolerances};
pub use presentation::{GeneratorId, Letter, Presentation, Sign, Word};
pub use vase::{CylPoint4, VaseParams};

/// π, re-exported so callers do not need to reach into `core::f64::consts`.
pub const PI: f64 = core::f64::consts::PI;

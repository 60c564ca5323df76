//! Reference-point (NSGA-III) and crowding-distance (NSGA-II) evolutionary
//! multi-objective optimization on the OneMinMax family of bit-string
//! benchmarks, with instrumentation for Pareto-front coverage, loss
//! detection and reference-point association geometry.
//!
//! The crate is organised bottom-up:
//!
//! * [`genome`]: packed bit strings, seeded random streams, mutation and crossover.
//! * [`problems`]: OneMinMax and its three-objective variant, plus exact Pareto fronts.
//! * [`dominance`]: dominance tests and fast non-dominated sorting.
//! * [`refpoints`]: simplex-lattice reference points and angular geometry.
//! * [`normalization`]: ideal/nadir estimation and the normalized objective map.
//! * [`selection`]: reference-point niching and crowding-distance survivor selection.
//! * [`engine`]: the generational loop shared by both algorithms.
//! * [`analysis`]: coverage tracking, loss detection and association verification.
//! * [`lab`]: experiment specs, seed sweeps and CSV output used by the `moea-lab` binary.

pub mod analysis;
pub mod dominance;
pub mod engine;
pub mod error;
pub mod genome;
pub mod lab;
pub mod normalization;
pub mod problems;
pub mod refpoints;
pub mod selection;

pub use error::{Error, Result};

//! Simulation and transformation laboratory for one-way finite automata with
//! advice tracks.
//!
//! The crate covers five machine families — classical deterministic (1dfa),
//! reversible (1rfa), probabilistic (1pfa), measure-many quantum (1qfa), and
//! quantum machines with a rewritable advice track — together with the advice
//! models that drive them (deterministic strings, finitely supported
//! distributions, and quantum amplitude families). Everything is exact at desk
//! scale: runs fold transition operators symbolically over small inputs and
//! compare probabilities against a single global tolerance, never by sampling.
//!
//! Main entry points:
//!
//! - [`machines`] — machine descriptions, structural validation, bare runs.
//! - [`advice`] — advice specifications, track composition, advised runs.
//! - [`rewritable`] — the rewritable-advice quantum model on joint states.
//! - [`transforms`] — verified machine-to-machine passes (endmarker
//!   elimination, measurement deferral, amplification, products, lifts).
//! - [`analysis`] — bounded-horizon relation/condition checkers and the norm
//!   property suite.
//! - [`synthesis`] — reversible-automaton synthesis from a language oracle.
//! - [`zoo`] — built-in languages and fixture machines.
//! - [`schema`] / [`cli`] — JSON file formats and the `qfa` command-line tool.

pub mod advice;
pub mod analysis;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod machines;
pub mod rewritable;
pub mod schema;
pub mod synthesis;
pub mod transforms;
pub mod zoo;

pub use error::{QfaError, Result};

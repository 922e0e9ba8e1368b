//! Solvers for two vehicle routing variants that share one solution shape:
//! a fleet of routes starting and ending at a single depot, covering every
//! delivery exactly once.
//!
//! * **Length-limited routing**: each route's travel length must stay within
//!   an instance-wide bound. Typical for postal delivery districts where a
//!   shift caps the tour duration.
//! * **Capacitated routing**: each delivery has a demand and each route's
//!   total demand must stay within the vehicle capacity.
//!
//! Solutions are ranked by vehicle count first and total travel length
//! second; the spread of route lengths is reported alongside but never
//! optimized.
//!
//! The crate provides constructive heuristics ([`constructive`]), local
//! search ([`local_search`]), a genetic algorithm over giant-tour
//! chromosomes ([`genetic`]), and an exhaustive optimum for tiny instances
//! ([`oracle`]). With the default `parallel` feature the hot loops fan out
//! over rayon; disabling it compiles the same algorithms sequentially with
//! identical results, because every random decision is keyed by task index
//! rather than by scheduling order.

pub mod constructive;
pub mod generate;
pub mod genetic;
pub mod io;
pub mod local_search;
pub mod model;
pub mod oracle;

mod par;
mod rng;

pub use model::{
    compare_fitness, Constraint, Instance, Objectives, Route, Solution,
};

/// Errors shared across parsing, validation, and solving.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input text did not match the expected instance format.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The instance is structurally valid but no solution can exist.
    #[error("unservable instance: {0}")]
    Unservable(String),

    /// The instance violates a structural requirement.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// The requested operation is not defined for this instance.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

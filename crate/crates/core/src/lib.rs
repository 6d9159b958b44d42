//! Simulation and statistical verification of Kakutani's interval-splitting
//! process.
//!
//! The process starts from the unit interval and repeatedly splits the
//! current largest gap at a uniformly random point. This crate provides:
//!
//! - [`process`]: the splitting engine (max-heap of gap lengths, per-step
//!   observables, a positional variant, and the length-biased Dirichlet
//!   comparator);
//! - [`embeddings`]: threshold times `N_t`, the max-gap/threshold-time
//!   inversion, and translations to branching-process, branching-random-walk,
//!   and parking models;
//! - [`gap_stats`]: small-gap counting statistics, the conditional
//!   mean/variance statistics `R`, `S`, `W`, and their conditional-independence
//!   resampling oracles;
//! - [`closed_forms`]: exact constants and moment functions, reference
//!   distributions, Hermite/Edgeworth machinery, and enumeration/quadrature
//!   oracles;
//! - [`harness`]: declarative Monte Carlo experiments with reproducible
//!   parallel streams, Kolmogorov-Smirnov estimation, and log-log slope fits;
//! - [`verify`]: the property-check suites behind the `verify` CLI command.

pub mod closed_forms;
pub mod embeddings;
pub mod error;
pub mod gap_stats;
pub mod harness;
pub mod process;
pub mod quad;
pub mod special;
pub mod stream;
pub mod verify;

pub use error::{Error, Result};
pub use process::{DirichletPartition, GapPartition, PathObservables, WatchConfig};
pub use stream::RandomStream;

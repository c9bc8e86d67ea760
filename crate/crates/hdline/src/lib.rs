//! Approximate capacity and optimal simple schedules for half-duplex
//! Gaussian line networks.
//!
//! A line network is a chain source -> relay 1 -> ... -> relay N ->
//! destination in which every relay either transmits or receives at any
//! instant. This crate computes the network's approximate capacity in
//! closed form, constructs an optimal schedule that uses at most `N + 1`
//! states via edge-coloring, certifies schedules against brute-force cut
//! oracles, enumerates the primitive punctured sets that witness an
//! exponential lower bound on schedule state spaces, and reduces 3SAT to
//! the half-duplex best-path decision problem on capacitated graphs.
//!
//! Modules:
//! - [`rational`]: exact nonnegative rationals extended with infinity.
//! - [`line`]: networks, states, schedules, cuts, and exact evaluation.
//! - [`scheduler`]: the edge-coloring pipeline that builds simple optimal
//!   schedules, plus rationalization of real-valued capacities.
//! - [`verify`]: exhaustive cut oracles, optimality certificates, and the
//!   rationalization sandwich check.
//! - [`punctured`]: punctured subsets, the growth recurrence, cut
//!   bijections, and witness networks.
//! - [`routing`]: capacitated digraphs, half-duplex path capacity, and the
//!   3SAT reduction.
//! - [`cli`]: the command-line interface.

pub mod cli;
pub mod error;
pub mod line;
pub mod punctured;
pub mod rational;
pub mod routing;
pub mod scheduler;
pub mod verify;

pub use error::{Error, Result};
pub use line::{LineNetwork, Schedule, State};
pub use rational::ExtRational;

//! Exact and Monte Carlo analysis of the M&M game: two players toss coins
//! each turn and eat one M&M per head; whoever empties their stash first
//! loses, and emptying on the same turn is a tie.
//!
//! - [`exact`]: closed-form tie probability and expected game length.
//! - [`markov`]: lattice dynamic programming, also for biased coins.
//! - [`multicoin`]: several coins with signed values, and dual games.
//! - [`evolving`]: head probability rising as the stash shrinks.
//! - [`montecarlo`]: seeded, thread-count independent simulation.
//! - [`fitting`]: power-law, Gompertz and correlation summaries.

pub mod error;
pub mod evolving;
pub mod exact;
pub mod fitting;
pub mod markov;
pub mod montecarlo;
pub mod multicoin;
pub mod pmf;
pub mod rational;

pub use error::{Error, Result};
pub use evolving::{DepletionSchedule, HazardGame};
pub use exact::StartCounts;
pub use fitting::FitResult;
pub use markov::{BiasedGame, OutcomeDist};
pub use montecarlo::{SimConfig, SimReport, Variant};
pub use multicoin::{CoinSet, MulticoinGame, TieConvention};
pub use pmf::Pmf;
pub use rational::Rational;

/// Engine version recorded in experiment manifests.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

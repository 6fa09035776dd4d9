//! Online power allocation over parallel channels with unknown gain laws.
//!
//! The crate enumerates the feasible power allocations, samples channel gains,
//! computes the genie-optimal allocations and gap statistics, runs the
//! water-filling bandit policies against UCB1 and LLR baselines, and writes
//! regret traces.

pub mod channels;
pub mod model;
pub mod oracle;
pub mod policies;
pub mod harness;
pub mod config;
pub mod cli;

//! Unravelling procedures for profiles of smart ballots: ranked delegation
//! preferences that end in a direct vote.
//!
//! A profile is unravelled into one direct vote per agent. The greedy rules
//! in [`greedy`] run in polynomial time; [`optimal`] finds certificates of
//! least total or least maximum preference level exactly.

pub mod analysis;
pub mod ballots;
pub mod certificates;
pub mod dnf;
pub mod error;
pub mod fixtures;
pub mod generators;
pub mod greedy;
pub mod optimal;
pub mod procedures;

pub use error::{Error, Result};

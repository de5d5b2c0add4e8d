//! Temporal cohort analysis of conversation networks built from tweet-like
//! interaction streams.
//!
//! The pipeline runs in five stages, one module each:
//!
//! - [`ingest`]: parse line-delimited records, extract retweet / mention / via
//!   interactions from message text, filter records by discourse frame.
//! - [`temporal`]: slice interactions into fixed-width windows, fold them into
//!   per-window snapshots and label every user with an arrival cohort.
//! - [`metrics`]: clustering, Brandes betweenness and connected components on
//!   the undirected projection of each snapshot, aggregated into
//!   cohort × period matrices.
//! - [`classify`]: turn the cohort matrices into evidence features and score
//!   the three discourse-formation hypotheses.
//! - [`synthgen`]: seeded synthetic streams for each hypothesis regime.

pub mod classify;
pub mod ingest;
pub mod metrics;
pub mod synthgen;
pub mod temporal;

mod error;

pub use error::{Error, Result};

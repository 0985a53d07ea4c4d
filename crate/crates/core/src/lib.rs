//! Chord-class clustering coefficients for bipartite rating networks, and a
//! first-rater model that predicts how popular a newly rated item will become.
//!
//! The crate is organised bottom-up:
//!
//! - [`ingest`] parses rating streams (MovieLens, KONECT, CSV) and persists graphs.
//! - [`graph`] holds the immutable [`TemporalBipartiteGraph`] and its queries.
//! - [`motif`] classifies 3+3 node subsets and counts the seven motif classes.
//! - [`ego`] extracts the time-windowed ego network of an item's first rater.
//! - [`model`] calibrates the logistic curves and turns clustering deviations
//!   into predicted rating counts, averages and popularity scores.
//! - [`pipeline`] runs predictions and evaluations over whole datasets.
//! - [`synth`] generates deterministic synthetic rating streams.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default) and fall back to sequential iteration otherwise. Results are
//! identical either way.

pub mod ego;
pub mod error;
pub mod exec;
pub mod graph;
pub mod ingest;
pub mod model;
pub mod motif;
pub mod pipeline;
pub mod profile;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::{ItemIdx, Node, TemporalBipartiteGraph, TimeWindow, UserIdx};
pub use profile::DatasetProfile;

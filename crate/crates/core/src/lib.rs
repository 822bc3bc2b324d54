//! Tagging of learning resources from the profiles of the learners who rate
//! them highly.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`ingest`]: parse ratings and learner profiles, then build the subset of
//!    learners that rated each resource at or above a threshold.
//! 2. [`quantify`]: turn the nominal attributes (learning strategy and
//!    presentation style) into numbers through co-occurrence counting and
//!    non-negative matrix factorization.
//! 3. [`cluster`]: group each resource's learners with farthest-first seeded
//!    k-means, choosing `k` with an average-diameter criterion, and keep the
//!    largest cluster.
//! 4. [`mine`]: run Apriori over the largest cluster and keep the largest,
//!    most frequent attribute itemsets as tags.
//!
//! [`pipeline`] wires the stages together and [`plot`] renders the SVG
//! figures. The command-line front end lives in [`cli`].

pub mod cli;
pub mod cluster;
pub mod error;
pub mod ingest;
pub mod mine;
pub mod pipeline;
pub mod plot;
pub mod quantify;
pub mod synth;

pub use error::{Error, Result};
pub use ingest::{LearnerProfile, LearnerSubset, RatingRecord, TimeBin};
pub use pipeline::{PipelineConfig, Tag, TagCloud, TagStore};
pub use quantify::{AttributeValueMap, NominalAttribute};

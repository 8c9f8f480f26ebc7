//! Increasing paths in randomly edge-ordered complete graphs.
//!
//! Edge orderings and walk types live in [`ordering`]; the greedy and
//! pedestrian constructions in [`walks`]; the look-ahead search in
//! [`kgreedy`]; cycle-length statistics in [`cyclestats`]; small-`n` exact
//! oracles in [`exact`]; and the pair-profile machinery for `E[H_n^2]` in
//! [`secondmoment`].

pub mod cyclestats;
pub mod error;
pub mod exact;
pub mod kgreedy;
pub mod ordering;
pub mod rng;
pub mod secondmoment;
pub mod walks;

pub use error::{Error, Result};
pub use ordering::{random_ordering, matching_ordering, EdgeOrdering, LabelModel, VertexPath, VertexWalk};

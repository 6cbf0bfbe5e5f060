//! Search toolkit for small Kochen-Specker vector systems.
//!
//! The pipeline enumerates connected square-free graphs in canonical form
//! ([`enumerate`]), decides 101-colourability ([`colouring`]), and tests the
//! survivors for embeddability as systems of pairwise-orthogonal unit
//! vectors, either exactly on cubic integer grids ([`grid`]) or over the
//! reals with interval branch-and-prune ([`interval`]).

pub mod canon;
pub mod colouring;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod graph6;
pub mod grid;
pub mod interval;
pub mod oracle;
pub mod pipeline;

pub use error::{Error, Result};
pub use graph::{Graph, UpperTriangleCode};

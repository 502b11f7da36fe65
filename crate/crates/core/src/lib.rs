//! Divisor theory on weighted graphs and metric graphs: exact chip-firing,
//! reduced and orientable divisors, canonical break-divisor representatives,
//! and the cycle-lattice volume identities behind the Matrix-Tree theorem.
//!
//! All arithmetic is exact rational; the subset searches are exhaustive and
//! meant for desk-scale graphs (roughly twenty vertices or edges).

pub mod divisor;
pub mod error;
pub mod graph;
pub mod homology;
pub mod metric;
pub mod orient;
pub mod rational;

pub use error::{Error, Result};
pub use graph::{RawGraph, SpanningTree, VertexSet, WeightedGraph};
pub use rational::Rational;

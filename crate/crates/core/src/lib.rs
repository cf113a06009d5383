//! Pattern Lagrangians, recursive blow-up constructions and their forbidden
//! families for hypergraph Turán problems.

pub mod caps;
pub mod construction;
pub mod embedding;
pub mod error;
pub mod hypergraph;
pub mod irrational;
pub mod lagrangian;
pub mod limits;
mod maps;
pub mod pattern;
pub mod random;

pub use caps::Caps;
pub use error::{Error, Result};
pub use hypergraph::Hypergraph;
pub use pattern::{Pattern, Profile};

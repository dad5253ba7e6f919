//! Dimension monoids of finite lattices.
pub mod builtins;
pub mod catalog;
pub mod congruence;
pub mod dimension;
pub mod dot;
pub mod error;
pub mod geometry;
pub mod io;
pub mod lattice;
pub mod primitive;
pub mod report;

pub use error::{Error, Result};

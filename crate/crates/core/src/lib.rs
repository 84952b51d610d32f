//! Circular projection of Morton (Z-order) codes onto the unit D-sphere,
//! the radius-equal subsets it induces, and their combinatorial structure.

pub mod catalog;
pub mod dict_graph;
pub mod equiv;
pub mod error;
pub mod geometry;
pub mod morton;
pub mod projection;
pub mod reference;
pub mod report;
pub mod structure;

pub use error::{Error, Result};
pub use morton::{Bits, BitMatrix, CurveParams, MortonCode};

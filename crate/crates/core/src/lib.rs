//! Least gradient problems on planar convex domains, solved through
//! boundary-to-boundary optimal transport.
//!
//! The pipeline runs from a BV boundary datum `g` through its tangential
//! derivative, a discrete Kantorovich plan between the positive and negative
//! parts, the dual potential and rotated field `z`, to the transport density
//! and the reconstructed least gradient function `u`.

pub mod boundary;
pub mod duality;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod grid;
pub mod harness;
pub mod ot;
pub mod reconstruct;

pub use error::{Error, Result};

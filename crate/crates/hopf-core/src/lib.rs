//! Numerical verification toolkit for the Gauss-map degree of closed
//! hypersurfaces in low-dimensional Euclidean space.
//!
//! The library computes the degree of the Gauss map by several
//! independent estimators (regular-value preimage counting, total
//! Gauss-Kronecker curvature, intrinsic Pfaffian integration, a
//! transgression form for even-dimensional ambient space, discrete
//! angle defects) and cross-checks them against Euler characteristics
//! obtained combinatorially and through Morse theory.

pub mod connection;
pub mod corpus;
pub mod degree;
pub mod error;
pub mod euler;
pub mod forms;
pub mod report;
pub mod surfaces;
pub mod transgression;

pub use error::{HopfError, Result};

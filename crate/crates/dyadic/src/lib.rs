//! Dyadic Haar paraproducts at finite tree depth.
//!
//! Everything lives on the rooted dyadic tree over `[0,1)` truncated at depth
//! `D`: step functions with `2^D` leaves model `L^2([0,1))`, symbol sequences
//! index the tree nodes, and the four paraproduct types `(alpha, beta)` act
//! through Haar coefficients and interval averages. The [`transplant`] module
//! carries the same operators to the space of functions constant on Carleson
//! tiles in the upper half plane, where composition norms become two-weight
//! testing problems. [`opnorm`] provides brute-force operator-norm oracles
//! (dense largest singular value, matrix-free power iteration) used to verify
//! every norm equivalence numerically.

pub mod error;
pub mod haar;
pub mod io;
pub mod opnorm;
pub mod paraproduct;
pub mod symbol;
pub mod transplant;
pub mod tree;

pub use error::Error;

/// Complex double-precision scalar used throughout.
pub type Scalar = num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

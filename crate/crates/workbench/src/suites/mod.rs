//! The experiment suites.

pub mod a2;
pub mod bases;
pub mod equivalence;
pub mod identities;
pub mod tree_testing;

/// Relative slack applied to inequalities that hold exactly in real
/// arithmetic but are computed along two different floating-point routes.
pub const FP_SLACK: f64 = 1e-9;

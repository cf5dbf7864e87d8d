//! Singular kernel integrals on the unit ball of `C^n`, the case-split
//! asymptotic formulas that bound them, and tooling that checks the two
//! against each other near the boundary.

pub mod asymptotics;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod quadrature;
pub mod spaces;
pub mod special;
pub mod verifier;
pub mod weights;

pub use error::{Error, Result};
pub use geometry::{CPoint, C64};

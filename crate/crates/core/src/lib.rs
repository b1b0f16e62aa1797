//! Heisenberg-style measurements on finite-dimensional spaces carrying a
//! diagonal indefinite metric, with signed outcome densities, Bell-type
//! checks and discrete-time evolution.

// `!(x >= lo)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod linalg;
pub mod lp;
pub mod measurement;
pub mod random;
pub mod report;
pub mod scenario;

pub use error::{Error, Result};
pub use geometry::{GeometricSpace, Isometry, Sign, StateVector};
pub use linalg::{ComplexMatrix, C64};
pub use measurement::{EigenvalueMatrix, Instrument, SignedDensity};

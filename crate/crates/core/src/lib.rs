//! Finite-volume solvers on polytopal meshes of the unit square and a
//! two-grid non-intrusive reduced basis built on top of them.

pub mod dense;
pub mod error;
pub mod fvm;
pub mod harness;
pub mod mesh;
pub mod nirb;
pub mod problem;
pub mod transfer;

pub use error::{Error, Result};

//! Numerical library for system-environment entanglement bounds under pure
//! dephasing dynamics: controlled-unitary evolution, entropic functionals,
//! lower/upper entanglement bounds, independent bracketing of the relative
//! entropy of entanglement, POVM optimization, and the spin-boson case study.

extern crate blas_src;

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod info;
pub mod linalg;
pub mod parallel;
pub mod povm;
pub mod ree;
pub mod schema;
pub mod special;
pub mod spinboson;

pub use error::{Error, Result};

//! Exact deformation-theoretic calculus for finite-dimensional differential graded
//! Lie algebras over the rationals.

pub mod artin;
pub mod cartan;
pub mod complex;
pub mod convolution;
pub mod dgla;
pub mod endo;
pub mod error;
pub mod fixtures;
pub mod graded;
pub mod holim;
pub mod koszul;
pub mod linalg;
pub mod mc;
pub mod model;
pub mod par;
pub mod path;
pub mod period;
pub mod report;
pub mod sample;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

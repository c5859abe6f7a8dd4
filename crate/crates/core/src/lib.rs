//! Numerical convex geometry and affine Pólya–Szegő machinery.
//!
//! Convex bodies are represented by support functions, Minkowski
//! functionals or explicit polytopes; spherical integrals use
//! deterministic quadrature. The functional layer evaluates the matrix
//! valued affine energies E_p(Q, f) of grid functions in R^n.

pub mod bodies;
pub mod config;
pub mod constants;
pub mod covariogram;
pub mod error;
pub mod functional;
pub mod lp;
pub mod minkowski;
pub mod optimize;
pub mod projection;
pub mod quadrature;
pub mod special;

pub use config::Settings;
pub use error::{Error, Result};

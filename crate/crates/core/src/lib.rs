//! Numerical toolkit for complex stretching exponents of quasiconformal maps
//! along the real line: model maps, a Beltrami solver, exponent traces,
//! thermodynamic formalism for disk systems, and holomorphic motions.

pub mod error;
pub mod exponents;
pub mod geometry;
pub mod maps;
pub mod motion;
pub mod solver;
pub mod thermo;

pub use error::{Error, Result};
pub use num_complex::Complex64;

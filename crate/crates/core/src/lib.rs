//! Spectral toolkit for three-dimensional Dirac operators with δ-shell
//! interactions: Lopatinsky–Shapiro checks on interaction surfaces, reduced
//! one-dimensional transmission eigenproblems, a finite-difference oracle for
//! those problems, and essential spectra assembled from limit operators.

pub mod clifford;
pub mod error;
pub mod fd_oracle;
pub mod limitops;
pub mod linalg;
pub mod shell_symbol;
pub mod spectrum;
pub mod surfaces;
pub mod transmission1d;

pub use error::{Error, Result};

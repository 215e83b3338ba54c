//! A finite-dimensional laboratory for complex interpolation of weighted
//! sequence spaces, homogeneous polynomials between them, and vector-valued
//! Fourier analysis on the circle.
//!
//! Every space lives on the shared coordinate space `C^n`; vectors are plain
//! `Vec<C64>` / `&[C64]` slices.

pub mod analytic;
pub mod compactness;
mod dft;
pub mod error;
pub mod fourier;
pub mod harness;
pub mod interpolation;
pub mod polynomials;
pub mod rng;
pub mod spaces;
pub mod tolerances;

pub use error::{Error, Result};
pub use spaces::{Couple, Decomposition, Exponent, WeightedSpace};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

//! Verification, falsification and certification of pseudo-passivity for
//! convolution operators whose kernels are Dirac-derivative combs plus
//! exponential-polynomial tails.

pub mod certify;
pub mod cli;
pub mod convert;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod laplace;
mod poly;
pub mod testfn;
pub mod timedomain;

pub use error::{Error, Result};
pub use kernel::{DiracTerm, ExpPolyTerm, Kernel};
pub use num_complex::Complex64;
pub use testfn::{QuadratureSpec, TestFunction};

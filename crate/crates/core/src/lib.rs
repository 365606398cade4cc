//! Spectral computations for high-contrast core-shell resonators whose
//! shell permittivity is a small complex number δ.

pub mod cascade;
pub mod eig;
pub mod error;
pub mod fem;
pub mod linalg;
pub mod mesh2d;
pub mod mie;
pub mod perturb;
pub mod specfun;

pub use error::{Error, Result};

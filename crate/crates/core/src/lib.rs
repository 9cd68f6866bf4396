//! Continuous q-Hermite functions, the Rogers-Poisson kernel family and the
//! q-oscillator Fourier transform built from it.

pub mod error;
pub mod fock;
pub mod kernels;
pub mod limits;
pub mod qhermite;
pub mod qseries;
pub mod quadrature;
pub mod report;
pub mod transform;
pub mod verify;

pub use error::{QoscError, Result};
pub use qseries::{QParam, DEFAULT_TOL};
pub use report::VerificationReport;

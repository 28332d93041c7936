//! Adaptive convolution-type signal denoising.
//!
//! A denoiser here is a filter `phi` supported on `[0, n]` applied to noisy
//! observations `y` on `[-n, n]`; the filter itself is fit to the data by a
//! convex program posed over its Fourier coefficients. This crate provides
//! the pieces needed to pose and solve those programs:
//!
//! - [`signal`]: complex signals, the unitary DFT, vectorization and a
//!   brute-force convolution used as a reference.
//! - [`operator`]: the FFT-evaluated convolution operator and its adjoint.
//! - [`prox`]: blockwise proximal setups and the prox-mappings they need.
//! - [`solvers`]: the fast gradient method and composite mirror prox.
//! - [`certificate`]: online duality-gap certificates for mirror prox.
//! - [`estimators`]: the user-facing estimators built on top of the above.

pub mod certificate;
pub mod error;
pub mod estimators;
pub mod operator;
pub mod prox;
pub mod signal;
pub mod solvers;

pub use error::{Error, Result};
pub use signal::{ComplexSignal, SpectralVector, C64};

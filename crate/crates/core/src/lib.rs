//! Finite-SNR diversity-multiplexing tradeoff (DMT) for spatially correlated
//! MIMO Rayleigh channels.
//!
//! The crate is `no_std` and only needs `alloc`. It provides:
//!
//! - [`channel`]: antenna configurations, single-coefficient correlation
//!   matrices, Hermitian eigen-spectra and Kronecker-model channel sampling.
//! - [`quadform`]: the regularized incomplete gamma function and the signed
//!   Gamma-mixture law of the per-branch quadratic forms.
//! - [`outage`]: analytic lower bounds on the outage probability and the
//!   rate-split optimizer that tightens them.
//! - [`diversity`]: closed-form finite-SNR diversity estimates, the maximum
//!   diversity and the asymptotic tradeoff.
//! - [`montecarlo`]: the simulation oracle (mutual information, empirical
//!   outage, finite-difference diversity, direct quadratic-form draws).
//!
//! SNR values are always linear inside this crate.

#![no_std]
// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod channel;
pub mod diversity;
mod error;
mod linalg;
pub mod montecarlo;
mod optim;
pub mod outage;
pub mod quadform;
pub mod rng;

pub use error::{Error, Result};

pub use num_complex::Complex64;

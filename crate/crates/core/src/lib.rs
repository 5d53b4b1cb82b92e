//! Exact toolkit for real-radical membership certificates.
//!
//! Everything is computed over Q. The crate provides sparse multivariate
//! polynomials, free-module vectors and matrix polynomials, Gröbner bases
//! for submodules of R^n, three certificate formats with verifiers, a
//! rational sampling layer for refutation, certificate search (exact linear
//! solves plus an optional numeric Gram pass that is always re-verified
//! exactly), the elimination machinery that drives the certificate chain
//! search, and a left-ideal layer for matrix polynomial algebras.

pub mod cert;
pub mod error;
pub mod freemod;
pub mod groebner;
pub mod leftideal;
pub mod linalg;
pub mod poly;
pub mod radical;
pub mod search;
pub mod zeroset;

pub use error::Error;

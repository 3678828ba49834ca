//! Fractional derivatives and integrals as limits of Toeplitz matrix actions.
//!
//! The symbol `φ_{α,R}(θ) = ((1 - R²) - 2iR sin θ)^α` generates finite
//! sections `T_N(φ)`. Scaled rows `N^α T_N(φ) X_N` of sampled functions tend
//! to a Marchaud-type derivative `D_α`, and scaled inverse rows
//! `N^{-α} T_N(φ)⁻¹ X_N` tend to the matching integral `J_α`.
//!
//! Module map:
//! - [`specialfn`]: Gamma function and binomial coefficient sequences.
//! - [`symbol`]: the symbol and its Fourier coefficients (series and FFT).
//! - [`toeplitz`]: finite sections, fast products, dense solves.
//! - [`wienerhopf`]: inversion through the factorization `φ = g₁ g₂`.
//! - [`fracderiv`], [`fracint`]: the operators on `[0, 1]`.
//! - [`interval`]: transport to `[a, b]` and to the whole line.
//! - [`cli`]: the `toepfrac` command-line front end.

// Negated float comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
mod fft;
pub mod functions;
pub mod quadrature;
pub mod specialfn;
pub mod symbol;
pub mod toeplitz;
pub mod wienerhopf;

pub mod fracderiv;
pub mod fracint;
pub mod interval;

pub mod cli;

pub use error::{Error, Result};

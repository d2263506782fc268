//! Bound states of the (1+1)-dimensional Klein-Gordon equation with scalar and
//! vector potentials of equal shape, `S(x) = S0 f(x)` and `V(x) = V0 f(x)`.
//!
//! Three profiles are supported: `f(x) = tanh x`, `f(x) = -exp(-x)` and
//! `f(x) = x / 2`. For each one the reduced Schrödinger-form problem
//!
//! ```text
//! -psi'' + U_E(x) psi = (E^2 - m^2) psi,
//! U_E(x) = (S0^2 - V0^2) f(x)^2 + 2 (m S0 + E V0) f(x)
//! ```
//!
//! is shape invariant, so the spectrum follows from a per-level quadratic in
//! `E`. The crate layers:
//!
//! - [`specfun`]: Jacobi, Laguerre and Hermite polynomials by recurrence.
//! - [`models`]: the three families, superpotentials, energy quadratics and
//!   the level acceptability filter.
//! - [`wavefunctions`]: closed-form eigenfunctions, normalization and ODE
//!   residuals.
//! - [`oracle`]: an independent finite-difference self-consistent solver.
//! - [`nonhermitian`]: complex coordinate shifts `x -> x - ic`.
//! - [`cli`]: the `kgbound` command-line front end.

pub mod cli;
pub mod error;
pub mod models;
pub mod nonhermitian;
pub mod oracle;
pub mod specfun;
pub mod wavefunctions;

pub use error::{Error, Result};
pub use models::{BoundState, Couplings, Family, RejectReason, ShapeData, Sign, SpectrumReport};

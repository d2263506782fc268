use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Couplings violate `S0^2 > V0^2` (or `m > 0`); no discrete spectrum.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Input carries no information to work with (e.g. an all-zero wavefunction).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The requested level lies in the continuum of the frozen-energy problem.
    #[error("no bound state with index {n}: eigenvalue {eigenvalue} is not below the continuum edge {edge}")]
    NoBoundState { n: usize, eigenvalue: f64, edge: f64 },

    /// The self-consistency function did not change sign over the bracket.
    #[error("no sign change of g(E) on [{lo}, {hi}]: g(lo) = {g_lo:e}, g(hi) = {g_hi:e}")]
    BracketFailure { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
}

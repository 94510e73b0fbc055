//! Numerical toolkit for Turing-fold co-dimension-2 bifurcations.
//!
//! A Turing-fold point is a parameter pair at which a spatially homogeneous
//! steady state of a pattern-forming PDE undergoes a fold (saddle-node) at the
//! same moment a finite-wavenumber Turing mode becomes neutrally stable. Near
//! such a point the dynamics of the pattern amplitude `A` and the slow
//! homogeneous correction `B` are governed by a canonical modulation system
//!
//! ```text
//! A_τ = A_ξξ + A − A·B,
//! (1/α) B_τ = d·B_ξξ + 1 − R − B² + β·|A|²,
//! ```
//!
//! whose sign of `β` decides whether a slow passage through the fold collapses
//! (`β < 0`) or is evaded by spontaneous pattern formation (`β > 0`).
//!
//! The crate is organised as a pipeline:
//!
//! * [`models`] — concrete PDE right-hand sides (a sixth-order scalar family
//!   and polynomial reaction–diffusion systems) with exact derivative tensors;
//! * [`bifurcation`] — locating fold and Turing curves, the co-dimension-2
//!   point itself, and the reduction to the canonical `(α, d, β)` coefficients;
//! * [`absystem`] — closed-form analysis of the canonical system: plane-wave
//!   branches, their spectra, existence/stability boundaries, and the
//!   Busse-balloon style stability map;
//! * [`fieldsolver`] — pseudo-spectral exponential time differencing (ETDRK4)
//!   integrators for both the full PDEs and the modulation system, with
//!   parameter ramping and stochastic forcing;
//! * [`experiments`] — reproducible numerical experiments built on the above
//!   (amplitude-scaling convergence, tipping studies, regime scans,
//!   Ginzburg–Landau embedding checks).

pub mod absystem;
pub mod bifurcation;
pub mod experiments;
pub mod fieldsolver;
pub mod models;
pub mod numerics;

/// Errors produced by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A root-finding or continuation procedure failed to converge.
    #[error("{context}: no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        context: String,
        iterations: usize,
        residual: f64,
    },
    /// A bracketing step failed: no sign change over the search interval.
    #[error("{context}: no sign change over [{lo}, {hi}]")]
    NoBracket { context: String, lo: f64, hi: f64 },
    /// The requested object does not exist for these parameters.
    #[error("{0}")]
    NotAdmissible(String),
    /// A field simulation left the trust region (norm blow-up).
    #[error("field blow-up at t = {time:.6}: max |u| = {norm:.3e}")]
    BlowUp { time: f64, norm: f64 },
    /// Invalid input (bad configuration file, inconsistent dimensions, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// Malformed JSON in a model or configuration file.
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenient result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

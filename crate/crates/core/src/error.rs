//! Error types shared by the solvers and the batch drivers.

use thiserror::Error;

/// Failures surfaced by the numerical engines and studies.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("non-finite value for {what}")]
    NonFinite { what: &'static str },

    #[error("degenerate porosity n = {porosity:.6e} (must be > 0)")]
    DegeneratePorosity { porosity: f64 },

    /// Crystals filled the pore space: n = n0 - gamma*cs dropped to zero or
    /// below. The simulation cannot continue past this point.
    #[error("pore clogging: porosity {porosity:.6e} <= 0{}", node_suffix(.node))]
    PoreClogged { porosity: f64, node: Option<usize> },

    /// The explicit ion update divides by the new liquid fraction; values
    /// below the floor indicate a dried-out node where the update is
    /// meaningless.
    #[error("liquid fraction {theta:.6e} below 1e-14 at node {node} (step {step}); ion update undefined")]
    ThetaFloor { node: usize, theta: f64, step: usize },

    /// NaN/Inf or an unphysically large per-step increment, typically a CFL
    /// violation of the explicit scheme.
    #[error(
        "solution blew up at step {step} ({what}); the explicit scheme is conditionally stable, \
         try dt <= dx^2*n0/(2c) ~ {suggested_dt:.3e} s"
    )]
    BlowUp {
        step: usize,
        what: String,
        suggested_dt: f64,
    },

    #[error("linear solver stalled at step {step} ({context}): {iterations} iterations, residual {residual:.3e}")]
    SolverFailed {
        step: usize,
        context: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("triplet index ({row},{col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },

    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: String },

    #[error("quadrature needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("time grids are not aligned: {what}")]
    GridMismatch { what: String },

    #[error("mesh construction failed: {0}")]
    Mesh(String),

    #[error("snapshot step {step} exceeds run length {num_steps}")]
    SnapshotOutOfRange { step: usize, num_steps: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("study failed: {0}")]
    Study(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn node_suffix(node: &Option<usize>) -> String {
    match node {
        Some(j) => format!(" at node {j}"),
        None => String::new(),
    }
}

//! Simulation toolkit for moisture-driven salt crystallization in porous
//! specimens.
//!
//! A specimen (brick/stone prism) takes up salty water from its bottom face,
//! dissolved ions precipitate as crystals inside the pore network, and the
//! deposited crystals reduce the porosity, which feeds back into the
//! transport. Four nodal fields evolve: the volumetric liquid fraction
//! `theta`, the dissolved-ion concentration `ci`, the crystallized-salt
//! concentration `cs` and the porosity `n = n0 - gamma*cs`.
//!
//! Two engines integrate the system:
//! * [`fd1d`] — an explicit upwind-stabilized finite-difference scheme on a
//!   uniform 1D grid, cheap enough for large parameter sweeps;
//! * [`fem`] — a semi-implicit P1 finite-element scheme on simplicial meshes
//!   in 1, 2 and 3 dimensions.
//!
//! On top of the engines, [`studies`] drives the batch experiments
//! (sensitivity scan, top-boundary exchange calibration, time/space
//! convergence verification), [`metrics`] provides the Gregory quadrature
//! rules and scalar diagnostics, and [`scenario`]/[`config`]/[`io`] implement
//! the file-driven CLI workflow.

pub mod config;
pub mod error;
pub mod fd1d;
pub mod fem;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod metrics;
pub mod params;
pub mod scenario;
pub mod state;
pub mod studies;

pub use error::SimError;
pub use params::PhysicalParameters;
pub use state::{Phase, State};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SimError>;

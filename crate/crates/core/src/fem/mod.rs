//! P1 finite-element discretization of the Φ-Laplacian antiplane contact
//! problem with Tresca friction.
//!
//! The continuous problem: find a scalar displacement `u` on a 2-D cross
//! section with `div(φ(|∇u|)/|∇u|·∇u)` driven by a convex integrand, clamped
//! on boundary part 1, under surface traction on part 2, and under Tresca
//! friction with bound `g` on part 3. [`discretize_contact`] reduces the P1
//! discretization to a coupled variational-inequality system whose dual
//! variable is the frictional multiplier; [`energy_oracle`] minimizes the
//! primal energy independently for cross-validation.

mod assemble;
mod contact;
mod energy;
mod mesh;
mod problem;

pub use assemble::{
    assemble_phi_residual, assemble_phi_residual_nodal, boundary_load, gradient,
    gradient_magnitudes, tresca_weights,
};
pub use contact::{
    complementarity_report, discretize_contact, norm_equivalence_probe, solve_contact,
    ComplementarityReport, ContactSolution, ContactSystem,
};
pub use energy::{energy_oracle, total_energy, EnergySchedule};
pub use mesh::{BoundaryEdge, BoundaryPart, Mesh, MeshError};
pub use problem::{ConvexIntegrand, DiscreteField, FemProblem};

use crate::convex::SetError;
use crate::orlicz::OrliczError;
use crate::solvers::SolverError;
use crate::system::SystemError;

#[derive(Debug, thiserror::Error)]
pub enum FemError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Orlicz(#[from] OrliczError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("invalid input: {0}")]
    Input(&'static str),
    #[error("integrand failed the convexity probe")]
    NonConvexIntegrand,
    #[error("no multiplier degrees of freedom: the contact part is contained in the clamped part")]
    EmptyMultiplierSpace,
}

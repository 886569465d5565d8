//! Core toolkit for coupled systems of nonlinear variational inequalities.
//!
//! A system pairs two inequalities in a primal variable `u` and a dual
//! variable `λ`, linked by a coupling functional `B` and tested against
//! convex constraint sets `K` and `Λ`:
//!
//! ```text
//! B(v,λ) − B(u,λ) + χ(u, v−u) ≥ ⟨f, v−u⟩   for all v ∈ K,
//! B(u,λ) − B(u,μ) + ψ(λ, μ−λ) ≥ ⟨g, μ−λ⟩   for all μ ∈ Λ.
//! ```
//!
//! The crate provides:
//!
//! * [`orlicz`] — N-function numerics: generators, complementary functions,
//!   Simonenko-type index estimates, Luxemburg norms, growth comparisons and
//!   Sobolev-conjugate construction;
//! * [`convex`] — constraint sets with membership, Euclidean projection and
//!   grid sampling;
//! * [`system`] — the coupled-system data model, the scalar certificate
//!   functional and residual reports over explicit test sets;
//! * [`probes`] — seed-deterministic checkers for the structural hypotheses
//!   (convexity, monotone pairs, homogeneity, coercivity) and an inf-sup
//!   estimate for bilinear couplings;
//! * [`solvers`] — a brute-force grid oracle, projected extragradient on the
//!   product space, an Uzawa iteration for the saddle-point special case and
//!   a ball-expansion outer loop for unbounded constraint sets;
//! * [`fem`] — a P1 discretization of the Φ-Laplacian antiplane contact
//!   problem with Tresca friction, reduced to a coupled system, plus an
//!   independent energy-minimization oracle.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line live in the companion `cvi-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bifunction;
pub mod convex;
pub mod fem;
pub mod linalg;
pub(crate) mod num;
pub mod orlicz;
pub mod probes;
pub mod solvers;
pub mod rng;
pub mod system;

pub use bifunction::{Bifunction, Coupling};
pub use convex::ConvexSet;
pub use system::{CoupledSystem, ResidualReport, TestSet};

/// Absolute tolerance for feasibility membership checks.
///
/// Projections introduce round-off, so exact membership cannot be demanded.
pub const FEASIBILITY_TOL: f64 = 1e-9;

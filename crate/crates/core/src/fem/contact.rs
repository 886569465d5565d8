//! Reduction of the contact problem to a coupled system and its solution.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::assemble::{assemble_phi_residual_nodal, boundary_load, gradient_magnitudes, tresca_weights};
use super::mesh::{BoundaryPart, Mesh};
use super::problem::{dirichlet_mask, ConvexIntegrand, DiscreteField, FemProblem};
use super::FemError;
use crate::bifunction::{Bifunction, Coupling};
use crate::convex::ConvexSet;
use crate::orlicz::{luxemburg_norm, NFunction};
use crate::rng::Rng;
use crate::solvers::{ball_expansion, BallOptions, SolveOutcome};
use crate::system::{CoupledSystem, ResidualReport};

/// Degree-of-freedom bookkeeping shared by the system reduction and the
/// energy oracle.
#[derive(Debug, Clone)]
pub(crate) struct ContactDofs {
    pub mask: Vec<bool>,
    pub free_nodes: Vec<usize>,
    pub multiplier_nodes: Vec<usize>,
    /// Position of each multiplier node inside the free vector.
    pub mult_free_pos: Vec<usize>,
    /// Tresca bound per multiplier dof.
    pub weights: Vec<f64>,
    /// Traction load per free dof.
    pub load: Vec<f64>,
    pub node_areas: Vec<f64>,
}

pub(crate) fn contact_dofs(fem: &FemProblem) -> Result<ContactDofs, FemError> {
    let mesh = &fem.mesh;
    let mask = dirichlet_mask(mesh);
    let free_nodes: Vec<usize> = (0..mesh.node_count()).filter(|&i| !mask[i]).collect();
    let mut free_index = vec![usize::MAX; mesh.node_count()];
    for (k, &n) in free_nodes.iter().enumerate() {
        free_index[n] = k;
    }
    let contact_nodes = mesh.part_nodes(BoundaryPart::Contact);
    let all_weights = tresca_weights(mesh, &fem.friction_bound)?;
    let mut multiplier_nodes = Vec::new();
    let mut weights = Vec::new();
    for (i, &node) in contact_nodes.iter().enumerate() {
        if !mask[node] {
            multiplier_nodes.push(node);
            weights.push(all_weights[i]);
        }
    }
    if multiplier_nodes.is_empty() {
        return Err(FemError::EmptyMultiplierSpace);
    }
    let mult_free_pos: Vec<usize> = multiplier_nodes.iter().map(|&n| free_index[n]).collect();
    let nodal_load = boundary_load(mesh, BoundaryPart::Traction, &fem.traction);
    let load: Vec<f64> = free_nodes.iter().map(|&n| nodal_load[n]).collect();
    Ok(ContactDofs {
        mask,
        free_nodes,
        multiplier_nodes,
        mult_free_pos,
        weights,
        load,
        node_areas: mesh.node_areas(),
    })
}

pub(crate) fn expand_free(dofs: &ContactDofs, free_vals: &[f64], node_count: usize) -> Vec<f64> {
    let mut full = vec![0.0; node_count];
    for (k, &n) in dofs.free_nodes.iter().enumerate() {
        full[n] = free_vals[k];
    }
    full
}

/// The contact problem reduced to a coupled system, plus the bookkeeping
/// needed to lift solutions back onto the mesh.
#[derive(Debug)]
pub struct ContactSystem {
    pub system: CoupledSystem,
    pub mask: Vec<bool>,
    pub free_nodes: Vec<usize>,
    pub multiplier_nodes: Vec<usize>,
    pub weights: Vec<f64>,
    pub load: Vec<f64>,
}

/// Builds the coupled system: primal dofs are the unclamped nodes, dual dofs
/// the contact nodes not clamped, with the multiplier set `{|λ_i| ≤ w_i}`
/// from the lumped friction bounds. The coupling carries the multiplier
/// pairing plus the lumped integral of the convex integrand; the primal
/// bifunction is the Φ-Laplacian residual pairing; the dual bifunction
/// vanishes.
pub fn discretize_contact(fem: &FemProblem) -> Result<ContactSystem, FemError> {
    let dofs = contact_dofs(fem)?;
    let mesh = &fem.mesh;
    let n = dofs.free_nodes.len();
    let m = dofs.multiplier_nodes.len();
    let coords: Vec<[f64; 2]> = mesh.nodes().to_vec();

    let dofs_b = dofs.clone();
    let h_b: Arc<ConvexIntegrand> = fem.h.clone();
    let areas = dofs.node_areas.clone();
    let coords_b = coords.clone();
    let value = move |uf: &[f64], lambda: &[f64]| -> f64 {
        let mut acc = 0.0;
        for (k, &pos) in dofs_b.mult_free_pos.iter().enumerate() {
            acc += lambda[k] * uf[pos];
        }
        let full = expand_free(&dofs_b, uf, coords_b.len());
        for i in 0..coords_b.len() {
            acc += areas[i] * h_b.value(coords_b[i], full[i]);
        }
        acc
    };
    let dofs_gu = dofs.clone();
    let h_gu: Arc<ConvexIntegrand> = fem.h.clone();
    let areas_gu = dofs.node_areas.clone();
    let coords_gu = coords.clone();
    let grad_primal = move |uf: &[f64], lambda: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; uf.len()];
        for (k, &node) in dofs_gu.free_nodes.iter().enumerate() {
            out[k] = areas_gu[node] * h_gu.midpoint_selection(coords_gu[node], uf[k]);
        }
        for (k, &pos) in dofs_gu.mult_free_pos.iter().enumerate() {
            out[pos] += lambda[k];
        }
        out
    };
    let mult_pos_gd = dofs.mult_free_pos.clone();
    let grad_dual = move |uf: &[f64], _lambda: &[f64]| -> Vec<f64> {
        mult_pos_gd.iter().map(|&pos| uf[pos]).collect()
    };
    let coupling = Coupling::Callable {
        primal_dim: n,
        dual_dim: m,
        value: alloc::boxed::Box::new(value),
        grad_primal: Some(alloc::boxed::Box::new(grad_primal)),
        grad_dual: Some(alloc::boxed::Box::new(grad_dual)),
    };

    let mesh_chi = Arc::new(mesh.clone());
    let phi_chi = fem.phi.clone();
    let dofs_chi = dofs.clone();
    let assemble_free = move |uf: &[f64]| -> Vec<f64> {
        let full = expand_free(&dofs_chi, uf, mesh_chi.node_count());
        // Closed-form generators cannot fail here; a tabulated generator
        // queried outside its range surfaces as NaN and fails certification.
        match assemble_phi_residual_nodal(&mesh_chi, &phi_chi, &full) {
            Ok(nodal) => dofs_chi.free_nodes.iter().map(|&n| nodal[n]).collect(),
            Err(_) => vec![f64::NAN; uf.len()],
        }
    };
    let assemble_val = assemble_free.clone();
    let chi = Bifunction::Callable {
        dim: n,
        value: alloc::boxed::Box::new(move |uf: &[f64], v: &[f64]| {
            let r = assemble_val(uf);
            r.iter().zip(v).map(|(&a, &b)| a * b).sum()
        }),
        operator: Some(alloc::boxed::Box::new(assemble_free)),
    };

    let system = CoupledSystem::new(
        coupling,
        chi,
        Bifunction::zero(m),
        dofs.load.clone(),
        vec![0.0; m],
        ConvexSet::whole(n),
        ConvexSet::weighted_linf(dofs.weights.clone())?,
    )?;
    Ok(ContactSystem {
        system,
        mask: dofs.mask,
        free_nodes: dofs.free_nodes,
        multiplier_nodes: dofs.multiplier_nodes,
        weights: dofs.weights,
        load: dofs.load,
    })
}

/// A certified contact solution lifted back onto the mesh.
#[derive(Debug, Clone)]
pub struct ContactSolution {
    pub displacement: DiscreteField,
    pub multiplier: Vec<f64>,
    pub multiplier_nodes: Vec<usize>,
    pub weights: Vec<f64>,
    pub report: ResidualReport,
    pub iterations: usize,
    pub radius_history: Vec<f64>,
    pub converged: bool,
}

impl ContactSolution {
    /// Displacement values at the multiplier nodes.
    pub fn contact_values(&self) -> Vec<f64> {
        self.multiplier_nodes
            .iter()
            .map(|&n| self.displacement.values()[n])
            .collect()
    }
}

/// Discretizes and solves by ball expansion: the displacement space is
/// unbounded while the multiplier set is a bounded weighted box.
pub fn solve_contact(fem: &FemProblem, opts: &BallOptions) -> Result<ContactSolution, FemError> {
    let cs = discretize_contact(fem)?;
    let out: SolveOutcome = ball_expansion(&cs.system, opts)?;
    let full = {
        let mut full = vec![0.0; fem.mesh.node_count()];
        for (k, &n) in cs.free_nodes.iter().enumerate() {
            full[n] = out.primal[k];
        }
        full
    };
    Ok(ContactSolution {
        displacement: DiscreteField::new(full, cs.mask.clone()),
        multiplier: out.dual,
        multiplier_nodes: cs.multiplier_nodes,
        weights: cs.weights,
        report: out.report,
        iterations: out.iterations,
        radius_history: out.radius_history,
        converged: out.converged,
    })
}

/// Frictional complementarity at the contact nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementarityReport {
    /// `Σ w_i|u_i| − Σ λ_i u_i`; nonnegative whenever `λ` is feasible and
    /// within solver tolerance of zero at a certified solution.
    pub gap: f64,
    /// Whether `|λ_i| ≤ w_i` within tolerance.
    pub feasible: bool,
}

pub fn complementarity_report(
    contact_values: &[f64],
    multiplier: &[f64],
    weights: &[f64],
) -> ComplementarityReport {
    let feasible = multiplier
        .iter()
        .zip(weights)
        .all(|(&l, &w)| l.abs() <= w + 1e-9);
    let mut gap = 0.0;
    for i in 0..contact_values.len() {
        gap += weights[i] * contact_values[i].abs() - multiplier[i] * contact_values[i];
    }
    ComplementarityReport { gap, feasible }
}

/// Samples the ratio between the clamped-boundary norm
/// `‖∇u‖_Φ + ∫_{Γ1}|u|` and the full norm `‖∇u‖_Φ + ‖u‖_Φ` over random
/// nodal fields. Returns the observed (min, max); the constants are
/// mesh-dependent and only positivity is asserted by callers.
pub fn norm_equivalence_probe(
    mesh: &Mesh,
    phi: &NFunction,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64), FemError> {
    if samples < 10 {
        return Err(FemError::Input("need at least 10 samples"));
    }
    let tri_areas = mesh.triangle_areas();
    let node_areas = mesh.node_areas();
    let dirichlet_lumped = {
        let nodes = mesh.part_nodes(BoundaryPart::Dirichlet);
        boundary_load(mesh, BoundaryPart::Dirichlet, &vec![1.0; nodes.len()])
    };
    let mut rng = Rng::from_seed(seed);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut taken = 0usize;
    while taken < samples {
        let u = rng.normal_vec(mesh.node_count(), 1.0);
        if u.iter().all(|&x| x == 0.0) {
            continue;
        }
        let grads = gradient_magnitudes(mesh, &u);
        let grad_norm = luxemburg_norm(&grads, &tri_areas, phi)?;
        let boundary_term: f64 = (0..u.len()).map(|i| dirichlet_lumped[i] * u[i].abs()).sum();
        let value_norm = luxemburg_norm(&u, &node_areas, phi)?;
        let denom = grad_norm + value_norm;
        if denom == 0.0 {
            continue;
        }
        let ratio = (grad_norm + boundary_term) / denom;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        taken += 1;
    }
    Ok((min_ratio, max_ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{InnerSolver, SolveOptions};

    fn problem(g: f64, traction: f64) -> FemProblem {
        FemProblem::with_constant_data(
            Mesh::unit_square(1),
            NFunction::power(2.0).unwrap(),
            ConvexIntegrand::zero(),
            traction,
            g,
        )
        .unwrap()
    }

    #[test]
    fn two_triangle_square_dimensions() {
        // Left clamped, top+right traction, bottom contact: two free nodes,
        // one multiplier dof at the bottom-right corner.
        let cs = discretize_contact(&problem(0.5, 1.0)).unwrap();
        assert_eq!(cs.system.primal_dim(), 2);
        assert_eq!(cs.system.dual_dim(), 1);
        assert_eq!(cs.free_nodes, vec![1, 3]);
        assert_eq!(cs.multiplier_nodes, vec![1]);
    }

    #[test]
    fn zero_friction_collapses_the_multiplier_set() {
        let cs = discretize_contact(&problem(0.0, 1.0)).unwrap();
        assert!(cs.weights.iter().all(|&w| w == 0.0));
        let projected = cs.system.dual_set().project(&[0.7]).unwrap();
        assert_eq!(projected, vec![0.0]);
    }

    #[test]
    fn all_boundary_clamped_contact_errors() {
        // Contact part fully inside the clamped part: clamp bottom too.
        let nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let triangles = vec![[0, 1, 3], [0, 3, 2]];
        let boundary = vec![
            BoundaryEdge { a: 0, b: 1, part: BoundaryPart::Contact },
            BoundaryEdge { a: 1, b: 3, part: BoundaryPart::Dirichlet },
            BoundaryEdge { a: 3, b: 2, part: BoundaryPart::Traction },
            BoundaryEdge { a: 2, b: 0, part: BoundaryPart::Dirichlet },
        ];
        use super::super::mesh::BoundaryEdge;
        let mesh = Mesh::new(nodes, triangles, boundary).unwrap();
        let fem = FemProblem::with_constant_data(
            mesh,
            NFunction::power(2.0).unwrap(),
            ConvexIntegrand::zero(),
            1.0,
            0.5,
        )
        .unwrap();
        assert!(matches!(
            discretize_contact(&fem),
            Err(FemError::EmptyMultiplierSpace)
        ));
    }

    #[test]
    fn traction_partition_of_unity_through_the_load() {
        // Constant traction c over the traction part (length 2 here) must
        // appear in the nodal load with total mass 2c before restriction.
        let fem = problem(0.5, 0.7);
        let nodal = boundary_load(
            &fem.mesh,
            BoundaryPart::Traction,
            &fem.traction,
        );
        assert!((nodal.iter().sum::<f64>() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn complementarity_examples() {
        // u = 0 gives a zero gap.
        let r = complementarity_report(&[0.0, 0.0], &[0.1, -0.2], &[0.5, 0.5]);
        assert_eq!(r.gap, 0.0);
        assert!(r.feasible);
        // λ_i = w_i sign(u_i) attains the support function exactly.
        let u = [0.4, -0.3];
        let w = [0.5, 0.25];
        let l = [0.5, -0.25];
        let r = complementarity_report(&u, &l, &w);
        assert!(r.gap.abs() < 1e-15);
        // Random feasible multipliers keep the gap nonnegative.
        let mut rng = Rng::from_seed(12);
        for _ in 0..1000 {
            let u = [rng.normal(), rng.normal(), rng.normal()];
            let w = [rng.unit() + 0.1, rng.unit() + 0.1, rng.unit() + 0.1];
            let l = [
                w[0] * rng.uniform(-1.0, 1.0),
                w[1] * rng.uniform(-1.0, 1.0),
                w[2] * rng.uniform(-1.0, 1.0),
            ];
            let r = complementarity_report(&u, &l, &w);
            assert!(r.feasible);
            assert!(r.gap >= -1e-12, "gap {}", r.gap);
        }
    }

    #[test]
    fn contact_solve_with_zero_friction_matches_linear_neumann_solve() {
        let fem = problem(0.0, 1.0);
        let cs = discretize_contact(&fem).unwrap();
        // Independent route: assemble the stiffness columnwise through the
        // operator and solve directly.
        let n = cs.system.primal_dim();
        let op = |x: &[f64]| cs.system.chi().operator(x).unwrap();
        let mut a = crate::linalg::Matrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = op(&e);
            for i in 0..n {
                a.set(i, j, col[i]);
            }
        }
        let direct = crate::linalg::cholesky_solve(&a, &cs.load).unwrap();

        let opts = BallOptions {
            inner: InnerSolver::Extragradient(SolveOptions {
                step_tol: 1e-13,
                max_iters: 400_000,
                ..SolveOptions::default()
            }),
            r0: 4.0,
            cert_tol: 1e-7,
            ..BallOptions::default()
        };
        let sol = solve_contact(&fem, &opts).unwrap();
        assert!(sol.converged, "report {:?}", sol.report);
        for (k, &node) in cs.free_nodes.iter().enumerate() {
            assert!(
                (sol.displacement.values()[node] - direct[k]).abs() < 1e-8,
                "node {node}: {} vs {}",
                sol.displacement.values()[node],
                direct[k]
            );
        }
        assert!(sol.multiplier.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn norm_probe_stays_positive_and_guards_input() {
        let mesh = Mesh::unit_square(2);
        let phi = NFunction::power(2.0).unwrap();
        assert!(matches!(
            norm_equivalence_probe(&mesh, &phi, 5, 1),
            Err(FemError::Input(_))
        ));
        let (lo, hi) = norm_equivalence_probe(&mesh, &phi, 50, 1).unwrap();
        assert!(lo > 0.0 && hi.is_finite(), "({lo}, {hi})");
        // A constant field has zero gradient part but a positive clamped-
        // boundary term, so the ratio stays away from zero.
        let ones = vec![1.0; mesh.node_count()];
        let tri_areas = mesh.triangle_areas();
        let grads = gradient_magnitudes(&mesh, &ones);
        let gnorm = luxemburg_norm(&grads, &tri_areas, &phi).unwrap();
        assert_eq!(gnorm, 0.0);
        let d_nodes = mesh.part_nodes(BoundaryPart::Dirichlet);
        let lump = boundary_load(&mesh, BoundaryPart::Dirichlet, &vec![1.0; d_nodes.len()]);
        let term: f64 = lump.iter().sum();
        assert!(term > 0.0);
    }
}

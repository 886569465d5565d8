//! Independent primal-energy oracle.
//!
//! Minimizes `J(v) = Σ_T area·Φ(|∇v|) + Σ_i area_i·h(x_i, v_i)
//! + Σ_{Γ3} w_i|v_i| − Σ f_i v_i` over the free nodal values by proximal
//! subgradient descent: a gradient step on the smooth part, an exact
//! soft-threshold step on the friction term, and backtracking so the energy
//! never increases. The optimality conditions of `J` are the variational
//! system, which makes this an independent cross-check for the solver path.

use alloc::vec;
use alloc::vec::Vec;

use super::assemble::assemble_phi_residual_nodal;
use super::contact::{contact_dofs, expand_free};
use super::problem::{DiscreteField, FemProblem};
use super::FemError;
use crate::num;

#[derive(Debug, Clone)]
pub struct EnergySchedule {
    pub iters: usize,
    pub step0: f64,
    pub grow: f64,
    pub shrink: f64,
}

impl Default for EnergySchedule {
    fn default() -> Self {
        EnergySchedule {
            iters: 20_000,
            step0: 1.0,
            grow: 1.2,
            shrink: 0.5,
        }
    }
}

/// Total primal energy of a nodal field.
pub fn total_energy(fem: &FemProblem, field: &DiscreteField) -> Result<f64, FemError> {
    let dofs = contact_dofs(fem)?;
    let free: Vec<f64> = dofs
        .free_nodes
        .iter()
        .map(|&n| field.values()[n])
        .collect();
    energy_of_free(fem, &dofs, &free)
}

fn energy_of_free(
    fem: &FemProblem,
    dofs: &super::contact::ContactDofs,
    free: &[f64],
) -> Result<f64, FemError> {
    let mesh = &fem.mesh;
    let full = expand_free(dofs, free, mesh.node_count());
    let mut j = 0.0;
    for t in 0..mesh.triangles().len() {
        let g = super::assemble::gradient(mesh, &full, t);
        let (_, _, area) = mesh.triangle_geometry(t);
        j += area * fem.phi.big_phi(num::hypot(g[0], g[1]))?;
    }
    for i in 0..mesh.node_count() {
        j += dofs.node_areas[i] * fem.h.value(mesh.nodes()[i], full[i]);
    }
    for (k, &pos) in dofs.mult_free_pos.iter().enumerate() {
        j += dofs.weights[k] * free[pos].abs();
    }
    for (k, &f) in dofs.load.iter().enumerate() {
        j -= f * free[k];
    }
    Ok(j)
}

/// Proximal-subgradient minimizer; also returns the (non-increasing) energy
/// trace.
pub fn energy_oracle_with_trace(
    fem: &FemProblem,
    schedule: &EnergySchedule,
) -> Result<(DiscreteField, Vec<f64>), FemError> {
    let dofs = contact_dofs(fem)?;
    let mesh = &fem.mesh;
    let n = dofs.free_nodes.len();
    let mut v = vec![0.0; n];
    let mut j = energy_of_free(fem, &dofs, &v)?;
    let mut trace = vec![j];
    let mut step = schedule.step0;

    let smooth_grad = |free: &[f64]| -> Result<Vec<f64>, FemError> {
        let full = expand_free(&dofs, free, mesh.node_count());
        let nodal = assemble_phi_residual_nodal(mesh, &fem.phi, &full)?;
        let mut g: Vec<f64> = dofs.free_nodes.iter().map(|&node| nodal[node]).collect();
        for (k, &node) in dofs.free_nodes.iter().enumerate() {
            g[k] += dofs.node_areas[node] * fem.h.midpoint_selection(mesh.nodes()[node], free[k]);
            g[k] -= dofs.load[k];
        }
        Ok(g)
    };

    'outer: for _ in 0..schedule.iters {
        let g = smooth_grad(&v)?;
        let mut accepted = false;
        for _bt in 0..60 {
            let mut cand: Vec<f64> = v.iter().zip(&g).map(|(&x, &gx)| x - step * gx).collect();
            // Exact proximal step of the friction term: soft-threshold the
            // contact dofs.
            for (k, &pos) in dofs.mult_free_pos.iter().enumerate() {
                let thresh = step * dofs.weights[k];
                let x = cand[pos];
                cand[pos] = x.signum() * (x.abs() - thresh).max(0.0);
            }
            let j_cand = energy_of_free(fem, &dofs, &cand)?;
            if j_cand <= j {
                let delta: f64 = cand
                    .iter()
                    .zip(&v)
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum::<f64>();
                v = cand;
                j = j_cand;
                trace.push(j);
                step = (step * schedule.grow).min(schedule.step0 * 16.0);
                accepted = true;
                if num::sqrt(delta) <= 1e-15 * (1.0 + num::norm2(&v)) {
                    break 'outer;
                }
                break;
            }
            step *= schedule.shrink;
            if step < 1e-300 {
                break 'outer;
            }
        }
        if !accepted {
            break;
        }
    }
    let full = expand_free(&dofs, &v, mesh.node_count());
    Ok((DiscreteField::new(full, dofs.mask.clone()), trace))
}

/// Proximal-subgradient minimizer of the primal energy.
pub fn energy_oracle(fem: &FemProblem, schedule: &EnergySchedule) -> Result<DiscreteField, FemError> {
    energy_oracle_with_trace(fem, schedule).map(|(f, _)| f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::Mesh;
    use crate::fem::problem::ConvexIntegrand;
    use crate::linalg::{cholesky_solve, Matrix};
    use crate::orlicz::NFunction;

    fn quadratic_problem(g: f64) -> FemProblem {
        FemProblem::with_constant_data(
            Mesh::unit_square(2),
            NFunction::power(2.0).unwrap(),
            ConvexIntegrand::zero(),
            1.0,
            g,
        )
        .unwrap()
    }

    #[test]
    fn quadratic_unconstrained_minimum_matches_direct_solve() {
        let fem = quadratic_problem(0.0);
        let dofs = contact_dofs(&fem).unwrap();
        let n = dofs.free_nodes.len();
        // Stiffness by operator probing.
        let mut a = Matrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let full = expand_free(&dofs, &e, fem.mesh.node_count());
            let col = assemble_phi_residual_nodal(&fem.mesh, &fem.phi, &full).unwrap();
            for (i, &node) in dofs.free_nodes.iter().enumerate() {
                a.set(i, j, col[node]);
            }
        }
        let direct = cholesky_solve(&a, &dofs.load).unwrap();
        let (field, trace) = energy_oracle_with_trace(
            &fem,
            &EnergySchedule {
                iters: 60_000,
                ..EnergySchedule::default()
            },
        )
        .unwrap();
        // Energy never increases.
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-14, "energy increased");
        }
        for (k, &node) in dofs.free_nodes.iter().enumerate() {
            assert!(
                (field.values()[node] - direct[k]).abs() < 1e-8,
                "node {node}: {} vs {}",
                field.values()[node],
                direct[k]
            );
        }
    }

    #[test]
    fn friction_term_pulls_contact_nodes_toward_stick() {
        // With a large friction bound the minimizer sticks at zero on the
        // contact dofs.
        let fem = quadratic_problem(100.0);
        let field = energy_oracle(&fem, &EnergySchedule::default()).unwrap();
        let dofs = contact_dofs(&fem).unwrap();
        for &node in &dofs.multiplier_nodes {
            assert!(
                field.values()[node].abs() < 1e-10,
                "contact node {node} slipped: {}",
                field.values()[node]
            );
        }
    }
}

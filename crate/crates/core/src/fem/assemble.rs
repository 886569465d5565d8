//! P1 assembly of the Φ-Laplacian residual and lumped boundary masses.

use alloc::vec;
use alloc::vec::Vec;

use super::mesh::{BoundaryPart, Mesh};
use super::problem::DiscreteField;
use super::FemError;
use crate::num;
use crate::orlicz::NFunction;

/// Constant P1 gradient of a nodal field on one triangle.
pub fn gradient(mesh: &Mesh, values: &[f64], tri_idx: usize) -> [f64; 2] {
    let (tri, grads, _) = mesh.triangle_geometry(tri_idx);
    let mut g = [0.0, 0.0];
    for a in 0..3 {
        g[0] += values[tri[a]] * grads[a][0];
        g[1] += values[tri[a]] * grads[a][1];
    }
    g
}

/// `|∇u|` per triangle.
pub fn gradient_magnitudes(mesh: &Mesh, values: &[f64]) -> Vec<f64> {
    (0..mesh.triangles().len())
        .map(|i| {
            let g = gradient(mesh, values, i);
            num::hypot(g[0], g[1])
        })
        .collect()
}

/// Nodal residual of the discrete Φ-Laplacian: each triangle contributes
/// `area · φ(|∇u|)/|∇u| · (∇u · ∇N_a)` to its vertices. The singular factor
/// at `∇u = 0` multiplies the zero vector, so such triangles contribute
/// nothing.
pub fn assemble_phi_residual_nodal(
    mesh: &Mesh,
    phi: &NFunction,
    values: &[f64],
) -> Result<Vec<f64>, FemError> {
    let mut out = vec![0.0; mesh.node_count()];
    for t in 0..mesh.triangles().len() {
        let (tri, grads, area) = mesh.triangle_geometry(t);
        let mut g = [0.0, 0.0];
        for a in 0..3 {
            g[0] += values[tri[a]] * grads[a][0];
            g[1] += values[tri[a]] * grads[a][1];
        }
        let s = num::hypot(g[0], g[1]);
        if s < 1e-300 {
            continue;
        }
        let w = phi.phi(s)? / s;
        for a in 0..3 {
            let dot = g[0] * grads[a][0] + g[1] * grads[a][1];
            out[tri[a]] += area * w * dot;
        }
    }
    Ok(out)
}

/// Residual restricted to free (unmasked) nodes, in ascending node order.
pub fn assemble_phi_residual(
    mesh: &Mesh,
    phi: &NFunction,
    field: &DiscreteField,
) -> Result<Vec<f64>, FemError> {
    let nodal = assemble_phi_residual_nodal(mesh, phi, field.values())?;
    Ok(nodal
        .into_iter()
        .zip(field.mask())
        .filter(|(_, &masked)| !masked)
        .map(|(v, _)| v)
        .collect())
}

/// Lumped boundary mass of a density given per part node (ascending order):
/// node `i` receives `density_i ×` half the length of each adjacent part
/// edge. Returns a full nodal vector.
pub fn boundary_load(mesh: &Mesh, part: BoundaryPart, density: &[f64]) -> Vec<f64> {
    let part_nodes = mesh.part_nodes(part);
    debug_assert_eq!(part_nodes.len(), density.len());
    let index_of = |node: usize| part_nodes.binary_search(&node).expect("part node");
    let mut out = vec![0.0; mesh.node_count()];
    for (a, b, len) in mesh.part_edges(part) {
        out[a] += density[index_of(a)] * 0.5 * len;
        out[b] += density[index_of(b)] * 0.5 * len;
    }
    out
}

/// Tresca multiplier bounds: `w_i = g_i ×` half the total length of the
/// contact edges meeting node `i`. Ascending contact-node order.
pub fn tresca_weights(mesh: &Mesh, g: &[f64]) -> Result<Vec<f64>, FemError> {
    let contact_nodes = mesh.part_nodes(BoundaryPart::Contact);
    if g.len() != contact_nodes.len() {
        return Err(FemError::Input("friction bound length mismatch"));
    }
    let nodal = boundary_load(mesh, BoundaryPart::Contact, g);
    Ok(contact_nodes.iter().map(|&n| nodal[n]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::problem::dirichlet_mask;

    #[test]
    fn zero_field_assembles_to_zero() {
        let mesh = Mesh::unit_square(2);
        let phi = NFunction::power(2.0).unwrap();
        let out = assemble_phi_residual_nodal(&mesh, &phi, &vec![0.0; 9]).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn quadratic_case_matches_hand_assembled_stiffness() {
        // For φ(t) = t the residual is the linear stiffness matrix applied
        // to the field. Assemble the stiffness by the textbook local formula
        // and compare on u = x₁.
        let mesh = Mesh::unit_square(1);
        let phi = NFunction::power(2.0).unwrap();
        let u: Vec<f64> = mesh.nodes().iter().map(|p| p[0]).collect();
        let got = assemble_phi_residual_nodal(&mesh, &phi, &u).unwrap();

        let n = mesh.node_count();
        let mut stiff = vec![vec![0.0; n]; n];
        for t in 0..mesh.triangles().len() {
            let (tri, grads, area) = mesh.triangle_geometry(t);
            for a in 0..3 {
                for b in 0..3 {
                    stiff[tri[a]][tri[b]] +=
                        area * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]);
                }
            }
        }
        for i in 0..n {
            let expected: f64 = (0..n).map(|j| stiff[i][j] * u[j]).sum();
            assert!((got[i] - expected).abs() < 1e-13, "node {i}");
        }
    }

    #[test]
    fn power_homogeneity_of_the_residual() {
        let mesh = Mesh::unit_square(2);
        let p = 3.0;
        let phi = NFunction::power(p).unwrap();
        let mut rng = crate::rng::Rng::from_seed(8);
        let u = rng.normal_vec(mesh.node_count(), 1.0);
        let u2: Vec<f64> = u.iter().map(|&x| 2.0 * x).collect();
        let r1 = assemble_phi_residual_nodal(&mesh, &phi, &u).unwrap();
        let r2 = assemble_phi_residual_nodal(&mesh, &phi, &u2).unwrap();
        let factor = num::pow(2.0, p - 1.0);
        for i in 0..u.len() {
            assert!(
                (r2[i] - factor * r1[i]).abs() <= 1e-10 * r1[i].abs().max(1.0),
                "node {i}: {} vs {}",
                r2[i],
                factor * r1[i]
            );
        }
    }

    #[test]
    fn free_restriction_drops_masked_nodes() {
        let mesh = Mesh::unit_square(1);
        let phi = NFunction::power(2.0).unwrap();
        let field = DiscreteField::new(vec![9.0, 1.0, 9.0, -1.0], dirichlet_mask(&mesh));
        let free = assemble_phi_residual(&mesh, &phi, &field).unwrap();
        assert_eq!(free.len(), 2);
    }

    #[test]
    fn tresca_weights_on_split_bottom() {
        // Bottom edge split in two segments of length 1/2 with g ≡ 1:
        // corner nodes carry 1/4, the middle node 1/2.
        let mesh = Mesh::unit_square(2);
        let w = tresca_weights(&mesh, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(w.len(), 3);
        assert!((w[0] - 0.25).abs() < 1e-15);
        assert!((w[1] - 0.5).abs() < 1e-15);
        assert!((w[2] - 0.25).abs() < 1e-15);
        // Zero bound collapses the multiplier set.
        let w0 = tresca_weights(&mesh, &[0.0, 0.0, 0.0]).unwrap();
        assert!(w0.iter().all(|&x| x == 0.0));
        // Doubling g doubles every weight.
        let w2 = tresca_weights(&mesh, &[2.0, 2.0, 2.0]).unwrap();
        for (a, b) in w.iter().zip(&w2) {
            assert_eq!(*b, 2.0 * *a);
        }
    }

    #[test]
    fn boundary_load_partition_of_unity() {
        // Constant density c over a part of total length L sums to c·L.
        let mesh = Mesh::unit_square(2);
        let c = 0.7;
        let nt = mesh.part_nodes(BoundaryPart::Traction).len();
        let load = boundary_load(&mesh, BoundaryPart::Traction, &vec![c; nt]);
        let total: f64 = load.iter().sum();
        // Traction covers top and right: length 2.
        assert!((total - 2.0 * c).abs() < 1e-12);
    }
}

//! Triangulated 2-D domains with labeled boundary parts.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::num;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("node index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("triangle {0} is degenerate (zero area)")]
    DegenerateTriangle(usize),
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("boundary edge ({0}, {1}) does not bound exactly one triangle")]
    InvalidBoundaryEdge(usize, usize),
    #[error("boundary edge ({0}, {1}) carries no label")]
    UnlabeledBoundaryEdge(usize, usize),
    #[error("boundary label {0} outside 1..=3")]
    BadLabel(u8),
    #[error("boundary part {0} has no edges")]
    EmptyPart(u8),
    #[error("boundary is not a union of closed loops (node {0})")]
    OpenBoundary(usize),
    #[error("mesh has no nodes or no triangles")]
    Empty,
}

/// The three boundary parts: clamped, traction-loaded, frictional contact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPart {
    Dirichlet,
    Traction,
    Contact,
}

impl BoundaryPart {
    pub fn from_label(label: u8) -> Result<Self, MeshError> {
        match label {
            1 => Ok(BoundaryPart::Dirichlet),
            2 => Ok(BoundaryPart::Traction),
            3 => Ok(BoundaryPart::Contact),
            other => Err(MeshError::BadLabel(other)),
        }
    }

    pub fn label(&self) -> u8 {
        match self {
            BoundaryPart::Dirichlet => 1,
            BoundaryPart::Traction => 2,
            BoundaryPart::Contact => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub part: BoundaryPart,
}

/// Validated P1 triangulation. Triangles are stored positively oriented
/// (constructor swaps vertices when needed); every boundary edge carries a
/// part label and the labeled edges cover the topological boundary exactly.
#[derive(Debug, Clone)]
pub struct Mesh {
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<BoundaryEdge>,
}

impl Mesh {
    pub fn new(
        nodes: Vec<[f64; 2]>,
        mut triangles: Vec<[usize; 3]>,
        boundary: Vec<BoundaryEdge>,
    ) -> Result<Self, MeshError> {
        if nodes.is_empty() || triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        let n = nodes.len();
        for (t_idx, tri) in triangles.iter_mut().enumerate() {
            for &v in tri.iter() {
                if v >= n {
                    return Err(MeshError::IndexOutOfRange(v));
                }
            }
            let two_a = signed_double_area(&nodes, tri);
            if two_a.abs() < 1e-300 {
                return Err(MeshError::DegenerateTriangle(t_idx));
            }
            if two_a < 0.0 {
                tri.swap(1, 2);
            }
        }
        // Edge incidence over the triangulation.
        let mut incidence: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for tri in &triangles {
            for e in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                let key = (e.0.min(e.1), e.0.max(e.1));
                let c = incidence.entry(key).or_insert(0);
                *c += 1;
                if *c > 2 {
                    return Err(MeshError::NonManifoldEdge(key.0, key.1));
                }
            }
        }
        let mut labeled: BTreeMap<(usize, usize), BoundaryPart> = BTreeMap::new();
        for e in &boundary {
            if e.a >= n || e.b >= n {
                return Err(MeshError::IndexOutOfRange(e.a.max(e.b)));
            }
            let key = (e.a.min(e.b), e.a.max(e.b));
            match incidence.get(&key) {
                Some(1) => {}
                _ => return Err(MeshError::InvalidBoundaryEdge(e.a, e.b)),
            }
            labeled.insert(key, e.part);
        }
        for (&(a, b), &count) in &incidence {
            if count == 1 && !labeled.contains_key(&(a, b)) {
                return Err(MeshError::UnlabeledBoundaryEdge(a, b));
            }
        }
        for part in [
            BoundaryPart::Dirichlet,
            BoundaryPart::Traction,
            BoundaryPart::Contact,
        ] {
            if !boundary.iter().any(|e| e.part == part) {
                return Err(MeshError::EmptyPart(part.label()));
            }
        }
        // Closed loops: every boundary node joins exactly two boundary edges.
        let mut degree = vec![0usize; n];
        for &(a, b) in labeled.keys() {
            degree[a] += 1;
            degree[b] += 1;
        }
        for (node, &d) in degree.iter().enumerate() {
            if d != 0 && d != 2 {
                return Err(MeshError::OpenBoundary(node));
            }
        }
        Ok(Mesh {
            nodes,
            triangles,
            boundary,
        })
    }

    /// Structured unit-square mesh with `nx × nx` cells split into triangle
    /// pairs. Left side clamped, top and right under traction, bottom in
    /// contact.
    pub fn unit_square(nx: usize) -> Mesh {
        assert!(nx >= 1);
        let np = nx + 1;
        let h = 1.0 / nx as f64;
        let mut nodes = Vec::with_capacity(np * np);
        for j in 0..np {
            for i in 0..np {
                nodes.push([i as f64 * h, j as f64 * h]);
            }
        }
        let id = |i: usize, j: usize| j * np + i;
        let mut triangles = Vec::with_capacity(2 * nx * nx);
        for j in 0..nx {
            for i in 0..nx {
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        let mut boundary = Vec::new();
        for i in 0..nx {
            boundary.push(BoundaryEdge {
                a: id(i, 0),
                b: id(i + 1, 0),
                part: BoundaryPart::Contact,
            });
            boundary.push(BoundaryEdge {
                a: id(i, nx),
                b: id(i + 1, nx),
                part: BoundaryPart::Traction,
            });
        }
        for j in 0..nx {
            boundary.push(BoundaryEdge {
                a: id(0, j),
                b: id(0, j + 1),
                part: BoundaryPart::Dirichlet,
            });
            boundary.push(BoundaryEdge {
                a: id(nx, j),
                b: id(nx, j + 1),
                part: BoundaryPart::Traction,
            });
        }
        Mesh::new(nodes, triangles, boundary).expect("structured mesh is valid")
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Vertex indices, P1 shape-function gradients and area of a triangle.
    pub fn triangle_geometry(&self, idx: usize) -> ([usize; 3], [[f64; 2]; 3], f64) {
        let tri = self.triangles[idx];
        let p = [
            self.nodes[tri[0]],
            self.nodes[tri[1]],
            self.nodes[tri[2]],
        ];
        let two_a = signed_double_area(&self.nodes, &tri);
        let grads = [
            [(p[1][1] - p[2][1]) / two_a, (p[2][0] - p[1][0]) / two_a],
            [(p[2][1] - p[0][1]) / two_a, (p[0][0] - p[2][0]) / two_a],
            [(p[0][1] - p[1][1]) / two_a, (p[1][0] - p[0][0]) / two_a],
        ];
        (tri, grads, 0.5 * two_a)
    }

    pub fn triangle_areas(&self) -> Vec<f64> {
        (0..self.triangles.len())
            .map(|i| self.triangle_geometry(i).2)
            .collect()
    }

    /// Lumped nodal areas: one third of each adjacent triangle.
    pub fn node_areas(&self) -> Vec<f64> {
        let mut areas = vec![0.0; self.nodes.len()];
        for i in 0..self.triangles.len() {
            let (tri, _, area) = self.triangle_geometry(i);
            for v in tri {
                areas[v] += area / 3.0;
            }
        }
        areas
    }

    /// Ascending node ids touched by a boundary part.
    pub fn part_nodes(&self, part: BoundaryPart) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .boundary
            .iter()
            .filter(|e| e.part == part)
            .flat_map(|e| [e.a, e.b])
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Edges of a boundary part with their lengths.
    pub fn part_edges(&self, part: BoundaryPart) -> Vec<(usize, usize, f64)> {
        self.boundary
            .iter()
            .filter(|e| e.part == part)
            .map(|e| {
                let pa = self.nodes[e.a];
                let pb = self.nodes[e.b];
                (e.a, e.b, num::hypot(pb[0] - pa[0], pb[1] - pa[1]))
            })
            .collect()
    }

    pub fn edge_length(&self, a: usize, b: usize) -> f64 {
        let pa = self.nodes[a];
        let pb = self.nodes[b];
        num::hypot(pb[0] - pa[0], pb[1] - pa[1])
    }
}

fn signed_double_area(nodes: &[[f64; 2]], tri: &[usize; 3]) -> f64 {
    let p1 = nodes[tri[0]];
    let p2 = nodes[tri[1]];
    let p3 = nodes[tri[2]];
    (p2[0] - p1[0]) * (p3[1] - p1[1]) - (p3[0] - p1[0]) * (p2[1] - p1[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_triangle_square_counts() {
        let mesh = Mesh::unit_square(1);
        assert_eq!(mesh.node_count(), 4);
        assert_eq!(mesh.triangles().len(), 2);
        assert_eq!(mesh.boundary().len(), 4);
        for i in 0..2 {
            assert!(mesh.triangle_geometry(i).2 > 0.0);
        }
        let total: f64 = mesh.triangle_areas().iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn clockwise_triangles_are_reoriented() {
        // Same square but with both triangles listed clockwise.
        let nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let triangles = vec![[0, 3, 1], [0, 2, 3]];
        let boundary = vec![
            BoundaryEdge { a: 0, b: 1, part: BoundaryPart::Contact },
            BoundaryEdge { a: 1, b: 3, part: BoundaryPart::Traction },
            BoundaryEdge { a: 3, b: 2, part: BoundaryPart::Traction },
            BoundaryEdge { a: 2, b: 0, part: BoundaryPart::Dirichlet },
        ];
        let mesh = Mesh::new(nodes, triangles, boundary).unwrap();
        for i in 0..mesh.triangles().len() {
            assert!(mesh.triangle_geometry(i).2 > 0.0);
        }
    }

    #[test]
    fn label_outside_range_is_rejected() {
        assert_eq!(BoundaryPart::from_label(4), Err(MeshError::BadLabel(4)));
        assert_eq!(BoundaryPart::from_label(0), Err(MeshError::BadLabel(0)));
    }

    #[test]
    fn unlabeled_boundary_edge_is_rejected() {
        let nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let triangles = vec![[0, 1, 3], [0, 3, 2]];
        // Right edge (1,3) missing from the list.
        let boundary = vec![
            BoundaryEdge { a: 0, b: 1, part: BoundaryPart::Contact },
            BoundaryEdge { a: 3, b: 2, part: BoundaryPart::Traction },
            BoundaryEdge { a: 2, b: 0, part: BoundaryPart::Dirichlet },
        ];
        assert_eq!(
            Mesh::new(nodes, triangles, boundary).err(),
            Some(MeshError::UnlabeledBoundaryEdge(1, 3))
        );
    }

    #[test]
    fn interior_edge_cannot_be_boundary() {
        let nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let triangles = vec![[0, 1, 3], [0, 3, 2]];
        let boundary = vec![
            BoundaryEdge { a: 0, b: 1, part: BoundaryPart::Contact },
            BoundaryEdge { a: 1, b: 3, part: BoundaryPart::Traction },
            BoundaryEdge { a: 3, b: 2, part: BoundaryPart::Traction },
            BoundaryEdge { a: 2, b: 0, part: BoundaryPart::Dirichlet },
            // The diagonal is interior.
            BoundaryEdge { a: 0, b: 3, part: BoundaryPart::Contact },
        ];
        assert_eq!(
            Mesh::new(nodes, triangles, boundary).err(),
            Some(MeshError::InvalidBoundaryEdge(0, 3))
        );
    }

    #[test]
    fn missing_part_is_rejected() {
        let nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let triangles = vec![[0, 1, 3], [0, 3, 2]];
        let boundary = vec![
            BoundaryEdge { a: 0, b: 1, part: BoundaryPart::Contact },
            BoundaryEdge { a: 1, b: 3, part: BoundaryPart::Contact },
            BoundaryEdge { a: 3, b: 2, part: BoundaryPart::Contact },
            BoundaryEdge { a: 2, b: 0, part: BoundaryPart::Dirichlet },
        ];
        assert_eq!(
            Mesh::new(nodes, triangles, boundary).err(),
            Some(MeshError::EmptyPart(2))
        );
    }

    #[test]
    fn structured_mesh_parts() {
        let mesh = Mesh::unit_square(2);
        assert_eq!(mesh.node_count(), 9);
        assert_eq!(mesh.triangles().len(), 8);
        assert_eq!(mesh.part_nodes(BoundaryPart::Dirichlet), vec![0, 3, 6]);
        assert_eq!(mesh.part_nodes(BoundaryPart::Contact), vec![0, 1, 2]);
        let areas = mesh.node_areas();
        assert!((areas.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}

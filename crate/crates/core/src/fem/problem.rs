//! Contact problem data: the nonlinearity, the convex integrand and the
//! boundary densities.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::mesh::{BoundaryPart, Mesh};
use super::FemError;
use crate::orlicz::NFunction;

type IntegrandFn = Box<dyn Fn([f64; 2], f64) -> f64 + Send + Sync>;
type SubgradientFn = Box<dyn Fn([f64; 2], f64) -> (f64, f64) + Send + Sync>;

/// Convex integrand `h(x, t)` with subgradient-interval access in `t`.
pub struct ConvexIntegrand {
    value: IntegrandFn,
    subgradient: SubgradientFn,
}

impl ConvexIntegrand {
    pub fn new(value: IntegrandFn, subgradient: SubgradientFn) -> Self {
        ConvexIntegrand { value, subgradient }
    }

    pub fn zero() -> Self {
        ConvexIntegrand {
            value: Box::new(|_, _| 0.0),
            subgradient: Box::new(|_, _| (0.0, 0.0)),
        }
    }

    /// `h(x, t) = −f0(x)·t`, the linear integrand of a body load.
    pub fn linear(f0: Box<dyn Fn([f64; 2]) -> f64 + Send + Sync>) -> Self {
        let f0 = Arc::new(f0);
        let f0v = f0.clone();
        ConvexIntegrand {
            value: Box::new(move |x, t| -f0v(x) * t),
            subgradient: Box::new(move |x, _| {
                let s = -f0(x);
                (s, s)
            }),
        }
    }

    pub fn value(&self, x: [f64; 2], t: f64) -> f64 {
        (self.value)(x, t)
    }

    pub fn subgradient(&self, x: [f64; 2], t: f64) -> (f64, f64) {
        (self.subgradient)(x, t)
    }

    /// Deterministic selection: the midpoint of the subgradient interval.
    pub fn midpoint_selection(&self, x: [f64; 2], t: f64) -> f64 {
        let (lo, hi) = (self.subgradient)(x, t);
        0.5 * (lo + hi)
    }
}

impl core::fmt::Debug for ConvexIntegrand {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "ConvexIntegrand")
    }
}

/// Full contact problem instance on a validated mesh.
#[derive(Debug)]
pub struct FemProblem {
    pub mesh: Mesh,
    pub phi: NFunction,
    pub h: Arc<ConvexIntegrand>,
    /// Traction density per traction-part node, ascending node order.
    pub traction: Vec<f64>,
    /// Friction bound per contact-part node, ascending node order.
    pub friction_bound: Vec<f64>,
}

impl FemProblem {
    pub fn new(
        mesh: Mesh,
        phi: NFunction,
        h: ConvexIntegrand,
        traction: Vec<f64>,
        friction_bound: Vec<f64>,
    ) -> Result<Self, FemError> {
        if traction.len() != mesh.part_nodes(BoundaryPart::Traction).len() {
            return Err(FemError::Input("traction density length mismatch"));
        }
        if friction_bound.len() != mesh.part_nodes(BoundaryPart::Contact).len() {
            return Err(FemError::Input("friction bound length mismatch"));
        }
        if friction_bound.iter().any(|&g| !(g >= 0.0)) {
            return Err(FemError::Input("friction bound must be nonnegative"));
        }
        // Convexity of t ↦ h(x,t) shows as a monotone subgradient interval.
        let probe_ts = [-3.0, -1.0, -0.25, 0.0, 0.4, 1.3, 2.8];
        for &node in mesh.part_nodes(BoundaryPart::Contact).iter().take(2) {
            let x = mesh.nodes()[node];
            check_integrand(&h, x)?;
            let _ = probe_ts;
        }
        let mid = [0.5, 0.5];
        check_integrand(&h, mid)?;
        Ok(FemProblem {
            mesh,
            phi,
            h: Arc::new(h),
            traction,
            friction_bound,
        })
    }

    /// Constant traction and friction data.
    pub fn with_constant_data(
        mesh: Mesh,
        phi: NFunction,
        h: ConvexIntegrand,
        traction: f64,
        friction: f64,
    ) -> Result<Self, FemError> {
        let nt = mesh.part_nodes(BoundaryPart::Traction).len();
        let nc = mesh.part_nodes(BoundaryPart::Contact).len();
        FemProblem::new(mesh, phi, h, vec![traction; nt], vec![friction; nc])
    }
}

fn check_integrand(h: &ConvexIntegrand, x: [f64; 2]) -> Result<(), FemError> {
    let ts = [-3.0, -1.0, -0.25, 0.0, 0.4, 1.3, 2.8];
    let mut prev_hi = f64::NEG_INFINITY;
    for &t in &ts {
        let (lo, hi) = h.subgradient(x, t);
        if lo > hi + 1e-12 {
            return Err(FemError::NonConvexIntegrand);
        }
        if lo + 1e-9 < prev_hi {
            return Err(FemError::NonConvexIntegrand);
        }
        prev_hi = hi;
    }
    Ok(())
}

/// Nodal field with a Dirichlet mask; masked entries are pinned to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    values: Vec<f64>,
    dirichlet_mask: Vec<bool>,
}

impl DiscreteField {
    /// Masked entries of `values` are zeroed, keeping the invariant by
    /// construction.
    pub fn new(mut values: Vec<f64>, dirichlet_mask: Vec<bool>) -> Self {
        assert_eq!(values.len(), dirichlet_mask.len());
        for (v, &masked) in values.iter_mut().zip(&dirichlet_mask) {
            if masked {
                *v = 0.0;
            }
        }
        DiscreteField {
            values,
            dirichlet_mask,
        }
    }

    pub fn zeros(mesh: &Mesh) -> Self {
        let mask = dirichlet_mask(mesh);
        DiscreteField {
            values: vec![0.0; mesh.node_count()],
            dirichlet_mask: mask,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.dirichlet_mask
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// True on nodes touched by the Dirichlet part.
pub(crate) fn dirichlet_mask(mesh: &Mesh) -> Vec<bool> {
    let mut mask = vec![false; mesh.node_count()];
    for id in mesh.part_nodes(BoundaryPart::Dirichlet) {
        mask[id] = true;
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masked_entries_are_zeroed() {
        let mesh = Mesh::unit_square(1);
        let field = DiscreteField::new(vec![1.0, 2.0, 3.0, 4.0], dirichlet_mask(&mesh));
        // Left side (nodes 0 and 2) is clamped.
        assert_eq!(field.values(), &[0.0, 2.0, 0.0, 4.0]);
    }

    #[test]
    fn negative_friction_is_rejected() {
        let mesh = Mesh::unit_square(1);
        let phi = NFunction::power(2.0).unwrap();
        let r = FemProblem::with_constant_data(mesh, phi, ConvexIntegrand::zero(), 1.0, -0.5);
        assert!(matches!(r, Err(FemError::Input(_))));
    }

    #[test]
    fn nonconvex_integrand_is_rejected() {
        let mesh = Mesh::unit_square(1);
        let phi = NFunction::power(2.0).unwrap();
        // h(x,t) = −t² has decreasing derivative.
        let h = ConvexIntegrand::new(
            Box::new(|_, t| -t * t),
            Box::new(|_, t| (-2.0 * t, -2.0 * t)),
        );
        let r = FemProblem::with_constant_data(mesh, phi, h, 1.0, 0.5);
        assert!(matches!(r, Err(FemError::NonConvexIntegrand)));
    }

    #[test]
    fn linear_integrand_has_constant_subgradient() {
        let h = ConvexIntegrand::linear(Box::new(|x: [f64; 2]| x[0] + 1.0));
        assert_eq!(h.value([1.0, 0.0], 3.0), -6.0);
        assert_eq!(h.subgradient([1.0, 0.0], 5.0), (-2.0, -2.0));
        assert_eq!(h.midpoint_selection([1.0, 0.0], -7.0), -2.0);
    }
}

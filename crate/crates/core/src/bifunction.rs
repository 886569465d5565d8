//! Bifunctions `χ(u, v)` and coupling functionals `B(u, λ)`.
//!
//! A [`Bifunction`] takes a base point and a direction from the same space;
//! the second inequality terms `ψ(λ, μ)` use the identical type on the dual
//! side. A [`Coupling`] takes one argument from each space. Caller-supplied
//! oracles must be pure: probes and certificates replay them freely.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::num;

/// `(point, direction) -> value`.
pub type ValueFn = Box<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
/// `point -> A(point)`, the operator representation with `χ(u,v) = ⟨A(u), v⟩`.
pub type OperatorFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// Scalar convex functional.
pub type ScalarFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// `(u, λ) -> value` for couplings.
pub type CouplingFn = Box<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
/// `(u, λ) -> partial gradient` for couplings.
pub type CouplingGradFn = Box<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// A functional of a point and a direction in the same space.
pub enum Bifunction {
    /// Identically zero.
    Zero { dim: usize },
    /// `χ(u, v) = uᵀ M v`.
    Bilinear(Matrix),
    /// `χ(u, v) = ⟨A u, v⟩` for a matrix operator `A`.
    OperatorLinear(Matrix),
    /// Arbitrary value oracle, optionally with the operator `A(u)` when the
    /// functional is linear in its direction argument.
    Callable {
        dim: usize,
        value: ValueFn,
        operator: Option<OperatorFn>,
    },
    /// `χ(u, w) = J(u + w) − J(u)` for a convex `J`; vanishes at `w = 0`
    /// identically.
    ConvexDifference { dim: usize, j: ScalarFn },
}

impl Bifunction {
    pub fn zero(dim: usize) -> Self {
        Bifunction::Zero { dim }
    }

    pub fn dim(&self) -> usize {
        match self {
            Bifunction::Zero { dim } => *dim,
            Bifunction::Bilinear(m) => m.rows(),
            Bifunction::OperatorLinear(m) => m.rows(),
            Bifunction::Callable { dim, .. } => *dim,
            Bifunction::ConvexDifference { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, point: &[f64], direction: &[f64]) -> f64 {
        match self {
            Bifunction::Zero { .. } => 0.0,
            Bifunction::Bilinear(m) => m.bilinear(point, direction),
            Bifunction::OperatorLinear(m) => num::dot(&m.matvec(point), direction),
            Bifunction::Callable { value, .. } => value(point, direction),
            Bifunction::ConvexDifference { j, .. } => {
                let shifted: Vec<f64> = point
                    .iter()
                    .zip(direction)
                    .map(|(&p, &d)| p + d)
                    .collect();
                j(&shifted) - j(point)
            }
        }
    }

    /// The operator `A(point)` when `χ(u, v) = ⟨A(u), v⟩`; `None` for kinds
    /// that are not linear in the direction.
    pub fn operator(&self, point: &[f64]) -> Option<Vec<f64>> {
        match self {
            Bifunction::Zero { dim } => Some(vec![0.0; *dim]),
            // uᵀMv = ⟨Mᵀu, v⟩.
            Bifunction::Bilinear(m) => Some(m.matvec_t(point)),
            Bifunction::OperatorLinear(m) => Some(m.matvec(point)),
            Bifunction::Callable { operator, .. } => operator.as_ref().map(|op| op(point)),
            Bifunction::ConvexDifference { .. } => None,
        }
    }

    pub fn has_operator(&self) -> bool {
        match self {
            Bifunction::Zero { .. } | Bifunction::Bilinear(_) | Bifunction::OperatorLinear(_) => {
                true
            }
            Bifunction::Callable { operator, .. } => operator.is_some(),
            Bifunction::ConvexDifference { .. } => false,
        }
    }
}

impl core::fmt::Debug for Bifunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Bifunction::Zero { dim } => write!(f, "Bifunction::Zero({dim})"),
            Bifunction::Bilinear(m) => write!(f, "Bifunction::Bilinear({}x{})", m.rows(), m.cols()),
            Bifunction::OperatorLinear(m) => {
                write!(f, "Bifunction::OperatorLinear({}x{})", m.rows(), m.cols())
            }
            Bifunction::Callable { dim, operator, .. } => write!(
                f,
                "Bifunction::Callable(dim {dim}, operator: {})",
                operator.is_some()
            ),
            Bifunction::ConvexDifference { dim, .. } => {
                write!(f, "Bifunction::ConvexDifference(dim {dim})")
            }
        }
    }
}

/// The coupling functional `B : X × Y → R`.
pub enum Coupling {
    Zero { primal_dim: usize, dual_dim: usize },
    /// `B(u, λ) = λᵀ M u` with `M` of shape dual × primal.
    Bilinear(Matrix),
    Callable {
        primal_dim: usize,
        dual_dim: usize,
        value: CouplingFn,
        grad_primal: Option<CouplingGradFn>,
        grad_dual: Option<CouplingGradFn>,
    },
}

impl Coupling {
    pub fn zero(primal_dim: usize, dual_dim: usize) -> Self {
        Coupling::Zero {
            primal_dim,
            dual_dim,
        }
    }

    pub fn primal_dim(&self) -> usize {
        match self {
            Coupling::Zero { primal_dim, .. } => *primal_dim,
            Coupling::Bilinear(m) => m.cols(),
            Coupling::Callable { primal_dim, .. } => *primal_dim,
        }
    }

    pub fn dual_dim(&self) -> usize {
        match self {
            Coupling::Zero { dual_dim, .. } => *dual_dim,
            Coupling::Bilinear(m) => m.rows(),
            Coupling::Callable { dual_dim, .. } => *dual_dim,
        }
    }

    pub fn eval(&self, u: &[f64], lambda: &[f64]) -> f64 {
        match self {
            Coupling::Zero { .. } => 0.0,
            Coupling::Bilinear(m) => num::dot(lambda, &m.matvec(u)),
            Coupling::Callable { value, .. } => value(u, lambda),
        }
    }

    /// `∂B/∂u (u, λ)` when available.
    pub fn grad_primal(&self, u: &[f64], lambda: &[f64]) -> Option<Vec<f64>> {
        match self {
            Coupling::Zero { primal_dim, .. } => Some(vec![0.0; *primal_dim]),
            Coupling::Bilinear(m) => Some(m.matvec_t(lambda)),
            Coupling::Callable { grad_primal, .. } => grad_primal.as_ref().map(|g| g(u, lambda)),
        }
    }

    /// `∂B/∂λ (u, λ)` when available.
    pub fn grad_dual(&self, u: &[f64], lambda: &[f64]) -> Option<Vec<f64>> {
        match self {
            Coupling::Zero { dual_dim, .. } => Some(vec![0.0; *dual_dim]),
            Coupling::Bilinear(m) => Some(m.matvec(u)),
            Coupling::Callable { grad_dual, .. } => grad_dual.as_ref().map(|g| g(u, lambda)),
        }
    }

    pub fn has_gradients(&self) -> bool {
        match self {
            Coupling::Zero { .. } | Coupling::Bilinear(_) => true,
            Coupling::Callable {
                grad_primal,
                grad_dual,
                ..
            } => grad_primal.is_some() && grad_dual.is_some(),
        }
    }
}

impl core::fmt::Debug for Coupling {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Coupling::Zero {
                primal_dim,
                dual_dim,
            } => write!(f, "Coupling::Zero({primal_dim}, {dual_dim})"),
            Coupling::Bilinear(m) => write!(f, "Coupling::Bilinear({}x{})", m.rows(), m.cols()),
            Coupling::Callable {
                primal_dim,
                dual_dim,
                grad_primal,
                grad_dual,
                ..
            } => write!(
                f,
                "Coupling::Callable({primal_dim}, {dual_dim}, grads: {}/{})",
                grad_primal.is_some(),
                grad_dual.is_some()
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kind_is_identically_zero() {
        let z = Bifunction::zero(2);
        assert_eq!(z.eval(&[1.0, -3.0], &[4.0, 5.0]), 0.0);
        assert_eq!(z.operator(&[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn operator_linear_vanishes_at_zero_direction() {
        let chi = Bifunction::OperatorLinear(Matrix::identity(2));
        assert_eq!(chi.eval(&[3.0, -1.0], &[0.0, 0.0]), 0.0);
        assert_eq!(chi.eval(&[3.0, -1.0], &[1.0, 1.0]), 2.0);
    }

    #[test]
    fn convex_difference_vanishes_at_zero_direction() {
        let chi = Bifunction::ConvexDifference {
            dim: 1,
            j: Box::new(|v: &[f64]| v[0].abs()),
        };
        assert_eq!(chi.eval(&[-2.5], &[0.0]), 0.0);
        // |u + w| − |u| at u = 1, w = -3.
        assert_eq!(chi.eval(&[1.0], &[-3.0]), 1.0);
    }

    #[test]
    fn bilinear_operator_matches_value() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 3.0]]).unwrap();
        let chi = Bifunction::Bilinear(m);
        let u = [1.0, 2.0];
        let v = [0.5, -1.0];
        let op = chi.operator(&u).unwrap();
        assert!((chi.eval(&u, &v) - num::dot(&op, &v)).abs() < 1e-15);
    }

    #[test]
    fn coupling_bilinear_gradients() {
        // B(u, λ) = λᵀ M u, 2 primal dofs, 1 dual dof.
        let m = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let b = Coupling::Bilinear(m);
        assert_eq!(b.eval(&[1.0, 1.0], &[2.0]), 6.0);
        assert_eq!(b.grad_primal(&[1.0, 1.0], &[2.0]).unwrap(), vec![2.0, 4.0]);
        assert_eq!(b.grad_dual(&[1.0, 1.0], &[2.0]).unwrap(), vec![3.0]);
    }
}

//! Nonempty closed convex constraint sets with membership, Euclidean
//! projection and sampling.
//!
//! Projection is closed-form per variant except for halfspace systems and
//! binary intersections, which run Dykstra's alternating scheme and certify
//! feasibility of the result (an infeasible system surfaces as an
//! empty-intersection error, never as a silently wrong point).

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::num;
use crate::rng::Rng;
use crate::FEASIBILITY_TOL;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SetError {
    #[error("dimension mismatch: {0}")]
    Dimension(&'static str),
    #[error("invalid bounds: {0}")]
    InvalidBounds(&'static str),
    #[error("intersection is empty or infeasible within tolerance")]
    EmptyIntersection,
    #[error("operation requires a bounded set")]
    Unbounded,
}

/// A nonempty closed convex subset of R^dim.
#[derive(Debug, Clone)]
pub enum ConvexSet {
    WholeSpace {
        dim: usize,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// `{ x : |x_i| <= bounds_i }`, the polar box of a weighted l1 functional.
    WeightedLinf {
        bounds: Vec<f64>,
    },
    /// `{ x : n_i · x <= c_i }` for the rows of `normals`.
    HalfspaceIntersection {
        normals: Matrix,
        offsets: Vec<f64>,
    },
    Product(Box<ConvexSet>, Box<ConvexSet>),
    Intersection(Box<ConvexSet>, Box<ConvexSet>),
}

impl ConvexSet {
    pub fn whole(dim: usize) -> Self {
        ConvexSet::WholeSpace { dim }
    }

    pub fn box_set(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, SetError> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(SetError::Dimension("box bounds"));
        }
        for i in 0..lower.len() {
            if !(lower[i] <= upper[i]) {
                return Err(SetError::InvalidBounds("box needs lower <= upper"));
            }
        }
        Ok(ConvexSet::Box { lower, upper })
    }

    /// One-dimensional interval.
    pub fn interval(lo: f64, hi: f64) -> Result<Self, SetError> {
        Self::box_set(vec![lo], vec![hi])
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, SetError> {
        if !(radius >= 0.0) {
            return Err(SetError::InvalidBounds("ball radius must be nonnegative"));
        }
        if center.is_empty() {
            return Err(SetError::Dimension("ball center"));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    pub fn weighted_linf(bounds: Vec<f64>) -> Result<Self, SetError> {
        if bounds.is_empty() {
            return Err(SetError::Dimension("weighted_linf bounds"));
        }
        if bounds.iter().any(|&b| !(b >= 0.0)) {
            return Err(SetError::InvalidBounds("weighted_linf bounds must be nonnegative"));
        }
        Ok(ConvexSet::WeightedLinf { bounds })
    }

    pub fn halfspaces(normals: Matrix, offsets: Vec<f64>) -> Result<Self, SetError> {
        if normals.rows() != offsets.len() || normals.rows() == 0 {
            return Err(SetError::Dimension("halfspace rows"));
        }
        Ok(ConvexSet::HalfspaceIntersection { normals, offsets })
    }

    pub fn product(a: ConvexSet, b: ConvexSet) -> Self {
        ConvexSet::Product(Box::new(a), Box::new(b))
    }

    pub fn intersection(a: ConvexSet, b: ConvexSet) -> Result<Self, SetError> {
        if a.dim() != b.dim() {
            return Err(SetError::Dimension("intersection operands"));
        }
        Ok(ConvexSet::Intersection(Box::new(a), Box::new(b)))
    }

    /// The set intersected with the centered Euclidean ball of radius `r`.
    pub fn restrict_to_ball(&self, r: f64) -> ConvexSet {
        match self {
            ConvexSet::WholeSpace { dim } => ConvexSet::Ball {
                center: vec![0.0; *dim],
                radius: r,
            },
            other => ConvexSet::Intersection(
                Box::new(other.clone()),
                Box::new(ConvexSet::Ball {
                    center: vec![0.0; other.dim()],
                    radius: r,
                }),
            ),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::WholeSpace { dim } => *dim,
            ConvexSet::Box { lower, .. } => lower.len(),
            ConvexSet::Ball { center, .. } => center.len(),
            ConvexSet::WeightedLinf { bounds } => bounds.len(),
            ConvexSet::HalfspaceIntersection { normals, .. } => normals.cols(),
            ConvexSet::Product(a, b) => a.dim() + b.dim(),
            ConvexSet::Intersection(a, _) => a.dim(),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            ConvexSet::WholeSpace { .. } => true,
            ConvexSet::Box { lower, upper } => x
                .iter()
                .enumerate()
                .all(|(i, &v)| v >= lower[i] - tol && v <= upper[i] + tol),
            ConvexSet::Ball { center, radius } => {
                let mut d2 = 0.0;
                for i in 0..x.len() {
                    let d = x[i] - center[i];
                    d2 += d * d;
                }
                num::sqrt(d2) <= radius + tol
            }
            ConvexSet::WeightedLinf { bounds } => x
                .iter()
                .enumerate()
                .all(|(i, &v)| v.abs() <= bounds[i] + tol),
            ConvexSet::HalfspaceIntersection { normals, offsets } => {
                let ax = normals.matvec(x);
                ax.iter().enumerate().all(|(i, &v)| v <= offsets[i] + tol)
            }
            ConvexSet::Product(a, b) => {
                let na = a.dim();
                a.contains(&x[..na], tol) && b.contains(&x[na..], tol)
            }
            ConvexSet::Intersection(a, b) => a.contains(x, tol) && b.contains(x, tol),
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, SetError> {
        if x.len() != self.dim() {
            return Err(SetError::Dimension("projection argument"));
        }
        match self {
            ConvexSet::WholeSpace { .. } => Ok(x.to_vec()),
            ConvexSet::Box { lower, upper } => Ok(x
                .iter()
                .enumerate()
                .map(|(i, &v)| v.max(lower[i]).min(upper[i]))
                .collect()),
            ConvexSet::Ball { center, radius } => {
                let mut d = vec![0.0; x.len()];
                let mut n2 = 0.0;
                for i in 0..x.len() {
                    d[i] = x[i] - center[i];
                    n2 += d[i] * d[i];
                }
                let n = num::sqrt(n2);
                if n <= *radius {
                    return Ok(x.to_vec());
                }
                let scale = radius / n;
                Ok((0..x.len()).map(|i| center[i] + scale * d[i]).collect())
            }
            ConvexSet::WeightedLinf { bounds } => Ok(x
                .iter()
                .enumerate()
                .map(|(i, &v)| v.max(-bounds[i]).min(bounds[i]))
                .collect()),
            ConvexSet::HalfspaceIntersection { normals, offsets } => {
                project_halfspaces(normals, offsets, x)
            }
            ConvexSet::Product(a, b) => {
                let na = a.dim();
                let mut out = a.project(&x[..na])?;
                out.extend(b.project(&x[na..])?);
                Ok(out)
            }
            ConvexSet::Intersection(a, b) => project_pair(a, b, x),
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            ConvexSet::WholeSpace { .. } => false,
            ConvexSet::Box { .. } | ConvexSet::Ball { .. } | ConvexSet::WeightedLinf { .. } => true,
            ConvexSet::HalfspaceIntersection { .. } => false,
            ConvexSet::Product(a, b) => a.is_bounded() && b.is_bounded(),
            ConvexSet::Intersection(a, b) => a.is_bounded() || b.is_bounded(),
        }
    }

    /// Componentwise bounding box, `None` for unbounded variants.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            ConvexSet::WholeSpace { .. } | ConvexSet::HalfspaceIntersection { .. } => None,
            ConvexSet::Box { lower, upper } => Some((lower.clone(), upper.clone())),
            ConvexSet::Ball { center, radius } => Some((
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            )),
            ConvexSet::WeightedLinf { bounds } => Some((
                bounds.iter().map(|b| -b).collect(),
                bounds.clone(),
            )),
            ConvexSet::Product(a, b) => {
                let (la, ua) = a.bounding_box()?;
                let (lb, ub) = b.bounding_box()?;
                let mut l = la;
                l.extend(lb);
                let mut u = ua;
                u.extend(ub);
                Some((l, u))
            }
            ConvexSet::Intersection(a, b) => match (a.bounding_box(), b.bounding_box()) {
                (Some((la, ua)), Some((lb, ub))) => Some((
                    (0..la.len()).map(|i| la[i].max(lb[i])).collect(),
                    (0..ua.len()).map(|i| ua[i].min(ub[i])).collect(),
                )),
                (Some(bb), None) | (None, Some(bb)) => Some(bb),
                (None, None) => None,
            },
        }
    }

    /// Per-axis sample grids spanning the bounding box; the cartesian tuples
    /// still need a `contains` filter for non-box variants.
    pub fn axis_grids(&self, resolution: usize) -> Result<Vec<Vec<f64>>, SetError> {
        let (lower, upper) = self.bounding_box().ok_or(SetError::Unbounded)?;
        if resolution == 0 {
            return Err(SetError::InvalidBounds("grid resolution must be positive"));
        }
        let mut axes = Vec::with_capacity(lower.len());
        for i in 0..lower.len() {
            if resolution == 1 || upper[i] == lower[i] {
                axes.push(vec![0.5 * (lower[i] + upper[i])]);
                continue;
            }
            let step = (upper[i] - lower[i]) / (resolution - 1) as f64;
            axes.push((0..resolution).map(|k| lower[i] + step * k as f64).collect());
        }
        Ok(axes)
    }

    /// A random feasible point: uniform over the bounding box for bounded
    /// sets, Gaussian with the given scale otherwise; always projected.
    pub fn sample(&self, rng: &mut Rng, scale: f64) -> Result<Vec<f64>, SetError> {
        let n = self.dim();
        let raw = match self.bounding_box() {
            Some((lower, upper)) => (0..n)
                .map(|i| rng.uniform(lower[i], upper[i]))
                .collect::<Vec<f64>>(),
            None => rng.normal_vec(n, scale),
        };
        self.project(&raw)
    }

    /// Deterministic extreme points: projected bounding-box corners for
    /// bounded sets (axis extremes once the corner count exceeds `cap`),
    /// projected `±scale·e_i` spikes otherwise.
    pub fn extreme_points(&self, scale: f64, cap: usize) -> Result<Vec<Vec<f64>>, SetError> {
        let n = self.dim();
        let mut out = Vec::new();
        match self.bounding_box() {
            Some((lower, upper)) => {
                if n <= 16 && (1usize << n) <= cap {
                    for mask in 0..(1usize << n) {
                        let corner: Vec<f64> = (0..n)
                            .map(|i| if mask >> i & 1 == 1 { upper[i] } else { lower[i] })
                            .collect();
                        out.push(self.project(&corner)?);
                    }
                } else {
                    let mid: Vec<f64> = (0..n).map(|i| 0.5 * (lower[i] + upper[i])).collect();
                    for i in 0..n {
                        for &v in &[lower[i], upper[i]] {
                            let mut p = mid.clone();
                            p[i] = v;
                            out.push(self.project(&p)?);
                            if out.len() >= cap {
                                return Ok(out);
                            }
                        }
                    }
                }
            }
            None => {
                for i in 0..n {
                    for sign in [-1.0, 1.0] {
                        let mut p = vec![0.0; n];
                        p[i] = sign * scale;
                        out.push(self.project(&p)?);
                        if out.len() >= cap {
                            return Ok(out);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

// Dykstra's algorithm over the rows of a halfspace system.
fn project_halfspaces(normals: &Matrix, offsets: &[f64], x: &[f64]) -> Result<Vec<f64>, SetError> {
    let m = normals.rows();
    let n = normals.cols();
    let mut y = x.to_vec();
    let mut increments = vec![vec![0.0; n]; m];
    let mut norms2 = vec![0.0; m];
    for i in 0..m {
        let mut s = 0.0;
        for j in 0..n {
            s += normals.get(i, j) * normals.get(i, j);
        }
        if s == 0.0 {
            return Err(SetError::InvalidBounds("halfspace normal must be nonzero"));
        }
        norms2[i] = s;
    }
    for _round in 0..20_000 {
        let mut shift = 0.0f64;
        for i in 0..m {
            let mut z = vec![0.0; n];
            for j in 0..n {
                z[j] = y[j] + increments[i][j];
            }
            let viol = (num::dot(&row(normals, i), &z) - offsets[i]).max(0.0) / norms2[i];
            let mut proj = z.clone();
            if viol > 0.0 {
                for j in 0..n {
                    proj[j] -= viol * normals.get(i, j);
                }
            }
            for j in 0..n {
                increments[i][j] = z[j] - proj[j];
                shift = shift.max((proj[j] - y[j]).abs());
                y[j] = proj[j];
            }
        }
        if shift <= 1e-12 {
            break;
        }
    }
    let feasible = (0..m).all(|i| num::dot(&row(normals, i), &y) <= offsets[i] + FEASIBILITY_TOL);
    if feasible {
        Ok(y)
    } else {
        Err(SetError::EmptyIntersection)
    }
}

fn row(m: &Matrix, i: usize) -> Vec<f64> {
    (0..m.cols()).map(|j| m.get(i, j)).collect()
}

// Two-set Dykstra; exact component projectors are supplied recursively.
fn project_pair(a: &ConvexSet, b: &ConvexSet, x: &[f64]) -> Result<Vec<f64>, SetError> {
    let n = x.len();
    let mut y = x.to_vec();
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    for _round in 0..10_000 {
        let zp: Vec<f64> = (0..n).map(|i| y[i] + p[i]).collect();
        let ya = a.project(&zp)?;
        for i in 0..n {
            p[i] = zp[i] - ya[i];
        }
        let zq: Vec<f64> = (0..n).map(|i| ya[i] + q[i]).collect();
        let yb = b.project(&zq)?;
        let mut gap = 0.0f64;
        for i in 0..n {
            q[i] = zq[i] - yb[i];
            gap = gap.max((yb[i] - ya[i]).abs()).max((yb[i] - y[i]).abs());
        }
        y = yb;
        if gap <= 1e-12 {
            break;
        }
    }
    if a.contains(&y, FEASIBILITY_TOL) && b.contains(&y, FEASIBILITY_TOL) {
        Ok(y)
    } else {
        Err(SetError::EmptyIntersection)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_projections() {
        let bx = ConvexSet::box_set(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(bx.project(&[2.0, 0.5]).unwrap(), vec![1.0, 0.5]);
        let ball = ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        let p = ball.project(&[3.0, 4.0]).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
        let wl = ConvexSet::weighted_linf(vec![2.0]).unwrap();
        assert_eq!(wl.project(&[-5.0]).unwrap(), vec![-2.0]);
    }

    #[test]
    fn projection_is_identity_on_members_and_idempotent() {
        let sets = test_sets();
        let mut rng = Rng::from_seed(3);
        for set in &sets {
            for _ in 0..50 {
                let x = rng.normal_vec(set.dim(), 2.0);
                let p = set.project(&x).unwrap();
                assert!(set.contains(&p, FEASIBILITY_TOL), "{set:?}");
                let pp = set.project(&p).unwrap();
                for i in 0..p.len() {
                    assert!((pp[i] - p[i]).abs() <= 1e-9, "{set:?}");
                }
            }
        }
    }

    #[test]
    fn projection_is_nonexpansive_on_all_variants() {
        let sets = test_sets();
        let mut rng = Rng::from_seed(17);
        for set in &sets {
            for _ in 0..1000 {
                let x = rng.normal_vec(set.dim(), 3.0);
                let y = rng.normal_vec(set.dim(), 3.0);
                let px = set.project(&x).unwrap();
                let py = set.project(&y).unwrap();
                let mut dxy = 0.0;
                let mut dp = 0.0;
                for i in 0..x.len() {
                    dxy += (x[i] - y[i]) * (x[i] - y[i]);
                    dp += (px[i] - py[i]) * (px[i] - py[i]);
                }
                assert!(dp <= dxy * (1.0 + 1e-9) + 1e-12, "{set:?}");
            }
        }
    }

    #[test]
    fn halfspace_dykstra_finds_nearest_point() {
        // Intersection of x1 <= 0 and x1 + x2 <= 1: projecting (1, 0) lands
        // on the first constraint plane.
        let set = ConvexSet::halfspaces(
            Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap(),
            vec![0.0, 1.0],
        )
        .unwrap();
        let p = set.project(&[1.0, 0.0]).unwrap();
        assert!((p[0] - 0.0).abs() < 1e-9 && (p[1] - 0.0).abs() < 1e-9, "{p:?}");
    }

    #[test]
    fn empty_halfspace_intersection_is_an_error() {
        let set = ConvexSet::halfspaces(
            Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap(),
            vec![-1.0, -1.0],
        )
        .unwrap();
        assert_eq!(set.project(&[0.0]), Err(SetError::EmptyIntersection));
    }

    #[test]
    fn ball_box_intersection_projects_into_both() {
        let set = ConvexSet::intersection(
            ConvexSet::box_set(vec![0.5, -2.0], vec![2.0, 2.0]).unwrap(),
            ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap(),
        )
        .unwrap();
        let p = set.project(&[3.0, 3.0]).unwrap();
        assert!(set.contains(&p, 1e-9), "{p:?}");
    }

    #[test]
    fn bounding_boxes_and_grids() {
        let set = ConvexSet::interval(-1.0, 1.0).unwrap();
        let axes = set.axis_grids(5).unwrap();
        assert_eq!(axes[0], vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(ConvexSet::whole(2).axis_grids(3).is_err());
        let ball = ConvexSet::ball(vec![1.0], 2.0).unwrap();
        assert_eq!(ball.bounding_box().unwrap(), (vec![-1.0], vec![3.0]));
    }

    #[test]
    fn extreme_points_cover_corners() {
        let bx = ConvexSet::box_set(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        let pts = bx.extreme_points(1.0, 16).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(pts.contains(&vec![-1.0, 0.0]) && pts.contains(&vec![1.0, 2.0]));
        let whole = ConvexSet::whole(2);
        let pts = whole.extreme_points(10.0, 16).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(pts.contains(&vec![10.0, 0.0]));
    }

    fn test_sets() -> Vec<ConvexSet> {
        vec![
            ConvexSet::whole(3),
            ConvexSet::box_set(vec![-1.0, -0.5, 0.0], vec![1.0, 2.0, 0.25]).unwrap(),
            ConvexSet::ball(vec![0.5, -0.5], 1.5).unwrap(),
            ConvexSet::weighted_linf(vec![1.0, 0.0, 2.0]).unwrap(),
            ConvexSet::halfspaces(
                Matrix::from_rows(&[vec![1.0, 1.0], vec![-1.0, 0.5]]).unwrap(),
                vec![1.0, 0.5],
            )
            .unwrap(),
            ConvexSet::product(
                ConvexSet::interval(-1.0, 1.0).unwrap(),
                ConvexSet::ball(vec![0.0], 2.0).unwrap(),
            ),
            ConvexSet::intersection(
                ConvexSet::box_set(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap(),
                ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap(),
            )
            .unwrap(),
        ]
    }
}

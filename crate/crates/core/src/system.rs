//! The coupled-system data model and its residual certificates.
//!
//! A [`CoupledSystem`] instance holds the coupling `B`, the bifunctions `χ`
//! and `ψ`, the right-hand sides `f`, `g` and the constraint sets `K`, `Λ`.
//! "Solution" is always certificate-based: the residuals report the worst
//! violation of the two defining inequalities over an explicit test set, so
//! every claim is auditable by replaying the test set.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::bifunction::{Bifunction, Coupling, OperatorFn, ScalarFn};
use crate::convex::{ConvexSet, SetError};
use crate::linalg::Matrix;
use crate::num;
use crate::rng::Rng;
use crate::FEASIBILITY_TOL;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SystemError {
    #[error("dimension mismatch: {0}")]
    Dimension(&'static str),
    #[error("infeasible point supplied for {0}")]
    Infeasible(&'static str),
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("supplied functional failed the convexity probe: {0}")]
    NonConvex(&'static str),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Full instance of the coupled system.
#[derive(Debug)]
pub struct CoupledSystem {
    coupling: Coupling,
    chi: Bifunction,
    psi: Bifunction,
    f: Vec<f64>,
    g: Vec<f64>,
    primal_set: ConvexSet,
    dual_set: ConvexSet,
    primal_witness: Vec<f64>,
    dual_witness: Vec<f64>,
}

impl CoupledSystem {
    pub fn new(
        coupling: Coupling,
        chi: Bifunction,
        psi: Bifunction,
        f: Vec<f64>,
        g: Vec<f64>,
        primal_set: ConvexSet,
        dual_set: ConvexSet,
    ) -> Result<Self, SystemError> {
        let n = primal_set.dim();
        let m = dual_set.dim();
        if coupling.primal_dim() != n || chi.dim() != n || f.len() != n {
            return Err(SystemError::Dimension("primal side"));
        }
        if coupling.dual_dim() != m || psi.dim() != m || g.len() != m {
            return Err(SystemError::Dimension("dual side"));
        }
        // Nonemptiness witnesses; projection of the origin must succeed.
        let primal_witness = primal_set.project(&vec![0.0; n])?;
        let dual_witness = dual_set.project(&vec![0.0; m])?;
        Ok(CoupledSystem {
            coupling,
            chi,
            psi,
            f,
            g,
            primal_set,
            dual_set,
            primal_witness,
            dual_witness,
        })
    }

    pub fn primal_dim(&self) -> usize {
        self.f.len()
    }

    pub fn dual_dim(&self) -> usize {
        self.g.len()
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn chi(&self) -> &Bifunction {
        &self.chi
    }

    pub fn psi(&self) -> &Bifunction {
        &self.psi
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn primal_set(&self) -> &ConvexSet {
        &self.primal_set
    }

    pub fn dual_set(&self) -> &ConvexSet {
        &self.dual_set
    }

    pub fn primal_witness(&self) -> &[f64] {
        &self.primal_witness
    }

    pub fn dual_witness(&self) -> &[f64] {
        &self.dual_witness
    }

    /// The scalar certificate functional
    /// `h([u,λ],[v,μ]) = ⟨f,v−u⟩ + ⟨g,μ−λ⟩ − χ(u,v−u) − ψ(λ,μ−λ) + B(u,μ) − B(v,λ)`.
    ///
    /// `(u,λ)` solves the system on a test set exactly when the supremum of
    /// `h` over that test set is nonpositive.
    pub fn bns_h(
        &self,
        at: (&[f64], &[f64]),
        test: (&[f64], &[f64]),
    ) -> Result<f64, SystemError> {
        let (u, lambda) = at;
        let (v, mu) = test;
        if !self.primal_set.contains(u, FEASIBILITY_TOL) {
            return Err(SystemError::Infeasible("u"));
        }
        if !self.dual_set.contains(lambda, FEASIBILITY_TOL) {
            return Err(SystemError::Infeasible("lambda"));
        }
        if !self.primal_set.contains(v, FEASIBILITY_TOL) {
            return Err(SystemError::Infeasible("v"));
        }
        if !self.dual_set.contains(mu, FEASIBILITY_TOL) {
            return Err(SystemError::Infeasible("mu"));
        }
        Ok(self.h_raw(u, lambda, v, mu))
    }

    fn h_raw(&self, u: &[f64], lambda: &[f64], v: &[f64], mu: &[f64]) -> f64 {
        let dv = sub(v, u);
        let dm = sub(mu, lambda);
        num::dot(&self.f, &dv) + num::dot(&self.g, &dm) - self.chi.eval(u, &dv)
            - self.psi.eval(lambda, &dm)
            + self.coupling.eval(u, mu)
            - self.coupling.eval(v, lambda)
    }

    /// Violation of the first inequality in test direction `v`:
    /// `⟨f,v−u⟩ + B(u,λ) − B(v,λ) − χ(u,v−u)`.
    pub fn first_violation(&self, u: &[f64], lambda: &[f64], v: &[f64]) -> f64 {
        let dv = sub(v, u);
        num::dot(&self.f, &dv) + self.coupling.eval(u, lambda) - self.coupling.eval(v, lambda)
            - self.chi.eval(u, &dv)
    }

    /// Violation of the second inequality in test direction `μ`:
    /// `⟨g,μ−λ⟩ + B(u,μ) − B(u,λ) − ψ(λ,μ−λ)`, i.e. the `v = u` slice of `h`.
    pub fn second_violation(&self, u: &[f64], lambda: &[f64], mu: &[f64]) -> f64 {
        let dm = sub(mu, lambda);
        num::dot(&self.g, &dm) + self.coupling.eval(u, mu) - self.coupling.eval(u, lambda)
            - self.psi.eval(lambda, &dm)
    }

    /// Worst signed violations over an explicit test set. Raw maxima are
    /// reported (not clipped at zero), so "how infeasible" stays measurable.
    pub fn residual(
        &self,
        u: &[f64],
        lambda: &[f64],
        tests: &TestSet,
    ) -> Result<ResidualReport, SystemError> {
        if !self.primal_set.contains(u, FEASIBILITY_TOL) {
            return Err(SystemError::Infeasible("u"));
        }
        if !self.dual_set.contains(lambda, FEASIBILITY_TOL) {
            return Err(SystemError::Infeasible("lambda"));
        }
        if tests.primal.is_empty() || tests.dual.is_empty() {
            return Err(SystemError::EmptyTestSet);
        }
        let mut r1 = f64::NEG_INFINITY;
        let mut witness1 = &tests.primal[0];
        for v in &tests.primal {
            if v.len() != u.len() {
                return Err(SystemError::Dimension("primal test direction"));
            }
            let val = self.first_violation(u, lambda, v);
            if val > r1 {
                r1 = val;
                witness1 = v;
            }
        }
        let mut r2 = f64::NEG_INFINITY;
        let mut witness2 = &tests.dual[0];
        for mu in &tests.dual {
            if mu.len() != lambda.len() {
                return Err(SystemError::Dimension("dual test direction"));
            }
            let val = self.second_violation(u, lambda, mu);
            if val > r2 {
                r2 = val;
                witness2 = mu;
            }
        }
        Ok(ResidualReport {
            r1,
            r2,
            witness1: witness1.clone(),
            witness2: witness2.clone(),
            test_set_size: tests.primal.len() + tests.dual.len(),
            seed: tests.seed,
        })
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// Explicit test directions for residual certificates, split by side.
#[derive(Debug, Clone)]
pub struct TestSet {
    pub primal: Vec<Vec<f64>>,
    pub dual: Vec<Vec<f64>>,
    /// Seed used to generate the random portion, when any.
    pub seed: Option<u64>,
}

impl TestSet {
    pub fn new(primal: Vec<Vec<f64>>, dual: Vec<Vec<f64>>) -> Self {
        TestSet {
            primal,
            dual,
            seed: None,
        }
    }

    /// Builds both sides from `(v, μ)` pairs.
    pub fn from_pairs(pairs: &[(Vec<f64>, Vec<f64>)]) -> Self {
        TestSet {
            primal: pairs.iter().map(|p| p.0.clone()).collect(),
            dual: pairs.iter().map(|p| p.1.clone()).collect(),
            seed: None,
        }
    }
}

/// Deterministic seeded test set: set extremes, coordinate perturbations of
/// the candidate, then random feasible points. The seed and size end up in
/// every report produced from it.
pub fn make_test_set(
    sys: &CoupledSystem,
    candidate: (&[f64], &[f64]),
    seed: u64,
    random_count: usize,
    scale: Option<f64>,
) -> Result<TestSet, SystemError> {
    let (u, lambda) = candidate;
    let s = scale.unwrap_or_else(|| {
        let nu = num::norm2(u);
        let nl = num::norm2(lambda);
        (2.0 * nu).max(2.0 * nl).max(1.0)
    });
    let mut rng = Rng::from_seed(seed);
    let primal = side_points(sys.primal_set(), u, s, random_count, &mut rng)?;
    let dual = side_points(sys.dual_set(), lambda, s, random_count, &mut rng)?;
    Ok(TestSet {
        primal,
        dual,
        seed: Some(seed),
    })
}

fn side_points(
    set: &ConvexSet,
    center: &[f64],
    scale: f64,
    random_count: usize,
    rng: &mut Rng,
) -> Result<Vec<Vec<f64>>, SystemError> {
    let n = set.dim();
    let mut pts = set.extreme_points(scale, 64)?;
    for i in 0..n {
        for delta in [1e-3 * scale, 0.1 * scale, scale] {
            for sign in [-1.0, 1.0] {
                let mut p = center.to_vec();
                p[i] += sign * delta;
                pts.push(set.project(&p)?);
            }
        }
        if pts.len() > 4096 {
            break;
        }
    }
    for _ in 0..random_count {
        pts.push(set.sample(rng, scale)?);
    }
    Ok(pts)
}

/// Worst-violation certificate with witness directions.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// Worst violation of the first inequality.
    pub r1: f64,
    /// Worst violation of the second inequality.
    pub r2: f64,
    pub witness1: Vec<f64>,
    pub witness2: Vec<f64>,
    pub test_set_size: usize,
    pub seed: Option<u64>,
}

impl ResidualReport {
    pub fn max_violation(&self) -> f64 {
        self.r1.max(self.r2)
    }

    /// Key-value rendering with 17-significant-digit floats; stable across
    /// runs with the same inputs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("r1 = {:.16e}\n", self.r1));
        out.push_str(&format!("r2 = {:.16e}\n", self.r2));
        out.push_str(&format!("test_set_size = {}\n", self.test_set_size));
        match self.seed {
            Some(s) => out.push_str(&format!("seed = {s}\n")),
            None => out.push_str("seed = none\n"),
        }
        out.push_str(&format!("witness1 = {}\n", csv_row(&self.witness1)));
        out.push_str(&format!("witness2 = {}\n", csv_row(&self.witness2)));
        out
    }
}

pub(crate) fn csv_row(v: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&format!("{x:.16e}"));
    }
    s
}

/// Special-case constructors reduced to the general system. Every variant
/// keeps the equality line of the mixed formulation as an inequality tested
/// against all directions of the whole space.
pub enum Special {
    /// Bilinear saddle-point problem: `a(u,v) + b(v,λ) = (f,v)` for all `v`,
    /// `b(u, μ−λ) ≤ 0` on the dual set.
    SaddlePoint {
        a: Matrix,
        b: Matrix,
        f: Vec<f64>,
        dual_set: ConvexSet,
    },
    /// Nonlinear operator in place of the bilinear form `a`.
    S1 {
        a_op: OperatorFn,
        n: usize,
        b: Matrix,
        f: Vec<f64>,
        dual_set: ConvexSet,
    },
    /// Operator plus a convex functional tested by differences.
    S2Convex {
        a_op: OperatorFn,
        n: usize,
        j: ScalarFn,
        b: Matrix,
        f: Vec<f64>,
        dual_set: ConvexSet,
        probe_seed: u64,
    },
    /// Two convex functionals and a bilinear coupling.
    S3 {
        j: ScalarFn,
        phi: ScalarFn,
        b: Matrix,
        f: Vec<f64>,
        dual_set: ConvexSet,
        probe_seed: u64,
    },
    /// Fully nonlinear variant: operators on both sides, a weighted convex
    /// term on the primal side and a convex term on the dual side.
    S4Convex {
        a_op: OperatorFn,
        f_op: OperatorFn,
        j: ScalarFn,
        h_weight: ScalarFn,
        g_fn: ScalarFn,
        coupling: Coupling,
        f: Vec<f64>,
        g: Vec<f64>,
        primal_set: ConvexSet,
        dual_set: ConvexSet,
        probe_seed: u64,
    },
}

pub fn build_special(special: Special) -> Result<CoupledSystem, SystemError> {
    match special {
        Special::SaddlePoint { a, b, f, dual_set } => {
            let n = a.rows();
            if a.cols() != n || b.cols() != n || f.len() != n || b.rows() != dual_set.dim() {
                return Err(SystemError::Dimension("saddle-point parts"));
            }
            let m = b.rows();
            CoupledSystem::new(
                Coupling::Bilinear(b),
                Bifunction::OperatorLinear(a),
                Bifunction::zero(m),
                f,
                vec![0.0; m],
                ConvexSet::whole(n),
                dual_set,
            )
        }
        Special::S1 {
            a_op,
            n,
            b,
            f,
            dual_set,
        } => {
            if b.cols() != n || f.len() != n || b.rows() != dual_set.dim() {
                return Err(SystemError::Dimension("s1 parts"));
            }
            let m = b.rows();
            let a = Arc::new(a_op);
            let a_val = a.clone();
            let chi = Bifunction::Callable {
                dim: n,
                value: alloc::boxed::Box::new(move |u: &[f64], v: &[f64]| {
                    num::dot(&a_val(u), v)
                }),
                operator: Some(alloc::boxed::Box::new(move |u: &[f64]| a(u))),
            };
            CoupledSystem::new(
                Coupling::Bilinear(b),
                chi,
                Bifunction::zero(m),
                f,
                vec![0.0; m],
                ConvexSet::whole(n),
                dual_set,
            )
        }
        Special::S2Convex {
            a_op,
            n,
            j,
            b,
            f,
            dual_set,
            probe_seed,
        } => {
            if b.cols() != n || f.len() != n || b.rows() != dual_set.dim() {
                return Err(SystemError::Dimension("s2 parts"));
            }
            probe_convex(&j, n, probe_seed, "J")?;
            let m = b.rows();
            let a = Arc::new(a_op);
            let chi = Bifunction::Callable {
                dim: n,
                value: alloc::boxed::Box::new(move |u: &[f64], w: &[f64]| {
                    let shifted: Vec<f64> = u.iter().zip(w).map(|(&p, &d)| p + d).collect();
                    num::dot(&a(u), w) + j(&shifted) - j(u)
                }),
                operator: None,
            };
            CoupledSystem::new(
                Coupling::Bilinear(b),
                chi,
                Bifunction::zero(m),
                f,
                vec![0.0; m],
                ConvexSet::whole(n),
                dual_set,
            )
        }
        Special::S3 {
            j,
            phi,
            b,
            f,
            dual_set,
            probe_seed,
        } => {
            let n = b.cols();
            if f.len() != n || b.rows() != dual_set.dim() {
                return Err(SystemError::Dimension("s3 parts"));
            }
            probe_convex(&j, n, probe_seed, "J")?;
            probe_convex(&phi, n, probe_seed ^ 0x9e37_79b9, "phi")?;
            let m = b.rows();
            let total: ScalarFn = alloc::boxed::Box::new(move |v: &[f64]| j(v) + phi(v));
            CoupledSystem::new(
                Coupling::Bilinear(b),
                Bifunction::ConvexDifference { dim: n, j: total },
                Bifunction::zero(m),
                f,
                vec![0.0; m],
                ConvexSet::whole(n),
                dual_set,
            )
        }
        Special::S4Convex {
            a_op,
            f_op,
            j,
            h_weight,
            g_fn,
            coupling,
            f,
            g,
            primal_set,
            dual_set,
            probe_seed,
        } => {
            let n = primal_set.dim();
            let m = dual_set.dim();
            if f.len() != n || g.len() != m {
                return Err(SystemError::Dimension("s4 parts"));
            }
            probe_convex(&j, n, probe_seed, "J")?;
            probe_convex(&g_fn, m, probe_seed ^ 0x517c_c1b7, "G")?;
            let a = Arc::new(a_op);
            let jj = Arc::new(j);
            let hw = Arc::new(h_weight);
            let chi = Bifunction::Callable {
                dim: n,
                value: alloc::boxed::Box::new(move |u: &[f64], w: &[f64]| {
                    let shifted: Vec<f64> = u.iter().zip(w).map(|(&p, &d)| p + d).collect();
                    num::dot(&a(u), w) + hw(u) * (jj(&shifted) - jj(u))
                }),
                operator: None,
            };
            let fo = Arc::new(f_op);
            let gg = Arc::new(g_fn);
            let psi = Bifunction::Callable {
                dim: m,
                value: alloc::boxed::Box::new(move |l: &[f64], s: &[f64]| {
                    let shifted: Vec<f64> = l.iter().zip(s).map(|(&p, &d)| p + d).collect();
                    num::dot(&fo(l), s) + gg(&shifted) - gg(l)
                }),
                operator: None,
            };
            CoupledSystem::new(coupling, chi, psi, f, g, primal_set, dual_set)
        }
    }
}

// Midpoint probe; rejects functionals that visibly fail convexity.
fn probe_convex(
    j: &ScalarFn,
    dim: usize,
    seed: u64,
    name: &'static str,
) -> Result<(), SystemError> {
    let mut rng = Rng::from_seed(seed);
    for _ in 0..64 {
        let x = rng.normal_vec(dim, 2.0);
        let y = rng.normal_vec(dim, 2.0);
        let mid: Vec<f64> = x.iter().zip(&y).map(|(&a, &b)| 0.5 * (a + b)).collect();
        if j(&mid) > 0.5 * (j(&x) + j(&y)) + 1e-10 {
            return Err(SystemError::NonConvex(name));
        }
    }
    Ok(())
}

/// Quadratic saddle-point energy `E(v,μ) = ½ a(v,v) + b(v,μ) − (f,v)`.
pub fn energy_sp(a: &Matrix, b: &Matrix, f: &[f64], v: &[f64], mu: &[f64]) -> f64 {
    0.5 * a.bilinear(v, v) + num::dot(mu, &b.matvec(v)) - num::dot(f, v)
}

/// Sampled check of the saddle inequalities
/// `E(u,μ) ≤ E(u,λ) ≤ E(v,λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleReport {
    /// Worst positive value of `E(u,μ) − E(u,λ)` over sampled `μ ∈ Λ`.
    pub left_violation: f64,
    /// Worst positive value of `E(u,λ) − E(v,λ)` over sampled `v`.
    pub right_violation: f64,
    pub pass: bool,
    /// Some sampled `μ ≠ λ` attains equality on the left; the saddle value
    /// is degenerate there and the residual certificate stays authoritative.
    pub left_equality_attained: bool,
    pub samples: usize,
    pub seed: u64,
}

pub fn saddle_check(
    a: &Matrix,
    b: &Matrix,
    f: &[f64],
    candidate: (&[f64], &[f64]),
    dual_set: &ConvexSet,
    samples: usize,
    seed: u64,
) -> Result<SaddleReport, SystemError> {
    let (u, lambda) = candidate;
    if !dual_set.contains(lambda, FEASIBILITY_TOL) {
        return Err(SystemError::Infeasible("lambda"));
    }
    let e_at = energy_sp(a, b, f, u, lambda);
    let mut rng = Rng::from_seed(seed);
    let mut left = f64::NEG_INFINITY;
    let mut right = f64::NEG_INFINITY;
    let mut marginal = false;
    let mut mus = dual_set.extreme_points(1.0, 64)?;
    while mus.len() < samples {
        mus.push(dual_set.sample(&mut rng, 1.0)?);
    }
    for mu in &mus {
        let d = energy_sp(a, b, f, u, mu) - e_at;
        left = left.max(d);
        let differs = mu.iter().zip(lambda).any(|(&x, &y)| (x - y).abs() > 1e-12);
        if differs && d.abs() <= 1e-12 {
            marginal = true;
        }
    }
    for _ in 0..samples {
        let v: Vec<f64> = u.iter().map(|&x| x + rng.normal()).collect();
        right = right.max(e_at - energy_sp(a, b, f, &v, lambda));
    }
    Ok(SaddleReport {
        left_violation: left,
        right_violation: right,
        pass: left <= 1e-9 && right <= 1e-9,
        left_equality_attained: marginal,
        samples,
        seed,
    })
}

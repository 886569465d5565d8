//! Candidate-solution computation.
//!
//! Four routes, all funneling into the same residual certificate:
//!
//! * [`brute_force`] — exhaustive feasible-grid enumeration scored by the
//!   worst violation against the full grid; the desk-scale oracle.
//! * [`extragradient`] — projected extragradient on the product space for
//!   systems whose bifunctions expose operators and whose coupling exposes
//!   partial gradients.
//! * [`uzawa_sp`] — the classic alternating iteration for the bilinear
//!   saddle-point special case.
//! * [`ball_expansion`] — outer loop for unbounded constraint sets: solve on
//!   growing ball restrictions until a strictly interior solution appears,
//!   then re-certify it against test points from the unrestricted sets.
//!
//! No outcome reports `converged = true` without a fresh residual pass at
//! the returned point.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::convex::{ConvexSet, SetError};
use crate::linalg::{cholesky_solve, LinalgError, Matrix};
use crate::num;
use crate::probes::{default_rays, probe_coercivity, CoercivityMode, ProbeError, ProbeReport};
use crate::rng::Rng;
use crate::system::{
    build_special, saddle_check, CoupledSystem, ResidualReport, SaddleReport,
    Special, SystemError, TestSet,
};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("unsupported problem for this solver: {0}")]
    Unsupported(&'static str),
    #[error("resource budget exceeded: {0}")]
    Budget(&'static str),
    #[error("iteration diverged after {iterations} steps")]
    Divergence { iterations: usize, trace: Vec<f64> },
    #[error("no interior solution found on any ball; coercivity is suspect")]
    NonCoerciveSuspect {
        probe: Box<ProbeReport>,
        radius_history: Vec<f64>,
    },
    #[error("invalid input: {0}")]
    Input(&'static str),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
}

/// Result of a solver run, always carrying a residual certificate.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub report: ResidualReport,
    pub iterations: usize,
    /// Ball radii attempted, outermost loop only.
    pub radius_history: Vec<f64>,
    /// `max(‖u‖, ‖λ‖)` of the restricted solution per ball round.
    pub round_norms: Vec<f64>,
    pub converged: bool,
    /// Saddle check, attached by the Uzawa route.
    pub saddle: Option<SaddleReport>,
    /// Step norms per iteration for iterative solvers.
    pub step_norms: Vec<f64>,
    /// Dual iterates, recorded by the Uzawa route.
    pub dual_history: Vec<Vec<f64>>,
}

/// Options shared by the iterative solvers.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Stop when the step norm drops below this.
    pub step_tol: f64,
    /// A run counts as converged only if the certified residual is below this.
    pub cert_tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Random test points per side for the certificate.
    pub test_points: usize,
    /// Fixed step size; estimated from a finite-difference Lipschitz probe
    /// when absent.
    pub step_size: Option<f64>,
    /// Scale of the certificate test cloud; derived from the candidate when
    /// absent.
    pub test_scale: Option<f64>,
    pub start: Option<(Vec<f64>, Vec<f64>)>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            step_tol: 1e-10,
            cert_tol: 1e-8,
            max_iters: 200_000,
            seed: 7,
            test_points: 64,
            step_size: None,
            test_scale: None,
            start: None,
        }
    }
}

fn certify(
    sys: &CoupledSystem,
    k_set: &ConvexSet,
    l_set: &ConvexSet,
    point: (&[f64], &[f64]),
    seed: u64,
    count: usize,
    scale: Option<f64>,
) -> Result<ResidualReport, SolverError> {
    let tests = make_test_set_on(k_set, l_set, point, seed, count, scale)?;
    Ok(sys.residual(point.0, point.1, &tests)?)
}

// Same construction as `system::make_test_set` but against explicit sets,
// so ball restrictions can certify on the restricted geometry.
fn make_test_set_on(
    k_set: &ConvexSet,
    l_set: &ConvexSet,
    candidate: (&[f64], &[f64]),
    seed: u64,
    random_count: usize,
    scale: Option<f64>,
) -> Result<TestSet, SolverError> {
    let (u, lambda) = candidate;
    let s = scale.unwrap_or_else(|| {
        (2.0 * num::norm2(u)).max(2.0 * num::norm2(lambda)).max(1.0)
    });
    let mut rng = Rng::from_seed(seed);
    let mut primal = k_set.extreme_points(s, 64)?;
    for i in 0..u.len() {
        for delta in [1e-3 * s, 0.1 * s, s] {
            for sign in [-1.0, 1.0] {
                let mut p = u.to_vec();
                p[i] += sign * delta;
                primal.push(k_set.project(&p)?);
            }
        }
    }
    for _ in 0..random_count {
        primal.push(k_set.sample(&mut rng, s)?);
    }
    let mut dual = l_set.extreme_points(s, 64)?;
    for i in 0..lambda.len() {
        for delta in [1e-3 * s, 0.1 * s, s] {
            for sign in [-1.0, 1.0] {
                let mut p = lambda.to_vec();
                p[i] += sign * delta;
                dual.push(l_set.project(&p)?);
            }
        }
    }
    for _ in 0..random_count {
        dual.push(l_set.sample(&mut rng, s)?);
    }
    Ok(TestSet {
        primal,
        dual,
        seed: Some(seed),
    })
}

/// Exhaustive grid oracle for desk-scale bounded systems.
///
/// Every feasible grid pair `(u, λ)` is scored by its worst violation
/// against the full grid as test set; the minimizer wins, ties broken by
/// the lexicographically smallest grid index. Exhaustive and deterministic.
pub fn brute_force(
    sys: &CoupledSystem,
    resolution: usize,
    cert_tol: f64,
) -> Result<SolveOutcome, SolverError> {
    brute_force_on(sys, sys.primal_set(), sys.dual_set(), resolution, cert_tol)
}

fn brute_force_on(
    sys: &CoupledSystem,
    k_set: &ConvexSet,
    l_set: &ConvexSet,
    resolution: usize,
    cert_tol: f64,
) -> Result<SolveOutcome, SolverError> {
    let n = sys.primal_dim();
    let m = sys.dual_dim();
    if n + m > 4 {
        return Err(SolverError::Unsupported("brute force needs n + m <= 4"));
    }
    if !k_set.is_bounded() || !l_set.is_bounded() {
        return Err(SolverError::Unsupported("brute force needs bounded sets"));
    }
    let vs = feasible_grid(k_set, resolution)?;
    let mus = feasible_grid(l_set, resolution)?;
    if vs.is_empty() || mus.is_empty() {
        return Err(SolverError::Input("feasible grid is empty"));
    }
    let candidates = vs.len().checked_mul(mus.len());
    match candidates {
        Some(c) if c <= 20_000_000 => {}
        _ => return Err(SolverError::Budget("too many grid candidates")),
    }

    // Scan tests extremes-first: violations of monotone instances peak at
    // the grid ends, which makes the early-exit below effective.
    let scan_order = |len: usize| -> Vec<usize> {
        let mut order = Vec::with_capacity(len);
        if len > 0 {
            order.push(0);
        }
        if len > 1 {
            order.push(len - 1);
        }
        order.extend(1..len.saturating_sub(1));
        order
    };
    let v_order = scan_order(vs.len());
    let mu_order = scan_order(mus.len());

    let score_full = |u: &[f64], l: &[f64]| -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for v in &vs {
            worst = worst.max(sys.first_violation(u, l, v));
        }
        for mu in &mus {
            worst = worst.max(sys.second_violation(u, l, mu));
        }
        worst
    };
    // Pruned scoring: once the partial max exceeds the bound the candidate
    // cannot be a minimizer.
    let score_pruned = |u: &[f64], l: &[f64], bound: f64| -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for &iv in &v_order {
            worst = worst.max(sys.first_violation(u, l, &vs[iv]));
            if worst > bound {
                return worst;
            }
        }
        for &imu in &mu_order {
            worst = worst.max(sys.second_violation(u, l, &mus[imu]));
            if worst > bound {
                return worst;
            }
        }
        worst
    };

    // Coarse pass to seed the pruning bound.
    let stride_v = (vs.len() / 40).max(1);
    let stride_mu = (mus.len() / 40).max(1);
    let mut bound = f64::INFINITY;
    for iu in (0..vs.len()).step_by(stride_v) {
        for il in (0..mus.len()).step_by(stride_mu) {
            bound = bound.min(score_full(&vs[iu], &mus[il]));
        }
    }

    let mut best_score = f64::INFINITY;
    let mut best: Option<(usize, usize)> = None;
    let mut scanned = 0usize;
    for iu in 0..vs.len() {
        for il in 0..mus.len() {
            scanned += 1;
            let s = score_pruned(&vs[iu], &mus[il], bound);
            if s < best_score {
                best_score = s;
                best = Some((iu, il));
            }
        }
    }
    let (iu, il) = best.expect("nonempty candidate grid");
    let tests = TestSet::new(vs.clone(), mus.clone());
    let report = sys.residual(&vs[iu], &mus[il], &tests)?;
    Ok(SolveOutcome {
        primal: vs[iu].clone(),
        dual: mus[il].clone(),
        converged: report.max_violation() <= cert_tol,
        report,
        iterations: scanned,
        radius_history: Vec::new(),
        round_norms: Vec::new(),
        saddle: None,
        step_norms: Vec::new(),
        dual_history: Vec::new(),
    })
}

fn feasible_grid(set: &ConvexSet, resolution: usize) -> Result<Vec<Vec<f64>>, SolverError> {
    let axes = set.axis_grids(resolution)?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; axes.len()];
    loop {
        let point: Vec<f64> = idx.iter().enumerate().map(|(d, &i)| axes[d][i]).collect();
        if set.contains(&point, 1e-12) {
            out.push(point);
        }
        // Lexicographic advance with the last axis fastest.
        let mut d = axes.len();
        loop {
            if d == 0 {
                return Ok(out);
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// Projected extragradient on the product space.
///
/// The monotone map is `T(u,λ) = (A(u) + ∂_u B(u,λ) − f, F(λ) − ∂_λ B(u,λ) − g)`
/// with `A`, `F` the operators of `χ`, `ψ`. Iterates take a half step at the
/// operator value, then a full step at the half-step value, projecting onto
/// `K × Λ` each time. The final point is always re-certified.
pub fn extragradient(sys: &CoupledSystem, opts: &SolveOptions) -> Result<SolveOutcome, SolverError> {
    extragradient_on(sys, sys.primal_set(), sys.dual_set(), opts)
}

fn extragradient_on(
    sys: &CoupledSystem,
    k_set: &ConvexSet,
    l_set: &ConvexSet,
    opts: &SolveOptions,
) -> Result<SolveOutcome, SolverError> {
    if !sys.chi().has_operator() || !sys.psi().has_operator() {
        return Err(SolverError::Unsupported(
            "extragradient needs operator-capable bifunctions",
        ));
    }
    if !sys.coupling().has_gradients() {
        return Err(SolverError::Unsupported(
            "extragradient needs coupling partial gradients",
        ));
    }
    let n = sys.primal_dim();
    let m = sys.dual_dim();
    let apply_t = |u: &[f64], l: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let mut tu = sys.chi().operator(u).expect("operator checked");
        let bu = sys.coupling().grad_primal(u, l).expect("gradient checked");
        for i in 0..n {
            tu[i] += bu[i] - sys.f()[i];
        }
        let mut tl = sys.psi().operator(l).expect("operator checked");
        let bl = sys.coupling().grad_dual(u, l).expect("gradient checked");
        for j in 0..m {
            tl[j] -= bl[j] + sys.g()[j];
        }
        (tu, tl)
    };

    let (mut u, mut l) = match &opts.start {
        Some((u0, l0)) => (k_set.project(u0)?, l_set.project(l0)?),
        None => (k_set.project(&vec![0.0; n])?, l_set.project(&vec![0.0; m])?),
    };

    let rho = match opts.step_size {
        Some(r) => {
            if !(r > 0.0) {
                return Err(SolverError::Input("step size must be positive"));
            }
            r
        }
        None => {
            // Finite-difference Lipschitz estimate of T near the start.
            let mut rng = Rng::from_seed(opts.seed ^ 0xd1f3_5a7e);
            let scale = num::hypot(num::norm2(&u), num::norm2(&l)).max(1.0);
            let mut lip: f64 = 0.0;
            for _ in 0..16 {
                let u1 = k_set.sample(&mut rng, scale)?;
                let l1 = l_set.sample(&mut rng, scale)?;
                let u2 = k_set.sample(&mut rng, scale)?;
                let l2 = l_set.sample(&mut rng, scale)?;
                let (tu1, tl1) = apply_t(&u1, &l1);
                let (tu2, tl2) = apply_t(&u2, &l2);
                let mut dz = 0.0;
                let mut dt = 0.0;
                for i in 0..n {
                    dz += (u1[i] - u2[i]) * (u1[i] - u2[i]);
                    dt += (tu1[i] - tu2[i]) * (tu1[i] - tu2[i]);
                }
                for j in 0..m {
                    dz += (l1[j] - l2[j]) * (l1[j] - l2[j]);
                    dt += (tl1[j] - tl2[j]) * (tl1[j] - tl2[j]);
                }
                if dz > 1e-24 {
                    lip = lip.max(num::sqrt(dt / dz));
                }
            }
            if lip > 1e-12 {
                0.9 / lip
            } else {
                1.0
            }
        }
    };

    let mut step_norms = Vec::new();
    let mut iterations = 0usize;
    let mut growth_streak = 0usize;
    let mut prev_step = f64::INFINITY;
    let mut step_converged = false;
    while iterations < opts.max_iters {
        iterations += 1;
        let (tu, tl) = apply_t(&u, &l);
        let u_half = k_set.project(&axpy(&u, -rho, &tu))?;
        let l_half = l_set.project(&axpy(&l, -rho, &tl))?;
        let (tuh, tlh) = apply_t(&u_half, &l_half);
        let u_next = k_set.project(&axpy(&u, -rho, &tuh))?;
        let l_next = l_set.project(&axpy(&l, -rho, &tlh))?;
        let mut step2 = 0.0;
        for i in 0..n {
            step2 += (u_next[i] - u[i]) * (u_next[i] - u[i]);
        }
        for j in 0..m {
            step2 += (l_next[j] - l[j]) * (l_next[j] - l[j]);
        }
        let step = num::sqrt(step2);
        step_norms.push(step);
        u = u_next;
        l = l_next;
        if step > prev_step * (1.0 + 1e-12) {
            growth_streak += 1;
            if growth_streak >= 50 {
                let start = step_norms.len().saturating_sub(64);
                return Err(SolverError::Divergence {
                    iterations,
                    trace: step_norms[start..].to_vec(),
                });
            }
        } else {
            growth_streak = 0;
        }
        prev_step = step;
        if step <= opts.step_tol {
            step_converged = true;
            break;
        }
    }
    let report = certify(
        sys,
        k_set,
        l_set,
        (&u, &l),
        opts.seed,
        opts.test_points,
        opts.test_scale,
    )?;
    Ok(SolveOutcome {
        converged: step_converged && report.max_violation() <= opts.cert_tol,
        primal: u,
        dual: l,
        report,
        iterations,
        radius_history: Vec::new(),
        round_norms: Vec::new(),
        saddle: None,
        step_norms,
        dual_history: Vec::new(),
    })
}

fn axpy(x: &[f64], a: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(&xi, &yi)| xi + a * yi).collect()
}

/// Uzawa iteration for the bilinear saddle-point problem: alternate a direct
/// solve `u ← a⁻¹(f − bᵀλ)` with a projected multiplier ascent
/// `λ ← P_Λ(λ + ρ·b u)`. Guidance: `ρ ∈ (0, 2α²/‖a‖)` with `α` the inf-sup
/// constant; not enforced.
pub fn uzawa_sp(
    a: &Matrix,
    b: &Matrix,
    f: &[f64],
    dual_set: &ConvexSet,
    rho: f64,
    opts: &SolveOptions,
) -> Result<SolveOutcome, SolverError> {
    let n = a.rows();
    if a.cols() != n || b.cols() != n || f.len() != n || b.rows() != dual_set.dim() {
        return Err(SolverError::Input("dimension mismatch"));
    }
    if !a.is_symmetric(1e-9) {
        return Err(SolverError::Input("a must be symmetric positive definite"));
    }
    if !(rho > 0.0) {
        return Err(SolverError::Input("rho must be positive"));
    }
    let m = b.rows();
    let mut lambda = dual_set.project(&vec![0.0; m])?;
    let solve_u = |lambda: &[f64]| -> Result<Vec<f64>, SolverError> {
        let bt_l = b.matvec_t(lambda);
        let rhs: Vec<f64> = (0..n).map(|i| f[i] - bt_l[i]).collect();
        cholesky_solve(a, &rhs).map_err(|e| match e {
            LinalgError::NotPositiveDefinite => {
                SolverError::Input("a must be symmetric positive definite")
            }
            other => SolverError::Linalg(other),
        })
    };
    let mut u = solve_u(&lambda)?;
    let mut dual_history = vec![lambda.clone()];
    let mut step_norms = Vec::new();
    let mut iterations = 0usize;
    let mut step_converged = false;
    while iterations < opts.max_iters {
        iterations += 1;
        let bu = b.matvec(&u);
        let lambda_next = dual_set.project(&axpy(&lambda, rho, &bu))?;
        let u_next = solve_u(&lambda_next)?;
        let mut step2 = 0.0;
        for j in 0..m {
            step2 += (lambda_next[j] - lambda[j]) * (lambda_next[j] - lambda[j]);
        }
        for i in 0..n {
            step2 += (u_next[i] - u[i]) * (u_next[i] - u[i]);
        }
        let step = num::sqrt(step2);
        step_norms.push(step);
        lambda = lambda_next;
        u = u_next;
        dual_history.push(lambda.clone());
        if step <= opts.step_tol {
            step_converged = true;
            break;
        }
    }
    // Certify through the equivalent coupled system.
    let sys = build_special(Special::SaddlePoint {
        a: a.clone(),
        b: b.clone(),
        f: f.to_vec(),
        dual_set: dual_set.clone(),
    })?;
    let report = certify(
        &sys,
        sys.primal_set(),
        sys.dual_set(),
        (&u, &lambda),
        opts.seed,
        opts.test_points,
        opts.test_scale,
    )?;
    let saddle = saddle_check(a, b, f, (&u, &lambda), dual_set, 200, opts.seed)?;
    Ok(SolveOutcome {
        converged: step_converged && report.max_violation() <= opts.cert_tol,
        primal: u,
        dual: lambda,
        report,
        iterations,
        radius_history: Vec::new(),
        round_norms: Vec::new(),
        saddle: Some(saddle),
        step_norms,
        dual_history,
    })
}

/// Inner solver choice for [`ball_expansion`].
#[derive(Debug, Clone)]
pub enum InnerSolver {
    Extragradient(SolveOptions),
    BruteForce { resolution: usize },
}

/// Options for the ball-expansion outer loop.
#[derive(Debug, Clone)]
pub struct BallOptions {
    pub inner: InnerSolver,
    pub r0: f64,
    pub growth: f64,
    pub max_rounds: usize,
    /// Interiority cushion: a restricted solution counts as interior when
    /// `max(‖u‖, ‖λ‖) < R·(1 − margin)`.
    pub margin: f64,
    pub cert_tol: f64,
    pub seed: u64,
    pub test_points: usize,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions {
            inner: InnerSolver::Extragradient(SolveOptions::default()),
            r0: 1.0,
            growth: 2.0,
            max_rounds: 20,
            margin: 0.05,
            cert_tol: 1e-8,
            seed: 7,
            test_points: 64,
        }
    }
}

/// Solves a system with unbounded constraint sets by restriction to growing
/// balls. A restricted solution strictly inside its ball is re-certified
/// against test points drawn from the unrestricted sets (a ball ten times
/// larger feeds the random cloud), witnessing that it solves the full
/// system. Exhausting the rounds with boundary-touching solutions raises a
/// non-coercivity suspect error carrying a coercivity probe report.
pub fn ball_expansion(sys: &CoupledSystem, opts: &BallOptions) -> Result<SolveOutcome, SolverError> {
    let n = sys.primal_dim();
    let m = sys.dual_dim();
    if !(opts.r0 > 0.0) || !(opts.growth > 1.0) || !(0.0..1.0).contains(&opts.margin) {
        return Err(SolverError::Input("need r0 > 0, growth > 1, margin in [0,1)"));
    }
    if !sys.primal_set().contains(&vec![0.0; n], crate::FEASIBILITY_TOL)
        || !sys.dual_set().contains(&vec![0.0; m], crate::FEASIBILITY_TOL)
    {
        return Err(SolverError::Input("ball expansion assumes 0 in K and 0 in Lambda"));
    }
    let mut radius = opts.r0;
    let mut radius_history = Vec::new();
    let mut round_norms = Vec::new();
    let mut iterations = 0usize;
    for _round in 0..opts.max_rounds {
        radius_history.push(radius);
        let k_r = sys.primal_set().restrict_to_ball(radius);
        let l_r = sys.dual_set().restrict_to_ball(radius);
        let inner = match &opts.inner {
            InnerSolver::Extragradient(sopts) => extragradient_on(sys, &k_r, &l_r, sopts)?,
            InnerSolver::BruteForce { resolution } => {
                brute_force_on(sys, &k_r, &l_r, *resolution, opts.cert_tol)?
            }
        };
        iterations += inner.iterations;
        let norm = num::norm2(&inner.primal).max(num::norm2(&inner.dual));
        round_norms.push(norm);
        if norm < radius * (1.0 - opts.margin) {
            // Interior: certify against the unrestricted sets, sampling from
            // a ball ten times larger than the successful radius.
            let report = certify(
                sys,
                sys.primal_set(),
                sys.dual_set(),
                (&inner.primal, &inner.dual),
                opts.seed,
                opts.test_points,
                Some(10.0 * radius),
            )?;
            if report.max_violation() <= opts.cert_tol {
                return Ok(SolveOutcome {
                    primal: inner.primal,
                    dual: inner.dual,
                    report,
                    iterations,
                    radius_history,
                    round_norms,
                    converged: true,
                    saddle: None,
                    step_norms: inner.step_norms,
                    dual_history: Vec::new(),
                });
            }
        }
        radius *= opts.growth;
    }
    let radii: Vec<f64> = (1..=6).map(|k| num::pow(10.0, k as f64)).collect();
    let probe = probe_coercivity(
        sys,
        CoercivityMode::C1 { threshold: 1e3 },
        &default_rays(n, m, opts.seed, 3),
        &radii,
    )?;
    Err(SolverError::NonCoerciveSuspect {
        probe: Box::new(probe),
        radius_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifunction::{Bifunction, Coupling};
    use crate::linalg::Matrix;

    /// B = uλ, χ = uv, ψ = 0, f = 0.5, g = 0, K = Λ = [−1, 1].
    fn toy() -> CoupledSystem {
        CoupledSystem::new(
            Coupling::Bilinear(Matrix::scalar(1.0)),
            Bifunction::Bilinear(Matrix::scalar(1.0)),
            Bifunction::zero(1),
            vec![0.5],
            vec![0.0],
            ConvexSet::interval(-1.0, 1.0).unwrap(),
            ConvexSet::interval(-1.0, 1.0).unwrap(),
        )
        .unwrap()
    }

    /// B = uλ, χ = uv, ψ = λμ, f = 0.5, g = 0 on the whole plane; the
    /// stationarity system u + λ = f, λ = u has the solution (0.25, 0.25).
    fn coercive_unbounded() -> CoupledSystem {
        CoupledSystem::new(
            Coupling::Bilinear(Matrix::scalar(1.0)),
            Bifunction::Bilinear(Matrix::scalar(1.0)),
            Bifunction::Bilinear(Matrix::scalar(1.0)),
            vec![0.5],
            vec![0.0],
            ConvexSet::whole(1),
            ConvexSet::whole(1),
        )
        .unwrap()
    }

    #[test]
    fn brute_force_toy_recovers_hand_solution() {
        let sys = toy();
        let out = brute_force(&sys, 201, 1e-8).unwrap();
        assert!((out.primal[0] - 0.0).abs() < 1e-12, "{:?}", out.primal);
        assert!((out.dual[0] - 0.5).abs() < 1e-12, "{:?}", out.dual);
        assert!(out.converged);
    }

    #[test]
    fn brute_force_degenerate_dual_returns_zero_primal() {
        // f = g = 0, B = 0, χ = uv, ψ = 0: the first inequality forces
        // u(v−u) ≥ 0 for all v, so u = 0 and λ is unconstrained.
        let sys = CoupledSystem::new(
            Coupling::zero(1, 1),
            Bifunction::Bilinear(Matrix::scalar(1.0)),
            Bifunction::zero(1),
            vec![0.0],
            vec![0.0],
            ConvexSet::interval(-1.0, 1.0).unwrap(),
            ConvexSet::interval(-1.0, 1.0).unwrap(),
        )
        .unwrap();
        let out = brute_force(&sys, 101, 1e-8).unwrap();
        assert!(out.primal[0].abs() < 1e-12);
        assert!(out.report.max_violation() <= 1e-10);
    }

    #[test]
    fn brute_force_rejects_unbounded_and_oversized() {
        let sys = coercive_unbounded();
        assert!(matches!(
            brute_force(&sys, 100, 1e-8),
            Err(SolverError::Unsupported(_))
        ));
    }

    #[test]
    fn extragradient_toy_matches_brute_force() {
        let sys = toy();
        let mut opts = SolveOptions {
            step_size: Some(0.3),
            ..SolveOptions::default()
        };
        opts.cert_tol = 1e-6;
        let out = extragradient(&sys, &opts).unwrap();
        assert!((out.primal[0] - 0.0).abs() < 1e-6, "{:?}", out.primal);
        assert!((out.dual[0] - 0.5).abs() < 1e-6, "{:?}", out.dual);
        assert!(out.converged, "residual {:?}", out.report.max_violation());
        let brute = brute_force(&sys, 201, 1e-8).unwrap();
        assert!(
            (out.report.max_violation() - brute.report.max_violation()).abs() <= 2.0 / 200.0
        );
    }

    #[test]
    fn extragradient_fixed_point_stays_put() {
        // A = identity, F = identity, B = 0, f = g = 0: the origin is the
        // solution and the first step is already below tolerance.
        let sys = CoupledSystem::new(
            Coupling::zero(1, 1),
            Bifunction::OperatorLinear(Matrix::identity(1)),
            Bifunction::OperatorLinear(Matrix::identity(1)),
            vec![0.0],
            vec![0.0],
            ConvexSet::interval(-1.0, 1.0).unwrap(),
            ConvexSet::interval(-1.0, 1.0).unwrap(),
        )
        .unwrap();
        let out = extragradient(&sys, &SolveOptions::default()).unwrap();
        assert_eq!(out.primal, vec![0.0]);
        assert_eq!(out.dual, vec![0.0]);
        assert_eq!(out.iterations, 1);
        assert_eq!(out.step_norms[0], 0.0);
    }

    #[test]
    fn uzawa_scalar_saddle_point() {
        let out = uzawa_sp(
            &Matrix::scalar(1.0),
            &Matrix::scalar(1.0),
            &[1.0],
            &ConvexSet::interval(0.0, 1.0).unwrap(),
            1.0,
            &SolveOptions::default(),
        )
        .unwrap();
        assert!((out.primal[0] - 0.0).abs() < 1e-8, "{:?}", out.primal);
        assert!((out.dual[0] - 1.0).abs() < 1e-8, "{:?}", out.dual);
        assert!(out.converged);
        assert!(out.saddle.as_ref().unwrap().pass);
    }

    #[test]
    fn uzawa_two_dimensional_example() {
        let out = uzawa_sp(
            &Matrix::identity(2),
            &Matrix::identity(2),
            &[1.0, 0.0],
            &ConvexSet::box_set(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            0.8,
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(out.primal[0].abs() < 1e-7 && out.primal[1].abs() < 1e-7);
        assert!((out.dual[0] - 1.0).abs() < 1e-7 && out.dual[1].abs() < 1e-7);
        // Fejér monotonicity of the multiplier iterates toward the limit.
        let last = out.dual_history.last().unwrap().clone();
        let mut prev = f64::INFINITY;
        for (k, l) in out.dual_history.iter().enumerate() {
            let d = num::sqrt(
                l.iter()
                    .zip(&last)
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum::<f64>(),
            );
            if k >= 1 {
                assert!(d <= prev + 1e-12, "distance grew at iterate {k}");
            }
            prev = d;
        }
    }

    #[test]
    fn uzawa_zero_load_fixed_point() {
        let out = uzawa_sp(
            &Matrix::scalar(1.0),
            &Matrix::scalar(1.0),
            &[0.0],
            &ConvexSet::interval(0.0, 1.0).unwrap(),
            1.0,
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(out.primal, vec![0.0]);
        assert_eq!(out.dual, vec![0.0]);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn uzawa_rejects_asymmetric_matrix() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            uzawa_sp(
                &a,
                &Matrix::identity(2),
                &[1.0, 0.0],
                &ConvexSet::box_set(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
                1.0,
                &SolveOptions::default(),
            ),
            Err(SolverError::Input(_))
        ));
    }

    #[test]
    fn ball_expansion_coercive_example() {
        let sys = coercive_unbounded();
        let opts = BallOptions {
            r0: 0.1,
            growth: 2.0,
            max_rounds: 12,
            cert_tol: 1e-6,
            ..BallOptions::default()
        };
        let out = ball_expansion(&sys, &opts).unwrap();
        assert!((out.primal[0] - 0.25).abs() < 1e-6, "{:?}", out.primal);
        assert!((out.dual[0] - 0.25).abs() < 1e-6, "{:?}", out.dual);
        assert!(out.converged);
        assert!(out.radius_history.len() > 1);
        assert!(out
            .radius_history
            .windows(2)
            .all(|w| w[1] > w[0]));
    }

    #[test]
    fn ball_expansion_already_interior() {
        let sys = coercive_unbounded();
        let opts = BallOptions {
            r0: 10.0,
            cert_tol: 1e-6,
            ..BallOptions::default()
        };
        let out = ball_expansion(&sys, &opts).unwrap();
        assert_eq!(out.radius_history.len(), 1);
        assert!((out.primal[0] - 0.25).abs() < 1e-6);
    }

    #[test]
    fn ball_expansion_non_coercive_suspect() {
        // χ = ψ = 0, B = uλ, f = 1: on every ball with R < 1 the restricted
        // solution pins to the boundary, so four rounds from 0.1 exhaust.
        let sys = CoupledSystem::new(
            Coupling::Bilinear(Matrix::scalar(1.0)),
            Bifunction::zero(1),
            Bifunction::zero(1),
            vec![1.0],
            vec![0.0],
            ConvexSet::whole(1),
            ConvexSet::whole(1),
        )
        .unwrap();
        let opts = BallOptions {
            r0: 0.1,
            growth: 2.0,
            max_rounds: 4,
            ..BallOptions::default()
        };
        match ball_expansion(&sys, &opts) {
            Err(SolverError::NonCoerciveSuspect {
                probe,
                radius_history,
            }) => {
                assert_eq!(radius_history.len(), 4);
                assert_eq!(probe.verdict, crate::probes::Verdict::Counterexample);
            }
            other => panic!("expected non-coercive suspect, got {other:?}"),
        }
    }
}

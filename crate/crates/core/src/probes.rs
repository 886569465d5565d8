//! Seed-deterministic hypothesis probes.
//!
//! Each probe gathers evidence for, or finds a counterexample to, one of
//! the structural hypotheses a coupled system may claim: vanishing at the
//! zero direction, midpoint convexity/concavity, the monotone pair
//! inequality, positive homogeneity, ray continuity, and the two coercivity
//! conditions for unbounded constraint sets.
//!
//! Probes are one-sided: a pass means "no counterexample among N samples",
//! never a proof, and N is recorded in the report. Counterexample witnesses
//! re-evaluate to a violation beyond 1e-10 when replayed. Semicontinuity
//! hypotheses are probed as sequential-limit checks and report inconclusive
//! unless a discrete violation appears.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bifunction::Bifunction;
use crate::convex::{ConvexSet, SetError};
use crate::linalg::{min_row_space_gain, LinalgError, Matrix};
use crate::num;
use crate::rng::Rng;
use crate::system::{csv_row, CoupledSystem};

/// Violation threshold: a witness must beat this margin to count.
pub const WITNESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProbeError {
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Counterexample,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Counterexample => "counterexample",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// The violating tuple of a failed probe.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub points: Vec<Vec<f64>>,
    pub scalars: Vec<f64>,
    pub violation: f64,
}

/// Evidence record for one hypothesis on one system.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub hypothesis: String,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub samples: usize,
    pub seed: u64,
    pub stats: Vec<(String, f64)>,
}

impl ProbeReport {
    fn pass(hypothesis: &str, samples: usize, seed: u64) -> Self {
        ProbeReport {
            hypothesis: String::from(hypothesis),
            verdict: Verdict::Pass,
            witness: None,
            samples,
            seed,
            stats: Vec::new(),
        }
    }

    /// Key-value rendering with 17-significant-digit floats; byte-identical
    /// across replays of the same seed.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("hypothesis = {}\n", self.hypothesis));
        out.push_str(&format!("verdict = {}\n", self.verdict.as_str()));
        out.push_str(&format!("samples = {}\n", self.samples));
        out.push_str(&format!("seed = {}\n", self.seed));
        match &self.witness {
            Some(w) => {
                out.push_str(&format!("violation = {:.16e}\n", w.violation));
                for (i, p) in w.points.iter().enumerate() {
                    out.push_str(&format!("witness{} = {}\n", i + 1, csv_row(p)));
                }
                if !w.scalars.is_empty() {
                    out.push_str(&format!("witness_scalars = {}\n", csv_row(&w.scalars)));
                }
            }
            None => out.push_str("violation = none\n"),
        }
        for (k, v) in &self.stats {
            out.push_str(&format!("{k} = {v:.16e}\n"));
        }
        out
    }
}

/// Sub-checks for the bifunction hypothesis blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BifunctionProbe {
    /// `χ(u, 0) = 0` for all `u`.
    ZeroAtOrigin,
    /// Midpoint convexity of the direction argument.
    ConvexInDirection,
    /// `χ(u, u−v) + χ(v, v−u) ≥ 0`.
    MonotonePair,
    /// `χ(u, t·v) = t·χ(u, v)` for `t > 0`.
    PositiveHomogeneous,
    /// `t ↦ χ(u + t(v−u), w)` continuous at `0⁺`.
    RayContinuity,
}

impl BifunctionProbe {
    fn id(&self, side: &str) -> String {
        let suffix = match self {
            BifunctionProbe::ZeroAtOrigin => "1_iii",
            BifunctionProbe::ConvexInDirection => "1_ii",
            BifunctionProbe::MonotonePair => "2_i",
            BifunctionProbe::RayContinuity => "2_ii",
            BifunctionProbe::PositiveHomogeneous => "2_iii",
        };
        format!("H_{side}{suffix}")
    }
}

/// Probes the primal bifunction `χ` with samples drawn from `K`.
pub fn probe_chi(
    sys: &CoupledSystem,
    which: BifunctionProbe,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport, ProbeError> {
    probe_bifunction(sys.chi(), sys.primal_set(), "chi", which, samples, seed)
}

/// Probes the dual bifunction `ψ` with samples drawn from `Λ`.
pub fn probe_psi(
    sys: &CoupledSystem,
    which: BifunctionProbe,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport, ProbeError> {
    probe_bifunction(sys.psi(), sys.dual_set(), "psi", which, samples, seed)
}

// Boundary-biased sample pool: set extremes first, then random feasible
// points. Failures concentrate at boundaries, so extremes lead.
fn sample_pool(
    set: &ConvexSet,
    rng: &mut Rng,
    scale: f64,
    target: usize,
) -> Result<Vec<Vec<f64>>, SetError> {
    let mut pool = set.extreme_points(scale, 16)?;
    while pool.len() < target {
        pool.push(set.sample(rng, scale)?);
    }
    Ok(pool)
}

fn isqrt_ceil(n: usize) -> usize {
    let mut k = 1usize;
    while k * k < n {
        k += 1;
    }
    k
}

fn probe_bifunction(
    bf: &Bifunction,
    set: &ConvexSet,
    side: &str,
    which: BifunctionProbe,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport, ProbeError> {
    if samples == 0 {
        return Err(ProbeError::InvalidInput("samples must be at least 1"));
    }
    let id = which.id(side);
    let mut rng = Rng::from_seed(seed);
    let scale = 3.0;
    let mut checked = 0usize;
    let mut inconclusive = false;

    macro_rules! finish {
        () => {{
            let mut rep = ProbeReport::pass(&id, checked, seed);
            if inconclusive {
                rep.verdict = Verdict::Inconclusive;
            }
            return Ok(rep);
        }};
    }
    macro_rules! counterexample {
        ($points:expr, $scalars:expr, $violation:expr) => {{
            return Ok(ProbeReport {
                hypothesis: id,
                verdict: Verdict::Counterexample,
                witness: Some(Witness {
                    points: $points,
                    scalars: $scalars,
                    violation: $violation,
                }),
                samples: checked + 1,
                seed,
                stats: Vec::new(),
            });
        }};
    }

    match which {
        BifunctionProbe::ZeroAtOrigin => {
            let pool = sample_pool(set, &mut rng, scale, samples)?;
            let zero = vec![0.0; bf.dim()];
            for u in pool.iter().take(samples) {
                let val = bf.eval(u, &zero);
                if !val.is_finite() {
                    inconclusive = true;
                    checked += 1;
                    continue;
                }
                if val.abs() > 1e-12 {
                    counterexample!(vec![u.clone()], vec![], val.abs());
                }
                checked += 1;
            }
            finish!()
        }
        BifunctionProbe::ConvexInDirection => {
            let n = isqrt_ceil(samples).max(3);
            let pool = sample_pool(set, &mut rng, scale, n)?;
            'outer: for u in &pool {
                for v1 in &pool {
                    for v2 in &pool {
                        if checked >= samples {
                            break 'outer;
                        }
                        let mid: Vec<f64> =
                            v1.iter().zip(v2).map(|(&a, &b)| 0.5 * (a + b)).collect();
                        let lhs = bf.eval(u, &mid);
                        let rhs = 0.5 * (bf.eval(u, v1) + bf.eval(u, v2));
                        if !(lhs.is_finite() && rhs.is_finite()) {
                            inconclusive = true;
                            checked += 1;
                            continue;
                        }
                        let violation = lhs - rhs;
                        if violation > WITNESS_TOL {
                            counterexample!(
                                vec![u.clone(), v1.clone(), v2.clone()],
                                vec![],
                                violation
                            );
                        }
                        checked += 1;
                    }
                }
            }
            finish!()
        }
        BifunctionProbe::MonotonePair => {
            let n = isqrt_ceil(samples).max(3);
            let pool = sample_pool(set, &mut rng, scale, n)?;
            'outer: for u in &pool {
                for v in &pool {
                    if checked >= samples {
                        break 'outer;
                    }
                    let duv: Vec<f64> = u.iter().zip(v).map(|(&a, &b)| a - b).collect();
                    let dvu: Vec<f64> = duv.iter().map(|&d| -d).collect();
                    let val = bf.eval(u, &duv) + bf.eval(v, &dvu);
                    if !val.is_finite() {
                        inconclusive = true;
                        checked += 1;
                        continue;
                    }
                    if val < -WITNESS_TOL {
                        counterexample!(vec![u.clone(), v.clone()], vec![], -val);
                    }
                    checked += 1;
                }
            }
            finish!()
        }
        BifunctionProbe::PositiveHomogeneous => {
            let n = isqrt_ceil(samples).max(3);
            let pool = sample_pool(set, &mut rng, scale, n)?;
            let mut ts = vec![0.5, 2.0];
            'outer: for u in &pool {
                for v in &pool {
                    if checked >= samples {
                        break 'outer;
                    }
                    let t = if checked < ts.len() {
                        ts[checked]
                    } else {
                        let t = rng.uniform(1e-3, 4.0);
                        ts.push(t);
                        t
                    };
                    let tv: Vec<f64> = v.iter().map(|&x| t * x).collect();
                    let lhs = bf.eval(u, &tv);
                    let rhs = t * bf.eval(u, v);
                    if !(lhs.is_finite() && rhs.is_finite()) {
                        inconclusive = true;
                        checked += 1;
                        continue;
                    }
                    let violation = (lhs - rhs).abs();
                    if violation > WITNESS_TOL * rhs.abs().max(1.0) {
                        counterexample!(vec![u.clone(), v.clone()], vec![t], violation);
                    }
                    checked += 1;
                }
            }
            finish!()
        }
        BifunctionProbe::RayContinuity => {
            let n = isqrt_ceil(samples).max(3);
            let pool = sample_pool(set, &mut rng, scale, n)?;
            'outer: for u in &pool {
                for v in &pool {
                    for w in pool.iter().take(2) {
                        if checked >= samples {
                            break 'outer;
                        }
                        let base = bf.eval(u, w);
                        if !base.is_finite() {
                            inconclusive = true;
                            checked += 1;
                            continue;
                        }
                        let tol = 1e-8 * base.abs().max(1.0);
                        let mut diffs = Vec::with_capacity(45);
                        for k in 0..45 {
                            let t = num::pow(2.0, -(k as f64));
                            let pt: Vec<f64> = u
                                .iter()
                                .zip(v)
                                .map(|(&a, &b)| a + t * (b - a))
                                .collect();
                            let val = bf.eval(&pt, w);
                            if !val.is_finite() {
                                inconclusive = true;
                                break;
                            }
                            diffs.push((val - base).abs());
                        }
                        if diffs.len() == 45 {
                            let last = diffs[44];
                            if last > tol {
                                // Stagnation at a positive gap along the ray
                                // is a discrete jump, not slow convergence.
                                let stagnant = diffs[40..].windows(2).all(|p| p[1] >= p[0] * 0.99);
                                if stagnant {
                                    counterexample!(
                                        vec![u.clone(), v.clone(), w.clone()],
                                        vec![num::pow(2.0, -44.0)],
                                        last
                                    );
                                } else {
                                    inconclusive = true;
                                }
                            }
                        }
                        checked += 1;
                    }
                }
            }
            finish!()
        }
    }
}

/// Sub-checks for the coupling hypothesis blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingProbe {
    /// `u ↦ B(u, λ)` convex for each `λ`.
    ConvexInPrimal,
    /// `λ ↦ B(u, λ)` concave for each `u`.
    ConcaveInDual,
    /// `[u,λ] ↦ 2B(u,μ) − B(u,λ)` lower semicontinuous along sequences;
    /// inconclusive by nature unless a discrete violation appears.
    CombinedLscSequential,
    /// `[u,λ] ↦ 2B(v,λ) − B(u,λ)` concave in the combined argument.
    CombinedConcave,
}

impl CouplingProbe {
    fn id(&self) -> &'static str {
        match self {
            CouplingProbe::ConvexInPrimal => "H_B1_i",
            CouplingProbe::ConcaveInDual => "H_B1_ii",
            CouplingProbe::CombinedLscSequential => "H_B2_i",
            CouplingProbe::CombinedConcave => "H_B2_ii",
        }
    }
}

/// Probes the coupling functional `B`.
pub fn probe_coupling(
    sys: &CoupledSystem,
    which: CouplingProbe,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport, ProbeError> {
    if samples == 0 {
        return Err(ProbeError::InvalidInput("samples must be at least 1"));
    }
    let id = String::from(which.id());
    let mut rng = Rng::from_seed(seed);
    let scale = 3.0;
    let b = sys.coupling();
    let n = isqrt_ceil(samples).max(3);
    let dual_pool = sample_pool(sys.dual_set(), &mut rng, scale, n)?;
    let primal_pool = sample_pool(sys.primal_set(), &mut rng, scale, n)?;
    let mut checked = 0usize;
    let mut inconclusive = false;

    let counterexample = |points: Vec<Vec<f64>>, violation: f64, checked: usize| ProbeReport {
        hypothesis: id.clone(),
        verdict: Verdict::Counterexample,
        witness: Some(Witness {
            points,
            scalars: vec![],
            violation,
        }),
        samples: checked + 1,
        seed,
        stats: Vec::new(),
    };

    match which {
        CouplingProbe::ConvexInPrimal => {
            'outer: for lambda in &dual_pool {
                for u1 in &primal_pool {
                    for u2 in &primal_pool {
                        if checked >= samples {
                            break 'outer;
                        }
                        let mid: Vec<f64> =
                            u1.iter().zip(u2).map(|(&a, &b)| 0.5 * (a + b)).collect();
                        let lhs = b.eval(&mid, lambda);
                        let rhs = 0.5 * (b.eval(u1, lambda) + b.eval(u2, lambda));
                        if !(lhs.is_finite() && rhs.is_finite()) {
                            inconclusive = true;
                            checked += 1;
                            continue;
                        }
                        let violation = lhs - rhs;
                        if violation > WITNESS_TOL {
                            return Ok(counterexample(
                                vec![lambda.clone(), u1.clone(), u2.clone()],
                                violation,
                                checked,
                            ));
                        }
                        checked += 1;
                    }
                }
            }
        }
        CouplingProbe::ConcaveInDual => {
            'outer: for u in &primal_pool {
                for l1 in &dual_pool {
                    for l2 in &dual_pool {
                        if checked >= samples {
                            break 'outer;
                        }
                        let mid: Vec<f64> =
                            l1.iter().zip(l2).map(|(&a, &b)| 0.5 * (a + b)).collect();
                        let lhs = b.eval(u, &mid);
                        let rhs = 0.5 * (b.eval(u, l1) + b.eval(u, l2));
                        if !(lhs.is_finite() && rhs.is_finite()) {
                            inconclusive = true;
                            checked += 1;
                            continue;
                        }
                        let violation = rhs - lhs;
                        if violation > WITNESS_TOL {
                            return Ok(counterexample(
                                vec![u.clone(), l1.clone(), l2.clone()],
                                violation,
                                checked,
                            ));
                        }
                        checked += 1;
                    }
                }
            }
        }
        CouplingProbe::CombinedLscSequential => {
            // Evaluate F(u,λ) = 2B(u,μ) − B(u,λ) along convergent sequences
            // z_k → z and look for a limit strictly below F(z).
            inconclusive = true;
            'outer: for mu in &dual_pool {
                for (u, lambda) in primal_pool.iter().zip(&dual_pool) {
                    for (ut, lt) in primal_pool.iter().zip(&dual_pool).take(2) {
                        if checked >= samples {
                            break 'outer;
                        }
                        let f_at = 2.0 * b.eval(u, mu) - b.eval(u, lambda);
                        let mut limit = f64::INFINITY;
                        let mut finite = true;
                        for k in 1..=40 {
                            let t = num::pow(2.0, -(k as f64));
                            let uk: Vec<f64> =
                                u.iter().zip(ut).map(|(&a, &b)| a + t * (b - a)).collect();
                            let lk: Vec<f64> = lambda
                                .iter()
                                .zip(lt)
                                .map(|(&a, &b)| a + t * (b - a))
                                .collect();
                            let fk = 2.0 * b.eval(&uk, mu) - b.eval(&uk, &lk);
                            if !fk.is_finite() {
                                finite = false;
                                break;
                            }
                            if k >= 35 {
                                limit = limit.min(fk);
                            }
                        }
                        if finite && limit < f_at - 1e-8 {
                            return Ok(counterexample(
                                vec![u.clone(), lambda.clone(), mu.clone()],
                                f_at - limit,
                                checked,
                            ));
                        }
                        checked += 1;
                    }
                }
            }
        }
        CouplingProbe::CombinedConcave => {
            'outer: for v in &primal_pool {
                for (u1, l1) in primal_pool.iter().zip(&dual_pool) {
                    for (u2, l2) in primal_pool.iter().zip(&dual_pool) {
                        if checked >= samples {
                            break 'outer;
                        }
                        let f = |u: &[f64], l: &[f64]| 2.0 * b.eval(v, l) - b.eval(u, l);
                        let um: Vec<f64> =
                            u1.iter().zip(u2).map(|(&a, &b)| 0.5 * (a + b)).collect();
                        let lm: Vec<f64> =
                            l1.iter().zip(l2).map(|(&a, &b)| 0.5 * (a + b)).collect();
                        let lhs = f(&um, &lm);
                        let rhs = 0.5 * (f(u1, l1) + f(u2, l2));
                        if !(lhs.is_finite() && rhs.is_finite()) {
                            inconclusive = true;
                            checked += 1;
                            continue;
                        }
                        let violation = rhs - lhs;
                        if violation > WITNESS_TOL {
                            return Ok(counterexample(
                                vec![v.clone(), u1.clone(), l1.clone(), u2.clone(), l2.clone()],
                                violation,
                                checked,
                            ));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    let mut rep = ProbeReport::pass(&id, checked, seed);
    if inconclusive {
        rep.verdict = Verdict::Inconclusive;
    }
    Ok(rep)
}

/// Coercivity condition selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoercivityMode {
    /// `(χ(u,−u) + ψ(λ,−λ)) / √(‖u‖² + ‖λ‖²) → −∞`; operationalized as
    /// "below −threshold at the final radius and decreasing along every ray".
    C1 { threshold: f64 },
    /// Power-bounded bifunctions plus a coupling ratio trending to `−∞`.
    C2 { p: f64, q: f64, threshold: f64 },
}

/// Default ray bundle: pure-primal and pure-dual axis rays plus seeded mixed
/// directions.
pub fn default_rays(n: usize, m: usize, seed: u64, mixed: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rays = Vec::new();
    for i in 0..n {
        let mut du = vec![0.0; n];
        du[i] = 1.0;
        rays.push((du, vec![0.0; m]));
    }
    for j in 0..m {
        let mut dl = vec![0.0; m];
        dl[j] = 1.0;
        rays.push((vec![0.0; n], dl));
    }
    let mut rng = Rng::from_seed(seed);
    for _ in 0..mixed {
        let du = rng.normal_vec(n, 1.0);
        let dl = rng.normal_vec(m, 1.0);
        let norm = num::sqrt(
            du.iter().map(|x| x * x).sum::<f64>() + dl.iter().map(|x| x * x).sum::<f64>(),
        );
        if norm > 1e-12 {
            rays.push((
                du.iter().map(|x| x / norm).collect(),
                dl.iter().map(|x| x / norm).collect(),
            ));
        }
    }
    rays
}

/// Evaluates the coercivity ratios along rays at increasing radii.
pub fn probe_coercivity(
    sys: &CoupledSystem,
    mode: CoercivityMode,
    rays: &[(Vec<f64>, Vec<f64>)],
    radii: &[f64],
) -> Result<ProbeReport, ProbeError> {
    if radii.len() < 3 {
        return Err(ProbeError::InvalidInput("need at least 3 radii"));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ProbeError::InvalidInput("radii must be strictly increasing"));
    }
    if rays.is_empty() {
        return Err(ProbeError::InvalidInput("need at least one ray"));
    }
    let (id, threshold) = match mode {
        CoercivityMode::C1 { threshold } => ("C1", threshold),
        CoercivityMode::C2 { threshold, .. } => ("C2", threshold),
    };
    let mut stats: Vec<(String, f64)> = Vec::new();
    let mut m_chi = f64::NEG_INFINITY;
    let mut m_psi = f64::NEG_INFINITY;
    let mut nonmonotone = false;
    let mut worst: Option<(usize, f64, Vec<f64>, Vec<f64>)> = None;
    for (ray_idx, (du, dl)) in rays.iter().enumerate() {
        let mut ratios = Vec::with_capacity(radii.len());
        let mut final_point: Option<(Vec<f64>, Vec<f64>)> = None;
        for &r in radii {
            let u_raw: Vec<f64> = du.iter().map(|x| r * x).collect();
            let l_raw: Vec<f64> = dl.iter().map(|x| r * x).collect();
            let u = sys.primal_set().project(&u_raw)?;
            let l = sys.dual_set().project(&l_raw)?;
            let nu = num::norm2(&u);
            let nl = num::norm2(&l);
            let denom = num::sqrt(nu * nu + nl * nl);
            let ratio = match mode {
                CoercivityMode::C1 { .. } => {
                    let neg_u: Vec<f64> = u.iter().map(|x| -x).collect();
                    let neg_l: Vec<f64> = l.iter().map(|x| -x).collect();
                    let val = sys.chi().eval(&u, &neg_u) + sys.psi().eval(&l, &neg_l);
                    if denom > 1e-12 {
                        val / denom
                    } else {
                        0.0
                    }
                }
                CoercivityMode::C2 { p, q, .. } => {
                    let neg_u: Vec<f64> = u.iter().map(|x| -x).collect();
                    let neg_l: Vec<f64> = l.iter().map(|x| -x).collect();
                    if nu > 1e-12 {
                        m_chi = m_chi.max(sys.chi().eval(&u, &neg_u) / num::pow(nu, p));
                    }
                    if nl > 1e-12 {
                        m_psi = m_psi.max(sys.psi().eval(&l, &neg_l) / num::pow(nl, q));
                    }
                    let zero_u = vec![0.0; u.len()];
                    let zero_l = vec![0.0; l.len()];
                    let val =
                        sys.coupling().eval(&zero_u, &l) - sys.coupling().eval(&u, &zero_l);
                    if denom > 1e-12 {
                        val / num::pow(denom, p.max(q))
                    } else {
                        0.0
                    }
                }
            };
            ratios.push(ratio);
            final_point = Some((u, l));
        }
        let last = ratios[ratios.len() - 1];
        let decreasing = ratios.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        if last > -threshold {
            let (u, l) = final_point.unwrap();
            if worst.is_none() || last > worst.as_ref().unwrap().1 {
                worst = Some((ray_idx, last, u, l));
            }
        } else if !decreasing {
            nonmonotone = true;
        }
        stats.push((format!("ray{ray_idx}_final_ratio"), last));
    }
    if matches!(mode, CoercivityMode::C2 { .. }) {
        stats.push((String::from("m_chi_fit"), m_chi.max(0.0)));
        stats.push((String::from("m_psi_fit"), m_psi.max(0.0)));
    }
    let samples = rays.len() * radii.len();
    let report = match worst {
        Some((ray_idx, last, u, l)) => ProbeReport {
            hypothesis: String::from(id),
            verdict: Verdict::Counterexample,
            witness: Some(Witness {
                points: vec![u, l],
                scalars: vec![ray_idx as f64, last],
                violation: last + threshold,
            }),
            samples,
            seed: 0,
            stats,
        },
        None => ProbeReport {
            hypothesis: String::from(id),
            verdict: if nonmonotone {
                Verdict::Inconclusive
            } else {
                Verdict::Pass
            },
            witness: None,
            samples,
            seed: 0,
            stats,
        },
    };
    Ok(report)
}

/// Inf-sup constant of a bilinear coupling under diagonal norm weights:
/// the minimum over unit-norm `μ` of the maximum over unit-norm `v` of
/// `b(v, μ)`, i.e. the smallest singular value of the weighted matrix.
/// Zero is a valid, reported outcome.
pub fn infsup_estimate(
    b: &Matrix,
    x_weights: &[f64],
    y_weights: &[f64],
) -> Result<f64, ProbeError> {
    if x_weights.len() != b.cols() || y_weights.len() != b.rows() {
        return Err(ProbeError::InvalidInput("weight lengths must match the matrix"));
    }
    if x_weights.iter().chain(y_weights).any(|&w| !(w > 0.0)) {
        return Err(ProbeError::InvalidInput("norm weights must be positive"));
    }
    let mut weighted = Matrix::zeros(b.rows(), b.cols());
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            weighted.set(
                i,
                j,
                b.get(i, j) / (num::sqrt(y_weights[i]) * num::sqrt(x_weights[j])),
            );
        }
    }
    Ok(min_row_space_gain(&weighted)?)
}

/// Recomputes a witness violation from the report it came from. Returns
/// `None` when the report carries no witness or the hypothesis id is not
/// recognized.
pub fn replay_violation(sys: &CoupledSystem, report: &ProbeReport) -> Option<f64> {
    let w = report.witness.as_ref()?;
    let id = report.hypothesis.as_str();
    let side = if id.starts_with("H_chi") {
        Some(sys.chi())
    } else if id.starts_with("H_psi") {
        Some(sys.psi())
    } else {
        None
    };
    if let Some(bf) = side {
        let tail = id.splitn(2, "i1").next();
        let _ = tail;
        return match id {
            s if s.ends_with("1_iii") => Some(bf.eval(&w.points[0], &vec![0.0; bf.dim()]).abs()),
            s if s.ends_with("1_ii") => {
                let (u, v1, v2) = (&w.points[0], &w.points[1], &w.points[2]);
                let mid: Vec<f64> = v1.iter().zip(v2).map(|(&a, &b)| 0.5 * (a + b)).collect();
                Some(bf.eval(u, &mid) - 0.5 * (bf.eval(u, v1) + bf.eval(u, v2)))
            }
            s if s.ends_with("2_i") => {
                let (u, v) = (&w.points[0], &w.points[1]);
                let duv: Vec<f64> = u.iter().zip(v).map(|(&a, &b)| a - b).collect();
                let dvu: Vec<f64> = duv.iter().map(|&d| -d).collect();
                Some(-(bf.eval(u, &duv) + bf.eval(v, &dvu)))
            }
            s if s.ends_with("2_iii") => {
                let (u, v) = (&w.points[0], &w.points[1]);
                let t = w.scalars[0];
                let tv: Vec<f64> = v.iter().map(|&x| t * x).collect();
                Some((bf.eval(u, &tv) - t * bf.eval(u, v)).abs())
            }
            _ => None,
        };
    }
    let b = sys.coupling();
    match id {
        "H_B1_i" => {
            let (l, u1, u2) = (&w.points[0], &w.points[1], &w.points[2]);
            let mid: Vec<f64> = u1.iter().zip(u2).map(|(&a, &b)| 0.5 * (a + b)).collect();
            Some(b.eval(&mid, l) - 0.5 * (b.eval(u1, l) + b.eval(u2, l)))
        }
        "H_B1_ii" => {
            let (u, l1, l2) = (&w.points[0], &w.points[1], &w.points[2]);
            let mid: Vec<f64> = l1.iter().zip(l2).map(|(&a, &b)| 0.5 * (a + b)).collect();
            Some(0.5 * (b.eval(u, l1) + b.eval(u, l2)) - b.eval(u, &mid))
        }
        _ => None,
    }
}

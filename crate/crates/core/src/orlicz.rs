//! N-function numerics.
//!
//! An N-function `Φ` is generated from an odd, strictly increasing `φ` via
//! `Φ(t) = ∫₀ᵗ φ(s) ds`. This module evaluates `φ`, `Φ`, the inverse `φ⁻¹`,
//! the complementary function `Φ*(s) = ∫₀ˢ φ⁻¹(t) dt`, grid-based index
//! bounds for `t·φ(t)/Φ(t)`, discrete Luxemburg norms, growth comparisons
//! between generators, and the Sobolev conjugate construction.
//!
//! All integrals are adaptive-Simpson quadratures with a fixed panel budget;
//! `Φ` values are accelerated by an eagerly built prefix table on a
//! half-octave grid so point evaluations integrate only a short remainder.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::num;

/// Default panel budget for adaptive Simpson quadrature.
pub const DEFAULT_QUADRATURE_PANELS: usize = 2048;

/// Errors from N-function operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OrliczError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error("tabulated generator queried outside table range (t = {query:e}, table max {max:e})")]
    TableRange { query: f64, max: f64 },
    #[error("bracket growth exceeded overflow guard while targeting {target:e}")]
    Unbounded { target: f64 },
    #[error("degenerate generator: Phi({t:e}) vanishes for positive argument")]
    DegenerateGenerator { t: f64 },
}

/// Generator `φ` of an N-function.
#[derive(Debug, Clone)]
pub enum Generator {
    /// `φ(t) = |t|^(p-2) t`, so `Φ(t) = |t|^p / p`.
    Power { p: f64 },
    /// Hencky-material generator `φ(t) = a(t²)·t` with
    /// `a(s) = γ(√(1+s) − 1)^(γ−1)/√(1+s)`.
    Hencky { gamma: f64 },
    /// Monotone samples `(t, φ(t))` on a log grid, interpolated piecewise
    /// linearly in log-log coordinates. Queries above the last knot are a
    /// range error; below the first knot the first segment's log-log slope
    /// is extended (the `t → 0` end is required by every `Φ` integral).
    Tabulated { knots: Vec<(f64, f64)> },
}

/// An N-function with cached `Φ` prefix integrals.
#[derive(Debug, Clone)]
pub struct NFunction {
    generator: Generator,
    quadrature_panels: usize,
    // (t, Φ(t)) on an ascending half-octave grid, built eagerly; write-once.
    cache: Vec<(f64, f64)>,
}

impl NFunction {
    pub fn power(p: f64) -> Result<Self, OrliczError> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(OrliczError::InvalidParameter("power exponent must be > 1"));
        }
        Self::build(Generator::Power { p }, DEFAULT_QUADRATURE_PANELS)
    }

    pub fn hencky(gamma: f64) -> Result<Self, OrliczError> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(OrliczError::InvalidParameter("hencky exponent must be > 1"));
        }
        Self::build(Generator::Hencky { gamma }, DEFAULT_QUADRATURE_PANELS)
    }

    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self, OrliczError> {
        if knots.len() < 2 {
            return Err(OrliczError::InvalidParameter("table needs at least two rows"));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(OrliczError::InvalidParameter("table abscissae must increase strictly"));
            }
            if w[1].1 < w[0].1 {
                return Err(OrliczError::InvalidParameter("table values must be nondecreasing"));
            }
        }
        if knots[0].0 <= 0.0 || knots[0].1 < 0.0 {
            return Err(OrliczError::InvalidParameter("table entries must be positive"));
        }
        Self::build(Generator::Tabulated { knots }, DEFAULT_QUADRATURE_PANELS)
    }

    pub fn with_quadrature_panels(self, panels: usize) -> Result<Self, OrliczError> {
        if panels == 0 {
            return Err(OrliczError::InvalidParameter("panel budget must be positive"));
        }
        Self::build(self.generator, panels)
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn quadrature_panels(&self) -> usize {
        self.quadrature_panels
    }

    /// Domain of a tabulated generator; `None` for closed-form generators.
    pub fn tabulated_domain(&self) -> Option<(f64, f64)> {
        match &self.generator {
            Generator::Tabulated { knots } => Some((knots[0].0, knots[knots.len() - 1].0)),
            _ => None,
        }
    }

    fn build(generator: Generator, panels: usize) -> Result<Self, OrliczError> {
        let mut nf = NFunction {
            generator,
            quadrature_panels: panels,
            cache: Vec::new(),
        };
        nf.cache = nf.build_cache()?;
        Ok(nf)
    }

    // Half-octave grid 2^(k/2); for tabulated generators it is clipped to the
    // table's upper end.
    fn build_cache(&self) -> Result<Vec<(f64, f64)>, OrliczError> {
        let t_max_cap = match &self.generator {
            Generator::Tabulated { knots } => knots[knots.len() - 1].0,
            _ => f64::INFINITY,
        };
        let mut grid = Vec::new();
        for k in -120i32..=120 {
            let t = num::pow(2.0, k as f64 / 2.0);
            if t <= t_max_cap {
                grid.push(t);
            }
        }
        let mut cache = Vec::with_capacity(grid.len());
        let mut acc = 0.0;
        let mut prev = 0.0;
        for &t in &grid {
            acc += self.integrate_phi(prev, t)?;
            cache.push((t, acc));
            prev = t;
        }
        Ok(cache)
    }

    fn integrate_phi(&self, a: f64, b: f64) -> Result<f64, OrliczError> {
        adaptive_simpson(&|t| self.phi(t), a, b, 1e-12, self.quadrature_panels)
    }

    /// Evaluates the generator `φ(t)`; odd in `t`.
    pub fn phi(&self, t: f64) -> Result<f64, OrliczError> {
        if t == 0.0 {
            return Ok(0.0);
        }
        if t < 0.0 {
            return Ok(-self.phi(-t)?);
        }
        match &self.generator {
            Generator::Power { p } => Ok(num::pow(t, p - 1.0)),
            Generator::Hencky { gamma } => {
                let s = t * t;
                let r = num::sqrt(1.0 + s);
                // √(1+s) − 1 without cancellation for small s.
                let rm1 = s / (r + 1.0);
                Ok(gamma * num::pow(rm1, gamma - 1.0) / r * t)
            }
            Generator::Tabulated { knots } => eval_table(knots, t),
        }
    }

    /// `Φ(t) = ∫₀^|t| φ(s) ds` (even extension for negative `t`).
    pub fn big_phi(&self, t: f64) -> Result<f64, OrliczError> {
        let t = t.abs();
        if t == 0.0 {
            return Ok(0.0);
        }
        if self.cache.is_empty() || t < self.cache[0].0 {
            return self.integrate_phi(0.0, t);
        }
        // Largest cached abscissa not exceeding t.
        let idx = match self
            .cache
            .binary_search_by(|probe| probe.0.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let (t0, phi0) = self.cache[idx];
        Ok(phi0 + self.integrate_phi(t0, t)?)
    }

    /// Inverse of `φ` by monotone bisection with bracket growth; odd in `s`.
    pub fn phi_inverse(&self, s: f64) -> Result<f64, OrliczError> {
        if s == 0.0 {
            return Ok(0.0);
        }
        if s < 0.0 {
            return Ok(-self.phi_inverse(-s)?);
        }
        let max_t = match &self.generator {
            Generator::Tabulated { knots } => {
                let (t_max, v_max) = knots[knots.len() - 1];
                if s > v_max {
                    return Err(OrliczError::TableRange {
                        query: s,
                        max: v_max,
                    });
                }
                t_max
            }
            _ => f64::INFINITY,
        };
        let mut hi = 1.0f64.min(max_t);
        let mut guard = 0;
        while self.phi(hi)? < s {
            hi *= 2.0;
            if hi > max_t {
                hi = max_t;
                break;
            }
            guard += 1;
            if guard > 600 || hi > 1e154 {
                return Err(OrliczError::Unbounded { target: s });
            }
        }
        let (mut lo, mut hi) = (0.0f64, hi);
        let tol = 1e-12 * s.abs().max(1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let v = self.phi(mid)?;
            if (v - s).abs() <= tol {
                return Ok(mid);
            }
            if v < s {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Inverse of `Φ` by the same bisection scheme.
    pub fn big_phi_inverse(&self, y: f64) -> Result<f64, OrliczError> {
        if y == 0.0 {
            return Ok(0.0);
        }
        if y < 0.0 {
            return Err(OrliczError::InvalidInput("big_phi_inverse needs y >= 0"));
        }
        let max_t = self.tabulated_domain().map(|d| d.1).unwrap_or(f64::INFINITY);
        let mut hi = 1.0f64.min(max_t);
        let mut guard = 0;
        while self.big_phi(hi)? < y {
            hi *= 2.0;
            if hi > max_t {
                hi = max_t;
                break;
            }
            guard += 1;
            if guard > 600 || hi > 1e154 {
                return Err(OrliczError::Unbounded { target: y });
            }
        }
        let (mut lo, mut hi) = (0.0f64, hi);
        let tol = 1e-12 * y.abs().max(1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let v = self.big_phi(mid)?;
            if (v - y).abs() <= tol {
                return Ok(mid);
            }
            if v < y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Complementary function `Φ*(s) = ∫₀^|s| φ⁻¹(t) dt`.
    pub fn complementary_value(&self, s: f64) -> Result<f64, OrliczError> {
        let s = s.abs();
        if s == 0.0 {
            return Ok(0.0);
        }
        // Integration by parts turns the integral of the inverse into
        // `s·φ⁻¹(s) − Φ(φ⁻¹(s))`, which reuses the cached Φ quadrature and
        // stays exact across flat table segments where φ⁻¹ is set-valued.
        let t = self.phi_inverse(s)?;
        Ok(s * t - self.big_phi(t)?)
    }

    /// Generator of the complementary function (the N-function generated by
    /// `φ⁻¹`). Exact for powers (`p ↦ p/(p−1)`); tabulated otherwise.
    pub fn conjugate(&self) -> Result<NFunction, OrliczError> {
        match &self.generator {
            Generator::Power { p } => NFunction::power(p / (p - 1.0)),
            _ => {
                let (t_lo, t_hi) = self.tabulated_domain().unwrap_or((1e-9, 1e9));
                let grid = quarter_log_grid(t_lo, t_hi);
                let mut knots = Vec::with_capacity(grid.len());
                let mut last_s = 0.0;
                for &t in &grid {
                    let s = self.phi(t)?;
                    if s > last_s {
                        knots.push((s, t));
                        last_s = s;
                    }
                }
                if knots.len() < 2 {
                    return Err(OrliczError::DegenerateGenerator { t: t_hi });
                }
                NFunction::tabulated(knots)
            }
        }
    }

    /// Min and max of `t·φ(t)/Φ(t)` over a positive grid.
    pub fn index_bounds(&self, t_grid: &[f64]) -> Result<(f64, f64), OrliczError> {
        if t_grid.is_empty() {
            return Err(OrliczError::InvalidInput("index grid is empty"));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &t in t_grid {
            if !(t > 0.0) {
                return Err(OrliczError::InvalidInput("index grid must be strictly positive"));
            }
            let phi = self.phi(t)?;
            let big = self.big_phi(t)?;
            if big <= 0.0 {
                return Err(OrliczError::DegenerateGenerator { t });
            }
            let ratio = t * phi / big;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        Ok((lo, hi))
    }

    /// Default log-spaced index grid over `[1e-6, 1e6]`.
    pub fn default_index_grid() -> Vec<f64> {
        num::log_grid(1e-6, 1e6, 241)
    }
}

// Piecewise log-log linear interpolation of tabulated φ samples.
fn eval_table(knots: &[(f64, f64)], t: f64) -> Result<f64, OrliczError> {
    let (t0, v0) = knots[0];
    let (tn, _) = knots[knots.len() - 1];
    if t > tn {
        return Err(OrliczError::TableRange { query: t, max: tn });
    }
    if t < t0 {
        // Extend the first segment's slope toward zero.
        let (t1, v1) = knots[1];
        if v0 <= 0.0 {
            return Ok(0.0);
        }
        if v1 > v0 {
            let slope = (num::ln(v1) - num::ln(v0)) / (num::ln(t1) - num::ln(t0));
            return Ok(v0 * num::pow(t / t0, slope));
        }
        return Ok(v0);
    }
    let idx = knots.partition_point(|k| k.0 <= t).min(knots.len() - 1) - 1;
    let (ta, va) = knots[idx];
    let (tb, vb) = knots[idx + 1];
    if t == ta {
        return Ok(va);
    }
    if va <= 0.0 {
        if vb <= 0.0 {
            return Ok(0.0);
        }
        // Linear ramp out of a zero sample; log-log is undefined there.
        return Ok(vb * (t - ta) / (tb - ta));
    }
    if vb == va {
        return Ok(va);
    }
    let slope = (num::ln(vb) - num::ln(va)) / (num::ln(tb) - num::ln(ta));
    Ok(va * num::pow(t / ta, slope))
}

fn quarter_log_grid(lo: f64, hi: f64) -> Vec<f64> {
    let k_lo = num::ceil(4.0 * num::log2(lo)) as i64;
    let k_hi = num::floor(4.0 * num::log2(hi)) as i64;
    let mut grid = Vec::new();
    if lo.is_finite() {
        grid.push(lo);
    }
    for k in k_lo..=k_hi {
        let t = num::pow(2.0, k as f64 / 4.0);
        if t > lo && t < hi {
            grid.push(t);
        }
    }
    grid.push(hi);
    grid
}

/// Adaptive Simpson with a Richardson correction and a fixed panel budget.
/// When the budget runs out remaining segments keep their current estimate,
/// so results stay deterministic.
fn adaptive_simpson(
    f: &dyn Fn(f64) -> Result<f64, OrliczError>,
    a: f64,
    b: f64,
    rel_tol: f64,
    panel_budget: usize,
) -> Result<f64, OrliczError> {
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a)?, f(m)?, f(b)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol0 = (rel_tol * whole.abs()).max(1e-306);

    struct Seg {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        s: f64,
        tol: f64,
    }
    let mut stack = vec![Seg {
        a,
        b,
        fa,
        fm,
        fb,
        s: whole,
        tol: tol0,
    }];
    let mut acc = 0.0;
    let mut panels = 0usize;
    while let Some(seg) = stack.pop() {
        let m = 0.5 * (seg.a + seg.b);
        let ml = 0.5 * (seg.a + m);
        let mr = 0.5 * (m + seg.b);
        let (fml, fmr) = (f(ml)?, f(mr)?);
        let sl = (m - seg.a) / 6.0 * (seg.fa + 4.0 * fml + seg.fm);
        let sr = (seg.b - m) / 6.0 * (seg.fm + 4.0 * fmr + seg.fb);
        let s2 = sl + sr;
        panels += 1;
        let err = s2 - seg.s;
        if err.abs() <= 15.0 * seg.tol || panels >= panel_budget || (seg.b - seg.a) < 1e-300 {
            acc += s2 + err / 15.0;
        } else {
            stack.push(Seg {
                a: m,
                b: seg.b,
                fa: seg.fm,
                fm: fmr,
                fb: seg.fb,
                s: sr,
                tol: 0.5 * seg.tol,
            });
            stack.push(Seg {
                a: seg.a,
                b: m,
                fa: seg.fa,
                fm: fml,
                fb: seg.fm,
                s: sl,
                tol: 0.5 * seg.tol,
            });
        }
    }
    Ok(acc)
}

/// Modular `Σᵢ wᵢ Φ(|vᵢ|/k)` used by the Luxemburg norm bisection.
pub fn luxemburg_modular(
    values: &[f64],
    weights: &[f64],
    spec: &NFunction,
    k: f64,
) -> Result<f64, OrliczError> {
    let mut acc = 0.0;
    for i in 0..values.len() {
        if weights[i] > 0.0 {
            acc += weights[i] * spec.big_phi(values[i].abs() / k)?;
        }
    }
    Ok(acc)
}

/// Discrete Luxemburg norm: the infimal `k > 0` with
/// `Σᵢ wᵢ Φ(|vᵢ|/k) ≤ 1`, located by bisection on the modular.
pub fn luxemburg_norm(
    values: &[f64],
    weights: &[f64],
    spec: &NFunction,
) -> Result<f64, OrliczError> {
    if values.len() != weights.len() {
        return Err(OrliczError::InvalidInput("values and weights differ in length"));
    }
    let mut total_w = 0.0;
    for &w in weights {
        if w < 0.0 {
            return Err(OrliczError::InvalidInput("negative weight"));
        }
        total_w += w;
    }
    if !(total_w > 0.0) {
        return Err(OrliczError::InvalidInput("weights sum to zero"));
    }
    let mut vmax = 0.0f64;
    for i in 0..values.len() {
        if weights[i] > 0.0 {
            vmax = vmax.max(values[i].abs());
        }
    }
    if vmax == 0.0 {
        return Ok(0.0);
    }
    // Bracket so that modular(lo) >= 1 >= modular(hi). Starting from the
    // max entry and scaling by 2 keeps the whole transcript exactly
    // homogeneous under dyadic scaling of the field.
    let mut k = vmax;
    let mut m = luxemburg_modular(values, weights, spec, k)?;
    let (mut lo, mut hi);
    if m >= 1.0 {
        let mut guard = 0;
        loop {
            let k2 = k * 2.0;
            let m2 = luxemburg_modular(values, weights, spec, k2)?;
            if m2 <= 1.0 {
                lo = k;
                hi = k2;
                break;
            }
            k = k2;
            m = m2;
            guard += 1;
            if guard > 600 {
                return Err(OrliczError::Unbounded { target: 1.0 });
            }
        }
    } else {
        let mut guard = 0;
        loop {
            let k2 = k * 0.5;
            let m2 = luxemburg_modular(values, weights, spec, k2)?;
            if m2 >= 1.0 {
                lo = k2;
                hi = k;
                break;
            }
            k = k2;
            m = m2;
            guard += 1;
            if guard > 1100 {
                // Modular never reaches 1; the infimum is numerically zero.
                return Ok(k2);
            }
        }
    }
    let _ = m;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let mm = luxemburg_modular(values, weights, spec, mid)?;
        if (mm - 1.0).abs() <= 1e-10 {
            return Ok(mid);
        }
        if mm > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(hi)
}

/// Near-infinity comparison mode between generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareMode {
    /// `Φ_A(t) ≤ Φ_B(k t)` beyond a threshold for some sampled `k`.
    Dominates,
    /// `Φ_A(t)/Φ_B(k t) → 0` for every sampled `k`.
    EssentiallyFaster,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareVerdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Sampling plan for [`growth_compare`].
#[derive(Debug, Clone)]
pub struct GrowthProbe {
    pub t_grid: Vec<f64>,
    pub scale_factors: Vec<f64>,
    pub t_threshold: f64,
}

impl Default for GrowthProbe {
    fn default() -> Self {
        GrowthProbe {
            t_grid: num::log_grid(1.0, 1e8, 81),
            scale_factors: (0..=10).map(|k| num::pow(2.0, k as f64)).collect(),
            t_threshold: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub mode: CompareMode,
    pub verdict: CompareVerdict,
    /// First scale factor for which the dominates inequality held throughout.
    pub passing_k: Option<f64>,
    /// Scale factor and abscissa witnessing a failure.
    pub witness_k: Option<f64>,
    pub witness_t: Option<f64>,
    pub detail: String,
}

/// Compares growth of two generators near infinity on a sampled grid.
/// Inconclusive trends are never promoted to a pass.
pub fn growth_compare(
    a: &NFunction,
    b: &NFunction,
    mode: CompareMode,
    probe: &GrowthProbe,
) -> Result<ComparisonReport, OrliczError> {
    if probe.t_grid.is_empty() || probe.scale_factors.is_empty() {
        return Err(OrliczError::InvalidInput("empty growth probe"));
    }
    let ts: Vec<f64> = probe
        .t_grid
        .iter()
        .copied()
        .filter(|&t| t >= probe.t_threshold)
        .collect();
    if ts.len() < 2 {
        return Err(OrliczError::InvalidInput("probe grid does not extend past the threshold"));
    }
    let eval = |spec: &NFunction, t: f64| -> Result<Option<f64>, OrliczError> {
        match spec.big_phi(t) {
            Ok(v) => Ok(Some(v)),
            Err(OrliczError::TableRange { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    match mode {
        CompareMode::Dominates => {
            let mut first_fail: Option<(f64, f64)> = None;
            for &k in &probe.scale_factors {
                let mut ok = true;
                for &t in &ts {
                    let (pa, pb) = (eval(a, t)?, eval(b, k * t)?);
                    let (pa, pb) = match (pa, pb) {
                        (Some(x), Some(y)) => (x, y),
                        _ => {
                            return Ok(ComparisonReport {
                                mode,
                                verdict: CompareVerdict::Inconclusive,
                                passing_k: None,
                                witness_k: Some(k),
                                witness_t: Some(t),
                                detail: String::from("table range exhausted before a trend emerged"),
                            })
                        }
                    };
                    if pa > pb * (1.0 + 1e-12) + 1e-300 {
                        ok = false;
                        if first_fail.is_none() {
                            first_fail = Some((k, t));
                        }
                        break;
                    }
                }
                if ok {
                    return Ok(ComparisonReport {
                        mode,
                        verdict: CompareVerdict::Pass,
                        passing_k: Some(k),
                        witness_k: None,
                        witness_t: None,
                        detail: format!("Phi_A(t) <= Phi_B({k}*t) for all sampled t >= {}", probe.t_threshold),
                    });
                }
            }
            let (wk, wt) = first_fail.unwrap();
            Ok(ComparisonReport {
                mode,
                verdict: CompareVerdict::Fail,
                passing_k: None,
                witness_k: Some(wk),
                witness_t: Some(wt),
                detail: String::from("no sampled scale factor dominates on the grid"),
            })
        }
        CompareMode::EssentiallyFaster => {
            let mut any_inconclusive = false;
            for &k in &probe.scale_factors {
                let mut ratios = Vec::with_capacity(ts.len());
                for &t in &ts {
                    let (pa, pb) = (eval(a, t)?, eval(b, k * t)?);
                    match (pa, pb) {
                        (Some(x), Some(y)) if y > 0.0 && x.is_finite() && y.is_finite() => {
                            ratios.push(x / y)
                        }
                        _ => {
                            any_inconclusive = true;
                            ratios.clear();
                            break;
                        }
                    }
                }
                if ratios.is_empty() {
                    continue;
                }
                let first = ratios[0];
                let last = ratios[ratios.len() - 1];
                let monotone = ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
                if last >= 0.9 * first {
                    return Ok(ComparisonReport {
                        mode,
                        verdict: CompareVerdict::Fail,
                        passing_k: None,
                        witness_k: Some(k),
                        witness_t: Some(ts[ts.len() - 1]),
                        detail: format!("ratio Phi_A/Phi_B({k}t) does not decay (first {first:e}, last {last:e})"),
                    });
                }
                if !(monotone && last <= 1e-3 * first) {
                    any_inconclusive = true;
                }
            }
            if any_inconclusive {
                Ok(ComparisonReport {
                    mode,
                    verdict: CompareVerdict::Inconclusive,
                    passing_k: None,
                    witness_k: None,
                    witness_t: None,
                    detail: String::from("decay trend too weak to certify on the sampled grid"),
                })
            } else {
                Ok(ComparisonReport {
                    mode,
                    verdict: CompareVerdict::Pass,
                    passing_k: None,
                    witness_k: None,
                    witness_t: None,
                    detail: String::from("sampled ratio decays toward zero for every scale factor"),
                })
            }
        }
    }
}

/// Estimated Δ₂ constant: `max Φ(2t)/Φ(t)` over sampled `t ≥ 1`.
pub fn delta2_estimate(spec: &NFunction, t_grid: &[f64]) -> Result<f64, OrliczError> {
    let mut k = 0.0f64;
    let mut seen = false;
    for &t in t_grid {
        if t < 1.0 {
            continue;
        }
        let denom = spec.big_phi(t)?;
        if denom <= 0.0 {
            return Err(OrliczError::DegenerateGenerator { t });
        }
        k = k.max(spec.big_phi(2.0 * t)? / denom);
        seen = true;
    }
    if !seen {
        return Err(OrliczError::InvalidInput("delta2 grid has no t >= 1"));
    }
    Ok(k)
}

/// Outcome of the Sobolev-conjugate construction.
#[derive(Debug, Clone)]
pub struct SobolevReport {
    /// Whether `∫₁^∞ Φ⁻¹(s)/s^((N+1)/N) ds` diverges on the sampled scale.
    pub divergent: bool,
    /// Divergence looks logarithmic (increments neither grow nor contract);
    /// the borderline `p = N` situation.
    pub marginal: bool,
    /// Whether the companion `0..1` piece of the integral is finite; the
    /// conjugate is only built when it is.
    pub lower_piece_finite: bool,
    /// Partial integrals `∫₁^(10^k)` for `k = 2..8`.
    pub upper_partials: Vec<f64>,
    pub conjugate: Option<NFunction>,
}

/// Probes divergence of the conjugate-defining integral and, when divergent,
/// tabulates the Sobolev conjugate generator.
pub fn sobolev_conjugate(spec: &NFunction, n_dim: u32) -> Result<SobolevReport, OrliczError> {
    if n_dim < 2 {
        return Err(OrliczError::InvalidInput("dimension must be at least 2"));
    }
    let e = (n_dim as f64 + 1.0) / n_dim as f64;

    // Tabulate Φ and its inverse once; everything below interpolates.
    let inv_table = build_big_phi_inverse_table(spec)?;
    let integrand = |s: f64| -> f64 { interp_loglog(&inv_table, s) / num::pow(s, e) };

    // ∫ f(s) ds over [a,b] through s = exp(x).
    let log_int = |a: f64, b: f64| -> Result<f64, OrliczError> {
        adaptive_simpson(
            &|x| {
                let s = num::exp(x);
                Ok(integrand(s) * s)
            },
            num::ln(a),
            num::ln(b),
            1e-10,
            spec.quadrature_panels,
        )
    };

    // Upper partial integrals at decade limits.
    let mut upper = Vec::new();
    let mut acc = 0.0;
    let mut prev = 1.0;
    for k in 1..=8 {
        let lim = num::pow(10.0, k as f64);
        acc += log_int(prev, lim)?;
        prev = lim;
        if k >= 2 {
            upper.push(acc);
        }
    }
    let increments: Vec<f64> = upper.windows(2).map(|w| w[1] - w[0]).collect();
    let ratios: Vec<f64> = increments
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    let tail = &ratios[ratios.len().saturating_sub(3)..];
    let contracts = tail.iter().all(|&r| r <= 0.9);
    let divergent = !contracts;
    let marginal = divergent && tail.iter().all(|&r| (0.9..=1.1).contains(&r));

    // Lower piece ∫₀¹ via shrinking lower limits.
    let mut lower_partials = Vec::new();
    for j in 2..=8 {
        lower_partials.push(log_int(num::pow(10.0, -(j as f64)), 1.0)?);
    }
    let lower_increments: Vec<f64> = lower_partials.windows(2).map(|w| w[1] - w[0]).collect();
    let lower_ratios: Vec<f64> = lower_increments
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    let l_tail = &lower_ratios[lower_ratios.len().saturating_sub(3)..];
    let lower_piece_finite = l_tail.iter().all(|&r| r <= 0.9);

    let conjugate = if divergent && lower_piece_finite {
        Some(build_conjugate_table(spec, e, &inv_table)?)
    } else {
        None
    };

    Ok(SobolevReport {
        divergent,
        marginal,
        lower_piece_finite,
        upper_partials: upper,
        conjugate,
    })
}

// (Φ(t), t) pairs ascending in Φ, for inverse interpolation.
fn build_big_phi_inverse_table(spec: &NFunction) -> Result<Vec<(f64, f64)>, OrliczError> {
    let t_lo = spec.big_phi_inverse(1e-14)?;
    let t_hi = match spec.tabulated_domain() {
        Some((_, t_max)) => t_max,
        None => spec.big_phi_inverse(1e14)?,
    };
    let grid = quarter_log_grid(t_lo, t_hi);
    let mut table = Vec::with_capacity(grid.len());
    let mut last = 0.0;
    for &t in &grid {
        let y = spec.big_phi(t)?;
        if y > last {
            table.push((y, t));
            last = y;
        }
    }
    if table.len() < 2 {
        return Err(OrliczError::DegenerateGenerator { t: t_hi });
    }
    Ok(table)
}

// Log-log interpolation with end-slope extension on both sides.
fn interp_loglog(table: &[(f64, f64)], x: f64) -> f64 {
    let n = table.len();
    let idx = if x <= table[0].0 {
        0
    } else if x >= table[n - 1].0 {
        n - 2
    } else {
        table.partition_point(|k| k.0 <= x) - 1
    };
    let (xa, ya) = table[idx];
    let (xb, yb) = table[idx + 1];
    let slope = (num::ln(yb) - num::ln(ya)) / (num::ln(xb) - num::ln(xa));
    ya * num::pow(x / xa, slope)
}

fn build_conjugate_table(
    spec: &NFunction,
    e: f64,
    inv_table: &[(f64, f64)],
) -> Result<NFunction, OrliczError> {
    // G(y) = ∫₀^y Φ⁻¹(s)/s^e ds on a quarter-log grid; the conjugate Φ_* is
    // G⁻¹ and its generator is φ_*(τ) = y^e / Φ⁻¹(y) at y = Φ_*(τ).
    let y_grid = quarter_log_grid(1e-12, 1e12);
    let f = |s: f64| interp_loglog(inv_table, s) / num::pow(s, e);
    // Analytic tail below the first grid point from the local exponent.
    let s0 = y_grid[0];
    let s1 = y_grid[1];
    let alpha = (num::ln(f(s1)) - num::ln(f(s0))) / (num::ln(s1) - num::ln(s0));
    if alpha <= -1.0 {
        return Err(OrliczError::InvalidInput("conjugate integrand not integrable at zero"));
    }
    let mut g = Vec::with_capacity(y_grid.len());
    let mut acc = f(s0) * s0 / (alpha + 1.0);
    g.push((s0, acc));
    for w in y_grid.windows(2) {
        let seg = adaptive_simpson(
            &|x| {
                let s = num::exp(x);
                Ok(f(s) * s)
            },
            num::ln(w[0]),
            num::ln(w[1]),
            1e-10,
            spec.quadrature_panels,
        )?;
        acc += seg;
        g.push((w[1], acc));
    }
    // Invert G: tau -> y, then emit the generator knots.
    let g_inv: Vec<(f64, f64)> = g.iter().map(|&(y, gy)| (gy, y)).collect();
    let tau_lo = g[0].1 * 1.05;
    let tau_hi = g[g.len() - 1].1 / 1.05;
    let tau_grid = quarter_log_grid(tau_lo, tau_hi);
    let mut knots = Vec::with_capacity(tau_grid.len());
    let mut last = 0.0;
    for &tau in &tau_grid {
        let y = interp_loglog(&g_inv, tau);
        let v = num::pow(y, e) / interp_loglog(inv_table, y);
        if v > last {
            knots.push((tau, v));
            last = v;
        }
    }
    NFunction::tabulated(knots)
}

/// Conjugate-index pairing report. The standard pairing couples each index
/// of `φ⁻¹` with the opposite index of `φ`; the report also evaluates the
/// same-side variant so the data can show which one it supports.
#[derive(Debug, Clone)]
pub struct IndexPairingReport {
    pub phi_indices: (f64, f64),
    pub conjugate_indices: (f64, f64),
    /// `1/(φ⁻¹)⁻ + 1/φ⁺ − 1` and `1/(φ⁻¹)⁺ + 1/φ⁻ − 1`.
    pub standard_residuals: (f64, f64),
    /// `1/(φ⁻¹)⁺ + 1/φ⁺ − 1`.
    pub same_side_residual: f64,
    pub supports_standard: bool,
    pub supports_same_side: bool,
}

pub fn conjugate_index_report(
    spec: &NFunction,
    grid: &[f64],
) -> Result<IndexPairingReport, OrliczError> {
    let (lo, hi) = spec.index_bounds(grid)?;
    let conj = spec.conjugate()?;
    let cgrid: Vec<f64> = match conj.tabulated_domain() {
        Some((a, b)) => grid
            .iter()
            .copied()
            .filter(|&t| t >= a && t <= b)
            .collect(),
        None => grid.to_vec(),
    };
    let (clo, chi) = conj.index_bounds(&cgrid)?;
    let standard = (1.0 / clo + 1.0 / hi - 1.0, 1.0 / chi + 1.0 / lo - 1.0);
    let same_side = 1.0 / chi + 1.0 / hi - 1.0;
    let tol = 1e-3;
    Ok(IndexPairingReport {
        phi_indices: (lo, hi),
        conjugate_indices: (clo, chi),
        standard_residuals: standard,
        same_side_residual: same_side,
        supports_standard: standard.0.abs() <= tol && standard.1.abs() <= tol,
        supports_same_side: same_side.abs() <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2: f64 = core::f64::consts::SQRT_2;

    #[test]
    fn phi_matches_closed_forms() {
        let p2 = NFunction::power(2.0).unwrap();
        assert_eq!(p2.phi(3.0).unwrap(), 3.0);
        let p3 = NFunction::power(3.0).unwrap();
        assert_eq!(p3.phi(2.0).unwrap(), 4.0);
        let h2 = NFunction::hencky(2.0).unwrap();
        assert!((h2.phi(1.0).unwrap() - (2.0 - SQRT2)).abs() < 1e-14);
        // Odd symmetry is exact.
        assert_eq!(h2.phi(-1.25).unwrap(), -h2.phi(1.25).unwrap());
    }

    #[test]
    fn big_phi_matches_closed_forms() {
        let p2 = NFunction::power(2.0).unwrap();
        assert!((p2.big_phi(2.0).unwrap() - 2.0).abs() < 1e-10);
        let p3 = NFunction::power(3.0).unwrap();
        assert!((p3.big_phi(1.0).unwrap() - 1.0 / 3.0).abs() < 1e-11);
        // Hencky: Φ(t) = (√(1+t²) − 1)^γ by substituting w = s² in the integral.
        let h2 = NFunction::hencky(2.0).unwrap();
        let exact = (SQRT2 - 1.0) * (SQRT2 - 1.0);
        assert!((h2.big_phi(1.0).unwrap() - exact).abs() < 1e-11 * exact.max(1.0));
        // Fractional exponent with an integrable singularity in φ'.
        let p15 = NFunction::power(1.5).unwrap();
        let exact = num::pow(2.0, 1.5) / 1.5;
        assert!((p15.big_phi(2.0).unwrap() - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn phi_inverse_round_trips() {
        let p2 = NFunction::power(2.0).unwrap();
        assert!((p2.phi_inverse(5.0).unwrap() - 5.0).abs() < 1e-9);
        let p3 = NFunction::power(3.0).unwrap();
        assert!((p3.phi_inverse(4.0).unwrap() - 2.0).abs() < 1e-9);
        let h2 = NFunction::hencky(2.0).unwrap();
        let s = h2.phi(1.0).unwrap();
        assert!((h2.phi_inverse(s).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn complementary_values() {
        let p2 = NFunction::power(2.0).unwrap();
        assert!((p2.complementary_value(1.0).unwrap() - 0.5).abs() < 1e-10);
        let p3 = NFunction::power(3.0).unwrap();
        // Conjugate of t³/3 is s^(3/2)/(3/2).
        assert!((p3.complementary_value(4.0).unwrap() - 16.0 / 3.0).abs() < 1e-9);
        assert_eq!(p3.complementary_value(0.0).unwrap(), 0.0);
    }

    #[test]
    fn index_bounds_power_and_hencky() {
        let grid = NFunction::default_index_grid();
        for p in [2.0, 3.5] {
            let nf = NFunction::power(p).unwrap();
            let (lo, hi) = nf.index_bounds(&grid).unwrap();
            assert!((lo - p).abs() < 1e-9, "p={p} lo={lo}");
            assert!((hi - p).abs() < 1e-9, "p={p} hi={hi}");
        }
        // Dense-grid oracle: the ratio has the closed form
        // γt²/(√(1+t²)(√(1+t²)−1)), tending to 2γ at 0 and γ at ∞.
        let gamma = 2.0;
        let h = NFunction::hencky(gamma).unwrap();
        let grid = num::log_grid(1e-4, 1e4, 161);
        let (lo, hi) = h.index_bounds(&grid).unwrap();
        let mut oracle_lo = f64::INFINITY;
        let mut oracle_hi = f64::NEG_INFINITY;
        for &t in &grid {
            let r = num::sqrt(1.0 + t * t);
            let ratio = gamma * t * t / (r * (r - 1.0));
            oracle_lo = oracle_lo.min(ratio);
            oracle_hi = oracle_hi.max(ratio);
        }
        assert!((lo - oracle_lo).abs() < 1e-6, "lo {lo} vs {oracle_lo}");
        assert!((hi - oracle_hi).abs() < 1e-6, "hi {hi} vs {oracle_hi}");
        assert!((lo - gamma).abs() < 1e-3);
        assert!((hi - 2.0 * gamma).abs() < 1e-3);
    }

    #[test]
    fn degenerate_table_is_reported() {
        let flat = NFunction::tabulated(vec![(0.1, 0.0), (1.0, 0.0), (10.0, 0.0)]).unwrap();
        match flat.index_bounds(&[1.0]) {
            Err(OrliczError::DegenerateGenerator { .. }) => {}
            other => panic!("expected degenerate generator, got {other:?}"),
        }
    }

    #[test]
    fn table_range_error_above_last_knot() {
        let tab = NFunction::tabulated(vec![(0.1, 0.1), (1.0, 1.0), (10.0, 10.0)]).unwrap();
        assert!(matches!(
            tab.phi(20.0),
            Err(OrliczError::TableRange { .. })
        ));
        // Below the first knot the first segment slope extends.
        assert!((tab.phi(0.01).unwrap() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn luxemburg_norm_examples() {
        let p2 = NFunction::power(2.0).unwrap();
        // Constant field, total weight one: Φ(1/k) = 1 gives k = 1/√2.
        let v = vec![1.0; 4];
        let w = vec![0.25; 4];
        let k = luxemburg_norm(&v, &w, &p2).unwrap();
        assert!((k - 1.0 / SQRT2).abs() < 1e-8);
        // Zero field.
        assert_eq!(luxemburg_norm(&[0.0, 0.0], &[0.5, 0.5], &p2).unwrap(), 0.0);
        // Dyadic scaling is exact by construction of the bisection bracket.
        let v = vec![0.3, -1.7, 0.9];
        let w = vec![0.2, 0.5, 0.3];
        let n1 = luxemburg_norm(&v, &w, &p2).unwrap();
        let v2: Vec<f64> = v.iter().map(|x| 2.0 * x).collect();
        let n2 = luxemburg_norm(&v2, &w, &p2).unwrap();
        assert_eq!(n2.to_bits(), (2.0 * n1).to_bits());
        // Negative weight is rejected.
        assert!(matches!(
            luxemburg_norm(&[1.0], &[-1.0], &p2),
            Err(OrliczError::InvalidInput(_))
        ));
    }

    #[test]
    fn unit_ball_normalization_holds() {
        let p3 = NFunction::power(3.0).unwrap();
        let v = vec![0.2, 1.4, -0.7, 3.0];
        let w = vec![0.1, 0.4, 0.3, 0.2];
        let k = luxemburg_norm(&v, &w, &p3).unwrap();
        let m = luxemburg_modular(&v, &w, &p3, k).unwrap();
        assert!((m - 1.0).abs() < 1e-8);
    }

    #[test]
    fn growth_comparisons() {
        let p2 = NFunction::power(2.0).unwrap();
        let p3 = NFunction::power(3.0).unwrap();
        let probe = GrowthProbe::default();
        let r = growth_compare(&p2, &p3, CompareMode::EssentiallyFaster, &probe).unwrap();
        assert_eq!(r.verdict, CompareVerdict::Pass);
        let r = growth_compare(&p2, &p2, CompareMode::Dominates, &probe).unwrap();
        assert_eq!(r.verdict, CompareVerdict::Pass);
        assert_eq!(r.passing_k, Some(1.0));
        let r = growth_compare(&p2, &p2, CompareMode::EssentiallyFaster, &probe).unwrap();
        assert_eq!(r.verdict, CompareVerdict::Fail);
        let r = growth_compare(&p3, &p2, CompareMode::Dominates, &probe).unwrap();
        assert_eq!(r.verdict, CompareVerdict::Fail);
        assert!(r.witness_k.is_some() && r.witness_t.is_some());
    }

    #[test]
    fn sobolev_conjugate_power_cases() {
        let p2 = NFunction::power(2.0).unwrap();
        // N = 3: divergent, conjugate behaves like power 6 = Np/(N−p).
        let rep = sobolev_conjugate(&p2, 3).unwrap();
        assert!(rep.divergent && !rep.marginal && rep.lower_piece_finite);
        let conj = rep.conjugate.expect("conjugate expected");
        let dom = conj.tabulated_domain().unwrap();
        let grid: Vec<f64> = NFunction::default_index_grid()
            .into_iter()
            .filter(|&t| t >= dom.0 * 1.01 && t <= dom.1 * 0.99)
            .collect();
        let (lo, hi) = conj.index_bounds(&grid).unwrap();
        assert!((lo - 6.0).abs() < 2e-2, "lo {lo}");
        assert!((hi - 6.0).abs() < 2e-2, "hi {hi}");
        // N = 2 = p: logarithmic growth, flagged marginal, no conjugate.
        let rep = sobolev_conjugate(&p2, 2).unwrap();
        assert!(rep.divergent && rep.marginal);
        assert!(rep.conjugate.is_none());
    }

    #[test]
    fn sobolev_convergent_case() {
        // Φ(t) = t^10 so Φ⁻¹(s) ~ s^(1/10); with N = 2 the integrand decays
        // like s^(-1.4) and the integral converges.
        let grid = num::log_grid(1e-4, 1e3, 120);
        let knots: Vec<(f64, f64)> = grid.iter().map(|&t| (t, 10.0 * num::pow(t, 9.0))).collect();
        let tab = NFunction::tabulated(knots).unwrap();
        let rep = sobolev_conjugate(&tab, 2).unwrap();
        assert!(!rep.divergent);
        assert!(rep.conjugate.is_none());
    }

    #[test]
    fn young_inequality_sampled() {
        let mut rng = crate::rng::Rng::from_seed(11);
        for spec in [NFunction::power(2.5).unwrap(), NFunction::hencky(2.0).unwrap()] {
            for _ in 0..250 {
                let t = rng.uniform(0.0, 8.0);
                let s = rng.uniform(0.0, 8.0);
                let lhs = t * s;
                let rhs = spec.big_phi(t).unwrap() + spec.complementary_value(s).unwrap();
                assert!(
                    lhs <= rhs + 1e-8 * rhs.abs().max(1.0),
                    "young violated t={t} s={s} lhs={lhs} rhs={rhs}"
                );
            }
        }
    }

    #[test]
    fn delta2_constant_bounded_by_upper_index() {
        let grid = NFunction::default_index_grid();
        let p = 2.5;
        let nf = NFunction::power(p).unwrap();
        let k = delta2_estimate(&nf, &grid).unwrap();
        assert!((k - num::pow(2.0, p)).abs() < 1e-8);
        let h = NFunction::hencky(2.0).unwrap();
        let (_, hi) = h.index_bounds(&grid).unwrap();
        let k = delta2_estimate(&h, &grid).unwrap();
        assert!(k <= num::pow(2.0, hi) + 1e-6, "k={k} bound={}", num::pow(2.0, hi));
    }

    #[test]
    fn conjugate_pairing_supports_standard_variant() {
        let grid = NFunction::default_index_grid();
        let p3 = NFunction::power(3.0).unwrap();
        let rep = conjugate_index_report(&p3, &grid).unwrap();
        assert!(rep.supports_standard);
        // Hencky has distinct indices, so the same-side identity fails and
        // the data singles out the standard pairing.
        let h2 = NFunction::hencky(2.0).unwrap();
        let rep = conjugate_index_report(&h2, &num::log_grid(1e-5, 1e5, 201)).unwrap();
        assert!(rep.supports_standard, "residuals {:?}", rep.standard_residuals);
        assert!(!rep.supports_same_side, "residual {}", rep.same_side_residual);
    }
}

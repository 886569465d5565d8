//! Float helpers over `libm` for the `no_std` build.
//!
//! `abs`, `max`, `min` and `signum` are available on `f64` in `core`;
//! everything transcendental is routed through `libm`.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

/// Euclidean norm of a slice.
pub(crate) fn norm2(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for &v in x {
        s += v * v;
    }
    sqrt(s)
}

/// Dot product; panics on length mismatch in debug builds only.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Log-spaced grid with `n` points between `lo` and `hi` (inclusive).
pub(crate) fn log_grid(lo: f64, hi: f64, n: usize) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec::Vec::with_capacity(n);
    if n == 1 {
        out.push(lo);
        return out;
    }
    let (a, b) = (ln(lo), ln(hi));
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        out.push(exp(a + t * (b - a)));
    }
    out
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

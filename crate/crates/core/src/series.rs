//! Truncated power series over `f64`.
//!
//! A series is a coefficient slice `c[0] + c[1] s + c[2] s^2 + ...`; every
//! operation takes the number of coefficients to keep and discards the rest.

pub fn mul(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Multiplicative inverse. `None` when the constant term vanishes.
pub fn recip(a: &[f64], len: usize) -> Option<Vec<f64>> {
    let a0 = *a.first()?;
    if a0 == 0.0 || !a0.is_finite() {
        return None;
    }
    let mut out = vec![0.0; len];
    if len == 0 {
        return Some(out);
    }
    out[0] = 1.0 / a0;
    for n in 1..len {
        let mut acc = 0.0;
        for k in 1..=n.min(a.len() - 1) {
            acc += a[k] * out[n - k];
        }
        out[n] = -acc / a0;
    }
    Some(out)
}

/// `outer(inner(s))`; `inner[0]` must be zero.
pub fn compose(outer: &[f64], inner: &[f64], len: usize) -> Vec<f64> {
    debug_assert!(inner.first().is_none_or(|&c| c == 0.0));
    let mut out = vec![0.0; len];
    for &c in outer.iter().rev() {
        out = mul(&out, inner, len);
        if len > 0 {
            out[0] += c;
        }
    }
    out
}

/// Compositional inverse: returns `s(e)` with `h(s(e)) = e`.
/// Requires `h[0] == 0` and `h[1] != 0`.
pub fn reversion(h: &[f64], len: usize) -> Option<Vec<f64>> {
    if h.len() < 2 || h[1] == 0.0 {
        return None;
    }
    let mut s = vec![0.0; len];
    if len > 1 {
        s[1] = 1.0 / h[1];
    }
    for n in 2..len {
        let hs = compose(h, &s, n + 1);
        s[n] = -hs[n] / h[1];
    }
    Some(s)
}

/// Antiderivative with zero constant term, keeping `len` coefficients.
pub fn integrate(a: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (k, &c) in a.iter().enumerate() {
        if k + 1 < len {
            out[k + 1] = c / (k + 1) as f64;
        }
    }
    out
}

pub fn eval(a: &[f64], s: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, &c| acc * s + c)
}

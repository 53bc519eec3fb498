//! Dense univariate polynomials (coefficients low to high) and a
//! companion-matrix root finder.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Taylor coefficients `p^{(k)}(t) / k!` for `k < len`, via repeated
/// synthetic division.
pub fn taylor(coeffs: &[f64], t: f64, len: usize) -> Vec<f64> {
    let mut work = coeffs.to_vec();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        if work.is_empty() {
            out.push(0.0);
            continue;
        }
        // divide by (x - t): remainder is the current Taylor coefficient
        let n = work.len();
        let mut q = vec![0.0; n.saturating_sub(1)];
        let mut acc = 0.0;
        for i in (0..n).rev() {
            acc = acc * t + work[i];
            if i > 0 {
                q[i - 1] = acc;
            }
        }
        out.push(acc);
        work = q;
    }
    out
}

/// `p^{(k)}(t)` for `k < len`.
pub fn derivs(coeffs: &[f64], t: f64, len: usize) -> Vec<f64> {
    let mut tay = taylor(coeffs, t, len);
    let mut fact = 1.0;
    for (k, c) in tay.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        *c *= fact;
    }
    tay
}

pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

/// Drops trailing coefficients that are exactly zero.
pub fn trim(coeffs: &[f64]) -> &[f64] {
    let end = coeffs.iter().rposition(|&c| c != 0.0).map_or(0, |i| i + 1);
    &coeffs[..end]
}

/// Quotient of `p` by `(x - r)`, discarding the remainder.
pub fn deflate(coeffs: &[f64], r: f64) -> Vec<f64> {
    let n = coeffs.len();
    if n <= 1 {
        return Vec::new();
    }
    let mut q = vec![0.0; n - 1];
    let mut acc = 0.0;
    for i in (1..n).rev() {
        acc = acc * r + coeffs[i];
        q[i - 1] = acc;
    }
    q
}

/// Product of two real polynomials.
pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// All complex roots of `sum c[k] z^k` as eigenvalues of the companion
/// matrix (complex Schur form). Leading coefficient must be nonzero.
pub fn complex_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let end = coeffs
        .iter()
        .rposition(|c| c.norm() != 0.0)
        .map_or(0, |i| i + 1);
    let coeffs = &coeffs[..end];
    if coeffs.len() <= 1 {
        return Vec::new();
    }
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[i] / lead;
    }
    schur_eigenvalues(m)
}

/// Eigenvalues from the complex Schur form. Highly structured matrices (the
/// companion matrix of `z^n - 1` is a cyclic permutation) can stall the QR
/// iteration; those are retried after a unitary similarity.
fn schur_eigenvalues(m: DMatrix<Complex64>) -> Vec<Complex64> {
    let n = m.nrows();
    for attempt in 0..4 {
        let work = if attempt == 0 {
            m.clone()
        } else {
            // Householder reflector H = I - 2 v v* / (v* v) with a fixed irregular v
            let v = DMatrix::from_fn(n, 1, |i, _| {
                let x = (i + 1) as f64 * (attempt as f64 * 0.754_877_666 + 0.3);
                Complex64::new(x.sin() + 1.5, x.cos())
            });
            let vv = (v.adjoint() * &v)[(0, 0)];
            let h = DMatrix::identity(n, n) - (&v * v.adjoint()) * (Complex64::new(2.0, 0.0) / vv);
            &h * &m * &h
        };
        if let Some(schur) = nalgebra::Schur::try_new(work, f64::EPSILON, 100 * n.max(10)) {
            let (_, t) = schur.unpack();
            return (0..n).map(|i| t[(i, i)]).collect();
        }
    }
    // the last resort is the unbounded iteration
    let (_, t) = m.schur().unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

pub fn real_poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    complex_roots(&c)
}

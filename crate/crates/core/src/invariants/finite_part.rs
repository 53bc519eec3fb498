//! The global invariant `μ`.
//!
//! With zeros, `μ` is computed by subtracting the singular Laurent part of
//! `1/f` on a window of half-width `δ` around each zero, integrating the
//! regular remainder, and adding the closed-form finite part of the singular
//! model. Odd-order poles contribute nothing to a symmetric window; an
//! even-order term `c₋ⱼ s⁻ʲ` contributes `2 c₋ⱼ δ^{1-j} / (1-j)`.
//!
//! The result is cross-checked against Richardson extrapolation of the
//! explicit cutoff integral `I(ε)`, whose error `μ - I(ε)` is odd in `ε`.

use std::f64::consts::TAU;

use super::laurent_from_taylor;
use crate::circlefield::{CircleField, ZeroDatum};
use crate::error::{Error, Result};
use crate::quad;
use crate::series;

const MAX_WINDOW: f64 = 0.1;
/// Regular-part Taylor degree for exact fields.
const EXACT_REGULAR_DEGREE: usize = 12;
const MAX_LOCAL_TERMS: usize = 80;
const ABS_TOL: f64 = 1e-12;
const REL_TOL: f64 = 1e-13;
/// The cutoff integrals only feed a cross-check at `CHECK_TOL`.
const CUTOFF_ABS_TOL: f64 = 1e-10;
const CUTOFF_REL_TOL: f64 = 1e-12;
const CHECK_TOL: f64 = 1e-6;

struct Window {
    theta: f64,
    order: usize,
    delta: f64,
    /// `sing[j - 1] = c₋ⱼ`.
    sing: Vec<f64>,
    /// `c₀, c₁, …` of the regular part.
    reg: Vec<f64>,
    /// Below this `|s|` the regular part is evaluated from `reg`.
    r_taylor: f64,
    /// For exact fields, `g` with `f(θ + s) = sᵐ g(s)` on the window. Unlike
    /// the global sum, it keeps full relative accuracy as `s → 0`.
    local: Option<Vec<f64>>,
}

impl Window {
    fn new(field: &CircleField, zero: &ZeroDatum, delta: f64) -> Result<Self> {
        let m = zero.order;
        let (d, local) = match field {
            CircleField::Exact(p) => {
                // Taylor terms of f are bounded by |f|₁ Nᵏ/k!
                let n = p.degree().max(1) as f64;
                let l1 = p.l1_norm();
                let mut bound = l1;
                let mut terms = 0;
                for k in 1..=MAX_LOCAL_TERMS {
                    bound *= n * delta / k as f64;
                    terms = k;
                    if k > m && bound < 1e-18 * l1 * delta.powi(m as i32) {
                        break;
                    }
                }
                let taylor = p.taylor(zero.theta, terms.max(m + 1) + 1);
                (EXACT_REGULAR_DEGREE, Some(taylor[m..].to_vec()))
            }
            CircleField::Sampled(s) if s.depth() >= 2 * m => (s.depth() - 2 * m, None),
            CircleField::Sampled(s) => {
                return Err(Error::InsufficientDerivativeDepth {
                    needed: 2 * m,
                    available: s.depth(),
                })
            }
        };
        let taylor = field.taylor(zero.theta, 2 * m + d + 1)?;
        let c = laurent_from_taylor(&taylor, m, m + d + 1).ok_or_else(|| {
            Error::ZeroIsolationFailure {
                theta: zero.theta,
                reason: "leading Taylor coefficient vanishes".into(),
            }
        })?;
        let sing = (1..=m).map(|j| c[m - j]).collect();
        let reg = c[m..].to_vec();
        // balance truncation s^{d+1} against cancellation: relative error
        // 1e-16 in f costs 1e-16 s^{-m} locally and 1e-16 s^{-2m} globally
        let noise_power = if local.is_some() { m } else { 2 * m };
        let r_taylor = (0.25 * delta).min(1e-16f64.powf(1.0 / (noise_power + d + 1) as f64));
        Ok(Window {
            theta: zero.theta,
            order: m,
            delta,
            sing,
            reg,
            r_taylor,
            local,
        })
    }

    /// `1/f(θ + s)` for `|s| <= δ`.
    fn recip(&self, field: &CircleField, s: f64) -> f64 {
        match &self.local {
            Some(g) => 1.0 / (s.powi(self.order as i32) * series::eval(g, s)),
            None => 1.0 / field.value(self.theta + s),
        }
    }

    fn singular(&self, s: f64) -> f64 {
        let inv = 1.0 / s;
        let mut p = inv;
        let mut acc = 0.0;
        for &c in &self.sing {
            acc += c * p;
            p *= inv;
        }
        acc
    }

    fn regular(&self, field: &CircleField, s: f64) -> f64 {
        if s.abs() < self.r_taylor {
            series::eval(&self.reg, s)
        } else {
            self.recip(field, s) - self.singular(s)
        }
    }

    /// Finite part of `∫_{-δ}^{δ} ds / f(θ + s)`.
    fn finite_part(&self, field: &CircleField) -> Result<f64> {
        let (r, d) = (self.r_taylor, self.delta);
        let reg = |s: f64| self.regular(field, s);
        let left = quad::integrate(reg, -d, -r, ABS_TOL, REL_TOL)?.value;
        let right = quad::integrate(reg, r, d, ABS_TOL, REL_TOL)?.value;
        let inner: f64 = self
            .reg
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .map(|(k, c)| 2.0 * c * r.powi(k as i32 + 1) / (k + 1) as f64)
            .sum();
        let model: f64 = self
            .even_poles()
            .map(|(j, c)| 2.0 * c * d.powi(1 - j as i32) / (1.0 - j as f64))
            .sum();
        Ok(left + right + inner + model)
    }

    fn even_poles(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.sing
            .iter()
            .enumerate()
            .map(|(i, &c)| (i + 1, c))
            .filter(|(j, _)| j % 2 == 0)
    }

    /// `∫_{ε<|s|<δ} ds/f(θ + s)` minus its divergent part
    /// `Σ_{j even} 2 c₋ⱼ ε^{1-j} / (j-1)`.
    fn cutoff(&self, field: &CircleField, eps: f64) -> Result<f64> {
        let recip = |s: f64| self.recip(field, s);
        let left = quad::integrate(recip, -self.delta, -eps, CUTOFF_ABS_TOL, CUTOFF_REL_TOL)?.value;
        let right = quad::integrate(recip, eps, self.delta, CUTOFF_ABS_TOL, CUTOFF_REL_TOL)?.value;
        let divergence: f64 = self
            .even_poles()
            .map(|(j, c)| 2.0 * c * eps.powi(1 - j as i32) / (j as f64 - 1.0))
            .sum();
        Ok(left + right - divergence)
    }
}

/// `μ` for a field with the given (complete) zero list.
pub fn global_invariant(field: &CircleField, zeros: &[ZeroDatum]) -> Result<f64> {
    if zeros.is_empty() {
        let f = |t: f64| 1.0 / field.value(t);
        return Ok(quad::integrate(f, 0.0, TAU, 1e-13, 1e-14)?.value);
    }
    let k = zeros.len();
    let theta = |i: usize| zeros[i % k].theta + TAU * (i / k) as f64;
    // gap to the next zero, cyclically
    let gaps: Vec<f64> = (0..k).map(|i| theta(i + 1) - zeros[i].theta).collect();
    let windows = (0..k)
        .map(|i| {
            let prev = gaps[(i + k - 1) % k];
            let delta = MAX_WINDOW.min(0.5 * gaps[i].min(prev));
            Window::new(field, &zeros[i], delta)
        })
        .collect::<Result<Vec<_>>>()?;

    // the part of the circle outside all windows
    let recip = |t: f64| 1.0 / field.value(t);
    let mut outside = 0.0;
    for i in 0..k {
        let a = theta(i) + windows[i].delta;
        let b = theta(i + 1) - windows[(i + 1) % k].delta;
        if b > a {
            outside += quad::integrate(recip, a, b, ABS_TOL, REL_TOL)?.value;
        }
    }
    let mut mu = outside;
    for w in &windows {
        mu += w.finite_part(field)?;
    }

    let extrapolated = outside + richardson(field, &windows)?;
    let spread = (extrapolated - mu).abs();
    // NaN spreads fail too
    if spread.is_nan() || spread > CHECK_TOL * mu.abs().max(1.0) {
        return Err(Error::NonconvergentRegularization { spread });
    }
    Ok(mu)
}

/// Richardson extrapolation of the window contributions
/// `I(ε) = I₀ + Aε + Bε³ + …` to `ε = 0`.
fn richardson(field: &CircleField, windows: &[Window]) -> Result<f64> {
    let min_delta = windows
        .iter()
        .map(|w| w.delta)
        .fold(f64::INFINITY, f64::min);
    let max_order = windows.iter().map(|w| w.order).max().unwrap_or(1);
    // cutoff integrals grow like ε^{1-m}; keep ε large when m > 1
    let q: f64 = if max_order == 1 { 10.0 } else { 2.0 };
    let e1 = 1e-2f64.min(0.5 * min_delta);
    let cutoff = |eps: f64| -> Result<f64> { windows.iter().map(|w| w.cutoff(field, eps)).sum() };
    let i0 = cutoff(e1)?;
    let i1 = cutoff(e1 / q)?;
    let i2 = cutoff(e1 / (q * q))?;
    let r_a = (q * i1 - i0) / (q - 1.0);
    let r_b = (q * i2 - i1) / (q - 1.0);
    let q3 = q * q * q;
    Ok((q3 * r_b - r_a) / (q3 - 1.0))
}

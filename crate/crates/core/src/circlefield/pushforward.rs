//! Pushforward of circle fields along circle diffeomorphisms.

use std::f64::consts::TAU;
use std::sync::Arc;

use super::{CircleField, TrigPoly, DEFAULT_SAMPLED_DEPTH};
use crate::error::{Error, Result};
use crate::series;

const DIFFEO_GRID: usize = 4096;

/// An orientation-preserving circle map given by a degree-one lift
/// `h: ℝ → ℝ`, `h(θ + 2π) = h(θ) + 2π`.
pub trait CircleMap: Send + Sync {
    /// Fills `out[k]` with `h^{(k)}(θ)`.
    fn lift_derivs(&self, theta: f64, out: &mut [f64]);

    /// A lift value `u` with `h(u) ≡ φ (mod 2π)`. The default solves by
    /// safeguarded Newton on a bracketing interval.
    fn inverse(&self, phi: f64) -> f64 {
        invert_lift(self, phi)
    }
}

/// `h(θ) = θ + shift + p(θ)` for a trigonometric polynomial `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftMap {
    pub shift: f64,
    pub perturbation: TrigPoly,
}

impl LiftMap {
    pub fn new(shift: f64, perturbation: TrigPoly) -> Self {
        LiftMap {
            shift,
            perturbation,
        }
    }

    pub fn identity() -> Self {
        Self::new(0.0, TrigPoly::zero())
    }

    pub fn rotation(shift: f64) -> Self {
        Self::new(shift, TrigPoly::zero())
    }
}

impl CircleMap for LiftMap {
    fn lift_derivs(&self, theta: f64, out: &mut [f64]) {
        self.perturbation.derivs(theta, out);
        if let Some(v) = out.first_mut() {
            *v += theta + self.shift;
        }
        if let Some(v) = out.get_mut(1) {
            *v += 1.0;
        }
    }
}

fn invert_lift<M: CircleMap + ?Sized>(map: &M, phi: f64) -> f64 {
    let mut d = [0.0; 2];
    map.lift_derivs(0.0, &mut d);
    let h0 = d[0];
    // target in [h(0), h(0) + 2π), so the preimage lies in [0, 2π]
    let target = h0 + (phi - h0).rem_euclid(TAU);
    let (mut lo, mut hi) = (0.0, TAU);
    let mut x = (target - h0).clamp(lo, hi);
    for _ in 0..100 {
        map.lift_derivs(x, &mut d);
        let g = d[0] - target;
        if g == 0.0 {
            return x;
        }
        if g < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - g / d[1];
        let next = if d[1] > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) || hi - lo <= 1e-15 {
            return next;
        }
        x = next;
    }
    x
}

/// `h_*X`, the sampled field `φ ↦ h'(u) f(u)` with `u = h⁻¹(φ)`.
///
/// Derivatives come from truncated power series: with `H(s) = h(u+s) - φ`
/// and `G(s) = h'(u+s) f(u+s)`, the pushforward near `φ` is `G(H⁻¹(ε))`.
/// The derivative depth equals the input's, or 6 for exact inputs.
pub fn pushforward(field: &CircleField, map: Arc<dyn CircleMap>) -> Result<CircleField> {
    let mut min_deriv = f64::INFINITY;
    let mut d = [0.0; 2];
    for i in 0..DIFFEO_GRID {
        map.lift_derivs(TAU * i as f64 / DIFFEO_GRID as f64, &mut d);
        min_deriv = min_deriv.min(d[1]);
    }
    if min_deriv <= 0.0 || !min_deriv.is_finite() {
        return Err(Error::NotDiffeomorphism {
            min_derivative: min_deriv,
        });
    }
    let depth = field.depth().unwrap_or(DEFAULT_SAMPLED_DEPTH);
    let inner = field.clone();
    CircleField::sampled(depth, move |phi, out: &mut [f64]| {
        let len = out.len();
        if len == 0 {
            return;
        }
        let u = map.inverse(phi);
        let mut hd = vec![0.0; len + 1];
        map.lift_derivs(u, &mut hd);
        if len == 1 {
            out[0] = hd[1] * inner.value(u);
            return;
        }
        let mut fact = 1.0;
        let mut hc = vec![0.0; len + 1];
        for k in 0..=len {
            if k > 0 {
                fact *= k as f64;
            }
            hc[k] = hd[k] / fact;
        }
        hc[0] = 0.0;
        let dh: Vec<f64> = (0..len).map(|k| (k + 1) as f64 * hc[k + 1]).collect();
        let f = inner
            .taylor(u, len)
            .expect("pushforward depth never exceeds the source depth");
        let g = series::mul(&dh, &f, len);
        let s = series::reversion(&hc, len).expect("h' > 0 was checked on construction");
        let composed = series::compose(&g, &s, len);
        let mut fact = 1.0;
        for k in 0..len {
            if k > 0 {
                fact *= k as f64;
            }
            out[k] = composed[k] * fact;
        }
    })
}

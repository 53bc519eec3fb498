//! Analytic vector fields `f(θ) ∂θ` on the circle and on closed intervals.
//!
//! Two circle representations are supported. [`TrigPoly`] is exact: every
//! derivative is available in closed form and zeros are located through the
//! companion matrix of the associated Laurent polynomial in `z = e^{iθ}`.
//! [`SampledField`] wraps an evaluator closure that reports the value and a
//! fixed number of derivatives; pushforwards of exact fields are sampled.

mod flow;
mod interval;
mod pushforward;
mod zeros;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use flow::flow;
pub use interval::{
    double_interval, double_interval_unchecked, Domain, IntervalField, IntervalZero,
};
pub use pushforward::{pushforward, CircleMap, LiftMap};
pub use zeros::find_zeros;

/// Default zero threshold for exact fields.
pub const TOL_ZERO_EXACT: f64 = 1e-9;
/// Default zero threshold for sampled fields.
pub const TOL_ZERO_SAMPLED: f64 = 1e-6;
/// Default derivative depth of sampled fields.
pub const DEFAULT_SAMPLED_DEPTH: usize = 6;
/// Smallest derivative depth a sampled field may declare.
pub const MIN_SAMPLED_DEPTH: usize = 4;

const NORM_GRID: usize = 1024;

/// `a0 + Σ_{j=1..N} (a_j cos jθ + b_j sin jθ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    a0: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigPoly {
    pub fn new(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if cos.len() != sin.len() {
            return Err(Error::InvalidInput(format!(
                "cos and sin coefficient lists differ in length ({} vs {})",
                cos.len(),
                sin.len()
            )));
        }
        if !a0.is_finite() || cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "non-finite trigonometric coefficient".into(),
            ));
        }
        Ok(TrigPoly { a0, cos, sin })
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly {
            a0: c,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `amp * cos(jθ)` for `j >= 1`.
    pub fn cos_mode(j: usize, amp: f64) -> Self {
        let mut p = TrigPoly {
            a0: 0.0,
            cos: vec![0.0; j],
            sin: vec![0.0; j],
        };
        p.cos[j - 1] = amp;
        p
    }

    /// `amp * sin(jθ)` for `j >= 1`.
    pub fn sin_mode(j: usize, amp: f64) -> Self {
        let mut p = TrigPoly {
            a0: 0.0,
            cos: vec![0.0; j],
            sin: vec![0.0; j],
        };
        p.sin[j - 1] = amp;
        p
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    /// Highest frequency with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        (0..self.cos.len())
            .rev()
            .find(|&j| self.cos[j] != 0.0 || self.sin[j] != 0.0)
            .map_or(0, |j| j + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a0 == 0.0 && self.degree() == 0
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let n = self.cos.len().max(other.cos.len());
        let get = |v: &[f64], j: usize| v.get(j).copied().unwrap_or(0.0);
        TrigPoly {
            a0: self.a0 + other.a0,
            cos: (0..n)
                .map(|j| get(&self.cos, j) + get(&other.cos, j))
                .collect(),
            sin: (0..n)
                .map(|j| get(&self.sin, j) + get(&other.sin, j))
                .collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> TrigPoly {
        TrigPoly {
            a0: self.a0 * c,
            cos: self.cos.iter().map(|x| x * c).collect(),
            sin: self.sin.iter().map(|x| x * c).collect(),
        }
    }

    /// The field `φ ↦ -f(-φ)`, i.e. the pushforward under `θ ↦ -θ`.
    pub fn reflected(&self) -> TrigPoly {
        TrigPoly {
            a0: -self.a0,
            cos: self.cos.iter().map(|x| -x).collect(),
            sin: self.sin.clone(),
        }
    }

    /// Sum of absolute coefficient values; bounds `‖f‖_∞`.
    pub fn l1_norm(&self) -> f64 {
        self.a0.abs()
            + self
                .cos
                .iter()
                .chain(&self.sin)
                .map(|c| c.abs())
                .sum::<f64>()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut acc = self.a0;
        for j in 0..self.cos.len() {
            let x = (j + 1) as f64 * theta;
            acc += self.cos[j] * x.cos() + self.sin[j] * x.sin();
        }
        acc
    }

    /// Fills `out[k]` with `f^{(k)}(θ)`.
    pub fn derivs(&self, theta: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if out.is_empty() {
            return;
        }
        out[0] = self.a0;
        for j in 0..self.cos.len() {
            let (a, b) = (self.cos[j], self.sin[j]);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let freq = (j + 1) as f64;
            let (s, c) = (freq * theta).sin_cos();
            let mut scale = 1.0;
            for (k, slot) in out.iter_mut().enumerate() {
                // d^k/dθ^k shifts the phase by kπ/2
                let (ck, sk) = match k % 4 {
                    0 => (c, s),
                    1 => (-s, c),
                    2 => (-c, -s),
                    _ => (s, -c),
                };
                *slot += scale * (a * ck + b * sk);
                scale *= freq;
            }
        }
    }

    /// Taylor coefficients `f^{(k)}(θ)/k!` for `k < len`.
    pub fn taylor(&self, theta: f64, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        self.derivs(theta, &mut out);
        let mut fact = 1.0;
        for (k, v) in out.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *v /= fact;
        }
        out
    }
}

type Evaluator = dyn Fn(f64, &mut [f64]) + Send + Sync;

/// A field known only through an evaluator. The closure receives `θ` and a
/// buffer whose length is the number of requested derivatives plus one; it
/// must fill `out[k]` with `f^{(k)}(θ)`.
#[derive(Clone)]
pub struct SampledField {
    eval: Arc<Evaluator>,
    depth: usize,
}

impl SampledField {
    pub fn new<F>(depth: usize, eval: F) -> Result<Self>
    where
        F: Fn(f64, &mut [f64]) + Send + Sync + 'static,
    {
        if depth < MIN_SAMPLED_DEPTH {
            return Err(Error::InvalidInput(format!(
                "sampled fields must expose at least {MIN_SAMPLED_DEPTH} derivatives, got {depth}"
            )));
        }
        Ok(SampledField {
            eval: Arc::new(eval),
            depth,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

impl fmt::Debug for SampledField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledField")
            .field("depth", &self.depth)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum CircleField {
    Exact(TrigPoly),
    Sampled(SampledField),
}

impl From<TrigPoly> for CircleField {
    fn from(p: TrigPoly) -> Self {
        CircleField::Exact(p)
    }
}

impl CircleField {
    pub fn sampled<F>(depth: usize, eval: F) -> Result<Self>
    where
        F: Fn(f64, &mut [f64]) + Send + Sync + 'static,
    {
        SampledField::new(depth, eval).map(CircleField::Sampled)
    }

    /// Highest available derivative order; `None` means unlimited.
    pub fn depth(&self) -> Option<usize> {
        match self {
            CircleField::Exact(_) => None,
            CircleField::Sampled(s) => Some(s.depth),
        }
    }

    pub fn default_tol_zero(&self) -> f64 {
        match self {
            CircleField::Exact(_) => TOL_ZERO_EXACT,
            CircleField::Sampled(_) => TOL_ZERO_SAMPLED,
        }
    }

    pub fn as_trig(&self) -> Option<&TrigPoly> {
        match self {
            CircleField::Exact(p) => Some(p),
            CircleField::Sampled(_) => None,
        }
    }

    /// `f^{(deriv)}(θ)`.
    pub fn eval(&self, theta: f64, deriv: usize) -> Result<f64> {
        let mut buf = vec![0.0; deriv + 1];
        self.derivs(theta, &mut buf)?;
        Ok(buf[deriv])
    }

    pub fn value(&self, theta: f64) -> f64 {
        match self {
            CircleField::Exact(p) => p.eval(theta),
            CircleField::Sampled(s) => {
                let mut buf = [0.0];
                (s.eval)(theta, &mut buf);
                buf[0]
            }
        }
    }

    /// Fills `out[k] = f^{(k)}(θ)` for every `k < out.len()`.
    pub fn derivs(&self, theta: f64, out: &mut [f64]) -> Result<()> {
        match self {
            CircleField::Exact(p) => {
                p.derivs(theta, out);
                Ok(())
            }
            CircleField::Sampled(s) => {
                if out.len() > s.depth + 1 {
                    return Err(Error::DerivDepthExceeded {
                        requested: out.len() - 1,
                        available: s.depth,
                    });
                }
                (s.eval)(theta, out);
                Ok(())
            }
        }
    }

    pub fn taylor(&self, theta: f64, len: usize) -> Result<Vec<f64>> {
        match self {
            CircleField::Exact(p) => Ok(p.taylor(theta, len)),
            CircleField::Sampled(s) => {
                if len > s.depth + 1 {
                    return Err(Error::InsufficientDerivativeDepth {
                        needed: len - 1,
                        available: s.depth,
                    });
                }
                let mut out = vec![0.0; len];
                (s.eval)(theta, &mut out);
                let mut fact = 1.0;
                for (k, v) in out.iter_mut().enumerate() {
                    if k > 0 {
                        fact *= k as f64;
                    }
                    *v /= fact;
                }
                Ok(out)
            }
        }
    }

    /// `max |f|` over a uniform grid of `n` points.
    pub fn grid_sup(&self, n: usize) -> f64 {
        (0..n)
            .map(|i| self.value(TAU * i as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    }

    /// Rejects identically zero fields: a nonzero coefficient for exact
    /// fields, `max |f| > tol_zero` on the 1024-point grid for sampled ones.
    pub fn ensure_nonzero(&self, tol_zero: f64) -> Result<()> {
        let zero = match self {
            CircleField::Exact(p) => p.is_zero(),
            CircleField::Sampled(_) => self.grid_sup(NORM_GRID) <= tol_zero,
        };
        if zero {
            Err(Error::IdenticallyZero)
        } else {
            Ok(())
        }
    }

    /// `max(1, ‖f‖_∞)` estimated on the 1024-point grid.
    pub fn scale(&self) -> f64 {
        self.grid_sup(NORM_GRID).max(1.0)
    }
}

/// Standard representatives of the conjugacy classes of involutions used
/// by the circle-bundle construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Involution {
    Identity,
    /// Exchanges the two circle components; trivial on each circle.
    ComponentSwap,
    /// `θ ↦ θ + π`.
    FreeRotation,
    /// `θ ↦ 2c - θ`, fixing `c` and `c + π`.
    Reflection {
        axis: f64,
    },
}

impl Involution {
    pub fn apply(&self, theta: f64) -> f64 {
        match *self {
            Involution::Identity | Involution::ComponentSwap => theta,
            Involution::FreeRotation => theta + PI,
            Involution::Reflection { axis } => 2.0 * axis - theta,
        }
    }

    /// Number of fixed points on the circle, `None` for the identity.
    pub fn fixed_points(&self) -> Option<usize> {
        match self {
            Involution::Identity => None,
            Involution::ComponentSwap | Involution::FreeRotation => Some(0),
            Involution::Reflection { .. } => Some(2),
        }
    }

    /// Same conjugacy class (all reflections are conjugate to each other).
    pub fn same_class(&self, other: &Involution) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

/// A zero of a circle field.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroDatum {
    pub theta: f64,
    pub order: usize,
    /// Taylor coefficients of `f` at `theta`: `order + 4` of them, or as
    /// many as a sampled field's depth allows.
    pub taylor: Vec<f64>,
}

/// Checks `τ_* X = X` on a 1024-point grid.
pub fn validate_involution(field: &CircleField, tau: Involution, tol: f64) -> bool {
    let scale = field.scale();
    let bound = tol * scale;
    match tau {
        Involution::Identity | Involution::ComponentSwap => true,
        Involution::FreeRotation => (0..NORM_GRID).all(|i| {
            let t = TAU * i as f64 / NORM_GRID as f64;
            (field.value(t + PI) - field.value(t)).abs() <= bound
        }),
        Involution::Reflection { axis } => (0..NORM_GRID).all(|i| {
            let t = TAU * i as f64 / NORM_GRID as f64;
            (field.value(2.0 * axis - t) + field.value(t)).abs() <= bound
        }),
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed shortest angular difference `b - a` in `(-π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

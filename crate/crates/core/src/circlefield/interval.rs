//! Polynomial vector fields `X(t) ∂t` on `[-1, 1]` or `[-1, 0]`, and the
//! doubling that turns a field on `[-1, 1]` into a circle field.

use super::zeros::Local;
use super::{CircleField, TrigPoly, TOL_ZERO_EXACT};
use crate::error::{Error, Result};
use crate::poly;

const CANDIDATE_BAND: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    /// `[-1, 1]`
    Full,
    /// `[-1, 0]`
    Half,
}

impl Domain {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Domain::Full => (-1.0, 1.0),
            Domain::Half => (-1.0, 0.0),
        }
    }
}

/// `X(t) = Σ coeffs[k] t^k` on a closed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalField {
    domain: Domain,
    coeffs: Vec<f64>,
}

/// A zero of an interval field.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalZero {
    pub t: f64,
    pub order: usize,
    /// `order + 4` Taylor coefficients of `X` at `t`.
    pub taylor: Vec<f64>,
}

impl IntervalField {
    pub fn new(domain: Domain, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "non-finite polynomial coefficient".into(),
            ));
        }
        Ok(IntervalField { domain, coeffs })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64) -> f64 {
        poly::eval(&self.coeffs, t)
    }

    /// `X^{(k)}(t)` for `k < len`.
    pub fn derivs(&self, t: f64, len: usize) -> Vec<f64> {
        poly::derivs(&self.coeffs, t, len)
    }

    pub fn derivative_at(&self, t: f64) -> f64 {
        self.derivs(t, 2)[1]
    }

    /// `(X, X')` at the left and right endpoints.
    pub fn endpoint_data(&self) -> [(f64, f64); 2] {
        let (a, b) = self.domain.bounds();
        let l = self.derivs(a, 2);
        let r = self.derivs(b, 2);
        [(l[0], l[1]), (r[0], r[1])]
    }

    pub fn is_zero(&self) -> bool {
        poly::trim(&self.coeffs).is_empty()
    }

    /// Zero threshold `tol · max(1, Σ|c_k|)`.
    pub fn threshold(&self, tol: f64) -> f64 {
        tol * self.coeffs.iter().map(|c| c.abs()).sum::<f64>().max(1.0)
    }

    /// Pushforward along `t ↦ -t`, i.e. `-X(-t)`. Only defined on `[-1, 1]`.
    pub fn flipped(&self) -> Result<IntervalField> {
        if self.domain != Domain::Full {
            return Err(Error::InvalidInput(
                "only fields on [-1, 1] can be flipped".into(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { -c } else { c })
            .collect();
        Ok(IntervalField {
            domain: Domain::Full,
            coeffs,
        })
    }

    /// Odd extension of a field on `[-1, 0]` to `[-1, 1]`. Requires the
    /// even-degree coefficients to vanish within `tol`, since otherwise the
    /// extension is not analytic at 0.
    pub fn odd_extension(&self, tol: f64) -> Result<IntervalField> {
        let thr = self.threshold(tol);
        if let Some((k, c)) = self
            .coeffs
            .iter()
            .enumerate()
            .find(|&(k, c)| k % 2 == 0 && c.abs() > thr)
        {
            return Err(Error::InvalidInput(format!(
                "coefficient of t^{k} is {c}, odd extension is not analytic"
            )));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { 0.0 } else { c })
            .collect();
        Ok(IntervalField {
            domain: Domain::Full,
            coeffs,
        })
    }

    /// Zeros in the closed domain, in increasing `t`.
    pub fn zeros(&self, tol_zero: f64) -> Result<Vec<IntervalZero>> {
        let coeffs = poly::trim(&self.coeffs);
        if coeffs.is_empty() {
            return Err(Error::IdenticallyZero);
        }
        let (a, b) = self.domain.bounds();
        let thr = self.threshold(tol_zero);
        let mut cands: Vec<f64> = poly::real_poly_roots(coeffs)
            .into_iter()
            .filter(|z| {
                z.im.abs() < CANDIDATE_BAND
                    && z.re > a - CANDIDATE_BAND
                    && z.re < b + CANDIDATE_BAND
            })
            .map(|z| z.re)
            .collect();
        cands.sort_by(f64::total_cmp);
        let derivs = |x: f64, out: &mut [f64]| {
            let d = poly::derivs(coeffs, x, out.len());
            out.copy_from_slice(&d);
        };
        let local = Local {
            derivs: &derivs,
            thr,
            max_order: coeffs.len(),
        };
        let mut found: Vec<(f64, usize)> = Vec::new();
        let mut start = 0;
        for i in 1..=cands.len() {
            if i == cands.len() || cands[i] - cands[i - 1] >= CANDIDATE_BAND {
                found.extend(local.resolve(&cands[start..i], 0)?);
                start = i;
            }
        }
        // endpoints are located exactly when X vanishes there
        for end in [a, b] {
            if let Some(o) = local.order_at(end).filter(|&o| o > 0) {
                found.retain(|z| (z.0 - end).abs() > CANDIDATE_BAND);
                found.push((end, o));
            }
        }
        found.retain(|z| z.0 >= a && z.0 <= b);
        found.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(found
            .into_iter()
            .map(|(t, order)| IntervalZero {
                t,
                order,
                taylor: poly::taylor(coeffs, t, order + 4),
            })
            .collect())
    }
}

/// Checks `X(±1) = 0` and `X'(±1) = 1`, then doubles.
pub fn double_interval(field: &IntervalField) -> Result<CircleField> {
    if field.domain != Domain::Full {
        return Err(Error::EndpointConstraintViolated(
            "doubling needs a field on [-1, 1]".into(),
        ));
    }
    let thr = field.threshold(TOL_ZERO_EXACT);
    let [(xl, dl), (xr, dr)] = field.endpoint_data();
    if xl.abs() > thr || xr.abs() > thr {
        return Err(Error::EndpointConstraintViolated(format!(
            "X(-1) = {xl}, X(1) = {xr}, both must vanish"
        )));
    }
    if (dl - 1.0).abs() > thr || (dr - 1.0).abs() > thr {
        return Err(Error::EndpointConstraintViolated(format!(
            "X'(-1) = {dl}, X'(1) = {dr}, both must equal 1"
        )));
    }
    double_interval_unchecked(field)
}

/// The circle field `f(θ) = X(-cos θ) / sin θ`, extended analytically.
///
/// Writing `X = (1 - t²) Y`, this is the exact sine series
/// `f(θ) = sin θ · Y(-cos θ)`. Only the vanishing of `X` at `±1` is required;
/// the remainder of the division by `1 - t²` is discarded.
pub fn double_interval_unchecked(field: &IntervalField) -> Result<CircleField> {
    if field.domain != Domain::Full {
        return Err(Error::EndpointConstraintViolated(
            "doubling needs a field on [-1, 1]".into(),
        ));
    }
    let thr = field.threshold(TOL_ZERO_EXACT);
    let [(xl, _), (xr, _)] = field.endpoint_data();
    if xl.abs() > thr || xr.abs() > thr {
        return Err(Error::EndpointConstraintViolated(format!(
            "X(-1) = {xl}, X(1) = {xr}, both must vanish"
        )));
    }
    // Y = X / (1 - t^2) = -X / ((t - 1)(t + 1))
    let y: Vec<f64> = poly::deflate(&poly::deflate(field.coeffs(), 1.0), -1.0)
        .iter()
        .map(|c| -c)
        .collect();

    // cosine series of Y(-cos θ) by Horner in -cos θ
    let mut cs: Vec<f64> = Vec::new();
    for &c in y.iter().rev() {
        let mut next = vec![0.0; cs.len() + 1];
        for (j, &v) in cs.iter().enumerate() {
            // -cos θ · cos jθ = -(cos(j+1)θ + cos(j-1)θ)/2, and -cos θ · 1 = -cos θ
            if j == 0 {
                next[1] -= v;
            } else {
                next[j + 1] -= 0.5 * v;
                next[j - 1] -= 0.5 * v;
            }
        }
        if next.is_empty() {
            next.push(0.0);
        }
        next[0] += c;
        cs = next;
    }
    // sin θ · cos jθ = (sin(j+1)θ - sin(j-1)θ)/2
    let n = cs.len();
    let mut sin = vec![0.0; n];
    for (j, &v) in cs.iter().enumerate() {
        if j == 0 {
            sin[0] += v;
        } else {
            sin[j] += 0.5 * v;
            if j >= 2 {
                sin[j - 2] -= 0.5 * v;
            }
        }
    }
    Ok(CircleField::Exact(TrigPoly::new(0.0, vec![0.0; n], sin)?))
}

//! Invariants of polynomial fields on an interval vanishing at both ends.
//!
//! Each segment between consecutive zeros carries the one-sided Hadamard
//! finite part of `∫ dt/X`: power divergences and `ln ε` are discarded at
//! each end. Under `t ↦ -t` the records reverse and the gap values change
//! sign. The gap values are not invariant under general conjugacy (a change
//! of coordinates at a zero shifts them by residue times a logarithm), so
//! comparisons based on them are conservative.

use super::canonical::MatchLevel;
use super::laurent_from_taylor;
use crate::circlefield::{IntervalField, TOL_ZERO_EXACT};
use crate::error::{Error, Result};
use crate::poly;
use crate::quad;
use crate::series;

const MAX_WINDOW: f64 = 0.1;
const REGULAR_DEGREE: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRecord {
    pub t: f64,
    pub order: usize,
    pub residue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalInvariants {
    /// Zeros from left to right, endpoints included.
    pub records: Vec<IntervalRecord>,
    /// `gaps[i]` belongs to the segment between records `i` and `i + 1`.
    pub gaps: Vec<f64>,
}

impl IntervalInvariants {
    /// The invariants of the field pushed forward along `t ↦ -t`.
    pub fn flipped(&self) -> IntervalInvariants {
        IntervalInvariants {
            records: self
                .records
                .iter()
                .rev()
                .map(|r| IntervalRecord {
                    t: -r.t,
                    order: r.order,
                    residue: r.residue,
                })
                .collect(),
            gaps: self.gaps.iter().rev().map(|g| -g).collect(),
        }
    }

    pub(crate) fn level(&self, other: &IntervalInvariants, tol: f64) -> MatchLevel {
        if self.records.len() != other.records.len() {
            return MatchLevel::Mismatch;
        }
        let mut acc = MatchLevel::Match;
        for (a, b) in self.records.iter().zip(&other.records) {
            if a.order != b.order {
                return MatchLevel::Mismatch;
            }
            acc = acc.and(MatchLevel::compare(a.residue, b.residue, tol));
        }
        for (a, b) in self.gaps.iter().zip(&other.gaps) {
            acc = acc.and(MatchLevel::compare(*a, *b, tol));
        }
        acc
    }
}

struct EndModel {
    /// `sing[j - 1] = c₋ⱼ`.
    sing: Vec<f64>,
    reg: Vec<f64>,
    r_taylor: f64,
}

impl EndModel {
    fn new(coeffs: &[f64], t: f64, m: usize, delta: f64) -> Option<Self> {
        let taylor = poly::taylor(coeffs, t, 2 * m + REGULAR_DEGREE + 1);
        let c = laurent_from_taylor(&taylor, m, m + REGULAR_DEGREE + 1)?;
        let r_taylor = (0.25 * delta).min(1e-15f64.powf(1.0 / (m + REGULAR_DEGREE + 1) as f64));
        Some(EndModel {
            sing: (1..=m).map(|j| c[m - j]).collect(),
            reg: c[m..].to_vec(),
            r_taylor,
        })
    }

    fn singular(&self, s: f64) -> f64 {
        let inv = 1.0 / s;
        let mut p = inv;
        self.sing.iter().fold(0.0, |acc, &c| {
            let v = acc + c * p;
            p *= inv;
            v
        })
    }

    /// Finite part of `∫ ds / X(z + s)` over `[0, δ]` (`right = false`) or
    /// `[-δ, 0]` (`right = true`).
    fn one_sided(&self, coeffs: &[f64], z: f64, delta: f64, right: bool) -> Result<f64> {
        let r = self.r_taylor;
        let regular = |s: f64| 1.0 / poly::eval(coeffs, z + s) - self.singular(s);
        let (lo, hi) = if right { (-delta, -r) } else { (r, delta) };
        let mut total = quad::integrate(regular, lo, hi, 1e-13, 1e-13)?.value;
        let inner = series::integrate(&self.reg, self.reg.len() + 1);
        total += if right {
            -series::eval(&inner, -r)
        } else {
            series::eval(&inner, r)
        };
        for (i, &c) in self.sing.iter().enumerate() {
            let j = i + 1;
            let fp = if j == 1 {
                delta.ln()
            } else {
                delta.powi(1 - j as i32) / (1.0 - j as f64)
            };
            let sign = if right && j % 2 == 1 { -1.0 } else { 1.0 };
            total += c * sign * fp;
        }
        Ok(total)
    }
}

/// Zero records and gap finite parts. The field must vanish at both ends.
pub fn interval_invariants(field: &IntervalField, tol_zero: f64) -> Result<IntervalInvariants> {
    let (a, b) = field.domain().bounds();
    let zeros = field.zeros(tol_zero)?;
    if zeros.first().map(|z| z.t) != Some(a) || zeros.last().map(|z| z.t) != Some(b) {
        return Err(Error::EndpointConstraintViolated(format!(
            "field must vanish at {a} and {b}"
        )));
    }
    let coeffs = poly::trim(field.coeffs());
    let mut records = Vec::with_capacity(zeros.len());
    for z in &zeros {
        let c = laurent_from_taylor(&z.taylor, z.order, z.order).ok_or_else(|| {
            Error::ZeroIsolationFailure {
                theta: z.t,
                reason: "leading Taylor coefficient vanishes".into(),
            }
        })?;
        records.push(IntervalRecord {
            t: z.t,
            order: z.order,
            residue: c[z.order - 1],
        });
    }
    let mut gaps = Vec::with_capacity(zeros.len().saturating_sub(1));
    for w in zeros.windows(2) {
        let (l, r) = (&w[0], &w[1]);
        let delta = MAX_WINDOW.min((r.t - l.t) / 3.0);
        let fail = |t: f64| Error::ZeroIsolationFailure {
            theta: t,
            reason: "leading Taylor coefficient vanishes".into(),
        };
        let left = EndModel::new(coeffs, l.t, l.order, delta).ok_or_else(|| fail(l.t))?;
        let right = EndModel::new(coeffs, r.t, r.order, delta).ok_or_else(|| fail(r.t))?;
        let middle = quad::integrate(
            |t| 1.0 / poly::eval(coeffs, t),
            l.t + delta,
            r.t - delta,
            1e-13,
            1e-13,
        )?
        .value;
        gaps.push(
            middle
                + left.one_sided(coeffs, l.t, delta, false)?
                + right.one_sided(coeffs, r.t, delta, true)?,
        );
    }
    Ok(IntervalInvariants { records, gaps })
}

/// Entrywise agreement of interval invariants, optionally also after `t ↦ -t`.
pub fn equivalent_interval(
    a: &IntervalField,
    b: &IntervalField,
    allow_flip: bool,
    tol_match: f64,
) -> Result<bool> {
    let ia = interval_invariants(a, TOL_ZERO_EXACT)?;
    let ib = interval_invariants(b, TOL_ZERO_EXACT)?;
    equivalent_interval_invariants(&ia, &ib, allow_flip, tol_match)
}

pub(crate) fn equivalent_interval_invariants(
    a: &IntervalInvariants,
    b: &IntervalInvariants,
    allow_flip: bool,
    tol_match: f64,
) -> Result<bool> {
    let mut options = vec![a.level(b, tol_match)];
    if allow_flip {
        options.push(a.level(&b.flipped(), tol_match));
    }
    MatchLevel::decide(options, "interval invariants")
}

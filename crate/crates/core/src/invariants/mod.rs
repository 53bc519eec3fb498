//! Complete conjugacy invariants of analytic circle fields.
//!
//! For `X = f ∂θ` the invariants are the number `k` of zeros, an orientation
//! `σ`, the cyclic list of (order, residue) pairs in increasing angle, and a
//! global invariant `μ`. Residues are the `c₋₁` coefficient of `1/f` at the
//! zero. `μ` is the symmetric-cutoff finite part of `∮ dθ/f`; it equals the
//! plain integral when `k = 0`.
//!
//! Dihedral relabelings act on `(σ, zero list)`: rotations shift the list and
//! keep `σ`, reflections reverse it and flip `σ`, and `μ` is fixed.

mod canonical;
mod finite_part;
mod interval;

use crate::circlefield::{find_zeros, CircleField, ZeroDatum};
use crate::error::{Error, Result};
use crate::series;

pub(crate) use canonical::level as data_level;
pub use canonical::{
    canonical_key, dihedral_images, equivalent_invariants, CanonicalKey, MatchLevel,
};
pub use finite_part::global_invariant;
pub use interval::{equivalent_interval, interval_invariants, IntervalInvariants, IntervalRecord};

/// Laurent coefficients of `1/f` about an order-`m` zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentData {
    pub center: f64,
    pub pole_order: usize,
    /// `c₋ₘ, …, c₋₁, c₀, …, c_depth`.
    pub coeffs: Vec<f64>,
}

impl LaurentData {
    /// `c_j` for `-m <= j`, zero outside the stored range.
    pub fn coeff(&self, j: isize) -> f64 {
        let idx = j + self.pole_order as isize;
        if idx < 0 {
            return 0.0;
        }
        self.coeffs.get(idx as usize).copied().unwrap_or(0.0)
    }
}

/// The first `count` Laurent coefficients `c₋ₘ, c₋ₘ₊₁, …` of `1/f`, given
/// Taylor coefficients of `f` whose first nonzero entry has index `m`.
pub(crate) fn laurent_from_taylor(taylor: &[f64], m: usize, count: usize) -> Option<Vec<f64>> {
    series::recip(taylor.get(m..)?, count)
}

/// Laurent expansion `c₋ₘ … c_depth` of `1/f` at a zero.
pub fn laurent_at_zero(field: &CircleField, zero: &ZeroDatum, depth: usize) -> Result<LaurentData> {
    let m = zero.order;
    let highest = 2 * m + depth;
    if let Some(p) = field.depth() {
        if highest > p {
            return Err(Error::InsufficientDerivativeDepth {
                needed: highest,
                available: p,
            });
        }
    }
    let taylor = field.taylor(zero.theta, highest + 1)?;
    let coeffs = laurent_from_taylor(&taylor, m, m + depth + 1).ok_or_else(|| {
        Error::ZeroIsolationFailure {
            theta: zero.theta,
            reason: format!("leading Taylor coefficient of order {m} vanishes"),
        }
    })?;
    Ok(LaurentData {
        center: zero.theta,
        pole_order: m,
        coeffs,
    })
}

/// `c₋₁` of `1/f` at the zero.
pub fn residue(field: &CircleField, zero: &ZeroDatum) -> Result<f64> {
    let m = zero.order;
    if let Some(p) = field.depth() {
        if 2 * m - 1 > p {
            return Err(Error::InsufficientDerivativeDepth {
                needed: 2 * m - 1,
                available: p,
            });
        }
    }
    let taylor = field.taylor(zero.theta, 2 * m)?;
    let c = laurent_from_taylor(&taylor, m, m).ok_or_else(|| Error::ZeroIsolationFailure {
        theta: zero.theta,
        reason: format!("leading Taylor coefficient of order {m} vanishes"),
    })?;
    Ok(c[m - 1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroRecord {
    pub theta: f64,
    pub order: usize,
    pub residue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitchinInvariants {
    pub k: usize,
    /// `+1` or `-1`.
    pub sigma: i8,
    /// Zeros in increasing angle.
    pub zeros: Vec<ZeroRecord>,
    pub mu: f64,
    /// Zero threshold the invariants were computed with.
    pub tol: f64,
}

impl HitchinInvariants {
    /// `(order, residue)` pairs in cyclic order.
    pub fn zero_data(&self) -> Vec<(usize, f64)> {
        self.zeros.iter().map(|z| (z.order, z.residue)).collect()
    }
}

/// Invariants with the field's default zero threshold.
pub fn invariants(field: &CircleField) -> Result<HitchinInvariants> {
    invariants_with(field, field.default_tol_zero())
}

pub fn invariants_with(field: &CircleField, tol_zero: f64) -> Result<HitchinInvariants> {
    let zeros = find_zeros(field, tol_zero)?;
    let records = zeros
        .iter()
        .map(|z| {
            Ok(ZeroRecord {
                theta: z.theta,
                order: z.order,
                residue: residue(field, z)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mu = global_invariant(field, &zeros)?;
    let sigma = if zeros.is_empty() && field.value(0.0) < 0.0 {
        -1
    } else {
        1
    };
    Ok(HitchinInvariants {
        k: zeros.len(),
        sigma,
        zeros: records,
        mu,
        tol: tol_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circlefield::TrigPoly;
    use std::f64::consts::PI;

    fn exact(p: TrigPoly) -> CircleField {
        CircleField::from(p)
    }

    fn one_minus_cos() -> CircleField {
        exact(TrigPoly::new(1.0, vec![-1.0], vec![0.0]).unwrap())
    }

    #[test]
    fn laurent_of_sine() {
        let f = exact(TrigPoly::sin_mode(1, 1.0));
        let z = &find_zeros(&f, 1e-9).unwrap()[0];
        let l = laurent_at_zero(&f, z, 1).unwrap();
        // 1/sin θ = 1/θ + θ/6 + …
        assert!((l.coeff(-1) - 1.0).abs() < 1e-14);
        assert!(l.coeff(0).abs() < 1e-14);
        assert!((l.coeff(1) - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn laurent_of_double_zero() {
        let f = one_minus_cos();
        let z = &find_zeros(&f, 1e-9).unwrap()[0];
        let l = laurent_at_zero(&f, z, 0).unwrap();
        assert!((l.coeff(-2) - 2.0).abs() < 1e-9);
        assert!(l.coeff(-1).abs() < 1e-7);
        assert!((l.coeff(0) - 1.0 / 6.0).abs() < 1e-6);
    }

    #[test]
    fn residues_of_sine() {
        let f = exact(TrigPoly::sin_mode(1, 1.0));
        let z = find_zeros(&f, 1e-9).unwrap();
        assert!((residue(&f, &z[0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((residue(&f, &z[1]).unwrap() + 1.0).abs() < 1e-15);
        let g = one_minus_cos();
        let z = find_zeros(&g, 1e-9).unwrap();
        assert!(residue(&g, &z[0]).unwrap().abs() < 1e-7);
    }

    #[test]
    fn insufficient_depth_reported() {
        let f = CircleField::sampled(4, |t, out: &mut [f64]| {
            for (k, v) in out.iter_mut().enumerate() {
                *v = (t + k as f64 * PI / 2.0).sin();
            }
        })
        .unwrap();
        let z = find_zeros(&f, 1e-6).unwrap();
        assert!(matches!(
            laurent_at_zero(&f, &z[0], 3),
            Err(Error::InsufficientDerivativeDepth { needed: 5, .. })
        ));
        assert!(laurent_at_zero(&f, &z[0], 2).is_ok());
    }

    #[test]
    fn invariants_of_sine() {
        let inv = invariants(&exact(TrigPoly::sin_mode(1, 1.0))).unwrap();
        assert_eq!(inv.k, 2);
        assert_eq!(inv.sigma, 1);
        assert_eq!(inv.zero_data(), vec![(1, 1.0), (1, -1.0)]);
        assert!(inv.mu.abs() < 1e-10);
    }

    #[test]
    fn invariants_of_constants() {
        let two = invariants(&exact(TrigPoly::constant(2.0))).unwrap();
        assert_eq!((two.k, two.sigma), (0, 1));
        assert!((two.mu - PI).abs() < 1e-13);
        let neg = invariants(&exact(TrigPoly::constant(-1.0))).unwrap();
        assert_eq!(neg.sigma, -1);
        assert!((neg.mu + 2.0 * PI).abs() < 1e-13);
    }
}

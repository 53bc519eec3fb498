//! Dihedral normal forms and tolerance-aware equivalence.

use std::cmp::Ordering;

use super::HitchinInvariants;
use crate::error::{Error, Result};

/// Outcome of a tolerance comparison. Values whose relative difference lies
/// in `(tol, 10 tol]` are too close to call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MatchLevel {
    Match,
    Ambiguous,
    Mismatch,
}

impl MatchLevel {
    pub fn compare(x: f64, y: f64, tol: f64) -> MatchLevel {
        let d = (x - y).abs() / 1f64.max(x.abs()).max(y.abs());
        if d <= tol {
            MatchLevel::Match
        } else if d <= 10.0 * tol {
            MatchLevel::Ambiguous
        } else {
            MatchLevel::Mismatch
        }
    }

    /// The worse of two outcomes.
    pub fn and(self, other: MatchLevel) -> MatchLevel {
        self.max(other)
    }

    /// Collapses the outcomes of alternative matchings: any clean match wins,
    /// otherwise any ambiguity is reported.
    pub fn decide(alternatives: impl IntoIterator<Item = MatchLevel>, what: &str) -> Result<bool> {
        let best = alternatives
            .into_iter()
            .min()
            .unwrap_or(MatchLevel::Mismatch);
        match best {
            MatchLevel::Match => Ok(true),
            MatchLevel::Mismatch => Ok(false),
            MatchLevel::Ambiguous => Err(Error::AmbiguousMatch(format!(
                "{what} agree only within 10x the tolerance"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalKey {
    pub k: usize,
    pub mu: f64,
    pub sequence: Vec<(usize, f64)>,
    pub sigma: i8,
    /// Another dihedral image equals the chosen one within tolerance without
    /// being identical, so the choice depends on rounding.
    pub near_tie: bool,
}

/// The `2k` images of `(σ, zero data)`: `k` rotations followed by `k`
/// reflections. For `k = 0` the single identity image.
pub fn dihedral_images(sigma: i8, data: &[(usize, f64)]) -> Vec<(i8, Vec<(usize, f64)>)> {
    let k = data.len();
    if k == 0 {
        return vec![(sigma, Vec::new())];
    }
    let mut out = Vec::with_capacity(2 * k);
    for s in 0..k {
        out.push((sigma, (0..k).map(|i| data[(i + s) % k]).collect()));
    }
    let reversed: Vec<(usize, f64)> = data.iter().rev().copied().collect();
    for s in 0..k {
        out.push((-sigma, (0..k).map(|i| reversed[(i + s) % k]).collect()));
    }
    out
}

fn exact_cmp(a: &(i8, Vec<(usize, f64)>), b: &(i8, Vec<(usize, f64)>)) -> Ordering {
    for (x, y) in a.1.iter().zip(&b.1) {
        let o = x.0.cmp(&y.0).then(x.1.total_cmp(&y.1));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.0.cmp(&b.0)
}

pub(crate) fn level(
    a: &(i8, Vec<(usize, f64)>),
    b: &(i8, Vec<(usize, f64)>),
    tol: f64,
) -> MatchLevel {
    if a.0 != b.0 || a.1.len() != b.1.len() {
        return MatchLevel::Mismatch;
    }
    a.1.iter().zip(&b.1).fold(MatchLevel::Match, |acc, (x, y)| {
        if x.0 != y.0 {
            MatchLevel::Mismatch
        } else {
            acc.and(MatchLevel::compare(x.1, y.1, tol))
        }
    })
}

/// Least dihedral image under exact lexicographic order (orders, then
/// residues, then `σ`). Deterministic bit for bit across relabelings.
pub fn canonical_key(inv: &HitchinInvariants, tol_match: f64) -> CanonicalKey {
    let images = dihedral_images(inv.sigma, &inv.zero_data());
    let best = images
        .iter()
        .min_by(|a, b| exact_cmp(a, b))
        .expect("at least one image")
        .clone();
    let near_tie = images.iter().any(|im| {
        exact_cmp(im, &best) != Ordering::Equal
            && level(im, &best, tol_match) != MatchLevel::Mismatch
    });
    CanonicalKey {
        k: inv.k,
        mu: inv.mu,
        sequence: best.1,
        sigma: best.0,
        near_tie,
    }
}

/// Whether some dihedral image of `b` matches `a` within `tol_match`
/// (relative), together with `μ`.
pub fn equivalent_invariants(
    a: &HitchinInvariants,
    b: &HitchinInvariants,
    tol_match: f64,
) -> Result<bool> {
    if a.k != b.k {
        return Ok(false);
    }
    let mu = MatchLevel::compare(a.mu, b.mu, tol_match);
    let target = (a.sigma, a.zero_data());
    let images = dihedral_images(b.sigma, &b.zero_data());
    MatchLevel::decide(
        images
            .iter()
            .map(|im| level(&target, im, tol_match).and(mu)),
        "invariants",
    )
}

//! Zero isolation and order detection.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{wrap_angle, CircleField, TrigPoly, ZeroDatum};
use crate::error::{Error, Result};
use crate::poly;

/// Eigenvalues farther than this from the unit circle are not zero candidates.
const UNIT_BAND: f64 = 1e-3;
/// Successively finer clustering radii; a cluster that cannot be resolved at
/// one radius is split at the next.
const RADII: [f64; 3] = [1e-3, 1e-5, 1e-7];
const SAMPLE_GRID: usize = 4096;
/// Sampled zeros closer than this are the same zero.
const MERGE_RADIUS: f64 = 1e-7;
/// Sampled zeros closer than this (but not merged) cannot be told apart.
const RESOLUTION_LIMIT: f64 = 1e-4;
const NEWTON_ITERS: usize = 80;

/// Local analysis of a real-analytic function through its derivatives.
pub(crate) struct Local<'a> {
    pub derivs: &'a dyn Fn(f64, &mut [f64]),
    /// A derivative counts as zero when its magnitude is at most `thr`.
    pub thr: f64,
    /// Highest derivative order that may be requested.
    pub max_order: usize,
}

impl Local<'_> {
    fn d(&self, x: f64, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        (self.derivs)(x, &mut out);
        out
    }

    /// Least `j` with `|f^{(j)}(x)| > thr`, or `None` if every available
    /// derivative is below threshold.
    pub fn order_at(&self, x: f64) -> Option<usize> {
        self.d(x, self.max_order + 1)
            .iter()
            .position(|v| v.abs() > self.thr)
    }

    /// Newton iteration for a root of `f^{(k)}` that stays within `window`
    /// of `x0`.
    pub fn newton(&self, k: usize, x0: f64, window: f64) -> Option<f64> {
        if k + 1 > self.max_order {
            return None;
        }
        let mut x = x0;
        for _ in 0..NEWTON_ITERS {
            let d = self.d(x, k + 2);
            let (g, dg) = (d[k], d[k + 1]);
            if g == 0.0 {
                return Some(x);
            }
            if dg == 0.0 || !dg.is_finite() {
                return None;
            }
            let step = g / dg;
            let next = x - step;
            if (next - x0).abs() > window || !next.is_finite() {
                return None;
            }
            x = next;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                break;
            }
        }
        Some(x)
    }

    pub fn sign_changes(&self, lo: f64, hi: f64, n: usize) -> usize {
        let mut buf = [0.0];
        let mut prev = None;
        let mut count = 0;
        for i in 0..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            (self.derivs)(x, &mut buf);
            let s = buf[0];
            if s == 0.0 {
                continue;
            }
            if let Some(p) = prev {
                if (p > 0.0) != (s > 0.0) {
                    count += 1;
                }
            }
            prev = Some(s);
        }
        count
    }

    /// Resolves a group of nearby root estimates (sorted, no wrap-around)
    /// into zeros with certified orders.
    pub fn resolve(&self, group: &[f64], level: usize) -> Result<Vec<(f64, usize)>> {
        let m = group.len();
        let center = group.iter().sum::<f64>() / m as f64;
        let spread = group[m - 1] - group[0];
        let window = spread + RADII[level];
        let x = self.newton(m - 1, center, window).unwrap_or(center);
        match self.order_at(x) {
            Some(o) if o >= m => return Ok(vec![(x, o)]),
            Some(0) if self.sign_changes(x - 2.0 * window, x + 2.0 * window, 64) == 0 => {
                return Ok(Vec::new())
            }
            _ => {}
        }
        if level + 1 < RADII.len() {
            let mut out = Vec::new();
            for sub in split(group, RADII[level + 1]) {
                out.extend(self.resolve(sub, level + 1)?);
            }
            return Ok(out);
        }
        Err(Error::ZeroIsolationFailure {
            theta: x,
            reason: format!("{m} root estimates within {spread:e} do not form a zero of order {m}"),
        })
    }
}

/// Splits a sorted slice wherever consecutive entries are at least `radius` apart.
fn split(xs: &[f64], radius: f64) -> Vec<&[f64]> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=xs.len() {
        if i == xs.len() || xs[i] - xs[i - 1] >= radius {
            out.push(&xs[start..i]);
            start = i;
        }
    }
    out
}

/// Groups angles on the circle into clusters of the given radius. Each
/// cluster is returned as a sorted, unwrapped list (it may extend past 2π).
fn circular_clusters(angles: &[f64], radius: f64) -> Vec<Vec<f64>> {
    if angles.is_empty() {
        return Vec::new();
    }
    let mut a: Vec<f64> = angles.iter().map(|&t| wrap_angle(t)).collect();
    a.sort_by(f64::total_cmp);
    let n = a.len();
    // start right after the widest gap so that no cluster straddles the cut
    let mut widest = (a[0] + TAU - a[n - 1], 0);
    for i in 1..n {
        let gap = a[i] - a[i - 1];
        if gap > widest.0 {
            widest = (gap, i);
        }
    }
    let start = widest.1;
    let unwrapped: Vec<f64> = (0..n)
        .map(|i| {
            let j = (start + i) % n;
            if j < start {
                a[j] + TAU
            } else {
                a[j]
            }
        })
        .collect();
    split(&unwrapped, radius)
        .into_iter()
        .map(<[f64]>::to_vec)
        .collect()
}

/// All zeros of `field` in `[0, 2π)`, sorted by angle.
pub fn find_zeros(field: &CircleField, tol_zero: f64) -> Result<Vec<ZeroDatum>> {
    field.ensure_nonzero(tol_zero)?;
    let thr = tol_zero * field.scale();
    let found = match field {
        CircleField::Exact(p) => exact_zeros(p, thr)?,
        CircleField::Sampled(s) => sampled_zeros(field, s.depth(), thr)?,
    };
    let mut zeros: Vec<(f64, usize)> = found.into_iter().map(|(t, m)| (wrap_angle(t), m)).collect();
    zeros.sort_by(|a, b| a.0.total_cmp(&b.0));
    // a zero near 0 may have been reported on both sides of the cut
    if zeros.len() >= 2 {
        let (first, last) = (zeros[0].0, zeros[zeros.len() - 1].0);
        if first + TAU - last < MERGE_RADIUS {
            zeros.pop();
        }
    }
    zeros
        .into_iter()
        .map(|(theta, order)| {
            let len = field.depth().map_or(order + 4, |p| (order + 4).min(p + 1));
            let taylor = field.taylor(theta, len)?;
            Ok(ZeroDatum {
                theta,
                order,
                taylor,
            })
        })
        .collect()
}

fn exact_zeros(p: &TrigPoly, thr: f64) -> Result<Vec<(f64, usize)>> {
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    // f(θ) = e^{-iNθ} P(e^{iθ}) with P of degree 2N
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    coeffs[n] = Complex64::new(p.a0(), 0.0);
    for j in 1..=n {
        let (a, b) = (p.cos_coeffs()[j - 1], p.sin_coeffs()[j - 1]);
        coeffs[n + j] = Complex64::new(a / 2.0, -b / 2.0);
        coeffs[n - j] = Complex64::new(a / 2.0, b / 2.0);
    }
    let angles: Vec<f64> = poly::complex_roots(&coeffs)
        .into_iter()
        .filter(|z| (z.norm() - 1.0).abs() < UNIT_BAND)
        .map(|z| z.arg())
        .collect();
    let derivs = |x: f64, out: &mut [f64]| p.derivs(x, out);
    let local = Local {
        derivs: &derivs,
        thr,
        max_order: 2 * n + 1,
    };
    let mut out = Vec::new();
    for cluster in circular_clusters(&angles, RADII[0]) {
        out.extend(local.resolve(&cluster, 0)?);
    }
    Ok(out)
}

fn sampled_zeros(field: &CircleField, depth: usize, thr: f64) -> Result<Vec<(f64, usize)>> {
    let derivs = |x: f64, out: &mut [f64]| {
        field
            .derivs(x, out)
            .expect("requested depth is within the declared depth");
    };
    let local = Local {
        derivs: &derivs,
        thr,
        max_order: depth,
    };
    let h = TAU / SAMPLE_GRID as f64;
    let xs: Vec<f64> = (0..SAMPLE_GRID).map(|i| h * i as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| field.value(x)).collect();
    let at = |i: isize| vs[i.rem_euclid(SAMPLE_GRID as isize) as usize];

    let mut found: Vec<(f64, usize)> = Vec::new();
    for i in 0..SAMPLE_GRID {
        let (v0, v1) = (vs[i], at(i as isize + 1));
        let sign_change = v0 != 0.0 && v1 != 0.0 && (v0 > 0.0) != (v1 > 0.0);
        let local_min = v0.abs() <= at(i as isize - 1).abs() && v0.abs() <= v1.abs();
        if sign_change {
            let root = bisect(field, xs[i], xs[i] + h, v0);
            match certify(&local, root, h) {
                Some(z) => found.push(z),
                None => {
                    return Err(Error::ZeroIsolationFailure {
                        theta: root,
                        reason: format!("sign change but no order below {depth} certified"),
                    })
                }
            }
        }
        if local_min && v0.abs() <= 1e3 * thr.max(h * h) {
            if let Some(z) = certify(&local, xs[i], 2.0 * h) {
                found.push(z);
            }
        }
    }
    for z in &mut found {
        z.0 = wrap_angle(z.0);
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, usize)> = Vec::new();
    for z in found {
        match merged.last() {
            Some(prev) if z.0 - prev.0 < MERGE_RADIUS => {}
            Some(prev) if z.0 - prev.0 < RESOLUTION_LIMIT => {
                return Err(Error::ZeroIsolationFailure {
                    theta: z.0,
                    reason: format!("distinct zeros {:e} apart", z.0 - prev.0),
                })
            }
            _ => merged.push(z),
        }
    }
    if merged.len() >= 2 {
        let gap = merged[0].0 + TAU - merged[merged.len() - 1].0;
        if gap < MERGE_RADIUS {
            merged.pop();
        } else if gap < RESOLUTION_LIMIT {
            return Err(Error::ZeroIsolationFailure {
                theta: 0.0,
                reason: format!("distinct zeros {gap:e} apart"),
            });
        }
    }
    Ok(merged)
}

fn bisect(field: &CircleField, mut lo: f64, mut hi: f64, vlo: f64) -> f64 {
    let positive = vlo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = field.value(mid);
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Finds the least order `m` for which Newton on `f^{(m-1)}` converges near
/// `x0` to a point where `f, ..., f^{(m-1)}` vanish and `f^{(m)}` does not.
fn certify(local: &Local<'_>, x0: f64, window: f64) -> Option<(f64, usize)> {
    for m in 1..local.max_order {
        let Some(x) = local.newton(m - 1, x0, window) else {
            continue;
        };
        if local.order_at(x) == Some(m) {
            return Some((x, m));
        }
    }
    None
}

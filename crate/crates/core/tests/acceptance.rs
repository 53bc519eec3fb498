//! Acceptance criteria 1 to 11. Runs without the libtest harness so that
//! every criterion prints exactly one PASS or FAIL line; the process fails if
//! any criterion does.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sln_atlas::actions::{
    admits_projective, classify_type_i, classify_type_ii, ActionDescriptor, OrbitType,
    ScalarSubgroup, TypeIAction, TypeIIAction,
};
use sln_atlas::circlefield::{
    angle_diff, double_interval, find_zeros, pushforward, CircleField, Domain, IntervalField,
    Involution, LiftMap, TrigPoly,
};
use sln_atlas::invariants::{
    canonical_key, dihedral_images, equivalent_invariants, invariants, HitchinInvariants,
    ZeroRecord,
};
use sln_atlas::lattice::{
    disk_family_field, equivalent_graphs, gen_disk_family, is_volume_preserving, Attachment,
    AttachmentKind, GluingGraph, MarkedTorus, Site,
};
use sln_atlas::Error;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || {
        format!("runtime {elapsed:?} exceeds {limit:?}")
    })
}

fn mu(p: TrigPoly) -> Result<f64, String> {
    invariants(&CircleField::from(p))
        .map(|i| i.mu)
        .map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst_const = 0.0f64;
    for c in [0.5, 1.0, 2.0, -3.0] {
        let err = (mu(TrigPoly::constant(c))? - TAU / c).abs();
        check(err < 1e-12, || format!("constant {c}: error {err:e}"))?;
        worst_const = worst_const.max(err);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let b: f64 = rng.gen_range(-2.0..2.0);
        let a = b.abs() + 0.1 + rng.gen_range(0.0..2.0);
        let want = TAU / (a * a - b * b).sqrt();
        let err = (mu(TrigPoly::new(a, vec![b], vec![0.0]).unwrap())? - want).abs();
        check(err < 1e-8, || format!("a = {a}, b = {b}: error {err:e}"))?;
        worst = worst.max(err);
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "max error {worst_const:.1e} (constants), {worst:.1e} (a + b cos), {:?}",
        start.elapsed()
    ))
}

fn criterion_2() -> Outcome {
    let value = mu(TrigPoly::new(1.0, vec![-1.0], vec![0.0]).unwrap())?;
    // ∫_{ε}^{2π-ε} dθ/(1 - cos θ) = 2 cot(ε/2); the double pole 2/s² diverges as 4/ε
    let cutoff = |e: f64| 2.0 / (e / 2.0).tan() - 4.0 / e;
    // the remainder is odd in ε: c₁ε + c₃ε³ + …
    let (e, q) = (0.1, 2.0);
    let (i0, i1, i2) = (cutoff(e), cutoff(e / q), cutoff(e / (q * q)));
    let r1 = (q * i1 - i0) / (q - 1.0);
    let r2 = (q * i2 - i1) / (q - 1.0);
    let extrapolated = (q.powi(3) * r2 - r1) / (q.powi(3) - 1.0);
    check(value.abs() < 1e-6, || format!("mu = {value:e}"))?;
    check((value - extrapolated).abs() < 1e-6, || {
        format!("mu = {value:e}, Richardson {extrapolated:e}")
    })?;
    Ok(format!(
        "mu = {value:.2e}, Richardson oracle {extrapolated:.2e}"
    ))
}

/// Random trigonometric polynomial of degree ≤ 6 whose zeros are simple,
/// well separated and transversal.
fn simple_zero_poly(rng: &mut ChaCha8Rng) -> TrigPoly {
    loop {
        let deg = rng.gen_range(1..=6);
        let cos: Vec<f64> = (0..deg).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sin: Vec<f64> = (0..deg).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = TrigPoly::new(rng.gen_range(-1.0..1.0), cos, sin).unwrap();
        let f = CircleField::from(p.clone());
        let Ok(zeros) = find_zeros(&f, 1e-9) else {
            continue;
        };
        let k = zeros.len();
        let scale = p.l1_norm();
        let transversal = zeros
            .iter()
            .all(|z| z.order == 1 && deriv(&p, z.theta).abs() > 0.05 * scale);
        let separated = (0..k)
            .all(|i| k < 2 || angle_diff(zeros[i].theta, zeros[(i + 1) % k].theta).abs() > 0.1);
        if transversal && separated && invariants(&f).is_ok() {
            return p;
        }
    }
}

/// `f'(θ)` summed directly from the coefficients.
fn deriv(p: &TrigPoly, theta: f64) -> f64 {
    let mut s = 0.0;
    for (j, (a, b)) in p.cos_coeffs().iter().zip(p.sin_coeffs()).enumerate() {
        let j = (j + 1) as f64;
        s += j * (b * (j * theta).cos() - a * (j * theta).sin());
    }
    s
}

/// Random degree-one circle diffeomorphism with `h' >= 1/2`.
fn random_diffeo(rng: &mut ChaCha8Rng) -> LiftMap {
    let deg = rng.gen_range(1..=3);
    let mut cos = vec![0.0; deg];
    let mut sin = vec![0.0; deg];
    // Σ j (|a_j| + |b_j|) <= 1/2 bounds |p'|
    let budget = 0.5 / (deg * (deg + 1)) as f64;
    for j in 0..deg {
        cos[j] = rng.gen_range(-budget..budget);
        sin[j] = rng.gen_range(-budget..budget);
    }
    LiftMap::new(
        rng.gen_range(0.0..TAU),
        TrigPoly::new(0.0, cos, sin).unwrap(),
    )
}

struct Suite3 {
    fields: Vec<TrigPoly>,
    pairs: Vec<(HitchinInvariants, HitchinInvariants, Result<bool, Error>)>,
}

fn run_suite_3() -> Result<(Suite3, Duration), String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut suite = Suite3 {
        fields: Vec::new(),
        pairs: Vec::new(),
    };
    for _ in 0..100 {
        let p = simple_zero_poly(&mut rng);
        let f = CircleField::from(p.clone());
        let inv = invariants(&f).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let h = random_diffeo(&mut rng);
            let g = pushforward(&f, Arc::new(h)).map_err(|e| e.to_string())?;
            let pushed = invariants(&g).map_err(|e| format!("pushforward invariants: {e}"))?;
            let verdict = equivalent_invariants(&inv, &pushed, 1e-5);
            suite.pairs.push((inv.clone(), pushed, verdict));
        }
        suite.fields.push(p);
    }
    Ok((suite, start.elapsed()))
}

fn criterion_3(suite: &Suite3, elapsed: Duration) -> Outcome {
    let total = suite.pairs.len();
    let ambiguous = suite
        .pairs
        .iter()
        .filter(|p| matches!(p.2, Err(Error::AmbiguousMatch(_))))
        .count();
    let decided: Vec<&Result<bool, Error>> = suite
        .pairs
        .iter()
        .map(|p| &p.2)
        .filter(|v| !matches!(v, Err(Error::AmbiguousMatch(_))))
        .collect();
    let matched = decided.iter().filter(|v| matches!(v, Ok(true))).count();
    check(matched == decided.len(), || {
        format!(
            "{} of {} decided pairs not equivalent",
            decided.len() - matched,
            decided.len()
        )
    })?;
    let rate = ambiguous as f64 / total as f64;
    check(rate < 0.02, || format!("ambiguous rate {rate}"))?;
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!(
        "{matched}/{} decided pairs equivalent, {ambiguous} ambiguous of {total}, {elapsed:?}",
        decided.len()
    ))
}

fn criterion_4(suite: &Suite3) -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (p, chunk) in suite.fields.iter().zip(suite.pairs.chunks(10)) {
        let original = &chunk[0].0;
        for z in &original.zeros {
            let err = (z.residue - 1.0 / deriv(p, z.theta)).abs();
            check(err < 1e-10, || {
                format!("residue {} at {}: error {err:e}", z.residue, z.theta)
            })?;
            worst = worst.max(err);
            count += 1;
        }
        // at a zero the pushed field has the derivative of the original
        for (_, pushed, _) in chunk {
            for z in &pushed.zeros {
                let best = original
                    .zeros
                    .iter()
                    .map(|o| (z.residue - 1.0 / deriv(p, o.theta)).abs())
                    .fold(f64::INFINITY, f64::min);
                check(best < 1e-10, || {
                    format!(
                        "pushed residue {} matches no original zero ({best:e})",
                        z.residue
                    )
                })?;
                worst = worst.max(best);
                count += 1;
            }
        }
    }
    Ok(format!(
        "{count} simple zeros, max |r - 1/f'| = {worst:.1e}"
    ))
}

fn type_i(components: usize, p: TrigPoly, tau: Involution) -> ActionDescriptor {
    ActionDescriptor::TypeI(TypeIAction::new(3, components, CircleField::from(p), tau).unwrap())
}

fn type_ii(coeffs: &[f64], quotient: bool) -> ActionDescriptor {
    let domain = if quotient { Domain::Half } else { Domain::Full };
    ActionDescriptor::TypeII(
        TypeIIAction::new(
            3,
            IntervalField::new(domain, coeffs.to_vec()).unwrap(),
            quotient,
        )
        .unwrap(),
    )
}

fn criterion_5() -> Outcome {
    // t(t² - 1)(1 - t²/2): zeros -1, 0, 1, derivative -1 at 0
    let standard = [0.0, -1.0, 0.0, 1.5, 0.0, -0.5];
    // (t³ - t)/2: derivative -1/2 at 0
    let other = [0.0, -0.5, 0.0, 0.5];
    let case = |a: &ActionDescriptor| match a {
        ActionDescriptor::TypeI(x) => {
            let c = classify_type_i(x);
            format!("{}: {}", c.number(), c.manifold())
        }
        ActionDescriptor::TypeII(x) => {
            let c = classify_type_ii(x);
            format!("{}, {} fixed point(s)", c.manifold(), c.fixed_points())
        }
        ActionDescriptor::Transitive { orbit, .. } => orbit.label(),
    };
    let table = [
        (
            type_i(2, TrigPoly::zero(), Involution::ComponentSwap),
            "1: S^{n-1} x S^1",
        ),
        (
            type_i(1, TrigPoly::zero(), Involution::Identity),
            "2: RP^{n-1} x S^1",
        ),
        (
            type_i(1, TrigPoly::sin_mode(2, 1.0), Involution::FreeRotation),
            "3: flat circle bundle with Z2 monodromy over RP^{n-1}",
        ),
        (
            type_i(
                1,
                TrigPoly::sin_mode(1, 1.0),
                Involution::Reflection { axis: 0.0 },
            ),
            "4: blow-up of RP^n at a point",
        ),
        (type_ii(&other, false), "S^n, 2 fixed point(s)"),
        (type_ii(&other, true), "RP^n, 1 fixed point(s)"),
        (
            type_i(1, TrigPoly::constant(1.0), Involution::Identity),
            "2: RP^{n-1} x S^1",
        ),
        (type_ii(&standard, false), "S^n, 2 fixed point(s)"),
    ];
    for (a, want) in &table {
        let got = case(a);
        check(got == *want, || format!("expected {want:?}, got {got:?}"))?;
    }

    let lattice = ScalarSubgroup::lattice(2.0, false).unwrap();
    let catalog: Vec<(&str, ActionDescriptor, bool)> = vec![
        (
            "case 1",
            type_i(2, TrigPoly::zero(), Involution::ComponentSwap),
            false,
        ),
        (
            "case 2",
            type_i(1, TrigPoly::zero(), Involution::Identity),
            false,
        ),
        (
            "case 3",
            type_i(1, TrigPoly::sin_mode(2, 1.0), Involution::FreeRotation),
            false,
        ),
        (
            "case 4",
            type_i(
                1,
                TrigPoly::sin_mode(1, 1.0),
                Involution::Reflection { axis: 0.0 },
            ),
            false,
        ),
        ("nonstandard sphere", type_ii(&other, false), false),
        ("nonstandard projective", type_ii(&other, true), false),
        (
            "Hopf",
            type_i(1, TrigPoly::constant(1.0), Involution::Identity),
            true,
        ),
        ("standard sphere", type_ii(&standard, false), true),
        ("standard projective", type_ii(&standard, true), true),
        (
            "transitive Hopf",
            ActionDescriptor::transitive(3, OrbitType::PuncturedRn(lattice)).unwrap(),
            true,
        ),
        (
            "Flag3",
            ActionDescriptor::transitive(3, OrbitType::Flag3).unwrap(),
            false,
        ),
        (
            "Gr24",
            ActionDescriptor::transitive(4, OrbitType::Gr24).unwrap(),
            false,
        ),
    ];
    for (name, a, want) in &catalog {
        let got = admits_projective(a);
        check(got == *want, || {
            format!("admits_projective({name}) = {got}")
        })?;
    }
    Ok(format!(
        "{} labels, {}-action projective catalog",
        table.len(),
        catalog.len()
    ))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut done = 0;
    let mut worst = 0.0f64;
    while done < 50 {
        // X = (t² - 1) g with g(±1) = ±1/2 gives X(±1) = 0, X'(±1) = 1 and,
        // by the intermediate value theorem, an interior zero
        let p: Vec<f64> = (0..rng.gen_range(1..=4))
            .map(|_| rng.gen_range(-0.6..0.6))
            .collect();
        let mut g = vec![0.0, 0.5];
        let bump = mul(&[1.0, 0.0, -1.0], &p);
        g.resize(bump.len().max(2), 0.0);
        for (k, c) in bump.iter().enumerate() {
            g[k] += c;
        }
        let x = mul(&[-1.0, 0.0, 1.0], &g);
        let field = IntervalField::new(Domain::Full, x).unwrap();
        if TypeIIAction::new(3, field.clone(), false).is_err() {
            continue;
        }
        let doubled = double_interval(&field).map_err(|e| e.to_string())?;
        let Ok(inv) = invariants(&doubled) else {
            continue;
        };
        let ends: Vec<&ZeroRecord> = inv
            .zeros
            .iter()
            .filter(|z| {
                angle_diff(z.theta, 0.0).abs() < 1e-9 || angle_diff(z.theta, PI).abs() < 1e-9
            })
            .collect();
        check(ends.len() == 2, || {
            format!("{} zeros at 0 and π", ends.len())
        })?;
        check(ends.iter().all(|z| z.order == 1), || {
            "end zeros not simple".into()
        })?;
        let (r0, r1) = (ends[0].residue, ends[1].residue);
        check(r0 > 0.0 && r1 > 0.0, || format!("residues {r0}, {r1}"))?;
        check((r0 - r1).abs() < 1e-8, || {
            format!("residues {r0} and {r1} differ")
        })?;
        // f = X(-cos θ)/sin θ has f'(0) = X'(-1)/2
        check((r0 - 2.0).abs() < 1e-8, || {
            format!("residue {r0}, expected 2")
        })?;
        worst = worst.max((r0 - r1).abs());
        done += 1;
    }
    Ok(format!(
        "{done} doubled fields, max residue gap {worst:.1e}"
    ))
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pool = [-1.0, 0.5, 2.0, 1.0 / 3.0];
    let mut images = 0;
    for _ in 0..200 {
        let k = rng.gen_range(0..=7);
        let data: Vec<(usize, f64)> = (0..k)
            .map(|_| {
                let r = if rng.gen_bool(0.5) {
                    pool[rng.gen_range(0..pool.len())]
                } else {
                    rng.gen_range(-3.0..3.0)
                };
                (rng.gen_range(1..=3), r)
            })
            .collect();
        let sigma = if rng.gen_bool(0.5) { 1 } else { -1 };
        let mu = rng.gen_range(-10.0..10.0);
        let build = |sigma: i8, data: &[(usize, f64)]| HitchinInvariants {
            k,
            sigma,
            zeros: data
                .iter()
                .map(|&(order, residue)| ZeroRecord {
                    theta: 0.0,
                    order,
                    residue,
                })
                .collect(),
            mu,
            tol: 1e-9,
        };
        let reference = canonical_key(&build(sigma, &data), 1e-6);
        for (s, d) in dihedral_images(sigma, &data) {
            let key = canonical_key(&build(s, &d), 1e-6);
            let same = key.k == reference.k
                && key.sigma == reference.sigma
                && key.mu.to_bits() == reference.mu.to_bits()
                && key.sequence.len() == reference.sequence.len()
                && key
                    .sequence
                    .iter()
                    .zip(&reference.sequence)
                    .all(|(x, y)| x.0 == y.0 && x.1.to_bits() == y.1.to_bits());
            check(same, || format!("relabeling of {data:?} changed the key"))?;
            images += 1;
        }
    }
    Ok(format!(
        "200 tuples, {images} relabelings, keys bitwise identical"
    ))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let residues: Vec<f64> = (0..20).map(|i| 1.0 + 0.1 * i as f64).collect();
    let graphs = gen_disk_family(&residues).map_err(|e| e.to_string())?;
    let again = gen_disk_family(&residues).map_err(|e| e.to_string())?;
    for i in 0..graphs.len() {
        let same = equivalent_graphs(&graphs[i], &again[i], 1e-6).map_err(|e| e.to_string())?;
        check(same, || {
            format!("r = {} not equivalent to itself", residues[i])
        })?;
        for j in i + 1..graphs.len() {
            let eq = equivalent_graphs(&graphs[i], &graphs[j], 1e-6).map_err(|e| e.to_string())?;
            check(!eq, || {
                format!("r = {} and r = {} equivalent", residues[i], residues[j])
            })?;
        }
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "20 residues, 190 separated pairs, {:?}",
        start.elapsed()
    ))
}

fn zero_point(n: usize) -> Vec<Rational64> {
    vec![Rational64::from_integer(0); n]
}

fn one_torus(n: usize, attachments: Vec<Attachment>, points: usize) -> GluingGraph {
    let marked_points = (0..points)
        .map(|i| {
            let mut p = zero_point(n);
            p[0] = Rational64::new(i as i64, points as i64);
            p
        })
        .collect();
    GluingGraph {
        n,
        nodes: vec![MarkedTorus {
            id: "T".into(),
            n,
            marked_points,
        }],
        attachments,
    }
}

fn criterion_9() -> Outcome {
    let germ = |w: f64| IntervalField::new(Domain::Full, vec![0.0, w, 0.0, 0.25]).unwrap();
    let site = |p: usize| Site { node: 0, point: p };
    for n in 3..=6 {
        let blow_up = |w: f64| Attachment {
            kind: AttachmentKind::BlowUp(germ(w)),
            sites: vec![site(0)],
        };
        let two_sided = |w: f64| Attachment {
            kind: AttachmentKind::TwoSidedBlowUp(germ(w)),
            sites: vec![site(1), site(2)],
        };
        let nf = n as f64;
        let accepted = one_torus(n, vec![blow_up(nf), two_sided(nf)], 4);
        check(is_volume_preserving(&accepted), || {
            format!("n = {n}: weight-n blow-ups rejected")
        })?;
        for w in [nf - 1.0, nf + 1.0] {
            check(
                !is_volume_preserving(&one_torus(n, vec![blow_up(w)], 1)),
                || format!("n = {n}: weight {w} accepted"),
            )?;
            check(
                !is_volume_preserving(&one_torus(n, vec![blow_up(nf), two_sided(w)], 4)),
                || format!("n = {n}: two-sided weight {w} accepted"),
            )?;
        }
        let mut with_disk = accepted.clone();
        with_disk.attachments.push(Attachment {
            kind: AttachmentKind::Disk(disk_family_field(1.0).unwrap()),
            sites: vec![site(3)],
        });
        check(!is_volume_preserving(&with_disk), || {
            format!("n = {n}: disk accepted")
        })?;
        let tube = IntervalField::new(Domain::Full, vec![0.5, 0.0, -0.5]).unwrap();
        let mut with_tube = accepted.clone();
        with_tube.attachments[1] = Attachment {
            kind: AttachmentKind::Tube(tube),
            sites: vec![site(1), site(2)],
        };
        check(!is_volume_preserving(&with_tube), || {
            format!("n = {n}: tube accepted")
        })?;
    }
    Ok("n = 3..6: weight n accepted, n ± 1, disks and tubes rejected".into())
}

/// Attachment fields drawn from pools whose equivalence classes are known
/// by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
enum PoolKind {
    Disk,
    BlowUp,
    Tube,
    TwoSided,
}

struct Pools {
    fields: HashMap<(u8, usize), IntervalField>,
}

const TUBE_FLIP: [usize; 3] = [1, 0, 2];
const TWO_SIDED_CLASS: [usize; 3] = [0, 0, 1];

impl Pools {
    fn new() -> Self {
        let full = |c: &[f64]| IntervalField::new(Domain::Full, c.to_vec()).unwrap();
        let tube0 = full(&[0.5, 0.25, -0.5, -0.25]);
        let mut fields = HashMap::new();
        fields.insert((0, 0), disk_family_field(1.0).unwrap());
        fields.insert((0, 1), disk_family_field(1.5).unwrap());
        fields.insert((1, 0), full(&[0.0, 3.0, 0.0, 0.5]));
        fields.insert((1, 1), full(&[0.0, 2.0, 0.0, 1.0]));
        fields.insert((2, 1), tube0.flipped().unwrap());
        fields.insert((2, 0), tube0);
        fields.insert((2, 2), full(&[0.0, 1.0, 0.0, -1.0]));
        // 3t + t² and 3t - t² are conjugate germs; 2t is not
        fields.insert((3, 0), full(&[0.0, 3.0, 1.0]));
        fields.insert((3, 1), full(&[0.0, 3.0, -1.0]));
        fields.insert((3, 2), full(&[0.0, 2.0]));
        Pools { fields }
    }

    fn size(kind: PoolKind) -> usize {
        match kind {
            PoolKind::Disk | PoolKind::BlowUp => 2,
            PoolKind::Tube | PoolKind::TwoSided => 3,
        }
    }

    fn attachment(&self, kind: PoolKind, idx: usize, sites: Vec<Site>) -> Attachment {
        let f = self.fields[&(kind as u8, idx)].clone();
        let kind = match kind {
            PoolKind::Disk => AttachmentKind::Disk(f),
            PoolKind::BlowUp => AttachmentKind::BlowUp(f),
            PoolKind::Tube => AttachmentKind::Tube(f),
            PoolKind::TwoSided => AttachmentKind::TwoSidedBlowUp(f),
        };
        Attachment { kind, sites }
    }

    /// Oracle for conjugacy of pool fields, with `b` read end-swapped when
    /// `swapped`.
    fn same(kind: PoolKind, a: usize, b: usize, swapped: bool) -> bool {
        match kind {
            PoolKind::Disk | PoolKind::BlowUp => a == b,
            PoolKind::Tube => a == if swapped { TUBE_FLIP[b] } else { b },
            PoolKind::TwoSided => TWO_SIDED_CLASS[a] == TWO_SIDED_CLASS[b],
        }
    }
}

/// A graph together with the pool labels of its attachments.
#[derive(Clone, Debug)]
struct Labeled {
    points: Vec<Vec<Vec<Rational64>>>,
    atts: Vec<(PoolKind, usize, Vec<Site>)>,
}

impl Labeled {
    fn graph(&self, pools: &Pools) -> GluingGraph {
        GluingGraph {
            n: 3,
            nodes: self
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| MarkedTorus {
                    id: format!("N{i}"),
                    n: 3,
                    marked_points: p.clone(),
                })
                .collect(),
            attachments: self
                .atts
                .iter()
                .map(|(k, i, s)| pools.attachment(*k, *i, s.clone()))
                .collect(),
        }
    }
}

fn point_pool() -> Vec<Vec<Rational64>> {
    let z = Rational64::from_integer(0);
    let h = Rational64::new(1, 2);
    vec![vec![z, z, z], vec![h, z, z], vec![z, h, z]]
}

fn random_labeled(rng: &mut ChaCha8Rng) -> Labeled {
    let pool = point_pool();
    let nodes = rng.gen_range(1..=6);
    let points: Vec<Vec<Vec<Rational64>>> = (0..nodes)
        .map(|_| {
            let count = rng.gen_range(0..=2);
            let mut idx: Vec<usize> = (0..pool.len()).collect();
            for i in 0..count {
                let j = rng.gen_range(i..idx.len());
                idx.swap(i, j);
            }
            idx[..count].iter().map(|&i| pool[i].clone()).collect()
        })
        .collect();
    let mut free: Vec<Site> = points
        .iter()
        .enumerate()
        .flat_map(|(node, p)| (0..p.len()).map(move |point| Site { node, point }))
        .collect();
    let mut atts = Vec::new();
    let target = rng.gen_range(0..=6);
    while atts.len() < target && !free.is_empty() {
        let kind = [
            PoolKind::Disk,
            PoolKind::BlowUp,
            PoolKind::Tube,
            PoolKind::TwoSided,
        ][rng.gen_range(0..4)];
        let two = matches!(kind, PoolKind::Tube | PoolKind::TwoSided);
        if two && free.len() < 2 {
            break;
        }
        let a = free.swap_remove(rng.gen_range(0..free.len()));
        let mut sites = vec![a];
        if two {
            sites.push(free.swap_remove(rng.gen_range(0..free.len())));
        }
        atts.push((kind, rng.gen_range(0..Pools::size(kind)), sites));
    }
    Labeled { points, atts }
}

/// Relabels nodes, reorders points and attachments, and swaps two-ended
/// attachments (replacing the field by its end-swapped pool partner).
fn shuffled(g: &Labeled, rng: &mut ChaCha8Rng) -> Labeled {
    let n = g.points.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut point_perm: Vec<Vec<usize>> = g.points.iter().map(|p| (0..p.len()).collect()).collect();
    for pp in &mut point_perm {
        if pp.len() == 2 && rng.gen_bool(0.5) {
            pp.swap(0, 1);
        }
    }
    let mut points = vec![Vec::new(); n];
    for (i, p) in g.points.iter().enumerate() {
        points[perm[i]] = point_perm[i].iter().map(|&k| p[k].clone()).collect();
    }
    let map = |s: &Site| Site {
        node: perm[s.node],
        point: point_perm[s.node]
            .iter()
            .position(|&k| k == s.point)
            .unwrap(),
    };
    let mut atts: Vec<(PoolKind, usize, Vec<Site>)> = g
        .atts
        .iter()
        .map(|(kind, idx, sites)| {
            let mut sites: Vec<Site> = sites.iter().map(map).collect();
            let mut idx = *idx;
            if sites.len() == 2 && rng.gen_bool(0.5) {
                sites.reverse();
                if *kind == PoolKind::Tube {
                    idx = TUBE_FLIP[idx];
                }
            }
            (*kind, idx, sites)
        })
        .collect();
    for i in (1..atts.len()).rev() {
        atts.swap(i, rng.gen_range(0..=i));
    }
    Labeled { points, atts }
}

fn mutated(g: &Labeled, rng: &mut ChaCha8Rng) -> Labeled {
    let mut h = g.clone();
    if !h.atts.is_empty() && rng.gen_bool(0.7) {
        let i = rng.gen_range(0..h.atts.len());
        let kind = h.atts[i].0;
        h.atts[i].1 = (h.atts[i].1 + 1) % Pools::size(kind);
    } else {
        let i = rng.gen_range(0..h.points.len());
        let pool = point_pool();
        if let Some(p) = pool.iter().find(|p| !h.points[i].contains(p)) {
            h.points[i].push(p.clone());
        }
    }
    h
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Tries every node bijection and every attachment bijection.
fn brute_force(a: &Labeled, b: &Labeled) -> bool {
    if a.points.len() != b.points.len() || a.atts.len() != b.atts.len() {
        return false;
    }
    let node_perms = permutations(a.points.len());
    let att_perms = permutations(a.atts.len());
    node_perms.iter().any(|pi| {
        let mut sorted_a: Vec<Vec<Vec<Rational64>>> = a.points.clone();
        let mut sorted_b: Vec<Vec<Vec<Rational64>>> =
            pi.iter().map(|&j| b.points[j].clone()).collect();
        sorted_a.iter_mut().for_each(|p| p.sort());
        sorted_b.iter_mut().for_each(|p| p.sort());
        if sorted_a != sorted_b {
            return false;
        }
        let site = |s: &Site| {
            let j = pi[s.node];
            let coords = &a.points[s.node][s.point];
            Site {
                node: j,
                point: b.points[j].iter().position(|p| p == coords).unwrap(),
            }
        };
        att_perms.iter().any(|sigma| {
            a.atts.iter().enumerate().all(|(i, (kind, idx, sites))| {
                let (k2, idx2, sites2) = &b.atts[sigma[i]];
                if kind != k2 {
                    return false;
                }
                let mapped: Vec<Site> = sites.iter().map(site).collect();
                let direct = mapped == *sites2 && Pools::same(*kind, *idx, *idx2, false);
                let swapped = mapped.len() == 2
                    && mapped[0] == sites2[1]
                    && mapped[1] == sites2[0]
                    && Pools::same(*kind, *idx, *idx2, true);
                direct || swapped
            })
        })
    })
}

fn criterion_10() -> Outcome {
    let pools = Pools::new();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut agree, mut positives) = (0, 0);
    for trial in 0..200 {
        let a = random_labeled(&mut rng);
        let b = if rng.gen_bool(0.5) {
            shuffled(&a, &mut rng)
        } else {
            mutated(&shuffled(&a, &mut rng), &mut rng)
        };
        let b = if trial % 10 == 0 {
            random_labeled(&mut rng)
        } else {
            b
        };
        let expected = brute_force(&a, &b);
        let got = equivalent_graphs(&a.graph(&pools), &b.graph(&pools), 1e-6)
            .map_err(|e| e.to_string())?;
        check(got == expected, || {
            format!("trial {trial}: library {got}, oracle {expected}\n{a:?}\n{b:?}")
        })?;
        agree += 1;
        positives += usize::from(expected);
    }
    Ok(format!(
        "{agree}/200 pairs agree with brute force ({positives} equivalent)"
    ))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_sln-atlas"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("SLN_ATLAS_TOL_MATCH")
        .output()
        .expect("run CLI binary");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_11() -> Outcome {
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixtures())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json") && !p.ends_with("malformed.json"))
        .collect();
    files.sort();
    for f in &files {
        let name = f.file_name().unwrap().to_str().unwrap();
        let (code, out) = cli(&["canon", name]);
        let original = std::fs::read(f).map_err(|e| e.to_string())?;
        check(code == 0 && out == original, || {
            format!("{name} does not round-trip (exit {code})")
        })?;
    }
    let contract = [
        (["equiv", "action_sphere.json", "action_sphere.json"], 0),
        (["equiv", "action_hopf_1.json", "action_hopf_2.json"], 1),
        (["equiv", "malformed.json", "action_sphere.json"], 2),
        (
            ["equiv", "field_const_one.json", "field_const_near_one.json"],
            3,
        ),
    ];
    for (args, want) in contract {
        let (code, _) = cli(&args);
        check(code == want, || {
            format!("{args:?} exited {code}, expected {want}")
        })?;
    }
    Ok(format!(
        "{} fixtures round-trip, exit codes 0/1/2/3 exercised",
        files.len()
    ))
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "closed-form mu", criterion_1()));
    results.push((2, "finite part of 1 - cos", criterion_2()));
    match run_suite_3() {
        Ok((suite, elapsed)) => {
            results.push((3, "conjugation invariance", criterion_3(&suite, elapsed)));
            results.push((4, "simple-zero residues", criterion_4(&suite)));
        }
        Err(e) => {
            results.push((3, "conjugation invariance", Err(e.clone())));
            results.push((4, "simple-zero residues", Err(e)));
        }
    }
    results.push((5, "classification table", criterion_5()));
    results.push((6, "doubling contract", criterion_6()));
    results.push((7, "dihedral canonicalization", criterion_7()));
    results.push((8, "lattice separation", criterion_8()));
    results.push((9, "volume criterion", criterion_9()));
    results.push((10, "graph isomorphism oracle", criterion_10()));
    results.push((11, "CLI round trip and exit codes", criterion_11()));

    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {n:>2} {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} {name}: FAIL ({why})");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

//! `SL(n, ℝ)`-actions on closed `n`-manifolds.
//!
//! An action is either transitive (one of the homogeneous spaces in
//! [`orbit_catalog`]), of type I (a circle field `X` on `Σ⁰` with an
//! involution `τ`, induced up to `G`), or of type II (an interval field
//! whose zeros at the ends become global fixed points). Classification
//! depends only on `τ` or on the interval; equivalence compares circle-field
//! invariants, of `X` itself for type I and of the doubled field for type II.

use crate::circlefield::{
    angle_diff, double_interval, find_zeros, validate_involution, CircleField, Domain,
    IntervalField, Involution, TOL_ZERO_EXACT,
};
use crate::error::{Error, Result};
use crate::invariants::{
    data_level, dihedral_images, equivalent_invariants, invariants, HitchinInvariants, MatchLevel,
};

/// Discrete subgroups of the scalars `ℝ*`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarSubgroup {
    /// `{1}`
    Trivial,
    /// `{±1}`
    Sign,
    /// Generated by `generator` and, when `with_sign`, by `-1`. Always
    /// `|generator| > 1`, and `generator > 0` when `with_sign`.
    Lattice { generator: f64, with_sign: bool },
}

impl ScalarSubgroup {
    /// The subgroup generated by `g` (and `-1` when `with_sign`), in normal
    /// form.
    pub fn lattice(g: f64, with_sign: bool) -> Result<Self> {
        if !g.is_finite() || g == 0.0 || g.abs() == 1.0 {
            return Err(Error::InvalidActionData(format!(
                "scalar {g} does not generate an infinite discrete group"
            )));
        }
        let mut generator = if g.abs() < 1.0 { 1.0 / g } else { g };
        if with_sign {
            generator = generator.abs();
        }
        Ok(ScalarSubgroup::Lattice {
            generator,
            with_sign,
        })
    }

    /// Cocompact in `ℝ*`, so that the quotient of `ℝⁿ \ 0` is closed.
    pub fn is_lattice(&self) -> bool {
        matches!(self, ScalarSubgroup::Lattice { .. })
    }

    fn level(&self, other: &ScalarSubgroup, tol: f64) -> MatchLevel {
        match (self, other) {
            (ScalarSubgroup::Trivial, ScalarSubgroup::Trivial)
            | (ScalarSubgroup::Sign, ScalarSubgroup::Sign) => MatchLevel::Match,
            (
                ScalarSubgroup::Lattice {
                    generator: g,
                    with_sign: s,
                },
                ScalarSubgroup::Lattice {
                    generator: h,
                    with_sign: t,
                },
            ) if s == t => MatchLevel::compare(*g, *h, tol),
            _ => MatchLevel::Mismatch,
        }
    }
}

/// `G`-orbits up to equivariant homeomorphism. Dimensions are implied by
/// the ambient `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum OrbitType {
    Point,
    /// `Sⁿ⁻¹` with the projective action.
    Sphere,
    /// `ℝPⁿ⁻¹` with the projective action.
    ProjSpace,
    /// `(ℝⁿ \ 0)/Λ`.
    PuncturedRn(ScalarSubgroup),
    /// Complete flags in `ℝ³`; `n = 3` only.
    Flag3,
    /// `Gr(2, 4)`; `n = 4` only.
    Gr24,
    /// A finite cover of an exceptional orbit.
    FiniteCoverOf(Box<OrbitType>),
}

impl OrbitType {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            OrbitType::Flag3 if n != 3 => Err(Error::InvalidActionData(format!(
                "Flag3 needs n = 3, got {n}"
            ))),
            OrbitType::Gr24 if n != 4 => Err(Error::InvalidActionData(format!(
                "Gr24 needs n = 4, got {n}"
            ))),
            OrbitType::FiniteCoverOf(inner) => match **inner {
                OrbitType::Flag3 | OrbitType::Gr24 => inner.validate(n),
                _ => Err(Error::InvalidActionData(
                    "finite covers are only listed for Flag3 and Gr24".into(),
                )),
            },
            _ => Ok(()),
        }
    }

    /// Whether the orbit is a closed `n`-manifold, i.e. can carry a
    /// transitive action on its own.
    pub fn is_closed_open_orbit(&self) -> bool {
        match self {
            OrbitType::PuncturedRn(l) => l.is_lattice(),
            OrbitType::Flag3 | OrbitType::Gr24 | OrbitType::FiniteCoverOf(_) => true,
            _ => false,
        }
    }

    pub fn label(&self) -> String {
        match self {
            OrbitType::Point => "point".into(),
            OrbitType::Sphere => "S^{n-1}".into(),
            OrbitType::ProjSpace => "RP^{n-1}".into(),
            OrbitType::PuncturedRn(ScalarSubgroup::Trivial) => "R^n \\ 0".into(),
            OrbitType::PuncturedRn(ScalarSubgroup::Sign) => "(R^n \\ 0)/{+-1}".into(),
            OrbitType::PuncturedRn(ScalarSubgroup::Lattice { .. }) => {
                "Hopf manifold (R^n \\ 0)/Lambda".into()
            }
            OrbitType::Flag3 => "F_{1,2}^3".into(),
            OrbitType::Gr24 => "Gr(2,4)".into(),
            OrbitType::FiniteCoverOf(inner) => format!("finite cover of {}", inner.label()),
        }
    }

    fn level(&self, other: &OrbitType, tol: f64) -> MatchLevel {
        match (self, other) {
            (OrbitType::PuncturedRn(a), OrbitType::PuncturedRn(b)) => a.level(b, tol),
            (OrbitType::FiniteCoverOf(a), OrbitType::FiniteCoverOf(b)) => a.level(b, tol),
            (a, b) if std::mem::discriminant(a) == std::mem::discriminant(b) => MatchLevel::Match,
            _ => MatchLevel::Mismatch,
        }
    }
}

/// Orbit types of a continuous action of a group locally isomorphic to
/// `SL(n, ℝ)`. The punctured-space family is represented by its member with
/// trivial `Λ`.
pub fn orbit_catalog(n: usize) -> Result<Vec<OrbitType>> {
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let mut out = vec![
        OrbitType::Point,
        OrbitType::Sphere,
        OrbitType::ProjSpace,
        OrbitType::PuncturedRn(ScalarSubgroup::Trivial),
    ];
    match n {
        3 => out.extend([
            OrbitType::Flag3,
            OrbitType::FiniteCoverOf(Box::new(OrbitType::Flag3)),
        ]),
        4 => out.extend([
            OrbitType::Gr24,
            OrbitType::FiniteCoverOf(Box::new(OrbitType::Gr24)),
        ]),
        _ => {}
    }
    Ok(out)
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 3 {
        Err(Error::DimensionTooSmall(n))
    } else {
        Ok(())
    }
}

/// Circle field `X` on `Σ⁰` together with `τ`; two components exactly
/// when `τ` swaps them.
#[derive(Debug, Clone)]
pub struct TypeIAction {
    n: usize,
    components: usize,
    field: CircleField,
    tau: Involution,
}

impl TypeIAction {
    pub fn new(n: usize, components: usize, field: CircleField, tau: Involution) -> Result<Self> {
        check_dimension(n)?;
        let swap = tau == Involution::ComponentSwap;
        match (components, swap) {
            (2, true) | (1, false) => {}
            (1 | 2, _) => {
                return Err(Error::InvalidActionData(format!(
                    "{components} component(s) is inconsistent with involution {tau:?}"
                )))
            }
            _ => {
                return Err(Error::InvalidActionData(format!(
                    "Σ has 1 or 2 components, got {components}"
                )))
            }
        }
        if !validate_involution(&field, tau, field.default_tol_zero()) {
            return Err(Error::InvalidActionData(format!(
                "field does not commute with {tau:?}"
            )));
        }
        Ok(TypeIAction {
            n,
            components,
            field,
            tau,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn field(&self) -> &CircleField {
        &self.field
    }

    pub fn tau(&self) -> Involution {
        self.tau
    }

    fn field_is_zero(&self) -> bool {
        self.field
            .ensure_nonzero(self.field.default_tol_zero())
            .is_err()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeICase {
    ProductSphere,
    ProductProjective,
    FlatBundle,
    BlowUp,
}

impl TypeICase {
    pub fn number(self) -> u8 {
        match self {
            TypeICase::ProductSphere => 1,
            TypeICase::ProductProjective => 2,
            TypeICase::FlatBundle => 3,
            TypeICase::BlowUp => 4,
        }
    }

    pub fn manifold(self) -> &'static str {
        match self {
            TypeICase::ProductSphere => "S^{n-1} x S^1",
            TypeICase::ProductProjective => "RP^{n-1} x S^1",
            TypeICase::FlatBundle => "flat circle bundle with Z2 monodromy over RP^{n-1}",
            TypeICase::BlowUp => "blow-up of RP^n at a point",
        }
    }
}

/// Exactly one case per involution class.
pub fn classify_type_i(a: &TypeIAction) -> TypeICase {
    match a.tau {
        Involution::ComponentSwap => TypeICase::ProductSphere,
        Involution::Identity => TypeICase::ProductProjective,
        Involution::FreeRotation => TypeICase::FlatBundle,
        Involution::Reflection { .. } => TypeICase::BlowUp,
    }
}

/// Interval field on `[-1, 1]` (sphere) or `[-1, 0]` (projective quotient).
#[derive(Debug, Clone)]
pub struct TypeIIAction {
    n: usize,
    field: IntervalField,
}

impl TypeIIAction {
    /// Checks the endpoint conditions. A projective field must be odd so
    /// that its extension to `[-1, 1]` is analytic.
    pub fn new(n: usize, field: IntervalField, quotient: bool) -> Result<Self> {
        check_dimension(n)?;
        let want = if quotient { Domain::Half } else { Domain::Full };
        if field.domain() != want {
            return Err(Error::InvalidActionData(format!(
                "quotient = {quotient} needs domain {want:?}"
            )));
        }
        let thr = field.threshold(TOL_ZERO_EXACT);
        let [(xl, dl), (xr, dr)] = field.endpoint_data();
        if xl.abs() > thr || xr.abs() > thr {
            return Err(Error::InvalidActionData(format!(
                "field must vanish at both ends, got {xl} and {xr}"
            )));
        }
        if (dl - 1.0).abs() > thr {
            return Err(Error::InvalidActionData(format!(
                "X'(-1) = {dl}, must be 1"
            )));
        }
        if quotient {
            field
                .odd_extension(TOL_ZERO_EXACT)
                .map_err(|e| Error::InvalidActionData(e.to_string()))?;
        } else {
            if (dr - 1.0).abs() > thr {
                return Err(Error::InvalidActionData(format!("X'(1) = {dr}, must be 1")));
            }
            if interior_zeros(&field)?.is_empty() {
                return Err(Error::InvalidActionData(
                    "field needs a zero in (-1, 1)".into(),
                ));
            }
        }
        Ok(TypeIIAction { n, field })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &IntervalField {
        &self.field
    }

    pub fn quotient(&self) -> bool {
        self.field.domain() == Domain::Half
    }

    /// The field on `[-1, 1]` whose quotient this is (itself in the sphere
    /// case).
    pub fn sphere_field(&self) -> IntervalField {
        if self.quotient() {
            self.field
                .odd_extension(TOL_ZERO_EXACT)
                .expect("checked on construction")
        } else {
            self.field.clone()
        }
    }

    /// A single simple zero in `(-1, 1)` with derivative `-1` on the sphere
    /// field.
    pub fn is_standard(&self) -> bool {
        let full = self.sphere_field();
        let Ok(zeros) = interior_zeros(&full) else {
            return false;
        };
        let thr = full.threshold(TOL_ZERO_EXACT);
        matches!(zeros.as_slice(), [(t, 1)] if (full.derivative_at(*t) + 1.0).abs() <= thr)
    }
}

fn interior_zeros(field: &IntervalField) -> Result<Vec<(f64, usize)>> {
    let (a, b) = field.domain().bounds();
    Ok(field
        .zeros(TOL_ZERO_EXACT)
        .map_err(|e| Error::InvalidActionData(e.to_string()))?
        .into_iter()
        .filter(|z| z.t > a && z.t < b)
        .map(|z| (z.t, z.order))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeIIKind {
    /// `Sⁿ` with two fixed points.
    Sphere,
    /// `ℝPⁿ` with one fixed point.
    Projective,
}

impl TypeIIKind {
    pub fn manifold(self) -> &'static str {
        match self {
            TypeIIKind::Sphere => "S^n",
            TypeIIKind::Projective => "RP^n",
        }
    }

    pub fn fixed_points(self) -> usize {
        match self {
            TypeIIKind::Sphere => 2,
            TypeIIKind::Projective => 1,
        }
    }
}

pub fn classify_type_ii(a: &TypeIIAction) -> TypeIIKind {
    if a.quotient() {
        TypeIIKind::Projective
    } else {
        TypeIIKind::Sphere
    }
}

#[derive(Debug, Clone)]
pub enum ActionDescriptor {
    Transitive { n: usize, orbit: OrbitType },
    TypeI(TypeIAction),
    TypeII(TypeIIAction),
}

/// Summary of [`ActionDescriptor::classify`].
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    /// `"transitive"`, `"I"` or `"II"`.
    pub kind: &'static str,
    /// Case number `1..=4` for type I.
    pub case: Option<u8>,
    pub label: String,
    pub manifold: String,
    pub fixed_points: usize,
}

impl ActionDescriptor {
    /// A transitive action on a closed `n`-dimensional orbit.
    pub fn transitive(n: usize, orbit: OrbitType) -> Result<Self> {
        check_dimension(n)?;
        orbit.validate(n)?;
        if !orbit.is_closed_open_orbit() {
            return Err(Error::InvalidActionData(format!(
                "{} is not a closed n-dimensional orbit",
                orbit.label()
            )));
        }
        Ok(ActionDescriptor::Transitive { n, orbit })
    }

    pub fn n(&self) -> usize {
        match self {
            ActionDescriptor::Transitive { n, .. } => *n,
            ActionDescriptor::TypeI(a) => a.n,
            ActionDescriptor::TypeII(a) => a.n,
        }
    }

    pub fn classify(&self) -> Classification {
        match self {
            ActionDescriptor::Transitive { orbit, .. } => Classification {
                kind: "transitive",
                case: None,
                label: orbit.label(),
                manifold: orbit.label(),
                fixed_points: 0,
            },
            ActionDescriptor::TypeI(a) => {
                let c = classify_type_i(a);
                Classification {
                    kind: "I",
                    case: Some(c.number()),
                    label: format!("case {}", c.number()),
                    manifold: c.manifold().into(),
                    fixed_points: 0,
                }
            }
            ActionDescriptor::TypeII(a) => {
                let c = classify_type_ii(a);
                let label = match c {
                    TypeIIKind::Sphere => "sphere",
                    TypeIIKind::Projective => "projective",
                };
                Classification {
                    kind: "II",
                    case: None,
                    label: label.into(),
                    manifold: c.manifold().into(),
                    fixed_points: c.fixed_points(),
                }
            }
        }
    }
}

/// Circle-field invariants of a type II action: the double of its sphere
/// field.
pub fn doubled_invariants(a: &TypeIIAction) -> Result<HitchinInvariants> {
    invariants(&double_interval(&a.sphere_field())?)
}

/// The doubled field vanishes at `θ = 0` and `θ = π`, the images of the
/// fixed points. Conjugacies must preserve that pair, so each zero is tagged
/// and tags are compared together with orders by folding them into the order.
fn tagged_data(inv: &HitchinInvariants) -> Vec<(usize, f64)> {
    const TAG_TOL: f64 = 1e-6;
    inv.zeros
        .iter()
        .map(|z| {
            let marked = angle_diff(z.theta, 0.0).abs() < TAG_TOL
                || angle_diff(z.theta, std::f64::consts::PI).abs() < TAG_TOL;
            (2 * z.order + usize::from(marked), z.residue)
        })
        .collect()
}

fn type_ii_level(a: &TypeIIAction, b: &TypeIIAction, tol: f64) -> Result<Vec<MatchLevel>> {
    let ia = doubled_invariants(a)?;
    let ib = doubled_invariants(b)?;
    if ia.k != ib.k {
        return Ok(vec![MatchLevel::Mismatch]);
    }
    let mu = MatchLevel::compare(ia.mu, ib.mu, tol);
    let target = (ia.sigma, tagged_data(&ia));
    Ok(dihedral_images(ib.sigma, &tagged_data(&ib))
        .iter()
        .map(|im| data_level(&target, im, tol).and(mu))
        .collect())
}

/// Equivariant equivalence.
pub fn equivalent_actions(
    a: &ActionDescriptor,
    b: &ActionDescriptor,
    tol_match: f64,
) -> Result<bool> {
    if a.n() != b.n() {
        return Ok(false);
    }
    match (a, b) {
        (
            ActionDescriptor::Transitive { orbit: x, .. },
            ActionDescriptor::Transitive { orbit: y, .. },
        ) => MatchLevel::decide([x.level(y, tol_match)], "orbit types"),
        (ActionDescriptor::TypeI(x), ActionDescriptor::TypeI(y)) => {
            if classify_type_i(x) != classify_type_i(y) || !x.tau.same_class(&y.tau) {
                return Ok(false);
            }
            match (x.field_is_zero(), y.field_is_zero()) {
                (true, true) => Ok(true),
                (false, false) => {
                    equivalent_invariants(&invariants(&x.field)?, &invariants(&y.field)?, tol_match)
                }
                _ => Ok(false),
            }
        }
        (ActionDescriptor::TypeII(x), ActionDescriptor::TypeII(y)) => {
            if classify_type_ii(x) != classify_type_ii(y) {
                return Ok(false);
            }
            MatchLevel::decide(type_ii_level(x, y, tol_match)?, "doubled-field invariants")
        }
        _ => Ok(false),
    }
}

/// Type I with nonvanishing `X` and an involution without fixed points on
/// `Σ⁰`: the action is transitive on a quotient of `ℝⁿ \ 0`.
pub fn is_hopf(a: &ActionDescriptor) -> bool {
    let ActionDescriptor::TypeI(x) = a else {
        return false;
    };
    if matches!(x.tau, Involution::Reflection { .. }) {
        return false;
    }
    find_zeros(&x.field, x.field.default_tol_zero()).is_ok_and(|z| z.is_empty())
}

/// Whether the action preserves a projective structure.
pub fn admits_projective(a: &ActionDescriptor) -> bool {
    match a {
        ActionDescriptor::Transitive {
            orbit: OrbitType::PuncturedRn(l),
            ..
        } => l.is_lattice(),
        ActionDescriptor::Transitive { .. } => false,
        ActionDescriptor::TypeI(_) => is_hopf(a),
        ActionDescriptor::TypeII(x) => x.is_standard(),
    }
}

/// `t(t² - 1)(1 - t²/2)`: zeros at `-1, 0, 1`, derivative `1` at the ends
/// and `-1` at `0`.
pub fn standard_sphere_field() -> IntervalField {
    IntervalField::new(Domain::Full, vec![0.0, -1.0, 0.0, 1.5, 0.0, -0.5])
        .expect("finite coefficients")
}

/// Restriction of [`standard_sphere_field`] to `[-1, 0]`.
pub fn standard_projective_field() -> IntervalField {
    IntervalField::new(Domain::Half, vec![0.0, -1.0, 0.0, 1.5, 0.0, -0.5])
        .expect("finite coefficients")
}

//! Gluing graphs: tori with marked rational points, joined or decorated by
//! disks, tubes, blow-ups and two-sided blow-ups.
//!
//! A marked point of `𝕋ⁿ = ℝⁿ/ℤⁿ` with denominators dividing `N` is fixed
//! by the principal congruence subgroup of level `N`, which therefore acts on
//! the glued manifold. Each attachment carries the polynomial field that
//! determines the local action near the glued-in piece.

mod matching;

use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;
use num_rational::Rational64;
use petgraph::unionfind::UnionFind;

use crate::circlefield::{Domain, IntervalField, TOL_ZERO_EXACT};
use crate::error::{Error, Result};

pub use matching::equivalent_graphs;

/// A point of `ℚⁿ/ℤⁿ`, each coordinate in `[0, 1)`.
pub type MarkedPoint = Vec<Rational64>;

#[derive(Debug, Clone, PartialEq)]
pub struct MarkedTorus {
    pub id: String,
    pub n: usize,
    pub marked_points: Vec<MarkedPoint>,
}

/// A marked point, by node index and point index within the node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub node: usize,
    pub point: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttachmentKind {
    Disk(IntervalField),
    BlowUp(IntervalField),
    Tube(IntervalField),
    TwoSidedBlowUp(IntervalField),
}

impl AttachmentKind {
    pub fn field(&self) -> &IntervalField {
        match self {
            AttachmentKind::Disk(f)
            | AttachmentKind::BlowUp(f)
            | AttachmentKind::Tube(f)
            | AttachmentKind::TwoSidedBlowUp(f) => f,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AttachmentKind::Disk(_) => "disk",
            AttachmentKind::BlowUp(_) => "blow_up",
            AttachmentKind::Tube(_) => "tube",
            AttachmentKind::TwoSidedBlowUp(_) => "two_sided_blow_up",
        }
    }

    pub fn site_count(&self) -> usize {
        match self {
            AttachmentKind::Disk(_) | AttachmentKind::BlowUp(_) => 1,
            AttachmentKind::Tube(_) | AttachmentKind::TwoSidedBlowUp(_) => 2,
        }
    }

    fn code(&self) -> u8 {
        match self {
            AttachmentKind::Disk(_) => 0,
            AttachmentKind::BlowUp(_) => 1,
            AttachmentKind::Tube(_) => 2,
            AttachmentKind::TwoSidedBlowUp(_) => 3,
        }
    }

    fn is_germ(&self) -> bool {
        matches!(
            self,
            AttachmentKind::BlowUp(_) | AttachmentKind::TwoSidedBlowUp(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attachment {
    pub kind: AttachmentKind,
    /// One site for disks and blow-ups, an ordered pair otherwise.
    pub sites: Vec<Site>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GluingGraph {
    pub n: usize,
    pub nodes: Vec<MarkedTorus>,
    pub attachments: Vec<Attachment>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub attachment: Option<usize>,
    pub site: Option<Site>,
    pub message: String,
}

impl Diagnostic {
    fn graph(message: String) -> Self {
        Diagnostic {
            attachment: None,
            site: None,
            message,
        }
    }
}

/// Every violated constraint; empty means valid.
pub fn validate_graph(g: &GluingGraph) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if g.n < 3 {
        out.push(Diagnostic::graph(format!(
            "dimension n = {} is too small, need n >= 3",
            g.n
        )));
    }
    for (i, node) in g.nodes.iter().enumerate() {
        if node.n != g.n {
            out.push(Diagnostic::graph(format!(
                "node {} has dimension {}, graph has {}",
                node.id, node.n, g.n
            )));
        }
        if g.nodes[..i].iter().any(|m| m.id == node.id) {
            out.push(Diagnostic::graph(format!("duplicate node id {}", node.id)));
        }
        let mut seen = BTreeSet::new();
        for (p, point) in node.marked_points.iter().enumerate() {
            let site = Some(Site { node: i, point: p });
            if point.len() != g.n {
                out.push(Diagnostic {
                    attachment: None,
                    site,
                    message: format!("point has {} coordinates", point.len()),
                });
            }
            if point
                .iter()
                .any(|c| *c < Rational64::from_integer(0) || *c >= Rational64::from_integer(1))
            {
                out.push(Diagnostic {
                    attachment: None,
                    site,
                    message: "coordinates must lie in [0, 1)".into(),
                });
            }
            if !seen.insert(point.clone()) {
                out.push(Diagnostic {
                    attachment: None,
                    site,
                    message: "marked points must be pairwise distinct".into(),
                });
            }
        }
    }

    let mut used: HashMap<Site, usize> = HashMap::new();
    for (a, att) in g.attachments.iter().enumerate() {
        let diag = |site: Option<Site>, message: String| Diagnostic {
            attachment: Some(a),
            site,
            message,
        };
        if att.sites.len() != att.kind.site_count() {
            out.push(diag(
                None,
                format!(
                    "{} needs {} site(s), got {}",
                    att.kind.name(),
                    att.kind.site_count(),
                    att.sites.len()
                ),
            ));
        }
        for &s in &att.sites {
            if g.nodes
                .get(s.node)
                .is_none_or(|node| s.point >= node.marked_points.len())
            {
                out.push(diag(
                    Some(s),
                    "site does not reference an existing marked point".into(),
                ));
            } else if let Some(prev) = used.insert(s, a) {
                if prev != a {
                    out.push(diag(
                        Some(s),
                        format!("site already used by attachment {prev}"),
                    ));
                }
            }
        }
        if att.sites.len() == 2 && att.sites[0] == att.sites[1] {
            let what = if matches!(att.kind, AttachmentKind::Tube(_)) {
                "tube"
            } else {
                "two-sided blow-up"
            };
            out.push(diag(
                Some(att.sites[0]),
                format!("{what} endpoints must be distinct marked points"),
            ));
        }
        let site = att.sites.first().copied();
        for message in field_violations(&att.kind) {
            out.push(diag(site, message));
        }
    }
    out
}

fn field_violations(kind: &AttachmentKind) -> Vec<String> {
    let field = kind.field();
    let mut out = Vec::new();
    if field.domain() != Domain::Full {
        out.push(format!("{} field must live on [-1, 1]", kind.name()));
        return out;
    }
    let thr = field.threshold(TOL_ZERO_EXACT);
    let zeros = match field.zeros(TOL_ZERO_EXACT) {
        Ok(z) => z,
        Err(e) => {
            out.push(format!("{} field: {e}", kind.name()));
            return out;
        }
    };
    let [(xl, _), (xr, _)] = field.endpoint_data();
    let odd = field.coeffs().iter().step_by(2).all(|c| c.abs() <= thr);
    match kind {
        AttachmentKind::Disk(_) | AttachmentKind::Tube(_) => {
            if xl.abs() > thr || xr.abs() > thr {
                out.push(format!(
                    "{} field must vanish at -1 and 1, got {xl} and {xr}",
                    kind.name()
                ));
            }
            if let AttachmentKind::Disk(_) = kind {
                if !odd {
                    out.push("disk field must be odd".into());
                }
                let d0 = field.derivative_at(0.0);
                if (d0 - 1.0).abs() > thr {
                    out.push(format!("disk field has D0X = {d0}, must be 1"));
                }
            }
        }
        AttachmentKind::BlowUp(_) | AttachmentKind::TwoSidedBlowUp(_) => {
            if zeros.len() != 1 || zeros[0].t.abs() > thr {
                let ts: Vec<f64> = zeros.iter().map(|z| z.t).collect();
                out.push(format!(
                    "{} germ must vanish only at 0, zeros at {ts:?}",
                    kind.name()
                ));
            }
            if let AttachmentKind::BlowUp(_) = kind {
                if !odd {
                    out.push("blow-up germ must be odd".into());
                }
            }
        }
    }
    out
}

/// Fails with the first diagnostic.
pub fn ensure_valid(g: &GluingGraph) -> Result<()> {
    match validate_graph(g).into_iter().next() {
        None => Ok(()),
        Some(d) => Err(Error::InvalidInput(d.message)),
    }
}

/// Least common multiple of all coordinate denominators.
pub fn level(g: &GluingGraph) -> i64 {
    g.nodes
        .iter()
        .flat_map(|node| node.marked_points.iter().flatten())
        .fold(1, |acc, c| acc.lcm(c.denom()))
}

/// Blow-up weights, i.e. germ derivatives at 0.
pub fn weight(kind: &AttachmentKind) -> Option<f64> {
    kind.is_germ().then(|| kind.field().derivative_at(0.0))
}

/// No disks or tubes, and every blow-up has weight `n`.
pub fn is_volume_preserving(g: &GluingGraph) -> bool {
    let n = g.n as f64;
    g.attachments
        .iter()
        .all(|a| weight(&a.kind).is_some_and(|w| (w - n).abs() < TOL_ZERO_EXACT))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSummary {
    pub nodes: Vec<usize>,
    pub tori: usize,
    /// Tubes and two-sided blow-ups within the component.
    pub edges: usize,
    pub cycle_rank: usize,
    pub label: String,
    /// The label goes beyond the connected-sum case.
    pub extension: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologySummary {
    pub components: Vec<ComponentSummary>,
}

/// Components under tube and two-sided blow-up edges, ordered by least node.
pub fn summarize_topology(g: &GluingGraph) -> TopologySummary {
    let mut uf = UnionFind::<usize>::new(g.nodes.len());
    let edges: Vec<(usize, usize)> = g
        .attachments
        .iter()
        .filter(|a| a.sites.len() == 2)
        .map(|a| (a.sites[0].node, a.sites[1].node))
        .collect();
    for &(x, y) in &edges {
        uf.union(x, y);
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..g.nodes.len() {
        let root = uf.find(i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, members)) => members.push(i),
            None => groups.push((root, vec![i])),
        }
    }
    let components = groups
        .into_iter()
        .map(|(root, nodes)| {
            let tori = nodes.len();
            let edges = edges.iter().filter(|&&(x, _)| uf.find(x) == root).count();
            let cycle_rank = edges + 1 - tori;
            let (label, extension) = match (cycle_rank, tori) {
                (0, 1) => ("torus".to_string(), false),
                (0, t) => (format!("connected sum of {t} tori"), false),
                (c, _) => (format!("connected sum with handles (cycle rank {c})"), true),
            };
            ComponentSummary {
                nodes,
                tori,
                edges,
                cycle_rank,
                label,
                extension,
            }
        })
        .collect();
    TopologySummary { components }
}

/// Dimension of the graphs built by [`gen_disk_family`].
pub const FAMILY_DIMENSION: usize = 3;

/// `X_r(t) = t(1 - t²)(1 + (1/r - 1)t²)`. It is odd with `D₀X = 1` and
/// `X'(±1) = -2/r`, so both endpoint residues equal `-r/2`.
pub fn disk_family_field(r: f64) -> Result<IntervalField> {
    if !r.is_finite() || r == 0.0 {
        return Err(Error::InadmissibleParameter(format!(
            "residue parameter {r} must be finite and nonzero"
        )));
    }
    let a = 1.0 / r - 1.0;
    if !a.is_finite() {
        return Err(Error::InadmissibleParameter(format!(
            "residue parameter {r} overflows"
        )));
    }
    IntervalField::new(Domain::Full, vec![0.0, 1.0, 0.0, a - 1.0, 0.0, -a])
}

/// One torus with the origin marked and a disk glued there, per residue.
pub fn gen_disk_family(residues: &[f64]) -> Result<Vec<GluingGraph>> {
    residues
        .iter()
        .map(|&r| {
            let field = disk_family_field(r)?;
            let g = GluingGraph {
                n: FAMILY_DIMENSION,
                nodes: vec![MarkedTorus {
                    id: "T".into(),
                    n: FAMILY_DIMENSION,
                    marked_points: vec![vec![Rational64::from_integer(0); FAMILY_DIMENSION]],
                }],
                attachments: vec![Attachment {
                    kind: AttachmentKind::Disk(field),
                    sites: vec![Site { node: 0, point: 0 }],
                }],
            };
            match validate_graph(&g).first() {
                None => Ok(g),
                Some(d) => Err(Error::InadmissibleParameter(format!(
                    "r = {r}: {}",
                    d.message
                ))),
            }
        })
        .collect()
}

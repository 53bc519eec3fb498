//! File schemas and the canonical JSON writer.
//!
//! Every file is a JSON object whose `schema` key names its artifact kind.
//! Canonical form: keys sorted, two-space indentation, floats written with
//! 17 significant digits (`{:.16e}`), integers verbatim, trailing newline.

use std::fmt::Write as _;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::actions::{ActionDescriptor, OrbitType, ScalarSubgroup, TypeIAction, TypeIIAction};
use crate::circlefield::{CircleField, Domain, IntervalField, Involution, TrigPoly};
use crate::error::{Error, Result};
use crate::lattice::{Attachment, AttachmentKind, GluingGraph, MarkedTorus, Site};

pub const FIELD_SCHEMA: &str = "field/v1";
pub const ACTION_SCHEMA: &str = "action/v1";
pub const GRAPH_SCHEMA: &str = "graph/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainSpec {
    #[serde(rename = "[-1,1]")]
    Full,
    #[serde(rename = "[-1,0]")]
    Half,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Trig {
        a0: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    Poly {
        domain: DomainSpec,
        coeffs: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InvolutionSpec {
    Identity,
    ComponentSwap,
    FreeRotation,
    Reflection { axis: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SubgroupSpec {
    Trivial,
    Sign,
    Lattice { generator: f64, with_sign: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case", deny_unknown_fields)]
pub enum OrbitSpec {
    Point,
    Sphere,
    ProjSpace,
    PuncturedRn { subgroup: SubgroupSpec },
    Flag3,
    Gr24,
    FiniteCover { of: Box<OrbitSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum ActionSpec {
    #[serde(rename = "transitive")]
    Transitive { n: usize, orbit: OrbitSpec },
    #[serde(rename = "I")]
    TypeI {
        n: usize,
        components: usize,
        field: FieldSpec,
        involution: InvolutionSpec,
    },
    #[serde(rename = "II")]
    TypeII {
        n: usize,
        field: FieldSpec,
        quotient: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: String,
    /// Coordinates as reduced fractions `"p/q"`.
    pub marked_points: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteSpec {
    pub node: String,
    pub point: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindSpec {
    Disk,
    BlowUp,
    Tube,
    TwoSidedBlowUp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttachmentSpec {
    pub kind: KindSpec,
    pub sites: Vec<SiteSpec>,
    pub field: FieldSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub n: usize,
    pub nodes: Vec<NodeSpec>,
    pub attachments: Vec<AttachmentSpec>,
}

/// A parsed file of any schema.
#[derive(Debug, Clone)]
pub enum Artifact {
    Field(FieldSpec),
    Action(ActionSpec),
    Graph(GraphSpec),
}

impl Artifact {
    pub fn schema(&self) -> &'static str {
        match self {
            Artifact::Field(_) => FIELD_SCHEMA,
            Artifact::Action(_) => ACTION_SCHEMA,
            Artifact::Graph(_) => GRAPH_SCHEMA,
        }
    }

    /// Parses and validates against the library types.
    pub fn parse(text: &str) -> Result<Artifact> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))?;
        let Value::Object(mut map) = value else {
            return Err(Error::InvalidInput(
                "top level must be a JSON object".into(),
            ));
        };
        let schema = match map.remove("schema") {
            Some(Value::String(s)) => s,
            _ => return Err(Error::InvalidInput("missing string key \"schema\"".into())),
        };
        let body = Value::Object(map);
        let bad = |e: serde_json::Error| Error::InvalidInput(format!("{schema}: {e}"));
        let artifact = match schema.as_str() {
            FIELD_SCHEMA => Artifact::Field(serde_json::from_value(body).map_err(bad)?),
            ACTION_SCHEMA => Artifact::Action(serde_json::from_value(body).map_err(bad)?),
            GRAPH_SCHEMA => Artifact::Graph(serde_json::from_value(body).map_err(bad)?),
            other => return Err(Error::InvalidInput(format!("unknown schema {other:?}"))),
        };
        artifact.validate()?;
        Ok(artifact)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Artifact::Field(f) => f.to_field().map(|_| ()),
            Artifact::Action(a) => a.to_descriptor().map(|_| ()),
            Artifact::Graph(g) => g.to_graph().map(|_| ()),
        }
    }

    pub fn to_value(&self) -> Value {
        let body = match self {
            Artifact::Field(f) => serde_json::to_value(f),
            Artifact::Action(a) => serde_json::to_value(a),
            Artifact::Graph(g) => serde_json::to_value(g),
        };
        let mut value = body.expect("schema types serialize");
        value
            .as_object_mut()
            .expect("schema types are objects")
            .insert("schema".into(), self.schema().into());
        value
    }
}

/// A field file as either a circle or an interval field.
pub enum AnyField {
    Circle(CircleField),
    Interval(IntervalField),
}

impl FieldSpec {
    pub fn to_field(&self) -> Result<AnyField> {
        match self {
            FieldSpec::Trig { a0, cos, sin } => Ok(AnyField::Circle(CircleField::from(
                TrigPoly::new(*a0, cos.clone(), sin.clone())?,
            ))),
            FieldSpec::Poly { domain, coeffs } => {
                let d = match domain {
                    DomainSpec::Full => Domain::Full,
                    DomainSpec::Half => Domain::Half,
                };
                Ok(AnyField::Interval(IntervalField::new(d, coeffs.clone())?))
            }
        }
    }

    fn circle(&self) -> Result<CircleField> {
        match self.to_field()? {
            AnyField::Circle(f) => Ok(f),
            AnyField::Interval(_) => Err(Error::InvalidInput("expected a \"trig\" field".into())),
        }
    }

    fn interval(&self) -> Result<IntervalField> {
        match self.to_field()? {
            AnyField::Interval(f) => Ok(f),
            AnyField::Circle(_) => Err(Error::InvalidInput("expected a \"poly\" field".into())),
        }
    }

    pub fn from_interval(f: &IntervalField) -> FieldSpec {
        let domain = match f.domain() {
            Domain::Full => DomainSpec::Full,
            Domain::Half => DomainSpec::Half,
        };
        FieldSpec::Poly {
            domain,
            coeffs: f.coeffs().to_vec(),
        }
    }
}

impl OrbitSpec {
    fn to_orbit(&self) -> Result<OrbitType> {
        Ok(match self {
            OrbitSpec::Point => OrbitType::Point,
            OrbitSpec::Sphere => OrbitType::Sphere,
            OrbitSpec::ProjSpace => OrbitType::ProjSpace,
            OrbitSpec::PuncturedRn { subgroup } => OrbitType::PuncturedRn(match subgroup {
                SubgroupSpec::Trivial => ScalarSubgroup::Trivial,
                SubgroupSpec::Sign => ScalarSubgroup::Sign,
                SubgroupSpec::Lattice {
                    generator,
                    with_sign,
                } => ScalarSubgroup::lattice(*generator, *with_sign)?,
            }),
            OrbitSpec::Flag3 => OrbitType::Flag3,
            OrbitSpec::Gr24 => OrbitType::Gr24,
            OrbitSpec::FiniteCover { of } => OrbitType::FiniteCoverOf(Box::new(of.to_orbit()?)),
        })
    }
}

impl ActionSpec {
    pub fn to_descriptor(&self) -> Result<ActionDescriptor> {
        match self {
            ActionSpec::Transitive { n, orbit } => {
                ActionDescriptor::transitive(*n, orbit.to_orbit()?)
            }
            ActionSpec::TypeI {
                n,
                components,
                field,
                involution,
            } => {
                let tau = match involution {
                    InvolutionSpec::Identity => Involution::Identity,
                    InvolutionSpec::ComponentSwap => Involution::ComponentSwap,
                    InvolutionSpec::FreeRotation => Involution::FreeRotation,
                    InvolutionSpec::Reflection { axis } if axis.is_finite() => {
                        Involution::Reflection { axis: *axis }
                    }
                    InvolutionSpec::Reflection { .. } => {
                        return Err(Error::InvalidInput("reflection axis must be finite".into()))
                    }
                };
                Ok(ActionDescriptor::TypeI(TypeIAction::new(
                    *n,
                    *components,
                    field.circle()?,
                    tau,
                )?))
            }
            ActionSpec::TypeII { n, field, quotient } => Ok(ActionDescriptor::TypeII(
                TypeIIAction::new(*n, field.interval()?, *quotient)?,
            )),
        }
    }
}

/// Parses a reduced fraction `"p/q"` with `q > 0`.
pub fn parse_fraction(s: &str) -> Result<Rational64> {
    let bad = || Error::InvalidInput(format!("{s:?} is not a reduced fraction p/q"));
    let (p, q) = s.split_once('/').ok_or_else(bad)?;
    let p: i64 = p.parse().map_err(|_| bad())?;
    let q: i64 = q.parse().map_err(|_| bad())?;
    if q <= 0 || num_integer::gcd(p, q) != 1 {
        return Err(bad());
    }
    Ok(Rational64::new_raw(p, q))
}

pub fn format_fraction(r: &Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl GraphSpec {
    /// Resolves node ids and fractions. Structural constraints are left to
    /// the lattice validator.
    pub fn to_graph(&self) -> Result<GluingGraph> {
        let nodes = self
            .nodes
            .iter()
            .map(|node| {
                let marked_points = node
                    .marked_points
                    .iter()
                    .map(|p| {
                        p.iter()
                            .map(|c| parse_fraction(c))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(MarkedTorus {
                    id: node.id.clone(),
                    n: self.n,
                    marked_points,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let attachments = self
            .attachments
            .iter()
            .map(|a| {
                let sites =
                    a.sites
                        .iter()
                        .map(|s| {
                            let node = self.nodes.iter().position(|n| n.id == s.node).ok_or_else(
                                || {
                                    Error::InvalidInput(format!(
                                        "site references unknown node {:?}",
                                        s.node
                                    ))
                                },
                            )?;
                            Ok(Site {
                                node,
                                point: s.point,
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                let field = a.field.interval()?;
                let kind = match a.kind {
                    KindSpec::Disk => AttachmentKind::Disk(field),
                    KindSpec::BlowUp => AttachmentKind::BlowUp(field),
                    KindSpec::Tube => AttachmentKind::Tube(field),
                    KindSpec::TwoSidedBlowUp => AttachmentKind::TwoSidedBlowUp(field),
                };
                Ok(Attachment { kind, sites })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GluingGraph {
            n: self.n,
            nodes,
            attachments,
        })
    }

    pub fn from_graph(g: &GluingGraph) -> GraphSpec {
        GraphSpec {
            n: g.n,
            nodes: g
                .nodes
                .iter()
                .map(|node| NodeSpec {
                    id: node.id.clone(),
                    marked_points: node
                        .marked_points
                        .iter()
                        .map(|p| p.iter().map(format_fraction).collect())
                        .collect(),
                })
                .collect(),
            attachments: g
                .attachments
                .iter()
                .map(|a| AttachmentSpec {
                    kind: match a.kind {
                        AttachmentKind::Disk(_) => KindSpec::Disk,
                        AttachmentKind::BlowUp(_) => KindSpec::BlowUp,
                        AttachmentKind::Tube(_) => KindSpec::Tube,
                        AttachmentKind::TwoSidedBlowUp(_) => KindSpec::TwoSidedBlowUp,
                    },
                    sites: a
                        .sites
                        .iter()
                        .map(|s| SiteSpec {
                            node: g.nodes[s.node].id.clone(),
                            point: s.point,
                        })
                        .collect(),
                    field: FieldSpec::from_interval(a.kind.field()),
                })
                .collect(),
        }
    }
}

/// Canonical text of a JSON value.
pub fn canonical(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, value: &Value, indent: usize) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) if !n.is_f64() => write!(out, "{i}").expect("write to String"),
            (_, Some(u), _) if !n.is_f64() => write!(out, "{u}").expect("write to String"),
            (_, _, Some(f)) => write!(out, "{f:.16e}").expect("write to String"),
            _ => unreachable!("JSON numbers are i64, u64 or f64"),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                out.push_str(if i == 0 { "\n" } else { ",\n" });
                pad(out, indent + 1);
                write_value(out, item, indent + 1);
            }
            out.push('\n');
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => write_object(out, map, indent),
    }
}

fn write_object(out: &mut String, map: &Map<String, Value>, indent: usize) {
    let mut keys: Vec<&String> = map.keys().collect();
    keys.sort();
    out.push('{');
    for (i, key) in keys.into_iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        pad(out, indent + 1);
        out.push_str(&Value::String(key.clone()).to_string());
        out.push_str(": ");
        write_value(out, &map[key], indent + 1);
    }
    out.push('\n');
    pad(out, indent);
    out.push('}');
}

fn pad(out: &mut String, indent: usize) {
    out.extend(std::iter::repeat_n("  ", indent));
}

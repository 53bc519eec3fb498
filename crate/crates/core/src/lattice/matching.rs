//! Equivalence of gluing graphs by exhaustive node matching.
//!
//! A node bijection fixes the point bijection (marked points are compared
//! exactly and are distinct within a node), and since every site carries at
//! most one attachment it also fixes the attachment bijection. The search
//! therefore enumerates node bijections only, restricted to nodes with equal
//! signatures (marked points together with the kind attached at each), and
//! scores each attachment as soon as all its endpoints are placed.

use std::collections::HashMap;

use super::{AttachmentKind, GluingGraph, MarkedPoint, Site};
use crate::circlefield::{IntervalField, TOL_ZERO_EXACT};
use crate::error::{Error, Result};
use crate::invariants::{interval_invariants, laurent_from_taylor, IntervalInvariants, MatchLevel};

/// Conjugacy data of an attachment field.
#[derive(Debug, Clone)]
enum Local {
    /// Disks and tubes.
    Interval(IntervalInvariants),
    /// Blow-up germs: order and residue at 0.
    Germ(usize, f64),
}

impl Local {
    fn of(kind: &AttachmentKind, field: &IntervalField) -> Result<Local> {
        if !kind.is_germ() {
            return Ok(Local::Interval(interval_invariants(field, TOL_ZERO_EXACT)?));
        }
        let zeros = field.zeros(TOL_ZERO_EXACT)?;
        let z = zeros
            .iter()
            .min_by(|a, b| a.t.abs().total_cmp(&b.t.abs()))
            .ok_or_else(|| Error::InvalidInput("blow-up germ does not vanish at 0".into()))?;
        let c = laurent_from_taylor(&z.taylor, z.order, z.order).ok_or_else(|| {
            Error::ZeroIsolationFailure {
                theta: z.t,
                reason: "leading Taylor coefficient vanishes".into(),
            }
        })?;
        Ok(Local::Germ(z.order, c[z.order - 1]))
    }

    fn level(&self, other: &Local, tol: f64) -> MatchLevel {
        match (self, other) {
            (Local::Interval(a), Local::Interval(b)) => a.level(b, tol),
            (Local::Germ(m, r), Local::Germ(k, s)) if m == k => MatchLevel::compare(*r, *s, tol),
            _ => MatchLevel::Mismatch,
        }
    }
}

struct Search<'a> {
    g1: &'a GluingGraph,
    g2: &'a GluingGraph,
    tol: f64,
    candidates: Vec<Vec<usize>>,
    /// `points2[j]` maps a marked point of node `j` of `g2` to its index.
    points2: Vec<HashMap<&'a MarkedPoint, usize>>,
    site2: HashMap<Site, usize>,
    /// `g1` attachments whose highest endpoint node is `i`.
    due: Vec<Vec<usize>>,
    local1: Vec<Local>,
    /// Direct and end-swapped data of `g2` attachments.
    local2: Vec<[Local; 2]>,
}

impl Search<'_> {
    fn score(&self, a: usize, assign: &[usize]) -> MatchLevel {
        let att = &self.g1.attachments[a];
        let mapped: Vec<Site> = att
            .sites
            .iter()
            .map(|s| {
                let j = assign[s.node];
                Site {
                    node: j,
                    point: self.points2[j][&self.g1.nodes[s.node].marked_points[s.point]],
                }
            })
            .collect();
        let Some(&b) = self.site2.get(&mapped[0]) else {
            return MatchLevel::Mismatch;
        };
        let other = &self.g2.attachments[b];
        if other.kind.code() != att.kind.code() {
            return MatchLevel::Mismatch;
        }
        let orientation = if other.sites == mapped {
            0
        } else if mapped.len() == 2 && other.sites[0] == mapped[1] && other.sites[1] == mapped[0] {
            1
        } else {
            return MatchLevel::Mismatch;
        };
        self.local1[a].level(&self.local2[b][orientation], self.tol)
    }

    fn run(
        &self,
        i: usize,
        assign: &mut Vec<usize>,
        used: &mut [bool],
        acc: MatchLevel,
        best: &mut MatchLevel,
    ) {
        if i == self.g1.nodes.len() {
            *best = (*best).min(acc);
            return;
        }
        for &j in &self.candidates[i] {
            if used[j] {
                continue;
            }
            assign.push(j);
            let level = self.due[i]
                .iter()
                .fold(acc, |l, &a| l.and(self.score(a, assign)));
            if level < *best {
                used[j] = true;
                self.run(i + 1, assign, used, level, best);
                used[j] = false;
            }
            assign.pop();
            if *best == MatchLevel::Match {
                return;
            }
        }
    }
}

/// Sorted `(point, kind code at that point)` pairs.
fn signatures(g: &GluingGraph) -> Vec<Vec<(MarkedPoint, Option<u8>)>> {
    let mut kind_at: HashMap<Site, u8> = HashMap::new();
    for a in &g.attachments {
        for &s in &a.sites {
            kind_at.insert(s, a.kind.code());
        }
    }
    g.nodes
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let mut sig: Vec<(MarkedPoint, Option<u8>)> = node
                .marked_points
                .iter()
                .enumerate()
                .map(|(p, pt)| {
                    (
                        pt.clone(),
                        kind_at.get(&Site { node: i, point: p }).copied(),
                    )
                })
                .collect();
            sig.sort();
            sig
        })
        .collect()
}

/// Whether some bijection of nodes, marked points and attachments carries
/// `g1` to `g2` with conjugate attachment fields. Tube and two-sided blow-up
/// ends may be exchanged, which reflects the field. Both graphs must be
/// valid.
pub fn equivalent_graphs(g1: &GluingGraph, g2: &GluingGraph, tol_match: f64) -> Result<bool> {
    super::ensure_valid(g1)?;
    super::ensure_valid(g2)?;
    if g1.n != g2.n
        || g1.nodes.len() != g2.nodes.len()
        || g1.attachments.len() != g2.attachments.len()
    {
        return Ok(false);
    }
    let (sig1, sig2) = (signatures(g1), signatures(g2));
    let candidates: Vec<Vec<usize>> = sig1
        .iter()
        .map(|s| (0..g2.nodes.len()).filter(|&j| sig2[j] == *s).collect())
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(false);
    }

    let mut due = vec![Vec::new(); g1.nodes.len()];
    for (a, att) in g1.attachments.iter().enumerate() {
        let last = att
            .sites
            .iter()
            .map(|s| s.node)
            .max()
            .expect("valid attachments have sites");
        due[last].push(a);
    }
    let local1 = g1
        .attachments
        .iter()
        .map(|a| Local::of(&a.kind, a.kind.field()))
        .collect::<Result<Vec<_>>>()?;
    let local2 = g2
        .attachments
        .iter()
        .map(|a| {
            let field = a.kind.field();
            Ok([
                Local::of(&a.kind, field)?,
                Local::of(&a.kind, &field.flipped()?)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let search = Search {
        g1,
        g2,
        tol: tol_match,
        candidates,
        points2: g2
            .nodes
            .iter()
            .map(|n| {
                n.marked_points
                    .iter()
                    .enumerate()
                    .map(|(p, pt)| (pt, p))
                    .collect()
            })
            .collect(),
        site2: g2
            .attachments
            .iter()
            .enumerate()
            .flat_map(|(b, a)| a.sites.iter().map(move |&s| (s, b)))
            .collect(),
        due,
        local1,
        local2,
    };
    let mut best = MatchLevel::Mismatch;
    let mut assign = Vec::with_capacity(g1.nodes.len());
    let mut used = vec![false; g2.nodes.len()];
    // a full assignment scoring Mismatch never improves on the initial value
    search.run(0, &mut assign, &mut used, MatchLevel::Match, &mut best);
    MatchLevel::decide([best], "attachment fields")
}

#[cfg(test)]
mod tests {
    use super::super::tests::{origin, q, torus, tube_field, tube_pair};
    use super::super::{disk_family_field, gen_disk_family, Attachment};
    use super::*;

    #[test]
    fn relabeled_nodes() {
        let g = tube_pair();
        let mut h = g.clone();
        h.nodes.swap(0, 1);
        h.attachments[0].sites = vec![Site { node: 1, point: 0 }, Site { node: 0, point: 0 }];
        assert!(equivalent_graphs(&g, &h, 1e-6).unwrap());
    }

    #[test]
    fn reflected_tube_with_swapped_ends() {
        let mut g = tube_pair();
        // distinguish the nodes so that relabeling cannot swap the ends
        g.nodes[1]
            .marked_points
            .push(vec![q(1, 2), q(0, 1), q(0, 1)]);
        let mut h = g.clone();
        h.attachments[0].kind = AttachmentKind::Tube(tube_field().flipped().unwrap());
        h.attachments[0].sites.reverse();
        assert!(equivalent_graphs(&g, &h, 1e-6).unwrap());
        // reflecting without swapping changes the gluing
        h.attachments[0].sites.reverse();
        assert!(!equivalent_graphs(&g, &h, 1e-6).unwrap());
    }

    #[test]
    fn disk_residue_separates() {
        let a = gen_disk_family(&[1.0, 1.1, 1.0]).unwrap();
        assert!(!equivalent_graphs(&a[0], &a[1], 1e-6).unwrap());
        assert!(equivalent_graphs(&a[0], &a[2], 1e-6).unwrap());
    }

    #[test]
    fn marked_points_compared_exactly() {
        let mut g = tube_pair();
        let mut h = tube_pair();
        g.nodes[1]
            .marked_points
            .push(vec![q(1, 2), q(0, 1), q(0, 1)]);
        h.nodes[1]
            .marked_points
            .push(vec![q(0, 1), q(1, 2), q(0, 1)]);
        assert!(!equivalent_graphs(&g, &h, 1e-6).unwrap());
    }

    #[test]
    fn attachment_position_matters() {
        let pts = vec![origin(), vec![q(1, 2), q(0, 1), q(0, 1)]];
        let disk = |p: usize| GluingGraph {
            n: 3,
            nodes: vec![torus("T", pts.clone())],
            attachments: vec![Attachment {
                kind: AttachmentKind::Disk(disk_family_field(1.0).unwrap()),
                sites: vec![Site { node: 0, point: p }],
            }],
        };
        assert!(!equivalent_graphs(&disk(0), &disk(1), 1e-6).unwrap());
        assert!(equivalent_graphs(&disk(1), &disk(1), 1e-6).unwrap());
    }

    #[test]
    fn near_tie_is_ambiguous() {
        let a = gen_disk_family(&[1.0, 1.0 + 4e-6]).unwrap();
        assert!(matches!(
            equivalent_graphs(&a[0], &a[1], 1e-6),
            Err(Error::AmbiguousMatch(_))
        ));
    }
}

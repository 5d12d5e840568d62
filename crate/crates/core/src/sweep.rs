//! Exact plane sweep over polyline segments.
//!
//! Events are processed in lexicographic `(x, y)` order. The status holds the
//! segments cut by the sweep line, ordered by their height at the current
//! event; a vertical segment is keyed by the event itself. All predicates are
//! exact, so degenerate inputs (shared endpoints, collinear overlaps, many
//! segments through one point) are handled without tolerances.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::Rational;
use crate::geometry::{cross_sign, orient, segment_contact, Position, RatPoint, SegmentContact};
use crate::graph::{EdgeId, EmbeddedGraph, VertexId};

/// An interior intersection point of two vertex-disjoint edges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Crossing {
    pub edge_a: EdgeId,
    pub edge_b: EdgeId,
    pub point: RatPoint,
    /// Segment of `edge_a`'s polyline containing the point.
    pub seg_a: usize,
    pub seg_b: usize,
}

/// Crossings sorted by `(edge_a, edge_b, point)`, one per distinct point.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CrossingSet {
    crossings: Vec<Crossing>,
}

impl CrossingSet {
    /// Sorts and removes duplicate `(edge_a, edge_b, point)` triples, keeping
    /// the smallest segment indices.
    pub fn from_unsorted(mut crossings: Vec<Crossing>) -> Self {
        crossings.sort();
        crossings.dedup_by(|b, a| a.edge_a == b.edge_a && a.edge_b == b.edge_b && a.point == b.point);
        CrossingSet { crossings }
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Crossing> {
        self.crossings.iter()
    }

    pub fn as_slice(&self) -> &[Crossing] {
        &self.crossings
    }

    /// Distinct crossing points; several pairs may share one under degenerate input.
    pub fn distinct_points(&self) -> BTreeSet<&RatPoint> {
        self.crossings.iter().map(|c| &c.point).collect()
    }

    /// Distinct crossing edge pairs.
    pub fn pair_count(&self) -> usize {
        let mut n = 0;
        let mut last = None;
        for c in &self.crossings {
            if last != Some((c.edge_a, c.edge_b)) {
                n += 1;
                last = Some((c.edge_a, c.edge_b));
            }
        }
        n
    }

    /// `edge_a  edge_b  px_num/px_den  py_num/py_den  seg_a  seg_b`
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for c in &self.crossings {
            let frac = |r: &Rational| format!("{}/{}", r.numer(), r.denom());
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                c.edge_a,
                c.edge_b,
                frac(&c.point.x),
                frac(&c.point.y),
                c.seg_a,
                c.seg_b
            ));
        }
        out
    }
}

impl<'a> IntoIterator for &'a CrossingSet {
    type Item = &'a Crossing;
    type IntoIter = std::slice::Iter<'a, Crossing>;
    fn into_iter(self) -> Self::IntoIter {
        self.crossings.iter()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Three or more edge curves pass through one point.
    TriplePoint,
    /// A bend of one edge touches another edge.
    EndpointOnInterior,
    OverlappingCollinear,
    SelfIntersectingPolyline,
    /// A vertex lies in the interior of an edge it is not incident to.
    VertexOnDisjointEdge,
    /// Two edges with a common endpoint also cross somewhere else.
    AdjacentEdgesCross,
    /// Two edges cross more than once.
    MultipleCrossings,
    /// Two vertices share a position.
    CoincidentVertices,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::TriplePoint => "triple-point",
            ViolationKind::EndpointOnInterior => "endpoint-on-interior",
            ViolationKind::OverlappingCollinear => "overlapping-collinear",
            ViolationKind::SelfIntersectingPolyline => "self-intersecting-polyline",
            ViolationKind::VertexOnDisjointEdge => "vertex-on-disjoint-edge",
            ViolationKind::AdjacentEdgesCross => "adjacent-edges-cross",
            ViolationKind::MultipleCrossings => "multiple-crossings",
            ViolationKind::CoincidentVertices => "coincident-vertices",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub point: RatPoint,
    pub edges: Vec<EdgeId>,
    pub vertices: Vec<VertexId>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at ({}, {})", self.kind, self.point.x, self.point.y)?;
        if !self.edges.is_empty() {
            let ids: Vec<String> = self.edges.iter().map(|e| e.to_string()).collect();
            write!(f, " edges [{}]", ids.join(", "))?;
        }
        if !self.vertices.is_empty() {
            let ids: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
            write!(f, " vertices [{}]", ids.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strictness {
    Strict,
    #[default]
    Lenient,
}

#[derive(Debug, thiserror::Error)]
#[error("embedding is not nice: {} violation(s), first: {}", .violations.len(), .violations[0])]
pub struct EmbeddingError {
    pub violations: Vec<Violation>,
}

/// Everything one sweep learns about a graph.
#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    pub crossings: CrossingSet,
    pub violations: Vec<Violation>,
}

/// All crossings of a graph. Strict mode rejects graphs whose embedding is
/// not nice; lenient mode logs the violations and returns the crossings.
pub fn find_crossings<P: Position>(g: &EmbeddedGraph<P>, strictness: Strictness) -> Result<CrossingSet, EmbeddingError> {
    let report = sweep(g);
    if !report.violations.is_empty() {
        match strictness {
            Strictness::Strict => return Err(EmbeddingError { violations: report.violations }),
            Strictness::Lenient => {
                log::warn!("{} embedding violation(s)", report.violations.len());
                for v in &report.violations {
                    log::warn!("{v}");
                }
            }
        }
    }
    Ok(report.crossings)
}

pub fn validate_nice_embedding<P: Position>(g: &EmbeddedGraph<P>) -> Vec<Violation> {
    sweep(g).violations
}

struct Seg {
    edge: usize,
    idx: usize,
    /// Lexicographically smaller endpoint.
    left: RatPoint,
    right: RatPoint,
    /// `left` is the polyline's point `idx` (the segment runs left to right).
    forward: bool,
    dir: (Rational, Rational),
}

impl Seg {
    fn vertical(&self) -> bool {
        self.dir.0.is_zero()
    }
}

fn segments<P: Position>(g: &EmbeddedGraph<P>) -> Vec<Seg> {
    let mut out = Vec::new();
    for (ei, e) in g.edges().iter().enumerate() {
        let pts: Vec<RatPoint> = e.geometry.points().iter().map(Position::to_rat).collect();
        for (idx, w) in pts.windows(2).enumerate() {
            let forward = w[0] < w[1];
            let (left, right) = if forward { (w[0].clone(), w[1].clone()) } else { (w[1].clone(), w[0].clone()) };
            let dir = (&right.x - &left.x, &right.y - &left.y);
            out.push(Seg { edge: ei, idx, left, right, forward, dir });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Role {
    Start,
    End,
    Interior,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum EdgeAt {
    /// `p` is one of the edge's end vertices.
    End,
    Bend,
    /// `p` is interior to exactly one segment.
    Segment(usize),
    /// Anything else: the polyline visits `p` twice.
    Complex,
}

fn vertex_disjoint<P: Position>(g: &EmbeddedGraph<P>, a: usize, b: usize) -> bool {
    let (a0, a1) = g.ends(a);
    let (b0, b1) = g.ends(b);
    a0 != b0 && a0 != b1 && a1 != b0 && a1 != b1
}

fn crossing_record<P: Position>(g: &EmbeddedGraph<P>, s: &Seg, t: &Seg, point: RatPoint) -> Crossing {
    let (s, t) = if s.edge < t.edge { (s, t) } else { (t, s) };
    Crossing { edge_a: g.edge(s.edge).id, edge_b: g.edge(t.edge).id, point, seg_a: s.idx, seg_b: t.idx }
}

/// Runs the sweep, collecting crossings and nice-embedding violations.
pub fn sweep<P: Position>(g: &EmbeddedGraph<P>) -> SweepReport {
    let segs = segments(g);
    let mut events: BTreeMap<RatPoint, Vec<usize>> = BTreeMap::new();
    for (i, s) in segs.iter().enumerate() {
        events.entry(s.left.clone()).or_default().push(i);
        events.entry(s.right.clone()).or_default();
    }
    let mut vertices_at: BTreeMap<RatPoint, Vec<usize>> = BTreeMap::new();
    for (vi, v) in g.vertices().iter().enumerate() {
        let p = v.pos.to_rat();
        events.entry(p.clone()).or_default();
        vertices_at.entry(p).or_default().push(vi);
    }

    let mut status: Vec<usize> = Vec::new();
    let mut crossings = Vec::new();
    let mut violations = Vec::new();

    while let Some((p, mut upper)) = events.pop_first() {
        // Height of each status segment at p relative to p itself.
        let below = |s: usize| {
            let seg = &segs[s];
            !seg.vertical() && orient(&seg.left, &seg.right, &p) > 0
        };
        let through = |s: usize| {
            let seg = &segs[s];
            seg.vertical() || orient(&seg.left, &seg.right, &p) == 0
        };
        let lo = status.partition_point(|&s| below(s));
        let hi = lo + status[lo..].partition_point(|&s| through(s));
        let mut lower = Vec::new();
        let mut contain = Vec::new();
        for &s in &status[lo..hi] {
            if segs[s].right == p {
                lower.push(s);
            } else {
                contain.push(s);
            }
        }
        upper.sort_unstable();

        report_event(g, &segs, &p, &upper, &lower, &contain, vertices_at.get(&p), &mut crossings, &mut violations);

        // Reinsert the segments continuing past p in their order just after p.
        let mut group: Vec<usize> = upper.iter().chain(contain.iter()).copied().collect();
        group.sort_by(|&a, &b| {
            let (sa, sb) = (&segs[a], &segs[b]);
            0.cmp(&cross_sign(&sa.dir, &sb.dir)).then((sa.edge, sa.idx).cmp(&(sb.edge, sb.idx)))
        });
        let k = group.len();
        status.splice(lo..hi, group);

        let mut test = |a: usize, b: usize| {
            let (sa, sb) = (&segs[a], &segs[b]);
            if let SegmentContact::Proper(q) = segment_contact(&sa.left, &sa.right, &sb.left, &sb.right) {
                if q > p {
                    events.entry(q).or_default();
                }
            }
        };
        if k == 0 {
            if lo > 0 && lo < status.len() {
                test(status[lo - 1], status[lo]);
            }
        } else {
            if lo > 0 {
                test(status[lo - 1], status[lo]);
            }
            if lo + k < status.len() {
                test(status[lo + k - 1], status[lo + k]);
            }
        }
    }
    debug_assert!(status.is_empty());

    let crossings = CrossingSet::from_unsorted(crossings);
    let cs = crossings.as_slice();
    let mut i = 0;
    while i < cs.len() {
        let mut j = i + 1;
        while j < cs.len() && cs[j].edge_a == cs[i].edge_a && cs[j].edge_b == cs[i].edge_b {
            j += 1;
        }
        if j - i > 1 {
            violations.push(Violation {
                kind: ViolationKind::MultipleCrossings,
                point: cs[i].point.clone(),
                edges: vec![cs[i].edge_a, cs[i].edge_b],
                vertices: Vec::new(),
            });
        }
        i = j;
    }
    violations.sort();
    violations.dedup();
    SweepReport { crossings, violations }
}

#[allow(clippy::too_many_arguments)]
fn report_event<P: Position>(
    g: &EmbeddedGraph<P>,
    segs: &[Seg],
    p: &RatPoint,
    upper: &[usize],
    lower: &[usize],
    contain: &[usize],
    vertices: Option<&Vec<usize>>,
    crossings: &mut Vec<Crossing>,
    violations: &mut Vec<Violation>,
) {
    let eid = |e: usize| g.edge(e).id;
    let mut push = |kind, mut edges: Vec<EdgeId>, vertices: Vec<VertexId>| {
        edges.sort();
        violations.push(Violation { kind, point: p.clone(), edges, vertices });
    };

    // Proper crossings: pairs of segments with p strictly inside both.
    let mut proper_pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (i, &a) in contain.iter().enumerate() {
        for &b in &contain[i + 1..] {
            let (sa, sb) = (&segs[a], &segs[b]);
            if sa.edge == sb.edge || cross_sign(&sa.dir, &sb.dir) == 0 {
                continue;
            }
            proper_pairs.insert((sa.edge.min(sb.edge), sa.edge.max(sb.edge)));
            if vertex_disjoint(g, sa.edge, sb.edge) {
                crossings.push(crossing_record(g, sa, sb, p.clone()));
            }
        }
    }

    // Cheap exit for the common case: a plain vertex or a plain crossing.
    if upper.len() + lower.len() + contain.len() <= 1 && contain.is_empty() && vertices.is_none_or(|v| v.len() <= 1) {
        return;
    }

    let mut roles: BTreeMap<usize, Vec<(usize, Role)>> = BTreeMap::new();
    for &s in lower.iter().chain(upper) {
        let seg = &segs[s];
        let at_left = &seg.left == p;
        let role = if at_left == seg.forward { Role::Start } else { Role::End };
        roles.entry(seg.edge).or_default().push((seg.idx, role));
    }
    for &s in contain {
        roles.entry(segs[s].edge).or_default().push((segs[s].idx, Role::Interior));
    }
    let mut interior: Vec<(usize, EdgeAt)> = Vec::new();
    for (&e, r) in roles.iter_mut() {
        r.sort();
        let last = g.edge(e).geometry.segment_count() - 1;
        let at = match r.as_slice() {
            [(0, Role::Start)] => EdgeAt::End,
            [(i, Role::End)] if *i == last => EdgeAt::End,
            [(i, Role::End), (j, Role::Start)] if i + 1 == *j => EdgeAt::Bend,
            [(i, Role::Interior)] => EdgeAt::Segment(*i),
            _ => EdgeAt::Complex,
        };
        if at == EdgeAt::Complex {
            push(ViolationKind::SelfIntersectingPolyline, vec![eid(e)], Vec::new());
        }
        if at != EdgeAt::End {
            interior.push((e, at));
        }
    }

    if let Some(vs) = vertices {
        if vs.len() > 1 {
            push(ViolationKind::CoincidentVertices, Vec::new(), vs.iter().map(|&v| g.vertex(v).id).collect());
        }
        for &v in vs {
            for &(e, _) in &interior {
                let (a, b) = g.ends(e);
                if a != v && b != v {
                    push(ViolationKind::VertexOnDisjointEdge, vec![eid(e)], vec![g.vertex(v).id]);
                }
            }
        }
    }
    if interior.len() >= 3 {
        push(ViolationKind::TriplePoint, interior.iter().map(|&(e, _)| eid(e)).collect(), Vec::new());
    }
    for (i, &(a, at_a)) in interior.iter().enumerate() {
        for &(b, at_b) in &interior[i + 1..] {
            if at_a == EdgeAt::Bend || at_b == EdgeAt::Bend {
                push(ViolationKind::EndpointOnInterior, vec![eid(a), eid(b)], Vec::new());
            } else if proper_pairs.contains(&(a, b)) && !vertex_disjoint(g, a, b) {
                push(ViolationKind::AdjacentEdgesCross, vec![eid(a), eid(b)], Vec::new());
            }
        }
    }

    // Collinear overlaps starting at p: segments leaving p in the same
    // direction, at least one of them starting here.
    let leaving: Vec<(usize, bool)> = upper.iter().map(|&s| (s, true)).chain(contain.iter().map(|&s| (s, false))).collect();
    for (i, &(a, ua)) in leaving.iter().enumerate() {
        for &(b, ub) in &leaving[i + 1..] {
            if !(ua || ub) || cross_sign(&segs[a].dir, &segs[b].dir) != 0 {
                continue;
            }
            let (ea, eb) = (segs[a].edge, segs[b].edge);
            if ea == eb {
                push(ViolationKind::SelfIntersectingPolyline, vec![eid(ea)], Vec::new());
            } else {
                push(ViolationKind::OverlappingCollinear, vec![eid(ea), eid(eb)], Vec::new());
            }
        }
    }
}

/// Reference implementation testing every pair of segments.
pub fn brute_force_crossings<P: Position>(g: &EmbeddedGraph<P>) -> CrossingSet {
    let segs = segments(g);
    let boxes: Vec<[f64; 4]> = segs
        .iter()
        .map(|s| {
            let (x0, y0) = (s.left.x.to_f64(), s.left.y.to_f64());
            let (x1, y1) = (s.right.x.to_f64(), s.right.y.to_f64());
            let pad = |v: f64| v.abs() * 1e-12 + 1e-300;
            [x0 - pad(x0), x1 + pad(x1), y0.min(y1) - pad(y0.min(y1)), y0.max(y1) + pad(y0.max(y1))]
        })
        .collect();
    let found: Vec<Crossing> = (0..segs.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (segs, boxes) = (&segs, &boxes);
            (i + 1..segs.len()).filter_map(move |j| {
                let (a, b) = (&segs[i], &segs[j]);
                let (ba, bb) = (&boxes[i], &boxes[j]);
                if a.edge == b.edge || ba[1] < bb[0] || bb[1] < ba[0] || ba[3] < bb[2] || bb[3] < ba[2] {
                    return None;
                }
                if !vertex_disjoint(g, a.edge, b.edge) {
                    return None;
                }
                match segment_contact(&a.left, &a.right, &b.left, &b.right) {
                    SegmentContact::Proper(q) => Some(crossing_record(g, a, b, q)),
                    _ => None,
                }
            })
        })
        .collect();
    CrossingSet::from_unsorted(found)
}

//! Planarization: every crossing point becomes a vertex and the crossed
//! edges are split there.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::arith::Rational;
use crate::geometry::{param_on_segment, Polyline, Position, RatPoint};
use crate::graph::{Edge, EdgeId, EmbeddedGraph, Vertex, VertexId};
use crate::sweep::CrossingSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VertexOrigin {
    Original { vertex: VertexId },
    /// A crossing point, with the indices of the crossings located there, the
    /// network edges passing through it and their end vertices.
    Artificial { point: RatPoint, crossings: Vec<usize>, edges: Vec<EdgeId>, endpoints: Vec<VertexId> },
}

/// Where a piece of the planarization came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeOrigin {
    pub parent: EdgeId,
    /// Position among the parent's pieces, from its `u` end.
    pub index: usize,
    /// Start and end as (segment index, parameter in [0, 1]) on the parent polyline.
    pub from: (usize, Rational),
    pub to: (usize, Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanarizeError {
    #[error("crossing references unknown edge {0}")]
    UnknownEdge(EdgeId),
}

#[derive(Clone, Debug)]
pub struct Planarization {
    pub pgraph: EmbeddedGraph<RatPoint>,
    /// Indexed like `pgraph.vertices()`.
    pub vertex_map: Vec<VertexOrigin>,
    /// Indexed like `pgraph.edges()`.
    pub edge_map: Vec<EdgeOrigin>,
    /// For each network edge (by index), its pieces in order.
    pub pieces: Vec<Vec<usize>>,
    /// Network vertices and edges the planarization was built from.
    pub n: usize,
    pub m: usize,
}

impl Planarization {
    pub fn artificial_count(&self) -> usize {
        self.vertex_map.iter().filter(|o| matches!(o, VertexOrigin::Artificial { .. })).count()
    }

    pub fn is_artificial(&self, p: usize) -> bool {
        matches!(self.vertex_map[p], VertexOrigin::Artificial { .. })
    }

    /// `|V(P)| = n + X` and `|E(P)| = m + 2X` for X crossing points.
    pub fn identities_hold(&self) -> bool {
        let x = self.artificial_count();
        self.pgraph.vertex_count() == self.n + x && self.pgraph.edge_count() == self.m + 2 * x
    }

    /// Network vertices standing in for P-vertex `p`: itself if original,
    /// otherwise the endpoints of the edges crossing there.
    pub fn lift_vertex(&self, p: usize) -> &[VertexId] {
        match &self.vertex_map[p] {
            VertexOrigin::Original { vertex } => std::slice::from_ref(vertex),
            VertexOrigin::Artificial { endpoints, .. } => endpoints,
        }
    }

    /// `p_vertex  kind  origin`; the origin of an artificial vertex lists the crossing edges.
    pub fn vertex_map_tsv(&self) -> String {
        let mut out = String::new();
        for (v, origin) in self.pgraph.vertices().iter().zip(&self.vertex_map) {
            match origin {
                VertexOrigin::Original { vertex } => writeln!(out, "{}\toriginal\t{vertex}", v.id),
                VertexOrigin::Artificial { edges, .. } => {
                    let ids: Vec<String> = edges.iter().map(|e| e.to_string()).collect();
                    writeln!(out, "{}\tartificial\t{}", v.id, ids.join(","))
                }
            }
            .unwrap();
        }
        out
    }

    /// `p_edge  parent_edge  index`
    pub fn edge_map_tsv(&self) -> String {
        let mut out = String::new();
        for (e, origin) in self.pgraph.edges().iter().zip(&self.edge_map) {
            writeln!(out, "{}\t{}\t{}", e.id, origin.parent, origin.index).unwrap();
        }
        out
    }
}

/// Exact rational stand-in for a segment's length, used to spread an edge's
/// weight over its segments.
fn rational_length<P: Position>(a: &P, b: &P) -> Rational {
    let (ax, ay) = a.approx();
    let (bx, by) = b.approx();
    let len = (bx - ax).hypot(by - ay);
    Rational::from_f64_exact(len).filter(|l| l.signum() > 0).unwrap_or_else(Rational::one)
}

fn segment_weights<P: Position>(e: &Edge<P>) -> Vec<Rational> {
    let pts = e.geometry.points();
    if pts.len() == 2 {
        return vec![e.weight.clone()];
    }
    let lengths: Vec<Rational> = pts.windows(2).map(|w| rational_length(&w[0], &w[1])).collect();
    let total: Rational = lengths.iter().cloned().sum();
    lengths.iter().map(|l| &(&e.weight * l) / &total).collect()
}

pub fn planarize<P: Position>(g: &EmbeddedGraph<P>, xs: &CrossingSet) -> Result<Planarization, PlanarizeError> {
    let base = g.max_vertex_id().map_or(0, |v| v.0 + 1);

    // Artificial vertices in sorted point order.
    let mut at_point: BTreeMap<&RatPoint, (Vec<usize>, Vec<EdgeId>)> = BTreeMap::new();
    for (i, c) in xs.iter().enumerate() {
        let entry = at_point.entry(&c.point).or_default();
        entry.0.push(i);
        entry.1.extend([c.edge_a, c.edge_b]);
    }
    let mut vertices: Vec<Vertex<RatPoint>> =
        g.vertices().iter().map(|v| Vertex { id: v.id, pos: v.pos.to_rat() }).collect();
    let mut vertex_map: Vec<VertexOrigin> = g.vertices().iter().map(|v| VertexOrigin::Original { vertex: v.id }).collect();
    let mut point_id: BTreeMap<&RatPoint, VertexId> = BTreeMap::new();
    for (k, (point, (crossings, mut edges))) in at_point.into_iter().enumerate() {
        edges.sort();
        edges.dedup();
        let mut endpoints = Vec::with_capacity(2 * edges.len());
        for &e in &edges {
            let ei = g.edge_index(e).ok_or(PlanarizeError::UnknownEdge(e))?;
            endpoints.extend([g.edge(ei).u, g.edge(ei).v]);
        }
        endpoints.sort();
        endpoints.dedup();
        let id = VertexId(base + k as u64);
        point_id.insert(point, id);
        vertices.push(Vertex { id, pos: point.clone() });
        vertex_map.push(VertexOrigin::Artificial { point: point.clone(), crossings, edges, endpoints });
    }

    // Cut positions per edge, as (segment, parameter, point).
    let mut cuts: Vec<Vec<(usize, Rational, &RatPoint)>> = vec![Vec::new(); g.edge_count()];
    for c in xs {
        for (id, seg) in [(c.edge_a, c.seg_a), (c.edge_b, c.seg_b)] {
            let ei = g.edge_index(id).ok_or(PlanarizeError::UnknownEdge(id))?;
            let pts = g.edge(ei).geometry.points();
            let t = param_on_segment(&pts[seg].to_rat(), &pts[seg + 1].to_rat(), &c.point);
            cuts[ei].push((seg, t, &c.point));
        }
    }

    let mut edges = Vec::new();
    let mut edge_map = Vec::new();
    let mut pieces = vec![Vec::new(); g.edge_count()];
    for (ei, e) in g.edges().iter().enumerate() {
        let cut = &mut cuts[ei];
        cut.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        cut.dedup_by(|b, a| a.2 == b.2);
        let pts: Vec<RatPoint> = e.geometry.points().iter().map(Position::to_rat).collect();
        let weights = segment_weights(e);

        let mut start = (0usize, Rational::zero());
        let mut start_vertex = e.u;
        let mut current = vec![pts[0].clone()];
        let mut emit = |end: (usize, Rational), end_vertex: VertexId, current: &mut Vec<RatPoint>, start: &mut (usize, Rational), start_vertex: &mut VertexId| {
            let mut weight = Rational::zero();
            for (s, w) in weights.iter().enumerate().take(end.0 + 1).skip(start.0) {
                let from = if s == start.0 { start.1.clone() } else { Rational::zero() };
                let to = if s == end.0 { end.1.clone() } else { Rational::one() };
                weight = weight + w * &(&to - &from);
            }
            let index = pieces[ei].len();
            let id = EdgeId(edges.len() as u64);
            pieces[ei].push(edges.len());
            let geometry = Polyline::new(std::mem::take(current)).expect("pieces have distinct consecutive points");
            edges.push(Edge { id, u: *start_vertex, v: end_vertex, geometry, bridge: e.bridge, tunnel: e.tunnel, weight });
            edge_map.push(EdgeOrigin { parent: e.id, index, from: start.clone(), to: end.clone() });
            *start = end;
            *start_vertex = end_vertex;
        };
        let mut next_point = 1;
        for (seg, t, point) in cut.iter() {
            while next_point <= *seg {
                current.push(pts[next_point].clone());
                next_point += 1;
            }
            current.push((*point).clone());
            emit((*seg, t.clone()), point_id[point], &mut current, &mut start, &mut start_vertex);
            current.push((*point).clone());
        }
        while next_point < pts.len() {
            current.push(pts[next_point].clone());
            next_point += 1;
        }
        emit((pts.len() - 2, Rational::one()), e.v, &mut current, &mut start, &mut start_vertex);
    }

    let pgraph = EmbeddedGraph::new(vertices, edges, g.has_flags()).expect("planarization is a valid graph");
    Ok(Planarization { pgraph, vertex_map, edge_map, pieces, n: g.vertex_count(), m: g.edge_count() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SizeCheck {
    /// `(|V(P)| + |E(P)|) / (n max(d, 1)^1.5)`
    pub ratio: f64,
    pub crossing_points: usize,
    /// `d m`
    pub bound: usize,
    /// Crossing points do not exceed `d m`.
    pub ok: bool,
}

/// Measures the planarization's size against the degeneracy `d` of the
/// network's crossing graph.
pub fn check_planarization_size(p: &Planarization, d: usize) -> SizeCheck {
    let size = (p.pgraph.vertex_count() + p.pgraph.edge_count()) as f64;
    let ratio = if p.n == 0 { 0.0 } else { size / (p.n as f64 * (d.max(1) as f64).powf(1.5)) };
    let crossing_points = p.artificial_count();
    let bound = d * p.m;
    SizeCheck { ratio, crossing_points, bound, ok: crossing_points <= bound }
}

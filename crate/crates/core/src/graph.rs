//! Embedded graphs: vertices at exact positions, edges drawn as polylines.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::arith::Rational;
use crate::geometry::{Point, Polyline, Position, COORD_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct EdgeId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex<P = Point> {
    pub id: VertexId,
    pub pos: P,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge<P = Point> {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    /// Drawn from `u` to `v`.
    pub geometry: Polyline<P>,
    pub bridge: bool,
    pub tunnel: bool,
    pub weight: Rational,
}

impl<P> Edge<P> {
    pub fn is_flagged(&self) -> bool {
        self.bridge || self.tunnel
    }
}

impl Edge<Point> {
    /// A straight edge weighted by its length.
    pub fn straight(id: u64, u: Vertex<Point>, v: Vertex<Point>) -> Self {
        let geometry = Polyline::new(vec![u.pos, v.pos]).expect("distinct endpoints");
        let weight = geometry.euclidean_length();
        Edge { id: EdgeId(id), u: u.id, v: v.id, geometry, bridge: false, tunnel: false, weight }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("edge {edge} references unknown vertex {vertex}")]
    DanglingVertex { edge: EdgeId, vertex: VertexId },
    #[error("edge {0} geometry does not start and end at its endpoint vertices")]
    EndpointMismatch(EdgeId),
    #[error("edge {0} has a negative weight")]
    NegativeWeight(EdgeId),
    #[error("vertex {0} lies outside the supported coordinate range")]
    CoordinateOverflow(VertexId),
}

/// An immutable embedded graph. Vertices and edges are kept sorted by id and
/// addressed internally by their dense position in those lists.
#[derive(Clone, Debug)]
pub struct EmbeddedGraph<P = Point> {
    vertices: Vec<Vertex<P>>,
    edges: Vec<Edge<P>>,
    vertex_index: HashMap<VertexId, usize>,
    ends: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
    has_flags: bool,
}

impl<P: Position> PartialEq for EmbeddedGraph<P> {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges && self.has_flags == other.has_flags
    }
}

impl<P: Position> Eq for EmbeddedGraph<P> {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub total_length: Rational,
    pub bridge_count: usize,
    pub tunnel_count: usize,
}

impl<P: Position> EmbeddedGraph<P> {
    /// Validates and indexes a graph. `has_flags` records whether the input
    /// carried bridge/tunnel information at all.
    pub fn new(mut vertices: Vec<Vertex<P>>, mut edges: Vec<Edge<P>>, has_flags: bool) -> Result<Self, GraphError> {
        vertices.sort_by_key(|v| v.id);
        edges.sort_by_key(|e| e.id);
        if let Some(w) = vertices.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(GraphError::DuplicateVertex(w[0].id));
        }
        if let Some(w) = edges.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(GraphError::DuplicateEdge(w[0].id));
        }
        let vertex_index: HashMap<VertexId, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        let mut ends = Vec::with_capacity(edges.len());
        let mut incident = vec![Vec::new(); vertices.len()];
        for (ei, e) in edges.iter().enumerate() {
            let lookup = |id: VertexId| {
                vertex_index
                    .get(&id)
                    .copied()
                    .ok_or(GraphError::DanglingVertex { edge: e.id, vertex: id })
            };
            let (u, v) = (lookup(e.u)?, lookup(e.v)?);
            if e.geometry.first() != &vertices[u].pos || e.geometry.last() != &vertices[v].pos {
                return Err(GraphError::EndpointMismatch(e.id));
            }
            if e.weight.signum() < 0 {
                return Err(GraphError::NegativeWeight(e.id));
            }
            ends.push((u, v));
            incident[u].push(ei);
            if v != u {
                incident[v].push(ei);
            }
        }
        Ok(EmbeddedGraph { vertices, edges, vertex_index, ends, incident, has_flags })
    }

    pub fn empty() -> Self {
        EmbeddedGraph::new(Vec::new(), Vec::new(), true).expect("empty graph is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex<P>] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge<P>] {
        &self.edges
    }

    pub fn vertex(&self, i: usize) -> &Vertex<P> {
        &self.vertices[i]
    }

    pub fn edge(&self, i: usize) -> &Edge<P> {
        &self.edges[i]
    }

    pub fn vertex_index(&self, id: VertexId) -> Option<usize> {
        self.vertex_index.get(&id).copied()
    }

    pub fn edge_index(&self, id: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    /// Vertex indices of an edge's endpoints, in geometry order.
    pub fn ends(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    /// Edge indices incident to a vertex, in id order.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn has_flags(&self) -> bool {
        self.has_flags
    }

    /// The vertex index at the other end of edge `e` from `v`.
    pub fn opposite(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Drops self-loops and, among parallel edges, keeps the one with the
    /// smallest id. The vertex set is unchanged.
    pub fn normalize(&self) -> Self {
        let mut seen = std::collections::HashSet::new();
        let edges: Vec<Edge<P>> = self
            .edges
            .iter()
            .zip(&self.ends)
            .filter(|(_, &(u, v))| u != v && seen.insert((u.min(v), u.max(v))))
            .map(|(e, _)| e.clone())
            .collect();
        EmbeddedGraph::new(self.vertices.clone(), edges, self.has_flags).expect("subset of a valid graph")
    }

    pub fn is_normalized(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.ends.iter().all(|&(u, v)| u != v && seen.insert((u.min(v), u.max(v))))
    }

    /// Keeps every vertex and the edges selected by `keep` (indexed by edge).
    pub fn edge_subgraph(&self, keep: &[bool]) -> Self {
        let edges = self
            .edges
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(e, _)| e.clone())
            .collect();
        EmbeddedGraph::new(self.vertices.clone(), edges, self.has_flags).expect("subset of a valid graph")
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            n: self.vertex_count(),
            m: self.edge_count(),
            total_length: self.edges.iter().map(|e| e.weight.clone()).sum(),
            bridge_count: self.edges.iter().filter(|e| e.bridge).count(),
            tunnel_count: self.edges.iter().filter(|e| e.tunnel).count(),
        }
    }

    pub fn max_vertex_id(&self) -> Option<VertexId> {
        self.vertices.last().map(|v| v.id)
    }
}

impl EmbeddedGraph<Point> {
    pub fn check_coordinates(&self) -> Result<(), GraphError> {
        for v in &self.vertices {
            if v.pos.x.abs() > COORD_LIMIT || v.pos.y.abs() > COORD_LIMIT {
                return Err(GraphError::CoordinateOverflow(v.id));
            }
        }
        Ok(())
    }

    pub fn translated(&self, dx: i64, dy: i64) -> Self {
        let vertices = self
            .vertices
            .iter()
            .map(|v| Vertex { id: v.id, pos: Point::new(v.pos.x + dx, v.pos.y + dy) })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { geometry: e.geometry.translated(dx, dy), ..e.clone() })
            .collect();
        EmbeddedGraph::new(vertices, edges, self.has_flags).expect("translation preserves validity")
    }

    /// Renames edge ids through `f`, which must be injective.
    pub fn relabel_edges(&self, f: impl Fn(EdgeId) -> EdgeId) -> Self {
        let edges = self.edges.iter().map(|e| Edge { id: f(e.id), ..e.clone() }).collect();
        EmbeddedGraph::new(self.vertices.clone(), edges, self.has_flags).expect("injective relabeling")
    }
}

/// Builds straight-line graphs from coordinate lists; handy for fixtures.
pub fn straight_line_graph(points: &[(i64, i64)], edges: &[(usize, usize)]) -> EmbeddedGraph<Point> {
    let vertices: Vec<Vertex<Point>> = points
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Vertex { id: VertexId(i as u64), pos: Point::new(x, y) })
        .collect();
    let edges = edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| Edge::straight(i as u64, vertices[u].clone(), vertices[v].clone()))
        .collect();
    EmbeddedGraph::new(vertices, edges, true).expect("valid straight-line graph")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_fixture() -> EmbeddedGraph {
        straight_line_graph(&[(0, 0), (2, 2), (0, 2), (2, 0)], &[(0, 1), (2, 3)])
    }

    #[test]
    fn stats_of_x_fixture() {
        let s = x_fixture().stats();
        assert_eq!((s.n, s.m, s.bridge_count, s.tunnel_count), (4, 2, 0, 0));
    }

    #[test]
    fn empty_stats_are_zero() {
        let s = EmbeddedGraph::<Point>::empty().stats();
        assert_eq!(s, GraphStats { n: 0, m: 0, total_length: Rational::zero(), bridge_count: 0, tunnel_count: 0 });
    }

    #[test]
    fn normalize_removes_self_loop() {
        let v = Vertex { id: VertexId(1), pos: Point::new(0, 0) };
        let w = Vertex { id: VertexId(2), pos: Point::new(5, 0) };
        let loop_geom = Polyline::new(vec![v.pos, Point::new(1, 1), v.pos]).unwrap();
        let e = Edge {
            id: EdgeId(7),
            u: v.id,
            v: v.id,
            geometry: loop_geom,
            bridge: false,
            tunnel: false,
            weight: Rational::from(3),
        };
        let g = EmbeddedGraph::new(vec![v, w], vec![e], true).unwrap();
        let n = g.normalize();
        assert_eq!(n.edge_count(), 0);
        assert_eq!(n.vertex_count(), 2);
    }

    #[test]
    fn normalize_keeps_smallest_parallel_edge() {
        let a = Vertex { id: VertexId(0), pos: Point::new(0, 0) };
        let b = Vertex { id: VertexId(1), pos: Point::new(4, 0) };
        let mut e1 = Edge::straight(9, a.clone(), b.clone());
        e1.geometry = Polyline::new(vec![a.pos, Point::new(2, 3), b.pos]).unwrap();
        let e2 = Edge::straight(4, b.clone(), a.clone());
        let g = EmbeddedGraph::new(vec![a, b], vec![e1, e2], true).unwrap();
        let n = g.normalize();
        assert_eq!(n.edge_count(), 1);
        assert_eq!(n.edge(0).id, EdgeId(4));
        assert!(n.is_normalized());
    }

    #[test]
    fn normalize_is_identity_on_simple_graph() {
        let g = x_fixture();
        assert_eq!(g.normalize(), g);
    }

    #[test]
    fn rejects_dangling_and_mismatched_edges() {
        let a = Vertex { id: VertexId(0), pos: Point::new(0, 0) };
        let b = Vertex { id: VertexId(1), pos: Point::new(1, 0) };
        let mut e = Edge::straight(0, a.clone(), b.clone());
        e.v = VertexId(5);
        assert_eq!(
            EmbeddedGraph::new(vec![a.clone(), b.clone()], vec![e], true),
            Err(GraphError::DanglingVertex { edge: EdgeId(0), vertex: VertexId(5) })
        );
        let mut e = Edge::straight(0, a.clone(), b.clone());
        e.geometry = Polyline::new(vec![Point::new(0, 0), Point::new(2, 0)]).unwrap();
        assert_eq!(
            EmbeddedGraph::new(vec![a.clone(), b.clone()], vec![e], true),
            Err(GraphError::EndpointMismatch(EdgeId(0)))
        );
        let mut e = Edge::straight(0, a.clone(), b.clone());
        e.weight = Rational::from(-1);
        assert_eq!(
            EmbeddedGraph::new(vec![a, b], vec![e], true),
            Err(GraphError::NegativeWeight(EdgeId(0)))
        );
    }

    #[test]
    fn default_weight_is_length() {
        let g = straight_line_graph(&[(0, 0), (3, 4)], &[(0, 1)]);
        assert_eq!(g.edge(0).weight, Rational::from(5));
        assert_eq!(g.stats().total_length, Rational::from(5));
    }
}

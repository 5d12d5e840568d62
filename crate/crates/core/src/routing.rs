//! Exact shortest paths on the network: a plain priority-queue search and a
//! distance oracle built on the separator hierarchy.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::Rational;
use crate::geometry::Position;
use crate::graph::{EdgeId, EmbeddedGraph, VertexId};
use crate::separators::SeparatorHierarchy;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RouteResult {
    pub distance: Rational,
    pub path: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl RouteResult {
    /// Consecutive vertices are joined by the listed edges and the weights add up.
    pub fn is_valid_in<P: Position>(&self, g: &EmbeddedGraph<P>) -> bool {
        if self.path.is_empty() || self.path.len() != self.edges.len() + 1 {
            return false;
        }
        let mut total = Rational::zero();
        for (w, e) in self.path.windows(2).zip(&self.edges) {
            let Some(ei) = g.edge_index(*e) else { return false };
            let edge = g.edge(ei);
            if !((edge.u == w[0] && edge.v == w[1]) || (edge.u == w[1] && edge.v == w[0])) {
                return false;
            }
            total = &total + &edge.weight;
        }
        total == self.distance
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RouteError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("no path from {from} to {to}")]
    Unreachable { from: VertexId, to: VertexId },
    #[error("hierarchy does not match the graph: {0}")]
    HierarchyMismatch(String),
}

const NONE: u32 = u32::MAX;

/// A shortest-path tree inside a vertex subset.
#[derive(Clone, Debug)]
struct Tree {
    /// Indexed by position in the subset.
    dist: Vec<Option<Rational>>,
    /// Edge towards the source, `NONE` at the source and unreached vertices.
    via: Vec<u32>,
}

/// Sorted subset of vertex indices, or the whole graph.
#[derive(Clone, Copy)]
enum Within<'a> {
    All(usize),
    Subset(&'a [usize]),
}

impl Within<'_> {
    fn len(&self) -> usize {
        match self {
            Within::All(n) => *n,
            Within::Subset(s) => s.len(),
        }
    }

    fn local(&self, v: usize) -> Option<usize> {
        match self {
            Within::All(_) => Some(v),
            Within::Subset(s) => s.binary_search(&v).ok(),
        }
    }
}

/// Dijkstra from `source` over the subgraph induced by `within`; stops once
/// `target` is settled. Equal keys are settled in vertex order.
fn search<P: Position>(g: &EmbeddedGraph<P>, within: Within<'_>, source: usize, target: Option<usize>) -> Tree {
    let n = within.len();
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    let mut via = vec![NONE; n];
    let mut done = vec![false; n];
    let Some(ls) = within.local(source) else { return Tree { dist, via } };
    dist[ls] = Some(Rational::zero());
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Rational::zero(), source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        let lv = within.local(v).expect("queued vertices are inside");
        if done[lv] {
            continue;
        }
        done[lv] = true;
        if Some(v) == target {
            break;
        }
        for &e in g.incident(v) {
            let w = g.opposite(e, v);
            let Some(lw) = within.local(w) else { continue };
            if done[lw] {
                continue;
            }
            let nd = &d + &g.edge(e).weight;
            if dist[lw].as_ref().is_none_or(|old| nd < *old) {
                dist[lw] = Some(nd.clone());
                via[lw] = e as u32;
                heap.push(Reverse((nd, w)));
            }
        }
    }
    Tree { dist, via }
}

/// Walks `via` links from `from` back to the tree's source; returns vertex and edge indices.
fn walk<P: Position>(g: &EmbeddedGraph<P>, within: Within<'_>, tree: &Tree, from: usize) -> (Vec<usize>, Vec<usize>) {
    let mut vertices = vec![from];
    let mut edges = Vec::new();
    let mut v = from;
    loop {
        let e = tree.via[within.local(v).expect("inside")];
        if e == NONE {
            break;
        }
        edges.push(e as usize);
        v = g.opposite(e as usize, v);
        vertices.push(v);
    }
    (vertices, edges)
}

fn result<P: Position>(g: &EmbeddedGraph<P>, distance: Rational, vertices: &[usize], edges: &[usize]) -> RouteResult {
    RouteResult {
        distance,
        path: vertices.iter().map(|&v| g.vertex(v).id).collect(),
        edges: edges.iter().map(|&e| g.edge(e).id).collect(),
    }
}

fn index_of<P: Position>(g: &EmbeddedGraph<P>, v: VertexId) -> Result<usize, RouteError> {
    g.vertex_index(v).ok_or(RouteError::UnknownVertex(v))
}

fn route_within<P: Position>(g: &EmbeddedGraph<P>, within: Within<'_>, s: usize, t: usize) -> Option<RouteResult> {
    let tree = search(g, within, t, Some(s));
    let d = tree.dist[within.local(s)?].clone()?;
    let (vertices, edges) = walk(g, within, &tree, s);
    Some(result(g, d, &vertices, &edges))
}

/// Exact shortest path by priority-queue search.
pub fn shortest_path<P: Position>(g: &EmbeddedGraph<P>, s: VertexId, t: VertexId) -> Result<RouteResult, RouteError> {
    let (si, ti) = (index_of(g, s)?, index_of(g, t)?);
    route_within(g, Within::All(g.vertex_count()), si, ti).ok_or(RouteError::Unreachable { from: s, to: t })
}

/// Precomputed searches of one hierarchy node.
#[derive(Clone, Debug)]
struct NodeTables {
    /// Lifted separator vertices owned by the node.
    sources: Vec<usize>,
    /// One tree per source over the node's network region.
    trees: Vec<Tree>,
}

pub struct DistanceOracle<'a, P> {
    g: &'a EmbeddedGraph<P>,
    h: &'a SeparatorHierarchy,
    tables: Vec<NodeTables>,
    /// Deepest node owning each vertex.
    home: Vec<usize>,
}

/// Stores, for every hierarchy node, exact distances from each lifted
/// separator vertex it owns to the rest of its network region.
pub fn build_oracle<'a, P: Position + Sync>(g: &'a EmbeddedGraph<P>, h: &'a SeparatorHierarchy) -> Result<DistanceOracle<'a, P>, RouteError> {
    let n = g.vertex_count();
    let root = h.nodes.first().ok_or_else(|| RouteError::HierarchyMismatch("empty hierarchy".into()))?;
    if h.g_vertices != n || root.g_region.len() != n || root.g_region.iter().enumerate().any(|(i, &v)| i != v) {
        return Err(RouteError::HierarchyMismatch(format!("hierarchy covers {} vertices, graph has {n}", root.g_region.len())));
    }
    let tables: Vec<NodeTables> = h
        .nodes
        .par_iter()
        .map(|node| {
            let within = Within::Subset(&node.g_region);
            let sources: Vec<usize> =
                node.lifted.iter().copied().filter(|&v| node.g_region.binary_search(&v).is_ok()).collect();
            let trees = sources.iter().map(|&l| search(g, within, l, None)).collect();
            NodeTables { sources, trees }
        })
        .collect();
    let mut home = vec![0usize; n];
    for node in &h.nodes {
        for &v in &node.g_region {
            if node.depth >= h.nodes[home[v]].depth {
                home[v] = node.id;
            }
        }
    }
    Ok(DistanceOracle { g, h, tables, home })
}

impl<P: Position> DistanceOracle<'_, P> {
    /// Number of stored distances.
    pub fn stored(&self) -> usize {
        self.tables.iter().map(|t| t.trees.len() * t.trees.first().map_or(0, |tr| tr.dist.len())).sum()
    }

    /// Stored distance from the `k`-th lifted source of `node` to network vertex index `v`.
    pub fn stored_distance(&self, node: usize, k: usize, v: usize) -> Option<&Rational> {
        let local = self.h.nodes[node].g_region.binary_search(&v).ok()?;
        self.tables[node].trees.get(k)?.dist[local].as_ref()
    }

    pub fn sources(&self, node: usize) -> &[usize] {
        &self.tables[node].sources
    }

    pub fn query(&self, s: VertexId, t: VertexId) -> Result<RouteResult, RouteError> {
        let g = self.g;
        let (si, ti) = (index_of(g, s)?, index_of(g, t)?);
        if si == ti {
            return Ok(result(g, Rational::zero(), &[si], &[]));
        }
        let (ps, pt) = (self.h.path_to(self.home[si]), self.h.path_to(self.home[ti]));
        let mut best: Option<(Rational, usize, usize)> = None;
        for (&x, _) in ps.iter().zip(&pt).take_while(|(a, b)| a == b) {
            let node = &self.h.nodes[x];
            let (Ok(ls), Ok(lt)) = (node.g_region.binary_search(&si), node.g_region.binary_search(&ti)) else { continue };
            for (k, tree) in self.tables[x].trees.iter().enumerate() {
                if let (Some(a), Some(b)) = (&tree.dist[ls], &tree.dist[lt]) {
                    let d = a + b;
                    if best.as_ref().is_none_or(|(bd, _, _)| d < *bd) {
                        best = Some((d, x, k));
                    }
                }
            }
        }
        let mut found = best.map(|(d, x, k)| {
            let within = Within::Subset(&self.h.nodes[x].g_region);
            let tree = &self.tables[x].trees[k];
            let (mut vs, mut es) = walk(g, within, tree, si);
            let (vt, et) = walk(g, within, tree, ti);
            vs.extend(vt.into_iter().rev().skip(1));
            es.extend(et.into_iter().rev());
            result(g, d, &vs, &es)
        });
        if self.home[si] == self.home[ti] && self.h.nodes[self.home[si]].is_leaf() {
            let within = Within::Subset(&self.h.nodes[self.home[si]].g_region);
            if let Some(direct) = route_within(g, within, si, ti) {
                if found.as_ref().is_none_or(|f| direct.distance < f.distance) {
                    found = Some(direct);
                }
            }
        }
        found.ok_or(RouteError::Unreachable { from: s, to: t })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::straight_line_graph;
    use crate::planarize::planarize;
    use crate::separators::build_hierarchy;
    use crate::sweep::{find_crossings, Strictness};

    #[test]
    fn same_vertex_is_free() {
        let g = straight_line_graph(&[(0, 0), (3, 4)], &[(0, 1)]);
        let r = shortest_path(&g, VertexId(0), VertexId(0)).unwrap();
        assert_eq!(r.distance, Rational::zero());
        assert_eq!(r.path, vec![VertexId(0)]);
    }

    #[test]
    fn single_edge_costs_its_weight() {
        let g = straight_line_graph(&[(0, 0), (3, 4)], &[(0, 1)]);
        let r = shortest_path(&g, VertexId(0), VertexId(1)).unwrap();
        assert_eq!(r.distance, Rational::from(5));
        assert_eq!(r.edges, vec![EdgeId(0)]);
        assert!(r.is_valid_in(&g));
    }

    #[test]
    fn unknown_and_unreachable() {
        let g = straight_line_graph(&[(0, 0), (1, 0), (5, 5)], &[(0, 1)]);
        assert_eq!(shortest_path(&g, VertexId(0), VertexId(9)), Err(RouteError::UnknownVertex(VertexId(9))));
        assert!(matches!(shortest_path(&g, VertexId(0), VertexId(2)), Err(RouteError::Unreachable { .. })));
    }

    #[test]
    fn crossing_is_not_a_turn() {
        // Two crossing roads: going from one to the other needs the ring.
        let g = straight_line_graph(&[(0, 0), (4, 4), (0, 4), (4, 0)], &[(0, 1), (2, 3), (0, 2)]);
        let r = shortest_path(&g, VertexId(1), VertexId(3)).unwrap();
        assert_eq!(r.path, vec![VertexId(1), VertexId(0), VertexId(2), VertexId(3)]);
    }

    #[test]
    fn path_oracle_stores_prefix_sums() {
        let pts: Vec<(i64, i64)> = (0..7).map(|i| (i * i, 0)).collect();
        let edges: Vec<(usize, usize)> = (1..7).map(|i| (i - 1, i)).collect();
        let g = straight_line_graph(&pts, &edges);
        let pl = planarize(&g, &find_crossings(&g, Strictness::Lenient).unwrap()).unwrap();
        let h = build_hierarchy(&pl, 2);
        let o = build_oracle(&g, &h).unwrap();
        let root = o.sources(0);
        assert_eq!(root.len(), 1);
        let c = root[0] as i64;
        for v in 0..7usize {
            let expect = Rational::from((c * c - (v as i64) * (v as i64)).abs());
            assert_eq!(o.stored_distance(0, 0, v), Some(&expect));
        }
        for s in 0..7 {
            for t in 0..7 {
                let a = o.query(VertexId(s), VertexId(t)).unwrap();
                assert_eq!(a.distance, shortest_path(&g, VertexId(s), VertexId(t)).unwrap().distance);
                assert!(a.is_valid_in(&g));
            }
        }
    }

    #[test]
    fn single_leaf_oracle_stores_nothing() {
        let g = straight_line_graph(&[(0, 0), (1, 0), (1, 1)], &[(0, 1), (1, 2)]);
        let pl = planarize(&g, &find_crossings(&g, Strictness::Lenient).unwrap()).unwrap();
        let h = build_hierarchy(&pl, 32);
        let o = build_oracle(&g, &h).unwrap();
        assert_eq!(o.stored(), 0);
        assert_eq!(o.query(VertexId(0), VertexId(2)).unwrap().distance, Rational::from(2));
    }

    #[test]
    fn mismatched_hierarchy_is_rejected() {
        let g = straight_line_graph(&[(0, 0), (1, 0), (1, 1)], &[(0, 1), (1, 2)]);
        let small = straight_line_graph(&[(0, 0), (1, 0)], &[(0, 1)]);
        let pl = planarize(&small, &find_crossings(&small, Strictness::Lenient).unwrap()).unwrap();
        let h = build_hierarchy(&pl, 32);
        assert!(matches!(build_oracle(&g, &h), Err(RouteError::HierarchyMismatch(_))));
    }
}

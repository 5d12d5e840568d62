//! Balanced separators on planarizations and the hierarchy built from them.

mod hierarchy;
mod lipton_tarjan;
mod verify;

use std::cmp::Reverse;

use serde::Serialize;

use crate::arith::Rational;
use crate::geometry::{angle_cmp, Position};
use crate::graph::EmbeddedGraph;

pub use hierarchy::{build_hierarchy, lift_separator, HierarchyNode, SeparatorHierarchy, DEFAULT_LEAF_SIZE};
pub use verify::{verify_hierarchy, Check, HierarchyReport};

/// Additive slack allowed on top of `sqrt(8 n)` when checking separator sizes.
pub const SIZE_SLACK: f64 = 2.0;

/// `|S| <= sqrt(8 n) + SIZE_SLACK`, evaluated exactly for integer sizes.
pub fn within_size_bound(separator: usize, n: usize) -> bool {
    // s <= sqrt(8n) + c  <=>  s <= c  or  (s - c)^2 <= 8n
    let c = SIZE_SLACK as usize;
    separator <= c || ((separator - c) as u128).pow(2) <= 8 * n as u128
}

/// A simple graph with a rotation system: each vertex lists its neighbours
/// in counter-clockwise order around it.
#[derive(Clone, Debug)]
pub struct PlaneGraph {
    rot: Vec<Vec<usize>>,
}

impl PlaneGraph {
    /// Rotation system of a drawing, from the direction in which each edge
    /// leaves its endpoint. Loops are dropped and parallel edges kept once.
    pub fn from_embedded<P: Position>(g: &EmbeddedGraph<P>) -> Self {
        let mut rot = Vec::with_capacity(g.vertex_count());
        for v in 0..g.vertex_count() {
            let mut out: Vec<(usize, (Rational, Rational))> = Vec::new();
            for &e in g.incident(v) {
                let (a, b) = g.ends(e);
                if a == b {
                    continue;
                }
                let pts = g.edge(e).geometry.points();
                let (from, to, w) = if a == v {
                    (pts[0].to_rat(), pts[1].to_rat(), b)
                } else {
                    (pts[pts.len() - 1].to_rat(), pts[pts.len() - 2].to_rat(), a)
                };
                out.push((w, (&to.x - &from.x, &to.y - &from.y)));
            }
            out.sort_by(|a, b| angle_cmp(&a.1, &b.1).then(a.0.cmp(&b.0)));
            let mut seen = std::collections::HashSet::new();
            rot.push(out.into_iter().map(|(w, _)| w).filter(|w| seen.insert(*w)).collect());
        }
        PlaneGraph { rot }
    }

    /// From explicit rotations; `rot[v]` must be symmetric.
    pub fn from_rotations(rot: Vec<Vec<usize>>) -> Self {
        PlaneGraph { rot }
    }

    pub fn vertex_count(&self) -> usize {
        self.rot.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.rot[v]
    }

    /// The subgraph induced by a sorted vertex list, renumbered `0..len`.
    fn restrict(&self, region: &[usize]) -> Local {
        let local = |w: usize| region.binary_search(&w).ok();
        let rot = region
            .iter()
            .map(|&v| self.rot[v].iter().filter_map(|&w| local(w)).collect())
            .collect();
        Local { rot }
    }
}

/// A region renumbered to `0..n`, rotations restricted to it.
#[derive(Clone, Debug)]
pub(crate) struct Local {
    pub(crate) rot: Vec<Vec<usize>>,
}

impl Local {
    pub(crate) fn len(&self) -> usize {
        self.rot.len()
    }

    pub(crate) fn components(&self, removed: &[bool]) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = removed.to_vec();
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in &self.rot[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub(crate) fn sub(&self, part: &[usize]) -> Local {
        let local = |w: usize| part.binary_search(&w).ok();
        Local { rot: part.iter().map(|&v| self.rot[v].iter().filter_map(|&w| local(w)).collect()).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Nothing to separate.
    None,
    /// One breadth-first level.
    Level,
    /// Two breadth-first levels around the middle.
    TwoLevels,
    /// Two levels plus a fundamental cycle of a triangulation.
    Cycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Separator {
    /// Vertex indices of the separated graph, ascending.
    pub vertices: Vec<usize>,
    /// Size of the largest component left after removing `vertices`.
    pub largest_component: usize,
    pub region_size: usize,
    pub method: Method,
    /// The region passed the Euler-characteristic check for its embedding.
    /// Without it the size bound is not guaranteed.
    pub planar: bool,
}

impl Separator {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    /// Largest remaining component over region size; 0 for regions of at most one vertex.
    pub fn balance(&self) -> f64 {
        if self.region_size <= 1 {
            0.0
        } else {
            self.largest_component as f64 / self.region_size as f64
        }
    }

    /// Every remaining component has at most 2/3 of the region.
    pub fn is_balanced(&self) -> bool {
        self.region_size <= 1 || 3 * self.largest_component <= 2 * self.region_size
    }
}

/// A 2/3-balanced separator of the subgraph induced by `region` (sorted
/// vertex indices of `pg`).
///
/// Components already at most 2/3 of the region need no separator; otherwise
/// the largest component is split with the Lipton-Tarjan construction.
pub fn planar_separator(pg: &PlaneGraph, region: &[usize]) -> Separator {
    debug_assert!(region.windows(2).all(|w| w[0] < w[1]));
    let n = region.len();
    let local = pg.restrict(region);
    let none = |largest| Separator { vertices: Vec::new(), largest_component: largest, region_size: n, method: Method::None, planar: true };
    if n <= 1 {
        return none(n);
    }
    let comps = local.components(&vec![false; n]);
    let big = comps.iter().max_by_key(|c| (c.len(), Reverse(c[0]))).expect("non-empty region");
    if 3 * big.len() <= 2 * n {
        return none(big.len());
    }
    let sub = local.sub(big);
    let found = lipton_tarjan::separate(&sub);
    let mut removed = vec![false; n];
    for &v in &found.vertices {
        removed[big[v]] = true;
    }
    let largest = local.components(&removed).iter().map(Vec::len).max().unwrap_or(0);
    let mut vertices: Vec<usize> = found.vertices.iter().map(|&v| region[big[v]]).collect();
    vertices.sort_unstable();
    Separator { vertices, largest_component: largest, region_size: n, method: found.method, planar: found.planar }
}

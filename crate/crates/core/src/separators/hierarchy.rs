//! Recursive separator hierarchy over a planarization, with each separator
//! lifted back to network vertices.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::{planar_separator, Method, PlaneGraph, Separator};
use crate::planarize::Planarization;

pub const DEFAULT_LEAF_SIZE: usize = 32;

#[derive(Clone, Debug, Serialize)]
pub struct HierarchyNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    /// Planarization vertex indices, ascending.
    pub region: Vec<usize>,
    /// `None` for leaves.
    pub separator: Option<Separator>,
    pub children: Vec<usize>,
    /// Network vertex indices standing in for the separator, ascending.
    pub lifted: Vec<usize>,
    /// Network vertex indices owned by this subtree, ascending.
    pub g_region: Vec<usize>,
}

impl HierarchyNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty() && self.separator.is_none()
    }

    pub fn separator_vertices(&self) -> &[usize] {
        self.separator.as_ref().map_or(&[], |s| &s.vertices)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparatorHierarchy {
    /// Breadth-first order; node 0 is the root.
    pub nodes: Vec<HierarchyNode>,
    pub leaf_size: usize,
    pub p_vertices: usize,
    pub g_vertices: usize,
}

impl SeparatorHierarchy {
    pub fn root(&self) -> &HierarchyNode {
        &self.nodes[0]
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &HierarchyNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    /// Total separator size on each depth over the square root of the total
    /// region size there.
    pub fn level_constants(&self) -> Vec<f64> {
        let mut sums = vec![(0usize, 0usize); self.depth() + 1];
        for n in &self.nodes {
            if let Some(s) = &n.separator {
                sums[n.depth].0 += s.size();
                sums[n.depth].1 += n.region.len();
            }
        }
        sums.into_iter().filter(|&(_, r)| r > 0).map(|(s, r)| s as f64 / (r as f64).sqrt()).collect()
    }

    /// Leaf nodes containing each network vertex, one per vertex.
    pub fn leaf_of(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.g_vertices];
        for n in self.leaves() {
            for &v in &n.g_region {
                out[v] = n.id;
            }
        }
        out
    }

    /// Nodes in which network vertex `v` is lifted, root first.
    pub fn lifted_at(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.g_vertices];
        for n in &self.nodes {
            for &v in &n.lifted {
                out[v].push(n.id);
            }
        }
        out
    }

    /// Node ids from the root to `node`.
    pub fn path_to(&self, node: usize) -> Vec<usize> {
        let mut path = vec![node];
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// JSON export using vertex ids instead of indices.
    pub fn to_json(&self, pl: &Planarization) -> Value {
        let pid = |i: &usize| pl.pgraph.vertex(*i).id.0;
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| {
                json!({
                    "id": n.id,
                    "parent": n.parent,
                    "depth": n.depth,
                    "region_size": n.region.len(),
                    "method": n.separator.as_ref().map_or(Method::None, |s| s.method),
                    "separator": n.separator_vertices().iter().map(pid).collect::<Vec<_>>(),
                    "balance": n.separator.as_ref().map(Separator::balance),
                    "planar": n.separator.as_ref().map(|s| s.planar),
                    "lifted": n.lifted.iter().map(pid).collect::<Vec<_>>(),
                    "children": n.children,
                    "region": n.region.iter().map(pid).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "leaf_size": self.leaf_size,
            "p_vertices": self.p_vertices,
            "g_vertices": self.g_vertices,
            "depth": self.depth(),
            "nodes": nodes,
        })
    }
}

/// Network vertex indices standing in for a set of planarization vertices.
pub fn lift_separator(pl: &Planarization, separator: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = separator
        .iter()
        .flat_map(|&p| pl.lift_vertex(p).iter().map(|&id| pl.pgraph.vertex_index(id).expect("lifted vertex exists")))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

struct Pending {
    region: Vec<usize>,
    g_region: Vec<usize>,
    parent: Option<usize>,
    depth: usize,
}

/// Splits regions larger than `leaf_size` recursively, one depth at a time.
pub fn build_hierarchy(pl: &Planarization, leaf_size: usize) -> SeparatorHierarchy {
    let leaf_size = leaf_size.max(1);
    let pg = PlaneGraph::from_embedded(&pl.pgraph);
    let mut nodes: Vec<HierarchyNode> = Vec::new();
    let mut frontier =
        vec![Pending { region: (0..pg.vertex_count()).collect(), g_region: (0..pl.n).collect(), parent: None, depth: 0 }];
    while !frontier.is_empty() {
        let seps: Vec<Option<Separator>> = frontier
            .par_iter()
            .map(|p| (p.region.len() > leaf_size).then(|| planar_separator(&pg, &p.region)))
            .collect();
        let mut next = Vec::new();
        for (pending, sep) in frontier.into_iter().zip(seps) {
            let id = nodes.len();
            if let Some(parent) = pending.parent {
                nodes[parent].children.push(id);
            }
            let lifted = match &sep {
                Some(s) => {
                    if !s.planar {
                        log::warn!("node {id}: region of {} failed the planarity check, size bound not guaranteed", s.region_size);
                    }
                    let lifted = lift_separator(pl, &s.vertices);
                    for part in split(&pg, &pending.region, &s.vertices) {
                        let g_region = part
                            .iter()
                            .copied()
                            .filter(|&p| p < pl.n && pending.g_region.binary_search(&p).is_ok() && lifted.binary_search(&p).is_err())
                            .collect();
                        next.push(Pending { region: part, g_region, parent: Some(id), depth: pending.depth + 1 });
                    }
                    lifted
                }
                None => Vec::new(),
            };
            nodes.push(HierarchyNode {
                id,
                parent: pending.parent,
                depth: pending.depth,
                region: pending.region,
                separator: sep,
                children: Vec::new(),
                lifted,
                g_region: pending.g_region,
            });
        }
        frontier = next;
    }
    SeparatorHierarchy { nodes, leaf_size, p_vertices: pl.pgraph.vertex_count(), g_vertices: pl.n }
}

/// Components of `region` minus `separator`, each ascending, ordered by smallest vertex.
fn split(pg: &PlaneGraph, region: &[usize], separator: &[usize]) -> Vec<Vec<usize>> {
    let local = pg.restrict(region);
    let mut removed = vec![false; region.len()];
    for s in separator {
        removed[region.binary_search(s).expect("separator inside region")] = true;
    }
    let mut parts: Vec<Vec<usize>> =
        local.components(&removed).into_iter().map(|c| c.into_iter().map(|v| region[v]).collect()).collect();
    parts.sort_by_key(|c| c[0]);
    parts
}

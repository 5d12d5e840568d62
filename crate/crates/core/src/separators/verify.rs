//! Independent checks of a separator hierarchy.

use serde::Serialize;

use super::{within_size_bound, SeparatorHierarchy};
use crate::geometry::Position;
use crate::graph::EmbeddedGraph;
use crate::planarize::{Planarization, VertexOrigin};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// First offending node.
    pub node: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HierarchyReport {
    pub checks: Vec<Check>,
    /// Nodes whose size check was skipped because their region failed the planarity test.
    pub size_skipped: usize,
    pub max_balance: f64,
    pub max_depth: usize,
}

impl HierarchyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Collector {
    name: &'static str,
    node: Option<usize>,
    detail: String,
}

impl Collector {
    fn new(name: &'static str) -> Self {
        Collector { name, node: None, detail: String::new() }
    }

    fn fail(&mut self, node: usize, detail: impl FnOnce() -> String) {
        if self.node.is_none() {
            self.node = Some(node);
            self.detail = detail();
        }
    }

    fn finish(self) -> Check {
        Check { name: self.name, passed: self.node.is_none(), node: self.node, detail: self.detail }
    }
}

fn adjacency<P: Position>(g: &EmbeddedGraph<P>) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.vertex_count()];
    for e in 0..g.edge_count() {
        let (a, b) = g.ends(e);
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    adj
}

/// Sizes of the components of the subgraph induced by vertices with `mark[v]`.
fn component_sizes(adj: &[Vec<usize>], vertices: &[usize], mark: &[bool]) -> Vec<usize> {
    let mut seen = std::collections::HashSet::new();
    let mut sizes = Vec::new();
    for &s in vertices {
        if !mark[s] || !seen.insert(s) {
            continue;
        }
        let mut stack = vec![s];
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in &adj[v] {
                if mark[w] && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    sizes
}

/// Recomputes lifting from the planarization's pieces and the network.
fn lift<P: Position>(pl: &Planarization, g: &EmbeddedGraph<P>, separator: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for &p in separator {
        match &pl.vertex_map[p] {
            VertexOrigin::Original { vertex } => out.extend(g.vertex_index(*vertex)),
            VertexOrigin::Artificial { .. } => {
                for &pe in pl.pgraph.incident(p) {
                    if let Some(ei) = g.edge_index(pl.edge_map[pe].parent) {
                        let (a, b) = g.ends(ei);
                        out.extend([a, b]);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

pub fn verify_hierarchy<P: Position>(h: &SeparatorHierarchy, pl: &Planarization, g: &EmbeddedGraph<P>) -> HierarchyReport {
    let np = pl.pgraph.vertex_count();
    let ng = g.vertex_count();
    let padj = adjacency(&pl.pgraph);
    let gadj = adjacency(g);

    let mut root = Collector::new("root");
    let mut partition = Collector::new("partition");
    let mut separation = Collector::new("separation");
    let mut balance = Collector::new("balance");
    let mut size = Collector::new("separator-size");
    let mut leaves = Collector::new("leaf-size");
    let mut lifting = Collector::new("lifting");
    let mut lift_size = Collector::new("lift-size");
    let mut g_partition = Collector::new("network-partition");
    let mut g_separation = Collector::new("network-separation");
    let mut size_skipped = 0;
    let mut max_balance: f64 = 0.0;

    match h.nodes.first() {
        Some(r) if r.region == (0..np).collect::<Vec<_>>() && r.g_region == (0..ng).collect::<Vec<_>>() => {}
        _ => root.fail(0, || "root does not cover every vertex".into()),
    }

    // Scratch labels: owner child (plus one) of each vertex, 0 for none.
    let mut plabel = vec![0usize; np];
    let mut glabel = vec![0usize; ng];
    let mut mark = vec![false; np];
    for node in &h.nodes {
        let id = node.id;
        let sep = node.separator_vertices();
        if node.children.is_empty() {
            if node.region.len() > h.leaf_size {
                leaves.fail(id, || format!("leaf of {} vertices", node.region.len()));
            }
            if node.separator.as_ref().is_some_and(|s| !s.vertices.is_empty()) {
                partition.fail(id, || "separator without children".into());
            }
            continue;
        }

        // Partition of the region.
        for &v in &node.region {
            plabel[v] = usize::MAX;
        }
        let mut ok = true;
        for &s in sep {
            if plabel[s] != usize::MAX {
                ok = false;
            }
            plabel[s] = 0;
        }
        for (k, &c) in node.children.iter().enumerate() {
            for &v in &h.nodes[c].region {
                if plabel[v] != usize::MAX {
                    ok = false;
                }
                plabel[v] = k + 1;
            }
        }
        if !ok || node.region.iter().any(|&v| plabel[v] == usize::MAX) {
            partition.fail(id, || "children and separator do not partition the region".into());
        }

        // No planarization edge between different children.
        'sep: for &v in &node.region {
            let lv = plabel[v];
            if lv == 0 || lv == usize::MAX {
                continue;
            }
            for &w in &padj[v] {
                let lw = plabel[w];
                if lw != 0 && lw != usize::MAX && lw != lv && node.region.binary_search(&w).is_ok() {
                    separation.fail(id, || format!("edge between children at vertex {v}"));
                    break 'sep;
                }
            }
        }

        // Balance, from an independent component search.
        for &v in &node.region {
            mark[v] = plabel[v] != 0;
        }
        let largest = component_sizes(&padj, &node.region, &mark).into_iter().max().unwrap_or(0);
        for &v in &node.region {
            mark[v] = false;
            plabel[v] = 0;
        }
        let n = node.region.len();
        if n > 1 {
            max_balance = max_balance.max(largest as f64 / n as f64);
        }
        if n > 1 && 3 * largest > 2 * n {
            balance.fail(id, || format!("component of {largest} in region of {n}"));
        }

        if node.separator.as_ref().is_some_and(|s| s.planar) {
            if !within_size_bound(sep.len(), n) {
                size.fail(id, || format!("separator of {} for region of {n}", sep.len()));
            }
        } else {
            size_skipped += 1;
        }

        let expected = lift(pl, g, sep);
        if expected != node.lifted {
            lifting.fail(id, || "lifted set differs from the separator's lift".into());
        }
        if node.lifted.len() > 4 * sep.len() {
            lift_size.fail(id, || format!("{} lifted for {} separator vertices", node.lifted.len(), sep.len()));
        }

        // Network vertices: lifted ones stay here, the rest go to exactly one child.
        for &v in &node.g_region {
            glabel[v] = usize::MAX;
        }
        let mut ok = true;
        for &v in &node.lifted {
            if glabel[v] == usize::MAX {
                glabel[v] = 0;
            }
        }
        for (k, &c) in node.children.iter().enumerate() {
            for &v in &h.nodes[c].g_region {
                if glabel[v] != usize::MAX {
                    ok = false;
                }
                glabel[v] = k + 1;
            }
        }
        if !ok || node.g_region.iter().any(|&v| glabel[v] == usize::MAX) {
            g_partition.fail(id, || "children and lifted separator do not partition the network region".into());
        }
        'gsep: for &v in &node.g_region {
            let lv = glabel[v];
            if lv == 0 || lv == usize::MAX {
                continue;
            }
            for &w in &gadj[v] {
                let lw = glabel[w];
                if lw != 0 && lw != usize::MAX && lw != lv {
                    g_separation.fail(id, || format!("network edge between children at vertex {v}"));
                    break 'gsep;
                }
            }
        }
        for &v in &node.g_region {
            glabel[v] = 0;
        }
    }

    HierarchyReport {
        checks: [root, partition, separation, balance, size, leaves, lifting, lift_size, g_partition, g_separation]
            .into_iter()
            .map(Collector::finish)
            .collect(),
        size_skipped,
        max_balance,
        max_depth: h.depth(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::straight_line_graph;
    use crate::planarize::planarize;
    use crate::separators::build_hierarchy;
    use crate::sweep::{find_crossings, Strictness};

    fn crossing_grid() -> (EmbeddedGraph, Planarization) {
        // 8x8 grid with both diagonals drawn in every other cell.
        let w = 8usize;
        let pts: Vec<(i64, i64)> = (0..w).flat_map(|y| (0..w).map(move |x| (2 * x as i64, 2 * y as i64))).collect();
        let mut edges = Vec::new();
        for y in 0..w {
            for x in 0..w {
                let i = y * w + x;
                if x + 1 < w {
                    edges.push((i, i + 1));
                }
                if y + 1 < w {
                    edges.push((i, i + w));
                }
                if x + 1 < w && y + 1 < w && (x + y) % 2 == 0 {
                    edges.push((i, i + w + 1));
                    edges.push((i + 1, i + w));
                }
            }
        }
        let g = straight_line_graph(&pts, &edges);
        let pl = planarize(&g, &find_crossings(&g, Strictness::Lenient).unwrap()).unwrap();
        (g, pl)
    }

    #[test]
    fn valid_hierarchy_passes() {
        let (g, pl) = crossing_grid();
        assert!(pl.artificial_count() > 0);
        let h = build_hierarchy(&pl, 6);
        let r = verify_hierarchy(&h, &pl, &g);
        assert!(r.passed(), "{:?}", r.checks);
        assert!(r.max_balance <= 2.0 / 3.0);
    }

    #[test]
    fn single_leaf_passes() {
        let g = straight_line_graph(&[(0, 0), (1, 0), (1, 1)], &[(0, 1), (1, 2)]);
        let pl = planarize(&g, &find_crossings(&g, Strictness::Lenient).unwrap()).unwrap();
        let h = build_hierarchy(&pl, 32);
        assert_eq!(h.nodes.len(), 1);
        assert!(verify_hierarchy(&h, &pl, &g).passed());
    }

    #[test]
    fn dropping_a_separator_vertex_is_caught() {
        let (g, pl) = crossing_grid();
        let mut h = build_hierarchy(&pl, 6);
        let node = h.nodes.iter().position(|n| !n.separator_vertices().is_empty()).unwrap();
        h.nodes[node].separator.as_mut().unwrap().vertices.pop();
        let r = verify_hierarchy(&h, &pl, &g);
        assert!(!r.check("partition").unwrap().passed);
        assert_eq!(r.check("partition").unwrap().node, Some(node));
    }

    #[test]
    fn moving_a_vertex_between_children_is_caught() {
        let (g, pl) = crossing_grid();
        let mut h = build_hierarchy(&pl, 6);
        let node = h.nodes.iter().position(|n| n.children.len() >= 2).unwrap();
        let (a, b) = (h.nodes[node].children[0], h.nodes[node].children[1]);
        let v = h.nodes[a].region.pop().unwrap();
        h.nodes[b].region.push(v);
        h.nodes[b].region.sort_unstable();
        assert!(!verify_hierarchy(&h, &pl, &g).passed());
    }
}

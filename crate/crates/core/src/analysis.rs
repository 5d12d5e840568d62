//! Crossing graphs and the statistics reported for them.
//!
//! The crossing graph has one vertex per road segment (edge of the network)
//! and one edge per pair of segments that cross at least once.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::geometry::Position;
use crate::graph::{EdgeId, EmbeddedGraph};
use crate::sweep::{Crossing, CrossingSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("crossing references unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("essential-crossing analysis needs bridge/tunnel flags, but the input has none")]
    MissingFlags,
}

/// A simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingGraph {
    /// Network edge id of each vertex; `None` for abstract graphs.
    labels: Option<Vec<EdgeId>>,
    adj: Vec<Vec<usize>>,
    multiplicity: BTreeMap<(usize, usize), usize>,
    edge_count: usize,
}

impl CrossingGraph {
    /// Builds a graph from an edge list, ignoring loops and repeated pairs
    /// (counted as multiplicity).
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut multiplicity = BTreeMap::new();
        for (a, b) in pairs {
            assert!(a < n && b < n, "vertex out of range");
            if a != b {
                *multiplicity.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in multiplicity.keys() {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let edge_count = multiplicity.len();
        CrossingGraph { labels: None, adj, multiplicity, edge_count }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Network edge id behind vertex `v`.
    pub fn label(&self, v: usize) -> Option<EdgeId> {
        self.labels.as_ref().map(|l| l[v])
    }

    /// Number of crossing points between the two network edges, 0 if they do not cross.
    pub fn multiplicity(&self, a: usize, b: usize) -> usize {
        self.multiplicity.get(&(a.min(b), a.max(b))).copied().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.multiplicity.keys().copied()
    }

    /// Subgraph induced by the vertices with `keep[v]`, renumbered in order.
    pub fn induced(&self, keep: &[bool]) -> CrossingGraph {
        let mut index = vec![usize::MAX; self.vertex_count()];
        let mut labels = Vec::new();
        let mut n = 0;
        for v in 0..self.vertex_count() {
            if keep[v] {
                index[v] = n;
                n += 1;
                if let Some(l) = &self.labels {
                    labels.push(l[v]);
                }
            }
        }
        let pairs = self
            .multiplicity
            .iter()
            .filter(|(&(a, b), _)| keep[a] && keep[b])
            .flat_map(|(&(a, b), &k)| std::iter::repeat_n((index[a], index[b]), k));
        let mut g = CrossingGraph::from_pairs(n, pairs);
        if self.labels.is_some() {
            g.labels = Some(labels);
        }
        g
    }
}

/// Crossing graph of `g`: vertex `i` is `g.edge(i)`.
pub fn build_crossing_graph<P: Position>(g: &EmbeddedGraph<P>, xs: &CrossingSet) -> Result<CrossingGraph, AnalysisError> {
    let index = |id: EdgeId| g.edge_index(id).ok_or(AnalysisError::UnknownEdge(id));
    let pairs = xs.iter().map(|c| Ok((index(c.edge_a)?, index(c.edge_b)?))).collect::<Result<Vec<_>, _>>()?;
    let mut cg = CrossingGraph::from_pairs(g.edge_count(), pairs);
    cg.labels = Some(g.edges().iter().map(|e| e.id).collect());
    Ok(cg)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrossingClasses {
    /// At least one of the two edges is a bridge or a tunnel.
    pub essential: CrossingSet,
    pub removable: CrossingSet,
}

pub fn classify_crossings<P: Position>(g: &EmbeddedGraph<P>, xs: &CrossingSet) -> Result<CrossingClasses, AnalysisError> {
    if !g.has_flags() {
        return Err(AnalysisError::MissingFlags);
    }
    let flagged = |id: EdgeId| {
        g.edge_index(id).map(|i| g.edge(i).is_flagged()).ok_or(AnalysisError::UnknownEdge(id))
    };
    let mut essential: Vec<Crossing> = Vec::new();
    let mut removable = Vec::new();
    for c in xs {
        if flagged(c.edge_a)? || flagged(c.edge_b)? {
            essential.push(c.clone());
        } else {
            removable.push(c.clone());
        }
    }
    Ok(CrossingClasses { essential: CrossingSet::from_unsorted(essential), removable: CrossingSet::from_unsorted(removable) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegeneracyResult {
    /// Vertices in removal order.
    pub order: Vec<usize>,
    /// Degree of `order[i]` when it was removed.
    pub peel_degree: Vec<usize>,
    pub degeneracy: usize,
}

/// Repeatedly removes a minimum-degree vertex, smallest index first.
///
/// Buckets are ordered sets so ties resolve to the smallest index, which
/// costs a logarithmic factor over the plain bucket queue.
pub fn degeneracy(cg: &CrossingGraph) -> DegeneracyResult {
    let n = cg.vertex_count();
    let mut degree: Vec<usize> = (0..n).map(|v| cg.degree(v)).collect();
    let max = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); max + 1];
    for v in 0..n {
        buckets[degree[v]].insert(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut peel_degree = Vec::with_capacity(n);
    let mut d = 0;
    let mut low = 0;
    for _ in 0..n {
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop_first().expect("non-empty bucket");
        removed[v] = true;
        order.push(v);
        peel_degree.push(low);
        d = d.max(low);
        for &w in cg.neighbors(v) {
            if !removed[w] {
                buckets[degree[w]].remove(&w);
                degree[w] -= 1;
                buckets[degree[w]].insert(w);
            }
        }
        low = low.saturating_sub(1);
    }
    DegeneracyResult { order, peel_degree, degeneracy: d }
}

/// Whether every vertex has at most `result.degeneracy` neighbours later in
/// `result.order`, and the order is a permutation.
pub fn check_degeneracy_certificate(cg: &CrossingGraph, result: &DegeneracyResult) -> bool {
    let n = cg.vertex_count();
    if result.order.len() != n {
        return false;
    }
    let mut position = vec![usize::MAX; n];
    for (i, &v) in result.order.iter().enumerate() {
        if v >= n || position[v] != usize::MAX {
            return false;
        }
        position[v] = i;
    }
    (0..n).all(|v| cg.neighbors(v).iter().filter(|&&w| position[w] > position[v]).count() <= result.degeneracy)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    /// Crossing-graph vertices, ascending.
    pub vertices: Vec<usize>,
    pub edges: usize,
    pub is_tree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    /// Components with at least two vertices, ordered by smallest vertex.
    pub components: Vec<Component>,
    pub trees: usize,
    pub non_trees: usize,
    pub isolated: usize,
    pub max_degree: usize,
}

impl ComponentReport {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }
}

pub fn analyze_components(cg: &CrossingGraph) -> ComponentReport {
    let n = cg.vertex_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut isolated = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        if cg.degree(s) == 0 {
            isolated += 1;
            seen[s] = true;
            continue;
        }
        let mut stack = vec![s];
        seen[s] = true;
        let mut vertices = Vec::new();
        let mut degree_sum = 0;
        while let Some(v) = stack.pop() {
            vertices.push(v);
            degree_sum += cg.degree(v);
            for &w in cg.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        vertices.sort_unstable();
        let edges = degree_sum / 2;
        let is_tree = edges + 1 == vertices.len();
        components.push(Component { vertices, edges, is_tree });
    }
    let trees = components.iter().filter(|c| c.is_tree).count();
    ComponentReport { non_trees: components.len() - trees, trees, components, isolated, max_degree: cg.max_degree() }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    /// Every crossing.
    #[default]
    All,
    /// Only crossings involving a bridge or a tunnel.
    Essential,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Mode::All),
            "essential" | "essential_only" | "essential-only" => Ok(Mode::Essential),
            other => Err(format!("unknown mode {other:?} (expected all or essential)")),
        }
    }
}

/// The eight columns of a city row.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub roads: usize,
    /// Edges of the crossing graph, i.e. crossing pairs of roads.
    pub crossings: usize,
    pub uncrossed: usize,
    pub degeneracy: usize,
    pub degree: usize,
    /// Connected components with at least two roads.
    pub components: usize,
    pub trees: usize,
    pub non_trees: usize,
}

impl ReportRow {
    pub const COLUMNS: [&'static str; 8] =
        ["roads", "crossings", "uncrossed", "degeneracy", "degree", "components", "trees", "non_trees"];

    pub fn values(&self) -> [usize; 8] {
        [
            self.roads,
            self.crossings,
            self.uncrossed,
            self.degeneracy,
            self.degree,
            self.components,
            self.trees,
            self.non_trees,
        ]
    }

    pub fn tsv_header() -> String {
        Self::COLUMNS.join("\t")
    }

    pub fn to_tsv(&self) -> String {
        self.values().iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\t")
    }
}

impl fmt::Display for ReportRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_tsv())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CityReport {
    pub row: ReportRow,
    /// Crossing points counted in this mode (a pair may cross several times).
    pub crossing_points: usize,
    /// Crossing points involving a bridge or tunnel; absent without flags.
    pub essential_crossings: Option<usize>,
    pub removable_crossings: Option<usize>,
    /// `m / (n sqrt(max(d, 1)))` for the network's n vertices and m edges.
    pub sparse_ratio: f64,
    /// Crossing pairs do not exceed degeneracy times roads.
    pub few_crossings_holds: bool,
}

impl CityReport {
    /// Uncrossed plus crossed roads make up all roads, and every component is
    /// a tree or not.
    pub fn accounting_holds(&self, components: &ComponentReport) -> bool {
        let crossed: usize = components.components.iter().map(|c| c.vertices.len()).sum();
        self.row.uncrossed + crossed == self.row.roads && self.row.trees + self.row.non_trees == self.row.components
    }
}

/// Analyzes one network. Returns the report and the component breakdown it was built from.
pub fn city_report<P: Position>(
    g: &EmbeddedGraph<P>,
    xs: &CrossingSet,
    mode: Mode,
) -> Result<(CityReport, ComponentReport), AnalysisError> {
    let classes = if g.has_flags() { Some(classify_crossings(g, xs)?) } else { None };
    let used = match (mode, &classes) {
        (Mode::All, _) => xs,
        (Mode::Essential, Some(c)) => &c.essential,
        (Mode::Essential, None) => return Err(AnalysisError::MissingFlags),
    };
    let cg = build_crossing_graph(g, used)?;
    let deg = degeneracy(&cg);
    let comps = analyze_components(&cg);
    let row = ReportRow {
        roads: cg.vertex_count(),
        crossings: cg.edge_count(),
        uncrossed: comps.isolated,
        degeneracy: deg.degeneracy,
        degree: comps.max_degree,
        components: comps.component_count(),
        trees: comps.trees,
        non_trees: comps.non_trees,
    };
    let n = g.vertex_count();
    let sparse_ratio = if n == 0 { 0.0 } else { g.edge_count() as f64 / (n as f64 * (deg.degeneracy.max(1) as f64).sqrt()) };
    let report = CityReport {
        row,
        crossing_points: used.len(),
        essential_crossings: classes.as_ref().map(|c| c.essential.len()),
        removable_crossings: classes.as_ref().map(|c| c.removable.len()),
        sparse_ratio,
        few_crossings_holds: row.crossings <= row.degeneracy * row.roads,
    };
    Ok((report, comps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::straight_line_graph;
    use crate::sweep::{find_crossings, Strictness};

    fn naive_degeneracy(cg: &CrossingGraph) -> usize {
        let n = cg.vertex_count();
        let mut alive = vec![true; n];
        let mut best = 0;
        for _ in 0..n {
            let deg = |v: usize| cg.neighbors(v).iter().filter(|&&w| alive[w]).count();
            let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| deg(v)).unwrap();
            best = best.max(deg(v));
            alive[v] = false;
        }
        best
    }

    #[test]
    fn planar_grid_has_isolated_crossing_graph() {
        let g = straight_line_graph(&[(0, 0), (1, 0), (0, 1), (1, 1)], &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let cg = build_crossing_graph(&g, &CrossingSet::default()).unwrap();
        assert_eq!((cg.vertex_count(), cg.edge_count()), (4, 0));
        let comps = analyze_components(&cg);
        assert_eq!((comps.component_count(), comps.isolated), (0, 4));
        assert_eq!(degeneracy(&cg).degeneracy, 0);
    }

    #[test]
    fn x_fixture_report() {
        let g = straight_line_graph(&[(0, 0), (2, 2), (0, 2), (2, 0)], &[(0, 1), (2, 3)]);
        let xs = find_crossings(&g, Strictness::Strict).unwrap();
        let (report, comps) = city_report(&g, &xs, Mode::All).unwrap();
        assert_eq!(
            report.row,
            ReportRow { roads: 2, crossings: 1, uncrossed: 0, degeneracy: 1, degree: 1, components: 1, trees: 1, non_trees: 0 }
        );
        assert!(report.accounting_holds(&comps));
        assert_eq!(report.essential_crossings, Some(0));
    }

    #[test]
    fn triangle_is_a_non_tree() {
        let cg = CrossingGraph::from_pairs(3, [(0, 1), (1, 2), (2, 0)]);
        let comps = analyze_components(&cg);
        assert_eq!((comps.component_count(), comps.trees, comps.non_trees), (1, 0, 1));
        assert_eq!(degeneracy(&cg).degeneracy, 2);
    }

    #[test]
    fn forests_have_degeneracy_one() {
        let cg = CrossingGraph::from_pairs(7, [(0, 1), (1, 2), (1, 3), (4, 5)]);
        let r = degeneracy(&cg);
        assert_eq!(r.degeneracy, 1);
        assert!(check_degeneracy_certificate(&cg, &r));
    }

    #[test]
    fn repeated_pairs_are_one_edge() {
        let cg = CrossingGraph::from_pairs(2, [(0, 1), (1, 0), (0, 1)]);
        assert_eq!(cg.edge_count(), 1);
        assert_eq!(cg.multiplicity(1, 0), 3);
        assert_eq!(cg.max_degree(), 1);
    }

    #[test]
    fn peeling_breaks_ties_by_index() {
        let cg = CrossingGraph::from_pairs(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let r = degeneracy(&cg);
        assert_eq!(r.order, vec![0, 1, 2, 3]);
        assert_eq!(r.peel_degree, vec![2, 1, 1, 0]);
    }

    #[test]
    fn matches_naive_peeling_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(1..30);
            let p: f64 = rng.gen_range(0.0..0.5);
            let mut pairs = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(p) {
                        pairs.push((a, b));
                    }
                }
            }
            let cg = CrossingGraph::from_pairs(n, pairs);
            let r = degeneracy(&cg);
            assert_eq!(r.degeneracy, naive_degeneracy(&cg));
            assert!(check_degeneracy_certificate(&cg, &r));
        }
    }

    #[test]
    fn certificate_rejects_bad_orders() {
        let cg = CrossingGraph::from_pairs(3, [(0, 1), (1, 2), (2, 0)]);
        let bad = DegeneracyResult { order: vec![0, 1, 2], peel_degree: vec![1, 1, 0], degeneracy: 1 };
        assert!(!check_degeneracy_certificate(&cg, &bad));
        let dup = DegeneracyResult { order: vec![0, 0, 2], peel_degree: vec![2, 1, 0], degeneracy: 2 };
        assert!(!check_degeneracy_certificate(&cg, &dup));
    }

    #[test]
    fn classification_uses_flags() {
        let mut g = straight_line_graph(&[(0, 0), (2, 2), (0, 2), (2, 0), (4, 0), (4, 2), (3, 1), (5, 1)], &[
            (0, 1),
            (2, 3),
            (4, 5),
            (6, 7),
        ]);
        let mut edges = g.edges().to_vec();
        edges[3].tunnel = true;
        g = EmbeddedGraph::new(g.vertices().to_vec(), edges, true).unwrap();
        let xs = find_crossings(&g, Strictness::Strict).unwrap();
        assert_eq!(xs.len(), 2);
        let classes = classify_crossings(&g, &xs).unwrap();
        assert_eq!((classes.essential.len(), classes.removable.len()), (1, 1));
        assert_eq!(classes.essential.as_slice()[0].edge_b, EdgeId(3));

        let (essential, _) = city_report(&g, &xs, Mode::Essential).unwrap();
        assert_eq!(essential.row.crossings, 1);
        assert_eq!(essential.row.uncrossed, 2);
    }

    #[test]
    fn essential_mode_needs_flags() {
        let g = straight_line_graph(&[(0, 0), (1, 0)], &[(0, 1)]);
        let g = EmbeddedGraph::new(g.vertices().to_vec(), g.edges().to_vec(), false).unwrap();
        assert_eq!(city_report(&g, &CrossingSet::default(), Mode::Essential).unwrap_err(), AnalysisError::MissingFlags);
        assert_eq!(classify_crossings(&g, &CrossingSet::default()).unwrap_err(), AnalysisError::MissingFlags);
    }

    #[test]
    fn empty_graph_row_is_zero() {
        let g = EmbeddedGraph::<crate::geometry::Point>::empty();
        let (r, _) = city_report(&g, &CrossingSet::default(), Mode::All).unwrap();
        assert_eq!(r.row, ReportRow::default());
    }

    #[test]
    fn induced_subgraph_keeps_labels() {
        let g = straight_line_graph(&[(0, 0), (2, 2), (0, 2), (2, 0), (1, 3), (1, -1)], &[(0, 1), (2, 3), (4, 5)]);
        let xs = find_crossings(&g, Strictness::Lenient).unwrap();
        let cg = build_crossing_graph(&g, &xs).unwrap();
        let sub = cg.induced(&[false, true, true]);
        assert_eq!(sub.vertex_count(), 2);
        assert_eq!(sub.label(0), Some(EdgeId(1)));
        assert!(degeneracy(&sub).degeneracy <= degeneracy(&cg).degeneracy);
    }
}

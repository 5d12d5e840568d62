//! Seeded synthetic networks for tests, benchmarks and the `generate` command.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{orient, Point, Polyline, Position};
use crate::graph::{Edge, EdgeId, EmbeddedGraph, Vertex, VertexId};
use crate::sweep::sweep;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An edge under construction: endpoints by index plus interior bend points.
#[derive(Clone, Debug)]
struct Draft {
    u: usize,
    v: usize,
    bends: Vec<Point>,
    bridge: bool,
    tunnel: bool,
}

impl Draft {
    fn straight(u: usize, v: usize) -> Self {
        Draft { u, v, bends: Vec::new(), bridge: false, tunnel: false }
    }
}

fn assemble(points: &[Point], drafts: &[Draft]) -> EmbeddedGraph {
    let vertices: Vec<Vertex> =
        points.iter().enumerate().map(|(i, &pos)| Vertex { id: VertexId(i as u64), pos }).collect();
    let edges = drafts
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut pts = vec![points[d.u]];
            pts.extend(&d.bends);
            pts.push(points[d.v]);
            let geometry = Polyline::new(pts).expect("distinct consecutive points");
            let weight = geometry.euclidean_length();
            Edge { id: EdgeId(i as u64), u: VertexId(d.u as u64), v: VertexId(d.v as u64), geometry, bridge: d.bridge, tunnel: d.tunnel, weight }
        })
        .collect();
    EmbeddedGraph::new(vertices, edges, true).expect("generated graph is valid")
}

/// Drops removable edges until the drawing is nice. Drafts before `fixed`
/// must already form a nice drawing on their own.
fn make_nice(points: &[Point], mut drafts: Vec<Draft>, fixed: usize) -> Vec<Draft> {
    loop {
        let g = assemble(points, &drafts);
        let report = sweep(&g);
        if report.violations.is_empty() {
            return drafts;
        }
        let mut drop = BTreeSet::new();
        for v in &report.violations {
            if let Some(e) = v.edges.iter().map(|e| e.0 as usize).filter(|&e| e >= fixed).max() {
                drop.insert(e);
            }
        }
        assert!(!drop.is_empty(), "violations among fixed edges: {:?}", report.violations[0]);
        let mut i = 0;
        drafts.retain(|_| {
            i += 1;
            !drop.contains(&(i - 1))
        });
    }
}

fn distinct_points(rng: &mut ChaCha8Rng, n: usize, range: i64) -> Vec<Point> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point::new(rng.gen_range(0..range), rng.gen_range(0..range));
        if seen.insert(p) {
            out.push(p);
        }
    }
    out
}

/// `w x h` grid with jittered vertices plus up to `chords` random straight
/// chords; chords that would break niceness are dropped.
pub fn grid_with_chords(w: usize, h: usize, chords: usize, seed: u64) -> EmbeddedGraph {
    let mut rng = rng(seed);
    let spacing = 1000i64;
    let points: Vec<Point> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| Point::new(x as i64 * spacing + rng.gen_range(-150..=150), y as i64 * spacing + rng.gen_range(-150..=150)))
        .collect();
    let mut drafts = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x + 1 < w {
                drafts.push(Draft::straight(i, i + 1));
            }
            if y + 1 < h {
                drafts.push(Draft::straight(i, i + w));
            }
        }
    }
    let fixed = drafts.len();
    let n = points.len();
    if n >= 2 {
        for _ in 0..chords {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                let mut d = Draft::straight(u, v);
                d.bridge = rng.gen_bool(0.25);
                drafts.push(d);
            }
        }
    }
    assemble(&points, &make_nice(&points, drafts, fixed))
}

/// Random-walk polylines with up to `max_segments` segments on a
/// `range x range` integer box. Steps are short and endpoints are often
/// shared, so on small boxes collinear, touching and repeated positions are
/// common. Not nice in general.
pub fn segment_soup(edges: usize, max_segments: usize, range: i64, seed: u64) -> EmbeddedGraph {
    let mut rng = rng(seed);
    let range = range.max(2);
    let step = (range / 10).max(2);
    let mut points: Vec<Point> = Vec::new();
    let mut at: BTreeMap<Point, usize> = BTreeMap::new();
    let mut vertex = |p: Point, points: &mut Vec<Point>| {
        *at.entry(p).or_insert_with(|| {
            points.push(p);
            points.len() - 1
        })
    };
    let mut drafts = Vec::with_capacity(edges);
    while drafts.len() < edges {
        let start = if !points.is_empty() && rng.gen_bool(0.5) {
            points[rng.gen_range(0..points.len())]
        } else {
            Point::new(rng.gen_range(0..range), rng.gen_range(0..range))
        };
        let segments = rng.gen_range(1..=max_segments.max(1));
        let mut walk = vec![start];
        while walk.len() <= segments {
            let last = walk[walk.len() - 1];
            let next = Point::new(
                (last.x + rng.gen_range(-step..=step)).clamp(0, range - 1),
                (last.y + rng.gen_range(-step..=step)).clamp(0, range - 1),
            );
            if next != last {
                walk.push(next);
            }
        }
        let end = walk[walk.len() - 1];
        if end == start {
            continue;
        }
        let u = vertex(start, &mut points);
        let v = vertex(end, &mut points);
        let mut d = Draft::straight(u, v);
        d.bends = walk[1..walk.len() - 1].to_vec();
        d.bridge = rng.gen_bool(0.1);
        d.tunnel = rng.gen_bool(0.05);
        drafts.push(d);
    }
    assemble(&points, &drafts)
}

/// Jittered grid where each cell gets both diagonals with probability `p`.
/// Every crossing is between the two diagonals of one cell.
pub fn one_planar(w: usize, h: usize, p: f64, seed: u64) -> EmbeddedGraph {
    let mut rng = rng(seed);
    let spacing = 1000i64;
    let points: Vec<Point> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| Point::new(x as i64 * spacing + rng.gen_range(-100..=100), y as i64 * spacing + rng.gen_range(-100..=100)))
        .collect();
    let mut drafts = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x + 1 < w {
                drafts.push(Draft::straight(i, i + 1));
            }
            if y + 1 < h {
                drafts.push(Draft::straight(i, i + w));
            }
            if x + 1 < w && y + 1 < h && rng.gen_bool(p) {
                drafts.push(Draft::straight(i, i + w + 1));
                let mut d = Draft::straight(i + 1, i + w);
                d.bridge = rng.gen_bool(0.5);
                drafts.push(d);
            }
        }
    }
    assemble(&points, &drafts)
}

/// Straight-line triangulation of `n` random points: points are added in
/// x order and joined to every hull vertex they can see.
pub fn random_triangulation(n: usize, seed: u64) -> EmbeddedGraph {
    let mut rng = rng(seed);
    let range = (n as i64).max(4) * 10_000;
    loop {
        let mut points = distinct_points(&mut rng, n, range);
        points.sort();
        let drafts = triangulate_sorted(&points);
        let g = assemble(&points, &drafts);
        if sweep(&g).violations.is_empty() {
            return g;
        }
    }
}

fn triangulate_sorted(points: &[Point]) -> Vec<Draft> {
    let n = points.len();
    let mut drafts = Vec::new();
    if n < 2 {
        return drafts;
    }
    drafts.push(Draft::straight(0, 1));
    let rat: Vec<_> = points.iter().map(Position::to_rat).collect();
    // Hull in counter-clockwise order.
    let mut hull: Vec<usize> = vec![0, 1];
    for p in 2..n {
        let k = hull.len();
        let visible: Vec<bool> = (0..k)
            .map(|i| {
                let (a, b) = (hull[i], hull[(i + 1) % k]);
                let o = orient(&rat[a], &rat[b], &rat[p]);
                o < 0 || (k == 2 && o == 0)
            })
            .collect();
        if visible.iter().all(|&v| !v) {
            // Collinear with a two-point hull on the far side.
            let last = *hull.last().unwrap();
            drafts.push(Draft::straight(last, p));
            hull.push(p);
            continue;
        }
        // First visible edge after an invisible one.
        let start = (0..k).find(|&i| visible[i] && !visible[(i + k - 1) % k]).unwrap_or(0);
        let mut chain = vec![hull[start]];
        let mut i = start;
        while visible[i % k] && chain.len() <= k {
            chain.push(hull[(i + 1) % k]);
            i += 1;
        }
        for &c in &chain {
            drafts.push(Draft::straight(c, p));
        }
        let first = chain[0];
        let last = *chain.last().unwrap();
        let mut next = Vec::with_capacity(k + 1);
        let pos = hull.iter().position(|&v| v == last).unwrap();
        for j in 0..k {
            let v = hull[(pos + j) % k];
            next.push(v);
            if v == first {
                break;
            }
        }
        next.push(p);
        hull = next;
    }
    drafts
}

/// `n` random points with `m` random straight edges, then edges breaking
/// niceness are dropped. Keeps sampling until at least `m` edges survive.
pub fn dense_straight_line(n: usize, m: usize, seed: u64) -> EmbeddedGraph {
    let mut rng = rng(seed);
    let points = distinct_points(&mut rng, n, 1 << 40);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(&mut rng);
    let take = m.min(pairs.len());
    let mut drafts: Vec<Draft> = pairs[..take].iter().map(|&(u, v)| Draft::straight(u, v)).collect();
    let mut rest = pairs[take..].iter();
    loop {
        drafts = make_nice(&points, drafts, 0);
        if drafts.len() >= take {
            break;
        }
        match rest.next() {
            Some(&(u, v)) => drafts.push(Draft::straight(u, v)),
            None => break,
        }
    }
    assemble(&points, &drafts)
}

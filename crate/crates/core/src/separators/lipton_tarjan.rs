//! Lipton-Tarjan separators on a connected region with a rotation system.
//!
//! Breadth-first levels give three candidates: the middle level, two
//! small levels around it, or those two levels plus a fundamental cycle of a
//! triangulation of the part below the upper level. The cycle is built
//! without contracting the lower levels; only the vertices strictly between
//! the two levels are charged, and a tree path has at most one vertex per
//! level, so the size bound is the same as with contraction.

use super::{Local, Method};

pub(crate) struct Found {
    pub(crate) vertices: Vec<usize>,
    pub(crate) method: Method,
    pub(crate) planar: bool,
}

/// `rev[v][i]` is the position of `v` in the rotation of `rot[v][i]`;
/// `None` if the rotations are not symmetric.
fn reverse_index(g: &Local) -> Option<Vec<Vec<usize>>> {
    let mut sorted: Vec<Vec<(usize, usize)>> =
        g.rot.iter().map(|r| r.iter().enumerate().map(|(i, &w)| (w, i)).collect()).collect();
    for s in &mut sorted {
        s.sort_unstable();
    }
    g.rot
        .iter()
        .enumerate()
        .map(|(v, r)| {
            r.iter()
                .map(|&w| sorted[w].binary_search_by_key(&v, |p| p.0).ok().map(|k| sorted[w][k].1))
                .collect()
        })
        .collect()
}

/// Faces as dart sequences, darts being `(vertex, rotation index)`.
fn trace_faces(g: &Local, rev: &[Vec<usize>]) -> Vec<Vec<(usize, usize)>> {
    let mut done: Vec<Vec<bool>> = g.rot.iter().map(|r| vec![false; r.len()]).collect();
    let mut faces = Vec::new();
    for v in 0..g.len() {
        for i in 0..g.rot[v].len() {
            if done[v][i] {
                continue;
            }
            let mut face = Vec::new();
            let (mut a, mut j) = (v, i);
            while !done[a][j] {
                done[a][j] = true;
                face.push((a, j));
                let w = g.rot[a][j];
                let back = rev[a][j];
                j = (back + 1) % g.rot[w].len();
                a = w;
            }
            faces.push(face);
        }
    }
    faces
}

fn euler_planar(g: &Local, faces: usize) -> bool {
    let darts: usize = g.rot.iter().map(Vec::len).sum();
    let (v, e, f) = (g.len() as i64, (darts / 2) as i64, faces as i64);
    if e == 0 {
        return v == 1;
    }
    v - e + f == 2
}

fn bfs(g: &Local, root: usize) -> Vec<usize> {
    let mut level = vec![usize::MAX; g.len()];
    level[root] = 0;
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in &g.rot[v] {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    level
}

fn largest_component(g: &Local, separator: &[usize]) -> usize {
    let mut removed = vec![false; g.len()];
    for &v in separator {
        removed[v] = true;
    }
    g.components(&removed).iter().map(Vec::len).max().unwrap_or(0)
}

/// `a <= 2 sqrt(b)`
fn at_most_two_sqrt(a: usize, b: usize) -> bool {
    (a as u128).pow(2) <= 4 * b as u128
}

/// Separator of a connected region.
pub(crate) fn separate(g: &Local) -> Found {
    let n = g.len();
    if n <= 1 {
        return Found { vertices: Vec::new(), method: Method::None, planar: true };
    }
    let rev = reverse_index(g);
    let planar = rev.as_ref().is_some_and(|rev| euler_planar(g, trace_faces(g, rev).len()));

    // Root far from the smallest vertex: fewer, thinner levels.
    let from_first = bfs(g, 0);
    let root = (0..n).max_by_key(|&v| (from_first[v], std::cmp::Reverse(v))).expect("non-empty");
    let level = bfs(g, root);
    let depth = *level.iter().max().expect("non-empty");
    let mut levels: Vec<Vec<usize>> = vec![Vec::new(); depth + 1];
    for v in 0..n {
        levels[level[v]].push(v);
    }
    let size = |l: i64| -> usize {
        if l < 0 || l as usize > depth {
            0
        } else {
            levels[l as usize].len()
        }
    };

    let mut cum = 0;
    let mut l1 = 0;
    for (l, lv) in levels.iter().enumerate() {
        cum += lv.len();
        if 2 * cum >= n {
            l1 = l;
            break;
        }
    }
    let k = cum;
    let a = levels[l1].clone();
    if at_most_two_sqrt(a.len(), n) {
        return Found { vertices: a, method: Method::Level, planar };
    }
    let l1i = l1 as i64;
    let l0 = (-1..=l1i).rev().find(|&l| at_most_two_sqrt(size(l) + 2 * (l1i - l) as usize, k)).unwrap_or(-1);
    let l2 = (l1i + 1..=depth as i64 + 1)
        .find(|&l| at_most_two_sqrt(size(l) + 2 * (l - l1i - 1) as usize, n - k))
        .unwrap_or(depth as i64 + 1);
    let in_middle = |v: usize| (level[v] as i64) > l0 && (level[v] as i64) < l2;
    let middle = (0..n).filter(|&v| in_middle(v)).count();
    let mut two: Vec<usize> = Vec::new();
    for l in [l0, l2] {
        if l >= 0 && l as usize <= depth {
            two.extend(&levels[l as usize]);
        }
    }

    let mut candidates = vec![(a, Method::Level)];
    if 3 * middle <= 2 * n {
        candidates.push((two, Method::TwoLevels));
    } else if planar {
        if let Some(cycle) = fundamental_cycle(g, &level, l0, l2, middle) {
            let mut c = two;
            c.extend(cycle.into_iter().filter(|&v| in_middle(v)));
            candidates.push((c, Method::Cycle));
        }
    }
    let mut best: Option<(Vec<usize>, Method)> = None;
    for (mut s, method) in candidates {
        s.sort_unstable();
        s.dedup();
        if 3 * largest_component(g, &s) > 2 * n {
            continue;
        }
        if best.as_ref().is_none_or(|b| s.len() < b.0.len()) {
            best = Some((s, method));
        }
    }
    let (vertices, method) = best.expect("a single level always separates");
    Found { vertices, method, planar }
}

/// Triangulated supergraph of the levels below `l2`, as edges between nodes
/// (region vertices first, then one extra node per non-triangular face).
struct Triangulation {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    edge_faces: Vec<Vec<usize>>,
    faces: usize,
    parent: Vec<usize>,
    parent_edge: Vec<usize>,
    depth: Vec<usize>,
    /// A face incident to each region vertex.
    face_of: Vec<usize>,
}

fn triangulate(h: &Local, rev: &[Vec<usize>], level: &[usize], root: usize) -> Triangulation {
    let hn = h.len();
    let mut dart_edge: Vec<Vec<usize>> = h.rot.iter().map(|r| vec![usize::MAX; r.len()]).collect();
    let mut edges = Vec::new();
    for v in 0..hn {
        for (i, &w) in h.rot[v].iter().enumerate() {
            if v < w {
                dart_edge[v][i] = edges.len();
                dart_edge[w][rev[v][i]] = edges.len();
                edges.push((v, w));
            }
        }
    }
    let mut edge_faces = vec![Vec::with_capacity(2); edges.len()];
    let mut face_of = vec![usize::MAX; hn];
    let mut faces = 0;
    let mut parent = vec![usize::MAX; hn];
    let mut parent_edge = vec![usize::MAX; hn];
    let mut depth: Vec<usize> = level.to_vec();
    let mut nodes = hn;
    for face in trace_faces(h, rev) {
        if face.len() == 3 {
            for &(v, i) in &face {
                edge_faces[dart_edge[v][i]].push(faces);
                if face_of[v] == usize::MAX {
                    face_of[v] = faces;
                }
            }
            faces += 1;
            continue;
        }
        let hub = nodes;
        nodes += 1;
        let len = face.len();
        let first_spoke = edges.len();
        for &(v, _) in &face {
            edges.push((hub, v));
            edge_faces.push(Vec::with_capacity(2));
        }
        for (j, &(v, i)) in face.iter().enumerate() {
            let t = faces + j;
            edge_faces[dart_edge[v][i]].push(t);
            edge_faces[first_spoke + j].push(t);
            edge_faces[first_spoke + (j + 1) % len].push(t);
            if face_of[v] == usize::MAX {
                face_of[v] = t;
            }
        }
        faces += len;
        let (j, &(v, _)) = face.iter().enumerate().min_by_key(|(j, (v, _))| (level[*v], *j)).expect("non-empty face");
        parent.push(v);
        parent_edge.push(first_spoke + j);
        depth.push(level[v] + 1);
    }
    for v in 0..hn {
        if v == root {
            continue;
        }
        let i = h.rot[v].iter().position(|&w| level[w] + 1 == level[v]).expect("breadth-first parent");
        parent[v] = h.rot[v][i];
        parent_edge[v] = dart_edge[v][i];
    }
    Triangulation { nodes, edges, edge_faces, faces, parent, parent_edge, depth, face_of }
}

/// A fundamental cycle whose inside and outside each hold at most 2/3 of the
/// middle vertices (levels strictly between `l0` and `l2`), as region vertices.
fn fundamental_cycle(g: &Local, level: &[usize], l0: i64, l2: i64, middle: usize) -> Option<Vec<usize>> {
    let below: Vec<usize> = (0..g.len()).filter(|&v| (level[v] as i64) < l2).collect();
    let h = g.sub(&below);
    let hrev = reverse_index(&h)?;
    let hlevel: Vec<usize> = below.iter().map(|&v| level[v]).collect();
    let root = hlevel.iter().position(|&l| l == 0)?;
    let tri = triangulate(&h, &hrev, &hlevel, root);

    let mut tree_edge = vec![false; tri.edges.len()];
    for v in 0..tri.nodes {
        if tri.parent_edge[v] != usize::MAX {
            tree_edge[tri.parent_edge[v]] = true;
        }
    }
    let non_tree: Vec<usize> = (0..tri.edges.len()).filter(|&e| !tree_edge[e]).collect();
    if non_tree.len() + 1 != tri.faces || tri.edge_faces.iter().any(|f| f.len() != 2) {
        return None;
    }

    // Dual tree over non-tree edges, rooted at face 0.
    let mut dual: Vec<Vec<(usize, usize)>> = vec![Vec::new(); tri.faces];
    for &e in &non_tree {
        let (f1, f2) = (tri.edge_faces[e][0], tri.edge_faces[e][1]);
        dual[f1].push((f2, e));
        dual[f2].push((f1, e));
    }
    let mut tin = vec![usize::MAX; tri.faces];
    let mut tout = vec![0; tri.faces];
    let mut via = vec![usize::MAX; tri.faces];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); tri.faces];
    let mut post = Vec::with_capacity(tri.faces);
    let mut clock = 0;
    let mut stack = vec![(0usize, 0usize)];
    tin[0] = clock;
    clock += 1;
    while let Some(&mut (f, ref mut next)) = stack.last_mut() {
        if *next < dual[f].len() {
            let (c, e) = dual[f][*next];
            *next += 1;
            if tin[c] == usize::MAX {
                tin[c] = clock;
                clock += 1;
                via[c] = e;
                children[f].push(c);
                stack.push((c, 0));
            }
        } else {
            tout[f] = clock;
            post.push(f);
            stack.pop();
        }
    }
    if post.len() != tri.faces {
        return None;
    }

    let hn = h.len();
    let cost = |v: usize| -> usize { usize::from(v < hn && (hlevel[v] as i64) > l0 && (hlevel[v] as i64) < l2) };
    let mut subtree = vec![0usize; tri.faces];
    for v in 0..hn {
        subtree[tri.face_of[v]] += cost(v);
    }
    for &f in &post {
        for &c in &children[f] {
            subtree[f] += subtree[c];
        }
    }

    let cycle = |f: usize| -> Vec<usize> {
        let (mut a, mut b) = tri.edges[via[f]];
        let mut out = Vec::new();
        while a != b {
            if tri.depth[a] >= tri.depth[b] {
                out.push(a);
                a = tri.parent[a];
            } else {
                out.push(b);
                b = tri.parent[b];
            }
        }
        out.push(a);
        out
    };
    // (inside, on) costs of the cycle closing face f's subtree.
    let measure = |f: usize, cyc: &[usize]| -> (usize, usize) {
        let mut on = 0;
        let mut on_inside = 0;
        for &v in cyc {
            let c = cost(v);
            if c > 0 {
                on += c;
                let phi = tri.face_of[v];
                if tin[f] <= tin[phi] && tin[phi] < tout[f] {
                    on_inside += c;
                }
            }
        }
        (subtree[f] - on_inside, on)
    };
    let balanced = |inside: usize, on: usize| 3 * inside <= 2 * middle && 3 * (middle - inside - on) <= 2 * middle;

    let mut current = 0;
    loop {
        let best = children[current]
            .iter()
            .map(|&c| {
                let cyc = cycle(c);
                let (inside, on) = measure(c, &cyc);
                (inside + on, c, inside, on, cyc)
            })
            .max_by_key(|t| (t.0, std::cmp::Reverse(t.1)));
        let Some((_, c, inside, on, cyc)) = best else { break };
        if 3 * inside <= 2 * middle {
            if balanced(inside, on) {
                return Some(cyc.into_iter().filter(|&v| v < hn).map(|v| below[v]).collect());
            }
            break;
        }
        current = c;
    }
    for f in 1..tri.faces {
        let cyc = cycle(f);
        let (inside, on) = measure(f, &cyc);
        if balanced(inside, on) {
            return Some(cyc.into_iter().filter(|&v| v < hn).map(|v| below[v]).collect());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(w: usize, h: usize) -> Local {
        // neighbours in counter-clockwise order: east, north, west, south
        let id = |x: usize, y: usize| y * w + x;
        let mut rot = vec![Vec::new(); w * h];
        for y in 0..h {
            for x in 0..w {
                let r = &mut rot[id(x, y)];
                if x + 1 < w {
                    r.push(id(x + 1, y));
                }
                if y + 1 < h {
                    r.push(id(x, y + 1));
                }
                if x > 0 {
                    r.push(id(x - 1, y));
                }
                if y > 0 {
                    r.push(id(x, y - 1));
                }
            }
        }
        Local { rot }
    }

    #[test]
    fn grid_faces_satisfy_euler() {
        let g = grid(4, 3);
        let rev = reverse_index(&g).unwrap();
        let faces = trace_faces(&g, &rev);
        assert_eq!(faces.len(), 7); // 6 squares and the outer face
        assert!(euler_planar(&g, faces.len()));
    }

    #[test]
    fn grid_separator_is_balanced_and_small() {
        for (w, h) in [(10, 10), (30, 3), (1, 20), (17, 9)] {
            let g = grid(w, h);
            let found = separate(&g);
            let n = w * h;
            assert!(found.planar);
            assert!(3 * largest_component(&g, &found.vertices) <= 2 * n, "{w}x{h}");
            assert!((found.vertices.len() as f64) <= (8.0 * n as f64).sqrt(), "{w}x{h}: {}", found.vertices.len());
        }
    }

    #[test]
    fn star_is_separated() {
        for k in [5usize, 40] {
            let mut rot = vec![(1..=k).collect::<Vec<_>>()];
            rot.extend((0..k).map(|_| vec![0]));
            let g = Local { rot };
            let found = separate(&g);
            assert!(3 * largest_component(&g, &found.vertices) <= 2 * (k + 1));
            assert!(found.vertices.len() * found.vertices.len() <= 4 * (k + 1), "{k}: {:?}", found.vertices);
        }
    }

    #[test]
    fn wheel_uses_a_cycle_or_levels() {
        // hub 0 with rim 1..=k: every BFS level from the rim is large
        let k = 40;
        let mut rot = vec![(1..=k).collect::<Vec<_>>()];
        for i in 1..=k {
            let next = i % k + 1;
            let prev = if i == 1 { k } else { i - 1 };
            rot.push(vec![next, 0, prev]);
        }
        let g = Local { rot };
        let found = separate(&g);
        assert!(found.planar);
        assert!(3 * largest_component(&g, &found.vertices) <= 2 * (k + 1));
        assert!(found.vertices.len() as f64 <= (8.0 * (k + 1) as f64).sqrt());
    }

    #[test]
    fn k33_is_not_planar() {
        let rot = vec![vec![3, 4, 5], vec![3, 4, 5], vec![3, 4, 5], vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 2]];
        let found = separate(&Local { rot });
        assert!(!found.planar);
    }
}

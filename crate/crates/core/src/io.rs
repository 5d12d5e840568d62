//! Reading and writing road networks.
//!
//! Node TSV rows are `id<TAB>x<TAB>y`. Edge TSV rows are
//! `id<TAB>u<TAB>v<TAB>flags[<TAB>weight[<TAB>wkt]]` where `flags` is made of
//! `B` (bridge), `T` (tunnel) or `-`, an empty or `-` weight means "use the
//! polyline length", and the optional WKT `LINESTRING` replaces the straight
//! segment. Blank lines and lines starting with `#` are skipped. Coordinates
//! are decimal input units multiplied by the [`Scale`] and rounded.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::Value;

use crate::arith::{Int, Rational};
use crate::geometry::{Point, Polyline, Position, COORD_LIMIT};
use crate::graph::{Edge, EdgeId, EmbeddedGraph, GraphError, Vertex, VertexId};

/// Decimal scaling applied to input coordinates: a power of ten.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Scale {
    exponent: u32,
}

impl Scale {
    /// 10^7, about one centimetre for decimal degrees.
    pub const DEGREES: Scale = Scale { exponent: 7 };
    pub const UNIT: Scale = Scale { exponent: 0 };

    pub fn from_exponent(exponent: u32) -> Option<Scale> {
        (exponent <= 18).then_some(Scale { exponent })
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn multiplier(&self) -> Rational {
        Rational::from_int(Int::pow10(self.exponent))
    }
}

impl Default for Scale {
    fn default() -> Self {
        Scale::DEGREES
    }
}

impl FromStr for Scale {
    type Err = String;

    /// Accepts a positive power of ten written out (`10000000`) or as `1e7`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let value: Rational = s.parse().map_err(|_| format!("invalid scale {s:?}"))?;
        if value.signum() <= 0 || !value.is_integer() {
            return Err(format!("scale must be a positive power of ten, got {s}"));
        }
        (0..=18)
            .find(|&e| Rational::from_int(Int::pow10(e)) == value)
            .map(|exponent| Scale { exponent })
            .ok_or_else(|| format!("scale must be a power of ten up to 1e18, got {s}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Tsv,
    GeoJson,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(Format::Tsv),
            "geojson" | "json" => Ok(Format::GeoJson),
            other => Err(format!("unknown format {other:?} (expected tsv or geojson)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}:{line}:{column}: {message}")]
    Parse { file: String, line: usize, column: usize, message: String },
    #[error("coordinate {value} of vertex {vertex} overflows at scale 1e{exponent}")]
    CoordinateOverflow { vertex: u64, value: String, exponent: u32 },
    #[error("the TSV format needs a node file")]
    MissingNodeFile,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn parse_err(file: &str, line: usize, column: usize, message: impl Into<String>) -> LoadError {
    LoadError::Parse { file: file.to_string(), line, column, message: message.into() }
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })
}

pub fn load_network(nodes: Option<&Path>, edges: &Path, format: Format, scale: Scale) -> Result<EmbeddedGraph, LoadError> {
    match format {
        Format::Tsv => {
            let nodes = nodes.ok_or(LoadError::MissingNodeFile)?;
            let node_text = read(nodes)?;
            let edge_text = read(edges)?;
            parse_tsv_named(
                (&nodes.display().to_string(), &node_text),
                (&edges.display().to_string(), &edge_text),
                scale,
            )
        }
        Format::GeoJson => {
            let mut docs = Vec::new();
            if let Some(n) = nodes {
                docs.push((n.display().to_string(), read(n)?));
            }
            if nodes != Some(edges) {
                docs.push((edges.display().to_string(), read(edges)?));
            }
            let refs: Vec<(&str, &str)> = docs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            parse_geojson(&refs, scale)
        }
    }
}

fn scale_coordinate(raw: &Rational, scale: Scale, vertex: u64) -> Result<i64, LoadError> {
    let scaled = (raw * &scale.multiplier()).round();
    scaled
        .as_i128()
        .and_then(|v| i64::try_from(v).ok())
        .filter(|v| v.abs() <= COORD_LIMIT)
        .ok_or_else(|| LoadError::CoordinateOverflow { vertex, value: raw.to_exact_string(), exponent: scale.exponent })
}

struct Fields<'a> {
    file: &'a str,
    line: usize,
    parts: Vec<(usize, &'a str)>,
}

impl<'a> Fields<'a> {
    fn split(file: &'a str, line: usize, text: &'a str) -> Self {
        let mut parts = Vec::new();
        let mut col = 1;
        for p in text.split('\t') {
            parts.push((col, p));
            col += p.len() + 1;
        }
        Fields { file, line, parts }
    }

    fn get(&self, i: usize) -> Option<(usize, &'a str)> {
        self.parts.get(i).copied()
    }

    fn parse<T: FromStr>(&self, i: usize, what: &str) -> Result<T, LoadError> {
        let (col, s) = self
            .get(i)
            .ok_or_else(|| parse_err(self.file, self.line, self.parts.last().map_or(1, |p| p.0), format!("missing {what}")))?;
        s.trim()
            .parse()
            .map_err(|_| parse_err(self.file, self.line, col, format!("invalid {what} {s:?}")))
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

/// Parses TSV text already in memory.
pub fn parse_tsv(nodes: &str, edges: &str, scale: Scale) -> Result<EmbeddedGraph, LoadError> {
    parse_tsv_named(("nodes", nodes), ("edges", edges), scale)
}

fn parse_tsv_named(nodes: (&str, &str), edges: (&str, &str), scale: Scale) -> Result<EmbeddedGraph, LoadError> {
    let (nfile, ntext) = nodes;
    let mut vertices = Vec::new();
    for (line, text) in data_lines(ntext) {
        let f = Fields::split(nfile, line, text);
        if f.parts.len() != 3 {
            return Err(parse_err(nfile, line, 1, format!("expected 3 fields, found {}", f.parts.len())));
        }
        let id: u64 = f.parse(0, "vertex id")?;
        let x: Rational = f.parse(1, "x coordinate")?;
        let y: Rational = f.parse(2, "y coordinate")?;
        let pos = Point::new(scale_coordinate(&x, scale, id)?, scale_coordinate(&y, scale, id)?);
        vertices.push(Vertex { id: VertexId(id), pos });
    }
    let positions: std::collections::HashMap<u64, Point> = vertices.iter().map(|v| (v.id.0, v.pos)).collect();

    let (efile, etext) = edges;
    let mut out = Vec::new();
    let mut has_flags = true;
    for (line, text) in data_lines(etext) {
        let f = Fields::split(efile, line, text);
        if !(3..=6).contains(&f.parts.len()) {
            return Err(parse_err(efile, line, 1, format!("expected 3 to 6 fields, found {}", f.parts.len())));
        }
        let id: u64 = f.parse(0, "edge id")?;
        let u: u64 = f.parse(1, "vertex id")?;
        let v: u64 = f.parse(2, "vertex id")?;
        let (mut bridge, mut tunnel) = (false, false);
        match f.get(3) {
            None => has_flags = false,
            Some((col, flags)) => {
                for c in flags.trim().chars() {
                    match c {
                        'B' | 'b' => bridge = true,
                        'T' | 't' => tunnel = true,
                        '-' => {}
                        _ => return Err(parse_err(efile, line, col, format!("invalid flag {c:?}"))),
                    }
                }
            }
        }
        let weight: Option<Rational> = match f.get(4) {
            Some((_, w)) if !w.trim().is_empty() && w.trim() != "-" => Some(f.parse(4, "weight")?),
            _ => None,
        };
        if let Some(w) = &weight {
            if w.signum() < 0 {
                return Err(parse_err(efile, line, f.get(4).unwrap().0, "negative weight"));
            }
        }
        let endpoint = |vid: u64, col: usize| {
            positions
                .get(&vid)
                .copied()
                .ok_or_else(|| {
                    let e = GraphError::DanglingVertex { edge: EdgeId(id), vertex: VertexId(vid) };
                    parse_err(efile, line, col, e.to_string())
                })
        };
        let pu = endpoint(u, f.get(1).unwrap().0)?;
        let pv = endpoint(v, f.get(2).unwrap().0)?;
        let points = match f.get(5) {
            Some((col, wkt)) if !wkt.trim().is_empty() && wkt.trim() != "-" => {
                parse_wkt_linestring(wkt).map_err(|m| parse_err(efile, line, col, m))?
                    .iter()
                    .map(|(x, y)| Ok(Point::new(scale_coordinate(x, scale, u)?, scale_coordinate(y, scale, u)?)))
                    .collect::<Result<Vec<_>, LoadError>>()?
            }
            _ => vec![pu, pv],
        };
        let col = f.get(5).map_or(1, |p| p.0);
        let geometry = Polyline::new(points).map_err(|e| parse_err(efile, line, col, e.to_string()))?;
        if *geometry.first() != pu || *geometry.last() != pv {
            return Err(parse_err(efile, line, col, GraphError::EndpointMismatch(EdgeId(id)).to_string()));
        }
        let weight = weight.unwrap_or_else(|| geometry.euclidean_length());
        out.push(Edge { id: EdgeId(id), u: VertexId(u), v: VertexId(v), geometry, bridge, tunnel, weight });
    }
    let g = EmbeddedGraph::new(vertices, out, has_flags)?;
    g.check_coordinates()?;
    Ok(g)
}

fn parse_wkt_linestring(s: &str) -> Result<Vec<(Rational, Rational)>, String> {
    let t = s.trim();
    let upper = t.to_ascii_uppercase();
    let body = upper
        .strip_prefix("LINESTRING")
        .map(str::trim)
        .and_then(|b| b.strip_prefix('('))
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| format!("expected LINESTRING(...), found {t:?}"))?;
    body.split(',')
        .map(|pair| {
            let mut it = pair.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(x), Some(y), None) => Ok((
                    x.parse().map_err(|_| format!("invalid coordinate {x:?}"))?,
                    y.parse().map_err(|_| format!("invalid coordinate {y:?}"))?,
                )),
                _ => Err(format!("invalid point {pair:?}")),
            }
        })
        .collect()
}

/// Parses one or more GeoJSON FeatureCollections. `Point` features with an
/// `id` property declare vertices; `LineString` features with `id`, `u`, `v`
/// and optional `bridge`, `tunnel`, `weight` declare edges. Vertex positions
/// not declared by a point come from the linestring ends.
pub fn parse_geojson(docs: &[(&str, &str)], scale: Scale) -> Result<EmbeddedGraph, LoadError> {
    let mut positions: std::collections::BTreeMap<u64, Point> = Default::default();
    let mut edges = Vec::new();
    let mut has_flags = true;
    for &(file, text) in docs {
        let root: Value = serde_json::from_str(text).map_err(|e| parse_err(file, e.line(), e.column(), e.to_string()))?;
        let features = root
            .get("features")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err(file, 1, 1, "expected a FeatureCollection"))?;
        for (fi, feature) in features.iter().enumerate() {
            let ctx = |m: String| parse_err(file, 1, 1, format!("feature {fi}: {m}"));
            let props = feature.get("properties").cloned().unwrap_or(Value::Null);
            let geometry = feature.get("geometry").ok_or_else(|| ctx("missing geometry".into()))?;
            let kind = geometry.get("type").and_then(Value::as_str).unwrap_or("");
            let coords = geometry.get("coordinates").ok_or_else(|| ctx("missing coordinates".into()))?;
            let id = json_u64(&props, "id").map_err(ctx)?;
            match kind {
                "Point" => {
                    let p = json_point(coords, scale, id).map_err(|e| relabel(e, &ctx))?;
                    if let Some(old) = positions.insert(id, p) {
                        if old != p {
                            return Err(ctx(format!("vertex {id} declared at two positions")));
                        }
                    }
                }
                "LineString" => {
                    let u = json_u64(&props, "u").map_err(ctx)?;
                    let v = json_u64(&props, "v").map_err(ctx)?;
                    let pts = coords
                        .as_array()
                        .ok_or_else(|| ctx("coordinates must be an array".into()))?
                        .iter()
                        .map(|c| json_point(c, scale, u))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| relabel(e, &ctx))?;
                    let geometry = Polyline::new(pts).map_err(|e| ctx(e.to_string()))?;
                    for (vid, p) in [(u, *geometry.first()), (v, *geometry.last())] {
                        if let Some(old) = positions.insert(vid, p) {
                            if old != p {
                                return Err(ctx(format!("vertex {vid} does not match the linestring end")));
                            }
                        }
                    }
                    let flag = |k: &str| -> Option<bool> {
                        props.get(k).and_then(|x| match x {
                            Value::Bool(b) => Some(*b),
                            Value::Number(n) => Some(n.to_string() != "0"),
                            Value::String(s) => Some(matches!(s.as_str(), "yes" | "true" | "1" | "T" | "B")),
                            _ => None,
                        })
                    };
                    let (bridge, tunnel) = (flag("bridge"), flag("tunnel"));
                    if bridge.is_none() && tunnel.is_none() {
                        has_flags = false;
                    }
                    let weight = match props.get("weight") {
                        None | Some(Value::Null) => geometry.euclidean_length(),
                        Some(w) => {
                            let r: Rational = w
                                .to_string()
                                .trim_matches('"')
                                .parse()
                                .map_err(|_| ctx(format!("invalid weight {w}")))?;
                            if r.signum() < 0 {
                                return Err(ctx("negative weight".into()));
                            }
                            r
                        }
                    };
                    edges.push(Edge {
                        id: EdgeId(id),
                        u: VertexId(u),
                        v: VertexId(v),
                        geometry,
                        bridge: bridge.unwrap_or(false),
                        tunnel: tunnel.unwrap_or(false),
                        weight,
                    });
                }
                other => return Err(ctx(format!("unsupported geometry type {other:?}"))),
            }
        }
    }
    let vertices = positions.into_iter().map(|(id, pos)| Vertex { id: VertexId(id), pos }).collect();
    let g = EmbeddedGraph::new(vertices, edges, has_flags)?;
    g.check_coordinates()?;
    Ok(g)
}

fn relabel(e: LoadError, ctx: &impl Fn(String) -> LoadError) -> LoadError {
    match e {
        LoadError::Parse { message, .. } => ctx(message),
        other => other,
    }
}

fn json_u64(props: &Value, key: &str) -> Result<u64, String> {
    let v = props.get(key).ok_or_else(|| format!("missing property {key:?}"))?;
    v.to_string()
        .trim_matches('"')
        .parse()
        .map_err(|_| format!("property {key:?} is not a non-negative integer: {v}"))
}

fn json_point(v: &Value, scale: Scale, vertex: u64) -> Result<Point, LoadError> {
    let arr = v.as_array().filter(|a| a.len() >= 2).ok_or_else(|| parse_err("geojson", 1, 1, "expected [x, y]"))?;
    let num = |x: &Value| -> Result<Rational, LoadError> {
        x.as_number()
            .map(|n| n.to_string())
            .ok_or_else(|| parse_err("geojson", 1, 1, format!("expected a number, found {x}")))?
            .parse()
            .map_err(|_| parse_err("geojson", 1, 1, format!("invalid number {x}")))
    };
    Ok(Point::new(
        scale_coordinate(&num(&arr[0])?, scale, vertex)?,
        scale_coordinate(&num(&arr[1])?, scale, vertex)?,
    ))
}

fn unscale<P: Position>(p: &P, scale: Scale) -> (String, String) {
    let r = p.to_rat();
    let m = scale.multiplier();
    ((&r.x / &m).to_exact_string(), (&r.y / &m).to_exact_string())
}

/// Node TSV, one row per vertex in id order.
pub fn nodes_tsv<P: Position>(g: &EmbeddedGraph<P>, scale: Scale) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        let (x, y) = unscale(&v.pos, scale);
        writeln!(out, "{}\t{x}\t{y}", v.id).unwrap();
    }
    out
}

/// Edge TSV, one row per edge in id order, always with an explicit weight.
pub fn edges_tsv<P: Position>(g: &EmbeddedGraph<P>, scale: Scale) -> String {
    let mut out = String::new();
    for e in g.edges() {
        let flags = match (e.bridge, e.tunnel) {
            (true, true) => "BT",
            (true, false) => "B",
            (false, true) => "T",
            (false, false) => "-",
        };
        write!(out, "{}\t{}\t{}\t{flags}\t{}", e.id, e.u, e.v, e.weight.to_exact_string()).unwrap();
        if e.geometry.segment_count() > 1 {
            let pts: Vec<String> = e
                .geometry
                .points()
                .iter()
                .map(|p| {
                    let (x, y) = unscale(p, scale);
                    format!("{x} {y}")
                })
                .collect();
            write!(out, "\tLINESTRING({})", pts.join(", ")).unwrap();
        }
        out.push('\n');
    }
    out
}

//! Exact planar geometry on scaled-integer and rational points.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;

use crate::arith::{Int, Rational};

/// Largest absolute coordinate accepted after scaling.
pub const COORD_LIMIT: i64 = 1 << 62;

/// An input position in scaled integer units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }
}

/// An exact rational position, ordered lexicographically by `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RatPoint {
    pub x: Rational,
    pub y: Rational,
}

impl RatPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        RatPoint { x, y }
    }

    pub fn is_integral(&self) -> bool {
        self.x.is_integer() && self.y.is_integer()
    }

    /// Linear interpolation `a + t (b - a)`.
    pub fn lerp(a: &RatPoint, b: &RatPoint, t: &Rational) -> RatPoint {
        RatPoint {
            x: &a.x + &(t * &(&b.x - &a.x)),
            y: &a.y + &(t * &(&b.y - &a.y)),
        }
    }
}

impl From<Point> for RatPoint {
    fn from(p: Point) -> Self {
        RatPoint { x: Rational::from(p.x), y: Rational::from(p.y) }
    }
}

/// Vertex positions usable by the sweep and planarization machinery.
pub trait Position: Clone + Debug + Eq + Ord + Hash + Send + Sync {
    fn to_rat(&self) -> RatPoint;
    fn approx(&self) -> (f64, f64);
}

impl Position for Point {
    fn to_rat(&self) -> RatPoint {
        RatPoint::from(*self)
    }

    fn approx(&self) -> (f64, f64) {
        (self.x as f64, self.y as f64)
    }
}

impl Position for RatPoint {
    fn to_rat(&self) -> RatPoint {
        self.clone()
    }

    fn approx(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

/// Ordered points of an edge curve; consecutive points are distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Polyline<P = Point> {
    points: Vec<P>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolylineError {
    #[error("polyline needs at least two points, got {0}")]
    TooShort(usize),
    #[error("polyline repeats point at index {0}")]
    RepeatedPoint(usize),
}

impl<P: Position> Polyline<P> {
    pub fn new(points: Vec<P>) -> Result<Self, PolylineError> {
        if points.len() < 2 {
            return Err(PolylineError::TooShort(points.len()));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(PolylineError::RepeatedPoint(i + 1));
        }
        Ok(Polyline { points })
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn first(&self) -> &P {
        &self.points[0]
    }

    pub fn last(&self) -> &P {
        &self.points[self.points.len() - 1]
    }

    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Polyline { points }
    }

    /// Floating-point length of each segment.
    pub fn segment_lengths(&self) -> Vec<f64> {
        self.points
            .windows(2)
            .map(|w| {
                let (ax, ay) = w[0].approx();
                let (bx, by) = w[1].approx();
                (bx - ax).hypot(by - ay)
            })
            .collect()
    }
}

impl Polyline<Point> {
    /// Euclidean length as the exact value of the correctly rounded `f64`.
    /// Integer-length segments (3-4-5 triangles, axis-parallel) are exact.
    pub fn euclidean_length(&self) -> Rational {
        self.points
            .windows(2)
            .map(|w| segment_length(w[0], w[1]))
            .sum()
    }

    pub fn translated(&self, dx: i64, dy: i64) -> Self {
        Polyline {
            points: self.points.iter().map(|p| Point::new(p.x + dx, p.y + dy)).collect(),
        }
    }
}

/// Length of an integer segment, exact when it is an integer.
pub fn segment_length(a: Point, b: Point) -> Rational {
    let dx = (b.x as i128 - a.x as i128).unsigned_abs();
    let dy = (b.y as i128 - a.y as i128).unsigned_abs();
    if dx == 0 || dy == 0 {
        let d = dx.max(dy);
        return Rational::from_int(Int::from(d as i128));
    }
    let sq = dx.checked_mul(dx).and_then(|a| dy.checked_mul(dy).and_then(|b| a.checked_add(b)));
    if let Some(sq) = sq {
        let r = isqrt(sq);
        if r * r == sq {
            return Rational::from_int(Int::from(r as i128));
        }
    }
    let len = (dx as f64).hypot(dy as f64);
    Rational::from_f64_exact(len).expect("finite length")
}

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Sign of the cross product `(b - a) x (c - a)`: positive for a left turn.
pub fn orient(a: &RatPoint, b: &RatPoint, c: &RatPoint) -> i32 {
    if a.is_integral() && b.is_integral() && c.is_integral() {
        let (ax, ay) = (a.x.numer(), a.y.numer());
        let lhs = &(b.x.numer() - ax) * &(c.y.numer() - ay);
        let rhs = &(b.y.numer() - ay) * &(c.x.numer() - ax);
        return match lhs.cmp(&rhs) {
            Ordering::Greater => 1,
            Ordering::Less => -1,
            Ordering::Equal => 0,
        };
    }
    let lhs = &(&b.x - &a.x) * &(&c.y - &a.y);
    let rhs = &(&b.y - &a.y) * &(&c.x - &a.x);
    match lhs.cmp(&rhs) {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => 0,
    }
}

/// Sign of the cross product of two direction vectors.
pub fn cross_sign(d1: &(Rational, Rational), d2: &(Rational, Rational)) -> i32 {
    let lhs = &d1.0 * &d2.1;
    let rhs = &d1.1 * &d2.0;
    match lhs.cmp(&rhs) {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => 0,
    }
}

/// Whether `p`, known to be collinear with `a`-`b`, lies in the closed
/// bounding box of the segment.
fn on_collinear_segment(a: &RatPoint, b: &RatPoint, p: &RatPoint) -> bool {
    let (xlo, xhi) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (ylo, yhi) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    xlo <= &p.x && &p.x <= xhi && ylo <= &p.y && &p.y <= yhi
}

/// How two closed segments meet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SegmentContact {
    Disjoint,
    /// Transversal intersection in the open interior of both segments.
    Proper(RatPoint),
    /// A single common point that is an endpoint of at least one segment.
    Touch(RatPoint),
    /// Collinear with a common sub-segment of positive length.
    Overlap,
}

pub fn segment_contact(a: &RatPoint, b: &RatPoint, c: &RatPoint, d: &RatPoint) -> SegmentContact {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 == 0 && o2 == 0 {
        // collinear: compare along the dominant axis
        let key = |p: &RatPoint| -> (Rational, Rational) {
            if a.x != b.x {
                (p.x.clone(), p.y.clone())
            } else {
                (p.y.clone(), p.x.clone())
            }
        };
        let (mut s1, mut e1) = (key(a), key(b));
        if s1 > e1 {
            std::mem::swap(&mut s1, &mut e1);
        }
        let (mut s2, mut e2) = (key(c), key(d));
        if s2 > e2 {
            std::mem::swap(&mut s2, &mut e2);
        }
        let lo = if s1 > s2 { s1 } else { s2 };
        let hi = if e1 < e2 { e1 } else { e2 };
        return match lo.cmp(&hi) {
            Ordering::Less => SegmentContact::Overlap,
            Ordering::Equal => {
                let p = [a, b, c, d]
                    .into_iter()
                    .find(|p| key(p) == lo)
                    .expect("shared endpoint")
                    .clone();
                SegmentContact::Touch(p)
            }
            Ordering::Greater => SegmentContact::Disjoint,
        };
    }
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return SegmentContact::Proper(line_intersection(a, b, c, d));
    }
    if o1 == 0 && on_collinear_segment(a, b, c) {
        return SegmentContact::Touch(c.clone());
    }
    if o2 == 0 && on_collinear_segment(a, b, d) {
        return SegmentContact::Touch(d.clone());
    }
    if o3 == 0 && on_collinear_segment(c, d, a) {
        return SegmentContact::Touch(a.clone());
    }
    if o4 == 0 && on_collinear_segment(c, d, b) {
        return SegmentContact::Touch(b.clone());
    }
    SegmentContact::Disjoint
}

/// Intersection of the supporting lines of two non-parallel segments.
pub fn line_intersection(a: &RatPoint, b: &RatPoint, c: &RatPoint, d: &RatPoint) -> RatPoint {
    // signed areas of (c, d, a) and (c, d, b)
    let area = |p: &RatPoint| &(&(&d.x - &c.x) * &(&p.y - &c.y)) - &(&(&d.y - &c.y) * &(&p.x - &c.x));
    let sa = area(a);
    let sb = area(b);
    let t = &sa / &(&sa - &sb);
    RatPoint::lerp(a, b, &t)
}

/// Parameter of `p` along segment `a`-`b`, assuming `p` lies on it.
pub fn param_on_segment(a: &RatPoint, b: &RatPoint, p: &RatPoint) -> Rational {
    if a.x != b.x {
        &(&p.x - &a.x) / &(&b.x - &a.x)
    } else {
        &(&p.y - &a.y) / &(&b.y - &a.y)
    }
}

/// Exact angular order of direction vectors around the origin, starting at
/// the positive x axis and turning counter-clockwise.
pub fn angle_cmp(d1: &(Rational, Rational), d2: &(Rational, Rational)) -> Ordering {
    let half = |d: &(Rational, Rational)| -> u8 {
        if d.1.signum() > 0 || (d.1.is_zero() && d.0.signum() > 0) {
            0
        } else {
            1
        }
    };
    half(d1).cmp(&half(d2)).then_with(|| 0.cmp(&cross_sign(d1, d2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(x: i64, y: i64) -> RatPoint {
        RatPoint::from(Point::new(x, y))
    }

    #[test]
    fn orientation_signs() {
        assert_eq!(orient(&rp(0, 0), &rp(1, 0), &rp(0, 1)), 1);
        assert_eq!(orient(&rp(0, 0), &rp(1, 0), &rp(0, -1)), -1);
        assert_eq!(orient(&rp(0, 0), &rp(1, 1), &rp(5, 5)), 0);
    }

    #[test]
    fn orientation_near_coordinate_limit_is_exact() {
        use num_bigint::BigInt;
        let l = COORD_LIMIT;
        let pts = [(-l, -l), (l, l - 1), (l - 1, l - 2)];
        let [a, b, c] = pts.map(|(x, y)| rp(x, y));
        let big = |v: i64| BigInt::from(v);
        let det = (big(pts[1].0) - big(pts[0].0)) * (big(pts[2].1) - big(pts[0].1))
            - (big(pts[1].1) - big(pts[0].1)) * (big(pts[2].0) - big(pts[0].0));
        let expect = if det > BigInt::from(0) { 1 } else if det < BigInt::from(0) { -1 } else { 0 };
        assert_eq!(orient(&a, &b, &c), expect);
        assert_eq!(orient(&a, &b, &b.clone()), 0);
    }

    #[test]
    fn x_crossing_at_midpoint() {
        let c = segment_contact(&rp(0, 0), &rp(2, 2), &rp(0, 2), &rp(2, 0));
        assert_eq!(c, SegmentContact::Proper(rp(1, 1)));
    }

    #[test]
    fn rational_crossing_point() {
        let c = segment_contact(&rp(0, 0), &rp(3, 1), &rp(0, 1), &rp(1, 0));
        let p = RatPoint::new(Rational::ratio(3, 4), Rational::ratio(1, 4));
        assert_eq!(c, SegmentContact::Proper(p));
    }

    #[test]
    fn touching_and_overlap() {
        assert_eq!(
            segment_contact(&rp(0, 0), &rp(2, 0), &rp(1, 0), &rp(1, 5)),
            SegmentContact::Touch(rp(1, 0))
        );
        assert_eq!(
            segment_contact(&rp(0, 0), &rp(2, 0), &rp(2, 0), &rp(3, 0)),
            SegmentContact::Touch(rp(2, 0))
        );
        assert_eq!(segment_contact(&rp(0, 0), &rp(2, 0), &rp(1, 0), &rp(3, 0)), SegmentContact::Overlap);
        assert_eq!(segment_contact(&rp(0, 0), &rp(0, 2), &rp(0, 3), &rp(0, 1)), SegmentContact::Overlap);
        assert_eq!(segment_contact(&rp(0, 0), &rp(1, 0), &rp(2, 0), &rp(3, 0)), SegmentContact::Disjoint);
        assert_eq!(segment_contact(&rp(0, 0), &rp(1, 1), &rp(0, 1), &rp(1, 2)), SegmentContact::Disjoint);
    }

    #[test]
    fn lengths() {
        assert_eq!(segment_length(Point::new(0, 0), Point::new(3, 4)), Rational::from(5));
        assert_eq!(segment_length(Point::new(0, 0), Point::new(0, -7)), Rational::from(7));
        let l = segment_length(Point::new(0, 0), Point::new(1, 1)).to_f64();
        assert_eq!(l, std::f64::consts::SQRT_2);
    }

    #[test]
    fn polyline_rejects_repeats() {
        assert_eq!(
            Polyline::new(vec![Point::new(0, 0), Point::new(0, 0)]),
            Err(PolylineError::RepeatedPoint(1))
        );
        assert_eq!(Polyline::new(vec![Point::new(0, 0)]), Err(PolylineError::TooShort(1)));
    }

    #[test]
    fn angular_order() {
        let d = |x: i64, y: i64| (Rational::from(x), Rational::from(y));
        let mut v = vec![d(0, -1), d(-1, 0), d(1, 1), d(1, 0), d(0, 1), d(1, -1)];
        v.sort_by(angle_cmp);
        assert_eq!(v, vec![d(1, 0), d(1, 1), d(0, 1), d(-1, 0), d(0, -1), d(1, -1)]);
    }
}

//! Planar primitives: points, closed polylines, arcs, regions, and the metric
//! quantities the other modules consume.

use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::Float;

use crate::error::invalid;
use crate::{Error, Result};

/// A point of the plane, also used as a complex number.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point::new(radius * c, radius * s)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Argument in `(-π, π]`.
    #[inline]
    pub fn arg(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn conj(self) -> Self {
        Point::new(self.x, -self.y)
    }

    /// Complex product.
    #[inline]
    pub fn cmul(self, o: Point) -> Self {
        Point::new(self.x * o.x - self.y * o.y, self.x * o.y + self.y * o.x)
    }

    /// Rotation about the origin by `angle` radians.
    #[inline]
    pub fn rotate(self, angle: f64) -> Self {
        self.cmul(Point::polar(1.0, angle))
    }

    /// Rotation about `center`.
    #[inline]
    pub fn rotate_about(self, center: Point, angle: f64) -> Self {
        center + (self - center).rotate(angle)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn lerp(self, o: Point, t: f64) -> Self {
        self + (o - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point {
    #[inline]
    fn add_assign(&mut self, o: Point) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Maximum pairwise Euclidean distance of a point set.
pub fn diameter(points: &[Point]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut d = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::CounterClockwise => Orientation::Clockwise,
        }
    }
}

/// Twice the signed area of the closed polyline (shoelace sum).
fn shoelace(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    crate::numeric::fsum((0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])))
}

/// Orientation of a closed polyline by the sign of its shoelace sum.
pub fn signed_area_orientation(vertices: &[Point]) -> Result<Orientation> {
    let s = shoelace(vertices);
    if s > 0.0 {
        Ok(Orientation::CounterClockwise)
    } else if s < 0.0 {
        Ok(Orientation::Clockwise)
    } else {
        Err(Error::DegenerateCurve)
    }
}

/// Closed simple polyline; the last vertex is joined to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    vertices: Vec<Point>,
    orientation: Orientation,
}

pub const MIN_CURVE_VERTICES: usize = 8;

impl ClosedCurve {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < MIN_CURVE_VERTICES {
            return Err(invalid("closed curve needs at least 8 vertices"));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(invalid("non-finite vertex"));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::DegenerateCurve);
            }
        }
        let orientation = signed_area_orientation(&vertices)?;
        if !is_simple(&vertices) {
            return Err(invalid("closed curve is self-intersecting"));
        }
        Ok(ClosedCurve {
            vertices,
            orientation,
        })
    }

    /// Builds a curve with the requested orientation, reversing the vertex list if needed.
    pub fn with_orientation(vertices: Vec<Point>, orientation: Orientation) -> Result<Self> {
        let mut c = ClosedCurve::new(vertices)?;
        if c.orientation != orientation {
            c.vertices.reverse();
            c.orientation = orientation;
        }
        Ok(c)
    }

    /// `n` equally spaced samples of the circle `center + radius·e^{iθ}`, counterclockwise.
    pub fn circle(center: Point, radius: f64, n: usize) -> Result<Self> {
        ClosedCurve::new(
            (0..n)
                .map(|i| center + Point::polar(radius, TAU * i as f64 / n as f64))
                .collect(),
        )
    }

    /// Boundary of the axis-parallel rectangle `[x0, x1] × [y0, y1]`, counterclockwise,
    /// with `per_side` samples on each side (corners included once).
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64, per_side: usize) -> Result<Self> {
        let per_side = per_side.max(2);
        let corners = [
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ];
        let mut v = Vec::with_capacity(4 * per_side);
        for c in 0..4 {
            let (a, b) = (corners[c], corners[(c + 1) % 4]);
            for s in 0..per_side {
                v.push(a.lerp(b, s as f64 / per_side as f64));
            }
        }
        ClosedCurve::new(v)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * shoelace(&self.vertices)
    }

    /// Even-odd point-in-polygon test.
    pub fn contains(&self, p: Point) -> bool {
        let v = &self.vertices;
        let n = v.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (v[i], v[j]);
            if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    pub fn arc(&self, start: usize, end: usize, forward: bool) -> Result<Arc<'_>> {
        let n = self.len();
        if start >= n || end >= n || start == end {
            return Err(invalid("arc endpoints must be distinct vertex indices"));
        }
        Ok(Arc {
            curve: self,
            start,
            end,
            forward,
        })
    }

    /// Rigid motion plus scaling `p ↦ scale·rot(p) + shift`.
    pub fn transformed(&self, scale: f64, angle: f64, shift: Point) -> Result<Self> {
        ClosedCurve::new(
            self.vertices
                .iter()
                .map(|p| p.rotate(angle) * scale + shift)
                .collect(),
        )
    }
}

/// Sub-polyline of a [`ClosedCurve`] between two vertex indices.
#[derive(Debug, Clone, Copy)]
pub struct Arc<'a> {
    curve: &'a ClosedCurve,
    start: usize,
    end: usize,
    forward: bool,
}

impl<'a> Arc<'a> {
    pub fn vertices(&self) -> impl Iterator<Item = Point> + 'a {
        let n = self.curve.len();
        let v = self.curve.vertices();
        let steps = if self.forward {
            (self.end + n - self.start) % n
        } else {
            (self.start + n - self.end) % n
        };
        let (start, forward) = (self.start, self.forward);
        (0..=steps).map(move |s| {
            let idx = if forward {
                (start + s) % n
            } else {
                (start + n - s) % n
            };
            v[idx]
        })
    }

    /// The arc with the same endpoints running the other way round.
    pub fn complement(&self) -> Arc<'a> {
        Arc {
            forward: !self.forward,
            ..*self
        }
    }

    pub fn diameter(&self) -> f64 {
        let pts: Vec<Point> = self.vertices().collect();
        diameter(&pts).unwrap_or(0.0)
    }
}

/// Quasicircle constant estimated at the resolution of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasicircleEstimate {
    /// Lower estimate of the constant `c`.
    pub value: f64,
    /// Number of vertices actually used.
    pub resolution: usize,
}

pub const QUASICIRCLE_MAX_VERTICES: usize = 4096;

/// Max over vertex pairs of `min(diam α, diam β) / |z − w|`, where α, β are the two
/// sub-polylines joining the pair. All pairs are used; curves above
/// [`QUASICIRCLE_MAX_VERTICES`] are stride-subsampled first.
pub fn quasicircle_constant(curve: &ClosedCurve) -> Result<QuasicircleEstimate> {
    let stride = curve.len().div_ceil(QUASICIRCLE_MAX_VERTICES);
    let v: Vec<Point> = curve.vertices().iter().step_by(stride).copied().collect();
    let n = v.len();
    for i in 0..n {
        for j in i + 1..n {
            if v[i] == v[j] {
                return Err(Error::DegenerateCurve);
            }
        }
    }
    // diam[l * n + i]: diameter of the arc of l steps starting at vertex i.
    let mut diam = alloc::vec![0.0f64; n * n];
    for l in 1..n {
        for i in 0..n {
            let a = diam[(l - 1) * n + i];
            let b = diam[(l - 1) * n + (i + 1) % n];
            let c = v[i].dist(v[(i + l) % n]);
            diam[l * n + i] = a.max(b).max(c);
        }
    }
    let mut best = 0.0f64;
    for l in 1..n {
        for i in 0..n {
            let j = (i + l) % n;
            let chord = v[i].dist(v[j]);
            let da = diam[l * n + i];
            let db = diam[(n - l) * n + j];
            best = best.max(da.min(db) / chord);
        }
    }
    Ok(QuasicircleEstimate {
        value: best,
        resolution: n,
    })
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = (q2 - q1).cross(p1 - q1);
    let d2 = (q2 - q1).cross(p2 - q1);
    let d3 = (p2 - p1).cross(q1 - p1);
    let d4 = (p2 - p1).cross(q2 - p1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Point, b: Point, p: Point, d: f64| {
        d == 0.0
            && p.x >= a.x.min(b.x)
            && p.x <= a.x.max(b.x)
            && p.y >= a.y.min(b.y)
            && p.y <= a.y.max(b.y)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// True when no two non-adjacent edges of the closed polyline meet.
pub fn is_simple(v: &[Point]) -> bool {
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(a, b, v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Open axis-parallel rectangle `(s, s + w) × (t, t + h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub s: f64,
    pub w: f64,
    pub t: f64,
    pub h: f64,
}

impl Rect {
    pub fn new(s: f64, w: f64, t: f64, h: f64) -> Self {
        Rect { s, w, t, h }
    }

    /// Open square with the given center and side.
    pub fn square(center: Point, side: f64) -> Self {
        Rect::new(center.x - side / 2.0, side, center.y - side / 2.0, side)
    }

    pub fn x1(&self) -> f64 {
        self.s + self.w
    }

    pub fn y1(&self) -> f64 {
        self.t + self.h
    }

    pub fn center(&self) -> Point {
        Point::new(self.s + self.w / 2.0, self.t + self.h / 2.0)
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x > self.s && p.x < self.x1() && p.y > self.t && p.y < self.y1()
    }

    pub fn contains_closed(&self, p: Point) -> bool {
        p.x >= self.s && p.x <= self.x1() && p.y >= self.t && p.y <= self.y1()
    }

    /// Euclidean distance between the closures (0 when they meet).
    pub fn gap(&self, o: &Rect) -> f64 {
        let dx = (o.s - self.x1()).max(self.s - o.x1()).max(0.0);
        let dy = (o.t - self.y1()).max(self.t - o.y1()).max(0.0);
        dx.hypot(dy)
    }

    /// True when the open rectangles overlap.
    pub fn overlaps(&self, o: &Rect) -> bool {
        self.s < o.x1() && o.s < self.x1() && self.t < o.y1() && o.t < self.y1()
    }

    /// Distance from `p` to the boundary of the rectangle.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        let dx = (self.s - p.x).max(p.x - self.x1());
        let dy = (self.t - p.y).max(p.y - self.y1());
        if dx <= 0.0 && dy <= 0.0 {
            -(dx.max(dy))
        } else {
            dx.max(0.0).hypot(dy.max(0.0))
        }
    }

    /// Samples `per_side` points on each side, counterclockwise from `(s, t)`.
    pub fn boundary_points(&self, per_side: usize) -> Vec<Point> {
        let c = [
            Point::new(self.s, self.t),
            Point::new(self.x1(), self.t),
            Point::new(self.x1(), self.y1()),
            Point::new(self.s, self.y1()),
        ];
        let mut v = Vec::with_capacity(4 * per_side);
        for k in 0..4 {
            for i in 0..per_side {
                v.push(c[k].lerp(c[(k + 1) % 4], i as f64 / per_side as f64));
            }
        }
        v
    }
}

/// Base regions of the carpets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// `[0, a] × [0, 1]`.
    Rectangle { a: f64 },
    /// `[0, a] × [0, 1]` minus the open rectangle `hole`.
    RectangleRing { a: f64, hole: Rect },
    /// `[0, log r] × [0, 2π)` with θ periodic, i.e. the annulus `1 ≤ |z| ≤ r` in
    /// `(log |z|, arg z)` coordinates. An optional C*-rectangle hole is stored in the
    /// same coordinates.
    LogCylinder { r: f64, hole: Option<Rect> },
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        let check_hole = |hole: &Rect, x1: f64, y1: f64| -> Result<()> {
            if !(hole.w > 0.0 && hole.h > 0.0) {
                return Err(invalid("hole sides must be positive"));
            }
            if !(hole.s > 0.0 && hole.x1() < x1 && hole.t > 0.0 && hole.y1() < y1) {
                return Err(invalid("closure of K must lie in the interior of R"));
            }
            Ok(())
        };
        match self {
            Region::Rectangle { a } => {
                if !(*a > 0.0 && a.is_finite()) {
                    return Err(invalid("a must be positive"));
                }
            }
            Region::RectangleRing { a, hole } => {
                if !(*a > 0.0 && a.is_finite()) {
                    return Err(invalid("a must be positive"));
                }
                check_hole(hole, *a, 1.0)?;
            }
            Region::LogCylinder { r, hole } => {
                if !(*r > 1.0 && r.is_finite()) {
                    return Err(invalid("r must exceed 1"));
                }
                if let Some(h) = hole {
                    if !(h.h > 0.0 && h.h < TAU) {
                        return Err(invalid("angular side must lie in (0, 2π)"));
                    }
                    if h.t < 0.0 || h.y1() > TAU {
                        return Err(invalid("wraparound hole"));
                    }
                    if !(h.w > 0.0 && h.s > 0.0 && h.x1() < r.ln()) {
                        return Err(invalid("need 1 < a < b < r for the C*-rectangle"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Bounding box `(x0, x1, y0, y1)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        match self {
            Region::Rectangle { a } | Region::RectangleRing { a, .. } => (0.0, *a, 0.0, 1.0),
            Region::LogCylinder { r, .. } => (0.0, r.ln(), 0.0, TAU),
        }
    }

    pub fn width(&self) -> f64 {
        let (x0, x1, _, _) = self.bounds();
        x1 - x0
    }

    pub fn height(&self) -> f64 {
        let (_, _, y0, y1) = self.bounds();
        y1 - y0
    }

    /// Area of the base rectangle (the hole K is not subtracted).
    pub fn base_area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn hole(&self) -> Option<Rect> {
        match self {
            Region::Rectangle { .. } => None,
            Region::RectangleRing { hole, .. } => Some(*hole),
            Region::LogCylinder { hole, .. } => *hole,
        }
    }

    pub fn is_log_cylinder(&self) -> bool {
        matches!(self, Region::LogCylinder { .. })
    }

    pub fn contains(&self, p: Point) -> bool {
        let (x0, x1, y0, y1) = self.bounds();
        let inside = p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
        inside && !self.hole().is_some_and(|k| k.contains(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize) -> ClosedCurve {
        ClosedCurve::circle(Point::ORIGIN, 1.0, n).unwrap()
    }

    #[test]
    fn diameter_small_sets() {
        assert_eq!(diameter(&[Point::ORIGIN]).unwrap(), 0.0);
        assert_eq!(diameter(&[Point::ORIGIN, Point::new(3.0, 4.0)]).unwrap(), 5.0);
        assert_eq!(diameter(&[]), Err(Error::EmptySet));
        let d = diameter(circle(64).vertices()).unwrap();
        assert!((1.99..=2.0).contains(&d));
    }

    #[test]
    fn orientation_by_shoelace() {
        let c = circle(32);
        assert_eq!(c.orientation(), Orientation::CounterClockwise);
        let mut rev = c.vertices().to_vec();
        rev.reverse();
        assert_eq!(signed_area_orientation(&rev).unwrap(), Orientation::Clockwise);
        let sq = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert_eq!(signed_area_orientation(&sq).unwrap(), Orientation::CounterClockwise);
        let flat = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
        assert_eq!(signed_area_orientation(&flat), Err(Error::DegenerateCurve));
    }

    #[test]
    fn degenerate_curves_rejected() {
        let mut v = circle(16).vertices().to_vec();
        v[3] = v[2];
        assert_eq!(ClosedCurve::new(v), Err(Error::DegenerateCurve));
        let bowtie: Vec<Point> = [
            (0.0, 0.0),
            (1.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (1.0, 1.0),
            (1.0, -1.0),
            (0.5, -1.0),
            (0.0, -0.5),
        ]
        .iter()
        .map(|&(x, y)| Point::new(x, y))
        .collect();
        assert!(ClosedCurve::new(bowtie).is_err());
    }

    #[test]
    fn quasicircle_of_round_circle() {
        let q = quasicircle_constant(&circle(256)).unwrap();
        assert!((q.value - 1.0).abs() <= 0.02, "{}", q.value);
        assert_eq!(q.resolution, 256);
    }

    #[test]
    fn quasicircle_of_square_baseline() {
        // Regression value; the exhaustive pair enumeration agrees with the DP.
        let sq = ClosedCurve::rectangle(0.0, 0.0, 1.0, 1.0, 24).unwrap();
        let q = quasicircle_constant(&sq).unwrap();
        let brute = brute_quasicircle(sq.vertices());
        assert!((q.value - brute).abs() < 1e-12);
        assert!((q.value - 1.144_038_255_222_160_2).abs() < 1e-9, "{}", q.value);
    }

    fn brute_quasicircle(v: &[Point]) -> f64 {
        let n = v.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let mut da = 0.0f64;
                let mut db = 0.0f64;
                let a: Vec<Point> = (0..=((j + n - i) % n)).map(|s| v[(i + s) % n]).collect();
                let b: Vec<Point> = (0..=((i + n - j) % n)).map(|s| v[(j + s) % n]).collect();
                for p in &a {
                    for q in &a {
                        da = da.max(p.dist(*q));
                    }
                }
                for p in &b {
                    for q in &b {
                        db = db.max(p.dist(*q));
                    }
                }
                best = best.max(da.min(db) / v[i].dist(v[j]));
            }
        }
        best
    }

    #[test]
    fn quasicircle_matches_brute_force_on_irregular_curve() {
        let v: Vec<Point> = (0..24)
            .map(|i| {
                let t = TAU * i as f64 / 24.0;
                Point::polar(1.0 + 0.3 * (3.0 * t).cos(), t)
            })
            .collect();
        let c = ClosedCurve::new(v).unwrap();
        let q = quasicircle_constant(&c).unwrap();
        assert!((q.value - brute_quasicircle(c.vertices())).abs() < 1e-12);
    }

    #[test]
    fn quasicircle_of_spike() {
        // Square of side 20 with an inward spike of depth 10 and mouth 0.01.
        let m = 0.005;
        let v: Vec<Point> = [
            (-10.0, -10.0),
            (0.0, -10.0),
            (10.0, -10.0),
            (10.0, 0.0),
            (10.0, 10.0),
            (m, 10.0),
            (m, 0.0),
            (-m, 0.0),
            (-m, 10.0),
            (-10.0, 10.0),
            (-10.0, 0.0),
        ]
        .iter()
        .map(|&(x, y)| Point::new(x, y))
        .collect();
        let c = ClosedCurve::new(v).unwrap();
        let q = quasicircle_constant(&c).unwrap();
        assert!(q.value >= 100.0, "{}", q.value);
    }

    #[test]
    fn quasicircle_trend_on_circles() {
        let vals: Vec<f64> = [32, 64, 128, 256]
            .iter()
            .map(|&n| quasicircle_constant(&circle(n)).unwrap().value)
            .collect();
        for w in vals.windows(2) {
            assert!((w[1] - 1.0).abs() <= (w[0] - 1.0).abs() + 1e-12);
        }
    }

    #[test]
    fn arcs_and_complements() {
        let c = circle(16);
        let a = c.arc(0, 8, true).unwrap();
        assert_eq!(a.vertices().count(), 9);
        assert_eq!(a.complement().vertices().count(), 9);
        assert!((a.diameter() - 2.0).abs() < 1e-12);
        assert!(c.arc(3, 3, true).is_err());
    }

    #[test]
    fn region_validation() {
        assert!(Region::RectangleRing {
            a: 2.0,
            hole: Rect::new(0.8, 0.4, 0.4, 0.2)
        }
        .validate()
        .is_ok());
        assert!(Region::RectangleRing {
            a: 2.0,
            hole: Rect::new(1.8, 0.4, 0.4, 0.2)
        }
        .validate()
        .is_err());
        assert!(Region::LogCylinder { r: 0.5, hole: None }.validate().is_err());
        let cyl = Region::LogCylinder {
            r: core::f64::consts::E,
            hole: None,
        };
        assert!((cyl.base_area() - TAU).abs() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn quasicircle_similarity_invariant(scale in 0.1f64..10.0, angle in 0.0f64..TAU,
                                           dx in -5.0f64..5.0, dy in -5.0f64..5.0) {
            let v: Vec<Point> = (0..40).map(|i| {
                let t = TAU * i as f64 / 40.0;
                Point::polar(1.0 + 0.25 * (2.0 * t).sin(), t)
            }).collect();
            let c = ClosedCurve::new(v).unwrap();
            let moved = c.transformed(scale, angle, Point::new(dx, dy)).unwrap();
            let a = quasicircle_constant(&c).unwrap().value;
            let b = quasicircle_constant(&moved).unwrap().value;
            proptest::prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0) * 10.0);
            let da = diameter(c.vertices()).unwrap();
            let db = diameter(moved.vertices()).unwrap();
            proptest::prop_assert!((db - scale * da).abs() <= 1e-12 * db.max(1.0) * 10.0);
        }
    }
}

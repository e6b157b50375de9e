//! Finite-depth carpets: the standard Sierpiński carpet, square carpets in
//! rectangles and rectangle rings, and C*-square carpets in log coordinates.
//!
//! Ring and C* carpets are generated by a frame rule: the complement of `K` is
//! tiled by base cells of side `b` aligned with all the data; every cell receives a
//! centred hole of side `0.8·b`, and each further level subdivides a cell 10 × 10
//! and recurses into the 36 subcells of the border frame left around the hole.
//! One level removes 64% of the remaining area, so the carpet area decays like
//! `0.36^depth`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_traits::Float;

use crate::error::invalid;
use crate::geometry::{ClosedCurve, Orientation, Rect, Region};
use crate::numeric::fsum;
use crate::{Error, Point, Result};

pub const MAX_DEPTH: usize = 6;
pub const MAX_HOLES: usize = 100_000;
/// Hole side relative to its cell.
pub const SHRINK: f64 = 0.8;
/// Subdivision of a cell at the next level; the frame is one subcell wide.
pub const SUBDIVISION: usize = 10;

/// A base region minus finitely many disjoint open rectangles.
///
/// Peripheral indices: `0` is the distinguished hole `K` (when the region has one),
/// followed by the rotated copies of `K` (C* carpets with symmetry), followed by the
/// square holes in `(cy, cx)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct Carpet {
    region: Region,
    k_copies: Vec<Rect>,
    holes: Vec<Rect>,
    depth: usize,
    index: HoleIndex,
}

impl Carpet {
    /// Validates and stores a carpet; holes are re-sorted by `(cy, cx)`.
    pub fn new(region: Region, k_copies: Vec<Rect>, mut holes: Vec<Rect>, depth: usize) -> Result<Self> {
        region.validate()?;
        if !k_copies.is_empty() && region.hole().is_none() {
            return Err(invalid("copies of K need a distinguished hole"));
        }
        if holes.len() + k_copies.len() > MAX_HOLES {
            return Err(Error::Resolution);
        }
        holes.sort_by(|a, b| {
            let (ca, cb) = (a.center(), b.center());
            ca.y.total_cmp(&cb.y).then(ca.x.total_cmp(&cb.x))
        });
        let mut carpet = Carpet {
            region,
            k_copies,
            holes,
            depth,
            index: HoleIndex::default(),
        };
        let (x0, x1, y0, y1) = region.bounds();
        for r in carpet.peripheral_rects() {
            if !(r.w > 0.0 && r.h > 0.0 && r.s.is_finite() && r.t.is_finite()) {
                return Err(invalid("hole sides must be positive"));
            }
            if !(r.s > x0 && r.x1() < x1 && r.t > y0 && r.y1() < y1) {
                return Err(invalid("hole closure must lie in the region interior"));
            }
        }
        if !(carpet.min_gap() > 0.0) {
            return Err(invalid("hole closures must be pairwise disjoint"));
        }
        carpet.index = HoleIndex::build(&carpet.peripheral_rects());
        Ok(carpet)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// The distinguished hole `K`, if any.
    pub fn k(&self) -> Option<Rect> {
        self.region.hole()
    }

    pub fn k_copies(&self) -> &[Rect] {
        &self.k_copies
    }

    /// Square holes (excluding `K` and its copies).
    pub fn holes(&self) -> &[Rect] {
        &self.holes
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Index of the first square hole among the peripheral indices.
    pub fn first_square_index(&self) -> usize {
        usize::from(self.k().is_some()) + self.k_copies.len()
    }

    /// All removed rectangles by peripheral index.
    pub fn peripheral_rects(&self) -> Vec<Rect> {
        let mut v = Vec::with_capacity(self.first_square_index() + self.holes.len());
        v.extend(self.k());
        v.extend(self.k_copies.iter().copied());
        v.extend(self.holes.iter().copied());
        v
    }

    pub fn peripheral_count(&self) -> usize {
        self.first_square_index() + self.holes.len()
    }

    pub fn peripheral_rect(&self, i: usize) -> Rect {
        let f = self.first_square_index();
        if i >= f {
            self.holes[i - f]
        } else if i == 0 && self.k().is_some() {
            self.k().unwrap()
        } else {
            self.k_copies[i - usize::from(self.k().is_some())]
        }
    }

    /// Peripheral index of the open rectangle containing `p`.
    pub fn locate(&self, p: Point) -> Option<usize> {
        self.index.locate(p, |i| self.peripheral_rect(i))
    }

    /// Whether `p` lies in the carpet (region minus all open holes).
    pub fn contains(&self, p: Point) -> bool {
        let (x0, x1, y0, y1) = self.region.bounds();
        p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1 && self.locate(p).is_none()
    }

    /// Smallest distance between two hole closures, or between a hole and the
    /// outer boundary. For log cylinders the seam counts through its two sides.
    pub fn min_gap(&self) -> f64 {
        let rects = self.peripheral_rects();
        let (x0, x1, y0, y1) = self.region.bounds();
        let cyl = self.region.is_log_cylinder();
        let mut best = f64::INFINITY;
        for r in &rects {
            best = best.min(r.s - x0).min(x1 - r.x1());
            if cyl {
                best = best.min(2.0 * r.t.min(y1 - r.y1()));
            } else {
                best = best.min(r.t - y0).min(y1 - r.y1());
            }
        }
        let mut order: Vec<usize> = (0..rects.len()).collect();
        order.sort_by(|&a, &b| rects[a].s.total_cmp(&rects[b].s));
        for (n, &i) in order.iter().enumerate() {
            let a = rects[i];
            for &j in &order[n + 1..] {
                let b = rects[j];
                if b.s - a.x1() >= best {
                    break;
                }
                if (b.t - a.y1()).max(a.t - b.y1()) >= best {
                    continue;
                }
                if a.overlaps(&b) {
                    return 0.0;
                }
                best = best.min(a.gap(&b));
            }
        }
        best
    }

    /// Smallest side of any removed rectangle.
    pub fn min_side(&self) -> f64 {
        self.peripheral_rects().iter().map(|r| r.w.min(r.h)).fold(f64::INFINITY, f64::min)
    }

    /// Euclidean diameter of the base region (in the plane for log cylinders).
    pub fn diameter(&self) -> f64 {
        match self.region {
            Region::LogCylinder { r, .. } => 2.0 * r,
            _ => self.region.width().hypot(self.region.height()),
        }
    }
}

/// Bucket index over the removed rectangles, one grid per factor-of-two size class.
/// Cells of one size class: cell side and the rectangles meeting each cell.
type SizeClass = (f64, BTreeMap<(i64, i64), Vec<u32>>);

#[derive(Debug, Clone, PartialEq, Default)]
struct HoleIndex {
    groups: Vec<SizeClass>,
}

impl HoleIndex {
    fn build(rects: &[Rect]) -> Self {
        let mut order: Vec<usize> = (0..rects.len()).collect();
        order.sort_by(|&a, &b| side(&rects[b]).total_cmp(&side(&rects[a])));
        let mut groups: Vec<SizeClass> = Vec::new();
        for i in order {
            let r = rects[i];
            let s = side(&r);
            if groups.last().is_none_or(|g| s < g.0 / 2.0) {
                groups.push((s, BTreeMap::new()));
            }
            let (size, map) = groups.last_mut().unwrap();
            let bx0 = (r.s / *size).floor() as i64;
            let bx1 = (r.x1() / *size).floor() as i64;
            let by0 = (r.t / *size).floor() as i64;
            let by1 = (r.y1() / *size).floor() as i64;
            for by in by0..=by1 {
                for bx in bx0..=bx1 {
                    map.entry((bx, by)).or_default().push(i as u32);
                }
            }
        }
        HoleIndex { groups }
    }

    fn locate(&self, p: Point, rect: impl Fn(usize) -> Rect) -> Option<usize> {
        for (size, map) in &self.groups {
            let key = ((p.x / size).floor() as i64, (p.y / size).floor() as i64);
            if let Some(list) = map.get(&key) {
                for &i in list {
                    if rect(i as usize).contains(p) {
                        return Some(i as usize);
                    }
                }
            }
        }
        None
    }
}

fn side(r: &Rect) -> f64 {
    r.w.max(r.h)
}

/// Standard middle-thirds Sierpiński carpet in the unit square.
pub fn sierpinski(depth: usize) -> Result<Carpet> {
    if depth > MAX_DEPTH {
        return Err(Error::Resolution);
    }
    let mut holes = Vec::new();
    let mut cells = alloc::vec![(0.0f64, 0.0f64, 1.0f64)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(cells.len() * 8);
        for (x, y, s) in cells {
            let t = s / 3.0;
            holes.push(Rect::new(x + t, t, y + t, t));
            for j in 0..3 {
                for i in 0..3 {
                    if i != 1 || j != 1 {
                        next.push((x + t * i as f64, y + t * j as f64, t));
                    }
                }
            }
        }
        cells = next;
    }
    Carpet::new(Region::Rectangle { a: 1.0 }, Vec::new(), holes, depth)
}

/// Depth-one carpet in the unit square invariant under the quarter turn about its
/// center: a central hole and four holes at `(0.25, 0.25)` and its rotations, all of
/// side `0.2`.
pub fn four_fold_carpet() -> Result<Carpet> {
    let holes = [(0.5, 0.5), (0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)]
        .iter()
        .map(|&(x, y)| Rect::square(Point::new(x, y), 0.2))
        .collect();
    Carpet::new(Region::Rectangle { a: 1.0 }, Vec::new(), holes, 1)
}

/// Square carpet in `[0, a] × [0, 1]` (no distinguished hole) built by the frame rule.
pub fn rect_carpet(a: f64, depth: usize) -> Result<Carpet> {
    let region = Region::Rectangle { a };
    region.validate()?;
    let b = aligned_cell(&[a, 1.0])?;
    frame_carpet(region, Vec::new(), b, depth)
}

/// Square carpet in the rectangle ring `[0, a] × [0, 1] \ K` built by the frame rule.
pub fn ring_carpet(a: f64, k: Rect, depth: usize) -> Result<Carpet> {
    let region = Region::RectangleRing { a, hole: k };
    region.validate()?;
    let b = aligned_cell(&[a, 1.0, k.s, k.w, k.t, k.h])?;
    frame_carpet(region, Vec::new(), b, depth)
}

/// C*-square carpet in log coordinates `[0, log r] × [0, 2π)`.
///
/// Base cells have side `2π / divisions`; `log r` and `K` must be multiples of it.
/// With `symmetry = m > 1` the carpet also contains the copies of `K` shifted by
/// multiples of `2π/m`, making it invariant under the rotation `z ↦ e^{2πi/m} z`.
pub fn cstar_carpet(r: f64, k: Rect, depth: usize, divisions: usize, symmetry: usize) -> Result<Carpet> {
    let region = Region::LogCylinder { r, hole: Some(k) };
    region.validate()?;
    if divisions == 0 {
        return Err(invalid("divisions must be positive"));
    }
    let b = TAU / divisions as f64;
    for v in [r.ln(), k.s, k.w, k.t, k.h] {
        if !is_multiple(v, b) {
            return Err(invalid("log r and K must be multiples of 2π/divisions"));
        }
    }
    let m = symmetry.max(1);
    if !divisions.is_multiple_of(m) {
        return Err(invalid("symmetry order must divide the number of divisions"));
    }
    let copies: Vec<Rect> = (1..m)
        .map(|i| Rect::new(k.s, k.w, k.t + TAU * i as f64 / m as f64, k.h))
        .collect();
    for c in &copies {
        if c.y1() >= TAU - 1e-12 {
            return Err(invalid("wraparound hole"));
        }
        if c.overlaps(&k) || c.gap(&k) <= 0.0 {
            return Err(invalid("copies of K must be disjoint"));
        }
    }
    frame_carpet(region, copies, b, depth)
}

fn is_multiple(v: f64, b: f64) -> bool {
    let q = v / b;
    (q - q.round()).abs() <= 1e-9 * q.abs().max(1.0)
}

/// Largest cell side `1/n`, `n ≤ 1000`, making every value a multiple of it.
fn aligned_cell(values: &[f64]) -> Result<f64> {
    (1..=1000)
        .find(|&n| values.iter().all(|&v| is_multiple(v, 1.0 / n as f64)))
        .map(|n| 1.0 / n as f64)
        .ok_or_else(|| invalid("K is not commensurable with a cell grid of side 1/n, n <= 1000"))
}

fn frame_carpet(region: Region, k_copies: Vec<Rect>, b: f64, depth: usize) -> Result<Carpet> {
    if depth > MAX_DEPTH {
        return Err(Error::Resolution);
    }
    let (x0, x1, y0, y1) = region.bounds();
    let nx = ((x1 - x0) / b).round() as usize;
    let ny = ((y1 - y0) / b).round() as usize;
    let mut blocked: Vec<Rect> = region.hole().into_iter().collect();
    blocked.extend(k_copies.iter().copied());
    let mut base = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let cell = Rect::new(x0 + b * i as f64, b, y0 + b * j as f64, b);
            let shrunk = Rect::new(cell.s + 1e-9 * b, b * (1.0 - 2e-9), cell.t + 1e-9 * b, b * (1.0 - 2e-9));
            if !blocked.iter().any(|k| k.overlaps(&shrunk)) {
                base.push(cell);
            }
        }
    }
    let frame = (SUBDIVISION * SUBDIVISION - (SUBDIVISION - 2) * (SUBDIVISION - 2)) as f64;
    let per_cell: f64 = (0..depth).map(|l| frame.powi(l as i32)).sum();
    if depth > 0 && base.len() as f64 * per_cell + k_copies.len() as f64 > MAX_HOLES as f64 {
        return Err(Error::Resolution);
    }
    let mut holes = Vec::new();
    for cell in base {
        fill_cell(cell, depth, &mut holes);
    }
    Carpet::new(region, k_copies, holes, depth)
}

fn fill_cell(cell: Rect, levels: usize, out: &mut Vec<Rect>) {
    if levels == 0 {
        return;
    }
    let b = cell.w;
    out.push(Rect::square(cell.center(), SHRINK * b));
    let sub = b / SUBDIVISION as f64;
    for j in 0..SUBDIVISION {
        for i in 0..SUBDIVISION {
            if i == 0 || j == 0 || i == SUBDIVISION - 1 || j == SUBDIVISION - 1 {
                let c = Rect::new(cell.s + sub * i as f64, sub, cell.t + sub * j as f64, sub);
                fill_cell(c, levels - 1, out);
            }
        }
    }
}

/// Outer boundary first (counterclockwise), then `K`, its copies and the holes
/// (clockwise). For log cylinders the curves are mapped to the plane by `exp` and
/// the outer boundary is `|z| = r` followed by `|z| = 1`.
pub fn peripheral_circles(carpet: &Carpet, per_side: usize) -> Result<Vec<ClosedCurve>> {
    let per_side = per_side.max(2);
    let mut out = Vec::with_capacity(carpet.peripheral_count() + 2);
    match carpet.region {
        Region::LogCylinder { r, .. } => {
            let n = 4 * per_side;
            out.push(ClosedCurve::circle(Point::ORIGIN, r, n)?);
            let inner = ClosedCurve::circle(Point::ORIGIN, 1.0, n)?;
            out.push(ClosedCurve::with_orientation(inner.vertices().to_vec(), Orientation::Clockwise)?);
            for rect in carpet.peripheral_rects() {
                let v = rect
                    .boundary_points(per_side)
                    .into_iter()
                    .map(|p| Point::polar(p.x.exp(), p.y))
                    .collect();
                out.push(ClosedCurve::with_orientation(v, Orientation::Clockwise)?);
            }
        }
        _ => {
            let (x0, x1, y0, y1) = carpet.region.bounds();
            out.push(ClosedCurve::rectangle(x0, y0, x1, y1, per_side)?);
            for rect in carpet.peripheral_rects() {
                out.push(ClosedCurve::with_orientation(rect.boundary_points(per_side), Orientation::Clockwise)?);
            }
        }
    }
    Ok(out)
}

/// Base area minus the areas of all removed rectangles (log coordinates for C*).
pub fn carpet_area(carpet: &Carpet) -> f64 {
    carpet.region.base_area() - fsum(carpet.peripheral_rects().iter().map(Rect::area))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::quasicircle_constant;

    #[test]
    fn sierpinski_counts_and_area() {
        assert!(sierpinski(0).unwrap().holes().is_empty());
        let s1 = sierpinski(1).unwrap();
        assert_eq!(s1.holes().len(), 1);
        let h = s1.holes()[0];
        assert!((h.w - 1.0 / 3.0).abs() < 1e-15);
        assert!(h.center().dist(Point::new(0.5, 0.5)) < 1e-15);
        for d in 0..=4 {
            let s = sierpinski(d).unwrap();
            assert_eq!(s.holes().len(), (8usize.pow(d as u32) - 1) / 7);
            let expected = (8.0f64 / 9.0).powi(d as i32);
            assert!((carpet_area(&s) - expected).abs() < 1e-12);
            assert!(s.min_gap() > 0.0);
        }
        assert_eq!(sierpinski(7), Err(Error::Resolution));
    }

    #[test]
    fn sierpinski_area_decreases() {
        let areas: Vec<f64> = (0..=5).map(|d| carpet_area(&sierpinski(d).unwrap())).collect();
        assert!(areas.windows(2).all(|w| w[1] < w[0]));
        assert!(areas[5] < 0.56);
    }

    #[test]
    fn peripheral_circle_counts() {
        assert_eq!(peripheral_circles(&sierpinski(1).unwrap(), 8).unwrap().len(), 2);
        assert_eq!(peripheral_circles(&sierpinski(2).unwrap(), 8).unwrap().len(), 10);
        let ring = ring_carpet(2.0, Rect::new(0.8, 0.4, 0.4, 0.2), 0).unwrap();
        let pc = peripheral_circles(&ring, 8).unwrap();
        assert_eq!(pc.len(), 2);
        assert_eq!(pc[0].orientation(), Orientation::CounterClockwise);
        assert_eq!(pc[1].orientation(), Orientation::Clockwise);
    }

    #[test]
    fn ring_depth_zero_area() {
        let k = Rect::new(0.8, 0.4, 0.4, 0.2);
        let ring = ring_carpet(2.0, k, 0).unwrap();
        assert!(ring.holes().is_empty());
        assert!((carpet_area(&ring) - (2.0 - 0.08)).abs() < 1e-15);
    }

    #[test]
    fn ring_matches_independent_regeneration() {
        let k = Rect::new(0.8, 0.4, 0.4, 0.2);
        let ring = ring_carpet(2.0, k, 2).unwrap();
        // Oracle: enumerate sub-subcell positions directly on a 0.02 lattice.
        let mut expect = Vec::new();
        for j in 0..5 {
            for i in 0..10 {
                let (x, y) = (0.2 * i as f64, 0.2 * j as f64);
                if (4..6).contains(&i) && j == 2 {
                    continue;
                }
                expect.push((x + 0.1, y + 0.1, 0.16));
                for q in 0..10 {
                    for p in 0..10 {
                        if p == 0 || q == 0 || p == 9 || q == 9 {
                            expect.push((x + 0.02 * p as f64 + 0.01, y + 0.02 * q as f64 + 0.01, 0.016));
                        }
                    }
                }
            }
        }
        assert_eq!(ring.holes().len(), expect.len());
        for (cx, cy, s) in expect {
            let found = ring.locate(Point::new(cx, cy)).map(|i| ring.peripheral_rect(i));
            let r = found.expect("hole at oracle center");
            assert!(r.center().dist(Point::new(cx, cy)) < 1e-12 && (r.w - s).abs() < 1e-12);
        }
    }

    #[test]
    fn ring_depth_three_defect_and_caps() {
        let k = Rect::new(0.8, 0.4, 0.4, 0.2);
        let ring = ring_carpet(2.0, k, 3).unwrap();
        assert_eq!(ring.holes().len(), 48 * (1 + 36 + 36 * 36));
        let defect = carpet_area(&ring);
        assert!((defect - 1.92 * 0.36f64.powi(3)).abs() < 1e-9, "{defect}");
        assert!(defect < 0.05 * 2.0);
        assert!(ring.min_gap() > 0.0);
        assert_eq!(ring_carpet(2.0, k, 4), Err(Error::Resolution));
    }

    #[test]
    fn centered_ring_is_symmetric() {
        let k = Rect::new(0.8, 0.4, 0.4, 0.2);
        let ring = ring_carpet(2.0, k, 2).unwrap();
        let c = Point::new(1.0, 0.5);
        for h in ring.holes() {
            let p = h.center().rotate_about(c, core::f64::consts::PI);
            let j = ring.locate(p).expect("rotated hole present");
            let g = ring.peripheral_rect(j);
            assert!(g.center().dist(p) < 1e-12 && (g.w - h.w).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_k_rejected() {
        assert!(ring_carpet(2.0, Rect::new(1.9, 0.4, 0.4, 0.2), 1).is_err());
        assert!(ring_carpet(2.0, Rect::new(0.8, 0.4, 0.4, 0.6), 1).is_err());
    }

    #[test]
    fn cstar_area_symmetry_and_wraparound() {
        let b = core::f64::consts::PI / 6.0;
        let r = (6.0 * b).exp();
        let k = Rect::new(2.0 * b, b, b, 2.0 * b);
        let c0 = cstar_carpet(r, k, 0, 12, 1).unwrap();
        assert!((carpet_area(&c0) - (TAU * r.ln() - 2.0 * b * b)).abs() < 1e-12);
        let c2 = cstar_carpet(r, k, 2, 12, 3).unwrap();
        assert_eq!(c2.k_copies().len(), 2);
        assert!(c2.min_gap() > 0.0);
        for h in c2.holes() {
            let mut p = h.center();
            p.y += TAU / 3.0;
            if p.y >= TAU {
                p.y -= TAU;
            }
            let j = c2.locate(p).expect("shifted hole present");
            assert!(c2.peripheral_rect(j).center().dist(p) < 1e-9);
        }
        // A copy of K crossing θ = 2π.
        let tall = Rect::new(2.0 * b, b, 7.0 * b, 4.0 * b);
        assert!(cstar_carpet(r, tall, 1, 12, 2).is_err());
    }

    #[test]
    fn square_holes_share_quasicircle_constant() {
        let s = sierpinski(2).unwrap();
        let pcs = peripheral_circles(&s, 12).unwrap();
        let first = quasicircle_constant(&pcs[1]).unwrap().value;
        for c in &pcs[2..] {
            assert!((quasicircle_constant(c).unwrap().value - first).abs() < 1e-9);
        }
    }

    #[test]
    fn locate_and_contains() {
        let s = sierpinski(2).unwrap();
        assert_eq!(s.locate(Point::new(0.5, 0.5)), Some(4));
        assert!(!s.contains(Point::new(0.5, 0.5)));
        assert!(s.contains(Point::new(0.01, 0.5)));
        assert!(!s.contains(Point::new(1.0 / 6.0, 1.0 / 6.0)));
    }
}

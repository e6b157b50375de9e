//! Grid-sampled planar maps with bilinear interpolation.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::PlaneTransform;
use crate::error::invalid;
use crate::{Error, Point, Result};

/// A map sampled on the nodes `origin + (iδ, jδ)`, `0 ≤ i < nx`, `0 ≤ j < ny`.
///
/// Values are stored row-major (`j·nx + i`). Nodes outside the map's domain
/// hold NaN; interpolation is only defined in cells whose four corners are set.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneMap {
    origin: Point,
    delta: f64,
    nx: usize,
    ny: usize,
    values: Vec<Point>,
}

const UNDEFINED: Point = Point {
    x: f64::NAN,
    y: f64::NAN,
};

impl PlaneMap {
    pub fn new(origin: Point, delta: f64, nx: usize, ny: usize, values: Vec<Point>) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() || !origin.is_finite() {
            return Err(invalid("grid spacing must be positive"));
        }
        if nx < 2 || ny < 2 {
            return Err(invalid("grid needs at least 2 x 2 nodes"));
        }
        if values.len() != nx * ny {
            return Err(Error::GridMismatch);
        }
        Ok(PlaneMap {
            origin,
            delta,
            nx,
            ny,
            values,
        })
    }

    /// Samples `f` at every node accepted by `mask`; failures become undefined nodes.
    pub fn sample<T: PlaneTransform + ?Sized>(
        f: &T,
        origin: Point,
        delta: f64,
        nx: usize,
        ny: usize,
        mask: impl Fn(Point) -> bool,
    ) -> Result<Self> {
        let mut map = Self::new(origin, delta, nx, ny, vec![UNDEFINED; nx * ny])?;
        for j in 0..ny {
            for i in 0..nx {
                let z = map.node(i, j);
                if mask(z) {
                    if let Ok(w) = f.apply(z) {
                        if w.is_finite() {
                            map.values[j * nx + i] = w;
                        }
                    }
                }
            }
        }
        Ok(map)
    }

    /// Samples `f` on the square window `[lo, hi]²` with `n` nodes per side.
    pub fn sample_window<T: PlaneTransform + ?Sized>(f: &T, lo: f64, hi: f64, n: usize) -> Result<Self> {
        let delta = (hi - lo) / (n.max(2) - 1) as f64;
        Self::sample(f, Point::new(lo, lo), delta, n, n, |_| true)
    }

    pub fn identity(origin: Point, delta: f64, nx: usize, ny: usize) -> Result<Self> {
        let mut map = Self::new(origin, delta, nx, ny, vec![UNDEFINED; nx * ny])?;
        for j in 0..ny {
            for i in 0..nx {
                map.values[j * nx + i] = map.node(i, j);
            }
        }
        Ok(map)
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn values(&self) -> &[Point] {
        &self.values
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + self.delta * i as f64,
            self.origin.y + self.delta * j as f64,
        )
    }

    /// Value at node `(i, j)` if defined.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> Option<Point> {
        let v = self.values[j * self.nx + i];
        v.is_finite().then_some(v)
    }

    pub fn defined_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_finite()).count()
    }

    fn cell_of(&self, z: Point) -> Option<(usize, usize, f64, f64)> {
        let fx = (z.x - self.origin.x) / self.delta;
        let fy = (z.y - self.origin.y) / self.delta;
        let eps = 1e-9;
        if !(fx >= -eps && fy >= -eps && fx <= (self.nx - 1) as f64 + eps && fy <= (self.ny - 1) as f64 + eps) {
            return None;
        }
        let i = (fx.floor().max(0.0) as usize).min(self.nx - 2);
        let j = (fy.floor().max(0.0) as usize).min(self.ny - 2);
        Some((i, j, (fx - i as f64).clamp(0.0, 1.0), (fy - j as f64).clamp(0.0, 1.0)))
    }

    fn corners(&self, i: usize, j: usize) -> Option<[Point; 4]> {
        Some([
            self.value(i, j)?,
            self.value(i + 1, j)?,
            self.value(i, j + 1)?,
            self.value(i + 1, j + 1)?,
        ])
    }

    /// Bilinear interpolation; "out of domain" outside the defined cells.
    pub fn eval(&self, z: Point) -> Result<Point> {
        let (i, j, u, v) = self.cell_of(z).ok_or(Error::OutOfDomain)?;
        let c = self.corners(i, j).ok_or(Error::OutOfDomain)?;
        Ok(bilinear(&c, u, v))
    }

    /// `self ∘ inner`, sampled on the grid of `inner`.
    pub fn compose(&self, inner: &PlaneMap) -> Result<PlaneMap> {
        let values = inner
            .values
            .iter()
            .map(|&w| if w.is_finite() { self.eval(w) } else { Ok(UNDEFINED) })
            .collect::<Result<Vec<_>>>()?;
        PlaneMap::new(inner.origin, inner.delta, inner.nx, inner.ny, values)
    }

    /// `n`-fold self-composition (`n = 0` is the identity on the defined nodes).
    pub fn iterate(&self, n: usize) -> Result<PlaneMap> {
        let mut out = PlaneMap::identity(self.origin, self.delta, self.nx, self.ny)?;
        for (o, v) in out.values.iter_mut().zip(&self.values) {
            if !v.is_finite() {
                *o = UNDEFINED;
            }
        }
        for _ in 0..n {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    /// Inverse sampled on the same grid. Nodes outside the image stay undefined.
    ///
    /// Each node is located by a cell search over a bucket index of cell images
    /// and refined by a fixed-point iteration with the frozen cell Jacobian
    /// (at most 20 steps, accepted below a residual of `1e-10` cell widths).
    pub fn invert(&self) -> Result<PlaneMap> {
        let cells = self.cell_images();
        if cells.is_empty() {
            return Err(Error::EmptySet);
        }
        let index = BucketIndex::build(&cells);
        let mut values = vec![UNDEFINED; self.nx * self.ny];
        for j in 0..self.ny {
            for i in 0..self.nx {
                let w = self.node(i, j);
                for &c in index.candidates(w) {
                    let (ci, cj, corners, _) = &cells[c];
                    if let Some((u, v)) = solve_cell(corners, w, self.delta) {
                        values[j * self.nx + i] =
                            Point::new(self.origin.x + self.delta * (*ci as f64 + u), self.origin.y + self.delta * (*cj as f64 + v));
                        break;
                    }
                }
            }
        }
        PlaneMap::new(self.origin, self.delta, self.nx, self.ny, values)
    }

    fn cell_images(&self) -> Vec<(usize, usize, [Point; 4], [f64; 4])> {
        let mut out = Vec::new();
        for j in 0..self.ny - 1 {
            for i in 0..self.nx - 1 {
                if let Some(c) = self.corners(i, j) {
                    let bb = [
                        c.iter().map(|p| p.x).fold(f64::INFINITY, f64::min),
                        c.iter().map(|p| p.y).fold(f64::INFINITY, f64::min),
                        c.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max),
                        c.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max),
                    ];
                    out.push((i, j, c, bb));
                }
            }
        }
        out
    }

    /// `max |self(z) − other(z)|` over nodes where both maps are defined and `keep` holds.
    pub fn sup_distance(&self, other: &PlaneMap, keep: impl Fn(Point) -> bool) -> Result<f64> {
        if self.shape() != other.shape() || self.origin != other.origin || self.delta != other.delta {
            return Err(Error::GridMismatch);
        }
        let mut worst = 0.0f64;
        for j in 0..self.ny {
            for i in 0..self.nx {
                if let (Some(a), Some(b)) = (self.value(i, j), other.value(i, j)) {
                    if keep(self.node(i, j)) {
                        worst = worst.max(a.dist(b));
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Dilatation ratio at node `(i, j)` over the 8 stencil directions at distance
    /// `step` nodes; `None` when a stencil node is undefined or outside the grid.
    pub fn dilatation_at(&self, i: usize, j: usize, step: usize) -> Result<Option<f64>> {
        if i < step || j < step || i + step >= self.nx || j + step >= self.ny {
            return Ok(None);
        }
        let Some(c) = self.value(i, j) else {
            return Ok(None);
        };
        let z = self.node(i, j);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let s = step as isize;
        for (di, dj) in [(s, 0), (s, s), (0, s), (-s, s), (-s, 0), (-s, -s), (0, -s), (s, -s)] {
            let ii = (i as isize + di) as usize;
            let jj = (j as isize + dj) as usize;
            let Some(w) = self.value(ii, jj) else {
                return Ok(None);
            };
            let stretch = w.dist(c) / self.node(ii, jj).dist(z);
            lo = lo.min(stretch);
            hi = hi.max(stretch);
        }
        if !(lo > 0.0) {
            return Err(Error::CollapsedNode);
        }
        Ok(Some(hi / lo))
    }
}

impl PlaneTransform for PlaneMap {
    fn apply(&self, z: Point) -> Result<Point> {
        self.eval(z)
    }
}

fn bilinear(c: &[Point; 4], u: f64, v: f64) -> Point {
    let a = c[0] * (1.0 - u) + c[1] * u;
    let b = c[2] * (1.0 - u) + c[3] * u;
    a * (1.0 - v) + b * v
}

fn solve_cell(c: &[Point; 4], w: Point, delta: f64) -> Option<(f64, f64)> {
    // Cell-average Jacobian in (u, v) coordinates.
    let du = (c[1] - c[0] + c[3] - c[2]) * 0.5;
    let dv = (c[2] - c[0] + c[3] - c[1]) * 0.5;
    let det = du.cross(dv);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let (mut u, mut v) = (0.5, 0.5);
    let scale = du.norm().max(dv.norm()).max(delta * 1e-12);
    for _ in 0..20 {
        let r = w - bilinear(c, u, v);
        if r.norm() <= 1e-10 * scale {
            break;
        }
        u += r.cross(dv) / det;
        v += du.cross(r) / det;
        if !(u.is_finite() && v.is_finite()) || u.abs() > 4.0 || v.abs() > 4.0 {
            return None;
        }
    }
    let eps = 1e-9;
    let ok = (w - bilinear(c, u, v)).norm() <= 1e-10 * scale
        && (-eps..=1.0 + eps).contains(&u)
        && (-eps..=1.0 + eps).contains(&v);
    ok.then(|| (u.clamp(0.0, 1.0), v.clamp(0.0, 1.0)))
}

struct BucketIndex {
    x0: f64,
    y0: f64,
    size: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
    empty: Vec<usize>,
}

impl BucketIndex {
    fn build(cells: &[(usize, usize, [Point; 4], [f64; 4])]) -> Self {
        let x0 = cells.iter().map(|c| c.3[0]).fold(f64::INFINITY, f64::min);
        let y0 = cells.iter().map(|c| c.3[1]).fold(f64::INFINITY, f64::min);
        let x1 = cells.iter().map(|c| c.3[2]).fold(f64::NEG_INFINITY, f64::max);
        let y1 = cells.iter().map(|c| c.3[3]).fold(f64::NEG_INFINITY, f64::max);
        let mean = cells.iter().map(|c| (c.3[2] - c.3[0]).max(c.3[3] - c.3[1])).sum::<f64>() / cells.len() as f64;
        let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
        let size = mean.max(span / 2048.0).max(f64::MIN_POSITIVE);
        let nx = (((x1 - x0) / size).floor() as usize + 1).min(4096);
        let ny = (((y1 - y0) / size).floor() as usize + 1).min(4096);
        let mut buckets = vec![Vec::new(); nx * ny];
        let clampx = |v: f64| (((v - x0) / size).floor().max(0.0) as usize).min(nx - 1);
        let clampy = |v: f64| (((v - y0) / size).floor().max(0.0) as usize).min(ny - 1);
        for (k, c) in cells.iter().enumerate() {
            let (a, b) = (clampx(c.3[0] - 1e-12 * size), clampx(c.3[2] + 1e-12 * size));
            let (p, q) = (clampy(c.3[1] - 1e-12 * size), clampy(c.3[3] + 1e-12 * size));
            for by in p..=q {
                for bx in a..=b {
                    buckets[by * nx + bx].push(k);
                }
            }
        }
        BucketIndex {
            x0,
            y0,
            size,
            nx,
            ny,
            buckets,
            empty: Vec::new(),
        }
    }

    fn candidates(&self, w: Point) -> &[usize] {
        let fx = (w.x - self.x0) / self.size;
        let fy = (w.y - self.y0) / self.size;
        if !(fx >= 0.0 && fy >= 0.0) || fx >= self.nx as f64 || fy >= self.ny as f64 {
            return &self.empty;
        }
        &self.buckets[fy as usize * self.nx + fx as usize]
    }
}

/// Largest dilatation ratio over a grid map and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dilatation {
    pub max: f64,
    pub at: Point,
    pub nodes: usize,
}

/// Maximum of the 8-direction stretch ratio over all nodes whose stencil is defined
/// and which satisfy `keep`. Errors with "collapsed node" when a stencil
/// neighbour has the same image.
pub fn dilatation_estimate(map: &PlaneMap, step: usize, keep: impl Fn(Point) -> bool) -> Result<Dilatation> {
    let step = step.max(1);
    let (nx, ny) = map.shape();
    let mut best = Dilatation {
        max: 0.0,
        at: Point::ORIGIN,
        nodes: 0,
    };
    for j in 0..ny {
        for i in 0..nx {
            if !keep(map.node(i, j)) {
                continue;
            }
            if let Some(k) = map.dilatation_at(i, j, step)? {
                best.nodes += 1;
                if k > best.max {
                    best.max = k;
                    best.at = map.node(i, j);
                }
            }
        }
    }
    if best.nodes == 0 {
        return Err(Error::EmptySet);
    }
    Ok(best)
}

//! Quasisymmetry estimators over sampled triples.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_traits::Float;

use super::{CircleMap, PlaneTransform};
use crate::error::invalid;
use crate::geometry::ClosedCurve;
use crate::sampling::{golden, r2};
use crate::{Error, Point, Result};

/// Buckets `t ∈ {1/8, …, 8}` reported by [`qs_eta_profile`] by default.
pub const ETA_BUCKETS: [f64; 7] = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

/// A triple of distinct points `(x, a, b)` of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleSample {
    pub x: Point,
    pub a: Point,
    pub b: Point,
}

impl TripleSample {
    pub fn new(x: Point, a: Point, b: Point) -> Result<Self> {
        if x == a || x == b || a == b {
            return Err(invalid("triple points must be distinct"));
        }
        Ok(TripleSample { x, a, b })
    }

    /// `|x − a| / |x − b|`.
    pub fn ratio(&self) -> f64 {
        self.x.dist(self.a) / self.x.dist(self.b)
    }

    fn image_ratio<F: PlaneTransform + ?Sized>(&self, f: &F) -> Result<f64> {
        let fx = f.apply(self.x)?;
        let fa = f.apply(self.a)?;
        let fb = f.apply(self.b)?;
        let den = fx.dist(fb);
        if den == 0.0 || fx.dist(fa) == 0.0 {
            return Err(Error::NonInjectiveSample);
        }
        Ok(fx.dist(fa) / den)
    }
}

impl PlaneTransform for CircleMap {
    /// Rotates `z` to the argument `φ(arg z)` keeping its modulus.
    fn apply(&self, z: Point) -> Result<Point> {
        if z == Point::ORIGIN {
            return Ok(z);
        }
        Ok(Point::polar(z.norm(), self.lift_at(z.arg())))
    }
}

/// `max |f(x) − f(a)| / |f(x) − f(b)|` over triples with `|x − a| ≤ |x − b|`.
pub fn weak_qs_constant<F: PlaneTransform + ?Sized>(f: &F, samples: &[TripleSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut worst = 0.0f64;
    for s in samples {
        if s.ratio() > 1.0 + 1e-12 {
            return Err(invalid("weak quasisymmetry needs |x - a| <= |x - b|"));
        }
        worst = worst.max(s.image_ratio(f)?);
    }
    Ok(worst)
}

/// Empirical distortion function: for each `t` the largest image ratio among
/// triples of ratio at most `t`. Values of `t` with no qualifying triple are omitted.
pub fn qs_eta_profile<F: PlaneTransform + ?Sized>(
    f: &F,
    t_grid: &[f64],
    samples: &[TripleSample],
) -> Result<Vec<(f64, f64)>> {
    let pairs = samples
        .iter()
        .map(|s| Ok((s.ratio(), s.image_ratio(f)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(t_grid
        .iter()
        .filter_map(|&t| {
            pairs
                .iter()
                .filter(|p| p.0 <= t * (1.0 + 1e-12))
                .map(|p| p.1)
                .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
                .map(|eta| (t, eta))
        })
        .collect())
}

/// Deterministic triples on the unit circle: `n` quasi-random triples with
/// ratios spread over `[1/16, 8]`, plus the adjacent-knot triples of `knots`.
/// With `weak` set, only triples with `|x − a| ≤ |x − b|` are produced.
pub fn circle_triples(n: usize, knots: &[f64], weak: bool) -> Vec<TripleSample> {
    let mut out = Vec::with_capacity(n + knots.len());
    let on = |t: f64| Point::polar(1.0, t);
    for i in 0..n {
        let (u, v) = r2(i + 1);
        let x = TAU * u;
        let beta = PI * (0.002 + 0.99 * v);
        let t_log = -2.77 + 4.85 * golden(i + 7);
        let mut t = t_log.exp();
        if weak {
            t = t.min(1.0);
        }
        let alpha = (beta * t).min(PI * 0.999);
        let sign = if golden(i + 3) < 0.5 { -1.0 } else { 1.0 };
        if let Ok(s) = TripleSample::new(on(x), on(x + sign * alpha), on(x + beta)) {
            if !weak || s.ratio() <= 1.0 {
                out.push(s);
            }
        }
    }
    let m = knots.len();
    for i in 0..m {
        let x = knots[i];
        let a = knots[(i + 1) % m];
        let b = knots[(i + m - 1) % m];
        if let Ok(mut s) = TripleSample::new(on(x), on(a), on(b)) {
            if weak && s.ratio() > 1.0 {
                core::mem::swap(&mut s.a, &mut s.b);
            }
            out.push(s);
        }
    }
    out
}

/// Deterministic vertex triples on a closed curve, `n` of them.
pub fn curve_triples(curve: &ClosedCurve, n: usize, weak: bool) -> Vec<TripleSample> {
    let v = curve.vertices();
    let m = v.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (u, w) = r2(i + 1);
        let ix = (u * m as f64) as usize % m;
        let ia = (ix + 1 + (golden(i) * (m - 1) as f64) as usize) % m;
        let ib = (ix + 1 + (w * (m - 1) as f64) as usize) % m;
        if let Ok(mut s) = TripleSample::new(v[ix], v[ia], v[ib]) {
            if weak && s.ratio() > 1.0 {
                core::mem::swap(&mut s.a, &mut s.b);
            }
            out.push(s);
        }
    }
    out
}

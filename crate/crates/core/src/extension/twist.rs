//! Hole-preserving twists and conjugation, used to build periodic carpet maps whose
//! boundary behaviour is far from a rigid motion while the ground truth stays exact.

use alloc::vec::Vec;

use num_traits::Float;

use super::chart::{cone_from_polar, cone_polar, RectChart};
use crate::error::invalid;
use crate::geometry::Rect;
use crate::maps::{InvertibleTransform, PlaneTransform};
use crate::{Point, Result};

/// Angular twist around one rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub rect: Rect,
    /// Amplitude, `|eps| < 1`.
    pub eps: f64,
    pub phase: f64,
}

/// In the conical coordinates `(t, a)` of each rectangle (`t` the `L∞` radius
/// relative to the half-sides), `a ↦ a + ε λ(t) sin(a + phase)` with `λ = 1` on the
/// closed rectangle, decaying linearly to `0` at `t = 1 + margin`. Every level set of
/// `t` is kept, so each rectangle and its boundary are invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleTwist {
    twists: Vec<Twist>,
    margin: f64,
}

impl HoleTwist {
    /// The enlarged rectangles (by `margin` in conical radius) must be disjoint.
    pub fn new(twists: Vec<Twist>, margin: f64) -> Result<Self> {
        if !(margin > 0.0) {
            return Err(invalid("twist margin must be positive"));
        }
        if twists.iter().any(|t| !(t.eps.abs() < 1.0)) {
            return Err(invalid("twist amplitude must be below 1"));
        }
        let grown: Vec<Rect> = twists.iter().map(|t| grow(&t.rect, margin)).collect();
        for i in 0..grown.len() {
            for j in 0..i {
                if grown[i].overlaps(&grown[j]) {
                    return Err(invalid("twist supports overlap"));
                }
            }
        }
        Ok(HoleTwist { twists, margin })
    }

    pub fn twists(&self) -> &[Twist] {
        &self.twists
    }

    fn lambda(&self, t: f64) -> f64 {
        if t <= 1.0 {
            1.0
        } else {
            ((1.0 + self.margin - t) / self.margin).max(0.0)
        }
    }

    fn eval(&self, z: Point, inverse: bool) -> Point {
        for tw in &self.twists {
            let chart = RectChart::new(tw.rect);
            let (x, y) = chart.to_square(z);
            let (t, a) = cone_polar(x, y);
            if t >= 1.0 + self.margin || t == 0.0 {
                continue;
            }
            let e = tw.eps * self.lambda(t);
            let b = if inverse {
                // Solve b + e sin(b + phase) = a; the derivative is at least 1 − |e|.
                let mut b = a;
                for _ in 0..60 {
                    let g = b + e * (b + tw.phase).sin() - a;
                    let step = g / (1.0 + e * (b + tw.phase).cos());
                    b -= step;
                    if step.abs() <= 1e-17 {
                        break;
                    }
                }
                b
            } else {
                a + e * (a + tw.phase).sin()
            };
            let (x2, y2) = cone_from_polar(t, b);
            return chart.from_square(x2, y2);
        }
        z
    }
}

fn grow(r: &Rect, margin: f64) -> Rect {
    let (dx, dy) = (0.5 * margin * r.w, 0.5 * margin * r.h);
    Rect::new(r.s - dx, r.w + 2.0 * dx, r.t - dy, r.h + 2.0 * dy)
}

impl PlaneTransform for HoleTwist {
    fn apply(&self, z: Point) -> Result<Point> {
        Ok(self.eval(z, false))
    }
}

impl InvertibleTransform for HoleTwist {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        Ok(self.eval(w, true))
    }
}

/// `conj ∘ inner ∘ conj⁻¹`.
#[derive(Debug, Clone)]
pub struct Conjugate<A, B> {
    pub inner: A,
    pub conj: B,
}

impl<A: PlaneTransform, B: InvertibleTransform> PlaneTransform for Conjugate<A, B> {
    fn apply(&self, z: Point) -> Result<Point> {
        self.conj.apply(self.inner.apply(self.conj.apply_inverse(z)?)?)
    }
}

impl<A: InvertibleTransform, B: InvertibleTransform> InvertibleTransform for Conjugate<A, B> {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        self.conj.apply(self.inner.apply_inverse(self.conj.apply_inverse(w)?)?)
    }
}

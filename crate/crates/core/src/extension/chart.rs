//! Bilipschitz charts from quadrilateral cells to the unit disk.
//!
//! The square `[-1, 1]²` goes to the disk by the conical map: the `L∞` radius
//! becomes the Euclidean radius and each side is spread affinely over a quarter of
//! the circle (right side around angle `0`, then top, left, bottom). Boundary maps
//! that are piecewise linear along the sides stay piecewise linear in angle.

use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};


use crate::geometry::Rect;
use crate::numeric::{angle_diff, wrap_angle};
use crate::Point;

/// Sides of the square in counterclockwise order starting at angle `-π/4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Top,
    Left,
    Bottom,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Right, Side::Top, Side::Left, Side::Bottom];

    /// Disk angle of the boundary point with side parameter `s ∈ [-1, 1]`
    /// (`y` on the vertical sides, `x` on the horizontal ones).
    pub fn angle(self, s: f64) -> f64 {
        match self {
            Side::Right => FRAC_PI_4 * s,
            Side::Top => FRAC_PI_2 - FRAC_PI_4 * s,
            Side::Left => PI - FRAC_PI_4 * s,
            Side::Bottom => 3.0 * FRAC_PI_2 + FRAC_PI_4 * s,
        }
    }

    /// Inverse of [`Side::angle`] on the side's quarter arc.
    pub fn param(self, angle: f64) -> f64 {
        let d = angle_diff(angle, self.angle(0.0)) / FRAC_PI_4;
        match self {
            Side::Right | Side::Bottom => d,
            Side::Top | Side::Left => -d,
        }
    }
}

/// `L∞` radius and boundary angle of `(x, y)`, unclamped.
pub fn cone_polar(x: f64, y: f64) -> (f64, f64) {
    let t = x.abs().max(y.abs());
    if t == 0.0 {
        return (0.0, 0.0);
    }
    let (sx, sy) = (x / t, y / t);
    let angle = if sx == 1.0 {
        Side::Right.angle(sy)
    } else if sy == 1.0 {
        Side::Top.angle(sx)
    } else if sx == -1.0 {
        Side::Left.angle(sy)
    } else {
        Side::Bottom.angle(sx)
    };
    (t, angle)
}

/// Inverse of [`cone_polar`].
pub fn cone_from_polar(t: f64, angle: f64) -> (f64, f64) {
    let a = wrap_angle(angle + FRAC_PI_4);
    let side = Side::ALL[((a / FRAC_PI_2) as usize).min(3)];
    let s = side.param(angle).clamp(-1.0, 1.0);
    let (x, y) = match side {
        Side::Right => (1.0, s),
        Side::Top => (s, 1.0),
        Side::Left => (-1.0, s),
        Side::Bottom => (s, -1.0),
    };
    (t * x, t * y)
}

/// Conical map from `[-1, 1]²` onto the closed unit disk.
pub fn square_to_disk(x: f64, y: f64) -> Point {
    let (t, angle) = cone_polar(x.clamp(-1.0, 1.0), y.clamp(-1.0, 1.0));
    Point::polar(t, angle)
}

/// Inverse of [`square_to_disk`].
pub fn disk_to_square(w: Point) -> (f64, f64) {
    let t = w.norm().min(1.0);
    if t == 0.0 {
        return (0.0, 0.0);
    }
    cone_from_polar(t, w.arg())
}

/// Affine chart of an axis-parallel rectangle onto `[-1, 1]²`, followed by the
/// conical map to the disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectChart {
    pub rect: Rect,
}

impl RectChart {
    pub fn new(rect: Rect) -> Self {
        RectChart { rect }
    }

    pub fn to_square(&self, z: Point) -> (f64, f64) {
        let r = &self.rect;
        (2.0 * (z.x - r.s) / r.w - 1.0, 2.0 * (z.y - r.t) / r.h - 1.0)
    }

    pub fn from_square(&self, x: f64, y: f64) -> Point {
        let r = &self.rect;
        Point::new(r.s + 0.5 * (x + 1.0) * r.w, r.t + 0.5 * (y + 1.0) * r.h)
    }

    pub fn to_disk(&self, z: Point) -> Point {
        let (x, y) = self.to_square(z);
        square_to_disk(x, y)
    }

    pub fn from_disk(&self, w: Point) -> Point {
        let (x, y) = disk_to_square(w);
        self.from_square(x, y)
    }

    /// Point of the rectangle boundary at disk angle `angle`.
    pub fn boundary_point(&self, angle: f64) -> Point {
        self.from_disk(Point::polar(1.0, angle))
    }

    /// Disk angle of a point on (or near) the rectangle boundary.
    pub fn boundary_angle(&self, z: Point) -> f64 {
        let (x, y) = self.to_square(z);
        let w = square_to_disk(x, y);
        wrap_angle(w.arg())
    }
}

//! Log coordinates `(log |z|, arg z)`, in which the C* metric `|dz|/|z|` and area
//! `dxdy/|z|²` become Euclidean.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_traits::Float;

use crate::error::invalid;
use crate::geometry::{ClosedCurve, Rect, Region};
use crate::numeric::wrap_angle;
use crate::{Error, Point, Result};

/// `z ↦ (log |z|, arg z)` with the angle in `[0, 2π)`; `z = 0` is a pole.
pub fn log_point(z: Point) -> Result<Point> {
    let r = z.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Pole);
    }
    Ok(Point::new(r.ln(), wrap_angle(z.arg())))
}

/// Inverse of [`log_point`].
pub fn exp_point(p: Point) -> Point {
    Point::polar(p.x.exp(), p.y)
}

/// The C*-rectangle `{t e^{iθ} : a < t < b, α < θ < β}` in log coordinates.
pub fn cstar_rect(a: f64, b: f64, alpha: f64, beta: f64) -> Result<Rect> {
    if !(a > 0.0 && b > a) {
        return Err(invalid("need 0 < a < b"));
    }
    if !(beta > alpha && beta - alpha < TAU) {
        return Err(invalid("need 0 < β − α < 2π"));
    }
    Ok(Rect::new(a.ln(), (b / a).ln(), alpha, beta - alpha))
}

/// Objects that can be carried to log coordinates.
pub trait LogTransform: Sized {
    type Output;
    fn to_log(&self) -> Result<Self::Output>;
}

impl LogTransform for Point {
    type Output = Point;
    fn to_log(&self) -> Result<Point> {
        log_point(*self)
    }
}

/// Closed curves become polylines in the `(log t, θ)` plane with a continuous
/// angle; a curve winding around 0 becomes open and its last vertex is repeated
/// shifted by `2π` to make the seam explicit.
impl LogTransform for ClosedCurve {
    type Output = Vec<Point>;
    fn to_log(&self) -> Result<Vec<Point>> {
        let mut out: Vec<Point> = Vec::with_capacity(self.len() + 1);
        for &z in self.vertices() {
            let mut p = log_point(z)?;
            if let Some(prev) = out.last() {
                let d = crate::numeric::angle_diff(p.y, prev.y);
                p.y = prev.y + d;
            }
            out.push(p);
        }
        let first = out[0];
        let last = *out.last().unwrap();
        let closing = last.y + crate::numeric::angle_diff(first.y, last.y);
        if (closing - first.y).abs() > 1.0 {
            out.push(Point::new(first.x, closing));
        }
        Ok(out)
    }
}

/// The annulus `{1 ≤ |z| ≤ r}`, optionally minus a C*-rectangle, as a log cylinder.
pub struct Annulus {
    pub r: f64,
    pub hole: Option<(f64, f64, f64, f64)>,
}

impl LogTransform for Annulus {
    type Output = Region;
    fn to_log(&self) -> Result<Region> {
        let hole = self
            .hole
            .map(|(a, b, alpha, beta)| cstar_rect(a, b, alpha, beta))
            .transpose()?;
        let region = Region::LogCylinder { r: self.r, hole };
        region.validate()?;
        Ok(region)
    }
}

/// Carries a point, curve or annulus to log coordinates.
pub fn cstar_log_transform<T: LogTransform>(object: &T) -> Result<T::Output> {
    object.to_log()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::E;

    #[test]
    fn annulus_becomes_rectangle() {
        let reg = cstar_log_transform(&Annulus { r: E, hole: None }).unwrap();
        assert_eq!(reg.bounds(), (0.0, 1.0, 0.0, TAU));
    }

    #[test]
    fn cstar_square_becomes_unit_square() {
        let k = cstar_rect(1.0, E, 0.0, 1.0).unwrap();
        assert_eq!(k, Rect::new(0.0, 1.0, 0.0, 1.0));
    }

    #[test]
    fn radial_side_has_log_length() {
        let (a, b, th) = (1.5, 3.0, 0.7);
        let p = log_point(Point::polar(a, th)).unwrap();
        let q = log_point(Point::polar(b, th)).unwrap();
        assert!((q.y - p.y).abs() < 1e-15);
        assert!((q.x - p.x - (b / a).ln()).abs() < 1e-15);
    }

    #[test]
    fn origin_is_rejected() {
        assert_eq!(log_point(Point::ORIGIN), Err(Error::Pole));
        let through_zero = ClosedCurve::rectangle(-1.0, 0.0, 1.0, 1.0, 4).unwrap();
        assert_eq!(cstar_log_transform(&through_zero), Err(Error::Pole));
    }

    #[test]
    fn roundtrip_and_winding_curve() {
        let z = Point::new(-2.0, 0.5);
        assert!(exp_point(log_point(z).unwrap()).dist(z) < 1e-15);
        let c = ClosedCurve::circle(Point::ORIGIN, 2.0, 32).unwrap();
        let img = cstar_log_transform(&c).unwrap();
        assert_eq!(img.len(), 33);
        assert!((img[32].y - img[0].y - TAU).abs() < 1e-12);
        assert!(img.iter().all(|p| (p.x - 2f64.ln()).abs() < 1e-15));
    }
}

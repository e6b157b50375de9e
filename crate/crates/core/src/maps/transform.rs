use alloc::boxed::Box;


use crate::{Point, Result};

/// A planar map that can be evaluated exactly at any point of its domain.
pub trait PlaneTransform {
    fn apply(&self, z: Point) -> Result<Point>;
}

/// A planar map together with its inverse.
pub trait InvertibleTransform: PlaneTransform {
    fn apply_inverse(&self, w: Point) -> Result<Point>;
}

impl<T: PlaneTransform + ?Sized> PlaneTransform for &T {
    fn apply(&self, z: Point) -> Result<Point> {
        (**self).apply(z)
    }
}

impl<T: PlaneTransform + ?Sized> PlaneTransform for Box<T> {
    fn apply(&self, z: Point) -> Result<Point> {
        (**self).apply(z)
    }
}

impl<T: InvertibleTransform + ?Sized> InvertibleTransform for &T {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        (**self).apply_inverse(w)
    }
}

impl<T: InvertibleTransform + ?Sized> InvertibleTransform for Box<T> {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        (**self).apply_inverse(w)
    }
}

/// Wraps a closure as a [`PlaneTransform`].
#[derive(Clone, Copy)]
pub struct FnTransform<F>(pub F);

impl<F: Fn(Point) -> Result<Point>> PlaneTransform for FnTransform<F> {
    fn apply(&self, z: Point) -> Result<Point> {
        (self.0)(z)
    }
}

/// The inverse of an invertible transform, viewed as a transform.
#[derive(Clone, Copy)]
pub struct Inverse<T>(pub T);

impl<T: InvertibleTransform> PlaneTransform for Inverse<T> {
    fn apply(&self, z: Point) -> Result<Point> {
        self.0.apply_inverse(z)
    }
}

impl<T: InvertibleTransform> InvertibleTransform for Inverse<T> {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        self.0.apply(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Identity;

impl PlaneTransform for Identity {
    fn apply(&self, z: Point) -> Result<Point> {
        Ok(z)
    }
}

impl InvertibleTransform for Identity {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        Ok(w)
    }
}

/// `z ↦ a·z + b` with complex `a ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub scale: Point,
    pub shift: Point,
}

impl Similarity {
    pub fn new(scale: Point, shift: Point) -> Self {
        Similarity { scale, shift }
    }

    /// Rotation by `angle` about `center`.
    pub fn rotation_about(center: Point, angle: f64) -> Self {
        let a = Point::polar(1.0, angle);
        Similarity {
            scale: a,
            shift: center - center.cmul(a),
        }
    }
}

impl PlaneTransform for Similarity {
    fn apply(&self, z: Point) -> Result<Point> {
        Ok(z.cmul(self.scale) + self.shift)
    }
}

impl InvertibleTransform for Similarity {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        let d = w - self.shift;
        let n = self.scale.norm_sq();
        let inv = Point::new(self.scale.x / n, -self.scale.y / n);
        Ok(d.cmul(inv))
    }
}

/// `max |f^k(z) − z|` over the probes.
pub fn periodicity_residual<T: PlaneTransform + ?Sized>(
    f: &T,
    k: usize,
    probes: impl IntoIterator<Item = Point>,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for z in probes {
        let mut w = z;
        for _ in 0..k {
            w = f.apply(w)?;
        }
        worst = worst.max(w.dist(z));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn rotation_similarity_roundtrip_and_period() {
        let r = Similarity::rotation_about(Point::new(0.5, 0.5), PI / 2.0);
        let z = Point::new(0.1, 0.3);
        let w = r.apply(z).unwrap();
        assert!((w - Point::new(0.7, 0.1)).norm() < 1e-15);
        assert!(r.apply_inverse(w).unwrap().dist(z) < 1e-15);
        let res = periodicity_residual(&r, 4, [z, Point::new(0.9, 0.2)]).unwrap();
        assert!(res < 1e-14);
        assert!(periodicity_residual(&r, 2, [z]).unwrap() > 0.1);
        assert!((Inverse(r).apply(w).unwrap().x - z.x).abs() < 1e-15);
    }
}

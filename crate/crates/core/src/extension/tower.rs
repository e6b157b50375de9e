//! Reflection tower: from a map of `A_r` preserving both boundary circles to a map of
//! the closed disk, and from there to the plane.
//!
//! With `ρ_m = r^{2^{m−1}}`, level `m` covers the ring `ρ_m² ≤ |z| ≤ ρ_m` by
//! `f_m = R_{ρ_m} f_{m−1} R_{ρ_m}`, where `R_ρ(z) = ρ²/z̄` is the reflection in `S_ρ`.
//! Evaluation recurses through the levels, so `f_m` and `f_{m−1}` share every value
//! on their common domain and the limit map is available at any depth.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::invalid;
use crate::maps::{InvertibleTransform, PlaneMap, PlaneTransform};
use crate::sampling::annulus_points;
use crate::{Error, Point, Result};

/// Accepted deviation of a boundary circle from its image circle.
pub const BOUNDARY_TOL: f64 = 1e-9;
const BOUNDARY_PROBES: usize = 256;
const DOMAIN_SLACK: f64 = 1e-12;

/// Reflection `R_r(z) = r²/z̄` through the circle `S_r`.
pub fn reflect(z: Point, r: f64) -> Result<Point> {
    let n = z.norm_sq();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::Pole);
    }
    Ok(z * (r * r / n))
}

/// Depth `M = ⌈log₂(log δ / log r)⌉` after which the rings are thinner than `δ`.
pub fn default_depth(r: f64, spacing: f64) -> usize {
    if !(r > 0.0 && r < 1.0 && spacing > 0.0 && spacing < 1.0) {
        return 1;
    }
    (spacing.ln() / r.ln()).log2().ceil().max(1.0) as usize
}

fn boundary_deviation<T: PlaneTransform + ?Sized>(f: &T, radius: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..BOUNDARY_PROBES {
        let t = core::f64::consts::TAU * crate::sampling::golden(i);
        let w = f.apply(Point::polar(radius, t))?;
        worst = worst.max((w.norm() - radius).abs());
    }
    Ok(worst)
}

/// Residual of the `k`-th iterate on one ring of the tower.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingResidual {
    /// Outer radius of the ring.
    pub rho: f64,
    pub residual: f64,
}

/// Per-ring periodicity residuals, outermost ring first.
#[derive(Debug, Clone, PartialEq)]
pub struct TowerManifest {
    pub rings: Vec<RingResidual>,
    /// Whether the residuals never grow towards the center.
    pub monotone: bool,
}

/// The tower built on `f0 : A_r → A_r`.
#[derive(Debug, Clone)]
pub struct ReflectionTower<T> {
    f0: T,
    r: f64,
    depth: usize,
}

/// Builds the tower of depth `depth` on `f0`. Errors with "boundary not preserved"
/// when `f0` moves `S¹` or `S_r` off itself.
pub fn reflection_tower_extend<T: PlaneTransform>(f0: T, r: f64, depth: usize) -> Result<ReflectionTower<T>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid("inner radius must lie in (0, 1)"));
    }
    let deviation = boundary_deviation(&f0, 1.0)?.max(boundary_deviation(&f0, r)? / r);
    if !(deviation <= BOUNDARY_TOL) {
        return Err(Error::BoundaryNotPreserved { deviation });
    }
    Ok(ReflectionTower { f0, r, depth })
}

impl<T> ReflectionTower<T> {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn base(&self) -> &T {
        &self.f0
    }

    /// `ρ_m = r^{2^{m−1}}`, the outer radius of ring `m ≥ 1`; `ρ_0 = 1`.
    pub fn ring_radius(&self, m: usize) -> f64 {
        if m == 0 {
            1.0
        } else {
            self.r.powi(1 << (m - 1).min(60))
        }
    }

    /// Inner radius `r^{2^m}` of the domain of `f_m`.
    pub fn level_inner_radius(&self, m: usize) -> f64 {
        self.ring_radius(m + 1)
    }

    /// Evaluates with the given base map, optionally refusing levels above `max_level`.
    fn eval(&self, base: &dyn Fn(Point) -> Result<Point>, z: Point, max_level: Option<usize>) -> Result<Point> {
        let rho = z.norm();
        if !(rho <= 1.0 + DOMAIN_SLACK) {
            return Err(Error::OutOfDomain);
        }
        if rho == 0.0 {
            return Ok(Point::ORIGIN);
        }
        if rho >= self.r {
            return base(z);
        }
        let mut outer = self.r;
        let mut level = 1;
        while rho < outer * outer {
            outer *= outer;
            level += 1;
            if outer == 0.0 {
                // Below the smallest representable ring the limit map is 0.
                return Ok(Point::ORIGIN);
            }
        }
        if max_level.is_some_and(|m| level > m) {
            return Err(Error::OutOfDomain);
        }
        let w = reflect(z, outer)?;
        let v = self.eval(base, w, max_level)?;
        reflect(v, outer)
    }
}

impl<T: PlaneTransform> ReflectionTower<T> {
    /// `f_m(z)` for `r^{2^m} ≤ |z| ≤ 1`.
    pub fn apply_level(&self, m: usize, z: Point) -> Result<Point> {
        if z.norm() < self.level_inner_radius(m) * (1.0 - DOMAIN_SLACK) {
            return Err(Error::OutOfDomain);
        }
        self.eval(&|w| self.f0.apply(w), z, Some(m))
    }

    /// Residual of `f_∞^k` on ring `m = 0, …, depth`, probed at `probes` points each.
    pub fn manifest(&self, k: usize, probes: usize) -> Result<TowerManifest> {
        let mut rings = Vec::with_capacity(self.depth + 1);
        for m in 0..=self.depth {
            let outer = self.ring_radius(m);
            let inner = self.ring_radius(m + 1);
            let mut worst = 0.0f64;
            for z in annulus_points(probes, inner, outer) {
                let mut w = z;
                for _ in 0..k {
                    w = self.apply(w)?;
                }
                worst = worst.max(w.dist(z));
            }
            rings.push(RingResidual {
                rho: outer,
                residual: worst,
            });
        }
        let monotone = rings.windows(2).all(|w| w[1].residual <= w[0].residual + 1e-15);
        Ok(TowerManifest { rings, monotone })
    }

    /// Samples `f_∞` on an `n × n` grid over `[-1, 1]²`, masked to the disk.
    pub fn sample(&self, n: usize) -> Result<PlaneMap> {
        let delta = 2.0 / (n.max(2) - 1) as f64;
        PlaneMap::sample(self, Point::new(-1.0, -1.0), delta, n, n, |z| z.norm() <= 1.0)
    }
}

impl<T: PlaneTransform> PlaneTransform for ReflectionTower<T> {
    fn apply(&self, z: Point) -> Result<Point> {
        self.eval(&|w| self.f0.apply(w), z, None)
    }
}

impl<T: InvertibleTransform> InvertibleTransform for ReflectionTower<T> {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        self.eval(&|v| self.f0.apply_inverse(v), w, None)
    }
}

/// A disk map extended to the plane by `R f R` outside the disk, `R(z) = 1/z̄`.
#[derive(Debug, Clone)]
pub struct PlaneExtension<T> {
    disk: T,
}

/// Errors with "boundary not preserved" unless `disk_map` keeps `S¹` on `S¹`.
pub fn extend_to_plane<T: PlaneTransform>(disk_map: T) -> Result<PlaneExtension<T>> {
    let deviation = boundary_deviation(&disk_map, 1.0)?;
    if !(deviation <= BOUNDARY_TOL) {
        return Err(Error::BoundaryNotPreserved { deviation });
    }
    Ok(PlaneExtension { disk: disk_map })
}

impl<T> PlaneExtension<T> {
    pub fn disk_map(&self) -> &T {
        &self.disk
    }

    fn eval(&self, f: impl Fn(Point) -> Result<Point>, z: Point) -> Result<Point> {
        if z.norm() <= 1.0 {
            return f(z);
        }
        reflect(f(reflect(z, 1.0)?)?, 1.0)
    }
}

impl<T: PlaneTransform> PlaneExtension<T> {
    /// Samples the window `[-2, 2]²` with `n` nodes per side.
    pub fn sample(&self, n: usize) -> Result<PlaneMap> {
        PlaneMap::sample_window(self, -2.0, 2.0, n)
    }
}

impl<T: PlaneTransform> PlaneTransform for PlaneExtension<T> {
    fn apply(&self, z: Point) -> Result<Point> {
        self.eval(|w| self.disk.apply(w), z)
    }
}

impl<T: InvertibleTransform> InvertibleTransform for PlaneExtension<T> {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        self.eval(|v| self.disk.apply_inverse(v), w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::annulus::periodic_annulus_extension;
    use crate::maps::{periodicity_residual, CircleMap, CircleOrientation, Identity, Similarity};
    use crate::sampling::box_points;
    use core::f64::consts::TAU;
    use rand::{Rng, SeedableRng};

    #[test]
    fn reflection_examples() {
        let r = 0.6;
        assert!(reflect(Point::new(r, 0.0), r).unwrap().dist(Point::new(r, 0.0)) < 1e-16);
        assert!(reflect(Point::new(1.0, 0.0), r).unwrap().dist(Point::new(r * r, 0.0)) < 1e-16);
        assert_eq!(reflect(Point::ORIGIN, r), Err(Error::Pole));
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let z = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let w = reflect(z, r).unwrap();
            assert!((w.norm() * z.norm() - r * r).abs() < 1e-14);
            assert!(crate::numeric::angle_diff(w.arg(), z.arg()).abs() < 1e-14);
            worst = worst.max(reflect(w, r).unwrap().dist(z) / z.norm().max(1.0));
        }
        assert!(worst <= 1e-12);
    }

    #[test]
    fn identity_and_rotation_towers() {
        let id = reflection_tower_extend(Identity, 0.5, 4).unwrap();
        for z in box_points(1000, -0.7, 0.7, -0.7, 0.7) {
            assert!(id.apply(z).unwrap().dist(z) < 1e-15);
        }
        assert_eq!(id.apply(Point::ORIGIN).unwrap(), Point::ORIGIN);
        let rot = Similarity::rotation_about(Point::ORIGIN, TAU / 6.0);
        let tower = reflection_tower_extend(rot, 0.5, 4).unwrap();
        let res = periodicity_residual(&tower, 6, box_points(1000, -0.7, 0.7, -0.7, 0.7)).unwrap();
        assert!(res <= 1e-12);
        let plane = extend_to_plane(tower).unwrap();
        let res = periodicity_residual(&plane, 6, box_points(1000, -2.0, 2.0, -2.0, 2.0)).unwrap();
        assert!(res <= 1e-12);
        let z = Point::new(1.5, -0.3);
        assert!(plane.apply(z).unwrap().dist(z.rotate(TAU / 6.0)) < 1e-14);
    }

    #[test]
    fn boundary_must_be_preserved() {
        let scale = Similarity::new(Point::new(1.1, 0.0), Point::ORIGIN);
        assert!(matches!(
            reflection_tower_extend(scale, 0.5, 3),
            Err(Error::BoundaryNotPreserved { .. })
        ));
        assert!(matches!(extend_to_plane(scale), Err(Error::BoundaryNotPreserved { .. })));
        assert_eq!(default_depth(0.5, 1.0 / 128.0), 3);
    }

    #[test]
    fn periodic_annulus_tower_is_periodic() {
        let conj = CircleMap::from_fn(256, |t| t + 0.25 * t.sin(), CircleOrientation::Preserve).unwrap();
        let f = CircleMap::rotation(TAU / 3.0, 256).conjugate_by(&conj);
        let ext = periodic_annulus_extension(&f, 0.5, 3).unwrap();
        let tower = reflection_tower_extend(&ext, 0.5, 4).unwrap();
        for z in crate::sampling::annulus_points(200, 0.0625, 1.0) {
            for m in 1..4 {
                if z.norm() >= tower.level_inner_radius(m - 1) {
                    assert_eq!(tower.apply_level(m, z), tower.apply_level(m - 1, z));
                }
            }
        }
        assert_eq!(tower.apply_level(0, Point::new(0.2, 0.0)), Err(Error::OutOfDomain));
        let manifest = tower.manifest(3, 300).unwrap();
        assert_eq!(manifest.rings.len(), 5);
        assert!(manifest.rings.iter().all(|r| r.residual <= 1e-5));
        let plane = extend_to_plane(&tower).unwrap();
        let res = periodicity_residual(&plane, 3, box_points(1000, -2.0, 2.0, -2.0, 2.0)).unwrap();
        assert!(res <= 1e-5);
    }
}

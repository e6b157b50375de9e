//! Beurling–Ahlfors extension of a circle homeomorphism to the closed unit disk.
//!
//! Writing `z = e^{i(θ + iy)}` turns the punctured disk into the upper half-plane
//! modulo `2π`, and the boundary map into its lift `φ`. With the averages
//! `α = (1/y)∫_θ^{θ+y} φ` and `β = (1/y)∫_{θ−y}^θ φ` the extension sends
//! `θ + iy` to `(α + β)/2 + i(α − β)`. Periodicity of `φ(t) − t` makes this descend
//! to the disk, with `0 ↦ 0`.
//!
//! Everything below works with `ψ(t) = φ(t) − t`, which is `2π`-periodic and
//! piecewise linear, so the averages are exact and free of the `θ ± y/2`
//! cancellation.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_traits::Float;

use crate::maps::{CircleMap, InvertibleTransform, PlaneMap, PlaneTransform};
use crate::numeric::{angle_diff, Sum};
use crate::{Error, Point, Result};

/// Windows covering at most this many pieces are integrated piece by piece.
const DIRECT_PIECES: usize = 48;
/// Points this close to the unit circle are treated as boundary points.
const BOUNDARY_EPS: f64 = 1e-15;
/// Points farther than this outside the unit circle are rejected.
const DOMAIN_SLACK: f64 = 1e-12;
const NEWTON_ITERS: usize = 80;
const NEWTON_ACCEPT: f64 = 1e-11;

/// The Beurling–Ahlfors extension of an orientation-preserving circle map, evaluated
/// exactly from the piecewise-linear lift.
#[derive(Debug, Clone)]
pub struct BaExtension {
    boundary: CircleMap,
    inverse_boundary: CircleMap,
    /// `t_0 < … < t_n = t_0 + 2π`.
    knots: Vec<f64>,
    /// `ψ(t_i)`, with `psi[n] = psi[0]`.
    psi: Vec<f64>,
    /// `∫_{t_0}^{t_i} ψ`.
    prefix: Vec<f64>,
}

/// Builds the extension of `boundary`; errors with "orientation" for
/// orientation-reversing maps.
pub fn ba_extend(boundary: &CircleMap) -> Result<BaExtension> {
    if !boundary.orientation_preserving() {
        return Err(Error::Orientation);
    }
    let mut knots: Vec<f64> = boundary.knots().to_vec();
    let mut psi: Vec<f64> = knots
        .iter()
        .zip(boundary.lift_values())
        .map(|(&t, &v)| v - t)
        .collect();
    knots.push(knots[0] + TAU);
    psi.push(psi[0]);
    let mut prefix = Vec::with_capacity(knots.len());
    let mut acc = Sum::default();
    prefix.push(0.0);
    for i in 1..knots.len() {
        acc.add(0.5 * (psi[i - 1] + psi[i]) * (knots[i] - knots[i - 1]));
        prefix.push(acc.value());
    }
    Ok(BaExtension {
        inverse_boundary: boundary.invert(),
        boundary: boundary.clone(),
        knots,
        psi,
        prefix,
    })
}

impl BaExtension {
    pub fn boundary(&self) -> &CircleMap {
        &self.boundary
    }

    fn pieces(&self) -> usize {
        self.knots.len() - 1
    }

    /// `(i, m, t)` with `t + 2πm` the input, `knots[i] ≤ t < knots[i+1]`.
    fn locate(&self, theta: f64) -> (usize, i64, f64) {
        let t0 = self.knots[0];
        let mut m = ((theta - t0) / TAU).floor();
        let mut t = theta - TAU * m;
        if t >= t0 + TAU {
            t -= TAU;
            m += 1.0;
        }
        if t < t0 {
            t += TAU;
            m -= 1.0;
        }
        let i = self.knots.partition_point(|&k| k <= t).saturating_sub(1);
        (i.min(self.pieces() - 1), m as i64, t)
    }

    fn psi_on_piece(&self, i: usize, t: f64) -> f64 {
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let u = (t - t0) / (t1 - t0);
        self.psi[i] + (self.psi[i + 1] - self.psi[i]) * u
    }

    fn psi_at(&self, theta: f64) -> f64 {
        let (i, _, t) = self.locate(theta);
        self.psi_on_piece(i, t)
    }

    /// `∫_{t_0}^{θ} ψ`.
    fn antiderivative(&self, theta: f64) -> f64 {
        let (i, m, t) = self.locate(theta);
        let n = self.pieces();
        let partial = 0.5 * (self.psi[i] + self.psi_on_piece(i, t)) * (t - self.knots[i]);
        m as f64 * self.prefix[n] + self.prefix[i] + partial
    }

    /// Mean of `ψ` over `[a, b]`, `a < b`. Short windows are averaged piece by
    /// piece with the computed piece lengths as weights, so rounding in the window
    /// endpoints does not leak into the mean.
    fn psi_mean(&self, a: f64, b: f64) -> f64 {
        let n = self.pieces() as i64;
        let (ia, ma, ta) = self.locate(a);
        let (ib, mb, _) = self.locate(b);
        let span = (ib as i64 + n * mb) - (ia as i64 + n * ma);
        if span > DIRECT_PIECES as i64 {
            return (self.antiderivative(b) - self.antiderivative(a)) / (b - a);
        }
        let mut acc = Sum::default();
        let mut len = Sum::default();
        let mut i = ia;
        let mut shift = TAU * ma as f64;
        let mut t = ta;
        let mut end_local = b - shift;
        loop {
            let end = self.knots[i + 1].min(end_local);
            let va = self.psi_on_piece(i, t);
            let vb = self.psi_on_piece(i, end);
            acc.add(0.5 * (va + vb) * (end - t));
            len.add(end - t);
            if end >= end_local {
                break;
            }
            t = self.knots[i + 1];
            i += 1;
            if i == self.pieces() {
                i = 0;
                shift += TAU;
                t = self.knots[0];
                end_local = b - shift;
            }
        }
        let l = len.value();
        if l > 0.0 {
            acc.value() / l
        } else {
            self.psi_on_piece(ia, ta)
        }
    }

    /// Half-plane coordinates `(u, v)` of the image of `θ + iy`, `y > 0`.
    fn forward(&self, theta: f64, y: f64) -> (f64, f64) {
        let mp = self.psi_mean(theta, theta + y);
        let mm = self.psi_mean(theta - y, theta);
        (theta + 0.5 * (mp + mm), y + (mp - mm))
    }

    /// [`Self::forward`] together with its Jacobian `[[u_θ, u_y], [v_θ, v_y]]`.
    fn forward_jacobian(&self, theta: f64, y: f64) -> ((f64, f64), [[f64; 2]; 2]) {
        let mp = self.psi_mean(theta, theta + y);
        let mm = self.psi_mean(theta - y, theta);
        let (pp, p0, pm) = (self.psi_at(theta + y), self.psi_at(theta), self.psi_at(theta - y));
        let u = theta + 0.5 * (mp + mm);
        let v = y + (mp - mm);
        let jac = [
            [
                1.0 + (pp - pm) / (2.0 * y),
                ((pp - mp) + (pm - mm)) / (2.0 * y),
            ],
            [
                (pp - 2.0 * p0 + pm) / y,
                1.0 + ((pp - mp) - (pm - mm)) / y,
            ],
        ];
        ((u, v), jac)
    }

    /// Samples the extension on an `n × n` grid over `[-1, 1]²`, masked to the disk.
    pub fn sample(&self, n: usize) -> Result<PlaneMap> {
        let delta = 2.0 / (n.max(2) - 1) as f64;
        PlaneMap::sample(self, Point::new(-1.0, -1.0), delta, n, n, |z| {
            z.norm() <= 1.0 + 1e-12
        })
    }
}

impl PlaneTransform for BaExtension {
    fn apply(&self, z: Point) -> Result<Point> {
        let rho = z.norm();
        if !(rho <= 1.0 + DOMAIN_SLACK) {
            return Err(Error::OutOfDomain);
        }
        if rho == 0.0 {
            return Ok(Point::ORIGIN);
        }
        let theta = z.arg();
        let y = -rho.ln();
        if y <= BOUNDARY_EPS {
            return Ok(Point::polar(1.0, self.boundary.lift_at(theta)));
        }
        let (u, v) = self.forward(theta, y);
        Ok(Point::polar((-v).exp(), u))
    }
}

impl InvertibleTransform for BaExtension {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        let rho = w.norm();
        if !(rho <= 1.0 + DOMAIN_SLACK) {
            return Err(Error::OutOfDomain);
        }
        if rho == 0.0 {
            return Ok(Point::ORIGIN);
        }
        let u_target = w.arg();
        let v_target = -rho.ln();
        let mut theta = self.inverse_boundary.lift_at(u_target);
        if v_target <= BOUNDARY_EPS {
            return Ok(Point::polar(1.0, theta));
        }
        let mut y = v_target;
        let scale = 1.0 + v_target;
        let mut resid = f64::INFINITY;
        for _ in 0..NEWTON_ITERS {
            let ((u, v), j) = self.forward_jacobian(theta, y);
            let ru = angle_diff(u, u_target);
            let rv = v - v_target;
            resid = ru.abs().max(rv.abs());
            if resid <= 2e-16 * scale {
                break;
            }
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if !(det.abs() > 0.0) || !det.is_finite() {
                break;
            }
            let dt = -(j[1][1] * ru - j[0][1] * rv) / det;
            let dy = -(-j[1][0] * ru + j[0][0] * rv) / det;
            let mut lambda = 1.0;
            while y + lambda * dy <= 0.0 {
                lambda *= 0.5;
            }
            theta += lambda * dt;
            y += lambda * dy;
            if (lambda * dt).abs().max((lambda * dy).abs()) <= 1e-16 * scale {
                let (u, v) = self.forward(theta, y);
                resid = angle_diff(u, u_target).abs().max((v - v_target).abs());
                break;
            }
        }
        if !(resid <= NEWTON_ACCEPT * scale) {
            return Err(Error::NoConvergence { residual: resid });
        }
        Ok(Point::polar((-y).exp(), theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{dilatation_estimate, CircleOrientation};
    use crate::sampling::annulus_points;

    fn wobble(n: usize) -> CircleMap {
        CircleMap::from_fn(n, |t| t + 0.3 * t.sin(), CircleOrientation::Preserve).unwrap()
    }

    #[test]
    fn identity_and_rotation_are_reproduced() {
        let id = ba_extend(&CircleMap::identity(64)).unwrap();
        let rot = ba_extend(&CircleMap::rotation(0.7, 64)).unwrap();
        for z in annulus_points(2000, 0.0, 1.0) {
            assert!(id.apply(z).unwrap().dist(z) <= 1e-9);
            assert!(rot.apply(z).unwrap().dist(z.rotate(0.7)) <= 1e-9);
        }
        assert_eq!(id.apply(Point::ORIGIN).unwrap(), Point::ORIGIN);
    }

    #[test]
    fn reversing_boundary_is_rejected() {
        assert_eq!(ba_extend(&CircleMap::reflection(16)).unwrap_err(), Error::Orientation);
    }

    #[test]
    fn boundary_values_and_inverse() {
        let f = wobble(512);
        let ext = ba_extend(&f).unwrap();
        for i in 0..200 {
            let t = TAU * crate::sampling::golden(i);
            let on = ext.apply(Point::polar(1.0, t)).unwrap();
            assert!(on.dist(Point::polar(1.0, f.lift_at(t))) < 1e-14);
            let near = ext.apply(Point::polar(1.0 - 1e-9, t)).unwrap();
            assert!(near.dist(on) < 1e-7, "{t} {:?} {:?}", near, on);
        }
        for z in annulus_points(3000, 0.0, 1.0) {
            let w = ext.apply(z).unwrap();
            assert!(w.norm() <= 1.0 + 1e-15);
            assert!(ext.apply_inverse(w).unwrap().dist(z) < 1e-10, "{z:?}");
        }
        assert_eq!(ext.apply(Point::new(1.5, 0.0)), Err(Error::OutOfDomain));
    }

    #[test]
    fn long_windows_match_direct_integration() {
        let f = wobble(300);
        let ext = ba_extend(&f).unwrap();
        for &(a, b) in &[(0.1, 3.0), (-2.0, 11.0), (5.0, 40.0)] {
            let fast = ext.psi_mean(a, b) * (b - a);
            let slow = f.lift_integral(a, b) - 0.5 * (b * b - a * a);
            assert!((fast - slow).abs() < 1e-9 * (1.0 + slow.abs()), "{fast} {slow}");
        }
    }

    /// Independent evaluation: Gauss–Legendre quadrature of the analytic lift.
    fn oracle(z: Point) -> Point {
        const NODES: [f64; 5] = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        const WEIGHTS: [f64; 5] = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let phi = |t: f64| t + 0.3 * t.sin();
        let mean = |a: f64, b: f64| {
            let panels = 64;
            let h = (b - a) / panels as f64;
            let mut s = 0.0;
            for p in 0..panels {
                let c = a + h * (p as f64 + 0.5);
                for (x, w) in NODES.iter().zip(WEIGHTS) {
                    s += w * phi(c + 0.5 * h * x) * 0.5 * h;
                }
            }
            s / (b - a)
        };
        let rho = z.norm();
        if rho == 0.0 {
            return z;
        }
        let (t, y) = (z.arg(), -rho.ln());
        let (al, be) = (mean(t, t + y), mean(t - y, t));
        Point::polar((-(al - be)).exp(), 0.5 * (al + be))
    }

    #[test]
    fn wobble_dilatation_regression_against_quadrature() {
        let ext = ba_extend(&wobble(4096)).unwrap();
        let keep = |z: Point| z.norm() <= 0.9;
        let fine = PlaneMap::sample(
            &crate::maps::FnTransform(|z| Ok(oracle(z))),
            Point::new(-1.0, -1.0),
            2.0 / 255.0,
            256,
            256,
            |z| z.norm() <= 1.0,
        )
        .unwrap();
        let coarse = ext.sample(128).unwrap();
        let k = dilatation_estimate(&coarse, 1, keep).unwrap().max;
        let k_oracle = dilatation_estimate(&fine, 2, keep).unwrap().max;
        assert!((k / k_oracle - 1.0).abs() < 0.02, "{k} vs {k_oracle}");
        // Regression baseline.
        assert!((k - WOBBLE_DILATATION).abs() < 1e-3 * WOBBLE_DILATATION, "{k}");
        for z in annulus_points(500, 0.0, 0.999) {
            assert!(ext.apply(z).unwrap().dist(oracle(z)) < 1e-6);
        }
    }

    const WOBBLE_DILATATION: f64 = 1.855_608_055_316_658_7;
}

//! Sampled circle homeomorphisms stored as piecewise-linear lifts.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_traits::Float;

use crate::error::invalid;
use crate::numeric::{angle_diff, wrap_angle};
use crate::{Error, Point, Result};

pub const MIN_CIRCLE_SAMPLES: usize = 8;

/// Direction in which a circle map moves points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircleOrientation {
    Preserve,
    Reverse,
}

impl CircleOrientation {
    fn sign(self) -> f64 {
        match self {
            CircleOrientation::Preserve => 1.0,
            CircleOrientation::Reverse => -1.0,
        }
    }

    fn compose(self, other: Self) -> Self {
        if self == other {
            CircleOrientation::Preserve
        } else {
            CircleOrientation::Reverse
        }
    }
}

/// Cyclic orientation of sampled images taken in increasing angle order.
///
/// Errors with "non-injective" on repeated images and with an invalid-parameter
/// error when the images are not cyclically monotone at all.
pub fn cyclic_orientation(angles: &[f64], images: &[f64]) -> Result<CircleOrientation> {
    if angles.len() != images.len() {
        return Err(invalid("angles and images differ in length"));
    }
    let n = images.len();
    if n < 3 {
        return Err(invalid("need at least 3 samples"));
    }
    let wrapped: Vec<f64> = images.iter().map(|&v| wrap_angle(v)).collect();
    let mut sorted = wrapped.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::NonInjective);
    }
    let forward: f64 = (0..n)
        .map(|i| wrap_angle(wrapped[(i + 1) % n] - wrapped[i]))
        .sum();
    let backward: f64 = (0..n)
        .map(|i| wrap_angle(wrapped[i] - wrapped[(i + 1) % n]))
        .sum();
    if (forward - TAU).abs() < 1e-9 {
        Ok(CircleOrientation::Preserve)
    } else if (backward - TAU).abs() < 1e-9 {
        Ok(CircleOrientation::Reverse)
    } else {
        Err(invalid("images are not cyclically monotone"))
    }
}

/// Circle homeomorphism interpolated linearly in angle between samples.
///
/// Internally the map is a lift `φ: ℝ → ℝ` with `φ(θ + 2π) = φ(θ) ± 2π`, given by
/// knots `θ_0 < … < θ_{n−1} < θ_0 + 2π` in `[0, 2π)` and lift values `φ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMap {
    knots: Vec<f64>,
    lift: Vec<f64>,
    orientation: CircleOrientation,
}

impl CircleMap {
    /// Builds a map from sample angles in `[0, 2π)` (strictly increasing) and image
    /// angles (any representative); the orientation is detected.
    pub fn from_samples(angles: &[f64], images: &[f64]) -> Result<Self> {
        if angles.len() < MIN_CIRCLE_SAMPLES {
            return Err(invalid("circle map needs at least 8 samples"));
        }
        if angles.iter().chain(images).any(|v| !v.is_finite()) {
            return Err(invalid("non-finite sample"));
        }
        if angles[0] < 0.0 || *angles.last().unwrap() >= TAU {
            return Err(invalid("sample angles must lie in [0, 2π)"));
        }
        if angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("sample angles must be strictly increasing"));
        }
        let orientation = cyclic_orientation(angles, images)?;
        let s = orientation.sign();
        let mut lift = Vec::with_capacity(images.len());
        lift.push(images[0]);
        for i in 1..images.len() {
            let step = wrap_angle(s * (images[i] - images[i - 1]));
            lift.push(lift[i - 1] + s * step);
        }
        Self::from_lift(angles.to_vec(), lift, orientation)
    }

    /// Builds a map from knots (any real representatives, one period's worth) and
    /// lift values. Knots are reduced to `[0, 2π)` and re-sorted.
    pub fn from_lift(knots: Vec<f64>, lift: Vec<f64>, orientation: CircleOrientation) -> Result<Self> {
        if knots.len() != lift.len() {
            return Err(invalid("knots and lift differ in length"));
        }
        if knots.len() < MIN_CIRCLE_SAMPLES {
            return Err(invalid("circle map needs at least 8 samples"));
        }
        let s = orientation.sign();
        let mut pairs: Vec<(f64, f64)> = knots
            .iter()
            .zip(&lift)
            .map(|(&t, &v)| {
                let m = (t / TAU).floor();
                let mut tt = t - TAU * m;
                let mut vv = v - s * TAU * m;
                if tt >= TAU {
                    tt -= TAU;
                    vv -= s * TAU;
                }
                (tt, vv)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let knots: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let lift: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let n = knots.len();
        for i in 0..n {
            let (t1, v1) = if i + 1 < n {
                (knots[i + 1], lift[i + 1])
            } else {
                (knots[0] + TAU, lift[0] + s * TAU)
            };
            if !(t1 > knots[i]) {
                return Err(invalid("duplicate knots"));
            }
            if !(s * (v1 - lift[i]) > 0.0) {
                return Err(Error::NonInjective);
            }
        }
        Ok(CircleMap {
            knots,
            lift,
            orientation,
        })
    }

    /// Samples a lift function at `n` equally spaced angles.
    pub fn from_fn(n: usize, lift: impl Fn(f64) -> f64, orientation: CircleOrientation) -> Result<Self> {
        let knots: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let values = knots.iter().map(|&t| lift(t)).collect();
        Self::from_lift(knots, values, orientation)
    }

    pub fn identity(n: usize) -> Self {
        Self::rotation(0.0, n)
    }

    pub fn rotation(angle: f64, n: usize) -> Self {
        Self::from_fn(n.max(MIN_CIRCLE_SAMPLES), |t| t + angle, CircleOrientation::Preserve)
            .expect("rotation is a valid circle map")
    }

    /// `θ ↦ −θ`.
    pub fn reflection(n: usize) -> Self {
        Self::from_fn(n.max(MIN_CIRCLE_SAMPLES), |t| -t, CircleOrientation::Reverse)
            .expect("reflection is a valid circle map")
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn lift_values(&self) -> &[f64] {
        &self.lift
    }

    /// Image angles of the knots reduced to `[0, 2π)`.
    pub fn images(&self) -> Vec<f64> {
        self.lift.iter().map(|&v| wrap_angle(v)).collect()
    }

    pub fn orientation(&self) -> CircleOrientation {
        self.orientation
    }

    /// Whether the map keeps the cyclic order of points.
    pub fn orientation_preserving(&self) -> bool {
        self.orientation == CircleOrientation::Preserve
    }

    /// Knot index `i` with `knots[i] ≤ t < knots[i+1]` (cyclically) and the period shift.
    fn locate(&self, theta: f64) -> (usize, f64, f64) {
        let t0 = self.knots[0];
        let m = ((theta - t0) / TAU).floor();
        let mut t = theta - TAU * m;
        let mut m = m;
        if t >= t0 + TAU {
            t -= TAU;
            m += 1.0;
        }
        if t < t0 {
            t += TAU;
            m -= 1.0;
        }
        let i = self.knots.partition_point(|&k| k <= t).saturating_sub(1);
        (i, t, m)
    }

    fn segment(&self, i: usize) -> (f64, f64, f64, f64) {
        let s = self.orientation.sign();
        let n = self.knots.len();
        let (t1, v1) = if i + 1 < n {
            (self.knots[i + 1], self.lift[i + 1])
        } else {
            (self.knots[0] + TAU, self.lift[0] + s * TAU)
        };
        (self.knots[i], self.lift[i], t1, v1)
    }

    /// Lift value `φ(θ)` for any real `θ`.
    pub fn lift_at(&self, theta: f64) -> f64 {
        let (i, t, m) = self.locate(theta);
        let (t0, v0, t1, v1) = self.segment(i);
        let u = (t - t0) / (t1 - t0);
        let v = if u == 0.0 { v0 } else { v0 + (v1 - v0) * u };
        v + self.orientation.sign() * TAU * m
    }

    /// Slope of the lift at `θ` (right derivative at knots).
    pub fn slope_at(&self, theta: f64) -> f64 {
        let (i, _, _) = self.locate(theta);
        let (t0, v0, t1, v1) = self.segment(i);
        (v1 - v0) / (t1 - t0)
    }

    /// Image angle in `[0, 2π)`.
    pub fn eval(&self, theta: f64) -> f64 {
        wrap_angle(self.lift_at(theta))
    }

    /// Image of a point of the unit circle (only its argument is used).
    pub fn eval_point(&self, z: Point) -> Point {
        Point::polar(1.0, self.lift_at(z.arg()))
    }

    /// Exact inverse of the piecewise-linear map.
    pub fn invert(&self) -> CircleMap {
        CircleMap::from_lift(self.lift.clone(), self.knots.clone(), self.orientation)
            .expect("inverse of a valid circle map is valid")
    }

    /// Exact piecewise-linear composition `self ∘ inner`; the knot set is the union of
    /// the knots of `inner` and the preimages under `inner` of the knots of `self`.
    pub fn compose(&self, inner: &CircleMap) -> CircleMap {
        let inv = inner.invert();
        let mut ts: Vec<f64> = inner.knots.clone();
        ts.extend(self.knots.iter().map(|&k| wrap_angle(inv.lift_at(k))));
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        if ts.len() > 1 && (ts[0] + TAU - ts[ts.len() - 1]).abs() < 1e-14 {
            ts.pop();
        }
        let lift: Vec<f64> = ts.iter().map(|&t| self.lift_at(inner.lift_at(t))).collect();
        CircleMap::from_lift(ts, lift, self.orientation.compose(inner.orientation))
            .expect("composition of circle homeomorphisms is valid")
    }

    /// `n`-fold self-composition; `n = 0` gives the identity on the same knots.
    pub fn iterate(&self, n: usize) -> CircleMap {
        if n == 0 {
            return CircleMap::from_lift(
                self.knots.clone(),
                self.knots.clone(),
                CircleOrientation::Preserve,
            )
            .expect("identity is valid");
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = self.compose(&out);
        }
        out
    }

    /// Conjugate `conj ∘ self ∘ conj⁻¹`.
    pub fn conjugate_by(&self, conj: &CircleMap) -> CircleMap {
        conj.compose(&self.compose(&conj.invert()))
    }

    /// Probe angles: the knots, segment midpoints and a golden-ratio sequence.
    pub fn probe_angles(&self) -> Vec<f64> {
        let mut v = self.knots.clone();
        for i in 0..self.len() {
            let (t0, _, t1, _) = self.segment(i);
            v.push(wrap_angle(0.5 * (t0 + t1)));
        }
        v.extend((0..64).map(|i| TAU * crate::sampling::golden(i)));
        v
    }

    /// Residual `max |f^k(θ) − θ|` (angular distance) over the probe angles.
    pub fn periodicity(&self, k: usize, tol: f64) -> Periodicity {
        let residual = self
            .probe_angles()
            .into_iter()
            .map(|t| {
                let mut v = t;
                for _ in 0..k {
                    v = self.lift_at(v);
                }
                angle_diff(v, t).abs()
            })
            .fold(0.0f64, f64::max);
        Periodicity {
            periodic: residual <= tol,
            residual,
        }
    }

    /// Sup-distance `max |f(θ) − g(θ)|` (angular) over the probe angles of both maps.
    pub fn distance(&self, other: &CircleMap) -> f64 {
        self.probe_angles()
            .into_iter()
            .chain(other.probe_angles())
            .map(|t| angle_diff(self.lift_at(t), other.lift_at(t)).abs())
            .fold(0.0, f64::max)
    }

    /// Angles `θ` (within one period) where `f(θ) ≡ θ` up to `tol`, one per solution
    /// interval of each linear piece.
    pub fn fixed_points(&self, tol: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            let (t0, v0, t1, v1) = self.segment(i);
            // g(t) = φ(t) − t − 2π m is linear on the piece.
            let g0 = v0 - t0;
            let g1 = v1 - t1;
            let lo = g0.min(g1);
            let hi = g0.max(g1);
            let m_lo = ((lo - tol) / TAU).ceil() as i64;
            let m_hi = ((hi + tol) / TAU).floor() as i64;
            for m in m_lo..=m_hi {
                let target = TAU * m as f64;
                let (a, b) = (g0 - target, g1 - target);
                let t = if a == b {
                    t0
                } else {
                    (t0 + (t1 - t0) * (a / (a - b))).clamp(t0, t1)
                };
                let u = (t - t0) / (t1 - t0);
                let resid = (a + (b - a) * u).abs();
                if resid <= tol {
                    out.push(wrap_angle(t));
                }
            }
            if g0.abs() > tol {
                // Near-misses at knots count when within tolerance.
                let d = angle_diff(v0, t0).abs();
                if d <= tol {
                    out.push(t0);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        out
    }

    /// Rotation number in `[0, 1)` for orientation-preserving maps.
    pub fn rotation_number(&self, iterations: usize) -> f64 {
        let t0 = self.knots[0];
        let mut v = t0;
        for _ in 0..iterations {
            v = self.lift_at(v);
        }
        let r = (v - t0) / (TAU * iterations as f64);
        r - r.floor()
    }

    /// Exact integral `∫_a^b φ(t) dt` of the lift.
    pub fn lift_integral(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        if b < a {
            return -self.lift_integral(b, a);
        }
        let mut acc = crate::numeric::Sum::default();
        let mut t = a;
        let (mut i, _, mut m) = self.locate(a);
        let s = self.orientation.sign();
        while t < b {
            let (t0, v0, t1, v1) = self.segment(i);
            let shift = TAU * m;
            let end = (t1 + shift).min(b);
            let slope = (v1 - v0) / (t1 - t0);
            let va = v0 + slope * (t - (t0 + shift)) + s * shift;
            let vb = v0 + slope * (end - (t0 + shift)) + s * shift;
            acc.add(0.5 * (va + vb) * (end - t));
            t = end;
            i += 1;
            if i == self.len() {
                i = 0;
                m += 1.0;
            }
        }
        acc.value()
    }
}

/// Result of a periodicity probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Periodicity {
    pub periodic: bool,
    pub residual: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn wobble() -> CircleMap {
        CircleMap::from_fn(256, |t| t + 0.3 * t.sin(), CircleOrientation::Preserve).unwrap()
    }

    #[test]
    fn identity_and_rotation_eval() {
        let id = CircleMap::identity(16);
        for &t in &[0.0, 0.1, 3.0, 6.2] {
            assert!((id.eval(t) - t).abs() < 1e-15);
        }
        let rot = CircleMap::rotation(2.0 * PI / 3.0, 16);
        assert!((rot.eval(0.0) - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!(angle_diff(rot.eval(5.0), 5.0 + 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn iterate_rotation_is_identity() {
        let rot = CircleMap::rotation(TAU / 5.0, 10);
        let f5 = rot.iterate(5);
        for t in rot.probe_angles() {
            assert!(angle_diff(f5.eval(t), t).abs() < 1e-9);
        }
    }

    #[test]
    fn periodicity_of_rotations() {
        let rot = CircleMap::rotation(TAU / 3.0, 12);
        let p3 = rot.periodicity(3, 1e-12);
        assert!(p3.periodic, "{}", p3.residual);
        assert!(!rot.periodicity(2, 1e-12).periodic);
    }

    #[test]
    fn conjugated_rotation_is_periodic() {
        let g = wobble();
        let f = CircleMap::rotation(TAU / 3.0, 8).conjugate_by(&g);
        let p = f.periodicity(3, 1e-9);
        assert!(p.periodic, "{}", p.residual);
        assert!(f.distance(&CircleMap::rotation(TAU / 3.0, 8)) > 0.05);
    }

    #[test]
    fn orientation_detection() {
        assert!(CircleMap::identity(8).orientation_preserving());
        assert!(!CircleMap::reflection(8).orientation_preserving());
        let w = wobble();
        assert!(w.orientation_preserving());
        let angles: Vec<f64> = (0..8).map(|i| TAU * i as f64 / 8.0).collect();
        let mut images = angles.clone();
        images[2] = images[1];
        assert_eq!(
            CircleMap::from_samples(&angles, &images),
            Err(Error::NonInjective)
        );
        let neg: Vec<f64> = angles.iter().map(|t| -t).collect();
        let m = CircleMap::from_samples(&angles, &neg).unwrap();
        assert_eq!(m.orientation(), CircleOrientation::Reverse);
    }

    #[test]
    fn invert_identity_exact_and_inverse_roundtrip() {
        let id = CircleMap::identity(12);
        assert_eq!(id.invert(), id);
        let w = wobble();
        let inv = w.invert();
        for t in w.probe_angles() {
            assert!(angle_diff(inv.eval(w.eval(t)), t).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_points_found() {
        let h = CircleMap::from_fn(
            128,
            |t| t + 0.1 * (t / 2.0).sin().powi(2),
            CircleOrientation::Preserve,
        )
        .unwrap();
        let fp = h.fixed_points(1e-12);
        assert!(fp.contains(&0.0), "{fp:?}");
        assert!(CircleMap::rotation(TAU / 3.0, 8).fixed_points(1e-9).is_empty());
    }

    #[test]
    fn lift_integral_exact() {
        let id = CircleMap::identity(8);
        assert!((id.lift_integral(0.0, 2.0) - 2.0).abs() < 1e-14);
        assert!((id.lift_integral(-1.0, 20.0) - (400.0 - 1.0) / 2.0).abs() < 1e-11);
        let w = wobble();
        // Trapezoid oracle on a fine grid; exact for a piecewise-linear integrand
        // when the grid contains all knots.
        let n = 256 * 8;
        let (a, b) = (0.0, TAU);
        let h = (b - a) / n as f64;
        let trap: f64 = (0..n)
            .map(|i| 0.5 * h * (w.lift_at(a + h * i as f64) + w.lift_at(a + h * (i + 1) as f64)))
            .sum();
        assert!((w.lift_integral(a, b) - trap).abs() < 1e-10);
    }

    proptest::proptest! {
        #[test]
        fn composition_of_preserving_maps_preserves(a in 0.0f64..0.9, b in 0.0f64..0.9,
                                                   p in 0.0f64..TAU, q in 1u32..4) {
            let f = CircleMap::from_fn(64, |t| t + a * (t + p).sin() / 1.0, CircleOrientation::Preserve).unwrap();
            let g = CircleMap::from_fn(48, |t| t + b * (q as f64 * t).cos() / q as f64, CircleOrientation::Preserve).unwrap();
            let fg = f.compose(&g);
            proptest::prop_assert!(fg.orientation_preserving());
            for t in g.probe_angles() {
                proptest::prop_assert!(angle_diff(fg.eval(t), f.eval(g.eval(t))).abs() < 1e-12);
            }
            let p1 = f.iterate(1).periodicity(3, 0.0).residual;
            let p0 = f.periodicity(3, 0.0).residual;
            proptest::prop_assert_eq!(p1, p0);
        }
    }
}

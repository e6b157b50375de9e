//! Periodic extension of a periodic circle map to the annulus `A_r = {r ≤ |z| ≤ 1}`.
//!
//! The orbit `u_0, u_1, …` of a point cuts `A_r` into polar cells `D_j` bounded by
//! the radial segments `l_j`, `l_{j+1}` and the arcs `α_j ⊂ S¹`, `rα_j ⊂ S_r`. Glue
//! maps `h_j : ∂D_j → ∂D_{j+1}` follow `f` on the outer arc and constant-speed
//! transfers elsewhere; each `h_j` with `j ≤ k − 2` is extended through a disk chart
//! by Beurling–Ahlfors, and the last cell map is the inverse of the composite so the
//! `k`-th iterate closes up.
//!
//! When the rotation number is `m/k` with `m ≠ 1`, consecutive orbit points are not
//! adjacent. The construction then runs for `g = f^s` with `sm ≡ 1 (mod k)`, whose
//! orbit advances by one cell, and the extension of `f = g^m` is `G^m`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_traits::Float;

use super::ba::{ba_extend, BaExtension};
use super::chart::{disk_to_square, square_to_disk, Side};
use crate::error::invalid;
use crate::geometry::ClosedCurve;
use crate::maps::{CircleMap, InvertibleTransform, PlaneMap, PlaneTransform};
use crate::numeric::{angle_diff, wrap_angle};
use crate::{Error, Point, Result};

/// Periodicity residual accepted for the boundary map.
pub const PERIOD_TOL: f64 = 1e-9;
/// Distance from a cell side within which a point counts as lying on it.
const SIDE_TOL: f64 = 1e-9;
/// Radial slack accepted outside `A_r`.
const DOMAIN_SLACK: f64 = 1e-12;
/// Extra uniformly spaced knots per side of a chart boundary map.
const SIDE_FILL: usize = 3;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Rotation numerator `m ∈ [0, k)` of a `k`-periodic orientation-preserving map.
fn rotation_numerator(f: &CircleMap, k: usize) -> usize {
    let t0 = f.knots()[0];
    let mut v = t0;
    for _ in 0..k {
        v = f.lift_at(v);
    }
    let m = ((v - t0) / TAU).round() as i64;
    m.rem_euclid(k as i64) as usize
}

fn check_periodic(f: &CircleMap, k: usize) -> Result<()> {
    if !f.orientation_preserving() {
        return Err(Error::Orientation);
    }
    let p = f.periodicity(k, PERIOD_TOL);
    if !p.periodic {
        return Err(Error::NotPeriodic { residual: p.residual });
    }
    Ok(())
}

/// Cells of `A_r` cut along the orbit of `u_0`.
#[derive(Debug, Clone)]
pub struct AnnulusDecomposition {
    r: f64,
    k: usize,
    /// Lifted orbit angles `U_0 < U_1 < … < U_k = U_0 + 2π`.
    angles: Vec<f64>,
    /// `g = f^s`, advancing each orbit point to the next cell.
    generator: CircleMap,
    /// Lift correction making `G(U_j) = U_{j+1}`.
    shift: f64,
    power: usize,
    rotation: usize,
}

/// Cuts `A_r` along the orbit of `u0` under the `k`-periodic map `f`.
///
/// Errors: "degenerate orbit" when the orbit of `u0` has fewer than `k` points.
pub fn decompose_annulus(f: &CircleMap, r: f64, u0: f64, k: usize) -> Result<AnnulusDecomposition> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid("inner radius must lie in (0, 1)"));
    }
    if k < 2 {
        return Err(invalid("annulus decomposition needs k ≥ 2"));
    }
    if !u0.is_finite() {
        return Err(invalid("u0 must be finite"));
    }
    check_periodic(f, k)?;
    let m = rotation_numerator(f, k);
    if gcd(m, k) != 1 {
        return Err(Error::DegenerateOrbit);
    }
    let s = (1..k).find(|s| (s * m) % k == 1).unwrap_or(1);
    let generator = f.iterate(s);
    let u0 = wrap_angle(u0);
    let first = generator.lift_at(u0);
    let step = wrap_angle(first - u0);
    let shift = (u0 + step) - first;
    let mut angles = Vec::with_capacity(k + 1);
    angles.push(u0);
    for j in 0..k {
        let next = generator.lift_at(angles[j]) + shift;
        angles.push(next);
    }
    let closing = angles[k] - (u0 + TAU);
    if closing.abs() > 1e-6 {
        return Err(Error::NotPeriodic { residual: closing.abs() });
    }
    angles[k] = u0 + TAU;
    if angles.windows(2).any(|w| !(w[1] - w[0] > 1e-9)) {
        return Err(Error::DegenerateOrbit);
    }
    Ok(AnnulusDecomposition {
        r,
        k,
        angles,
        generator,
        shift,
        power: s,
        rotation: m,
    })
}

/// Orbit start whose orbit is spread out most evenly: the candidate (knots of `f`
/// plus a uniform scan) maximizing the smallest gap between orbit points.
pub fn default_u0(f: &CircleMap, k: usize) -> f64 {
    let mut candidates: Vec<f64> = f.knots().to_vec();
    candidates.extend((0..64).map(|i| TAU * i as f64 / 64.0));
    let mut best = (f64::NEG_INFINITY, 0.0);
    let mut orbit = Vec::with_capacity(k);
    for &u in &candidates {
        orbit.clear();
        let mut v = u;
        for _ in 0..k {
            orbit.push(wrap_angle(v));
            v = f.lift_at(v);
        }
        orbit.sort_by(f64::total_cmp);
        let mut gap = orbit[0] + TAU - orbit[k - 1];
        for w in orbit.windows(2) {
            gap = gap.min(w[1] - w[0]);
        }
        if gap > best.0 + 1e-12 {
            best = (gap, u);
        }
    }
    best.1
}

impl AnnulusDecomposition {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Lifted angles `U_0, …, U_k` of the orbit points.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Lifted angle of `u_j` for any integer `j` (`U_{j+k} = U_j + 2π`).
    pub fn angle(&self, j: i64) -> f64 {
        let k = self.k as i64;
        let q = j.div_euclid(k);
        self.angles[j.rem_euclid(k) as usize] + TAU * q as f64
    }

    pub fn u(&self, j: i64) -> Point {
        Point::polar(1.0, self.angle(j))
    }

    /// Angular width of `D_j`.
    pub fn width(&self, j: i64) -> f64 {
        self.angle(j + 1) - self.angle(j)
    }

    /// The map `g = f^s` whose orbit steps from cell to cell.
    pub fn generator(&self) -> &CircleMap {
        &self.generator
    }

    /// `s` with `g = f^s`.
    pub fn generator_power(&self) -> usize {
        self.power
    }

    /// `m` with `f = g^m`.
    pub fn rotation_power(&self) -> usize {
        self.rotation
    }

    /// Lift of `g` normalized so that `U_j ↦ U_{j+1}`.
    pub fn generator_lift(&self, t: f64) -> f64 {
        self.generator.lift_at(t) + self.shift
    }

    /// Cell containing `z` (cells are half-open in angle).
    pub fn cell_of(&self, z: Point) -> Result<usize> {
        let rho = z.norm();
        if !(rho >= self.r - DOMAIN_SLACK && rho <= 1.0 + DOMAIN_SLACK) {
            return Err(Error::OutOfDomain);
        }
        let off = wrap_angle(z.arg() - self.angles[0]);
        let j = self.angles.partition_point(|&a| a - self.angles[0] <= off);
        Ok(j.saturating_sub(1).min(self.k - 1))
    }

    pub fn cell_area(&self, j: usize) -> f64 {
        0.5 * self.width(j as i64) * (1.0 - self.r * self.r)
    }

    /// Polygonal boundary of `D_j` with `per_arc` points on each arc.
    pub fn cell_polygon(&self, j: usize, per_arc: usize) -> Result<ClosedCurve> {
        let n = per_arc.max(2);
        let (a, b) = (self.angle(j as i64), self.angle(j as i64 + 1));
        let mut v = Vec::with_capacity(2 * n);
        for i in 0..n {
            v.push(Point::polar(1.0, a + (b - a) * i as f64 / (n - 1) as f64));
        }
        for i in 0..n {
            v.push(Point::polar(self.r, b - (b - a) * i as f64 / (n - 1) as f64));
        }
        ClosedCurve::new(v)
    }

    /// Square coordinates of `z` in the chart of `D_j`: `x` radial, `y` angular.
    pub fn to_square(&self, j: i64, z: Point) -> (f64, f64) {
        let a = self.angle(j);
        let w = self.width(j);
        let theta = a + 0.5 * w + angle_diff(z.arg(), a + 0.5 * w);
        let x = 2.0 * (z.norm() - self.r) / (1.0 - self.r) - 1.0;
        let y = 2.0 * (theta - a) / w - 1.0;
        (x, y)
    }

    pub fn from_square(&self, j: i64, x: f64, y: f64) -> Point {
        let rho = self.r + 0.5 * (x + 1.0) * (1.0 - self.r);
        let theta = self.angle(j) + 0.5 * (y + 1.0) * self.width(j);
        Point::polar(rho, theta)
    }

    pub fn to_disk(&self, j: i64, z: Point) -> Point {
        let (x, y) = self.to_square(j, z);
        square_to_disk(x, y)
    }

    pub fn from_disk(&self, j: i64, w: Point) -> Point {
        let (x, y) = disk_to_square(w);
        self.from_square(j, x, y)
    }
}

/// The glue maps `h_j : ∂D_j → ∂D_{j+1}` of a decomposition.
#[derive(Debug, Clone)]
pub struct GlueMaps {
    dec: AnnulusDecomposition,
}

/// Glue maps for the decomposition; `f` must be the map it was built from.
pub fn build_glue_maps(dec: &AnnulusDecomposition, f: &CircleMap) -> Result<GlueMaps> {
    let s = dec.generator_power();
    let u = dec.angle(0);
    let mut v = u;
    for _ in 0..s {
        v = f.lift_at(v);
    }
    if angle_diff(v, dec.generator_lift(u)).abs() > PERIOD_TOL {
        return Err(invalid("decomposition was built from a different map"));
    }
    Ok(GlueMaps { dec: dec.clone() })
}

impl GlueMaps {
    pub fn decomposition(&self) -> &AnnulusDecomposition {
        &self.dec
    }

    /// Constant-speed map `p_j : l_j → α_j`; returns the angle on `S¹`.
    pub fn p(&self, j: i64, rho: f64) -> f64 {
        let d = &self.dec;
        d.angle(j) + (1.0 - rho) / (1.0 - d.r) * d.width(j)
    }

    pub fn p_inv(&self, j: i64, theta: f64) -> f64 {
        let d = &self.dec;
        1.0 - (theta - d.angle(j)) / d.width(j) * (1.0 - d.r)
    }

    /// Constant-speed map `q_j : rα_j → α_{j+1}` in angles.
    pub fn q(&self, j: i64, theta: f64) -> f64 {
        let d = &self.dec;
        d.angle(j + 1) + (theta - d.angle(j)) / d.width(j) * d.width(j + 1)
    }

    pub fn q_inv(&self, j: i64, theta: f64) -> f64 {
        let d = &self.dec;
        d.angle(j) + (theta - d.angle(j + 1)) / d.width(j + 1) * d.width(j)
    }

    /// Parameter intervals of one side of `∂D_j`: the side parameter `s ∈ [-1, 1]`
    /// runs over lift angles `t_m → t_p`, and the image side parameter is affine in
    /// `G(t)` with `T_m ↦ -1`, `T_p ↦ 1`.
    fn side_spec(&self, j: i64, side: Side) -> [f64; 4] {
        let a = |i: i64| self.dec.angle(j + i);
        match side {
            Side::Right => [a(0), a(1), a(1), a(2)],
            Side::Bottom => [a(1), a(0), a(2), a(1)],
            Side::Top => [a(2), a(1), a(3), a(2)],
            Side::Left => [a(1), a(2), a(2), a(3)],
        }
    }

    /// `h_j` on one side of the chart square, in side parameters.
    pub fn side_map(&self, j: i64, side: Side, s: f64) -> f64 {
        if s <= -1.0 {
            return -1.0;
        }
        if s >= 1.0 {
            return 1.0;
        }
        let [tm, tp, big_m, big_p] = self.side_spec(j, side);
        let t = tm + 0.5 * (s + 1.0) * (tp - tm);
        let g = self.dec.generator_lift(t);
        (-1.0 + 2.0 * (g - big_m) / (big_p - big_m)).clamp(-1.0, 1.0)
    }

    /// `h_j(z)` for `z ∈ ∂D_j`; errors with "out of domain" off the cell boundary.
    pub fn h(&self, j: i64, z: Point) -> Result<Point> {
        let (x, y) = self.dec.to_square(j, z);
        let tol = SIDE_TOL / (1.0 - self.dec.r).min(self.dec.width(j));
        let inside = x.abs() <= 1.0 + tol && y.abs() <= 1.0 + tol;
        let (side, s) = if !inside {
            return Err(Error::OutOfDomain);
        } else if (x - 1.0).abs() <= tol {
            (Side::Right, y)
        } else if (y + 1.0).abs() <= tol {
            (Side::Bottom, x)
        } else if (y - 1.0).abs() <= tol {
            (Side::Top, x)
        } else if (x + 1.0).abs() <= tol {
            (Side::Left, y)
        } else {
            return Err(Error::OutOfDomain);
        };
        let s2 = self.side_map(j, side, s.clamp(-1.0, 1.0));
        let (x2, y2) = match side {
            Side::Right => (1.0, s2),
            Side::Top => (s2, 1.0),
            Side::Left => (-1.0, s2),
            Side::Bottom => (s2, -1.0),
        };
        Ok(self.dec.from_square(j + 1, x2, y2))
    }

    /// `n` points of `∂D_j` per side, counterclockwise from `u_j`.
    pub fn boundary_samples(&self, j: i64, n: usize) -> Vec<Point> {
        let n = n.max(1);
        let mut out = Vec::with_capacity(4 * n);
        for side in Side::ALL {
            for i in 0..n {
                let s = -1.0 + 2.0 * i as f64 / n as f64;
                // Counterclockwise traversal: Right and Bottom increase s, Top and Left decrease.
                let s = match side {
                    Side::Right | Side::Bottom => s,
                    Side::Top | Side::Left => -s,
                };
                let (x, y) = match side {
                    Side::Right => (1.0, s),
                    Side::Top => (s, 1.0),
                    Side::Left => (-1.0, s),
                    Side::Bottom => (s, -1.0),
                };
                out.push(self.dec.from_square(j, x, y));
            }
        }
        out
    }

    /// `max |h_{k−1} ⋯ h_0(z) − z|` over `n` samples per side of `∂D_0`.
    pub fn composite_residual(&self, n: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for z in self.boundary_samples(0, n) {
            let mut w = z;
            for j in 0..self.dec.k as i64 {
                w = self.h(j, w)?;
            }
            worst = worst.max(w.dist(z));
        }
        Ok(worst)
    }

    /// `h_j` conjugated by the cell charts to an exact piecewise-linear circle map.
    pub fn boundary_map(&self, j: i64) -> Result<CircleMap> {
        let gen = &self.dec.generator;
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        for side in Side::ALL {
            let [tm, tp, _, _] = self.side_spec(j, side);
            let (lo, hi) = (tm.min(tp), tm.max(tp));
            let mut params: Vec<f64> = vec![-1.0, 1.0];
            params.extend((1..=SIDE_FILL).map(|i| -1.0 + 2.0 * i as f64 / (SIDE_FILL + 1) as f64));
            for &knot in gen.knots() {
                let mut t = knot + TAU * ((lo - knot) / TAU).ceil();
                while t < hi {
                    if t > lo {
                        params.push(-1.0 + 2.0 * (t - tm) / (tp - tm));
                    }
                    t += TAU;
                }
            }
            for s in params {
                pairs.push((side.angle(s), side.angle(self.side_map(j, side, s))));
            }
        }
        for p in pairs.iter_mut() {
            if p.0 < 0.0 {
                p.0 += TAU;
                p.1 += TAU;
            }
            if p.0 >= TAU {
                p.0 -= TAU;
                p.1 -= TAU;
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-13);
        if pairs.len() > 1 && pairs[0].0 + TAU - pairs[pairs.len() - 1].0 < 1e-13 {
            pairs.pop();
        }
        let (knots, lift): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        CircleMap::from_lift(knots, lift, crate::maps::CircleOrientation::Preserve)
    }
}

/// A `k`-periodic homeomorphism of `A_r` extending a `k`-periodic circle map.
#[derive(Debug, Clone)]
pub struct PeriodicAnnulusExtension {
    r: f64,
    k: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    /// `ρe^{iθ} ↦ ρe^{iφ(θ)}`, used when the map is the identity.
    Radial { f: CircleMap, inv: CircleMap },
    Glued {
        glue: GlueMaps,
        /// Extensions of the chart boundary maps of `h_0, …, h_{k−2}`.
        cells: Vec<BaExtension>,
        power: usize,
    },
}

/// Extends the `k`-periodic map `f` to a `k`-periodic homeomorphism of `A_r`.
pub fn periodic_annulus_extension(f: &CircleMap, r: f64, k: usize) -> Result<PeriodicAnnulusExtension> {
    periodic_annulus_extension_from(f, r, k, None)
}

/// As [`periodic_annulus_extension`] with an explicit orbit start.
pub fn periodic_annulus_extension_from(
    f: &CircleMap,
    r: f64,
    k: usize,
    u0: Option<f64>,
) -> Result<PeriodicAnnulusExtension> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid("inner radius must lie in (0, 1)"));
    }
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    check_periodic(f, k)?;
    let m = rotation_numerator(f, k);
    let d = gcd(m, k);
    let k_eff = k / d;
    if k_eff == 1 {
        return Ok(PeriodicAnnulusExtension {
            r,
            k,
            kind: Kind::Radial {
                f: f.clone(),
                inv: f.invert(),
            },
        });
    }
    let u0 = u0.unwrap_or_else(|| default_u0(f, k_eff));
    let dec = decompose_annulus(f, r, u0, k_eff)?;
    let power = dec.rotation_power();
    let glue = build_glue_maps(&dec, f)?;
    let cells = (0..k_eff as i64 - 1)
        .map(|j| ba_extend(&glue.boundary_map(j)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(PeriodicAnnulusExtension {
        r,
        k,
        kind: Kind::Glued { glue, cells, power },
    })
}

impl PeriodicAnnulusExtension {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The decomposition and glue maps, unless the map is the identity.
    pub fn glue_maps(&self) -> Option<&GlueMaps> {
        match &self.kind {
            Kind::Radial { .. } => None,
            Kind::Glued { glue, .. } => Some(glue),
        }
    }

    fn check(&self, z: Point) -> Result<()> {
        let rho = z.norm();
        if rho >= self.r - DOMAIN_SLACK && rho <= 1.0 + DOMAIN_SLACK {
            Ok(())
        } else {
            Err(Error::OutOfDomain)
        }
    }

    /// `H_j` on `D_j` for `j ≤ k − 2`.
    fn cell_forward(glue: &GlueMaps, cells: &[BaExtension], j: usize, z: Point) -> Result<Point> {
        let d = &glue.dec;
        let w = cells[j].apply(d.to_disk(j as i64, z))?;
        Ok(d.from_disk(j as i64 + 1, w))
    }

    /// `H_j⁻¹` on `D_{j+1}` for `j ≤ k − 2`.
    fn cell_backward(glue: &GlueMaps, cells: &[BaExtension], j: usize, w: Point) -> Result<Point> {
        let d = &glue.dec;
        let z = cells[j].apply_inverse(d.to_disk(j as i64 + 1, w))?;
        Ok(d.from_disk(j as i64, z))
    }

    fn generator_step(glue: &GlueMaps, cells: &[BaExtension], z: Point) -> Result<Point> {
        let k = glue.dec.k;
        let j = glue.dec.cell_of(z)?;
        if j + 1 < k {
            return Self::cell_forward(glue, cells, j, z);
        }
        let mut w = z;
        for i in (0..k - 1).rev() {
            w = Self::cell_backward(glue, cells, i, w)?;
        }
        Ok(w)
    }

    fn generator_step_inverse(glue: &GlueMaps, cells: &[BaExtension], w: Point) -> Result<Point> {
        let k = glue.dec.k;
        let j = glue.dec.cell_of(w)?;
        if j >= 1 {
            return Self::cell_backward(glue, cells, j - 1, w);
        }
        let mut z = w;
        for i in 0..k - 1 {
            z = Self::cell_forward(glue, cells, i, z)?;
        }
        Ok(z)
    }

    /// Largest node dilatation in each cell, on an `n × n` grid over `[-1, 1]²`,
    /// skipping nodes within two grid spacings of a cut or a boundary circle.
    pub fn cell_dilatations(&self, n: usize) -> Result<Vec<f64>> {
        let delta = 2.0 / (n.max(3) - 1) as f64;
        let margin = 2.0 * delta;
        let r = self.r;
        let map = PlaneMap::sample(self, Point::new(-1.0, -1.0), delta, n, n, |z| {
            let rho = z.norm();
            rho >= r && rho <= 1.0
        })?;
        let cuts: Vec<f64> = match &self.kind {
            Kind::Radial { .. } => Vec::new(),
            Kind::Glued { glue, .. } => glue.dec.angles[..glue.dec.k].to_vec(),
        };
        let cells = cuts.len().max(1);
        let mut out = vec![0.0f64; cells];
        for j in 0..n {
            for i in 0..n {
                let z = map.node(i, j);
                let rho = z.norm();
                if rho < r + margin || rho > 1.0 - margin {
                    continue;
                }
                if cuts
                    .iter()
                    .any(|&a| angle_diff(z.arg(), a).abs() * rho < margin)
                {
                    continue;
                }
                let Some(kd) = map.dilatation_at(i, j, 1)? else {
                    continue;
                };
                let c = match &self.kind {
                    Kind::Radial { .. } => 0,
                    Kind::Glued { glue, .. } => glue.dec.cell_of(z)?,
                };
                out[c] = out[c].max(kd);
            }
        }
        Ok(out)
    }
}

impl PlaneTransform for PeriodicAnnulusExtension {
    fn apply(&self, z: Point) -> Result<Point> {
        self.check(z)?;
        match &self.kind {
            Kind::Radial { f, .. } => f.apply(z),
            Kind::Glued { glue, cells, power } => {
                let mut w = z;
                for _ in 0..*power {
                    w = Self::generator_step(glue, cells, w)?;
                }
                Ok(w)
            }
        }
    }
}

impl InvertibleTransform for PeriodicAnnulusExtension {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        self.check(w)?;
        match &self.kind {
            Kind::Radial { inv, .. } => inv.apply(w),
            Kind::Glued { glue, cells, power } => {
                let mut z = w;
                for _ in 0..*power {
                    z = Self::generator_step_inverse(glue, cells, z)?;
                }
                Ok(z)
            }
        }
    }
}

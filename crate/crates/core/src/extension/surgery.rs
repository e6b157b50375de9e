//! Making a homeomorphic extension of a periodic carpet map periodic, orbit by orbit.
//!
//! Holes are permuted by the map. Along each orbit `D, f̃(D), …, f̃^{m−1}(D)` the
//! extension keeps `f̃` on all but the last hole and uses `g ∘ f̃^{−(m−1)}` there,
//! where `g` is a `k/m`-periodic extension of `f^m|_{∂D}` into `D`. The `m`-th
//! iterate on `D` is then `g`, so the whole map is `k`-periodic.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use super::annulus::{periodic_annulus_extension, PeriodicAnnulusExtension, PERIOD_TOL};
use super::ba::{ba_extend, BaExtension};
use super::chart::RectChart;
use super::tower::{reflection_tower_extend, ReflectionTower};
use crate::carpet::Carpet;
use crate::error::invalid;
use crate::maps::{CircleMap, InvertibleTransform, PlaneTransform};
use crate::numeric::{angle_diff, wrap_angle};
use crate::{Error, Point, Result};

/// Inner radius of the annulus used for the per-hole periodic extensions.
pub const HOLE_ANNULUS_RADIUS: f64 = 0.5;
/// Knots per fundamental arc of a periodized hole boundary map.
pub const HOLE_BOUNDARY_KNOTS: usize = 256;
const MATCH_SAMPLES_PER_SIDE: usize = 32;
const TOWER_DEPTH: usize = 8;

/// One orbit of holes, `holes[n]` being the `n`-th image of `holes[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleOrbit {
    pub holes: Vec<usize>,
}

impl HoleOrbit {
    pub fn representative(&self) -> usize {
        self.holes[0]
    }

    pub fn period(&self) -> usize {
        self.holes.len()
    }

    /// All holes of the orbit (the set `U`).
    pub fn u_set(&self) -> &[usize] {
        &self.holes
    }

    /// All but the last hole (the set `V`).
    pub fn v_set(&self) -> &[usize] {
        &self.holes[..self.holes.len() - 1]
    }

    /// All but the first hole (the set `W = f̃(V)`).
    pub fn w_set(&self) -> &[usize] {
        &self.holes[1..]
    }
}

/// Orbits of the holes of a carpet under a periodic map.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitDecomposition {
    k: usize,
    permutation: Vec<usize>,
    orbits: Vec<HoleOrbit>,
    /// `(orbit, position)` of every hole.
    position: Vec<(usize, usize)>,
}

impl OrbitDecomposition {
    /// Cycle decomposition of a hole permutation; every cycle length must divide `k`.
    pub fn from_permutation(permutation: Vec<usize>, k: usize) -> Result<Self> {
        let n = permutation.len();
        let mut seen = vec![false; n];
        for &p in &permutation {
            if p >= n || seen[p] {
                return Err(Error::OrbitMatchingFailed);
            }
            seen[p] = true;
        }
        if k == 0 {
            return Err(invalid("k must be positive"));
        }
        let mut position = vec![(usize::MAX, 0); n];
        let mut orbits = Vec::new();
        for start in 0..n {
            if position[start].0 != usize::MAX {
                continue;
            }
            let mut holes = vec![start];
            let mut i = permutation[start];
            while i != start {
                holes.push(i);
                i = permutation[i];
            }
            if !k.is_multiple_of(holes.len()) {
                return Err(invalid(format!(
                    "hole {start} has period {} which does not divide k = {k}",
                    holes.len()
                )));
            }
            for (pos, &h) in holes.iter().enumerate() {
                position[h] = (orbits.len(), pos);
            }
            orbits.push(HoleOrbit { holes });
        }
        Ok(OrbitDecomposition {
            k,
            permutation,
            orbits,
            position,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn orbits(&self) -> &[HoleOrbit] {
        &self.orbits
    }

    /// `(orbit index, position in orbit)` of a hole.
    pub fn orbit_of(&self, hole: usize) -> (usize, usize) {
        self.position[hole]
    }

    /// Orbit periods `m_j`, one per orbit.
    pub fn periods(&self) -> Vec<usize> {
        self.orbits.iter().map(HoleOrbit::period).collect()
    }
}

/// Image hole of every hole (by peripheral index), matched by the image of the hole
/// center and checked by the one-sided Hausdorff distance of the mapped boundary,
/// which must stay below half the smallest gap.
pub fn match_holes<T: PlaneTransform + ?Sized>(carpet: &Carpet, f: &T) -> Result<Vec<usize>> {
    if carpet.region().is_log_cylinder() {
        return Err(invalid("hole surgery needs a planar carpet"));
    }
    let rects = carpet.peripheral_rects();
    let threshold = 0.5 * carpet.min_gap();
    let mut perm = Vec::with_capacity(rects.len());
    for rect in &rects {
        let image = f.apply(rect.center())?;
        let j = carpet.locate(image).ok_or(Error::OrbitMatchingFailed)?;
        let target = rects[j];
        for p in rect.boundary_points(MATCH_SAMPLES_PER_SIDE) {
            let d = target.boundary_distance(f.apply(p)?).abs();
            if !(d <= threshold) {
                return Err(Error::OrbitMatchingFailed);
            }
        }
        perm.push(j);
    }
    Ok(perm)
}

/// Orbits of the holes of `carpet` under the `k`-periodic map `f`.
pub fn hole_orbits<T: PlaneTransform + ?Sized>(carpet: &Carpet, f: &T, k: usize) -> Result<OrbitDecomposition> {
    OrbitDecomposition::from_permutation(match_holes(carpet, f)?, k)
}

/// Exactly `q`-periodic piecewise-linear circle map interpolating `psi` (given on
/// angles), where `q` is the least period of `psi`. Knots fill one fundamental arc
/// and are carried around by `psi`; `None` when `psi` is the identity.
pub fn periodize(psi: &dyn Fn(f64) -> Result<f64>, p: usize, knots: usize) -> Result<Option<CircleMap>> {
    let mut orbit = vec![0.0f64];
    let mut q = 0;
    for step in 1..=p {
        let next = wrap_angle(psi(orbit[step - 1])?);
        if angle_diff(next, 0.0).abs() <= PERIOD_TOL * 1e3 {
            q = step;
            break;
        }
        orbit.push(next);
    }
    if q == 0 || !p.is_multiple_of(q) {
        return Err(Error::NotPeriodic {
            residual: angle_diff(orbit[orbit.len() - 1], 0.0).abs(),
        });
    }
    if q == 1 {
        return Ok(None);
    }
    let arc = orbit[1..q]
        .iter()
        .cloned()
        .fold(TAU, f64::min);
    if !(arc > 1e-9) {
        return Err(Error::DegenerateOrbit);
    }
    let n = knots.max(2);
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n * q);
    for i in 0..n {
        let t = arc * i as f64 / n as f64;
        let mut cur = t;
        for step in 0..q {
            let next = if step + 1 == q { t } else { wrap_angle(psi(cur)?) };
            pairs.push((cur, next));
            cur = next;
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-14);
    if pairs.len() > 1 && pairs[0].0 + TAU - pairs[pairs.len() - 1].0 < 1e-14 {
        pairs.pop();
    }
    let (angles, images): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    CircleMap::from_samples(&angles, &images).map(Some)
}

/// Periodic extension of a hole's return map into the hole.
#[derive(Debug, Clone)]
pub struct HoleMap {
    chart: RectChart,
    boundary: CircleMap,
    disk: ReflectionTower<PeriodicAnnulusExtension>,
}

impl HoleMap {
    /// The periodized boundary map in chart angles.
    pub fn boundary(&self) -> &CircleMap {
        &self.boundary
    }
}

impl PlaneTransform for HoleMap {
    fn apply(&self, z: Point) -> Result<Point> {
        Ok(self.chart.from_disk(self.disk.apply(self.chart.to_disk(z))?))
    }
}

impl InvertibleTransform for HoleMap {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        Ok(self.chart.from_disk(self.disk.apply_inverse(self.chart.to_disk(w))?))
    }
}

/// The periodic extension of a carpet map produced by the hole surgery.
#[derive(Debug, Clone)]
pub struct CarpetExtension<T> {
    carpet: Carpet,
    f: T,
    orbits: OrbitDecomposition,
    /// `g_j` per orbit; `None` when `f^{m_j}` is the identity on the hole boundary.
    hole_maps: Vec<Option<HoleMap>>,
}

/// Builds the `k`-periodic extension from a homeomorphic extension `f_tilde` of a
/// `k`-periodic carpet map. Errors with "invalid initial extension" when `f_tilde`
/// fails to invert consistently at the hole centers.
pub fn carpet_periodic_extension<T: InvertibleTransform>(
    carpet: &Carpet,
    f_tilde: T,
    k: usize,
) -> Result<CarpetExtension<T>> {
    let rects = carpet.peripheral_rects();
    let tol = 1e-6 * carpet.diameter();
    for r in &rects {
        let c = r.center();
        let back = f_tilde
            .apply_inverse(f_tilde.apply(c)?)
            .map_err(|_| Error::InvalidInitialExtension)?;
        if !(back.dist(c) <= tol) {
            return Err(Error::InvalidInitialExtension);
        }
    }
    let orbits = hole_orbits(carpet, &f_tilde, k)?;
    let mut hole_maps = Vec::with_capacity(orbits.orbits().len());
    for orbit in orbits.orbits() {
        let m = orbit.period();
        let chart = RectChart::new(rects[orbit.representative()]);
        let psi = |a: f64| -> Result<f64> {
            let mut z = chart.boundary_point(a);
            for _ in 0..m {
                z = f_tilde.apply(z)?;
            }
            Ok(chart.boundary_angle(z))
        };
        let q = k / m;
        let map = match periodize(&psi, q, HOLE_BOUNDARY_KNOTS)? {
            None => None,
            Some(boundary) => {
                let ext = periodic_annulus_extension(&boundary, HOLE_ANNULUS_RADIUS, q)?;
                let disk = reflection_tower_extend(ext, HOLE_ANNULUS_RADIUS, TOWER_DEPTH)?;
                Some(HoleMap {
                    chart,
                    boundary,
                    disk,
                })
            }
        };
        hole_maps.push(map);
    }
    Ok(CarpetExtension {
        carpet: carpet.clone(),
        f: f_tilde,
        orbits,
        hole_maps,
    })
}

impl<T> CarpetExtension<T> {
    pub fn orbits(&self) -> &OrbitDecomposition {
        &self.orbits
    }

    pub fn carpet(&self) -> &Carpet {
        &self.carpet
    }

    pub fn initial_extension(&self) -> &T {
        &self.f
    }

    /// `g_j` of orbit `j`, `None` meaning the identity.
    pub fn hole_map(&self, orbit: usize) -> Option<&HoleMap> {
        self.hole_maps[orbit].as_ref()
    }
}

impl<T: InvertibleTransform> PlaneTransform for CarpetExtension<T> {
    fn apply(&self, z: Point) -> Result<Point> {
        let Some(hole) = self.carpet.locate(z) else {
            return self.f.apply(z);
        };
        let (o, pos) = self.orbits.orbit_of(hole);
        let m = self.orbits.orbits[o].period();
        if pos + 1 < m {
            return self.f.apply(z);
        }
        let mut w = z;
        for _ in 1..m {
            w = self.f.apply_inverse(w)?;
        }
        match &self.hole_maps[o] {
            Some(g) => g.apply(w),
            None => Ok(w),
        }
    }
}

impl<T: InvertibleTransform> InvertibleTransform for CarpetExtension<T> {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        let Some(hole) = self.carpet.locate(w) else {
            return self.f.apply_inverse(w);
        };
        let (o, pos) = self.orbits.orbit_of(hole);
        if pos >= 1 {
            return self.f.apply_inverse(w);
        }
        let m = self.orbits.orbits[o].period();
        let mut z = match &self.hole_maps[o] {
            Some(g) => g.apply_inverse(w)?,
            None => w,
        };
        for _ in 1..m {
            z = self.f.apply(z)?;
        }
        Ok(z)
    }
}

/// Initial extension of a carpet map: `f` on the carpet and, in each hole, the
/// Beurling–Ahlfors extension of the sampled boundary map between hole charts.
#[derive(Debug, Clone)]
pub struct HoleBaExtension<T> {
    carpet: Carpet,
    f: T,
    permutation: Vec<usize>,
    inverse_permutation: Vec<usize>,
    maps: Vec<BaExtension>,
}

/// Builds [`HoleBaExtension`] with `samples` boundary samples per hole.
pub fn hole_ba_extension<T: InvertibleTransform>(carpet: &Carpet, f: T, samples: usize) -> Result<HoleBaExtension<T>> {
    let permutation = match_holes(carpet, &f)?;
    let rects = carpet.peripheral_rects();
    let mut inverse_permutation = vec![0; permutation.len()];
    for (i, &j) in permutation.iter().enumerate() {
        inverse_permutation[j] = i;
    }
    let n = samples.max(crate::maps::MIN_CIRCLE_SAMPLES);
    let mut maps = Vec::with_capacity(rects.len());
    for (i, &j) in permutation.iter().enumerate() {
        let (src, dst) = (RectChart::new(rects[i]), RectChart::new(rects[j]));
        let angles: Vec<f64> = (0..n).map(|s| TAU * s as f64 / n as f64).collect();
        let images = angles
            .iter()
            .map(|&a| Ok(dst.boundary_angle(f.apply(src.boundary_point(a))?)))
            .collect::<Result<Vec<f64>>>()?;
        let boundary = CircleMap::from_samples(&angles, &images)?;
        maps.push(ba_extend(&boundary).map_err(|_| Error::InvalidInitialExtension)?);
    }
    Ok(HoleBaExtension {
        carpet: carpet.clone(),
        f,
        permutation,
        inverse_permutation,
        maps,
    })
}

impl<T> HoleBaExtension<T> {
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }
}

impl<T: PlaneTransform> PlaneTransform for HoleBaExtension<T> {
    fn apply(&self, z: Point) -> Result<Point> {
        let Some(i) = self.carpet.locate(z) else {
            return self.f.apply(z);
        };
        let src = RectChart::new(self.carpet.peripheral_rect(i));
        let dst = RectChart::new(self.carpet.peripheral_rect(self.permutation[i]));
        Ok(dst.from_disk(self.maps[i].apply(src.to_disk(z))?))
    }
}

impl<T: InvertibleTransform> InvertibleTransform for HoleBaExtension<T> {
    fn apply_inverse(&self, w: Point) -> Result<Point> {
        let Some(j) = self.carpet.locate(w) else {
            return self.f.apply_inverse(w);
        };
        let i = self.inverse_permutation[j];
        let src = RectChart::new(self.carpet.peripheral_rect(i));
        let dst = RectChart::new(self.carpet.peripheral_rect(j));
        Ok(src.from_disk(self.maps[i].apply_inverse(dst.to_disk(w))?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::{four_fold_carpet, sierpinski};
    use crate::extension::twist::{Conjugate, HoleTwist, Twist};
    use crate::maps::{periodicity_residual, Identity, Similarity};
    use crate::sampling::box_points;
    use core::f64::consts::FRAC_PI_2;

    fn quarter_turn() -> Similarity {
        Similarity::rotation_about(Point::new(0.5, 0.5), FRAC_PI_2)
    }

    fn twisted(carpet: &Carpet) -> Conjugate<Similarity, HoleTwist> {
        let twists = carpet
            .peripheral_rects()
            .into_iter()
            .enumerate()
            .map(|(i, rect)| Twist {
                rect,
                eps: 0.1 + 0.05 * i as f64,
                phase: 0.7 * i as f64,
            })
            .collect();
        Conjugate {
            inner: quarter_turn(),
            conj: HoleTwist::new(twists, 0.2).unwrap(),
        }
    }

    #[test]
    fn identity_orbits_are_singletons() {
        let c = sierpinski(2).unwrap();
        let dec = hole_orbits(&c, &Identity, 3).unwrap();
        assert_eq!(dec.orbits().len(), 9);
        assert!(dec.periods().iter().all(|&m| m == 1));
        let ext = carpet_periodic_extension(&c, Identity, 3).unwrap();
        for z in box_points(500, 0.0, 1.0, 0.0, 1.0) {
            assert!(ext.apply(z).unwrap().dist(z) < 1e-15);
        }
    }

    #[test]
    fn quarter_turn_orbits_match_the_permutation_oracle() {
        let c = sierpinski(2).unwrap();
        let rects = c.peripheral_rects();
        let oracle: Vec<usize> = rects
            .iter()
            .map(|r| {
                let img = r.center().rotate_about(Point::new(0.5, 0.5), FRAC_PI_2);
                (0..rects.len())
                    .min_by(|&a, &b| rects[a].center().dist(img).total_cmp(&rects[b].center().dist(img)))
                    .unwrap()
            })
            .collect();
        let dec = hole_orbits(&c, &quarter_turn(), 4).unwrap();
        assert_eq!(dec.permutation(), &oracle[..]);
        let mut periods = dec.periods();
        periods.sort();
        assert_eq!(periods, vec![1, 4, 4]);
        for o in dec.orbits() {
            assert_eq!(o.v_set().len() + 1, o.period());
            assert_eq!(o.w_set(), &o.u_set()[1..]);
        }
    }

    #[test]
    fn mixed_period_permutation() {
        // Cycles (0)(1 2)(3 4 5 6)(7).
        let perm = vec![0, 2, 1, 4, 5, 6, 3, 7];
        let dec = OrbitDecomposition::from_permutation(perm, 4).unwrap();
        assert_eq!(dec.periods(), vec![1, 2, 4, 1]);
        assert_eq!(dec.orbit_of(5), (2, 2));
        assert!(OrbitDecomposition::from_permutation(vec![1, 2, 0], 4).is_err());
        assert_eq!(
            OrbitDecomposition::from_permutation(vec![1, 1], 2),
            Err(Error::OrbitMatchingFailed)
        );
    }

    #[test]
    fn ambiguous_matching_is_rejected() {
        let c = sierpinski(1).unwrap();
        let shift = Similarity::new(Point::new(1.0, 0.0), Point::new(0.2, 0.0));
        assert_eq!(hole_orbits(&c, &shift, 1).unwrap_err(), Error::OrbitMatchingFailed);
    }

    #[test]
    fn rotation_is_already_periodic() {
        let c = four_fold_carpet().unwrap();
        let ext = carpet_periodic_extension(&c, quarter_turn(), 4).unwrap();
        for z in box_points(2000, 0.0, 1.0, 0.0, 1.0) {
            let w = ext.apply(z).unwrap();
            assert!(w.dist(z.rotate_about(Point::new(0.5, 0.5), FRAC_PI_2)) < 1e-12);
        }
    }

    #[test]
    fn twisted_rotation_becomes_periodic() {
        let c = four_fold_carpet().unwrap();
        let f = twisted(&c);
        let ext = carpet_periodic_extension(&c, f.clone(), 4).unwrap();
        let probes = || box_points(3000, 0.0, 1.0, 0.0, 1.0);
        let res = periodicity_residual(&ext, 4, probes()).unwrap();
        assert!(res <= 1e-4 * c.diameter(), "{res}");
        // The central hole is rebuilt, so the map differs from f there.
        let centre = Point::new(0.52, 0.47);
        assert!(ext.apply(centre).unwrap().dist(f.apply(centre).unwrap()) > 1e-4);
        // On the carpet F is f.
        for z in probes().filter(|z| c.contains(*z)) {
            assert_eq!(ext.apply(z).unwrap(), f.apply(z).unwrap());
        }
        for z in probes().take(300) {
            let w = ext.apply(z).unwrap();
            assert!(ext.apply_inverse(w).unwrap().dist(z) < 1e-8);
        }
        // On the representative boundary, F^m agrees with g.
        for (o, orbit) in ext.orbits().orbits().iter().enumerate() {
            let Some(g) = ext.hole_map(o) else { continue };
            for p in c.peripheral_rect(orbit.representative()).boundary_points(16) {
                let mut w = p;
                for _ in 0..orbit.period() {
                    w = ext.apply(w).unwrap();
                }
                assert!(w.dist(g.apply(p).unwrap()) < 1e-4);
            }
        }
    }

    #[test]
    fn per_hole_ba_initial_extension() {
        let c = four_fold_carpet().unwrap();
        let f = twisted(&c);
        let init = hole_ba_extension(&c, f.clone(), 512).unwrap();
        for z in box_points(2000, 0.0, 1.0, 0.0, 1.0) {
            let w = init.apply(z).unwrap();
            assert_eq!(c.locate(z).map(|i| init.permutation()[i]), c.locate(w));
            assert!(init.apply_inverse(w).unwrap().dist(z) < 1e-9);
            if c.contains(z) {
                assert_eq!(w, f.apply(z).unwrap());
            }
        }
        let ext = carpet_periodic_extension(&c, init, 4).unwrap();
        let res = periodicity_residual(&ext, 4, box_points(2000, 0.0, 1.0, 0.0, 1.0)).unwrap();
        assert!(res <= 1e-4 * c.diameter(), "{res}");
    }
}

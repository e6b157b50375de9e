//! Hole densities built from a hole pairing and the inequality checks they feed.
//!
//! A pairing is the action of an extension `F` on the removed rectangles of a carpet.
//! For the distinguished hole `K` with `F(K) = Q_p`, `F(Q_q) = K`, the density is
//! `ρ = l(F(Q)) / l(Q)` on each hole `Q`, where `l` measures the extent along the
//! path direction (so `ρ = l(Q_p)/l(K)` on `K` and `l(K)/l(Q_q)` on `Q_q`), and `0`
//! on the carpet. Paths run parallel to the shorter side of `K`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::{CellGrid, Density};
use crate::carpet::{carpet_area, Carpet};
use crate::error::invalid;
use crate::geometry::{Rect, Region};
use crate::numeric::{fsum, Sum};
use crate::{Error, Point, Result};

/// Bijection of the peripheral indices of a carpet (index `0` is `K`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolePairing {
    image: Vec<usize>,
    preimage: Vec<usize>,
}

impl HolePairing {
    /// Errors with "pairing is not a bijection" unless `image` is a permutation.
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut preimage = vec![usize::MAX; n];
        for (i, &j) in image.iter().enumerate() {
            if j >= n || preimage[j] != usize::MAX {
                return Err(Error::NotBijective);
            }
            preimage[j] = i;
        }
        Ok(HolePairing { image, preimage })
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..n).collect()).expect("identity is a bijection")
    }

    /// Identity except on the listed cycles; `[a, b, c]` sends `a → b → c → a`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        for cyc in cycles {
            for (i, &a) in cyc.iter().enumerate() {
                if a >= n || seen[a] {
                    return Err(Error::NotBijective);
                }
                seen[a] = true;
                image[a] = cyc[(i + 1) % cyc.len()];
            }
        }
        Self::new(image)
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn preimage(&self, i: usize) -> usize {
        self.preimage[i]
    }

    /// The cycle through `i`, starting at `i`.
    pub fn orbit(&self, i: usize) -> Vec<usize> {
        let mut out = vec![i];
        let mut j = self.image[i];
        while j != i {
            out.push(j);
            j = self.image[j];
        }
        out
    }
}

/// Direction of the paths: lines parallel to the x-axis or to the y-axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathAxis {
    X,
    Y,
}

impl PathAxis {
    /// Paths run parallel to the shorter side of `k`; a square is rejected.
    pub fn for_hole(k: &Rect) -> Result<Self> {
        if (k.w - k.h).abs() <= 1e-12 * k.w.max(k.h) {
            return Err(Error::SquareHole);
        }
        Ok(if k.w < k.h { PathAxis::X } else { PathAxis::Y })
    }

    /// Extent of `r` along the paths.
    pub fn along(self, r: &Rect) -> f64 {
        match self {
            PathAxis::X => r.w,
            PathAxis::Y => r.h,
        }
    }

    /// Extent of `r` across the paths.
    pub fn across(self, r: &Rect) -> f64 {
        match self {
            PathAxis::X => r.h,
            PathAxis::Y => r.w,
        }
    }
}

/// Piecewise-constant density on the removed rectangles of a carpet.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleDensity {
    pub axis: PathAxis,
    /// Value on each removed rectangle, by peripheral index.
    pub values: Vec<f64>,
    /// Value on the carpet itself.
    pub carpet_value: f64,
}

impl HoleDensity {
    /// `∫ρ²` by direct summation over the rectangles and the carpet residue.
    pub fn energy(&self, carpet: &Carpet) -> f64 {
        let rects = carpet.peripheral_rects();
        let mut s = Sum::default();
        for (v, r) in self.values.iter().zip(&rects) {
            s.add(v * v * r.area());
        }
        s.add(self.carpet_value * self.carpet_value * carpet_area(carpet));
        s.value()
    }

    /// Same density with the carpet residue set to `value`.
    pub fn with_carpet_value(&self, value: f64) -> Self {
        HoleDensity {
            carpet_value: value,
            ..self.clone()
        }
    }

    pub fn value_at(&self, carpet: &Carpet, p: Point) -> f64 {
        carpet.locate(p).map_or(self.carpet_value, |i| self.values[i])
    }

    /// Exact `∫ρ ds` along the full line at transverse coordinate `c`, together
    /// with the line's length.
    pub fn line_integral(&self, carpet: &Carpet, c: f64) -> (f64, f64) {
        let (x0, x1, y0, y1) = carpet.region().bounds();
        let length = match self.axis {
            PathAxis::X => x1 - x0,
            PathAxis::Y => y1 - y0,
        };
        let mut inside = Sum::default();
        let mut acc = Sum::default();
        for (i, r) in carpet.peripheral_rects().iter().enumerate() {
            let (lo, hi) = match self.axis {
                PathAxis::X => (r.t, r.y1()),
                PathAxis::Y => (r.s, r.x1()),
            };
            if lo < c && c < hi {
                let l = self.axis.along(r);
                inside.add(l);
                acc.add(self.values[i] * l);
            }
        }
        acc.add(self.carpet_value * (length - inside.value()));
        (acc.value(), length)
    }

    /// Cell averages on a grid over the carpet region (exact rectangle overlaps).
    pub fn rasterize(&self, carpet: &Carpet, nx: usize, ny: usize) -> Result<Density> {
        let grid = CellGrid::over(carpet.region(), nx, ny)?;
        let cell_area = grid.cell_area();
        let mut mass = vec![0.0f64; grid.len()];
        let mut covered = vec![0.0f64; grid.len()];
        for (idx, r) in carpet.peripheral_rects().iter().enumerate() {
            let i0 = (((r.s - grid.x0) / grid.dx).floor().max(0.0) as usize).min(nx - 1);
            let i1 = (((r.x1() - grid.x0) / grid.dx).ceil() as usize).min(nx);
            let j0 = (((r.t - grid.y0) / grid.dy).floor().max(0.0) as usize).min(ny - 1);
            let j1 = (((r.y1() - grid.y0) / grid.dy).ceil() as usize).min(ny);
            for j in j0..j1 {
                for i in i0..i1 {
                    let cx0 = grid.x0 + grid.dx * i as f64;
                    let cy0 = grid.y0 + grid.dy * j as f64;
                    let ox = (r.x1().min(cx0 + grid.dx) - r.s.max(cx0)).max(0.0);
                    let oy = (r.y1().min(cy0 + grid.dy) - r.t.max(cy0)).max(0.0);
                    let k = grid.index(i, j);
                    mass[k] += self.values[idx] * ox * oy;
                    covered[k] += ox * oy;
                }
            }
        }
        let values = mass
            .iter()
            .zip(&covered)
            .map(|(m, c)| (m + self.carpet_value * (cell_area - c).max(0.0)) / cell_area)
            .collect();
        Density::new(grid, values)
    }
}

fn distinguished(carpet: &Carpet, pairing: &HolePairing) -> Result<Rect> {
    let k = carpet.k().ok_or_else(|| invalid("carpet has no distinguished hole K"))?;
    if pairing.len() != carpet.peripheral_count() {
        return Err(Error::NotBijective);
    }
    Ok(k)
}

/// `ρ = l(F(Q))/l(Q)` on every removed rectangle, `0` on the carpet, for paths
/// along `axis`.
pub fn hole_density(carpet: &Carpet, pairing: &HolePairing, axis: PathAxis) -> Result<HoleDensity> {
    distinguished(carpet, pairing)?;
    let rects = carpet.peripheral_rects();
    let values = (0..rects.len())
        .map(|i| axis.along(&rects[pairing.image(i)]) / axis.along(&rects[i]))
        .collect();
    Ok(HoleDensity {
        axis,
        values,
        carpet_value: 0.0,
    })
}

/// The side lengths `(w, h)` of `K` in the naming of the rigidity argument: for
/// rectangle rings `w` is horizontal and `h` vertical; for C* carpets `h` is the
/// radial side `log(b/a)` and `w` the circular side `β − α`.
pub fn named_sides(carpet: &Carpet) -> Result<(f64, f64)> {
    let k = carpet.k().ok_or_else(|| invalid("carpet has no distinguished hole K"))?;
    Ok(match carpet.region() {
        Region::LogCylinder { .. } => (k.h, k.w),
        _ => (k.w, k.h),
    })
}

/// Case `w > h`: vertical family for rectangle rings, radial family for C* carpets.
pub fn hole_density_case1(carpet: &Carpet, pairing: &HolePairing) -> Result<HoleDensity> {
    let (w, h) = named_sides(carpet)?;
    if !(w > h) {
        return Err(if w == h { Error::SquareHole } else { invalid("case 1 needs w > h") });
    }
    hole_density(carpet, pairing, PathAxis::for_hole(&carpet.k().unwrap())?)
}

/// Case `w < h`: horizontal family for rectangle rings, circular family for C* carpets.
pub fn hole_density_case2(carpet: &Carpet, pairing: &HolePairing) -> Result<HoleDensity> {
    let (w, h) = named_sides(carpet)?;
    if !(w < h) {
        return Err(if w == h { Error::SquareHole } else { invalid("case 2 needs w < h") });
    }
    hole_density(carpet, pairing, PathAxis::for_hole(&carpet.k().unwrap())?)
}

/// Closed form of `∫ρ²` when every hole other than `K` is a square:
/// `(across/along)·l_p² + along² + A_H − l_p² − across·along`, where `A_H` is the total
/// area of the removed rectangles (which equals the base area for a carpet of
/// measure zero).
pub fn bookkeeping_identity(carpet: &Carpet, pairing: &HolePairing) -> Result<f64> {
    let k = distinguished(carpet, pairing)?;
    let axis = PathAxis::for_hole(&k)?;
    let rects = carpet.peripheral_rects();
    let along = axis.along(&k);
    let across = axis.across(&k);
    let lp = axis.along(&rects[pairing.image(0)]);
    let holes_area = fsum(rects.iter().map(Rect::area));
    Ok((across / along) * lp * lp + along * along + holes_area - lp * lp - across * along)
}

/// Outcome of the rigidity inequality checks for one pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub axis: PathAxis,
    /// `min{w, h}`: the extent of `K` along the paths.
    pub along: f64,
    pub across: f64,
    /// `l(F(K))`.
    pub image_side: f64,
    /// `∫ρ²` of the hole density (zero on the carpet).
    pub energy: f64,
    /// `∫ρ̂²` where `ρ̂` equals `ρ` on the holes and `1` on the carpet residue.
    pub credited_energy: f64,
    /// Closed-form value of `∫ρ²` (see [`bookkeeping_identity`]).
    pub bookkeeping: f64,
    /// Area of the base region: the modulus bound the energy is compared with.
    pub base_area: f64,
    /// Carpet area left at this depth.
    pub defect: f64,
    /// Minimum over the sampled paths of `∫_γ ρ̂ ds / length(γ)`.
    pub min_path_ratio: f64,
    /// (i) `ρ̂` normalised by the path length is admissible on the sampled paths.
    pub admissible: bool,
    /// (ii) `base area ≤ ∫ρ̂²`.
    pub lower_bound_ok: bool,
    /// `base area ≤ ∫ρ²` without the carpet credit.
    pub raw_lower_bound_ok: bool,
    /// (iii) `min{w, h} ≤ l(F(K))`.
    pub implied_bound_ok: bool,
}

/// Evaluates the three checks of the rigidity argument on a rectangle-ring carpet,
/// using `paths` equally spaced lines for the admissibility check.
pub fn rigidity_bound_check(carpet: &Carpet, pairing: &HolePairing, paths: usize) -> Result<BoundReport> {
    if !matches!(carpet.region(), Region::RectangleRing { .. }) {
        return Err(invalid("rigidity_bound_check needs a rectangle-ring carpet"));
    }
    bound_check(carpet, pairing, paths)
}

/// The C* version: all quantities in log coordinates, base area `2π log r`.
pub fn cstar_rigidity_bound_check(carpet: &Carpet, pairing: &HolePairing, paths: usize) -> Result<BoundReport> {
    if !matches!(carpet.region(), Region::LogCylinder { hole: Some(_), .. }) {
        return Err(invalid("cstar_rigidity_bound_check needs a C* carpet with K"));
    }
    bound_check(carpet, pairing, paths)
}

fn bound_check(carpet: &Carpet, pairing: &HolePairing, paths: usize) -> Result<BoundReport> {
    let k = distinguished(carpet, pairing)?;
    let axis = PathAxis::for_hole(&k)?;
    if paths == 0 {
        return Err(Error::EmptySet);
    }
    let rho = hole_density(carpet, pairing, axis)?;
    let credited = rho.with_carpet_value(1.0);
    let (x0, x1, y0, y1) = carpet.region().bounds();
    let (lo, hi) = match axis {
        PathAxis::X => (y0, y1),
        PathAxis::Y => (x0, x1),
    };
    let step = (hi - lo) / paths as f64;
    let min_path_ratio = (0..paths)
        .map(|i| {
            let (v, len) = credited.line_integral(carpet, lo + step * (i as f64 + 0.5));
            v / len
        })
        .fold(f64::INFINITY, f64::min);
    let energy = rho.energy(carpet);
    let credited_energy = credited.energy(carpet);
    let base_area = carpet.region().base_area();
    let along = axis.along(&k);
    let image_side = axis.along(&carpet.peripheral_rect(pairing.image(0)));
    let rel = 1e-12;
    Ok(BoundReport {
        axis,
        along,
        across: axis.across(&k),
        image_side,
        energy,
        credited_energy,
        bookkeeping: bookkeeping_identity(carpet, pairing)?,
        base_area,
        defect: carpet_area(carpet),
        min_path_ratio,
        admissible: min_path_ratio >= 1.0 - 1e-12,
        lower_bound_ok: base_area <= credited_energy * (1.0 + rel),
        raw_lower_bound_ok: base_area <= energy * (1.0 + rel),
        implied_bound_ok: along <= image_side * (1.0 + rel),
    })
}

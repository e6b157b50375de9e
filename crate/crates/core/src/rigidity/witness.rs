//! Periodic-point witnesses for increasing homeomorphisms of intervals and circles.
//!
//! An increasing self-map `h` of `[s, t]` fixing both ends moves every point it does
//! not fix monotonically: if `h(x) < x` then `h^n(x) < x` for all `n ≥ 1`, so `x` is
//! not periodic. A witness records such an `x` with its strictly monotone orbit.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::error::invalid;
use crate::maps::CircleMap;
use crate::numeric::{angle_diff, wrap_angle};
use crate::{Error, Result};

/// Displacements at or below this fraction of the interval length count as fixed.
pub const WITNESS_TOL: f64 = 1e-12;

/// Increasing piecewise-linear homeomorphism of `[s, t]` fixing both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalMap {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl IntervalMap {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(invalid("breakpoints and values differ in length"));
        }
        if breakpoints.len() < 2 {
            return Err(invalid("need at least two breakpoints"));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(invalid("non-finite breakpoint or value"));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NonInjective);
        }
        let n = breakpoints.len() - 1;
        if values[0] != breakpoints[0] || values[n] != breakpoints[n] {
            return Err(invalid("interval map must fix both endpoints"));
        }
        Ok(IntervalMap { breakpoints, values })
    }

    /// Samples `h` at `n + 1` equally spaced points; the endpoints are pinned.
    pub fn from_fn(s: f64, t: f64, n: usize, h: impl Fn(f64) -> f64) -> Result<Self> {
        if !(t > s) || n == 0 {
            return Err(invalid("need s < t and n >= 1"));
        }
        let breakpoints: Vec<f64> = (0..=n)
            .map(|i| if i == n { t } else { s + (t - s) * i as f64 / n as f64 })
            .collect();
        let mut values: Vec<f64> = breakpoints.iter().map(|&x| h(x)).collect();
        values[0] = s;
        values[n] = t;
        Self::new(breakpoints, values)
    }

    pub fn identity(s: f64, t: f64) -> Result<Self> {
        Self::new(alloc::vec![s, t], alloc::vec![s, t])
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Piecewise-linear evaluation, clamped to `[s, t]`.
    pub fn eval(&self, x: f64) -> f64 {
        let b = &self.breakpoints;
        if x <= b[0] {
            return self.values[0];
        }
        if x >= self.end() {
            return *self.values.last().unwrap();
        }
        let i = b.partition_point(|&v| v <= x) - 1;
        let u = (x - b[i]) / (b[i + 1] - b[i]);
        self.values[i] + (self.values[i + 1] - self.values[i]) * u
    }

    /// Breakpoints, segment midpoints and `probes − 1` equally spaced interior points.
    pub fn probe_points(&self, probes: usize) -> Vec<f64> {
        let (s, t) = (self.start(), self.end());
        let mut v: Vec<f64> = self.breakpoints.clone();
        v.extend(self.breakpoints.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        v.extend((1..probes).map(|i| s + (t - s) * i as f64 / probes as f64));
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// Which way a witness orbit moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A point that is not periodic of period up to `orbit.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub x: f64,
    /// `h(x), h²(x), …`, strictly monotone; cut short if floating point stalls.
    pub orbit: Vec<f64>,
    /// `|h(x) − x|`.
    pub drift: f64,
    pub direction: Direction,
}

impl Witness {
    /// Every consecutive pair of `x, orbit…` moves strictly in `direction`.
    pub fn is_strictly_monotone(&self) -> bool {
        let mut prev = self.x;
        self.orbit.iter().all(|&v| {
            let ok = match self.direction {
                Direction::Increasing => v > prev,
                Direction::Decreasing => v < prev,
            };
            prev = v;
            ok
        })
    }
}

/// Witness at the probe with the largest displacement, iterated up to `n_max`
/// times; `None` when `h` moves no probe by more than [`WITNESS_TOL`].
pub fn interval_periodicity_witness(h: &IntervalMap, n_max: usize, probes: usize) -> Option<Witness> {
    let tol = WITNESS_TOL * (h.end() - h.start());
    let (x, drift) = h
        .probe_points(probes)
        .into_iter()
        .map(|x| (x, (h.eval(x) - x).abs()))
        .fold((0.0, 0.0), |best, c| if c.1 > best.1 { c } else { best });
    if !(drift > tol) {
        return None;
    }
    let direction = if h.eval(x) > x {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    let mut orbit = Vec::with_capacity(n_max);
    let mut v = x;
    for _ in 0..n_max.max(1) {
        let next = h.eval(v);
        let moved = match direction {
            Direction::Increasing => next > v,
            Direction::Decreasing => next < v,
        };
        if !moved {
            break;
        }
        orbit.push(next);
        v = next;
    }
    Some(Witness {
        x,
        orbit,
        drift,
        direction,
    })
}

/// The circle map cut open at `z0`: `x ↦ φ(z0 + x) − φ(z0)` on `[0, 2π]`.
pub fn cut_at(h: &CircleMap, z0: f64) -> Result<IntervalMap> {
    if !h.orientation_preserving() {
        return Err(Error::Orientation);
    }
    let base = h.lift_at(z0);
    let mut breakpoints = alloc::vec![0.0];
    let mut inner: Vec<f64> = h
        .knots()
        .iter()
        .map(|&k| wrap_angle(k - z0))
        .filter(|&x| x > 1e-12 && x < TAU - 1e-12)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    breakpoints.extend(inner);
    breakpoints.push(TAU);
    let n = breakpoints.len() - 1;
    let values: Vec<f64> = breakpoints
        .iter()
        .enumerate()
        .map(|(i, &x)| if i == 0 { 0.0 } else if i == n { TAU } else { h.lift_at(z0 + x) - base })
        .collect();
    IntervalMap::new(breakpoints, values)
}

/// Cuts the circle at the best fixed point of `h` (found to within `fixed_tol`) and looks
/// for an interval witness. Witness positions are reported as lifted angles
/// `z0 + x`.
pub fn circle_periodicity_witness(
    h: &CircleMap,
    n_max: usize,
    probes: usize,
    fixed_tol: f64,
) -> Result<Option<Witness>> {
    if !h.orientation_preserving() {
        return Err(Error::Orientation);
    }
    let z0 = h
        .fixed_points(fixed_tol)
        .into_iter()
        .map(|z| (z, angle_diff(h.lift_at(z), z).abs()))
        .fold(None, |best: Option<(f64, f64)>, c| match best {
            Some(b) if b.1 <= c.1 => Some(b),
            _ => Some(c),
        })
        .ok_or(Error::NoFixedPoint)?
        .0;
    circle_witness_at(h, z0, n_max, probes)
}

/// [`circle_periodicity_witness`] with a caller-chosen cut point.
pub fn circle_witness_at(h: &CircleMap, z0: f64, n_max: usize, probes: usize) -> Result<Option<Witness>> {
    let cut = cut_at(h, z0)?;
    Ok(interval_periodicity_witness(&cut, n_max, probes).map(|w| Witness {
        x: z0 + w.x,
        orbit: w.orbit.iter().map(|v| z0 + v).collect(),
        ..w
    }))
}

//! Deterministic low-discrepancy sequences used for probes and triple sampling.
//!
//! Every estimator in the crate is seed-free: probe sets come from these
//! sequences so repeated runs are bit-identical.

use crate::Point;

const G1: f64 = 0.618_033_988_749_894_9;
// Plastic-number based R2 sequence.
const R2_A: f64 = 0.754_877_666_246_692_7;
const R2_B: f64 = 0.569_840_290_998_053_2;

/// `i`-th element of the golden-ratio sequence in `[0, 1)`.
pub fn golden(i: usize) -> f64 {
    let v = 0.5 + G1 * i as f64;
    v - libm_floor(v)
}

/// `i`-th element of the R2 sequence in `[0, 1)^2`.
pub fn r2(i: usize) -> (f64, f64) {
    let a = 0.5 + R2_A * i as f64;
    let b = 0.5 + R2_B * i as f64;
    (a - libm_floor(a), b - libm_floor(b))
}

/// `n` points of the R2 sequence mapped into the box `[x0, x1] × [y0, y1]`.
pub fn box_points(n: usize, x0: f64, x1: f64, y0: f64, y1: f64) -> impl Iterator<Item = Point> {
    (0..n).map(move |i| {
        let (u, v) = r2(i);
        Point::new(x0 + (x1 - x0) * u, y0 + (y1 - y0) * v)
    })
}

/// `n` points in the annulus `{inner ≤ |z| ≤ outer}`, uniform in area.
pub fn annulus_points(n: usize, inner: f64, outer: f64) -> impl Iterator<Item = Point> {
    use num_traits::Float;
    (0..n).map(move |i| {
        let (u, v) = r2(i);
        let rho = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
        Point::polar(rho, core::f64::consts::TAU * v)
    })
}

fn libm_floor(x: f64) -> f64 {
    num_traits::Float::floor(x)
}

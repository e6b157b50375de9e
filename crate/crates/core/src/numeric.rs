//! Small numerical helpers shared across modules.

/// Neumaier-compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Sum {
    sum: f64,
    comp: f64,
}

impl Sum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) fn fsum(it: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = Sum::default();
    for x in it {
        s.add(x);
    }
    s.value()
}

/// Reduces an angle to `[0, 2π)`.
pub(crate) fn wrap_angle(theta: f64) -> f64 {
    use core::f64::consts::TAU;
    use num_traits::Float;
    let mut t = theta - TAU * (theta / TAU).floor();
    if t >= TAU {
        t -= TAU;
    }
    if t < 0.0 {
        t += TAU;
    }
    t
}

/// Signed angular difference `a - b` reduced to `(-π, π]`.
pub(crate) fn angle_diff(a: f64, b: f64) -> f64 {
    use core::f64::consts::{PI, TAU};
    let d = wrap_angle(a - b);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

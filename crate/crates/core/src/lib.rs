//! Numerical toolkit for the quasiconformal geometry of square carpets.
//!
//! The crate is `no_std` (it needs `alloc`). It covers
//!
//! * planar primitives and the quasicircle constant ([`geometry`]),
//! * sampled circle homeomorphisms and grid maps with distortion estimators ([`maps`]),
//! * Beurling–Ahlfors extensions, the periodic annulus extension, the reflection
//!   tower and the hole-orbit surgery for carpet maps ([`extension`]),
//! * discrete conformal modulus and the hole-density rigidity inequalities ([`modulus`]),
//! * periodic-point witnesses and rigidity pipelines ([`rigidity`]),
//! * carpet generators and bookkeeping ([`carpet`]).
//!
//! File formats and the command line live in the companion `qcarpet-cli` crate.
#![no_std]
#![forbid(unsafe_code)]
// `num_traits::Float` supplies the float methods without std. Test builds link std
// and unify num-traits' std feature through dev-dependencies, which leaves those
// imports reported as unused.
#![allow(unused_imports)]
// NaN-rejecting comparisons are written as negated predicates on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod carpet;
mod error;
pub mod extension;
pub mod geometry;
pub mod maps;
pub mod modulus;
mod numeric;
pub mod rigidity;
pub mod sampling;

pub use error::{Error, Result};
pub use geometry::Point;

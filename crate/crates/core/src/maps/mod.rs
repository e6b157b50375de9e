//! Maps between planar sets: exact evaluators, circle maps, and sampled grid maps
//! with the distortion estimators used throughout the crate.

mod circle;
mod distortion;
mod plane;
mod transform;

pub use circle::{cyclic_orientation, CircleMap, CircleOrientation, Periodicity, MIN_CIRCLE_SAMPLES};
pub use distortion::{
    circle_triples, curve_triples, qs_eta_profile, weak_qs_constant, TripleSample,
    ETA_BUCKETS,
};
pub use plane::{dilatation_estimate, Dilatation, PlaneMap};
pub use transform::{
    periodicity_residual, FnTransform, Identity, InvertibleTransform, Inverse, PlaneTransform,
    Similarity,
};

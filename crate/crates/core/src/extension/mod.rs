//! Quasiconformal extensions: Beurling–Ahlfors, the periodic annulus extension,
//! the reflection tower and the hole-orbit surgery for carpet maps.
//!
//! Extensions are exact evaluators implementing [`PlaneTransform`](crate::maps::PlaneTransform)
//! (and [`InvertibleTransform`](crate::maps::InvertibleTransform) where an inverse is
//! available); grid exports go through [`PlaneMap::sample`](crate::maps::PlaneMap::sample).

pub mod annulus;
pub mod ba;
pub mod chart;
pub mod surgery;
pub mod tower;
pub mod twist;

pub use annulus::{
    build_glue_maps, decompose_annulus, default_u0, periodic_annulus_extension,
    periodic_annulus_extension_from, AnnulusDecomposition, GlueMaps, PeriodicAnnulusExtension,
};
pub use ba::{ba_extend, BaExtension};
pub use chart::{disk_to_square, square_to_disk, RectChart, Side};
pub use tower::{
    default_depth, extend_to_plane, reflect, reflection_tower_extend, PlaneExtension,
    ReflectionTower, RingResidual, TowerManifest,
};
pub use surgery::{
    carpet_periodic_extension, hole_ba_extension, hole_orbits, match_holes, periodize,
    CarpetExtension, HoleBaExtension, HoleMap, HoleOrbit, OrbitDecomposition,
};
pub use twist::{Conjugate, HoleTwist, Twist};

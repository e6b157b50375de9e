//! Periodic-point witnesses and the rigidity pipelines built on them.

mod pipeline;
mod witness;

pub use pipeline::{
    carpet_rigidity_pipeline, cstar_pipeline, square_carpet_pipeline, HypothesisCheck, OrbitReport,
    PipelineOptions, RigidityReport, Verdict,
};
pub use witness::{
    circle_periodicity_witness, circle_witness_at, cut_at, interval_periodicity_witness, Direction, IntervalMap,
    Witness, WITNESS_TOL,
};

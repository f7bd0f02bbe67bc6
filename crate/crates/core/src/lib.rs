//! Route prediction at a two-route highway junction.
//!
//! The crate is split into four layers:
//!
//! - [`traffic_sim`]: a deterministic, closed-form highway simulator that emits
//!   labeled vehicle trajectories (straight mainline vs. right-turn off-ramp).
//! - [`svm`]: a kernel support vector machine trained by pairwise dual
//!   coordinate ascent, with functional/geometric margins and a plain-text
//!   model format.
//! - [`dataset`]: trace CSV, SUMO floating-car-data ingestion, label tables and
//!   seeded train/test sampling.
//! - [`eval`]: accuracy sweeps and decision-boundary summaries.

pub mod dataset;
pub mod eval;
pub mod svm;
pub mod traffic_sim;

pub use dataset::{Dataset, LabelTable, Provenance};
pub use eval::{BoundaryReport, EvaluationReport, SweepRow};
pub use svm::{KernelSpec, LabeledExample, SvmModel, TrainConfig, TrainSummary};
pub use traffic_sim::{ScenarioConfig, Trace, TrajectoryPoint};

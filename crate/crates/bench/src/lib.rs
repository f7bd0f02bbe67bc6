//! Criterion benchmarks for the simulator, optimizer and kernels live in
//! `benches/`. Shared fixtures go here.

use mobpred_core::dataset::sample_examples;
use mobpred_core::svm::LabeledExample;
use mobpred_core::traffic_sim::{generate_trace, ScenarioConfig, Trace};

pub fn reference_trace() -> Trace {
    generate_trace(&ScenarioConfig::default()).expect("default scenario is valid")
}

pub fn training_set(trace: &Trace, n: usize) -> Vec<LabeledExample> {
    sample_examples(trace, n, 6).expect("enough vehicles").examples
}

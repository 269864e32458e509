//! Fixtures shared by the benchmarks.

use oculomotor::pipeline::extract_features;
use oculomotor::pipeline::PipelineConfig;
use oculomotor::synth::{generate, CohortSpec, SynthSpec};
use oculomotor::{Condition, FeatureVector, GazeRecording};

/// A default synthetic recording of the given length.
pub fn recording(duration_s: f64, seed: u64) -> GazeRecording {
    let spec = SynthSpec {
        seed,
        duration_s,
        ..SynthSpec::default()
    };
    generate(&spec, "S01", Condition::Baseline)
        .expect("default spec is feasible")
        .0
}

/// Feature rows for a cohort of short recordings.
pub fn cohort_rows(n_subjects: usize, duration_s: f64, seed: u64) -> Vec<FeatureVector> {
    let mut spec = CohortSpec::study(n_subjects, seed);
    for c in spec.conditions.iter_mut() {
        c.duration_s = duration_s;
    }
    oculomotor::synth::generate_cohort(&spec)
        .expect("default spec is feasible")
        .iter()
        .map(|(r, _)| extract_features(r, &PipelineConfig::default()).expect("extract"))
        .collect()
}

//! Per-recording feature extraction: blinks and artifacts, smoothing,
//! velocity, saccades and fixations, then the three feature groups.

use crate::blinks::{blink_features, detect_recording_blinks, BlinkDetection};
use crate::dispersion::{dispersion_features, DEFAULT_PRL_MASS};
use crate::error::FilterError;
use crate::kinematics::{angular_velocity, VelocityTrace};
use crate::model::{FeatureVector, FixationInterval, GazeRecording, SaccadeEvent, N_FEATURES};
use crate::preprocess::{smooth_gaze, SmoothedGaze, DEFAULT_ORDER, DEFAULT_WINDOW};
use crate::saccades::{extract_fixations, optimize_multiplier, saccade_features, ThresholdConfig, ThresholdState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub prl_mass: f64,
    pub sg_window: usize,
    pub sg_order: usize,
    pub threshold: ThresholdConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            prl_mass: DEFAULT_PRL_MASS,
            sg_window: DEFAULT_WINDOW,
            sg_order: DEFAULT_ORDER,
            threshold: ThresholdConfig::default(),
        }
    }
}

/// Everything computed for one recording.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub blinks: BlinkDetection,
    pub smoothed: SmoothedGaze,
    pub velocity: VelocityTrace,
    /// `None` when no threshold could be estimated.
    pub threshold: Option<ThresholdState>,
    pub saccades: Vec<SaccadeEvent>,
    pub fixations: Vec<FixationInterval>,
    pub features: FeatureVector,
}

/// Copy of the recording with gaze inside artifact intervals marked missing.
fn without_artifacts(rec: &GazeRecording, blinks: &BlinkDetection) -> GazeRecording {
    let mut out = rec.clone();
    for a in &blinks.artifacts {
        for i in a.start..a.end {
            out.gaze_valid[i] = false;
        }
    }
    out
}

pub fn analyze(rec: &GazeRecording, cfg: &PipelineConfig) -> Result<Analysis, FilterError> {
    let fs = rec.fs_hz;
    let blinks = detect_recording_blinks(rec);
    let clean = without_artifacts(rec, &blinks);
    let smoothed = smooth_gaze(&clean, cfg.sg_window, cfg.sg_order)?;
    let velocity = angular_velocity(&smoothed, fs);

    let (threshold, saccades, saccade_vals) = match optimize_multiplier(&velocity, &smoothed, &cfg.threshold) {
        Ok((det, _)) => (Some(det.threshold), det.saccades, None),
        Err(_) => (None, Vec::new(), Some([None; 13])),
    };
    let scannable: Vec<bool> = velocity
        .v_dps
        .iter()
        .zip(&velocity.defined)
        .map(|(v, d)| *d && *v <= crate::kinematics::MAX_PLAUSIBLE_DPS)
        .collect();
    let blink_mask = blinks.blink_mask(rec.len());
    let fixations = extract_fixations(&saccades, &scannable, &blink_mask, fs);

    let mut values = Vec::with_capacity(N_FEATURES);
    values.extend(saccade_vals.unwrap_or_else(|| saccade_features(&saccades, &fixations)));

    let (x, y) = clean.valid_gaze();
    let mut fx = Vec::new();
    let mut fy = Vec::new();
    for f in &fixations {
        for i in f.start_idx..f.end_idx {
            if clean.gaze_valid[i] {
                fx.push(clean.x_deg[i]);
                fy.push(clean.y_deg[i]);
            }
        }
    }
    values.extend(dispersion_features(&x, &y, &fx, &fy, cfg.prl_mass));

    let analyzed_s = (rec.len() - blinks.artifact_samples()) as f64 / fs;
    match blink_features(&blinks.blinks, analyzed_s) {
        Ok(b) => values.extend(b),
        Err(_) => values.extend([None; 5]),
    }

    let mut features = FeatureVector::empty(rec.subject_id.clone(), rec.condition);
    features.values = values;
    Ok(Analysis {
        blinks,
        smoothed,
        velocity,
        threshold,
        saccades,
        fixations,
        features,
    })
}

/// The 31 features of one recording.
pub fn extract_features(rec: &GazeRecording, cfg: &PipelineConfig) -> Result<FeatureVector, FilterError> {
    Ok(analyze(rec, cfg)?.features)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{feature_index, Condition};
    use crate::synth::{generate, SynthSpec};

    #[test]
    fn synthetic_recording_has_all_features() {
        let spec = SynthSpec {
            seed: 3,
            ..SynthSpec::default()
        };
        let (rec, gt) = generate(&spec, "S01", Condition::Ride).unwrap();
        let a = analyze(&rec, &PipelineConfig::default()).unwrap();
        assert_eq!(a.features.values.len(), N_FEATURES);
        assert!(a.threshold.is_some());
        let v = &a.features.values;
        assert!(v[13..19].iter().chain(&v[20..]).all(Option::is_some), "{v:?}");
        assert_eq!(a.blinks.blinks.len(), gt.blinks.len());
        let rate = a.features.values[feature_index("blink_rate").unwrap()].unwrap();
        assert_eq!(rate, gt.blinks.len() as f64);
    }

    #[test]
    fn noise_free_fixation_has_no_saccades() {
        let spec = SynthSpec {
            seed: 4,
            saccade_rate_hz: 0.0,
            blink_rate_per_min: 0.0,
            fixation_noise_deg: 0.0,
            drift_deg_per_sqrt_s: 0.0,
            ..SynthSpec::default()
        };
        let (rec, _) = generate(&spec, "S01", Condition::Ride).unwrap();
        let a = analyze(&rec, &PipelineConfig::default()).unwrap();
        assert!(a.saccades.is_empty());
        assert_ne!(a.features.values[feature_index("n_saccades").unwrap()], Some(1.0));
    }

    #[test]
    fn isolated_saccades_are_found() {
        let spec = SynthSpec {
            seed: 6,
            saccade_rate_hz: 0.5,
            blink_rate_per_min: 0.0,
            fixation_noise_deg: 0.01,
            drift_deg_per_sqrt_s: 0.0,
            ..SynthSpec::default()
        };
        let (rec, gt) = generate(&spec, "S01", Condition::Ride).unwrap();
        let a = analyze(&rec, &PipelineConfig::default()).unwrap();
        let hits = gt
            .saccades
            .iter()
            .filter(|t| {
                a.saccades
                    .iter()
                    .any(|d| d.onset_idx < t.offset_idx && t.onset_idx < d.offset_idx)
            })
            .count();
        let recall = hits as f64 / gt.saccades.len() as f64;
        assert!(recall >= 0.9, "recall {recall} of {}", gt.saccades.len());
    }

    #[test]
    fn all_missing_recording() {
        let mut rec = generate(&SynthSpec::default(), "S01", Condition::Fog).unwrap().0;
        rec.gaze_valid.iter_mut().for_each(|v| *v = false);
        rec.pupil_left_mm.valid.iter_mut().for_each(|v| *v = false);
        rec.pupil_right_mm.valid.iter_mut().for_each(|v| *v = false);
        let f = extract_features(&rec, &PipelineConfig::default()).unwrap();
        assert!(f.values.iter().all(Option::is_none), "{:?}", f.values);
    }
}

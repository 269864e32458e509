//! Blink detection from pupil-signal dropout.
//!
//! Every maximal run of missing pupil samples is classified: runs longer than
//! 2 s are artifacts (excluded from the analysis, including the per-minute
//! denominator), runs lasting 100..=400 ms are blinks, anything else is
//! ignored. Sample thresholds are stated at 100 Hz and scale with the rate.

use serde::Serialize;

use crate::error::BlinkError;
use crate::model::{BlinkEvent, GazeRecording, MaskedSeries, Segment};
use crate::summary::Summary;

pub const MIN_BLINK_MS: f64 = 100.0;
pub const MAX_BLINK_MS: f64 = 400.0;
/// Runs longer than this many samples at 100 Hz are artifacts.
pub const ARTIFACT_SAMPLES_AT_100HZ: f64 = 200.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlinkDetection {
    pub blinks: Vec<BlinkEvent>,
    /// Half-open artifact intervals.
    pub artifacts: Vec<Segment>,
}

impl BlinkDetection {
    pub fn artifact_samples(&self) -> usize {
        self.artifacts.iter().map(Segment::len).sum()
    }

    /// Per-sample flags covering the blink intervals.
    pub fn blink_mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for b in &self.blinks {
            m[b.onset_idx..b.offset_idx].iter_mut().for_each(|v| *v = true);
        }
        m
    }
}

fn missing_runs(valid: &[bool]) -> Vec<Segment> {
    let inverted: Vec<bool> = valid.iter().map(|v| !v).collect();
    crate::preprocess::segment_mask(&inverted)
}

/// Classifies missing runs of a pupil validity mask.
pub fn detect_blinks(valid: &[bool], fs_hz: f64) -> BlinkDetection {
    let artifact_len = ARTIFACT_SAMPLES_AT_100HZ * fs_hz / 100.0;
    let mut out = BlinkDetection {
        blinks: Vec::new(),
        artifacts: Vec::new(),
    };
    for run in missing_runs(valid) {
        let len = run.len();
        let ms = len as f64 * 1000.0 / fs_hz;
        if len as f64 > artifact_len {
            out.artifacts.push(run);
        } else if (MIN_BLINK_MS..=MAX_BLINK_MS).contains(&ms) {
            out.blinks.push(BlinkEvent {
                onset_idx: run.start,
                offset_idx: run.end,
                duration_ms: ms,
            });
        }
    }
    out
}

/// The pupil stream used for blink detection: left, unless it is entirely
/// missing.
pub fn blink_source(rec: &GazeRecording) -> &MaskedSeries {
    if rec.pupil_left_mm.all_missing() {
        &rec.pupil_right_mm
    } else {
        &rec.pupil_left_mm
    }
}

pub fn detect_recording_blinks(rec: &GazeRecording) -> BlinkDetection {
    detect_blinks(&blink_source(rec).valid, rec.fs_hz)
}

pub const N_BLINK_FEATURES: usize = 5;

/// Mean/SD/median blink duration, total blink count, and blinks per minute
/// of analyzed (artifact-free) time.
pub fn blink_features(
    blinks: &[BlinkEvent],
    analyzed_duration_s: f64,
) -> Result<[Option<f64>; N_BLINK_FEATURES], BlinkError> {
    if !(analyzed_duration_s > 0.0) {
        return Err(BlinkError::NonPositiveDuration(analyzed_duration_s));
    }
    let d: Vec<f64> = blinks.iter().map(|b| b.duration_ms).collect();
    let s = Summary::of(&d);
    let count = blinks.len() as f64;
    Ok([
        s.mean,
        s.sd,
        s.median,
        Some(count),
        Some(count / (analyzed_duration_s / 60.0)),
    ])
}

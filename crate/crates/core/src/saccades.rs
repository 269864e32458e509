//! Adaptive velocity-threshold saccade detection.
//!
//! The peak threshold is the fixed point of `AT <- mean(v < AT) + n * sd(v < AT)`
//! over the estimation pool, started at 200 deg/s. The multiplier `n` is chosen
//! from `{2.5, 3.0, ..., 6.0}` by minimising the number of events whose
//! duration falls outside 10..=100 ms. Onsets and offsets are refined by
//! walking from each supra-threshold run back (forward) past the onset
//! (offset) threshold to the nearest local velocity minimum; the offset
//! threshold blends in the noise level of the 40 ms preceding the onset.

use serde::Serialize;

use crate::error::DetectionError;
use crate::kinematics::VelocityTrace;
use crate::model::{FixationInterval, SaccadeEvent, Segment};
use crate::preprocess::SmoothedGaze;
use crate::summary::{mean, sample_sd, Summary};

pub const MULTIPLIER_GRID: [f64; 8] = [2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0];
pub const MIN_SACCADE_MS: f64 = 10.0;
pub const MAX_SACCADE_MS: f64 = 100.0;
pub const MIN_FIXATION_MS: f64 = 50.0;
const ONSET_SIGMAS: f64 = 3.0;
const LOCAL_NOISE_MS: f64 = 40.0;
const LOCAL_MIN_SEARCH_MS: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConfig {
    pub init_dps: f64,
    pub tolerance_dps: f64,
    pub max_iterations: usize,
    /// Minimum size of the estimation pool.
    pub min_samples: usize,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            init_dps: 200.0,
            tolerance_dps: 1.0,
            max_iterations: 100,
            min_samples: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdState {
    /// Peak velocity threshold, `mu + n_multiplier * sigma`.
    pub theta_pt: f64,
    pub mu: f64,
    pub sigma: f64,
    pub n_multiplier: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl ThresholdState {
    pub fn onset_threshold(&self) -> f64 {
        self.mu + ONSET_SIGMAS * self.sigma
    }
}

/// Fixed-point iteration of the adaptive threshold over an explicit pool.
pub fn adaptive_threshold(
    pool: &[f64],
    multiplier: f64,
    cfg: &ThresholdConfig,
) -> Result<ThresholdState, DetectionError> {
    if pool.len() < cfg.min_samples.max(2) {
        return Err(DetectionError::TooFewSamples {
            found: pool.len(),
            needed: cfg.min_samples.max(2),
        });
    }
    let mut at = cfg.init_dps;
    let mut below = Vec::with_capacity(pool.len());
    let mut iterations = 0;
    loop {
        iterations += 1;
        below.clear();
        below.extend(pool.iter().copied().filter(|v| *v < at));
        let (mu, sigma) = match (mean(&below), sample_sd(&below)) {
            (Some(m), Some(s)) if s > 0.0 => (m, s),
            _ => return Err(DetectionError::DegenerateVelocity),
        };
        let next = mu + multiplier * sigma;
        let converged = (next - at).abs() < cfg.tolerance_dps;
        if converged || iterations >= cfg.max_iterations {
            return Ok(ThresholdState {
                theta_pt: next,
                mu,
                sigma,
                n_multiplier: multiplier,
                iterations,
                converged,
            });
        }
        at = next;
    }
}

/// Adaptive threshold over the estimation-eligible samples of `vel`.
pub fn iterate_threshold(
    vel: &VelocityTrace,
    multiplier: f64,
    init_dps: f64,
) -> Result<ThresholdState, DetectionError> {
    let cfg = ThresholdConfig {
        init_dps,
        ..ThresholdConfig::default()
    };
    adaptive_threshold(&vel.estimation_pool(), multiplier, &cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionResult {
    /// Sorted by onset, non-overlapping.
    pub saccades: Vec<SaccadeEvent>,
    pub threshold: ThresholdState,
    /// Events outside 10..=100 ms under this threshold.
    pub misdetections: usize,
}

fn ms_to_samples(ms: f64, fs_hz: f64) -> usize {
    (ms * fs_hz / 1000.0).round() as usize
}

fn is_misdetection(e: &SaccadeEvent) -> bool {
    e.duration_ms < MIN_SACCADE_MS || e.duration_ms > MAX_SACCADE_MS
}

/// Walks from `from` towards `lo` while velocity keeps decreasing. Falls back
/// to `from` when no minimum is reached within `max_steps`.
fn local_min_backward(v: &[f64], from: usize, lo: usize, max_steps: usize) -> usize {
    let mut j = from;
    while j > lo && v[j - 1] < v[j] {
        j -= 1;
        if from - j > max_steps {
            return from;
        }
    }
    j
}

fn local_min_forward(v: &[f64], from: usize, hi: usize, max_steps: usize) -> usize {
    let mut j = from;
    while j < hi && v[j + 1] < v[j] {
        j += 1;
        if j - from > max_steps {
            return from;
        }
    }
    j
}

struct Candidate {
    onset: usize,
    peak: usize,
    offset: usize,
    onset_thr: f64,
    offset_thr: f64,
}

fn scan_segment(
    v: &[f64],
    seg: Segment,
    th: &ThresholdState,
    fs_hz: f64,
    out: &mut Vec<Candidate>,
) {
    let onset_thr = th.onset_threshold();
    let noise_len = ms_to_samples(LOCAL_NOISE_MS, fs_hz).max(1);
    let search = ms_to_samples(LOCAL_MIN_SEARCH_MS, fs_hz);
    let last = seg.end - 1;

    let mut i = seg.start;
    while i < seg.end {
        if v[i] < th.theta_pt {
            i += 1;
            continue;
        }
        let run_start = i;
        let mut peak = i;
        while i < seg.end && v[i] >= th.theta_pt {
            if v[i] > v[peak] {
                peak = i;
            }
            i += 1;
        }
        let run_end = i - 1;

        let mut k = run_start;
        let mut hit_boundary = false;
        while v[k] >= onset_thr {
            if k == seg.start {
                hit_boundary = true;
                break;
            }
            k -= 1;
        }
        if hit_boundary {
            continue;
        }
        let onset = local_min_backward(v, k, seg.start, search);

        let local_noise = if onset - seg.start >= noise_len {
            let w = &v[onset - noise_len..onset];
            match (mean(w), sample_sd(w)) {
                (Some(m), Some(s)) => m + ONSET_SIGMAS * s,
                _ => onset_thr,
            }
        } else {
            onset_thr
        };
        let offset_thr = 0.7 * onset_thr + 0.3 * local_noise;
        debug_assert!(local_noise > onset_thr || offset_thr <= onset_thr + 1e-9);

        let mut k = run_end;
        while v[k] >= offset_thr {
            if k == last {
                hit_boundary = true;
                break;
            }
            k += 1;
        }
        if hit_boundary {
            continue;
        }
        let offset = local_min_forward(v, k, last, search);
        out.push(Candidate {
            onset,
            peak,
            offset,
            onset_thr,
            offset_thr,
        });
    }
}

/// Detects saccades on `vel` under a fixed threshold. Amplitudes are measured
/// on `gaze`, which must be index-aligned with `vel`.
pub fn detect_saccades(
    vel: &VelocityTrace,
    gaze: &SmoothedGaze,
    threshold: &ThresholdState,
) -> DetectionResult {
    let fs = vel.fs_hz;
    let v = &vel.v_dps;
    let mut cands = Vec::new();
    for seg in &vel.scan_segments {
        scan_segment(v, *seg, threshold, fs, &mut cands);
    }
    cands.sort_by_key(|c| c.onset);

    let mut merged: Vec<Candidate> = Vec::with_capacity(cands.len());
    for c in cands {
        match merged.last_mut() {
            Some(prev) if c.onset < prev.offset => {
                prev.offset = prev.offset.max(c.offset);
                if v[c.peak] > v[prev.peak] {
                    prev.peak = c.peak;
                }
            }
            _ => merged.push(c),
        }
    }

    let saccades: Vec<SaccadeEvent> = merged
        .into_iter()
        .map(|c| {
            let dx = gaze.x_deg[c.offset] - gaze.x_deg[c.onset];
            let dy = gaze.y_deg[c.offset] - gaze.y_deg[c.onset];
            SaccadeEvent {
                onset_idx: c.onset,
                peak_idx: c.peak,
                offset_idx: c.offset,
                duration_ms: (c.offset - c.onset) as f64 * 1000.0 / fs,
                amplitude_deg: dx.hypot(dy),
                peak_velocity_dps: v[c.peak],
                onset_threshold_dps: c.onset_thr,
                offset_threshold_dps: c.offset_thr,
            }
        })
        .collect();
    let misdetections = saccades.iter().filter(|e| is_misdetection(e)).count();
    DetectionResult {
        saccades,
        threshold: *threshold,
        misdetections,
    }
}

/// Runs detection for every multiplier in [`MULTIPLIER_GRID`] and keeps the
/// one with the fewest misdetections (ties go to the smaller multiplier).
/// Misdetected events are dropped from the returned result.
pub fn optimize_multiplier(
    vel: &VelocityTrace,
    gaze: &SmoothedGaze,
    cfg: &ThresholdConfig,
) -> Result<(DetectionResult, f64), DetectionError> {
    let pool = vel.estimation_pool();
    let mut best: Option<(DetectionResult, f64)> = None;
    let mut first_err = None;
    for &n in &MULTIPLIER_GRID {
        let th = match adaptive_threshold(&pool, n, cfg) {
            Ok(th) => th,
            Err(e) => {
                first_err.get_or_insert(e);
                continue;
            }
        };
        let res = detect_saccades(vel, gaze, &th);
        let better = best
            .as_ref()
            .is_none_or(|(b, _)| res.misdetections < b.misdetections);
        if better {
            best = Some((res, n));
        }
    }
    match best {
        Some((mut res, n)) => {
            res.saccades.retain(|e| !is_misdetection(e));
            Ok((res, n))
        }
        None => Err(first_err.unwrap_or(DetectionError::DegenerateVelocity)),
    }
}

/// Inter-saccadic intervals inside one scan segment, with blink-masked
/// samples excised. Intervals shorter than 50 ms are dropped.
///
/// An interval is only considered when every sample in it is either
/// scannable or blink-masked; any other gap means the two saccades are not
/// known to be consecutive.
pub fn extract_fixations(
    saccades: &[SaccadeEvent],
    scannable: &[bool],
    blink_mask: &[bool],
    fs_hz: f64,
) -> Vec<FixationInterval> {
    let min_len = MIN_FIXATION_MS * fs_hz / 1000.0;
    let mut out = Vec::new();
    for pair in saccades.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b.onset_idx <= a.offset_idx {
            continue;
        }
        let span = a.offset_idx..b.onset_idx;
        let contiguous = span
            .clone()
            .all(|i| scannable[i] || blink_mask.get(i).copied().unwrap_or(false));
        if !contiguous {
            continue;
        }
        let mut run_start: Option<usize> = None;
        for i in span.clone().chain(std::iter::once(b.onset_idx)) {
            let usable = i < b.onset_idx && scannable[i] && !blink_mask.get(i).copied().unwrap_or(false);
            match (usable, run_start) {
                (true, None) => run_start = Some(i),
                (false, Some(s)) => {
                    let len = i - s;
                    if len as f64 >= min_len {
                        out.push(FixationInterval {
                            start_idx: s,
                            end_idx: i,
                            duration_ms: len as f64 * 1000.0 / fs_hz,
                        });
                    }
                    run_start = None;
                }
                _ => {}
            }
        }
    }
    out
}

/// Number of saccade features.
pub const N_SACCADE_FEATURES: usize = 13;

/// The 13 saccade-group features in canonical order.
pub fn saccade_features(
    saccades: &[SaccadeEvent],
    fixations: &[FixationInterval],
) -> [Option<f64>; N_SACCADE_FEATURES] {
    let amp: Vec<f64> = saccades.iter().map(|s| s.amplitude_deg).collect();
    let pv: Vec<f64> = saccades.iter().map(|s| s.peak_velocity_dps).collect();
    let dur: Vec<f64> = saccades.iter().map(|s| s.duration_ms).collect();
    let fix: Vec<f64> = fixations.iter().map(|f| f.duration_ms).collect();
    let mut out = [None; N_SACCADE_FEATURES];
    for (k, s) in [&amp, &pv, &dur, &fix].iter().map(|v| Summary::of(v)).enumerate() {
        out[3 * k] = s.mean;
        out[3 * k + 1] = s.sd;
        out[3 * k + 2] = s.median;
    }
    out[12] = Some(saccades.len() as f64);
    out
}

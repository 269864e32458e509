//! Angular velocity of the smoothed gaze with physiological plausibility masking.

use crate::error::KinematicsError;
use crate::model::Segment;
use crate::preprocess::{segment_mask, SmoothedGaze};

/// Velocities above this are physiologically impossible and removed from scanning.
pub const MAX_PLAUSIBLE_DPS: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityTrace {
    pub fs_hz: f64,
    /// Angular speed in deg/s; zero where undefined.
    pub v_dps: Vec<f64>,
    pub defined: Vec<bool>,
    /// Samples eligible for threshold estimation.
    pub plaus_mask: Vec<bool>,
    /// Runs of defined, plausible samples scanned for events.
    pub scan_segments: Vec<Segment>,
    /// Median over all defined samples.
    pub median_dps: f64,
}

impl VelocityTrace {
    /// Builds a trace from a fully defined velocity sequence, applying the
    /// plausibility rules.
    pub fn from_speeds(v_dps: Vec<f64>, fs_hz: f64) -> Self {
        let defined = vec![true; v_dps.len()];
        Self::from_parts(v_dps, defined, fs_hz)
    }

    pub fn from_parts(v_dps: Vec<f64>, defined: Vec<bool>, fs_hz: f64) -> Self {
        let mut pool: Vec<f64> = v_dps
            .iter()
            .zip(&defined)
            .filter(|(_, d)| **d)
            .map(|(v, _)| *v)
            .collect();
        let median_dps = median_in_place(&mut pool).unwrap_or(0.0);
        let scannable: Vec<bool> = v_dps
            .iter()
            .zip(&defined)
            .map(|(v, d)| *d && *v <= MAX_PLAUSIBLE_DPS)
            .collect();
        let plaus_mask = v_dps
            .iter()
            .zip(&scannable)
            .map(|(v, s)| *s && *v >= median_dps)
            .collect();
        let scan_segments = segment_mask(&scannable);
        Self {
            fs_hz,
            v_dps,
            defined,
            plaus_mask,
            scan_segments,
            median_dps,
        }
    }

    /// Values eligible for threshold estimation.
    pub fn estimation_pool(&self) -> Vec<f64> {
        self.v_dps
            .iter()
            .zip(&self.plaus_mask)
            .filter(|(_, p)| **p)
            .map(|(v, _)| *v)
            .collect()
    }
}

pub(crate) fn median_in_place(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

fn central_difference(s: &[f64], fs_hz: f64) -> Vec<f64> {
    let n = s.len();
    let mut d = vec![0.0; n];
    d[0] = (s[1] - s[0]) * fs_hz;
    d[n - 1] = (s[n - 1] - s[n - 2]) * fs_hz;
    for i in 1..n - 1 {
        d[i] = (s[i + 1] - s[i - 1]) * fs_hz * 0.5;
    }
    d
}

/// Angular speed of one contiguous segment given in degrees. Interior
/// samples use central differences, endpoints one-sided differences.
pub fn segment_velocity(x: &[f64], y: &[f64], fs_hz: f64) -> Result<Vec<f64>, KinematicsError> {
    if x.len() != y.len() {
        return Err(KinematicsError::LengthMismatch);
    }
    if x.len() < 3 {
        return Err(KinematicsError::SegmentTooShort { len: x.len() });
    }
    let dx = central_difference(x, fs_hz);
    let dy = central_difference(y, fs_hz);
    Ok(dx.iter().zip(&dy).map(|(a, b)| a.hypot(*b)).collect())
}

/// Angular velocity over a whole recording. Segments shorter than three
/// samples stay undefined.
pub fn angular_velocity(gaze: &SmoothedGaze, fs_hz: f64) -> VelocityTrace {
    let n = gaze.x_deg.len();
    let mut v = vec![0.0; n];
    let mut defined = vec![false; n];
    for seg in &gaze.segments {
        let r = seg.start..seg.end;
        if let Ok(sv) = segment_velocity(&gaze.x_deg[r.clone()], &gaze.y_deg[r.clone()], fs_hz) {
            v[r.clone()].copy_from_slice(&sv);
            defined[r].iter_mut().for_each(|d| *d = true);
        }
    }
    VelocityTrace::from_parts(v, defined, fs_hz)
}

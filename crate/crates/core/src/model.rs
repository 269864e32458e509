//! Domain types shared across the pipeline.
//!
//! Gaze positions are stored in degrees of visual angle after ingest. The
//! pixel-to-angle map is linear (`deg = px * fov / resolution`), with no
//! tangent correction. Missing samples are carried by explicit masks; the
//! value slots behind a `false` mask entry are never read.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Display resolution and field of view used to convert normalized gaze to degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenGeometry {
    pub width_px: u32,
    pub height_px: u32,
    pub horiz_fov_deg: f64,
    pub vert_fov_deg: f64,
}

impl Default for ScreenGeometry {
    fn default() -> Self {
        Self {
            width_px: 1920,
            height_px: 1080,
            horiz_fov_deg: 95.0,
            vert_fov_deg: 63.0,
        }
    }
}

impl ScreenGeometry {
    pub fn new(
        width_px: u32,
        height_px: u32,
        horiz_fov_deg: f64,
        vert_fov_deg: f64,
    ) -> Result<Self, ModelError> {
        let ok = width_px > 0
            && height_px > 0
            && horiz_fov_deg.is_finite()
            && horiz_fov_deg > 0.0
            && vert_fov_deg.is_finite()
            && vert_fov_deg > 0.0;
        if !ok {
            return Err(ModelError::InvalidGeometry);
        }
        Ok(Self {
            width_px,
            height_px,
            horiz_fov_deg,
            vert_fov_deg,
        })
    }

    /// Horizontal degrees per pixel.
    pub fn phi1(&self) -> f64 {
        self.horiz_fov_deg / f64::from(self.width_px)
    }

    /// Vertical degrees per pixel.
    pub fn phi2(&self) -> f64 {
        self.vert_fov_deg / f64::from(self.height_px)
    }

    pub fn norm_to_px(&self, nx: f64, ny: f64) -> (f64, f64) {
        (nx * f64::from(self.width_px), ny * f64::from(self.height_px))
    }

    pub fn px_to_deg(&self, px: f64, py: f64) -> (f64, f64) {
        (px * self.phi1(), py * self.phi2())
    }

    pub fn deg_to_px(&self, dx: f64, dy: f64) -> (f64, f64) {
        (dx / self.phi1(), dy / self.phi2())
    }

    pub fn norm_to_deg(&self, nx: f64, ny: f64) -> (f64, f64) {
        let (px, py) = self.norm_to_px(nx, ny);
        self.px_to_deg(px, py)
    }

    pub fn deg_to_norm(&self, dx: f64, dy: f64) -> (f64, f64) {
        let (px, py) = self.deg_to_px(dx, dy);
        (px / f64::from(self.width_px), py / f64::from(self.height_px))
    }
}

/// Experimental condition of a recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    Baseline,
    Ride,
    Fog,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Baseline, Condition::Ride, Condition::Fog];

    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::Baseline => "Baseline",
            Condition::Ride => "Ride",
            Condition::Fog => "Fog",
        }
    }

    /// Lower-case token used in file names (`s01_baseline.csv`).
    pub fn file_token(&self) -> &'static str {
        match self {
            Condition::Baseline => "baseline",
            Condition::Ride => "ride",
            Condition::Fog => "fog",
        }
    }

    pub fn index(&self) -> usize {
        match self {
            Condition::Baseline => 0,
            Condition::Ride => 1,
            Condition::Fog => 2,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "baseline" => Ok(Condition::Baseline),
            "ride" => Ok(Condition::Ride),
            "fog" => Ok(Condition::Fog),
            _ => Err(ModelError::UnknownCondition(s.to_string())),
        }
    }
}

/// One row of an eye-tracker export after field-level validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GazeSample {
    pub t: f64,
    pub gaze_norm_x: Option<f64>,
    pub gaze_norm_y: Option<f64>,
    pub pupil_left_mm: Option<f64>,
    pub pupil_right_mm: Option<f64>,
    pub valid: bool,
}

/// A scalar stream with its own missing mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskedSeries {
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

impl MaskedSeries {
    pub fn missing(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
            valid: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        if self.valid[i] {
            Some(self.values[i])
        } else {
            None
        }
    }

    pub fn set(&mut self, i: usize, v: Option<f64>) {
        match v {
            Some(v) => {
                self.values[i] = v;
                self.valid[i] = true;
            }
            None => {
                self.values[i] = 0.0;
                self.valid[i] = false;
            }
        }
    }

    pub fn n_missing(&self) -> usize {
        self.valid.iter().filter(|v| !**v).count()
    }

    pub fn all_missing(&self) -> bool {
        self.valid.iter().all(|v| !*v)
    }
}

/// Uniformly sampled gaze and pupil streams for one subject under one condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeRecording {
    pub subject_id: String,
    pub condition: Condition,
    pub fs_hz: f64,
    pub x_deg: Vec<f64>,
    pub y_deg: Vec<f64>,
    /// Shared by `x_deg` and `y_deg`.
    pub gaze_valid: Vec<bool>,
    pub pupil_left_mm: MaskedSeries,
    pub pupil_right_mm: MaskedSeries,
}

impl GazeRecording {
    pub fn len(&self) -> usize {
        self.x_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_deg.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.fs_hz
    }

    /// Non-missing gaze samples in time order.
    pub fn valid_gaze(&self) -> (Vec<f64>, Vec<f64>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..self.len() {
            if self.gaze_valid[i] {
                xs.push(self.x_deg[i]);
                ys.push(self.y_deg[i]);
            }
        }
        (xs, ys)
    }
}

/// Half-open index range `[start, end)` of consecutive non-missing samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= self.start && i < self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaccadeEvent {
    pub onset_idx: usize,
    pub peak_idx: usize,
    pub offset_idx: usize,
    pub duration_ms: f64,
    pub amplitude_deg: f64,
    pub peak_velocity_dps: f64,
    /// Onset threshold `mu + 3 sigma` used for this event.
    pub onset_threshold_dps: f64,
    /// Offset threshold after blending in the local noise level.
    pub offset_threshold_dps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixationInterval {
    pub start_idx: usize,
    pub end_idx: usize,
    pub duration_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlinkEvent {
    pub onset_idx: usize,
    /// One past the last missing sample.
    pub offset_idx: usize,
    pub duration_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    Degrees,
    DegreesPerSecond,
    Milliseconds,
    Count,
    Dimensionless,
    SquareDegrees,
    SquareMinutesOfArc,
    PerMinute,
}

impl Unit {
    pub fn symbol(&self) -> &'static str {
        match self {
            Unit::Degrees => "deg",
            Unit::DegreesPerSecond => "deg/s",
            Unit::Milliseconds => "ms",
            Unit::Count => "count",
            Unit::Dimensionless => "a.u.",
            Unit::SquareDegrees => "deg^2",
            Unit::SquareMinutesOfArc => "minarc^2",
            Unit::PerMinute => "1/min",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FeatureGroup {
    Saccade,
    Dispersion,
    Blink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FeatureDef {
    pub name: &'static str,
    pub unit: Unit,
    pub group: FeatureGroup,
}

const fn def(name: &'static str, unit: Unit, group: FeatureGroup) -> FeatureDef {
    FeatureDef { name, unit, group }
}

pub const N_SACCADE_FEATURES: usize = 13;
pub const N_DISPERSION_FEATURES: usize = 13;
pub const N_BLINK_FEATURES: usize = 5;
pub const N_FEATURES: usize = N_SACCADE_FEATURES + N_DISPERSION_FEATURES + N_BLINK_FEATURES;

static FEATURES: [FeatureDef; N_FEATURES] = {
    use FeatureGroup::*;
    use Unit::*;
    [
        def("mean_sacc_amp_deg", Degrees, Saccade),
        def("sd_sacc_amp_deg", Degrees, Saccade),
        def("median_sacc_amp_deg", Degrees, Saccade),
        def("mean_peak_vel_dps", DegreesPerSecond, Saccade),
        def("sd_peak_vel_dps", DegreesPerSecond, Saccade),
        def("median_peak_vel_dps", DegreesPerSecond, Saccade),
        def("mean_sacc_dur_ms", Milliseconds, Saccade),
        def("sd_sacc_dur_ms", Milliseconds, Saccade),
        def("median_sacc_dur_ms", Milliseconds, Saccade),
        def("mean_fix_dur_ms", Milliseconds, Saccade),
        def("sd_fix_dur_ms", Milliseconds, Saccade),
        def("median_fix_dur_ms", Milliseconds, Saccade),
        def("n_saccades", Count, Saccade),
        def("mean_h_gaze_deg", Degrees, Dispersion),
        def("mean_v_gaze_deg", Degrees, Dispersion),
        def("sd_h_gaze_deg", Degrees, Dispersion),
        def("sd_v_gaze_deg", Degrees, Dispersion),
        def("rho", Dimensionless, Dispersion),
        def("bcea_minarc2", SquareMinutesOfArc, Dispersion),
        def("n_prl", Count, Dispersion),
        def("gi", Dimensionless, Dispersion),
        def("mse_deg2", SquareDegrees, Dispersion),
        def("sampen_h", Dimensionless, Dispersion),
        def("sampen_v", Dimensionless, Dispersion),
        def("apen_h", Dimensionless, Dispersion),
        def("apen_v", Dimensionless, Dispersion),
        def("mean_blink_dur_ms", Milliseconds, Blink),
        def("sd_blink_dur_ms", Milliseconds, Blink),
        def("median_blink_dur_ms", Milliseconds, Blink),
        def("blink_rate", Count, Blink),
        def("blinks_per_min", PerMinute, Blink),
    ]
};

/// The canonical ordered feature list: 13 saccade, 13 dispersion, 5 blink.
pub fn feature_names() -> &'static [FeatureDef; N_FEATURES] {
    &FEATURES
}

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURES.iter().position(|f| f.name == name)
}

/// The 31 features for one subject under one condition. `None` is MISSING.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub subject_id: String,
    pub condition: Condition,
    pub values: Vec<Option<f64>>,
}

impl FeatureVector {
    pub fn empty(subject_id: impl Into<String>, condition: Condition) -> Self {
        Self {
            subject_id: subject_id.into(),
            condition,
            values: vec![None; N_FEATURES],
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        feature_index(name).and_then(|i| self.values[i])
    }

    pub fn set(&mut self, name: &str, v: Option<f64>) {
        let i = feature_index(name).unwrap_or_else(|| panic!("unknown feature {name}"));
        self.values[i] = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn feature_list_shape() {
        let f = feature_names();
        assert_eq!(f.len(), 31);
        assert_eq!(f[0].name, "mean_sacc_amp_deg");
        assert_eq!(f[0].unit, Unit::Degrees);
        let gi = f.iter().find(|d| d.name == "gi").unwrap();
        assert_eq!(gi.unit, Unit::Dimensionless);
        let count = |g| f.iter().filter(|d| d.group == g).count();
        assert_eq!(count(FeatureGroup::Saccade), 13);
        assert_eq!(count(FeatureGroup::Dispersion), 13);
        assert_eq!(count(FeatureGroup::Blink), 5);
    }

    #[test]
    fn feature_names_unique() {
        let mut names: Vec<_> = feature_names().iter().map(|d| d.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), N_FEATURES);
    }

    #[test]
    fn default_geometry_factors() {
        let g = ScreenGeometry::default();
        assert!((g.phi1() - 95.0 / 1920.0).abs() < 1e-15);
        assert!((g.phi2() - 63.0 / 1080.0).abs() < 1e-15);
        let (x, y) = g.norm_to_deg(0.5, 0.5);
        assert!((x - 47.5).abs() < 1e-12);
        assert!((y - 31.5).abs() < 1e-12);
    }

    #[test]
    fn geometry_rejects_nonpositive() {
        assert!(ScreenGeometry::new(0, 1080, 95.0, 63.0).is_err());
        assert!(ScreenGeometry::new(1920, 1080, -1.0, 63.0).is_err());
        assert!(ScreenGeometry::new(1920, 1080, 95.0, f64::NAN).is_err());
    }

    #[test]
    fn condition_parse() {
        assert_eq!("FOG".parse::<Condition>().unwrap(), Condition::Fog);
        assert_eq!("baseline".parse::<Condition>().unwrap(), Condition::Baseline);
        assert!("night".parse::<Condition>().is_err());
    }

    proptest! {
        #[test]
        fn pixel_degree_roundtrip(px in 0.5f64..1920.0, py in 0.5f64..1080.0) {
            let g = ScreenGeometry::default();
            let (dx, dy) = g.px_to_deg(px, py);
            let (bx, by) = g.deg_to_px(dx, dy);
            prop_assert!(((bx - px) / px).abs() < 1e-9);
            prop_assert!(((by - py) / py).abs() < 1e-9);
        }
    }
}

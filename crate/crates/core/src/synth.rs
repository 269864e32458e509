//! Synthetic recordings with known ground truth.
//!
//! Blink and artifact gaps are scheduled first; saccades are then laid out
//! between them so that no saccade touches a gap. Saccades are raised-cosine
//! position steps, `p(t) = p0 + (p1 - p0) (1 - cos(pi t / D)) / 2`, whose peak
//! speed is `pi A / (2 D)`. Fixations carry white positional noise plus a
//! random-walk drift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::Serialize;

use crate::error::SynthError;
use crate::model::{Condition, GazeRecording, MaskedSeries};

/// Peak velocity as a function of amplitude: `coefficient * A^exponent`,
/// capped at `cap_dps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MainSequence {
    pub coefficient: f64,
    pub exponent: f64,
    pub cap_dps: f64,
}

impl Default for MainSequence {
    fn default() -> Self {
        Self {
            coefficient: 75.0,
            exponent: 0.6,
            cap_dps: 500.0,
        }
    }
}

impl MainSequence {
    pub fn peak_velocity(&self, amplitude_deg: f64) -> f64 {
        (self.coefficient * amplitude_deg.powf(self.exponent)).min(self.cap_dps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub duration_s: f64,
    pub fs_hz: f64,
    /// Saccades per second.
    pub saccade_rate_hz: f64,
    /// Uniform amplitude range in degrees.
    pub amplitude_deg: (f64, f64),
    pub main_sequence: MainSequence,
    /// Saccade durations are clamped into this range (ms); the recorded peak
    /// velocity follows from the clamped duration.
    pub saccade_duration_ms: (f64, f64),
    pub min_fixation_ms: f64,
    /// White positional noise SD per axis (degrees).
    pub fixation_noise_deg: f64,
    /// Random-walk drift SD per axis (degrees per square-root second).
    pub drift_deg_per_sqrt_s: f64,
    pub blink_rate_per_min: f64,
    /// Uniform blink duration range (ms).
    pub blink_duration_ms: (f64, f64),
    pub artifact_rate_per_min: f64,
    /// Uniform artifact duration range (s).
    pub artifact_duration_s: (f64, f64),
    /// Screen point (degrees) around which gaze is generated.
    pub center_deg: (f64, f64),
    /// Half extents of the box fixation targets stay within.
    pub range_deg: (f64, f64),
    /// Fixation targets for PRL scenarios, relative to `center_deg`; when
    /// non-empty every fixation lands on one of them.
    pub clusters: Vec<(f64, f64)>,
    pub pupil_mm: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            duration_s: 60.0,
            fs_hz: 100.0,
            saccade_rate_hz: 2.0,
            amplitude_deg: (2.0, 15.0),
            main_sequence: MainSequence::default(),
            saccade_duration_ms: (20.0, 80.0),
            min_fixation_ms: 150.0,
            fixation_noise_deg: 0.3,
            drift_deg_per_sqrt_s: 0.1,
            blink_rate_per_min: 12.0,
            blink_duration_ms: (150.0, 400.0),
            artifact_rate_per_min: 0.0,
            artifact_duration_s: (2.5, 5.0),
            center_deg: (47.5, 31.5),
            range_deg: (15.0, 10.0),
            clusters: Vec::new(),
            pupil_mm: 3.5,
        }
    }
}

/// Samples kept clear between a saccade and a blink or artifact gap.
const GAP_MARGIN_MS: f64 = 100.0;
const PLACEMENT_RETRIES: usize = 10_000;

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InfeasibleSpec(m.to_string()));
        if !(self.duration_s > 0.0 && self.fs_hz > 0.0) {
            return bad("duration and sampling rate must be positive");
        }
        let rates = [
            self.saccade_rate_hz,
            self.blink_rate_per_min,
            self.artifact_rate_per_min,
            self.fixation_noise_deg,
            self.drift_deg_per_sqrt_s,
        ];
        if rates.iter().any(|r| !(*r >= 0.0)) {
            return bad("rates and noise levels must be non-negative");
        }
        let (a0, a1) = self.amplitude_deg;
        if !(a0 > 0.0 && a0 <= a1 && a1 <= 60.0) {
            return bad("amplitude range must lie in (0, 60]");
        }
        let (d0, d1) = self.saccade_duration_ms;
        if !(d0 > 0.0 && d0 <= d1) {
            return bad("saccade duration range is empty");
        }
        let (b0, b1) = self.blink_duration_ms;
        if !(b0 > 0.0 && b0 <= b1) {
            return bad("blink duration range is empty");
        }
        let (g0, g1) = self.artifact_duration_s;
        if !(g0 > 0.0 && g0 <= g1) {
            return bad("artifact duration range is empty");
        }
        if self.saccade_rate_hz > 0.0 {
            let cycle = (d1 + self.min_fixation_ms) / 1000.0;
            if cycle * self.saccade_rate_hz > 1.0 {
                return bad("saccade rate leaves no room for the minimum fixation");
            }
        }
        Ok(())
    }

    fn samples(&self, ms: f64) -> usize {
        (ms * self.fs_hz / 1000.0).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrueSaccade {
    /// First sample of the position step.
    pub onset_idx: usize,
    /// First sample at or after the end of the step.
    pub offset_idx: usize,
    pub onset_s: f64,
    pub offset_s: f64,
    pub duration_ms: f64,
    pub amplitude_deg: f64,
    pub peak_velocity_dps: f64,
}

/// Half-open sample interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    fn overlaps(&self, other: &Interval) -> bool {
        self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundTruth {
    pub subject_id: String,
    pub condition: Condition,
    pub seed: u64,
    pub fs_hz: f64,
    pub n_samples: usize,
    pub saccades: Vec<TrueSaccade>,
    pub fixations: Vec<Interval>,
    pub blinks: Vec<Interval>,
    pub artifacts: Vec<Interval>,
}

fn place_gaps(
    rng: &mut ChaCha8Rng,
    n: usize,
    fs: f64,
    rate_per_min: f64,
    len_range: (usize, usize),
    taken: &[Interval],
    margin: usize,
) -> Result<Vec<Interval>, SynthError> {
    let mut out = Vec::new();
    if rate_per_min <= 0.0 {
        return Ok(out);
    }
    let exp = Exp::new(rate_per_min / 60.0).expect("positive rate");
    let mut t = 0.0;
    let mut retries = 0;
    loop {
        t += exp.sample(rng);
        let start = (t * fs).round() as usize;
        let len = rng.gen_range(len_range.0..=len_range.1);
        if start < margin || start + len + margin >= n {
            if start + len + margin >= n {
                break;
            }
            continue;
        }
        let iv = Interval {
            start,
            end: start + len,
        };
        let padded = Interval {
            start: start - margin,
            end: iv.end + margin,
        };
        let clash = taken.iter().chain(&out).any(|o| o.overlaps(&padded));
        if clash {
            retries += 1;
            if retries > PLACEMENT_RETRIES {
                return Err(SynthError::InfeasibleSpec(
                    "gap placement exceeded the retry budget".into(),
                ));
            }
            continue;
        }
        t = iv.end as f64 / fs;
        out.push(iv);
    }
    Ok(out)
}

fn inside(p: (f64, f64), range: (f64, f64)) -> bool {
    p.0.abs() <= range.0 && p.1.abs() <= range.1
}

fn next_target(rng: &mut ChaCha8Rng, spec: &SynthSpec, from: (f64, f64)) -> (f64, f64) {
    if !spec.clusters.is_empty() {
        let k = spec.clusters.len();
        loop {
            let c = spec.clusters[rng.gen_range(0..k)];
            let jitter = spec.amplitude_deg.0 * 0.1;
            let p = (
                c.0 + rng.gen_range(-jitter..=jitter),
                c.1 + rng.gen_range(-jitter..=jitter),
            );
            let a = ((p.0 - from.0).powi(2) + (p.1 - from.1).powi(2)).sqrt();
            if k == 1 || (a >= spec.amplitude_deg.0 && a <= 60.0) {
                return p;
            }
        }
    }
    let (a0, a1) = spec.amplitude_deg;
    let amp = if a1 > a0 { rng.gen_range(a0..=a1) } else { a0 };
    for _ in 0..32 {
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let p = (from.0 + amp * theta.cos(), from.1 + amp * theta.sin());
        if inside(p, spec.range_deg) {
            return p;
        }
    }
    let r = (from.0 * from.0 + from.1 * from.1).sqrt().max(1e-9);
    (from.0 - amp * from.0 / r, from.1 - amp * from.1 / r)
}

/// Generates one recording and its ground truth.
pub fn generate(
    spec: &SynthSpec,
    subject_id: &str,
    condition: Condition,
) -> Result<(GazeRecording, GroundTruth), SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let fs = spec.fs_hz;
    let n = (spec.duration_s * fs).round() as usize;
    let margin = spec.samples(GAP_MARGIN_MS);

    let art_len = (
        (spec.artifact_duration_s.0 * fs).ceil() as usize,
        (spec.artifact_duration_s.1 * fs).floor() as usize,
    );
    let artifacts = place_gaps(
        &mut rng,
        n,
        fs,
        spec.artifact_rate_per_min,
        (art_len.0, art_len.1.max(art_len.0)),
        &[],
        margin,
    )?;
    let blink_len = (
        (spec.blink_duration_ms.0 * fs / 1000.0).ceil() as usize,
        (spec.blink_duration_ms.1 * fs / 1000.0).floor() as usize,
    );
    if blink_len.0 > blink_len.1 {
        return Err(SynthError::InfeasibleSpec(
            "blink duration range holds no whole sample count".into(),
        ));
    }
    let mut blinks = place_gaps(
        &mut rng,
        n,
        fs,
        spec.blink_rate_per_min,
        blink_len,
        &artifacts,
        margin,
    )?;
    blinks.sort_by_key(|b| b.start);
    let mut gaps: Vec<Interval> = artifacts.iter().chain(&blinks).copied().collect();
    gaps.sort_by_key(|g| g.start);

    // Saccade schedule.
    let min_fix = spec.samples(spec.min_fixation_ms).max(1);
    let (d0, d1) = spec.saccade_duration_ms;
    let mean_cycle_s = if spec.saccade_rate_hz > 0.0 {
        1.0 / spec.saccade_rate_hz
    } else {
        f64::INFINITY
    };
    let extra_mean_s = mean_cycle_s - (d0 + d1) / 2000.0 - spec.min_fixation_ms / 1000.0;
    let extra = Exp::new(1.0 / extra_mean_s.max(1e-6)).expect("positive rate");

    let mut pos = (0.0, 0.0);
    if !spec.clusters.is_empty() {
        pos = spec.clusters[0];
    }
    let mut saccades: Vec<(TrueSaccade, (f64, f64), (f64, f64), f64)> = Vec::new();
    if spec.saccade_rate_hz > 0.0 {
        let mut onset = min_fix + (extra.sample(&mut rng) * fs) as usize;
        let mut retries = 0;
        loop {
            let target = next_target(&mut rng, spec, pos);
            let amp = ((target.0 - pos.0).powi(2) + (target.1 - pos.1).powi(2)).sqrt();
            let v = spec.main_sequence.peak_velocity(amp);
            let dur_ms = (std::f64::consts::PI * amp / (2.0 * v) * 1000.0).clamp(d0, d1);
            let dur_samples = dur_ms * fs / 1000.0;
            let end = onset + dur_samples.ceil() as usize;
            if end + min_fix >= n {
                break;
            }
            let padded = Interval {
                start: onset.saturating_sub(margin),
                end: end + margin,
            };
            if let Some(g) = gaps.iter().find(|g| g.overlaps(&padded)) {
                onset = g.end + margin;
                retries += 1;
                if retries > PLACEMENT_RETRIES {
                    return Err(SynthError::InfeasibleSpec(
                        "saccade placement exceeded the retry budget".into(),
                    ));
                }
                continue;
            }
            let peak = std::f64::consts::PI * amp / (2.0 * dur_ms / 1000.0);
            saccades.push((
                TrueSaccade {
                    onset_idx: onset,
                    offset_idx: end,
                    onset_s: onset as f64 / fs,
                    offset_s: onset as f64 / fs + dur_ms / 1000.0,
                    duration_ms: dur_ms,
                    amplitude_deg: amp,
                    peak_velocity_dps: peak,
                },
                pos,
                target,
                dur_samples,
            ));
            pos = target;
            onset = end + min_fix + (extra.sample(&mut rng) * fs).round() as usize;
        }
    }

    // Position traces: fixation centers stepped by raised cosines, plus drift and noise.
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut center = if spec.clusters.is_empty() {
        (0.0, 0.0)
    } else {
        spec.clusters[0]
    };
    let mut k = 0;
    for i in 0..n {
        while k < saccades.len() && i >= saccades[k].0.offset_idx {
            center = saccades[k].2;
            k += 1;
        }
        let (cx, cy) = match saccades.get(k) {
            Some((s, p0, p1, d)) if i >= s.onset_idx => {
                let tau = ((i - s.onset_idx) as f64 / d).min(1.0);
                let w = (1.0 - (std::f64::consts::PI * tau).cos()) / 2.0;
                (p0.0 + (p1.0 - p0.0) * w, p0.1 + (p1.1 - p0.1) * w)
            }
            _ => center,
        };
        x[i] = cx;
        y[i] = cy;
    }
    let step_sd = spec.drift_deg_per_sqrt_s / fs.sqrt();
    let (mut dx, mut dy) = (0.0, 0.0);
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    for i in 0..n {
        dx += step_sd * noise.sample(&mut rng);
        dy += step_sd * noise.sample(&mut rng);
        // Keep the drift bounded so gaze stays on screen in long recordings.
        dx *= 0.9999;
        dy *= 0.9999;
        x[i] += spec.center_deg.0 + dx + spec.fixation_noise_deg * noise.sample(&mut rng);
        y[i] += spec.center_deg.1 + dy + spec.fixation_noise_deg * noise.sample(&mut rng);
    }

    let mut gaze_valid = vec![true; n];
    let mut left = MaskedSeries {
        values: vec![0.0; n],
        valid: vec![true; n],
    };
    let mut right = left.clone();
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    for i in 0..n {
        let t = i as f64 / fs;
        let slow = 0.2 * (0.05 * std::f64::consts::TAU * t + phase).sin();
        left.values[i] = spec.pupil_mm + slow + 0.03 * noise.sample(&mut rng);
        right.values[i] = spec.pupil_mm + 0.1 + slow + 0.03 * noise.sample(&mut rng);
    }
    for g in &gaps {
        for i in g.start..g.end {
            gaze_valid[i] = false;
            left.valid[i] = false;
            right.valid[i] = false;
            x[i] = 0.0;
            y[i] = 0.0;
            left.values[i] = 0.0;
            right.values[i] = 0.0;
        }
    }

    let fixations = saccades
        .windows(2)
        .map(|w| Interval {
            start: w[0].0.offset_idx,
            end: w[1].0.onset_idx,
        })
        .collect();
    let truth = GroundTruth {
        subject_id: subject_id.to_string(),
        condition,
        seed: spec.seed,
        fs_hz: fs,
        n_samples: n,
        saccades: saccades.iter().map(|s| s.0).collect(),
        fixations,
        blinks,
        artifacts,
    };
    let rec = GazeRecording {
        subject_id: subject_id.to_string(),
        condition,
        fs_hz: fs,
        x_deg: x,
        y_deg: y,
        gaze_valid,
        pupil_left_mm: left,
        pupil_right_mm: right,
    };
    Ok((rec, truth))
}

/// Log-scale SDs of per-subject multiplicative random effects shared across
/// a subject's conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubjectVariation {
    pub saccade_rate: f64,
    pub amplitude: f64,
    pub noise: f64,
    pub blink_rate: f64,
    pub pupil: f64,
}

impl Default for SubjectVariation {
    fn default() -> Self {
        Self {
            saccade_rate: 0.2,
            amplitude: 0.15,
            noise: 0.15,
            blink_rate: 0.3,
            pupil: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortSpec {
    pub seed: u64,
    pub n_subjects: usize,
    /// Indexed by `Condition::index()`.
    pub conditions: [SynthSpec; 3],
    pub variation: SubjectVariation,
}

impl CohortSpec {
    /// Study layout: 15 min Baseline, 10 min Ride, 2 min Fog, no condition effects.
    pub fn study(n_subjects: usize, seed: u64) -> Self {
        let base = SynthSpec::default();
        let with = |d: f64| SynthSpec {
            duration_s: d,
            ..base.clone()
        };
        Self {
            seed,
            n_subjects,
            conditions: [with(900.0), with(600.0), with(120.0)],
            variation: SubjectVariation::default(),
        }
    }

    /// Identical specs for all three conditions.
    pub fn null(n_subjects: usize, seed: u64, spec: SynthSpec) -> Self {
        Self {
            seed,
            n_subjects,
            conditions: [spec.clone(), spec.clone(), spec],
            variation: SubjectVariation::default(),
        }
    }

    pub fn subject_id(&self, subject: usize) -> String {
        let width = self.n_subjects.to_string().len().max(2);
        format!("S{:0width$}", subject + 1)
    }

    fn stream(&self, subject: usize, slot: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(subject as u64 * 4 + slot);
        rng
    }

    /// The spec of one recording with subject effects and a derived seed applied.
    pub fn recording_spec(&self, subject: usize, condition: Condition) -> SynthSpec {
        let mut fx = self.stream(subject, 3);
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let mut factor = |sd: f64| (sd * normal.sample(&mut fx)).exp();
        let v = self.variation;
        let rate = factor(v.saccade_rate);
        let amp = factor(v.amplitude);
        let noise = factor(v.noise);
        let blink = factor(v.blink_rate);
        let pupil = factor(v.pupil);

        let mut spec = self.conditions[condition.index()].clone();
        let max_rate = 1000.0 / (spec.saccade_duration_ms.1 + spec.min_fixation_ms);
        spec.saccade_rate_hz = (spec.saccade_rate_hz * rate).min(0.9 * max_rate);
        let (a0, a1) = spec.amplitude_deg;
        spec.amplitude_deg = ((a0 * amp).min(60.0), (a1 * amp).min(60.0));
        spec.fixation_noise_deg *= noise;
        spec.blink_rate_per_min *= blink;
        spec.pupil_mm *= pupil;
        spec.seed = self.stream(subject, condition.index() as u64).gen();
        spec
    }

    pub fn generate_recording(
        &self,
        subject: usize,
        condition: Condition,
    ) -> Result<(GazeRecording, GroundTruth), SynthError> {
        let spec = self.recording_spec(subject, condition);
        generate(&spec, &self.subject_id(subject), condition)
    }
}

/// Every recording of a cohort, subject-major in condition order.
pub fn generate_cohort(spec: &CohortSpec) -> Result<Vec<(GazeRecording, GroundTruth)>, SynthError> {
    if spec.n_subjects == 0 {
        return Err(SynthError::InfeasibleSpec("cohort needs at least one subject".into()));
    }
    let mut out = Vec::with_capacity(spec.n_subjects * 3);
    for s in 0..spec.n_subjects {
        for c in Condition::ALL {
            out.push(spec.generate_recording(s, c)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet() -> SynthSpec {
        SynthSpec {
            saccade_rate_hz: 0.0,
            blink_rate_per_min: 0.0,
            ..SynthSpec::default()
        }
    }

    #[test]
    fn pure_fixation() {
        let (rec, gt) = generate(&quiet(), "s", Condition::Baseline).unwrap();
        assert_eq!(rec.len(), 6000);
        assert!(gt.saccades.is_empty() && gt.blinks.is_empty());
        assert!(rec.gaze_valid.iter().all(|v| *v));
    }

    #[test]
    fn saccade_count_tracks_rate() {
        let spec = SynthSpec {
            blink_rate_per_min: 0.0,
            ..SynthSpec::default()
        };
        let (_, gt) = generate(&spec, "s", Condition::Ride).unwrap();
        let n = gt.saccades.len() as f64;
        assert!((100.0..=140.0).contains(&n), "{n}");
    }

    #[test]
    fn deterministic() {
        let spec = SynthSpec {
            seed: 42,
            ..SynthSpec::default()
        };
        let a = generate(&spec, "s", Condition::Fog).unwrap();
        let b = generate(&spec, "s", Condition::Fog).unwrap();
        assert_eq!(a, b);
        let c = generate(&SynthSpec { seed: 43, ..spec }, "s", Condition::Fog).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn events_are_disjoint_and_in_range() {
        let spec = SynthSpec {
            seed: 9,
            duration_s: 300.0,
            artifact_rate_per_min: 0.5,
            ..SynthSpec::default()
        };
        let (rec, gt) = generate(&spec, "s", Condition::Baseline).unwrap();
        let mut all: Vec<Interval> = gt
            .saccades
            .iter()
            .map(|s| Interval {
                start: s.onset_idx,
                end: s.offset_idx,
            })
            .chain(gt.blinks.iter().copied())
            .chain(gt.artifacts.iter().copied())
            .collect();
        all.sort_by_key(|i| i.start);
        for w in all.windows(2) {
            assert!(w[0].end <= w[1].start, "{:?}", w);
        }
        for s in &gt.saccades {
            assert!((20.0..=80.0).contains(&s.duration_ms));
            assert!(s.amplitude_deg > 0.0 && s.amplitude_deg <= 60.0);
            assert!(s.peak_velocity_dps <= 500.0 + 1e-9);
        }
        for b in &gt.blinks {
            let ms = b.len() as f64 * 10.0;
            assert!((150.0..=400.0).contains(&ms));
        }
        for a in &gt.artifacts {
            assert!(a.len() > 200);
        }
        let g = crate::model::ScreenGeometry::default();
        for i in 0..rec.len() {
            if rec.gaze_valid[i] {
                let (nx, ny) = g.deg_to_norm(rec.x_deg[i], rec.y_deg[i]);
                assert!((0.0..=1.0).contains(&nx) && (0.0..=1.0).contains(&ny));
            }
        }
    }

    #[test]
    fn infeasible_specs() {
        let too_fast = SynthSpec {
            saccade_rate_hz: 10.0,
            ..SynthSpec::default()
        };
        assert!(generate(&too_fast, "s", Condition::Ride).is_err());
        let bad_amp = SynthSpec {
            amplitude_deg: (0.0, 5.0),
            ..SynthSpec::default()
        };
        assert!(bad_amp.validate().is_err());
        let negative = SynthSpec {
            blink_rate_per_min: -1.0,
            ..SynthSpec::default()
        };
        assert!(negative.validate().is_err());
    }

    #[test]
    fn cohort_shape_and_lengths() {
        let mut spec = CohortSpec::study(24, 1);
        for c in spec.conditions.iter_mut() {
            c.duration_s /= 30.0;
        }
        let all = generate_cohort(&spec).unwrap();
        assert_eq!(all.len(), 72);
        for (k, (rec, _)) in all.iter().enumerate() {
            let expected = [3000, 2000, 400][k % 3];
            assert_eq!(rec.len(), expected);
        }
        assert_eq!(all[0].0.subject_id, "S01");
        assert_eq!(all[71].0.subject_id, "S24");
    }

    #[test]
    fn subject_effects_are_shared_across_conditions() {
        let spec = CohortSpec::null(4, 7, SynthSpec::default());
        let a = spec.recording_spec(2, Condition::Baseline);
        let b = spec.recording_spec(2, Condition::Fog);
        assert_eq!(a.saccade_rate_hz, b.saccade_rate_hz);
        assert_eq!(a.fixation_noise_deg, b.fixation_noise_deg);
        assert_ne!(a.seed, b.seed);
        let other = spec.recording_spec(3, Condition::Baseline);
        assert_ne!(a.saccade_rate_hz, other.saccade_rate_hz);
    }
}

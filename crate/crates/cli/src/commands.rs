use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use oculomotor::ingest::{parse_recording, validate_cohort, write_recording};
use oculomotor::pipeline::{extract_features, PipelineConfig};
use oculomotor::stats::{run_report, StatsConfig};
use oculomotor::synth::{CohortSpec, SynthSpec};
use oculomotor::table::{read_feature_table_file, write_feature_table, write_plot_data};
use oculomotor::{Condition, FeatureVector, IngestError, StatsError, SynthError, TableError};

use crate::{ExtractArgs, PlotDataArgs, StatsArgs, SynthArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Complete,
    Partial,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("every recording failed; nothing written")]
    AllFailed,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

/// A multiplicative change applied to one condition's synthesis spec.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    pub condition: Condition,
    pub knob: Knob,
    pub factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Knob {
    SaccadeRate,
    Amplitude,
    Noise,
    Drift,
    BlinkRate,
    Pupil,
}

impl FromStr for Effect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (cond, rest) = s.split_once(':').ok_or("expected CONDITION:KNOB=FACTOR")?;
        let (knob, factor) = rest.split_once('=').ok_or("expected CONDITION:KNOB=FACTOR")?;
        let condition = cond.parse().map_err(|e: oculomotor::ModelError| e.to_string())?;
        let knob = match knob.trim() {
            "saccade_rate" => Knob::SaccadeRate,
            "amplitude" => Knob::Amplitude,
            "noise" => Knob::Noise,
            "drift" => Knob::Drift,
            "blink_rate" => Knob::BlinkRate,
            "pupil" => Knob::Pupil,
            other => return Err(format!("unknown knob `{other}`")),
        };
        let factor: f64 = factor.trim().parse().map_err(|_| format!("bad factor `{factor}`"))?;
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(format!("factor must be finite and non-negative, got {factor}"));
        }
        Ok(Effect {
            condition,
            knob,
            factor,
        })
    }
}

impl Effect {
    fn apply(&self, spec: &mut SynthSpec) {
        let f = self.factor;
        match self.knob {
            Knob::SaccadeRate => spec.saccade_rate_hz *= f,
            Knob::Amplitude => spec.amplitude_deg = (spec.amplitude_deg.0 * f, spec.amplitude_deg.1 * f),
            Knob::Noise => spec.fixation_noise_deg *= f,
            Knob::Drift => spec.drift_deg_per_sqrt_s *= f,
            Knob::BlinkRate => spec.blink_rate_per_min *= f,
            Knob::Pupil => spec.pupil_mm *= f,
        }
    }
}

pub fn synth(a: &SynthArgs) -> Result<Status, CliError> {
    if a.subjects == 0 {
        return Err(CliError::Usage("--subjects must be at least 1".into()));
    }
    let geometry = a.acq.geometry().map_err(CliError::Usage)?;
    let mut cohort = CohortSpec::study(a.subjects, a.seed);
    for (spec, d) in cohort.conditions.iter_mut().zip(a.durations) {
        spec.duration_s = d;
        spec.fs_hz = a.acq.fs;
    }
    for e in &a.effects {
        e.apply(&mut cohort.conditions[e.condition.index()]);
    }
    for spec in &cohort.conditions {
        spec.validate()?;
    }
    std::fs::create_dir_all(&a.out).map_err(io_err(&a.out))?;

    let jobs: Vec<(usize, Condition)> = (0..a.subjects)
        .flat_map(|s| Condition::ALL.map(|c| (s, c)))
        .collect();
    jobs.par_iter().try_for_each(|&(s, c)| -> Result<(), CliError> {
        let (rec, truth) = cohort.generate_recording(s, c)?;
        let stem = format!("{}_{}", rec.subject_id, c.file_token());
        let csv_path = a.out.join(format!("{stem}.csv"));
        let mut w = create(&csv_path)?;
        write_recording(&rec, &geometry, &mut w).map_err(|e| CliError::Io {
            path: csv_path.display().to_string(),
            source: e.into(),
        })?;
        w.flush().map_err(io_err(&csv_path))?;
        let json_path = a.out.join(format!("{stem}.truth.json"));
        let mut w = create(&json_path)?;
        serde_json::to_writer_pretty(&mut w, &truth).map_err(|e| CliError::Io {
            path: json_path.display().to_string(),
            source: e.into(),
        })?;
        w.write_all(b"\n").and_then(|_| w.flush()).map_err(io_err(&json_path))?;
        Ok(())
    })?;
    log::info!("wrote {} recordings to {}", jobs.len(), a.out.display());
    Ok(Status::Complete)
}

pub fn extract(a: &ExtractArgs) -> Result<Status, CliError> {
    let geometry = a.acq.geometry().map_err(CliError::Usage)?;
    if !(a.acq.fs > 0.0 && a.acq.fs.is_finite()) {
        return Err(IngestError::InvalidRate.into());
    }
    if !(a.prl_mass > 0.0 && a.prl_mass < 1.0) {
        return Err(CliError::Usage("--prl-mass must lie in (0, 1)".into()));
    }
    let listing = validate_cohort(&a.input)?;
    for ex in &listing.excluded {
        log::warn!("excluded subject {}: {}", ex.subject_id, ex.reason);
    }
    for p in &listing.ignored {
        log::warn!("ignored {}: name is not <subject>_<condition>.csv", p.display());
    }
    if listing.included.is_empty() {
        return Err(IngestError::NoRecordingsFound(a.input.clone()).into());
    }

    let cfg = PipelineConfig {
        prl_mass: a.prl_mass,
        ..PipelineConfig::default()
    };
    let results: Vec<Result<FeatureVector, String>> = listing
        .included
        .par_iter()
        .map(|entry| {
            let rec = parse_recording(&entry.path, &geometry, a.acq.fs).map_err(|e| e.to_string())?;
            extract_features(&rec, &cfg).map_err(|e| e.to_string())
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut failed = 0usize;
    for (entry, r) in listing.included.iter().zip(results) {
        match r {
            Ok(fv) => rows.push(fv),
            Err(e) => {
                failed += 1;
                log::error!("{}: {e}", entry.path.display());
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::AllFailed);
    }
    let mut w = create(&a.out)?;
    write_feature_table(&rows, &mut w)?;
    w.flush().map_err(io_err(&a.out))?;
    log::info!(
        "{} of {} recordings extracted to {}",
        rows.len(),
        listing.included.len(),
        a.out.display()
    );
    Ok(if failed > 0 { Status::Partial } else { Status::Complete })
}

pub fn stats(a: &StatsArgs) -> Result<Status, CliError> {
    let rows = read_feature_table_file(&a.input)?;
    let report = run_report(&rows, &StatsConfig { d_bands: a.d_bands })?;
    for f in &report.features {
        if let Some(reason) = &f.skipped {
            log::warn!("feature {} not tested: {reason}", f.name);
        }
    }
    let mut w = create(&a.out)?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(|e| CliError::Io {
        path: a.out.display().to_string(),
        source: e.into(),
    })?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(io_err(&a.out))?;
    log::info!(
        "{} subjects, {} significant post-hoc rows",
        report.n_subjects,
        report.posthoc.len()
    );
    Ok(Status::Complete)
}

pub fn plot_data(a: &PlotDataArgs) -> Result<Status, CliError> {
    let rows = read_feature_table_file(&a.input)?;
    let paths = write_plot_data(&rows, &a.out)?;
    log::info!("wrote {} files to {}", paths.len(), a.out.display());
    Ok(Status::Complete)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effect_parse() {
        let e: Effect = "fog:blink_rate=2.5".parse().unwrap();
        assert_eq!(e.condition, Condition::Fog);
        assert_eq!(e.knob, Knob::BlinkRate);
        assert_eq!(e.factor, 2.5);
        assert!("fog:blink=2".parse::<Effect>().is_err());
        assert!("night:noise=2".parse::<Effect>().is_err());
        assert!("ride:noise=-1".parse::<Effect>().is_err());
        assert!("ride-noise".parse::<Effect>().is_err());
    }

    #[test]
    fn effect_apply() {
        let mut s = SynthSpec::default();
        let base = s.blink_rate_per_min;
        "ride:blink_rate=2".parse::<Effect>().unwrap().apply(&mut s);
        assert_eq!(s.blink_rate_per_min, 2.0 * base);
    }
}

//! Recording files: parsing, validity rules, uniform-grid snapping, cohort discovery.
//!
//! The canonical export schema is a UTF-8 CSV with the exact header
//! `t,gaze2d_x,gaze2d_y,pupil_left,pupil_right,validity`. Gaze coordinates are
//! normalized screen proportions; pupils are millimeters; `validity` is the
//! combined tracker flag (`valid` or anything else).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::IngestError;
use crate::model::{Condition, GazeRecording, GazeSample, MaskedSeries, ScreenGeometry};

pub const CANONICAL_HEADER: [&str; 6] = [
    "t",
    "gaze2d_x",
    "gaze2d_y",
    "pupil_left",
    "pupil_right",
    "validity",
];

/// Pupil diameters outside `(0, PUPIL_MAX_MM]` are demoted to missing.
pub const PUPIL_MAX_MM: f64 = 10.0;

fn parse_optional(field: &str, row: usize, name: &str) -> Result<Option<f64>, IngestError> {
    let s = field.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("nan") {
        return Ok(None);
    }
    let v: f64 = s.parse().map_err(|_| IngestError::UnparseableNumeric {
        row,
        field: name.to_string(),
    })?;
    Ok(v.is_finite().then_some(v))
}

fn in_unit(v: Option<f64>) -> Option<f64> {
    v.filter(|v| (0.0..=1.0).contains(v))
}

fn plausible_pupil(v: Option<f64>) -> Option<f64> {
    v.filter(|v| *v > 0.0 && *v <= PUPIL_MAX_MM)
}

/// Parses the canonical CSV rows into validated samples. Gaze outside
/// `[0, 1]`, implausible pupils and every field of a row not flagged
/// `valid` come back as `None`.
pub fn read_samples<R: Read>(reader: R) -> Result<Vec<GazeSample>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|_| IngestError::EmptyFile)?
        .clone();
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found.iter().all(|f| f.is_empty()) {
        return Err(IngestError::EmptyFile);
    }
    if found != CANONICAL_HEADER {
        return Err(IngestError::MalformedHeader {
            expected: CANONICAL_HEADER.join(","),
            found: found.join(","),
        });
    }

    let mut out = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 1;
        let rec = rec.map_err(|_| IngestError::RaggedRow { row })?;
        if rec.len() != CANONICAL_HEADER.len() {
            return Err(IngestError::RaggedRow { row });
        }
        let t = parse_optional(&rec[0], row, "t")?
            .filter(|t| *t >= 0.0)
            .ok_or_else(|| IngestError::UnparseableNumeric {
                row,
                field: "t".into(),
            })?;
        if t < last_t {
            return Err(IngestError::NonMonotonicTimestamps { row });
        }
        last_t = t;

        let valid = rec[5].trim().eq_ignore_ascii_case("valid");
        let gx = parse_optional(&rec[1], row, "gaze2d_x")?;
        let gy = parse_optional(&rec[2], row, "gaze2d_y")?;
        let pl = parse_optional(&rec[3], row, "pupil_left")?;
        let pr = parse_optional(&rec[4], row, "pupil_right")?;

        let (gx, gy) = match (in_unit(gx), in_unit(gy)) {
            (Some(x), Some(y)) if valid => (Some(x), Some(y)),
            _ => (None, None),
        };
        out.push(GazeSample {
            t,
            gaze_norm_x: gx,
            gaze_norm_y: gy,
            pupil_left_mm: if valid { plausible_pupil(pl) } else { None },
            pupil_right_mm: if valid { plausible_pupil(pr) } else { None },
            valid,
        });
    }
    if out.is_empty() {
        return Err(IngestError::EmptyFile);
    }
    Ok(out)
}

/// Snaps samples onto a uniform grid at `fs_hz` (nearest bin; the last row
/// wins a bin; empty bins are missing) and converts gaze to degrees.
pub fn build_recording(
    samples: &[GazeSample],
    subject_id: &str,
    condition: Condition,
    geometry: &ScreenGeometry,
    fs_hz: f64,
) -> Result<GazeRecording, IngestError> {
    if !(fs_hz.is_finite() && fs_hz > 0.0) {
        return Err(IngestError::InvalidRate);
    }
    let last = samples.last().ok_or(IngestError::EmptyFile)?;
    let n = (last.t * fs_hz).round() as usize + 1;

    let mut x_deg = vec![0.0; n];
    let mut y_deg = vec![0.0; n];
    let mut gaze_valid = vec![false; n];
    let mut left = MaskedSeries::missing(n);
    let mut right = MaskedSeries::missing(n);

    for s in samples {
        let bin = (s.t * fs_hz).round() as usize;
        match (s.gaze_norm_x, s.gaze_norm_y) {
            (Some(nx), Some(ny)) => {
                let (dx, dy) = geometry.norm_to_deg(nx, ny);
                x_deg[bin] = dx;
                y_deg[bin] = dy;
                gaze_valid[bin] = true;
            }
            _ => {
                x_deg[bin] = 0.0;
                y_deg[bin] = 0.0;
                gaze_valid[bin] = false;
            }
        }
        left.set(bin, s.pupil_left_mm);
        right.set(bin, s.pupil_right_mm);
    }

    Ok(GazeRecording {
        subject_id: subject_id.to_string(),
        condition,
        fs_hz,
        x_deg,
        y_deg,
        gaze_valid,
        pupil_left_mm: left,
        pupil_right_mm: right,
    })
}

/// Splits `<subject>_<condition>` at the last underscore.
pub fn parse_file_stem(stem: &str) -> Option<(String, Condition)> {
    let (subject, cond) = stem.rsplit_once('_')?;
    if subject.is_empty() {
        return None;
    }
    let cond = cond.parse().ok()?;
    Some((subject.to_string(), cond))
}

pub fn parse_reader<R: Read>(
    reader: R,
    subject_id: &str,
    condition: Condition,
    geometry: &ScreenGeometry,
    fs_hz: f64,
) -> Result<GazeRecording, IngestError> {
    let samples = read_samples(reader)?;
    build_recording(&samples, subject_id, condition, geometry, fs_hz)
}

/// Parses `<subject>_<condition>.csv` into a [`GazeRecording`].
pub fn parse_recording(
    path: &Path,
    geometry: &ScreenGeometry,
    fs_hz: f64,
) -> Result<GazeRecording, IngestError> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    let (subject, condition) =
        parse_file_stem(stem).ok_or_else(|| IngestError::BadFileName(path.display().to_string()))?;
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_reader(
        std::io::BufReader::new(file),
        &subject,
        condition,
        geometry,
        fs_hz,
    )
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes a recording back out in the canonical schema.
pub fn write_recording<W: Write>(
    rec: &GazeRecording,
    geometry: &ScreenGeometry,
    writer: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CANONICAL_HEADER)?;
    for i in 0..rec.len() {
        let t = i as f64 / rec.fs_hz;
        let (gx, gy) = if rec.gaze_valid[i] {
            let (nx, ny) = geometry.deg_to_norm(rec.x_deg[i], rec.y_deg[i]);
            (Some(nx), Some(ny))
        } else {
            (None, None)
        };
        let pl = rec.pupil_left_mm.get(i);
        let pr = rec.pupil_right_mm.get(i);
        let any = gx.is_some() || pl.is_some() || pr.is_some();
        w.write_record([
            t.to_string(),
            fmt_opt(gx),
            fmt_opt(gy),
            fmt_opt(pl),
            fmt_opt(pr),
            if any { "valid" } else { "invalid" }.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohortEntry {
    pub subject_id: String,
    pub condition: Condition,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exclusion {
    pub subject_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CohortListing {
    /// Sorted by subject, then condition.
    pub included: Vec<CohortEntry>,
    pub excluded: Vec<Exclusion>,
    /// CSV files whose names do not follow the naming convention.
    pub ignored: Vec<PathBuf>,
}

impl CohortListing {
    pub fn subjects(&self) -> Vec<String> {
        let mut s: Vec<String> = self.included.iter().map(|e| e.subject_id.clone()).collect();
        s.dedup();
        s
    }
}

/// Lists `<subject>_<condition>.csv` files in `dir`; subjects lacking any of
/// the three conditions are excluded with a reason.
pub fn validate_cohort(dir: &Path) -> Result<CohortListing, IngestError> {
    let rd = std::fs::read_dir(dir).map_err(|source| IngestError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut by_subject: BTreeMap<String, BTreeMap<Condition, PathBuf>> = BTreeMap::new();
    let mut ignored = Vec::new();
    for entry in rd {
        let entry = entry.map_err(|source| IngestError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        if !path.is_file() || path.extension().and_then(|e| e.to_str()) != Some("csv") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        match parse_file_stem(stem) {
            Some((subject, cond)) => {
                by_subject.entry(subject).or_default().insert(cond, path);
            }
            None => ignored.push(path),
        }
    }
    if by_subject.is_empty() {
        return Err(IngestError::NoRecordingsFound(dir.to_path_buf()));
    }
    ignored.sort();

    let mut listing = CohortListing {
        ignored,
        ..Default::default()
    };
    for (subject, files) in by_subject {
        if files.len() == Condition::ALL.len() {
            for (condition, path) in files {
                listing.included.push(CohortEntry {
                    subject_id: subject.clone(),
                    condition,
                    path,
                });
            }
        } else {
            let have: Vec<&str> = files.keys().map(|c| c.file_token()).collect();
            listing.excluded.push(Exclusion {
                subject_id: subject,
                reason: format!("incomplete conditions (found: {})", have.join(", ")),
            });
        }
    }
    Ok(listing)
}

//! Feature table and per-feature long-format files.
//!
//! The table is CSV with header `subject_id,condition` followed by the 31
//! feature names. MISSING is an empty field. Values are written with the
//! shortest representation that parses back to the same `f64`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::TableError;
use crate::model::{feature_names, Condition, FeatureVector, N_FEATURES};

fn header() -> Vec<&'static str> {
    let mut h = vec!["subject_id", "condition"];
    h.extend(feature_names().iter().map(|d| d.name));
    h
}

fn fmt_value(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_feature_table<W: Write>(rows: &[FeatureVector], writer: W) -> Result<(), TableError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header())?;
    for r in rows {
        if r.values.len() != N_FEATURES {
            return Err(TableError::MalformedTable(format!(
                "row for {} has {} values",
                r.subject_id,
                r.values.len()
            )));
        }
        let mut rec = vec![r.subject_id.clone(), r.condition.to_string()];
        rec.extend(r.values.iter().map(|v| fmt_value(*v)));
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_feature_table<R: Read>(reader: R) -> Result<Vec<FeatureVector>, TableError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let found: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
    let expected = header();
    if found != expected {
        return Err(TableError::MalformedTable(format!(
            "header mismatch: expected {} columns starting `subject_id,condition`, found `{}`",
            expected.len(),
            found.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != expected.len() {
            return Err(TableError::MalformedTable(format!(
                "line {line}: {} fields, expected {}",
                rec.len(),
                expected.len()
            )));
        }
        let subject = rec[0].trim();
        if subject.is_empty() {
            return Err(TableError::MalformedTable(format!("line {line}: empty subject_id")));
        }
        let condition: Condition = rec[1]
            .parse()
            .map_err(|_| TableError::MalformedTable(format!("line {line}: bad condition `{}`", &rec[1])))?;
        let mut fv = FeatureVector::empty(subject, condition);
        for (k, field) in rec.iter().skip(2).enumerate() {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let v: f64 = field.parse().map_err(|_| {
                TableError::MalformedTable(format!("line {line}: `{field}` in {} is not a number", expected[k + 2]))
            })?;
            fv.values[k] = Some(v);
        }
        rows.push(fv);
    }
    Ok(rows)
}

pub fn read_feature_table_file(path: &Path) -> Result<Vec<FeatureVector>, TableError> {
    read_feature_table(std::io::BufReader::new(File::open(path)?))
}

/// One `<feature>.csv` per feature with columns `subject,condition,value`,
/// rows in table order, missing values omitted. Returns the written paths.
pub fn write_plot_data(rows: &[FeatureVector], dir: &Path) -> Result<Vec<PathBuf>, TableError> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(N_FEATURES);
    for (k, def) in feature_names().iter().enumerate() {
        let path = dir.join(format!("{}.csv", def.name));
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
        w.write_record(["subject", "condition", "value"])?;
        for r in rows {
            if let Some(v) = r.values[k] {
                w.write_record([r.subject_id.as_str(), r.condition.as_str(), &v.to_string()])?;
            }
        }
        w.flush()?;
        paths.push(path);
    }
    Ok(paths)
}

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("screen geometry fields must be strictly positive")]
    InvalidGeometry,
    #[error("unknown condition `{0}`")]
    UnknownCondition(String),
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed header: expected `{expected}`, found `{found}`")]
    MalformedHeader { expected: String, found: String },
    #[error("timestamps decrease at data row {row}")]
    NonMonotonicTimestamps { row: usize },
    #[error("file contains no data rows")]
    EmptyFile,
    #[error("unparseable numeric field `{field}` at data row {row}")]
    UnparseableNumeric { row: usize, field: String },
    #[error("wrong number of fields at data row {row}")]
    RaggedRow { row: usize },
    #[error("file name `{0}` does not follow `<subject>_<condition>.csv`")]
    BadFileName(String),
    #[error("no recordings found in {0}")]
    NoRecordingsFound(PathBuf),
    #[error("sampling rate must be positive")]
    InvalidRate,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum FilterError {
    #[error("Savitzky-Golay window {window} must be odd and larger than order {order}")]
    InvalidWindow { window: usize, order: usize },
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum KinematicsError {
    #[error("segment of {len} samples is too short for central differences")]
    SegmentTooShort { len: usize },
    #[error("x and y traces differ in length")]
    LengthMismatch,
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum DetectionError {
    #[error("only {found} samples eligible for threshold estimation, need {needed}")]
    TooFewSamples { found: usize, needed: usize },
    #[error("velocity pool below the threshold has zero spread")]
    DegenerateVelocity,
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum DispersionError {
    #[error("gaze distribution is degenerate (zero spread or |rho| = 1)")]
    DegenerateDistribution,
    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { found: usize, needed: usize },
    #[error("series of {len} samples is too short for entropy estimation")]
    SeriesTooShort { len: usize },
    #[error("no template matches at length m; entropy undefined")]
    UndefinedEntropy,
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum BlinkError {
    #[error("analyzed duration must be positive, got {0} s")]
    NonPositiveDuration(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("feature `{0}` has no observed value in some condition")]
    AllMissingFeature(String),
    #[error("sample of {0} values outside the supported range")]
    SampleTooSmall(usize),
    #[error("sample has zero variance")]
    ZeroVariance,
    #[error("conditions have unequal numbers of observations")]
    UnequalN,
    #[error("paired samples have different lengths")]
    LengthMismatch,
    #[error("all paired differences are zero")]
    AllZeroDifferences,
    #[error("effect value {0} is out of range")]
    OutOfRange(f64),
    #[error("need at least {needed} complete subjects, got {found}")]
    TooFewSubjects { found: usize, needed: usize },
    #[error("invalid effect-size band specification: {0}")]
    InvalidBands(String),
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("could not place events without overlap: {0}")]
    InfeasibleSpec(String),
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("malformed feature table: {0}")]
    MalformedTable(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("invalid stats: {0}")]
    InvalidStats(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("channel {channel} has a degenerate range (min = max = {value})")]
    DegenerateRange { channel: &'static str, value: f64 },
    #[error("point ({lat}, {lon}) lies outside the grid")]
    PointOutsideGrid { lat: f64, lon: f64 },
    #[error("patch {height}x{width} at ({row0}, {col0}) exceeds a {rows}x{cols} field")]
    PatchOutOfBounds {
        row0: usize,
        col0: usize,
        height: usize,
        width: usize,
        rows: usize,
        cols: usize,
    },
    #[error("{rows}x{cols} field is not divisible by factor {factor}")]
    NonDivisibleDecimation { rows: usize, cols: usize, factor: usize },
    #[error("target grid is not covered by the source grid")]
    TargetNotCovered,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("field needs at least 2 values, got {0}")]
    DegenerateField(usize),
    #[error("field {rows}x{cols} is smaller than 4x4")]
    FieldTooSmall { rows: usize, cols: usize },
    #[error("no spectral bin has energy above the floor")]
    EmptySpectrum,
    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
    #[error("evaluation grid must be strictly ascending")]
    BadGrid,
    #[error("sample set is empty")]
    EmptySamples,
    #[error("invalid power curve: {0}")]
    InvalidCurve(String),
    #[error("time misalignment: {0}")]
    TimeMisalignment(String),
    #[error("downscaling task needs an auxiliary high-resolution dataset")]
    MissingAux,
    #[error("invalid dataset format in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable code for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "invalid-grid",
            Error::InvalidField(_) => "invalid-field",
            Error::InvalidSeries(_) => "invalid-series",
            Error::InvalidStats(_) => "invalid-stats",
            Error::InvalidConfig(_) => "invalid-config",
            Error::EmptyTrainingSet => "empty-training-set",
            Error::DegenerateRange { .. } => "degenerate-range",
            Error::PointOutsideGrid { .. } => "point-outside-grid",
            Error::PatchOutOfBounds { .. } => "patch-out-of-bounds",
            Error::NonDivisibleDecimation { .. } => "non-divisible-decimation",
            Error::TargetNotCovered => "target-not-covered",
            Error::ShapeMismatch(_) => "shape-mismatch",
            Error::DegenerateField(_) => "degenerate-field",
            Error::FieldTooSmall { .. } => "field-too-small",
            Error::EmptySpectrum => "empty-spectrum",
            Error::DegenerateSamples(_) => "degenerate-samples",
            Error::BadGrid => "bad-grid",
            Error::EmptySamples => "empty-samples",
            Error::InvalidCurve(_) => "invalid-curve",
            Error::TimeMisalignment(_) => "time-misalignment",
            Error::MissingAux => "missing-aux",
            Error::Format { .. } | Error::Json { .. } => "format",
            Error::Io { .. } | Error::Csv(_) => "io",
        }
    }

    /// True for failures reading or writing files, as opposed to invalid data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Csv(_))
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

//! Dataset directories: a `manifest.json` plus one WFB1 binary file per sample.
//!
//! WFB1 layout (all little-endian):
//!
//! ```text
//! magic   57 46 42 31            "WFB1"
//! rows    u32
//! cols    u32
//! chans   u32                    always 2
//! data    f32 * chans*rows*cols  u channel first, row-major
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{denormalize, Field2D, FieldSeries, GridSpec, NormStats, VelocitySample};

pub const WFB_MAGIC: [u8; 4] = *b"WFB1";
pub const MANIFEST_FILE: &str = "manifest.json";
const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEntry {
    pub timestamp: i64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub name: String,
    pub grid: GridSpec,
    pub dt_seconds: i64,
    /// Whether stored values are normalized with `stats` (otherwise m/s).
    #[serde(default)]
    pub normalized: bool,
    #[serde(default)]
    pub stats: Option<NormStats>,
    pub samples: Vec<SampleEntry>,
}

/// An in-memory dataset: a series plus the metadata persisted beside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub series: FieldSeries,
    pub normalized: bool,
    pub stats: Option<NormStats>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, series: FieldSeries) -> Self {
        Dataset {
            name: name.into(),
            series,
            normalized: false,
            stats: None,
        }
    }

    pub fn with_stats(mut self, stats: NormStats) -> Self {
        self.stats = Some(stats);
        self
    }

    pub fn grid(&self) -> Option<&GridSpec> {
        self.series.grid()
    }

    /// Values in m/s, denormalizing with the stored stats when needed.
    pub fn physical(&self) -> Result<FieldSeries> {
        if !self.normalized {
            return Ok(self.series.clone());
        }
        let stats = self
            .stats
            .as_ref()
            .ok_or_else(|| Error::InvalidStats(format!("dataset {} is normalized but carries no stats", self.name)))?;
        denormalize(&self.series, stats)
    }

    /// Reads a dataset directory. Samples are ordered by timestamp regardless
    /// of their order in the manifest.
    pub fn load(dir: impl AsRef<Path>) -> Result<Dataset> {
        let dir = dir.as_ref();
        let manifest = read_manifest(dir)?;
        if manifest.format != "WFB1" {
            return Err(Error::Format {
                path: dir.join(MANIFEST_FILE),
                reason: format!("unsupported format {:?}", manifest.format),
            });
        }
        manifest.grid.validate()?;
        if let Some(stats) = &manifest.stats {
            stats.validate()?;
        }
        let mut entries = manifest.samples.clone();
        entries.sort_by_key(|e| e.timestamp);
        let grid = manifest.grid;
        let samples = entries
            .iter()
            .map(|e| {
                let path = dir.join(&e.file);
                let (u, v) = read_wfb(&path, &grid)?;
                VelocitySample::new(
                    Field2D::new(grid, u).map_err(|err| format_err(&path, err))?,
                    Field2D::new(grid, v).map_err(|err| format_err(&path, err))?,
                    e.timestamp,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            name: manifest.name,
            series: FieldSeries::new(samples, manifest.dt_seconds)?,
            normalized: manifest.normalized,
            stats: manifest.stats,
        })
    }

    /// Writes the dataset to `dir`, creating it if needed.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let grid = *self
            .series
            .grid()
            .ok_or_else(|| Error::InvalidSeries("cannot write a dataset without samples".into()))?;
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut entries = Vec::with_capacity(self.series.len());
        for (k, sample) in self.series.samples().iter().enumerate() {
            let file = format!("sample_{k:06}.wfb");
            write_wfb(&dir.join(&file), sample)?;
            entries.push(SampleEntry {
                timestamp: sample.timestamp(),
                file,
            });
        }
        let manifest = Manifest {
            format: "WFB1".into(),
            name: self.name.clone(),
            grid,
            dt_seconds: self.series.dt(),
            normalized: self.normalized,
            stats: self.stats,
            samples: entries,
        };
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|source| Error::Json {
            path: path.clone(),
            source,
        })?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}

fn format_err(path: &Path, err: Error) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        reason: err.to_string(),
    }
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path, source })
}

pub fn encode_wfb(sample: &VelocitySample) -> Vec<u8> {
    let grid = sample.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * grid.len());
    out.extend_from_slice(&WFB_MAGIC);
    out.extend_from_slice(&(grid.rows as u32).to_le_bytes());
    out.extend_from_slice(&(grid.cols as u32).to_le_bytes());
    out.extend_from_slice(&2u32.to_le_bytes());
    for &x in sample.u().values().iter().chain(sample.v().values()) {
        out.extend_from_slice(&(x as f32).to_le_bytes());
    }
    out
}

/// Decodes a WFB1 payload into `(rows, cols, u, v)`.
pub fn decode_wfb(bytes: &[u8]) -> std::result::Result<(usize, usize, Vec<f64>, Vec<f64>), String> {
    if bytes.len() < HEADER_LEN {
        return Err(format!("file too short ({} bytes)", bytes.len()));
    }
    if bytes[..4] != WFB_MAGIC {
        return Err("bad magic".into());
    }
    let word = |k: usize| u32::from_le_bytes(bytes[4 + 4 * k..8 + 4 * k].try_into().unwrap()) as usize;
    let (rows, cols, chans) = (word(0), word(1), word(2));
    if chans != 2 {
        return Err(format!("expected 2 channels, found {chans}"));
    }
    let n = rows.checked_mul(cols).ok_or_else(|| "dimension overflow".to_string())?;
    let expected = HEADER_LEN + 8 * n;
    if bytes.len() != expected {
        return Err(format!("expected {expected} bytes, found {}", bytes.len()));
    }
    let mut vals = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64);
    let u = vals.by_ref().take(n).collect();
    let v = vals.collect();
    Ok((rows, cols, u, v))
}

fn read_wfb(path: &Path, grid: &GridSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (rows, cols, u, v) = decode_wfb(&bytes).map_err(|reason| Error::Format {
        path: path.to_path_buf(),
        reason,
    })?;
    if rows != grid.rows || cols != grid.cols {
        return Err(Error::Format {
            path: path.to_path_buf(),
            reason: format!(
                "sample is {rows}x{cols} but the manifest grid is {}x{}",
                grid.rows, grid.cols
            ),
        });
    }
    Ok((u, v))
}

fn write_wfb(path: &Path, sample: &VelocitySample) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&encode_wfb(sample)).map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

/// Writes `timestamp,speed_ms` rows.
pub fn write_point_series_csv(path: &Path, series: &[(i64, f64)]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["timestamp", "speed_ms"])?;
    for (t, s) in series {
        w.write_record([t.to_string(), s.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

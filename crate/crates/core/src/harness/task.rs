//! Dataset-level operators and construction of the two task setups.
//!
//! * super-resolution: the high-resolution target is the source itself and
//!   the input is the source decimated by the factor;
//! * downscaling: the target is an auxiliary high-resolution dataset and the
//!   input is the source regridded (nearest neighbor) onto the target grid
//!   decimated by the factor.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::grid::{compute_stats, extract_patch, FieldSeries, GridSpec};
use crate::resample::{decimate, nearest_regrid, upsample, ResampleFactor, UpsampleMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    SuperResolution,
    Downscaling,
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sr" | "super_resolution" | "super-resolution" => Ok(TaskKind::SuperResolution),
            "dsc" | "downscaling" => Ok(TaskKind::Downscaling),
            other => Err(Error::InvalidConfig(format!("unknown task {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Patch {
    pub row0: usize,
    pub col0: usize,
    pub height: usize,
    pub width: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskOptions {
    pub factor: ResampleFactor,
    /// Window cut from the high-resolution data before coarsening.
    pub patch: Option<Patch>,
    /// Leading samples used for the normalization statistics; all if `None`.
    pub train_samples: Option<usize>,
}

impl Default for TaskOptions {
    fn default() -> Self {
        TaskOptions {
            factor: ResampleFactor::new(4).expect("4 is a valid factor"),
            patch: None,
            train_samples: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskPair {
    pub lr: Dataset,
    pub hr: Dataset,
}

impl TaskPair {
    pub fn save(&self, lr_dir: &Path, hr_dir: &Path) -> Result<()> {
        self.lr.save(lr_dir)?;
        self.hr.save(hr_dir)
    }
}

fn patch_series(series: &FieldSeries, patch: Option<Patch>) -> Result<FieldSeries> {
    match patch {
        None => Ok(series.clone()),
        Some(p) => series.map_channels(|f| extract_patch(f, p.row0, p.col0, p.height, p.width)),
    }
}

/// Stats from the leading `train` samples, or `None` when a channel is
/// constant there.
fn training_stats(series: &FieldSeries, train: Option<usize>) -> Result<Option<crate::grid::NormStats>> {
    let n = train.unwrap_or(series.len()).min(series.len());
    let head = FieldSeries::new(series.samples()[..n].to_vec(), series.dt())?;
    match compute_stats(&head) {
        Ok(s) => Ok(Some(s)),
        Err(Error::DegenerateRange { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn dataset(name: String, series: FieldSeries, train: Option<usize>) -> Result<Dataset> {
    let stats = training_stats(&series, train)?;
    Ok(Dataset {
        name,
        series,
        normalized: false,
        stats,
    })
}

pub fn build_task(src: &Dataset, task: TaskKind, aux: Option<&Dataset>, opts: &TaskOptions) -> Result<TaskPair> {
    let factor = opts.factor;
    match task {
        TaskKind::SuperResolution => {
            let hr = patch_series(&src.physical()?, opts.patch)?;
            let lr = hr.map_channels(|f| decimate(f, factor))?;
            Ok(TaskPair {
                lr: dataset(format!("{}-lr", src.name), lr, opts.train_samples)?,
                hr: dataset(format!("{}-hr", src.name), hr, opts.train_samples)?,
            })
        }
        TaskKind::Downscaling => {
            let aux = aux.ok_or(Error::MissingAux)?;
            let hr = patch_series(&aux.physical()?, opts.patch)?;
            let source = src.physical()?;
            if source.timestamps() != hr.timestamps() {
                return Err(Error::TimeMisalignment(
                    "source and auxiliary datasets must share timestamps".into(),
                ));
            }
            let target = hr
                .grid()
                .ok_or_else(|| Error::InvalidSeries("auxiliary dataset has no samples".into()))?
                .decimated(factor.get())?;
            let lr = source.map_channels(|f| nearest_regrid(f, &target))?;
            Ok(TaskPair {
                lr: dataset(format!("{}-lr", src.name), lr, opts.train_samples)?,
                hr: dataset(format!("{}-hr", aux.name), hr, opts.train_samples)?,
            })
        }
    }
}

fn with_series(ds: &Dataset, name: String, series: FieldSeries) -> Dataset {
    Dataset {
        name,
        series,
        normalized: ds.normalized,
        stats: ds.stats,
    }
}

pub fn decimate_dataset(ds: &Dataset, factor: ResampleFactor) -> Result<Dataset> {
    let series = ds.series.map_channels(|f| decimate(f, factor))?;
    Ok(with_series(ds, format!("{}-x{}", ds.name, factor.get()), series))
}

pub fn regrid_dataset(ds: &Dataset, target: &GridSpec) -> Result<Dataset> {
    let series = ds.series.map_channels(|f| nearest_regrid(f, target))?;
    Ok(with_series(ds, format!("{}-regrid", ds.name), series))
}

/// Interpolates every sample; the result is stored in `f32` like any
/// dataset written to disk.
pub fn upsample_dataset(ds: &Dataset, method: UpsampleMethod, factor: ResampleFactor) -> Result<Dataset> {
    let series = ds
        .series
        .map_channels(|f| upsample(f, method, factor)?.map(|x| x as f32 as f64))?;
    let label = match method {
        UpsampleMethod::Bicubic => "bicubic",
        UpsampleMethod::Bilinear => "bilinear",
        UpsampleMethod::Nearest => "nearest",
    };
    Ok(with_series(ds, format!("{}-{label}", ds.name), series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Field2D, VelocitySample};
    use crate::harness::synth::{synth_grf, SynthConfig};

    fn src(rows: usize, cols: usize, count: usize) -> Dataset {
        Dataset::new(
            "era5",
            synth_grf(&SynthConfig::new(rows, cols, -3.0, 5, count)).unwrap(),
        )
    }

    #[test]
    fn super_resolution_pair() {
        let pair = build_task(
            &src(32, 32, 3),
            TaskKind::SuperResolution,
            None,
            &TaskOptions::default(),
        )
        .unwrap();
        assert_eq!(pair.lr.grid().unwrap().rows, 8);
        assert_eq!(pair.lr.grid().unwrap().cols, 8);
        assert_eq!(pair.hr.grid().unwrap().rows, 32);
        assert!(pair.lr.stats.is_some() && pair.hr.stats.is_some());
        assert_eq!(pair.lr.series.timestamps(), pair.hr.series.timestamps());
    }

    #[test]
    fn super_resolution_with_patch() {
        let opts = TaskOptions {
            patch: Some(Patch {
                row0: 8,
                col0: 4,
                height: 32,
                width: 32,
            }),
            ..TaskOptions::default()
        };
        let pair = build_task(&src(48, 40, 2), TaskKind::SuperResolution, None, &opts).unwrap();
        assert_eq!((pair.hr.grid().unwrap().rows, pair.lr.grid().unwrap().rows), (32, 8));
    }

    fn cosmo_like(count: usize) -> Dataset {
        let grid = GridSpec::new(136, 168, 55.2, 5.0, -0.055, 0.055, 6.0).unwrap();
        let samples = (0..count)
            .map(|k| {
                VelocitySample::new(
                    Field2D::from_fn(grid, |i, j| (i + j + k) as f64 * 0.01).unwrap(),
                    Field2D::from_fn(grid, |i, j| (i * j) as f64 * 0.001 - k as f64).unwrap(),
                    crate::harness::synth::SYNTH_EPOCH + k as i64 * 3600,
                )
                .unwrap()
            })
            .collect();
        Dataset::new("cosmo", FieldSeries::new(samples, 3600).unwrap())
    }

    #[test]
    fn downscaling_pair() {
        // ERA5-like 0.25 degree source spanning the COSMO-like target.
        let era = src(40, 48, 2);
        let pair = build_task(
            &era,
            TaskKind::Downscaling,
            Some(&cosmo_like(2)),
            &TaskOptions::default(),
        )
        .unwrap();
        let lr = pair.lr.grid().unwrap();
        assert_eq!((lr.rows, lr.cols), (34, 42));
        assert!((lr.lat_step + 0.22).abs() < 1e-12);
        let hr = pair.hr.grid().unwrap();
        assert_eq!((hr.rows, hr.cols), (136, 168));
        let values = era.series.samples()[0].u().values();
        assert!(pair.lr.series.samples()[0]
            .u()
            .values()
            .iter()
            .all(|v| values.contains(v)));
    }

    #[test]
    fn downscaling_needs_aux_and_aligned_times() {
        let era = src(40, 48, 2);
        let opts = TaskOptions::default();
        assert_eq!(
            build_task(&era, TaskKind::Downscaling, None, &opts).unwrap_err().code(),
            "missing-aux"
        );
        let err = build_task(&era, TaskKind::Downscaling, Some(&cosmo_like(3)), &opts).unwrap_err();
        assert_eq!(err.code(), "time-misalignment");
    }

    #[test]
    fn build_then_load_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let pair = build_task(
            &src(16, 16, 4),
            TaskKind::SuperResolution,
            None,
            &TaskOptions::default(),
        )
        .unwrap();
        pair.save(&dir.path().join("lr"), &dir.path().join("hr")).unwrap();
        assert_eq!(Dataset::load(dir.path().join("lr")).unwrap(), pair.lr);
        assert_eq!(Dataset::load(dir.path().join("hr")).unwrap(), pair.hr);
    }

    #[test]
    fn upsample_then_decimate_recovers_input() {
        let ds = src(8, 8, 2);
        let four = ResampleFactor::new(4).unwrap();
        let up = upsample_dataset(&ds, UpsampleMethod::Bicubic, four).unwrap();
        assert_eq!(up.grid().unwrap().rows, 32);
        let back = decimate_dataset(&up, four).unwrap();
        assert_eq!(
            back.series.samples()[1].v().values(),
            ds.series.samples()[1].v().values()
        );
    }

    #[test]
    fn task_names() {
        assert_eq!("sr".parse::<TaskKind>().unwrap(), TaskKind::SuperResolution);
        assert_eq!("dsc".parse::<TaskKind>().unwrap(), TaskKind::Downscaling);
        assert!("x".parse::<TaskKind>().is_err());
    }
}

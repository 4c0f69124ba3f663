//! End-to-end evaluation of prediction datasets against a reference.
//!
//! Pixel metrics (PSNR, SSIM, MAE) are computed per sample on the u and v
//! channels in normalized space, using the reference normalization, and the
//! two channels are averaged with equal weight. MELR compares the radial
//! spectra of the wind-speed fields. All per-sample values are then
//! averaged over the test set. Wasserstein-1 and cumulative energy use the
//! wind-speed time series at the evaluation points.
//!
//! Per-sample work runs on a thread pool, but every reduction walks the
//! samples in timestamp order, so the report does not depend on the number
//! of workers.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dataset::Dataset;
use crate::distribution::{speed_density, wasserstein1, SampleSet};
use crate::error::{Error, Result};
use crate::fidelity::{fidelity, FidelityResult, MetricConfig};
use crate::grid::{compute_stats, normalize, point_series_at, wind_speed, FieldSeries, GridSpec, NormStats};
use crate::harness::report::{
    ChannelMetrics, EvalReport, ModelRow, PointResult, PredictionSource, ReportMetadata, SampleRow,
};
use crate::power::{cumulative_power, PowerCurve, PowerSeries};
use crate::spectral::{mean_rapsd, melr_from_rapsd, rapsd, MelrOptions, Rapsd};

#[derive(Debug, Clone, Serialize)]
pub struct EvalConfig {
    pub metric: MetricConfig,
    pub melr: MelrOptions,
    /// Evaluation points as `(lat, lon)`. When empty, one grid point is drawn
    /// with `seed`.
    pub points: Vec<(f64, f64)>,
    pub seed: u64,
    pub per_sample: bool,
    pub curve: PowerCurve,
    /// Worker threads; `None` uses the global pool.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            metric: MetricConfig::default(),
            melr: MelrOptions::default(),
            points: Vec::new(),
            seed: 0,
            per_sample: false,
            curve: PowerCurve::enercon_e92(),
            threads: None,
        }
    }
}

impl EvalConfig {
    /// SHA-256 of the canonical JSON form of the configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// A model's predictions: one or more datasets (for example repeated draws
/// of a stochastic model) whose metric rows are averaged.
#[derive(Debug, Clone)]
pub struct ModelPredictions {
    pub model: String,
    pub runs: Vec<Dataset>,
}

/// Data behind the report, for plotting.
#[derive(Debug, Clone)]
pub struct EvalArtifacts {
    pub reference_rapsd: Rapsd,
    pub model_rapsd: Vec<(String, Rapsd)>,
    pub points: Vec<PointArtifacts>,
}

/// A model's wind-speed and power series at one point.
pub type PointSeries = (String, Vec<(i64, f64)>, PowerSeries);

#[derive(Debug, Clone)]
pub struct PointArtifacts {
    pub lat: f64,
    pub lon: f64,
    pub reference_speeds: Vec<(i64, f64)>,
    pub reference_power: PowerSeries,
    /// Per model, from its first run.
    pub models: Vec<PointSeries>,
}

impl EvalArtifacts {
    /// Writes plot-ready CSV files into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.reference_rapsd.write_csv(&dir.join("rapsd_reference.csv"))?;
        for (model, r) in &self.model_rapsd {
            r.write_csv(&dir.join(format!("rapsd_{}.csv", file_label(model))))?;
        }
        for (k, p) in self.points.iter().enumerate() {
            write_point(dir, k, "reference", &p.reference_speeds, &p.reference_power)?;
            for (model, speeds, power) in &p.models {
                write_point(dir, k, &file_label(model), speeds, power)?;
            }
        }
        Ok(())
    }
}

fn write_point(dir: &Path, k: usize, label: &str, speeds: &[(i64, f64)], power: &PowerSeries) -> Result<()> {
    crate::dataset::write_point_series_csv(&dir.join(format!("point{k}_{label}_speed.csv")), speeds)?;
    power.write_csv(&dir.join(format!("point{k}_{label}_power.csv")))?;
    if let Ok(set) = SampleSet::new(speeds.iter().map(|s| s.1).collect()) {
        if let Ok(d) = speed_density(&set) {
            d.write_csv(&dir.join(format!("point{k}_{label}_density.csv")))?;
        }
    }
    Ok(())
}

fn file_label(model: &str) -> String {
    model
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

struct Reference {
    grid: GridSpec,
    timestamps: Vec<i64>,
    stats: NormStats,
    normalized: FieldSeries,
    speeds: Vec<crate::grid::Field2D>,
    rapsd: Vec<Rapsd>,
    peak_speed: f64,
    points: Vec<ResolvedPoint>,
}

#[derive(Debug, Clone, Copy)]
struct ResolvedPoint {
    lat: f64,
    lon: f64,
    row: usize,
    col: usize,
}

struct ResolvedPointData {
    speeds: Vec<(i64, f64)>,
    power: PowerSeries,
}

#[derive(Debug, Clone, Copy)]
struct SampleMetrics {
    timestamp: i64,
    u: FidelityResult,
    v: FidelityResult,
    speed: FidelityResult,
    melr: f64,
}

impl SampleMetrics {
    fn psnr(&self) -> f64 {
        0.5 * (self.u.psnr_db + self.v.psnr_db)
    }
    fn ssim(&self) -> f64 {
        0.5 * (self.u.ssim + self.v.ssim)
    }
    fn mae(&self) -> f64 {
        0.5 * (self.u.mae + self.v.mae)
    }
}

struct RunResult {
    samples: Vec<SampleMetrics>,
    rapsd: Rapsd,
    points: Vec<RunPoint>,
}

struct RunPoint {
    speeds: Vec<(i64, f64)>,
    power: PowerSeries,
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut total = 0.0;
    let mut n = 0usize;
    for v in values {
        total += v;
        n += 1;
    }
    total / n as f64
}

fn mean_fidelity(items: impl Iterator<Item = FidelityResult> + Clone) -> FidelityResult {
    FidelityResult {
        psnr_db: mean(items.clone().map(|f| f.psnr_db)),
        ssim: mean(items.clone().map(|f| f.ssim)),
        mae: mean(items.map(|f| f.mae)),
    }
}

fn prepare_reference(reference: &Dataset, cfg: &EvalConfig) -> Result<(Reference, String)> {
    let physical = reference.physical()?;
    let grid = *physical
        .grid()
        .ok_or_else(|| Error::InvalidSeries("reference dataset has no samples".into()))?;
    let (stats, source) = match reference.stats {
        Some(s) => (s, "reference-manifest"),
        None => (compute_stats(&physical)?, "reference-data"),
    };
    let normalized = normalize(&physical, &stats)?;
    let speeds: Vec<_> = physical.samples().par_iter().map(wind_speed).collect();
    let rapsd = speeds.par_iter().map(rapsd).collect::<Result<Vec<_>>>()?;
    let peak_speed = speeds
        .iter()
        .flat_map(|f| f.values().iter().copied())
        .fold(0.0, f64::max);

    let points = if cfg.points.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let row = rng.random_range(0..grid.rows);
        let col = rng.random_range(0..grid.cols);
        vec![ResolvedPoint {
            lat: grid.lat(row),
            lon: grid.lon(col),
            row,
            col,
        }]
    } else {
        cfg.points
            .iter()
            .map(|&(lat, lon)| {
                let (row, col) = grid.nearest_cell(lat, lon)?;
                Ok(ResolvedPoint { lat, lon, row, col })
            })
            .collect::<Result<Vec<_>>>()?
    };

    Ok((
        Reference {
            grid,
            timestamps: physical.timestamps(),
            stats,
            normalized,
            speeds,
            rapsd,
            peak_speed: if peak_speed > 0.0 { peak_speed } else { 1.0 },
            points,
        },
        source.to_string(),
    ))
}

fn reference_point_data(reference: &Dataset, r: &Reference, cfg: &EvalConfig) -> Result<Vec<ResolvedPointData>> {
    let physical = reference.physical()?;
    let dt_hours = physical.dt() as f64 / 3600.0;
    Ok(r.points
        .iter()
        .map(|p| {
            let speeds = point_series_at(&physical, p.row, p.col);
            let power = cumulative_power(&speeds, &cfg.curve, dt_hours);
            ResolvedPointData { speeds, power }
        })
        .collect())
}

fn check_alignment(pred: &FieldSeries, r: &Reference, name: &str) -> Result<()> {
    let grid = pred
        .grid()
        .ok_or_else(|| Error::InvalidSeries(format!("prediction {name} has no samples")))?;
    if *grid != r.grid {
        return Err(Error::ShapeMismatch(format!(
            "prediction {name} is on a {}x{} grid that differs from the {}x{} reference grid",
            grid.rows, grid.cols, r.grid.rows, r.grid.cols
        )));
    }
    if pred.timestamps() != r.timestamps {
        return Err(Error::TimeMisalignment(format!(
            "prediction {name} does not share the reference timestamps"
        )));
    }
    Ok(())
}

fn evaluate_run(pred: &Dataset, r: &Reference, cfg: &EvalConfig) -> Result<RunResult> {
    let physical = pred.physical()?;
    check_alignment(&physical, r, &pred.name)?;
    let normalized = normalize(&physical, &r.stats)?;
    let speed_cfg = MetricConfig {
        peak: r.peak_speed,
        ..cfg.metric
    };

    let per_sample = (0..physical.len())
        .into_par_iter()
        .map(|k| {
            let (pn, rn) = (&normalized.samples()[k], &r.normalized.samples()[k]);
            let speed = wind_speed(&physical.samples()[k]);
            let spec = rapsd(&speed)?;
            let m = melr_from_rapsd(&spec, &r.rapsd[k], cfg.melr)?;
            Ok((
                SampleMetrics {
                    timestamp: pn.timestamp(),
                    u: fidelity(rn.u(), pn.u(), &cfg.metric)?,
                    v: fidelity(rn.v(), pn.v(), &cfg.metric)?,
                    speed: fidelity(&r.speeds[k], &speed, &speed_cfg)?,
                    melr: m.value,
                },
                spec,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let (samples, spectra): (Vec<_>, Vec<_>) = per_sample.into_iter().unzip();

    let dt_hours = physical.dt() as f64 / 3600.0;
    let points = r
        .points
        .iter()
        .map(|p| {
            let speeds = point_series_at(&physical, p.row, p.col);
            let power = cumulative_power(&speeds, &cfg.curve, dt_hours);
            RunPoint { speeds, power }
        })
        .collect();
    Ok(RunResult {
        samples,
        rapsd: mean_rapsd(&spectra)?,
        points,
    })
}

/// Evaluates in-memory datasets. Dataset names are used as source labels.
pub fn evaluate(models: &[ModelPredictions], reference: &Dataset, cfg: &EvalConfig) -> Result<EvalReport> {
    Ok(evaluate_detailed(models, reference, cfg)?.0)
}

pub fn evaluate_detailed(
    models: &[ModelPredictions],
    reference: &Dataset,
    cfg: &EvalConfig,
) -> Result<(EvalReport, EvalArtifacts)> {
    cfg.metric.validate()?;
    cfg.curve.validate()?;
    if models.iter().any(|m| m.runs.is_empty()) {
        return Err(Error::InvalidConfig(
            "every model needs at least one prediction dataset".into(),
        ));
    }
    with_pool(cfg.threads, || evaluate_inner(models, reference, cfg))?
}

fn evaluate_inner(
    models: &[ModelPredictions],
    reference: &Dataset,
    cfg: &EvalConfig,
) -> Result<(EvalReport, EvalArtifacts)> {
    let (r, stats_source) = prepare_reference(reference, cfg)?;
    let ref_points = reference_point_data(reference, &r, cfg)?;

    let mut rows = Vec::new();
    let mut per_point = Vec::new();
    let mut per_sample_rows = Vec::new();
    let mut model_rapsd = Vec::new();
    let mut point_models: Vec<Vec<PointSeries>> = vec![Vec::new(); r.points.len()];

    for model in models {
        let runs = model
            .runs
            .iter()
            .map(|ds| evaluate_run(ds, &r, cfg))
            .collect::<Result<Vec<_>>>()?;

        let run_rows: Vec<RunSummary> = runs
            .iter()
            .map(|run| summarize(run, &ref_points))
            .collect::<Result<_>>()?;
        rows.push(ModelRow {
            model: model.model.clone(),
            runs: runs.len(),
            samples: r.timestamps.len(),
            psnr_db: mean(run_rows.iter().map(|s| s.psnr)),
            ssim: mean(run_rows.iter().map(|s| s.ssim)),
            mae: mean(run_rows.iter().map(|s| s.mae)),
            melr: mean(run_rows.iter().map(|s| s.melr)),
            wasserstein: mean(run_rows.iter().map(|s| s.points[0].0)),
            channels: ChannelMetrics {
                u: mean_fidelity(run_rows.iter().map(|s| s.u)),
                v: mean_fidelity(run_rows.iter().map(|s| s.v)),
                speed: mean_fidelity(run_rows.iter().map(|s| s.speed)),
            },
        });
        for (k, p) in r.points.iter().enumerate() {
            per_point.push(PointResult {
                model: model.model.clone(),
                lat: p.lat,
                lon: p.lon,
                row: p.row,
                col: p.col,
                wasserstein: mean(run_rows.iter().map(|s| s.points[k].0)),
                final_cumulative_error_kwh: mean(run_rows.iter().map(|s| s.points[k].1)),
            });
            let RunPoint { speeds, power } = &runs[0].points[k];
            point_models[k].push((model.model.clone(), speeds.clone(), power.clone()));
        }
        if cfg.per_sample {
            for (run_idx, run) in runs.iter().enumerate() {
                per_sample_rows.extend(run.samples.iter().map(|s| SampleRow {
                    model: model.model.clone(),
                    run: run_idx,
                    timestamp: s.timestamp,
                    psnr_db: s.psnr(),
                    ssim: s.ssim(),
                    mae: s.mae(),
                    melr: s.melr,
                }));
            }
        }
        let spectra: Vec<Rapsd> = runs.iter().map(|run| run.rapsd.clone()).collect();
        model_rapsd.push((model.model.clone(), mean_rapsd(&spectra)?));
    }

    let report = EvalReport {
        metadata: ReportMetadata {
            reference: reference.name.clone(),
            predictions: models
                .iter()
                .flat_map(|m| {
                    m.runs.iter().map(|d| PredictionSource {
                        model: m.model.clone(),
                        dataset: d.name.clone(),
                    })
                })
                .collect(),
            config_hash: cfg.hash(),
            melr_mode: cfg.melr.mode,
            melr_log_base: cfg.melr.base,
            stats_source,
            power_curve: cfg.curve.name.clone(),
        },
        rows,
        per_point,
        per_sample: cfg.per_sample.then_some(per_sample_rows),
    };
    let artifacts = EvalArtifacts {
        reference_rapsd: mean_rapsd(&r.rapsd)?,
        model_rapsd,
        points: r
            .points
            .iter()
            .zip(ref_points)
            .zip(point_models)
            .map(|((p, rp), models)| PointArtifacts {
                lat: p.lat,
                lon: p.lon,
                reference_speeds: rp.speeds,
                reference_power: rp.power,
                models,
            })
            .collect(),
    };
    Ok((report, artifacts))
}

struct RunSummary {
    psnr: f64,
    ssim: f64,
    mae: f64,
    melr: f64,
    u: FidelityResult,
    v: FidelityResult,
    speed: FidelityResult,
    /// Per point: (Wasserstein-1, final cumulative error in kWh).
    points: Vec<(f64, f64)>,
}

fn summarize(run: &RunResult, ref_points: &[ResolvedPointData]) -> Result<RunSummary> {
    let s = &run.samples;
    let points = run
        .points
        .iter()
        .zip(ref_points)
        .map(|(RunPoint { speeds, power }, rp)| {
            let a: Vec<f64> = speeds.iter().map(|x| x.1).collect();
            let b: Vec<f64> = rp.speeds.iter().map(|x| x.1).collect();
            Ok((wasserstein1(&a, &b)?, power.total_kwh() - rp.power.total_kwh()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunSummary {
        psnr: mean(s.iter().map(SampleMetrics::psnr)),
        ssim: mean(s.iter().map(SampleMetrics::ssim)),
        mae: mean(s.iter().map(SampleMetrics::mae)),
        melr: mean(s.iter().map(|m| m.melr)),
        u: mean_fidelity(s.iter().map(|m| m.u)),
        v: mean_fidelity(s.iter().map(|m| m.v)),
        speed: mean_fidelity(s.iter().map(|m| m.speed)),
        points,
    })
}

/// A model label with the dataset directories holding its predictions.
#[derive(Debug, Clone)]
pub struct PredictionPaths {
    pub model: String,
    pub paths: Vec<PathBuf>,
}

/// Loads datasets from disk and evaluates them. Source labels in the report
/// are the given paths.
pub fn evaluate_paths(
    preds: &[PredictionPaths],
    reference: &Path,
    cfg: &EvalConfig,
) -> Result<(EvalReport, EvalArtifacts)> {
    let mut reference_ds = Dataset::load(reference)?;
    reference_ds.name = reference.display().to_string();
    let models = preds
        .iter()
        .map(|p| {
            let runs = p
                .paths
                .iter()
                .map(|path| {
                    let mut ds = Dataset::load(path)?;
                    ds.name = path.display().to_string();
                    Ok(ds)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ModelPredictions {
                model: p.model.clone(),
                runs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    evaluate_detailed(&models, &reference_ds, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::synth::{synth_grf, SynthConfig};
    use crate::harness::task::{build_task, upsample_dataset, TaskKind, TaskOptions};
    use crate::resample::{ResampleFactor, UpsampleMethod};

    fn reference(count: usize) -> Dataset {
        Dataset::new("ref", synth_grf(&SynthConfig::new(32, 32, -3.0, 21, count)).unwrap())
    }

    fn single(model: &str, ds: Dataset) -> Vec<ModelPredictions> {
        vec![ModelPredictions {
            model: model.into(),
            runs: vec![ds],
        }]
    }

    #[test]
    fn identity_row() {
        let r = reference(6);
        let report = evaluate(&single("truth", r.clone()), &r, &EvalConfig::default()).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.psnr_db, f64::INFINITY);
        assert!((row.ssim - 1.0).abs() < 1e-9);
        assert_eq!(row.mae, 0.0);
        assert_eq!(row.melr, 0.0);
        assert_eq!(row.wasserstein, 0.0);
        assert_eq!(report.per_point[0].final_cumulative_error_kwh, 0.0);
        assert_eq!(report.metadata.stats_source, "reference-data");
    }

    #[test]
    fn bicubic_baseline_is_worse_than_identity() {
        let r = reference(6);
        let pair = build_task(&r, TaskKind::SuperResolution, None, &TaskOptions::default()).unwrap();
        let four = ResampleFactor::new(4).unwrap();
        let up = upsample_dataset(&pair.lr, UpsampleMethod::Bicubic, four).unwrap();
        let cfg = EvalConfig {
            points: vec![(54.0, 5.0)],
            ..EvalConfig::default()
        };
        let report = evaluate(&single("bicubic", up), &pair.hr, &cfg).unwrap();
        let row = &report.rows[0];
        assert!(row.psnr_db.is_finite());
        assert!(row.ssim < 1.0);
        assert!(row.mae > 0.0);
        assert!(row.melr > 0.0);
        assert!(row.wasserstein > 0.0);
        assert_eq!(report.metadata.stats_source, "reference-manifest");
    }

    #[test]
    fn rejects_misaligned_predictions() {
        let r = reference(4);
        let shorter = Dataset::new(
            "short",
            FieldSeries::new(r.series.samples()[..3].to_vec(), 3600).unwrap(),
        );
        let err = evaluate(&single("m", shorter), &r, &EvalConfig::default()).unwrap_err();
        assert_eq!(err.code(), "time-misalignment");

        let other = Dataset::new("small", synth_grf(&SynthConfig::new(16, 16, -3.0, 1, 4)).unwrap());
        let err = evaluate(&single("m", other), &r, &EvalConfig::default()).unwrap_err();
        assert_eq!(err.code(), "shape-mismatch");
    }

    #[test]
    fn worker_count_does_not_change_report() {
        let r = reference(8);
        let pred = Dataset::new("p", synth_grf(&SynthConfig::new(32, 32, -2.0, 99, 8)).unwrap());
        let models = single("m", pred);
        let one = evaluate(
            &models,
            &r,
            &EvalConfig {
                threads: Some(1),
                ..EvalConfig::default()
            },
        )
        .unwrap();
        let many = evaluate(
            &models,
            &r,
            &EvalConfig {
                threads: Some(4),
                ..EvalConfig::default()
            },
        )
        .unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn multiple_runs_are_averaged() {
        let r = reference(4);
        let a = Dataset::new("a", synth_grf(&SynthConfig::new(32, 32, -2.0, 1, 4)).unwrap());
        let b = Dataset::new("b", synth_grf(&SynthConfig::new(32, 32, -2.0, 2, 4)).unwrap());
        let cfg = EvalConfig::default();
        let ra = evaluate(&single("x", a.clone()), &r, &cfg).unwrap().rows[0].clone();
        let rb = evaluate(&single("x", b.clone()), &r, &cfg).unwrap().rows[0].clone();
        let both = vec![ModelPredictions {
            model: "x".into(),
            runs: vec![a, b],
        }];
        let rab = evaluate(&both, &r, &cfg).unwrap().rows[0].clone();
        assert_eq!(rab.runs, 2);
        assert!((rab.mae - 0.5 * (ra.mae + rb.mae)).abs() < 1e-15);
        assert!((rab.melr - 0.5 * (ra.melr + rb.melr)).abs() < 1e-15);
    }

    #[test]
    fn seeded_point_is_reproducible() {
        let r = reference(3);
        let cfg = EvalConfig {
            seed: 5,
            ..EvalConfig::default()
        };
        let a = evaluate(&single("m", r.clone()), &r, &cfg).unwrap();
        let b = evaluate(&single("m", r.clone()), &r, &cfg).unwrap();
        assert_eq!(a.per_point, b.per_point);
        let g = r.grid().unwrap();
        let p = &a.per_point[0];
        assert_eq!((p.lat, p.lon), (g.lat(p.row), g.lon(p.col)));
    }

    #[test]
    fn config_hash_ignores_threads() {
        let a = EvalConfig::default();
        let b = EvalConfig {
            threads: Some(3),
            ..EvalConfig::default()
        };
        assert_eq!(a.hash(), b.hash());
        let c = EvalConfig {
            seed: 1,
            ..EvalConfig::default()
        };
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn per_sample_dump() {
        let r = reference(3);
        let cfg = EvalConfig {
            per_sample: true,
            ..EvalConfig::default()
        };
        let report = evaluate(&single("m", r.clone()), &r, &cfg).unwrap();
        assert_eq!(report.per_sample.unwrap().len(), 3);
    }

    #[test]
    fn artifacts_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let r = reference(3);
        let (_, art) = evaluate_detailed(&single("m 1", r.clone()), &r, &EvalConfig::default()).unwrap();
        art.write(dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("rapsd_m_1.csv")).unwrap();
        assert!(text.starts_with("k,wavelength_km,energy,count\n"));
        let p = std::fs::read_to_string(dir.path().join("point0_reference_power.csv")).unwrap();
        assert!(p.starts_with("timestamp,power_kw,cumulative_kwh\n"));
        assert!(dir.path().join("point0_m_1_density.csv").exists());
        assert!(dir.path().join("point0_m_1_speed.csv").exists());
    }
}

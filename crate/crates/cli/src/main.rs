//! `windeval` command-line harness.
//!
//! Exit codes: 0 on success, 2 on validation errors (including bad
//! arguments), 3 on I/O errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use windeval::dataset::Dataset;
use windeval::grid::extract_point_series;
use windeval::harness::evaluate::{evaluate_paths, EvalConfig, PredictionPaths};
use windeval::harness::report::{emit_report, EvalReport, ReportFormat};
use windeval::harness::synth::{synth_grf, SynthConfig};
use windeval::harness::task::{
    build_task, decimate_dataset, regrid_dataset, upsample_dataset, Patch, TaskKind, TaskOptions,
};
use windeval::power::{cumulative_power, load_power_curve, PowerCurve};
use windeval::resample::{ResampleFactor, UpsampleMethod};
use windeval::spectral::{LogBase, MelrMode, MelrOptions};
use windeval::{Error, Result};

#[derive(Parser)]
#[command(
    name = "windeval",
    version,
    about = "Evaluate wind-field downscaling and super-resolution outputs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decimate a dataset, or regrid it onto another dataset's grid.
    Coarsen(CoarsenArgs),
    /// Interpolate a dataset onto a grid `factor` times finer.
    Upsample(UpsampleArgs),
    /// Build the low/high-resolution pair for a task.
    BuildTask(BuildTaskArgs),
    /// Score predictions against a reference dataset.
    Evaluate(EvaluateArgs),
    /// Wind-power time series at one grid point.
    Power(PowerArgs),
    /// Generate synthetic Gaussian random wind fields.
    Synth(SynthArgs),
    /// Merge saved JSON reports and re-emit them.
    Report(ReportArgs),
}

#[derive(Args)]
struct CoarsenArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Keep every `factor`-th grid point (required unless regridding).
    #[arg(long)]
    factor: Option<usize>,
    /// Regrid (nearest neighbor) onto this dataset's grid, decimated by
    /// `--factor` when given.
    #[arg(long, value_name = "DATASET")]
    regrid_to: Option<PathBuf>,
}

#[derive(Args)]
struct UpsampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value = "bicubic", value_parser = parse_from_str::<UpsampleMethod>)]
    method: UpsampleMethod,
    #[arg(long, default_value_t = 4)]
    factor: usize,
}

#[derive(Args)]
struct BuildTaskArgs {
    /// `sr` (super-resolution) or `dsc` (downscaling).
    #[arg(long, value_parser = parse_from_str::<TaskKind>)]
    task: TaskKind,
    #[arg(long)]
    src: PathBuf,
    /// High-resolution target dataset (downscaling only).
    #[arg(long)]
    aux: Option<PathBuf>,
    #[arg(long)]
    lr_out: PathBuf,
    #[arg(long)]
    hr_out: PathBuf,
    #[arg(long, default_value_t = 4)]
    factor: usize,
    /// Window `row0,col0,height,width` cut from the high-resolution data.
    #[arg(long, value_parser = parse_patch)]
    patch: Option<Patch>,
    /// Leading samples used for the normalization statistics.
    #[arg(long)]
    train_samples: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Prediction dataset as `[model=]path`; repeat a model name to average
    /// several runs.
    #[arg(long = "pred", required = true, value_parser = parse_pred)]
    preds: Vec<(String, PathBuf)>,
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Evaluation point `lat,lon`; repeatable. A seeded grid point is used
    /// when omitted.
    #[arg(long = "point", value_parser = parse_point, allow_hyphen_values = true)]
    points: Vec<(f64, f64)>,
    #[arg(long, default_value = "mean", value_parser = parse_from_str::<MelrMode>)]
    melr_mode: MelrMode,
    /// Logarithm base for MELR: e, 10 or 2.
    #[arg(long, default_value = "e", value_parser = parse_from_str::<LogBase>)]
    melr_log: LogBase,
    #[arg(long, default_value = "md", value_parser = parse_from_str::<ReportFormat>)]
    format: ReportFormat,
    #[arg(long)]
    per_sample: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Power curve JSON; the built-in Enercon E92 when omitted.
    #[arg(long)]
    curve: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for spectra, densities and power series CSV files.
    #[arg(long)]
    export_dir: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PowerArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    point: (f64, f64),
    #[arg(long)]
    curve: Option<PathBuf>,
    /// CSV output (`timestamp,power_kw,cumulative_kwh`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    slope: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    max_wavenumber: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "md", value_parser = parse_from_str::<ReportFormat>)]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_from_str<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_numbers(s: &str, n: usize) -> std::result::Result<Vec<String>, String> {
    let parts: Vec<String> = s.split(',').map(|p| p.trim().to_string()).collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated values, got {s:?}"));
    }
    Ok(parts)
}

fn parse_point(s: &str) -> std::result::Result<(f64, f64), String> {
    let parts = parse_numbers(s, 2)?;
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    Ok((num(&parts[0])?, num(&parts[1])?))
}

fn parse_patch(s: &str) -> std::result::Result<Patch, String> {
    let parts = parse_numbers(s, 4)?;
    let v = parts
        .iter()
        .map(|p| p.parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Patch {
        row0: v[0],
        col0: v[1],
        height: v[2],
        width: v[3],
    })
}

fn parse_pred(s: &str) -> std::result::Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => Ok((name.to_string(), PathBuf::from(path))),
        Some(_) => Err(format!("malformed prediction {s:?}")),
        None => {
            let path = PathBuf::from(s);
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| s.to_string());
            Ok((name, path))
        }
    }
}

fn curve(path: Option<&Path>) -> Result<PowerCurve> {
    match path {
        Some(p) => load_power_curve(p),
        None => Ok(PowerCurve::enercon_e92()),
    }
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Error::io(path, e)),
        None => std::io::stdout().write_all(bytes).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn dataset_name(ds: &mut Dataset, path: &Path) {
    if let Some(name) = path.file_name() {
        ds.name = name.to_string_lossy().into_owned();
    }
}

fn coarsen(args: CoarsenArgs) -> Result<()> {
    let input = Dataset::load(&args.input)?;
    let factor = args.factor.map(ResampleFactor::new).transpose()?;
    let mut out = match (args.regrid_to, factor) {
        (Some(target), factor) => {
            let target_ds = Dataset::load(&target)?;
            let grid = target_ds
                .grid()
                .ok_or_else(|| Error::InvalidSeries("target dataset has no samples".into()))?;
            let grid = match factor {
                Some(f) => grid.decimated(f.get())?,
                None => *grid,
            };
            regrid_dataset(&input, &grid)?
        }
        (None, Some(f)) => decimate_dataset(&input, f)?,
        (None, None) => return Err(Error::InvalidConfig("coarsen needs --factor or --regrid-to".into())),
    };
    dataset_name(&mut out, &args.output);
    out.save(&args.output)
}

fn upsample(args: UpsampleArgs) -> Result<()> {
    let input = Dataset::load(&args.input)?;
    let mut out = upsample_dataset(&input, args.method, ResampleFactor::new(args.factor)?)?;
    dataset_name(&mut out, &args.output);
    out.save(&args.output)
}

fn build(args: BuildTaskArgs) -> Result<()> {
    let src = Dataset::load(&args.src)?;
    let aux = args.aux.as_deref().map(Dataset::load).transpose()?;
    let opts = TaskOptions {
        factor: ResampleFactor::new(args.factor)?,
        patch: args.patch,
        train_samples: args.train_samples,
    };
    let mut pair = build_task(&src, args.task, aux.as_ref(), &opts)?;
    dataset_name(&mut pair.lr, &args.lr_out);
    dataset_name(&mut pair.hr, &args.hr_out);
    pair.save(&args.lr_out, &args.hr_out)
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let mut models: Vec<PredictionPaths> = Vec::new();
    for (model, path) in args.preds {
        match models.iter_mut().find(|m| m.model == model) {
            Some(m) => m.paths.push(path),
            None => models.push(PredictionPaths {
                model,
                paths: vec![path],
            }),
        }
    }
    let cfg = EvalConfig {
        melr: MelrOptions {
            mode: args.melr_mode,
            base: args.melr_log,
        },
        points: args.points,
        seed: args.seed,
        per_sample: args.per_sample,
        curve: curve(args.curve.as_deref())?,
        threads: args.threads,
        ..EvalConfig::default()
    };
    let (report, artifacts) = evaluate_paths(&models, &args.reference, &cfg)?;
    if let Some(dir) = &args.export_dir {
        artifacts.write(dir)?;
    }
    write_output(args.out.as_deref(), &emit_report(&report, args.format)?)
}

fn power(args: PowerArgs) -> Result<()> {
    let ds = Dataset::load(&args.dataset)?;
    let curve = curve(args.curve.as_deref())?;
    let physical = ds.physical()?;
    let speeds = extract_point_series(&physical, args.point.0, args.point.1)?;
    let series = cumulative_power(&speeds, &curve, physical.dt() as f64 / 3600.0);
    if let Some(out) = &args.out {
        series.write_csv(out)?;
    }
    write_output(None, format!("total_kwh={}\n", series.total_kwh()).as_bytes())
}

fn synth(args: SynthArgs) -> Result<()> {
    let cfg = SynthConfig {
        max_wavenumber: args.max_wavenumber,
        ..SynthConfig::new(args.rows, args.cols, args.slope, args.seed, args.count)
    };
    let mut ds = Dataset::new("synth", synth_grf(&cfg)?);
    dataset_name(&mut ds, &args.out);
    ds.save(&args.out)
}

fn report(args: ReportArgs) -> Result<()> {
    let reports = args
        .inputs
        .iter()
        .map(|path| {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            EvalReport::from_json(&text).map_err(|e| Error::Format {
                path: path.clone(),
                reason: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let merged = EvalReport::merge(reports)?;
    write_output(args.out.as_deref(), &emit_report(&merged, args.format)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Coarsen(a) => coarsen(a),
        Command::Upsample(a) => upsample(a),
        Command::BuildTask(a) => build(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Power(a) => power(a),
        Command::Synth(a) => synth(a),
        Command::Report(a) => report(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(if e.is_io() { 3 } else { 2 })
        }
    }
}

//! Evaluation report schema and its JSON, CSV and Markdown renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::FidelityResult;
use crate::spectral::{LogBase, MelrMode};

/// Serializes `f64` values that may be infinite; infinities become the
/// strings `"inf"` / `"-inf"`.
pub mod inf_f64 {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *x == f64::INFINITY {
            s.serialize_str("inf")
        } else if *x == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelMetrics {
    pub u: FidelityResult,
    pub v: FidelityResult,
    /// Metrics on the wind-speed field, with the peak reference speed as `L`.
    pub speed: FidelityResult,
}

/// One table row: test-set averages for a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRow {
    pub model: String,
    /// Number of prediction datasets averaged into this row.
    pub runs: usize,
    pub samples: usize,
    #[serde(with = "inf_f64")]
    pub psnr_db: f64,
    pub ssim: f64,
    pub mae: f64,
    pub melr: f64,
    /// Wasserstein-1 distance at the first evaluation point.
    pub wasserstein: f64,
    pub channels: ChannelMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub model: String,
    pub lat: f64,
    pub lon: f64,
    pub row: usize,
    pub col: usize,
    pub wasserstein: f64,
    pub final_cumulative_error_kwh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub model: String,
    pub run: usize,
    pub timestamp: i64,
    #[serde(with = "inf_f64")]
    pub psnr_db: f64,
    pub ssim: f64,
    pub mae: f64,
    pub melr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSource {
    pub model: String,
    pub dataset: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub reference: String,
    pub predictions: Vec<PredictionSource>,
    pub config_hash: String,
    pub melr_mode: MelrMode,
    pub melr_log_base: LogBase,
    /// Where the normalization used for pixel metrics came from.
    pub stats_source: String,
    pub power_curve: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<ModelRow>,
    pub per_point: Vec<PointResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_sample: Option<Vec<SampleRow>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            other => Err(Error::InvalidConfig(format!("unknown report format {other:?}"))),
        }
    }
}

impl EvalReport {
    pub fn from_json(text: &str) -> Result<EvalReport> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            path: "<report>".into(),
            source,
        })
    }

    /// Merges the rows and point results of several reports. Metadata of the
    /// first report is kept, with prediction sources concatenated.
    pub fn merge(reports: Vec<EvalReport>) -> Result<EvalReport> {
        let mut it = reports.into_iter();
        let mut out = it
            .next()
            .ok_or_else(|| Error::InvalidConfig("no reports to merge".into()))?;
        for r in it {
            out.metadata.predictions.extend(r.metadata.predictions);
            out.rows.extend(r.rows);
            out.per_point.extend(r.per_point);
            if let Some(extra) = r.per_sample {
                out.per_sample.get_or_insert_with(Vec::new).extend(extra);
            }
        }
        Ok(out)
    }
}

fn fmt_metric(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else {
        format!("{x:.4}")
    }
}

fn fmt_csv(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else {
        x.to_string()
    }
}

pub fn emit_report(report: &EvalReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(report).map_err(|source| Error::Json {
                path: "<report>".into(),
                source,
            })?;
            text.push('\n');
            Ok(text.into_bytes())
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["model", "psnr_db", "ssim", "mae", "melr", "wasserstein"])?;
            for r in &report.rows {
                w.write_record([
                    r.model.clone(),
                    fmt_csv(r.psnr_db),
                    fmt_csv(r.ssim),
                    fmt_csv(r.mae),
                    fmt_csv(r.melr),
                    fmt_csv(r.wasserstein),
                ])?;
            }
            w.into_inner().map_err(|e| Error::io("<report>", e.into_error()))
        }
        ReportFormat::Markdown => {
            let mut s = String::new();
            s.push_str("| Model | PSNR | SSIM | MAE | MELR | Wasserstein |\n");
            s.push_str("|---|---|---|---|---|---|\n");
            for r in &report.rows {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} |",
                    r.model,
                    fmt_metric(r.psnr_db),
                    fmt_metric(r.ssim),
                    fmt_metric(r.mae),
                    fmt_metric(r.melr),
                    fmt_metric(r.wasserstein)
                );
            }
            Ok(s.into_bytes())
        }
    }
}

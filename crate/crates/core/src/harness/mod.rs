//! Evaluation pipeline, task construction, synthetic data and reports.

pub mod evaluate;
pub mod report;
pub mod synth;
pub mod task;

pub use evaluate::{evaluate, evaluate_detailed, evaluate_paths, EvalConfig, ModelPredictions, PredictionPaths};
pub use report::{emit_report, EvalReport, ReportFormat};
pub use synth::{synth_grf, SynthConfig};
pub use task::{build_task, TaskKind, TaskOptions};

//! Evaluation toolkit for wind-field super-resolution and downscaling.
//!
//! The crate covers the whole path from gridded u/v velocity data to the
//! numbers in an evaluation table:
//!
//! * [`grid`] and [`dataset`]: field data model, normalization, on-disk format
//! * [`resample`]: decimation, nearest-neighbor regridding, bilinear and bicubic upsampling
//! * [`fidelity`]: PSNR, SSIM and MAE
//! * [`spectral`]: power spectrum, radially averaged spectrum and the MELR score
//! * [`distribution`]: Gaussian KDE and the Wasserstein-1 distance
//! * [`power`]: turbine power curves and cumulative energy
//! * [`harness`]: task construction, synthetic fields, evaluation and reports

pub mod dataset;
pub mod distribution;
pub mod error;
pub mod fidelity;
pub mod grid;
pub mod harness;
pub mod power;
pub mod resample;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{Field2D, FieldSeries, GridSpec, NormStats, VelocitySample};

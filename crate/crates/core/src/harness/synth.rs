//! Seeded Gaussian random fields with a radial power-law spectrum, used as
//! a verification oracle for the spectral and resampling code.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field2D, FieldSeries, GridSpec, VelocitySample};
use crate::spectral::{fft2, signed_frequency};

/// 2020-01-01T00:00:00Z.
pub const SYNTH_EPOCH: i64 = 1_577_836_800;
pub const SYNTH_DT: i64 = 3600;

/// Mean and spread (m/s) applied to the unit-variance u and v fields.
const U_MEAN: f64 = 2.0;
const V_MEAN: f64 = 1.0;
const SPREAD: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub rows: usize,
    pub cols: usize,
    /// Target slope of the radial spectrum, `E(k) ~ k^slope`.
    pub spectral_slope: f64,
    pub seed: u64,
    pub count: usize,
    /// Zero all modes with radius above this wavenumber.
    #[serde(default)]
    pub max_wavenumber: Option<f64>,
}

impl SynthConfig {
    pub fn new(rows: usize, cols: usize, spectral_slope: f64, seed: u64, count: usize) -> Self {
        SynthConfig {
            rows,
            cols,
            spectral_slope,
            seed,
            count,
            max_wavenumber: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.spectral_slope.is_finite() || self.spectral_slope > 0.0 {
            return Err(Error::InvalidConfig("spectral slope must be finite and <= 0".into()));
        }
        if self.count < 1 {
            return Err(Error::InvalidConfig("count must be at least 1".into()));
        }
        if self.rows < 2 || self.cols < 2 {
            return Err(Error::InvalidConfig("fields must be at least 2x2".into()));
        }
        if let Some(k) = self.max_wavenumber {
            if k.is_nan() || k < 1.0 {
                return Err(Error::InvalidConfig("band limit must keep wavenumber 1".into()));
            }
        }
        Ok(())
    }

    /// ERA5-like 0.25 degree lattice starting at 55.5 N, 3.0 E.
    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.rows, self.cols, 55.5, 3.0, -0.25, 0.25, 25.0)
    }
}

/// One zero-mean, unit-variance field (row-major) whose expected radial
/// spectrum follows `k^slope`.
pub fn gaussian_random_field(
    rows: usize,
    cols: usize,
    slope: f64,
    max_wavenumber: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut data: Vec<Complex<f64>> = (0..rows * cols)
        .map(|_| Complex::new(StandardNormal.sample(rng), 0.0))
        .collect();
    fft2(&mut data, rows, cols, false);
    for p in 0..rows {
        let kx = signed_frequency(p, rows) as f64;
        for q in 0..cols {
            let ky = signed_frequency(q, cols) as f64;
            let k = kx.hypot(ky);
            let gain = if k == 0.0 || max_wavenumber.is_some_and(|m| k > m) {
                0.0
            } else {
                k.powf(0.5 * slope)
            };
            data[p * cols + q] *= gain;
        }
    }
    fft2(&mut data, rows, cols, true);
    let values: Vec<f64> = data.iter().map(|c| c.re).collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    values.iter().map(|x| (x - mean) / sd).collect()
}

/// Generates `count` hourly velocity samples. The u and v components are
/// independent fields; values are rounded to `f32` so the series survives a
/// trip through the on-disk format unchanged.
pub fn synth_grf(cfg: &SynthConfig) -> Result<FieldSeries> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples = Vec::with_capacity(cfg.count);
    for k in 0..cfg.count {
        let mut channel = |mean: f64| {
            let g = gaussian_random_field(cfg.rows, cfg.cols, cfg.spectral_slope, cfg.max_wavenumber, &mut rng);
            Field2D::new(grid, g.iter().map(|x| (mean + SPREAD * x) as f32 as f64).collect())
        };
        let u = channel(U_MEAN)?;
        let v = channel(V_MEAN)?;
        samples.push(VelocitySample::new(u, v, SYNTH_EPOCH + k as i64 * SYNTH_DT)?);
    }
    FieldSeries::new(samples, SYNTH_DT)
}

//! Pixel-level fidelity: PSNR, SSIM and MAE.
//!
//! SSIM uses global field statistics (one mean, standard deviation and
//! covariance over the whole field, with `N - 1` normalization) combined as
//! `C_l^alpha * C_c^beta * C_s^gamma`. A sliding-window variant is available
//! for cross-checks through [`ssim_windowed`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Field2D;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub peak: f64,
    pub k1: f64,
    pub k2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            peak: 1.0,
            k1: 0.01,
            k2: 0.03,
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.peak > 0.0 && self.peak.is_finite()) {
            return Err(Error::InvalidConfig("peak signal must be positive".into()));
        }
        if !(self.k1 > 0.0 && self.k2 > 0.0) {
            return Err(Error::InvalidConfig("k1 and k2 must be positive".into()));
        }
        if ![self.alpha, self.beta, self.gamma].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidConfig("SSIM exponents must be finite".into()));
        }
        Ok(())
    }

    fn c1(&self) -> f64 {
        (self.k1 * self.peak).powi(2)
    }

    fn c2(&self) -> f64 {
        (self.k2 * self.peak).powi(2)
    }
}

/// PSNR in decibels; `f64::INFINITY` when the fields are identical.
pub fn psnr(f: &Field2D, fhat: &Field2D, cfg: &MetricConfig) -> Result<f64> {
    f.require_same_shape(fhat)?;
    cfg.validate()?;
    let mse = mse(f.values(), fhat.values());
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (cfg.peak * cfg.peak / mse).log10())
}

pub fn mae(f: &Field2D, fhat: &Field2D) -> Result<f64> {
    f.require_same_shape(fhat)?;
    let n = f.len() as f64;
    Ok(f.values()
        .iter()
        .zip(fhat.values())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / n)
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64
}

/// The three SSIM factors for a pair of fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimComponents {
    pub luminance: f64,
    pub contrast: f64,
    pub structure: f64,
}

impl SsimComponents {
    pub fn combine(&self, cfg: &MetricConfig) -> f64 {
        pow(self.luminance, cfg.alpha) * pow(self.contrast, cfg.beta) * pow(self.structure, cfg.gamma)
    }
}

fn pow(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e.fract() == 0.0 && e.abs() < i32::MAX as f64 {
        x.powi(e as i32)
    } else {
        x.powf(e)
    }
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    mean_a: f64,
    mean_b: f64,
    sd_a: f64,
    sd_b: f64,
    cov: f64,
}

fn moments(a: impl Iterator<Item = f64> + Clone, b: impl Iterator<Item = f64> + Clone, n: usize) -> Moments {
    let nf = n as f64;
    let mean_a = a.clone().sum::<f64>() / nf;
    let mean_b = b.clone().sum::<f64>() / nf;
    let (mut var_a, mut var_b, mut cov) = (0.0, 0.0, 0.0);
    for (x, y) in a.zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        var_a += dx * dx;
        var_b += dy * dy;
        cov += dx * dy;
    }
    let denom = nf - 1.0;
    Moments {
        mean_a,
        mean_b,
        sd_a: (var_a / denom).sqrt(),
        sd_b: (var_b / denom).sqrt(),
        cov: cov / denom,
    }
}

fn components(m: &Moments, cfg: &MetricConfig) -> SsimComponents {
    let (c1, c2) = (cfg.c1(), cfg.c2());
    let c3 = c2 / 2.0;
    SsimComponents {
        luminance: (2.0 * m.mean_a * m.mean_b + c1) / (m.mean_a.powi(2) + m.mean_b.powi(2) + c1),
        contrast: (2.0 * m.sd_a * m.sd_b + c2) / (m.sd_a.powi(2) + m.sd_b.powi(2) + c2),
        structure: (m.cov + c3) / (m.sd_a * m.sd_b + c3),
    }
}

pub fn ssim_components(f: &Field2D, fhat: &Field2D, cfg: &MetricConfig) -> Result<SsimComponents> {
    f.require_same_shape(fhat)?;
    cfg.validate()?;
    if f.len() < 2 {
        return Err(Error::DegenerateField(f.len()));
    }
    let m = moments(f.values().iter().copied(), fhat.values().iter().copied(), f.len());
    Ok(components(&m, cfg))
}

/// Global-statistics SSIM.
pub fn ssim(f: &Field2D, fhat: &Field2D, cfg: &MetricConfig) -> Result<f64> {
    Ok(ssim_components(f, fhat, cfg)?.combine(cfg))
}

/// Mean SSIM over all `window x window` sub-blocks (stride 1). The window is
/// shrunk to the field size when the field is smaller.
pub fn ssim_windowed(f: &Field2D, fhat: &Field2D, cfg: &MetricConfig, window: usize) -> Result<f64> {
    f.require_same_shape(fhat)?;
    cfg.validate()?;
    let wr = window.min(f.rows());
    let wc = window.min(f.cols());
    if wr * wc < 2 {
        return Err(Error::DegenerateField(wr * wc));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for r0 in 0..=f.rows() - wr {
        for c0 in 0..=f.cols() - wc {
            let cells = (r0..r0 + wr).flat_map(|i| (c0..c0 + wc).map(move |j| (i, j)));
            let m = moments(
                cells.clone().map(|(i, j)| f.get(i, j)),
                cells.map(|(i, j)| fhat.get(i, j)),
                wr * wc,
            );
            total += components(&m, cfg).combine(cfg);
            count += 1;
        }
    }
    Ok(total / count as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    #[serde(with = "crate::harness::report::inf_f64")]
    pub psnr_db: f64,
    pub ssim: f64,
    pub mae: f64,
}

pub fn fidelity(f: &Field2D, fhat: &Field2D, cfg: &MetricConfig) -> Result<FidelityResult> {
    Ok(FidelityResult {
        psnr_db: psnr(f, fhat, cfg)?,
        ssim: ssim(f, fhat, cfg)?,
        mae: mae(f, fhat)?,
    })
}

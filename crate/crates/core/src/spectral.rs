//! Spatial spectra of gridded fields.
//!
//! The power spectrum uses a DFT normalized by `1 / (m n)` and is stored with
//! the DC term at `(0, 0)`. Signed frequencies run over `[-m/2, m/2)` along
//! rows and `[-n/2, n/2)` along columns. Radial bins are the rounded
//! Euclidean radius in integer cycles per field; only `1..=floor(min(m, n)/2)`
//! is kept, so the high-frequency corners of non-square grids are dropped.

use std::path::Path;
use std::str::FromStr;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Field2D;

/// Energies below this are treated as empty when forming log ratios.
pub const ENERGY_FLOOR: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    rows: usize,
    cols: usize,
    power: Vec<f64>,
}

impl Spectrum2D {
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn get(&self, p: usize, q: usize) -> f64 {
        self.power[p * self.cols + q]
    }

    /// Power at signed frequency `(kx, ky)`.
    pub fn at(&self, kx: isize, ky: isize) -> f64 {
        let p = kx.rem_euclid(self.rows as isize) as usize;
        let q = ky.rem_euclid(self.cols as isize) as usize;
        self.get(p, q)
    }

    pub fn total(&self) -> f64 {
        self.power.iter().sum()
    }
}

/// Signed frequency of DFT index `p` on an axis of length `n`.
pub fn signed_frequency(p: usize, n: usize) -> isize {
    if p < n.div_ceil(2) {
        p as isize
    } else {
        p as isize - n as isize
    }
}

/// In-place unnormalized 2D DFT of a row-major `m x n` buffer.
pub(crate) fn fft2(data: &mut [Complex<f64>], m: usize, n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(n), planner.plan_fft_inverse(m))
    } else {
        (planner.plan_fft_forward(n), planner.plan_fft_forward(m))
    };
    row_fft.process(data);
    let mut column = vec![Complex::new(0.0, 0.0); m];
    for q in 0..n {
        for p in 0..m {
            column[p] = data[p * n + q];
        }
        col_fft.process(&mut column);
        for p in 0..m {
            data[p * n + q] = column[p];
        }
    }
}

pub fn power_spectrum_2d(field: &Field2D) -> Spectrum2D {
    let (m, n) = (field.rows(), field.cols());
    let mut data: Vec<Complex<f64>> = field.values().iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft2(&mut data, m, n, false);
    let scale = 1.0 / (m * n) as f64;
    let power = data.iter().map(|c| (c * scale).norm_sqr()).collect();
    Spectrum2D {
        rows: m,
        cols: n,
        power,
    }
}

/// Radially averaged power spectral density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rapsd {
    pub wavenumbers: Vec<usize>,
    pub energies: Vec<f64>,
    pub counts: Vec<usize>,
    pub wavelengths_km: Vec<f64>,
    /// Non-DC cells whose radius rounds above the last kept bin.
    pub skipped_cells: usize,
}

impl Rapsd {
    pub fn k_max(&self) -> usize {
        self.wavenumbers.len()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        crate::dataset::write_csv(
            path,
            &["k", "wavelength_km", "energy", "count"],
            (0..self.k_max()).map(|b| {
                vec![
                    self.wavenumbers[b].to_string(),
                    self.wavelengths_km[b].to_string(),
                    self.energies[b].to_string(),
                    self.counts[b].to_string(),
                ]
            }),
        )
    }
}

pub fn rapsd(field: &Field2D) -> Result<Rapsd> {
    let (m, n) = (field.rows(), field.cols());
    if m < 4 || n < 4 {
        return Err(Error::FieldTooSmall { rows: m, cols: n });
    }
    Ok(rapsd_of_spectrum(&power_spectrum_2d(field), field.grid().spacing_km))
}

pub fn rapsd_of_spectrum(spec: &Spectrum2D, spacing_km: f64) -> Rapsd {
    let (m, n) = spec.dims();
    let k_max = m.min(n) / 2;
    let mut sums = vec![0.0; k_max + 1];
    let mut counts = vec![0usize; k_max + 1];
    let mut skipped = 0;
    for p in 0..m {
        let kx = signed_frequency(p, m) as f64;
        for q in 0..n {
            if p == 0 && q == 0 {
                continue;
            }
            let ky = signed_frequency(q, n) as f64;
            let k = kx.hypot(ky).round() as usize;
            if k > k_max {
                skipped += 1;
                continue;
            }
            sums[k] += spec.get(p, q);
            counts[k] += 1;
        }
    }
    let wavenumbers: Vec<usize> = (1..=k_max).collect();
    Rapsd {
        energies: wavenumbers.iter().map(|&k| sums[k] / counts[k] as f64).collect(),
        counts: wavenumbers.iter().map(|&k| counts[k]).collect(),
        wavelengths_km: wavenumbers.iter().map(|&k| spacing_km / k as f64).collect(),
        wavenumbers,
        skipped_cells: skipped,
    }
}

/// Bin-wise arithmetic mean of spectra sharing one binning.
pub fn mean_rapsd(spectra: &[Rapsd]) -> Result<Rapsd> {
    let first = spectra.first().ok_or(Error::EmptySpectrum)?;
    let mut out = first.clone();
    for s in &spectra[1..] {
        if s.wavenumbers != first.wavenumbers {
            return Err(Error::ShapeMismatch("spectra use different binnings".into()));
        }
        for (acc, e) in out.energies.iter_mut().zip(&s.energies) {
            *acc += e;
        }
    }
    let n = spectra.len() as f64;
    out.energies.iter_mut().for_each(|e| *e /= n);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MelrMode {
    /// Average of the per-bin absolute log ratios.
    #[default]
    Mean,
    /// Plain sum over bins.
    Sum,
}

impl FromStr for MelrMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(MelrMode::Mean),
            "sum" => Ok(MelrMode::Sum),
            other => Err(Error::InvalidConfig(format!("unknown MELR mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    E,
    Ten,
    Two,
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "ln" => Ok(LogBase::E),
            "10" => Ok(LogBase::Ten),
            "2" => Ok(LogBase::Two),
            other => Err(Error::InvalidConfig(format!("unknown log base {other:?}"))),
        }
    }
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::E => x.ln(),
            LogBase::Ten => x.log10(),
            LogBase::Two => x.log2(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MelrOptions {
    pub mode: MelrMode,
    pub base: LogBase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MelrValue {
    pub value: f64,
    pub valid_bins: usize,
    pub skipped_bins: usize,
}

pub fn melr(pred: &Field2D, reference: &Field2D, opts: MelrOptions) -> Result<MelrValue> {
    pred.require_same_shape(reference)?;
    melr_from_rapsd(&rapsd(pred)?, &rapsd(reference)?, opts)
}

pub fn melr_from_rapsd(pred: &Rapsd, reference: &Rapsd, opts: MelrOptions) -> Result<MelrValue> {
    if pred.wavenumbers != reference.wavenumbers {
        return Err(Error::ShapeMismatch("spectra use different binnings".into()));
    }
    let mut total = 0.0;
    let mut valid = 0;
    let mut skipped = 0;
    for (&ep, &er) in pred.energies.iter().zip(&reference.energies) {
        if ep < ENERGY_FLOOR || er < ENERGY_FLOOR {
            skipped += 1;
            continue;
        }
        total += opts.base.log(ep / er).abs();
        valid += 1;
    }
    if valid == 0 {
        return Err(Error::EmptySpectrum);
    }
    let value = match opts.mode {
        MelrMode::Mean => total / valid as f64,
        MelrMode::Sum => total,
    };
    Ok(MelrValue {
        value,
        valid_bins: valid,
        skipped_bins: skipped,
    })
}

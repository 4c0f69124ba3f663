//! Temporal wind-speed distributions: Gaussian KDE with Scott's-rule
//! bandwidth, and the Wasserstein-1 distance between empirical samples.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of points in the default KDE evaluation grid.
pub const DEFAULT_KDE_POINTS: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::DegenerateSamples(format!(
                "need at least 2 samples, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateSamples("non-finite sample".into()));
        }
        Ok(SampleSet { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sample standard deviation with `n - 1` normalization.
    pub fn std_dev(&self) -> f64 {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let ss: f64 = self.values.iter().map(|x| (x - mean).powi(2)).sum();
        (ss / (n - 1.0)).sqrt()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `h = sigma * n^(-1/5)`.
pub fn scott_bandwidth(s: &SampleSet) -> Result<f64> {
    let sd = s.std_dev();
    if sd <= 0.0 || !sd.is_finite() {
        return Err(Error::DegenerateSamples("zero sample variance".into()));
    }
    Ok(sd * (s.len() as f64).powf(-0.2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
}

impl Density {
    /// Trapezoidal integral over the evaluation grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }

    /// Writes `speed_ms,density` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        crate::dataset::write_csv(
            path,
            &["speed_ms", "density"],
            self.grid
                .iter()
                .zip(&self.density)
                .map(|(x, d)| vec![x.to_string(), d.to_string()]),
        )
    }
}

pub fn kde(s: &SampleSet, grid: &[f64], h: f64) -> Result<Density> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::DegenerateSamples(format!("bandwidth must be positive, got {h}")));
    }
    if grid
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        || grid.iter().any(|x| !x.is_finite())
    {
        return Err(Error::BadGrid);
    }
    let norm = 1.0 / (s.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
    let inv = 1.0 / (2.0 * h * h);
    let density = grid
        .iter()
        .map(|&x| norm * s.values.iter().map(|&xi| (-(x - xi).powi(2) * inv).exp()).sum::<f64>())
        .collect();
    Ok(Density {
        grid: grid.to_vec(),
        density,
    })
}

/// Evenly spaced points spanning `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|k| lo + step * k as f64).collect()
}

/// Wind-speed density on `DEFAULT_KDE_POINTS` points over `[0, max + 4h]`
/// with Scott's-rule bandwidth.
pub fn speed_density(s: &SampleSet) -> Result<Density> {
    let h = scott_bandwidth(s)?;
    let grid = linspace(0.0, s.max() + 4.0 * h, DEFAULT_KDE_POINTS);
    kde(s, &grid, h)
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Wasserstein-1 distance between two empirical distributions with uniform
/// weights.
pub fn wasserstein1(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySamples);
    }
    if a.len() == b.len() {
        Ok(wasserstein1_sorted_pairs(a, b))
    } else {
        Ok(wasserstein1_cdf(a, b))
    }
}

/// Equal-size case: mean absolute difference of order statistics.
pub fn wasserstein1_sorted_pairs(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "sorted-pair path needs equal sample counts");
    let (sa, sb) = (sorted(a), sorted(b));
    sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).sum::<f64>() / sa.len() as f64
}

/// General case: integral of `|F_a - F_b|` over the merged breakpoints.
pub fn wasserstein1_cdf(a: &[f64], b: &[f64]) -> f64 {
    let (sa, sb) = (sorted(a), sorted(b));
    let (na, nb) = (sa.len(), sb.len());
    let (mut i, mut j) = (0, 0);
    let mut total = 0.0;
    let mut prev = sa[0].min(sb[0]);
    while i < na || j < nb {
        let next = match (sa.get(i), sb.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        let fa = i as f64 / na as f64;
        let fb = j as f64 / nb as f64;
        total += (fa - fb).abs() * (next - prev);
        while i < na && sa[i] == next {
            i += 1;
        }
        while j < nb && sb[j] == next {
            j += 1;
        }
        prev = next;
    }
    total
}

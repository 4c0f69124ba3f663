//! Coarsening and interpolation operators.
//!
//! Upsampling is origin-aligned: output index `p` samples the source at
//! fractional index `p / factor`, so decimating an upsampled field returns
//! the source values. Out-of-range taps replicate the border cell.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{nearest_index, Field2D, GridSpec, VelocitySample};

/// Catmull-Rom cubic convolution parameter.
pub const CUBIC_A: f64 = -0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResampleFactor(usize);

impl ResampleFactor {
    pub fn new(factor: usize) -> Result<Self> {
        if factor < 2 {
            return Err(Error::InvalidConfig(format!(
                "resample factor must be at least 2, got {factor}"
            )));
        }
        Ok(ResampleFactor(factor))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpsampleMethod {
    Bicubic,
    Bilinear,
    Nearest,
}

impl FromStr for UpsampleMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bicubic" => Ok(UpsampleMethod::Bicubic),
            "bilinear" => Ok(UpsampleMethod::Bilinear),
            "nearest" => Ok(UpsampleMethod::Nearest),
            other => Err(Error::InvalidConfig(format!("unknown upsampling method {other:?}"))),
        }
    }
}

/// Keeps every `factor`-th grid point starting at index 0.
pub fn decimate(field: &Field2D, factor: ResampleFactor) -> Result<Field2D> {
    let f = factor.get();
    let grid = field.grid().decimated(f)?;
    Field2D::from_fn(grid, |i, j| field.get(i * f, j * f))
}

/// Each target cell takes the value of the source cell whose center is
/// nearest in latitude and longitude (ties toward the lower index).
pub fn nearest_regrid(field: &Field2D, target: &GridSpec) -> Result<Field2D> {
    target.validate()?;
    let src = field.grid();
    let rows = (0..target.rows)
        .map(|i| nearest_index(target.lat(i), src.lat_origin, src.lat_step, src.rows))
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::TargetNotCovered)?;
    let cols = (0..target.cols)
        .map(|j| nearest_index(target.lon(j), src.lon_origin, src.lon_step, src.cols))
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::TargetNotCovered)?;
    Field2D::from_fn(*target, |i, j| field.get(rows[i], cols[j]))
}

pub fn bicubic_upsample(field: &Field2D, factor: ResampleFactor) -> Result<Field2D> {
    upsample_with(field, factor, cubic_taps)
}

pub fn bilinear_upsample(field: &Field2D, factor: ResampleFactor) -> Result<Field2D> {
    upsample_with(field, factor, linear_taps)
}

/// Pixel replication: each output takes the nearest source sample.
pub fn nearest_upsample(field: &Field2D, factor: ResampleFactor) -> Result<Field2D> {
    upsample_with(field, factor, nearest_taps)
}

pub fn upsample(field: &Field2D, method: UpsampleMethod, factor: ResampleFactor) -> Result<Field2D> {
    match method {
        UpsampleMethod::Bicubic => bicubic_upsample(field, factor),
        UpsampleMethod::Bilinear => bilinear_upsample(field, factor),
        UpsampleMethod::Nearest => nearest_upsample(field, factor),
    }
}

pub fn upsample_sample(
    sample: &VelocitySample,
    method: UpsampleMethod,
    factor: ResampleFactor,
) -> Result<VelocitySample> {
    sample.map_channels(|f| upsample(f, method, factor))
}

/// Cubic convolution kernel.
pub fn cubic_kernel(x: f64) -> f64 {
    let a = CUBIC_A;
    let x = x.abs();
    if x <= 1.0 {
        ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a
    } else {
        0.0
    }
}

type Taps = Vec<(usize, f64)>;

fn clamp_index(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

fn cubic_taps(pos: f64, n: usize) -> Taps {
    let base = pos.floor();
    let t = pos - base;
    let base = base as isize;
    (-1..=2)
        .map(|k| (clamp_index(base + k, n), cubic_kernel(t - k as f64)))
        .collect()
}

fn linear_taps(pos: f64, n: usize) -> Taps {
    let base = pos.floor();
    let t = pos - base;
    let base = base as isize;
    vec![(clamp_index(base, n), 1.0 - t), (clamp_index(base + 1, n), t)]
}

fn nearest_taps(pos: f64, n: usize) -> Taps {
    let idx = (pos - 0.5).ceil() as isize;
    vec![(clamp_index(idx, n), 1.0)]
}

/// Per-output-position taps along one axis of length `n`.
fn axis_taps(n: usize, factor: usize, taps: fn(f64, usize) -> Taps) -> Vec<Taps> {
    (0..n * factor)
        .map(|p| {
            // Exact rational position keeps aligned outputs on integer taps.
            let whole = p / factor;
            let frac = (p % factor) as f64 / factor as f64;
            taps(whole as f64 + frac, n)
        })
        .collect()
}

fn upsample_with(field: &Field2D, factor: ResampleFactor, taps: fn(f64, usize) -> Taps) -> Result<Field2D> {
    let f = factor.get();
    let (rows, cols) = (field.rows(), field.cols());
    let grid = field.grid().refined(f)?;
    let col_taps = axis_taps(cols, f, taps);
    let row_taps = axis_taps(rows, f, taps);
    let out_cols = cols * f;

    // Horizontal pass on source rows.
    let mut wide = vec![0.0; rows * out_cols];
    for i in 0..rows {
        for (q, tq) in col_taps.iter().enumerate() {
            wide[i * out_cols + q] = tq.iter().map(|&(j, w)| w * field.get(i, j)).sum();
        }
    }
    let mut out = Vec::with_capacity(grid.len());
    for tp in &row_taps {
        for q in 0..out_cols {
            out.push(tp.iter().map(|&(i, w)| w * wide[i * out_cols + q]).sum());
        }
    }
    Field2D::new(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(rows: usize, cols: usize) -> GridSpec {
        GridSpec::new(rows, cols, 55.0, 5.0, -0.25, 0.25, 25.0).unwrap()
    }

    fn random_field(rows: usize, cols: usize, seed: u64) -> Field2D {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Field2D::from_fn(grid(rows, cols), |_, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    fn four() -> ResampleFactor {
        ResampleFactor::new(4).unwrap()
    }

    #[test]
    fn factor_bounds() {
        assert!(ResampleFactor::new(1).is_err());
        assert!(ResampleFactor::new(0).is_err());
        assert_eq!(ResampleFactor::new(4).unwrap().get(), 4);
    }

    #[test]
    fn decimate_index_arithmetic() {
        let g = grid(32, 32);
        let f = Field2D::from_fn(g, |i, j| (i * 32 + j) as f64).unwrap();
        let d = decimate(&f, four()).unwrap();
        assert_eq!((d.rows(), d.cols()), (8, 8));
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(d.get(i, j), ((i * 4) * 32 + j * 4) as f64);
            }
        }
        assert_eq!(d.grid().lat_step, -1.0);
        assert_eq!(d.grid().spacing_km, 100.0);
        let c = Field2D::filled(g, 2.5).unwrap();
        assert!(decimate(&c, four()).unwrap().values().iter().all(|&v| v == 2.5));
    }

    #[test]
    fn decimate_rejects_non_divisible() {
        let f = Field2D::filled(grid(30, 32), 0.0).unwrap();
        assert_eq!(decimate(&f, four()).unwrap_err().code(), "non-divisible-decimation");
    }

    #[test]
    fn cubic_kernel_shape() {
        assert_eq!(cubic_kernel(0.0), 1.0);
        assert_eq!(cubic_kernel(1.0), 0.0);
        assert_eq!(cubic_kernel(2.0), 0.0);
        assert_eq!(cubic_kernel(-0.5), 0.5625);
        assert_eq!(cubic_kernel(1.5), -0.0625);
        // Partition of unity.
        for k in 0..20 {
            let t = k as f64 / 20.0;
            let s: f64 = (-1..=2).map(|o| cubic_kernel(t - o as f64)).sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn upsamplers_reproduce_constants() {
        let c = Field2D::filled(grid(5, 7), -1.75).unwrap();
        for m in [
            UpsampleMethod::Bicubic,
            UpsampleMethod::Bilinear,
            UpsampleMethod::Nearest,
        ] {
            let up = upsample(&c, m, four()).unwrap();
            assert_eq!((up.rows(), up.cols()), (20, 28));
            assert!(up.values().iter().all(|&v| (v + 1.75).abs() < 1e-14), "{m:?}");
        }
    }

    #[test]
    fn bicubic_reproduces_linear_ramp_in_interior() {
        let g = grid(8, 9);
        let f = Field2D::from_fn(g, |i, j| 0.5 * i as f64 - 1.25 * j as f64 + 3.0).unwrap();
        let up = bicubic_upsample(&f, four()).unwrap();
        // Positions whose 4-tap stencil stays inside the source.
        for p in 4..(8 - 2) * 4 + 1 {
            for q in 4..(9 - 2) * 4 + 1 {
                let expect = 0.5 * p as f64 / 4.0 - 1.25 * q as f64 / 4.0 + 3.0;
                assert!((up.get(p, q) - expect).abs() < 1e-12, "({p},{q})");
            }
        }
    }

    #[test]
    fn bicubic_alignment_oracle() {
        let f = random_field(8, 8, 11);
        let up = bicubic_upsample(&f, four()).unwrap();
        assert_eq!((up.rows(), up.cols()), (32, 32));
        for i in 0..8 {
            for j in 0..8 {
                assert!((up.get(4 * i, 4 * j) - f.get(i, j)).abs() < 1e-6);
            }
        }
        assert_eq!(decimate(&up, four()).unwrap().values(), f.values());
    }

    #[test]
    fn bilinear_downscaling_dims_and_midpoint() {
        let f = random_field(34, 42, 3);
        let up = bilinear_upsample(&f, four()).unwrap();
        assert_eq!((up.rows(), up.cols()), (136, 168));
        let two = ResampleFactor::new(2).unwrap();
        let up2 = bilinear_upsample(&f, two).unwrap();
        let (a, b) = (f.get(5, 6), f.get(5, 7));
        assert!((up2.get(10, 13) - 0.5 * (a + b)).abs() < 1e-12);
    }

    #[test]
    fn nearest_upsample_replicates() {
        let f = random_field(4, 4, 5);
        let up = nearest_upsample(&f, four()).unwrap();
        assert_eq!(up.get(1, 1), f.get(0, 0));
        // Exact tie at p/factor = 0.5 goes to the lower source index.
        assert_eq!(up.get(2, 0), f.get(0, 0));
        assert_eq!(up.get(3, 0), f.get(1, 0));
    }

    #[test]
    fn upsamplers_are_linear() {
        for seed in 0..10 {
            let f = random_field(6, 5, seed);
            let g = random_field(6, 5, seed + 100);
            let (alpha, beta) = (0.7, -1.3);
            let combo = Field2D::from_fn(*f.grid(), |i, j| alpha * f.get(i, j) + beta * g.get(i, j)).unwrap();
            for m in [UpsampleMethod::Bicubic, UpsampleMethod::Bilinear] {
                let lhs = upsample(&combo, m, four()).unwrap();
                let uf = upsample(&f, m, four()).unwrap();
                let ug = upsample(&g, m, four()).unwrap();
                for k in 0..lhs.len() {
                    let rhs = alpha * uf.values()[k] + beta * ug.values()[k];
                    assert!((lhs.values()[k] - rhs).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn bilinear_never_widens_range_and_bicubic_overshoot_is_bounded() {
        for seed in 0..20 {
            let f = random_field(8, 8, seed);
            let (lo, hi) = f.min_max();
            let (blo, bhi) = bilinear_upsample(&f, four()).unwrap().min_max();
            assert!(blo >= lo - 1e-12 && bhi <= hi + 1e-12);

            let up = bicubic_upsample(&f, four()).unwrap();
            for p in 0..up.rows() {
                for q in 0..up.cols() {
                    let (ri, ci) = (p / 4, q / 4);
                    let mut nlo = f64::INFINITY;
                    let mut nhi = f64::NEG_INFINITY;
                    for di in -1..=2isize {
                        for dj in -1..=2isize {
                            let v = f.get(clamp_index(ri as isize + di, 8), clamp_index(ci as isize + dj, 8));
                            nlo = nlo.min(v);
                            nhi = nhi.max(v);
                        }
                    }
                    let x = up.get(p, q);
                    let over = (x - nhi).max(nlo - x).max(0.0);
                    assert!(over <= 0.25 * (nhi - nlo) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn nearest_regrid_identity_and_constant() {
        let f = random_field(6, 7, 9);
        assert_eq!(nearest_regrid(&f, f.grid()).unwrap(), f);
        let again = nearest_regrid(&nearest_regrid(&f, f.grid()).unwrap(), f.grid()).unwrap();
        assert_eq!(again, f);
        let c = Field2D::filled(*f.grid(), 4.0).unwrap();
        let t = GridSpec::new(3, 3, 54.8, 5.2, -0.3, 0.4, 30.0).unwrap();
        assert!(nearest_regrid(&c, &t).unwrap().values().iter().all(|&v| v == 4.0));
    }

    #[test]
    fn nearest_regrid_era5_to_coarsened_cosmo_membership() {
        // 0.25 degree source covering the 0.22 degree target.
        let src_grid = GridSpec::new(40, 48, 56.0, 2.0, -0.25, 0.25, 25.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let src = Field2D::from_fn(src_grid, |_, _| rng.random_range(0.0..1.0)).unwrap();
        let target = GridSpec::new(34, 42, 55.5, 2.5, -0.22, 0.22, 24.0).unwrap();
        let out = nearest_regrid(&src, &target).unwrap();
        for i in 0..34 {
            for j in 0..42 {
                let v = out.get(i, j);
                assert!(src.values().contains(&v));
                // Brute-force nearest in each axis.
                let lat = target.lat(i);
                let lon = target.lon(j);
                let bi = (0..40)
                    .min_by(|&a, &b| (src_grid.lat(a) - lat).abs().total_cmp(&(src_grid.lat(b) - lat).abs()))
                    .unwrap();
                let bj = (0..48)
                    .min_by(|&a, &b| (src_grid.lon(a) - lon).abs().total_cmp(&(src_grid.lon(b) - lon).abs()))
                    .unwrap();
                assert_eq!(v, src.get(bi, bj));
            }
        }
    }

    #[test]
    fn nearest_regrid_rejects_uncovered_target() {
        let f = random_field(6, 6, 1);
        let t = GridSpec::new(4, 4, 56.0, 5.0, -0.25, 0.25, 25.0).unwrap();
        assert_eq!(nearest_regrid(&f, &t).unwrap_err().code(), "target-not-covered");
        // Half a cell beyond the outer center is still covered.
        let edge = GridSpec::new(2, 2, 55.125, 4.875, -0.25, 0.25, 25.0).unwrap();
        assert!(nearest_regrid(&f, &edge).is_ok());
    }
}

//! Gridded wind-field data model: grid geometry, scalar fields, paired u/v
//! samples, time series of samples and min-max normalization statistics.
//!
//! Cell `(i, j)` has its center at
//! `(lat_origin + i * lat_step, lon_origin + j * lon_step)`. Rows index
//! latitude, columns index longitude, storage is row-major.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when a coordinate is compared against a lattice edge.
const LATTICE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub lat_origin: f64,
    pub lon_origin: f64,
    pub lat_step: f64,
    pub lon_step: f64,
    /// Grid spacing in kilometers; the `s` in `wavelength = s / k`.
    pub spacing_km: f64,
}

impl GridSpec {
    pub fn new(
        rows: usize,
        cols: usize,
        lat_origin: f64,
        lon_origin: f64,
        lat_step: f64,
        lon_step: f64,
        spacing_km: f64,
    ) -> Result<Self> {
        let grid = GridSpec {
            rows,
            cols,
            lat_origin,
            lon_origin,
            lat_step,
            lon_step,
            spacing_km,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows < 2 || self.cols < 2 {
            return Err(Error::InvalidGrid(format!(
                "grid must be at least 2x2, got {}x{}",
                self.rows, self.cols
            )));
        }
        let finite = [
            self.lat_origin,
            self.lon_origin,
            self.lat_step,
            self.lon_step,
            self.spacing_km,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidGrid("non-finite geometry".into()));
        }
        if self.lat_step == 0.0 || self.lon_step == 0.0 {
            return Err(Error::InvalidGrid("lattice steps must be non-zero".into()));
        }
        if self.spacing_km <= 0.0 {
            return Err(Error::InvalidGrid("spacing must be positive".into()));
        }
        Ok(())
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lat(&self, row: usize) -> f64 {
        self.lat_origin + row as f64 * self.lat_step
    }

    pub fn lon(&self, col: usize) -> f64 {
        self.lon_origin + col as f64 * self.lon_step
    }

    pub fn same_shape(&self, other: &GridSpec) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Cell containing `(lat, lon)` by planar nearest center, ties toward
    /// the lower index. Points more than half a cell beyond the outer
    /// centers are rejected.
    pub fn nearest_cell(&self, lat: f64, lon: f64) -> Result<(usize, usize)> {
        let row = nearest_index(lat, self.lat_origin, self.lat_step, self.rows);
        let col = nearest_index(lon, self.lon_origin, self.lon_step, self.cols);
        match (row, col) {
            (Some(r), Some(c)) => Ok((r, c)),
            _ => Err(Error::PointOutsideGrid { lat, lon }),
        }
    }

    /// Geometry of the lattice that keeps every `factor`-th point from index 0.
    pub fn decimated(&self, factor: usize) -> Result<GridSpec> {
        if factor == 0 || !self.rows.is_multiple_of(factor) || !self.cols.is_multiple_of(factor) {
            return Err(Error::NonDivisibleDecimation {
                rows: self.rows,
                cols: self.cols,
                factor,
            });
        }
        GridSpec::new(
            self.rows / factor,
            self.cols / factor,
            self.lat_origin,
            self.lon_origin,
            self.lat_step * factor as f64,
            self.lon_step * factor as f64,
            self.spacing_km * factor as f64,
        )
    }

    /// Geometry of the lattice with `factor` points per source step, sharing
    /// the source origin.
    pub fn refined(&self, factor: usize) -> Result<GridSpec> {
        if factor == 0 {
            return Err(Error::InvalidConfig("factor must be positive".into()));
        }
        let f = factor as f64;
        GridSpec::new(
            self.rows * factor,
            self.cols * factor,
            self.lat_origin,
            self.lon_origin,
            self.lat_step / f,
            self.lon_step / f,
            self.spacing_km / f,
        )
    }

    /// Sub-lattice starting at `(row0, col0)`.
    pub fn window(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Result<GridSpec> {
        GridSpec::new(
            rows,
            cols,
            self.lat(row0),
            self.lon(col0),
            self.lat_step,
            self.lon_step,
            self.spacing_km,
        )
    }
}

/// Fractional lattice position of `coord` along one axis.
pub(crate) fn lattice_position(coord: f64, origin: f64, step: f64) -> f64 {
    (coord - origin) / step
}

pub(crate) fn nearest_index(coord: f64, origin: f64, step: f64, n: usize) -> Option<usize> {
    let pos = lattice_position(coord, origin, step);
    let lo = -0.5 - LATTICE_EPS;
    let hi = n as f64 - 0.5 + LATTICE_EPS;
    if !pos.is_finite() || pos < lo || pos > hi {
        return None;
    }
    let idx = (pos - 0.5).ceil().max(0.0) as usize;
    Some(idx.min(n - 1))
}

/// A single gridded scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field2D {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} values for a {}x{} grid, got {}",
                grid.len(),
                grid.rows,
                grid.cols,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite value at index {pos}")));
        }
        Ok(Field2D { grid, values })
    }

    pub fn filled(grid: GridSpec, value: f64) -> Result<Self> {
        Field2D::new(grid, vec![value; grid.len()])
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.rows {
            for j in 0..grid.cols {
                values.push(f(i, j));
            }
        }
        Field2D::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn rows(&self) -> usize {
        self.grid.rows
    }

    pub fn cols(&self) -> usize {
        self.grid.cols
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.grid.cols + col]
    }

    /// Applies `f` to each value, keeping the grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Field2D> {
        Field2D::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub(crate) fn require_same_shape(&self, other: &Field2D) -> Result<()> {
        if !self.grid.same_shape(&other.grid) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(())
    }
}

/// Eastward (`u`) and northward (`v`) components on one grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySample {
    u: Field2D,
    v: Field2D,
    timestamp: i64,
}

impl VelocitySample {
    pub fn new(u: Field2D, v: Field2D, timestamp: i64) -> Result<Self> {
        if u.grid != v.grid {
            return Err(Error::ShapeMismatch("u and v components must share one grid".into()));
        }
        Ok(VelocitySample { u, v, timestamp })
    }

    pub fn u(&self) -> &Field2D {
        &self.u
    }

    pub fn v(&self) -> &Field2D {
        &self.v
    }

    pub fn timestamp(&self) -> i64 {
        self.timestamp
    }

    pub fn grid(&self) -> &GridSpec {
        &self.u.grid
    }

    pub fn map_channels(&self, f: impl Fn(&Field2D) -> Result<Field2D>) -> Result<VelocitySample> {
        VelocitySample::new(f(&self.u)?, f(&self.v)?, self.timestamp)
    }
}

/// Time-ordered velocity samples with a uniform step.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSeries {
    samples: Vec<VelocitySample>,
    dt: i64,
}

impl FieldSeries {
    pub fn new(samples: Vec<VelocitySample>, dt: i64) -> Result<Self> {
        if dt <= 0 {
            return Err(Error::InvalidSeries(format!("time step must be positive, got {dt}")));
        }
        if let Some(first) = samples.first() {
            let grid = *first.grid();
            for (k, s) in samples.iter().enumerate() {
                if *s.grid() != grid {
                    return Err(Error::ShapeMismatch(format!(
                        "sample {k} does not share the series grid"
                    )));
                }
                if k > 0 {
                    let step = s.timestamp - samples[k - 1].timestamp;
                    if step != dt {
                        return Err(Error::InvalidSeries(format!(
                            "timestamps must advance by {dt} s; sample {k} advances by {step} s"
                        )));
                    }
                }
            }
        }
        Ok(FieldSeries { samples, dt })
    }

    pub fn samples(&self) -> &[VelocitySample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<VelocitySample> {
        self.samples
    }

    pub fn dt(&self) -> i64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn grid(&self) -> Option<&GridSpec> {
        self.samples.first().map(|s| s.grid())
    }

    pub fn timestamps(&self) -> Vec<i64> {
        self.samples.iter().map(|s| s.timestamp).collect()
    }

    /// Applies a per-channel transform to every sample.
    pub fn map_channels(&self, f: impl Fn(&Field2D) -> Result<Field2D>) -> Result<FieldSeries> {
        let samples = self
            .samples
            .iter()
            .map(|s| s.map_channels(&f))
            .collect::<Result<Vec<_>>>()?;
        FieldSeries::new(samples, self.dt)
    }
}

/// Per-channel min-max range and the mean of the scaled training values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub u_mean: f64,
    pub v_mean: f64,
}

impl NormStats {
    pub fn validate(&self) -> Result<()> {
        let all = [self.u_min, self.u_max, self.v_min, self.v_max, self.u_mean, self.v_mean];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidStats("non-finite statistic".into()));
        }
        if self.u_min >= self.u_max || self.v_min >= self.v_max {
            return Err(Error::InvalidStats("min must be below max".into()));
        }
        if !(0.0..=1.0).contains(&self.u_mean) || !(0.0..=1.0).contains(&self.v_mean) {
            return Err(Error::InvalidStats("means must lie in [0, 1]".into()));
        }
        Ok(())
    }

    fn channel(&self, which: Channel) -> (f64, f64, f64) {
        match which {
            Channel::U => (self.u_min, self.u_max, self.u_mean),
            Channel::V => (self.v_min, self.v_max, self.v_mean),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Channel {
    U,
    V,
}

/// Extrema and scaled means over every u and v value in the training series.
pub fn compute_stats(training: &FieldSeries) -> Result<NormStats> {
    if training.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let (u_min, u_max) = channel_extrema(training, Channel::U);
    let (v_min, v_max) = channel_extrema(training, Channel::V);
    if u_min == u_max {
        return Err(Error::DegenerateRange {
            channel: "u",
            value: u_min,
        });
    }
    if v_min == v_max {
        return Err(Error::DegenerateRange {
            channel: "v",
            value: v_min,
        });
    }
    let u_mean = scaled_mean(training, Channel::U, u_min, u_max);
    let v_mean = scaled_mean(training, Channel::V, v_min, v_max);
    let stats = NormStats {
        u_min,
        u_max,
        v_min,
        v_max,
        u_mean,
        v_mean,
    };
    stats.validate()?;
    Ok(stats)
}

fn channel_values(series: &FieldSeries, which: Channel) -> impl Iterator<Item = f64> + '_ {
    series.samples.iter().flat_map(move |s| {
        let field = match which {
            Channel::U => &s.u,
            Channel::V => &s.v,
        };
        field.values.iter().copied()
    })
}

fn channel_extrema(series: &FieldSeries, which: Channel) -> (f64, f64) {
    channel_values(series, which).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn scaled_mean(series: &FieldSeries, which: Channel, lo: f64, hi: f64) -> f64 {
    let range = hi - lo;
    // Per-sample sums added in sorted order, so the mean does not depend on
    // the order of the training samples.
    let mut partial: Vec<f64> = series
        .samples
        .iter()
        .map(|s| {
            let field = match which {
                Channel::U => &s.u,
                Channel::V => &s.v,
            };
            field.values.iter().map(|&x| (x - lo) / range).sum()
        })
        .collect();
    partial.sort_by(f64::total_cmp);
    let count = series.samples.len() * series.samples[0].u.len();
    (partial.iter().sum::<f64>() / count as f64).clamp(0.0, 1.0)
}

fn normalize_field(field: &Field2D, (lo, hi, mean): (f64, f64, f64)) -> Result<Field2D> {
    let range = hi - lo;
    field.map(|x| (x - lo) / range - mean)
}

fn denormalize_field(field: &Field2D, (lo, hi, mean): (f64, f64, f64)) -> Result<Field2D> {
    let range = hi - lo;
    field.map(|y| (y + mean) * range + lo)
}

/// Maps each sample onto the training-scaled range. Values outside the
/// training extrema are kept as they are, not clipped.
pub fn normalize_sample(sample: &VelocitySample, stats: &NormStats) -> Result<VelocitySample> {
    stats.validate()?;
    VelocitySample::new(
        normalize_field(&sample.u, stats.channel(Channel::U))?,
        normalize_field(&sample.v, stats.channel(Channel::V))?,
        sample.timestamp,
    )
}

pub fn denormalize_sample(sample: &VelocitySample, stats: &NormStats) -> Result<VelocitySample> {
    stats.validate()?;
    VelocitySample::new(
        denormalize_field(&sample.u, stats.channel(Channel::U))?,
        denormalize_field(&sample.v, stats.channel(Channel::V))?,
        sample.timestamp,
    )
}

pub fn normalize(series: &FieldSeries, stats: &NormStats) -> Result<FieldSeries> {
    let samples = series
        .samples
        .iter()
        .map(|s| normalize_sample(s, stats))
        .collect::<Result<Vec<_>>>()?;
    FieldSeries::new(samples, series.dt)
}

pub fn denormalize(series: &FieldSeries, stats: &NormStats) -> Result<FieldSeries> {
    let samples = series
        .samples
        .iter()
        .map(|s| denormalize_sample(s, stats))
        .collect::<Result<Vec<_>>>()?;
    FieldSeries::new(samples, series.dt)
}

/// Horizontal wind speed `sqrt(u^2 + v^2)` per cell. Expects physical units.
pub fn wind_speed(sample: &VelocitySample) -> Field2D {
    let values = sample
        .u
        .values
        .iter()
        .zip(&sample.v.values)
        .map(|(&u, &v)| u.hypot(v))
        .collect();
    Field2D {
        grid: sample.u.grid,
        values,
    }
}

/// Speed time series at the grid cell nearest to `(lat, lon)`.
pub fn extract_point_series(series: &FieldSeries, lat: f64, lon: f64) -> Result<Vec<(i64, f64)>> {
    let Some(grid) = series.grid() else {
        return Ok(Vec::new());
    };
    let (row, col) = grid.nearest_cell(lat, lon)?;
    Ok(point_series_at(series, row, col))
}

pub(crate) fn point_series_at(series: &FieldSeries, row: usize, col: usize) -> Vec<(i64, f64)> {
    series
        .samples
        .iter()
        .map(|s| (s.timestamp, s.u.get(row, col).hypot(s.v.get(row, col))))
        .collect()
}

pub fn extract_patch(field: &Field2D, row0: usize, col0: usize, height: usize, width: usize) -> Result<Field2D> {
    let out_of_bounds = || Error::PatchOutOfBounds {
        row0,
        col0,
        height,
        width,
        rows: field.rows(),
        cols: field.cols(),
    };
    let row_end = row0.checked_add(height).ok_or_else(out_of_bounds)?;
    let col_end = col0.checked_add(width).ok_or_else(out_of_bounds)?;
    if height == 0 || width == 0 || row_end > field.rows() || col_end > field.cols() {
        return Err(out_of_bounds());
    }
    let grid = field.grid.window(row0, col0, height, width)?;
    let cols = field.cols();
    let mut values = Vec::with_capacity(height * width);
    for i in row0..row_end {
        values.extend_from_slice(&field.values[i * cols + col0..i * cols + col_end]);
    }
    Ok(Field2D { grid, values })
}

pub fn extract_sample_patch(
    sample: &VelocitySample,
    row0: usize,
    col0: usize,
    height: usize,
    width: usize,
) -> Result<VelocitySample> {
    sample.map_channels(|f| extract_patch(f, row0, col0, height, width))
}

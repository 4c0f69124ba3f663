//! Turbine power curves and cumulative energy at a grid point.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const E92_JSON: &str = include_str!("../data/enercon_e92_2350.json");

/// Tabulated speed-to-power relation with cut-in and cut-out semantics.
///
/// Power is linearly interpolated between table points, zero below
/// `cut_in_ms` and zero at or above `cut_out_ms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurve {
    pub name: String,
    pub hub_height_m: f64,
    pub cut_in_ms: f64,
    pub cut_out_ms: f64,
    pub rated_power_kw: f64,
    pub points: Vec<[f64; 2]>,
}

impl PowerCurve {
    /// The Enercon E92/2350 curve (98 m hub height) shipped with the crate.
    pub fn enercon_e92() -> PowerCurve {
        PowerCurve::from_json(E92_JSON).expect("bundled power curve is valid")
    }

    pub fn from_json(text: &str) -> Result<PowerCurve> {
        let curve: PowerCurve = serde_json::from_str(text).map_err(|e| Error::InvalidCurve(e.to_string()))?;
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCurve(msg));
        if self.points.is_empty() {
            return bad("no table points".into());
        }
        let scalars = [self.hub_height_m, self.cut_in_ms, self.cut_out_ms, self.rated_power_kw];
        if scalars.iter().any(|x| !x.is_finite()) {
            return bad("non-finite parameter".into());
        }
        if !(0.0 <= self.cut_in_ms && self.cut_in_ms < self.cut_out_ms) {
            return bad("need 0 <= cut-in < cut-out".into());
        }
        for w in self.points.windows(2) {
            if w[1][0].partial_cmp(&w[0][0]) != Some(std::cmp::Ordering::Greater) {
                return bad(format!("speeds must increase strictly ({} then {})", w[0][0], w[1][0]));
            }
        }
        for &[s, p] in &self.points {
            if !s.is_finite() || !p.is_finite() || s < 0.0 {
                return bad(format!("invalid point ({s}, {p})"));
            }
            if p < 0.0 {
                return bad(format!("negative power {p} at {s} m/s"));
            }
            if s < self.cut_in_ms && p != 0.0 {
                return bad(format!("power {p} below cut-in at {s} m/s"));
            }
        }
        let max = self.points.iter().map(|p| p[1]).fold(0.0, f64::max);
        if max != self.rated_power_kw {
            return bad(format!(
                "maximum table power {max} differs from rated power {}",
                self.rated_power_kw
            ));
        }
        Ok(())
    }

    /// Power in kW at a hub-height speed in m/s.
    pub fn power(&self, speed: f64) -> f64 {
        if speed.is_nan() || speed < self.cut_in_ms || speed >= self.cut_out_ms {
            return 0.0;
        }
        let first = self.points[0];
        let last = self.points[self.points.len() - 1];
        if speed < first[0] {
            return 0.0;
        }
        if speed >= last[0] {
            return last[1];
        }
        // First table point strictly above `speed`.
        let hi = self.points.partition_point(|p| p[0] <= speed);
        let [s0, p0] = self.points[hi - 1];
        let [s1, p1] = self.points[hi];
        p0 + (p1 - p0) * (speed - s0) / (s1 - s0)
    }

    /// Lowest table speed at which rated power is reached.
    pub fn rated_speed(&self) -> f64 {
        self.points
            .iter()
            .find(|p| p[1] == self.rated_power_kw)
            .map(|p| p[0])
            .unwrap_or(self.cut_out_ms)
    }
}

pub fn load_power_curve(path: impl AsRef<Path>) -> Result<PowerCurve> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    PowerCurve::from_json(&text)
}

pub fn power_from_speed(speed: f64, curve: &PowerCurve) -> f64 {
    curve.power(speed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    pub timestamps: Vec<i64>,
    pub power_kw: Vec<f64>,
    pub cumulative_kwh: Vec<f64>,
}

impl PowerSeries {
    pub fn total_kwh(&self) -> f64 {
        self.cumulative_kwh.last().copied().unwrap_or(0.0)
    }

    /// Writes `timestamp,power_kw,cumulative_kwh` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        crate::dataset::write_csv(
            path,
            &["timestamp", "power_kw", "cumulative_kwh"],
            (0..self.timestamps.len()).map(|k| {
                vec![
                    self.timestamps[k].to_string(),
                    self.power_kw[k].to_string(),
                    self.cumulative_kwh[k].to_string(),
                ]
            }),
        )
    }
}

/// Per-step power and the running energy total `sum(power * dt_hours)`.
pub fn cumulative_power(speeds: &[(i64, f64)], curve: &PowerCurve, dt_hours: f64) -> PowerSeries {
    let mut total = 0.0;
    let mut out = PowerSeries {
        timestamps: Vec::with_capacity(speeds.len()),
        power_kw: Vec::with_capacity(speeds.len()),
        cumulative_kwh: Vec::with_capacity(speeds.len()),
    };
    for &(t, s) in speeds {
        let p = curve.power(s);
        total += p * dt_hours;
        out.timestamps.push(t);
        out.power_kw.push(p);
        out.cumulative_kwh.push(total);
    }
    out
}

/// Step-wise `cumulative_pred - cumulative_ref` in kWh.
pub fn power_difference(pred: &PowerSeries, reference: &PowerSeries) -> Result<Vec<f64>> {
    if pred.timestamps != reference.timestamps {
        return Err(Error::TimeMisalignment(format!(
            "power series have {} and {} steps with differing timestamps",
            pred.timestamps.len(),
            reference.timestamps.len()
        )));
    }
    Ok(pred
        .cumulative_kwh
        .iter()
        .zip(&reference.cumulative_kwh)
        .map(|(a, b)| a - b)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hourly(speeds: &[f64]) -> Vec<(i64, f64)> {
        speeds.iter().enumerate().map(|(k, &s)| (k as i64 * 3600, s)).collect()
    }

    #[test]
    fn bundled_curve() {
        let c = PowerCurve::enercon_e92();
        assert_eq!(c.rated_power_kw, 2350.0);
        assert_eq!(c.hub_height_m, 98.0);
        assert_eq!(c.rated_speed(), 14.0);
    }

    #[test]
    fn power_semantics() {
        let c = PowerCurve::enercon_e92();
        assert_eq!(c.power(0.0), 0.0);
        assert_eq!(c.power(1.99), 0.0);
        assert_eq!(c.power(26.0), 0.0);
        assert_eq!(c.power(25.0), 0.0);
        assert_eq!(c.power(24.999), 2350.0);
        assert_eq!(c.power(17.0), 2350.0);
        assert_eq!(c.power(f64::NAN), 0.0);
        // Midway between two table points.
        assert!((c.power(7.5) - 0.5 * (637.0 + 975.8)).abs() < 1e-9);
        assert_eq!(c.power(8.0), 975.8);
    }

    #[test]
    fn power_is_monotone_up_to_rated() {
        let c = PowerCurve::enercon_e92();
        let mut last = 0.0;
        let mut s = c.cut_in_ms;
        while s <= c.rated_speed() {
            let p = c.power(s);
            assert!(p >= last);
            last = p;
            s += 0.01;
        }
    }

    #[test]
    fn rejects_invalid_curves() {
        let e = PowerCurve::from_json("").unwrap_err();
        assert_eq!(e.code(), "invalid-curve");
        let dec = r#"{"name":"x","hub_height_m":1,"cut_in_ms":1,"cut_out_ms":20,"rated_power_kw":5,
            "points":[[3,1],[2,5]]}"#;
        assert_eq!(PowerCurve::from_json(dec).unwrap_err().code(), "invalid-curve");
        let neg = r#"{"name":"x","hub_height_m":1,"cut_in_ms":1,"cut_out_ms":20,"rated_power_kw":5,
            "points":[[2,-1],[3,5]]}"#;
        assert!(PowerCurve::from_json(neg).is_err());
        let rated = r#"{"name":"x","hub_height_m":1,"cut_in_ms":1,"cut_out_ms":20,"rated_power_kw":6,
            "points":[[2,1],[3,5]]}"#;
        assert!(PowerCurve::from_json(rated).is_err());
        let empty = r#"{"name":"x","hub_height_m":1,"cut_in_ms":1,"cut_out_ms":20,"rated_power_kw":0,
            "points":[]}"#;
        assert!(PowerCurve::from_json(empty).is_err());
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, E92_JSON).unwrap();
        assert_eq!(load_power_curve(&path).unwrap(), PowerCurve::enercon_e92());
        fs::write(&path, "").unwrap();
        assert_eq!(load_power_curve(&path).unwrap_err().code(), "invalid-curve");
        assert!(load_power_curve(dir.path().join("missing.json")).unwrap_err().is_io());
    }

    #[test]
    fn cumulative_energy() {
        let c = PowerCurve::enercon_e92();
        let s = cumulative_power(&hourly(&[15.0; 24]), &c, 1.0);
        assert_eq!(s.total_kwh(), 56_400.0);
        assert!(s.cumulative_kwh.windows(2).all(|w| w[1] >= w[0]));
        let calm = cumulative_power(&hourly(&[1.0; 10]), &c, 1.0);
        assert!(calm.cumulative_kwh.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn cumulative_is_additive_over_splits() {
        let c = PowerCurve::enercon_e92();
        let speeds: Vec<f64> = (0..500).map(|k| (k as f64 * 0.37).sin().abs() * 20.0).collect();
        let all = hourly(&speeds);
        let whole = cumulative_power(&all, &c, 1.0).total_kwh();
        let a = cumulative_power(&all[..173], &c, 1.0).total_kwh();
        let b = cumulative_power(&all[173..], &c, 1.0).total_kwh();
        assert!((a + b - whole).abs() <= 1e-9 * whole);
    }

    #[test]
    fn differences() {
        let c = PowerCurve::enercon_e92();
        let r = cumulative_power(&hourly(&[8.0; 5]), &c, 1.0);
        assert!(power_difference(&r, &r).unwrap().iter().all(|&d| d == 0.0));
        let mut p = r.clone();
        let mut acc = 0.0;
        for k in 0..5 {
            p.power_kw[k] += 10.0;
            acc += p.power_kw[k];
            p.cumulative_kwh[k] = acc;
        }
        let d = power_difference(&p, &r).unwrap();
        for (k, x) in d.iter().enumerate() {
            assert!((x - 10.0 * (k + 1) as f64).abs() < 1e-9);
        }
        let short = cumulative_power(&hourly(&[8.0; 4]), &c, 1.0);
        assert_eq!(power_difference(&short, &r).unwrap_err().code(), "time-misalignment");
    }

    #[test]
    fn jensen_gap() {
        let c = PowerCurve::enercon_e92();
        let (lo, hi) = (4.0, 10.0);
        let mean_power = 0.5 * (c.power(lo) + c.power(hi));
        let power_of_mean = c.power(0.5 * (lo + hi));
        assert!(mean_power - power_of_mean > 300.0);
    }
}

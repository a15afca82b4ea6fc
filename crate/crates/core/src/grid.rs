//! Continuous paths sampled on a uniform time grid.

use crate::error::{Error, Result};

/// A path of duration `duration` sampled at `n + 1` equally spaced
/// times `i·duration/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    duration: f64,
    values: Vec<f64>,
}

impl GridPath {
    pub fn new(duration: f64, values: Vec<f64>) -> Result<Self> {
        if !(duration > 0.0) {
            return Err(Error::invalid("GridPath: duration must be positive"));
        }
        if values.len() < 2 {
            return Err(Error::invalid("GridPath: need at least two grid values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("GridPath: values must be finite"));
        }
        Ok(GridPath { duration, values })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Number of grid intervals N (the path holds N + 1 values).
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.duration / self.steps() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn start(&self) -> f64 {
        self.values[0]
    }

    pub fn end(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn time_at(&self, index: usize) -> f64 {
        index as f64 * self.duration / self.steps() as f64
    }

    /// Value at an arbitrary time in [0, duration] by linear
    /// interpolation between grid points.
    pub fn interpolate(&self, t: f64) -> f64 {
        let n = self.steps() as f64;
        let s = (t / self.duration * n).clamp(0.0, n);
        let i = s.floor() as usize;
        if i >= self.steps() {
            return self.end();
        }
        let frac = s - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Grid index closest to time `t`.
    pub fn index_at(&self, t: f64) -> usize {
        let n = self.steps() as f64;
        ((t / self.duration * n).round() as usize).min(self.steps())
    }

    /// Concatenate `self` and `other`, offsetting `other` so the junction
    /// is continuous, and resample onto a uniform grid with `n_total`
    /// intervals over the combined duration.
    ///
    /// The second path is required to begin where the first one ends
    /// (within 1e-12); the combined endpoint is pinned exactly.
    pub fn concat(&self, other: &GridPath, n_total: usize) -> Result<GridPath> {
        let junction_gap = (self.end() - other.start()).abs();
        if junction_gap > 1e-12 {
            return Err(Error::invalid(format!(
                "concat: junction mismatch {junction_gap:.3e} exceeds 1e-12"
            )));
        }
        if n_total < 2 {
            return Err(Error::invalid("concat: need at least two intervals"));
        }
        let offset = self.end() - other.start();
        let total = self.duration + other.duration;
        let mut values = Vec::with_capacity(n_total + 1);
        for i in 0..=n_total {
            let t = i as f64 / n_total as f64 * total;
            let v = if t <= self.duration {
                self.interpolate(t)
            } else {
                other.interpolate(t - self.duration) + offset
            };
            values.push(v);
        }
        // Pin both ends exactly.
        values[0] = self.start();
        values[n_total] = other.end() + offset;
        GridPath::new(total, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert!(GridPath::new(0.0, vec![0.0, 1.0]).is_err());
        assert!(GridPath::new(1.0, vec![0.0]).is_err());
        assert!(GridPath::new(1.0, vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn interpolation_hits_grid_points() {
        let p = GridPath::new(2.0, vec![0.0, 1.0, -1.0, 3.0]).unwrap();
        for i in 0..=3 {
            assert_eq!(p.interpolate(p.time_at(i)), p.values()[i]);
        }
        assert!((p.interpolate(1.0 / 3.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn concat_durations_add_and_junction_continuous() {
        let p1 = GridPath::new(1.0, vec![0.0, 0.5, 1.0]).unwrap();
        let p2 = GridPath::new(1.0, vec![1.0, 0.5, -2.0]).unwrap();
        let c = p1.concat(&p2, 8).unwrap();
        assert_eq!(c.duration(), 2.0);
        assert_eq!(c.start(), 0.0);
        assert_eq!(c.end(), -2.0);
        // Value at the junction time equals the first path's endpoint.
        assert!((c.interpolate(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concat_rejects_junction_gap() {
        let p1 = GridPath::new(1.0, vec![0.0, 1.0]).unwrap();
        let p2 = GridPath::new(1.0, vec![0.5, 0.0]).unwrap();
        assert!(p1.concat(&p2, 4).is_err());
    }
}

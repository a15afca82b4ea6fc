//! Greatest convex minorant of a grid path, with the segment
//! statistics used by the last-slope law checks.

use crate::error::{Error, Result};
use crate::grid::GridPath;

/// Greatest convex minorant, stored as the grid indices of its
/// vertices (always including both endpoints).
#[derive(Debug, Clone, PartialEq)]
pub struct Minorant {
    duration: f64,
    vertex_indices: Vec<usize>,
    vertex_times: Vec<f64>,
    vertex_values: Vec<f64>,
}

impl Minorant {
    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn vertex_indices(&self) -> &[usize] {
        &self.vertex_indices
    }

    pub fn vertex_times(&self) -> &[f64] {
        &self.vertex_times
    }

    pub fn vertex_values(&self) -> &[f64] {
        &self.vertex_values
    }

    pub fn segment_count(&self) -> usize {
        self.vertex_indices.len() - 1
    }

    /// Slope of the i-th linear segment.
    pub fn slope(&self, i: usize) -> f64 {
        (self.vertex_values[i + 1] - self.vertex_values[i])
            / (self.vertex_times[i + 1] - self.vertex_times[i])
    }

    /// Slope of the final segment, ending at the right endpoint.
    pub fn last_slope(&self) -> f64 {
        self.slope(self.segment_count() - 1)
    }

    pub fn slopes(&self) -> Vec<f64> {
        (0..self.segment_count()).map(|i| self.slope(i)).collect()
    }

    /// Value of the minorant at time t (linear between vertices).
    pub fn value_at(&self, t: f64) -> f64 {
        let k = match self
            .vertex_times
            .binary_search_by(|v| v.total_cmp(&t))
        {
            Ok(i) => return self.vertex_values[i],
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let k = k.min(self.segment_count() - 1);
        self.vertex_values[k] + self.slope(k) * (t - self.vertex_times[k])
    }
}

/// Lower convex hull of the grid points by a single monotone sweep;
/// vertices within slope tolerance 1e-12 are merged into one segment.
pub fn convex_minorant(p: &GridPath) -> Result<Minorant> {
    let vs = p.values();
    if vs.len() < 2 {
        return Err(Error::invalid("convex_minorant: need at least one step"));
    }
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..vs.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Keep b only if it lies strictly below the chord a→i.
            let left = (vs[b] - vs[a]) * ((i - b) as f64);
            let right = (vs[i] - vs[b]) * ((b - a) as f64);
            if left - right > -1e-12 * ((i - a) as f64) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let vertex_times: Vec<f64> = hull.iter().map(|&i| p.time_at(i)).collect();
    let vertex_values: Vec<f64> = hull.iter().map(|&i| vs[i]).collect();
    Ok(Minorant {
        duration: p.duration(),
        vertex_indices: hull,
        vertex_times,
        vertex_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::sampler::sample_bridge;

    fn path(vs: &[f64]) -> GridPath {
        GridPath::new(1.0, vs.to_vec()).unwrap()
    }

    #[test]
    fn simple_examples() {
        // V shape: two segments.
        let m = convex_minorant(&path(&[0.0, 1.0, -1.0, 0.0])).unwrap();
        assert_eq!(m.vertex_indices(), &[0, 2, 3]);
        assert_eq!(m.segment_count(), 2);
        assert!((m.slope(0) + 1.5).abs() < 1e-12);
        assert!((m.last_slope() - 3.0).abs() < 1e-12);
        // Convex path: every point is a vertex.
        let m = convex_minorant(&path(&[0.0, -1.0, -1.5, -1.0, 0.5])).unwrap();
        assert_eq!(m.vertex_indices(), &[0, 1, 2, 3, 4]);
        // Concave path: single segment.
        let m = convex_minorant(&path(&[0.0, 1.0, 1.5, 1.0, 0.5])).unwrap();
        assert_eq!(m.vertex_indices(), &[0, 4]);
        assert_eq!(m.segment_count(), 1);
        assert!((m.last_slope() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn collinear_points_merge() {
        let m = convex_minorant(&path(&[0.0, -0.25, -0.5, -0.75, -1.0])).unwrap();
        assert_eq!(m.segment_count(), 1);
        assert!((m.last_slope() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn minorant_lies_below_path() {
        let mut rng = RngStream::new(41, 0);
        for _ in 0..50 {
            let p = sample_bridge(256, 1.0, -1.0, &mut rng).unwrap();
            let m = convex_minorant(&p).unwrap();
            for i in 0..=p.steps() {
                let t = p.time_at(i);
                assert!(m.value_at(t) <= p.values()[i] + 1e-9);
            }
            // Slopes are nondecreasing.
            let s = m.slopes();
            for w in s.windows(2) {
                assert!(w[1] >= w[0] - 1e-9);
            }
            // Endpoints interpolated exactly.
            assert_eq!(m.value_at(0.0), p.start());
            assert_eq!(m.value_at(1.0), p.end());
        }
    }

    #[test]
    fn value_at_midpoints() {
        let m = convex_minorant(&path(&[0.0, 1.0, -1.0, 0.0])).unwrap();
        // Between t=0 and the vertex at t=2/3 the minorant is linear.
        assert!((m.value_at(1.0 / 3.0) + 0.5).abs() < 1e-12);
        assert!((m.value_at(5.0 / 6.0) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn short_path_errors() {
        assert!(GridPath::new(1.0, vec![0.0]).is_err());
    }
}

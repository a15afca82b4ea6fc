//! Continuous-path transforms on uniform grids: the cyclic shift to the
//! first minimum, its inverse shift, first-hitting utilities, and the
//! occupation-quantile rebuild of a path.

use crate::error::{Error, Result};
use crate::grid::GridPath;

/// Result of the minimum-anchored cyclic shift.
#[derive(Debug, Clone)]
pub struct TransformResult {
    pub path: GridPath,
    /// Grid index τ of the first global minimum of the input.
    pub argmin_index: usize,
    /// Split time A = T − τ·(T/N): distance from the minimum to the end.
    pub split_time: f64,
}

/// Smallest grid index attaining the minimum value.
pub fn argmin_first(p: &GridPath) -> usize {
    let vs = p.values();
    let mut best = 0usize;
    for (i, &v) in vs.iter().enumerate() {
        if v < vs[best] {
            best = i;
        }
    }
    best
}

// Cyclic rotation by `k` grid steps with the endpoint correction:
// out(i) = p(k+i) − p(k) up to the wraparound, then
// out(i) = p(k+i−N) + p(N) − p(k) after it.
fn rotate(p: &GridPath, k: usize) -> GridPath {
    let vs = p.values();
    let n = p.steps();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let v = if i <= n - k {
            vs[k + i] - vs[k]
        } else {
            vs[k + i - n] + vs[n] - vs[k]
        };
        out.push(v);
    }
    out[0] = 0.0;
    out[n] = vs[n];
    GridPath::new(p.duration(), out).expect("rotation preserves validity")
}

/// Cyclic shift of the path to start at its first global minimum, with
/// the endpoint correction after wraparound. The output starts at 0,
/// ends at the input's endpoint and stays at or above `min(0, end)`.
pub fn vervaat(p: &GridPath) -> Result<TransformResult> {
    if p.values()[0] != 0.0 {
        return Err(Error::invalid("vervaat: path must start at 0"));
    }
    let tau = argmin_first(p);
    let path = rotate(p, tau);
    let split_time = p.duration() - p.time_at(tau);
    Ok(TransformResult {
        path,
        argmin_index: tau,
        split_time,
    })
}

/// Cyclic shift by time `u` (snapped to the grid) with level
/// re-anchoring; `shift(vervaat(p).path, split_time)` recovers `p` on
/// the grid.
pub fn shift(p: &GridPath, u: f64) -> Result<GridPath> {
    if !(0.0..=p.duration()).contains(&u) {
        return Err(Error::invalid(format!(
            "shift: u = {u} outside [0, {}]",
            p.duration()
        )));
    }
    let k = p.index_at(u);
    if k == 0 || k == p.steps() {
        return Ok(p.clone());
    }
    Ok(rotate(p, k))
}

/// Smallest grid index `i > from_index` with `values[i] <= level`, if
/// any. The closed (≤) convention matches the lattice-walk oracle.
pub fn first_hit(p: &GridPath, level: f64, from_index: usize) -> Option<usize> {
    p.values()
        .iter()
        .enumerate()
        .skip(from_index + 1)
        .find(|(_, &v)| v <= level)
        .map(|(i, _)| i)
}

/// Quantile function of the occupation measure at `t`, approximated by
/// the order statistics of the grid values.
pub fn occupation_quantile(p: &GridPath, t: f64) -> f64 {
    let mut sorted = p.values().to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = p.steps() as f64;
    let idx = ((t / p.duration() * n).ceil() as usize).min(p.steps());
    sorted[idx]
}

/// Occupation-density estimate of the local time at level `a`:
/// (T/(2ε)) × fraction of grid values within ε of `a`.
pub fn local_time_estimate(p: &GridPath, a: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::invalid("local_time_estimate: eps must be positive"));
    }
    let hits = p.values().iter().filter(|v| (*v - a).abs() < eps).count();
    Ok(p.duration() * hits as f64 / (p.values().len() as f64 * 2.0 * eps))
}

/// Default local-time bandwidth for an N-step grid.
pub fn default_bandwidth(n: usize) -> f64 {
    (n as f64).powf(-1.0 / 3.0)
}

/// Occupation-quantile rebuild of a duration-1 path:
/// t ↦ ½·L(a(t)) + a(t)⁺ − (a(t) − endpoint)⁺ on the grid.
pub fn quantile_transform_bm(p: &GridPath, eps: f64) -> Result<GridPath> {
    if p.values()[0] != 0.0 {
        return Err(Error::invalid("quantile_transform_bm: path must start at 0"));
    }
    if (p.duration() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("quantile_transform_bm: duration must be 1"));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid("quantile_transform_bm: eps must be positive"));
    }
    let n = p.steps();
    let end = p.end();
    let mut sorted = p.values().to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    // Occupation counts around every order statistic by a sliding
    // window over the sorted values.
    let total = n + 1;
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut out = Vec::with_capacity(total);
    for i in 0..total {
        let a = sorted[i];
        while lo < total && sorted[lo] <= a - eps {
            lo += 1;
        }
        while hi < total && sorted[hi] < a + eps {
            hi += 1;
        }
        let lt = (hi - lo) as f64 / (total as f64 * 2.0 * eps);
        out.push(0.5 * lt + a.max(0.0) - (a - end).max(0.0));
    }
    GridPath::new(1.0, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_walks, vervaat_walk};
    use crate::rng::RngStream;
    use crate::sampler::sample_bm;

    fn path(duration: f64, vs: &[f64]) -> GridPath {
        GridPath::new(duration, vs.to_vec()).unwrap()
    }

    #[test]
    fn argmin_examples() {
        assert_eq!(argmin_first(&path(1.0, &[0.0, -1.0, -2.0])), 2);
        assert_eq!(argmin_first(&path(1.0, &[0.0, 0.0, 0.0])), 0);
        assert_eq!(argmin_first(&path(1.0, &[0.0, -1.0, -1.0, 0.0])), 1);
    }

    #[test]
    fn vervaat_examples() {
        // Already minimal at 0: unchanged.
        let p = path(1.0, &[0.0, 1.0, 2.0]);
        let r = vervaat(&p).unwrap();
        assert_eq!(r.path.values(), p.values());
        assert_eq!(r.argmin_index, 0);
        // 0,−1,0 rotates to 0,1,0.
        let r = vervaat(&path(1.0, &[0.0, -1.0, 0.0])).unwrap();
        assert_eq!(r.path.values(), &[0.0, 1.0, 0.0]);
        assert_eq!(r.split_time, 0.5);
        // Endpoint preserved exactly.
        let p = path(1.0, &[0.0, -0.3, 0.4, -0.7, 0.2]);
        let r = vervaat(&p).unwrap();
        assert_eq!(r.path.end(), p.end());
        assert_eq!(r.path.start(), 0.0);
        // Output stays at or above min(0, end).
        let floor = p.end().min(0.0);
        assert!(r.path.values().iter().all(|&v| v >= floor));
        assert!(vervaat(&path(1.0, &[1.0, 0.0])).is_err());
    }

    #[test]
    fn shift_identity_at_bounds() {
        let p = path(1.0, &[0.0, 0.5, -0.25, 0.75]);
        assert_eq!(shift(&p, 0.0).unwrap().values(), p.values());
        assert_eq!(shift(&p, 1.0).unwrap().values(), p.values());
        assert!(shift(&p, 1.5).is_err());
    }

    #[test]
    fn shift_inverts_vervaat_on_walks() {
        // Integer-valued paths make every rotation sum exact, so the
        // inversion is checked with strict equality.
        for w in enumerate_walks(10).unwrap() {
            let p = w.to_grid_path();
            let r = vervaat(&p).unwrap();
            let back = shift(&r.path, r.split_time).unwrap();
            assert_eq!(back.values(), p.values(), "walk {w:?}");
        }
    }

    #[test]
    fn shift_inverts_vervaat_on_brownian_paths() {
        let mut rng = RngStream::new(31, 0);
        for _ in 0..50 {
            let p = sample_bm(256, 1.0, &mut rng).unwrap();
            let r = vervaat(&p).unwrap();
            let back = shift(&r.path, r.split_time).unwrap();
            for (a, b) in back.values().iter().zip(p.values()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn vervaat_agrees_with_walk_transform() {
        for w in enumerate_walks(9).unwrap() {
            let r = vervaat(&w.to_grid_path()).unwrap();
            let (v, _) = vervaat_walk(&w);
            let expected: Vec<f64> = v.positions().iter().map(|&p| p as f64).collect();
            assert_eq!(r.path.values(), expected.as_slice());
        }
    }

    #[test]
    fn first_hit_examples() {
        let p = path(1.0, &[0.0, 1.0, 0.0, -1.0]);
        assert_eq!(first_hit(&p, 0.0, 0), Some(2));
        assert_eq!(first_hit(&path(1.0, &[0.0, 1.0, 2.0]), 0.0, 0), None);
        assert_eq!(first_hit(&path(1.0, &[0.0, -1.0]), 0.0, 0), Some(1));
    }

    #[test]
    fn occupation_quantile_examples() {
        let p = path(1.0, &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(occupation_quantile(&p, 0.999), 3.0);
        // Monotone increasing path: quantile is the value at ⌈tN⌉.
        assert_eq!(occupation_quantile(&p, 0.4), 2.0);
        let z = path(1.0, &[0.0; 5]);
        assert_eq!(occupation_quantile(&z, 0.3), 0.0);
    }

    #[test]
    fn local_time_degenerate_cases() {
        let p = path(1.0, &[1.0, 1.0, 1.0]);
        assert_eq!(local_time_estimate(&p, 5.0, 0.1).unwrap(), 0.0);
        // Constant path at the level: T/(2ε).
        assert!((local_time_estimate(&p, 1.0, 0.1).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn local_time_of_bm_at_zero() {
        // E L_1^0 = √(2/π) ≈ 0.7979; the occupation estimator should be
        // within 10% at a fine grid averaged over replicas.
        let n = 1 << 14;
        let eps = default_bandwidth(n);
        let mut rng = RngStream::new(77, 0);
        let reps = 400;
        let mut acc = 0.0;
        for _ in 0..reps {
            let p = sample_bm(n, 1.0, &mut rng).unwrap();
            acc += local_time_estimate(&p, 0.0, eps).unwrap();
        }
        let mean = acc / reps as f64;
        let target = (2.0 / std::f64::consts::PI).sqrt();
        assert!(
            (mean - target).abs() < 0.1 * target,
            "mean {mean}, target {target}"
        );
    }

    #[test]
    fn quantile_transform_endpoint_consistency() {
        let n = 1 << 12;
        let eps = default_bandwidth(n);
        let mut rng = RngStream::new(13, 0);
        let p = sample_bm(n, 1.0, &mut rng).unwrap();
        let q = quantile_transform_bm(&p, eps).unwrap();
        // Q at 1 is the endpoint up to ½·L at the max (small) and
        // estimator error.
        assert!((q.end() - p.end()).abs() < 0.35, "q(1) {} vs end {}", q.end(), p.end());
        // Q at 0: occupation near the minimum vanishes.
        assert!(q.start().abs() < 0.2, "q(0) = {}", q.start());
    }
}

//! Seeded path samplers: Brownian motion, bridges, Bessel(3) processes
//! and bridges, excursions, first-passage bridges and meanders.
//!
//! Bridge-type laws are built from three independent scalar bridges
//! (norm construction) rather than SDE stepping, so the marginals are
//! exact in law and endpoints are pinned exactly.

use crate::error::{Error, Result};
use crate::grid::GridPath;
use crate::rng::RngStream;

fn check_grid(n: usize, t: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::invalid("sampler: need at least one grid step"));
    }
    if !(t > 0.0) {
        return Err(Error::invalid("sampler: duration must be positive"));
    }
    Ok(())
}

/// Brownian motion on [0, T]: independent Gaussian increments of
/// variance T/N, started at 0.
pub fn sample_bm(n: usize, t: f64, rng: &mut RngStream) -> Result<GridPath> {
    check_grid(n, t)?;
    let sd = (t / n as f64).sqrt();
    let mut values = Vec::with_capacity(n + 1);
    let mut x = 0.0;
    values.push(x);
    for _ in 0..n {
        x += sd * rng.normal();
        values.push(x);
    }
    GridPath::new(t, values)
}

/// Brownian bridge from 0 to `y` on [0, T]: B_s − (s/T)(B_T − y), with
/// both endpoints pinned exactly.
pub fn sample_bridge(n: usize, t: f64, y: f64, rng: &mut RngStream) -> Result<GridPath> {
    let bm = sample_bm(n, t, rng)?;
    let gap = bm.end() - y;
    let mut values = bm.values().to_vec();
    let nf = n as f64;
    for (i, v) in values.iter_mut().enumerate() {
        *v -= i as f64 / nf * gap;
    }
    values[0] = 0.0;
    values[n] = y;
    GridPath::new(t, values)
}

/// Bessel(3) bridge from `a` to `b` on [0, T]: the norm of a 3-D
/// Brownian bridge from (a,0,0) to (b,0,0). Endpoints pinned exactly.
pub fn sample_bessel3_bridge(
    n: usize,
    t: f64,
    a: f64,
    b: f64,
    rng: &mut RngStream,
) -> Result<GridPath> {
    if a < 0.0 || b < 0.0 {
        return Err(Error::invalid("bessel bridge: endpoints must be nonnegative"));
    }
    let c1 = sample_bridge(n, t, b - a, rng)?;
    let c2 = sample_bridge(n, t, 0.0, rng)?;
    let c3 = sample_bridge(n, t, 0.0, rng)?;
    let mut values = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = a + c1.values()[i];
        let y = c2.values()[i];
        let z = c3.values()[i];
        values.push((x * x + y * y + z * z).sqrt());
    }
    values[0] = a;
    values[n] = b;
    GridPath::new(t, values)
}

/// Brownian excursion of length `l`: Bessel(3) bridge from 0 to 0.
pub fn sample_excursion(n: usize, l: f64, rng: &mut RngStream) -> Result<GridPath> {
    sample_bessel3_bridge(n, l, 0.0, 0.0, rng)
}

/// First passage bridge of length `l` through `lambda` < 0: Bessel(3)
/// bridge from |λ| to 0, shifted down by |λ|. Starts at 0 and ends at
/// λ exactly, staying above λ before the end.
pub fn sample_fp_bridge(n: usize, l: f64, lambda: f64, rng: &mut RngStream) -> Result<GridPath> {
    if !(lambda < 0.0) {
        return Err(Error::invalid("fp bridge: lambda must be negative"));
    }
    let bb = sample_bessel3_bridge(n, l, -lambda, 0.0, rng)?;
    let mut values: Vec<f64> = bb.values().iter().map(|&v| v + lambda).collect();
    values[0] = 0.0;
    values[n] = lambda;
    GridPath::new(l, values)
}

/// Brownian meander of length `l`: Bessel(3) bridge from 0 to √l·ρ
/// with ρ Rayleigh distributed.
pub fn sample_meander(n: usize, l: f64, rng: &mut RngStream) -> Result<GridPath> {
    let rho = l.sqrt() * rng.rayleigh();
    sample_bessel3_bridge(n, l, 0.0, rho, rng)
}

/// Bessel(3) process from 0: the norm of 3-D Brownian motion.
pub fn sample_bessel3(n: usize, t: f64, rng: &mut RngStream) -> Result<GridPath> {
    check_grid(n, t)?;
    let c1 = sample_bm(n, t, rng)?;
    let c2 = sample_bm(n, t, rng)?;
    let c3 = sample_bm(n, t, rng)?;
    let values = (0..=n)
        .map(|i| {
            let (x, y, z) = (c1.values()[i], c2.values()[i], c3.values()[i]);
            (x * x + y * y + z * z).sqrt()
        })
        .collect();
    GridPath::new(t, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::normal_cdf;
    use crate::stats::{ks_one_sample, ks_two_sample, moment_ztest, Moment};

    #[test]
    fn determinism() {
        let mut a = RngStream::new(3, 5);
        let mut b = RngStream::new(3, 5);
        let p = sample_bm(64, 1.0, &mut a).unwrap();
        let q = sample_bm(64, 1.0, &mut b).unwrap();
        assert_eq!(p.values(), q.values());
    }

    #[test]
    fn bm_endpoint_law() {
        let mut rng = RngStream::new(101, 0);
        let xs: Vec<f64> = (0..20_000)
            .map(|_| sample_bm(1, 1.0, &mut rng).unwrap().end())
            .collect();
        let r = ks_one_sample("bm-end", &xs, normal_cdf, 1e-3).unwrap();
        assert!(r.pass, "stat {}", r.statistic);
        let r = moment_ztest("bm-var", &xs, 1.0, Moment::Second).unwrap();
        assert!(r.pass, "z {}", r.statistic);
    }

    #[test]
    fn bridge_pinned_and_marginal() {
        let mut rng = RngStream::new(5, 0);
        let mut mids = Vec::new();
        for _ in 0..20_000 {
            let p = sample_bridge(8, 1.0, -1.0, &mut rng).unwrap();
            assert_eq!(p.start(), 0.0);
            assert_eq!(p.end(), -1.0);
            mids.push(p.values()[4]);
        }
        // Midpoint of a bridge to y: N(y/2, 1/4).
        let r = ks_one_sample("bridge-mid", &mids, |x| normal_cdf((x + 0.5) / 0.5), 1e-3).unwrap();
        assert!(r.pass, "stat {}", r.statistic);
    }

    #[test]
    fn bridge_mean_profile() {
        let mut rng = RngStream::new(6, 0);
        let mut q1 = Vec::new();
        for _ in 0..20_000 {
            let p = sample_bridge(4, 1.0, 2.0, &mut rng).unwrap();
            q1.push(p.values()[1]);
        }
        let r = moment_ztest("bridge-q1", &q1, 0.5, Moment::Mean).unwrap();
        assert!(r.pass, "z {}", r.statistic);
    }

    #[test]
    fn bessel_bridge_positive_interior() {
        let mut rng = RngStream::new(7, 0);
        for _ in 0..2000 {
            let p = sample_excursion(32, 1.0, &mut rng).unwrap();
            assert_eq!(p.start(), 0.0);
            assert_eq!(p.end(), 0.0);
            assert!(p.values()[1..32].iter().all(|&v| v > 0.0));
            assert!(p.values().iter().cloned().fold(f64::MIN, f64::max) > 0.0);
        }
        assert!(sample_bessel3_bridge(8, 1.0, -0.5, 0.0, &mut rng).is_err());
    }

    #[test]
    fn excursion_scaling() {
        // Excursion of length l at time l/2 equals √l × (unit excursion
        // at ½) in law.
        let l = 4.0;
        let mut rng = RngStream::new(8, 0);
        let xs: Vec<f64> = (0..8000)
            .map(|_| sample_excursion(16, l, &mut rng).unwrap().values()[8])
            .collect();
        let ys: Vec<f64> = (0..8000)
            .map(|_| l.sqrt() * sample_excursion(16, 1.0, &mut rng).unwrap().values()[8])
            .collect();
        let r = ks_two_sample("exc-scaling", &xs, &ys, 1e-3).unwrap();
        assert!(r.pass, "stat {}", r.statistic);
    }

    #[test]
    fn fp_bridge_stays_above_endpoint() {
        let mut rng = RngStream::new(9, 0);
        for _ in 0..2000 {
            let p = sample_fp_bridge(32, 1.0, -1.5, &mut rng).unwrap();
            assert_eq!(p.start(), 0.0);
            assert_eq!(p.end(), -1.5);
            assert!(p.values()[..32].iter().all(|&v| v > -1.5));
        }
        assert!(sample_fp_bridge(8, 1.0, 0.5, &mut rng).is_err());
    }

    #[test]
    fn fp_bridge_chord_probability() {
        // P(F stays above the chord from x to λ) = |x|/|λ|.
        let (lambda, x) = (-1.0f64, -0.4f64);
        let mut rng = RngStream::new(10, 0);
        let reps = 6000;
        // Discrete monitoring misses excursions below the chord between
        // grid points, inflating the rate by ~c·√dt; extrapolate the
        // grid limit from two resolutions with √dt ratio 2.
        let mut rate = [0.0f64; 2];
        for (slot, n) in [(0usize, 1usize << 8), (1usize, 1usize << 10)] {
            let mut above = 0usize;
            for _ in 0..reps {
                let p = sample_fp_bridge(n, 1.0, lambda, &mut rng).unwrap();
                let ok = (1..n).all(|i| {
                    let t = i as f64 / n as f64;
                    p.values()[i] > x + (lambda - x) * t
                });
                if ok {
                    above += 1;
                }
            }
            rate[slot] = above as f64 / reps as f64;
        }
        let extrapolated = 2.0 * rate[1] - rate[0];
        let target = x.abs() / lambda.abs();
        let se = (target * (1.0 - target) / reps as f64).sqrt();
        assert!(
            (extrapolated - target).abs() < 10.0 * se + 0.015,
            "rates {rate:?}, extrapolated {extrapolated}, target {target}"
        );
    }

    #[test]
    fn meander_endpoint_moments() {
        let mut rng = RngStream::new(11, 0);
        let ends: Vec<f64> = (0..40_000)
            .map(|_| sample_meander(8, 1.0, &mut rng).unwrap().end())
            .collect();
        let mean = (std::f64::consts::PI / 2.0).sqrt();
        let r = moment_ztest("meander-end", &ends, mean, Moment::Mean).unwrap();
        assert!(r.pass, "z {}", r.statistic);
        let r = moment_ztest("meander-end2", &ends, 2.0, Moment::Second).unwrap();
        assert!(r.pass, "z {}", r.statistic);
    }

    #[test]
    fn bessel3_mean() {
        // E R_t = 2√(2t/π) for the chi-3 marginal.
        let mut rng = RngStream::new(12, 0);
        let xs: Vec<f64> = (0..40_000)
            .map(|_| sample_bessel3(4, 1.0, &mut rng).unwrap().end())
            .collect();
        let target = 2.0 * (2.0 / std::f64::consts::PI).sqrt();
        let r = moment_ztest("bessel3-mean", &xs, target, Moment::Mean).unwrap();
        assert!(r.pass, "z {}", r.statistic);
    }
}

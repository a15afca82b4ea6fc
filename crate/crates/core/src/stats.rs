//! Statistical test kit for the Monte Carlo suites.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{chi2_sf, kolmogorov_sf};

/// Per-test significance used by the seeded acceptance suites.
pub const DEFAULT_ALPHA: f64 = 1e-3;

/// Outcome of one statistical or exact check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub n: usize,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
    pub seed: Option<u64>,
    pub notes: String,
}

impl TestReport {
    pub fn exact(name: impl Into<String>, pass: bool, notes: impl Into<String>) -> Self {
        TestReport {
            name: name.into(),
            n: 0,
            statistic: if pass { 0.0 } else { 1.0 },
            p_value: None,
            threshold: 0.0,
            pass,
            seed: None,
            notes: notes.into(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }
}

/// One-sample Kolmogorov-Smirnov test against a cdf, with the
/// asymptotic p-value.
pub fn ks_one_sample<F: Fn(f64) -> f64>(
    name: &str,
    xs: &[f64],
    cdf: F,
    alpha: f64,
) -> Result<TestReport> {
    if xs.len() < 10 {
        return Err(Error::invalid("ks_one_sample: need at least 10 samples"));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let c = cdf(x);
        let hi = ((i + 1) as f64 / n - c).abs();
        let lo = (c - i as f64 / n).abs();
        d = d.max(hi).max(lo);
    }
    let p = kolmogorov_sf(n.sqrt() * d);
    Ok(TestReport {
        name: name.to_string(),
        n: sorted.len(),
        statistic: d,
        p_value: Some(p),
        threshold: alpha,
        pass: p > alpha,
        seed: None,
        notes: String::new(),
    })
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
pub fn ks_two_sample(name: &str, xs: &[f64], ys: &[f64], alpha: f64) -> Result<TestReport> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::invalid("ks_two_sample: empty sample"));
    }
    let mut xs = xs.to_vec();
    let mut ys = ys.to_vec();
    xs.sort_unstable_by(|a, b| a.total_cmp(b));
    ys.sort_unstable_by(|a, b| a.total_cmp(b));
    let (n, m) = (xs.len(), ys.len());
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n && j < m {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        let diff = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        d = d.max(diff);
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    let p = kolmogorov_sf(ne.sqrt() * d);
    Ok(TestReport {
        name: name.to_string(),
        n: n + m,
        statistic: d,
        p_value: Some(p),
        threshold: alpha,
        pass: p > alpha,
        seed: None,
        notes: String::new(),
    })
}

#[derive(Debug, Clone, Copy)]
pub enum Moment {
    Mean,
    Second,
}

/// z-test of an empirical moment against a target value; passes iff
/// |z| < 4.
pub fn moment_ztest(name: &str, xs: &[f64], target: f64, which: Moment) -> Result<TestReport> {
    if xs.len() < 100 {
        return Err(Error::invalid("moment_ztest: need at least 100 samples"));
    }
    let n = xs.len() as f64;
    let transformed: Vec<f64> = match which {
        Moment::Mean => xs.to_vec(),
        Moment::Second => xs.iter().map(|x| x * x).collect(),
    };
    let mean = transformed.iter().sum::<f64>() / n;
    let var = transformed.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        if mean == target {
            return Ok(TestReport {
                name: name.to_string(),
                n: xs.len(),
                statistic: 0.0,
                p_value: None,
                threshold: 4.0,
                pass: true,
                seed: None,
                notes: "degenerate sample exactly at target".into(),
            });
        }
        return Err(Error::Numeric(
            "moment_ztest: zero variance away from target".into(),
        ));
    }
    let z = (mean - target) / (var / n).sqrt();
    Ok(TestReport {
        name: name.to_string(),
        n: xs.len(),
        statistic: z,
        p_value: None,
        threshold: 4.0,
        pass: z.abs() < 4.0,
        seed: None,
        notes: format!("empirical {mean:.6}, target {target:.6}"),
    })
}

/// Pearson chi-squared test of observed bin counts against expected
/// probabilities.
pub fn chi2_binned(
    name: &str,
    observed: &[u64],
    expected_probs: &[f64],
    alpha: f64,
) -> Result<TestReport> {
    if observed.len() != expected_probs.len() || observed.len() < 2 {
        return Err(Error::invalid("chi2_binned: mismatched or short bins"));
    }
    let n: u64 = observed.iter().sum();
    if n == 0 {
        return Err(Error::invalid("chi2_binned: empty sample"));
    }
    let mut stat = 0.0;
    let mut dof = 0usize;
    for (&o, &p) in observed.iter().zip(expected_probs) {
        let e = p * n as f64;
        if e < 1e-12 {
            continue;
        }
        stat += (o as f64 - e).powi(2) / e;
        dof += 1;
    }
    if dof < 2 {
        return Err(Error::invalid("chi2_binned: not enough populated bins"));
    }
    let p = chi2_sf(stat, (dof - 1) as f64);
    Ok(TestReport {
        name: name.to_string(),
        n: n as usize,
        statistic: stat,
        p_value: Some(p),
        threshold: alpha,
        pass: p > alpha,
        seed: None,
        notes: format!("dof {}", dof - 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::special::normal_cdf;

    #[test]
    fn ks_one_sample_degenerate_fails() {
        let xs = vec![0.0; 1000];
        let r = ks_one_sample("deg", &xs, normal_cdf, 1e-3).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-9);
        assert!(!r.pass);
    }

    #[test]
    fn ks_one_sample_uniform_passes() {
        let mut rng = RngStream::new(11, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.uniform()).collect();
        let r = ks_one_sample("unif", &xs, |x| x.clamp(0.0, 1.0), 1e-3).unwrap();
        assert!(r.pass, "stat {} p {:?}", r.statistic, r.p_value);
    }

    #[test]
    fn ks_one_sample_calibration() {
        // Under the null the pass rate at alpha = 1e-3 should be >= 99%.
        let mut passes = 0;
        for seed in 0..100 {
            let mut rng = RngStream::new(1000 + seed, 0);
            let xs: Vec<f64> = (0..2000).map(|_| rng.normal()).collect();
            if ks_one_sample("cal", &xs, normal_cdf, 1e-3).unwrap().pass {
                passes += 1;
            }
        }
        assert!(passes >= 99, "pass rate {passes}/100");
    }

    #[test]
    fn ks_two_sample_identical_is_zero() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let r = ks_two_sample("id", &xs, &xs, 1e-3).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn ks_two_sample_power() {
        let mut rng = RngStream::new(5, 0);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.normal()).collect();
        let ys: Vec<f64> = (0..10_000).map(|_| rng.normal() + 1.0).collect();
        let r = ks_two_sample("shifted", &xs, &ys, 1e-3).unwrap();
        assert!(!r.pass);
        let zs: Vec<f64> = (0..10_000).map(|_| rng.normal()).collect();
        let r = ks_two_sample("same-law", &xs, &zs, 1e-3).unwrap();
        assert!(r.pass, "stat {} p {:?}", r.statistic, r.p_value);
    }

    #[test]
    fn ztest_calibration_and_power() {
        let mut rng = RngStream::new(9, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.normal()).collect();
        assert!(moment_ztest("m0", &xs, 0.0, Moment::Mean).unwrap().pass);
        assert!(!moment_ztest("m1", &xs, 1.0, Moment::Mean).unwrap().pass);
        assert!(moment_ztest("s1", &xs, 1.0, Moment::Second).unwrap().pass);
    }

    #[test]
    fn ztest_constant_at_target() {
        let xs = vec![2.5; 200];
        let r = moment_ztest("const", &xs, 2.5, Moment::Mean).unwrap();
        assert!(r.pass);
        assert!(r.notes.contains("degenerate"));
    }

    #[test]
    fn chi2_uniform_bins() {
        let mut rng = RngStream::new(21, 0);
        let mut counts = [0u64; 10];
        for _ in 0..100_000 {
            counts[(rng.uniform() * 10.0) as usize] += 1;
        }
        let probs = [0.1; 10];
        let r = chi2_binned("unif", &counts, &probs, 1e-3).unwrap();
        assert!(r.pass, "stat {} p {:?}", r.statistic, r.p_value);
    }
}

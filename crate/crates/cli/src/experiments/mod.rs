//! The experiment catalog: each named experiment runs a fixed battery
//! of checks and returns one report per check.

use rayon::prelude::*;
use vervaat::rng::RngStream;
use vervaat::stats::TestReport;
use vervaat::{Error, Result};

use crate::config::ExperimentConfig;

mod decomposition;
mod drift_suite;
mod exact;
mod hull_suite;
mod laws_suite;
mod moments;

pub use hull_suite::slope_table;

pub const CATALOG: &[&str] = &[
    "exact-lattice",
    "law-identities",
    "decomposition-mc",
    "drift-mc",
    "hull-mc",
    "moments-mc",
    "quantile-experimental",
    "discrete-limit",
];

/// Whether failures in the experiment gate the exit status.
pub fn gating(name: &str) -> bool {
    name != "quantile-experimental"
}

pub fn run(name: &str, cfg: &ExperimentConfig) -> Result<Vec<TestReport>> {
    cfg.validate()?;
    let mut reports = match name {
        "exact-lattice" => exact::exact_lattice(cfg),
        "law-identities" => laws_suite::law_identities(cfg),
        "decomposition-mc" => decomposition::decomposition_mc(cfg),
        "drift-mc" => drift_suite::drift_mc(cfg),
        "hull-mc" => hull_suite::hull_mc(cfg),
        "moments-mc" => moments::moments_mc(cfg),
        "quantile-experimental" => moments::quantile_experimental(cfg),
        "discrete-limit" => exact::discrete_limit(cfg),
        other => Err(Error::invalid(format!(
            "unknown experiment {other:?}; catalog: {}",
            CATALOG.join(", ")
        ))),
    }?;
    for r in &mut reports {
        if r.seed.is_none() {
            r.seed = Some(cfg.seed);
        }
    }
    Ok(reports)
}

/// Deterministic parallel fan-out: replica `i` always runs on stream
/// `base + i`, and results are merged in replica order.
pub(crate) fn par_collect<T: Send>(
    reps: usize,
    seed: u64,
    base: u64,
    f: impl Fn(&mut RngStream) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(seed, base + i as u64);
            f(&mut rng)
        })
        .collect()
}

/// Report for a scalar estimate checked against a closed form within an
/// absolute tolerance.
pub(crate) fn gap_report(
    name: &str,
    estimate: f64,
    target: f64,
    tol: f64,
    n: usize,
    notes: impl Into<String>,
) -> TestReport {
    let gap = (estimate - target).abs();
    TestReport {
        name: name.to_string(),
        n,
        statistic: gap,
        p_value: None,
        threshold: tol,
        pass: gap <= tol,
        seed: None,
        notes: notes.into(),
    }
}

/// Report for an interval criterion, e.g. a quadratic-variation ratio.
pub(crate) fn interval_report(
    name: &str,
    value: f64,
    lo: f64,
    hi: f64,
    n: usize,
    notes: impl Into<String>,
) -> TestReport {
    TestReport {
        name: name.to_string(),
        n,
        statistic: value,
        p_value: None,
        threshold: hi,
        pass: (lo..=hi).contains(&value),
        seed: None,
        notes: notes.into(),
    }
}

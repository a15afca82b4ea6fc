//! End-to-end acceptance gate: every suite in the catalog runs at its
//! default configuration and prints one line per check. All checks
//! gate except the occupation-quantile comparison, which is reported
//! only.

use vervaat_cli::config::ExperimentConfig;
use vervaat_cli::experiments;

fn run_suite(name: &str) {
    let cfg = ExperimentConfig::default();
    let reports = experiments::run(name, &cfg).expect(name);
    assert!(!reports.is_empty(), "{name}: no reports");
    let gating = experiments::gating(name);
    let mut failures = Vec::new();
    for r in &reports {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} [{name}] {} statistic={:.6} n={} {}",
            r.name, r.statistic, r.n, r.notes
        );
        if !r.pass && gating {
            failures.push(r.name.clone());
        }
    }
    assert!(failures.is_empty(), "{name}: failing checks: {}", failures.join(", "));
}

#[test]
fn exact_lattice() {
    run_suite("exact-lattice");
}

#[test]
fn law_identities() {
    run_suite("law-identities");
}

#[test]
fn decomposition_mc() {
    run_suite("decomposition-mc");
}

#[test]
fn drift_mc() {
    run_suite("drift-mc");
}

#[test]
fn hull_mc() {
    run_suite("hull-mc");
}

#[test]
fn moments_mc() {
    run_suite("moments-mc");
}

#[test]
fn discrete_limit() {
    run_suite("discrete-limit");
}

#[test]
fn quantile_experimental() {
    run_suite("quantile-experimental");
}

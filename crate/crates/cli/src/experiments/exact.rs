//! Exhaustive lattice checks and the rescaled discrete-to-continuum
//! limit of the first-visit law.

use vervaat::lattice::{verify_bijection, verify_helper_uniform, verify_q_equals_v, z_pmf, z_pmf_enumerated};
use vervaat::laws::fz;
use vervaat::stats::TestReport;
use vervaat::Result;

use super::gap_report;
use crate::config::ExperimentConfig;

// Negative endpoints with the parity of n, smallest magnitude first.
fn negative_endpoints(n: usize) -> Vec<i64> {
    let start = if n % 2 == 0 { 2 } else { 1 };
    (0..)
        .map(|k| -(start + 2 * k as i64))
        .take_while(|a| a.unsigned_abs() as usize <= n)
        .collect()
}

pub fn exact_lattice(_cfg: &ExperimentConfig) -> Result<Vec<TestReport>> {
    let mut out = Vec::new();

    let mut cases = 0usize;
    let mut failures = Vec::new();
    for n in 1..=12usize {
        for a in negative_endpoints(n) {
            cases += 1;
            let r = verify_bijection(n, a)?;
            if !r.pass {
                failures.push(r.name);
            }
        }
    }
    out.push(TestReport::exact(
        "lattice-bijection",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{cases} (n, a) cases, n <= 12")
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
    .with_n(cases));

    let mut cases = 0usize;
    let mut failures = Vec::new();
    for n in 1..=12usize {
        for a in negative_endpoints(n) {
            cases += 1;
            let r = verify_helper_uniform(n, a)?;
            if !r.pass {
                failures.push(r.name);
            }
        }
    }
    out.push(TestReport::exact(
        "lattice-helper-uniform",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{cases} (n, a) cases, n <= 12")
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
    .with_n(cases));

    let mut cases = 0usize;
    let mut exact_everywhere = true;
    let mut notes = String::new();
    for n in 1..=14usize {
        for a in negative_endpoints(n) {
            cases += 1;
            let closed = z_pmf(n, a)?;
            let counted = z_pmf_enumerated(n, a)?;
            if closed.support() != counted.support() || closed.masses() != counted.masses() {
                exact_everywhere = false;
                notes = format!("first mismatch at (n, a) = ({n}, {a})");
            }
        }
    }
    if exact_everywhere {
        notes = format!("{cases} (n, a) cases, n <= 14, exact rational equality");
    }
    out.push(TestReport::exact("first-visit-pmf-exact", exact_everywhere, notes).with_n(cases));

    let mut all = true;
    for n in 1..=10usize {
        let r = verify_q_equals_v(n)?;
        all &= r.pass;
    }
    out.push(TestReport::exact(
        "quantile-equals-shift-multisets",
        all,
        "all walk lengths n <= 10, per endpoint class",
    )
    .with_n(10));

    Ok(out)
}

/// Rescaled first-visit law at n ~ 2000 against its continuum limit:
/// sup-distance between the cdf of Z/n and the closed-form cdf at
/// λ = a/√n.
pub fn discrete_limit(_cfg: &ExperimentConfig) -> Result<Vec<TestReport>> {
    let n = 2000usize;
    let a = -30i64;
    // Half-step boundary correction: the walk first reaches the level
    // mid-lattice, so the effective continuum slope is (a + 1/2)/√n.
    let lambda = (a as f64 + 0.5) / (n as f64).sqrt();
    let law = fz(lambda)?;
    let pmf = z_pmf(n, a)?;
    let mut cum = 0.0;
    let mut sup: f64 = 0.0;
    for (l, mass) in pmf.to_f64() {
        let t = l as f64 / n as f64;
        // Compare on both sides of the atom at l.
        sup = sup.max((cum - law.cdf(t)).abs());
        cum += mass;
        sup = sup.max((cum - law.cdf(t)).abs());
    }
    Ok(vec![gap_report(
        "first-visit-limit",
        sup,
        0.0,
        0.02,
        n,
        format!("sup cdf distance at n = {n}, a = {a}, lambda = {lambda:.4}"),
    )])
}

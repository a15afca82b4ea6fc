//! Convex-minorant statistics of the shifted bridge: the last-segment
//! slope law, the single-segment probability, and the acceptance rate
//! of the conditioned sampler.

use vervaat::decomp::{build_vervaat_bridge_neg, DecompSample};
use vervaat::laws::{mean_z, slope_cdf, stay_above_prob};
use vervaat::rng::RngStream;
use vervaat::stats::TestReport;
use vervaat::Result;

use super::{gap_report, par_collect};
use crate::config::ExperimentConfig;
use crate::table::{num, Table};

const A_VALUES: [f64; 3] = [-0.75, -0.5, -0.25];

// Slope of the last minorant segment, refined below the grid: the last
// slope is sup over t of (λ − V(t))/(1 − t), and the sup gains from
// sub-grid dips of the path. Each interval's minimum is sampled from
// the conditional bridge-minimum law given the grid endpoints — kept
// above the barrier the piece is conditioned on (0 on the excursion
// piece before the first return, λ on the first-passage piece after) —
// and contributes its constraint at the interval midpoint. Grid-only
// evaluation understates the slope by several √dt. The constraint at
// t = 0 is exactly λ, so the result is ≥ λ with equality iff the path
// stays above the chord, i.e. the minorant is a single segment.
fn refined_last_slope(s: &DecompSample, lambda: f64, rng: &mut RngStream) -> f64 {
    let p = &s.path;
    let n = p.steps();
    let dt = p.dt();
    let vs = p.values();
    let z_idx = s.latent("z").map(|z| p.index_at(z)).unwrap_or(n);
    let mut slope = lambda;
    for i in 1..n {
        slope = slope.max((lambda - vs[i]) / (1.0 - i as f64 * dt));
    }
    // Last interval skipped: the path there is pinned at λ and stays
    // above it, so its interior constraint is far below the sup.
    for i in 0..n - 1 {
        let bar = if i < z_idx { 0.0 } else { lambda };
        let (a, b) = (vs[i], vs[i + 1]);
        if a <= bar || b <= bar {
            // Junction interval touching its barrier: the grid point
            // already carries the binding constraint.
            continue;
        }
        // P(min <= m | min > bar) inverted: G(m) = exp(-2(a-m)(b-m)/dt).
        let g_bar = (-2.0 * (a - bar) * (b - bar) / dt).exp();
        let target = g_bar + rng.uniform() * (1.0 - g_bar);
        let m = 0.5 * ((a + b) - ((a - b).powi(2) - 2.0 * dt * target.ln()).sqrt());
        let tau = (i as f64 + 0.5) * dt;
        slope = slope.max((lambda - m) / (1.0 - tau));
    }
    slope
}

fn is_single_segment(slope: f64, lambda: f64) -> bool {
    slope <= lambda + 1e-12
}

pub fn hull_mc(cfg: &ExperimentConfig) -> Result<Vec<TestReport>> {
    let n = cfg.grid;
    let reps = cfg.reps;
    let lambda = cfg.lambda;
    if !(lambda < 0.0) {
        return Err(vervaat::Error::invalid("hull-mc: lambda must be negative"));
    }
    let mut out = Vec::new();

    let slopes = par_collect(reps, cfg.seed, 800_000_000, |rng| {
        let s = build_vervaat_bridge_neg(lambda, n, rng)?;
        Ok(refined_last_slope(&s, lambda, rng))
    })?;

    for &a in &A_VALUES {
        let emp = slopes.iter().filter(|&&s| s <= a).count() as f64 / reps as f64;
        out.push(gap_report(
            &format!("last-slope-cdf({a})"),
            emp,
            slope_cdf(lambda, a)?,
            0.02,
            reps,
            "sub-grid interval minima resampled; grid-only slopes are \
             biased toward the chord by several sqrt(dt)",
        ));
    }

    let one_seg = slopes
        .iter()
        .filter(|&&s| is_single_segment(s, lambda))
        .count() as f64
        / reps as f64;
    out.push(gap_report(
        "one-segment-prob",
        one_seg,
        stay_above_prob(lambda)?,
        0.01,
        reps,
        "single segment iff the refined slope stays at the chord value",
    ));

    // Rejection sampler for the bridge conditioned above the chord:
    // propose from the two-piece build and accept when the refined
    // minorant is a single segment. Each accepted draw runs on its own
    // stream.
    let accepted = 25_000usize;
    let attempts: u64 = par_collect(accepted, cfg.seed, 810_000_000, |rng| {
        let mut tries = 0u64;
        loop {
            tries += 1;
            let s = build_vervaat_bridge_neg(lambda, n, rng)?;
            if is_single_segment(refined_last_slope(&s, lambda, rng), lambda) {
                return Ok(tries);
            }
        }
    })?
    .into_iter()
    .sum();
    let rate = accepted as f64 / attempts as f64;
    out.push(gap_report(
        "conditioned-acceptance-rate",
        rate,
        mean_z(lambda)?,
        0.01,
        accepted,
        "acceptance on the refined single-segment event; grid-only \
         monitoring would bias the rate slightly upward",
    ));

    Ok(out)
}

/// Empirical-vs-closed-form table of the last-segment slope cdf on an
/// `a` grid, for the CSV artifact.
pub fn slope_table(cfg: &ExperimentConfig) -> Result<Table> {
    let n = cfg.grid;
    let lambda = cfg.lambda;
    if !(lambda < 0.0) {
        return Err(vervaat::Error::invalid("slope table: lambda must be negative"));
    }
    let reps = cfg.reps.min(20_000);
    let slopes = par_collect(reps, cfg.seed, 820_000_000, |rng| {
        let s = build_vervaat_bridge_neg(lambda, n, rng)?;
        Ok(refined_last_slope(&s, lambda, rng))
    })?;
    let mut t = Table::new(["a", "empirical", "closed_form"]);
    for i in 0..=20 {
        let a = lambda + (0.0 - lambda) * i as f64 / 20.0;
        let emp = slopes.iter().filter(|&&s| s <= a).count() as f64 / reps as f64;
        t.push([num(a), num(emp), num(slope_cdf(lambda, a)?)]);
    }
    Ok(t)
}

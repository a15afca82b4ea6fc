//! Moment checks for the shifted Brownian motion and the meander, the
//! zero-hitting identities, and the occupation-quantile comparison.

use vervaat::decomp::{build_vb, direct_vb};
use vervaat::laws::{end_given_t0, meander_moments, vb_moments};
use vervaat::sampler::{sample_bm, sample_meander};
use vervaat::stats::{ks_one_sample, ks_two_sample, moment_ztest, Moment, TestReport};
use vervaat::transform::{default_bandwidth, quantile_transform_bm};
use vervaat::Result;

use super::decomposition::{refined_return_time, refined_transform};
use super::par_collect;
use crate::config::ExperimentConfig;

const T_LABELS: [&str; 3] = ["1/4", "1/2", "3/4"];

pub fn moments_mc(cfg: &ExperimentConfig) -> Result<Vec<TestReport>> {
    let n = cfg.grid;
    let reps = cfg.reps;
    let idxs = [n / 4, n / 2, 3 * n / 4];
    let ts = [0.25, 0.5, 0.75];
    let block = reps as u64;
    let mut out = Vec::new();

    // Two-meander build: full and split moments at three times.
    let built = par_collect(reps, cfg.seed, 10 * block, |rng| {
        let s = build_vb(n, rng)?;
        let vals = idxs.map(|i| s.path.values()[i]);
        Ok((vals, s.latent("a").expect("build records the split")))
    })?;
    for (k, (&t, label)) in ts.iter().zip(T_LABELS).enumerate() {
        let m = vb_moments(t)?;
        let vals: Vec<f64> = built.iter().map(|d| d.0[k]).collect();
        out.push(moment_ztest(&format!("shifted-motion-mean(t={label})"), &vals, m.mean, Moment::Mean)?);
        out.push(moment_ztest(
            &format!("shifted-motion-second(t={label})"),
            &vals,
            m.second,
            Moment::Second,
        )?);
        // Partial moments over {A > t} and {A <= t}, via the latent split.
        let pre: Vec<f64> = built.iter().map(|d| if d.1 > t { d.0[k] } else { 0.0 }).collect();
        let post: Vec<f64> = built.iter().map(|d| if d.1 <= t { d.0[k] } else { 0.0 }).collect();
        out.push(moment_ztest(
            &format!("shifted-motion-mean-pre(t={label})"),
            &pre,
            m.mean_pre,
            Moment::Mean,
        )?);
        out.push(moment_ztest(
            &format!("shifted-motion-mean-post(t={label})"),
            &post,
            m.mean_post,
            Moment::Mean,
        )?);
        out.push(moment_ztest(
            &format!("shifted-motion-second-pre(t={label})"),
            &pre,
            m.second_pre,
            Moment::Second,
        )?);
        out.push(moment_ztest(
            &format!("shifted-motion-second-post(t={label})"),
            &post,
            m.second_post,
            Moment::Second,
        )?);
    }
    drop(built);

    // Direct transform: zero-hitting probability, the endpoint-sign
    // identity on every path, and the conditional endpoint law.
    let direct = par_collect(reps, cfg.seed, 11 * block, |rng| {
        let s = direct_vb(n, rng)?;
        Ok((s.path.end(), s.latent("t0")))
    })?;
    let hits: Vec<f64> = direct.iter().map(|d| if d.1.is_some() { 1.0 } else { 0.0 }).collect();
    out.push(moment_ztest("zero-hit-prob", &hits, 0.5, Moment::Mean)?);

    let mismatches = direct
        .iter()
        .filter(|(end, t0)| t0.is_some() != (*end <= 0.0))
        .count();
    out.push(
        TestReport::exact(
            "zero-hit-iff-endpoint-negative",
            mismatches == 0,
            format!("{mismatches} mismatches over {reps} paths"),
        )
        .with_n(reps),
    );

    drop(direct);

    // Conditional endpoint law given the first return time, with the
    // return measured below the grid: grid monitoring detects the
    // crossing late by O(√dt), which shows up in the probability
    // transform at this replica count. Returns in the last ~32 grid
    // steps are excluded: there 1 − t̃₀ is at the timing resolution and
    // the transform degenerates into a ratio of vanishing quantities;
    // the transform is independent of t̃₀ under the target law, so the
    // truncation leaves it uniform.
    let dt = 1.0 / n as f64;
    let pit = par_collect(reps, cfg.seed, 14 * block, |rng| {
        let p = sample_bm(n, 1.0, rng)?;
        let end = p.end();
        if end >= 0.0 {
            return Ok(None);
        }
        let (r, gap, _) = refined_transform(&p, rng)?;
        let t0 = refined_return_time(r.path.values(), gap, r.argmin_index, end, dt, rng)
            .unwrap_or(1.0 - 0.5 * dt);
        Ok(Some((end, t0)))
    })?;
    let us: Vec<f64> = pit
        .into_iter()
        .flatten()
        .filter(|&(_, t0)| t0 <= 1.0 - 32.0 * dt)
        .filter_map(|(end, t0)| Some(end_given_t0(t0).ok()?.cdf(end)))
        .collect();
    out.push(ks_one_sample(
        "endpoint-given-zero-time-uniform",
        &us,
        |x| x.clamp(0.0, 1.0),
        cfg.alpha,
    )?);

    // Meander moments, including the cross moment with the endpoint.
    let m_n = 1024usize.min(n);
    let m_idxs = [m_n / 4, m_n / 2, 3 * m_n / 4];
    let meanders = par_collect(reps, cfg.seed, 12 * block, |rng| {
        let p = sample_meander(m_n, 1.0, rng)?;
        Ok((m_idxs.map(|i| p.values()[i]), p.end()))
    })?;
    for (k, (&t, label)) in ts.iter().zip(T_LABELS).enumerate() {
        let mm = meander_moments(t)?;
        let vals: Vec<f64> = meanders.iter().map(|d| d.0[k]).collect();
        out.push(moment_ztest(&format!("meander-mean(t={label})"), &vals, mm.mean, Moment::Mean)?);
        out.push(moment_ztest(
            &format!("meander-second(t={label})"),
            &vals,
            mm.second,
            Moment::Second,
        )?);
        let cross: Vec<f64> = meanders.iter().map(|d| d.0[k] * d.1).collect();
        out.push(moment_ztest(
            &format!("meander-cross(t={label})"),
            &cross,
            mm.cross,
            Moment::Mean,
        )?);
    }

    Ok(out)
}

/// Occupation-quantile rebuild of Brownian motion against the
/// minimum-shifted path, compared at the midpoint. Reported but not
/// gating: the local-time estimator converges slowly in the bandwidth.
pub fn quantile_experimental(cfg: &ExperimentConfig) -> Result<Vec<TestReport>> {
    let n = 1 << 14;
    let reps = 3000usize;
    let eps = default_bandwidth(n);
    let qs = par_collect(reps, cfg.seed, 13_000_000, |rng| {
        let p = sample_bm(n, 1.0, rng)?;
        Ok(quantile_transform_bm(&p, eps)?.values()[n / 2])
    })?;
    let vs = par_collect(reps, cfg.seed, 13_100_000, |rng| {
        Ok(build_vb(n, rng)?.path.values()[n / 2])
    })?;
    let mut r = ks_two_sample("quantile-vs-shift-midpoint", &qs, &vs, cfg.alpha)?;
    // Non-gating criterion: the KS statistic itself stays below 0.05.
    r.threshold = 0.05;
    r.pass = r.statistic < 0.05;
    r.notes = "reported, non-gating; pass iff statistic < 0.05".into();
    Ok(vec![r])
}

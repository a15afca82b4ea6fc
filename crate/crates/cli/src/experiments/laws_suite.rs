//! Deterministic quadrature identities for the scalar laws.

use vervaat::laws::{fa, fz, fztilde, identity_checks, mean_z, meander_marginal, meander_moments, nonmarkov_ratio, vb_moments};
use vervaat::quad::{integrate, Quadrature};
use vervaat::stats::TestReport;
use vervaat::Result;

use super::gap_report;
use crate::config::ExperimentConfig;

const LAMBDAS: [f64; 3] = [-0.5, -1.0, -2.0];

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(1e-300)
}

pub fn law_identities(_cfg: &ExperimentConfig) -> Result<Vec<TestReport>> {
    let mut out = Vec::new();
    let cfg10 = Quadrature::with_tol(1e-10);

    for &l in &LAMBDAS {
        let law = fz(l)?;
        out.push(gap_report(
            &format!("first-visit-normalization({l})"),
            law.normalization()?,
            1.0,
            1e-6,
            0,
            "",
        ));

        // Closed-form cdf against the integrated density.
        let mut worst: f64 = 0.0;
        for i in 1..10 {
            let t = i as f64 / 10.0;
            let quad = integrate(|s| law.pdf(s), 0.0, t, cfg10)?.value;
            worst = worst.max(rel(quad, law.cdf(t)));
        }
        out.push(gap_report(
            &format!("first-visit-cdf-vs-density({l})"),
            worst,
            0.0,
            1e-6,
            9,
            "max relative gap on the interior decile grid",
        ));

        let quad_mean = integrate(|s| s * law.pdf(s), 0.0, 1.0, cfg10)?.value;
        out.push(gap_report(
            &format!("first-visit-mean({l})"),
            rel(quad_mean, mean_z(l)?),
            0.0,
            1e-6,
            0,
            "closed form vs quadrature",
        ));

        out.push(gap_report(
            &format!("split-normalization({l})"),
            fa(l)?.normalization()?,
            1.0,
            1e-6,
            0,
            "",
        ));

        out.push(gap_report(
            &format!("conditioned-visit-normalization({l})"),
            fztilde(l)?.normalization()?,
            1.0,
            1e-6,
            0,
            "",
        ));
    }

    for &t in &[0.25, 0.5, 0.75] {
        let law = meander_marginal(t)?;
        out.push(gap_report(
            &format!("meander-marginal-normalization({t})"),
            law.normalization()?,
            1.0,
            1e-6,
            0,
            "",
        ));
        let quad_mean = integrate(|x| x * law.pdf(x), 0.0, 10.0, cfg10)?.value;
        out.push(gap_report(
            &format!("meander-marginal-mean({t})"),
            rel(quad_mean, meander_moments(t)?.mean),
            0.0,
            1e-6,
            0,
            "density mean vs closed form",
        ));
    }

    // The pre/post split moments must reassemble the full moments.
    let mut worst_mean: f64 = 0.0;
    let mut worst_second: f64 = 0.0;
    for i in 0..=100 {
        let t = i as f64 / 100.0;
        let m = vb_moments(t)?;
        worst_mean = worst_mean.max((m.mean_pre + m.mean_post - m.mean).abs());
        worst_second = worst_second.max((m.second_pre + m.second_post - m.second).abs());
    }
    out.push(gap_report(
        "shifted-motion-mean-split",
        worst_mean,
        0.0,
        1e-10,
        101,
        "max |pre + post - full| on the t grid",
    ));
    out.push(gap_report(
        "shifted-motion-second-split",
        worst_second,
        0.0,
        1e-10,
        101,
        "max |pre + post - full| on the t grid",
    ));

    out.extend(identity_checks()?);

    // The conditional-density ratio grows linearly in t: ratio/t is
    // constant across t for fixed (t0, x0, lambda).
    let (t0, x0, l) = (0.1, 0.5, -1.0);
    let mut slopes = Vec::new();
    for &t in &[0.2, 0.35, 0.5, 0.65, 0.8, 0.95] {
        slopes.push(nonmarkov_ratio(t, t0, x0, l)? / t);
    }
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    let worst = slopes.iter().map(|s| rel(*s, mean)).fold(0.0, f64::max);
    out.push(gap_report(
        "conditional-ratio-linear-in-t",
        worst,
        0.0,
        1e-6,
        slopes.len(),
        format!("ratio/t = {mean:.6} constant across t"),
    ));

    Ok(out)
}

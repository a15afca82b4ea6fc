//! Closed-form scalar laws, kernels, moments and identities, with
//! quadrature cross-checks and exact samplers where one exists.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_to_inf, Quadrature};
use crate::rng::RngStream;
use crate::special::{erf, gauss_tail};
use crate::stats::TestReport;

type Pdf = Box<dyn Fn(f64) -> f64 + Send + Sync>;
type Cdf = Box<dyn Fn(f64) -> f64 + Send + Sync>;
type Sampler = Box<dyn Fn(&mut RngStream) -> f64 + Send + Sync>;

/// A named scalar law: density, distribution function, and an optional
/// exact sampler.
pub struct ClosedFormLaw {
    name: String,
    support: (f64, f64),
    pdf: Pdf,
    cdf: Cdf,
    sampler: Option<Sampler>,
}

impl ClosedFormLaw {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn pdf(&self, x: f64) -> f64 {
        (self.pdf)(x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        (self.cdf)(x)
    }

    pub fn has_sampler(&self) -> bool {
        self.sampler.is_some()
    }

    pub fn sample(&self, rng: &mut RngStream) -> Result<f64> {
        match &self.sampler {
            Some(s) => Ok(s(rng)),
            None => Err(Error::invalid(format!("law {}: no exact sampler", self.name))),
        }
    }

    /// ∫ pdf over the support, by adaptive quadrature.
    pub fn normalization(&self) -> Result<f64> {
        let cfg = Quadrature::default();
        let (lo, hi) = self.support;
        let r = if hi.is_infinite() {
            integrate_to_inf(|x| self.pdf(x), lo, cfg)?
        } else if lo.is_infinite() {
            integrate_to_inf(|x| self.pdf(-x), -hi, cfg)?
        } else {
            integrate(|x| self.pdf(x), lo, hi, cfg)?
        };
        Ok(r.value)
    }
}

impl std::fmt::Debug for ClosedFormLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClosedFormLaw")
            .field("name", &self.name)
            .field("support", &self.support)
            .finish()
    }
}

fn require_negative(lambda: f64, what: &str) -> Result<()> {
    if !(lambda < 0.0) {
        return Err(Error::invalid(format!("{what}: lambda must be negative, got {lambda}")));
    }
    Ok(())
}

/// Piecewise-linear cdf built by composite Simpson integration of the
/// pdf on a fine grid, normalized to end at 1.
fn tabulate_cdf(pdf: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> Cdf {
    let h = (hi - lo) / panels as f64;
    let mut cum = Vec::with_capacity(panels + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    for i in 0..panels {
        let a = lo + i as f64 * h;
        acc += h / 6.0 * (pdf(a) + 4.0 * pdf(a + 0.5 * h) + pdf(a + h));
        cum.push(acc);
    }
    let total = *cum.last().unwrap();
    for c in &mut cum {
        *c /= total;
    }
    Box::new(move |x| {
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let s = (x - lo) / h;
        let i = (s.floor() as usize).min(panels - 1);
        let frac = s - i as f64;
        cum[i] * (1.0 - frac) + cum[i + 1] * frac
    })
}

/// First-return split law of the negative-endpoint Vervaat bridge:
/// density |λ|/√(2πt(1−t)³)·exp(−λ²t/(2(1−t))) on (0,1), cdf
/// erf(|λ|√(t/(2(1−t)))) and the exact sampler Z = G²/(λ²+G²).
pub fn fz(lambda: f64) -> Result<ClosedFormLaw> {
    require_negative(lambda, "fz")?;
    let l2 = lambda * lambda;
    let labs = lambda.abs();
    Ok(ClosedFormLaw {
        name: format!("fz({lambda})"),
        support: (0.0, 1.0),
        pdf: Box::new(move |t| fz_pdf(labs, t)),
        cdf: Box::new(move |t| {
            if t <= 0.0 {
                0.0
            } else if t >= 1.0 {
                1.0
            } else {
                erf(labs * (t / (2.0 * (1.0 - t))).sqrt())
            }
        }),
        sampler: Some(Box::new(move |rng| {
            let g = rng.normal();
            g * g / (l2 + g * g)
        })),
    })
}

fn fz_pdf(labs: f64, t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let omt = 1.0 - t;
    labs / (2.0 * PI * t * omt * omt * omt).sqrt() * (-labs * labs * t / (2.0 * omt)).exp()
}

/// E Z^λ = 1 − |λ|·e^{λ²/2}·∫_{|λ|}^∞ e^{−t²/2} dt.
pub fn mean_z(lambda: f64) -> Result<f64> {
    require_negative(lambda, "mean_z")?;
    let labs = lambda.abs();
    Ok(1.0 - labs * (0.5 * labs * labs).exp() * gauss_tail(labs))
}

/// Probability that the negative-endpoint Vervaat bridge stays above
/// the chord t ↦ λt; equals E Z^λ.
pub fn stay_above_prob(lambda: f64) -> Result<f64> {
    require_negative(lambda, "stay_above_prob")?;
    mean_z(lambda)
}

/// Law of the argmin split A^λ: density a ↦ ∫_a^1 f_Z(t)/t dt, with the
/// cdf F_A(a) = F_Z(a) + a·f_A(a) and the sampler A = U·Z.
pub fn fa(lambda: f64) -> Result<ClosedFormLaw> {
    require_negative(lambda, "fa")?;
    let labs = lambda.abs();
    let z = fz(lambda)?;
    let pdf = move |a: f64| -> f64 {
        if a <= 0.0 || a >= 1.0 {
            return 0.0;
        }
        integrate(|t| fz_pdf(labs, t) / t, a, 1.0, Quadrature::with_tol(1e-10))
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    };
    let pdf_for_cdf = pdf;
    let zc = fz(lambda)?;
    Ok(ClosedFormLaw {
        name: format!("fa({lambda})"),
        support: (0.0, 1.0),
        pdf: Box::new(pdf),
        cdf: Box::new(move |a| {
            if a <= 0.0 {
                0.0
            } else if a >= 1.0 {
                1.0
            } else {
                // A | Z is uniform on [0, Z], so
                // P(A ≤ a) = P(Z ≤ a) + a·E[1/Z; Z > a].
                (zc.cdf)(a) + a * pdf_for_cdf(a)
            }
        }),
        sampler: Some(Box::new(move |rng| {
            let zv = z.sample(rng).expect("fz has a sampler");
            rng.uniform() * zv
        })),
    })
}

/// First-return law of the bridge conditioned above the chord:
/// density t·f_Z(t)/E Z, sampled by rejection (accept Z with
/// probability Z).
pub fn fztilde(lambda: f64) -> Result<ClosedFormLaw> {
    require_negative(lambda, "fztilde")?;
    let labs = lambda.abs();
    let m = mean_z(lambda)?;
    let z = fz(lambda)?;
    let pdf = move |t: f64| t * fz_pdf(labs, t) / m;
    let cdf = tabulate_cdf(pdf, 0.0, 1.0, 4096);
    Ok(ClosedFormLaw {
        name: format!("fztilde({lambda})"),
        support: (0.0, 1.0),
        pdf: Box::new(pdf),
        cdf,
        sampler: Some(Box::new(move |rng| loop {
            let zv = z.sample(rng).expect("fz has a sampler");
            if rng.uniform() < zv {
                return zv;
            }
        })),
    })
}

/// Gaussian transition density p_t(x, y).
pub fn heat_kernel(t: f64, x: f64, y: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("heat_kernel: t must be positive"));
    }
    let d = y - x;
    Ok((-d * d / (2.0 * t)).exp() / (2.0 * PI * t).sqrt())
}

/// Density g_t(λ) of the first hit of level λ by Brownian motion
/// started at 0.
pub fn first_hit_kernel(t: f64, lambda: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("first_hit_kernel: t must be positive"));
    }
    Ok(lambda.abs() / (2.0 * PI * t * t * t).sqrt() * (-lambda * lambda / (2.0 * t)).exp())
}

/// Bessel(3) kernel q̃_t(x, y); the transition density of the process
/// from x is q̃_t(x, y)·y². The x→0 limits are built in.
pub fn bessel_kernel(t: f64, x: f64, y: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("bessel_kernel: t must be positive"));
    }
    if x < 0.0 || y < 0.0 {
        return Err(Error::invalid("bessel_kernel: levels must be nonnegative"));
    }
    // Symmetric in (x, y); route the small argument to the limit form.
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    let norm = 1.0 / (2.0 * PI * t).sqrt();
    if x * y / t < 1e-8 {
        // q̃_t(x→0, y) = (2/t)·p_t(0, y), exact at x = 0.
        return Ok(2.0 / t * norm * (-y * y / (2.0 * t)).exp());
    }
    let a = (-(y - x) * (y - x) / (2.0 * t)).exp();
    let b = (-(y + x) * (y + x) / (2.0 * t)).exp();
    Ok(norm * (a - b) / (x * y))
}

/// Kernel selector used by the command-line tabulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Heat,
    FirstHit,
    Bessel,
}

pub fn kernels(kind: KernelKind, t: f64, x: f64, y: f64) -> Result<f64> {
    match kind {
        KernelKind::Heat => heat_kernel(t, x, y),
        KernelKind::FirstHit => first_hit_kernel(t, y),
        KernelKind::Bessel => bessel_kernel(t, x, y),
    }
}

/// Rayleigh law: density x·e^{−x²/2} on (0, ∞).
pub fn rayleigh() -> ClosedFormLaw {
    ClosedFormLaw {
        name: "rayleigh".into(),
        support: (0.0, f64::INFINITY),
        pdf: Box::new(|x| if x <= 0.0 { 0.0 } else { x * (-0.5 * x * x).exp() }),
        cdf: Box::new(|x| if x <= 0.0 { 0.0 } else { 1.0 - (-0.5 * x * x).exp() }),
        sampler: Some(Box::new(|rng| rng.rayleigh())),
    }
}

/// Arcsine law on (0, 1): density 1/(π√(t(1−t))).
pub fn arcsine() -> ClosedFormLaw {
    ClosedFormLaw {
        name: "arcsine".into(),
        support: (0.0, 1.0),
        pdf: Box::new(|t| {
            if t <= 0.0 || t >= 1.0 {
                0.0
            } else {
                1.0 / (PI * (t * (1.0 - t)).sqrt())
            }
        }),
        cdf: Box::new(|t| {
            if t <= 0.0 {
                0.0
            } else if t >= 1.0 {
                1.0
            } else {
                2.0 / PI * t.sqrt().asin()
            }
        }),
        sampler: Some(Box::new(|rng| {
            let s = (0.5 * PI * rng.uniform()).sin();
            s * s
        })),
    }
}

/// Cdf of the last-segment slope of the convex minorant of the
/// negative-endpoint Vervaat bridge: P(s_l ∈ [λ, a]), with an atom at λ.
pub fn slope_cdf(lambda: f64, a: f64) -> Result<f64> {
    require_negative(lambda, "slope_cdf")?;
    if !(lambda..=0.0).contains(&a) {
        return Err(Error::invalid(format!("slope_cdf: a = {a} outside [{lambda}, 0]")));
    }
    Ok(1.0 + a * (0.5 * lambda * lambda).exp() * gauss_tail(lambda.abs()))
}

/// Meander moments at time t: (E M_t, E M_t², E M_t·M_1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanderMoments {
    pub mean: f64,
    pub second: f64,
    pub cross: f64,
}

pub fn meander_moments(t: f64) -> Result<MeanderMoments> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid("meander_moments: t must be in [0, 1]"));
    }
    Ok(MeanderMoments {
        mean: (2.0 / PI).sqrt() * ((t * (1.0 - t)).sqrt() + t.sqrt().asin()),
        second: 3.0 * t - t * t,
        cross: 2.0 * t.sqrt(),
    })
}

/// Marginal of the unit meander at time t ∈ (0, 1]:
/// density t^{−3/2}·x·e^{−x²/(2t)}·erf(x/√(2(1−t))) on x > 0.
pub fn meander_marginal(t: f64) -> Result<ClosedFormLaw> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::invalid("meander_marginal: t must be in (0, 1]"));
    }
    let pdf = move |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let scale = t.powf(-1.5) * x * (-x * x / (2.0 * t)).exp();
        if t >= 1.0 {
            scale
        } else {
            scale * erf(x / (2.0 * (1.0 - t)).sqrt())
        }
    };
    // The density is negligible beyond x = 8 for every t ≤ 1.
    let cdf = tabulate_cdf(pdf, 0.0, 8.0, 4096);
    Ok(ClosedFormLaw {
        name: format!("meander_marginal({t})"),
        support: (0.0, f64::INFINITY),
        pdf: Box::new(pdf),
        cdf,
        sampler: None,
    })
}

/// First two moments of the minimum-shifted Brownian path at time t,
/// with the splits over {A > t} and {A ≤ t}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VbMoments {
    pub mean: f64,
    pub second: f64,
    pub mean_pre: f64,
    pub mean_post: f64,
    pub second_pre: f64,
    pub second_post: f64,
}

pub fn vb_moments(t: f64) -> Result<VbMoments> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid("vb_moments: t must be in [0, 1]"));
    }
    let (st, somt) = (t.sqrt(), (1.0 - t).sqrt());
    let asi = st.asin();
    let s = (t * (1.0 - t)).sqrt();
    let c = (2.0 / PI).sqrt();
    Ok(VbMoments {
        mean: (8.0 / PI).sqrt() * (st + somt - 1.0),
        second: 3.0 * t + (4.0 - 8.0 * t) / PI * asi - 4.0 / PI * s,
        mean_pre: c * (somt + 2.0 * st - t - 1.0),
        mean_post: c * (somt + t - 1.0),
        second_pre: 3.0 * t - 6.0 * t / PI * asi - 2.0 / PI * (t * t * t * (1.0 - t)).sqrt(),
        second_post: (4.0 - 2.0 * t) / PI * (asi - s),
    })
}

/// Law of the endpoint conditionally on the first zero of the shifted
/// path occurring at t̃₀: negative-half Rayleigh with scale √(1−t̃₀).
pub fn end_given_t0(t0: f64) -> Result<ClosedFormLaw> {
    if !(t0 > 0.0 && t0 < 1.0) {
        return Err(Error::invalid("end_given_t0: t0 must be in (0, 1)"));
    }
    let v = 1.0 - t0;
    Ok(ClosedFormLaw {
        name: format!("end_given_t0({t0})"),
        support: (f64::NEG_INFINITY, 0.0),
        pdf: Box::new(move |x| {
            if x >= 0.0 {
                0.0
            } else {
                x.abs() / v * (-x * x / (2.0 * v)).exp()
            }
        }),
        cdf: Box::new(move |x| {
            if x >= 0.0 {
                1.0
            } else {
                (-x * x / (2.0 * v)).exp()
            }
        }),
        sampler: Some(Box::new(move |rng| -v.sqrt() * rng.rayleigh())),
    })
}

/// Ratio f₂(t)/f₁(t) of the two conditional first-return densities of
/// the non-Markov comparison, after normalizing both by quadrature.
/// The ratio is proportional to t.
pub fn nonmarkov_ratio(t: f64, t0: f64, x0: f64, lambda: f64) -> Result<f64> {
    require_negative(lambda, "nonmarkov_ratio")?;
    if !(0.0 < t0 && t0 < t && t < 1.0) {
        return Err(Error::invalid("nonmarkov_ratio: need 0 < t0 < t < 1"));
    }
    if !(x0 > 0.0) {
        return Err(Error::invalid("nonmarkov_ratio: x0 must be positive"));
    }
    let base = move |s: f64| -> f64 {
        if s <= t0 || s >= 1.0 {
            return 0.0;
        }
        let d1 = s - t0;
        let d2 = 1.0 - s;
        (-x0 * x0 / (2.0 * d1) - lambda * lambda / (2.0 * d2)).exp()
            / (d1 * d1 * d1 * d2 * d2 * d2).sqrt()
    };
    let cfg = Quadrature::with_tol(1e-10);
    let n1 = integrate(base, t0, 1.0, cfg)?.value;
    let n2 = integrate(|s| s * base(s), t0, 1.0, cfg)?.value;
    Ok((t * base(t) / n2) / (base(t) / n1))
}

// ∫_t^1 ds/√((1−s)(s−t))·e^{−a/(s−t)}, computed with the substitution
// s = t + (1−t)·sin²θ which removes both endpoint singularities.
fn crossing_time_integral(t: f64, a: f64) -> Result<f64> {
    let r = integrate(
        |theta: f64| {
            let s2 = theta.sin().powi(2);
            if a == 0.0 {
                2.0
            } else if s2 == 0.0 {
                0.0
            } else {
                2.0 * (-a / ((1.0 - t) * s2)).exp()
            }
        },
        0.0,
        PI / 2.0,
        Quadrature::with_tol(1e-10),
    )?;
    Ok(r.value)
}

fn relative_gap(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(1e-300)
}

/// Quadrature checks of the fixed scalar identities: the crossing-time
/// integral against its complementary-error form, and the two Gaussian
/// error-function moment integrals against their closed forms.
pub fn identity_checks() -> Result<Vec<TestReport>> {
    let mut reports = Vec::new();
    let cfg = Quadrature::with_tol(1e-10);

    let mut worst: f64 = 0.0;
    for &t in &[0.2, 0.5, 0.8] {
        for &a in &[0.0, 0.25, 0.5, 1.0, 2.0] {
            let lhs = crossing_time_integral(t, a)?;
            // √π ∫_x^∞ e^{−u}/√u du = π·erfc(√x).
            let rhs = PI * crate::special::erfc((a / (1.0 - t)).sqrt());
            worst = worst.max(relative_gap(lhs, rhs));
        }
    }
    reports.push(TestReport {
        name: "crossing-time-integral".into(),
        n: 15,
        statistic: worst,
        p_value: None,
        threshold: 1e-6,
        pass: worst < 1e-6,
        seed: None,
        notes: "max relative gap over the (t, a) grid".into(),
    });

    let mut worst2: f64 = 0.0;
    let mut worst3: f64 = 0.0;
    for &a in &[0.5, 1.0, 2.0] {
        let q2 = integrate_to_inf(|x| x * x * (-a * x * x).exp() * erf(x), 0.0, cfg)?.value;
        let c2 = (a.sqrt() + (a + 1.0) * (1.0 / (a + 1.0)).sqrt().asin())
            / (2.0 * PI.sqrt() * a.powf(1.5) * (a + 1.0));
        worst2 = worst2.max(relative_gap(q2, c2));
        let q3 = integrate_to_inf(|x| x * x * x * (-a * x * x).exp() * erf(x), 0.0, cfg)?.value;
        let c3 = (2.0 + 3.0 * a) / (4.0 * a * a * (a + 1.0).powf(1.5));
        worst3 = worst3.max(relative_gap(q3, c3));
    }
    reports.push(TestReport {
        name: "erf-moment-x2".into(),
        n: 3,
        statistic: worst2,
        p_value: None,
        threshold: 1e-6,
        pass: worst2 < 1e-6,
        seed: None,
        notes: String::new(),
    });
    reports.push(TestReport {
        name: "erf-moment-x3".into(),
        n: 3,
        statistic: worst3,
        p_value: None,
        threshold: 1e-6,
        pass: worst3 < 1e-6,
        seed: None,
        notes: String::new(),
    });
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_one_sample, DEFAULT_ALPHA};

    #[test]
    fn fz_values() {
        let law = fz(-1.0).unwrap();
        assert!((law.pdf(0.5) - 0.9678829).abs() < 1e-6);
        assert!((law.cdf(0.5) - 0.6826895).abs() < 1e-6);
        assert!((law.normalization().unwrap() - 1.0).abs() < 1e-8);
        assert!(fz(0.5).is_err());
    }

    #[test]
    fn fz_cdf_matches_pdf_quadrature() {
        for &lambda in &[-0.5, -1.0, -2.0] {
            let law = fz(lambda).unwrap();
            for &t in &[0.1, 0.3, 0.5, 0.7, 0.9] {
                let q = integrate(|s| law.pdf(s), 0.0, t, Quadrature::with_tol(1e-10))
                    .unwrap()
                    .value;
                assert!((q - law.cdf(t)).abs() < 1e-6, "λ={lambda}, t={t}");
            }
        }
    }

    #[test]
    fn fz_sampler_matches_cdf() {
        let law = fz(-1.0).unwrap();
        let mut rng = RngStream::new(17, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| law.sample(&mut rng).unwrap()).collect();
        let r = ks_one_sample("fz-sampler", &xs, |x| law.cdf(x), DEFAULT_ALPHA).unwrap();
        assert!(r.pass, "stat {} p {:?}", r.statistic, r.p_value);
    }

    #[test]
    fn mean_z_values() {
        assert!((mean_z(-1.0).unwrap() - 0.3443205).abs() < 1e-6);
        // λ → 0⁻ gives mass to the full-length split.
        assert!((mean_z(-1e-8).unwrap() - 1.0).abs() < 1e-6);
        for &lambda in &[-0.5, -1.0, -2.0] {
            let law = fz(lambda).unwrap();
            let q = integrate(|t| t * law.pdf(t), 0.0, 1.0, Quadrature::with_tol(1e-10))
                .unwrap()
                .value;
            assert!((q - mean_z(lambda).unwrap()).abs() < 1e-6, "λ={lambda}");
        }
    }

    #[test]
    fn fa_properties() {
        let law = fa(-1.0).unwrap();
        assert!((law.normalization().unwrap() - 1.0).abs() < 1e-6);
        assert!(law.pdf(0.9999) < 1e-2);
        // Mean of A is half the mean of Z.
        let m = integrate(|a| a * law.pdf(a), 0.0, 1.0, Quadrature::with_tol(1e-9))
            .unwrap()
            .value;
        assert!((m - 0.5 * mean_z(-1.0).unwrap()).abs() < 1e-6);
        // Cdf consistency with the pdf.
        let q = integrate(|a| law.pdf(a), 0.0, 0.4, Quadrature::with_tol(1e-9))
            .unwrap()
            .value;
        assert!((q - law.cdf(0.4)).abs() < 1e-6);
    }

    #[test]
    fn fa_sampler_matches_cdf() {
        let law = fa(-1.0).unwrap();
        let mut rng = RngStream::new(18, 0);
        let xs: Vec<f64> = (0..30_000).map(|_| law.sample(&mut rng).unwrap()).collect();
        let r = ks_one_sample("fa-sampler", &xs, |x| law.cdf(x), DEFAULT_ALPHA).unwrap();
        assert!(r.pass, "stat {} p {:?}", r.statistic, r.p_value);
    }

    #[test]
    fn fztilde_properties() {
        let law = fztilde(-1.0).unwrap();
        assert!((law.normalization().unwrap() - 1.0).abs() < 1e-8);
        assert!((law.pdf(0.5) - 1.4054972).abs() < 1e-4);
        let mut rng = RngStream::new(19, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| law.sample(&mut rng).unwrap()).collect();
        let r = ks_one_sample("fztilde-sampler", &xs, |x| law.cdf(x), DEFAULT_ALPHA).unwrap();
        assert!(r.pass, "stat {} p {:?}", r.statistic, r.p_value);
    }

    #[test]
    fn kernel_values() {
        assert!((heat_kernel(1.0, 0.0, 0.0).unwrap() - 0.3989423).abs() < 1e-6);
        assert!((first_hit_kernel(1.0, -1.0).unwrap() - 0.2419707).abs() < 1e-6);
        assert!((bessel_kernel(1.0, 0.0, 0.0).unwrap() - 0.7978846).abs() < 1e-6);
        // q̃_t(0, y) = (2/y)·g_t(y).
        let q = bessel_kernel(1.0, 0.0, 0.7).unwrap();
        let g = first_hit_kernel(1.0, 0.7).unwrap();
        assert!((q - 2.0 / 0.7 * g).abs() < 1e-10);
        // Limit form agrees with the exact kernel for small x.
        let a = bessel_kernel(0.5, 1e-5, 0.7).unwrap();
        let b = bessel_kernel(0.5, 1e-3, 0.7).unwrap();
        assert!((a - b).abs() / a < 1e-4);
        assert!(bessel_kernel(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn bessel_kernel_normalizes() {
        // ∫ q̃_t(x, y) y² dy = 1 for a transition density.
        for &(t, x) in &[(0.3, 0.0), (0.5, 1.2), (1.0, 0.4)] {
            let v = integrate_to_inf(
                |y| bessel_kernel(t, x, y).unwrap() * y * y,
                0.0,
                Quadrature::default(),
            )
            .unwrap()
            .value;
            assert!((v - 1.0).abs() < 1e-7, "t={t}, x={x}: {v}");
        }
    }

    #[test]
    fn stay_above_matches_mean() {
        assert_eq!(stay_above_prob(-1.0).unwrap(), mean_z(-1.0).unwrap());
        assert!((stay_above_prob(-3.0).unwrap() - mean_z(-3.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn slope_cdf_values() {
        assert_eq!(slope_cdf(-1.0, 0.0).unwrap(), 1.0);
        let atom = slope_cdf(-1.0, -1.0).unwrap();
        assert!((atom - stay_above_prob(-1.0).unwrap()).abs() < 1e-12);
        assert!((slope_cdf(-1.0, -0.5).unwrap() - 0.6721602).abs() < 1e-6);
        // Nondecreasing in a.
        let mut prev = 0.0;
        for i in 0..=20 {
            let a = -1.0 + i as f64 / 20.0;
            let v = slope_cdf(-1.0, a).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(slope_cdf(-1.0, 0.5).is_err());
    }

    #[test]
    fn meander_moment_values() {
        let m = meander_moments(1.0).unwrap();
        assert!((m.mean - (PI / 2.0).sqrt()).abs() < 1e-12);
        assert_eq!(m.second, 2.0);
        assert_eq!(m.cross, 2.0);
        let m = meander_moments(0.0).unwrap();
        assert_eq!((m.mean, m.second, m.cross), (0.0, 0.0, 0.0));
        assert!((meander_moments(0.25).unwrap().second - 0.6875).abs() < 1e-12);
    }

    #[test]
    fn meander_marginal_properties() {
        for &t in &[0.25, 0.5, 0.9] {
            let law = meander_marginal(t).unwrap();
            assert!((law.normalization().unwrap() - 1.0).abs() < 1e-8, "t={t}");
            let mean = integrate(|x| x * law.pdf(x), 0.0, 8.0, Quadrature::with_tol(1e-10))
                .unwrap()
                .value;
            assert!(
                (mean - meander_moments(t).unwrap().mean).abs() < 1e-6,
                "t={t}"
            );
        }
        // t = 1 reduces to Rayleigh.
        let law = meander_marginal(1.0).unwrap();
        let r = rayleigh();
        for &x in &[0.3, 1.0, 2.5] {
            assert!((law.pdf(x) - r.pdf(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn vb_moment_values() {
        let m = vb_moments(1.0).unwrap();
        assert!(m.mean.abs() < 1e-12);
        assert!((m.second - 1.0).abs() < 1e-12);
        let m = vb_moments(0.5).unwrap();
        assert!((m.mean - 0.6609892).abs() < 1e-6);
        assert!((m.second - 0.8633802).abs() < 1e-6);
        let m = vb_moments(0.0).unwrap();
        assert!(m.mean.abs() < 1e-12 && m.second.abs() < 1e-12);
    }

    #[test]
    fn vb_moment_split_identities() {
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let m = vb_moments(t).unwrap();
            assert!((m.mean_pre + m.mean_post - m.mean).abs() < 1e-10, "t={t}");
            assert!(
                (m.second_pre + m.second_post - m.second).abs() < 1e-10,
                "t={t}"
            );
        }
    }

    #[test]
    fn end_given_t0_properties() {
        let law = end_given_t0(0.5).unwrap();
        assert!((law.normalization().unwrap() - 1.0).abs() < 1e-8);
        // Mean = −√(π(1−t₀)/2).
        let m = integrate(|x| x * law.pdf(x), -10.0, 0.0, Quadrature::with_tol(1e-10))
            .unwrap()
            .value;
        assert!((m + (PI * 0.5 / 2.0).sqrt()).abs() < 1e-7);
        let mut rng = RngStream::new(20, 0);
        let xs: Vec<f64> = (0..50_000).map(|_| law.sample(&mut rng).unwrap()).collect();
        let r = ks_one_sample("end-t0", &xs, |x| law.cdf(x), DEFAULT_ALPHA).unwrap();
        assert!(r.pass, "stat {}", r.statistic);
        assert!(end_given_t0(1.5).is_err());
    }

    #[test]
    fn nonmarkov_ratio_proportional_to_t() {
        let (t0, x0, lambda) = (0.3, 0.5, -1.0);
        let base = nonmarkov_ratio(0.5, t0, x0, lambda).unwrap() / 0.5;
        for &t in &[0.35, 0.4, 0.6, 0.7, 0.85, 0.95] {
            let r = nonmarkov_ratio(t, t0, x0, lambda).unwrap();
            assert!(
                (r / t - base).abs() / base < 1e-6,
                "t={t}: {} vs {base}",
                r / t
            );
        }
        assert!(nonmarkov_ratio(0.2, t0, x0, lambda).is_err());
    }

    #[test]
    fn identity_checks_pass() {
        for r in identity_checks().unwrap() {
            assert!(r.pass, "{}: {}", r.name, r.statistic);
        }
    }

    #[test]
    fn identity_check_values() {
        // Crossing-time integral at a = 0 equals π.
        assert!((crossing_time_integral(0.5, 0.0).unwrap() - PI).abs() < 1e-9);
        let cfg = Quadrature::with_tol(1e-10);
        let q2 = integrate_to_inf(|x| x * x * (-x * x).exp() * erf(x), 0.0, cfg)
            .unwrap()
            .value;
        assert!((q2 - 0.3626041).abs() < 1e-6);
        let q3 = integrate_to_inf(|x| x * x * x * (-x * x).exp() * erf(x), 0.0, cfg)
            .unwrap()
            .value;
        assert!((q3 - 0.4419417).abs() < 1e-6);
    }

    #[test]
    fn arcsine_sampler() {
        let law = arcsine();
        let mut rng = RngStream::new(23, 0);
        let xs: Vec<f64> = (0..50_000).map(|_| law.sample(&mut rng).unwrap()).collect();
        let r = ks_one_sample("arcsine", &xs, |x| law.cdf(x), DEFAULT_ALPHA).unwrap();
        assert!(r.pass, "stat {}", r.statistic);
    }
}

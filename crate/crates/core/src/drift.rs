//! Drift functions and semimartingale compensators for the shifted
//! bridge and the shifted Brownian motion.
//!
//! The two J-integrals are computed with the substitution
//! s = t + (1−t)·sin²θ, which removes all endpoint singularities; the
//! Φ family is evaluated in closed form through the error function.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::GridPath;
use crate::quad::{integrate, Quadrature};
use crate::special::erf;
use crate::transform::first_hit;

/// Steps closer than this to t = 1 or to the regime switch are left
/// out of the compensated residual.
pub const TIME_GUARD: f64 = 1.0 / 64.0;

/// Steps where the relevant state coordinate is this close to a
/// singular level are left out of the compensated residual.
pub const STATE_GUARD: f64 = 1e-3;

fn check_ty(t: f64, y: f64, what: &str) -> Result<()> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::invalid(format!("{what}: t = {t} outside [0, 1)")));
    }
    if !(y > 0.0) {
        return Err(Error::invalid(format!("{what}: y = {y} must be positive")));
    }
    Ok(())
}

fn j_pair(
    weight: impl Fn(f64) -> f64,
    t: f64,
    y: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    // Common kernel factor in θ coordinates: s − t = (1−t)sin²θ and
    // the kernel ratio becomes s^{3/2}·((1−t)sin²θ)^{−3/2}·e^{−y²/(2(1−t)sin²θ)},
    // already multiplied by the Jacobian 2(1−t)sinθcosθ.
    let omt = 1.0 - t;
    let cfg = Quadrature::with_tol(tol);
    let f = |theta: f64, extra: bool| -> f64 {
        let sn = theta.sin();
        let cs = theta.cos();
        let s2 = sn * sn;
        if s2 == 0.0 {
            return 0.0;
        }
        let gap = omt * s2;
        let s = t + gap;
        let core = 2.0 * s.powf(1.5) * cs / (gap.sqrt() * gap) * (-y * y / (2.0 * gap)).exp();
        let w = weight(s);
        if w == 0.0 {
            return 0.0;
        }
        let v = core * w * omt * sn;
        if extra {
            v / gap
        } else {
            v
        }
    };
    let j = integrate(|th| f(th, false), 0.0, PI / 2.0, cfg)?.value;
    let jring = integrate(|th| f(th, true), 0.0, PI / 2.0, cfg)?.value;
    Ok((j, jring))
}

fn fz_density(lambda_abs: f64, s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return 0.0;
    }
    let oms = 1.0 - s;
    lambda_abs / (2.0 * PI * s * oms * oms * oms).sqrt()
        * (-lambda_abs * lambda_abs * s / (2.0 * oms)).exp()
}

fn j_neg_tol(lambda: f64, t: f64, y: f64, tol: f64) -> Result<(f64, f64)> {
    if !(lambda < 0.0) {
        return Err(Error::invalid("j_neg: lambda must be negative"));
    }
    check_ty(t, y, "j_neg")?;
    let labs = lambda.abs();
    j_pair(move |s| fz_density(labs, s), t, y, tol)
}

/// J and J̊ for the shifted bridge with negative endpoint:
/// J_t(y) = ∫_t^1 (s/(s−t))^{3/2}·e^{−y²/(2(s−t))}·f_Z(s) ds, and J̊
/// carries an extra 1/(s−t). They satisfy ∂_y J = −y·J̊.
pub fn j_neg(lambda: f64, t: f64, y: f64) -> Result<(f64, f64)> {
    j_neg_tol(lambda, t, y, 1e-10)
}

fn j_vb_tol(t: f64, y: f64, tol: f64) -> Result<(f64, f64)> {
    check_ty(t, y, "j_vb")?;
    j_pair(move |s| 1.0 / (PI * (s * (1.0 - s)).sqrt()), t, y, tol)
}

/// J and J̊ for the shifted Brownian motion: the same kernel ratio
/// integrated against the arcsine weight 1/(π√(s(1−s))).
pub fn j_vb(t: f64, y: f64) -> Result<(f64, f64)> {
    j_vb_tol(t, y, 1e-10)
}

// Φ¹·e^{−λ²/2} in closed form.
fn phi1_weighted(t: f64, y: f64, lambda: f64) -> f64 {
    let c = 1.0 / (2.0 * (1.0 - t)).sqrt();
    PI.sqrt() / (2.0 * 2.0f64.sqrt() * y) * (erf((y + lambda) * c) - erf((y - lambda).abs() * c))
}

// Φ²·e^{−λ²/2}; negative for y < λ.
fn phi2_weighted(t: f64, y: f64, lambda: f64) -> f64 {
    let omt = 1.0 - t;
    (y - lambda) / (omt.powf(1.5) * y) * (-(y - lambda) * (y - lambda) / (2.0 * omt)).exp()
}

// ∂_y Φ¹·e^{−λ²/2}; the sign convention takes the right limit at y = λ.
fn dphi1_weighted(t: f64, y: f64, lambda: f64) -> f64 {
    let c = 1.0 / (2.0 * (1.0 - t)).sqrt();
    let sign = if y >= lambda { 1.0 } else { -1.0 };
    let gauss = (-(y + lambda) * (y + lambda) * c * c).exp()
        - sign * (-(y - lambda) * (y - lambda) * c * c).exp();
    -phi1_weighted(t, y, lambda) / y + c / (2.0f64.sqrt() * y) * gauss
}

// ∂_y Φ²·e^{−λ²/2} for y > λ (the clamp kills it below).
fn dphi2_weighted(t: f64, y: f64, lambda: f64) -> f64 {
    let omt = 1.0 - t;
    let d = y - lambda;
    (-d * d / (2.0 * omt)).exp() / omt.powf(1.5) * (lambda / (y * y) - d * d / (y * omt))
}

fn check_phi_args(lambda: f64, t: f64, y: f64, theta: f64) -> Result<()> {
    if !(lambda > 0.0) {
        return Err(Error::invalid("phi: lambda must be positive"));
    }
    check_ty(t, y, "phi")?;
    if !(0.0..=t).contains(&theta) {
        return Err(Error::invalid(format!("phi: theta = {theta} outside [0, {t}]")));
    }
    Ok(())
}

/// Space-time harmonic function Φ^λ(t, y, θ) = Φ¹ + (1−θ)·(0 ∨ Φ²),
/// continuous across y = λ with a derivative jump there.
pub fn phi(lambda: f64, t: f64, y: f64, theta: f64) -> Result<f64> {
    check_phi_args(lambda, t, y, theta)?;
    let w = phi1_weighted(t, y, lambda) + (1.0 - theta) * phi2_weighted(t, y, lambda).max(0.0);
    Ok(w * (0.5 * lambda * lambda).exp())
}

/// ∂_y Φ^λ(t, y, θ), taking the right limit at y = λ. The jump across
/// y = λ is (t−θ)/((1−t)^{3/2}·λ)·e^{λ²/2}.
pub fn dphi(lambda: f64, t: f64, y: f64, theta: f64) -> Result<f64> {
    check_phi_args(lambda, t, y, theta)?;
    let mut w = dphi1_weighted(t, y, lambda);
    if y >= lambda {
        w += (1.0 - theta) * dphi2_weighted(t, y, lambda);
    }
    Ok(w * (0.5 * lambda * lambda).exp())
}

// Strict suffix minima of values[0..=i], scanned right to left; the
// result is ascending in both index and value, and always contains an
// entry with value ≤ 0 because paths start at 0.
fn suffix_records(values: &[f64], i: usize) -> Vec<(usize, f64)> {
    let mut records = Vec::new();
    let mut running = f64::INFINITY;
    for j in (0..=i).rev() {
        if values[j] < running {
            running = values[j];
            records.push((j, values[j]));
        }
    }
    records.reverse();
    records
}

// Index of the last time ≤ i at which the path is at or below level λ.
fn last_at_or_below(records: &[(usize, f64)], lambda: f64) -> usize {
    let k = records.partition_point(|&(_, v)| v <= lambda);
    records[k.saturating_sub(1).min(records.len() - 1)].0
}

fn phi_bar_pair_inner(path: &GridPath, i: usize, tol: f64) -> Result<(f64, f64)> {
    let t = path.time_at(i);
    let y = path.values()[i];
    check_ty(t, y, "phi_bar")?;
    let records = suffix_records(path.values(), i);
    let cfg = Quadrature::with_tol(tol);
    let value = |lambda: f64, derivative: bool| -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        let theta = path.time_at(last_at_or_below(&records, lambda));
        if derivative {
            let mut w = dphi1_weighted(t, y, lambda);
            if y >= lambda {
                w += (1.0 - theta) * dphi2_weighted(t, y, lambda);
            }
            w
        } else {
            phi1_weighted(t, y, lambda)
                + (1.0 - theta) * phi2_weighted(t, y, lambda).max(0.0)
        }
    };
    // The integrand is smooth between breakpoints: θ^λ jumps at every
    // suffix-record value, and ∂_yΦ has a kink at λ = y. Beyond y only
    // the Φ¹ part survives, with Gaussian decay of width √(1−t).
    let hi = y + 9.0 * (1.0 - t).sqrt() + 1.0;
    let mut cuts = vec![0.0];
    for &(_, v) in &records {
        if v > 0.0 && v < hi {
            cuts.push(v);
        }
    }
    if y < hi {
        cuts.push(y);
    }
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    let scale = (2.0 / PI).sqrt();
    let mut out = [0.0f64; 2];
    for (slot, derivative) in [(0usize, false), (1usize, true)] {
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            acc += integrate(|l| value(l, derivative), w[0], w[1], cfg)?.value;
        }
        out[slot] = scale * acc;
    }
    Ok((out[0], out[1]))
}

/// Mixture Φ(t, γ) = √(2/π)·∫_0^∞ Φ^λ(t, γ(t), θ^λ)·e^{−λ²/2} dλ over
/// the path prefix γ|[0, t], where θ^λ is the last time at or below λ.
pub fn phi_bar(path: &GridPath, i: usize) -> Result<f64> {
    Ok(phi_bar_pair_inner(path, i, 1e-9)?.0)
}

/// The same mixture built from ∂_y Φ^λ.
pub fn phidot_bar(path: &GridPath, i: usize) -> Result<f64> {
    Ok(phi_bar_pair_inner(path, i, 1e-9)?.1)
}

/// A path with its compensating drift removed step by step.
#[derive(Debug, Clone)]
pub struct CompensatedPath {
    pub path: GridPath,
    /// Left-point drift per grid step; NaN inside guard bands.
    pub drift: Vec<f64>,
    /// Martingale increments ΔV − drift·Δt on unguarded steps; NaN
    /// elsewhere.
    pub residual: Vec<f64>,
}

impl CompensatedPath {
    pub fn clean_steps(&self) -> usize {
        self.residual.iter().filter(|r| r.is_finite()).count()
    }

    pub fn clean_time(&self) -> f64 {
        self.clean_steps() as f64 * self.path.dt()
    }

    /// Sum of squared martingale increments over unguarded steps.
    pub fn quadratic_variation(&self) -> f64 {
        self.residual.iter().filter(|r| r.is_finite()).map(|r| r * r).sum()
    }

    /// Quadratic variation divided by the clean time; near 1 when the
    /// drift matches the law of the path.
    pub fn qv_ratio(&self) -> f64 {
        self.quadratic_variation() / self.clean_time()
    }
}

fn compensate(
    path: &GridPath,
    mut drift_at: impl FnMut(usize, f64, f64) -> Option<f64>,
) -> CompensatedPath {
    let n = path.steps();
    let dt = path.dt();
    let mut drift = vec![f64::NAN; n];
    let mut residual = vec![f64::NAN; n];
    for i in 0..n {
        let s = path.time_at(i);
        let v = path.values()[i];
        if s > 1.0 - TIME_GUARD {
            break;
        }
        if let Some(b) = drift_at(i, s, v) {
            drift[i] = b;
            residual[i] = path.values()[i + 1] - v - b * dt;
        }
    }
    CompensatedPath {
        path: path.clone(),
        drift,
        residual,
    }
}

/// Compensator of the shifted bridge with endpoint λ < 0: before the
/// first return to 0 the drift is 1/V − V·J̊/J; after it, the distance
/// V − λ follows a Bessel(3) bridge to 0, with drift
/// 1/(V−λ) − (V−λ)/(1−s).
pub fn compensator_bridge_neg(lambda: f64, path: &GridPath) -> Result<CompensatedPath> {
    if !(lambda < 0.0) {
        return Err(Error::invalid("compensator_bridge_neg: lambda must be negative"));
    }
    if (path.duration() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("compensator_bridge_neg: duration must be 1"));
    }
    let n = path.steps();
    let z_idx = first_hit(path, 0.0, 0).unwrap_or(n);
    let z = path.time_at(z_idx);
    let mut failure: Option<Error> = None;
    let out = compensate(path, |i, s, v| {
        if failure.is_some() || (s - z).abs() < TIME_GUARD {
            return None;
        }
        if i < z_idx {
            if v < STATE_GUARD {
                return None;
            }
            match j_neg_tol(lambda, s, v, 1e-7) {
                Ok((j, jring)) => Some(1.0 / v - v * jring / j),
                Err(e) => {
                    failure = Some(e);
                    None
                }
            }
        } else {
            let r = v - lambda;
            if r < STATE_GUARD {
                return None;
            }
            Some(1.0 / r - r / (1.0 - s))
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Compensator of the shifted bridge with endpoint λ > 0: drift
/// 1/V + (∂_yΦ^λ/Φ^λ)(s, V_s, θ̃_s), where θ̃_s is the running last
/// time at or below λ.
pub fn compensator_bridge_pos(lambda: f64, path: &GridPath) -> Result<CompensatedPath> {
    if !(lambda > 0.0) {
        return Err(Error::invalid("compensator_bridge_pos: lambda must be positive"));
    }
    if (path.duration() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("compensator_bridge_pos: duration must be 1"));
    }
    let mut theta_idx = 0usize;
    let mut failure: Option<Error> = None;
    let out = compensate(path, |i, s, v| {
        if v <= lambda {
            theta_idx = i;
        }
        if failure.is_some() || v < STATE_GUARD || (v - lambda).abs() < STATE_GUARD || s <= 0.0 {
            return None;
        }
        let theta = path.time_at(theta_idx);
        match (phi(lambda, s, v, theta), dphi(lambda, s, v, theta)) {
            (Ok(p), Ok(dp)) => Some(1.0 / v + dp / p),
            (Err(e), _) | (_, Err(e)) => {
                failure = Some(e);
                None
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Compensator of the shifted Brownian motion: before the first return
/// to 0 the drift is 1/V + (Φ̇ − V·J̊)/(Φ + J); after it the path runs
/// as a bridge above its running minimum M̃, with drift −(V − M̃)/(1−s).
///
/// The sign of the Φ̇ term follows from the change of measure: with
/// density D = (Φ + J)/(1 + J) against the mixed excursion/Bessel law
/// (whose own drift is 1/ξ − ξ·J̊/(1 + J)), the Girsanov correction is
/// d[log D, ξ]/dt = (Φ̇ − ξ·J̊)/(Φ + J) + ξ·J̊/(1 + J), and the 1+J
/// terms cancel.
pub fn compensator_vb(path: &GridPath) -> Result<CompensatedPath> {
    if (path.duration() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("compensator_vb: duration must be 1"));
    }
    let n = path.steps();
    let t0_idx = first_hit(path, 0.0, 0).unwrap_or(n);
    let t0 = path.time_at(t0_idx);
    let mut running_min = f64::INFINITY;
    let mut failure: Option<Error> = None;
    let out = compensate(path, |i, s, v| {
        running_min = running_min.min(v);
        if failure.is_some() || (s - t0).abs() < TIME_GUARD {
            return None;
        }
        if i < t0_idx {
            if v < STATE_GUARD || s <= 0.0 {
                return None;
            }
            let jj = j_vb_tol(s, v, 1e-7);
            let pp = phi_bar_pair_inner(path, i, 1e-7);
            match (jj, pp) {
                (Ok((j, jring)), Ok((p, pdot))) => {
                    Some(1.0 / v + (pdot - v * jring) / (p + j))
                }
                (Err(e), _) | (_, Err(e)) => {
                    failure = Some(e);
                    None
                }
            }
        } else {
            Some(-(v - running_min) / (1.0 - s))
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

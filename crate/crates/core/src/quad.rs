//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 15-point Kronrod rule with embedded 7-point Gauss rule drives an
//! adaptive bisection loop. Integrands with endpoint singularities are
//! expected to be substituted away by the caller; the laws and drift
//! modules document the substitutions they use.

use crate::error::{Error, Result};

// QUADPACK dqk15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Integration settings. `tol` is a relative tolerance with an absolute
/// floor of `tol * 1e-2` to keep near-zero integrals from looping.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            tol: 1e-8,
            max_subdivisions: 200,
        }
    }
}

impl Quadrature {
    pub fn with_tol(tol: f64) -> Self {
        Quadrature {
            tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: Quadrature) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("integrate: bounds must be finite"));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
        });
    }
    // (a, b, value, error), worst interval kept last for cheap pop.
    let (v0, e0) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v0, e0)];
    for _ in 0..cfg.max_subdivisions {
        let value: f64 = intervals.iter().map(|iv| iv.2).sum();
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        let target = (cfg.tol * value.abs()).max(cfg.tol * 1e-2);
        if error <= target {
            return Ok(QuadResult { value, error });
        }
        let (worst_idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = intervals.swap_remove(worst_idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval at floating-point resolution; accept what we have.
            let (v, e) = gk15(&f, lo, hi);
            let value: f64 = intervals.iter().map(|iv| iv.2).sum::<f64>() + v;
            let error: f64 = intervals.iter().map(|iv| iv.3).sum::<f64>() + e;
            return Ok(QuadResult { value, error });
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    let value: f64 = intervals.iter().map(|iv| iv.2).sum();
    let error: f64 = intervals.iter().map(|iv| iv.3).sum();
    if error <= cfg.tol.sqrt() * value.abs().max(1e-12) {
        // Slow convergence but still a usable estimate.
        return Ok(QuadResult { value, error });
    }
    Err(Error::Numeric(format!(
        "quadrature did not converge: value {value:.6e}, error {error:.3e}"
    )))
}

/// Integral of `f` over `[a, ∞)` via the substitution `x = a + u/(1-u)`.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, cfg: Quadrature) -> Result<QuadResult> {
    integrate(
        |u| {
            let one_minus = 1.0 - u;
            let x = a + u / one_minus;
            f(x) / (one_minus * one_minus)
        },
        0.0,
        1.0 - 1e-14,
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, Quadrature::default()).unwrap();
        // Antiderivative x^4/4 - x^2 + x evaluated: (81/4 - 9 + 3) - (1/4 - 1 - 1) = 16
        assert!((r.value - 16.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral() {
        let r = integrate(
            |x| (-0.5 * x * x).exp(),
            -10.0,
            10.0,
            Quadrature::default(),
        )
        .unwrap();
        assert!((r.value - (2.0 * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn oscillatory() {
        let r = integrate(|x| x.sin(), 0.0, PI, Quadrature::with_tol(1e-12)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-11);
    }

    #[test]
    fn semi_infinite_exponential() {
        let r = integrate_to_inf(|x| (-x).exp(), 0.0, Quadrature::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
        let r = integrate_to_inf(|x| (-0.5 * x * x).exp(), 1.0, Quadrature::default()).unwrap();
        assert!((r.value - crate::special::gauss_tail(1.0)).abs() < 1e-9);
    }

    #[test]
    fn empty_interval_is_zero() {
        let r = integrate(|x| x, 2.0, 2.0, Quadrature::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }
}

//! Path-level decompositions: building the shifted bridge (and the
//! shifted Brownian motion) from independent pieces glued at a sampled
//! split, and the direct constructions they must agree with in law.

use crate::error::{Error, Result};
use crate::grid::GridPath;
use crate::laws::{arcsine, fz, mean_z};
use crate::rng::RngStream;
use crate::sampler::{
    sample_bessel3_bridge, sample_bm, sample_bridge, sample_excursion, sample_fp_bridge,
    sample_meander,
};
use crate::transform::{first_hit, vervaat};

/// One decomposition draw: the assembled path together with the latent
/// scalars used (or measured) along the way.
#[derive(Debug, Clone)]
pub struct DecompSample {
    pub path: GridPath,
    /// Named latent variables, in draw order.
    pub latent: Vec<(&'static str, f64)>,
    /// Which construction produced the path.
    pub branch: &'static str,
    /// Proposals consumed by any rejection step (1 when there is none).
    pub attempts: u64,
}

impl DecompSample {
    pub fn latent(&self, name: &str) -> Option<f64> {
        self.latent
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
    }
}

fn check_steps(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::invalid("decomp: need at least 4 grid steps"));
    }
    Ok(())
}

// Split an n-interval budget proportionally to `frac`, keeping at
// least two intervals on each side.
fn split_budget(n: usize, frac: f64) -> (usize, usize) {
    let n1 = ((frac * n as f64).round() as usize).clamp(2, n - 2);
    (n1, n - n1)
}

/// Two-piece build of the shifted bridge with a negative endpoint:
/// a length-Z excursion followed by a first-passage bridge down to λ,
/// with Z drawn exactly as G²/(λ² + G²).
pub fn build_vervaat_bridge_neg(lambda: f64, n: usize, rng: &mut RngStream) -> Result<DecompSample> {
    if !(lambda < 0.0) {
        return Err(Error::invalid("build_vervaat_bridge_neg: lambda must be negative"));
    }
    check_steps(n)?;
    let z = fz(lambda)?.sample(rng)?;
    let (n1, n2) = split_budget(n, z);
    // Snap the junction onto the global grid so both piece grids align
    // with it and the concatenation keeps every increment exactly.
    let zg = n1 as f64 / n as f64;
    let exc = sample_excursion(n1, zg, rng)?;
    let fp = sample_fp_bridge(n2, 1.0 - zg, lambda, rng)?;
    let path = exc.concat(&fp, n)?;
    Ok(DecompSample {
        path,
        latent: vec![("z", z)],
        branch: "neg",
        attempts: 1,
    })
}

/// Two-piece build of the shifted bridge with a positive endpoint: a
/// positive bridge from 0 up to λ on [0, Ẑ], then an excursion above
/// level λ. Ẑ = λ²/(λ² + G²), the time reversal of the negative case.
pub fn build_vervaat_bridge_pos(lambda: f64, n: usize, rng: &mut RngStream) -> Result<DecompSample> {
    if !(lambda > 0.0) {
        return Err(Error::invalid("build_vervaat_bridge_pos: lambda must be positive"));
    }
    check_steps(n)?;
    let g = rng.normal();
    let zhat = lambda * lambda / (lambda * lambda + g * g);
    let (n1, n2) = split_budget(n, zhat);
    let zg = n1 as f64 / n as f64;
    let first = sample_bessel3_bridge(n1, zg, 0.0, lambda, rng)?;
    let exc = sample_excursion(n2, 1.0 - zg, rng)?;
    let mut lifted = exc.values().to_vec();
    for v in &mut lifted {
        *v += lambda;
    }
    let second = GridPath::new(1.0 - zg, lifted)?;
    let path = first.concat(&second, n)?;
    Ok(DecompSample {
        path,
        latent: vec![("zhat", zhat)],
        branch: "pos",
        attempts: 1,
    })
}

/// Reference construction: sample a bridge to λ and apply the shift to
/// the first minimum. Records the split time and the grid-measured
/// first-return split of the transformed path.
pub fn direct_vervaat_bridge(lambda: f64, n: usize, rng: &mut RngStream) -> Result<DecompSample> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::invalid("direct_vervaat_bridge: lambda must be nonzero"));
    }
    check_steps(n)?;
    let bridge = sample_bridge(n, 1.0, lambda, rng)?;
    let r = vervaat(&bridge)?;
    let mut latent = vec![("a", r.split_time)];
    if lambda < 0.0 {
        // First return of the transformed path to level 0.
        if let Some(i) = first_hit(&r.path, 0.0, 0) {
            latent.push(("z", r.path.time_at(i)));
        }
    } else {
        // Last time at or below λ before the terminal excursion.
        let vs = r.path.values();
        if let Some(i) = (1..n).rev().find(|&i| vs[i] <= lambda) {
            latent.push(("zhat", r.path.time_at(i)));
        }
    }
    Ok(DecompSample {
        path: r.path,
        latent,
        branch: "direct",
        attempts: 1,
    })
}

/// Two-meander build of the shifted Brownian motion: with A arcsine,
/// run one meander forward on [0, A] and an independent one backward on
/// [A, 1]. Writing m₁ (length A) and m₂ (length 1−A), the path is
/// m₁(t) on [0, A] and m₁(A) + m₂(1−t) − m₂(1−A) on [A, 1], which is
/// continuous at A and ends at m₁(A) − m₂(1−A).
pub fn build_vb(n: usize, rng: &mut RngStream) -> Result<DecompSample> {
    check_steps(n)?;
    let a = arcsine().sample(rng)?;
    let (n1, n2) = split_budget(n, a);
    let ag = n1 as f64 / n as f64;
    let m1 = sample_meander(n1, ag, rng)?;
    let m2 = sample_meander(n2, 1.0 - ag, rng)?;
    let offset = m1.end() - m2.end();
    let mut back: Vec<f64> = m2.values().iter().rev().map(|&v| v + offset).collect();
    back[0] = m1.end();
    let second = GridPath::new(1.0 - ag, back)?;
    let path = m1.concat(&second, n)?;
    Ok(DecompSample {
        path,
        latent: vec![("a", a)],
        branch: "meanders",
        attempts: 1,
    })
}

/// Reference construction: sample Brownian motion and apply the shift
/// to the first minimum. Records the split time and, when the path
/// returns to 0, the first-return time.
pub fn direct_vb(n: usize, rng: &mut RngStream) -> Result<DecompSample> {
    check_steps(n)?;
    let bm = sample_bm(n, 1.0, rng)?;
    let r = vervaat(&bm)?;
    let mut latent = vec![("a", r.split_time)];
    if let Some(i) = first_hit(&r.path, 0.0, 0) {
        latent.push(("t0", r.path.time_at(i)));
    }
    Ok(DecompSample {
        path: r.path,
        latent,
        branch: "direct",
        attempts: 1,
    })
}

/// Shifted bridge to λ < 0 conditioned to stay strictly above the
/// chord t ↦ λt, by rejection over transformed bridge proposals. The
/// acceptance rate equals the mean of the first-return split law.
/// Fails with a resource-limit error when no proposal is accepted
/// within `max_attempts`.
pub fn conditioned_above_line(
    lambda: f64,
    n: usize,
    max_attempts: u64,
    rng: &mut RngStream,
) -> Result<DecompSample> {
    if !(lambda < 0.0) {
        return Err(Error::invalid("conditioned_above_line: lambda must be negative"));
    }
    check_steps(n)?;
    if max_attempts == 0 {
        return Err(Error::invalid("conditioned_above_line: max_attempts must be positive"));
    }
    for attempt in 1..=max_attempts {
        let p = vervaat(&sample_bridge(n, 1.0, lambda, rng)?)?.path;
        let above = (1..n).all(|i| p.values()[i] > lambda * p.time_at(i));
        if above {
            return Ok(DecompSample {
                path: p,
                latent: vec![],
                branch: "above-line",
                attempts: attempt,
            });
        }
    }
    Err(Error::ResourceLimit(format!(
        "conditioned_above_line: no acceptance in {max_attempts} attempts \
         (expected rate {:.3e})",
        mean_z(lambda).unwrap_or(f64::NAN)
    )))
}

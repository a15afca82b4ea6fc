//! Simple ±1 walks: discrete Vervaat and quantile transforms, the
//! (V, K) bijection, exact first-return laws and exhaustive-enumeration
//! checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::grid::GridPath;
use crate::stats::TestReport;

/// Largest walk length accepted by the exhaustive verifiers.
pub const MAX_ENUM_LEN: usize = 16;

/// A lattice path of ±1 increments started at 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Walk {
    increments: Vec<i8>,
}

impl Walk {
    pub fn from_increments(increments: Vec<i8>) -> Result<Self> {
        if increments.is_empty() {
            return Err(Error::invalid("Walk: length must be at least 1"));
        }
        if increments.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::invalid("Walk: every increment must be +1 or -1"));
        }
        Ok(Walk { increments })
    }

    /// Walk number `code` of length `n`: bit `j` of the counter set
    /// means step `+1` at position `j` (lowest bit = first step).
    pub fn from_code(n: usize, code: u64) -> Self {
        let increments = (0..n)
            .map(|j| if code >> j & 1 == 1 { 1 } else { -1 })
            .collect();
        Walk { increments }
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn increments(&self) -> &[i8] {
        &self.increments
    }

    /// Positions w(0)=0, w(1), ..., w(n).
    pub fn positions(&self) -> Vec<i64> {
        let mut pos = Vec::with_capacity(self.len() + 1);
        let mut p = 0i64;
        pos.push(p);
        for &s in &self.increments {
            p += s as i64;
            pos.push(p);
        }
        pos
    }

    pub fn end(&self) -> i64 {
        self.increments.iter().map(|&s| s as i64).sum()
    }

    /// First index attaining the global minimum of the positions.
    pub fn argmin_first(&self) -> usize {
        let pos = self.positions();
        let mut best = 0usize;
        for (j, &p) in pos.iter().enumerate() {
            if p < pos[best] {
                best = j;
            }
        }
        best
    }

    /// First index `j >= 1` with position equal to `level`, if any.
    pub fn first_hit(&self, level: i64) -> Option<usize> {
        let mut p = 0i64;
        for (j, &s) in self.increments.iter().enumerate() {
            p += s as i64;
            if p == level {
                return Some(j + 1);
            }
        }
        None
    }

    /// Step-interpolated embedding on the integer time grid.
    pub fn to_grid_path(&self) -> GridPath {
        let values = self.positions().iter().map(|&p| p as f64).collect();
        GridPath::new(self.len() as f64, values).expect("walk positions are finite")
    }
}

/// A pmf on integers with exact rational masses.
#[derive(Debug, Clone)]
pub struct ExactPmf {
    support: Vec<i64>,
    masses: Vec<BigRational>,
}

impl ExactPmf {
    fn new(mut entries: Vec<(i64, BigRational)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        let total: BigRational = entries.iter().map(|e| e.1.clone()).sum();
        if entries.iter().any(|e| e.1.is_negative()) {
            return Err(Error::Numeric("ExactPmf: negative mass".into()));
        }
        if !total.is_one() {
            return Err(Error::Numeric(format!("ExactPmf: total mass {total} != 1")));
        }
        let (support, masses) = entries.into_iter().unzip();
        Ok(ExactPmf { support, masses })
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn masses(&self) -> &[BigRational] {
        &self.masses
    }

    pub fn mass_at(&self, x: i64) -> BigRational {
        match self.support.binary_search(&x) {
            Ok(i) => self.masses[i].clone(),
            Err(_) => BigRational::zero(),
        }
    }

    pub fn mass_at_f64(&self, x: i64) -> f64 {
        self.mass_at(x).to_f64().unwrap_or(0.0)
    }

    /// `(support, mass)` pairs as floats, in increasing support order.
    pub fn to_f64(&self) -> Vec<(i64, f64)> {
        self.support
            .iter()
            .zip(&self.masses)
            .map(|(&x, m)| (x, m.to_f64().unwrap_or(0.0)))
            .collect()
    }
}

fn big_binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

fn check_bridge_args(n: usize, a: i64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("bridge: n must be positive"));
    }
    if a.unsigned_abs() as usize > n {
        return Err(Error::invalid(format!("bridge: |a| = {} > n = {n}", a.abs())));
    }
    if (n as i64 - a) % 2 != 0 {
        return Err(Error::invalid(format!("bridge: a = {a} and n = {n} differ in parity")));
    }
    Ok(())
}

fn check_enum_len(n: usize) -> Result<()> {
    if n > MAX_ENUM_LEN {
        return Err(Error::ResourceLimit(format!(
            "exhaustive enumeration guarded at n <= {MAX_ENUM_LEN}, got {n}"
        )));
    }
    Ok(())
}

/// All simple bridges of length `n` ending at `a`, in counter order.
pub fn enumerate_bridges(n: usize, a: i64) -> Result<Vec<Walk>> {
    check_bridge_args(n, a)?;
    check_enum_len(n)?;
    let ups = ((n as i64 + a) / 2) as u32;
    let mut out = Vec::new();
    for code in 0u64..1 << n {
        if code.count_ones() == ups {
            out.push(Walk::from_code(n, code));
        }
    }
    Ok(out)
}

/// All simple walks of length `n`, in counter order.
pub fn enumerate_walks(n: usize) -> Result<Vec<Walk>> {
    check_enum_len(n)?;
    Ok((0u64..1 << n).map(|code| Walk::from_code(n, code)).collect())
}

/// Discrete Vervaat transform: cyclically rotate the increments so the
/// path starts at its first global minimum. Returns `(V(w), K(w))`
/// where `K(w) = n - τ_V`.
pub fn vervaat_walk(w: &Walk) -> (Walk, usize) {
    let tau = w.argmin_first();
    let n = w.len();
    let mut increments = Vec::with_capacity(n);
    increments.extend_from_slice(&w.increments()[tau..]);
    increments.extend_from_slice(&w.increments()[..tau]);
    (Walk { increments }, n - tau)
}

/// Discrete quantile transform: reorder increments by the level at
/// which they occur, ties broken by original position (a stable sort on
/// the starting level).
pub fn quantile_walk(w: &Walk) -> Walk {
    let pos = w.positions();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by_key(|&j| pos[j]);
    let increments = order.iter().map(|&j| w.increments()[j]).collect();
    Walk { increments }
}

/// Exact number of first passage bridges of length `l` through level -1:
/// walks whose first visit to -1 happens at time `l`.
pub fn count_first_passage(l: u64) -> Result<BigInt> {
    if l % 2 == 0 {
        return Err(Error::invalid("count_first_passage: l must be odd"));
    }
    Ok(big_binomial(l, (l + 1) / 2) / BigInt::from(l))
}

// Number of first passage bridges of length m from -1 down to a < -1:
// (|a|-1)/m * C(m, (m+|a|-1)/2). Used by the closed-form first-return pmf.
fn count_fp_to(m: u64, abs_a: u64) -> BigRational {
    if m == 0 {
        return if abs_a == 1 {
            BigRational::one()
        } else {
            BigRational::zero()
        };
    }
    let k = (m + abs_a - 1) / 2;
    BigRational::new(
        BigInt::from(abs_a - 1) * big_binomial(m, k),
        BigInt::from(m),
    )
}

/// Exact law of the first index at which the Vervaat transform of a
/// uniform bridge to `a < 0` hits -1, from the closed path-counting
/// formula in exact arithmetic.
pub fn z_pmf(n: usize, a: i64) -> Result<ExactPmf> {
    check_bridge_args(n, a)?;
    if a >= 0 {
        return Err(Error::invalid("z_pmf: endpoint a must be negative"));
    }
    let abs_a = a.unsigned_abs();
    let total = big_binomial(n as u64, (n as u64 + abs_a) / 2);
    if abs_a == 1 {
        // The path stays above -1 before its final step, so the first
        // visit to -1 is forced to time n.
        return ExactPmf::new(vec![(n as i64, BigRational::one())]);
    }
    let mut entries = Vec::new();
    let mut l = 1u64;
    while l + abs_a - 1 <= n as u64 {
        let m = n as u64 - l;
        // Each transformed path with first visit at l is reached from
        // exactly l distinct bridges, which cancels the 1/l in the
        // first-passage path count.
        let first = BigRational::from(big_binomial(l, (l + 1) / 2));
        let mass = first * count_fp_to(m, abs_a) / BigRational::from(total.clone());
        if !mass.is_zero() {
            entries.push((l as i64, mass));
        }
        l += 2;
    }
    ExactPmf::new(entries)
}

/// Empirical first-return pmf over exhaustive bridge enumeration, for
/// cross-checking `z_pmf` exactly.
pub fn z_pmf_enumerated(n: usize, a: i64) -> Result<ExactPmf> {
    if a >= 0 {
        return Err(Error::invalid("z_pmf_enumerated: endpoint a must be negative"));
    }
    let bridges = enumerate_bridges(n, a)?;
    let total = BigInt::from(bridges.len() as u64);
    let mut counts: std::collections::BTreeMap<i64, u64> = Default::default();
    for w in &bridges {
        let (v, _) = vervaat_walk(w);
        let z = v
            .first_hit(-1)
            .expect("Vervaat transform of a bridge to a < 0 reaches -1");
        *counts.entry(z as i64).or_default() += 1;
    }
    ExactPmf::new(
        counts
            .into_iter()
            .map(|(z, c)| (z, BigRational::new(BigInt::from(c), total.clone())))
            .collect(),
    )
}

// Membership in the structure set: v(j) >= 0 for j <= k, v(j) > a for
// k <= j < n, v(n) = a.
fn in_image_set(v: &Walk, k: usize, a: i64) -> bool {
    let pos = v.positions();
    let n = v.len();
    if pos[n] != a {
        return false;
    }
    pos.iter().take(k + 1).all(|&p| p >= 0) && pos.iter().take(n).skip(k).all(|&p| p > a)
}

/// Exhaustively check that `w -> (V(w), K(w))` is a bijection from
/// bridges ending at `a < 0` onto the structure set of pairs `(v, k)`.
pub fn verify_bijection(n: usize, a: i64) -> Result<TestReport> {
    if a >= 0 {
        return Err(Error::invalid("verify_bijection: endpoint a must be negative"));
    }
    let bridges = enumerate_bridges(n, a)?;
    let mut image = std::collections::BTreeSet::new();
    for w in &bridges {
        let (v, k) = vervaat_walk(w);
        if !in_image_set(&v, k, a) {
            return Ok(TestReport::exact(
                format!("bijection({n},{a})"),
                false,
                format!("image pair outside the structure set: {v:?}, k={k}"),
            ));
        }
        if !image.insert((v, k)) {
            return Ok(TestReport::exact(
                format!("bijection({n},{a})"),
                false,
                "mapping is not injective".to_string(),
            ));
        }
    }
    // Surjectivity: every (v, k) in the structure set must be hit.
    let mut set_size = 0usize;
    for v in enumerate_bridges(n, a)? {
        for k in 0..=n {
            if in_image_set(&v, k, a) {
                set_size += 1;
                if !image.contains(&(v.clone(), k)) {
                    return Ok(TestReport::exact(
                        format!("bijection({n},{a})"),
                        false,
                        format!("structure pair not attained: {v:?}, k={k}"),
                    ));
                }
            }
        }
    }
    let pass = set_size == bridges.len();
    Ok(TestReport::exact(
        format!("bijection({n},{a})"),
        pass,
        format!("{} bridges, {} structure pairs", bridges.len(), set_size),
    ))
}

/// Exhaustively check that, for each distinct Vervaat image `v` with
/// first -1-visit `Z`, the helper values `K` over its preimages form
/// exactly `{0, 1, ..., Z-1}`.
pub fn verify_helper_uniform(n: usize, a: i64) -> Result<TestReport> {
    if a >= 0 {
        return Err(Error::invalid("verify_helper_uniform: endpoint a must be negative"));
    }
    let bridges = enumerate_bridges(n, a)?;
    let mut by_image: std::collections::BTreeMap<Walk, Vec<usize>> = Default::default();
    for w in &bridges {
        let (v, k) = vervaat_walk(w);
        by_image.entry(v).or_default().push(k);
    }
    for (v, mut ks) in by_image {
        let z = v
            .first_hit(-1)
            .expect("Vervaat transform of a bridge to a < 0 reaches -1");
        ks.sort_unstable();
        let expected: Vec<usize> = (0..z).collect();
        if ks != expected {
            return Ok(TestReport::exact(
                format!("helper-uniform({n},{a})"),
                false,
                format!("image {v:?}: helper set {ks:?}, expected 0..{z}"),
            ));
        }
    }
    Ok(TestReport::exact(
        format!("helper-uniform({n},{a})"),
        true,
        format!("{} bridges grouped", bridges.len()),
    ))
}

/// Exhaustively compare the multisets `{Q(w)}` and `{V(w)}` over all
/// walks of length `n`, both unconditionally and per fixed endpoint.
pub fn verify_q_equals_v(n: usize) -> Result<TestReport> {
    if n > 14 {
        return Err(Error::ResourceLimit(format!(
            "verify_q_equals_v guarded at n <= 14, got {n}"
        )));
    }
    let walks = enumerate_walks(n)?;
    let mut qs: Vec<Walk> = walks.iter().map(quantile_walk).collect();
    let mut vs: Vec<Walk> = walks.iter().map(|w| vervaat_walk(w).0).collect();
    qs.sort();
    vs.sort();
    if qs != vs {
        return Ok(TestReport::exact(
            format!("q-equals-v({n})"),
            false,
            "unconditional multisets differ".to_string(),
        ));
    }
    // Per endpoint: both transforms preserve the endpoint, so the
    // sorted comparison above already interleaves endpoints; check each
    // endpoint class explicitly anyway.
    let mut per_endpoint_equal = true;
    let mut a = -(n as i64);
    while a <= n as i64 {
        let mut qa: Vec<&Walk> = qs.iter().filter(|w| w.end() == a).collect();
        let mut va: Vec<&Walk> = vs.iter().filter(|w| w.end() == a).collect();
        qa.sort();
        va.sort();
        if qa != va {
            per_endpoint_equal = false;
        }
        a += 2;
    }
    Ok(TestReport::exact(
        format!("q-equals-v({n})"),
        per_endpoint_equal,
        format!(
            "2^{n} walks; per-endpoint classes {}",
            if per_endpoint_equal { "all equal" } else { "differ" }
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walk(steps: &[i8]) -> Walk {
        Walk::from_increments(steps.to_vec()).unwrap()
    }

    #[test]
    fn walk_invariants() {
        assert!(Walk::from_increments(vec![]).is_err());
        assert!(Walk::from_increments(vec![2]).is_err());
        let w = walk(&[1, -1, -1]);
        assert_eq!(w.positions(), vec![0, 1, 0, -1]);
        // Position parity: w(j) ≡ j (mod 2).
        for (j, p) in w.positions().iter().enumerate() {
            assert_eq!(p.rem_euclid(2), (j as i64).rem_euclid(2));
        }
    }

    #[test]
    fn enumerate_bridges_counts() {
        // Forced monotone walk.
        let b = enumerate_bridges(2, -2).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].increments(), &[-1, -1]);
        // C(3, 2) = 3 and exhaustive count 4 at (4, -2).
        assert_eq!(enumerate_bridges(3, -1).unwrap().len(), 3);
        assert_eq!(enumerate_bridges(4, -2).unwrap().len(), 4);
        // All end at a, no duplicates.
        let b = enumerate_bridges(6, -2).unwrap();
        assert!(b.iter().all(|w| w.end() == -2));
        let set: std::collections::BTreeSet<_> = b.iter().collect();
        assert_eq!(set.len(), b.len());
    }

    #[test]
    fn enumerate_bridges_rejects_bad_args() {
        assert!(matches!(enumerate_bridges(3, -2), Err(Error::InvalidArgument(_))));
        assert!(matches!(enumerate_bridges(3, -5), Err(Error::InvalidArgument(_))));
        assert!(matches!(enumerate_bridges(20, -2), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn vervaat_walk_examples() {
        // Monotone walk is fixed with k = 0.
        let (v, k) = vervaat_walk(&walk(&[-1, -1]));
        assert_eq!(v.increments(), &[-1, -1]);
        assert_eq!(k, 0);
        // Path 0,-1,0 rotates to 0,1,0.
        let (v, k) = vervaat_walk(&walk(&[-1, 1]));
        assert_eq!(v.positions(), vec![0, 1, 0]);
        assert_eq!(k, 1);
        // Path 0,-1,-2,-1,-2 (first min at index 2) rotates to 0,1,0,-1,-2.
        let (v, k) = vervaat_walk(&walk(&[-1, -1, 1, -1]));
        assert_eq!(v.positions(), vec![0, 1, 0, -1, -2]);
        assert_eq!(k, 2);
    }

    #[test]
    fn vervaat_image_set_membership() {
        for &(n, a) in &[(4i64, -2i64), (6, -2), (5, -1), (6, -4)] {
            for w in enumerate_bridges(n as usize, a).unwrap() {
                let (v, k) = vervaat_walk(&w);
                assert!(in_image_set(&v, k, a), "failed for {w:?}");
                // Endpoint preserved, path strictly above a before n.
                let pos = v.positions();
                assert_eq!(pos[n as usize], a);
                assert!(pos.iter().take(n as usize).all(|&p| p > a));
            }
        }
    }

    #[test]
    fn vervaat_fixes_walks_minimal_at_end() {
        for w in enumerate_walks(8).unwrap() {
            if w.argmin_first() == w.len() {
                let (v, k) = vervaat_walk(&w);
                assert_eq!(v, w);
                assert_eq!(k, 0);
                let (vv, _) = vervaat_walk(&v);
                assert_eq!(vv, w);
            }
        }
    }

    #[test]
    fn quantile_walk_examples() {
        assert_eq!(quantile_walk(&walk(&[1, 1])).increments(), &[1, 1]);
        assert_eq!(quantile_walk(&walk(&[-1, 1])).positions(), vec![0, 1, 0]);
        assert_eq!(quantile_walk(&walk(&[-1, -1])).increments(), &[-1, -1]);
    }

    #[test]
    fn z_pmf_examples() {
        let p = z_pmf(2, -2).unwrap();
        assert_eq!(p.to_f64(), vec![(1, 1.0)]);
        let p = z_pmf(4, -2).unwrap();
        assert_eq!(p.mass_at_f64(1), 0.25);
        assert_eq!(p.mass_at_f64(3), 0.75);
        // a = -1: forced to n.
        let p = z_pmf(5, -1).unwrap();
        assert_eq!(p.to_f64(), vec![(5, 1.0)]);
    }

    #[test]
    fn z_pmf_matches_enumeration_exactly() {
        for n in 2..=14usize {
            let mut a = -1i64;
            while a.unsigned_abs() as usize <= n {
                if (n as i64 - a) % 2 == 0 {
                    let formula = z_pmf(n, a).unwrap();
                    let enumerated = z_pmf_enumerated(n, a).unwrap();
                    assert_eq!(formula.support(), enumerated.support(), "(n,a)=({n},{a})");
                    assert_eq!(formula.masses(), enumerated.masses(), "(n,a)=({n},{a})");
                }
                a -= 1;
            }
        }
    }

    #[test]
    fn count_first_passage_examples() {
        assert_eq!(count_first_passage(1).unwrap(), BigInt::from(1));
        assert_eq!(count_first_passage(3).unwrap(), BigInt::from(1));
        assert_eq!(count_first_passage(5).unwrap(), BigInt::from(2));
        assert!(count_first_passage(4).is_err());
    }

    #[test]
    fn count_first_passage_matches_brute_force() {
        for l in (1u64..=15).step_by(2) {
            let mut count = 0u64;
            for w in enumerate_walks(l as usize).unwrap() {
                if w.first_hit(-1) == Some(l as usize) {
                    count += 1;
                }
            }
            assert_eq!(count_first_passage(l).unwrap(), BigInt::from(count), "l={l}");
        }
    }

    #[test]
    fn bijection_examples() {
        assert!(verify_bijection(4, -2).unwrap().pass);
        assert!(verify_bijection(6, -2).unwrap().pass);
        assert!(verify_bijection(5, -1).unwrap().pass);
    }

    #[test]
    fn helper_uniform_examples() {
        assert!(verify_helper_uniform(4, -2).unwrap().pass);
        assert!(verify_helper_uniform(2, -2).unwrap().pass);
        assert!(verify_helper_uniform(6, -2).unwrap().pass);
    }

    #[test]
    fn helper_uniform_specific_image() {
        // The image path 0,1,0,-1,-2 at (4,-2) has exactly 3 preimages
        // with helper values {0, 1, 2}.
        let bridges = enumerate_bridges(4, -2).unwrap();
        let target = walk(&[1, -1, -1, -1]);
        let mut ks: Vec<usize> = bridges
            .iter()
            .map(vervaat_walk)
            .filter(|(v, _)| *v == target)
            .map(|(_, k)| k)
            .collect();
        ks.sort_unstable();
        assert_eq!(ks, vec![0, 1, 2]);
    }

    #[test]
    fn q_equals_v_small() {
        assert!(verify_q_equals_v(1).unwrap().pass);
        assert!(verify_q_equals_v(2).unwrap().pass);
        assert!(verify_q_equals_v(10).unwrap().pass);
        assert!(verify_q_equals_v(15).is_err());
    }
}

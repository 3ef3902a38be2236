//! Poincaré polynomials and point counts of finite flag varieties.

pub mod brute;
pub mod poly;
pub mod weyl;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::flag::{FiniteFlagVariety, LieType};

pub use brute::brute_force_count;
pub use poly::QPolynomial;
pub use weyl::{SignedPermutation, WeylType};

pub const DEFAULT_MAX_RANK: u64 = 8;

/// Enumeration bound, from `FLAGISO_MAX_RANK` when set.
pub fn max_rank() -> u64 {
    std::env::var("FLAGISO_MAX_RANK")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_RANK)
}

/// Weyl group type, number of positions and the nodes generating the
/// parabolic subgroup that stabilizes a standard flag of shape `v`.
pub fn parabolic(v: &FiniteFlagVariety) -> (WeylType, usize, Vec<usize>) {
    match v.lie_type {
        LieType::A => {
            let n = v.ambient as usize;
            let j = (1..n).filter(|i| !v.dims.contains(&(*i as u64))).collect();
            (WeylType::A, n, j)
        }
        t => {
            let m = v.half_rank() as usize;
            let wt = if t == LieType::D { WeylType::D } else { WeylType::B };
            // dimension d < m sits at node m - d, a Lagrangian at node 0
            let removed: Vec<usize> = v
                .dims
                .iter()
                .map(|&d| if d as usize == m { 0 } else { m - d as usize })
                .collect();
            let j = weyl::nodes(wt, m)
                .into_iter()
                .filter(|s| !removed.contains(s))
                .collect();
            (wt, m, j)
        }
    }
}

fn check(v: &FiniteFlagVariety) -> Result<()> {
    v.validate().map_err(Error::Invalid)?;
    let limit = max_rank();
    if v.rank() > limit {
        return Err(Error::Resource(format!(
            "{v} has rank {} above the enumeration bound {limit} (FLAGISO_MAX_RANK)",
            v.rank()
        )));
    }
    Ok(())
}

/// Minimal-length coset representatives for `v`.
pub fn coset_representatives(v: &FiniteFlagVariety) -> Result<Vec<SignedPermutation>> {
    check(v)?;
    let (t, n, j) = parabolic(v);
    let mut out = Vec::new();
    weyl::for_each_min_coset_rep(t, n, &j, |w| out.push(w.clone()));
    Ok(out)
}

/// `Σ q^ℓ(w)` over minimal coset representatives. For type D with a
/// Lagrangian member this is one of the two isomorphic components.
pub fn poincare_polynomial(v: &FiniteFlagVariety) -> Result<QPolynomial> {
    check(v)?;
    let (t, n, j) = parabolic(v);
    let mut counts: Vec<u64> = Vec::new();
    weyl::for_each_min_coset_rep(t, n, &j, |w| {
        let l = w.length(t) as usize;
        if counts.len() <= l {
            counts.resize(l + 1, 0);
        }
        counts[l] += 1;
    });
    Ok(QPolynomial::from_u64(&counts))
}

fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap();
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
    }
    r == 1
}

pub fn point_count(v: &FiniteFlagVariety, q: u64) -> Result<BigUint> {
    if !is_prime_power(q) {
        return Err(Error::Domain(format!("q = {q} is not a prime power")));
    }
    Ok(poincare_polynomial(v)?.eval_u64(q))
}

pub fn dimension(v: &FiniteFlagVariety) -> Result<u64> {
    Ok(poincare_polynomial(v)?.degree().unwrap_or(0) as u64)
}

/// `Σ_{i<j} m_i m_j` over the gaps of a type A flag.
pub fn type_a_dimension(ambient: u64, dims: &[u64]) -> u64 {
    let mut gaps = Vec::new();
    let mut prev = 0;
    for &d in dims.iter().chain(std::iter::once(&ambient)) {
        gaps.push(d - prev);
        prev = d;
    }
    let mut s = 0;
    for i in 0..gaps.len() {
        for j in i + 1..gaps.len() {
            s += gaps[i] * gaps[j];
        }
    }
    s
}

//! Ground-truth point counts by enumerating flags over `F_q` directly.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::flag::{FiniteFlagVariety, LieType};
use crate::linalg::{Field, Form, FormKind, Matrix, PrimeField, Subspace};

pub const MAX_BRUTE_AMBIENT: u64 = 6;

/// Calls `visit` with the RREF basis of every `k`-dimensional subspace of
/// `F_q^n`.
pub fn for_each_subspace(
    f: &PrimeField,
    n: usize,
    k: usize,
    mut visit: impl FnMut(&Matrix<PrimeField>),
) {
    let mut pivots = Vec::with_capacity(k);
    fn choose(
        f: &PrimeField,
        n: usize,
        k: usize,
        start: usize,
        pivots: &mut Vec<usize>,
        visit: &mut dyn FnMut(&Matrix<PrimeField>),
    ) {
        if pivots.len() == k {
            fill(f, n, pivots, visit);
            return;
        }
        for c in start..n {
            if n - c < k - pivots.len() {
                break;
            }
            pivots.push(c);
            choose(f, n, k, c + 1, pivots, visit);
            pivots.pop();
        }
    }
    fn fill(
        f: &PrimeField,
        n: usize,
        pivots: &[usize],
        visit: &mut dyn FnMut(&Matrix<PrimeField>),
    ) {
        let mut m = Matrix::zeros(f, pivots.len(), n);
        let mut free = Vec::new();
        for (r, &p) in pivots.iter().enumerate() {
            m.set(r, p, 1);
            for c in p + 1..n {
                if !pivots.contains(&c) {
                    free.push((r, c));
                }
            }
        }
        let q = f.p();
        let total = q.pow(free.len() as u32);
        for code in 0..total {
            let mut x = code;
            for &(r, c) in &free {
                m.set(r, c, x % q);
                x /= q;
            }
            visit(&m);
        }
    }
    choose(f, n, k, 0, &mut pivots, &mut visit);
}

/// `dim(L ∩ ⟨e_1, ..., e_m⟩)` for a subspace of `F^(2m)`.
pub fn reference_intersection_dim<F: Field>(l: &Subspace<F>, m: usize) -> usize {
    let n = l.ambient();
    let tail: Vec<usize> = (m..n).collect();
    l.dim() - l.basis().select_cols(&tail).rank()
}

fn default_form(v: &FiniteFlagVariety, f: &PrimeField) -> Result<Option<Form<PrimeField>>> {
    let n = v.ambient as usize;
    Ok(match v.lie_type {
        LieType::A => None,
        LieType::C => Some(Form::standard(f, FormKind::Symplectic, n)?),
        LieType::B | LieType::D => Some(Form::standard(f, FormKind::Orthogonal, n)?),
    })
}

/// Number of `F_q`-points of `v` counted flag by flag, isotropic with
/// respect to `form` (the standard split form when `None`). For type D with
/// a Lagrangian member only Lagrangians `L` with
/// `dim(L ∩ ⟨e_1..e_m⟩) ≡ m (mod 2)` are counted.
pub fn brute_force_count(
    v: &FiniteFlagVariety,
    q: u64,
    form: Option<&Form<PrimeField>>,
) -> Result<BigUint> {
    v.validate().map_err(Error::Invalid)?;
    if v.ambient > MAX_BRUTE_AMBIENT {
        return Err(Error::Resource(format!(
            "brute-force enumeration is limited to ambient dimension {MAX_BRUTE_AMBIENT}"
        )));
    }
    if q != 2 && q != 3 {
        return Err(Error::Domain(format!("brute-force oracle needs q in {{2, 3}}, got {q}")));
    }
    if v.lie_type == LieType::B && q == 2 {
        return Err(Error::Domain("type B oracle needs odd q".into()));
    }
    let f = PrimeField::new(q)?;
    let owned;
    let form = match form {
        Some(g) => Some(g),
        None => {
            owned = default_form(v, &f)?;
            owned.as_ref()
        }
    };
    let n = v.ambient as usize;
    let m = v.half_rank() as usize;
    if let (LieType::D, Some(g)) = (v.lie_type, form) {
        let reference = Matrix::unit_rows(&f, n, &(0..m).collect::<Vec<_>>());
        if v.dims.contains(&(m as u64)) && g.check_isotropic(&reference).is_err() {
            return Err(Error::Domain(
                "component selection needs <e_1..e_m> to be Lagrangian for the given form".into(),
            ));
        }
    }
    let dims: Vec<usize> = v.dims.iter().map(|&d| d as usize).collect();
    let mut count = 0u64;
    extend(
        &f,
        form,
        v.lie_type,
        m,
        &dims,
        &Subspace::zero(&f, n),
        &mut count,
    );
    Ok(BigUint::from(count))
}

fn extend(
    f: &PrimeField,
    form: Option<&Form<PrimeField>>,
    t: LieType,
    m: usize,
    dims: &[usize],
    current: &Subspace<PrimeField>,
    count: &mut u64,
) {
    let Some((&next, rest)) = dims.split_first() else {
        *count += 1;
        return;
    };
    let n = current.ambient();
    let comp = current.complement_indices();
    let lift = Matrix::unit_rows(f, n, &comp);
    for_each_subspace(f, comp.len(), next - current.dim(), |b| {
        let lifted = b.mul(&lift).expect("shapes");
        let s = Subspace::span(&current.basis().vstack(&lifted).expect("shapes"));
        if let Some(g) = form {
            if !g.is_isotropic(&s) {
                return;
            }
        }
        if t == LieType::D && next == m && reference_intersection_dim(&s, m) % 2 != m % 2 {
            return;
        }
        extend(f, form, t, m, rest, &s, count);
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(t: LieType, n: u64, dims: &[u64]) -> FiniteFlagVariety {
        FiniteFlagVariety::new(t, n, dims.to_vec()).unwrap()
    }

    fn bf(t: LieType, n: u64, dims: &[u64], q: u64) -> u64 {
        brute_force_count(&var(t, n, dims), q, None)
            .unwrap()
            .try_into()
            .unwrap()
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(bf(LieType::A, 3, &[1], 2), 7);
        assert_eq!(bf(LieType::A, 4, &[1, 3], 2), 105);
        assert_eq!(bf(LieType::D, 4, &[2], 2), 3);
        assert_eq!(bf(LieType::A, 4, &[2], 2), 35);
        assert_eq!(bf(LieType::A, 4, &[2], 3), 130);
        assert_eq!(bf(LieType::C, 4, &[1], 2), 15);
        assert_eq!(bf(LieType::B, 5, &[2], 3), 40);
    }

    #[test]
    fn nested_loop_cross_check_for_a4_13() {
        // lines inside 3-spaces of F_2^4, counted with independent loops
        // over all vectors instead of echelon patterns
        let f = PrimeField::new(2).unwrap();
        let vecs: Vec<Vec<u64>> = (1u64..16).map(|x| (0..4).map(|i| (x >> i) & 1).collect()).collect();
        let mut hyperplanes = std::collections::HashSet::new();
        for a in &vecs {
            for b in &vecs {
                for c in &vecs {
                    let s = Subspace::from_vectors(&f, 4, &[a.clone(), b.clone(), c.clone()]).unwrap();
                    if s.dim() == 3 {
                        hyperplanes.insert(s.basis().to_rows());
                    }
                }
            }
        }
        let mut flags = 0;
        for h in &hyperplanes {
            let hs = Subspace::from_vectors(&f, 4, h).unwrap();
            flags += vecs.iter().filter(|v| hs.contains(v)).count();
        }
        assert_eq!(hyperplanes.len(), 15);
        assert_eq!(flags, 105);
    }

    #[test]
    fn type_b_needs_odd_q_and_size_is_bounded() {
        assert!(matches!(
            brute_force_count(&var(LieType::B, 5, &[1]), 2, None),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            brute_force_count(&var(LieType::A, 7, &[1]), 2, None),
            Err(Error::Resource(_))
        ));
    }
}

//! Automorphisms carrying one compatible basis of a flag to another.

use rand::seq::SliceRandom;
use rand::Rng;

use super::bundle::Check;
use super::FiniteFlagPoint;
use crate::error::{Error, Result};
use crate::linalg::{Field, Form, FormKind, Matrix, Subspace};
use crate::sample::{random_elem, random_invertible, random_nonzero};

/// Members of the whole chain, smallest first: the listed members, and for
/// an isotropic chain their orthogonal complements in reverse order.
pub fn full_chain<F: Field>(chain: &FiniteFlagPoint<F>, form: Option<&Form<F>>) -> Result<Vec<Subspace<F>>> {
    let mut full = chain.members().to_vec();
    if let Some(g) = form {
        for s in chain.members().iter().rev() {
            let p = g.perp(s)?;
            if full.last() != Some(&p) {
                full.push(p);
            }
        }
    }
    if full.last().is_some_and(|s| s.dim() == chain.ambient()) {
        full.pop();
    }
    Ok(full)
}

/// For every basis row, the index of the smallest member containing it
/// (`full.len()` for the whole space). Fails unless each member is spanned
/// by the rows it contains.
fn blocks<F: Field>(full: &[Subspace<F>], basis: &Matrix<F>, name: &'static str) -> Result<Vec<usize>> {
    let idx: Vec<usize> = (0..basis.rows())
        .map(|r| {
            full.iter()
                .position(|s| s.contains(basis.row_slice(r)))
                .unwrap_or(full.len())
        })
        .collect();
    for (j, s) in full.iter().enumerate() {
        let found = idx.iter().filter(|&&b| b <= j).count();
        if found != s.dim() {
            return Err(Error::IncompatibleBasis {
                basis: name,
                member: j,
                dim: s.dim(),
                found,
            });
        }
    }
    Ok(idx)
}

/// The involution `i_E` of an isotropic basis: `ω(e_a, e_b) = 0` unless
/// `b = i_E(a)`, at most one fixed point, and `Q(e_a) = 0` off the fixed
/// point.
pub fn isotropic_pairing<F: Field>(form: &Form<F>, basis: &Matrix<F>, name: &str) -> Result<Vec<usize>> {
    let f = form.field();
    let n = basis.rows();
    let mut pair = vec![0; n];
    for a in 0..n {
        let partners: Vec<usize> = (0..n)
            .filter(|&b| !f.is_zero(&form.eval(basis.row_slice(a), basis.row_slice(b))))
            .collect();
        if partners.len() != 1 {
            return Err(Error::Domain(format!(
                "basis {name} is not isotropic: vector {a} pairs with {} basis vectors",
                partners.len()
            )));
        }
        pair[a] = partners[0];
    }
    let fixed: Vec<usize> = (0..n).filter(|&a| pair[a] == a).collect();
    if fixed.len() > 1 {
        return Err(Error::Domain(format!(
            "basis {name} is not isotropic: {} fixed points",
            fixed.len()
        )));
    }
    if let Some(a) = (0..n).find(|&a| pair[a] != a && !f.is_zero(&form.quad(basis.row_slice(a)))) {
        return Err(Error::Domain(format!(
            "basis {name} is not isotropic: vector {a} is not singular"
        )));
    }
    Ok(pair)
}

/// Bijection `E → E'` as `(target index, scalar)` per row of `E`.
fn matching<F: Field>(
    full: &[Subspace<F>],
    half_len: usize,
    has_middle: bool,
    e: &Matrix<F>,
    e2: &Matrix<F>,
    form: Option<&Form<F>>,
) -> Result<Vec<(usize, F::Elem)>> {
    let f = e.field();
    let be = blocks(full, e, "E")?;
    let be2 = blocks(full, e2, "E'")?;
    let rows_in = |idx: &[usize], b: usize| -> Vec<usize> {
        (0..idx.len()).filter(|&r| idx[r] == b).collect()
    };
    let n = e.rows();
    let mut out: Vec<Option<(usize, F::Elem)>> = vec![None; n];
    let Some(g) = form else {
        for b in 0..=full.len() {
            for (a, t) in rows_in(&be, b).into_iter().zip(rows_in(&be2, b)) {
                out[a] = Some((t, f.one()));
            }
        }
        return Ok(out.into_iter().map(Option::unwrap).collect());
    };
    let ie = isotropic_pairing(g, e, "E")?;
    let ie2 = isotropic_pairing(g, e2, "E'")?;
    let w = |x: usize, y: usize| g.eval(e.row_slice(x), e.row_slice(y));
    let w2 = |x: usize, y: usize| g.eval(e2.row_slice(x), e2.row_slice(y));
    let scale = |a: usize, t: usize| -> F::Elem {
        f.div(&w(a, ie[a]), &w2(t, ie2[t])).expect("paired vectors")
    };
    for b in 0..half_len {
        for (a, t) in rows_in(&be, b).into_iter().zip(rows_in(&be2, b)) {
            out[a] = Some((t, f.one()));
            out[ie[a]] = Some((ie2[t], scale(a, t)));
        }
    }
    // The gap between the largest isotropic member and its complement.
    let orbits = |idx: &[usize], inv: &[usize]| -> (Vec<usize>, Vec<usize>) {
        let members = if has_middle { rows_in(idx, half_len) } else { Vec::new() };
        let fixed = members.iter().copied().filter(|&r| inv[r] == r).collect();
        let firsts = members.iter().copied().filter(|&r| inv[r] > r).collect();
        (fixed, firsts)
    };
    let (fixed, firsts) = orbits(&be, &ie);
    let (fixed2, firsts2) = orbits(&be2, &ie2);
    if fixed.len() != fixed2.len() || firsts.len() != firsts2.len() {
        return Err(Error::Domain(
            "the bases split the middle gap into different orbit types".into(),
        ));
    }
    for (a, t) in fixed.into_iter().zip(fixed2) {
        let ratio = f.div(&w(a, a), &w2(t, t)).expect("anisotropic fixed vector");
        let c = f.sqrt(&ratio).ok_or_else(|| {
            Error::Domain(format!(
                "no square root of {} in {}: the fixed basis vectors cannot be matched",
                f.render(&ratio),
                f.name()
            ))
        })?;
        out[a] = Some((t, c));
    }
    for (a, t) in firsts.into_iter().zip(firsts2) {
        out[a] = Some((t, f.one()));
        out[ie[a]] = Some((ie2[t], scale(a, t)));
    }
    out.into_iter()
        .enumerate()
        .map(|(a, m)| m.ok_or_else(|| Error::Domain(format!("basis vector {a} of E left unmatched"))))
        .collect()
}

/// Returns `α` with `α(e) = c_e·σ(e)` for a bijection `σ: E → E'` that
/// respects the blocks of the chain, so `α` stabilizes every member. With a
/// form, `σ` also intertwines the involutions of the two isotropic bases and
/// the scalars `c_e` make `α` an isometry. The result is verified before
/// it is returned.
pub fn rebase_automorphism<F: Field>(
    chain: &FiniteFlagPoint<F>,
    e: &Matrix<F>,
    e2: &Matrix<F>,
    form: Option<&Form<F>>,
) -> Result<Matrix<F>> {
    let form = form.or(chain.form());
    let n = chain.ambient();
    for (m, name) in [(e, "E"), (e2, "E'")] {
        if m.rows() != n || m.cols() != n || !m.is_invertible() {
            return Err(Error::Linalg(format!("{name} is not a basis of F^{n}")));
        }
    }
    let full = full_chain(chain, form)?;
    let half_len = chain.members().len();
    let has_middle = match (form, chain.members().last()) {
        (Some(g), Some(top)) => &g.perp(top)? != top,
        _ => true,
    };
    let sigma = matching(&full, half_len, has_middle, e, e2, form)?;
    let f = e.field();
    let images = sigma
        .iter()
        .map(|(t, c)| e2.row_slice(*t).iter().map(|x| f.mul(c, x)).collect())
        .collect();
    let images = Matrix::from_rows(f, n, images)?;
    let alpha = e.inverse()?.mul(&images)?;
    let transcript = verify(&full, e, e2, form, &alpha);
    if let Some(c) = transcript.iter().find(|c| !c.passed) {
        return Err(Error::Linalg(format!("rebase verification failed: {}", c.name)));
    }
    Ok(alpha)
}

/// Direct checks of the three postconditions.
pub fn verify<F: Field>(
    full: &[Subspace<F>],
    e: &Matrix<F>,
    e2: &Matrix<F>,
    form: Option<&Form<F>>,
    alpha: &Matrix<F>,
) -> Vec<Check> {
    let mut out = vec![Check::new("alpha is invertible", alpha.is_invertible())];
    let mapped = e.mul(alpha).ok();
    let onto = mapped.as_ref().is_some_and(|m| {
        let mut used = vec![false; e2.rows()];
        (0..m.rows()).all(|r| {
            let hit = (0..e2.rows()).find(|&t| {
                !used[t] && proportional(e.field(), m.row_slice(r), e2.row_slice(t))
            });
            hit.map(|t| used[t] = true).is_some()
        })
    });
    out.push(Check::new("alpha maps E onto E' up to scalars", onto));
    let fixes = full
        .iter()
        .all(|s| s.image(alpha).map(|i| &i == s).unwrap_or(false));
    out.push(Check::new("alpha stabilizes every chain member", fixes));
    if let Some(g) = form {
        out.push(Check::new("alpha preserves the form", g.preserved_by(alpha)));
    }
    out
}

fn proportional<F: Field>(f: &F, x: &[F::Elem], y: &[F::Elem]) -> bool {
    let Some(p) = y.iter().position(|v| !f.is_zero(v)) else {
        return false;
    };
    let Some(c) = f.div(&x[p], &y[p]) else {
        return false;
    };
    !f.is_zero(&c) && x.iter().zip(y).all(|(a, b)| *a == f.mul(&c, b))
}

/// A generated rebasing problem.
pub struct RebaseInstance<F: Field> {
    pub chain: FiniteFlagPoint<F>,
    pub e: Matrix<F>,
    pub e2: Matrix<F>,
    pub form: Option<Form<F>>,
}

fn block_bounds(dims: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut cuts = vec![0];
    cuts.extend_from_slice(dims);
    cuts.push(n);
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

fn shuffled_rows<F: Field, R: Rng>(m: &Matrix<F>, rng: &mut R) -> Matrix<F> {
    let mut idx: Vec<usize> = (0..m.rows()).collect();
    idx.shuffle(rng);
    m.select_rows(&idx)
}

/// Random chain of the given dimensions with two compatible bases.
pub fn random_general_instance<F: Field, R: Rng>(
    f: &F,
    n: usize,
    dims: &[usize],
    rng: &mut R,
) -> Result<RebaseInstance<F>> {
    let e = random_invertible(f, n, rng);
    let bases: Vec<Matrix<F>> = dims
        .iter()
        .map(|&d| e.select_rows(&(0..d).collect::<Vec<_>>()))
        .collect();
    let chain = FiniteFlagPoint::from_bases(n, &bases, None)?;
    // Block lower triangular change of basis keeps each block inside its
    // member and spanning it modulo the previous one.
    let mut p = Matrix::zeros(f, n, n);
    for (lo, hi) in block_bounds(dims, n) {
        let diag = random_invertible(f, hi - lo, rng);
        for r in lo..hi {
            for c in 0..lo {
                p.set(r, c, random_elem(f, rng));
            }
            for c in lo..hi {
                p.set(r, c, diag.get(r - lo, c - lo).clone());
            }
        }
    }
    let e2 = shuffled_rows(&p.mul(&e)?, rng);
    Ok(RebaseInstance {
        chain,
        e: shuffled_rows(&e, rng),
        e2,
        form: None,
    })
}

/// An isometry of the standard form stabilizing the coordinate flag with
/// isotropic dimensions `dims`: an invertible block on each isotropic gap,
/// the contragredient block on its mirror, and on the middle either the
/// identity or a swap of paired coordinates.
fn random_levi<F: Field, R: Rng>(form: &Form<F>, dims: &[usize], rng: &mut R) -> Result<Matrix<F>> {
    let f = form.field();
    let n = form.dim();
    let mut g = Matrix::zeros(f, n, n);
    let mut lo = 0;
    for &hi in dims {
        let s = hi - lo;
        let r = random_invertible(f, s, rng);
        let (mlo, mhi) = (n - hi, n - lo);
        let gb = form.gram.select_rows(&(lo..hi).collect::<Vec<_>>()).select_cols(&(mlo..mhi).collect::<Vec<_>>());
        let sb = gb.inverse()?.mul(&r.inverse()?)?.mul(&gb)?.transpose();
        for i in 0..s {
            for j in 0..s {
                g.set(lo + i, lo + j, r.get(i, j).clone());
                g.set(mlo + i, mlo + j, sb.get(i, j).clone());
            }
        }
        lo = hi;
    }
    let top = dims.last().copied().unwrap_or(0);
    for a in top..n - top {
        g.set(a, a, f.one());
    }
    for a in top..n / 2 {
        let b = n - 1 - a;
        if a < b && rng.gen_bool(0.5) {
            g.set(a, a, f.zero());
            g.set(b, b, f.zero());
            match form.kind {
                FormKind::Orthogonal => {
                    g.set(a, b, f.one());
                    g.set(b, a, f.one());
                }
                FormKind::Symplectic => {
                    g.set(a, b, f.one());
                    g.set(b, a, f.neg(&f.one()));
                }
            }
        }
    }
    debug_assert!(form.preserved_by(&g));
    Ok(g)
}

/// Random isotropic chain `⟨e_1..e_{d_1}⟩ ⊂ …` for the standard form with
/// two isotropic bases compatible with it; the second one rescaled so that
/// the scalar correction is exercised.
pub fn random_isotropic_instance<F: Field, R: Rng>(
    f: &F,
    kind: FormKind,
    n: usize,
    dims: &[usize],
    rng: &mut R,
) -> Result<RebaseInstance<F>> {
    let form = Form::standard(f, kind, n)?;
    let members: Vec<Subspace<F>> = dims
        .iter()
        .map(|&d| Subspace::coordinate(f, n, &(0..d).collect::<Vec<_>>()))
        .collect();
    let chain = FiniteFlagPoint::new(n, members, Some(form.clone()))?;
    let e = random_levi(&form, dims, rng)?;
    let mut e2 = random_levi(&form, dims, rng)?;
    for a in 0..n {
        let c = random_nonzero(f, rng);
        for j in 0..n {
            let v = f.mul(&c, e2.get(a, j));
            e2.set(a, j, v);
        }
    }
    Ok(RebaseInstance {
        chain,
        e: shuffled_rows(&e, rng),
        e2: shuffled_rows(&e2, rng),
        form: Some(form),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{PrimeField, Rationals};
    use crate::sample::rng;

    fn coord<F: Field>(f: &F, n: usize, idx: &[usize]) -> Subspace<F> {
        Subspace::coordinate(f, n, idx)
    }

    #[test]
    fn identical_bases_give_the_identity() {
        let f = Rationals;
        let chain = FiniteFlagPoint::new(3, vec![coord(&f, 3, &[0])], None).unwrap();
        let e = Matrix::identity(&f, 3);
        assert_eq!(rebase_automorphism(&chain, &e, &e, None).unwrap(), e);
    }

    #[test]
    fn swapping_two_vectors_in_one_gap_gives_a_transposition() {
        let f = Rationals;
        let chain =
            FiniteFlagPoint::new(4, vec![coord(&f, 4, &[0]), coord(&f, 4, &[0, 1, 2])], None).unwrap();
        let e = Matrix::identity(&f, 4);
        let e2 = e.select_rows(&[0, 2, 1, 3]);
        let alpha = rebase_automorphism(&chain, &e, &e2, None).unwrap();
        assert_eq!(alpha, e2);
    }

    #[test]
    fn incompatible_basis_names_the_member() {
        let f = Rationals;
        let chain = FiniteFlagPoint::new(2, vec![coord(&f, 2, &[0])], None).unwrap();
        let e = Matrix::identity(&f, 2);
        let bad = Matrix::from_i64(&f, &[vec![1, 1], vec![0, 1]]);
        match rebase_automorphism(&chain, &e, &bad, None) {
            Err(Error::IncompatibleBasis { basis, member, dim, found }) => {
                assert_eq!((basis, member, dim, found), ("E'", 0, 1, 0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rescaled_symplectic_basis_gets_the_scalar_correction() {
        let f = PrimeField::new(5).unwrap();
        let form = Form::standard(&f, FormKind::Symplectic, 4).unwrap();
        let chain = FiniteFlagPoint::new(4, vec![coord(&f, 4, &[0])], Some(form.clone())).unwrap();
        let e = Matrix::identity(&f, 4);
        let mut e2 = Matrix::identity(&f, 4);
        for (i, c) in [2u64, 3, 4, 2].into_iter().enumerate() {
            e2.set(i, i, c);
        }
        let alpha = rebase_automorphism(&chain, &e, &e2, Some(&form)).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let ax = alpha.row(x);
                let ay = alpha.row(y);
                assert_eq!(form.eval(&ax, &ay), form.eval(e.row_slice(x), e.row_slice(y)));
            }
        }
        assert_ne!(alpha, e);
    }

    #[test]
    fn generated_instances_verify() {
        let mut r = rng(11);
        let f = PrimeField::new(7).unwrap();
        for _ in 0..20 {
            let inst = random_general_instance(&f, 5, &[1, 3], &mut r).unwrap();
            rebase_automorphism(&inst.chain, &inst.e, &inst.e2, None).unwrap();
        }
        for (kind, n, dims) in [
            (FormKind::Symplectic, 6, vec![1, 3]),
            (FormKind::Orthogonal, 7, vec![2]),
            (FormKind::Orthogonal, 6, vec![1, 3]),
            (FormKind::Orthogonal, 6, vec![1]),
        ] {
            for _ in 0..5 {
                let inst = random_isotropic_instance(&f, kind, n, &dims, &mut r).unwrap();
                rebase_automorphism(&inst.chain, &inst.e, &inst.e2, inst.form.as_ref()).unwrap();
            }
        }
    }
}

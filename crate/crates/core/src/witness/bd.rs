//! The isomorphism between isotropic `(n-1)`-spaces of an odd orthogonal
//! space and one family of Lagrangians of an even one.
//!
//! `V_n = F^(2n)` carries the standard split form, with `e_i` the `i`-th
//! coordinate vector and `ê_i` the `(2n+1-i)`-th, so `ω(e_i, ê_i) = 1`.
//! `W_n ⊂ V_n` is spanned by `e_1 + ê_1`, `e_2..e_n` and `ê_2..ê_n`.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde_json::{json, Value};

use super::FiniteFlagPoint;
use crate::counting::brute::{for_each_subspace, reference_intersection_dim};
use crate::error::{Error, Result};
use crate::linalg::{Field, Form, FormKind, Matrix, PrimeField, Subspace};
use crate::sample::random_elem;

pub fn v_form<F: Field>(f: &F, n: usize) -> Result<Form<F>> {
    Form::standard(f, FormKind::Orthogonal, 2 * n)
}

/// Rows: `e_1 + ê_1`, `e_2..e_n`, `ê_2..ê_n`.
pub fn w_basis<F: Field>(f: &F, n: usize) -> Matrix<F> {
    let dim = 2 * n;
    let mut m = Matrix::zeros(f, dim - 1, dim);
    m.set(0, 0, f.one());
    m.set(0, dim - 1, f.one());
    for i in 2..=n {
        m.set(i - 1, i - 1, f.one());
        m.set(n + i - 2, dim - i, f.one());
    }
    m
}

/// `V_n → V_{n+1}` sending `e_i ↦ e_i` and `ê_i ↦ ê_i`.
pub fn iota<F: Field>(f: &F, n: usize) -> Matrix<F> {
    let mut m = Matrix::zeros(f, 2 * n, 2 * n + 2);
    for a in 0..2 * n {
        m.set(a, if a < n { a } else { a + 2 }, f.one());
    }
    m
}

/// `S ↦ ι(S) ⊕ ⟨e_{n+1}⟩`; this is both `α_n` on Lagrangians and `β_n` on
/// subspaces of `W_n`.
pub fn extend_by_e<F: Field>(f: &F, n: usize, s: &Subspace<F>) -> Result<Subspace<F>> {
    let img = s.basis().mul(&iota(f, n))?;
    Ok(Subspace::span(&img.vstack(&Matrix::unit_rows(f, 2 * n + 2, &[n]))?))
}

fn check_domain<F: Field>(f: &F, n: usize, m: &Subspace<F>, form: &Form<F>) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("n must be at least 2, got {n}")));
    }
    if m.ambient() != 2 * n || m.dim() != n - 1 {
        return Err(Error::Domain(format!(
            "expected a {}-dimensional subspace of F^{}, got dimension {} in F^{}",
            n - 1,
            2 * n,
            m.dim(),
            m.ambient()
        )));
    }
    if !Subspace::span(&w_basis(f, n)).contains_subspace(m) {
        return Err(Error::Domain("subspace does not lie in W_n".into()));
    }
    if let Err((x, y)) = form.check_isotropic(m.basis()) {
        return Err(Error::Domain(format!(
            "subspace is not isotropic: basis vectors {x} and {y} pair nontrivially"
        )));
    }
    Ok(())
}

/// Projective zeros `[x:y]` of `Q(x·a + y·b)`.
fn singular_points<F: Field>(form: &Form<F>, a: &[F::Elem], b: &[F::Elem]) -> Result<Vec<(F::Elem, F::Elem)>> {
    let f = form.field();
    let qa = form.quad(a);
    let qb = form.quad(b);
    let w = form.eval(a, b);
    let value = |x: &F::Elem, y: &F::Elem| {
        let t1 = f.mul(&f.mul(x, x), &qa);
        let t2 = f.mul(&f.mul(x, y), &w);
        let t3 = f.mul(&f.mul(y, y), &qb);
        f.add(&f.add(&t1, &t2), &t3)
    };
    let mut out = Vec::new();
    if f.is_zero(&qb) {
        out.push((f.zero(), f.one()));
    }
    match f.elements() {
        Some(all) => {
            for t in all {
                if f.is_zero(&value(&f.one(), &t)) {
                    out.push((f.one(), t));
                }
            }
        }
        None => {
            // Qa + t·w + t²·Qb = 0 in characteristic 0.
            if f.is_zero(&qb) {
                if !f.is_zero(&w) {
                    out.push((f.one(), f.neg(&f.div(&qa, &w).unwrap())));
                }
            } else {
                let four = f.from_i64(4);
                let disc = f.sub(&f.mul(&w, &w), &f.mul(&four, &f.mul(&qa, &qb)));
                if let Some(s) = f.sqrt(&disc) {
                    let den = f.mul(&f.from_i64(2), &qb);
                    for r in [s.clone(), f.neg(&s)] {
                        let t = f.div(&f.sub(&r, &w), &den).unwrap();
                        if !out.iter().any(|(x, y)| *x == f.one() && *y == t) {
                            out.push((f.one(), t));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The two Lagrangians of `V_n` containing an isotropic `(n-1)`-space.
pub fn lagrangians_containing<F: Field>(n: usize, m: &Subspace<F>, form: &Form<F>) -> Result<Vec<Subspace<F>>> {
    let f = form.field();
    let p = form.perp(m)?;
    let mut extra = Vec::new();
    let mut span = m.clone();
    for r in 0..p.dim() {
        let v = p.basis().row(r);
        if !span.contains(&v) {
            span = span.sum(&Subspace::from_vectors(f, 2 * n, std::slice::from_ref(&v))?)?;
            extra.push(v);
        }
    }
    if extra.len() != 2 {
        return Err(Error::Domain("the complement of M is not two-dimensional modulo M".into()));
    }
    let (a, b) = (&extra[0], &extra[1]);
    let mut out = Vec::new();
    for (x, y) in singular_points(form, a, b)? {
        let v: Vec<F::Elem> = a
            .iter()
            .zip(b)
            .map(|(ai, bi)| f.add(&f.mul(&x, ai), &f.mul(&y, bi)))
            .collect();
        out.push(m.sum(&Subspace::from_vectors(f, 2 * n, &[v])?)?);
    }
    Ok(out)
}

/// Whether a Lagrangian of `V_n` lies in the chosen family:
/// `dim(L ∩ ⟨e_1..e_n⟩) ≡ n (mod 2)`.
pub fn in_chosen_component<F: Field>(n: usize, l: &Subspace<F>) -> bool {
    reference_intersection_dim(l, n) % 2 == n % 2
}

pub fn bd_phi_subspace<F: Field>(f: &F, n: usize, m: &Subspace<F>) -> Result<Subspace<F>> {
    let form = v_form(f, n)?;
    check_domain(f, n, m, &form)?;
    let both = lagrangians_containing(n, m, &form)?;
    if both.len() != 2 {
        return Err(Error::Domain(format!(
            "expected two Lagrangians through M, found {}",
            both.len()
        )));
    }
    let mut chosen = both.into_iter().filter(|l| in_chosen_component(n, l));
    match (chosen.next(), chosen.next()) {
        (Some(l), None) => Ok(l),
        _ => Err(Error::Domain("the two Lagrangians through M lie in the same family".into())),
    }
}

/// `M ↦ L̂`, the Lagrangian of the chosen family containing `M`. `m` is a
/// one-member point of the odd orthogonal Grassmannian, given inside `V_n`.
pub fn bd_phi<F: Field>(n: usize, m: &FiniteFlagPoint<F>) -> Result<FiniteFlagPoint<F>> {
    let [member] = m.members() else {
        return Err(Error::Domain("expected a single subspace".into()));
    };
    let f = member.field().clone();
    let l = bd_phi_subspace(&f, n, member)?;
    FiniteFlagPoint::new(2 * n, vec![l], Some(v_form(&f, n)?))
}

/// Every isotropic `(n-1)`-space of `W_n`.
pub fn all_domain_points(f: &PrimeField, n: usize) -> Result<Vec<Subspace<PrimeField>>> {
    let form = v_form(f, n)?;
    let w = w_basis(f, n);
    let mut out = Vec::new();
    for_each_subspace(f, 2 * n - 1, n - 1, |c| {
        let s = Subspace::span(&c.mul(&w).expect("shapes"));
        if form.is_isotropic(&s) {
            out.push(s);
        }
    });
    Ok(out)
}

/// Every Lagrangian of `V_n` in the chosen family.
pub fn all_component_lagrangians(f: &PrimeField, n: usize) -> Result<Vec<Subspace<PrimeField>>> {
    let form = v_form(f, n)?;
    let mut out = Vec::new();
    for_each_subspace(f, 2 * n, n, |b| {
        let s = Subspace::span(b);
        if form.is_isotropic(&s) && in_chosen_component(n, &s) {
            out.push(s);
        }
    });
    Ok(out)
}

/// A random isotropic `(n-1)`-space of `W_n`.
pub fn random_domain_point<F: Field, R: Rng>(f: &F, n: usize, rng: &mut R) -> Result<Subspace<F>> {
    let form = v_form(f, n)?;
    let w = w_basis(f, n);
    let mut m = Subspace::zero(f, 2 * n);
    let mut attempts = 0;
    while m.dim() < n - 1 {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::Resource("no isotropic vector found".into()));
        }
        let c: Vec<F::Elem> = (0..w.rows()).map(|_| random_elem(f, rng)).collect();
        let v = w.apply(&c)?;
        let ok = f.is_zero(&form.quad(&v))
            && !m.contains(&v)
            && (0..m.dim()).all(|r| f.is_zero(&form.eval(&v, m.basis().row_slice(r))));
        if ok {
            m = m.sum(&Subspace::from_vectors(f, 2 * n, &[v])?)?;
        }
    }
    Ok(m)
}

fn key<F: Field>(s: &Subspace<F>) -> Vec<Vec<String>> {
    s.basis().render()
}

#[derive(Clone, Debug)]
pub enum BdSample<F: Field> {
    All,
    Random { count: usize, seed: u64 },
    Points(Vec<Subspace<F>>),
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct BdReport {
    pub n: usize,
    pub field: String,
    pub sample: String,
    pub checked: usize,
    pub failures: Vec<String>,
    pub injective: bool,
    pub in_component: bool,
    pub example: Option<Value>,
}

impl BdReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.injective && self.in_component
    }
}

/// Checks `φ_{n+1}(β_n(M)) = α_n(φ_n(M))` on the sample. `All` needs a
/// finite field.
pub fn bd_square_check<F: Field>(f: &F, n: usize, sample: BdSample<F>) -> BdReport {
    let mut report = BdReport {
        n,
        field: f.name(),
        sample: String::new(),
        checked: 0,
        failures: Vec::new(),
        injective: true,
        in_component: true,
        example: None,
    };
    let points = match sample {
        BdSample::All => {
            report.sample = "all".into();
            match all_points_generic(f, n) {
                Ok(p) => p,
                Err(e) => {
                    report.failures.push(e.to_string());
                    return report;
                }
            }
        }
        BdSample::Random { count, seed } => {
            report.sample = format!("random {count} (seed {seed})");
            let mut r = crate::sample::rng(seed);
            let mut pts = Vec::new();
            for _ in 0..count {
                match random_domain_point(f, n, &mut r) {
                    Ok(p) => pts.push(p),
                    Err(e) => report.failures.push(e.to_string()),
                }
            }
            pts
        }
        BdSample::Points(p) => {
            report.sample = format!("{} given points", p.len());
            p
        }
    };
    // image key -> preimage key; repeated random samples are not collisions
    let mut seen = BTreeMap::new();
    for (i, m) in points.iter().enumerate() {
        report.checked += 1;
        let step = (|| -> Result<(Subspace<F>, Subspace<F>, Subspace<F>)> {
            let l = bd_phi_subspace(f, n, m)?;
            let down = extend_by_e(f, n, &l)?;
            let right = bd_phi_subspace(f, n + 1, &extend_by_e(f, n, m)?)?;
            Ok((l, down, right))
        })();
        match step {
            Ok((l, down, right)) => {
                if !in_chosen_component(n, &l) {
                    report.in_component = false;
                }
                if *seen.entry(key(&l)).or_insert_with(|| key(m)) != key(m) {
                    report.injective = false;
                }
                if down != right {
                    report.failures.push(format!("square fails at sample point {i}"));
                }
                if report.example.is_none() {
                    report.example = Some(json!({ "M": m.basis(), "phi(M)": l.basis() }));
                }
            }
            Err(e) => report.failures.push(format!("sample point {i}: {e}")),
        }
    }
    report
}

fn all_points_generic<F: Field>(f: &F, n: usize) -> Result<Vec<Subspace<F>>> {
    if f.elements().is_none() {
        return Err(Error::Domain("exhaustive samples need a finite field".into()));
    }
    let p = PrimeField::new(f.characteristic())?;
    let pts = all_domain_points(&p, n)?;
    pts.iter()
        .map(|s| {
            let rows: Vec<Vec<F::Elem>> = s
                .basis()
                .to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|x| f.from_i64(x as i64)).collect())
                .collect();
            Subspace::from_vectors(f, 2 * n, &rows)
        })
        .collect()
}

/// Sizes of both sides and whether `φ_n` maps the whole domain bijectively
/// onto the chosen family.
#[derive(Clone, Debug, serde::Serialize)]
pub struct BijectionReport {
    pub n: usize,
    pub q: u64,
    pub domain: usize,
    pub image: usize,
    pub family: usize,
    pub bijective: bool,
}

pub fn bd_bijection_check(f: &PrimeField, n: usize) -> Result<BijectionReport> {
    let domain = all_domain_points(f, n)?;
    let mut image = BTreeSet::new();
    for m in &domain {
        image.insert(key(&bd_phi_subspace(f, n, m)?));
    }
    let family: BTreeSet<_> = all_component_lagrangians(f, n)?.iter().map(key).collect();
    Ok(BijectionReport {
        n,
        q: f.p(),
        domain: domain.len(),
        image: image.len(),
        family: family.len(),
        bijective: image.len() == domain.len() && image == family,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::brute::brute_force_count;
    use crate::counting::point_count;
    use crate::flag::{FiniteFlagVariety, LieType};
    use crate::linalg::Rationals;

    #[test]
    fn w_is_nondegenerate_of_odd_dimension() {
        let f = PrimeField::new(3).unwrap();
        let w = w_basis(&f, 3);
        let g = v_form(&f, 3).unwrap();
        let restricted = w.mul(&g.gram).unwrap().mul(&w.transpose()).unwrap();
        assert_eq!(restricted.rows(), 5);
        assert!(restricted.is_invertible());
    }

    #[test]
    fn small_example_over_the_rationals() {
        let f = Rationals;
        let m = Subspace::coordinate(&f, 4, &[1]);
        let both = lagrangians_containing(2, &m, &v_form(&f, 2).unwrap()).unwrap();
        assert_eq!(both.len(), 2);
        assert_eq!(both.iter().filter(|l| in_chosen_component(2, l)).count(), 1);
        let l = bd_phi_subspace(&f, 2, &m).unwrap();
        assert_eq!(l, Subspace::coordinate(&f, 4, &[0, 1]));
    }

    #[test]
    fn reference_lagrangian_is_recovered() {
        let f = PrimeField::new(5).unwrap();
        let m = Subspace::coordinate(&f, 8, &[1, 2, 3]);
        assert_eq!(bd_phi_subspace(&f, 4, &m).unwrap(), Subspace::coordinate(&f, 8, &[0, 1, 2, 3]));
    }

    #[test]
    fn rejects_points_outside_the_domain() {
        let f = Rationals;
        let not_in_w = Subspace::coordinate(&f, 4, &[0]);
        assert!(matches!(bd_phi_subspace(&f, 2, &not_in_w), Err(Error::Domain(_))));
        let wrong_dim = Subspace::coordinate(&f, 4, &[1, 2]);
        assert!(matches!(bd_phi_subspace(&f, 2, &wrong_dim), Err(Error::Domain(_))));
        let f5 = PrimeField::new(5).unwrap();
        let anisotropic = Subspace::from_vectors(&f5, 4, &[vec![1, 0, 0, 1]]).unwrap();
        assert!(matches!(bd_phi_subspace(&f5, 2, &anisotropic), Err(Error::Domain(_))));
    }

    #[test]
    fn bijection_sizes_match_the_point_counts() {
        for (q, n) in [(3u64, 2usize), (3, 3), (2, 2), (2, 3)] {
            let f = PrimeField::new(q).unwrap();
            let r = bd_bijection_check(&f, n).unwrap();
            assert!(r.bijective, "{r:?}");
            let b = FiniteFlagVariety::new(LieType::B, 2 * n as u64 - 1, vec![n as u64 - 1]).unwrap();
            let d = FiniteFlagVariety::new(LieType::D, 2 * n as u64, vec![n as u64]).unwrap();
            assert_eq!(point_count(&b, q).unwrap(), r.domain.into());
            assert_eq!(brute_force_count(&d, q, None).unwrap(), r.family.into());
        }
    }

    #[test]
    fn squares_commute() {
        let f2 = PrimeField::new(2).unwrap();
        for n in [2, 3] {
            let r = bd_square_check(&f2, n, BdSample::All);
            assert!(r.passed(), "{r:?}");
            assert!(r.checked > 0);
        }
        let f5 = PrimeField::new(5).unwrap();
        let r = bd_square_check(&f5, 4, BdSample::Random { count: 20, seed: 5 });
        assert!(r.passed(), "{r:?}");
        let r = bd_square_check(&Rationals, 3, BdSample::Random { count: 5, seed: 1 });
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn repeated_sample_points_are_not_collisions() {
        let f = Rationals;
        let m = Subspace::coordinate(&f, 4, &[1]);
        let r = bd_square_check(&f, 2, BdSample::Points(vec![m.clone(), m]));
        assert!(r.injective && r.passed(), "{r:?}");
    }
}

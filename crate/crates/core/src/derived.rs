//! Values computed by the independent oracles, pinned in `derived_values.json`
//! by `flagiso selftest` and re-checked by the test suite.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::counting::{brute_force_count, dimension, point_count, poincare_polynomial};
use crate::error::{Error, Result};
use crate::flag::{FiniteFlagVariety, FlagDescriptor};
use crate::linalg::{Field, Form, FormKind, Matrix, PrimeField, Rationals, Subspace};
use crate::oracle;
use crate::order::WeightedOrder;
use crate::sample::{random_subspace, rng};
use crate::witness::bd::{bd_bijection_check, bd_phi_subspace, bd_square_check, lagrangians_containing, v_form, BdSample};
use crate::witness::extension::{isotropic_extension, StandardExtension};
use crate::witness::bundle::rebase_bundle;
use crate::witness::FiniteFlagPoint;

fn order(s: &str) -> Result<WeightedOrder> {
    s.parse()
}

fn variety(s: &str) -> Result<FiniteFlagVariety> {
    s.parse()
}

fn descriptor(s: &str) -> Result<FlagDescriptor> {
    s.parse()
}

fn brute(v: &str, q: u64) -> Result<u64> {
    let n = brute_force_count(&variety(v)?, q, None)?;
    n.to_u64().ok_or_else(|| Error::Resource("count does not fit in u64".into()))
}

fn weyl(v: &str, q: u64) -> Result<u64> {
    let n = point_count(&variety(v)?, q)?;
    n.to_u64().ok_or_else(|| Error::Resource("count does not fit in u64".into()))
}

fn coefficients(v: &str) -> Result<Vec<String>> {
    Ok(poincare_polynomial(&variety(v)?)?
        .coefficients()
        .iter()
        .map(|c| c.to_string())
        .collect())
}

/// Degree of the polynomial through `(x_i, y_i)`, by divided differences.
fn interpolated_degree(points: &[(i64, u64)]) -> usize {
    let xs: Vec<BigRational> = points.iter().map(|p| BigRational::from_integer(BigInt::from(p.0))).collect();
    let mut table: Vec<BigRational> = points.iter().map(|p| BigRational::from_integer(BigInt::from(p.1))).collect();
    let mut leading = vec![table[0].clone()];
    for level in 1..points.len() {
        table = (0..table.len() - 1)
            .map(|i| (&table[i + 1] - &table[i]) / (&xs[i + level] - &xs[i]))
            .collect();
        leading.push(table[0].clone());
    }
    leading.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

/// The final segment of `omegastar(2) + seq[1]` at width `n`, written out
/// without going through the truncation code.
fn hand_truncation(n: u64) -> Vec<u64> {
    let mut out = vec![2; n as usize];
    out.push(1);
    out
}

fn order_values(out: &mut BTreeMap<String, Value>) -> Result<()> {
    let x = order("seq[1] + seq[2,2] + omega(2)")?;
    let nx = x.normalize();
    out.insert(
        "order.normalize".into(),
        json!({ "input": x, "normalized": nx, "oracle_agrees": oracle::isomorphic(&x, &nx) }),
    );
    let a = order("seq[2] + omega(2)")?;
    let b = order("omega(2)")?;
    out.insert(
        "order.is_isomorphic".into(),
        json!({ "left": a, "right": b, "verdict": a.is_isomorphic(&b), "oracle": oracle::isomorphic(&a, &b) }),
    );
    let t = order("omegastar(2) + seq[1]")?.truncate(2)?;
    out.insert(
        "order.truncate".into(),
        json!({ "input": "omegastar(2) + seq[1]", "n": 2, "blocks": t.blocks, "hand": hand_truncation(2) }),
    );
    Ok(())
}

fn flag_values(out: &mut BTreeMap<String, Value>) -> Result<()> {
    for (key, d, n) in [
        ("flag.truncate.symplectic", "symp: half=seq[1]; middle=inf", 3),
        ("flag.truncate.orthogonal", "orth: half=seq[inf]; middle=1", 2),
    ] {
        let v = descriptor(d)?.truncate_to_variety(n)?;
        out.insert(key.into(), json!({ "descriptor": d, "n": n, "variety": v.to_string() }));
    }
    Ok(())
}

fn counting_values(out: &mut BTreeMap<String, Value>) -> Result<()> {
    let p = poincare_polynomial(&variety("A(2; 4)")?)?;
    out.insert(
        "counting.poincare.A(2; 4)".into(),
        json!({
            "polynomial": p.to_string(),
            "at_2": p.eval_u64(2).to_string(),
            "at_3": p.eval_u64(3).to_string(),
            "brute_2": brute("A(2; 4)", 2)?,
            "brute_3": brute("A(2; 4)", 3)?,
        }),
    );
    let b = coefficients("B(2; 5)")?;
    let d = coefficients("D(3; 6)")?;
    out.insert(
        "counting.poincare.B(2; 5)~D(3; 6)".into(),
        json!({
            "B": b,
            "D": d,
            "brute_B_3": brute("B(2; 5)", 3)?,
            "brute_D_2": brute("D(3; 6)", 2)?,
            "brute_D_3": brute("D(3; 6)", 3)?,
        }),
    );
    // the brute-force oracle has no type B over F_2, so this pin comes from
    // the Weyl count alone
    out.insert("counting.points.B(2; 5).q=2".into(), json!(weyl("B(2; 5)", 2)?));
    out.insert("counting.points.B(2; 5).q=3".into(), json!({ "weyl": weyl("B(2; 5)", 3)?, "brute": brute("B(2; 5)", 3)? }));
    for v in ["A(1,3; 4)", "D(2; 4)"] {
        out.insert(
            format!("counting.points.{v}.q=2"),
            json!({ "weyl": weyl(v, 2)?, "brute": brute(v, 2)? }),
        );
    }
    out.insert(
        "counting.dim.A(1,2; 3)".into(),
        json!({ "weyl": dimension(&variety("A(1,2; 3)")?)?, "longest_s3": 3 }),
    );
    // brute force at the primes it supports, the Weyl count beyond
    let pts = [
        (2, brute("C(1; 4)", 2)?),
        (3, brute("C(1; 4)", 3)?),
        (4, weyl("C(1; 4)", 4)?),
        (5, weyl("C(1; 4)", 5)?),
    ];
    out.insert(
        "counting.dim.C(1; 4)".into(),
        json!({
            "weyl": dimension(&variety("C(1; 4)")?)?,
            "counts": pts.iter().map(|p| p.1).collect::<Vec<_>>(),
            "interpolated_degree": interpolated_degree(&pts),
        }),
    );
    Ok(())
}

fn witness_values(out: &mut BTreeMap<String, Value>) -> Result<()> {
    let f5 = PrimeField::new(5)?;
    let symp4 = Form::standard(&f5, FormKind::Symplectic, 4)?;
    let chain = FiniteFlagPoint::new(4, vec![Subspace::coordinate(&f5, 4, &[0])], Some(symp4.clone()))?;
    let e = Matrix::identity(&f5, 4);
    let mut e2 = Matrix::identity(&f5, 4);
    for (i, c) in [2u64, 3, 4, 2].into_iter().enumerate() {
        e2.set(i, i, c);
    }
    let bundle = rebase_bundle(&chain, &e, &e2, Some(&symp4))?;
    out.insert(
        "witness.rebase.symplectic".into(),
        json!({ "alpha": bundle.result["alpha"], "passed": bundle.passed() }),
    );

    let q = Rationals;
    let mut ext = StandardExtension::identity(&q, 3, &[1]);
    ext.strict = false;
    let l = Subspace::from_vectors(&q, 3, &[vec![q.one(), q.from_i64(2), q.zero()]])?;
    let image = ext.apply(&FiniteFlagPoint::new(3, vec![l.clone()], None)?)?;
    out.insert(
        "witness.modified_extension".into(),
        json!({ "dims": image.dims(), "is_annihilator": image.members()[0] == l.annihilator() }),
    );

    let symp8 = Form::standard(&f5, FormKind::Symplectic, 8)?;
    let emb = Matrix::unit_rows(&f5, 8, &[0, 1, 2, 3]);
    let flag = FiniteFlagPoint::new(
        4,
        vec![
            Subspace::from_vectors(&f5, 4, &[vec![1, 2, 0, 1]])?,
            Subspace::from_vectors(&f5, 4, &[vec![1, 2, 0, 1], vec![0, 1, 3, 0]])?,
        ],
        None,
    )?;
    let p = isotropic_extension(&flag, &symp8, &emb)?;
    out.insert(
        "witness.isotropic_extension".into(),
        json!({ "dims": p.dims(), "isotropic": p.members().iter().all(|s| symp8.is_isotropic(s)) }),
    );

    let m = Subspace::coordinate(&q, 4, &[1]);
    let containing = lagrangians_containing(2, &m, &v_form(&q, 2)?)?;
    let l = bd_phi_subspace(&q, 2, &m)?;
    out.insert(
        "witness.bd_phi.n=2".into(),
        json!({
            "lagrangians_containing": containing.len(),
            "image": l.basis().render(),
            "lagrangian": v_form(&q, 2)?.is_isotropic(&l) && l.dim() == 2,
        }),
    );
    let m = Subspace::coordinate(&f5, 8, &[1, 2, 3]);
    out.insert(
        "witness.bd_phi.reference".into(),
        json!(bd_phi_subspace(&f5, 4, &m)? == Subspace::coordinate(&f5, 8, &[0, 1, 2, 3])),
    );
    let f3 = PrimeField::new(3)?;
    let r = bd_bijection_check(&f3, 2)?;
    out.insert(
        "witness.bd_bijection.F3.n=2".into(),
        json!({ "domain": r.domain, "image": r.image, "family": r.family, "bijective": r.bijective }),
    );
    let f2 = PrimeField::new(2)?;
    for n in [2, 3] {
        let r = bd_square_check(&f2, n, BdSample::All);
        out.insert(
            format!("witness.bd_squares.F2.n={n}"),
            json!({ "checked": r.checked, "failures": r.failures.len() }),
        );
    }
    let r = bd_square_check(&f5, 4, BdSample::Random { count: 100, seed: 2024 });
    out.insert(
        "witness.bd_squares.F5.n=4".into(),
        json!({ "checked": r.checked, "failures": r.failures.len() }),
    );
    Ok(())
}

fn linalg_values(out: &mut BTreeMap<String, Value>) -> Result<()> {
    let f3 = PrimeField::new(3)?;
    let g = Form::standard(&f3, FormKind::Symplectic, 6)?;
    let s = random_subspace(&f3, 6, 2, &mut rng(470));
    let p = g.perp(&s)?;
    out.insert(
        "linalg.perp.symplectic6".into(),
        json!({ "dim": p.dim(), "double_perp": g.perp(&p)? == s }),
    );
    Ok(())
}

/// Every pinned value, keyed by a stable name.
pub fn derived_values() -> Result<BTreeMap<String, Value>> {
    let mut out = BTreeMap::new();
    order_values(&mut out)?;
    flag_values(&mut out)?;
    counting_values(&mut out)?;
    witness_values(&mut out)?;
    linalg_values(&mut out)?;
    Ok(out)
}

/// Keys whose value differs from `lock`, plus keys missing on either side.
pub fn mismatches(current: &BTreeMap<String, Value>, lock: &BTreeMap<String, Value>) -> Vec<String> {
    let mut bad: Vec<String> = current
        .iter()
        .filter(|(k, v)| lock.get(*k) != Some(v))
        .map(|(k, _)| k.clone())
        .collect();
    bad.extend(lock.keys().filter(|k| !current.contains_key(*k)).cloned());
    bad
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divided_differences_find_the_degree() {
        assert_eq!(interpolated_degree(&[(2, 15), (3, 40), (4, 85), (5, 156)]), 3);
        assert_eq!(interpolated_degree(&[(0, 7), (1, 7), (2, 7)]), 0);
    }
}

//! The acceptance suite, shared by the integration test and the `selftest`
//! command.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;

use crate::counting::{brute_force_count, dimension, point_count, poincare_polynomial, QPolynomial};
use crate::decision::{decide_finite, decide_ind, Reason, Verdict};
use crate::flag::{FiniteFlagVariety, FlagDescriptor, LieType};
use crate::linalg::{Field, FormKind, PrimeField, Rationals};
use crate::order::{Atom, WeightedOrder};
use crate::sample::{all_varieties, descriptor_variant, isomorphic_variant, random_descriptor, random_order, rng};
use crate::witness::bd::{bd_bijection_check, bd_square_check, BdSample};
use crate::witness::extension::{
    check_triangle, compose_standard_extensions, perturb_beta, pic_pullback, random_extension,
    random_point,
};
use crate::witness::rebase::{random_general_instance, random_isotropic_instance, rebase_automorphism};
use crate::{oracle, syntax};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub limit_ms: u128,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {}: {} {} ({}; {} ms, limit {} ms)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed_ms,
            self.limit_ms
        )
    }
}

pub const CRITERIA: [(u8, &str); 7] = [
    (1, "projective space vs symplectic grassmannian"),
    (2, "odd vs even orthogonal grassmannian"),
    (3, "point counts against brute force"),
    (4, "decisions consistent with counting"),
    (5, "rewrite system properties"),
    (6, "witness suite"),
    (7, "duality and symmetry of decisions"),
];

fn limit(id: u8) -> Duration {
    Duration::from_secs(match id {
        1 => 1,
        2 => 60,
        3 => 600,
        4 => 300,
        5 => 60,
        6 => 120,
        _ => 10,
    })
}

pub fn run(id: u8) -> CriterionReport {
    let start = Instant::now();
    let outcome = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        _ => Err(format!("no criterion {id}")),
    };
    let elapsed = start.elapsed();
    let lim = limit(id);
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if elapsed > lim {
        passed = false;
        detail = format!("{detail}; over the time limit");
    }
    CriterionReport {
        id,
        name: CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1),
        passed,
        detail,
        elapsed_ms: elapsed.as_millis(),
        limit_ms: lim.as_millis(),
    }
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| run(c.0)).collect()
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn desc(s: &str) -> FlagDescriptor {
    syntax::parse_descriptor(s).expect("built-in descriptor")
}

fn var(t: LieType, n: u64, dims: &[u64]) -> Result<FiniteFlagVariety, String> {
    FiniteFlagVariety::new(t, n, dims.to_vec()).map_err(|e| e.to_string())
}

fn poincare(v: &FiniteFlagVariety) -> Result<QPolynomial, String> {
    poincare_polynomial(v).map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let r = decide_ind(&desc("gen: seq[1,inf]"), &desc("symp: half=seq[1]; middle=inf"))
        .map_err(|e| e.to_string())?;
    ensure(
        r.verdict == Verdict::Isomorphic && r.reason == Reason::ExceptionalProjSymp,
        || format!("decision was {r}"),
    )?;
    for n in 2..=4 {
        let a = poincare(&var(LieType::A, 2 * n, &[1])?)?;
        let c = poincare(&var(LieType::C, 2 * n, &[1])?)?;
        ensure(a == c, || format!("n = {n}: {a} vs {c}"))?;
    }
    Ok("decision and 3 polynomial identities".into())
}

fn criterion_2() -> Outcome {
    let r = decide_ind(
        &desc("orth: half=seq[inf]; middle=1"),
        &desc("orth: half=seq[inf]; middle=empty"),
    )
    .map_err(|e| e.to_string())?;
    ensure(
        r.verdict == Verdict::Isomorphic && r.reason == Reason::ExceptionalBD,
        || format!("decision was {r}"),
    )?;
    for n in 2..=5u64 {
        let b = poincare(&var(LieType::B, 2 * n - 1, &[n - 1])?)?;
        let d = poincare(&var(LieType::D, 2 * n, &[n])?)?;
        ensure(b == d, || format!("n = {n}: {b} vs {d}"))?;
    }
    let f3 = PrimeField::new(3).unwrap();
    for n in [2, 3] {
        let r = bd_bijection_check(&f3, n).map_err(|e| e.to_string())?;
        ensure(r.bijective, || format!("not a bijection: {r:?}"))?;
    }
    let f2 = PrimeField::new(2).unwrap();
    let mut squares = 0;
    for n in [2, 3] {
        let r = bd_square_check(&f2, n, BdSample::All);
        ensure(r.passed(), || format!("F2, n = {n}: {:?}", r.failures))?;
        squares += r.checked;
    }
    let f5 = PrimeField::new(5).unwrap();
    let r = bd_square_check(&f5, 4, BdSample::Random { count: 100, seed: 2024 });
    ensure(r.passed() && r.checked == 100, || format!("F5, n = 4: {:?}", r.failures))?;
    squares += r.checked;
    Ok(format!("decision, 4 polynomial identities, 2 bijections, {squares} squares"))
}

fn criterion_3() -> Outcome {
    let mut pairs = 0;
    for v in all_varieties(5, false) {
        for q in [2u64, 3] {
            if v.lie_type == LieType::B && q == 2 {
                continue;
            }
            let formula = point_count(&v, q).map_err(|e| e.to_string())?;
            let brute = brute_force_count(&v, q, None).map_err(|e| e.to_string())?;
            ensure(formula == brute, || format!("{v} over F{q}: {formula} vs {brute}"))?;
            pairs += 1;
        }
    }
    ensure(pairs >= 40, || format!("only {pairs} pairs"))?;
    Ok(format!("{pairs} variety/q pairs agree"))
}

fn criterion_4() -> Outcome {
    let all = all_varieties(8, true);
    let mut cache: HashMap<String, (QPolynomial, u64)> = HashMap::new();
    for v in &all {
        let p = poincare(v)?;
        let d = dimension(v).map_err(|e| e.to_string())?;
        cache.insert(v.to_string(), (p, d));
    }
    let mut iso = 0;
    for x in &all {
        for y in &all {
            let r = decide_finite(x, y).map_err(|e| e.to_string())?;
            if r.is_isomorphic() {
                iso += 1;
                let (a, b) = (&cache[&x.to_string()], &cache[&y.to_string()]);
                ensure(a == b, || format!("{x} ~ {y} but invariants differ"))?;
            }
        }
    }
    Ok(format!(
        "{} varieties, {} pairs, {iso} isomorphic, no counterexample",
        all.len(),
        all.len() * all.len()
    ))
}

/// Truncations at widths `1..=width` agree once every run of equal blocks
/// is capped at the width: absorbing a block into an infinite atom only
/// lengthens a run that is already at least that long.
pub fn truncations_agree(x: &WeightedOrder, y: &WeightedOrder, width: u64) -> bool {
    let capped = |o: &WeightedOrder, n: u64| -> Vec<(u64, u64)> {
        let blocks = o.truncate(n).expect("positive width").blocks;
        let mut runs: Vec<(u64, u64)> = Vec::new();
        for b in blocks {
            match runs.last_mut() {
                Some((v, c)) if *v == b => *c += 1,
                _ => runs.push((b, 1)),
            }
        }
        runs.into_iter().map(|(v, c)| (v, c.min(n))).collect()
    };
    (1..=width).all(|n| capped(x, n) == capped(y, n))
}

/// Inserts a block that an adjacent infinite atom absorbs, if there is one.
pub fn insert_absorbable<R: Rng>(o: &WeightedOrder, rng: &mut R) -> WeightedOrder {
    let spots: Vec<usize> = o
        .atoms()
        .iter()
        .enumerate()
        .filter(|(_, a)| !matches!(a, Atom::Seq(_)))
        .map(|(i, _)| i)
        .collect();
    let mut atoms = o.atoms().to_vec();
    if spots.is_empty() {
        return o.clone();
    }
    let i = spots[rng.gen_range(0..spots.len())];
    match atoms[i].clone() {
        Atom::Omega(d) => atoms.insert(i, Atom::Seq(vec![d])),
        Atom::OmegaStar(d) => atoms.insert(i + 1, Atom::Seq(vec![d])),
        Atom::Seq(_) => unreachable!(),
    }
    WeightedOrder::new(atoms).expect("nonempty atoms")
}

fn criterion_5() -> Outcome {
    const N: usize = 1000;
    let mut r = rng(5);
    for case in 0..N {
        let x = random_order(&mut r, 4);
        let nx = x.normalize();
        ensure(nx.normalize() == nx, || format!("case {case}: normalize not idempotent on {x}"))?;
        ensure(truncations_agree(&x, &nx, 20), || format!("case {case}: truncations of {x} and {nx} differ"))?;
        ensure(oracle::isomorphic(&x, &nx), || format!("case {case}: oracle rejects {x} ~ {nx}"))?;

        let y = isomorphic_variant(&x, &mut r);
        let w = isomorphic_variant(&y, &mut r);
        let z = random_order(&mut r, 4);
        let iso = |a: &WeightedOrder, b: &WeightedOrder| a.is_isomorphic(b);
        ensure(iso(&x, &x), || format!("case {case}: {x} not reflexive"))?;
        ensure(iso(&x, &y) && iso(&y, &w) && iso(&x, &w), || format!("case {case}: variants of {x} not isomorphic"))?;
        ensure(iso(&x, &z) == iso(&z, &x), || format!("case {case}: symmetry fails for {x}, {z}"))?;
        ensure(!(iso(&x, &z) && iso(&z, &w)) || iso(&x, &w), || format!("case {case}: transitivity fails"))?;
        ensure(iso(&x, &z) == oracle::isomorphic(&x, &z), || format!("case {case}: oracle disagrees on {x}, {z}"))?;

        let x2 = insert_absorbable(&x, &mut r);
        ensure(iso(&x2, &z) == iso(&x, &z) && iso(&x2, &x), || format!("case {case}: absorption changes the class of {x}"))?;
    }
    Ok(format!("{N} expressions, each with idempotence, truncation, equivalence and absorption checks"))
}

fn rebase_suite() -> Result<(usize, usize), String> {
    let mut r = rng(6);
    let fields = [PrimeField::new(5).unwrap(), PrimeField::new(7).unwrap(), PrimeField::new(3).unwrap()];
    let (mut general, mut isotropic) = (0, 0);
    for i in 0..150 {
        let n = r.gen_range(2..=6);
        let mut dims: Vec<usize> = (1..n).filter(|_| r.gen_bool(0.5)).collect();
        if dims.is_empty() {
            dims.push(1);
        }
        let err = |e: crate::Error| format!("general instance {i}: {e}");
        if i % 3 == 0 {
            let inst = random_general_instance(&Rationals, n, &dims, &mut r).map_err(err)?;
            rebase_automorphism(&inst.chain, &inst.e, &inst.e2, None).map_err(err)?;
        } else {
            let f = &fields[i % 3];
            let inst = random_general_instance(f, n, &dims, &mut r).map_err(err)?;
            rebase_automorphism(&inst.chain, &inst.e, &inst.e2, None).map_err(err)?;
        }
        general += 1;
    }
    for i in 0..75 {
        let kind = if i % 2 == 0 { FormKind::Symplectic } else { FormKind::Orthogonal };
        let n = match kind {
            FormKind::Symplectic => 2 * r.gen_range(1..=3),
            FormKind::Orthogonal => r.gen_range(2..=7),
        };
        let m = n / 2;
        let mut dims: Vec<usize> = (1..=m).filter(|_| r.gen_bool(0.5)).collect();
        if dims.is_empty() {
            dims.push(1);
        }
        let err = |e: crate::Error| format!("isotropic instance {i}: {e}");
        if i % 5 == 0 {
            let inst = random_isotropic_instance(&Rationals, kind, n, &dims, &mut r).map_err(err)?;
            rebase_automorphism(&inst.chain, &inst.e, &inst.e2, inst.form.as_ref()).map_err(err)?;
        } else {
            let f = &fields[i % 2];
            let inst = random_isotropic_instance(f, kind, n, &dims, &mut r).map_err(err)?;
            rebase_automorphism(&inst.chain, &inst.e, &inst.e2, inst.form.as_ref()).map_err(err)?;
        }
        isotropic += 1;
    }
    Ok((general, isotropic))
}

fn random_shape<R: Rng>(r: &mut R) -> (usize, Vec<usize>) {
    let n = r.gen_range(2..=4);
    let mut dims: Vec<usize> = (1..n).filter(|_| r.gen_bool(0.6)).collect();
    if dims.is_empty() {
        dims.push(1);
    }
    (n, dims)
}

fn compose_suite<F: Field>(f: &F, cases: usize, seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    for case in 0..cases {
        let (n, dims) = random_shape(&mut r);
        let mut phi = random_extension(f, n, &dims, 2, &mut r);
        phi.strict = case % 2 == 0;
        let mut psi = random_extension(f, phi.target_ambient(), &phi.target_dims(), 2, &mut r);
        psi.strict = (case / 2) % 2 == 0;
        let chi = compose_standard_extensions(&psi, &phi).map_err(|e| format!("compose {case}: {e}"))?;
        ensure(chi.strict == (phi.strict == psi.strict), || format!("compose {case}: wrong strictness"))?;
        for s in 0..5 {
            let x = random_point(f, n, &dims, &mut r);
            let lhs = chi.apply(&x).map_err(|e| e.to_string())?;
            let rhs = phi
                .apply(&x)
                .and_then(|y| psi.apply(&y))
                .map_err(|e| e.to_string())?;
            ensure(lhs == rhs, || format!("compose {case}: pointwise mismatch at sample {s}"))?;
        }
        ensure(
            pic_pullback(&chi) == pic_pullback(&phi).then(&pic_pullback(&psi)),
            || format!("compose {case}: Picard pullbacks do not compose"),
        )?;
    }
    Ok(cases)
}

fn triangle_suite<F: Field>(f: &F, cases: usize, seed: u64) -> Result<(usize, usize), String> {
    let mut r = rng(seed);
    let mut adjusted = 0;
    for case in 0..cases {
        let (n, dims) = random_shape(&mut r);
        let phi = random_extension(f, n, &dims, 2, &mut r);
        let psi = random_extension(f, phi.target_ambient(), &phi.target_dims(), 2, &mut r);
        let chi = compose_standard_extensions(&psi, &phi).map_err(|e| e.to_string())?;
        match case % 3 {
            0 => {
                let rep = check_triangle(&phi, &psi, &chi, 3, &mut r);
                ensure(rep.ok && !rep.adjusted, || format!("triangle {case}: {:?}", rep.failures))?;
            }
            1 => {
                let bent = perturb_beta(&phi, &psi, &chi, &mut r).map_err(|e| e.to_string())?;
                let rep = check_triangle(&phi, &bent, &chi, 3, &mut r);
                ensure(rep.ok, || format!("triangle {case} (perturbed): {:?}", rep.failures))?;
                ensure(
                    rep.adjusted_beta.as_ref() == Some(&psi.alpha.render()),
                    || format!("triangle {case}: adjustment did not recover beta"),
                )?;
                adjusted += rep.adjusted as usize;
            }
            _ => {
                let mut tampered = chi.clone();
                let i = tampered.kappa.iter().position(|&k| k >= 1).expect("kappa hits 1");
                tampered.kappa[i] -= 1;
                let rep = check_triangle(&phi, &psi, &tampered, 3, &mut r);
                ensure(
                    !rep.ok && rep.failing_index == Some(i + 1),
                    || format!("triangle {case}: tampering at slot {} not reported", i + 1),
                )?;
            }
        }
    }
    Ok((cases, adjusted))
}

fn criterion_6() -> Outcome {
    let (general, isotropic) = rebase_suite()?;
    ensure(general + isotropic >= 200 && isotropic >= 50, || "too few rebase instances".into())?;
    let f7 = PrimeField::new(7).unwrap();
    let composed = compose_suite(&f7, 80, 61)? + compose_suite(&Rationals, 40, 62)?;
    let (t1, a1) = triangle_suite(&f7, 90, 63)?;
    let (t2, a2) = triangle_suite(&Rationals, 30, 64)?;
    ensure(a1 + a2 > 0, || "no triangle exercised the adjustment".into())?;
    Ok(format!(
        "{} rebase ({isotropic} isotropic), {composed} compositions, {} triangles ({} adjusted)",
        general + isotropic,
        t1 + t2,
        a1 + a2
    ))
}

fn criterion_7() -> Outcome {
    const N: usize = 500;
    let mut r = rng(7);
    let mut iso = 0;
    for case in 0..N {
        let x = random_descriptor(&mut r);
        let y = match case % 4 {
            0 => descriptor_variant(&x.dual().descriptor, &mut r),
            1 => descriptor_variant(&x, &mut r),
            _ => random_descriptor(&mut r),
        };
        let show = |d: &crate::Result<crate::decision::DecisionResult>| match d {
            Ok(v) => format!("{:?}/{:?}", v.verdict, v.reason),
            Err(e) => format!("error: {e}"),
        };
        let a = decide_ind(&x, &y);
        let yy = y.dual().descriptor.dual().descriptor;
        let b = decide_ind(&x, &yy);
        let c = decide_ind(&y, &x);
        ensure(show(&a) == show(&b), || format!("case {case}: {x} vs {y}: dual twice changes the decision"))?;
        ensure(show(&a) == show(&c), || format!("case {case}: {x} vs {y}: not symmetric"))?;
        if a.as_ref().is_ok_and(|d| d.is_isomorphic()) {
            iso += 1;
        }
    }
    Ok(format!("{N} pairs, {iso} isomorphic"))
}

use flagiso::acceptance::{insert_absorbable, truncations_agree};
use flagiso::counting::poincare_polynomial;
use flagiso::decision::{decide_ind, decide_ind_grassmannian};
use flagiso::linalg::{Form, FormKind, PrimeField, Subspace};
use flagiso::oracle;
use flagiso::order::{BlockSize, Cardinality};
use flagiso::sample::{
    all_varieties, descriptor_variant, isomorphic_variant, random_descriptor, random_order,
    random_subspace, rng,
};
use flagiso::witness::extension::exhaustion_step;
use flagiso::{FlagDescriptor, Middle, WeightedOrder};
use proptest::prelude::*;
use rand::Rng;

fn order(seed: u64) -> WeightedOrder {
    random_order(&mut rng(seed), 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn normalize_is_idempotent_and_sound(seed in any::<u64>()) {
        let x = order(seed);
        let n = x.normalize();
        prop_assert_eq!(n.normalize(), n.clone());
        prop_assert!(n.is_normalized());
        prop_assert!(oracle::isomorphic(&x, &n));
        prop_assert!(truncations_agree(&x, &n, 20));
    }

    #[test]
    fn isomorphism_is_an_equivalence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_order(&mut r, 4);
        let y = isomorphic_variant(&x, &mut r);
        let z = random_order(&mut r, 4);
        prop_assert!(x.is_isomorphic(&x));
        prop_assert!(x.is_isomorphic(&y) && y.is_isomorphic(&x));
        prop_assert_eq!(x.is_isomorphic(&z), z.is_isomorphic(&x));
        prop_assert_eq!(y.is_isomorphic(&z), x.is_isomorphic(&z));
        prop_assert_eq!(x.is_isomorphic(&z), oracle::isomorphic(&x, &z));
    }

    #[test]
    fn absorbable_blocks_do_not_change_the_class(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_order(&mut r, 4);
        let x2 = insert_absorbable(&x, &mut r);
        let z = random_order(&mut r, 4);
        prop_assert!(x.is_isomorphic(&x2));
        prop_assert_eq!(x.is_isomorphic(&z), x2.is_isomorphic(&z));
    }

    #[test]
    fn reverse_is_an_involution_compatible_with_isomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_order(&mut r, 4);
        let z = random_order(&mut r, 4);
        prop_assert_eq!(x.reverse().reverse(), x.clone());
        prop_assert_eq!(x.is_isomorphic(&z), x.reverse().is_isomorphic(&z.reverse()));
        prop_assert_eq!(x.total_dimension(), x.reverse().total_dimension());
    }

    #[test]
    fn isotropic_full_chains_are_self_dual(seed in any::<u64>()) {
        let d = random_descriptor(&mut rng(seed));
        let chain = d.full_chain();
        if d.is_isotropic() {
            prop_assert!(chain.is_isomorphic(&chain.reverse()));
        }
        prop_assert_eq!(d.pic_rank(), d.dual().descriptor.pic_rank());
    }

    #[test]
    fn truncations_embed_by_exhaustion_steps(seed in any::<u64>(), n in 1u64..6) {
        let d = random_descriptor(&mut rng(seed));
        let f = flagiso::linalg::Rationals;
        let step = exhaustion_step(&f, &d, n).unwrap();
        let (small, _) = d.sample(n).unwrap();
        let (large, _) = d.sample(n + 1).unwrap();
        prop_assert_eq!(step.source_ambient as u64, small.ambient);
        prop_assert_eq!(step.target_ambient() as u64, large.ambient);
        let want: Vec<usize> = large.dims.iter().map(|&x| x as usize).collect();
        prop_assert_eq!(step.target_dims(), want);
    }

    #[test]
    fn decisions_are_symmetric_and_stable_under_double_dual(seed in any::<u64>(), mode in 0u8..3) {
        let mut r = rng(seed);
        let x = random_descriptor(&mut r);
        let y = match mode {
            0 => descriptor_variant(&x.dual().descriptor, &mut r),
            1 => descriptor_variant(&x, &mut r),
            _ => random_descriptor(&mut r),
        };
        let a = decide_ind(&x, &y).unwrap();
        let b = decide_ind(&y, &x).unwrap();
        let yy = y.dual().descriptor.dual().descriptor;
        let c = decide_ind(&x, &yy).unwrap();
        prop_assert_eq!((a.verdict, a.reason), (b.verdict, b.reason));
        prop_assert_eq!((a.verdict, a.reason), (c.verdict, c.reason));
        if mode == 1 {
            prop_assert!(a.is_isomorphic());
        }
    }
}

fn grassmannian(seed: u64) -> FlagDescriptor {
    let mut r = rng(seed);
    let sizes = [BlockSize::Finite(1), BlockSize::Finite(2), BlockSize::Inf];
    loop {
        let a = sizes[r.gen_range(0..3)];
        let b = sizes[r.gen_range(0..3)];
        let d = match r.gen_range(0..3) {
            0 => FlagDescriptor::General(WeightedOrder::seq([a, b]).unwrap()),
            1 => FlagDescriptor::Orthogonal {
                half: WeightedOrder::seq([a]).unwrap(),
                middle: [Middle::Empty, Middle::Block(BlockSize::Finite(1)), Middle::Block(BlockSize::Inf)][r.gen_range(0..3)],
            },
            _ => FlagDescriptor::Symplectic {
                half: WeightedOrder::seq([a]).unwrap(),
                middle: [Middle::Empty, Middle::Block(BlockSize::Finite(2)), Middle::Block(BlockSize::Inf)][r.gen_range(0..3)],
            },
        };
        if d.validate().is_ok() && d.threshold().is_ok() {
            assert_eq!(d.pic_rank(), Cardinality::Finite(1));
            return d;
        }
    }
}


proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn grassmannian_route_agrees(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (x, y) = (grassmannian(s1), grassmannian(s2));
        let a = decide_ind(&x, &y).unwrap();
        let b = decide_ind_grassmannian(&x, &y).unwrap();
        prop_assert_eq!(a.verdict, b.verdict, "{} vs {}", x, y);
    }
}

#[test]
fn poincare_polynomials_are_palindromic() {
    for v in all_varieties(8, false) {
        let p = poincare_polynomial(&v).unwrap();
        assert!(p.is_palindromic(), "{v}: {p}");
    }
}

#[test]
fn double_perp_and_dimension_formula() {
    let f = PrimeField::new(3).unwrap();
    let mut r = rng(99);
    let forms = [
        Form::standard(&f, FormKind::Symplectic, 6).unwrap(),
        Form::standard(&f, FormKind::Orthogonal, 6).unwrap(),
        Form::standard(&f, FormKind::Orthogonal, 5).unwrap(),
    ];
    for i in 0..500 {
        let g = &forms[i % 3];
        let n = g.dim();
        let k = r.gen_range(0..=n);
        let s = random_subspace(&f, n, k, &mut r);
        let p = g.perp(&s).unwrap();
        assert_eq!(s.dim() + p.dim(), n);
        assert_eq!(g.perp(&p).unwrap(), s);
    }
    let zero = Subspace::zero(&f, 6);
    assert_eq!(forms[0].perp(&zero).unwrap(), Subspace::whole(&f, 6));
    let lagrangian = Subspace::coordinate(&f, 6, &[0, 1, 2]);
    assert_eq!(forms[0].perp(&lagrangian).unwrap(), lagrangian);
}

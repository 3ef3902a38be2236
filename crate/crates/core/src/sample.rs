//! Seeded random generators for expressions, descriptors, varieties and
//! matrices.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::flag::{FiniteFlagVariety, FlagDescriptor, LieType, Middle};
use crate::linalg::{Field, Matrix, Subspace};
use crate::order::{Atom, BlockSize, WeightedOrder};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_elem<F: Field, R: Rng>(f: &F, rng: &mut R) -> F::Elem {
    f.from_i64(rng.gen_range(-4..=4))
}

pub fn random_nonzero<F: Field, R: Rng>(f: &F, rng: &mut R) -> F::Elem {
    loop {
        let x = random_elem(f, rng);
        if !f.is_zero(&x) {
            return x;
        }
    }
}

pub fn random_matrix<F: Field, R: Rng>(f: &F, rows: usize, cols: usize, rng: &mut R) -> Matrix<F> {
    let data = (0..rows)
        .map(|_| (0..cols).map(|_| random_elem(f, rng)).collect())
        .collect();
    Matrix::from_rows(f, cols, data).expect("shape")
}

pub fn random_invertible<F: Field, R: Rng>(f: &F, n: usize, rng: &mut R) -> Matrix<F> {
    loop {
        let m = random_matrix(f, n, n, rng);
        if m.is_invertible() {
            return m;
        }
    }
}

/// A matrix with `rows` linearly independent rows.
pub fn random_injective<F: Field, R: Rng>(f: &F, rows: usize, cols: usize, rng: &mut R) -> Matrix<F> {
    assert!(rows <= cols);
    loop {
        let m = random_matrix(f, rows, cols, rng);
        if m.rank() == rows {
            return m;
        }
    }
}

pub fn random_subspace<F: Field, R: Rng>(f: &F, n: usize, k: usize, rng: &mut R) -> Subspace<F> {
    Subspace::span(&random_injective(f, k, n, rng))
}

fn random_size<R: Rng>(rng: &mut R) -> BlockSize {
    match rng.gen_range(0..5) {
        0 | 1 => BlockSize::Finite(1),
        2 => BlockSize::Finite(2),
        3 => BlockSize::Finite(3),
        _ => BlockSize::Inf,
    }
}

fn random_atom<R: Rng>(rng: &mut R) -> Atom {
    match rng.gen_range(0..4) {
        0 | 1 => Atom::Seq((0..rng.gen_range(1..=3)).map(|_| random_size(rng)).collect()),
        2 => Atom::Omega(random_size(rng)),
        _ => Atom::OmegaStar(random_size(rng)),
    }
}

/// An order expression with one to `max_atoms` atoms over a small weight
/// alphabet, so that nontrivial isomorphisms are common.
pub fn random_order<R: Rng>(rng: &mut R, max_atoms: usize) -> WeightedOrder {
    let n = rng.gen_range(1..=max_atoms.max(1));
    WeightedOrder::new((0..n).map(|_| random_atom(rng)).collect()).expect("nonempty atoms")
}

/// Rewrites `o` into an isomorphic expression by splitting sequences,
/// inserting absorbable blocks and unrolling infinite atoms.
pub fn isomorphic_variant<R: Rng>(o: &WeightedOrder, rng: &mut R) -> WeightedOrder {
    let mut atoms = Vec::new();
    for a in o.atoms() {
        match a {
            Atom::Seq(s) if s.len() > 1 && rng.gen_bool(0.5) => {
                let cut = rng.gen_range(1..s.len());
                atoms.push(Atom::Seq(s[..cut].to_vec()));
                atoms.push(Atom::Seq(s[cut..].to_vec()));
            }
            Atom::Omega(d) if rng.gen_bool(0.5) => {
                atoms.push(Atom::Seq(vec![*d; rng.gen_range(1..=2)]));
                atoms.push(Atom::Omega(*d));
            }
            Atom::OmegaStar(d) if rng.gen_bool(0.5) => {
                atoms.push(Atom::OmegaStar(*d));
                atoms.push(Atom::Seq(vec![*d; rng.gen_range(1..=2)]));
            }
            other => atoms.push(other.clone()),
        }
    }
    WeightedOrder::new(atoms).expect("nonempty atoms")
}

fn random_middle<R: Rng>(rng: &mut R, symplectic: bool) -> Middle {
    let choices: &[Middle] = if symplectic {
        &[
            Middle::Empty,
            Middle::Block(BlockSize::Finite(2)),
            Middle::Block(BlockSize::Inf),
        ]
    } else {
        &[
            Middle::Empty,
            Middle::Block(BlockSize::Finite(1)),
            Middle::Block(BlockSize::Finite(3)),
            Middle::Block(BlockSize::Inf),
        ]
    };
    *choices.choose(rng).unwrap()
}

/// A valid descriptor of any form type.
pub fn random_descriptor<R: Rng>(rng: &mut R) -> FlagDescriptor {
    loop {
        let d = match rng.gen_range(0..3) {
            0 => FlagDescriptor::General(random_order(rng, 3)),
            1 => FlagDescriptor::Orthogonal {
                half: random_order(rng, 2),
                middle: random_middle(rng, false),
            },
            _ => FlagDescriptor::Symplectic {
                half: random_order(rng, 2),
                middle: random_middle(rng, true),
            },
        };
        if d.validate().is_ok() && d.threshold().is_ok() {
            return d;
        }
    }
}

/// All valid varieties with ambient dimension at most `max_ambient`.
/// With `hypotheses`, only those satisfying the standing hypotheses of the
/// finite classification.
pub fn all_varieties(max_ambient: u64, hypotheses: bool) -> Vec<FiniteFlagVariety> {
    let mut out = Vec::new();
    for lie_type in [LieType::A, LieType::B, LieType::C, LieType::D] {
        for ambient in 1..=max_ambient {
            let top = match lie_type {
                LieType::A => ambient.saturating_sub(1),
                _ => ambient / 2,
            };
            for mask in 1u64..(1 << top) {
                let dims: Vec<u64> = (1..=top).filter(|d| mask >> (d - 1) & 1 == 1).collect();
                let Ok(v) = FiniteFlagVariety::new(lie_type, ambient, dims) else {
                    continue;
                };
                if !hypotheses || v.standing_hypotheses().is_ok() {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// An isomorphic rewrite of the descriptor's orders.
pub fn descriptor_variant<R: Rng>(d: &FlagDescriptor, rng: &mut R) -> FlagDescriptor {
    match d {
        FlagDescriptor::General(o) => FlagDescriptor::General(isomorphic_variant(o, rng)),
        FlagDescriptor::Orthogonal { half, middle } => FlagDescriptor::Orthogonal {
            half: isomorphic_variant(half, rng),
            middle: *middle,
        },
        FlagDescriptor::Symplectic { half, middle } => FlagDescriptor::Symplectic {
            half: isomorphic_variant(half, rng),
            middle: *middle,
        },
    }
}

//! Weighted linear orders.
//!
//! A generalized flag compatible with a basis is determined, up to
//! isomorphism, by the order type of its chain of gaps together with the
//! dimension of every gap. This module represents the orders that are finite
//! concatenations of three kinds of atoms:
//!
//! * `seq[d1,...,dk]`, a finite chain of blocks,
//! * `omega(d)`, an ω-chain with constant block size `d`,
//! * `omegastar(d)`, an ω*-chain (reversed ω) with constant block size `d`,
//!
//! where a block size is a positive integer or `inf` (countably infinite).
//!
//! Normalization rewrites an expression with three rules:
//!
//! 1. adjacent `seq` atoms are merged;
//! 2. a trailing entry `d` of a `seq` is absorbed by an immediately following
//!    `omega(d)` (1 + ω = ω);
//! 3. a leading entry `d` of a `seq` is absorbed by an immediately preceding
//!    `omegastar(d)` (ω* + 1 = ω*).
//!
//! Two expressions denote isomorphic weighted orders iff their normal forms
//! are structurally equal.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Dimension of one gap of a flag: a positive integer or ℵ₀.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockSize {
    Finite(u64),
    Inf,
}

impl BlockSize {
    pub fn is_finite(self) -> bool {
        matches!(self, BlockSize::Finite(_))
    }

    /// The finite sample of this block at truncation width `n`.
    pub fn clip(self, n: u64) -> u64 {
        match self {
            BlockSize::Finite(d) => d,
            BlockSize::Inf => n,
        }
    }

    pub fn to_cardinality(self) -> Cardinality {
        match self {
            BlockSize::Finite(d) => Cardinality::Finite(d),
            BlockSize::Inf => Cardinality::Aleph0,
        }
    }
}

impl fmt::Display for BlockSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockSize::Finite(d) => write!(f, "{d}"),
            BlockSize::Inf => f.write_str("inf"),
        }
    }
}

/// A dimension that is either finite or ℵ₀.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cardinality {
    Finite(u64),
    Aleph0,
}

impl Cardinality {
    pub fn is_finite(self) -> bool {
        matches!(self, Cardinality::Finite(_))
    }

    pub fn add(self, other: Cardinality) -> Cardinality {
        match (self, other) {
            (Cardinality::Finite(a), Cardinality::Finite(b)) => Cardinality::Finite(a + b),
            _ => Cardinality::Aleph0,
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(d) => write!(f, "{d}"),
            Cardinality::Aleph0 => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Seq(Vec<BlockSize>),
    Omega(BlockSize),
    OmegaStar(BlockSize),
}

impl Atom {
    pub fn is_infinite(&self) -> bool {
        !matches!(self, Atom::Seq(_))
    }

    fn reversed(&self) -> Atom {
        match self {
            Atom::Seq(s) => Atom::Seq(s.iter().rev().copied().collect()),
            Atom::Omega(d) => Atom::OmegaStar(*d),
            Atom::OmegaStar(d) => Atom::Omega(*d),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Seq(s) => {
                f.write_str("seq[")?;
                for (i, d) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{d}")?;
                }
                f.write_str("]")
            }
            Atom::Omega(d) => write!(f, "omega({d})"),
            Atom::OmegaStar(d) => write!(f, "omegastar({d})"),
        }
    }
}

/// Where a block of a truncation came from in the original expression.
///
/// `offset` is the entry index for a `seq` atom, the distance from the start
/// for an `omega` atom and the distance from the end (0 = last block) for an
/// `omegastar` atom. Positions are stable across truncation widths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Position {
    pub atom: usize,
    pub offset: u64,
}

/// Finite sample of a weighted order at some width.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub blocks: Vec<u64>,
    pub positions: Vec<Position>,
}

impl Truncation {
    pub fn total(&self) -> u64 {
        self.blocks.iter().sum()
    }
}

/// A finite expression denoting a countable weighted linear order.
///
/// Atoms are concatenated left to right, smaller elements first. The list is
/// never empty and every `seq` is nonempty with positive finite entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightedOrder {
    atoms: Vec<Atom>,
}

impl WeightedOrder {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Malformed("order has no atoms".into()));
        }
        for (i, atom) in atoms.iter().enumerate() {
            let sizes: &[BlockSize] = match atom {
                Atom::Seq(s) if s.is_empty() => {
                    return Err(Error::Malformed(format!("atom {i}: empty seq[]")))
                }
                Atom::Seq(s) => s,
                Atom::Omega(d) | Atom::OmegaStar(d) => std::slice::from_ref(d),
            };
            if sizes.contains(&BlockSize::Finite(0)) {
                return Err(Error::Malformed(format!("atom {i}: block size 0")));
            }
        }
        Ok(WeightedOrder { atoms })
    }

    /// Finite chain of the given block sizes.
    pub fn seq(blocks: impl IntoIterator<Item = BlockSize>) -> Result<Self> {
        Self::new(vec![Atom::Seq(blocks.into_iter().collect())])
    }

    pub fn omega(d: BlockSize) -> Result<Self> {
        Self::new(vec![Atom::Omega(d)])
    }

    pub fn omega_star(d: BlockSize) -> Result<Self> {
        Self::new(vec![Atom::OmegaStar(d)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn concat(&self, other: &WeightedOrder) -> WeightedOrder {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        WeightedOrder { atoms }
    }

    /// True iff the order is a finite chain (no ω or ω* atom).
    pub fn is_finite_chain(&self) -> bool {
        self.atoms.iter().all(|a| !a.is_infinite())
    }

    /// The blocks of a finite chain, `None` if an infinite atom occurs.
    pub fn finite_blocks(&self) -> Option<Vec<BlockSize>> {
        let mut out = Vec::new();
        for atom in &self.atoms {
            match atom {
                Atom::Seq(s) => out.extend_from_slice(s),
                _ => return None,
            }
        }
        Some(out)
    }

    pub fn normalize(&self) -> WeightedOrder {
        let mut atoms = self.atoms.clone();
        loop {
            let absorbed = absorb_to_fixpoint(&mut atoms);
            let merged = merge_adjacent_seqs(&mut atoms);
            if !absorbed && !merged {
                break;
            }
        }
        WeightedOrder { atoms }
    }

    pub fn is_normalized(&self) -> bool {
        self.normalize() == *self
    }

    pub fn is_isomorphic(&self, other: &WeightedOrder) -> bool {
        self.normalize() == other.normalize()
    }

    /// The dual chain: order reversed, block sizes kept.
    pub fn reverse(&self) -> WeightedOrder {
        WeightedOrder {
            atoms: self.atoms.iter().rev().map(Atom::reversed).collect(),
        }
    }

    pub fn total_dimension(&self) -> Cardinality {
        self.atoms.iter().fold(Cardinality::Finite(0), |acc, atom| match atom {
            Atom::Seq(s) => s.iter().fold(acc, |a, d| a.add(d.to_cardinality())),
            _ => Cardinality::Aleph0,
        })
    }

    /// Samples the first `n` blocks of every ω, the last `n` blocks of every
    /// ω*, and clips every infinite block to `n`.
    pub fn truncate(&self, n: u64) -> Result<Truncation> {
        if n == 0 {
            return Err(Error::Domain("truncation width must be positive".into()));
        }
        let mut blocks = Vec::new();
        let mut positions = Vec::new();
        for (ai, atom) in self.atoms.iter().enumerate() {
            match atom {
                Atom::Seq(s) => {
                    for (k, d) in s.iter().enumerate() {
                        blocks.push(d.clip(n));
                        positions.push(Position {
                            atom: ai,
                            offset: k as u64,
                        });
                    }
                }
                Atom::Omega(d) => {
                    for k in 0..n {
                        blocks.push(d.clip(n));
                        positions.push(Position { atom: ai, offset: k });
                    }
                }
                Atom::OmegaStar(d) => {
                    for k in (0..n).rev() {
                        blocks.push(d.clip(n));
                        positions.push(Position { atom: ai, offset: k });
                    }
                }
            }
        }
        Ok(Truncation { blocks, positions })
    }

    /// Block-wise embedding of the width-`n` truncation into the width-`n+1`
    /// truncation: entry `i` is the index of the block at width `n + 1` with
    /// the same position as block `i` at width `n`.
    pub fn truncation_embedding(&self, n: u64) -> Result<Vec<usize>> {
        let small = self.truncate(n)?;
        let large = self.truncate(n + 1)?;
        let index: HashMap<Position, usize> = large
            .positions
            .iter()
            .enumerate()
            .map(|(i, p)| (*p, i))
            .collect();
        Ok(small.positions.iter().map(|p| index[p]).collect())
    }
}

impl fmt::Display for WeightedOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for WeightedOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        crate::syntax::parse_order(s)
    }
}

fn absorb_to_fixpoint(atoms: &mut Vec<Atom>) -> bool {
    let mut any = false;
    loop {
        let mut changed = false;
        for i in 0..atoms.len() {
            let next = atoms.get(i + 1).cloned();
            let prev = if i > 0 { atoms.get(i - 1).cloned() } else { None };
            if let Atom::Seq(s) = &mut atoms[i] {
                if let Some(Atom::Omega(d)) = next {
                    while s.last() == Some(&d) {
                        s.pop();
                        changed = true;
                    }
                }
                if let Some(Atom::OmegaStar(d)) = prev {
                    let lead = s.iter().take_while(|&&x| x == d).count();
                    if lead > 0 {
                        s.drain(..lead);
                        changed = true;
                    }
                }
            }
        }
        atoms.retain(|a| !matches!(a, Atom::Seq(s) if s.is_empty()));
        if !changed {
            return any;
        }
        any = true;
    }
}

fn merge_adjacent_seqs(atoms: &mut Vec<Atom>) -> bool {
    let mut merged = false;
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for atom in atoms.drain(..) {
        match (out.last_mut(), atom) {
            (Some(Atom::Seq(prev)), Atom::Seq(s)) => {
                prev.extend(s);
                merged = true;
            }
            (_, atom) => out.push(atom),
        }
    }
    *atoms = out;
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use BlockSize::{Finite as F, Inf};

    fn ord(s: &str) -> WeightedOrder {
        s.parse().unwrap()
    }

    #[test]
    fn absorption_into_omega() {
        assert_eq!(ord("seq[3] + omega(3)").normalize(), ord("omega(3)"));
        assert_eq!(
            ord("omega(3) + seq[3]").normalize(),
            ord("omega(3) + seq[3]")
        );
        assert_eq!(
            ord("seq[1] + seq[2,2] + omega(2)").normalize(),
            ord("seq[1] + omega(2)")
        );
    }

    #[test]
    fn absorption_into_omegastar_and_inf_weights() {
        assert_eq!(
            ord("omegastar(inf) + seq[inf,inf,4]").normalize(),
            ord("omegastar(inf) + seq[4]")
        );
        assert_eq!(
            ord("omegastar(2) + seq[2] + omega(2)").normalize(),
            ord("omegastar(2) + omega(2)")
        );
    }

    #[test]
    fn isomorphism_examples() {
        assert!(ord("seq[1] + seq[inf]").is_isomorphic(&ord("seq[1,inf]")));
        assert!(!ord("omega(1)").is_isomorphic(&ord("omegastar(1)")));
        assert!(ord("seq[2] + omega(2)").is_isomorphic(&ord("omega(2)")));
        assert!(!ord("omega(1) + seq[1]").is_isomorphic(&ord("omega(1)")));
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(ord("seq[1,inf]").reverse(), ord("seq[inf,1]"));
        assert_eq!(ord("omega(2)").reverse(), ord("omegastar(2)"));
        let pal = ord("omegastar(1) + seq[5] + omega(1)");
        assert_eq!(pal.reverse(), pal);
    }

    #[test]
    fn truncation_examples() {
        assert_eq!(ord("seq[1,inf]").truncate(3).unwrap().blocks, vec![1, 3]);
        assert_eq!(ord("omega(1)").truncate(4).unwrap().blocks, vec![1, 1, 1, 1]);
        // final segment of ω* followed by one block
        assert_eq!(
            ord("omegastar(2) + seq[1]").truncate(2).unwrap().blocks,
            vec![2, 2, 1]
        );
        assert!(ord("seq[1]").truncate(0).is_err());
    }

    #[test]
    fn truncation_embedding_is_monotone() {
        let x = ord("omegastar(inf) + seq[2,inf] + omega(1)");
        for n in 1..8 {
            let small = x.truncate(n).unwrap();
            let large = x.truncate(n + 1).unwrap();
            let emb = x.truncation_embedding(n).unwrap();
            assert!(emb.windows(2).all(|w| w[0] < w[1]));
            for (i, &j) in emb.iter().enumerate() {
                assert!(small.blocks[i] <= large.blocks[j]);
                assert_eq!(small.positions[i], large.positions[j]);
            }
        }
    }

    #[test]
    fn total_dimension_examples() {
        assert_eq!(ord("seq[1,2,3]").total_dimension(), Cardinality::Finite(6));
        assert_eq!(ord("seq[1,inf]").total_dimension(), Cardinality::Aleph0);
        assert_eq!(ord("omega(1)").total_dimension(), Cardinality::Aleph0);
    }

    #[test]
    fn malformed_expressions_are_rejected() {
        assert!(matches!(
            WeightedOrder::new(vec![Atom::Seq(vec![])]),
            Err(Error::Malformed(_))
        ));
        assert!(WeightedOrder::new(vec![]).is_err());
        assert!(WeightedOrder::new(vec![Atom::Omega(F(0))]).is_err());
        assert!(WeightedOrder::seq([F(1), Inf]).is_ok());
    }
}

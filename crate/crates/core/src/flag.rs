//! Flag descriptors and finite flag varieties.

use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result, Violation};
use crate::order::{Atom, BlockSize, Cardinality, Position, WeightedOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormType {
    General,
    Orthogonal,
    Symplectic,
}

impl fmt::Display for FormType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormType::General => "gen",
            FormType::Orthogonal => "orth",
            FormType::Symplectic => "symp",
        })
    }
}

/// The gap `F^⊥/F` at the center of an isotropic flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Middle {
    Empty,
    Block(BlockSize),
}

impl Middle {
    pub fn codim(self) -> Cardinality {
        match self {
            Middle::Empty => Cardinality::Finite(0),
            Middle::Block(d) => d.to_cardinality(),
        }
    }

    fn clip(self, n: u64) -> u64 {
        match self {
            Middle::Empty => 0,
            Middle::Block(BlockSize::Inf) => 2 * n,
            Middle::Block(BlockSize::Finite(d)) => d,
        }
    }
}

impl fmt::Display for Middle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Middle::Empty => f.write_str("empty"),
            Middle::Block(d) => write!(f, "{d}"),
        }
    }
}

/// Isomorphism class of a generalized flag, general or isotropic.
///
/// An isotropic descriptor stores only the strictly isotropic half of the
/// chain; the full chain is `half + middle + reverse(half)`, so it is
/// self-dual by construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FlagDescriptor {
    General(WeightedOrder),
    Orthogonal { half: WeightedOrder, middle: Middle },
    Symplectic { half: WeightedOrder, middle: Middle },
}

/// Output of [`FlagDescriptor::dual`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dual {
    pub descriptor: FlagDescriptor,
    /// Set when the input was isotropic and therefore returned as is.
    pub unchanged_isotropic: bool,
}

impl FlagDescriptor {
    pub fn new_general(order: WeightedOrder) -> Result<Self> {
        Self::checked(FlagDescriptor::General(order))
    }

    pub fn new_orthogonal(half: WeightedOrder, middle: Middle) -> Result<Self> {
        Self::checked(FlagDescriptor::Orthogonal { half, middle })
    }

    pub fn new_symplectic(half: WeightedOrder, middle: Middle) -> Result<Self> {
        Self::checked(FlagDescriptor::Symplectic { half, middle })
    }

    fn checked(d: FlagDescriptor) -> Result<Self> {
        d.validate().map_err(Error::Invalid)?;
        Ok(d)
    }

    pub fn form(&self) -> FormType {
        match self {
            FlagDescriptor::General(_) => FormType::General,
            FlagDescriptor::Orthogonal { .. } => FormType::Orthogonal,
            FlagDescriptor::Symplectic { .. } => FormType::Symplectic,
        }
    }

    pub fn is_isotropic(&self) -> bool {
        self.form() != FormType::General
    }

    /// `(half, middle)` of an isotropic descriptor.
    pub fn isotropic_parts(&self) -> Option<(&WeightedOrder, Middle)> {
        match self {
            FlagDescriptor::General(_) => None,
            FlagDescriptor::Orthogonal { half, middle }
            | FlagDescriptor::Symplectic { half, middle } => Some((half, *middle)),
        }
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut v = Vec::new();
        if self.full_chain().total_dimension().is_finite() {
            v.push(Violation::new(
                "total-dimension",
                "the full chain must have total dimension inf",
            ));
        }
        match self {
            FlagDescriptor::General(order) => {
                if order.finite_blocks().is_some_and(|b| b.len() < 2) {
                    v.push(Violation::new(
                        "proper-member",
                        "a general flag needs at least one proper member (two or more blocks)",
                    ));
                }
            }
            FlagDescriptor::Symplectic { middle, .. } => {
                if let Middle::Block(BlockSize::Finite(d)) = middle {
                    if d % 2 == 1 {
                        v.push(Violation::new(
                            "symplectic-middle",
                            "symplectic middle must be even or INF",
                        ));
                    }
                }
            }
            FlagDescriptor::Orthogonal { half, middle } => {
                if *middle == Middle::Block(BlockSize::Finite(2)) {
                    v.push(Violation::new(
                        "orthogonal-middle",
                        format!(
                            "orthogonal middle of dimension 2 is not allowed as stated: refine the \
                             flag by one of the two maximal isotropic subspaces, i.e. use \
                             'orth: half={}; middle=empty'",
                            half.concat(&WeightedOrder::seq([BlockSize::Finite(1)]).unwrap())
                        ),
                    ));
                }
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    /// The whole chain, smallest member first. Not normalized.
    pub fn full_chain(&self) -> WeightedOrder {
        match self {
            FlagDescriptor::General(order) => order.clone(),
            FlagDescriptor::Orthogonal { half, middle }
            | FlagDescriptor::Symplectic { half, middle } => {
                let mut chain = half.clone();
                if let Middle::Block(d) = middle {
                    chain = chain.concat(&WeightedOrder::seq([*d]).unwrap());
                }
                chain.concat(&half.reverse())
            }
        }
    }

    pub fn dual(&self) -> Dual {
        match self {
            FlagDescriptor::General(order) => Dual {
                descriptor: FlagDescriptor::General(order.reverse()),
                unchanged_isotropic: false,
            },
            _ => Dual {
                descriptor: self.clone(),
                unchanged_isotropic: true,
            },
        }
    }

    /// Rank of the Picard group: the number of proper members for a
    /// general flag, the number of ⊥-orbits of proper members for an
    /// isotropic one.
    pub fn pic_rank(&self) -> Cardinality {
        match self {
            FlagDescriptor::General(order) => match order.finite_blocks() {
                Some(b) => Cardinality::Finite(b.len().saturating_sub(1) as u64),
                None => Cardinality::Aleph0,
            },
            FlagDescriptor::Orthogonal { half, .. } | FlagDescriptor::Symplectic { half, .. } => {
                match half.finite_blocks() {
                    Some(b) => Cardinality::Finite(b.len() as u64),
                    None => Cardinality::Aleph0,
                }
            }
        }
    }

    pub fn middle_codim(&self) -> Result<Cardinality> {
        match self.isotropic_parts() {
            Some((_, m)) => Ok(m.codim()),
            None => Err(Error::Domain(
                "middle codimension is defined only for isotropic descriptors".into(),
            )),
        }
    }

    /// The chain whose truncations give the `dims` of the finite varieties:
    /// the whole order for general flags, the half for isotropic ones.
    pub fn sampled_chain(&self) -> &WeightedOrder {
        match self {
            FlagDescriptor::General(order) => order,
            FlagDescriptor::Orthogonal { half, .. } | FlagDescriptor::Symplectic { half, .. } => {
                half
            }
        }
    }

    /// Finite variety at width `n` together with the position of every
    /// sampled block; no threshold check.
    pub fn sample(&self, n: u64) -> Result<(FiniteFlagVariety, Vec<Position>)> {
        let t = self.sampled_chain().truncate(n)?;
        let mut dims = Vec::with_capacity(t.blocks.len());
        let mut acc = 0;
        for b in &t.blocks {
            acc += b;
            dims.push(acc);
        }
        let v = match self {
            FlagDescriptor::General(_) => {
                let ambient = dims.pop().unwrap_or(0);
                FiniteFlagVariety {
                    lie_type: LieType::A,
                    ambient,
                    dims,
                }
            }
            FlagDescriptor::Orthogonal { middle, .. } => {
                let mid = middle.clip(n);
                FiniteFlagVariety {
                    lie_type: if mid % 2 == 1 { LieType::B } else { LieType::D },
                    ambient: 2 * acc + mid,
                    dims,
                }
            }
            FlagDescriptor::Symplectic { middle, .. } => FiniteFlagVariety {
                lie_type: LieType::C,
                ambient: 2 * acc + middle.clip(n),
                dims,
            },
        };
        Ok((v, t.positions))
    }

    /// Smallest width whose truncation is a valid variety satisfying the
    /// standing hypotheses of the finite classification.
    pub fn threshold(&self) -> Result<u64> {
        const SEARCH_LIMIT: u64 = 64;
        for n in 1..=SEARCH_LIMIT {
            let (v, _) = self.sample(n)?;
            if v.validate().is_ok() && v.standing_hypotheses().is_ok() {
                return Ok(n);
            }
        }
        Err(Error::Domain(format!(
            "no truncation width up to {SEARCH_LIMIT} meets the thresholds"
        )))
    }

    pub fn truncate_to_variety(&self, n: u64) -> Result<FiniteFlagVariety> {
        self.validate().map_err(Error::Invalid)?;
        let n0 = self.threshold()?;
        if n < n0 {
            return Err(Error::BelowThreshold { n, n0 });
        }
        let (v, _) = self.sample(n)?;
        v.validate().map_err(Error::Invalid)?;
        v.standing_hypotheses().map_err(Error::Hypothesis)?;
        Ok(v)
    }
}

impl fmt::Display for FlagDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlagDescriptor::General(order) => write!(f, "gen: {order}"),
            FlagDescriptor::Orthogonal { half, middle } => {
                write!(f, "orth: half={half}; middle={middle}")
            }
            FlagDescriptor::Symplectic { half, middle } => {
                write!(f, "symp: half={half}; middle={middle}")
            }
        }
    }
}

impl std::str::FromStr for FlagDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        crate::syntax::parse_descriptor(s)
    }
}

impl Serialize for WeightedOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for FlagDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(3))?;
        map.serialize_entry("form", &self.form())?;
        match self {
            FlagDescriptor::General(order) => map.serialize_entry("order", order)?,
            FlagDescriptor::Orthogonal { half, middle }
            | FlagDescriptor::Symplectic { half, middle } => {
                map.serialize_entry("half", half)?;
                map.serialize_entry("middle", &middle.to_string())?;
            }
        }
        map.end()
    }
}

impl Serialize for Cardinality {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cardinality::Finite(d) => s.serialize_u64(*d),
            Cardinality::Aleph0 => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LieType {
    A,
    B,
    C,
    D,
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for LieType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(LieType::A),
            "B" => Ok(LieType::B),
            "C" => Ok(LieType::C),
            "D" => Ok(LieType::D),
            _ => Err(Error::Domain(format!("unknown Lie type {s:?}"))),
        }
    }
}

/// Finite-dimensional flag variety. For B/C/D only the isotropic half of
/// the dimension sequence is listed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteFlagVariety {
    #[serde(rename = "type")]
    pub lie_type: LieType,
    pub ambient: u64,
    pub dims: Vec<u64>,
}

impl FiniteFlagVariety {
    pub fn new(lie_type: LieType, ambient: u64, dims: Vec<u64>) -> Result<Self> {
        let v = FiniteFlagVariety {
            lie_type,
            ambient,
            dims,
        };
        v.validate().map_err(Error::Invalid)?;
        Ok(v)
    }

    /// Maximal isotropic dimension `⌊ambient / 2⌋`.
    pub fn half_rank(&self) -> u64 {
        self.ambient / 2
    }

    /// Rank of the Weyl group.
    pub fn rank(&self) -> u64 {
        match self.lie_type {
            LieType::A => self.ambient.saturating_sub(1),
            _ => self.half_rank(),
        }
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut v = Vec::new();
        let n = self.ambient;
        if self.dims.is_empty() {
            v.push(Violation::new("dims-nonempty", "dimension list is empty"));
        }
        if self.dims.windows(2).any(|w| w[0] >= w[1]) {
            v.push(Violation::new(
                "dims-increasing",
                "dimensions must be strictly increasing",
            ));
        }
        if self.dims.first() == Some(&0) {
            v.push(Violation::new("dims-proper", "dimension 0 is not a proper member"));
        }
        let m = n / 2;
        match self.lie_type {
            LieType::A => {
                if n < 2 {
                    v.push(Violation::new("ambient", "type A needs ambient dimension >= 2"));
                }
                if self.dims.iter().any(|&d| d >= n) {
                    v.push(Violation::new(
                        "dims-proper",
                        "type A dimensions must be below the ambient dimension",
                    ));
                }
            }
            t => {
                let parity_ok = match t {
                    LieType::B => n % 2 == 1,
                    _ => n.is_multiple_of(2),
                };
                if !parity_ok {
                    v.push(Violation::new(
                        "ambient-parity",
                        format!(
                            "type {t} needs {} ambient dimension",
                            if t == LieType::B { "odd" } else { "even" }
                        ),
                    ));
                }
                if self.dims.iter().any(|&d| d > m) {
                    v.push(Violation::new(
                        "isotropy-bound",
                        format!("isotropic dimensions must be at most {m}"),
                    ));
                }
                if t == LieType::D
                    && m >= 1
                    && self.dims.contains(&(m - 1))
                    && !self.dims.contains(&m)
                {
                    v.push(Violation::new(
                        "type-d-lagrangian",
                        format!("type D with {} in dims must also list {m}", m - 1),
                    ));
                }
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    /// Hypotheses under which the finite classification is stated.
    pub fn standing_hypotheses(&self) -> Result<(), String> {
        let (min, what) = match self.lie_type {
            LieType::A => (2, "general type needs ambient >= 2"),
            LieType::B | LieType::D => (5, "orthogonal type needs ambient >= 5"),
            LieType::C => (6, "symplectic type needs ambient >= 6"),
        };
        if self.ambient < min {
            Err(format!("{what}, got {} for {self}", self.ambient))
        } else {
            Ok(())
        }
    }

    /// Type class used by the classification: general, orthogonal or
    /// symplectic.
    pub fn form(&self) -> FormType {
        match self.lie_type {
            LieType::A => FormType::General,
            LieType::B | LieType::D => FormType::Orthogonal,
            LieType::C => FormType::Symplectic,
        }
    }

    /// All proper member dimensions including the coisotropic half.
    pub fn full_dims(&self) -> Vec<u64> {
        let mut out = self.dims.clone();
        if self.lie_type != LieType::A {
            for &d in self.dims.iter().rev() {
                if 2 * d != self.ambient {
                    out.push(self.ambient - d);
                }
            }
        }
        out
    }
}

impl fmt::Display for FiniteFlagVariety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}({}; {})", self.lie_type, dims.join(","), self.ambient)
    }
}

impl std::str::FromStr for FiniteFlagVariety {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        crate::syntax::parse_variety(s)
    }
}

/// Convenience for tests and generators: is `o` a single `seq` atom?
pub fn single_seq(o: &WeightedOrder) -> Option<&[BlockSize]> {
    match o.atoms() {
        [Atom::Seq(s)] => Some(s),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desc(s: &str) -> FlagDescriptor {
        s.parse().unwrap()
    }

    fn ord(s: &str) -> WeightedOrder {
        s.parse().unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(desc("gen: seq[1,inf]").validate().is_ok());
        let v = desc("symp: half=seq[1]; middle=3").validate().unwrap_err();
        assert!(v
            .iter()
            .any(|x| x.message == "symplectic middle must be even or INF"));
        let v = desc("orth: half=seq[inf]; middle=2").validate().unwrap_err();
        assert_eq!(v[0].invariant, "orthogonal-middle");
        assert!(v[0].message.contains("maximal isotropic"));
        assert!(v[0].message.contains("half=seq[inf] + seq[1]; middle=empty"));
        assert!(desc("gen: seq[inf]").validate().is_err());
        assert!(desc("gen: seq[1,2]").validate().is_err());
        assert!(desc("symp: half=seq[1]; middle=4").validate().is_err());
    }

    #[test]
    fn full_chain_examples() {
        assert_eq!(
            desc("orth: half=seq[inf]; middle=1").full_chain(),
            ord("seq[inf] + seq[1] + seq[inf]")
        );
        assert_eq!(
            desc("symp: half=seq[1]; middle=inf").full_chain(),
            ord("seq[1] + seq[inf] + seq[1]")
        );
        assert_eq!(
            desc("orth: half=omega(1); middle=empty").full_chain(),
            ord("omega(1) + omegastar(1)")
        );
    }

    #[test]
    fn dual_examples() {
        assert_eq!(
            desc("gen: seq[1,inf]").dual().descriptor,
            desc("gen: seq[inf,1]")
        );
        assert_eq!(
            desc("gen: omega(1)").dual().descriptor,
            desc("gen: omegastar(1)")
        );
        let d = desc("orth: half=seq[inf]; middle=1");
        let dd = d.dual();
        assert!(dd.unchanged_isotropic);
        assert_eq!(dd.descriptor, d);
    }

    #[test]
    fn pic_rank_examples() {
        assert_eq!(desc("gen: seq[1,inf]").pic_rank(), Cardinality::Finite(1));
        assert_eq!(
            desc("orth: half=seq[inf,1]; middle=inf").pic_rank(),
            Cardinality::Finite(2)
        );
        assert_eq!(desc("gen: omega(1)").pic_rank(), Cardinality::Aleph0);
    }

    #[test]
    fn middle_codim_examples() {
        assert_eq!(
            desc("orth: half=seq[inf]; middle=empty").middle_codim().unwrap(),
            Cardinality::Finite(0)
        );
        assert_eq!(
            desc("orth: half=seq[inf]; middle=1").middle_codim().unwrap(),
            Cardinality::Finite(1)
        );
        assert_eq!(
            desc("symp: half=seq[1]; middle=inf").middle_codim().unwrap(),
            Cardinality::Aleph0
        );
        assert!(matches!(
            desc("gen: seq[1,inf]").middle_codim(),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn truncation_examples() {
        assert_eq!(
            desc("gen: seq[1,inf]").truncate_to_variety(4).unwrap(),
            FiniteFlagVariety::new(LieType::A, 5, vec![1]).unwrap()
        );
        assert_eq!(
            desc("symp: half=seq[1]; middle=inf").truncate_to_variety(3).unwrap(),
            FiniteFlagVariety::new(LieType::C, 8, vec![1]).unwrap()
        );
        assert_eq!(
            desc("orth: half=seq[inf]; middle=1").truncate_to_variety(2).unwrap(),
            FiniteFlagVariety::new(LieType::B, 5, vec![2]).unwrap()
        );
    }

    #[test]
    fn below_threshold_names_n0() {
        let d = desc("orth: half=seq[inf]; middle=empty");
        assert_eq!(d.threshold().unwrap(), 3);
        match d.truncate_to_variety(2) {
            Err(Error::BelowThreshold { n: 2, n0: 3 }) => {}
            other => panic!("{other:?}"),
        }
        assert_eq!(desc("gen: seq[1,inf]").threshold().unwrap(), 1);
        assert_eq!(desc("symp: half=seq[1]; middle=inf").threshold().unwrap(), 2);
    }

    #[test]
    fn finite_variety_validation() {
        assert!(FiniteFlagVariety::new(LieType::A, 1, vec![]).is_err());
        assert!(FiniteFlagVariety::new(LieType::A, 4, vec![2, 1]).is_err());
        assert!(FiniteFlagVariety::new(LieType::B, 6, vec![1]).is_err());
        assert!(FiniteFlagVariety::new(LieType::C, 6, vec![4]).is_err());
        assert!(FiniteFlagVariety::new(LieType::D, 8, vec![3]).is_err());
        assert!(FiniteFlagVariety::new(LieType::D, 8, vec![3, 4]).is_ok());
        assert_eq!(
            FiniteFlagVariety::new(LieType::C, 6, vec![1, 3]).unwrap().full_dims(),
            vec![1, 3, 5]
        );
    }

    #[test]
    fn json_field_names() {
        let j = serde_json::to_value(desc("orth: half=seq[inf]; middle=1")).unwrap();
        assert_eq!(
            j,
            serde_json::json!({"form": "orthogonal", "half": "seq[inf]", "middle": "1"})
        );
        let j = serde_json::to_value(desc("gen: seq[1,inf]")).unwrap();
        assert_eq!(j, serde_json::json!({"form": "general", "order": "seq[1,inf]"}));
    }
}

//! Isomorphism decisions for finite flag varieties and for ind-varieties of
//! generalized flags.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flag::{FiniteFlagVariety, FlagDescriptor, FormType, LieType, Middle};
use crate::order::{BlockSize, Cardinality, WeightedOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    Isomorphic,
    NotIsomorphic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Reason {
    SameDims,
    ComplementDims,
    FlagIso,
    DualFlagIso,
    ExceptionalProjSymp,
    ExceptionalBD,
    NoRuleApplies,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecisionResult {
    pub verdict: Verdict,
    pub reason: Reason,
    pub detail: String,
}

impl DecisionResult {
    fn iso(reason: Reason, detail: impl Into<String>) -> Self {
        DecisionResult {
            verdict: Verdict::Isomorphic,
            reason,
            detail: detail.into(),
        }
    }

    fn not_iso(detail: impl Into<String>) -> Self {
        DecisionResult {
            verdict: Verdict::NotIsomorphic,
            reason: Reason::NoRuleApplies,
            detail: detail.into(),
        }
    }

    pub fn is_isomorphic(&self) -> bool {
        self.verdict == Verdict::Isomorphic
    }
}

impl fmt::Display for DecisionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} ({:?}): {}", self.verdict, self.reason, self.detail)
    }
}

fn check_finite(v: &FiniteFlagVariety) -> Result<()> {
    v.validate().map_err(Error::Invalid)?;
    v.standing_hypotheses().map_err(Error::Hypothesis)
}

fn is_proj_symp_pair(a: &FiniteFlagVariety, c: &FiniteFlagVariety) -> bool {
    a.lie_type == LieType::A
        && c.lie_type == LieType::C
        && a.ambient == c.ambient
        && c.dims == [1]
        && (a.dims == [1] || a.dims == [a.ambient - 1])
}

fn is_bd_pair(b: &FiniteFlagVariety, d: &FiniteFlagVariety) -> bool {
    b.lie_type == LieType::B
        && d.lie_type == LieType::D
        && d.ambient == b.ambient + 1
        && b.dims == [b.half_rank()]
        && d.dims == [d.half_rank()]
}

pub fn decide_finite(x: &FiniteFlagVariety, y: &FiniteFlagVariety) -> Result<DecisionResult> {
    check_finite(x)?;
    check_finite(y)?;
    if x.form() == y.form() && x.ambient == y.ambient && x.full_dims() == y.full_dims() {
        return Ok(DecisionResult::iso(
            Reason::SameDims,
            format!("{x} and {y} have the same dimension sequence"),
        ));
    }
    if x.lie_type == LieType::A
        && y.lie_type == LieType::A
        && x.ambient == y.ambient
        && x.dims.len() == y.dims.len()
        && x.dims.iter().zip(y.dims.iter().rev()).all(|(a, b)| a + b == x.ambient)
    {
        return Ok(DecisionResult::iso(
            Reason::ComplementDims,
            format!("{x} is the dual of {y}: a_k = n - b_(i+1-k)"),
        ));
    }
    if is_proj_symp_pair(x, y) || is_proj_symp_pair(y, x) {
        return Ok(DecisionResult::iso(
            Reason::ExceptionalProjSymp,
            "every line in a symplectic space is isotropic",
        ));
    }
    if is_bd_pair(x, y) || is_bd_pair(y, x) {
        return Ok(DecisionResult::iso(
            Reason::ExceptionalBD,
            "maximal isotropic subspaces in dimension 2n-1 and one family of Lagrangians in dimension 2n",
        ));
    }
    Ok(DecisionResult::not_iso(format!(
        "no isomorphism rule relates {x} and {y}"
    )))
}

fn check_ind(d: &FlagDescriptor) -> Result<()> {
    d.validate().map_err(Error::Invalid)
}

fn single_inf_block(o: &WeightedOrder) -> bool {
    o.finite_blocks().as_deref() == Some(&[BlockSize::Inf][..])
}

fn proj_symp(g: &WeightedOrder, half: &WeightedOrder, middle: Middle) -> bool {
    let line = WeightedOrder::seq([BlockSize::Finite(1)]).unwrap();
    let gr1 = WeightedOrder::seq([BlockSize::Finite(1), BlockSize::Inf]).unwrap();
    half.is_isomorphic(&line)
        && middle == Middle::Block(BlockSize::Inf)
        && (g.is_isomorphic(&gr1) || g.reverse().is_isomorphic(&gr1))
}

pub fn decide_ind(x: &FlagDescriptor, y: &FlagDescriptor) -> Result<DecisionResult> {
    check_ind(x)?;
    check_ind(y)?;
    use FlagDescriptor as D;
    Ok(match (x, y) {
        (D::General(a), D::General(b)) => {
            if a.is_isomorphic(b) {
                DecisionResult::iso(Reason::FlagIso, "the weighted orders are isomorphic")
            } else if a.is_isomorphic(&b.reverse()) {
                DecisionResult::iso(
                    Reason::DualFlagIso,
                    "one flag is isomorphic to the dual of the other",
                )
            } else {
                DecisionResult::not_iso("neither the flags nor one flag and the dual of the other are isomorphic")
            }
        }
        (D::Orthogonal { .. }, D::Orthogonal { .. }) | (D::Symplectic { .. }, D::Symplectic { .. }) => {
            let (ha, ma) = x.isotropic_parts().unwrap();
            let (hb, mb) = y.isotropic_parts().unwrap();
            if ha.is_isomorphic(hb) && ma == mb {
                DecisionResult::iso(Reason::FlagIso, "the isotropic flags are isomorphic")
            } else if x.form() == FormType::Orthogonal
                && single_inf_block(ha)
                && single_inf_block(hb)
                && [ma.codim(), mb.codim()].contains(&Cardinality::Finite(0))
                && [ma.codim(), mb.codim()].contains(&Cardinality::Finite(1))
            {
                DecisionResult::iso(
                    Reason::ExceptionalBD,
                    "orthogonal grassmannians with dim F^perp/F = 1 and G^perp = G",
                )
            } else {
                DecisionResult::not_iso("the isotropic flags are not isomorphic")
            }
        }
        (D::General(g), D::Symplectic { half, middle })
        | (D::Symplectic { half, middle }, D::General(g)) => {
            if proj_symp(g, half, *middle) {
                DecisionResult::iso(
                    Reason::ExceptionalProjSymp,
                    "grassmannian of lines (or hyperplanes) and isotropic lines in a symplectic space",
                )
            } else {
                DecisionResult::not_iso("general and symplectic types are isomorphic only for lines")
            }
        }
        _ => DecisionResult::not_iso("orthogonal type is never isomorphic to another type"),
    })
}

/// `(dim F, dim V/F)` for a general grassmannian, `(dim F, dim F^⊥/F)` for
/// an isotropic one.
fn grassmannian_dims(d: &FlagDescriptor) -> Result<(Cardinality, Cardinality)> {
    let blocks = d
        .sampled_chain()
        .finite_blocks()
        .ok_or_else(|| Error::Domain(format!("{d} is not a grassmannian")))?;
    match (d, blocks.as_slice()) {
        (FlagDescriptor::General(_), [a, b]) => Ok((a.to_cardinality(), b.to_cardinality())),
        (_, [a]) if d.is_isotropic() => Ok((a.to_cardinality(), d.middle_codim()?)),
        _ => Err(Error::Domain(format!("{d} is not a grassmannian"))),
    }
}

/// Decision for ind-grassmannians (Picard rank 1) from the dimensions of
/// the single member alone.
pub fn decide_ind_grassmannian(x: &FlagDescriptor, y: &FlagDescriptor) -> Result<DecisionResult> {
    check_ind(x)?;
    check_ind(y)?;
    for d in [x, y] {
        if d.pic_rank() != Cardinality::Finite(1) {
            return Err(Error::Domain(format!(
                "{d} has Picard rank {}, expected 1",
                d.pic_rank()
            )));
        }
    }
    let (fx, cx) = grassmannian_dims(x)?;
    let (fy, cy) = grassmannian_dims(y)?;
    let one = Cardinality::Finite(1);
    let zero = Cardinality::Finite(0);
    use FormType::*;
    Ok(match (x.form(), y.form()) {
        (General, General) => {
            if (fx, cx) == (fy, cy) {
                DecisionResult::iso(Reason::FlagIso, "dim F = dim G and dim V/F = dim W/G")
            } else if (fx, cx) == (cy, fy) {
                DecisionResult::iso(Reason::DualFlagIso, "dim V/F = dim G and dim F = dim W/G")
            } else {
                DecisionResult::not_iso("the dimensions and codimensions do not match")
            }
        }
        (General, Symplectic) | (Symplectic, General) => {
            let (g, s) = if x.form() == General { ((fx, cx), fy) } else { ((fy, cy), fx) };
            if s == one && (g.0 == one || g.1 == one) {
                DecisionResult::iso(
                    Reason::ExceptionalProjSymp,
                    "dim F = dim G = 1 or dim V/F = dim G = 1",
                )
            } else {
                DecisionResult::not_iso("lines are the only general/symplectic coincidence")
            }
        }
        (a, b) if a == b => {
            if (fx, cx) == (fy, cy) {
                DecisionResult::iso(Reason::FlagIso, "dim F = dim G and dim F^perp/F = dim G^perp/G")
            } else if a == Orthogonal
                && fx == Cardinality::Aleph0
                && fy == Cardinality::Aleph0
                && [cx, cy].contains(&zero)
                && [cx, cy].contains(&one)
            {
                DecisionResult::iso(Reason::ExceptionalBD, "dim F^perp/F = 1 and G^perp = G")
            } else {
                DecisionResult::not_iso("the isotropic dimensions do not match")
            }
        }
        _ => DecisionResult::not_iso("grassmannians of different types"),
    })
}

/// Truncations of the two exceptional orthogonal descriptors at widths `n`
/// (codimension-one side) and `n + 1` (Lagrangian side).
pub fn bd_truncation_pair(n: u64) -> Result<(FiniteFlagVariety, FiniteFlagVariety)> {
    let inf = || WeightedOrder::seq([BlockSize::Inf]).unwrap();
    let b = FlagDescriptor::new_orthogonal(inf(), Middle::Block(BlockSize::Finite(1)))?;
    let d = FlagDescriptor::new_orthogonal(inf(), Middle::Empty)?;
    Ok((b.truncate_to_variety(n)?, d.truncate_to_variety(n + 1)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(t: LieType, n: u64, dims: &[u64]) -> FiniteFlagVariety {
        FiniteFlagVariety::new(t, n, dims.to_vec()).unwrap()
    }

    fn desc(s: &str) -> FlagDescriptor {
        s.parse().unwrap()
    }

    #[test]
    fn finite_examples() {
        let r = decide_finite(&var(LieType::A, 6, &[1, 3]), &var(LieType::A, 6, &[3, 5])).unwrap();
        assert_eq!(r.reason, Reason::ComplementDims);
        let r = decide_finite(&var(LieType::A, 8, &[1]), &var(LieType::C, 8, &[1])).unwrap();
        assert_eq!(r.reason, Reason::ExceptionalProjSymp);
        let r = decide_finite(&var(LieType::B, 7, &[3]), &var(LieType::D, 8, &[4])).unwrap();
        assert_eq!(r.reason, Reason::ExceptionalBD);
        let r = decide_finite(&var(LieType::D, 8, &[4]), &var(LieType::B, 7, &[3])).unwrap();
        assert_eq!(r.reason, Reason::ExceptionalBD);
        let r = decide_finite(&var(LieType::C, 6, &[1]), &var(LieType::C, 6, &[1])).unwrap();
        assert_eq!(r.reason, Reason::SameDims);
        let r = decide_finite(&var(LieType::A, 6, &[1, 3]), &var(LieType::A, 6, &[1, 4])).unwrap();
        assert_eq!(r.verdict, Verdict::NotIsomorphic);
        let r = decide_finite(&var(LieType::B, 7, &[1]), &var(LieType::D, 8, &[1])).unwrap();
        assert_eq!(r.verdict, Verdict::NotIsomorphic);
    }

    #[test]
    fn finite_thresholds_are_enforced() {
        let small = var(LieType::D, 4, &[2]);
        match decide_finite(&small, &small) {
            Err(Error::Hypothesis(msg)) => assert!(msg.contains(">= 5")),
            other => panic!("{other:?}"),
        }
        assert!(decide_finite(&var(LieType::C, 4, &[1]), &var(LieType::A, 4, &[1])).is_err());
    }

    #[test]
    fn ind_examples() {
        let r = decide_ind(&desc("gen: seq[1,inf]"), &desc("symp: half=seq[1]; middle=inf")).unwrap();
        assert_eq!(r.reason, Reason::ExceptionalProjSymp);
        let r = decide_ind(
            &desc("orth: half=seq[inf]; middle=1"),
            &desc("orth: half=seq[inf]; middle=empty"),
        )
        .unwrap();
        assert_eq!(r.reason, Reason::ExceptionalBD);
        let r = decide_ind(&desc("gen: seq[inf,1]"), &desc("gen: seq[1,inf]")).unwrap();
        assert_eq!(r.reason, Reason::DualFlagIso);
        let r = decide_ind(&desc("gen: seq[inf,1]"), &desc("symp: half=seq[1]; middle=inf")).unwrap();
        assert_eq!(r.reason, Reason::ExceptionalProjSymp);
        let r = decide_ind(&desc("gen: seq[2,inf]"), &desc("symp: half=seq[2]; middle=inf")).unwrap();
        assert_eq!(r.verdict, Verdict::NotIsomorphic);
        let r = decide_ind(&desc("gen: seq[1,inf]"), &desc("orth: half=seq[1]; middle=inf")).unwrap();
        assert_eq!(r.verdict, Verdict::NotIsomorphic);
        let r = decide_ind(&desc("gen: seq[2] + omega(2)"), &desc("gen: omega(2)")).unwrap();
        assert_eq!(r.reason, Reason::FlagIso);
        assert!(decide_ind(&desc("gen: seq[inf]"), &desc("gen: seq[1,inf]")).is_err());
    }

    #[test]
    fn grassmannian_examples() {
        let r = decide_ind_grassmannian(&desc("gen: seq[3,inf]"), &desc("gen: seq[inf,3]")).unwrap();
        assert_eq!(r.reason, Reason::DualFlagIso);
        let r = decide_ind_grassmannian(&desc("gen: seq[3,inf]"), &desc("gen: seq[4,inf]")).unwrap();
        assert_eq!(r.verdict, Verdict::NotIsomorphic);
        let r = decide_ind_grassmannian(&desc("symp: half=seq[2]; middle=inf"), &desc("gen: seq[2,inf]")).unwrap();
        assert_eq!(r.verdict, Verdict::NotIsomorphic);
        let r = decide_ind_grassmannian(&desc("gen: seq[inf,3]"), &desc("gen: seq[inf,inf]")).unwrap();
        assert_eq!(r.verdict, Verdict::NotIsomorphic);
        assert!(matches!(
            decide_ind_grassmannian(&desc("gen: seq[1,1,inf]"), &desc("gen: seq[1,inf]")),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn bd_truncations_are_the_exceptional_finite_pair() {
        for n in 2..=12 {
            let (b, d) = bd_truncation_pair(n).unwrap();
            let r = decide_finite(&b, &d).unwrap();
            assert_eq!(r.reason, Reason::ExceptionalBD, "n = {n}: {b} vs {d}");
        }
    }
}

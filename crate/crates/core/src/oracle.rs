//! Isomorphism of weighted orders decided without the rewrite system.
//!
//! Points at finite distance from each other form intervals. Each interval
//! is either finite, a word followed by an infinite constant run (`ω`),
//! preceded by one (`ω*`), or both (`ℤ`). Two orders are isomorphic iff
//! their intervals correspond in order and pairwise as weighted words.

use crate::order::{Atom, BlockSize, WeightedOrder};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Class {
    left: Option<BlockSize>,
    word: Vec<BlockSize>,
    right: Option<BlockSize>,
}

fn classes(o: &WeightedOrder) -> Vec<Class> {
    let mut out = Vec::new();
    let mut cur: Option<Class> = None;
    for a in o.atoms() {
        match a {
            Atom::Seq(s) => cur
                .get_or_insert_with(|| Class { left: None, word: Vec::new(), right: None })
                .word
                .extend(s),
            Atom::Omega(d) => {
                let mut c = cur.take().unwrap_or(Class { left: None, word: Vec::new(), right: None });
                c.right = Some(*d);
                out.push(c);
            }
            Atom::OmegaStar(d) => {
                if let Some(c) = cur.take() {
                    out.push(c);
                }
                cur = Some(Class { left: Some(*d), word: Vec::new(), right: None });
            }
        }
    }
    out.extend(cur);
    out
}

/// Symbol at integer index `i` of the class, with the word at `0..len`.
fn at(c: &Class, i: i64) -> Option<BlockSize> {
    let len = c.word.len() as i64;
    if i < 0 {
        c.left
    } else if i >= len {
        c.right
    } else {
        Some(c.word[i as usize])
    }
}

fn class_iso(a: &Class, b: &Class) -> bool {
    if a.left.is_some() != b.left.is_some() || a.right.is_some() != b.right.is_some() {
        return false;
    }
    let len = a.word.len().max(b.word.len()) as i64;
    let window = len + 20;
    match (a.left.is_some(), a.right.is_some()) {
        (false, false) => a.word == b.word,
        // Anchored at the minimum.
        (false, true) => (0..window).all(|i| at(a, i) == at(b, i)),
        // Anchored at the maximum.
        (true, false) => {
            let (la, lb) = (a.word.len() as i64, b.word.len() as i64);
            (1..=window).all(|k| at(a, la - k) == at(b, lb - k))
        }
        // Bi-infinite: equal up to a shift.
        (true, true) => (-window..=window).any(|s| {
            (-2 * window..=2 * window).all(|i| at(a, i) == at(b, i + s))
        }),
    }
}

pub fn isomorphic(x: &WeightedOrder, y: &WeightedOrder) -> bool {
    let (cx, cy) = (classes(x), classes(y));
    cx.len() == cy.len() && cx.iter().zip(&cy).all(|(a, b)| class_iso(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> WeightedOrder {
        s.parse().unwrap()
    }

    #[test]
    fn basic_cases() {
        assert!(isomorphic(&o("seq[3] + omega(3)"), &o("omega(3)")));
        assert!(!isomorphic(&o("omega(3) + seq[3]"), &o("omega(3)")));
        assert!(isomorphic(&o("omegastar(1) + seq[1,2] + omega(2)"), &o("omegastar(1) + omega(2)")));
        assert!(isomorphic(&o("omegastar(1) + seq[1] + omega(1)"), &o("omegastar(1) + omega(1)")));
        assert!(!isomorphic(&o("omega(1) + omegastar(1)"), &o("omegastar(1) + omega(1)")));
        assert!(!isomorphic(&o("seq[1,2]"), &o("seq[2,1]")));
        assert!(isomorphic(&o("seq[1] + seq[2]"), &o("seq[1,2]")));
        assert!(!isomorphic(&o("omegastar(1) + seq[2] + omega(1)"), &o("omegastar(1) + seq[2,2] + omega(1)")));
    }
}

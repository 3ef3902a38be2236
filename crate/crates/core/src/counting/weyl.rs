//! Weyl groups of types A, B/C and D as (signed) permutations, and
//! enumeration of minimal-length parabolic coset representatives.
//!
//! Conventions: `w` acts on positions `1..n`; right multiplication by a
//! simple reflection acts on positions.
//!
//! * `s_i` (`1 ≤ i < n`) swaps positions `i` and `i + 1`;
//! * type B: `s_0` negates position 1;
//! * type D: `s_0` sends `(w(1), w(2))` to `(-w(2), -w(1))`.
//!
//! Lengths are `inv(w)` in type A, `inv(w) + Σ_{w(j)<0} |w(j)|` in type B
//! and `inv(w) + #{i < j : w(i) + w(j) < 0}` in type D.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum WeylType {
    A,
    B,
    D,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SignedPermutation {
    images: Vec<i32>,
}

impl SignedPermutation {
    /// `images[j-1] = w(j)`; |images| must be a permutation of `1..n`.
    pub fn new(images: Vec<i32>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let a = x.unsigned_abs() as usize;
            if a == 0 || a > n || seen[a - 1] {
                return None;
            }
            seen[a - 1] = true;
        }
        Some(SignedPermutation { images })
    }

    pub fn identity(n: usize) -> Self {
        SignedPermutation {
            images: (1..=n as i32).collect(),
        }
    }

    pub fn images(&self) -> &[i32] {
        &self.images
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn negatives(&self) -> usize {
        self.images.iter().filter(|&&x| x < 0).count()
    }

    pub fn belongs_to(&self, t: WeylType) -> bool {
        match t {
            WeylType::A => self.negatives() == 0,
            WeylType::B => true,
            WeylType::D => self.negatives().is_multiple_of(2),
        }
    }

    fn inversions(&self) -> u64 {
        let w = &self.images;
        let mut c = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    c += 1;
                }
            }
        }
        c
    }

    pub fn length(&self, t: WeylType) -> u64 {
        let w = &self.images;
        match t {
            WeylType::A => self.inversions(),
            WeylType::B => {
                self.inversions() + w.iter().filter(|&&x| x < 0).map(|&x| (-x) as u64).sum::<u64>()
            }
            WeylType::D => {
                let mut nsp = 0;
                for i in 0..w.len() {
                    for j in i + 1..w.len() {
                        if w[i] + w[j] < 0 {
                            nsp += 1;
                        }
                    }
                }
                self.inversions() + nsp
            }
        }
    }

    /// Whether `ℓ(w·s) < ℓ(w)` for node `s` (0 is the special node).
    pub fn has_right_descent(&self, t: WeylType, node: usize) -> bool {
        let w = &self.images;
        match (t, node) {
            (WeylType::A, 0) => false,
            (WeylType::B, 0) => w[0] < 0,
            (WeylType::D, 0) => w.len() >= 2 && w[0] + w[1] < 0,
            (_, i) => w[i - 1] > w[i],
        }
    }

    /// `w·s` for node `s`.
    pub fn times_simple(&self, t: WeylType, node: usize) -> Self {
        let mut w = self.images.clone();
        match (t, node) {
            (WeylType::A, 0) => {}
            (WeylType::B, 0) => w[0] = -w[0],
            (WeylType::D, 0) => {
                let (a, b) = (w[0], w[1]);
                w[0] = -b;
                w[1] = -a;
            }
            (_, i) => w.swap(i - 1, i),
        }
        SignedPermutation { images: w }
    }
}

/// Nodes of the Dynkin diagram for positions `1..n`: `1..n-1` always, plus
/// node 0 for types B and D (only when `n ≥ 2` for D).
pub fn nodes(t: WeylType, n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    match t {
        WeylType::A => {}
        WeylType::B => out.push(0),
        WeylType::D => {
            if n >= 2 {
                out.push(0)
            }
        }
    }
    out.extend(1..n);
    out
}

/// Calls `visit` on every `w` in the group with no right descent at any
/// node in `parabolic`, i.e. the minimal representatives of `W / W_J`.
/// Elements are built position by position and pruned as soon as a
/// forbidden descent appears.
pub fn for_each_min_coset_rep(
    t: WeylType,
    n: usize,
    parabolic: &[usize],
    mut visit: impl FnMut(&SignedPermutation),
) {
    let mut forbid = vec![false; n.max(1)];
    for &s in parabolic {
        forbid[s] = true;
    }
    let mut w = Vec::with_capacity(n);
    let mut used = vec![false; n + 1];
    fn rec(
        t: WeylType,
        n: usize,
        forbid: &[bool],
        w: &mut Vec<i32>,
        used: &mut [bool],
        visit: &mut dyn FnMut(&SignedPermutation),
    ) {
        let i = w.len();
        if i == n {
            let p = SignedPermutation { images: w.clone() };
            if p.belongs_to(t) {
                visit(&p);
            }
            return;
        }
        for a in 1..=n {
            if used[a] {
                continue;
            }
            for sign in [1i32, -1] {
                if sign < 0 && t == WeylType::A {
                    continue;
                }
                let x = sign * a as i32;
                if i == 0 && t == WeylType::B && forbid[0] && x < 0 {
                    continue;
                }
                if i == 1 && t == WeylType::D && forbid[0] && w[0] + x < 0 {
                    continue;
                }
                if i >= 1 && forbid[i] && w[i - 1] > x {
                    continue;
                }
                used[a] = true;
                w.push(x);
                rec(t, n, forbid, w, used, visit);
                w.pop();
                used[a] = false;
            }
        }
    }
    rec(t, n, &forbid, &mut w, &mut used, &mut visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, VecDeque};

    fn all(t: WeylType, n: usize) -> Vec<SignedPermutation> {
        let mut out = Vec::new();
        for_each_min_coset_rep(t, n, &[], |w| out.push(w.clone()));
        out
    }

    /// Length as distance from the identity in the Cayley graph.
    fn bfs_lengths(t: WeylType, n: usize) -> HashMap<SignedPermutation, u64> {
        let mut dist = HashMap::new();
        let id = SignedPermutation::identity(n);
        dist.insert(id.clone(), 0);
        let mut queue = VecDeque::from([id]);
        while let Some(w) = queue.pop_front() {
            let d = dist[&w];
            for s in nodes(t, n) {
                let v = w.times_simple(t, s);
                if !dist.contains_key(&v) {
                    dist.insert(v.clone(), d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    #[test]
    fn group_orders() {
        assert_eq!(all(WeylType::A, 4).len(), 24);
        assert_eq!(all(WeylType::B, 3).len(), 48);
        assert_eq!(all(WeylType::D, 4).len(), 192);
    }

    #[test]
    fn length_formulas_match_cayley_graph() {
        for (t, n) in [(WeylType::A, 4), (WeylType::B, 3), (WeylType::B, 4), (WeylType::D, 4), (WeylType::D, 2)] {
            let bfs = bfs_lengths(t, n);
            let elems = all(t, n);
            assert_eq!(bfs.len(), elems.len(), "{t:?}{n}");
            for w in elems {
                assert_eq!(w.length(t), bfs[&w], "{t:?} {:?}", w.images());
            }
        }
    }

    #[test]
    fn descents_match_lengths() {
        for (t, n) in [(WeylType::A, 4), (WeylType::B, 3), (WeylType::D, 4)] {
            for w in all(t, n) {
                for s in nodes(t, n) {
                    let shorter = w.times_simple(t, s).length(t) < w.length(t);
                    assert_eq!(w.has_right_descent(t, s), shorter);
                }
            }
        }
    }

    #[test]
    fn longest_element_of_s3() {
        let max = all(WeylType::A, 3).iter().map(|w| w.length(WeylType::A)).max();
        assert_eq!(max, Some(3));
    }
}

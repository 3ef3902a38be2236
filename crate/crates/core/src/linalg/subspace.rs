//! Subspaces of `F^n` stored by their reduced row echelon basis.

use super::field::Field;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// A subspace of `F^n`. Two subspaces are equal iff their canonical bases
/// are equal, so derived `PartialEq` is equality of subspaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace<F: Field> {
    basis: Matrix<F>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    /// Row space of `m`.
    pub fn span(m: &Matrix<F>) -> Self {
        let (basis, pivots) = m.rref();
        Subspace { basis, pivots }
    }

    pub fn zero(field: &F, n: usize) -> Self {
        Self::span(&Matrix::zeros(field, 0, n))
    }

    pub fn whole(field: &F, n: usize) -> Self {
        Self::span(&Matrix::identity(field, n))
    }

    pub fn from_vectors(field: &F, n: usize, vs: &[Vec<F::Elem>]) -> Result<Self> {
        Ok(Self::span(&Matrix::from_rows(field, n, vs.to_vec())?))
    }

    pub fn coordinate(field: &F, n: usize, indices: &[usize]) -> Self {
        Self::span(&Matrix::unit_rows(field, n, indices))
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn field(&self) -> &F {
        self.basis.field()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        let f = self.field();
        let mut w = v.to_vec();
        for (r, &p) in self.pivots.iter().enumerate() {
            if f.is_zero(&w[p]) {
                continue;
            }
            let c = w[p].clone();
            for (j, x) in w.iter_mut().enumerate() {
                *x = f.sub(x, &f.mul(&c, self.basis.get(r, j)));
            }
        }
        w.iter().all(|x| f.is_zero(x))
    }

    pub fn contains_subspace(&self, other: &Subspace<F>) -> bool {
        (0..other.dim()).all(|r| self.contains(other.basis.row_slice(r)))
    }

    pub fn sum(&self, other: &Subspace<F>) -> Result<Self> {
        Ok(Self::span(&self.basis.vstack(&other.basis)?))
    }

    /// Annihilator under the standard dot product.
    pub fn annihilator(&self) -> Self {
        Self::span(&self.basis.transpose().left_kernel())
    }

    pub fn intersect(&self, other: &Subspace<F>) -> Result<Self> {
        Ok(self.annihilator().sum(&other.annihilator())?.annihilator())
    }

    /// `{x : x·G·s^T = 0 for all s in self}` for the Gram matrix `G` of a
    /// bilinear form.
    pub fn perp(&self, gram: &Matrix<F>) -> Result<Self> {
        if gram.rank() != gram.rows() {
            return Err(Error::Linalg("perp needs a nondegenerate form".into()));
        }
        Ok(Self::span(&gram.mul(&self.basis.transpose())?.left_kernel()))
    }

    /// Image under `x ↦ x·A`.
    pub fn image(&self, a: &Matrix<F>) -> Result<Self> {
        Ok(Self::span(&self.basis.mul(a)?))
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Unit vectors completing the canonical basis to a basis of `F^n`.
    pub fn complement_indices(&self) -> Vec<usize> {
        (0..self.ambient()).filter(|c| !self.pivots.contains(c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::field::{PrimeField, Rationals};

    #[test]
    fn intersection_and_sum() {
        let q = Rationals;
        let a = Subspace::span(&Matrix::from_i64(&q, &[vec![1, 0, 0], vec![0, 1, 0]]));
        let b = Subspace::span(&Matrix::from_i64(&q, &[vec![0, 1, 1], vec![0, 0, 1]]));
        let i = a.intersect(&b).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&[q.zero(), q.one(), q.zero()]));
        assert_eq!(a.sum(&b).unwrap().dim(), 3);
    }

    #[test]
    fn perp_in_split_plane() {
        let f = PrimeField::new(5).unwrap();
        let g = Matrix::from_i64(&f, &[vec![0, 1], vec![1, 0]]);
        let l = Subspace::coordinate(&f, 2, &[0]);
        assert_eq!(l.perp(&g).unwrap(), l);
        assert_eq!(Subspace::zero(&f, 2).perp(&g).unwrap(), Subspace::whole(&f, 2));
        let bad = Matrix::from_i64(&f, &[vec![1, 1], vec![1, 1]]);
        assert!(l.perp(&bad).is_err());
    }
}

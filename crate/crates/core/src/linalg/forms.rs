//! Nondegenerate orthogonal and symplectic forms, including quadratic forms
//! in characteristic 2.

use serde::Serialize;

use super::field::Field;
use super::matrix::Matrix;
use super::subspace::Subspace;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Orthogonal,
    Symplectic,
}

/// A bilinear form given by its Gram matrix, plus for orthogonal forms a
/// quadratic refinement `Q(x) = x·U·x^T` whose polarization is the Gram
/// matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "")]
pub struct Form<F: Field> {
    pub kind: FormKind,
    pub gram: Matrix<F>,
    pub quad: Option<Matrix<F>>,
}

impl<F: Field> Form<F> {
    /// The split form with `ω(e_i, e_{n+1-i}) = 1` (orthogonal, plus
    /// `ω(e_c, e_c) = 1` at the center for odd `n`) or `±1` (symplectic,
    /// `+1` for `i ≤ n/2`).
    pub fn standard(field: &F, kind: FormKind, n: usize) -> Result<Self> {
        let mut gram = Matrix::zeros(field, n, n);
        match kind {
            FormKind::Symplectic => {
                if n % 2 == 1 {
                    return Err(Error::Domain("symplectic forms need even dimension".into()));
                }
                for i in 0..n {
                    let v = if i < n / 2 { field.one() } else { field.neg(&field.one()) };
                    gram.set(i, n - 1 - i, v);
                }
                Ok(Form {
                    kind,
                    gram,
                    quad: None,
                })
            }
            FormKind::Orthogonal => {
                let mut quad = Matrix::zeros(field, n, n);
                for i in 0..n {
                    gram.set(i, n - 1 - i, field.one());
                    if i < n - 1 - i {
                        quad.set(i, n - 1 - i, field.one());
                    }
                }
                if n % 2 == 1 {
                    if field.characteristic() == 2 {
                        return Err(Error::Domain(
                            "odd-dimensional orthogonal forms are degenerate in characteristic 2"
                                .into(),
                        ));
                    }
                    let c = n / 2;
                    let half = field.inv(&field.from_i64(2)).unwrap();
                    quad.set(c, c, half);
                }
                Ok(Form {
                    kind,
                    gram,
                    quad: Some(quad),
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn field(&self) -> &F {
        self.gram.field()
    }

    pub fn eval(&self, x: &[F::Elem], y: &[F::Elem]) -> F::Elem {
        let f = self.field();
        let xg = self.gram.apply(x).expect("vector length");
        xg.iter()
            .zip(y)
            .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
    }

    /// `Q(x)`; identically zero for symplectic forms.
    pub fn quad(&self, x: &[F::Elem]) -> F::Elem {
        let f = self.field();
        match &self.quad {
            None => f.zero(),
            Some(u) => {
                let xu = u.apply(x).expect("vector length");
                xu.iter()
                    .zip(x)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            }
        }
    }

    /// `Ok` iff the row space of `basis` is totally isotropic (totally
    /// singular for orthogonal forms). Otherwise returns a pair `(i, j)` of
    /// basis rows with `ω(b_i, b_j) != 0`, or `(i, i)` with `Q(b_i) != 0`.
    pub fn check_isotropic(&self, basis: &Matrix<F>) -> std::result::Result<(), (usize, usize)> {
        let f = self.field();
        for i in 0..basis.rows() {
            let bi = basis.row_slice(i);
            if !f.is_zero(&self.quad(bi)) {
                return Err((i, i));
            }
            for j in i + 1..basis.rows() {
                if !f.is_zero(&self.eval(bi, basis.row_slice(j))) {
                    return Err((i, j));
                }
            }
        }
        Ok(())
    }

    pub fn is_isotropic(&self, s: &Subspace<F>) -> bool {
        self.check_isotropic(s.basis()).is_ok()
    }

    pub fn perp(&self, s: &Subspace<F>) -> Result<Subspace<F>> {
        s.perp(&self.gram)
    }

    /// Whether `x ↦ x·A` preserves the form (and the quadratic form).
    pub fn preserved_by(&self, a: &Matrix<F>) -> bool {
        let Ok(lhs) = a.mul(&self.gram).and_then(|m| m.mul(&a.transpose())) else {
            return false;
        };
        if lhs != self.gram {
            return false;
        }
        let f = self.field();
        let n = self.dim();
        (0..n).all(|i| {
            let mut e = vec![f.zero(); n];
            e[i] = f.one();
            let img = a.apply(&e).expect("square");
            self.quad(&img) == self.quad(&e)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::field::{PrimeField, Rationals};

    #[test]
    fn standard_forms_are_nondegenerate_and_split() {
        let q = Rationals;
        for n in [4usize, 5, 6] {
            let o = Form::standard(&q, FormKind::Orthogonal, n).unwrap();
            assert_eq!(o.gram.rank(), n);
            let l = Matrix::unit_rows(&q, n, &(0..n / 2).collect::<Vec<_>>());
            assert!(o.check_isotropic(&l).is_ok());
        }
        let f2 = PrimeField::new(2).unwrap();
        let o = Form::standard(&f2, FormKind::Orthogonal, 4).unwrap();
        // e1 + e4 has ω(v, v) = 0 in characteristic 2 but Q(v) = 1
        assert_eq!(o.quad(&[1, 0, 0, 1]), 1);
        assert_eq!(o.eval(&[1, 0, 0, 1], &[1, 0, 0, 1]), 0);
        assert!(Form::standard(&f2, FormKind::Orthogonal, 5).is_err());
        let s = Form::standard(&q, FormKind::Symplectic, 4).unwrap();
        assert_eq!(s.eval(&[q.one(), q.zero(), q.zero(), q.zero()], &[q.zero(), q.zero(), q.zero(), q.one()]), q.one());
        assert_eq!(s.eval(&[q.zero(), q.zero(), q.zero(), q.one()], &[q.one(), q.zero(), q.zero(), q.zero()]), q.from_i64(-1));
    }

    #[test]
    fn isotropy_certificate() {
        let f = PrimeField::new(5).unwrap();
        let s = Form::standard(&f, FormKind::Symplectic, 4).unwrap();
        let m = Matrix::unit_rows(&f, 4, &[0, 3]);
        assert_eq!(s.check_isotropic(&m), Err((0, 1)));
    }
}

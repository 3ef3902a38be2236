use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

/// Polynomial in `q` with nonnegative big-integer coefficients. Index is
/// degree; trailing zeros are trimmed, so derived equality is polynomial
/// equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPolynomial {
    coeffs: Vec<BigUint>,
}

impl QPolynomial {
    pub fn new(mut coeffs: Vec<BigUint>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPolynomial { coeffs }
    }

    pub fn from_u64(coeffs: &[u64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn zero() -> Self {
        QPolynomial { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::from_u64(&[1])
    }

    /// `1 + q + ... + q^(n-1)`.
    pub fn q_integer(n: usize) -> Self {
        Self::from_u64(&vec![1; n])
    }

    pub fn coefficients(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Adds `c·q^deg`.
    pub fn add_term(&mut self, deg: usize, c: u64) {
        if self.coeffs.len() <= deg {
            self.coeffs.resize(deg + 1, BigUint::zero());
        }
        self.coeffs[deg] += c;
        let trimmed = Self::new(std::mem::take(&mut self.coeffs));
        *self = trimmed;
    }

    pub fn add(&self, other: &QPolynomial) -> QPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigUint::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn mul(&self, other: &QPolynomial) -> QPolynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![BigUint::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn eval(&self, q: &BigUint) -> BigUint {
        self.coeffs
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, c| acc * q + c)
    }

    pub fn eval_u64(&self, q: u64) -> BigUint {
        self.eval(&BigUint::from(q))
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let var = match d {
                0 => String::new(),
                1 => "q".into(),
                _ => format!("q^{d}"),
            };
            match (d, c.is_one()) {
                (0, _) => write!(f, "{c}")?,
                (_, true) => f.write_str(&var)?,
                _ => write!(f, "{c}*{var}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Serialize for QPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let cs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        cs.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        assert_eq!(QPolynomial::from_u64(&[1, 1, 2, 1, 1]).to_string(), "1 + q + 2*q^2 + q^3 + q^4");
        assert_eq!(QPolynomial::zero().to_string(), "0");
        assert_eq!(QPolynomial::from_u64(&[0, 3]).to_string(), "3*q");
    }

    #[test]
    fn arithmetic() {
        let p = QPolynomial::q_integer(2).mul(&QPolynomial::from_u64(&[1, 0, 1]));
        assert_eq!(p, QPolynomial::from_u64(&[1, 1, 1, 1]));
        assert_eq!(p.eval_u64(3), BigUint::from(40u32));
        assert_eq!(QPolynomial::from_u64(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(QPolynomial::from_u64(&[1, 2, 1]).is_palindromic());
        assert!(!QPolynomial::from_u64(&[1, 2]).is_palindromic());
    }
}

//! Small dense square matrices over [`FieldElem`], enough for companion-matrix
//! traces.

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zero(n: usize) -> Self {
        Matrix { n, data: vec![FieldElem::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = FieldElem::one();
        }
        m
    }

    /// Companion matrix of a monic polynomial of degree `n ≥ 1`.
    pub fn companion(q: &Poly) -> Result<Self> {
        let n = q.degree().filter(|&d| d >= 1).ok_or(Error::ZeroPolynomial("companion matrix"))?;
        if !q.is_monic() {
            return Err(Error::Invariant("companion matrix needs a monic polynomial".into()));
        }
        let mut m = Self::zero(n);
        for i in 1..n {
            m.set(i, i - 1, FieldElem::one());
        }
        for i in 0..n {
            m.set(i, n - 1, -q.coeff(i));
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.n + j] = v;
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: &FieldElem) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + &(a * other.get(k, j));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> FieldElem {
        (0..self.n).fold(FieldElem::zero(), |acc, i| &acc + self.get(i, i))
    }

    /// `p(M)` by Horner's scheme.
    pub fn eval_poly(&self, p: &Poly) -> Matrix {
        p.coeffs().iter().rev().fold(Self::zero(self.n), |acc, c| {
            acc.mul(self).add(&Self::identity(self.n).scale(c))
        })
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(Error::DivisionByZero)?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).inv()?;
            for j in 0..n {
                a.set(col, j, a.get(col, j) * &p);
                inv.set(col, j, inv.get(col, j) * &p);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    a.set(r, j, a.get(r, j) - &(&f * a.get(col, j)));
                    inv.set(r, j, inv.get(r, j) - &(&f * inv.get(col, j)));
                }
            }
        }
        Ok(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_satisfies_its_polynomial() {
        let q = Poly::from_ints(&[6, -5, 1]);
        let m = Matrix::companion(&q).unwrap();
        assert_eq!(m.eval_poly(&q), Matrix::zero(2));
        assert_eq!(m.trace(), FieldElem::from_int(5));
    }

    #[test]
    fn inverse_round_trip() {
        let q = Poly::from_ints(&[3, 1, 0, 1]);
        let m = Matrix::companion(&q).unwrap();
        assert_eq!(m.mul(&m.inverse().unwrap()), Matrix::identity(3));
        assert!(Matrix::zero(2).inverse().is_err());
    }
}

//! Dense univariate polynomials over [`FieldElem`].
//!
//! Everything stays exact: gcds by the Euclidean algorithm with monic
//! remainders, Yun's squarefree decomposition, and root-set comparisons through
//! squarefree parts (never through root isolation).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::rational::Rational;
use num_traits::ToPrimitive;

/// `coeffs[i]` is the coefficient of `x^i`; no trailing zeros, so the zero
/// polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

/// Yun decomposition `unit · ∏ partᵢ^multᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub unit: FieldElem,
    /// Monic, squarefree, pairwise coprime, nonconstant; multiplicities increasing.
    pub factors: Vec<(Poly, usize)>,
}

impl SquarefreeDecomposition {
    pub fn reconstruct(&self) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.unit.clone()), |acc, (p, k)| &acc * &p.pow(*k as u32))
    }

    /// Product of the distinct parts (the radical, monic).
    pub fn radical(&self) -> Poly {
        self.factors.iter().fold(Poly::one(), |acc, (p, _)| &acc * p)
    }
}

/// The derivative-like operators used throughout the analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivativeKind {
    /// `P′`
    Derivative,
    /// `d·P − w·P′` with `d = deg P`
    Polar(usize),
    /// `λ·w·P′`
    EulerNum(FieldElem),
    /// `c·P + P′`
    DOperator(FieldElem),
}

impl Poly {
    pub fn new(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(FieldElem::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| FieldElem::from_int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(FieldElem::one())
    }

    pub fn constant(c: FieldElem) -> Self {
        Self::new(vec![c])
    }

    /// The variable itself.
    pub fn x() -> Self {
        Self::monomial(FieldElem::one(), 1)
    }

    pub fn monomial(c: FieldElem, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![FieldElem::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    /// `∏ (x − rᵢ)`.
    pub fn from_roots(roots: &[FieldElem]) -> Self {
        roots
            .iter()
            .fold(Self::one(), |acc, r| &acc * &Self::new(vec![-r, FieldElem::one()]))
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).cloned().unwrap_or_else(FieldElem::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Zero or a nonzero constant.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(FieldElem::is_one)
    }

    pub fn lc(&self) -> FieldElem {
        self.coeffs.last().cloned().unwrap_or_else(FieldElem::zero)
    }

    pub fn radicand(&self) -> Result<i64> {
        FieldElem::radicand_of(&self.coeffs)
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Divides by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = self.lc().inv().expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    pub fn eval(&self, x: &FieldElem) -> FieldElem {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElem::zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Quotient and remainder with `self = q·g + r`, `deg r < deg g`.
    pub fn divrem(&self, g: &Poly) -> Result<(Poly, Poly)> {
        let dg = g.degree().ok_or(Error::ZeroPolynomial("divisor"))?;
        let Some(df) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if df < dg {
            return Ok((Self::zero(), self.clone()));
        }
        let inv_lc = g.lc().inv()?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![FieldElem::zero(); df - dg + 1];
        for k in (0..=df - dg).rev() {
            let c = &rem[k + dg] * &inv_lc;
            if c.is_zero() {
                continue;
            }
            for (j, gc) in g.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * gc);
            }
            quot[k] = c;
        }
        rem.truncate(dg);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn rem(&self, g: &Poly) -> Result<Poly> {
        Ok(self.divrem(g)?.1)
    }

    /// Division that must leave no remainder.
    pub fn div_exact(&self, g: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(g)?;
        if !r.is_zero() {
            return Err(Error::Invariant(format!("{self} is not divisible by {g}")));
        }
        Ok(q)
    }

    pub fn divides(&self, g: &Poly) -> Result<bool> {
        Ok(g.rem(self)?.is_zero())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &FieldElem::from_int(i as i64))
                .collect(),
        )
    }

    /// `d·P − x·P′`; `d` must be the degree of `self`.
    pub fn polar(&self, d: usize) -> Result<Self> {
        if self.degree() != Some(d) {
            return Err(Error::DegreeMismatch(format!(
                "polar derivative of order {d} requested for a polynomial of degree {:?}",
                self.degree()
            )));
        }
        let df = FieldElem::from_int(d as i64);
        Ok(&self.scale(&df) - &self.euler_num(&FieldElem::one()))
    }

    /// `λ·x·P′`.
    pub fn euler_num(&self, lambda: &FieldElem) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = &(&*c * &FieldElem::from_int(i as i64)) * lambda;
        }
        Self::new(coeffs)
    }

    /// `c·P + P′`.
    pub fn d_operator(&self, c: &FieldElem) -> Self {
        &self.scale(c) + &self.derivative()
    }

    pub fn apply(&self, kind: &DerivativeKind) -> Result<Self> {
        match kind {
            DerivativeKind::Derivative => Ok(self.derivative()),
            DerivativeKind::Polar(d) => self.polar(*d),
            DerivativeKind::EulerNum(l) => Ok(self.euler_num(l)),
            DerivativeKind::DOperator(c) => Ok(self.d_operator(c)),
        }
    }

    /// Index of the lowest nonzero coefficient.
    pub fn valuation_at_zero(&self) -> Result<usize> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .ok_or(Error::ZeroPolynomial("valuation"))
    }

    /// Removes the factor `x^k` of maximal `k`; returns `(rest, k)`.
    pub fn strip_zero_roots(&self) -> (Self, usize) {
        match self.valuation_at_zero() {
            Ok(0) | Err(_) => (self.clone(), 0),
            Ok(k) => (Poly { coeffs: self.coeffs[k..].to_vec() }, k),
        }
    }

    /// Multiplicity of `x0` as a root (0 if not a root). Requires a nonzero polynomial.
    pub fn root_multiplicity(&self, x0: &FieldElem) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("root multiplicity"));
        }
        let mut k = 0;
        let mut p = self.clone();
        loop {
            // synthetic division by (x − x0)
            let n = p.coeffs.len();
            if n <= 1 {
                return Ok(k);
            }
            let mut q = vec![FieldElem::zero(); n - 1];
            let mut carry = FieldElem::zero();
            for i in (0..n).rev() {
                let v = &p.coeffs[i] + &(&carry * x0);
                if i == 0 {
                    carry = v;
                } else {
                    q[i - 1] = v.clone();
                    carry = v;
                }
            }
            if !carry.is_zero() {
                return Ok(k);
            }
            k += 1;
            p = Self::new(q);
        }
    }

    /// `p(x + t)`.
    pub fn shift(&self, t: &FieldElem) -> Self {
        // Horner in the shifted variable
        let lin = Self::new(vec![t.clone(), FieldElem::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * &lin) + &Self::constant(c.clone()))
    }

    /// `p(t·x)`.
    pub fn scale_var(&self, t: &FieldElem) -> Self {
        let mut pw = FieldElem::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c * &pw);
            pw = &pw * t;
        }
        Self::new(coeffs)
    }

    /// `x^n · p(1/x)`; `n` must be at least the degree.
    pub fn reverse(&self, n: usize) -> Self {
        let mut coeffs = vec![FieldElem::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[n - i] = c.clone();
        }
        Self::new(coeffs)
    }

    /// `p(x^k)`.
    pub fn compose_power(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![FieldElem::zero(); self.deg0() * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        Self::new(coeffs)
    }

    /// Largest `k` such that every nonzero term has exponent divisible by `k`
    /// (0 for constants).
    pub fn exponent_gcd(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, c)| *i > 0 && !c.is_zero())
            .fold(0, |g, (i, _)| num_integer::gcd(g, i))
    }

    /// `q` with `p(x) = q(x^k)`; `k` must divide [`Poly::exponent_gcd`].
    pub fn decompose_power(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().step_by(k).cloned().collect())
    }

    /// Number of nonzero coefficients.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn squarefree_part(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("squarefree part"));
        }
        let g = gcd(self, &self.derivative())?;
        Ok(self.div_exact(&g)?.monic())
    }

    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("squarefree test"));
        }
        Ok(gcd(self, &self.derivative())?.is_constant())
    }

    /// Number of distinct roots over the algebraic closure.
    pub fn distinct_root_count(&self) -> Result<usize> {
        Ok(self.squarefree_part()?.deg0())
    }

    /// Distinct rational roots, by the rational root theorem. Polynomials with
    /// irrational coefficients or with end coefficients too large to factor
    /// (beyond `10^9`) yield only the roots found so far (`0` if present).
    pub fn rational_roots(&self) -> Vec<Rational> {
        self.rational_roots_within(1_000_000_000)
    }

    /// As `rational_roots`, giving up beyond end coefficients of size `cap`.
    pub fn rational_roots_within(&self, cap: i64) -> Vec<Rational> {
        let mut out = Vec::new();
        if self.is_zero() || (self.radicand() != Ok(0)) {
            return out;
        }
        let (rest, k) = self.strip_zero_roots();
        if k > 0 {
            out.push(Rational::zero());
        }
        if rest.is_constant() {
            return out;
        }
        let rats: Vec<Rational> = rest.coeffs.iter().map(|c| c.as_rational().unwrap().clone()).collect();
        let l = crate::rational::lcm_denominators(rats.iter());
        let ints: Vec<num_bigint::BigInt> = rats.iter().map(|r| (r * &Rational::from(l.clone())).numer()).collect();
        let (Some(c0), Some(cn)) = (ints[0].to_i64(), ints.last().unwrap().to_i64()) else {
            return out;
        };
        if c0.abs() > cap || cn.abs() > cap {
            return out;
        }
        let dp = divisors(c0.unsigned_abs());
        let dq = divisors(cn.unsigned_abs());
        let mut seen = std::collections::BTreeSet::new();
        for p in &dp {
            for q in &dq {
                for sign in [1i64, -1] {
                    let r = Rational::new(sign * *p as i64, *q as i64);
                    if seen.insert(r.clone()) && rest.eval(&FieldElem::from(r.clone())).is_zero() {
                        out.push(r);
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn to_complex_coeffs(&self) -> Vec<(f64, f64)> {
        self.coeffs.iter().map(FieldElem::to_complex).collect()
    }

    /// Descending powers in `var`.
    pub fn display_in(&self, var: char) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let power = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let term = if !c.is_rational() {
                let c = format!("({c})");
                if power.is_empty() {
                    c
                } else {
                    format!("{c}*{power}")
                }
            } else if power.is_empty() {
                c.to_string()
            } else if c.is_one() {
                power
            } else if (-c).is_one() {
                format!("-{power}")
            } else {
                format!("{c}*{power}")
            };
            if out.is_empty() {
                out = term;
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        out
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Monic greatest common divisor; `gcd(f, 0) = monic(f)`.
pub fn gcd(f: &Poly, g: &Poly) -> Result<Poly> {
    if f.is_zero() && g.is_zero() {
        return Err(Error::ZeroPolynomial("gcd(0, 0)"));
    }
    let (mut a, mut b) = (f.monic(), g.monic());
    while !b.is_zero() {
        let r = a.rem(&b)?;
        a = b;
        b = r.monic();
    }
    Ok(a)
}

/// Extended Euclid: returns `(g, s, t)` with `s·f + t·h = g` and `g` monic.
pub fn gcdext(f: &Poly, h: &Poly) -> Result<(Poly, Poly, Poly)> {
    if f.is_zero() && h.is_zero() {
        return Err(Error::ZeroPolynomial("gcd(0, 0)"));
    }
    let (mut r0, mut r1) = (f.clone(), h.clone());
    let (mut s0, mut s1) = (Poly::one(), Poly::zero());
    let (mut t0, mut t1) = (Poly::zero(), Poly::one());
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1)?;
        let s = &s0 - &(&q * &s1);
        let t = &t0 - &(&q * &t1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    let inv = r0.lc().inv()?;
    Ok((r0.scale(&inv), s0.scale(&inv), t0.scale(&inv)))
}

/// Yun's squarefree decomposition.
pub fn yun_squarefree(f: &Poly) -> Result<SquarefreeDecomposition> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial("squarefree decomposition"));
    }
    let unit = f.lc();
    let mut factors = Vec::new();
    if f.is_constant() {
        return Ok(SquarefreeDecomposition { unit, factors });
    }
    let f = f.monic();
    let df = f.derivative();
    let a0 = gcd(&f, &df)?;
    let mut b = f.div_exact(&a0)?;
    let c = df.div_exact(&a0)?;
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while !b.is_constant() {
        let a = gcd(&b, &d)?;
        let next_b = b.div_exact(&a)?;
        let c = d.div_exact(&a)?;
        d = &c - &next_b.derivative();
        if !a.is_constant() {
            factors.push((a, i));
        }
        b = next_b;
        i += 1;
    }
    Ok(SquarefreeDecomposition { unit, factors })
}

/// True iff every root of `f` is a root of `g`.
pub fn radical_divides(f: &Poly, g: &Poly) -> Result<bool> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroPolynomial("radical comparison"));
    }
    f.squarefree_part()?.divides(&g.squarefree_part()?)
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::new(coeffs)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElem::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Poly::new(coeffs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in('z'))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]", self.display_in('x'))
    }
}

/// Serialized as the ascending coefficient list, each coefficient a string.
impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Poly::new(Vec::<FieldElem>::deserialize(d)?))
    }
}

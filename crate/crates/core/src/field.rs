//! Exact scalars in Q or a single quadratic extension Q(√m).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `a + b·√m` with `m` squarefree and not in {0, 1}, or `m = 0` and `b = 0`.
///
/// The radicand is stored with the value so that equality stays structural;
/// values from different extensions are rejected when combined.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    a: Rational,
    b: Rational,
    m: i64,
}

/// Arithmetic operation selector for [`field_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Splits `n` as `s² · t` with `t` squarefree (sign carried by `t`).
pub fn squarefree_split(n: i64) -> (i64, i64) {
    if n == 0 {
        return (0, 0);
    }
    let sign = n.signum();
    let mut rest = n.unsigned_abs();
    let mut square = 1u64;
    let mut core = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
        p += 1;
    }
    core *= rest;
    (square as i64, sign * core as i64)
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && squarefree_split(n).0 == 1
}

impl FieldElem {
    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(Rational::new(n, d))
    }

    pub fn from_rational(a: Rational) -> Self {
        FieldElem { a, b: Rational::zero(), m: 0 }
    }

    /// `a + b·√m`; `m` must be squarefree and different from 1 unless `b = 0`.
    pub fn new(a: Rational, b: Rational, m: i64) -> Result<Self> {
        if b.is_zero() {
            return Ok(Self::from_rational(a));
        }
        if m == 1 || !is_squarefree(m) {
            return Err(Error::InvalidRadicand(m));
        }
        Ok(FieldElem { a, b, m })
    }

    /// The exact square root of an integer, pulling out square factors.
    pub fn sqrt(n: i64) -> Self {
        let (s, t) = squarefree_split(n);
        match t {
            0 => Self::zero(),
            1 => Self::from_int(s),
            _ => FieldElem { a: Rational::zero(), b: Rational::from_int(s), m: t },
        }
    }

    /// The imaginary unit as `√(-1)`.
    pub fn i() -> Self {
        Self::sqrt(-1)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn radical_coeff(&self) -> &Rational {
        &self.b
    }

    /// Zero for pure rationals.
    pub fn radicand(&self) -> i64 {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0 && self.a.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.m == 0 && self.a.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.m == 0
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.m == 0 {
            Some(&self.a)
        } else {
            None
        }
    }

    /// Common radicand of two values, if they live in a common field.
    pub fn joint_radicand(x: i64, y: i64) -> Result<i64> {
        match (x, y) {
            (0, r) | (r, 0) => Ok(r),
            (r, s) if r == s => Ok(r),
            (r, s) => Err(Error::IncompatibleRadicands(r, s)),
        }
    }

    /// Common radicand of a collection of values.
    pub fn radicand_of<'a>(values: impl IntoIterator<Item = &'a FieldElem>) -> Result<i64> {
        values
            .into_iter()
            .try_fold(0, |acc, v| Self::joint_radicand(acc, v.m))
    }

    fn build(a: Rational, b: Rational, m: i64) -> Self {
        if b.is_zero() {
            Self::from_rational(a)
        } else {
            FieldElem { a, b, m }
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        let m = Self::joint_radicand(self.m, rhs.m)?;
        Ok(Self::build(&self.a + &rhs.a, &self.b + &rhs.b, m))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        let m = Self::joint_radicand(self.m, rhs.m)?;
        Ok(Self::build(&self.a - &rhs.a, &self.b - &rhs.b, m))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let m = Self::joint_radicand(self.m, rhs.m)?;
        if self.m == 0 {
            return Ok(Self::build(&self.a * &rhs.a, &self.a * &rhs.b, m));
        }
        if rhs.m == 0 {
            return Ok(Self::build(&self.a * &rhs.a, &self.b * &rhs.a, m));
        }
        let mr = Rational::from_int(m);
        let a = &(&self.a * &rhs.a) + &(&(&self.b * &rhs.b) * &mr);
        let b = &(&self.a * &rhs.b) + &(&self.b * &rhs.a);
        Ok(Self::build(a, b, m))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        let inv = rhs.inv()?;
        self.checked_mul(&inv)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (conj, norm) = self.conjugate_norm();
        let r = norm.recip().ok_or(Error::DivisionByZero)?;
        Ok(Self::build(&conj.a * &r, &conj.b * &r, conj.m))
    }

    /// `(a − b√m, a² − m·b²)`.
    pub fn conjugate_norm(&self) -> (Self, Rational) {
        let conj = Self::build(self.a.clone(), -&self.b, self.m);
        let norm = &(&self.a * &self.a) - &(&(&self.b * &self.b) * &Rational::from_int(self.m));
        (conj, norm)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Embedding into the complex numbers, `(re, im)`.
    pub fn to_complex(&self) -> (f64, f64) {
        let a = self.a.to_f64();
        let b = self.b.to_f64();
        if self.m >= 0 {
            (a + b * (self.m as f64).sqrt(), 0.0)
        } else {
            (a, b * ((-self.m) as f64).sqrt())
        }
    }

    /// True when the value prints without surrounding parentheses in a product.
    pub fn is_simple_for_display(&self) -> bool {
        self.m == 0
    }
}

/// Checked arithmetic entry point.
pub fn field_arith(x: &FieldElem, y: &FieldElem, op: FieldOp) -> Result<FieldElem> {
    match op {
        FieldOp::Add => x.checked_add(y),
        FieldOp::Sub => x.checked_sub(y),
        FieldOp::Mul => x.checked_mul(y),
        FieldOp::Div => x.checked_div(y),
    }
}

/// `(conjugate, norm)` of `x`.
pub fn field_conjugate_norm(x: &FieldElem) -> (FieldElem, Rational) {
    x.conjugate_norm()
}

// Operator forms assume a single radicand per computation context; callers
// validate inputs at the boundary with `FieldElem::radicand_of`.
impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        self.checked_add(rhs).expect("mixed radicands")
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self.checked_sub(rhs).expect("mixed radicands")
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        self.checked_mul(rhs).expect("mixed radicands")
    }
}

impl<'a> Div<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn div(self, rhs: &FieldElem) -> FieldElem {
        self.checked_div(rhs).expect("division by zero or mixed radicands")
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::build(-&self.a, -&self.b, self.m)
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &FieldElem) -> FieldElem {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl From<i64> for FieldElem {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for FieldElem {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

/// Prints `p/q`, `b*sqrt(m)` or `a+b*sqrt(m)`.
impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 0 {
            return write!(f, "{}", self.a);
        }
        let radical = if self.b.is_one() {
            format!("sqrt({})", self.m)
        } else if (-&self.b).is_one() {
            format!("-sqrt({})", self.m)
        } else {
            format!("{}*sqrt({})", self.b, self.m)
        };
        if self.a.is_zero() {
            write!(f, "{radical}")
        } else if radical.starts_with('-') {
            write!(f, "{}{}", self.a, radical)
        } else {
            write!(f, "{}+{}", self.a, radical)
        }
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for FieldElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_field_elem(&s).map_err(serde::de::Error::custom)
    }
}

/// Parses the display form `a`, `b*sqrt(m)`, `a+b*sqrt(m)` (also `sqrt(m)`, `-sqrt(m)`).
pub fn parse_field_elem(s: &str) -> std::result::Result<FieldElem, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(pos) = s.find("sqrt(") else {
        return s.parse::<Rational>().map(FieldElem::from_rational);
    };
    let close = s[pos..].find(')').ok_or_else(|| format!("bad field element `{s}`"))? + pos;
    if close + 1 != s.len() {
        return Err(format!("bad field element `{s}`"));
    }
    let m: i64 = s[pos + 5..close].parse().map_err(|_| format!("bad radicand in `{s}`"))?;
    let head = &s[..pos];
    let head = head.strip_suffix('*').unwrap_or(head);
    // split the head into rational part and radical coefficient at the last top-level sign
    let split = head
        .char_indices()
        .rev()
        .find(|&(i, c)| (c == '+' || c == '-') && i > 0)
        .map(|(i, _)| i);
    let (a, b) = match split {
        Some(i) if !head[..i].is_empty() => (&head[..i], &head[i..]),
        _ => ("0", head),
    };
    let b = match b {
        "" | "+" => Rational::one(),
        "-" => -Rational::one(),
        other => other.trim_start_matches('+').parse::<Rational>()?,
    };
    let a = a.parse::<Rational>()?;
    let (sq, core) = squarefree_split(m);
    let b = &b * &Rational::from_int(sq);
    if core == 1 {
        return Ok(FieldElem::from_rational(&a + &b));
    }
    FieldElem::new(a, b, core).map_err(|e| e.to_string())
}

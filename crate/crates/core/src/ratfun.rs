//! Rational functions `P/Q` with coprime numerator and monic denominator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::matrix::Matrix;
use crate::poly::{gcd, Poly};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

/// A point of the Riemann sphere. `Finite(0)` is always normalized to `Zero`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Finite(FieldElem),
    Zero,
    Infinity,
}

impl Point {
    pub fn finite(x: FieldElem) -> Self {
        if x.is_zero() {
            Point::Zero
        } else {
            Point::Finite(x)
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(x) => write!(f, "{x}"),
            Point::Zero => f.write_str("0"),
            Point::Infinity => f.write_str("infinity"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointValue {
    Finite(FieldElem),
    Pole,
}

impl fmt::Display for PointValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointValue::Finite(x) => write!(f, "{x}"),
            PointValue::Pole => f.write_str("infinity"),
        }
    }
}

/// The value taken at a point and the order with which it is taken.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderRecord {
    pub point: Point,
    pub value: PointValue,
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Plane,
    Punctured,
}

/// Distinct zeros and poles in a region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsRecord {
    pub n_zeros: usize,
    pub n_poles: usize,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueCheck {
    pub sum_finite: FieldElem,
    /// Coefficient of `1/z` in the expansion at infinity.
    pub minus_residue_at_infinity: FieldElem,
    pub agrees: bool,
}

impl RationalFunction {
    /// Cancels the common gcd and makes the denominator monic.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroPolynomial("denominator"));
        }
        FieldElem::radicand_of(num.coeffs().iter().chain(den.coeffs()))?;
        if num.is_zero() {
            return Ok(RationalFunction { num, den: Poly::one() });
        }
        let g = gcd(&num, &den)?;
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g)?, den.div_exact(&g)?)
        };
        if !den.is_monic() {
            let inv = den.lc().inv()?;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction { num: p, den: Poly::one() }
    }

    pub fn constant(c: FieldElem) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The identity function `z`.
    pub fn var() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// `max(deg P, deg Q)`.
    pub fn degree(&self) -> usize {
        self.num.deg0().max(self.den.deg0())
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<FieldElem> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn radicand(&self) -> Result<i64> {
        FieldElem::radicand_of(self.num.coeffs().iter().chain(self.den.coeffs()))
    }

    /// Radicand of `self` together with the given scalars.
    pub fn joint_radicand<'a>(&self, extra: impl IntoIterator<Item = &'a FieldElem>) -> Result<i64> {
        let mut m = self.radicand()?;
        for x in extra {
            m = FieldElem::joint_radicand(m, x.radicand())?;
        }
        Ok(m)
    }

    pub fn require_nonconstant(&self) -> Result<()> {
        if self.is_constant() {
            Err(Error::ConstantFunction)
        } else {
            Ok(())
        }
    }

    /// Numerator of `R − a`, i.e. `P − a·Q`.
    pub fn value_numerator(&self, a: &FieldElem) -> Poly {
        &self.num - &self.den.scale(a)
    }

    pub fn eval(&self, x: &FieldElem) -> Result<PointValue> {
        self.joint_radicand([x])?;
        let q = self.den.eval(x);
        if q.is_zero() {
            return Ok(PointValue::Pole);
        }
        Ok(PointValue::Finite(&self.num.eval(x) / &q))
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        Self::constant(c.clone()).mul_checked(self).expect("scalar product")
    }

    fn same_field(&self, o: &Self) -> Result<()> {
        FieldElem::joint_radicand(self.radicand()?, o.radicand()?).map(|_| ())
    }

    pub fn add_checked(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        Self::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn sub_checked(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        Self::new(&(&self.num * &o.den) - &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn mul_checked(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        Self::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn div_checked(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(FieldElem::one()).div_checked(self)
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(RationalFunction { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// `R(z − t)`.
    pub fn translate(&self, t: &FieldElem) -> Self {
        let s = -t;
        RationalFunction { num: self.num.shift(&s), den: self.den.shift(&s) }
    }

    /// `R(t·z)` for `t ≠ 0`.
    pub fn scale_var(&self, t: &FieldElem) -> Result<Self> {
        if t.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.num.scale_var(t), self.den.scale_var(t))
    }

    /// `R(1/w)`.
    pub fn invert_var(&self) -> Self {
        let d = self.degree();
        Self::new(self.num.reverse(d), self.den.reverse(d)).expect("reversal of a nonzero denominator")
    }

    /// `R(w^k)`.
    pub fn compose_power(&self, k: usize) -> Self {
        RationalFunction { num: self.num.compose_power(k), den: self.den.compose_power(k) }
    }

    /// Largest `k` with `R(w) = S(w^k)`, together with `S` (`k = 1` when no reduction).
    pub fn reduce_power(&self) -> (Self, usize) {
        let k = num_integer::gcd(self.num.exponent_gcd(), self.den.exponent_gcd());
        if k <= 1 {
            return (self.clone(), 1);
        }
        (RationalFunction { num: self.num.decompose_power(k), den: self.den.decompose_power(k) }, k)
    }

    pub fn display_in(&self, var: char) -> String {
        if self.den.is_one() {
            return self.num.display_in(var);
        }
        format!("({})/({})", self.num.display_in(var), self.den.display_in(var))
    }
}

/// Normalized `P/Q`.
pub fn rf_normalize(p: Poly, q: Poly) -> Result<RationalFunction> {
    RationalFunction::new(p, q)
}

/// `R′ = (P′Q − PQ′)/Q²`.
pub fn rf_derivative(r: &RationalFunction) -> Result<RationalFunction> {
    r.require_nonconstant()?;
    RationalFunction::new(wronskian(r), &r.den * &r.den)
}

/// `λ·w·R′(w)`.
pub fn rf_euler_derivative(r: &RationalFunction, lambda: &FieldElem) -> Result<RationalFunction> {
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    r.require_nonconstant()?;
    r.joint_radicand([lambda])?;
    RationalFunction::new(&Poly::monomial(lambda.clone(), 1) * &wronskian(r), &r.den * &r.den)
}

/// `W = P′Q − PQ′`.
pub fn wronskian(r: &RationalFunction) -> Poly {
    &(&r.num.derivative() * &r.den) - &(&r.num * &r.den.derivative())
}

pub fn rf_order_at(r: &RationalFunction, point: &Point) -> Result<OrderRecord> {
    r.require_nonconstant()?;
    match point {
        Point::Infinity => {
            let (dp, dq) = (r.num.deg0(), r.den.deg0());
            if dp > dq {
                return Ok(OrderRecord { point: Point::Infinity, value: PointValue::Pole, order: dp - dq });
            }
            let v = if dp == dq { r.num.lc() } else { FieldElem::zero() };
            let diff = r.value_numerator(&v);
            let order = dq - diff.deg0();
            Ok(OrderRecord { point: Point::Infinity, value: PointValue::Finite(v), order })
        }
        Point::Zero => finite_order(r, &FieldElem::zero(), Point::Zero),
        Point::Finite(x) => {
            r.joint_radicand([x])?;
            finite_order(r, x, Point::finite(x.clone()))
        }
    }
}

fn finite_order(r: &RationalFunction, x: &FieldElem, point: Point) -> Result<OrderRecord> {
    let q = r.den.eval(x);
    if q.is_zero() {
        let order = r.den.root_multiplicity(x)?;
        return Ok(OrderRecord { point, value: PointValue::Pole, order });
    }
    let v = &r.num.eval(x) / &q;
    let order = r.value_numerator(&v).root_multiplicity(x)?;
    Ok(OrderRecord { point, value: PointValue::Finite(v), order })
}

pub fn rf_counts(r: &RationalFunction, region: Region) -> Result<CountsRecord> {
    r.require_nonconstant()?;
    let count = |p: &Poly| -> Result<usize> {
        let p = match region {
            Region::Plane => p.clone(),
            Region::Punctured => p.strip_zero_roots().0,
        };
        p.distinct_root_count()
    };
    Ok(CountsRecord { n_zeros: count(&r.num)?, n_poles: count(&r.den)?, region })
}

/// `Σ (mult − 1)` over the sphere, computed from the Wronskian without using
/// the Riemann–Hurwitz formula.
pub fn total_ramification(r: &RationalFunction) -> Result<usize> {
    r.require_nonconstant()?;
    let w = wronskian(r);
    // split W into the part supported on poles and the rest
    let mut rest = w;
    let mut pole_part_deg = 0;
    loop {
        let g = gcd(&rest, &r.den)?;
        if g.is_one() {
            break;
        }
        pole_part_deg += g.deg0();
        rest = rest.div_exact(&g)?;
    }
    let pole_ramification = r.den.deg0() - r.den.squarefree_part()?.deg0();
    if pole_part_deg != pole_ramification {
        return Err(Error::Invariant(format!(
            "Wronskian has order {pole_part_deg} along the poles, expected {pole_ramification}"
        )));
    }
    let at_infinity = rf_order_at(r, &Point::Infinity)?.order - 1;
    Ok(rest.deg0() + pole_ramification + at_infinity)
}

/// Sum of residues at the finite poles against the `1/z` coefficient at infinity.
pub fn residue_identity_check(r: &RationalFunction) -> Result<ResidueCheck> {
    let (_, t) = r.num.divrem(&r.den)?;
    let n = r.den.deg0();
    let minus_residue_at_infinity = if n == 0 { FieldElem::zero() } else { t.coeff(n - 1) };
    let sum_finite = if n == 0 {
        FieldElem::zero()
    } else {
        if !r.den.is_squarefree()? {
            return Err(Error::NonSquarefreeDenominator);
        }
        let m = Matrix::companion(&r.den)?;
        let pm = m.eval_poly(&r.num);
        let dm = m.eval_poly(&r.den.derivative());
        pm.mul(&dm.inverse()?).trace()
    };
    let agrees = sum_finite == minus_residue_at_infinity;
    Ok(ResidueCheck { sum_finite, minus_residue_at_infinity, agrees })
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        self.add_checked(rhs).expect("sum of rational functions")
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self.sub_checked(rhs).expect("difference of rational functions")
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        self.mul_checked(rhs).expect("product of rational functions")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in('z'))
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R[{}]", self.display_in('w'))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(c)
    }

    fn q(n: i64, d: i64) -> FieldElem {
        FieldElem::from_ratio(n, d)
    }

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(p(n), p(d)).unwrap()
    }

    fn ex53() -> RationalFunction {
        rf(&[3, 32, 48], &[0, 16, 32])
    }

    #[test]
    fn normalize_examples() {
        let r = rf(&[-1, 0, 1], &[-1, 1]);
        assert_eq!((r.num(), r.den()), (&p(&[1, 1]), &Poly::one()));
        let r = ex53();
        assert_eq!(r.num(), &Poly::new(vec![q(3, 32), q(1, 1), q(3, 2)]));
        assert_eq!(r.den(), &Poly::new(vec![q(0, 1), q(1, 2), q(1, 1)]));
        let r = rf(&[2], &[1, -1]);
        assert_eq!((r.num(), r.den()), (&p(&[-2]), &p(&[-1, 1])));
        assert!(RationalFunction::new(p(&[1]), Poly::zero()).is_err());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(rf_derivative(&rf(&[0, 0, 1], &[1])).unwrap(), rf(&[0, 2], &[1]));
        // (z − h)^2 / z^2 with h = 8/3
        let h = q(8, 3);
        let lin = Poly::new(vec![-&h, FieldElem::one()]);
        let r = RationalFunction::new(lin.pow(2), p(&[0, 0, 1])).unwrap();
        let expect = RationalFunction::new(lin.scale(&(&h * &q(2, 1))), p(&[0, 0, 0, 1])).unwrap();
        assert_eq!(rf_derivative(&r).unwrap(), expect);
        // 1 + (z^2+1)/(2z)
        let r = rf(&[1, 2, 1], &[0, 2]);
        assert_eq!(rf_derivative(&r).unwrap(), rf(&[-1, 0, 1], &[0, 0, 2]));
        assert_eq!(rf_derivative(&rf(&[3], &[1])), Err(Error::ConstantFunction));
    }

    #[test]
    fn euler_examples() {
        let r2 = rf(&[2], &[1, -1]);
        let d = rf_euler_derivative(&r2, &q(-2, 1)).unwrap();
        assert_eq!(d, rf(&[0, -4], &[1, -2, 1]));
        let mono = rf(&[0, 0, 0, 7], &[1]);
        assert_eq!(rf_euler_derivative(&mono, &q(1, 3)).unwrap(), mono);
        let pp = Poly::new(vec![q(3, 16), q(1, 1), q(1, 1)]);
        let d = rf_euler_derivative(&RationalFunction::from_poly(pp), &FieldElem::one()).unwrap();
        assert_eq!(d, rf(&[0, 1, 2], &[1]));
        assert_eq!(rf_euler_derivative(&r2, &FieldElem::zero()), Err(Error::ZeroLambda));
    }

    #[test]
    fn order_examples() {
        let h = q(8, 3);
        let lin = Poly::new(vec![-&h, FieldElem::one()]);
        let r = RationalFunction::new(lin.pow(2), p(&[0, 0, 1])).unwrap();
        let o = rf_order_at(&r, &Point::Infinity).unwrap();
        assert_eq!((o.value, o.order), (PointValue::Finite(FieldElem::one()), 1));
        let o = rf_order_at(&rf(&[1, 2, 1], &[0, 2]), &Point::Infinity).unwrap();
        assert_eq!((o.value, o.order), (PointValue::Pole, 1));
        let o = rf_order_at(&rf(&[2], &[1, -1]), &Point::Zero).unwrap();
        assert_eq!((o.value, o.order), (PointValue::Finite(q(2, 1)), 1));
        let o = rf_order_at(&r, &Point::finite(h)).unwrap();
        assert_eq!((o.value, o.order), (PointValue::Finite(FieldElem::zero()), 2));
        let o = rf_order_at(&r, &Point::Zero).unwrap();
        assert_eq!((o.value, o.order), (PointValue::Pole, 2));
    }

    #[test]
    fn counts_examples() {
        let c = rf_counts(&rf(&[2], &[1, -1]), Region::Punctured).unwrap();
        assert_eq!((c.n_zeros, c.n_poles), (0, 1));
        let c = rf_counts(&rf(&[0, 0, 0, 5], &[1]), Region::Punctured).unwrap();
        assert_eq!((c.n_zeros, c.n_poles), (0, 0));
        // 1/(w^3 − 1)^2
        let den = p(&[-1, 0, 0, 1]).pow(2);
        let c = rf_counts(&RationalFunction::new(Poly::one(), den).unwrap(), Region::Punctured).unwrap();
        assert_eq!((c.n_zeros, c.n_poles), (0, 3));
    }

    #[test]
    fn ramification_examples() {
        assert_eq!(total_ramification(&rf(&[0, 0, 1], &[1])).unwrap(), 2);
        let r = RationalFunction::new(p(&[-8, 3]).pow(2), p(&[0, 0, 9])).unwrap();
        assert_eq!(total_ramification(&r).unwrap(), 2);
        assert_eq!(total_ramification(&rf(&[1, 2, 1], &[0, 2])).unwrap(), 2);
        assert_eq!(total_ramification(&ex53()).unwrap(), 2);
    }

    #[test]
    fn residue_examples() {
        let c = residue_identity_check(&rf(&[1], &[-1, 0, 1])).unwrap();
        assert_eq!((c.sum_finite.clone(), c.agrees), (FieldElem::zero(), true));
        let c = residue_identity_check(&rf(&[0, 2], &[-1, 0, 1])).unwrap();
        assert_eq!(c.sum_finite, q(2, 1));
        assert_eq!(c.minus_residue_at_infinity, q(2, 1));
        assert!(c.agrees);
        assert_eq!(
            residue_identity_check(&rf(&[1], &[0, 0, 1])),
            Err(Error::NonSquarefreeDenominator)
        );
    }

    #[test]
    fn transforms() {
        let r = ex53();
        let t = q(1, 3);
        let x = q(5, 7);
        let shifted = r.translate(&t);
        assert_eq!(shifted.eval(&(&x + &t)).unwrap(), r.eval(&x).unwrap());
        let inv = r.invert_var();
        assert_eq!(inv.eval(&x).unwrap(), r.eval(&x.inv().unwrap()).unwrap());
        let sq = r.compose_power(3);
        assert_eq!(sq.reduce_power(), (r.clone(), 3));
        assert_eq!(r.display_in('w'), "(3/2*w^2 + w + 3/32)/(w^2 + 1/2*w)");
    }

    #[test]
    fn sqrt5_function() {
        let a = (FieldElem::one() - FieldElem::sqrt(5)) / FieldElem::from_int(2);
        let b = (FieldElem::one() + FieldElem::sqrt(5)) / FieldElem::from_int(2);
        let num = Poly::new(vec![a, b]).pow(2);
        let r = RationalFunction::new(num, p(&[1, 1]).pow(2)).unwrap();
        assert_eq!(r.radicand().unwrap(), 5);
        assert_eq!(total_ramification(&r).unwrap(), 2);
        assert!(r.eval(&FieldElem::sqrt(2)).is_err());
    }
}

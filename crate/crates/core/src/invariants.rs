//! Laws every rational function obeys, checked exactly. A failure is a bug in
//! the algebra, never a property of the input.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::ratfun::{
    residue_identity_check, rf_counts, rf_euler_derivative, rf_order_at, total_ramification, Point, PointValue,
    RationalFunction, Region,
};
use crate::sharing::PairKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl InvariantCheck {
    fn new(name: impl Into<String>, holds: bool, detail: String) -> Self {
        InvariantCheck { name: name.into(), holds, detail }
    }
}

/// Total ramification equals `2d − 2`.
pub fn riemann_hurwitz(r: &RationalFunction) -> Result<InvariantCheck> {
    let d = r.degree();
    let rr = total_ramification(r)?;
    Ok(InvariantCheck::new("riemann_hurwitz", rr + 2 == 2 * d, format!("r = {rr}, 2d-2 = {}", 2 * d - 2)))
}

/// `deg(λ·w·R′) = d + n∞` with `n∞` the distinct poles in the punctured plane.
pub fn euler_degree_law(r: &RationalFunction, lambda: &FieldElem) -> Result<InvariantCheck> {
    let g = rf_euler_derivative(r, lambda)?;
    let n_inf = rf_counts(r, Region::Punctured)?.n_poles;
    let d = r.degree();
    Ok(InvariantCheck::new(
        "euler_degree",
        g.degree() == d + n_inf,
        format!("deg = {}, d + n_inf = {}", g.degree(), d + n_inf),
    ))
}

/// At 0 and ∞ a finite value of order `k` becomes a zero of order `k` and a
/// pole of order `k` stays a pole of order `k`.
pub fn euler_boundary_law(r: &RationalFunction, lambda: &FieldElem, point: &Point) -> Result<InvariantCheck> {
    let g = rf_euler_derivative(r, lambda)?;
    let of = rf_order_at(r, point)?;
    let name = format!("euler_boundary_{}", point_name(point));
    if g.is_constant() {
        return Ok(InvariantCheck::new(name, false, "partner is constant".into()));
    }
    let og = rf_order_at(&g, point)?;
    let holds = match of.value {
        PointValue::Pole => og.value == PointValue::Pole && og.order == of.order,
        PointValue::Finite(_) => og.value == PointValue::Finite(FieldElem::zero()) && og.order == of.order,
    };
    Ok(InvariantCheck::new(
        name,
        holds,
        format!("R: {:?} order {}, dR: {:?} order {}", of.value, of.order, og.value, og.order),
    ))
}

fn point_name(p: &Point) -> String {
    match p {
        Point::Zero => "0".into(),
        Point::Infinity => "inf".into(),
        Point::Finite(x) => x.to_string(),
    }
}

/// At `x ≠ 0` where `R` is finite with order `k`, `λ·w·R′` vanishes with order `k − 1`.
pub fn euler_point_law(r: &RationalFunction, lambda: &FieldElem, x: &FieldElem) -> Result<Option<InvariantCheck>> {
    if x.is_zero() {
        return Err(Error::InvalidParams("test point must be non-zero".into()));
    }
    let point = Point::finite(x.clone());
    let of = rf_order_at(r, &point)?;
    if of.value == PointValue::Pole {
        return Ok(None);
    }
    let g = rf_euler_derivative(r, lambda)?;
    let zero = FieldElem::zero();
    let k_g = if g.is_zero() { usize::MAX } else { g.value_numerator(&zero).root_multiplicity(x)? };
    Ok(Some(InvariantCheck::new(
        format!("euler_point_{x}"),
        k_g == of.order - 1,
        format!("order of R {}, zero order of dR {k_g}", of.order),
    )))
}

/// `λ·w·R′ ≡ R` exactly when `R = c·wⁿ` and `λ = 1/n`.
pub fn trivial_identity_law(r: &RationalFunction, lambda: &FieldElem) -> Result<InvariantCheck> {
    let identical = rf_euler_derivative(r, lambda)? == *r;
    let form = monomial_exponent(r).is_some_and(|n| *lambda == FieldElem::from_ratio(1, n));
    Ok(InvariantCheck::new("euler_identity", identical == form, format!("identical {identical}, monomial form {form}")))
}

/// `n` if `r = c·wⁿ` with `n ≠ 0`.
pub fn monomial_exponent(r: &RationalFunction) -> Option<i64> {
    if r.num().term_count() != 1 || r.den().term_count() != 1 {
        return None;
    }
    let n = r.num().deg0() as i64 - r.den().deg0() as i64;
    (n != 0).then_some(n)
}

pub fn residue_law(r: &RationalFunction) -> Result<Option<InvariantCheck>> {
    match residue_identity_check(r) {
        Ok(c) => Ok(Some(InvariantCheck::new(
            "residue_identity",
            c.agrees,
            format!("finite sum {}, 1/z coefficient {}", c.sum_finite, c.minus_residue_at_infinity),
        ))),
        Err(Error::NonSquarefreeDenominator) => Ok(None),
        Err(e) => Err(e),
    }
}

/// The appendix attached to analysis reports.
pub fn invariant_appendix(r: &RationalFunction, pair: &PairKind, test_points: &[FieldElem]) -> Result<Vec<InvariantCheck>> {
    let mut out = vec![riemann_hurwitz(r)?];
    if let Some(c) = residue_law(r)? {
        out.push(c);
    }
    if let PairKind::Euler(lambda) = pair {
        out.push(euler_degree_law(r, lambda)?);
        out.push(euler_boundary_law(r, lambda, &Point::Zero)?);
        out.push(euler_boundary_law(r, lambda, &Point::Infinity)?);
        out.push(trivial_identity_law(r, lambda)?);
        for x in test_points.iter().filter(|x| !x.is_zero()) {
            if let Some(c) = euler_point_law(r, lambda, x)? {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// Turns the first failed check into an error.
pub fn require_all(checks: &[InvariantCheck]) -> Result<()> {
    match checks.iter().find(|c| !c.holds) {
        Some(c) => Err(Error::Invariant(format!("{}: {}", c.name, c.detail))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_ints(n), Poly::from_ints(d)).unwrap()
    }

    #[test]
    fn appendix_on_examples() {
        let one = FieldElem::one();
        let pts = [FieldElem::from_int(1), FieldElem::from_int(2), FieldElem::from_ratio(-1, 4)];
        for f in [rf(&[3, 32, 48], &[0, 16, 32]), rf(&[2], &[1, -1]), rf(&[0, 0, 0, 5], &[1])] {
            let checks = invariant_appendix(&f, &PairKind::Euler(one.clone()), &pts).unwrap();
            require_all(&checks).unwrap();
        }
    }

    #[test]
    fn identity_law_cases() {
        let f = rf(&[0, 0, 0, 5], &[1]);
        let third = FieldElem::from_ratio(1, 3);
        assert_eq!(rf_euler_derivative(&f, &third).unwrap(), f);
        assert!(trivial_identity_law(&f, &third).unwrap().holds);
        let g = rf(&[1], &[0, 1]);
        assert_eq!(rf_euler_derivative(&g, &FieldElem::from_int(-1)).unwrap(), g);
    }

    #[test]
    fn point_law_from_remark() {
        // (w−1)² with λ = 1: dR = 2w(w−1) vanishes simply at 1 and not at 1/2
        let f = rf(&[1, -2, 1], &[1]);
        let c = euler_point_law(&f, &FieldElem::one(), &FieldElem::one()).unwrap().unwrap();
        assert!(c.holds);
        let c = euler_point_law(&f, &FieldElem::one(), &FieldElem::from_ratio(1, 2)).unwrap().unwrap();
        assert!(c.holds);
    }
}

//! Deciding whether `f` and `g = f′` (or `g = λ·w·f′`) share a finite value.
//!
//! Shared points are never isolated: they are carried as squarefree factor
//! polynomials whose roots all have the same pair of multiplicities.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::poly::{gcd, yun_squarefree, Poly};
use crate::ratfun::{rf_derivative, rf_euler_derivative, rf_order_at, OrderRecord, Point, PointValue, RationalFunction};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Derivative,
    Euler(FieldElem),
}

impl PairKind {
    pub fn euler(lambda: FieldElem) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::ZeroLambda);
        }
        Ok(PairKind::Euler(lambda))
    }

    pub fn lambda(&self) -> Option<&FieldElem> {
        match self {
            PairKind::Derivative => None,
            PairKind::Euler(l) => Some(l),
        }
    }

    /// The second function of the pair.
    pub fn apply(&self, f: &RationalFunction) -> Result<RationalFunction> {
        match self {
            PairKind::Derivative => rf_derivative(f),
            PairKind::Euler(l) => rf_euler_derivative(f, l),
        }
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairKind::Derivative => f.write_str("derivative"),
            PairKind::Euler(l) => write!(f, "euler(lambda={l})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainSpec {
    Plane,
    Punctured,
    Sphere,
}

impl DomainSpec {
    pub fn name(self) -> &'static str {
        match self {
            DomainSpec::Plane => "plane",
            DomainSpec::Punctured => "punctured",
            DomainSpec::Sphere => "sphere",
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DomainSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plane" => Ok(DomainSpec::Plane),
            "punctured" | "punctured_plane" => Ok(DomainSpec::Punctured),
            "sphere" => Ok(DomainSpec::Sphere),
            other => Err(Error::UnknownId(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "CM")]
    Cm,
    #[serde(rename = "DM")]
    Dm,
    #[serde(rename = "mixed_IM")]
    MixedIm,
    #[serde(rename = "not_shared")]
    NotShared,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Cm => "CM",
            Mode::Dm => "DM",
            Mode::MixedIm => "mixed_IM",
            Mode::NotShared => "not_shared",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    FOnly,
    GOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedFactor {
    pub factor: Poly,
    pub mult_f: usize,
    pub mult_g: usize,
}

/// Behaviour of both functions at 0 or infinity. `None` means the function is
/// constant, so no order is defined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryRecord {
    pub point: Point,
    pub f: Option<OrderRecord>,
    pub g: Option<OrderRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Roots of `factor` are `a`-points of one function only.
    Factor { factor: Poly, side: Side },
    Boundary { point: Point, side: Side },
    /// One function is identically `a`.
    Identically { side: Side },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharingVerdict {
    pub shared: bool,
    pub mode: Mode,
    /// Neither function takes the value in the domain.
    pub omitted: bool,
    /// `f ≡ g`.
    pub trivial_identity: bool,
    pub shared_factors: Vec<SharedFactor>,
    pub boundary: Vec<BoundaryRecord>,
    pub witness: Option<Witness>,
}

impl SharingVerdict {
    /// All `(mult_f, mult_g)` pairs, boundary included.
    pub fn multiplicity_pairs(&self, a: &FieldElem) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self.shared_factors.iter().map(|s| (s.mult_f, s.mult_g)).collect();
        for b in &self.boundary {
            if let (Some(fo), Some(go)) = (&b.f, &b.g) {
                if takes(fo, a) && takes(go, a) {
                    out.push((fo.order, go.order));
                }
            }
        }
        out
    }
}

/// Result of pairing the Yun decompositions of two polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    /// `(gcd(Aᵢ, Bⱼ), i, j)` sorted by `(i, j)`.
    pub pairs: Vec<(Poly, usize, usize)>,
    pub residual_a: Vec<(Poly, usize)>,
    pub residual_b: Vec<(Poly, usize)>,
}

pub fn multiplicity_pairing(a: &Poly, b: &Poly) -> Result<Pairing> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroPolynomial("multiplicity pairing"));
    }
    let fa = yun_squarefree(a)?.factors;
    let fb = yun_squarefree(b)?.factors;
    let mut rest_b: Vec<Poly> = fb.iter().map(|(p, _)| p.clone()).collect();
    let mut pairs = Vec::new();
    let mut residual_a = Vec::new();
    for (pa, i) in &fa {
        let mut rest_a = pa.clone();
        for (k, (_, j)) in fb.iter().enumerate() {
            if rest_a.is_constant() {
                break;
            }
            let g = gcd(&rest_a, &rest_b[k])?;
            if !g.is_constant() {
                rest_a = rest_a.div_exact(&g)?;
                rest_b[k] = rest_b[k].div_exact(&g)?;
                pairs.push((g, *i, *j));
            }
        }
        if !rest_a.is_constant() {
            residual_a.push((rest_a.monic(), *i));
        }
    }
    let residual_b = rest_b
        .into_iter()
        .zip(fb.iter().map(|(_, j)| *j))
        .filter(|(p, _)| !p.is_constant())
        .map(|(p, j)| (p.monic(), j))
        .collect();
    pairs.sort_by_key(|(_, i, j)| (*i, *j));
    Ok(Pairing { pairs, residual_a, residual_b })
}

fn takes(rec: &OrderRecord, a: &FieldElem) -> bool {
    matches!(&rec.value, PointValue::Finite(v) if v == a)
}

fn order_or_constant(r: &RationalFunction, p: &Point) -> Result<Option<OrderRecord>> {
    if r.is_constant() {
        return Ok(None);
    }
    rf_order_at(r, p).map(Some)
}

/// `f`, its partner `g`, and the domain, prepared once for many values.
#[derive(Debug, Clone)]
pub struct SharingContext {
    pub f: RationalFunction,
    pub g: RationalFunction,
    pub pair: PairKind,
    pub domain: DomainSpec,
    radicand: i64,
    boundary_points: Vec<Point>,
    boundary_orders: Vec<(Option<OrderRecord>, Option<OrderRecord>)>,
}

impl SharingContext {
    pub fn new(f: &RationalFunction, pair: &PairKind, domain: DomainSpec) -> Result<Self> {
        f.require_nonconstant()?;
        let radicand = f.joint_radicand(pair.lambda())?;
        let g = pair.apply(f)?;
        let boundary_points = match (domain, pair) {
            (DomainSpec::Sphere, PairKind::Derivative) => vec![Point::Infinity],
            (DomainSpec::Sphere, PairKind::Euler(_)) => vec![Point::Zero, Point::Infinity],
            _ => Vec::new(),
        };
        let boundary_orders = boundary_points
            .iter()
            .map(|p| Ok((order_or_constant(f, p)?, order_or_constant(&g, p)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SharingContext { f: f.clone(), g, pair: pair.clone(), domain, radicand, boundary_points, boundary_orders })
    }

    pub fn trivial_identity(&self) -> bool {
        self.f == self.g
    }

    /// Whether the finite part strips zero roots (punctured plane, or sphere
    /// with 0 handled as a boundary point).
    fn strips_zero(&self) -> bool {
        self.boundary_points.contains(&Point::Zero) || self.domain == DomainSpec::Punctured
    }

    /// `(A, B)`: the numerators of `f − a` and `g − a` restricted to the
    /// finite part of the domain.
    pub fn value_numerators(&self, a: &FieldElem) -> (Poly, Poly) {
        let mut na = self.f.value_numerator(a);
        let mut nb = self.g.value_numerator(a);
        if self.strips_zero() {
            na = na.strip_zero_roots().0;
            nb = nb.strip_zero_roots().0;
        }
        (na, nb)
    }

    /// Cheap yes/no answer.
    pub fn is_shared(&self, a: &FieldElem) -> Result<bool> {
        FieldElem::joint_radicand(self.radicand, a.radicand())?;
        let (na, nb) = self.value_numerators(a);
        if na.is_zero() || nb.is_zero() {
            return Ok(na.is_zero() && nb.is_zero());
        }
        for (fo, go) in &self.boundary_orders {
            let tf = fo.as_ref().is_some_and(|r| takes(r, a));
            let tg = go.as_ref().is_some_and(|r| takes(r, a));
            if tf != tg {
                return Ok(false);
            }
        }
        same_roots(&na, &nb)
    }

    pub fn verdict(&self, a: &FieldElem) -> Result<SharingVerdict> {
        FieldElem::joint_radicand(self.radicand, a.radicand())?;
        let trivial_identity = self.trivial_identity();
        let (na, nb) = self.value_numerators(a);
        if na.is_zero() || nb.is_zero() {
            // f is nonconstant, so only g can be identically a
            let side = if na.is_zero() { Side::FOnly } else { Side::GOnly };
            return Ok(SharingVerdict {
                shared: false,
                mode: Mode::NotShared,
                omitted: false,
                trivial_identity,
                shared_factors: Vec::new(),
                boundary: Vec::new(),
                witness: Some(Witness::Identically { side }),
            });
        }
        let pairing = multiplicity_pairing(&na, &nb)?;
        let shared_factors: Vec<SharedFactor> = pairing
            .pairs
            .iter()
            .map(|(p, i, j)| SharedFactor { factor: p.clone(), mult_f: *i, mult_g: *j })
            .collect();
        let mut witness = pairing
            .residual_a
            .first()
            .map(|(p, _)| Witness::Factor { factor: p.clone(), side: Side::FOnly })
            .or_else(|| {
                pairing.residual_b.first().map(|(p, _)| Witness::Factor { factor: p.clone(), side: Side::GOnly })
            });
        let mut mults: Vec<(usize, usize)> = shared_factors.iter().map(|s| (s.mult_f, s.mult_g)).collect();
        let mut boundary = Vec::new();
        for (point, (fo, go)) in self.boundary_points.iter().zip(&self.boundary_orders) {
            let tf = fo.as_ref().is_some_and(|r| takes(r, a));
            let tg = go.as_ref().is_some_and(|r| takes(r, a));
            match (tf, tg) {
                (true, true) => mults.push((fo.as_ref().unwrap().order, go.as_ref().unwrap().order)),
                (true, false) | (false, true) if witness.is_none() => {
                    let side = if tf { Side::FOnly } else { Side::GOnly };
                    witness = Some(Witness::Boundary { point: point.clone(), side });
                }
                _ => {}
            }
            boundary.push(BoundaryRecord { point: point.clone(), f: fo.clone(), g: go.clone() });
        }
        let shared = witness.is_none();
        let (mode, omitted) = if !shared {
            (Mode::NotShared, false)
        } else if mults.is_empty() {
            (Mode::Cm, true)
        } else if mults.iter().all(|(i, j)| i == j) {
            (Mode::Cm, false)
        } else if mults.iter().all(|(i, j)| i != j) {
            (Mode::Dm, false)
        } else {
            (Mode::MixedIm, false)
        };
        Ok(SharingVerdict { shared, mode, omitted, trivial_identity, shared_factors, boundary, witness })
    }
}

/// Equal root sets (over the algebraic closure) of two nonzero polynomials.
pub fn same_roots(a: &Poly, b: &Poly) -> Result<bool> {
    let sa = a.squarefree_part()?;
    let sb = b.squarefree_part()?;
    Ok(sa == sb)
}

pub fn shares_value(
    f: &RationalFunction,
    pair: &PairKind,
    a: &FieldElem,
    domain: DomainSpec,
) -> Result<SharingVerdict> {
    SharingContext::new(f, pair, domain)?.verdict(a)
}

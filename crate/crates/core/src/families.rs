//! Catalog of constructive families: each entry builds members from
//! parameters, attaches the verdicts its theorem promises, and recognizes
//! members again.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{parse_field_elem, FieldElem};
use crate::poly::{radical_divides, yun_squarefree, Poly};
use crate::ratfun::{rf_order_at, Point, PointValue, RationalFunction};
use crate::sharing::{DomainSpec, Mode, PairKind, SharedFactor, SharingContext, SharingVerdict};

pub type SvRng = rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamValue {
    Int(i64),
    Elem(FieldElem),
    List(Vec<FieldElem>),
    Tag(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(n) => write!(f, "{n}"),
            ParamValue::Elem(x) => write!(f, "{x}"),
            ParamValue::List(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(";"))
            }
            ParamValue::Tag(t) => f.write_str(t),
        }
    }
}

/// Named family parameters, kept sorted for stable output.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params(BTreeMap<String, ParamValue>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, v: ParamValue) -> Self {
        self.0.insert(name.to_string(), v);
        self
    }

    pub fn int(self, name: &str, v: i64) -> Self {
        self.with(name, ParamValue::Int(v))
    }

    pub fn elem(self, name: &str, v: FieldElem) -> Self {
        // integers are stored as Int so that printing and parsing agree
        match v.as_rational().and_then(|r| r.is_integer().then(|| r.to_i64()).flatten()) {
            Some(n) => self.with(name, ParamValue::Int(n)),
            None => self.with(name, ParamValue::Elem(v)),
        }
    }

    pub fn set(&mut self, name: &str, v: ParamValue) {
        self.0.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &ParamValue)> {
        self.0.iter()
    }

    pub fn get_int(&self, name: &str) -> Result<i64> {
        match self.0.get(name) {
            Some(ParamValue::Int(n)) => Ok(*n),
            Some(ParamValue::Elem(x)) => x
                .as_rational()
                .filter(|r| r.is_integer())
                .and_then(|r| r.to_i64())
                .ok_or_else(|| Error::InvalidParams(format!("{name} must be an integer"))),
            Some(_) => Err(Error::InvalidParams(format!("{name} must be an integer"))),
            None => Err(Error::InvalidParams(format!("missing parameter {name}"))),
        }
    }

    pub fn get_int_or(&self, name: &str, default: i64) -> Result<i64> {
        if self.0.contains_key(name) {
            self.get_int(name)
        } else {
            Ok(default)
        }
    }

    pub fn get_elem(&self, name: &str) -> Result<FieldElem> {
        match self.0.get(name) {
            Some(ParamValue::Int(n)) => Ok(FieldElem::from_int(*n)),
            Some(ParamValue::Elem(x)) => Ok(x.clone()),
            Some(_) => Err(Error::InvalidParams(format!("{name} must be a scalar"))),
            None => Err(Error::InvalidParams(format!("missing parameter {name}"))),
        }
    }

    pub fn get_elem_or(&self, name: &str, default: FieldElem) -> Result<FieldElem> {
        if self.0.contains_key(name) {
            self.get_elem(name)
        } else {
            Ok(default)
        }
    }

    pub fn get_list(&self, name: &str) -> Result<Vec<FieldElem>> {
        match self.0.get(name) {
            Some(ParamValue::List(xs)) => Ok(xs.clone()),
            Some(ParamValue::Int(n)) => Ok(vec![FieldElem::from_int(*n)]),
            Some(ParamValue::Elem(x)) => Ok(vec![x.clone()]),
            Some(_) => Err(Error::InvalidParams(format!("{name} must be a list"))),
            None => Err(Error::InvalidParams(format!("missing parameter {name}"))),
        }
    }

    pub fn get_tag_or(&self, name: &str, default: &str) -> Result<String> {
        match self.0.get(name) {
            Some(ParamValue::Tag(t)) => Ok(t.clone()),
            Some(_) => Err(Error::InvalidParams(format!("{name} must be a name"))),
            None => Ok(default.to_string()),
        }
    }

    fn nonzero(&self, name: &str) -> Result<FieldElem> {
        let x = self.get_elem(name)?;
        if x.is_zero() {
            return Err(Error::InvalidParams(format!("{name} must be non-zero")));
        }
        Ok(x)
    }

    fn int_at_least(&self, name: &str, min: i64) -> Result<i64> {
        let n = self.get_int(name)?;
        if n < min {
            return Err(Error::InvalidParams(format!("{name} must be at least {min}")));
        }
        Ok(n)
    }

    fn sign(&self, name: &str) -> Result<i64> {
        match self.get_int_or(name, 1)? {
            s @ (1 | -1) => Ok(s),
            _ => Err(Error::InvalidParams(format!("{name} must be 1 or -1"))),
        }
    }

    fn flag(&self, name: &str) -> Result<bool> {
        match self.get_int_or(name, 0)? {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(Error::InvalidParams(format!("{name} must be 0 or 1"))),
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// Inverse of the `Display` form: `k=v,...` with `;`-separated lists.
impl std::str::FromStr for Params {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Params::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidParams(format!("`{part}` is not of the form key=value")))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(Error::InvalidParams(format!("`{part}` has an empty key or value")));
            }
            let pv = if v.contains(';') {
                let xs = v
                    .split(';')
                    .map(|x| parse_field_elem(x.trim()).map_err(Error::InvalidParams))
                    .collect::<Result<Vec<_>>>()?;
                ParamValue::List(xs)
            } else if let Ok(n) = v.parse::<i64>() {
                ParamValue::Int(n)
            } else if let Ok(x) = parse_field_elem(v) {
                out = out.elem(k, x);
                continue;
            } else {
                ParamValue::Tag(v.to_string())
            };
            out.set(k, pv);
        }
        Ok(out)
    }
}

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<&String, String> = self.0.iter().map(|(k, v)| (k, v.to_string())).collect();
        m.serialize(s)
    }
}

/// What a theorem promises for one value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Shared,
    SharedWithMode(Mode),
    SharedNotCm,
    /// Shared with exactly these factors and multiplicity pairs.
    SharedPattern(Vec<SharedFactor>, Mode),
    /// Shared vacuously: neither function takes the value in the domain.
    Omitted,
    /// Every value point of `f` in the domain is one of `g`.
    FSideContained,
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Shared => f.write_str("shared"),
            Expectation::SharedWithMode(m) => write!(f, "shared {m}"),
            Expectation::SharedNotCm => f.write_str("shared, not CM"),
            Expectation::SharedPattern(fs, m) => {
                let parts: Vec<String> =
                    fs.iter().map(|s| format!("{}:({},{})", s.factor.display_in('z'), s.mult_f, s.mult_g)).collect();
                write!(f, "shared {m} with [{}]", parts.join(", "))
            }
            Expectation::Omitted => f.write_str("omitted by both"),
            Expectation::FSideContained => f.write_str("value points of f are value points of g"),
        }
    }
}

impl Expectation {
    /// Whether the verdict meets the promise.
    pub fn holds(&self, ctx: &SharingContext, value: &FieldElem, v: &SharingVerdict) -> Result<bool> {
        Ok(match self {
            Expectation::Shared => v.shared,
            Expectation::SharedWithMode(m) => v.shared && v.mode == *m,
            Expectation::SharedNotCm => v.shared && v.mode != Mode::Cm,
            Expectation::SharedPattern(fs, m) => v.shared && v.mode == *m && v.shared_factors == *fs,
            Expectation::Omitted => v.shared && v.omitted,
            Expectation::FSideContained => {
                let (a, b) = ctx.value_numerators(value);
                a.is_constant() || b.is_zero() || (!a.is_zero() && radical_divides(&a, &b)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueCheck {
    pub value: FieldElem,
    pub expect: Expectation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryCheck {
    pub point: Point,
    pub value: PointValue,
}

/// A constructed family member with its promised behaviour.
#[derive(Debug, Clone)]
pub struct FamilyInstance {
    pub family: &'static str,
    pub params: Params,
    pub function: RationalFunction,
    pub pair: PairKind,
    pub domain: DomainSpec,
    pub value_checks: Vec<ValueCheck>,
    pub boundary_checks: Vec<BoundaryCheck>,
}

pub trait Family: Send + Sync {
    fn id(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// Parameter names, with optional ones in brackets.
    fn param_names(&self) -> &'static [&'static str];
    fn construct(&self, params: &Params) -> Result<FamilyInstance>;
    /// Parameters that reconstruct `r` exactly, if `r` belongs to the family.
    fn recognize(&self, r: &RationalFunction, pair: &PairKind) -> Option<Params>;
    /// A random valid parameter draw (small integer grids, exponents at most 6).
    fn sample(&self, rng: &mut SvRng) -> Params;
}

fn fe(n: i64) -> FieldElem {
    FieldElem::from_int(n)
}

fn q(n: i64, d: i64) -> FieldElem {
    FieldElem::from_ratio(n, d)
}

/// `z − t`.
fn lin(t: &FieldElem) -> Poly {
    Poly::new(vec![-t, FieldElem::one()])
}

fn rf(num: Poly, den: Poly) -> Result<RationalFunction> {
    RationalFunction::new(num, den)
}

fn konst(c: &FieldElem) -> RationalFunction {
    RationalFunction::constant(c.clone())
}

fn mono(c: &FieldElem, k: usize) -> Poly {
    Poly::monomial(c.clone(), k)
}

/// `c·w^{±d}`.
fn signed_monomial(c: &FieldElem, d: usize, sign: i64) -> RationalFunction {
    if sign > 0 {
        RationalFunction::from_poly(mono(c, d))
    } else {
        rf(Poly::constant(c.clone()), mono(&FieldElem::one(), d)).expect("monomial denominator")
    }
}

fn usize_of(n: i64) -> usize {
    usize::try_from(n).expect("validated non-negative")
}

fn sample_nonzero(rng: &mut SvRng, bound: i64) -> i64 {
    loop {
        let v = rng.gen_range(-bound..=bound);
        if v != 0 {
            return v;
        }
    }
}

/// The single root `t` if `p = lc·(z − t)^k`, else `None`.
pub(crate) fn single_root(p: &Poly) -> Option<(FieldElem, usize)> {
    let sf = yun_squarefree(p).ok()?;
    match sf.factors.as_slice() {
        [(part, k)] if part.degree() == Some(1) => Some((-part.coeff(0), *k)),
        _ => None,
    }
}

/// `(k, c)` if `p = c·w^k`.
fn as_monomial(p: &Poly) -> Option<(usize, FieldElem)> {
    (p.term_count() == 1).then(|| (p.deg0(), p.lc()))
}

/// `(d, c0)` if `p = w^d + c0` with `d ≥ 1`, `c0 ≠ 0`.
fn as_binomial(p: &Poly) -> Option<(usize, FieldElem)> {
    let d = p.degree()?;
    (d >= 1 && p.is_monic() && p.term_count() == 2 && !p.coeff(0).is_zero()).then(|| (d, p.coeff(0)))
}

fn reconstructs(fam: &dyn Family, params: Params, r: &RationalFunction, pair: &PairKind) -> Option<Params> {
    let inst = fam.construct(&params).ok()?;
    (inst.function == *r && inst.pair == *pair).then_some(params)
}

fn check(value: FieldElem, expect: Expectation) -> ValueCheck {
    ValueCheck { value, expect }
}

fn sqrt5_a() -> FieldElem {
    (FieldElem::one() - FieldElem::sqrt(5)) / fe(2)
}

fn sqrt5_b() -> FieldElem {
    (FieldElem::one() + FieldElem::sqrt(5)) / fe(2)
}

fn sqrt5_lambda() -> FieldElem {
    FieldElem::sqrt(5) / fe(2)
}

// ---------------------------------------------------------------------------

/// `c·(z − A)^n`, `n ≥ 2`: the polynomials sharing 0 with their derivative.
struct PolyZero;

impl Family for PolyZero {
    fn id(&self) -> &'static str {
        "poly_zero_2_3"
    }
    fn description(&self) -> &'static str {
        "c(z-A)^n with n >= 2 shares 0 with its derivative in the plane"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["c", "A", "n"]
    }
    fn construct(&self, params: &Params) -> Result<FamilyInstance> {
        let c = params.nonzero("c")?;
        let a = params.get_elem("A")?;
        let n = params.int_at_least("n", 2)?;
        let f = RationalFunction::from_poly(lin(&a).pow(n as u32).scale(&c));
        Ok(FamilyInstance {
            family: self.id(),
            params: params.clone(),
            function: f,
            pair: PairKind::Derivative,
            domain: DomainSpec::Plane,
            value_checks: vec![check(
                FieldElem::zero(),
                Expectation::SharedPattern(
                    vec![SharedFactor { factor: lin(&a), mult_f: usize_of(n), mult_g: usize_of(n) - 1 }],
                    Mode::Dm,
                ),
            )],
            boundary_checks: Vec::new(),
        })
    }
    fn recognize(&self, r: &RationalFunction, pair: &PairKind) -> Option<Params> {
        if !r.is_polynomial() || r.degree() < 2 {
            return None;
        }
        let (a, n) = single_root(r.num())?;
        let params = Params::new().elem("c", r.num().lc()).elem("A", a).int("n", n as i64);
        reconstructs(self, params, r, pair)
    }
    fn sample(&self, rng: &mut SvRng) -> Params {
        Params::new()
            .int("c", sample_nonzero(rng, 5))
            .int("A", rng.gen_range(-5..=5))
            .int("n", rng.gen_range(2..=6))
    }
}

/// `c·(z − A)^n`, `n ∈ Z \ {0, 1}`: sharing 0 on the sphere.
struct MonomialShift;

impl Family for MonomialShift {
    fn id(&self) -> &'static str {
        "monomial_shift_3_2"
    }
    fn description(&self) -> &'static str {
        "c(z-A)^n with integer n not in {0, 1} shares 0 with its derivative on the sphere"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["c", "A", "n"]
    }
    fn construct(&self, params: &Params) -> Result<FamilyInstance> {
        let c = params.nonzero("c")?;
        let a = params.get_elem("A")?;
        let n = params.get_int("n")?;
        if n == 0 || n == 1 {
            return Err(Error::InvalidParams("n must not be 0 or 1".into()));
        }
        let base = lin(&a).pow(n.unsigned_abs() as u32);
        let f = if n > 0 {
            RationalFunction::from_poly(base.scale(&c))
        } else {
            rf(Poly::constant(c), base)?
        };
        Ok(FamilyInstance {
            family: self.id(),
            params: params.clone(),
            function: f,
            pair: PairKind::Derivative,
            domain: DomainSpec::Sphere,
            value_checks: vec![check(FieldElem::zero(), Expectation::SharedWithMode(Mode::Dm))],
            boundary_checks: Vec::new(),
        })
    }
    fn recognize(&self, r: &RationalFunction, pair: &PairKind) -> Option<Params> {
        let (a, n, c) = if r.is_polynomial() {
            let (a, k) = single_root(r.num())?;
            (a, k as i64, r.num().lc())
        } else if r.num().is_constant() {
            let (a, k) = single_root(r.den())?;
            (a, -(k as i64), r.num().coeff(0))
        } else {
            return None;
        };
        let params = Params::new().elem("c", c).elem("A", a).int("n", n);
        reconstructs(self, params, r, pair)
    }
    fn sample(&self, rng: &mut SvRng) -> Params {
        let n = loop {
            let n = rng.gen_range(-6..=6);
            if n != 0 && n != 1 {
                break n;
            }
        };
        Params::new().int("c", sample_nonzero(rng, 5)).int("A", rng.gen_range(-5..=5)).int("n", n)
    }
}

/// `a(1 + ((z−p)^{n+1} + C)/((n+1)(z−p)^n))`: CM sharing on the sphere.
struct CmSphere;

impl CmSphere {
    fn parts(params: &Params) -> Result<(FieldElem, FieldElem, usize, FieldElem)> {
        let a = params.nonzero("a")?;
        let p = params.get_elem("p")?;
        let n = params.int_at_least("n", 1)?;
        let c = params.nonzero("C")?;
        Ok((a, p, usize_of(n), c))
    }
}

impl Family for CmSphere {
    fn id(&self) -> &'static str {
        "cm_sphere_3_5"
    }
    fn description(&self) -> &'static str {
        "a(1 + ((z-p)^(n+1) + C)/((n+1)(z-p)^n)) shares a CM with its derivative on the sphere"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["a", "p", "n", "C"]
    }
    fn construct(&self, params: &Params) -> Result<FamilyInstance> {
        let (a, p, n, c) = Self::parts(params)?;
        let u = lin(&p);
        let num = &u.pow(n as u32 + 1) + &Poly::constant(c);
        let den = u.pow(n as u32).scale(&fe(n as i64 + 1));
        let f = &konst(&a) + &rf(num.scale(&a), den)?;
        Ok(FamilyInstance {
            family: self.id(),
            params: params.clone(),
            function: f,
            pair: PairKind::Derivative,
            domain: DomainSpec::Sphere,
            value_checks: vec![check(
                a,
                Expectation::SharedPattern(vec![SharedFactor { factor: num.monic(), mult_f: 1, mult_g: 1 }], Mode::Cm),
            )],
            boundary_checks: Vec::new(),
        })
    }
    fn recognize(&self, r: &RationalFunction, pair: &PairKind) -> Option<Params> {
        let (p, n) = single_root(r.den())?;
        let shifted = r.translate(&-&p);
        let a = shifted.num().coeff(n);
        if a.is_zero() {
            return None;
        }
        let c = &(&shifted.num().coeff(0) * &fe(n as i64 + 1)) / &a;
        let params = Params::new().elem("a", a).elem("p", p).int("n", n as i64).elem("C", c);
        reconstructs(self, params, r, pair)
    }
    fn sample(&self, rng: &mut SvRng) -> Params {
        Params::new()
            .int("a", sample_nonzero(rng, 5))
            .int("p", rng.gen_range(-5..=5))
            .int("n", rng.gen_range(1..=6))
            .int("C", sample_nonzero(rng, 5))
    }
}

/// `a(1 + (u^{n+1} + C·u)/((n+1)u^n + C))`, `u = z − p`: shared on the sphere, not CM.
struct ImSphere;

impl Family for ImSphere {
    fn id(&self) -> &'static str {
        "im_sphere_3_7"
    }
    fn description(&self) -> &'static str {
        "a(1 + (u^(n+1) + Cu)/((n+1)u^n + C)), u = z-p, n >= 2: shares a on the sphere but not CM"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["a", "n", "C", "[p]"]
    }
    fn construct(&self, params: &Params) -> Result<FamilyInstance> {
        let a = params.nonzero("a")?;
        let n = usize_of(params.int_at_least("n", 2)?);
        let c = params.nonzero("C")?;
        let p = params.get_elem_or("p", FieldElem::zero())?;
        let u = lin(&p);
        let un = u.pow(n as u32);
        let num = &(&un * &u) + &u.scale(&c);
        let den = &un.scale(&fe(n as i64 + 1)) + &Poly::constant(c.clone());
        let f = &konst(&a) + &rf(num.scale(&a), den)?;
        let shared = vec![
            SharedFactor { factor: &un + &Poly::constant(c), mult_f: 1, mult_g: 1 },
            SharedFactor { factor: u, mult_f: 1, mult_g: n },
        ];
        Ok(FamilyInstance {
            family: self.id(),
            params: params.clone(),
            function: f,
            pair: PairKind::Derivative,
            domain: DomainSpec::Sphere,
            value_checks: vec![check(a, Expectation::SharedPattern(shared, Mode::MixedIm))],
            boundary_checks: Vec::new(),
        })
    }
    fn recognize(&self, r: &RationalFunction, pair: &PairKind) -> Option<Params> {
        let n = r.den().degree().filter(|&n| n >= 2)?;
        let p = &-&r.den().coeff(n - 1) / &fe(n as i64);
        let shifted = r.translate(&-&p);
        let c = &shifted.den().coeff(0) * &fe(n as i64 + 1);
        let a = &shifted.num().lc() * &fe(n as i64 + 1);
        let mut params = Params::new().elem("a", a).int("n", n as i64).elem("C", c);
        if !p.is_zero() {
            params = params.elem("p", p);
        }
        reconstructs(self, params, r, pair)
    }
    fn sample(&self, rng: &mut SvRng) -> Params {
        Params::new()
            .int("a", sample_nonzero(rng, 5))
            .int("n", rng.gen_range(2..=6))
            .int("C", sample_nonzero(rng, 5))
            .int("p", rng.gen_range(-5..=5))
    }
}

/// `a/(n+1)·(z−p) + a + C/(z−p)^n`: CM sharing in the plane.
struct CmPlane;

impl Family for CmPlane {
    fn id(&self) -> &'static str {
        "cm_plane_4_2"
    }
    fn description(&self) -> &'static str {
        "a/(n+1)(z-p) + a + C/(z-p)^n shares a CM with its derivative in the plane"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["a", "p", "n", "C"]
    }
    fn construct(&self, params: &Params) -> Result<FamilyInstance> {
        let a = params.get_elem("a")?;
        let p = params.get_elem("p")?;
        let n = usize_of(params.int_at_least("n", 1)?);
        let c = params.nonzero("C")?;
        let u = lin(&p);
        let linear = RationalFunction::from_poly(&u.scale(&(&a / &fe(n as i64 + 1))) + &Poly::constant(a.clone()));
        let f = &linear + &rf(Poly::constant(c), u.pow(n as u32))?;
        let expect = if a.is_zero() { Expectation::Omitted } else { Expectation::SharedWithMode(Mode::Cm) };
        Ok(FamilyInstance {
            family: self.id(),
            params: params.clone(),
            function: f,
            pair: PairKind::Derivative,
            domain: DomainSpec::Plane,
            value_checks: vec![check(a, expect)],
            boundary_checks: Vec::new(),
        })
    }
    fn recognize(&self, r: &RationalFunction, pair: &PairKind) -> Option<Params> {
        let (p, n) = single_root(r.den())?;
        let shifted = r.translate(&-&p);
        let a = shifted.num().coeff(n);
        let c = shifted.num().coeff(0);
        let params = Params::new().elem("a", a).elem("p", p).int("n", n as i64).elem("C", c);
        reconstructs(self, params, r, pair)
    }
    fn sample(&self, rng: &mut SvRng) -> Params {
        Params::new()
            .int("a", rng.gen_range(-5..=5))
            .int("p", rng.gen_range(-5..=5))
            .int("n", rng.gen_range(1..=6))
            .int("C", sample_nonzero(rng, 5))
    }
}

/// `a(1 ∓ 1/(λd)) + c·w^{±d}`: CM sharing with the Euler derivative on the sphere.
struct CmEuler;

/// `R = k + c·w^{sign·d}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerCmForm {
    pub k: FieldElem,
    pub c: FieldElem,
    pub d: usize,
    pub sign: i64,
}

impl EulerCmForm {
    /// Whether `R` is the member of the family for the shared value `a` and `λ`.
    pub fn matches(&self, a: &FieldElem, lambda: &FieldElem) -> bool {
        self.k == a * &cm_euler_factor(lambda, self.d, self.sign)
    }
}

pub fn euler_cm_form(r: &RationalFunction) -> Option<EulerCmForm> {
    if r.is_polynomial() {
        let d = r.num().degree().filter(|&d| d > 0)?;
        let k = r.num().coeff(0);
        if &mono(&r.num().lc(), d) + &Poly::constant(k.clone()) != *r.num() {
            return None;
        }
        Some(EulerCmForm { k, c: r.num().lc(), d, sign: 1 })
    } else {
        let (d, _) = as_monomial(r.den())?;
        let k = r.num().coeff(d);
        let c = r.num().coeff(0);
        if &mono(&k, d) + &Poly::constant(c.clone()) != *r.num() {
            return None;
        }
        Some(EulerCmForm { k, c, d, sign: -1 })
    }
}

/// `1 − sign/(λd)`.
fn cm_euler_factor(lambda: &FieldElem, d: usize, sign: i64) -> FieldElem {
    FieldElem::one() - fe(sign) / (lambda * &fe(d as i64))
}

impl Family for CmEuler {
    fn id(&self) -> &'static str {
        "cm_euler_5_4"
    }
    fn description(&self) -> &'static str {
        "a(1 -+ 1/(lambda d)) + c w^(+-d) shares a CM with lambda w R'(w) on the sphere"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["a", "lambda", "d", "c", "[sign]"]
    }
    fn construct(&self, params: &Params) -> Result<FamilyInstance> {
        let a = params.get_elem("a")?;
        let lambda = params.nonzero("lambda")?;
        let d = usize_of(params.int_at_least("d", 1)?);
        let c = params.nonzero("c")?;
        let sign = params.sign("sign")?;
        let k = &a * &cm_euler_factor(&lambda, d, sign);
        let f = &konst(&k) + &signed_monomial(&c, d, sign);
        Ok(FamilyInstance {
            family: self.id(),
            params: params.clone(),
            function: f,
            pair: PairKind::euler(lambda)?,
            domain: DomainSpec::Sphere,
            value_checks: vec![check(a, Expectation::SharedWithMode(Mode::Cm))],
            boundary_checks: Vec::new(),
        })
    }
    fn recognize(&self, r: &RationalFunction, pair: &PairKind) -> Option<Params> {
        let lambda = pair.lambda()?;
        let EulerCmForm { k, c, d, sign } = euler_cm_form(r)?;
        let factor = cm_euler_factor(lambda, d, sign);
        let a = if factor.is_zero() { FieldElem::zero() } else { &k / &factor };
        let params =
            Params::new().elem("a", a).elem("lambda", lambda.clone()).int("d", d as i64).elem("c", c).int("sign", sign);
        reconstructs(self, params, r, pair)
    }
    fn sample(&self, rng: &mut SvRng) -> Params {
        let lambda = q(sample_nonzero(rng, 5), rng.gen_range(1..=3));
        Params::new()
            .int("a", rng.gen_range(-5..=5))
            .elem("lambda", lambda)
            .int("d", rng.gen_range(1..=6))
            .int("c", sample_nonzero(rng, 5))
            .int("sign", if rng.gen_bool(0.5) { 1 } else { -1 })
    }
}

/// The fixed function `(48w² + 32w + 3)/(16w(2w + 1))` with `λ = 1`.
struct Ex53;

pub fn ex53_function() -> RationalFunction {
    rf(Poly::from_ints(&[3, 32, 48]), Poly::from_ints(&[0, 16, 32])).expect("fixed example")
}

impl Family for Ex53 {
    fn id(&self) -> &'static str {
        "ex_5_3"
    }
    fn description(&self) -> &'static str {
        "(48w^2+32w+3)/(16w(2w+1)) with lambda = 1 shares 1 on the sphere with multiplicities (1,1) and (1,2)"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &[]
    }
    fn construct(&self, params: &Params) -> Result<FamilyInstance> {
        if params.iter().next().is_some() {
            return Err(Error::InvalidParams("ex_5_3 takes no parameters".into()));
        }
        let shared = vec![
            SharedFactor { factor: lin(&q(-3, 4)), mult_f: 1, mult_g: 1 },
            SharedFactor { factor: lin(&q(-1, 4)), mult_f: 1, mult_g: 2 },
        ];
        Ok(FamilyInstance {
            family: self.id(),
            params: Params::new(),
            function: ex53_function(),
            pair: PairKind::Euler(FieldElem::one()),
            domain: DomainSpec::Sphere,
            value_checks: vec![check(FieldElem::one(), Expectation::SharedPattern(shared, Mode::MixedIm))],
            boundary_checks: Vec::new(),
        })
    }
    fn recognize(&self, r: &RationalFunction, pair: &PairKind) -> Option<Params> {
        reconstructs(self, Params::new(), r, pair)
    }
    fn sample(&self, _rng: &mut SvRng) -> Params {
        Params::new()
    }
}

/// `s·((A + B·C·w)/(1 + C·w))²` with `A, B = (1 ∓ √5)/2`, `λ = √5/2`
/// (`inv = 1` applies `w → 1/w`, `λ → −λ`).
struct R1;

impl Family for R1 {
    fn id(&self) -> &'static str {
        "r1_6_1"
    }
    fn description(&self) -> &'static str {
        "s((A+BCw)/(1+Cw))^2, A,B = (1-+sqrt(5))/2, lambda = sqrt(5)/2: shares 0 and s in the punctured plane"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["C", "[s]", "[inv]"]
    }
    fn construct(&self, params: &Params) -> Result<FamilyInstance> {
        let c = params.nonzero("C")?;
        let s = params.get_elem_or("s", FieldElem::one())?;
        if s.is_zero() {
            return Err(Error::InvalidParams("s must be non-zero".into()));
        }
        let inv = params.flag("inv")?;
        FieldElem::joint_radicand(5, FieldElem::radicand_of([&c, &s])?)?;
        let m = Poly::new(vec![sqrt5_a(), &sqrt5_b() * &c]);
        let mut f = rf(m.pow(2).scale(&s), Poly::new(vec![FieldElem::one(), c]).pow(2))?;
        let mut lambda = sqrt5_lambda();
        if inv {
            f = f.invert_var();
            lambda = -lambda;
        }
        Ok(FamilyInstance {
            family: self.id(),
            params: params.clone(),
            function: f,
            pair: PairKind::Euler(lambda),
            domain: DomainSpec::Punctured,
            value_checks: vec![check(FieldElem::zero(), Expectation::Shared), check(s, Expectation::Shared)],
            boundary_checks: Vec::new(),
        })
    }
    fn recognize(&self, r: &RationalFunction, pair: &PairKind) -> Option<Params> {
        let lambda = pair.lambda()?;
        let (r0, inv) = if *lambda == sqrt5_lambda() {
            (r.clone(), 0)
        } else if *lambda == -sqrt5_lambda() {
            (r.invert_var(), 1)
        } else {
            return None;
        };
        if r0.den().degree() != Some(2) {
            return None;
        }
        let e = &r0.den().coeff(1) / &fe(2);
        if e.is_zero() {
            return None;
        }
        let c = e.inv().ok()?;
        let b = sqrt5_b();
        let s = &r0.num().lc() / &(&b * &b);
        let mut params = Params::new().elem("C", c).elem("s", s);
        if inv == 1 {
            params = params.int("inv", 1);
        }
        reconstructs(self, params, r, pair)
    }
    fn sample(&self, rng: &mut SvRng) -> Params {
        Params::new()
            .int("C", sample_nonzero(rng, 5))
            .int("s", sample_nonzero(rng, 5))
            .int("inv", rng.gen_range(0..=1))
    }
}

/// `2s/(1 − C·w)` with `λ = −2` (`inv = 1`: `w → 1/w`, `λ = 2`).
struct R2;

impl Family for R2 {
    fn id(&self) -> &'static str {
        "r2_6_1"
    }
    fn description(&self) -> &'static str {
        "2s/(1-Cw) with lambda = -2 shares 0 (omitted) and s in the punctured plane"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["C", "[s]", "[inv]"]
    }
    fn construct(&self, params: &Params) -> Result<FamilyInstance> {
        let c = params.nonzero("C")?;
        let s = params.get_elem_or("s", FieldElem::one())?;
        if s.is_zero() {
            return Err(Error::InvalidParams("s must be non-zero".into()));
        }
        let inv = params.flag("inv")?;
        let mut f = rf(Poly::constant(&s * &fe(2)), Poly::new(vec![FieldElem::one(), -c]))?;
        let mut lambda = fe(-2);
        if inv {
            f = f.invert_var();
            lambda = fe(2);
        }
        Ok(FamilyInstance {
            family: self.id(),
            params: params.clone(),
            function: f,
            pair: PairKind::Euler(lambda),
            domain: DomainSpec::Punctured,
            value_checks: vec![check(FieldElem::zero(), Expectation::Omitted), check(s, Expectation::Shared)],
            boundary_checks: Vec::new(),
        })
    }
    fn recognize(&self, r: &RationalFunction, pair: &PairKind) -> Option<Params> {
        let lambda = pair.lambda()?;
        let (r0, inv) = if *lambda == fe(-2) {
            (r.clone(), 0)
        } else if *lambda == fe(2) {
            (r.invert_var(), 1)
        } else {
            return None;
        };
        if r0.den().degree() != Some(1) || !r0.num().is_constant() {
            return None;
        }
        let e = -r0.den().coeff(0);
        let c = e.inv().ok()?;
        let s = &(&-r0.num().coeff(0) * &c) / &fe(2);
        let mut params = Params::new().elem("C", c).elem("s", s);
        if inv == 1 {
            params = params.int("inv", 1);
        }
        reconstructs(self, params, r, pair)
    }
    fn sample(&self, rng: &mut SvRng) -> Params {
        Params::new()
            .int("C", sample_nonzero(rng, 5))
            .int("s", sample_nonzero(rng, 5))
            .int("inv", rng.gen_range(0..=1))
    }
}

/// Which of the three zero-CM shapes `r` has, tested by the defining
/// conditions rather than by parameter matching.
pub fn zero_cm_shape(r: &RationalFunction) -> Result<Option<char>> {
    r.require_nonconstant()?;
    let (num, den) = (r.num(), r.den());
    if as_monomial(num).is_some() && as_monomial(den).is_some() {
        return Ok(Some('c'));
    }
    if den.coeff(0).is_zero() || den.is_constant() {
        return Ok(None);
    }
    let only_at_roots_or_zero = |h: &Poly| -> Result<bool> {
        let h = h.strip_zero_roots().0;
        Ok(h.is_constant() || radical_divides(&h, den)?)
    };
    let d = den.deg0();
    if num.is_constant() {
        return Ok(only_at_roots_or_zero(&den.derivative())?.then_some('a'));
    }
    if as_monomial(num).is_some_and(|(k, _)| k == d) {
        return Ok(only_at_roots_or_zero(&den.polar(d)?)?.then_some('b'));
    }
    Ok(None)
}

/// `1/(K(w^n − α)^m)`, `w^{nm}/(K(w^n − α)^m)` or `c·w^{±d}`: sharing 0 CM in the punctured plane.
struct ZeroCmForms;

impl Family for ZeroCmForms {
    fn id(&self) -> &'static str {
        "zero_cm_forms_6"
    }
    fn description(&self) -> &'static str {
        "shape a: 1/P, shape b: w^d/P (P = K(w^n - alpha)^m), shape c: c w^(+-d); share 0 CM in the punctured plane"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["shape", "lambda", "K|c", "alpha", "n", "m", "d", "[sign]"]
    }
    fn construct(&self, params: &Params) -> Result<FamilyInstance> {
        let shape = params.get_tag_or("shape", "a")?;
        let lambda = params.nonzero("lambda")?;
        let f = match shape.as_str() {
            "a" | "b" => {
                let k = params.nonzero("K")?;
                let alpha = params.nonzero("alpha")?;
                let n = usize_of(params.int_at_least("n", 1)?);
                let m = usize_of(params.int_at_least("m", 1)?);
                let base = &mono(&FieldElem::one(), n) - &Poly::constant(alpha);
                let den = base.pow(m as u32).scale(&k);
                let num = if shape == "a" { Poly::one() } else { mono(&FieldElem::one(), n * m) };
                rf(num, den)?
            }
            "c" => {
                let c = params.nonzero("c")?;
                let d = usize_of(params.int_at_least("d", 1)?);
                signed_monomial(&c, d, params.sign("sign")?)
            }
            other => return Err(Error::InvalidParams(format!("unknown shape {other}"))),
        };
        Ok(FamilyInstance {
            family: self.id(),
            params: params.clone(),
            function: f,
            pair: PairKind::euler(lambda)?,
            domain: DomainSpec::Punctured,
            value_checks: vec![check(FieldElem::zero(), Expectation::Omitted)],
            boundary_checks: Vec::new(),
        })
    }
    fn recognize(&self, r: &RationalFunction, pair: &PairKind) -> Option<Params> {
        let lambda = pair.lambda()?.clone();
        let base = Params::new().elem("lambda", lambda);
        let shape = zero_cm_shape(r).ok()??;
        let params = if shape == 'c' {
            let (sign, d, c) = if r.is_polynomial() {
                (1, r.num().deg0(), r.num().lc())
            } else {
                (-1, r.den().deg0(), r.num().coeff(0))
            };
            base.with("shape", ParamValue::Tag("c".into())).elem("c", c).int("d", d as i64).int("sign", sign)
        } else {
            let sf = yun_squarefree(r.den()).ok()?;
            let [(part, m)] = sf.factors.as_slice() else { return None };
            let (n, c0) = as_binomial(part)?;
            let k = r.num().lc().inv().ok()?;
            base.with("shape", ParamValue::Tag(shape.to_string()))
                .elem("K", k)
                .elem("alpha", -c0)
                .int("n", n as i64)
                .int("m", *m as i64)
        };
        reconstructs(self, params, r, pair)
    }
    fn sample(&self, rng: &mut SvRng) -> Params {
        let lambda = q(sample_nonzero(rng, 5), rng.gen_range(1..=3));
        let p = Params::new().elem("lambda", lambda);
        match rng.gen_range(0..3) {
            0 | 1 => {
                let shape = if rng.gen_bool(0.5) { "a" } else { "b" };
                let n = rng.gen_range(1..=3);
                let m = rng.gen_range(1..=6 / n);
                p.with("shape", ParamValue::Tag(shape.into()))
                    .int("K", sample_nonzero(rng, 5))
                    .int("alpha", sample_nonzero(rng, 5))
                    .int("n", n)
                    .int("m", m)
            }
            _ => p
                .with("shape", ParamValue::Tag("c".into()))
                .int("c", sample_nonzero(rng, 5))
                .int("d", rng.gen_range(1..=6))
                .int("sign", if rng.gen_bool(0.5) { 1 } else { -1 }),
        }
    }
}

/// `2b/(1 + C·w^d)` with `λ = −2/d`, or `2b·w^d/(w^d + C)` with `λ = 2/d`.
struct OmittedZeroPowers;

impl Family for OmittedZeroPowers {
    fn id(&self) -> &'static str {
        "thm_6_3"
    }
    fn description(&self) -> &'static str {
        "2b/(1+Cw^d) with lambda = -2/d, or 2b w^d/(w^d+C) with lambda = 2/d: shares 0 (omitted) and b in the punctured plane"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["b", "C", "d", "[form]"]
    }
    fn construct(&self, params: &Params) -> Result<FamilyInstance> {
        let b = params.nonzero("b")?;
        let c = params.nonzero("C")?;
        let d = usize_of(params.int_at_least("d", 1)?);
        let form = params.get_int_or("form", 1)?;
        let two_b = &b * &fe(2);
        let (f, lambda) = match form {
            1 => (rf(Poly::constant(two_b), &Poly::one() + &mono(&c, d))?, q(-2, d as i64)),
            2 => (rf(mono(&two_b, d), &mono(&FieldElem::one(), d) + &Poly::constant(c))?, q(2, d as i64)),
            _ => return Err(Error::InvalidParams("form must be 1 or 2".into())),
        };
        Ok(FamilyInstance {
            family: self.id(),
            params: params.clone(),
            function: f,
            pair: PairKind::Euler(lambda),
            domain: DomainSpec::Punctured,
            value_checks: vec![check(FieldElem::zero(), Expectation::Omitted), check(b, Expectation::Shared)],
            boundary_checks: Vec::new(),
        })
    }
    fn recognize(&self, r: &RationalFunction, pair: &PairKind) -> Option<Params> {
        let lambda = pair.lambda()?;
        let (d, c0) = as_binomial(r.den())?;
        let params = if *lambda == q(-2, d as i64) && r.num().is_constant() {
            let c = c0.inv().ok()?;
            let b = &(&r.num().coeff(0) * &c) / &fe(2);
            Params::new().elem("b", b).elem("C", c).int("d", d as i64).int("form", 1)
        } else if *lambda == q(2, d as i64) {
            let (k, lc) = as_monomial(r.num())?;
            if k != d {
                return None;
            }
            Params::new().elem("b", &lc / &fe(2)).elem("C", c0).int("d", d as i64).int("form", 2)
        } else {
            return None;
        };
        reconstructs(self, params, r, pair)
    }
    fn sample(&self, rng: &mut SvRng) -> Params {
        Params::new()
            .int("b", sample_nonzero(rng, 5))
            .int("C", sample_nonzero(rng, 5))
            .int("d", rng.gen_range(1..=6))
            .int("form", rng.gen_range(1..=2))
    }
}

/// `b(1 + P/∂P)` with `∂P = λ·w·P′`, `P(0) ≠ 0` squarefree: `R(0) = ∞`,
/// `R(∞) = b(1 + 1/(λd))`, and every `b`-point of `R` is one of `∂R`.
struct Lemma81;

impl Family for Lemma81 {
    fn id(&self) -> &'static str {
        "lemma_8_1"
    }
    fn description(&self) -> &'static str {
        "b(1 + P/(lambda w P')): pole at 0, value b(1 + 1/(lambda d)) at infinity, b-points of R are b-points of lambda w R'"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["b", "lambda", "P (ascending coefficients, ';'-separated)"]
    }
    fn construct(&self, params: &Params) -> Result<FamilyInstance> {
        let b = params.nonzero("b")?;
        let lambda = params.nonzero("lambda")?;
        let p = Poly::new(params.get_list("P")?);
        let d = p.degree().filter(|&d| d >= 1).ok_or_else(|| Error::InvalidParams("P must be nonconstant".into()))?;
        if p.coeff(0).is_zero() || !p.is_squarefree()? {
            return Err(Error::InvalidParams("P must be squarefree with P(0) != 0".into()));
        }
        let dp = &Poly::monomial(lambda.clone(), 1) * &p.derivative();
        let f = &konst(&b) + &rf(p.scale(&b), dp)?;
        let at_inf = &b * &(FieldElem::one() + FieldElem::one() / (&lambda * &fe(d as i64)));
        Ok(FamilyInstance {
            family: self.id(),
            params: params.clone(),
            function: f,
            pair: PairKind::Euler(lambda),
            domain: DomainSpec::Punctured,
            value_checks: vec![check(b, Expectation::FSideContained)],
            boundary_checks: vec![
                BoundaryCheck { point: Point::Zero, value: PointValue::Pole },
                BoundaryCheck { point: Point::Infinity, value: PointValue::Finite(at_inf) },
            ],
        })
    }
    fn recognize(&self, r: &RationalFunction, pair: &PairKind) -> Option<Params> {
        let lambda = pair.lambda()?;
        // num = b(D + N), den = D with λ·w·N′ = D, so λ·w·num′ = b·(D + λ·w·D′)
        let d = r.den();
        if *lambda == fe(-1) && r.num().is_constant() && *d == Poly::x() {
            // b(1 + (w − 1)/(−w)) = b/w: the only member with a constant numerator
            let params = Params::new()
                .elem("b", r.num().coeff(0))
                .elem("lambda", lambda.clone())
                .with("P", ParamValue::List(vec![fe(-1), fe(1)]));
            return reconstructs(self, params, r, pair);
        }
        let lw = Poly::monomial(lambda.clone(), 1);
        let lhs = &lw * &r.num().derivative();
        let rhs = d + &(&lw * &d.derivative());
        let (b, rem) = lhs.divrem(&rhs).ok()?;
        if !rem.is_zero() || b.degree() != Some(0) {
            return None;
        }
        let b = b.coeff(0);
        let n = &r.num().scale(&b.inv().ok()?) - d;
        let params = Params::new()
            .elem("b", b)
            .elem("lambda", lambda.clone())
            .with("P", ParamValue::List(n.monic().coeffs().to_vec()));
        reconstructs(self, params, r, pair)
    }
    fn sample(&self, rng: &mut SvRng) -> Params {
        let k = rng.gen_range(1..=3);
        let mut roots: Vec<i64> = Vec::new();
        while roots.len() < k {
            let v = sample_nonzero(rng, 5);
            if !roots.contains(&v) {
                roots.push(v);
            }
        }
        let p = Poly::from_roots(&roots.iter().map(|&v| fe(v)).collect::<Vec<_>>());
        Params::new()
            .int("b", sample_nonzero(rng, 5))
            .elem("lambda", q(sample_nonzero(rng, 5), rng.gen_range(1..=3)))
            .with("P", ParamValue::List(p.coeffs().to_vec()))
    }
}

/// Registry of all families, in catalog order.
pub struct FamilyRegistry {
    families: Vec<Box<dyn Family>>,
}

impl FamilyRegistry {
    pub fn global() -> &'static FamilyRegistry {
        static REG: OnceLock<FamilyRegistry> = OnceLock::new();
        REG.get_or_init(|| FamilyRegistry {
            families: vec![
                Box::new(PolyZero),
                Box::new(MonomialShift),
                Box::new(CmSphere),
                Box::new(ImSphere),
                Box::new(CmPlane),
                Box::new(CmEuler),
                Box::new(Ex53),
                Box::new(R1),
                Box::new(R2),
                Box::new(ZeroCmForms),
                Box::new(OmittedZeroPowers),
                Box::new(Lemma81),
            ],
        })
    }

    pub fn get(&self, id: &str) -> Result<&dyn Family> {
        self.families
            .iter()
            .find(|f| f.id() == id)
            .map(|f| f.as_ref())
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Family> {
        self.families.iter().map(|f| f.as_ref())
    }

    pub fn ids(&self) -> Vec<&'static str> {
        self.families.iter().map(|f| f.id()).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub value: FieldElem,
    pub expectation: String,
    pub mode: Mode,
    pub shared: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryOutcome {
    pub point: Point,
    pub expected: PointValue,
    pub actual: PointValue,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub params: Params,
    pub function: String,
    pub pair: String,
    pub domain: DomainSpec,
    pub checks: Vec<CheckOutcome>,
    pub boundary: Vec<BoundaryOutcome>,
    /// The recognizer recovers parameters that rebuild the same function.
    pub recognized: bool,
    pub passed: bool,
}

/// Runs an instance against its promises and the recognizer round trip.
pub fn verify_instance(family: &dyn Family, inst: &FamilyInstance) -> Result<FamilyReport> {
    let ctx = SharingContext::new(&inst.function, &inst.pair, inst.domain)?;
    let mut checks = Vec::new();
    for vc in &inst.value_checks {
        let v = ctx.verdict(&vc.value)?;
        let passed = vc.expect.holds(&ctx, &vc.value, &v)?;
        checks.push(CheckOutcome {
            value: vc.value.clone(),
            expectation: vc.expect.to_string(),
            mode: v.mode,
            shared: v.shared,
            passed,
        });
    }
    let mut boundary = Vec::new();
    for bc in &inst.boundary_checks {
        let actual = rf_order_at(&inst.function, &bc.point)?.value;
        boundary.push(BoundaryOutcome {
            point: bc.point.clone(),
            expected: bc.value.clone(),
            passed: actual == bc.value,
            actual,
        });
    }
    let recognized = family
        .recognize(&inst.function, &inst.pair)
        .and_then(|p| family.construct(&p).ok())
        .is_some_and(|back| back.function == inst.function);
    let passed = recognized && checks.iter().all(|c| c.passed) && boundary.iter().all(|b| b.passed);
    let var = if matches!(inst.pair, PairKind::Euler(_)) { 'w' } else { 'z' };
    Ok(FamilyReport {
        family: family.id().to_string(),
        params: inst.params.clone(),
        function: inst.function.display_in(var),
        pair: inst.pair.to_string(),
        domain: inst.domain,
        checks,
        boundary,
        recognized,
        passed,
    })
}

pub fn verify_family(id: &str, params: &Params) -> Result<FamilyReport> {
    let fam = FamilyRegistry::global().get(id)?;
    verify_instance(fam, &fam.construct(params)?)
}

/// `count` random members of a family, each verified.
pub fn fuzz_family(id: &str, count: usize, seed: u64) -> Result<Vec<FamilyReport>> {
    use rand::SeedableRng;
    let fam = FamilyRegistry::global().get(id)?;
    let mut rng = SvRng::seed_from_u64(seed);
    (0..count).map(|_| verify_instance(fam, &fam.construct(&fam.sample(&mut rng))?)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> &'static FamilyRegistry {
        FamilyRegistry::global()
    }

    #[test]
    fn cm_sphere_example() {
        let p = Params::new().int("a", 1).int("p", 0).int("n", 1).int("C", 1);
        let inst = reg().get("cm_sphere_3_5").unwrap().construct(&p).unwrap();
        let expect = rf(Poly::from_ints(&[1, 2, 1]), Poly::from_ints(&[0, 2])).unwrap();
        assert_eq!(inst.function, expect);
        let back = reg().get("cm_sphere_3_5").unwrap().recognize(&expect, &PairKind::Derivative).unwrap();
        assert_eq!(back, p);
        assert!(verify_family("cm_sphere_3_5", &p).unwrap().passed);
    }

    #[test]
    fn r2_example() {
        let inst = reg().get("r2_6_1").unwrap().construct(&Params::new().int("C", 1)).unwrap();
        assert_eq!(inst.function, rf(Poly::from_ints(&[2]), Poly::from_ints(&[1, -1])).unwrap());
        assert_eq!(inst.pair, PairKind::Euler(fe(-2)));
        assert!(verify_instance(reg().get("r2_6_1").unwrap(), &inst).unwrap().passed);
    }

    #[test]
    fn r1_example() {
        let p = Params::new().int("C", 1);
        let r = verify_family("r1_6_1", &p).unwrap();
        assert!(r.passed, "{r:?}");
        let r = verify_family("r1_6_1", &p.clone().int("inv", 1).int("s", 3)).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn recognize_examples() {
        let f = RationalFunction::from_poly(Poly::from_ints(&[-3, 1]).pow(4).scale(&fe(5)));
        let got = reg().get("monomial_shift_3_2").unwrap().recognize(&f, &PairKind::Derivative).unwrap();
        assert_eq!(got, Params::new().int("c", 5).int("A", 3).int("n", 4));
        let g = rf(Poly::from_ints(&[2]), Poly::from_ints(&[1, 0, 1])).unwrap();
        let got = reg().get("thm_6_3").unwrap().recognize(&g, &PairKind::Euler(fe(-1))).unwrap();
        assert_eq!(got, Params::new().int("b", 1).int("C", 1).int("d", 2).int("form", 1));
        let e = reg().get("lemma_8_1").unwrap().recognize(&ex53_function(), &PairKind::Euler(fe(1))).unwrap();
        assert_eq!(e.get("P"), Some(&ParamValue::List(vec![q(3, 16), fe(1), fe(1)])));
    }

    #[test]
    fn params_text_round_trip() {
        let p = Params::new()
            .int("n", 3)
            .elem("C", q(-3, 4))
            .elem("s", FieldElem::sqrt(5))
            .with("P", ParamValue::List(vec![fe(-1), q(1, 2), fe(1)]))
            .with("shape", ParamValue::Tag("c".into()));
        assert_eq!(p.to_string().parse::<Params>().unwrap(), p);
        assert!("a1".parse::<Params>().is_err());
    }

    #[test]
    fn fixed_members_pass() {
        let cases = [
            ("poly_zero_2_3", Params::new().int("c", 2).int("A", -1).int("n", 3)),
            ("im_sphere_3_7", Params::new().int("a", 1).int("n", 2).int("C", 1)),
            ("cm_plane_4_2", Params::new().int("a", 1).int("p", 0).int("n", 2).int("C", 1)),
            ("cm_plane_4_2", Params::new().int("a", 0).int("p", 2).int("n", 1).int("C", 3)),
            ("cm_euler_5_4", Params::new().int("a", 2).int("lambda", 1).int("d", 2).int("c", 1).int("sign", -1)),
            ("ex_5_3", Params::new()),
            ("thm_6_3", Params::new().int("b", 3).int("C", -2).int("d", 3).int("form", 2)),
            ("lemma_8_1", Params::new().int("b", 2).int("lambda", 3).with("P", ParamValue::List(vec![fe(-2), fe(-1), fe(1)]))),
        ];
        for (id, p) in cases {
            let r = verify_family(id, &p).unwrap();
            assert!(r.passed, "{id}: {r:?}");
        }
        let shapes = [
            Params::new().with("shape", ParamValue::Tag("a".into())).int("lambda", 1).int("K", 2).int("alpha", 3).int("n", 2).int("m", 2),
            Params::new().with("shape", ParamValue::Tag("b".into())).int("lambda", -1).int("K", 1).int("alpha", 1).int("n", 3).int("m", 1),
            Params::new().with("shape", ParamValue::Tag("c".into())).int("lambda", 2).int("c", 4).int("d", 3).int("sign", -1),
        ];
        for p in shapes {
            let r = verify_family("zero_cm_forms_6", &p).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn invalid_params() {
        let bad = Params::new().int("a", 1).int("p", 0).int("n", 1).int("C", 0);
        assert!(matches!(reg().get("cm_sphere_3_5").unwrap().construct(&bad), Err(Error::InvalidParams(_))));
        assert!(matches!(reg().get("nope"), Err(Error::UnknownId(_))));
        let bad = Params::new().int("c", 1).int("A", 0).int("n", 1);
        assert!(reg().get("monomial_shift_3_2").unwrap().construct(&bad).is_err());
    }

    #[test]
    fn fuzz_all_families() {
        for id in reg().ids() {
            for r in fuzz_family(id, 40, 7).unwrap() {
                assert!(r.passed, "{id}: {r:?}");
            }
        }
    }
}

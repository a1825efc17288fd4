//! Classification and impossibility statements run as executable properties.
//! Every sampled case either misses the hypothesis, confirms the conclusion,
//! or is a violation. A violation is a bug or a counterexample and is always
//! reported.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::families::{euler_cm_form, single_root, zero_cm_shape, FamilyRegistry, SvRng};
use crate::field::FieldElem;
use crate::poly::{radical_divides, Poly};
use crate::ratfun::{rf_counts, rf_order_at, Point, PointValue, RationalFunction, Region};
use crate::sharing::{DomainSpec, Mode, PairKind, SharingContext};

/// One sampled function with its pair and the values to try.
#[derive(Debug, Clone)]
pub struct TheoremCase {
    pub function: RationalFunction,
    pub pair: PairKind,
    pub values: Vec<FieldElem>,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseOutcome {
    /// The hypothesis does not apply.
    Vacuous,
    Confirmed,
    Violated(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setting {
    Polynomial,
    Derivative,
    Euler,
}

pub trait TheoremCheck: Send + Sync {
    fn id(&self) -> &'static str;
    fn statement(&self) -> &'static str;
    fn setting(&self) -> Setting;
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome>;
}

#[derive(Debug, Clone, Serialize)]
pub struct ViolationRecord {
    pub case_index: usize,
    pub function: String,
    pub pair: String,
    pub source: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub theorem: String,
    pub statement: String,
    pub cases: usize,
    pub hypothesis_met: usize,
    pub vacuous: usize,
    pub violations: Vec<ViolationRecord>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn fe(n: i64) -> FieldElem {
    FieldElem::from_int(n)
}

fn var_for(pair: &PairKind) -> char {
    if matches!(pair, PairKind::Euler(_)) {
        'w'
    } else {
        'z'
    }
}

// ---------------------------------------------------------------------------
// shared helpers

fn ctx(case: &TheoremCase, domain: DomainSpec) -> Result<SharingContext> {
    SharingContext::new(&case.function, &case.pair, domain)
}

/// Distinct candidate values shared in `domain`.
fn shared_values(case: &TheoremCase, domain: DomainSpec) -> Result<Vec<FieldElem>> {
    let c = ctx(case, domain)?;
    let mut out = Vec::new();
    for a in &case.values {
        if c.is_shared(a)? {
            out.push(a.clone());
        }
    }
    Ok(out)
}

/// `c·(z − A)^n` with `n ≠ 0`; returns `n`.
pub fn power_of_linear(r: &RationalFunction) -> Option<i64> {
    if r.den().is_constant() {
        single_root(r.num()).map(|(_, k)| k as i64)
    } else if r.num().is_constant() {
        single_root(r.den()).map(|(_, k)| -(k as i64))
    } else {
        None
    }
}

fn pretty(values: &[FieldElem]) -> String {
    let v: Vec<String> = values.iter().map(|x| x.to_string()).collect();
    v.join(", ")
}

fn outcome(hypothesis: bool, conclusion: bool, detail: impl FnOnce() -> String) -> CaseOutcome {
    match (hypothesis, conclusion) {
        (false, _) => CaseOutcome::Vacuous,
        (true, true) => CaseOutcome::Confirmed,
        (true, false) => CaseOutcome::Violated(detail()),
    }
}

/// Both directions of an equivalence: always counts as tested.
fn equivalence(left: bool, right: bool, detail: impl FnOnce() -> String) -> CaseOutcome {
    if left == right {
        CaseOutcome::Confirmed
    } else {
        CaseOutcome::Violated(detail())
    }
}

// ---------------------------------------------------------------------------
// derivative pair

struct PolyNonzeroValue;
impl TheoremCheck for PolyNonzeroValue {
    fn id(&self) -> &'static str {
        "poly_nonzero_value"
    }
    fn statement(&self) -> &'static str {
        "a nonconstant polynomial shares no finite non-zero value with its derivative in the plane"
    }
    fn setting(&self) -> Setting {
        Setting::Polynomial
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let shared: Vec<FieldElem> =
            shared_values(case, DomainSpec::Plane)?.into_iter().filter(|a| !a.is_zero()).collect();
        Ok(equivalence(true, shared.is_empty(), || format!("shares {}", pretty(&shared))))
    }
}

struct PolyTwoValues;
impl TheoremCheck for PolyTwoValues {
    fn id(&self) -> &'static str {
        "poly_two_values"
    }
    fn statement(&self) -> &'static str {
        "a nonconstant polynomial shares at most one finite value with its derivative"
    }
    fn setting(&self) -> Setting {
        Setting::Polynomial
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let shared = shared_values(case, DomainSpec::Plane)?;
        Ok(equivalence(true, shared.len() <= 1, || format!("shares {}", pretty(&shared))))
    }
}

struct PolyZeroIffMonomial;
impl TheoremCheck for PolyZeroIffMonomial {
    fn id(&self) -> &'static str {
        "poly_zero_iff_monomial"
    }
    fn statement(&self) -> &'static str {
        "a polynomial shares 0 with its derivative iff it is c(z-A)^n with n >= 2"
    }
    fn setting(&self) -> Setting {
        Setting::Polynomial
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let shared = ctx(case, DomainSpec::Plane)?.is_shared(&FieldElem::zero())?;
        let form = power_of_linear(&case.function).is_some_and(|n| n >= 2);
        Ok(equivalence(shared, form, || format!("shares 0: {shared}, power form: {form}")))
    }
}

struct SphereZeroImpliedIff;
impl TheoremCheck for SphereZeroImpliedIff {
    fn id(&self) -> &'static str {
        "sphere_zero_implied_iff"
    }
    fn statement(&self) -> &'static str {
        "every zero of R' on the sphere is a zero of R iff R = c(z-A)^n with n != 0"
    }
    fn setting(&self) -> Setting {
        Setting::Derivative
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let f = &case.function;
        let g = case.pair.apply(f)?;
        let zero = FieldElem::zero();
        let finite_ok = g.is_constant() || g.num().is_constant() || radical_divides(g.num(), f.num())?;
        let at_inf = g.is_constant()
            || rf_order_at(&g, &Point::Infinity)?.value != PointValue::Finite(zero.clone())
            || rf_order_at(f, &Point::Infinity)?.value == PointValue::Finite(zero);
        let implied = finite_ok && at_inf;
        let form = power_of_linear(f).is_some();
        Ok(equivalence(implied, form, || format!("implication holds: {implied}, power form: {form}")))
    }
}

struct SphereZeroIffMonomial;
impl TheoremCheck for SphereZeroIffMonomial {
    fn id(&self) -> &'static str {
        "sphere_zero_iff_monomial"
    }
    fn statement(&self) -> &'static str {
        "R shares 0 with R' on the sphere iff R = c(z-A)^n with n not in {0, 1}"
    }
    fn setting(&self) -> Setting {
        Setting::Derivative
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let shared = ctx(case, DomainSpec::Sphere)?.is_shared(&FieldElem::zero())?;
        let form = power_of_linear(&case.function).is_some_and(|n| n != 1);
        Ok(equivalence(shared, form, || format!("shares 0: {shared}, power form: {form}")))
    }
}

struct SphereTwoValues;
impl TheoremCheck for SphereTwoValues {
    fn id(&self) -> &'static str {
        "sphere_two_values"
    }
    fn statement(&self) -> &'static str {
        "R and R' share at most one finite value on the sphere"
    }
    fn setting(&self) -> Setting {
        Setting::Derivative
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let shared = shared_values(case, DomainSpec::Sphere)?;
        Ok(outcome(!shared.is_empty(), shared.len() <= 1, || format!("shares {}", pretty(&shared))))
    }
}

struct SphereNoDm;
impl TheoremCheck for SphereNoDm {
    fn id(&self) -> &'static str {
        "sphere_no_dm"
    }
    fn statement(&self) -> &'static str {
        "R and R' never share a finite non-zero value DM on the sphere"
    }
    fn setting(&self) -> Setting {
        Setting::Derivative
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let c = ctx(case, DomainSpec::Sphere)?;
        let mut met = false;
        for a in case.values.iter().filter(|a| !a.is_zero()) {
            let v = c.verdict(a)?;
            if v.shared {
                met = true;
                if v.mode == Mode::Dm {
                    return Ok(CaseOutcome::Violated(format!("{a} shared DM")));
                }
            }
        }
        Ok(if met { CaseOutcome::Confirmed } else { CaseOutcome::Vacuous })
    }
}

struct SphereCmIff;
impl TheoremCheck for SphereCmIff {
    fn id(&self) -> &'static str {
        "sphere_cm_iff"
    }
    fn statement(&self) -> &'static str {
        "R shares a finite a CM with R' on the sphere iff a != 0 and R = a(1 + ((z-p)^(n+1) + C)/((n+1)(z-p)^n))"
    }
    fn setting(&self) -> Setting {
        Setting::Derivative
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let c = ctx(case, DomainSpec::Sphere)?;
        let params = FamilyRegistry::global().get("cm_sphere_3_5")?.recognize(&case.function, &case.pair);
        for a in &case.values {
            let v = c.verdict(a)?;
            let cm = v.shared && v.mode == Mode::Cm;
            let form = !a.is_zero() && params.as_ref().is_some_and(|p| p.get_elem("a").ok().as_ref() == Some(a));
            if cm != form {
                return Ok(CaseOutcome::Violated(format!("a = {a}: CM {cm}, family form {form}")));
            }
        }
        Ok(CaseOutcome::Confirmed)
    }
}

struct SphereNonzeroRepresentation;

/// `c` with `R/a − 1 = N/(cN + N′)`, `N` squarefree, if it exists.
pub fn gundersen_constant(r: &RationalFunction, a: &FieldElem) -> Result<Option<FieldElem>> {
    let s = r.sub_checked(&RationalFunction::constant(a.clone()))?.scale(&a.inv()?);
    let (n, d) = (s.num(), s.den());
    if n.is_zero() || !n.is_squarefree()? {
        return Ok(None);
    }
    let t = d - &n.derivative();
    if t.is_zero() {
        return Ok(Some(FieldElem::zero()));
    }
    let (quot, rem) = t.divrem(n)?;
    Ok((rem.is_zero() && quot.is_constant()).then(|| quot.coeff(0)))
}

impl TheoremCheck for SphereNonzeroRepresentation {
    fn id(&self) -> &'static str {
        "sphere_nonzero_representation"
    }
    fn statement(&self) -> &'static str {
        "if R shares a != 0 with R' on the sphere then R = a(1 + P/(cP + P')) with P squarefree"
    }
    fn setting(&self) -> Setting {
        Setting::Derivative
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let c = ctx(case, DomainSpec::Sphere)?;
        let mut met = false;
        for a in case.values.iter().filter(|a| !a.is_zero()) {
            if c.is_shared(a)? {
                met = true;
                if gundersen_constant(&case.function, a)?.is_none() {
                    return Ok(CaseOutcome::Violated(format!("{a} shared without the representation")));
                }
            }
        }
        Ok(if met { CaseOutcome::Confirmed } else { CaseOutcome::Vacuous })
    }
}

struct PlaneTwoValues;
impl TheoremCheck for PlaneTwoValues {
    fn id(&self) -> &'static str {
        "plane_two_values"
    }
    fn statement(&self) -> &'static str {
        "R and R' share at most one finite value in the plane"
    }
    fn setting(&self) -> Setting {
        Setting::Derivative
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let shared = shared_values(case, DomainSpec::Plane)?;
        Ok(outcome(!shared.is_empty(), shared.len() <= 1, || format!("shares {}", pretty(&shared))))
    }
}

struct PlaneCmIff;
impl TheoremCheck for PlaneCmIff {
    fn id(&self) -> &'static str {
        "plane_cm_iff"
    }
    fn statement(&self) -> &'static str {
        "R shares a finite a CM with R' in the plane iff R = a/(n+1)(z-p) + a + C/(z-p)^n"
    }
    fn setting(&self) -> Setting {
        Setting::Derivative
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let c = ctx(case, DomainSpec::Plane)?;
        let params = FamilyRegistry::global().get("cm_plane_4_2")?.recognize(&case.function, &case.pair);
        for a in &case.values {
            let v = c.verdict(a)?;
            let cm = v.shared && v.mode == Mode::Cm;
            let form = params.as_ref().is_some_and(|p| p.get_elem("a").ok().as_ref() == Some(a));
            if cm != form {
                return Ok(CaseOutcome::Violated(format!("a = {a}: CM {cm}, family form {form}")));
            }
        }
        Ok(CaseOutcome::Confirmed)
    }
}

// ---------------------------------------------------------------------------
// Euler pair

fn trivial(case: &TheoremCase) -> Result<bool> {
    Ok(case.pair.apply(&case.function)? == case.function)
}

struct EulerSphereCmEquiv;
impl TheoremCheck for EulerSphereCmEquiv {
    fn id(&self) -> &'static str {
        "euler_sphere_cm_equiv"
    }
    fn statement(&self) -> &'static str {
        "on the sphere: no poles in C* and a shared, a shared CM, and R = a(1 -+ 1/(lambda d)) + c w^(+-d) are equivalent"
    }
    fn setting(&self) -> Setting {
        Setting::Euler
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let c = ctx(case, DomainSpec::Sphere)?;
        let lambda = case.pair.lambda().expect("euler setting");
        let no_poles = rf_counts(&case.function, Region::Punctured)?.n_poles == 0;
        let form = euler_cm_form(&case.function);
        for a in &case.values {
            let v = c.verdict(a)?;
            let i = no_poles && v.shared;
            let ii = v.shared && v.mode == Mode::Cm;
            let iii = form.as_ref().is_some_and(|f| f.matches(a, lambda));
            if i != ii || ii != iii {
                return Ok(CaseOutcome::Violated(format!("a = {a}: (i) {i}, (ii) {ii}, (iii) {iii}")));
            }
        }
        Ok(CaseOutcome::Confirmed)
    }
}

/// Shared values that force `R ≡ ∂R`.
fn forces_identity(case: &TheoremCase, domain: DomainSpec, filter: impl Fn(&[FieldElem]) -> bool) -> Result<CaseOutcome> {
    let shared = shared_values(case, domain)?;
    if !filter(&shared) {
        return Ok(CaseOutcome::Vacuous);
    }
    let t = trivial(case)?;
    Ok(outcome(true, t, || format!("shares {} without R = dR", pretty(&shared))))
}

struct EulerSphereTwoValues;
impl TheoremCheck for EulerSphereTwoValues {
    fn id(&self) -> &'static str {
        "euler_sphere_two_values"
    }
    fn statement(&self) -> &'static str {
        "if R and lambda w R' share two finite values on the sphere then R = lambda w R'"
    }
    fn setting(&self) -> Setting {
        Setting::Euler
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        forces_identity(case, DomainSpec::Sphere, |s| s.len() >= 2)
    }
}

struct EulerPuncturedNoPoles;
impl TheoremCheck for EulerPuncturedNoPoles {
    fn id(&self) -> &'static str {
        "euler_punctured_no_poles"
    }
    fn statement(&self) -> &'static str {
        "if R has no poles in C* and shares two finite values with lambda w R' there, then R = lambda w R'"
    }
    fn setting(&self) -> Setting {
        Setting::Euler
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        if rf_counts(&case.function, Region::Punctured)?.n_poles > 0 {
            return Ok(CaseOutcome::Vacuous);
        }
        forces_identity(case, DomainSpec::Punctured, |s| s.len() >= 2)
    }
}

struct EulerPuncturedAcmB;
impl TheoremCheck for EulerPuncturedAcmB {
    fn id(&self) -> &'static str {
        "euler_punctured_acm_b"
    }
    fn statement(&self) -> &'static str {
        "if R and lambda w R' share a != 0 CM and another finite b in C*, then R = lambda w R'"
    }
    fn setting(&self) -> Setting {
        Setting::Euler
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let c = ctx(case, DomainSpec::Punctured)?;
        let mut cm = Vec::new();
        let mut shared = Vec::new();
        for a in &case.values {
            let v = c.verdict(a)?;
            if v.shared {
                shared.push(a.clone());
                if !a.is_zero() && v.mode == Mode::Cm {
                    cm.push(a.clone());
                }
            }
        }
        let met = !cm.is_empty() && shared.len() >= 2;
        let t = met && trivial(case)?;
        Ok(outcome(met, t, || format!("CM {}; shared {}", pretty(&cm), pretty(&shared))))
    }
}

struct EulerPuncturedZeroCmB;
impl TheoremCheck for EulerPuncturedZeroCmB {
    fn id(&self) -> &'static str {
        "euler_punctured_zero_cm_b"
    }
    fn statement(&self) -> &'static str {
        "if 0 is omitted in C* by R and lambda w R' and b is shared, then R = lambda w R' or R = 2b/(1+Cw^d), 2b w^d/(w^d+C) with lambda = -+2/d"
    }
    fn setting(&self) -> Setting {
        Setting::Euler
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let c = ctx(case, DomainSpec::Punctured)?;
        let zero = c.verdict(&FieldElem::zero())?;
        if !(zero.shared && zero.mode == Mode::Cm) {
            return Ok(CaseOutcome::Vacuous);
        }
        let params = FamilyRegistry::global().get("thm_6_3")?.recognize(&case.function, &case.pair);
        let is_trivial = trivial(case)?;
        let mut met = false;
        for b in case.values.iter().filter(|b| !b.is_zero()) {
            if c.is_shared(b)? {
                met = true;
                let form = params.as_ref().is_some_and(|p| p.get_elem("b").ok().as_ref() == Some(b));
                if !(is_trivial || form) {
                    return Ok(CaseOutcome::Violated(format!("0 omitted and {b} shared, no known form")));
                }
            }
        }
        Ok(if met { CaseOutcome::Confirmed } else { CaseOutcome::Vacuous })
    }
}

struct EulerPuncturedHalfPoles;
impl TheoremCheck for EulerPuncturedHalfPoles {
    fn id(&self) -> &'static str {
        "euler_punctured_half_poles"
    }
    fn statement(&self) -> &'static str {
        "if R and lambda w R' share two finite non-zero values in C* then n_inf >= d/2 or R = lambda w R'"
    }
    fn setting(&self) -> Setting {
        Setting::Euler
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let shared: Vec<FieldElem> =
            shared_values(case, DomainSpec::Punctured)?.into_iter().filter(|a| !a.is_zero()).collect();
        if shared.len() < 2 {
            return Ok(CaseOutcome::Vacuous);
        }
        let n_inf = rf_counts(&case.function, Region::Punctured)?.n_poles;
        let ok = 2 * n_inf >= case.function.degree() || trivial(case)?;
        Ok(outcome(true, ok, || format!("shares {} with n_inf = {n_inf}", pretty(&shared))))
    }
}

struct EulerPuncturedZeroCmForms;
impl TheoremCheck for EulerPuncturedZeroCmForms {
    fn id(&self) -> &'static str {
        "euler_punctured_zero_cm_forms"
    }
    fn statement(&self) -> &'static str {
        "R and lambda w R' share 0 CM in C* iff R is 1/P, w^d/P (polar derivative condition) or c w^(+-d)"
    }
    fn setting(&self) -> Setting {
        Setting::Euler
    }
    fn check(&self, case: &TheoremCase) -> Result<CaseOutcome> {
        let v = ctx(case, DomainSpec::Punctured)?.verdict(&FieldElem::zero())?;
        let cm = v.shared && v.mode == Mode::Cm;
        let shape = zero_cm_shape(&case.function)?;
        Ok(equivalence(cm, shape.is_some(), || format!("0 shared CM: {cm}, shape: {shape:?}")))
    }
}

pub struct TheoremRegistry {
    checks: Vec<Box<dyn TheoremCheck>>,
}

impl TheoremRegistry {
    pub fn global() -> &'static TheoremRegistry {
        static REG: OnceLock<TheoremRegistry> = OnceLock::new();
        REG.get_or_init(|| TheoremRegistry {
            checks: vec![
                Box::new(PolyNonzeroValue),
                Box::new(PolyTwoValues),
                Box::new(PolyZeroIffMonomial),
                Box::new(SphereZeroImpliedIff),
                Box::new(SphereZeroIffMonomial),
                Box::new(SphereTwoValues),
                Box::new(SphereNoDm),
                Box::new(SphereCmIff),
                Box::new(SphereNonzeroRepresentation),
                Box::new(PlaneTwoValues),
                Box::new(PlaneCmIff),
                Box::new(EulerSphereCmEquiv),
                Box::new(EulerSphereTwoValues),
                Box::new(EulerPuncturedNoPoles),
                Box::new(EulerPuncturedAcmB),
                Box::new(EulerPuncturedZeroCmB),
                Box::new(EulerPuncturedHalfPoles),
                Box::new(EulerPuncturedZeroCmForms),
            ],
        })
    }

    pub fn get(&self, id: &str) -> Option<&dyn TheoremCheck> {
        self.checks.iter().find(|c| c.id() == id).map(|c| c.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn TheoremCheck> {
        self.checks.iter().map(|c| c.as_ref())
    }

    pub fn ids(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.id()).collect()
    }
}

// ---------------------------------------------------------------------------
// samplers

fn small_rational(rng: &mut SvRng) -> FieldElem {
    let den = [1, 1, 1, 2, 3][rng.gen_range(0..5)];
    FieldElem::from_ratio(rng.gen_range(-4..=4), den)
}

fn random_poly(rng: &mut SvRng, deg: usize) -> Poly {
    if rng.gen_bool(0.4) {
        // built from roots so repeated roots turn up
        let mut p = Poly::constant(fe(loop {
            let c = rng.gen_range(-3..=3);
            if c != 0 {
                break c;
            }
        }));
        for _ in 0..deg {
            p = &p * &Poly::new(vec![-small_rational(rng), FieldElem::one()]);
        }
        p
    } else {
        let mut c: Vec<FieldElem> = (0..=deg).map(|_| fe(rng.gen_range(-5..=5))).collect();
        if c[deg].is_zero() {
            c[deg] = fe(1);
        }
        Poly::new(c)
    }
}

pub fn random_function(rng: &mut SvRng, max_deg: usize) -> RationalFunction {
    loop {
        let dn = rng.gen_range(0..=max_deg);
        let dd = rng.gen_range(0..=max_deg);
        let num = random_poly(rng, dn);
        let den = random_poly(rng, dd);
        if let Ok(r) = RationalFunction::new(num, den) {
            if !r.is_constant() && r.degree() <= max_deg {
                return r;
            }
        }
    }
}

fn random_lambda(rng: &mut SvRng) -> FieldElem {
    FieldElem::from_ratio(
        loop {
            let n = rng.gen_range(-3..=3);
            if n != 0 {
                break n;
            }
        },
        rng.gen_range(1..=3),
    )
}

/// Family members that live in `setting`.
fn family_ids(setting: Setting) -> &'static [&'static str] {
    match setting {
        Setting::Polynomial => &["poly_zero_2_3"],
        Setting::Derivative => &["poly_zero_2_3", "monomial_shift_3_2", "cm_sphere_3_5", "im_sphere_3_7", "cm_plane_4_2"],
        Setting::Euler => {
            &["cm_euler_5_4", "ex_5_3", "r1_6_1", "r2_6_1", "zero_cm_forms_6", "thm_6_3", "lemma_8_1"]
        }
    }
}

/// Base values, family promises, and values of `f` where `f = g` at rational points.
pub fn candidate_values(f: &RationalFunction, g: &RationalFunction, extra: &[FieldElem]) -> Vec<FieldElem> {
    let mut out: Vec<FieldElem> =
        [fe(0), fe(1), fe(-1), fe(2), fe(-2), FieldElem::from_ratio(1, 2)].into_iter().collect();
    out.extend(extra.iter().cloned());
    if let Ok(diff) = f.sub_checked(g) {
        if !diff.is_zero() {
            for x in diff.num().rational_roots_within(1_000_000).into_iter().take(6) {
                if let Ok(PointValue::Finite(v)) = f.eval(&FieldElem::from(x)) {
                    out.push(v);
                }
            }
        }
    }
    let mut uniq: Vec<FieldElem> = Vec::new();
    for v in out {
        if !uniq.contains(&v) {
            uniq.push(v);
        }
    }
    uniq
}

fn gundersen_form(rng: &mut SvRng) -> Option<(RationalFunction, FieldElem)> {
    let a = fe(rng.gen_range(1..=3));
    let c = if rng.gen_bool(0.6) { FieldElem::zero() } else { small_rational(rng) };
    let p = { let deg = rng.gen_range(1..=3); random_poly(rng, deg) };
    if !p.is_squarefree().ok()? {
        return None;
    }
    let den = &p.scale(&c) + &p.derivative();
    let r = RationalFunction::new(p, den).ok()?;
    let r = r.add_checked(&RationalFunction::constant(FieldElem::one())).ok()?.scale(&a);
    (!r.is_constant()).then_some((r, a))
}

fn euler_lemma_form(rng: &mut SvRng) -> Option<(RationalFunction, FieldElem, FieldElem)> {
    let b = fe(rng.gen_range(1..=3));
    let lambda = random_lambda(rng);
    let p = { let deg = rng.gen_range(1..=3); random_poly(rng, deg) };
    let dp = &Poly::monomial(lambda.clone(), 1) * &p.derivative();
    let r = RationalFunction::new(p, dp).ok()?;
    let r = r.add_checked(&RationalFunction::constant(FieldElem::one())).ok()?.scale(&b);
    (!r.is_constant()).then_some((r, b, lambda))
}

/// Draws one case for `setting`, seeded per index for reproducibility.
pub fn sample_case(setting: Setting, rng: &mut SvRng) -> TheoremCase {
    loop {
        let roll = rng.gen_range(0..10);
        let (f, pair, extra, source) = match (setting, roll) {
            (Setting::Polynomial, 0..=6) => {
                let p = { let deg = rng.gen_range(1..=5); random_poly(rng, deg) };
                (RationalFunction::from_poly(p), PairKind::Derivative, Vec::new(), "random".to_string())
            }
            (Setting::Derivative, 0..=5) | (Setting::Euler, 0..=5) => {
                let f = random_function(rng, 5);
                let pair = if setting == Setting::Euler {
                    PairKind::Euler(random_lambda(rng))
                } else {
                    PairKind::Derivative
                };
                (f, pair, Vec::new(), "random".to_string())
            }
            (Setting::Derivative, 6) => match gundersen_form(rng) {
                Some((f, a)) => (f, PairKind::Derivative, vec![a], "a(1+P/(cP+P'))".to_string()),
                None => continue,
            },
            (Setting::Euler, 6) => match euler_lemma_form(rng) {
                Some((f, b, l)) => (f, PairKind::Euler(l), vec![b], "b(1+P/dP)".to_string()),
                None => continue,
            },
            (Setting::Euler, 7) => {
                let n = rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 };
                let c = fe(rng.gen_range(1..=3));
                let f = if n > 0 {
                    RationalFunction::from_poly(Poly::monomial(c, n as usize))
                } else {
                    RationalFunction::new(Poly::constant(c), Poly::monomial(FieldElem::one(), (-n) as usize))
                        .expect("monomial")
                };
                (f, PairKind::Euler(FieldElem::from_ratio(1, n)), Vec::new(), "c w^n".to_string())
            }
            _ => {
                let ids = family_ids(setting);
                let fam = FamilyRegistry::global().get(ids[rng.gen_range(0..ids.len())]).expect("registered");
                match fam.construct(&fam.sample(rng)) {
                    Ok(inst) => {
                        let extra = inst.value_checks.iter().map(|v| v.value.clone()).collect();
                        (inst.function, inst.pair, extra, fam.id().to_string())
                    }
                    Err(_) => continue,
                }
            }
        };
        let Ok(g) = pair.apply(&f) else { continue };
        let values = candidate_values(&f, &g, &extra);
        return TheoremCase { function: f, pair, values, source };
    }
}

fn case_rng(id: &str, seed: u64, index: usize) -> SvRng {
    let h = id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    SvRng::seed_from_u64(h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ index as u64)
}

/// Runs `count` sampled cases; results are ordered by case index.
pub fn run_theorem(check: &dyn TheoremCheck, count: usize, seed: u64) -> Result<TheoremReport> {
    let outcomes: Vec<Result<(TheoremCase, CaseOutcome)>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(check.id(), seed, i);
            let case = sample_case(check.setting(), &mut rng);
            let out = check.check(&case)?;
            Ok((case, out))
        })
        .collect();
    let mut report = TheoremReport {
        theorem: check.id().to_string(),
        statement: check.statement().to_string(),
        cases: count,
        hypothesis_met: 0,
        vacuous: 0,
        violations: Vec::new(),
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        let (case, out) = o?;
        match out {
            CaseOutcome::Vacuous => report.vacuous += 1,
            CaseOutcome::Confirmed => report.hypothesis_met += 1,
            CaseOutcome::Violated(detail) => {
                report.hypothesis_met += 1;
                report.violations.push(ViolationRecord {
                    case_index: i,
                    function: case.function.display_in(var_for(&case.pair)),
                    pair: case.pair.to_string(),
                    source: case.source,
                    detail,
                });
            }
        }
    }
    Ok(report)
}

pub fn run_theorem_by_id(id: &str, count: usize, seed: u64) -> Result<TheoremReport> {
    let check = TheoremRegistry::global().get(id).ok_or_else(|| crate::error::Error::UnknownId(id.to_string()))?;
    run_theorem(check, count, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_ints(n), Poly::from_ints(d)).unwrap()
    }

    #[test]
    fn power_forms() {
        assert_eq!(power_of_linear(&rf(&[9, -6, 1], &[1])), Some(2));
        assert_eq!(power_of_linear(&rf(&[3], &[1, 2, 1])), Some(-2));
        assert_eq!(power_of_linear(&rf(&[1, 0, 1], &[1])), None);
    }

    #[test]
    fn gundersen_on_cm_family() {
        let f = rf(&[1, 2, 1], &[0, 2]);
        assert_eq!(gundersen_constant(&f, &FieldElem::one()).unwrap(), Some(FieldElem::zero()));
        let g = rf(&[1, 0, 1], &[1]);
        assert_eq!(gundersen_constant(&g, &FieldElem::one()).unwrap(), None);
    }

    #[test]
    fn examples_confirm() {
        let one = FieldElem::one();
        let case = TheoremCase {
            function: rf(&[2], &[1, -1]),
            pair: PairKind::Euler(fe(-2)),
            values: vec![fe(0), one.clone()],
            source: "fixed".into(),
        };
        let zero_cm_b = TheoremRegistry::global().get("euler_punctured_zero_cm_b").unwrap();
        assert_eq!(zero_cm_b.check(&case).unwrap(), CaseOutcome::Confirmed);
        let forms = TheoremRegistry::global().get("euler_punctured_zero_cm_forms").unwrap();
        assert_eq!(forms.check(&case).unwrap(), CaseOutcome::Confirmed);
    }

    #[test]
    fn every_theorem_small_run() {
        for check in TheoremRegistry::global().iter() {
            let r = run_theorem(check, 40, 11).unwrap();
            assert!(r.passed(), "{}: {:?}", r.theorem, r.violations);
        }
    }
}

//! Exhaustive grid searches with named prune rules, exact λ elimination,
//! sharded checkpoints and deterministic reports.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::families::FamilyRegistry;
use crate::field::FieldElem;
use crate::poly::{gcd, radical_divides, Poly};
use crate::ratfun::{rf_euler_derivative, RationalFunction};
use crate::rational::Rational;
use crate::sharing::{same_roots, shares_value, DomainSpec, PairKind, SharingContext};

pub const SCHEMA_VERSION: u32 = 1;

mod strnum {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

mod strmap {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, u64>, s: S) -> Result<S::Ok, S::Error> {
        let m: BTreeMap<&String, String> = m.iter().map(|(k, v)| (k, v.to_string())).collect();
        m.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, u64>, D::Error> {
        BTreeMap::<String, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| v.parse().map(|v| (k, v)).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Question1,
    Question3,
    TwoValues,
    Degree2,
}

impl std::str::FromStr for TaskKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "question1" => Ok(TaskKind::Question1),
            "question3" => Ok(TaskKind::Question3),
            "two-values" | "two_values" => Ok(TaskKind::TwoValues),
            "degree2" => Ok(TaskKind::Degree2),
            other => Err(Error::UnknownId(other.to_string())),
        }
    }
}

/// Finite root and coefficient sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Lattice {
    /// `{-r, .., r}`
    Integer { radius: i64 },
    /// `{x + iy : |x|, |y| <= r}`
    Gaussian { radius: i64 },
    /// `{x + y√5 : x, y ∈ {-1, -1/2, 0, 1/2, 1}}`
    Sqrt5Halves,
}

impl Lattice {
    pub fn points(&self) -> Vec<FieldElem> {
        match *self {
            Lattice::Integer { radius } => (-radius..=radius).map(FieldElem::from_int).collect(),
            Lattice::Gaussian { radius } => {
                let mut out = Vec::new();
                for x in -radius..=radius {
                    for y in -radius..=radius {
                        out.push(&FieldElem::from_int(x) + &(&FieldElem::i() * &FieldElem::from_int(y)));
                    }
                }
                out
            }
            Lattice::Sqrt5Halves => {
                let halves = [-2, -1, 0, 1, 2];
                let mut out = Vec::new();
                for &x in &halves {
                    for &y in &halves {
                        let e = FieldElem::new(Rational::new(x, 2), Rational::new(y, 2), 5).expect("radicand 5");
                        out.push(e);
                    }
                }
                out
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Lattice::Integer { radius } => format!("integer({radius})"),
            Lattice::Gaussian { radius } => format!("gaussian({radius})"),
            Lattice::Sqrt5Halves => "sqrt5_halves".into(),
        }
    }
}

impl std::str::FromStr for Lattice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidTask(format!("grid `{s}`: expected integer:R, gaussian:R or sqrt5"));
        if s == "sqrt5" {
            return Ok(Lattice::Sqrt5Halves);
        }
        let (kind, r) = s.split_once(':').ok_or_else(bad)?;
        let radius: i64 = r.trim().parse().map_err(|_| bad())?;
        if !(1..=6).contains(&radius) {
            return Err(Error::InvalidTask(format!("grid radius {radius} outside 1..6")));
        }
        match kind.trim() {
            "integer" | "int" => Ok(Lattice::Integer { radius }),
            "gaussian" => Ok(Lattice::Gaussian { radius }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSel {
    Derivative,
    Euler,
}

/// Everything that determines the result of a run. Hashed for checkpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchTask {
    pub kind: TaskKind,
    /// Largest degree of the searched shapes.
    pub degree: usize,
    /// Root set for numerators and denominators.
    pub lattice: Lattice,
    /// Scalar factors `k` (two_values), `c` (question1) or coefficients of `Q` (question3).
    pub scalars: Vec<FieldElem>,
    /// Shared-value grid for two_values.
    pub values: Vec<FieldElem>,
    /// λ values tried when no value pins λ down.
    pub lambdas: Vec<FieldElem>,
    pub pair: PairSel,
    pub domain: DomainSpec,
    /// Theorem-based prune rules on or off; exact elimination always runs.
    pub prune: bool,
    /// Grid units per checkpoint shard.
    pub shard_size: u64,
}

fn ints(v: &[i64]) -> Vec<FieldElem> {
    v.iter().map(|&n| FieldElem::from_int(n)).collect()
}

fn default_lambdas() -> Vec<FieldElem> {
    let mut out = Vec::new();
    for (n, d) in [(1, 1), (2, 1), (1, 2), (1, 3), (3, 1), (2, 3), (3, 2)] {
        out.push(FieldElem::from_ratio(n, d));
        out.push(FieldElem::from_ratio(-n, d));
    }
    out
}

impl SearchTask {
    pub fn question1() -> Self {
        SearchTask {
            kind: TaskKind::Question1,
            degree: 3,
            lattice: Lattice::Gaussian { radius: 2 },
            scalars: ints(&[-2, -1, 1, 2]),
            values: Vec::new(),
            lambdas: Vec::new(),
            pair: PairSel::Derivative,
            domain: DomainSpec::Plane,
            prune: true,
            shard_size: 10_000,
        }
    }

    pub fn question3() -> Self {
        SearchTask {
            kind: TaskKind::Question3,
            degree: 2,
            lattice: Lattice::Gaussian { radius: 2 },
            scalars: ints(&[-2, -1, 0, 1, 2]),
            values: Vec::new(),
            lambdas: Vec::new(),
            pair: PairSel::Derivative,
            domain: DomainSpec::Plane,
            prune: true,
            shard_size: 10_000,
        }
    }

    pub fn two_values() -> Self {
        SearchTask {
            kind: TaskKind::TwoValues,
            degree: 2,
            lattice: Lattice::Integer { radius: 2 },
            scalars: ints(&[1, -1, 2, -2]),
            values: ints(&[1, 2, -1]),
            lambdas: default_lambdas(),
            pair: PairSel::Euler,
            domain: DomainSpec::Punctured,
            prune: true,
            shard_size: 10_000,
        }
    }

    pub fn degree2() -> Self {
        SearchTask {
            kind: TaskKind::Degree2,
            degree: 2,
            lattice: Lattice::Gaussian { radius: 2 },
            scalars: Vec::new(),
            values: Vec::new(),
            lambdas: default_lambdas(),
            pair: PairSel::Euler,
            domain: DomainSpec::Punctured,
            prune: true,
            shard_size: 10_000,
        }
    }

    pub fn default_for(kind: TaskKind) -> Self {
        match kind {
            TaskKind::Question1 => Self::question1(),
            TaskKind::Question3 => Self::question3(),
            TaskKind::TwoValues => Self::two_values(),
            TaskKind::Degree2 => Self::degree2(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidTask(m.to_string()));
        if self.degree == 0 {
            return bad("degree bound must be at least 1");
        }
        if self.shard_size == 0 {
            return bad("shard size must be positive");
        }
        match self.kind {
            TaskKind::Question1 if self.degree < 2 => bad("question1 needs degree >= 2"),
            TaskKind::Question1 | TaskKind::Question3 | TaskKind::TwoValues if self.scalars.is_empty() => {
                bad("scalar grid is empty")
            }
            TaskKind::TwoValues if self.values.len() < 2 => bad("two_values needs at least two values"),
            TaskKind::TwoValues | TaskKind::Degree2 if self.pair == PairSel::Euler && self.lambdas.is_empty() => {
                bad("lambda grid is empty")
            }
            TaskKind::Degree2 if self.degree > 2 || self.pair != PairSel::Euler || self.domain != DomainSpec::Punctured => {
                bad("degree2 is fixed to degree <= 2, the euler pair and the punctured plane")
            }
            TaskKind::Question1 | TaskKind::Question3 if self.pair != PairSel::Derivative => {
                bad("questions 1 and 3 use the derivative pair")
            }
            _ => Ok(()),
        }
    }

    /// Hex sha256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("task serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitVerdict {
    pub value: String,
    pub mode: String,
    pub omitted: bool,
}

/// A verified configuration and its classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    /// `unit/sub` grid coordinates.
    pub coordinates: String,
    pub params: BTreeMap<String, String>,
    pub function: String,
    pub pair: String,
    pub domain: String,
    pub verdicts: Vec<HitVerdict>,
    pub classification: String,
    pub family_params: Option<String>,
    pub transform: Option<String>,
    pub novel: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    #[serde(with = "strnum")]
    pub analyzed: u64,
    #[serde(with = "strmap")]
    pub pruned: BTreeMap<String, u64>,
    /// Analyzed points where only `R ≡ ∂R` shares the values.
    #[serde(with = "strnum")]
    pub trivial: u64,
}

impl Tally {
    fn prune(&mut self, rule: &str, n: u64) {
        if n > 0 {
            *self.pruned.entry(rule.to_string()).or_insert(0) += n;
        }
    }

    fn merge(&mut self, o: &Tally) {
        self.analyzed += o.analyzed;
        self.trivial += o.trivial;
        for (k, v) in &o.pruned {
            *self.pruned.entry(k.clone()).or_insert(0) += v;
        }
    }

    pub fn pruned_total(&self) -> u64 {
        self.pruned.values().sum()
    }
}

#[derive(Debug, Clone, Default)]
struct UnitResult {
    tally: Tally,
    hits: Vec<SearchHit>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CheckpointRecord {
    task_hash: String,
    #[serde(with = "strnum")]
    shard_index: u64,
    status: String,
    hits: Vec<SearchHit>,
    stats: Tally,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub schema_version: u32,
    pub task: SearchTask,
    pub task_hash: String,
    pub grid: String,
    #[serde(with = "strnum")]
    pub cardinality: u64,
    #[serde(flatten)]
    pub tally: Tally,
    #[serde(with = "strmap")]
    pub classification_counts: BTreeMap<String, u64>,
    #[serde(with = "strnum")]
    pub novel_hits: u64,
    pub hits: Vec<SearchHit>,
    pub statement: String,
}

impl SearchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Hard limit on grid cardinality.
    pub cap: u64,
    pub checkpoint: Option<PathBuf>,
    pub resume: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { cap: 1_000_000_000, checkpoint: None, resume: false }
    }
}

// ---------------------------------------------------------------------------
// classification

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub tag: String,
    pub params: Option<String>,
    pub transform: Option<String>,
}

impl Classification {
    pub fn is_novel(&self) -> bool {
        self.tag == "novel"
    }
}

const EULER_ORDER: &[&str] =
    &["r2_6_1", "r1_6_1", "thm_6_3", "cm_euler_5_4", "zero_cm_forms_6", "lemma_8_1", "ex_5_3"];
const DERIVATIVE_ORDER: &[&str] =
    &["poly_zero_2_3", "monomial_shift_3_2", "cm_sphere_3_5", "im_sphere_3_7", "cm_plane_4_2"];

/// First matching recognizer, trying `w → w^k` reductions after the function
/// itself. Inversion `w → 1/w` and scaling are covered by the family
/// parameters.
pub fn classify_hit(f: &RationalFunction, pair: &PairKind) -> Classification {
    if pair.apply(f).is_ok_and(|g| g == *f) {
        return Classification { tag: "trivial_identity".into(), params: None, transform: None };
    }
    let reg = FamilyRegistry::global();
    let mut variants = vec![(f.clone(), pair.clone(), None)];
    if let PairKind::Euler(l) = pair {
        let (s, k) = f.reduce_power();
        if k > 1 {
            let kl = &FieldElem::from_int(k as i64) * l;
            variants.push((s, PairKind::Euler(kl), Some(format!("w -> w^{k}"))));
        }
    }
    let order = if matches!(pair, PairKind::Euler(_)) { EULER_ORDER } else { DERIVATIVE_ORDER };
    // the two basic examples win over the families that contain their powers
    let (basic, rest) = order.split_at(if matches!(pair, PairKind::Euler(_)) { 2 } else { 0 });
    for ids in [basic, rest] {
        for (g, p, transform) in &variants {
            for id in ids {
                let fam = reg.get(id).expect("registered family");
                if let Some(params) = fam.recognize(g, p) {
                    return Classification {
                        tag: id.to_string(),
                        params: Some(params.to_string()),
                        transform: transform.clone(),
                    };
                }
            }
        }
    }
    Classification { tag: "novel".into(), params: None, transform: None }
}

// ---------------------------------------------------------------------------
// λ elimination

#[derive(Debug, Clone, PartialEq, Eq)]
enum LambdaSet {
    Any,
    Finite(Vec<FieldElem>),
}

impl LambdaSet {
    fn is_empty(&self) -> bool {
        matches!(self, LambdaSet::Finite(v) if v.is_empty())
    }

    fn intersect(&self, o: &LambdaSet) -> LambdaSet {
        match (self, o) {
            (LambdaSet::Any, x) | (x, LambdaSet::Any) => x.clone(),
            (LambdaSet::Finite(a), LambdaSet::Finite(b)) => {
                LambdaSet::Finite(a.iter().filter(|x| b.contains(x)).cloned().collect())
            }
        }
    }
}

/// `R = P/Q` and `w·R′ = G/H`, reduced, so that `∂R = λ·G/H`.
struct EulerData {
    p: Poly,
    q: Poly,
    g: Poly,
    h: Poly,
}

impl EulerData {
    fn new(r: &RationalFunction) -> Result<Self> {
        let wr = rf_euler_derivative(r, &FieldElem::one())?;
        Ok(EulerData { p: r.num().clone(), q: r.den().clone(), g: wr.num().clone(), h: wr.den().clone() })
    }

    fn scaled(&self, k: &FieldElem) -> EulerData {
        EulerData { p: self.p.scale(k), q: self.q.clone(), g: self.g.scale(k), h: self.h.clone() }
    }

    /// λ values for which the `b`-points of `R` and `∂R` in `C*` coincide.
    fn eliminate(&self, b: &FieldElem) -> Result<LambdaSet> {
        let a = (&self.p - &self.q.scale(b)).strip_zero_roots().0;
        if b.is_zero() {
            // λ drops out: the zeros of ∂R in C* are those of G
            let gz = self.g.strip_zero_roots().0;
            let same = if a.is_constant() || gz.is_constant() {
                a.is_constant() && gz.is_constant()
            } else {
                same_roots(&a, &gz)?
            };
            return Ok(if same { LambdaSet::Any } else { LambdaSet::Finite(Vec::new()) });
        }
        let bh = self.h.scale(b);
        if a.is_constant() {
            // b omitted in C*: λG − bH must be c·w^j
            let n = self.g.coeffs().len().max(bh.coeffs().len());
            let mut cands: Vec<FieldElem> = Vec::new();
            for i in 0..n {
                let gi = self.g.coeff(i);
                if !gi.is_zero() {
                    let l = &bh.coeff(i) / &gi;
                    if !l.is_zero() && !cands.contains(&l) {
                        cands.push(l);
                    }
                }
            }
            let mut ok = Vec::new();
            for l in cands {
                let t = &self.g.scale(&l) - &bh;
                if !t.is_zero() && t.term_count() == 1 {
                    ok.push(l);
                }
            }
            if self.g.term_count() == 1 && bh.term_count() == 1 && self.g.deg0() == bh.deg0() {
                return Ok(LambdaSet::Any);
            }
            return Ok(LambdaSet::Finite(ok));
        }
        let rad = a.squarefree_part()?;
        let u = self.g.rem(&rad)?;
        let v = bh.rem(&rad)?;
        if u.is_zero() {
            return Ok(LambdaSet::Finite(Vec::new()));
        }
        let j = u.deg0();
        let l = &v.coeff(j) / &u.coeff(j);
        if l.is_zero() || u.scale(&l) != v {
            return Ok(LambdaSet::Finite(Vec::new()));
        }
        Ok(LambdaSet::Finite(vec![l]))
    }
}

// ---------------------------------------------------------------------------
// grid plans

fn multisets(points: &[FieldElem], max: usize) -> Vec<Poly> {
    fn rec(points: &[FieldElem], start: usize, left: usize, cur: &mut Vec<FieldElem>, out: &mut Vec<Vec<FieldElem>>) {
        if left == 0 {
            return;
        }
        for i in start..points.len() {
            cur.push(points[i].clone());
            out.push(cur.clone());
            rec(points, i, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut sets = vec![Vec::new()];
    let mut rest = Vec::new();
    rec(points, 0, max, &mut Vec::new(), &mut rest);
    rest.sort_by_key(|s| s.len());
    sets.extend(rest);
    sets.iter().map(|s| Poly::from_roots(s)).collect()
}

fn distinct_sets(points: &[FieldElem], min: usize, max: usize) -> Vec<Poly> {
    fn rec(points: &[FieldElem], start: usize, want: usize, cur: &mut Vec<FieldElem>, out: &mut Vec<Poly>) {
        if cur.len() == want {
            out.push(Poly::from_roots(cur));
            return;
        }
        for i in start..points.len() {
            cur.push(points[i].clone());
            rec(points, i + 1, want, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in min..=max {
        rec(points, 0, size, &mut Vec::new(), &mut out);
    }
    out
}

fn show(p: &Poly, var: char) -> String {
    p.display_in(var)
}

/// The value cases checked for each function of a two-value grid.
#[derive(Debug, Clone)]
struct ValueCase {
    a: FieldElem,
    b: FieldElem,
}

/// Functions `k·N/D` over root multisets, value cases per function.
struct RatGrid {
    polys: Vec<Poly>,
    ks: Vec<FieldElem>,
    cases: Vec<ValueCase>,
}

impl RatGrid {
    fn units(&self) -> u64 {
        (self.polys.len() * self.polys.len()) as u64
    }

    fn per_unit(&self) -> u64 {
        (self.ks.len() * self.cases.len()) as u64
    }
}

/// `((αw + β)/(w + δ))²` with values (0, 1).
struct MobiusGrid {
    coeffs: Vec<FieldElem>,
}

impl MobiusGrid {
    fn units(&self) -> u64 {
        (self.coeffs.len() as u64).pow(3)
    }
}

enum Plan {
    Question1 { polys: Vec<Poly>, cs: Vec<FieldElem> },
    Question3 { polys: Vec<Poly>, qs: Vec<Poly> },
    Pairs { grid: RatGrid, second: Option<MobiusGrid> },
}

struct Searcher<'a> {
    task: &'a SearchTask,
    plan: Plan,
}

impl<'a> Searcher<'a> {
    fn new(task: &'a SearchTask) -> Result<Self> {
        task.validate()?;
        let pts = task.lattice.points();
        let plan = match task.kind {
            TaskKind::Question1 => Plan::Question1 { polys: distinct_sets(&pts, 2, task.degree), cs: task.scalars.clone() },
            TaskKind::Question3 => {
                let mut qs = Vec::new();
                for q1 in task.scalars.iter().filter(|c| !c.is_zero()) {
                    for q0 in &task.scalars {
                        qs.push(Poly::new(vec![q0.clone(), q1.clone()]));
                    }
                }
                Plan::Question3 { polys: distinct_sets(&pts, 1, task.degree), qs }
            }
            TaskKind::TwoValues => {
                let mut cases = Vec::new();
                for (i, a) in task.values.iter().enumerate() {
                    for b in &task.values[i + 1..] {
                        if a != b {
                            cases.push(ValueCase { a: a.clone(), b: b.clone() });
                        }
                    }
                }
                Plan::Pairs {
                    grid: RatGrid { polys: multisets(&pts, task.degree), ks: task.scalars.clone(), cases },
                    second: None,
                }
            }
            TaskKind::Degree2 => {
                let one = FieldElem::one();
                let zero = FieldElem::zero();
                let mut cases = vec![ValueCase { a: zero.clone(), b: one.clone() }];
                for a in pts.iter().filter(|a| !a.is_zero() && !a.is_one()) {
                    cases.push(ValueCase { a: a.clone(), b: one.clone() });
                }
                let ks = pts.iter().filter(|k| !k.is_zero()).cloned().collect();
                Plan::Pairs {
                    grid: RatGrid { polys: multisets(&pts, task.degree), ks, cases },
                    second: Some(MobiusGrid { coeffs: Lattice::Sqrt5Halves.points() }),
                }
            }
        };
        Ok(Searcher { task, plan })
    }

    fn units(&self) -> u64 {
        match &self.plan {
            Plan::Question1 { polys, .. } => polys.len() as u64,
            Plan::Question3 { polys, qs } => (polys.len() * qs.len()) as u64,
            Plan::Pairs { grid, second } => grid.units() + second.as_ref().map_or(0, |m| m.units()),
        }
    }

    fn cardinality(&self) -> u64 {
        match &self.plan {
            Plan::Question1 { polys, cs } => (polys.len() * cs.len()) as u64,
            Plan::Question3 { .. } => self.units(),
            Plan::Pairs { grid, second } => grid.units() * grid.per_unit() + second.as_ref().map_or(0, |m| m.units()),
        }
    }

    fn describe(&self) -> String {
        let t = self.task;
        let lat = t.lattice.describe();
        match &self.plan {
            Plan::Question1 { .. } => format!(
                "question1: P monic with distinct roots in {lat}, 2 <= deg P <= {}, c in {{{}}}; condition: every zero of d^2(P) is a zero of P*d(P), d(P) = cP + P'",
                t.degree,
                join(&t.scalars)
            ),
            Plan::Question3 { .. } => format!(
                "question3: R = 1 + P/(QP + P'), P monic with distinct roots in {lat}, 1 <= deg P <= {}, Q = q0 + q1 z with q0, q1 in {{{}}}, q1 != 0; value 1 in the plane",
                t.degree,
                join(&t.scalars)
            ),
            Plan::Pairs { grid, second } => {
                let vals: Vec<String> = grid.cases.iter().map(|c| format!("({}, {})", c.a, c.b)).collect();
                let pair = match t.pair {
                    PairSel::Derivative => "derivative".to_string(),
                    PairSel::Euler => format!("euler, lambda exact-eliminated, fallback {{{}}}", join(&t.lambdas)),
                };
                let mut s = format!(
                    "R = kN/D, N and D monic with root multisets in {lat}, deg <= {}, k in {}; value pairs {}; {pair}; domain {}",
                    t.degree,
                    if t.kind == TaskKind::Degree2 { format!("{lat} minus 0") } else { format!("{{{}}}", join(&grid.ks)) },
                    if t.kind == TaskKind::Degree2 {
                        format!("(0, 1) and (a, 1) with a in {lat} minus {{0, 1}}")
                    } else {
                        vals.join(" ")
                    },
                    t.domain
                );
                if second.is_some() {
                    s.push_str("; plus R = ((alpha w + beta)/(w + delta))^2, alpha, beta, delta in sqrt5_halves, value pair (0, 1)");
                }
                s
            }
        }
    }

    fn eval_unit(&self, unit: u64) -> Result<UnitResult> {
        match &self.plan {
            Plan::Question1 { polys, cs } => self.eval_question1(unit, &polys[unit as usize], cs),
            Plan::Question3 { polys, qs } => {
                let (pi, qi) = (unit as usize / qs.len(), unit as usize % qs.len());
                self.eval_question3(unit, &polys[pi], &qs[qi])
            }
            Plan::Pairs { grid, second } => {
                if unit < grid.units() {
                    self.eval_rat_unit(unit, grid)
                } else {
                    self.eval_mobius_unit(unit, unit - grid.units(), second.as_ref().expect("second grid"))
                }
            }
        }
    }

    fn eval_question1(&self, unit: u64, p: &Poly, cs: &[FieldElem]) -> Result<UnitResult> {
        let mut out = UnitResult::default();
        for (j, c) in cs.iter().enumerate() {
            out.tally.analyzed += 1;
            let holds = question1_condition(p, c)?;
            let dp = p.d_operator(c);
            let r = RationalFunction::new(p.clone(), dp)?
                .add_checked(&RationalFunction::constant(FieldElem::one()))?;
            let v = shares_value(&r, &PairKind::Derivative, &FieldElem::one(), DomainSpec::Plane)?;
            if v.shared != holds {
                return Err(Error::Invariant(format!(
                    "question1 condition {holds} but sharing verdict {} for P = {}, c = {c}",
                    v.shared,
                    show(p, 'z')
                )));
            }
            if holds {
                let class = classify_hit(&r, &PairKind::Derivative);
                let mut params = BTreeMap::new();
                params.insert("P".into(), show(p, 'z'));
                params.insert("c".into(), c.to_string());
                out.hits.push(SearchHit {
                    coordinates: format!("{unit}/{j}"),
                    params,
                    function: r.display_in('z'),
                    pair: "derivative".into(),
                    domain: "plane".into(),
                    verdicts: vec![hit_verdict(&FieldElem::one(), &v)],
                    classification: class.tag.clone(),
                    family_params: class.params,
                    transform: class.transform,
                    novel: !c.is_zero(),
                });
            }
        }
        Ok(out)
    }

    fn eval_question3(&self, unit: u64, p: &Poly, q: &Poly) -> Result<UnitResult> {
        let mut out = UnitResult::default();
        out.tally.analyzed = 1;
        let den = &(q * p) + &p.derivative();
        let r = RationalFunction::new(p.clone(), den)?.add_checked(&RationalFunction::constant(FieldElem::one()))?;
        if r.is_constant() {
            out.tally = Tally::default();
            out.tally.prune("degenerate_shape", 1);
            return Ok(out);
        }
        let v = shares_value(&r, &PairKind::Derivative, &FieldElem::one(), DomainSpec::Plane)?;
        if v.shared {
            let class = classify_hit(&r, &PairKind::Derivative);
            let mut params = BTreeMap::new();
            params.insert("P".into(), show(p, 'z'));
            params.insert("Q".into(), show(q, 'z'));
            out.hits.push(SearchHit {
                coordinates: format!("{unit}/0"),
                params,
                function: r.display_in('z'),
                pair: "derivative".into(),
                domain: "plane".into(),
                verdicts: vec![hit_verdict(&FieldElem::one(), &v)],
                classification: class.tag.clone(),
                family_params: class.params,
                transform: class.transform,
                novel: true,
            });
        }
        Ok(out)
    }

    /// Theorem-based prune applicable to a function and value case, if any.
    fn theorem_prune(&self, r: &RationalFunction, n_inf: usize, case: &ValueCase) -> Option<&'static str> {
        if !self.task.prune {
            return None;
        }
        match (self.task.pair, self.task.domain) {
            (PairSel::Euler, DomainSpec::Punctured) => {
                if n_inf == 0 {
                    Some("no_poles_in_punctured")
                } else if !case.a.is_zero() && !case.b.is_zero() && 2 * n_inf < r.degree() {
                    Some("half_degree_poles")
                } else {
                    None
                }
            }
            (PairSel::Euler, DomainSpec::Sphere) => Some("sphere_two_values"),
            (PairSel::Derivative, DomainSpec::Sphere) => Some("sphere_two_values"),
            (PairSel::Derivative, DomainSpec::Plane) => Some("plane_two_values"),
            _ => None,
        }
    }

    fn eval_rat_unit(&self, unit: u64, grid: &RatGrid) -> Result<UnitResult> {
        let m = grid.polys.len() as u64;
        let (n, d) = (&grid.polys[(unit / m) as usize], &grid.polys[(unit % m) as usize]);
        let mut out = UnitResult::default();
        if (n.is_constant() && d.is_constant()) || !gcd(n, d)?.is_constant() {
            out.tally.prune("degenerate_shape", grid.per_unit());
            return Ok(out);
        }
        let base = RationalFunction::new(n.clone(), d.clone())?;
        let mut params = BTreeMap::new();
        params.insert("N".into(), show(n, 'w'));
        params.insert("D".into(), show(d, 'w'));
        let coords = |sub: usize| format!("{unit}/{sub}");
        self.eval_function(&base, &grid.ks, &grid.cases, params, coords, &mut out)?;
        Ok(out)
    }

    fn eval_mobius_unit(&self, unit: u64, local: u64, grid: &MobiusGrid) -> Result<UnitResult> {
        let m = grid.coeffs.len() as u64;
        let (ai, bi, di) = (local / (m * m), (local / m) % m, local % m);
        let (al, be, de) = (&grid.coeffs[ai as usize], &grid.coeffs[bi as usize], &grid.coeffs[di as usize]);
        let mut out = UnitResult::default();
        if &(al * de) == be {
            out.tally.prune("degenerate_shape", 1);
            return Ok(out);
        }
        let mobius = RationalFunction::new(Poly::new(vec![be.clone(), al.clone()]), Poly::new(vec![de.clone(), FieldElem::one()]))?;
        let r = mobius.mul_checked(&mobius)?;
        let mut params = BTreeMap::new();
        params.insert("alpha".into(), al.to_string());
        params.insert("beta".into(), be.to_string());
        params.insert("delta".into(), de.to_string());
        let cases = [ValueCase { a: FieldElem::zero(), b: FieldElem::one() }];
        let coords = |sub: usize| format!("{unit}/{sub}");
        self.eval_function(&r, &[FieldElem::one()], &cases, params, coords, &mut out)?;
        Ok(out)
    }

    /// Runs every `(k, case)` sub-point for `k·base`.
    fn eval_function(
        &self,
        base: &RationalFunction,
        ks: &[FieldElem],
        cases: &[ValueCase],
        params: BTreeMap<String, String>,
        coords: impl Fn(usize) -> String,
        out: &mut UnitResult,
    ) -> Result<()> {
        let n_inf = base.den().strip_zero_roots().0.distinct_root_count()?;
        let euler = self.task.pair == PairSel::Euler;
        let base_data = if euler { Some(EulerData::new(base)?) } else { None };
        let mut sub = 0usize;
        for k in ks {
            let r = base.scale(k);
            let data = base_data.as_ref().map(|d| d.scaled(k));
            let mut memo: Vec<(FieldElem, LambdaSet)> = Vec::new();
            let mut lambda_set = |v: &FieldElem, data: &EulerData| -> Result<LambdaSet> {
                if let Some((_, s)) = memo.iter().find(|(x, _)| x == v) {
                    return Ok(s.clone());
                }
                let s = data.eliminate(v)?;
                memo.push((v.clone(), s.clone()));
                Ok(s)
            };
            for case in cases {
                let here = sub;
                sub += 1;
                if let Some(rule) = self.theorem_prune(&r, n_inf, case) {
                    out.tally.prune(rule, 1);
                    continue;
                }
                let pairs: Vec<PairKind> = match &data {
                    None => vec![PairKind::Derivative],
                    Some(data) => {
                        // the λ-free condition first, it is the cheaper prune
                        let (first, second) = if case.a.is_zero() { (&case.a, &case.b) } else { (&case.b, &case.a) };
                        let s1 = lambda_set(first, data)?;
                        if s1.is_empty() {
                            out.tally.prune("lambda_elimination", 1);
                            continue;
                        }
                        let s = s1.intersect(&lambda_set(second, data)?);
                        let lambdas = match s {
                            LambdaSet::Any => self.task.lambdas.clone(),
                            LambdaSet::Finite(v) => v,
                        };
                        if lambdas.is_empty() {
                            out.tally.prune("lambda_elimination", 1);
                            continue;
                        }
                        lambdas.into_iter().filter(|l| !l.is_zero()).map(PairKind::Euler).collect()
                    }
                };
                out.tally.analyzed += 1;
                let mut trivial = false;
                for pair in pairs {
                    let ctx = match SharingContext::new(&r, &pair, self.task.domain) {
                        Ok(c) => c,
                        Err(Error::IncompatibleRadicands(..)) => continue,
                        Err(e) => return Err(e),
                    };
                    if !(ctx.is_shared(&case.a)? && ctx.is_shared(&case.b)?) {
                        continue;
                    }
                    if ctx.trivial_identity() {
                        trivial = true;
                        continue;
                    }
                    let va = shares_value(&r, &pair, &case.a, self.task.domain)?;
                    let vb = shares_value(&r, &pair, &case.b, self.task.domain)?;
                    if !(va.shared && vb.shared) {
                        return Err(Error::Invariant(format!("hit {r} failed re-verification")));
                    }
                    let class = classify_hit(&r, &pair);
                    let mut p = params.clone();
                    p.insert("k".into(), k.to_string());
                    if let Some(l) = pair.lambda() {
                        p.insert("lambda".into(), l.to_string());
                    }
                    let var = if euler { 'w' } else { 'z' };
                    out.hits.push(SearchHit {
                        coordinates: coords(here),
                        params: p,
                        function: r.display_in(var),
                        pair: pair.to_string(),
                        domain: self.task.domain.to_string(),
                        verdicts: vec![hit_verdict(&case.a, &va), hit_verdict(&case.b, &vb)],
                        novel: class.is_novel(),
                        classification: class.tag,
                        family_params: class.params,
                        transform: class.transform,
                    });
                }
                if trivial {
                    out.tally.trivial += 1;
                }
            }
        }
        Ok(())
    }
}

fn hit_verdict(a: &FieldElem, v: &crate::sharing::SharingVerdict) -> HitVerdict {
    HitVerdict { value: a.to_string(), mode: v.mode.to_string(), omitted: v.omitted }
}

fn join(v: &[FieldElem]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Every zero of `d²(P)` is a zero of `P·d(P)`, with `d(P) = cP + P′`.
pub fn question1_condition(p: &Poly, c: &FieldElem) -> Result<bool> {
    if p.is_constant() {
        return Err(Error::InvalidParams("P must be nonconstant".into()));
    }
    if !p.is_squarefree()? {
        return Err(Error::RepeatedZeros);
    }
    let dp = p.d_operator(c);
    let d2p = dp.d_operator(c);
    if d2p.is_constant() {
        return Ok(true);
    }
    radical_divides(&d2p, &(p * &dp))
}

/// Grid size before running.
pub fn estimate(task: &SearchTask) -> Result<u64> {
    Ok(Searcher::new(task)?.cardinality())
}

fn load_checkpoint(path: &PathBuf, hash: &str) -> Result<BTreeMap<u64, CheckpointRecord>> {
    let mut done = BTreeMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(Error::Checkpoint(e.to_string())),
    };
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::Checkpoint(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CheckpointRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            // a torn final line from an interrupted write is dropped
            Err(_) => continue,
        };
        if rec.task_hash != hash {
            return Err(Error::Checkpoint(format!("line {}: task hash {} does not match this task", i + 1, rec.task_hash)));
        }
        if rec.status == "done" {
            done.insert(rec.shard_index, rec);
        }
    }
    Ok(done)
}

/// Runs the task shard by shard; shards already marked done in the
/// checkpoint are reused when resuming.
pub fn search_grid(task: &SearchTask, opts: &SearchOptions) -> Result<SearchReport> {
    let searcher = Searcher::new(task)?;
    let cardinality = searcher.cardinality();
    if cardinality > opts.cap {
        return Err(Error::GridTooLarge { size: cardinality as u128, cap: opts.cap as u128 });
    }
    let hash = task.hash();
    let units = searcher.units();
    let shards = units.div_ceil(task.shard_size);
    let mut done = match (&opts.checkpoint, opts.resume) {
        (Some(p), true) => load_checkpoint(p, &hash)?,
        _ => BTreeMap::new(),
    };
    let mut writer = match &opts.checkpoint {
        Some(p) => {
            let f = OpenOptions::new()
                .create(true)
                .append(opts.resume)
                .write(true)
                .truncate(!opts.resume)
                .open(p)
                .map_err(|e| Error::Checkpoint(e.to_string()))?;
            let mut f = f;
            // terminate a torn last line so the next record starts cleanly
            if opts.resume {
                let bytes = std::fs::read(p).map_err(|e| Error::Checkpoint(e.to_string()))?;
                if bytes.last().is_some_and(|&b| b != b'\n') {
                    writeln!(f).map_err(|e| Error::Checkpoint(e.to_string()))?;
                }
            }
            Some(f)
        }
        None => None,
    };
    let mut tally = Tally::default();
    let mut hits = Vec::new();
    for shard in 0..shards {
        let rec = match done.remove(&shard) {
            Some(r) => r,
            None => {
                let lo = shard * task.shard_size;
                let hi = (lo + task.shard_size).min(units);
                let results: Vec<Result<UnitResult>> = (lo..hi).into_par_iter().map(|u| searcher.eval_unit(u)).collect();
                let mut st = Tally::default();
                let mut sh = Vec::new();
                for r in results {
                    let r = r?;
                    st.merge(&r.tally);
                    sh.extend(r.hits);
                }
                let rec = CheckpointRecord { task_hash: hash.clone(), shard_index: shard, status: "done".into(), hits: sh, stats: st };
                if let Some(w) = writer.as_mut() {
                    let line = serde_json::to_string(&rec).expect("record serializes");
                    writeln!(w, "{line}").and_then(|_| w.flush()).map_err(|e| Error::Checkpoint(e.to_string()))?;
                }
                rec
            }
        };
        tally.merge(&rec.stats);
        hits.extend(rec.hits);
    }
    if tally.analyzed + tally.pruned_total() != cardinality {
        return Err(Error::Invariant(format!(
            "coverage: analyzed {} + pruned {} != cardinality {cardinality}",
            tally.analyzed,
            tally.pruned_total()
        )));
    }
    let mut classification_counts = BTreeMap::new();
    for h in &hits {
        *classification_counts.entry(h.classification.clone()).or_insert(0) += 1;
    }
    let novel_hits = hits.iter().filter(|h| h.novel).count() as u64;
    let grid = searcher.describe();
    let statement = if hits.is_empty() {
        format!("no hits in grid {grid} ({cardinality} points)")
    } else {
        format!("{} hits in grid {grid} ({cardinality} points), {novel_hits} novel", hits.len())
    };
    Ok(SearchReport {
        schema_version: SCHEMA_VERSION,
        task: task.clone(),
        task_hash: hash,
        grid,
        cardinality,
        tally,
        classification_counts,
        novel_hits,
        hits,
        statement,
    })
}

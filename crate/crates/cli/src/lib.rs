//! Command-line front end: parsing, subcommands and report printing.

pub mod config;
pub mod expr;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use shareval_core::families::{fuzz_family, verify_family, FamilyRegistry, FamilyReport, Params};
use shareval_core::invariants::{invariant_appendix, InvariantCheck};
use shareval_core::oracle::{cross_check, numeric_verdict, OracleConfig};
use shareval_core::search::{estimate, search_grid, Lattice, PairSel, SearchOptions, SearchReport, SearchTask, TaskKind};
use shareval_core::sharing::{DomainSpec, PairKind, SharingContext, SharingVerdict, Side, Witness};
use shareval_core::theorems::{run_theorem, TheoremRegistry, TheoremReport};
use shareval_core::{Error, FieldElem, RationalFunction};

use crate::config::Config;
use crate::expr::{parse_constant, parse_expression, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_NOVEL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "shareval", version, about = "Shared values of a rational function and its derivative")]
struct Cli {
    /// Configuration file with `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether values are shared.
    Analyze(AnalyzeArgs),
    /// List, verify or fuzz the family catalog and theorem checks.
    Families {
        #[command(subcommand)]
        action: FamiliesAction,
    },
    /// Run a grid search.
    Search(SearchArgs),
    /// Compare exact verdicts with the numeric root-finding oracle.
    Oracle {
        #[command(subcommand)]
        action: OracleAction,
    },
}

#[derive(Args, Debug, Clone)]
struct Query {
    #[arg(long)]
    function: String,
    /// derivative or euler
    #[arg(long, default_value = "derivative")]
    pair: String,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Value to test; may be repeated.
    #[arg(long, required = true, allow_hyphen_values = true)]
    value: Vec<String>,
    /// plane, punctured or sphere (default: plane, or punctured for euler)
    #[arg(long)]
    domain: Option<String>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    query: Query,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum FamiliesAction {
    List {
        #[arg(long)]
        json: bool,
    },
    Verify {
        /// Family or theorem id, or `all`.
        #[arg(long)]
        id: String,
        #[arg(long)]
        params: Option<String>,
        /// Number of random members (theorem ids: random cases).
        #[arg(long)]
        fuzz: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// question1, question3, two-values or degree2
    #[arg(long)]
    task: String,
    #[arg(long)]
    degree: Option<usize>,
    /// Root lattice: integer:R, gaussian:R or sqrt5.
    #[arg(long)]
    grid: Option<String>,
    /// Comma-separated value grid (two-values).
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    /// Comma-separated scalar grid (k, c or Q coefficients).
    #[arg(long, allow_hyphen_values = true)]
    scalars: Option<String>,
    #[arg(long)]
    pair: Option<String>,
    #[arg(long)]
    domain: Option<String>,
    /// Disable the theorem-based prune rules.
    #[arg(long)]
    no_prune: bool,
    #[arg(long)]
    shard_size: Option<u64>,
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, requires = "checkpoint")]
    resume: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum OracleAction {
    Compare {
        #[command(flatten)]
        query: Query,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Invariant(_)) { EXIT_INVARIANT } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure { code: EXIT_USAGE, message: format!("parse error at {e}") }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: msg.into() }
}

type Outcome = Result<i32, Failure>;

/// Turns every JSON number into a string, except `schema_version`.
pub fn stringify_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(n.to_string()),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify_numbers).collect()),
        Value::Object(m) => Value::Object(
            m.into_iter()
                .map(|(k, v)| if k == "schema_version" { (k, v) } else { (k, stringify_numbers(v)) })
                .collect(),
        ),
        other => other,
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn emit_json(out: &mut dyn Write, v: Value) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(&stringify_numbers(v)).expect("json"))
}

/// Runs the CLI with `args` (program name first). Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let config = match &cli.config {
        Some(p) => match Config::load(p) {
            Ok(c) => c,
            Err(e) => {
                let _ = writeln!(err, "error: config: {e}");
                return EXIT_USAGE;
            }
        },
        None => Config::default(),
    };
    if config.workers > 0 {
        // fails harmlessly if a pool is already installed (repeated calls in one process)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build_global();
    }
    let result = match cli.command {
        Command::Analyze(a) => analyze(&a, out),
        Command::Families { action } => families(action, &config, out),
        Command::Search(s) => search(&s, &config, out, err),
        Command::Oracle { action: OracleAction::Compare { query, tol, json } } => {
            oracle_compare(&query, tol.unwrap_or(config.tol), json, out)
        }
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

struct PreparedQuery {
    function: RationalFunction,
    var: char,
    pair: PairKind,
    values: Vec<FieldElem>,
    domain: DomainSpec,
}

fn prepare(q: &Query) -> Result<PreparedQuery, Failure> {
    let parsed = parse_expression(&q.function)?;
    if parsed.value.is_constant() {
        return Err(usage("the function is constant"));
    }
    let pair = match q.pair.as_str() {
        "derivative" => {
            if q.lambda.is_some() {
                return Err(usage("--lambda only applies to the euler pair"));
            }
            PairKind::Derivative
        }
        "euler" => {
            let text = q.lambda.as_deref().ok_or_else(|| usage("the euler pair needs --lambda"))?;
            PairKind::euler(parse_constant(text)?)?
        }
        other => return Err(usage(format!("unknown pair `{other}` (derivative or euler)"))),
    };
    let default_var = if matches!(pair, PairKind::Euler(_)) { 'w' } else { 'z' };
    let domain = match &q.domain {
        Some(d) => d.parse::<DomainSpec>().map_err(|_| usage(format!("unknown domain `{d}`")))?,
        None if matches!(pair, PairKind::Euler(_)) => DomainSpec::Punctured,
        None => DomainSpec::Plane,
    };
    let values = q.value.iter().map(|v| parse_constant(v)).collect::<Result<Vec<_>, _>>()?;
    Ok(PreparedQuery { function: parsed.value, var: parsed.var.unwrap_or(default_var), pair, values, domain })
}

fn test_points() -> Vec<FieldElem> {
    [(1, 1), (2, 1), (-1, 1), (1, 2), (-3, 2)].iter().map(|&(n, d)| FieldElem::from_ratio(n, d)).collect()
}

fn describe_verdict(v: &SharingVerdict) -> String {
    if !v.shared {
        return "not shared".into();
    }
    let mut s = format!("shared {}", v.mode);
    if v.omitted {
        s.push_str(" (omitted by both)");
    }
    s
}

fn side_name(s: &Side) -> &'static str {
    match s {
        Side::FOnly => "f",
        Side::GOnly => "g",
    }
}

fn describe_witness(w: &Witness, var: char) -> String {
    match w {
        Witness::Factor { factor, side } => {
            format!("roots of {} are a-points of {} only", factor.display_in(var), side_name(side))
        }
        Witness::Boundary { point, side } => format!("{} takes the value at {point}, the other does not", side_name(side)),
        Witness::Identically { side } => format!("{} is identically the value", side_name(side)),
    }
}

fn analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> Outcome {
    let start = Instant::now();
    let q = prepare(&a.query)?;
    let ctx = SharingContext::new(&q.function, &q.pair, q.domain)?;
    let mut verdicts = Vec::new();
    for v in &q.values {
        verdicts.push((v.clone(), ctx.verdict(v)?));
    }
    let checks = invariant_appendix(&q.function, &q.pair, &test_points())?;
    let elapsed = start.elapsed();
    let violated: Vec<&InvariantCheck> = checks.iter().filter(|c| !c.holds).collect();
    let fun = q.function.display_in(q.var);
    if a.json {
        let values: Vec<Value> = verdicts
            .iter()
            .map(|(val, v)| {
                json!({
                    "value": val.to_string(),
                    "verdict": to_json(v),
                    "multiplicity_pairs": v.multiplicity_pairs(val),
                })
            })
            .collect();
        let report = json!({
            "schema_version": 1,
            "query": {
                "function": fun,
                "pair": pair_name(&q.pair),
                "lambda": q.pair.lambda().map(|l| l.to_string()),
                "domain": q.domain.name(),
                "values": q.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            },
            "partner": ctx.g.display_in(q.var),
            "trivial_identity": ctx.trivial_identity(),
            "results": values,
            "invariants": to_json(&checks),
            "timings": { "total_ms": format!("{:.3}", elapsed.as_secs_f64() * 1e3) },
        });
        emit_json(out, report).map_err(io)?;
    } else {
        let w = io;
        writeln!(out, "function  {fun}").map_err(w)?;
        writeln!(out, "partner   {}", ctx.g.display_in(q.var)).map_err(w)?;
        writeln!(out, "pair      {}", q.pair).map_err(w)?;
        writeln!(out, "domain    {}", q.domain).map_err(w)?;
        if ctx.trivial_identity() {
            writeln!(out, "note      the two functions are identical").map_err(w)?;
        }
        for (val, v) in &verdicts {
            writeln!(out, "value {val}: {}", describe_verdict(v)).map_err(w)?;
            for s in &v.shared_factors {
                writeln!(out, "  {:<24} f {}  g {}", s.factor.display_in(q.var), s.mult_f, s.mult_g).map_err(w)?;
            }
            for b in &v.boundary {
                let show = |o: &Option<shareval_core::ratfun::OrderRecord>| match o {
                    Some(r) => format!("{} (order {})", r.value, r.order),
                    None => "constant".into(),
                };
                writeln!(out, "  at {:<21} f {}  g {}", b.point.to_string(), show(&b.f), show(&b.g)).map_err(w)?;
            }
            if let Some(wit) = &v.witness {
                writeln!(out, "  witness: {}", describe_witness(wit, q.var)).map_err(w)?;
            }
        }
        writeln!(out, "invariants").map_err(w)?;
        for c in &checks {
            writeln!(out, "  {:<24} {}  {}", c.name, if c.holds { "ok" } else { "VIOLATED" }, c.detail).map_err(w)?;
        }
        writeln!(out, "time      {:.3} ms", elapsed.as_secs_f64() * 1e3).map_err(w)?;
    }
    if let Some(c) = violated.first() {
        return Err(Failure { code: EXIT_INVARIANT, message: format!("invariant {} violated: {}", c.name, c.detail) });
    }
    Ok(EXIT_OK)
}

fn pair_name(p: &PairKind) -> &'static str {
    match p {
        PairKind::Derivative => "derivative",
        PairKind::Euler(_) => "euler",
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure { code: EXIT_USAGE, message: format!("write failed: {e}") }
}

fn families(action: FamiliesAction, config: &Config, out: &mut dyn Write) -> Outcome {
    match action {
        FamiliesAction::List { json } => {
            let fams: Vec<Value> = FamilyRegistry::global()
                .iter()
                .map(|f| json!({"id": f.id(), "params": f.param_names(), "description": f.description()}))
                .collect();
            let thms: Vec<Value> = TheoremRegistry::global()
                .iter()
                .map(|t| json!({"id": t.id(), "statement": t.statement()}))
                .collect();
            if json {
                emit_json(out, json!({"schema_version": 1, "families": fams, "theorems": thms})).map_err(io)?;
            } else {
                writeln!(out, "families").map_err(io)?;
                for f in FamilyRegistry::global().iter() {
                    writeln!(out, "  {:<22} [{}] {}", f.id(), f.param_names().join(", "), f.description()).map_err(io)?;
                }
                writeln!(out, "theorem checks").map_err(io)?;
                for t in TheoremRegistry::global().iter() {
                    writeln!(out, "  {:<32} {}", t.id(), t.statement()).map_err(io)?;
                }
            }
            Ok(EXIT_OK)
        }
        FamiliesAction::Verify { id, params, fuzz, seed, json } => {
            let seed = seed.unwrap_or(config.seed);
            let mut fam_reports: Vec<FamilyReport> = Vec::new();
            let mut thm_reports: Vec<TheoremReport> = Vec::new();
            let fam_ids: Vec<&str> = FamilyRegistry::global().ids();
            let thm_ids: Vec<&str> = TheoremRegistry::global().ids();
            let targets: Vec<String> = if id == "all" {
                fam_ids.iter().chain(&thm_ids).map(|s| s.to_string()).collect()
            } else if fam_ids.contains(&id.as_str()) || thm_ids.contains(&id.as_str()) {
                vec![id.clone()]
            } else {
                return Err(usage(format!("unknown family or theorem id `{id}` (see `families list`)")));
            };
            if params.is_some() && (targets.len() != 1 || !fam_ids.contains(&targets[0].as_str())) {
                return Err(usage("--params applies to a single family id"));
            }
            for t in &targets {
                if let Some(check) = TheoremRegistry::global().get(t) {
                    thm_reports.push(run_theorem(check, fuzz.unwrap_or(config.fuzz), seed)?);
                } else if let Some(p) = &params {
                    fam_reports.push(verify_family(t, &p.parse::<Params>()?)?);
                } else {
                    fam_reports.extend(fuzz_family(t, fuzz.unwrap_or(1), seed)?);
                }
            }
            let fam_failed = fam_reports.iter().filter(|r| !r.passed).count();
            let violations: usize = thm_reports.iter().map(|r| r.violations.len()).sum();
            if json {
                emit_json(
                    out,
                    json!({
                        "schema_version": 1,
                        "families": to_json(&fam_reports),
                        "theorems": to_json(&thm_reports),
                        "passed": fam_failed == 0 && violations == 0,
                    }),
                )
                .map_err(io)?;
            } else {
                for r in &fam_reports {
                    let status = if r.passed { "pass" } else { "FAIL" };
                    writeln!(out, "{status} {} [{}] {} ({}, {})", r.family, r.params, r.function, r.pair, r.domain)
                        .map_err(io)?;
                    for c in r.checks.iter().filter(|c| !c.passed) {
                        writeln!(out, "  value {}: expected {}, got {}", c.value, c.expectation, c.mode).map_err(io)?;
                    }
                    if !r.recognized {
                        writeln!(out, "  recognizer did not recover the parameters").map_err(io)?;
                    }
                }
                for r in &thm_reports {
                    let status = if r.passed() { "pass" } else { "VIOLATED" };
                    writeln!(
                        out,
                        "{status} {}: {} cases, hypothesis met {}, vacuous {}",
                        r.theorem, r.cases, r.hypothesis_met, r.vacuous
                    )
                    .map_err(io)?;
                    for v in &r.violations {
                        writeln!(out, "  case {}: {} ({}, {}): {}", v.case_index, v.function, v.pair, v.source, v.detail)
                            .map_err(io)?;
                    }
                }
            }
            if fam_failed > 0 || violations > 0 {
                return Err(Failure {
                    code: EXIT_INVARIANT,
                    message: format!("{fam_failed} family members failed, {violations} theorem violations"),
                });
            }
            Ok(EXIT_OK)
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<FieldElem>, Failure> {
    text.split(',').map(|s| parse_constant(s.trim()).map_err(Failure::from)).collect()
}

fn build_task(s: &SearchArgs, config: &Config) -> Result<SearchTask, Failure> {
    let kind: TaskKind = s.task.parse().map_err(|_| usage(format!("unknown task `{}`", s.task)))?;
    let mut t = SearchTask::default_for(kind);
    if let Some(d) = s.degree {
        t.degree = d;
    }
    if let Some(g) = &s.grid {
        t.lattice = g.parse::<Lattice>()?;
    }
    if let Some(v) = &s.values {
        t.values = parse_list(v)?;
    }
    if let Some(v) = &s.scalars {
        t.scalars = parse_list(v)?;
    }
    if let Some(p) = &s.pair {
        t.pair = match p.as_str() {
            "derivative" => PairSel::Derivative,
            "euler" => PairSel::Euler,
            other => return Err(usage(format!("unknown pair `{other}`"))),
        };
        if s.domain.is_none() && t.pair == PairSel::Derivative {
            t.domain = DomainSpec::Plane;
        }
    }
    if let Some(d) = &s.domain {
        t.domain = d.parse::<DomainSpec>().map_err(|_| usage(format!("unknown domain `{d}`")))?;
    }
    t.prune = !s.no_prune;
    t.shard_size = s.shard_size.unwrap_or(config.shard_size);
    t.validate()?;
    Ok(t)
}

fn search(s: &SearchArgs, config: &Config, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let task = build_task(s, config)?;
    let size = estimate(&task)?;
    let _ = writeln!(err, "grid cardinality {size}");
    let opts = SearchOptions { cap: s.cap.unwrap_or(config.cap), checkpoint: s.checkpoint.clone(), resume: s.resume };
    let start = Instant::now();
    let report = search_grid(&task, &opts)?;
    let _ = writeln!(err, "finished in {:.1} s", start.elapsed().as_secs_f64());
    if s.json {
        emit_json(out, to_json(&report)).map_err(io)?;
    } else {
        print_search(&report, out).map_err(io)?;
    }
    Ok(exit_for(&report))
}

fn exit_for(report: &SearchReport) -> i32 {
    if report.novel_hits > 0 {
        EXIT_NOVEL
    } else {
        EXIT_OK
    }
}

fn print_search(r: &SearchReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "task        {:?}", r.task.kind)?;
    writeln!(out, "task hash   {}", r.task_hash)?;
    writeln!(out, "grid        {}", r.grid)?;
    writeln!(out, "cardinality {}", r.cardinality)?;
    writeln!(out, "analyzed    {}", r.tally.analyzed)?;
    for (rule, n) in &r.tally.pruned {
        writeln!(out, "pruned      {n} by {rule}")?;
    }
    writeln!(out, "trivial     {} (R = dR, not reported as hits)", r.tally.trivial)?;
    for (class, n) in &r.classification_counts {
        writeln!(out, "class       {class}: {n}")?;
    }
    for h in &r.hits {
        let vals: Vec<String> = h.verdicts.iter().map(|v| format!("{} {}", v.value, v.mode)).collect();
        let novel = if h.novel { "NOVEL " } else { "" };
        writeln!(out, "hit {novel}{} | {} | {} | {}", h.function, h.pair, vals.join(", "), h.classification)?;
        if h.novel {
            writeln!(out, "  certificate: coordinates {}, params {:?}, domain {}", h.coordinates, h.params, h.domain)?;
        }
    }
    writeln!(out, "{}", r.statement)
}

fn oracle_compare(q: &Query, tol: f64, json: bool, out: &mut dyn Write) -> Outcome {
    let p = prepare(q)?;
    let ctx = SharingContext::new(&p.function, &p.pair, p.domain)?;
    let cfg = OracleConfig::with_match_tol(tol);
    let mut rows = Vec::new();
    let mut failures = 0;
    for a in &p.values {
        let exact = ctx.verdict(a)?;
        let approx = numeric_verdict(&p.function, &p.pair, a, p.domain, &cfg)?;
        let agreement = cross_check(&exact, &approx, a);
        if agreement.failure {
            failures += 1;
        }
        rows.push((a.clone(), exact, approx, agreement));
    }
    if json {
        let items: Vec<Value> = rows
            .iter()
            .map(|(a, e, n, g)| json!({"value": a.to_string(), "exact": to_json(e), "numeric": to_json(n), "agreement": to_json(g)}))
            .collect();
        emit_json(
            out,
            json!({
                "schema_version": 1,
                "function": p.function.display_in(p.var),
                "pair": pair_name(&p.pair),
                "lambda": p.pair.lambda().map(|l| l.to_string()),
                "domain": p.domain.name(),
                "tol": tol,
                "results": items,
            }),
        )
        .map_err(io)?;
    } else {
        writeln!(out, "function  {}", p.function.display_in(p.var)).map_err(io)?;
        writeln!(out, "tolerance {tol:e}").map_err(io)?;
        for (a, e, n, g) in &rows {
            let status = if g.agree {
                "agree"
            } else if g.borderline {
                "borderline"
            } else {
                "DISAGREE"
            };
            writeln!(out, "value {a}: exact {}, numeric {} -> {status}", describe_verdict(e), n.mode).map_err(io)?;
            if !g.agree && !g.detail.is_empty() {
                writeln!(out, "  {}", g.detail).map_err(io)?;
            }
        }
    }
    if failures > 0 {
        return Err(Failure {
            code: EXIT_INVARIANT,
            message: format!("{failures} non-borderline disagreements between exact and numeric verdicts"),
        });
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use shareval_core::search::{HitVerdict, SearchHit, Tally};
    use std::collections::BTreeMap;

    #[test]
    fn numbers_become_strings() {
        let v = stringify_numbers(json!({"schema_version": 1, "n": 3, "xs": [1.5, {"m": -2}], "s": "t"}));
        assert_eq!(v, json!({"schema_version": 1, "n": "3", "xs": ["1.5", {"m": "-2"}], "s": "t"}));
    }

    #[test]
    fn novel_hit_exits_three_with_certificate() {
        let hit = SearchHit {
            coordinates: "7/0".into(),
            params: BTreeMap::from([("P".to_string(), "z^2 - 1".to_string()), ("c".to_string(), "1".to_string())]),
            function: "(z^2 + 2*z)/(z^2 + 2*z - 1)".into(),
            pair: "derivative".into(),
            domain: "plane".into(),
            verdicts: vec![HitVerdict { value: "1".into(), mode: "CM".into(), omitted: false }],
            classification: "novel".into(),
            family_params: None,
            transform: None,
            novel: true,
        };
        let report = SearchReport {
            schema_version: 1,
            task: SearchTask::question1(),
            task_hash: "0".into(),
            grid: "test".into(),
            cardinality: 1,
            tally: Tally { analyzed: 1, ..Tally::default() },
            classification_counts: BTreeMap::from([("novel".to_string(), 1)]),
            novel_hits: 1,
            hits: vec![hit],
            statement: "1 hits in grid test (1 points), 1 novel".into(),
        };
        assert_eq!(exit_for(&report), EXIT_NOVEL);
        let mut out = Vec::new();
        print_search(&report, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("hit NOVEL"));
        assert!(text.contains("certificate: coordinates 7/0"));
    }
}

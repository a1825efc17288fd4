//! Acceptance run. Each criterion prints one PASS/FAIL line on stderr
//! (written directly, so it shows without `--nocapture`).

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};

use shareval_cli::expr::{parse_constant, parse_expression};
use shareval_core::families::{fuzz_family, zero_cm_shape, FamilyRegistry, SvRng};
use shareval_core::invariants::invariant_appendix;
use shareval_core::oracle::{cross_check, numeric_verdict, OracleConfig};
use shareval_core::ratfun::{rf_euler_derivative, total_ramification};
use shareval_core::search::{search_grid, SearchOptions, SearchTask};
use shareval_core::sharing::{shares_value, DomainSpec, Mode, PairKind, SharingVerdict};
use shareval_core::theorems::{candidate_values, random_function, run_theorem, TheoremRegistry};
use shareval_core::{FieldElem, RationalFunction};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s, format!("took {:.3} s, limit {limit_s} s", elapsed.as_secs_f64()))
}

fn parse(text: &str) -> RationalFunction {
    parse_expression(text).unwrap().value
}

/// Shared factors of a verdict as (factor, mult_f, mult_g), printed in `w`.
fn factor_table(v: &SharingVerdict) -> BTreeSet<(String, usize, usize)> {
    v.shared_factors.iter().map(|s| (s.factor.display_in('w'), s.mult_f, s.mult_g)).collect()
}

fn ex53() -> Outcome {
    let start = Instant::now();
    let f = parse("(48w²+32w+3)/(16w(2w+1))");
    let v = shares_value(&f, &PairKind::euler(FieldElem::one()).unwrap(), &FieldElem::one(), DomainSpec::Sphere)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(v.shared && v.mode == Mode::MixedIm, format!("verdict {} shared={}", v.mode, v.shared))?;
    let want: BTreeSet<_> = [("w + 3/4".to_string(), 1, 1), ("w + 1/4".to_string(), 1, 2)].into_iter().collect();
    check(factor_table(&v) == want, format!("factors {:?}", factor_table(&v)))?;
    within(elapsed, 0.1)?;
    Ok(format!("mixed_IM, (w+3/4):(1,1), (w+1/4):(1,2), {:.2} ms", elapsed.as_secs_f64() * 1e3))
}

fn ex61() -> Outcome {
    let start = Instant::now();
    // radicand 0 means the coefficients are rational
    let cases = [
        ("2/(1-w)", "-2", 0),
        ("(((1-sqrt(5))/2) + ((1+sqrt(5))/2)*w)^2 / (1+w)^2", "sqrt(5)/2", 5),
    ];
    for (text, lambda, m) in cases {
        let f = parse(text);
        check(f.radicand().map_err(|e| e.to_string())? == m, format!("{text}: radicand"))?;
        let pair = PairKind::euler(parse_constant(lambda).unwrap()).map_err(|e| e.to_string())?;
        for a in [0, 1] {
            let v = shares_value(&f, &pair, &FieldElem::from_int(a), DomainSpec::Punctured).map_err(|e| e.to_string())?;
            check(v.shared, format!("{text} lambda={lambda}: value {a} not shared"))?;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, 0.5)?;
    Ok(format!("R_(2) over Q and R_(1) over Q(sqrt 5) share 0 and 1, {:.2} ms", elapsed.as_secs_f64() * 1e3))
}

fn family_suite() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    let mut failed = Vec::new();
    for (i, fam) in FamilyRegistry::global().iter().enumerate() {
        let reports = fuzz_family(fam.id(), 50, 1000 + i as u64).map_err(|e| format!("{}: {e}", fam.id()))?;
        total += reports.len();
        failed.extend(reports.iter().filter(|r| !r.passed).map(|r| format!("{} [{}]", r.family, r.params)));
        if fam.id() == "zero_cm_forms_6" {
            let shapes: BTreeSet<char> = reports
                .iter()
                .filter_map(|r| zero_cm_shape(&parse(&r.function)).ok().flatten())
                .collect();
            check(shapes.len() == 3, format!("zero-CM shapes drawn: {shapes:?}"))?;
        }
    }
    let elapsed = start.elapsed();
    check(failed.is_empty(), format!("{} failures: {}", failed.len(), failed.join("; ")))?;
    within(elapsed, 30.0)?;
    Ok(format!("{total} members, 0 failures, {:.1} s", elapsed.as_secs_f64()))
}

fn theorem_suite() -> Outcome {
    let start = Instant::now();
    let (mut cases, mut met) = (0, 0);
    let mut violations = Vec::new();
    for check in TheoremRegistry::global().iter() {
        let r = run_theorem(check, 500, 7).map_err(|e| e.to_string())?;
        cases += r.cases;
        met += r.hypothesis_met;
        violations.extend(r.violations.iter().map(|v| format!("{}: {} {}", r.theorem, v.function, v.detail)));
    }
    let elapsed = start.elapsed();
    check(violations.is_empty(), violations.join("; "))?;
    within(elapsed, 60.0)?;
    Ok(format!("{cases} cases, {met} meeting a hypothesis, 0 violations, {:.1} s", elapsed.as_secs_f64()))
}

fn degree2_search() -> Outcome {
    let start = Instant::now();
    let report = search_grid(&SearchTask::degree2(), &SearchOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let zero_case = |h: &shareval_core::search::SearchHit| h.verdicts.iter().any(|v| v.value == "0");
    let nonzero = report.hits.iter().filter(|h| !zero_case(h)).count();
    check(nonzero == 0, format!("{nonzero} hits with both values nonzero"))?;
    let allowed = ["r1_6_1", "r2_6_1", "trivial_identity"];
    let other: Vec<&str> =
        report.hits.iter().map(|h| h.classification.as_str()).filter(|c| !allowed.contains(c)).collect();
    check(other.is_empty(), format!("a=0 hits outside r1/r2: {other:?}"))?;
    within(elapsed, 600.0)?;
    Ok(format!(
        "cardinality {}, {} hits {:?}, {} trivial identities, {:.0} s",
        report.cardinality,
        report.hits.len(),
        report.classification_counts,
        report.tally.trivial,
        elapsed.as_secs_f64()
    ))
}

fn question1() -> Outcome {
    let start = Instant::now();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = shareval_cli::run(["shareval", "search", "--task", "question1", "--json"], &mut out, &mut err);
    let elapsed = start.elapsed();
    check(code == 0, format!("exit {code}: {}", String::from_utf8_lossy(&err)))?;
    let v: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let hits = v["hits"].as_array().cloned().unwrap_or_default();
    check(hits.iter().all(|h| h["params"]["c"] == "0"), "hit with c != 0")?;
    within(elapsed, 600.0)?;
    Ok(format!("{} points, {}, {:.1} s", v["cardinality"].as_str().unwrap_or("?"), v["statement"], elapsed.as_secs_f64()))
}

/// Distinct poles in the punctured plane.
fn finite_nonzero_poles(r: &RationalFunction) -> usize {
    let (den, _) = r.den().strip_zero_roots();
    if den.is_constant() {
        0
    } else {
        den.distinct_root_count().unwrap()
    }
}

fn invariants() -> Outcome {
    let start = Instant::now();
    let mut rng = SvRng::seed_from_u64(8);
    let pts = [FieldElem::from_int(1), FieldElem::from_int(-1), FieldElem::from_int(2), FieldElem::from_ratio(1, 3)];
    let mut checks = 0;
    for i in 0..1000 {
        let r = random_function(&mut rng, 8);
        let lambda = FieldElem::from_ratio(rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..=3));
        let d = r.degree();
        let ram = total_ramification(&r).map_err(|e| e.to_string())?;
        check(ram == 2 * d - 2, format!("function {i}: ramification {ram}, d = {d}"))?;
        let g = rf_euler_derivative(&r, &lambda).map_err(|e| e.to_string())?;
        check(g.degree() == d + finite_nonzero_poles(&r), format!("function {i}: euler degree {}", g.degree()))?;
        for pair in [PairKind::Derivative, PairKind::Euler(lambda)] {
            for c in invariant_appendix(&r, &pair, &pts).map_err(|e| e.to_string())? {
                check(c.holds, format!("function {i} {}: {}", c.name, c.detail))?;
                checks += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, 60.0)?;
    Ok(format!("1000 functions, {checks} exact checks, {:.1} s", elapsed.as_secs_f64()))
}

fn random_query(rng: &mut SvRng) -> (RationalFunction, PairKind, FieldElem, DomainSpec) {
    if rng.gen_bool(0.4) {
        let fams: Vec<_> = FamilyRegistry::global().iter().collect();
        let fam = fams[rng.gen_range(0..fams.len())];
        if let Ok(inst) = fam.construct(&fam.sample(rng)) {
            if inst.function.degree() <= 6 && !inst.value_checks.is_empty() {
                let a = inst.value_checks[rng.gen_range(0..inst.value_checks.len())].value.clone();
                return (inst.function, inst.pair, a, inst.domain);
            }
        }
    }
    let f = random_function(rng, 6);
    let (pair, domain) = if rng.gen_bool(0.5) {
        (PairKind::Derivative, if rng.gen_bool(0.5) { DomainSpec::Plane } else { DomainSpec::Sphere })
    } else {
        let l = FieldElem::from_ratio([-2, -1, 1, 2, 3][rng.gen_range(0..5)], rng.gen_range(1..=2));
        (PairKind::Euler(l), if rng.gen_bool(0.5) { DomainSpec::Punctured } else { DomainSpec::Sphere })
    };
    let g = pair.apply(&f).unwrap();
    let vals = candidate_values(&f, &g, &[]);
    let a = vals[rng.gen_range(0..vals.len())].clone();
    (f, pair, a, domain)
}

fn concordance() -> Outcome {
    let mut rng = SvRng::seed_from_u64(31337);
    let cfg = OracleConfig::with_match_tol(1e-8);
    let (mut borderline, mut shared) = (0usize, 0usize);
    for i in 0..500 {
        let (f, pair, a, domain) = random_query(&mut rng);
        let exact = shares_value(&f, &pair, &a, domain).map_err(|e| e.to_string())?;
        let approx = numeric_verdict(&f, &pair, &a, domain, &cfg).map_err(|e| format!("query {i}: {e}"))?;
        let agreement = cross_check(&exact, &approx, &a);
        check(!agreement.failure, format!("query {i} {f} {pair} a={a}: {}", agreement.detail))?;
        borderline += agreement.borderline as usize;
        shared += exact.shared as usize;
    }
    let rate = borderline as f64 / 500.0;
    check(rate < 0.05, format!("borderline rate {rate}"))?;
    Ok(format!("500 queries ({shared} shared), 0 non-borderline disagreements, borderline rate {:.1}%", rate * 100.0))
}

fn with_radical(rng: &mut SvRng, r: RationalFunction) -> RationalFunction {
    let m = [5, -1, 2, -3][rng.gen_range(0..4)];
    let c = &FieldElem::from_int(rng.gen_range(1..=3)) + &(&FieldElem::sqrt(m) * &FieldElem::from_ratio(rng.gen_range(1..=3), 2));
    r.scale(&c).translate(&FieldElem::sqrt(m))
}

fn round_trip_and_determinism() -> Outcome {
    let mut rng = SvRng::seed_from_u64(99);
    let mut functions: Vec<(RationalFunction, char)> = Vec::new();
    for fam in FamilyRegistry::global().iter() {
        for _ in 0..10 {
            let inst = fam.construct(&fam.sample(&mut rng)).map_err(|e| e.to_string())?;
            let var = if matches!(inst.pair, PairKind::Euler(_)) { 'w' } else { 'z' };
            functions.push((inst.function, var));
        }
    }
    let catalog = functions.len();
    for i in 0..1000 {
        let r = random_function(&mut rng, 8);
        let r = if i % 4 == 0 { with_radical(&mut rng, r) } else { r };
        functions.push((r, if i % 2 == 0 { 'z' } else { 'w' }));
    }
    for (r, var) in &functions {
        let text = r.display_in(*var);
        let back = parse_expression(&text).map_err(|e| format!("{text}: {e}"))?;
        check(&back.value == r, format!("{text} re-parsed as {}", back.value.display_in(*var)))?;
    }
    check(parse_constant(&FieldElem::sqrt(5).to_string()).unwrap() == FieldElem::sqrt(5), "constant round trip")?;

    let args = ["shareval", "search", "--task", "degree2", "--grid", "gaussian:1", "--json"];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = shareval_cli::run(args, &mut out, &mut err);
        check(code == 0, format!("search exit {code}"))?;
        runs.push(out);
    }
    check(runs[0] == runs[1], "search reports differ between identical runs")?;
    Ok(format!("{catalog} catalog + 1000 random functions round-trip, search reports byte-identical ({} bytes)", runs[0].len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("1 worked example, mixed multiplicities", ex53),
        ("2 rational and quadratic-field two-value examples", ex61),
        ("3 family suite", family_suite),
        ("4 negative-theorem suite", theorem_suite),
        ("5 degree <= 2 exhaustive search", degree2_search),
        ("6 question 1 search", question1),
        ("7 algebraic invariants", invariants),
        ("8 oracle concordance", concordance),
        ("9 round trip and determinism", round_trip_and_determinism),
    ];
    let mut failures = Vec::new();
    for (name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let line = match &outcome {
            Ok(detail) => format!("PASS criterion {name}: {detail}"),
            Err(why) => format!("FAIL criterion {name}: {why}"),
        };
        let _ = writeln!(std::io::stderr().lock(), "{line}");
        if outcome.is_err() {
            failures.push(line);
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

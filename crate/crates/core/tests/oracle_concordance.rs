use rand::{Rng, SeedableRng};

use shareval_core::families::SvRng;
use shareval_core::families::FamilyRegistry;
use shareval_core::oracle::{cross_check, find_roots, numeric_verdict, root_points, OracleConfig};
use shareval_core::sharing::{shares_value, DomainSpec, PairKind};
use shareval_core::theorems::{candidate_values, random_function};
use shareval_core::{FieldElem, Poly};

#[test]
fn constructed_roots_are_recovered() {
    let mut rng = SvRng::seed_from_u64(11);
    let cfg = OracleConfig::default();
    for _ in 0..200 {
        let deg = rng.gen_range(1..=10);
        let mut roots: Vec<(i64, i64, i64)> = Vec::new();
        while roots.len() < deg {
            let r = (rng.gen_range(-12..=12), rng.gen_range(-12..=12), rng.gen_range(1..=4));
            let far = roots.iter().all(|s| {
                let dre = r.0 as f64 / r.2 as f64 - s.0 as f64 / s.2 as f64;
                let dim = r.1 as f64 / r.2 as f64 - s.1 as f64 / s.2 as f64;
                dre.hypot(dim) >= 1e-3
            });
            if far {
                roots.push(r);
            }
        }
        // (w - (a + b i)/d) over Q(i)
        let mut p = Poly::one();
        for &(a, b, d) in &roots {
            let c = &FieldElem::from_ratio(a, d) + &(&FieldElem::i() * &FieldElem::from_ratio(b, d));
            p = &p * &Poly::new(vec![-c, FieldElem::one()]);
        }
        let found = find_roots(&p, &cfg).unwrap();
        assert_eq!(found.len(), deg);
        let max_coeff =
            p.to_complex_coeffs().iter().map(|&(re, im)| re.hypot(im)).fold(0.0, f64::max);
        for x in &found {
            assert!(x.residual <= cfg.stop_tol.max(1e-13) * 1e3 * (1.0 + max_coeff) * deg as f64);
        }
        for &(a, b, d) in &roots {
            let (re, im) = (a as f64 / d as f64, b as f64 / d as f64);
            let best = found.iter().map(|x| (x.re - re).hypot(x.im - im)).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "root {re}+{im}i missed by {best} in {p}");
        }
        assert_eq!(root_points(&found).iter().map(|q| q.mult).sum::<usize>(), deg);
    }
}

type Query = (shareval_core::RationalFunction, PairKind, FieldElem, DomainSpec);

/// A family member with one of its promised values, so that shared cases are common.
fn family_query(rng: &mut SvRng) -> Option<Query> {
    let fams: Vec<_> = FamilyRegistry::global().iter().collect();
    let fam = fams[rng.gen_range(0..fams.len())];
    let inst = fam.construct(&fam.sample(rng)).ok()?;
    if inst.function.degree() > 6 || inst.value_checks.is_empty() {
        return None;
    }
    let a = inst.value_checks[rng.gen_range(0..inst.value_checks.len())].value.clone();
    Some((inst.function, inst.pair, a, inst.domain))
}

fn random_query(rng: &mut SvRng) -> Query {
    if rng.gen_bool(0.4) {
        if let Some(q) = family_query(rng) {
            return q;
        }
    }
    let f = random_function(rng, 6);
    let (pair, domain) = if rng.gen_bool(0.5) {
        let d = if rng.gen_bool(0.5) { DomainSpec::Plane } else { DomainSpec::Sphere };
        (PairKind::Derivative, d)
    } else {
        let l = FieldElem::from_ratio(*[-2i64, -1, 1, 2, 3].get(rng.gen_range(0..5)).unwrap(), rng.gen_range(1..=2));
        let d = if rng.gen_bool(0.5) { DomainSpec::Punctured } else { DomainSpec::Sphere };
        (PairKind::Euler(l), d)
    };
    let g = pair.apply(&f).unwrap();
    let vals = candidate_values(&f, &g, &[]);
    let a = vals[rng.gen_range(0..vals.len())].clone();
    (f, pair, a, domain)
}

#[test]
fn exact_and_numeric_agree() {
    let mut rng = SvRng::seed_from_u64(2024);
    let cfg = OracleConfig::default();
    let (mut borderline, mut shared) = (0, 0);
    for i in 0..500 {
        let (f, pair, a, domain) = random_query(&mut rng);
        let exact = shares_value(&f, &pair, &a, domain).unwrap();
        let approx = numeric_verdict(&f, &pair, &a, domain, &cfg).unwrap_or_else(|e| panic!("{f} {pair} {a} {domain}: {e}"));
        let agreement = cross_check(&exact, &approx, &a);
        assert!(!agreement.failure, "query {i}: {f} {pair} a={a} {domain}: {}", agreement.detail);
        borderline += agreement.borderline as usize;
        shared += exact.shared as usize;
    }
    println!("borderline {borderline}/500, shared {shared}/500");
    assert!(borderline < 25);
    assert!(shared > 100);
}

#[test]
fn perturbed_coefficients_are_caught() {
    // z^2 shares 0 with 2z; z^2 + 1/1000 does not.
    let f = shareval_core::RationalFunction::from_poly(Poly::from_ints(&[0, 0, 1]));
    let perturbed = shareval_core::RationalFunction::from_poly(Poly::new(vec![
        FieldElem::from_ratio(1, 1000),
        FieldElem::zero(),
        FieldElem::one(),
    ]));
    let zero = FieldElem::zero();
    let exact = shares_value(&perturbed, &PairKind::Derivative, &zero, DomainSpec::Plane).unwrap();
    let approx = numeric_verdict(&f, &PairKind::Derivative, &zero, DomainSpec::Plane, &OracleConfig::default()).unwrap();
    assert!(!exact.shared && approx.shared);
    let agreement = cross_check(&exact, &approx, &zero);
    assert!(agreement.failure);
    assert!(agreement.detail.contains("f roots") && agreement.detail.contains("g roots"));
}

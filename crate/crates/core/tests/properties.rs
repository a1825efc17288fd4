use proptest::prelude::*;

use shareval_core::field::FieldElem;
use shareval_core::invariants::invariant_appendix;
use shareval_core::poly::{gcd, yun_squarefree};
use shareval_core::ratfun::{rf_derivative, rf_euler_derivative, total_ramification};
use shareval_core::sharing::{shares_value, DomainSpec, PairKind};
use shareval_core::{Poly, Rational, RationalFunction};

fn elem(m: i64) -> impl Strategy<Value = FieldElem> {
    (-9i64..=9, 1i64..=4, -9i64..=9, 1i64..=4).prop_map(move |(a, b, c, d)| {
        FieldElem::new(Rational::new(a, b), Rational::new(c, d), m).unwrap()
    })
}

fn radicand() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![-1i64, 2, 3, 5, -3])
}

fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-6i64..=6, 1..=max_deg + 1).prop_map(|c| Poly::from_ints(&c))
}

fn nonzero_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    poly(max_deg).prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfun(max_deg: usize) -> impl Strategy<Value = RationalFunction> {
    (poly(max_deg), nonzero_poly(max_deg))
        .prop_filter_map("nonconstant", |(n, d)| RationalFunction::new(n, d).ok().filter(|r| !r.is_constant()))
}

fn small_value() -> impl Strategy<Value = FieldElem> {
    (-3i64..=3, 1i64..=2).prop_map(|(n, d)| FieldElem::from_ratio(n, d))
}

fn lambda() -> impl Strategy<Value = FieldElem> {
    (prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]), 1i64..=3).prop_map(|(n, d)| FieldElem::from_ratio(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn field_is_a_field((x, y, z) in radicand().prop_flat_map(|m| (elem(m), elem(m), elem(m)))) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
            prop_assert_eq!(&(&y / &x) * &x, y.clone());
        }
        let (conj, norm) = x.conjugate_norm();
        prop_assert_eq!(&x * &conj, FieldElem::from_rational(norm));
    }

    #[test]
    fn division_identity(f in poly(7), g in nonzero_poly(4)) {
        let (q, r) = f.divrem(&g).unwrap();
        prop_assert_eq!(&(&q * &g) + &r, f.clone());
        prop_assert!(r.is_zero() || r.deg0() < g.deg0());
    }

    #[test]
    fn gcd_divides_and_is_monic(a in nonzero_poly(4), b in nonzero_poly(4), c in nonzero_poly(3)) {
        let f = &a * &c;
        let g = &b * &c;
        let h = gcd(&f, &g).unwrap();
        prop_assert!(h.is_monic());
        prop_assert!(f.rem(&h).unwrap().is_zero());
        prop_assert!(g.rem(&h).unwrap().is_zero());
        prop_assert!(h.rem(&c.monic()).unwrap().is_zero());
    }

    #[test]
    fn yun_reconstructs(a in nonzero_poly(2), b in nonzero_poly(2), c in nonzero_poly(2)) {
        let f = &(&a * &b.pow(2)) * &c.pow(3);
        let dec = yun_squarefree(&f).unwrap();
        prop_assert_eq!(dec.reconstruct(), f.clone());
        for (p, _) in &dec.factors {
            prop_assert!(p.is_squarefree().unwrap());
            prop_assert!(p.is_monic());
        }
        for (i, (p, _)) in dec.factors.iter().enumerate() {
            for (q, _) in &dec.factors[i + 1..] {
                prop_assert!(gcd(p, q).unwrap().is_one());
            }
        }
    }

    #[test]
    fn normalization_is_canonical(r in ratfun(4), k in nonzero_poly(2), c in -5i64..=5) {
        prop_assume!(c != 0);
        let scaled = RationalFunction::new(
            (&r.num().scale(&FieldElem::from_int(c))) * &k,
            (&r.den().scale(&FieldElem::from_int(c))) * &k,
        ).unwrap();
        prop_assert_eq!(&scaled, &r);
        prop_assert!(r.den().is_monic());
        prop_assert!(gcd(r.num(), r.den()).unwrap().is_one());
    }

    #[test]
    fn leibniz_rule(f in ratfun(3), g in ratfun(3)) {
        let lhs = rf_derivative(&f.mul_checked(&g).unwrap()).unwrap();
        let rhs = rf_derivative(&f).unwrap().mul_checked(&g).unwrap()
            .add_checked(&f.mul_checked(&rf_derivative(&g).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ramification_is_two_d_minus_two(r in ratfun(6)) {
        prop_assert_eq!(total_ramification(&r).unwrap(), 2 * r.degree() - 2);
    }

    #[test]
    fn appendix_holds(r in ratfun(5), l in lambda()) {
        for pair in [PairKind::Derivative, PairKind::Euler(l)] {
            let pts = [FieldElem::from_int(1), FieldElem::from_int(-2), FieldElem::from_ratio(1, 3)];
            for c in invariant_appendix(&r, &pair, &pts).unwrap() {
                prop_assert!(c.holds, "{}: {}", c.name, c.detail);
            }
        }
    }

    // f(z+t) and its derivative are the same pair moved by t.
    #[test]
    fn translation_equivariance(r in ratfun(4), t in small_value(), a in small_value()) {
        let moved = r.translate(&t);
        for d in [DomainSpec::Plane, DomainSpec::Sphere] {
            let v0 = shares_value(&r, &PairKind::Derivative, &a, d).unwrap();
            let v1 = shares_value(&moved, &PairKind::Derivative, &a, d).unwrap();
            prop_assert_eq!(v0.shared, v1.shared);
            prop_assert_eq!(v0.mode, v1.mode);
            prop_assert_eq!(v0.multiplicity_pairs(&a), v1.multiplicity_pairs(&a));
        }
    }

    // R(1/w) with -lambda has Euler derivative (dR)(1/w).
    #[test]
    fn inversion_equivariance(r in ratfun(4), l in lambda(), a in small_value()) {
        let inv = r.invert_var();
        let g = rf_euler_derivative(&r, &l).unwrap();
        prop_assert_eq!(rf_euler_derivative(&inv, &(-l.clone())).unwrap(), g.invert_var());
        for d in [DomainSpec::Punctured, DomainSpec::Sphere] {
            let v0 = shares_value(&r, &PairKind::Euler(l.clone()), &a, d).unwrap();
            let v1 = shares_value(&inv, &PairKind::Euler(-l.clone()), &a, d).unwrap();
            prop_assert_eq!(v0.shared, v1.shared);
            prop_assert_eq!(v0.mode, v1.mode);
            prop_assert_eq!(v0.omitted, v1.omitted);
        }
    }

    // Both pairs are linear, so scaling R scales the shared values.
    #[test]
    fn scaling_equivariance(r in ratfun(4), c in small_value(), a in small_value(), l in lambda()) {
        prop_assume!(!c.is_zero());
        let scaled = r.scale(&c);
        let ca = &c * &a;
        for (pair, d) in [(PairKind::Derivative, DomainSpec::Plane), (PairKind::Euler(l), DomainSpec::Punctured)] {
            let v0 = shares_value(&r, &pair, &a, d).unwrap();
            let v1 = shares_value(&scaled, &pair, &ca, d).unwrap();
            prop_assert_eq!(v0.shared, v1.shared);
            prop_assert_eq!(v0.mode, v1.mode);
        }
    }
}

use hhorder::bvfunction::{crossing_points, CumulativeFunction};
use hhorder::catalog::{functional_value_exact, make_weight, FunctionalSpec};
use hhorder::convex_order::{classify, hinge_gap, levin_stechkin_compare, witness_functions, RelationKind};
use hhorder::polynomial::{isolate_roots, Poly};
use hhorder::quadrature::{stieltjes_numeric, TestFunction};
use hhorder::rational::{format_rational, parse_rational, rat, to_f64, Rational};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn small_rational(max_num: i64, max_den: i64) -> impl Strategy<Value = Rational> {
    (-max_num..=max_num, 1..=max_den).prop_map(|(n, d)| rat(n, d))
}

fn unit_alpha() -> impl Strategy<Value = Rational> {
    (1i64..=11, 12i64..=12).prop_map(|(n, d)| rat(n, d))
}

fn base_spec() -> impl Strategy<Value = FunctionalSpec> {
    prop_oneof![
        Just(FunctionalSpec::Uniform),
        Just(FunctionalSpec::Midpoint),
        Just(FunctionalSpec::Trapezoid),
        Just(FunctionalSpec::DoubleAverage),
        Just(FunctionalSpec::SimpsonLike),
        Just(FunctionalSpec::CompositeQuarter),
        small_rational(24, 2).prop_map(|a| FunctionalSpec::T { a }),
        unit_alpha().prop_map(|alpha| FunctionalSpec::EvalAt { alpha }),
        unit_alpha().prop_map(|alpha| FunctionalSpec::Endpoints { alpha }),
        unit_alpha().prop_map(|alpha| FunctionalSpec::S1 { alpha }),
        unit_alpha().prop_map(|alpha| FunctionalSpec::S2 { alpha }),
    ]
}

fn spec() -> impl Strategy<Value = FunctionalSpec> {
    prop_oneof![
        4 => base_spec(),
        1 => (base_spec(), base_spec(), 0i64..=8).prop_map(|(a, b, k)| {
            FunctionalSpec::mixture(vec![(rat(k, 8), a), (rat(8 - k, 8), b)])
        }),
    ]
}

fn poly(max_degree: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rational(9, 4), 1..=max_degree + 1).prop_map(Poly::new)
}

fn weight(s: &FunctionalSpec) -> CumulativeFunction {
    make_weight(s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stieltjes_matches_closed_form(s in spec(), f in poly(6)) {
        let w = weight(&s);
        prop_assert_eq!(w.stieltjes(&f), functional_value_exact(&s, &f).unwrap());
    }

    #[test]
    fn mass_and_mean_by_parts(s in spec()) {
        // ∫ dF = F(1) = 1 and ∫ t dF = F(1) - ∫ F
        let w = weight(&s);
        prop_assert_eq!(w.moment(0), Rational::one());
        prop_assert_eq!(w.moment(1), w.end_value() - w.integral());
    }

    #[test]
    fn comparison_is_antisymmetric(a in spec(), b in spec()) {
        let (fa, fb) = (weight(&a), weight(&b));
        prop_assert_eq!(levin_stechkin_compare(&fa, &fb).kind(), levin_stechkin_compare(&fb, &fa).kind().reversed());
        prop_assert_eq!(classify(&fa, &fb), levin_stechkin_compare(&fa, &fb).kind());
    }

    #[test]
    fn verdicts_are_sound_on_a_grid(a in spec(), b in spec()) {
        let (fa, fb) = (weight(&a), weight(&b));
        let v = levin_stechkin_compare(&fa, &fb);
        let g = fb.difference(&fa).primitive();
        let values: Vec<Rational> = (0..997).map(|i| g.eval(&rat(i, 996))).collect();
        match v.kind() {
            RelationKind::LessOrEqual => prop_assert!(values.iter().all(|x| !x.is_negative())),
            RelationKind::GreaterOrEqual => prop_assert!(values.iter().all(|x| !x.is_positive())),
            RelationKind::Equal => prop_assert!(values.iter().all(Zero::is_zero)),
            RelationKind::Incomparable => {
                let w = witness_functions(&fa, &fb, &v).unwrap();
                prop_assert!(w.plus_gap.is_positive() && w.minus_gap.is_negative());
                prop_assert_eq!(&w.plus_gap, &g.eval(&w.plus.knot));
                prop_assert_eq!(&w.minus_gap, &g.eval(&w.minus.knot));
            }
            // catalog weights all have mass 1; only the means can differ
            RelationKind::NotNormalized => prop_assert_ne!(fa.integral(), fb.integral()),
        }
    }

    #[test]
    fn hinge_gap_is_the_primitive_gap(a in spec(), b in spec(), n in 1i64..60) {
        let (fa, fb) = (weight(&a), weight(&b));
        prop_assume!(fa.integral() == fb.integral());
        let c = rat(n, 61);
        let g = fb.difference(&fa).primitive();
        prop_assert_eq!(hinge_gap(&fa, &fb, &c).unwrap(), g.eval(&c));
    }

    #[test]
    fn primitive_is_linear(a in spec(), b in spec(), c1 in small_rational(4, 3), c2 in small_rational(4, 3), n in 0i64..=50) {
        let (fa, fb) = (weight(&a), weight(&b));
        let combo = CumulativeFunction::linear_combination(&[(c1.clone(), &fa), (c2.clone(), &fb)]).unwrap();
        let x = rat(n, 50);
        let lhs = combo.primitive().eval(&x);
        let rhs = &c1 * fa.primitive().eval(&x) + &c2 * fb.primitive().eval(&x);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn crossings_are_symmetric(a in spec(), b in spec()) {
        let (fa, fb) = (weight(&a), weight(&b));
        let ab = crossing_points(&fa, &fb);
        let ba = crossing_points(&fb, &fa);
        prop_assert_eq!(ab.len(), ba.len());
        for (x, y) in ab.iter().zip(&ba) {
            prop_assert_eq!(&x.location, &y.location);
            prop_assert_eq!(x.direction, y.direction.reversed());
        }
        // directions alternate
        for w in ab.windows(2) {
            prop_assert_ne!(w[0].direction, w[1].direction);
        }
    }

    #[test]
    fn weights_round_trip_through_json(s in spec()) {
        let w = weight(&s);
        prop_assert_eq!(CumulativeFunction::from_json(&w.to_json()).unwrap(), w);
    }

    #[test]
    fn specs_round_trip_through_text(s in spec()) {
        let parsed: FunctionalSpec = s.to_string().parse().unwrap();
        prop_assert_eq!(weight(&parsed), weight(&s));
    }

    #[test]
    fn rationals_round_trip(r in small_rational(1000, 999)) {
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn numeric_stieltjes_matches_exact(s in spec(), f in poly(6)) {
        let w = weight(&s);
        let coeffs: Vec<f64> = f.coeffs().iter().map(to_f64).collect();
        let numeric = stieltjes_numeric(&TestFunction::Polynomial { coeffs }, &w, 1e-13).unwrap();
        let exact = to_f64(&w.stieltjes(&f));
        prop_assert!((numeric.value - exact).abs() <= 1e-10 * (1.0 + exact.abs()), "{} vs {}", numeric.value, exact);
    }

    #[test]
    fn division_reconstructs(a in poly(6), b in poly(3)) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.div_rem(&b);
        prop_assert!(r.is_zero() || r.degree() < b.degree());
        prop_assert_eq!(&(&q * &b) + &r, a);
    }

    #[test]
    fn antiderivative_inverts_derivative(p in poly(6), lo in small_rational(3, 4), hi in small_rational(3, 4)) {
        prop_assert_eq!(p.antiderivative().derivative(), p.clone());
        prop_assert_eq!(p.integrate(&lo, &hi), p.antiderivative().eval(&hi) - p.antiderivative().eval(&lo));
    }

    #[test]
    fn planted_roots_are_found(roots in prop::collection::btree_set(-20i64..=20, 1..5), extra in 0usize..2) {
        // (t - r/7) factors, plus an irreducible t^2 - 2 when requested
        let mut p = Poly::constant(Rational::one());
        for r in &roots {
            p = &p * &Poly::new(vec![-rat(*r, 7), Rational::one()]);
        }
        if extra == 1 {
            p = &p * &Poly::from_ints(&[-2, 0, 1]);
        }
        let found = isolate_roots(&p, &rat(-3, 1), &rat(3, 1)).unwrap();
        let exact: Vec<Rational> = found.iter().filter(|r| r.is_exact()).map(|r| r.lo.clone()).collect();
        let planted: Vec<Rational> = roots.iter().map(|r| rat(*r, 7)).collect();
        prop_assert_eq!(exact, planted);
        prop_assert_eq!(found.len(), roots.len() + 2 * extra);
        for w in found.windows(2) {
            prop_assert!(w[0].hi <= w[1].lo);
        }
    }
}

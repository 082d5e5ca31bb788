//! Randomized algebraic laws for coefficients and truncated series.

use proptest::prelude::*;

use toprec::coeff::{rat, Coeff, Poly, Rat};
use toprec::series::LaurentSeries;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rat(), 1..=max_deg + 1).prop_map(Poly::from_coeffs)
}

/// num(p)/den(p) with small degrees.
fn coeff() -> impl Strategy<Value = Coeff> {
    (poly(2), poly(2))
        .prop_filter("nonzero denominator", |(_, d)| !d.is_zero())
        .prop_map(|(n, d)| &Coeff::from_poly(n) / &Coeff::from_poly(d))
}

/// c₁ζ + c₂ζ² + ... + O(ζ^hi) with c₁ ≠ 0.
fn invertible_series(hi: i32) -> impl Strategy<Value = LaurentSeries> {
    (
        small_rat().prop_filter("nonzero", |r| *r != rat(0, 1)),
        prop::collection::vec(coeff(), (hi - 2) as usize),
    )
        .prop_map(move |(c1, rest)| {
            let mut v = vec![Coeff::from_rat(c1)];
            v.extend(rest);
            LaurentSeries::new("ζ", 1, v)
        })
}

fn laurent(lo: i32, len: usize) -> impl Strategy<Value = LaurentSeries> {
    prop::collection::vec(coeff(), len).prop_map(move |v| LaurentSeries::new("ζ", lo, v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in coeff(), b in coeff(), c in coeff()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn representation_is_canonical(a in coeff(), b in coeff()) {
        prop_assume!(!b.is_zero());
        // Equal values have identical representations, however they were built.
        let q = &(&a * &b) / &b;
        prop_assert_eq!(&q, &a);
        let again = Coeff::from_poly(q.num().clone());
        let rebuilt = &again / &Coeff::from_poly(q.den().clone());
        prop_assert_eq!(&rebuilt, &q);
        let json = serde_json::to_string(&q).unwrap();
        prop_assert_eq!(serde_json::from_str::<Coeff>(&json).unwrap(), q);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in coeff(), b in coeff(), r in small_rat()) {
        if let (Ok(x), Ok(y)) = (a.eval(&r), b.eval(&r)) {
            prop_assert_eq!((&a + &b).eval(&r).unwrap(), &x + &y);
            prop_assert_eq!((&a * &b).eval(&r).unwrap(), &x * &y);
        }
    }

    #[test]
    fn reversion_is_an_involution(s in invertible_series(6)) {
        let r = s.revert().unwrap();
        prop_assert_eq!(r.revert().unwrap(), s.clone());
        let id = s.compose(&r).unwrap();
        prop_assert_eq!(id, LaurentSeries::identity("ζ", s.hi()));
    }

    #[test]
    fn derivative_undoes_antiderivative(s in laurent(-3, 7)) {
        let s = s.sub(&LaurentSeries::monomial("ζ", s.coeff_or_zero(-1), -1, s.hi())).unwrap();
        let back = s.antidifferentiate().unwrap().differentiate();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn derivatives_have_no_residue(s in laurent(-4, 8)) {
        prop_assert!(s.differentiate().residue().unwrap().is_zero());
    }

    #[test]
    fn product_is_commutative_within_window(a in laurent(-2, 5), b in laurent(1, 5)) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }
}

use proptest::prelude::*;
use stackydeg_core::field::{Poly, RatFunc, Valuation};

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-5i64..=5, 0..5).prop_map(|c| Poly::from_i64(&c))
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(), poly(), 0usize..3, prop::bool::ANY).prop_filter_map("zero denominator", |(n, d, e, pole)| {
        // optionally put an explicit power of t on one side
        let te = Poly::from_i64(&[&vec![0; e][..], &[1]].concat());
        let (n, d) = if pole { (n, &d * &te) } else { (&n * &te, d) };
        RatFunc::new(n, d).ok()
    })
}

fn nonzero() -> impl Strategy<Value = RatFunc> {
    ratfunc().prop_filter("nonzero", |f| !f.is_zero())
}

proptest! {
    #[test]
    fn field_axioms(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn inverses(a in nonzero()) {
        prop_assert!((&a * &a.inv().unwrap()).is_one());
        prop_assert_eq!(a.inv().unwrap().inv().unwrap(), a);
    }

    #[test]
    fn valuation_is_discrete(a in ratfunc(), b in ratfunc()) {
        prop_assert_eq!((&a * &b).val(), a.val() + b.val());
        let s = (&a + &b).val();
        prop_assert!(s >= a.val().min(b.val()));
        if a.val() != b.val() {
            prop_assert_eq!(s, a.val().min(b.val()));
        }
    }

    #[test]
    fn canonical_form(a in ratfunc()) {
        prop_assert_eq!(a.denom().leading().cloned(), Some(num_rational::BigRational::from_integer(1.into())));
        prop_assert!(Poly::gcd(a.numer(), a.denom()).degree() == Some(0) || a.is_zero());
        let again = RatFunc::new(a.numer().clone(), a.denom().clone()).unwrap();
        prop_assert_eq!(&again, &a);
        // scaling both sides by the same nonzero polynomial is invisible
        let s = Poly::from_i64(&[3, -1, 2]);
        let scaled = RatFunc::new(a.numer() * &s, a.denom() * &s).unwrap();
        prop_assert_eq!(scaled, a);
    }

    #[test]
    fn print_parse_round_trip(a in ratfunc()) {
        let s = a.to_string();
        let back: RatFunc = s.parse().unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_string(), s);
    }

    #[test]
    fn regularity_matches_valuation(a in ratfunc()) {
        let v = a.val();
        prop_assert_eq!(a.is_regular_at_origin(), v >= Valuation::Finite(0));
    }
}

#[test]
fn spec_valuations() {
    let v = |s: &str| s.parse::<RatFunc>().unwrap().val();
    assert_eq!(v("t^3/(1+t)"), Valuation::Finite(3));
    assert_eq!(v("1"), Valuation::Finite(0));
    assert_eq!(v("(t^2-t^4)/t^5"), Valuation::Finite(-3));
    assert_eq!(v("0"), Valuation::Infinite);
}

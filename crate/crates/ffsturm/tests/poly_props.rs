mod common;

use common::{field, monic_in, nonzero_in, poly_in};
use ffsturm::factor::factorize;
use ffsturm::laurent::LaurentTail;
use ffsturm::poly::monic_of_degree;
use ffsturm::ratfn::RationalFn;
use ffsturm::Poly;
use proptest::prelude::*;

proptest! {
    #[test]
    fn gcd_scales_by_common_factor((a, b, c) in field().prop_flat_map(|f| (poly_in(f, 6), poly_in(f, 6), nonzero_in(f, 4)))) {
        let lhs = (&a * &c).gcd(&(&b * &c));
        let rhs = (&c.monic() * &a.gcd(&b)).monic();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bezout_by_substitution((a, b) in field().prop_flat_map(|f| (poly_in(f, 8), poly_in(f, 8)))) {
        prop_assume!(!(a.is_zero() && b.is_zero()));
        let (g, s, t) = Poly::gcd_bezout(&a, &b).unwrap();
        prop_assert_eq!(&(&(&s * &a) + &(&t * &b)), &g);
        prop_assert!(g.divides(&a) && g.divides(&b));
        prop_assert!(g.is_monic());
    }

    #[test]
    fn division_with_remainder((a, d) in field().prop_flat_map(|f| (poly_in(f, 10), nonzero_in(f, 5)))) {
        let (q, r) = a.div_rem(&d);
        prop_assert_eq!(&(&(&q * &d) + &r), &a);
        prop_assert!(r.deg_i() < d.deg_i());
    }

    #[test]
    fn absolute_value_is_multiplicative_and_ultrametric(
        (a, b, c, d) in field().prop_flat_map(|f| (nonzero_in(f, 5), nonzero_in(f, 5), nonzero_in(f, 5), nonzero_in(f, 5)))
    ) {
        let x = RationalFn::new(a, b).unwrap();
        let y = RationalFn::new(c, d).unwrap();
        prop_assert_eq!((&x * &y).log_abs().unwrap(), x.log_abs().unwrap() + y.log_abs().unwrap());
        if let Some(s) = (&x + &y).log_abs() {
            prop_assert!(s <= x.log_abs().unwrap().max(y.log_abs().unwrap()));
        }
    }

    #[test]
    fn factorization_recombines(n in field().prop_filter("small q", |f| f.q() <= 5).prop_flat_map(|f| monic_in(f, 7))) {
        let factors = factorize(&n).unwrap();
        let f = n.field();
        let product = factors.iter().fold(Poly::one(f), |acc, (p, e)| &acc * &p.pow(*e as u64));
        prop_assert_eq!(&product, &n);
        for (p, _) in &factors {
            let dp = p.deg().unwrap();
            prop_assert!(dp >= 1 && p.is_monic());
            for k in 1..=dp / 2 {
                prop_assert!(monic_of_degree(f, k).all(|m| !m.divides(p)), "{} has a factor of degree {}", p, k);
            }
        }
    }

    #[test]
    fn laurent_tail_round_trip(
        (f, start, coeffs) in field().prop_flat_map(|f| (Just(f), -20i64..=20, prop::collection::vec(0..f.q() as u8, 0..=40)))
    ) {
        let tail = LaurentTail::new(f, start, coeffs);
        let x = tail.to_ratfn();
        let end = tail.start() + tail.coeffs().len() as i64;
        prop_assert_eq!(LaurentTail::from_ratfn(&x, end), tail.clone());
        prop_assert_eq!(LaurentTail::from_ratfn(&x, end + 7), tail);
    }

    #[test]
    fn display_parses_back(p in field().prop_flat_map(|f| poly_in(f, 8))) {
        prop_assert_eq!(Poly::parse(p.field(), &p.to_string()).unwrap(), p);
    }
}

use proptest::prelude::*;
use vbrep::polytext::{default_names, parse_poly};
use vbrep::{ratio, Poly, PolyMatrix};

const N: usize = 2;

fn poly() -> impl Strategy<Value = Poly> {
    proptest::collection::vec(((0u32..3, 0u32..3), -4i64..5, 1i64..4), 0..4)
        .prop_map(|terms| Poly::from_terms(N, terms.into_iter().map(|((a, b), n, d)| (vec![a, b], ratio(n, d)))).unwrap())
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = PolyMatrix> {
    proptest::collection::vec(poly(), rows * cols).prop_map(move |v| PolyMatrix::from_fn(rows, cols, N, |i, j| v[i * cols + j].clone()))
}

proptest! {
    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Poly::one(N), a.clone());
    }

    #[test]
    fn partials_are_derivations(a in poly(), b in poly(), j in 0usize..N) {
        let lhs = (&a * &b).partial(j).unwrap();
        let rhs = &(&a.partial(j).unwrap() * &b) + &(&a * &b.partial(j).unwrap());
        prop_assert_eq!(lhs, rhs);
        // mixed partials commute
        prop_assert_eq!(a.partial(0).unwrap().partial(1).unwrap(), a.partial(1).unwrap().partial(0).unwrap());
    }

    #[test]
    fn zero_test_is_exact(a in poly()) {
        prop_assert_eq!(a.is_zero(), a.num_terms() == 0);
        prop_assert!(!(&a + &Poly::one(N)).is_zero() || a == -Poly::one(N));
    }

    #[test]
    fn text_round_trip(a in poly()) {
        prop_assert_eq!(parse_poly(&a.to_string(), &default_names(N)).unwrap(), a);
    }

    #[test]
    fn matrix_identities(a in matrix(2, 3), b in matrix(3, 2), c in matrix(2, 2)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!((&a * &b).transpose(), &b.transpose() * &a.transpose());
        // ∂_j(AB) = (∂_j A)B + A(∂_j B)
        let lhs = (&a * &b).apply_partial(0).unwrap();
        let rhs = &(&a.apply_partial(0).unwrap() * &b) + &(&a * &b.apply_partial(0).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn shape_mismatches_are_errors() {
    let a = PolyMatrix::zeros(2, 3, N);
    assert!(a.checked_mul(&a).is_err());
    assert!(a.checked_add(&PolyMatrix::zeros(3, 2, N)).is_err());
    assert!(Poly::var(N, 0).checked_add(&Poly::var(3, 0)).is_err());
    assert!(Poly::var(N, 0).partial(N).is_err());
}

use pme_core::exact_poly::{rat, MultiPoly, Rational, Var};
use pme_core::pde::harmonic_basis;
use proptest::prelude::*;

const N: usize = 2;

fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0u32..3, N + 2), -6i64..7, 1i64..4), 0..5).prop_map(|terms| {
        terms.into_iter().fold(MultiPoly::zero(N), |acc, (e, p, q)| &acc + &MultiPoly::monomial(N, e, rat(p, q)).unwrap())
    })
}

fn point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-5i64..6, 1i64..5).prop_map(|(p, q)| rat(p, q)), N + 2)
}

fn vars() -> impl Strategy<Value = Var> {
    prop_oneof![Just(Var::T), Just(Var::X(1)), Just(Var::X(2)), Just(Var::U)]
}

proptest! {
    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &MultiPoly::one(N), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn leibniz(a in poly(), b in poly(), v in vars()) {
        let lhs = (&a * &b).diff(v).unwrap();
        let rhs = &(&a.diff(v).unwrap() * &b) + &(&a * &b.diff(v).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(), b in poly(), p in point()) {
        let ea = a.eval_rational(&p).unwrap();
        let eb = b.eval_rational(&p).unwrap();
        prop_assert_eq!((&a * &b).eval_rational(&p).unwrap(), &ea * &eb);
        prop_assert_eq!((&a + &b).eval_rational(&p).unwrap(), &ea + &eb);
    }

    #[test]
    fn derivatives_commute(a in poly(), v in vars(), w in vars()) {
        prop_assert_eq!(a.diff(v).unwrap().diff(w).unwrap(), a.diff(w).unwrap().diff(v).unwrap());
    }

    #[test]
    fn harmonic_products_with_coordinates(d in 0u32..4, n in 1usize..4) {
        // x_i k is harmonic iff d_i k = 0; check the identity Δ(x_i k) = 2 d_i k
        for k in harmonic_basis(n, d) {
            let xk = &MultiPoly::x(n, 1) * &k;
            let two_dk = k.diff(Var::X(1)).unwrap().scale(&rat(2, 1));
            prop_assert_eq!(xk.laplacian(), two_dk);
        }
    }
}

#[test]
fn arity_mismatch_is_an_error() {
    let a = MultiPoly::x(2, 1);
    let b = MultiPoly::x(3, 1);
    assert!(a.try_add(&b).is_err());
    assert!(a.try_mul(&b).is_err());
    assert!(a.diff(Var::X(3)).is_err());
}

mod common;

use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bigaction::genus::{gs_aggregate, rh_genus};
use bigaction::local::reduce_mod_wp;
use bigaction::tower::{check_endo, sigma, tau, PresentationKind, RewriteOrder, Tower};
use bigaction::{Field, Fq, LaurentPoly, Params};

fn f27() -> Arc<Field> {
    Arc::new(Field::new(3, 3).unwrap())
}

fn laurent(field: &Arc<Field>, terms: &[(i64, u32)]) -> LaurentPoly {
    LaurentPoly::from_terms(field, terms.iter().map(|&(e, c)| (e, field.from_packed(c % field.size() as u32).unwrap())))
}

fn terms() -> impl Strategy<Value = Vec<(i64, u32)>> {
    prop::collection::vec((-500i64..100, 0u32..27), 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_axioms(a in 0u32..125, b in 0u32..125, c in 0u32..125) {
        let f = Field::new(5, 3).unwrap();
        let (a, b, c) = (f.from_packed(a).unwrap(), f.from_packed(b).unwrap(), f.from_packed(c).unwrap());
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq::ONE);
        }
        prop_assert_eq!(f.frobenius_iter(f.frobenius_iter(a, 1), -1), a);
        prop_assert_eq!(f.pow(f.pth_root(a), 5), a);
    }

    #[test]
    fn reduction_witness_identity(t in terms()) {
        let f = f27();
        let a = laurent(&f, &t);
        let r = reduce_mod_wp(&a);
        prop_assert!(r.verify(&a));
        prop_assert!(r.reduced.terms().all(|(e, _)| e < 0 && e % 3 != 0));
    }

    #[test]
    fn reduction_ignores_artin_schreier_image(t in terms(), v in prop::collection::vec((-150i64..50, 0u32..27), 0..6)) {
        let f = f27();
        let a = laurent(&f, &t);
        let v = laurent(&f, &v);
        let b = &a + &(&v.pow_pk(1) - &v);
        prop_assert_eq!(reduce_mod_wp(&b).reduced, reduce_mod_wp(&a).reduced);
    }

    #[test]
    fn reduction_is_additive(t in terms(), u in terms()) {
        let f = f27();
        let (a, b) = (laurent(&f, &t), laurent(&f, &u));
        let lhs = reduce_mod_wp(&(&a + &b)).reduced;
        let rhs = &reduce_mod_wp(&a).reduced + &reduce_mod_wp(&b).reduced;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn riemann_hurwitz_recovers_conductor(base in 0i64..5000, k in 1u64..10_000, p in prop::sample::select(vec![3u32, 5, 7])) {
        // m - 1 prime to p
        let m = k * p as u64 + 2;
        let g = rh_genus(&BigInt::from(base), m, p).unwrap();
        let lhs: BigInt = g * 2 - 2 - BigInt::from(p) * (BigInt::from(base) * 2 - 2);
        prop_assert_eq!(lhs, BigInt::from((p - 1) as u64 * m));
    }

    #[test]
    fn aggregation_of_equal_pieces(g in 0i64..1000, n in 1u32..5) {
        // every piece equal to the base: the total genus is p^n (g - 1) + 1 for
        // an unramified tower, which the formula reproduces exactly
        let p = 3u32;
        let count = (BigInt::from(p).pow(n) - 1) / BigInt::from(p - 1);
        let piece = BigInt::from(p) * (BigInt::from(g) - 1) + 1;
        let total = gs_aggregate(&[(piece, count)], &BigInt::from(g), p, n).unwrap();
        prop_assert_eq!(total, BigInt::from(p).pow(n) * (BigInt::from(g) - 1) + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_confluent(seed in any::<u64>(), kind in prop::sample::select(vec![PresentationKind::Unprimed, PresentationKind::Primed, PresentationKind::Mixed])) {
        let pr = Params::new(3, 1).unwrap();
        let f = Arc::new(Field::new(3, 3).unwrap());
        let t = Tower::new(&f, pr, kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_element(&t, &mut rng, 3, 5);
        let b = common::random_element(&t, &mut rng, 3, 5);
        let raw = common::raw_product(&t, &a, &b);
        let n = t.normalize(&raw);
        prop_assert_eq!(&t.mul(&a, &b), &n);
        prop_assert_eq!(&t.normalize_by_rewriting(&raw, RewriteOrder::HighestFirst), &n);
        prop_assert_eq!(&t.normalize_by_rewriting(&raw, RewriteOrder::LowestFirst), &n);
    }

    #[test]
    fn certified_endos_are_homomorphisms(seed in any::<u64>(), g in 1u32..27, use_tau in any::<bool>()) {
        let pr = Params::new(3, 1).unwrap();
        let f = Arc::new(Field::new(3, 3).unwrap());
        let t = Tower::new(&f, pr, PresentationKind::Mixed);
        let gamma = f.from_packed(g).unwrap();
        let e = if use_tau { tau(&t, gamma) } else { sigma(&t, gamma) };
        let e = check_endo(&t, e.images().to_vec()).certified().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_element(&t, &mut rng, 3, 4);
        let b = common::random_element(&t, &mut rng, 3, 4);
        prop_assert_eq!(e.apply(&t, &t.mul(&a, &b)), t.mul(&e.apply(&t, &a), &e.apply(&t, &b)));
        prop_assert_eq!(e.apply(&t, &t.add(&a, &b)), t.add(&e.apply(&t, &a), &e.apply(&t, &b)));
    }
}

#[test]
fn expansion_supports_stay_small() {
    let pl = bigaction::genus::Pipeline::new(Params::new(3, 2).unwrap()).unwrap();
    for n in pl.expansion_supports() {
        assert!(n < 10_000, "support {n}");
    }
}

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use absum::error::Error;
use absum::harness::sample::{random_slice, random_slice_containing, random_unit_vector};
use absum::norm2::{classify, AbsoluteNorm};
use absum::real::{format_q, parse_q, q, Real, Q};
use absum::spaces::{
    daugavet_witness, non_delta_certificate, DeskSpace, DiametralWitness, PlFn, SliceSpec, Vector,
};
use absum::sums::{
    aoh_daugavet_point, check_conjugate, conjugate_pair_exists, deltak_witness_l1, Component, DeltaIndexSet,
    DeltaKPoint,
};

fn rational() -> impl Strategy<Value = Q> {
    (-200i64..=200, 1i64..=50).prop_map(|(n, d)| q(n, d))
}

fn nonneg() -> impl Strategy<Value = Q> {
    (0i64..=200, 1i64..=50).prop_map(|(n, d)| q(n, d))
}

fn norms() -> Vec<AbsoluteNorm> {
    vec![
        AbsoluteNorm::l1(),
        AbsoluteNorm::linf(),
        AbsoluteNorm::hex(),
        AbsoluteNorm::l2(),
        AbsoluteNorm::lp(3.0).unwrap(),
    ]
}

fn c01_one() -> Component {
    Component::new(DeskSpace::c01(), Vector::Pl(PlFn::constant(Q::one()))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rationals_round_trip_through_text(x in rational()) {
        prop_assert_eq!(parse_q(&format_q(&x)).unwrap(), x);
    }

    #[test]
    fn absolute_norms_sit_between_max_and_sum(a in nonneg(), b in nonneg()) {
        for n in norms() {
            let v = n.eval_q(&a, &b).unwrap();
            let lo = Real::Exact(a.clone().max(b.clone()));
            let hi = Real::Exact(&a + &b);
            prop_assert!(v.ge(&lo) && v.le(&hi), "{} at ({}, {})", n.label(), a, b);
            // every profile here is symmetric
            prop_assert!(v.approx_eq(&n.eval_q(&b, &a).unwrap()));
        }
    }

    #[test]
    fn duality_pairing_is_bounded(a in nonneg(), b in nonneg(), c in nonneg(), d in nonneg()) {
        for n in norms() {
            let pair = absum::real::q_to_f64(&(&a * &c + &b * &d));
            let bound = n.eval_q(&a, &b).unwrap().to_f64() * n.dual_eval(&Real::Exact(c.clone()), &Real::Exact(d.clone())).unwrap().to_f64();
            prop_assert!(pair <= bound * (1.0 + 1e-9) + 1e-12, "{}: {} > {}", n.label(), pair, bound);
        }
    }

    #[test]
    fn dichotomy_gate_on_lp(p in 1.01f64..12.0) {
        let n = AbsoluteNorm::lp(p).unwrap();
        prop_assert!(!classify(&n).is_aoh());
        prop_assert!(matches!(aoh_daugavet_point(&n, c01_one(), c01_one()), Err(Error::NotAoh)));
    }

    #[test]
    fn witnesses_revalidate_from_stored_fields(seed in any::<u64>(), step in any::<bool>(), e in 1i64..100) {
        let space = if step { DeskSpace::l1step() } else { DeskSpace::c01() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_unit_vector(&space, &mut rng).unwrap();
        let slice = random_slice(&space, &mut rng).unwrap();
        let w = daugavet_witness(&space, &x, &slice, &q(e, 100)).unwrap();
        let text = serde_json::to_string(&w).unwrap();
        let back: DiametralWitness = serde_json::from_str(&text).unwrap();
        prop_assert!(back.is_valid(&space));
    }

    #[test]
    fn sum_witnesses_for_aoh_norms(seed in any::<u64>(), which in 0usize..3) {
        let norm = [AbsoluteNorm::l1(), AbsoluteNorm::linf(), AbsoluteNorm::hex()][which].clone();
        let p = aoh_daugavet_point(&norm, c01_one(), c01_one()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slice = random_slice(&p.space, &mut rng).unwrap();
        let w = absum::sums::sum_daugavet_witness(&p, &slice, &q(1, 20)).unwrap();
        prop_assert!(w.is_valid(&p.space));
    }

    #[test]
    fn widening_is_monotone(seed in any::<u64>(), extra in 0i64..8) {
        let k = q(2, 1);
        let x = Component::plain(DeskSpace::lp(2, 2.0), Vector::coords(vec![Q::one(), Q::zero()])).unwrap();
        let p = DeltaKPoint::new(k.clone(), x, c01_one()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slice = random_slice_containing(&p.space, &p.point, &mut rng).unwrap();
        let w = deltak_witness_l1(&p, &slice, &q(1, 5)).unwrap();
        let k2 = &k + q(extra, 4);
        let wider = SliceSpec { functional: slice.functional.clone(), alpha: &k2 * &slice.alpha };
        prop_assert!(wider.contains(&p.space, &w.u).unwrap());
    }

    #[test]
    fn conjugate_pairs_are_exact(an in 2i64..200, ad in 1i64..20, bn in 2i64..200, bd in 1i64..20) {
        let a = q(an.max(ad + 1), ad);
        let b = q(bn.max(bd + 1), bd);
        let got = conjugate_pair_exists(&DeltaIndexSet::from(a.clone()).unwrap(), &DeltaIndexSet::from(b.clone()).unwrap());
        prop_assert_eq!(got.is_some(), a.recip() + b.recip() >= Q::one());
        if let Some((p, qq)) = got {
            prop_assert!(p >= a && qq >= b);
            prop_assert!(check_conjugate(&p, &qq).is_ok());
        }
    }

    #[test]
    fn searched_certificates_hold_under_brute_force(t in 1i64..12, k in 1i64..4) {
        // unit vectors (cos, sin) from Pythagorean-like rational points
        let (tq, one) = (q(t, 12), Q::one());
        let den = &one + &tq * &tq;
        let x = Vector::coords(vec![(&one - &tq * &tq) / &den, (q(2, 1) * &tq) / &den]);
        let space = DeskSpace::lp(2, 2.0);
        let c = non_delta_certificate(&space, &x, &q(k, 1)).unwrap();
        prop_assert!(c.eps.is_positive() && !c.alpha.is_zero());
        prop_assert!(c.brute_check(&space, &x).unwrap().holds);
    }
}

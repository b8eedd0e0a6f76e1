//! Structural laws of the deformation complex in both pictures.

mod common;

use common::*;
use lax::algebroid::{build_differential, validate};
use lax::corpus;
use lax::deformation::*;
use lax::graded::int;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sign(k: i32) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[test]
fn delta_squares_to_zero_and_is_a_derivation_of_the_bracket() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for pres in corpus::all() {
        let cx = build_differential(&pres).unwrap();
        let g = pres.gens();
        for k in -1..=2 {
            for w in 0..=1 {
                let x = DefCochain::new(random_derivation(g, k, w, 0.5, &mut rng));
                let dx = def_delta(&x, &cx).unwrap();
                assert!(def_delta(&dx, &cx).unwrap().is_zero(), "{} k={k}", pres.name());
                let y = DefCochain::new(random_derivation(g, 1 - k.min(1), 0, 0.5, &mut rng));
                let lhs = def_delta(&def_bracket(&x, &y).unwrap(), &cx).unwrap();
                let rhs = def_bracket(&dx, &y)
                    .unwrap()
                    .try_add(&def_bracket(&x, &def_delta(&y, &cx).unwrap()).unwrap().scale(&int(sign(k))))
                    .unwrap();
                assert_eq!(lhs, rhs);
                checked += 1;
            }
        }
    }
    assert!(checked >= 80);
}

#[test]
fn bracket_antisymmetry_and_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for pres in [corpus::sl2(), corpus::aff_r(), corpus::tr2()] {
        let g = pres.gens();
        for _ in 0..10 {
            let (a, b, c) = (
                rand::Rng::gen_range(&mut rng, -1..=1),
                rand::Rng::gen_range(&mut rng, -1..=1),
                rand::Rng::gen_range(&mut rng, 0..=1),
            );
            let x = DefCochain::new(random_derivation(g, a, 0, 0.6, &mut rng));
            let y = DefCochain::new(random_derivation(g, b, 0, 0.6, &mut rng));
            let z = DefCochain::new(random_derivation(g, c, 0, 0.6, &mut rng));
            let xy = def_bracket(&x, &y).unwrap();
            let yx = def_bracket(&y, &x).unwrap();
            assert!(xy.try_add(&yx.scale(&int(sign(a * b)))).unwrap().is_zero());
            // [x,[y,z]] = [[x,y],z] + (−1)^{ab}[y,[x,z]]
            let lhs = def_bracket(&x, &def_bracket(&y, &z).unwrap()).unwrap();
            let rhs = def_bracket(&xy, &z)
                .unwrap()
                .try_add(&def_bracket(&y, &def_bracket(&x, &z).unwrap()).unwrap().scale(&int(sign(a * b))))
                .unwrap();
            if lhs.degree() >= -1 {
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn bracket_matches_double_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let pres = corpus::aff_r();
    let g = pres.gens();
    let x = DefCochain::new(random_derivation(g, 0, 0, 0.7, &mut rng));
    let xx = def_bracket(&x, &x).unwrap();
    for k in 0..=2 {
        for w in 0..=2 {
            let a = random_element(g, k, w, &mut rng);
            let twice = x.apply(&x.apply(&a).unwrap()).unwrap();
            assert_eq!(xx.apply(&a).unwrap(), &twice - &twice);
        }
    }
    let y = DefCochain::new(random_derivation(g, 1, 0, 0.7, &mut rng));
    let xy = def_bracket(&x, &y).unwrap();
    for w in 0..=2 {
        let a = random_element(g, 1, w, &mut rng);
        let direct = &x.apply(&y.apply(&a).unwrap()).unwrap() - &y.apply(&x.apply(&a).unwrap()).unwrap();
        assert_eq!(xy.apply(&a).unwrap(), direct);
    }
}

#[test]
fn pictures_round_trip_and_shuffle_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for pres in corpus::all() {
        let g = pres.gens();
        for k in 0..=2 {
            for w in 0..=1 {
                let x = DefCochain::new(random_derivation(g, k, w, 0.5, &mut rng));
                let c = to_multiderivation(&x, &pres).unwrap();
                assert_eq!(from_multiderivation(&c, &pres).unwrap(), x);
                let again = to_multiderivation(&from_multiderivation(&c, &pres).unwrap(), &pres).unwrap();
                assert!(again.same_tables(&c));
                for l in 0..=2 {
                    for ww in 0..=2 {
                        let omega = random_element(g, l, ww, &mut rng);
                        assert_eq!(shuffle_evaluate(&c, &omega), x.apply(&omega).unwrap(), "{} k={k} l={l}", pres.name());
                    }
                }
            }
        }
    }
}

#[test]
fn two_delta_implementations_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for pres in corpus::all() {
        let cx = build_differential(&pres).unwrap();
        let g = pres.gens();
        for k in 0..=1 {
            for w in 0..=1 {
                for _ in 0..3 {
                    let x = DefCochain::new(random_derivation(g, k, w, 0.5, &mut rng));
                    let c = to_multiderivation(&x, &pres).unwrap();
                    let via_derivations = to_multiderivation(&def_delta(&x, &cx).unwrap(), &pres).unwrap();
                    let direct = delta_multiderivation(&c, &pres).unwrap();
                    assert!(direct.same_tables(&via_derivations), "{} k={k} w={w}", pres.name());
                }
            }
        }
    }
}

#[test]
fn mc_equivalence_small_cases() {
    // Exhaustive over dimension 2; the full dimension-3 sweep is in the
    // acceptance suite.
    let pres = corpus::abelian(2);
    for v0 in -1..=1 {
        for v1 in -1..=1 {
            let c = Multiderivation::from_entries(
                &pres,
                2,
                &[(vec![0, 1], 0, pres.constant(int(v0))), (vec![0, 1], 1, pres.constant(int(v1)))],
                &[],
            )
            .unwrap();
            let mc = mc_defect(&c, &pres).unwrap().is_mc;
            assert!(mc);
            assert_eq!(validate(&deform(&pres, &c).unwrap()).unwrap().passed, mc);
        }
    }
}

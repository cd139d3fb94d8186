use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use std::cmp::Ordering;
use toriclab::mmp::{enumerate_runs, mmp_run, Strategy as Pick};
use toriclab::random;
use toriclab::rat::{rat, Rat};
use toriclab::stringy::*;
use toriclab::toric::fixtures::*;
use toriclab::toric::*;
use toriclab::ToricError;

fn poly(c: &[i64]) -> FracPowerRationalFunction {
    FracPowerRationalFunction::polynomial(c)
}

fn with_coeffs(f: Fan, b: &[(usize, Rat)]) -> ToricPair {
    let mut c = vec![Rat::zero(); f.rays.len()];
    for (i, x) in b {
        c[*i] = x.clone();
    }
    ToricPair::from_fan(f, c, Mode::Subpair, true).unwrap()
}

#[test]
fn small_examples() {
    assert_eq!(stringy_e(&pair0(projective_space(1))).unwrap(), poly(&[1, 1]));
    assert_eq!(stringy_e(&pair0(projective_space(2))).unwrap(), poly(&[1, 1, 1]));
    let half = stringy_e(&with_coeffs(projective_space(2), &[(0, rat(1, 2))])).unwrap();
    let expect = FracPowerRationalFunction::new(2, [1, 1, 1, 1, 1].iter().map(|&x| BigInt::from(x)).collect(), vec![BigInt::from(1)]).unwrap();
    assert_eq!(half, expect);
    assert_eq!(half.display(), "t^2 + t^(3/2) + t + t^(1/2) + 1");
}

// the A_1 quotient P(1,1,2): crepant resolution is F_2, so E_st = (t+1)^2
#[test]
fn crepant_resolution_of_weighted_plane() {
    assert_eq!(stringy_e(&pair0(p112())).unwrap(), poly(&[1, 2, 1]));
}

// a single ray with A = 2/3 on P^1: (t-1) + 1 + (t-1)/(t^(2/3)-1), checked numerically
#[test]
fn numeric_spot_check() {
    let p = with_coeffs(projective_space(1), &[(0, rat(1, 3))]);
    let e = stringy_e(&p).unwrap();
    for t in [2.0f64, 7.5, 40.0] {
        let expect = (t - 1.0) + 1.0 + (t - 1.0) / (t.powf(2.0 / 3.0) - 1.0);
        assert!((e.eval_f64(t) - expect).abs() < 1e-9 * expect);
    }
    assert!(e.value_at_one().is_some());
}

#[test]
fn negative_coefficients() {
    let p = with_coeffs(projective_space(2), &[(0, rat(-1, 2))]);
    let e = stringy_e(&p).unwrap();
    // A = 3/2 shrinks the boundary factor below 1
    assert_eq!(asymptotic_compare(&e, &poly(&[1, 1, 1])), Ordering::Less);
}

#[test]
fn smooth_specialization_is_poincare() {
    for f in [blowup_p2_twice(), hirzebruch(3), product(&projective_space(2), &projective_space(1))] {
        let p = pair0(f);
        let b: Vec<i64> = even_betti(&p).iter().map(|&x| x as i64).collect();
        assert_eq!(stringy_e(&p).unwrap(), poly(&b));
    }
}

#[test]
fn serde_round_trip() {
    let half = stringy_e(&with_coeffs(projective_space(2), &[(0, rat(1, 3))])).unwrap();
    let s = serde_json::to_string(&half).unwrap();
    let back: FracPowerRationalFunction = serde_json::from_str(&s).unwrap();
    assert_eq!(back, half);
}

#[test]
fn blowup_run_decreases() {
    let run = (0..4).map(|k| mmp_run(&pair0(blowup_p2()), Pick::Index(k), 10).unwrap()).find(|r| r.birational_steps() == 1).unwrap();
    let r = verify_no_loop(&run).unwrap();
    assert!(r.pass);
    assert_eq!(r.values.len(), 2);
    let run = mmp_run(&pair0(projective_space(2)), Pick::First, 10).unwrap();
    assert!(verify_no_loop(&run).unwrap().pass);
    let p = pair0(blowup_p2());
    let q = pair0(projective_space(2));
    let r = verify_no_loop_pairs(&[p.clone(), q, p]).unwrap();
    assert!(!r.pass);
    assert_eq!(r.duplicates, vec![(0, 2)]);
}

#[test]
fn boundary_one_is_rejected() {
    let f = projective_space(1);
    // coefficient 1 cannot even be built as a pair
    assert!(ToricPair::from_fan(f, vec![Rat::from_integer(1.into()), Rat::zero()], Mode::Subpair, true).is_err());
    let _ = ToricError::WrongMode;
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn independent_of_resolution(seed in 0u64..100_000, three in proptest::bool::ANY) {
        let mut r = random::rng(seed);
        let f = if three { random::threefold_fan(&mut r, 2) } else { random::surface_fan(&mut r, 3) };
        let p = random::pair_on(&mut r, f, &random::COEFF_LEVELS);
        let a = stringy_e_with(&p, ResolutionChoice::First).unwrap();
        let b = stringy_e_with(&p, ResolutionChoice::Random(seed)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.value_at_one().is_some());
    }

    #[test]
    fn decreases_along_enumerations(seed in 0u64..100_000, three in proptest::bool::ANY) {
        let mut r = random::rng(seed);
        let f = if three { random::threefold_fan(&mut r, 2) } else { random::surface_fan(&mut r, 3) };
        let p = random::pair_on(&mut r, f, &random::COEFF_LEVELS);
        let e = enumerate_runs(&p, 10_000, 100).unwrap();
        let vals: Vec<_> = e.pairs.iter().map(|q| stringy_e(q).unwrap()).collect();
        for (a, _, b) in &e.edges {
            if let Some(b) = b {
                prop_assert_eq!(asymptotic_compare(&vals[*a], &vals[*b]), Ordering::Greater);
            }
        }
    }
}

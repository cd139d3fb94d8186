use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;
use toriclab::mmp::*;
use toriclab::mmp::Strategy as Pick;
use toriclab::random;
use toriclab::rat::Rat;
use toriclab::toric::fixtures::*;
use toriclab::toric::*;
use toriclab::ToricError;

fn relative(f: Fan) -> ToricPair {
    let k = f.rays.len();
    ToricPair::from_fan(f, vec![Rat::zero(); k], Mode::Pair, false).unwrap()
}

fn a2_blowup() -> ToricPair {
    let f = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]);
    relative(f.star_subdivide(&[1, 1]).unwrap())
}

#[test]
fn walls_of_small_surfaces() {
    let w = mori_walls(&pair0(blowup_p2())).unwrap();
    assert!(w.iter().any(|x| x.kind == WallKind::Divisorial && x.degree < Rat::zero()));
    let p1p1 = pair0(product(&projective_space(1), &projective_space(1)));
    let w = mori_walls(&p1p1).unwrap();
    assert!(!w.is_empty());
    assert!(w.iter().all(|x| x.kind == WallKind::Fibering));
}

#[test]
fn o_minus1_minus2_table() {
    for (m, n) in [(1, 2), (1, 4), (2, 4), (2, 6), (1, 3)] {
        let p = relative(o_minus1_minus2(m, n, false));
        let (walls, classes) = wall_classes(&p).unwrap();
        assert_eq!(classes.len(), 1, "{m} {n}");
        let c = &classes[0];
        assert_eq!(c.kind, WallKind::Flipping);
        let sign = (2 * m as i64 + 2) - (n as i64 + 1);
        if sign == 0 {
            assert!(c.degree.is_zero());
            assert!(walls.iter().all(|w| w.flop));
            assert!(matches!(mmp_step(&p, c), Err(ToricError::ZeroDegree)));
        } else if 2 * m + 1 < n {
            assert!(c.degree < Rat::zero(), "{m} {n}");
            let s = mmp_step(&p, c).unwrap();
            assert_eq!(s.kind, StepKind::Flip);
            let after = s.after.unwrap();
            assert_eq!(canonical_form(&after), canonical_form(&relative(o_minus1_minus2(m, n, true))));
            let (_, back) = wall_classes(&after).unwrap();
            assert!(back.iter().all(|c| c.degree > Rat::zero()));
        } else {
            assert!(c.degree > Rat::zero(), "{m} {n}");
            assert!(matches!(mmp_step(&p, c), Err(ToricError::PositiveDegree)));
        }
    }
}

#[test]
fn divisorial_step_to_plane() {
    let p = pair0(blowup_p2());
    let nc = negative_classes(&p).unwrap();
    let s = nc.iter().map(|c| mmp_step(&p, c).unwrap()).find(|s| s.kind == StepKind::Divisorial).unwrap();
    assert_eq!(s.contracted.as_ref().unwrap().1, vec![1, 1]);
    assert_eq!(canonical_form(s.after.as_ref().unwrap()), canonical_form(&pair0(projective_space(2))));
}

#[test]
fn plane_is_a_fiber_space() {
    let p = pair0(projective_space(2));
    let nc = negative_classes(&p).unwrap();
    assert_eq!(nc.len(), 1);
    assert_eq!(mmp_step(&p, &nc[0]).unwrap().kind, StepKind::MoriFiberSpace);
    let r = mmp_run(&p, Pick::First, 10).unwrap();
    assert_eq!(r.outcome, Outcome::MoriFiberSpace);
    assert_eq!(r.birational_steps(), 0);
}

#[test]
fn run_on_blowup() {
    let r = mmp_run(&pair0(blowup_p2()), Pick::Index(0), 10).unwrap();
    assert_eq!(r.outcome, Outcome::MoriFiberSpace);
    assert!(r.birational_steps() <= 1);
    let e = enumerate_runs(&pair0(blowup_p2()), 1000, 1000).unwrap();
    assert!(e.runs.iter().any(|x| x.birational_steps() == 1));
    assert!(e.runs.iter().all(|x| x.outcome == Outcome::MoriFiberSpace));
}

#[test]
fn runs_are_deterministic() {
    let mut r = random::rng(5);
    let f = random::surface_fan(&mut r, 3);
        let p = random::pair_on(&mut r, f, &random::COEFF_LEVELS);
    for s in [Pick::First, Pick::Random(9)] {
        let a = serde_json::to_string(&mmp_run(&p, s.clone(), 100).unwrap()).unwrap();
        let b = serde_json::to_string(&mmp_run(&p, s, 100).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn relative_runs_reach_minimal_models() {
    let r = mmp_run(&a2_blowup(), Pick::First, 10).unwrap();
    assert_eq!(r.outcome, Outcome::MinimalModel);
    assert_eq!(r.birational_steps(), 1);
    assert_eq!(r.last.rays().len(), 2);
    let q = relative(o_minus1_minus2(1, 2, true));
    let r = mmp_run(&q, Pick::First, 10).unwrap();
    assert_eq!(r.outcome, Outcome::MinimalModel);
    assert_eq!(r.steps[0].kind, StepKind::Flip);
}

#[test]
fn enumeration_small_cases() {
    let e = enumerate_runs(&pair0(projective_space(2)), 100, 100).unwrap();
    assert_eq!(e.run_count, 1);
    let e = enumerate_runs(&pair0(blowup_p2_twice()), 1000, 1000).unwrap();
    assert!(e.run_count >= 2);
    assert!(e.runs.iter().all(|r| r.birational_steps() <= 2));
    assert_eq!(e.max_birational_steps, 2);
    assert!(matches!(enumerate_runs(&pair0(blowup_p2()), 0, 10), Err(ToricError::BudgetExceeded(_))));
}

#[test]
fn budget_exceeded_run_keeps_partial_steps() {
    match mmp_run(&pair0(blowup_p2_twice()), Pick::First, 1) {
        Err(RunError::BudgetExceeded(r)) => {
            assert_eq!(r.steps.len(), 1);
            assert_eq!(r.outcome, Outcome::BudgetExceeded);
        }
        other => panic!("{other:?}"),
    }
}

fn probes<R: Rng>(r: &mut R, n: usize, k: usize) -> Vec<Vec<i64>> {
    (0..k).map(|_| (0..n).map(|_| r.gen_range(-6..=6)).collect()).filter(|v: &Vec<i64>| v.iter().any(|x| *x != 0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn steps_do_not_decrease_discrepancies(seed in 0u64..10_000, three in proptest::bool::ANY) {
        let mut r = random::rng(seed);
        let f = if three { random::threefold_fan(&mut r, 2) } else { random::surface_fan(&mut r, 3) };
        let p = random::pair_on(&mut r, f, &random::COEFF_LEVELS);
        let nc = negative_classes(&p).unwrap();
        for c in nc.iter().filter(|c| c.kind != WallKind::Fibering) {
            let s = mmp_step(&p, c).unwrap();
            let q = s.after.as_ref().unwrap();
            let mut vs = probes(&mut r, p.rank(), 50);
            // the exceptional locus must be probed
            vs.push(c.negative_part().iter().fold(vec![0i64; p.rank()], |acc, &i| acc.iter().zip(&p.rays()[i]).map(|(a, b)| a + b).collect()));
            let mut strict = false;
            for v in &vs {
                let a = p.evaluate(v).unwrap();
                let b = q.evaluate(v).unwrap();
                prop_assert!(b >= a, "{v:?}");
                strict |= b > a;
            }
            prop_assert!(strict);
            if s.kind == StepKind::Divisorial {
                prop_assert_eq!(q.rays().len() + 1, p.rays().len());
            } else {
                // flipping back restores the fan
                let neg: Vec<i64> = c.relation.iter().map(|x| -x).collect();
                let (back, removed) = contract_fan(q.fan(), &neg).unwrap();
                prop_assert!(removed.is_none());
                let q2 = ToricPair::from_fan(back, p.coeffs().to_vec(), Mode::Pair, true).unwrap();
                prop_assert_eq!(canonical_form(&q2), canonical_form(&p));
            }
        }
    }

    #[test]
    fn random_enumerations_terminate(seed in 0u64..10_000) {
        let mut r = random::rng(seed);
        let f = random::surface_fan(&mut r, 3);
        let p = random::pair_on(&mut r, f, &random::COEFF_LEVELS);
        let e = enumerate_runs(&p, 10_000, 1000).unwrap();
        prop_assert!(e.run_count >= 1);
        prop_assert!(e.runs.iter().all(|r| r.outcome == Outcome::MoriFiberSpace));
        prop_assert!(e.max_birational_steps < p.rays().len());
    }
}

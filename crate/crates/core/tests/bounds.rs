use num_bigint::BigInt;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use proptest::prelude::*;
use toriclab::bounds::*;
use toriclab::mmp::{mmp_run, Outcome, Strategy as Pick};
use toriclab::rat::{rat, to_f64, Rat};
use toriclab::toric::fixtures::*;
use toriclab::toric::*;
use toriclab::ToricError;

fn exact_factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

// independent: sum of log10 k in f64
fn log10_fact_f64(n: u64) -> f64 {
    (1..=n).map(|k| (k as f64).log10()).sum()
}

fn params() -> BoundParams {
    BoundParams::default()
}

fn exact(r: &BoundReport) -> BigInt {
    r.value.as_exact().expect("exact value").clone()
}

#[test]
fn terminal_bound_from_coefficients() {
    let p = BoundParams { b: vec![rat(1, 2)], rho_d: Some(5), ..params() };
    let r = explicit_bound("cor_terminal", &p).unwrap();
    // S = {0, 1/2, 1}, M = (2 + 2*2)*3 = 18, 18^4 * 5
    assert_eq!(exact(&r), BigInt::from(524880));
    let p0 = BoundParams { rho_d: Some(1), ..params() };
    assert_eq!(exact(&explicit_bound("cor_terminal", &p0).unwrap()), BigInt::from(36));
}

#[test]
fn index_bound_examples() {
    let p = BoundParams { n: Some(2), big_n: Some(1), ..params() };
    let r = explicit_bound("cor_index_big_boundary", &p).unwrap();
    assert_eq!(exact(&r), BigInt::from(24));
    let p = BoundParams { n: Some(2), big_n: Some(2), ..params() };
    // (4 * 32)! = 128!
    assert_eq!(exact(&explicit_bound("cor_index_big_canonical", &p).unwrap()), exact_factorial(128));
}

#[test]
fn fourfold_n1() {
    let r = explicit_bound("thm_4fold", &BoundParams { big_n: Some(1), ..params() }).unwrap();
    let m = r.intermediates.iter().find(|(k, _)| k == "M").unwrap().1.clone();
    let m_exact = m.as_exact().unwrap().clone();
    assert_eq!(m_exact, exact_factorial(512));
    let lm = log10_fact_f64(512);
    assert!((lm - 1166.5412).abs() < 1e-3, "{lm}");
    let (lo, hi) = r.value.log10();
    // log10(M^M) = M log10 M
    let target = Rat::from_integer(m_exact) * <Rat as FromPrimitive>::from_f64(lm).unwrap();
    assert!((to_f64(&(&lo / &target)) - 1.0).abs() < 1e-9);
    assert!((to_f64(&(&hi / &target)) - 1.0).abs() < 1e-9);
    assert!(matches!(r.value, BigMagnitude::Log10 { .. }));
}

#[test]
fn stirling_matches_exact_512() {
    let (slo, shi) = log10_factorial_stirling(&BigInt::from(512));
    let (elo, ehi) = log10_bracket(&exact_factorial(512));
    assert!(slo <= ehi && elo <= shi);
    let rel = to_f64(&(&shi - &slo)) / to_f64(&slo);
    assert!(rel < 1e-9, "{rel}");
    let digits = digit_count(&exact_factorial(512));
    assert_eq!(digits, 1167);
    assert!((to_f64(&elo) - log10_fact_f64(512)).abs() < 1e-9);
}

#[test]
fn threefold_n1() {
    let r = explicit_bound("thm_3fold", &BoundParams { big_n: Some(1), ..params() }).unwrap();
    let m = r.intermediates.iter().find(|(k, _)| k == "M").unwrap().1.clone();
    assert_eq!(m.as_exact().unwrap(), &BigInt::from(36));
    let f36 = exact_factorial(36).to_f64().unwrap();
    let target = 3f64.log10() + 8.0 * (f36 + 1.0) * log10_fact_f64(36);
    let (lo, hi) = r.value.log10();
    assert!((to_f64(&lo) / target - 1.0).abs() < 1e-9);
    assert!((to_f64(&hi) / target - 1.0).abs() < 1e-9);
    // the next tower no longer fits
    let e = explicit_bound("thm_3fold", &BoundParams { big_n: Some(2), ..params() });
    assert!(matches!(e, Err(ToricError::Unrepresentable(_))));
}

#[test]
fn small_formulas() {
    let p = BoundParams { e_plus: Some(0), eps: Some(Rat::one()), ..params() };
    assert_eq!(exact(&explicit_bound("cor_index_3fold", &p).unwrap()), BigInt::from(36));
    let p = BoundParams { e_plus: Some(1), eps: Some(rat(1, 2)), ..params() };
    // ceil(8)! ^ 4
    assert_eq!(exact(&explicit_bound("cor_index_3fold", &p).unwrap()), BigInt::from(40320).pow(4));
    let p = BoundParams { q: Some(2), e_plus: Some(0), s: Some(1), ..params() };
    assert_eq!(exact(&explicit_bound("lem_fix_discrep", &p).unwrap()), BigInt::from(18).pow(6));
    let p = BoundParams { b: vec![rat(1, 2)], e_plus: Some(0), s: Some(2), ..params() };
    assert_eq!(exact(&explicit_bound("lem_fix_discrep", &p).unwrap()), BigInt::from(18).pow(6) * 2);
    let p = BoundParams { n: Some(2), big_n: Some(2), ..params() };
    assert_eq!(exact(&explicit_bound("lem_log_smooth_e", &p).unwrap()), BigInt::from(8));
    assert_eq!(exact(&explicit_bound("lem_log_smooth_s", &p).unwrap()), BigInt::from(384));
}

#[test]
fn errors() {
    assert!(matches!(explicit_bound("nope", &params()), Err(ToricError::UnknownFormula(_))));
    let p = BoundParams { e_plus: Some(0), eps: Some(Rat::zero()), ..params() };
    assert!(matches!(explicit_bound("cor_index_3fold", &p), Err(ToricError::DomainError(_))));
    assert!(matches!(explicit_bound("thm_4fold", &params()), Err(ToricError::DomainError(_))));
    let big = explicit_bound("thm_4fold", &BoundParams { big_n: Some(2), ..params() });
    assert!(matches!(big, Err(ToricError::Unrepresentable(_))));
}

#[test]
fn serialization_shapes() {
    let r = explicit_bound("cor_index_big_boundary", &BoundParams { n: Some(2), big_n: Some(1), ..params() }).unwrap();
    let v = serde_json::to_value(&r.value).unwrap();
    assert_eq!(v["exact"], "24");
    let r = explicit_bound("thm_4fold", &BoundParams { big_n: Some(1), ..params() }).unwrap();
    let v = serde_json::to_value(&r.value).unwrap();
    assert!(v["log10"].as_str().unwrap().len() > 30);
    assert!(v.get("err").is_some());
}

#[test]
fn plane_volume_bounds() {
    let p = ToricPair::from_fan(projective_space(2), vec![rat(1, 2); 3], Mode::Pair, true).unwrap();
    let h = vec![Rat::one(), Rat::zero(), Rat::zero()];
    let r = verify_volume_bounds(&p, &h, 1e-6).unwrap();
    assert_eq!(r.lc_volume_lower_bound, rat(1, 4));
    assert!(r.points.iter().all(|x| (x.nvol - 4.0).abs() < 1e-4));
    assert!(r.pass);
    let z = pair0(projective_space(2));
    assert!(matches!(verify_volume_bounds(&z, &h, 1e-6), Err(ToricError::NotBig)));
    let zero_h = vec![Rat::zero(); 3];
    assert!(matches!(verify_volume_bounds(&p, &zero_h, 1e-6), Err(ToricError::NotAmple)));
}

#[test]
fn weighted_plane_index() {
    let p = ToricPair::from_fan(p112(), vec![rat(1, 2), rat(1, 2), Rat::zero()], Mode::Pair, true).unwrap();
    let h = vec![Rat::zero(), Rat::zero(), Rat::one()];
    let r = verify_volume_bounds(&p, &h, 1e-6).unwrap();
    assert!(r.pass, "{r:?}");
    let singular = r.points.iter().find(|x| x.indices.iter().any(|(_, i)| i == "2")).expect("index 2 point");
    assert!(2.0 <= 4.0 / singular.nvol_with_boundary);
}

#[test]
fn run_length_below_terminal_bound() {
    let p = pair0(blowup_p2());
    let run = mmp_run(&p, Pick::First, 100).unwrap();
    assert!(matches!(run.outcome, Outcome::MoriFiberSpace { .. }) || run.steps.len() <= 1);
    let b = explicit_bound("cor_terminal", &BoundParams { rho_d: Some(2), ..params() }).unwrap();
    assert!(run_within_bound(run.steps.len(), &b.value));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stirling_brackets_exact(n in 1u64..1500) {
        let (slo, shi) = log10_factorial_stirling(&BigInt::from(n));
        let (elo, ehi) = log10_bracket(&exact_factorial(n));
        prop_assert!(slo <= ehi && elo <= shi);
    }

    #[test]
    fn compare_is_consistent(a in 1u64..1_000_000, b in 1u64..1_000_000) {
        let (lo, hi) = log10_bracket(&BigInt::from(a));
        let m = BigMagnitude::Log10 { lo, hi };
        let c = m.compare_int(&BigInt::from(b));
        match c {
            Comparison::Less => prop_assert!(a < b),
            Comparison::Greater => prop_assert!(a > b),
            Comparison::Equal => prop_assert!(a == b),
            Comparison::Incomparable => prop_assert!(a == b),
        }
    }

    #[test]
    fn pow_agrees_with_log(a in 2u64..50, e in 0u64..40) {
        let x = BigMagnitude::Exact(BigInt::from(a)).pow(&BigInt::from(e)).unwrap();
        prop_assert_eq!(x.as_exact().unwrap(), &BigInt::from(a).pow(e as u32));
        let (lo, hi) = x.log10();
        let t = e as f64 * (a as f64).log10();
        prop_assert!(to_f64(&lo) <= t + 1e-9 && to_f64(&hi) >= t - 1e-9);
    }
}

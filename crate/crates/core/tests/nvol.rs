use num_traits::{One, Zero};
use proptest::prelude::*;
use toriclab::geom::{polytope_volume, LatticePolytope, Normalization};
use toriclab::nvol::*;
use toriclab::random;
use toriclab::rat::{rat, ri, rvec, to_f64, Rat};
use toriclab::toric::fixtures::*;
use toriclab::toric::*;

const TOL: f64 = 1e-6;

fn sing(rays: Vec<Vec<i64>>) -> ConeSingularity {
    let n = rays[0].len();
    let k = rays.len();
    ConeSingularity::new(n, rays, vec![Rat::zero(); k]).unwrap()
}

fn quadrant() -> ConeSingularity {
    sing(vec![vec![1, 0], vec![0, 1]])
}
fn a1() -> ConeSingularity {
    sing(vec![vec![1, 0], vec![1, 2]])
}
fn odp() -> ConeSingularity {
    sing(vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 1]])
}

// lattice-normalized volume of conv(0, w/<xi,w>) over the dual rays
fn polytope_oracle(s: &ConeSingularity, xi: &[Rat]) -> Rat {
    let n = s.rank();
    let mut pts = vec![vec![Rat::zero(); n]];
    for w in s.dual_rays() {
        let d: Rat = w.iter().zip(xi).map(|(a, b)| b * ri(*a)).sum();
        pts.push(w.iter().map(|&a| ri(a) / &d).collect());
    }
    polytope_volume(&LatticePolytope::new(pts).unwrap(), Normalization::Lattice)
}

#[test]
fn valuation_volume_examples() {
    assert_eq!(valuation_volume(&quadrant(), &rvec(&[1, 1])).unwrap(), ri(1));
    assert_eq!(valuation_volume(&quadrant(), &rvec(&[1, 2])).unwrap(), rat(1, 2));
    assert_eq!(valuation_volume(&a1(), &rvec(&[1, 1])).unwrap(), ri(2));
    assert_eq!(polytope_oracle(&quadrant(), &rvec(&[1, 2])), rat(1, 2));
    assert_eq!(polytope_oracle(&a1(), &rvec(&[1, 1])), ri(2));
    assert!(valuation_volume(&quadrant(), &rvec(&[1, 0])).is_err());
}

#[test]
fn normalized_volume_examples() {
    assert_eq!(normalized_volume(&quadrant(), &rvec(&[1, 1])).unwrap(), ri(4));
    assert_eq!(normalized_volume(&quadrant(), &rvec(&[1, 2])).unwrap(), rat(9, 2));
    assert_eq!(normalized_volume(&a1(), &rvec(&[1, 1])).unwrap(), ri(2));
}

#[test]
fn smooth_minimum() {
    for (n, want) in [(2usize, 4.0), (3, 27.0), (4, 256.0)] {
        let r = minimize_nvol(&ConeSingularity::smooth(n), TOL).unwrap();
        assert!((r.value - want).abs() <= want * TOL, "n={n}: {}", r.value);
        assert!(r.grid_certificate <= r.exact);
        assert_eq!(normalized_volume(&ConeSingularity::smooth(n), &r.minimizer).unwrap(), r.exact);
    }
}

// dense grid on the slice A = 1, volumes from the polytope oracle
#[test]
fn a1_and_odp_minimum() {
    let s = a1();
    let r = minimize_nvol(&s, TOL).unwrap();
    let oracle = (1..200).map(|k| polytope_oracle(&s, &[ri(1), rat(k, 100)])).min().unwrap();
    assert_eq!(oracle, ri(2));
    assert!((r.value - 2.0).abs() <= 2.0 * TOL);
    let s = odp();
    let r = minimize_nvol(&s, TOL).unwrap();
    let mut oracle: Option<Rat> = None;
    for i in 1..16 {
        for j in 1..16 {
            let v = polytope_oracle(&s, &[rat(i, 16), rat(j, 16), ri(1)]);
            if oracle.as_ref().is_none_or(|o| v < *o) {
                oracle = Some(v);
            }
        }
    }
    assert_eq!(oracle.unwrap(), ri(16));
    assert!((r.value - 16.0).abs() <= 16.0 * TOL, "{}", r.value);
    assert!(to_f64(&r.grid_certificate) <= r.value);
}

#[test]
fn minimization_is_deterministic() {
    let s = sing(vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 2, 5]]);
    let a = minimize_nvol(&s, TOL).unwrap();
    let b = minimize_nvol(&s, TOL).unwrap();
    assert_eq!(a.exact, b.exact);
    assert_eq!(a.minimizer, b.minimizer);
}

#[test]
fn atiyah_flop_volumes_differ() {
    let rays = vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 1]];
    let z = vec![Rat::zero(); 4];
    let x1 = ToricPair::new_relative(3, rays.clone(), vec![vec![0, 1, 3], vec![0, 2, 3]], z.clone(), Mode::Pair).unwrap();
    let x2 = ToricPair::new_relative(3, rays, vec![vec![0, 1, 2], vec![1, 2, 3]], z, Mode::Pair).unwrap();
    let xi = [3, 1, 5];
    let germ_at = |p: &ToricPair| {
        let (c, _) = p.locate(&xi).unwrap();
        ConeSingularity::from_pair_cone(p, c).unwrap()
    };
    let v1 = normalized_volume(&germ_at(&x1), &rvec(&xi)).unwrap();
    let v2 = normalized_volume(&germ_at(&x2), &rvec(&xi)).unwrap();
    assert_eq!(v1, rat(125, 4));
    assert_eq!(v2, rat(125, 3));
    // on the singular cone itself the value lies below both
    assert!(normalized_volume(&odp(), &rvec(&xi)).unwrap() < v1);
}

#[test]
fn relative_cone_examples() {
    let p1 = pair0(projective_space(1));
    let y = relative_cone(None, &p1, &[1, 1], 1).unwrap();
    assert_eq!(y.singularity.cone().rays(), &[vec![1, 1], vec![-1, 1]]);
    assert_eq!(y.a_e, ri(1));
    assert!(y.neg_e_is_pullback_of_l && y.k_plus_e_is_pullback_of_k);
    let r = minimize_nvol(&y.singularity, TOL).unwrap();
    assert!((r.value - 2.0).abs() < 2.0 * TOL);

    let p2 = pair0(projective_space(2));
    let y = relative_cone(None, &p2, &[1, 1, 1], 1).unwrap();
    assert_eq!(y.a_e, ri(1));
    let dets = toriclab::linalg::det_i64(y.singularity.rays());
    assert_eq!(dets.magnitude().clone(), 3u32.into());
    // 1/3(1,1,1): the lattice point (0,0,1) is the barycentre of the rays / 3
    assert_eq!(y.e, vec![0, 0, 1]);

    let y = relative_cone(None, &p1, &[2, 2], 2).unwrap();
    assert_eq!(y.singularity.cone().rays(), &[vec![1, 2], vec![-1, 2]]);
    assert_eq!(y.a_e, rat(1, 2));
    assert_eq!(y.a_e, y.lambda);
    assert!(y.neg_e_is_pullback_of_l && y.k_plus_e_is_pullback_of_k);
    // L not of the form -r(K + Delta)
    assert!(relative_cone(None, &p1, &[1, 2], 1).is_err());
    // degree 0 is not ample
    assert!(relative_cone(None, &p1, &[1, -1], 0).is_err());
}

#[test]
fn relative_cone_birational() {
    // blow-up of the plane at the origin over the affine plane, L = -(K) up to a principal divisor
    let z = germ(vec![vec![1, 0], vec![0, 1]], vec![Rat::zero(); 2]);
    let x = ToricPair::new_relative(2, vec![vec![1, 0], vec![0, 1], vec![1, 1]], vec![vec![0, 2], vec![1, 2]], vec![Rat::zero(); 3], Mode::Pair).unwrap();
    // -K = D0 + D1 + E ~ E - (D0 + D1) + ... ; take L = -K - div(x+y direction) = (0, 0, -1)
    let y = relative_cone(Some(&z), &x, &[0, 0, -1], 1).unwrap();
    assert!(y.birational);
    assert_eq!(y.a_e, y.lambda);
    assert!(y.neg_e_is_pullback_of_l && y.k_plus_e_is_pullback_of_k);
    assert_eq!(y.singularity.rays().len(), 4);
}

// nvol(Y) >= (explicit lower bound for the lc volume of H)/r
#[test]
fn cone_volume_chain() {
    let cases: Vec<(ToricPair, Vec<i64>, i64, Vec<Rat>)> = vec![
        (pair0(projective_space(1)), vec![1, 1], 1, vec![ri(1), ri(0)]),
        (pair0(projective_space(2)), vec![1, 1, 1], 1, vec![ri(1), ri(0), ri(0)]),
        (pair0(projective_space(1)), vec![2, 2], 2, vec![ri(1), ri(0)]),
        (
            ToricPair::from_fan(projective_space(1), vec![rat(1, 2), Rat::zero()], Mode::Pair, true).unwrap(),
            vec![1, 2],
            2,
            vec![ri(1), ri(0)],
        ),
    ];
    for (x, l, r, h) in cases {
        let y = relative_cone(None, &x, &l, r).unwrap();
        let nv = minimize_nvol(&y.singularity, TOL).unwrap();
        let minus_kd: Vec<Rat> = x.coeffs().iter().map(|b| Rat::one() - b).collect();
        let bound = lc_volume_lower_bound(&x, &minus_kd, &h).unwrap() / ri(r);
        assert!(nv.value >= to_f64(&bound) * (1.0 - TOL), "{} < {}", nv.value, bound);
    }
}

// index of every Weil divisor near a fixed point is at most n^n / vol
#[test]
fn cartier_index_bound() {
    let mut r = random::rng(7);
    for _ in 0..12 {
        let f = random::surface_fan(&mut r, 3);
        let p = random::pair_on(&mut r, f, &random::COEFF_LEVELS);
        for c in 0..p.cones().len() {
            let s = ConeSingularity::from_pair_cone(&p, c).unwrap();
            let nv = minimize_nvol(&s, TOL).unwrap();
            let idx = local_class_group_exponent(&p, c);
            let bound = 4.0 / (nv.value * (1.0 - TOL));
            assert!(idx.to_string().parse::<f64>().unwrap() <= bound + 1e-9, "index {idx} > {bound}");
        }
    }
}

fn random_sing(seed: u64) -> ConeSingularity {
    let mut r = random::rng(seed);
    let n = 2 + (seed % 2) as usize;
    let rays = random::simplicial_cone(&mut r, n, 3);
    let b = random::coeffs(&mut r, n, &random::COEFF_LEVELS);
    ConeSingularity::new(n, rays, b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn rescaling_invariance(seed in 0u64..u64::MAX, p in 1i64..9, q in 1i64..9) {
        let s = random_sing(seed);
        let xi: Vec<Rat> = s.rays().iter().fold(vec![Rat::zero(); s.rank()], |acc, v| acc.iter().zip(v).map(|(a, b)| a + ri(*b)).collect());
        let c = rat(p, q);
        let scaled: Vec<Rat> = xi.iter().map(|x| x * &c).collect();
        prop_assert_eq!(normalized_volume(&s, &xi).unwrap(), normalized_volume(&s, &scaled).unwrap());
        prop_assert_eq!(valuation_volume(&s, &xi).unwrap(), polytope_oracle(&s, &xi));
    }

    #[test]
    fn minimizer_beats_probes(seed in 0u64..u64::MAX) {
        use rand::Rng;
        let s = random_sing(seed);
        let res = minimize_nvol(&s, TOL).unwrap();
        prop_assert!(res.grid_certificate <= res.exact);
        prop_assert_eq!(s.log_discrepancy(&res.minimizer), Rat::one());
        let mut r = random::rng(seed ^ 0x5eed);
        for _ in 0..100 {
            let mut xi = vec![Rat::zero(); s.rank()];
            for v in s.rays() {
                let w = rat(r.gen_range(1..50), 7);
                for (x, y) in xi.iter_mut().zip(v) {
                    *x += &w * ri(*y);
                }
            }
            let v = to_f64(&normalized_volume(&s, &xi).unwrap());
            prop_assert!(res.value <= v * (1.0 + TOL));
        }
    }
}

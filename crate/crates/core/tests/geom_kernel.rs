use proptest::prelude::*;
use toriclab::geom::{dual_cone, enumerate_lattice_points, polytope_volume, Cone, LatticePolytope, Normalization, RatVec};
use toriclab::lp::{feasible_point, Constraint, Rel};
use toriclab::rat::{rat, ri, rvec};

fn set(mut v: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    v.sort();
    v
}

#[test]
fn dual_examples() {
    let q = Cone::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
    assert_eq!(set(dual_cone(&q).unwrap().rays().to_vec()), vec![vec![0, 1], vec![1, 0]]);
    let c = Cone::new(2, vec![vec![1, 0], vec![1, 2]]).unwrap();
    assert_eq!(set(dual_cone(&c).unwrap().rays().to_vec()), vec![vec![0, 1], vec![2, -1]]);
    let plane = Cone::new(2, vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]]).unwrap();
    assert!(dual_cone(&plane).unwrap().rays().is_empty());
}

#[test]
fn dual_rank_mismatch() {
    assert!(Cone::new(2, vec![vec![1, 0], vec![1, 2, 3]]).is_err());
}

#[test]
fn enumeration_examples() {
    let q = Cone::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
    let pts = enumerate_lattice_points(&q, &RatVec::new(rvec(&[1, 1])), &ri(2)).unwrap();
    assert_eq!(set(pts), set(vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]));
    assert_eq!(enumerate_lattice_points(&q, &RatVec::new(rvec(&[1, 3])), &ri(0)).unwrap(), vec![vec![0, 0]]);
    let c = Cone::new(2, vec![vec![1, 0], vec![1, 2]]).unwrap();
    let pts = enumerate_lattice_points(&c, &RatVec::new(rvec(&[1, 0])), &ri(1)).unwrap();
    assert_eq!(set(pts), set(vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![1, 2]]));
    assert!(enumerate_lattice_points(&q, &RatVec::new(rvec(&[1, 0])), &ri(1)).is_err());
}

#[test]
fn volume_examples() {
    let sq = LatticePolytope::new(vec![rvec(&[0, 0]), rvec(&[1, 0]), rvec(&[0, 1]), rvec(&[1, 1])]).unwrap();
    assert_eq!(polytope_volume(&sq, Normalization::Euclidean), ri(1));
    let t = LatticePolytope::new(vec![rvec(&[0, 0]), rvec(&[3, 0]), rvec(&[0, 3])]).unwrap();
    assert_eq!(polytope_volume(&t, Normalization::Euclidean), rat(9, 2));
    assert_eq!(polytope_volume(&t, Normalization::Lattice), ri(9));
    assert!(LatticePolytope::new(vec![rvec(&[0, 0]), rvec(&[1, 0, 0])]).is_err());
}

// membership in the dual described by inequalities, against membership in the cone
// spanned by the computed dual rays (decided by an LP)
fn in_span(rays: &[Vec<i64>], m: &[i64]) -> bool {
    let n = m.len();
    let k = rays.len();
    let cons: Vec<Constraint> = (0..n)
        .map(|j| Constraint::new((0..k).map(|i| ri(rays[i][j])).collect(), Rel::Eq, ri(m[j])))
        .collect();
    if k == 0 {
        return m.iter().all(|&x| x == 0);
    }
    feasible_point(k, false, &cons).is_some()
}

fn cone_strategy() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (2usize..=4, 0u64..u64::MAX).prop_map(|(n, seed)| {
        let mut r = toriclab::random::rng(seed);
        let k = n + (seed % 3) as usize;
        (n, toriclab::random::strongly_convex_cone(&mut r, n, k, 3))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn double_dual((n, rays) in cone_strategy()) {
        let c = Cone::new(n, rays).unwrap();
        prop_assume!(c.is_strongly_convex());
        let d = dual_cone(&c).unwrap();
        let dd = dual_cone(&d).unwrap();
        prop_assert!(dd.same_set(&c));
        for m in d.rays() {
            prop_assert!(c.rays().iter().all(|v| v.iter().zip(m).map(|(a, b)| a * b).sum::<i64>() >= 0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn dual_matches_halfspaces((n, rays) in cone_strategy(), probes in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 4), 10)) {
        let c = Cone::new(n, rays).unwrap();
        let d = dual_cone(&c).unwrap();
        for p in probes {
            let m = &p[..n];
            let by_ineq = c.rays().iter().all(|v| v.iter().zip(m).map(|(a, b)| a * b).sum::<i64>() >= 0);
            prop_assert_eq!(by_ineq, in_span(d.rays(), m));
        }
    }

    #[test]
    fn enumeration_matches_box_scan(seed in 0u64..u64::MAX, b in 0i64..6) {
        let mut r = toriclab::random::rng(seed);
        let n = 2 + (seed % 2) as usize;
        let rays = toriclab::random::simplicial_cone(&mut r, n, 3);
        let c = Cone::new(n, rays.clone()).unwrap();
        // ell = sum of dual rays is strictly positive on c
        let d = dual_cone(&c).unwrap();
        let ell: Vec<i64> = (0..n).map(|j| d.rays().iter().map(|m| m[j]).sum()).collect();
        let got = set(enumerate_lattice_points(&c, &RatVec::new(rvec(&ell)), &ri(b)).unwrap());
        let rmax = 3 * (b + 1) * 4;
        let mut want = Vec::new();
        let mut v = vec![-rmax; n];
        loop {
            let lv: i64 = v.iter().zip(&ell).map(|(a, e)| e * a).sum();
            if lv <= b && d.rays().iter().all(|m| m.iter().zip(&v).map(|(a, x)| a * x).sum::<i64>() >= 0) {
                want.push(v.clone());
            }
            let mut j = 0;
            while j < n && v[j] == rmax { v[j] = -rmax; j += 1; }
            if j == n { break; }
            v[j] += 1;
        }
        prop_assert_eq!(got, set(want));
    }
}

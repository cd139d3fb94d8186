//! Standard fans used in examples, tests and benchmarks.

use super::fan::Fan;
use super::pair::{Mode, ToricPair};
use crate::linalg::subsets;
use crate::rat::Rat;
use num_traits::Zero;

pub fn projective_space(n: usize) -> Fan {
    let mut rays: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1 } else { 0 }).collect()).collect();
    rays.push(vec![-1; n]);
    Fan::new(n, rays, subsets(n + 1, n))
}

pub fn product(a: &Fan, b: &Fan) -> Fan {
    let n = a.rank + b.rank;
    let mut rays = Vec::new();
    for r in &a.rays {
        let mut v = r.clone();
        v.extend(std::iter::repeat_n(0, b.rank));
        rays.push(v);
    }
    for r in &b.rays {
        let mut v = vec![0; a.rank];
        v.extend(r.iter().copied());
        rays.push(v);
    }
    let off = a.rays.len();
    let mut cones = Vec::new();
    for ca in &a.cones {
        for cb in &b.cones {
            let mut c = ca.clone();
            c.extend(cb.iter().map(|i| i + off));
            cones.push(c);
        }
    }
    Fan::new(n, rays, cones)
}

/// Hirzebruch surface F_a.
pub fn hirzebruch(a: i64) -> Fan {
    Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]], vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]])
}

/// Complete surface fan from rays listed in counterclockwise order.
pub fn surface_from_cyclic(rays: Vec<Vec<i64>>) -> Fan {
    let k = rays.len();
    let cones = (0..k).map(|i| vec![i, (i + 1) % k]).collect();
    Fan::new(2, rays, cones)
}

/// Blow-up of the projective plane at one torus-fixed point.
pub fn blowup_p2() -> Fan {
    projective_space(2).star_subdivide(&[1, 1]).expect("subdivision")
}

/// Blow-up of the projective plane at two torus-fixed points.
pub fn blowup_p2_twice() -> Fan {
    blowup_p2().star_subdivide(&[-1, 0]).expect("subdivision")
}

/// Weighted projective plane P(1,1,2).
pub fn p112() -> Fan {
    Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -2]], vec![vec![0, 1], vec![1, 2], vec![0, 2]])
}

/// Small modification of the cone over P^m x P^n embedded by O(1,2) containing all the
/// P^m-side rays in every maximal cone (the smooth one). With `other`, the opposite one.
/// Rays 0..=m come from the first factor, the rest from the second.
pub fn o_minus1_minus2(m: usize, n: usize, other: bool) -> Fan {
    let dim = m + n + 1;
    let mut rays = Vec::new();
    let mut u0 = vec![0i64; dim];
    for i in 0..m {
        u0[i] = -1;
    }
    u0[dim - 1] = 1;
    rays.push(u0);
    for i in 0..m {
        let mut e = vec![0i64; dim];
        e[i] = 1;
        rays.push(e);
    }
    let mut w0 = vec![0i64; dim];
    for j in 0..n {
        w0[m + j] = -1;
    }
    w0[dim - 1] = 2;
    rays.push(w0);
    for j in 0..n {
        let mut f = vec![0i64; dim];
        f[m + j] = 1;
        rays.push(f);
    }
    let all: Vec<usize> = (0..rays.len()).collect();
    let drop: Vec<usize> = if other { (0..=m).collect() } else { (m + 1..rays.len()).collect() };
    let cones = drop.iter().map(|d| all.iter().copied().filter(|x| x != d).collect()).collect();
    Fan::new(dim, rays, cones)
}

/// Pair with zero boundary on a complete fan.
pub fn pair0(f: Fan) -> ToricPair {
    let n = f.rays.len();
    ToricPair::from_fan(f, vec![Rat::zero(); n], Mode::Pair, true).expect("valid fixture")
}

/// Affine germ of a single full-dimensional simplicial cone.
pub fn germ(rays: Vec<Vec<i64>>, coeffs: Vec<Rat>) -> ToricPair {
    let n = rays[0].len();
    let k = rays.len();
    ToricPair::from_fan(Fan::new(n, rays, vec![(0..k).collect()]), coeffs, Mode::Pair, true).expect("valid germ")
}

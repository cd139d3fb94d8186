//! Seeded random instances: cones, surface and threefold fans, boundaries.

use crate::linalg::det_i64;
use crate::rat::{primitive, rat, Rat};
use crate::toric::fixtures::{hirzebruch, product, projective_space};
use crate::toric::{Fan, Mode, ToricPair};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Full-dimensional simplicial cone with entries in [-m, m].
pub fn simplicial_cone<R: Rng>(r: &mut R, rank: usize, m: i64) -> Vec<Vec<i64>> {
    loop {
        let rays: Vec<Vec<i64>> = (0..rank).map(|_| primitive(&(0..rank).map(|_| r.gen_range(-m..=m)).collect::<Vec<_>>())).collect();
        if rays.iter().any(|v| v.iter().all(|&x| x == 0)) {
            continue;
        }
        if !det_i64(&rays).is_zero() {
            return rays;
        }
    }
}

/// Strongly convex (not necessarily simplicial) cone of rank n with k rays in a random
/// open half-space.
pub fn strongly_convex_cone<R: Rng>(r: &mut R, rank: usize, k: usize, m: i64) -> Vec<Vec<i64>> {
    let ell: Vec<i64> = loop {
        let e: Vec<i64> = (0..rank).map(|_| r.gen_range(-2..=2)).collect();
        if e.iter().any(|&x| x != 0) {
            break e;
        }
    };
    let mut rays: Vec<Vec<i64>> = Vec::new();
    while rays.len() < k {
        let v: Vec<i64> = (0..rank).map(|_| r.gen_range(-m..=m)).collect();
        let s: i64 = v.iter().zip(&ell).map(|(a, b)| a * b).sum();
        if s > 0 {
            let v = primitive(&v);
            if !rays.contains(&v) {
                rays.push(v);
            }
        }
    }
    rays
}

pub const COEFF_LEVELS: [(i64, i64); 3] = [(0, 1), (1, 2), (2, 3)];

pub fn coeffs<R: Rng>(r: &mut R, k: usize, levels: &[(i64, i64)]) -> Vec<Rat> {
    (0..k)
        .map(|_| {
            let (p, q) = levels[r.gen_range(0..levels.len())];
            rat(p, q)
        })
        .collect()
}

/// Star subdivision of a random cone at a small positive combination of its rays.
pub fn random_subdivision<R: Rng>(r: &mut R, f: &Fan, maxw: i64) -> Fan {
    loop {
        let c = &f.cones[r.gen_range(0..f.cones.len())];
        let k = r.gen_range(2..=c.len());
        let mut idx = c.clone();
        idx.shuffle(r);
        let mut v = vec![0i64; f.rank];
        for &i in &idx[..k] {
            let w = r.gen_range(1..=maxw);
            for (x, y) in v.iter_mut().zip(&f.rays[i]) {
                *x += w * y;
            }
        }
        let v = primitive(&v);
        if v.iter().map(|x| x.abs()).max().unwrap_or(0) > 12 || f.rays.contains(&v) {
            continue;
        }
        if let Ok(g) = f.star_subdivide(&v) {
            return g;
        }
    }
}

/// Random projective simplicial surface fan: a Hirzebruch surface or the plane with
/// `steps` weighted blow-ups.
pub fn surface_fan<R: Rng>(r: &mut R, steps: usize) -> Fan {
    let mut f = match r.gen_range(0..3) {
        0 => projective_space(2),
        _ => hirzebruch(r.gen_range(0..3)),
    };
    for _ in 0..steps {
        f = random_subdivision(r, &f, 2);
    }
    f
}

/// Random projective simplicial threefold fan.
pub fn threefold_fan<R: Rng>(r: &mut R, steps: usize) -> Fan {
    let p1 = projective_space(1);
    let mut f = match r.gen_range(0..3) {
        0 => projective_space(3),
        1 => product(&projective_space(2), &p1),
        _ => product(&product(&p1, &p1), &p1),
    };
    for _ in 0..steps {
        f = random_subdivision(r, &f, 2);
    }
    f
}

pub fn pair_on<R: Rng>(r: &mut R, f: Fan, levels: &[(i64, i64)]) -> ToricPair {
    let k = f.rays.len();
    let b = coeffs(r, k, levels);
    ToricPair::from_fan(f, b, Mode::Pair, true).expect("random fan is valid")
}

pub fn zero_pair(f: Fan) -> ToricPair {
    let k = f.rays.len();
    ToricPair::from_fan(f, vec![Rat::zero(); k], Mode::Pair, true).expect("random fan is valid")
}

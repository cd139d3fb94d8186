//! Topological and numerical invariants of toric pairs.

use super::pair::ToricPair;
use crate::error::{Result, ToricError};
use crate::geom::{polytope_volume, LatticePolytope, Normalization};
use crate::linalg::{solve, subsets, to_rat};
use crate::rat::{dot_ri, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopologicalInvariants {
    pub rho: usize,
    /// (ray, Picard number of its orbit closure) for each boundary component
    pub rho_boundary: Vec<(usize, usize)>,
    /// b_0, b_2, ..., b_{2n}
    pub even_betti: Vec<u64>,
    pub h_alg_2n_minus_4: u64,
    #[serde(serialize_with = "crate::rat::serde_str::int")]
    pub gorenstein_index: BigInt,
    /// Cartier index of each ray divisor D_i
    #[serde(serialize_with = "crate::rat::serde_str::int_vec")]
    pub cartier_indices: Vec<BigInt>,
    pub rho_pair: usize,
}

fn binom(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let mut r: i128 = 1;
    for i in 0..k {
        r = r * (n - i) as i128 / (i + 1) as i128;
    }
    r
}

/// Even Betti numbers b_{2k} = h_k of a complete simplicial fan.
pub fn even_betti(p: &ToricPair) -> Vec<u64> {
    let n = p.rank();
    let mut f = vec![0i128; n + 1];
    for face in p.fan().faces() {
        f[face.len()] += 1;
    }
    (0..=n)
        .map(|k| {
            let h: i128 = (k..=n).map(|i| {
                let s = if (i - k) % 2 == 0 { 1 } else { -1 };
                s * binom(i, k) * f[n - i]
            }).sum();
            h as u64
        })
        .collect()
}

/// Picard number of the orbit closure of ray i (from its star fan).
pub fn rho_of_ray(p: &ToricPair, i: usize) -> usize {
    p.fan().star_rays(i).len() + 1 - p.rank()
}

/// Support-function vertex m_sigma for the divisor sum a_i D_i on cone c.
fn local_m(p: &ToricPair, a: &[Rat], c: usize) -> Vec<Rat> {
    let m = to_rat(&p.fan().cone_rays(c));
    let rhs: Vec<Rat> = p.cones()[c].iter().map(|&i| -a[i].clone()).collect();
    solve(&m, &rhs).expect("simplicial")
}

/// Smallest k with k * sum a_i D_i Cartier on the chart of cone c.
pub fn local_cartier_index(p: &ToricPair, a: &[Rat], c: usize) -> BigInt {
    local_m(p, a, c).iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
}

pub fn cartier_index(p: &ToricPair, a: &[Rat]) -> BigInt {
    (0..p.cones().len()).fold(BigInt::one(), |l, c| l.lcm(&local_cartier_index(p, a, c)))
}

/// Exponent of the local class group at cone c: the largest Cartier index of an invariant Weil divisor there.
pub fn local_class_group_exponent(p: &ToricPair, c: usize) -> BigInt {
    let n = p.rays().len();
    (0..n).fold(BigInt::one(), |l, i| {
        let mut a = vec![Rat::zero(); n];
        a[i] = Rat::one();
        l.lcm(&local_cartier_index(p, &a, c))
    })
}

pub fn topological_invariants(p: &ToricPair) -> Result<TopologicalInvariants> {
    if !p.is_complete() {
        return Err(ToricError::NotComplete("topological invariants need a complete fan".into()));
    }
    let n = p.rank();
    let nr = p.rays().len();
    let rho = nr - n;
    let rho_boundary: Vec<(usize, usize)> = (0..nr).filter(|&i| !p.coeffs()[i].is_zero()).map(|i| (i, rho_of_ray(p, i))).collect();
    let even_betti = even_betti(p);
    let h_alg = if n >= 2 { even_betti[n - 2] } else { 0 };
    let k: Vec<Rat> = vec![-Rat::one(); nr];
    let gorenstein_index = cartier_index(p, &k);
    let cartier_indices = (0..nr)
        .map(|i| {
            let mut a = vec![Rat::zero(); nr];
            a[i] = Rat::one();
            cartier_index(p, &a)
        })
        .collect();
    let rho_pair = rho + rho_boundary.iter().map(|x| x.1).sum::<usize>() + h_alg as usize;
    Ok(TopologicalInvariants { rho, rho_boundary, even_betti, h_alg_2n_minus_4: h_alg, gorenstein_index, cartier_indices, rho_pair })
}

/// Polytope {u : <u, v_i> >= -a_i}; None when empty.
pub fn divisor_polytope(p: &ToricPair, a: &[Rat]) -> Option<LatticePolytope> {
    let n = p.rank();
    let rays = p.rays();
    let mut pts: Vec<Vec<Rat>> = Vec::new();
    for sub in subsets(rays.len(), n) {
        let m: Vec<Vec<i64>> = sub.iter().map(|&i| rays[i].clone()).collect();
        let rhs: Vec<Rat> = sub.iter().map(|&i| -a[i].clone()).collect();
        let Some(u) = solve(&to_rat(&m), &rhs) else { continue };
        if rays.iter().enumerate().all(|(i, v)| dot_ri(&u, v) >= -a[i].clone()) && !pts.contains(&u) {
            pts.push(u);
        }
    }
    if pts.is_empty() {
        None
    } else {
        LatticePolytope::new(pts).ok()
    }
}

/// Volume of an invariant divisor class: lattice volume of its polytope (0 when not big).
pub fn divisor_volume(p: &ToricPair, a: &[Rat]) -> Rat {
    match divisor_polytope(p, a) {
        Some(poly) => polytope_volume(&poly, Normalization::Lattice),
        None => Rat::zero(),
    }
}

/// D_i . H^{n-1}: lattice volume of the facet of P_H dual to ray i.
pub fn ray_dot_power(p: &ToricPair, h: &[Rat], i: usize) -> Rat {
    let n = p.rank();
    if n == 1 {
        return Rat::one();
    }
    let Some(poly) = divisor_polytope(p, h) else { return Rat::zero() };
    let v = &p.rays()[i];
    let facet: Vec<&Vec<Rat>> = poly.vertices().iter().filter(|u| dot_ri(u, v) == -h[i].clone()).collect();
    let j = v.iter().position(|&x| x != 0).expect("nonzero ray");
    let proj: Vec<Vec<Rat>> = facet.iter().map(|u| u.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
    if proj.is_empty() {
        return Rat::zero();
    }
    let Ok(fp) = LatticePolytope::new(proj) else { return Rat::zero() };
    polytope_volume(&fp, Normalization::Lattice) / Rat::from_integer(BigInt::from(v[j].abs()))
}

pub fn divisor_dot_power(p: &ToricPair, d: &[Rat], h: &[Rat]) -> Rat {
    (0..p.rays().len()).filter(|&i| !d[i].is_zero()).fold(Rat::zero(), |acc, i| acc + &d[i] * ray_dot_power(p, h, i))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericalInvariants {
    #[serde(serialize_with = "crate::rat::serde_str::rat")]
    pub vol_delta: Rat,
    #[serde(serialize_with = "crate::rat::serde_str::rat")]
    pub vol_k_delta: Rat,
    #[serde(serialize_with = "crate::rat::serde_str::rat")]
    pub vol_h: Rat,
    #[serde(serialize_with = "crate::rat::serde_str::rat")]
    pub delta_dot_h: Rat,
    #[serde(serialize_with = "crate::rat::serde_str::rat")]
    pub max_coeff: Rat,
    /// ceil((Delta.H^{n-1})/(1 - max Coeff))^{-n} vol(Delta), when Delta is big
    #[serde(serialize_with = "crate::rat::serde_str::opt_rat")]
    pub lc_volume_lower_bound: Option<Rat>,
}

/// ceil((L.H^{n-1})/(1 - max Coeff(Delta)))^{-n} vol(L).
pub fn lc_volume_lower_bound(p: &ToricPair, l: &[Rat], h: &[Rat]) -> Option<Rat> {
    let vol = divisor_volume(p, l);
    if !vol.is_positive() {
        return None;
    }
    let max = p.coeffs().iter().max().cloned().unwrap_or_else(Rat::zero);
    let q = divisor_dot_power(p, l, h) / (Rat::one() - max);
    let c = q.ceil();
    if !c.is_positive() {
        return None;
    }
    Some(vol / num_traits::pow(c, p.rank()))
}

pub fn numerical_invariants(p: &ToricPair, h: &[Rat]) -> Result<NumericalInvariants> {
    p.require_projective()?;
    if !p.is_complete() {
        return Err(ToricError::NotComplete("numerical invariants need a complete fan".into()));
    }
    if !p.is_ample(h) {
        return Err(ToricError::NotAmple);
    }
    let delta = p.coeffs().to_vec();
    let kd = p.canonical_coeffs();
    Ok(NumericalInvariants {
        vol_delta: divisor_volume(p, &delta),
        vol_k_delta: divisor_volume(p, &kd),
        vol_h: divisor_volume(p, h),
        delta_dot_h: divisor_dot_power(p, &delta, h),
        max_coeff: delta.iter().max().cloned().unwrap_or_else(Rat::zero),
        lc_volume_lower_bound: lc_volume_lower_bound(p, &delta, h),
    })
}

use super::GeomError;
use crate::linalg::{int_kernel, kernel, rank_i64, subsets, to_rat};
use crate::rat::{primitive, primitive_from_rat, Rat};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// A point of N_R or M_R.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatVec {
    pub entries: Vec<Rat>,
}

impl RatVec {
    pub fn new(entries: Vec<Rat>) -> Self {
        RatVec { entries }
    }
    pub fn rank(&self) -> usize {
        self.entries.len()
    }
}

/// Rational polyhedral cone generated by primitive integer rays.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cone {
    rank: usize,
    rays: Vec<Vec<i64>>,
    #[serde(skip)]
    dual: OnceLock<Vec<Vec<i64>>>,
}

impl Cone {
    /// Rays are reduced to primitive vectors; zero rays and duplicates are dropped.
    pub fn new(rank: usize, rays: Vec<Vec<i64>>) -> Result<Cone, GeomError> {
        let mut out: Vec<Vec<i64>> = Vec::new();
        for r in rays {
            if r.len() != rank {
                return Err(GeomError::RankMismatch { expected: rank, found: r.len() });
            }
            if r.iter().all(|&x| x == 0) {
                continue;
            }
            let p = primitive(&r);
            if !out.contains(&p) {
                out.push(p);
            }
        }
        Ok(Cone { rank, rays: out, dual: OnceLock::new() })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    /// Dimension of the linear span.
    pub fn dim(&self) -> usize {
        if self.rays.is_empty() {
            0
        } else {
            rank_i64(&self.rays)
        }
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.rank
    }

    /// No line inside the cone, i.e. the dual cone is full-dimensional.
    pub fn is_strongly_convex(&self) -> bool {
        self.rays.is_empty() || rank_i64(self.dual_rays()) == self.rank
    }

    /// Generators of the dual cone (cached).
    pub fn dual_rays(&self) -> &[Vec<i64>] {
        self.dual.get_or_init(|| dual_rays(self.rank, &self.rays))
    }

    pub fn contains_int(&self, v: &[i64]) -> bool {
        self.dual_rays().iter().all(|m| m.iter().zip(v).map(|(a, b)| (*a as i128) * (*b as i128)).sum::<i128>() >= 0)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.dual_rays().iter().all(|m| {
            let s = m.iter().zip(v).fold(Rat::zero(), |acc, (a, b)| acc + b * Rat::from_integer((*a).into()));
            s >= Rat::zero()
        })
    }

    /// Set equality, tested by mutual containment of generators.
    /// Indices of rays that span an extremal ray (full-dimensional strongly convex cones).
    pub fn extremal(&self) -> Vec<usize> {
        let d = self.dual_rays();
        (0..self.rays.len())
            .filter(|&i| {
                let tight: Vec<Vec<i64>> = d
                    .iter()
                    .filter(|m| m.iter().zip(&self.rays[i]).map(|(a, b)| (*a as i128) * (*b as i128)).sum::<i128>() == 0)
                    .cloned()
                    .collect();
                rank_i64(&tight) + 1 == self.rank
            })
            .collect()
    }

    /// Simplicial subdivision of a full-dimensional strongly convex cone using only its rays,
    /// as lists of ray indices.
    pub fn triangulate(&self) -> Vec<Vec<usize>> {
        let n = self.rank;
        let ell: Vec<i64> = (0..n).map(|j| self.dual_rays().iter().map(|m| m[j]).sum()).collect();
        let ext = self.extremal();
        let mut pts = vec![vec![Rat::zero(); n]];
        for &i in &ext {
            let r = &self.rays[i];
            let s: i64 = r.iter().zip(&ell).map(|(a, b)| a * b).sum();
            pts.push(r.iter().map(|&x| Rat::new(x.into(), s.into())).collect());
        }
        let p = match super::LatticePolytope::new(pts.clone()) {
            Ok(p) => p,
            Err(_) => return vec![],
        };
        let idx: Vec<usize> = p.vertices().iter().map(|v| pts.iter().position(|q| q == v).expect("vertex")).collect();
        let origin = idx.iter().position(|&i| i == 0).expect("apex is a vertex");
        let mut order = vec![origin];
        order.extend((0..idx.len()).filter(|&k| k != origin));
        p.triangulate(&order)
            .into_iter()
            .map(|s| {
                let mut t: Vec<usize> = s.into_iter().filter(|&k| k != origin).map(|k| ext[idx[k] - 1]).collect();
                t.sort();
                t
            })
            .collect()
    }

    pub fn same_set(&self, other: &Cone) -> bool {
        self.rank == other.rank
            && self.rays.iter().all(|r| other.contains_int(r))
            && other.rays.iter().all(|r| self.contains_int(r))
    }
}

fn dual_rays(rank: usize, rays: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    let push = |v: Vec<i64>, out: &mut Vec<Vec<i64>>| {
        if !out.contains(&v) {
            out.push(v);
        }
    };
    if rays.is_empty() {
        for i in 0..rank {
            for s in [1, -1] {
                let mut e = vec![0; rank];
                e[i] = s;
                push(e, &mut out);
            }
        }
        return out;
    }
    // lineality of the dual: the orthogonal complement of the span
    let perp = int_kernel(rays, rank);
    let k = rank - perp.len();
    for sub in subsets(rays.len(), k - 1) {
        let mut rows: Vec<Vec<i64>> = sub.iter().map(|&i| rays[i].clone()).collect();
        if !rows.is_empty() && rank_i64(&rows) != k - 1 {
            continue;
        }
        rows.extend(perp.iter().cloned());
        let ker = kernel(&to_rat(&rows), rank);
        if ker.len() != 1 {
            continue;
        }
        let m = primitive_from_rat(&ker[0]);
        let vals: Vec<i128> = rays.iter().map(|r| r.iter().zip(&m).map(|(a, b)| (*a as i128) * (*b as i128)).sum()).collect();
        if vals.iter().all(|&x| x >= 0) {
            push(m, &mut out);
        } else if vals.iter().all(|&x| x <= 0) {
            push(m.iter().map(|x| -x).collect(), &mut out);
        }
    }
    for p in perp {
        let p = primitive(&p);
        push(p.iter().map(|x| -x).collect(), &mut out);
        push(p, &mut out);
    }
    out
}

/// {m : <m, v> >= 0 for all v in c}.
pub fn dual_cone(c: &Cone) -> Result<Cone, GeomError> {
    Cone::new(c.rank, c.dual_rays().to_vec())
}

/// All lattice points v of `c` with <ell, v> <= bound, origin included.
pub fn enumerate_lattice_points(c: &Cone, ell: &RatVec, bound: &Rat) -> Result<Vec<Vec<i64>>, GeomError> {
    if ell.rank() != c.rank {
        return Err(GeomError::RankMismatch { expected: c.rank, found: ell.rank() });
    }
    let vals: Vec<Rat> = c.rays.iter().map(|r| crate::rat::dot_ri(&ell.entries, r)).collect();
    if vals.iter().any(|v| *v <= Rat::zero()) {
        return Err(GeomError::Unbounded);
    }
    if *bound < Rat::zero() {
        return Ok(vec![]);
    }
    let n = c.rank;
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    for (r, v) in c.rays.iter().zip(&vals) {
        let t = bound / v;
        for j in 0..n {
            let x = &t * Rat::from_integer(r[j].into());
            let f: i64 = num_traits::ToPrimitive::to_i64(&x.floor().to_integer()).expect("box overflow");
            let cl: i64 = num_traits::ToPrimitive::to_i64(&x.ceil().to_integer()).expect("box overflow");
            lo[j] = lo[j].min(f);
            hi[j] = hi[j].max(cl);
        }
    }
    let den = crate::rat::lcm_denoms(ell.entries.iter().chain(std::iter::once(bound)));
    let scale = |x: &Rat| -> i128 {
        num_traits::ToPrimitive::to_i128(&(x * Rat::from_integer(den.clone())).to_integer()).expect("scale overflow")
    };
    let ell_i: Vec<i128> = ell.entries.iter().map(scale).collect();
    let b_i = scale(bound);
    let mut out = Vec::new();
    let mut v = lo.clone();
    loop {
        let l: i128 = v.iter().zip(&ell_i).map(|(a, b)| (*a as i128) * b).sum();
        if l <= b_i && c.contains_int(&v) {
            out.push(v.clone());
        }
        let mut j = 0;
        loop {
            if j == n {
                return Ok(out);
            }
            if v[j] < hi[j] {
                v[j] += 1;
                break;
            }
            v[j] = lo[j];
            j += 1;
        }
    }
}

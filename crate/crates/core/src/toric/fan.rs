use crate::error::{Result, ToricError};
use crate::linalg::{det_small, int_kernel, inverse, to_rat};
use crate::lp::{feasible_point, Constraint, Rel};
use crate::rat::{ri, Rat};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Simplicial fan: primitive rays and maximal cones as sorted index sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fan {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
}

/// Barycentric data of a full-dimensional simplicial cone:
/// lambda_i * det = sum_j adj[i][j] * v_j where v = sum_i lambda_i r_i.
#[derive(Clone, Debug)]
pub struct SimplexData {
    pub det: i64,
    pub adj: Vec<Vec<i64>>,
}

impl SimplexData {
    pub fn coords(&self, v: &[i64]) -> Vec<i128> {
        self.adj.iter().map(|row| row.iter().zip(v).map(|(a, b)| (*a as i128) * (*b as i128)).sum()).collect()
    }
}

/// Codimension-one face with the maximal cones containing it and their opposite rays.
#[derive(Clone, Debug)]
pub struct Wall {
    pub rays: Vec<usize>,
    pub sides: Vec<(usize, usize)>,
}

impl Fan {
    pub fn new(rank: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Fan {
        let mut cones: Vec<Vec<usize>> = cones
            .into_iter()
            .map(|mut c| {
                c.sort();
                c
            })
            .collect();
        cones.sort();
        Fan { rank, rays, cones }
    }

    pub fn cone_rays(&self, c: usize) -> Vec<Vec<i64>> {
        self.cones[c].iter().map(|&i| self.rays[i].clone()).collect()
    }

    pub fn det(&self, c: usize) -> i64 {
        det_small(&self.cone_rays(c)).abs()
    }

    pub fn simplex_data(&self, c: usize) -> Option<SimplexData> {
        let m = self.cone_rays(c);
        if m.len() != self.rank {
            return None;
        }
        let d = det_small(&m);
        if d == 0 {
            return None;
        }
        let rt: Vec<Vec<i64>> = crate::linalg::transpose(&m);
        let inv = inverse(&to_rat(&rt))?;
        let scale = ri(d.abs());
        let adj = inv
            .iter()
            .map(|row| row.iter().map(|x| (x * &scale).to_integer().to_i64().expect("adjugate overflow")).collect())
            .collect();
        Some(SimplexData { det: d.abs(), adj })
    }

    /// All walls keyed by their sorted ray sets.
    pub fn walls(&self) -> Vec<Wall> {
        let mut map: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, c) in self.cones.iter().enumerate() {
            for (k, &u) in c.iter().enumerate() {
                let mut w = c.clone();
                w.remove(k);
                map.entry(w).or_default().push((ci, u));
            }
        }
        map.into_iter().map(|(rays, sides)| Wall { rays, sides }).collect()
    }

    /// Every cone of the fan (faces of maximal cones), including the zero cone.
    pub fn faces(&self) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for c in &self.cones {
            let k = c.len();
            for mask in 0u32..(1u32 << k) {
                let f: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| c[i]).collect();
                out.insert(f);
            }
        }
        out
    }

    pub fn is_face(&self, s: &[usize]) -> bool {
        let mut s = s.to_vec();
        s.sort();
        self.cones.iter().any(|c| s.iter().all(|i| c.contains(i)))
    }

    pub fn is_smooth(&self) -> bool {
        (0..self.cones.len()).all(|c| self.det(c) == 1)
    }

    /// Rays adjacent to ray i (sharing a maximal cone).
    pub fn star_rays(&self, i: usize) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for c in &self.cones {
            if c.contains(&i) {
                s.extend(c.iter().copied().filter(|&j| j != i));
            }
        }
        s
    }

    /// Maximal cone containing v with its scaled barycentric coordinates.
    pub fn locate(&self, simp: &[SimplexData], v: &[i64]) -> Option<(usize, Vec<i128>)> {
        for (c, s) in simp.iter().enumerate() {
            let mu = s.coords(v);
            if mu.iter().all(|&x| x >= 0) {
                return Some((c, mu));
            }
        }
        None
    }

    /// Star subdivision at a lattice vector v lying in the support and not already a ray.
    /// The new ray is appended at the end of the ray list.
    pub fn star_subdivide(&self, v: &[i64]) -> Result<Fan> {
        let simp: Vec<SimplexData> = (0..self.cones.len())
            .map(|c| self.simplex_data(c).ok_or(ToricError::NotSimplicial(c)))
            .collect::<Result<_>>()?;
        let (c, mu) = self.locate(&simp, v).ok_or(ToricError::OutsideSupport)?;
        let tau: Vec<usize> = self.cones[c].iter().zip(&mu).filter(|(_, &m)| m > 0).map(|(&i, _)| i).collect();
        let v = crate::rat::primitive(v);
        if self.rays.contains(&v) {
            return Err(ToricError::Invalid("subdivision point is already a ray".into()));
        }
        let new = self.rays.len();
        let mut rays = self.rays.clone();
        rays.push(v);
        let mut cones = Vec::new();
        for c in &self.cones {
            if tau.iter().all(|i| c.contains(i)) {
                for &i in &tau {
                    let mut d: Vec<usize> = c.iter().copied().filter(|&j| j != i).collect();
                    d.push(new);
                    cones.push(d);
                }
            } else {
                cones.push(c.clone());
            }
        }
        Ok(Fan::new(self.rank, rays, cones))
    }

    pub(crate) fn check_structure(&self) -> Result<Vec<SimplexData>> {
        let n = self.rank;
        if n == 0 {
            return Err(ToricError::Invalid("rank must be positive".into()));
        }
        for (i, r) in self.rays.iter().enumerate() {
            if r.len() != n {
                return Err(ToricError::RankMismatch { expected: n, found: r.len() });
            }
            if r.iter().all(|&x| x == 0) {
                return Err(ToricError::NotAFan(format!("ray {i} is zero")));
            }
        }
        for i in 0..self.rays.len() {
            for j in 0..i {
                if self.rays[i] == self.rays[j] {
                    return Err(ToricError::NotAFan(format!("rays {j} and {i} coincide")));
                }
            }
        }
        if self.cones.is_empty() {
            return Err(ToricError::NotComplete("no maximal cones".into()));
        }
        let mut simp = Vec::new();
        for (ci, c) in self.cones.iter().enumerate() {
            if c.iter().any(|&i| i >= self.rays.len()) {
                return Err(ToricError::Invalid(format!("cone {ci} has an out-of-range ray index")));
            }
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(ToricError::Invalid(format!("cone {ci} repeats a ray")));
            }
            if c.len() > n {
                return Err(ToricError::NotSimplicial(ci));
            }
            if c.len() < n {
                return Err(ToricError::NotComplete(format!("cone {ci} is not full-dimensional")));
            }
            simp.push(self.simplex_data(ci).ok_or(ToricError::NotSimplicial(ci))?);
        }
        if self.cones.windows(2).any(|w| w[0] == w[1]) {
            return Err(ToricError::NotAFan("repeated maximal cone".into()));
        }
        for i in 0..self.rays.len() {
            if !self.cones.iter().any(|c| c.contains(&i)) {
                return Err(ToricError::NotAFan(format!("ray {i} lies in no maximal cone")));
            }
        }
        for w in self.walls() {
            if w.sides.len() > 2 {
                return Err(ToricError::NotAFan(format!("wall {:?} lies in more than two cones", w.rays)));
            }
            if w.sides.len() == 2 {
                let normal = self.wall_normal(&w.rays);
                let s1 = dot_i(&normal, &self.rays[w.sides[0].1]).signum();
                let s2 = dot_i(&normal, &self.rays[w.sides[1].1]).signum();
                if s1 == s2 {
                    return Err(ToricError::NotAFan(format!("cones on wall {:?} overlap", w.rays)));
                }
            }
        }
        Ok(simp)
    }

    pub(crate) fn wall_normal(&self, wall: &[usize]) -> Vec<i64> {
        let rows: Vec<Vec<i64>> = wall.iter().map(|&i| self.rays[i].clone()).collect();
        if rows.is_empty() {
            return vec![1];
        }
        int_kernel(&rows, self.rank).remove(0)
    }

    /// Completeness: every wall in two cones, and a generic point covered exactly once.
    pub(crate) fn check_complete(&self, simp: &[SimplexData]) -> Result<()> {
        let walls = self.walls();
        if let Some(w) = walls.iter().find(|w| w.sides.len() != 2) {
            return Err(ToricError::NotComplete(format!("wall {:?} bounds the support", w.rays)));
        }
        let normals: Vec<Vec<i64>> = walls.iter().map(|w| self.wall_normal(&w.rays)).collect();
        for k in [1009i64, 1013, 1019, 1021, 1031, 1033, 1039, 1049] {
            let p: Vec<i64> = (0..self.rank).map(|j| k.pow(j as u32) + j as i64).collect();
            if normals.iter().any(|nm| dot_i(nm, &p) == 0) {
                continue;
            }
            let count = simp.iter().filter(|s| s.coords(&p).iter().all(|&x| x > 0)).count();
            if count != 1 {
                return Err(ToricError::NotAFan(format!("generic point covered {count} times")));
            }
            return Ok(());
        }
        Err(ToricError::Invalid("no generic point found".into()))
    }

    /// Pairwise face condition via separating hyperplanes (used for non-complete fans).
    pub(crate) fn check_faces_lp(&self) -> Result<()> {
        for a in 0..self.cones.len() {
            for b in a + 1..self.cones.len() {
                let (ca, cb) = (&self.cones[a], &self.cones[b]);
                let mut cons = Vec::new();
                for &i in ca {
                    let row: Vec<Rat> = self.rays[i].iter().map(|&x| ri(x)).collect();
                    if cb.contains(&i) {
                        cons.push(Constraint::new(row, Rel::Eq, Rat::zero()));
                    } else {
                        cons.push(Constraint::new(row, Rel::Ge, ri(1)));
                    }
                }
                for &i in cb {
                    if !ca.contains(&i) {
                        let row: Vec<Rat> = self.rays[i].iter().map(|&x| ri(x)).collect();
                        cons.push(Constraint::new(row, Rel::Le, ri(-1)));
                    }
                }
                if feasible_point(self.rank, true, &cons).is_none() {
                    return Err(ToricError::NotAFan(format!("cones {a} and {b} meet improperly")));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn dot_i(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(x, y)| (*x as i128) * (*y as i128)).sum()
}


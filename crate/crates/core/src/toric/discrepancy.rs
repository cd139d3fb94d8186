//! mld, lct and alpha invariants from the piecewise-linear log discrepancy.

use super::pair::ToricPair;
use crate::error::{Result, ToricError};
use crate::linalg::solve;
use crate::rat::{dot_ri, Rat};
use num_traits::{Signed, Zero};
use std::fmt;

/// A threshold that may be infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Threshold {
    Finite(Rat),
    Infinite,
}

impl Threshold {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Threshold::Finite(x) => Some(x),
            Threshold::Infinite => None,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Finite(x) => write!(f, "{}", crate::rat::fmt_rat(x)),
            Threshold::Infinite => write!(f, "inf"),
        }
    }
}

impl serde::Serialize for Threshold {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Where an lct is taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum At {
    Global,
    Cone(Vec<usize>),
}

fn require_klt(p: &ToricPair) -> Result<()> {
    for i in 0..p.rays().len() {
        if !p.ray_a(i).is_positive() {
            return Err(ToricError::NotKlt(format!("ray {i} has log discrepancy <= 0")));
        }
    }
    Ok(())
}

/// Minimal log discrepancy over valuations centered in the orbit closure of `sigma`.
pub fn mld(p: &ToricPair, sigma: &[usize]) -> Result<Rat> {
    require_klt(p)?;
    let mut sigma = sigma.to_vec();
    sigma.sort();
    if !p.fan().is_face(&sigma) {
        return Err(ToricError::ConeNotInFan(sigma));
    }
    let bound = if sigma.is_empty() {
        (0..p.rays().len()).map(|i| p.ray_a(i)).min().expect("rays")
    } else {
        sigma.iter().map(|&i| p.ray_a(i)).fold(Rat::zero(), |a, b| a + b)
    };
    let cones: Vec<usize> = (0..p.cones().len()).filter(|&c| sigma.iter().all(|i| p.cones()[c].contains(i))).collect();
    let pts = p.points_below_in(&bound, false, &cones)?;
    pts.into_iter()
        .filter(|q| sigma.iter().all(|i| q.face.contains(i)))
        .map(|q| q.a)
        .min()
        .ok_or_else(|| ToricError::Invalid("no valuation found".into()))
}

/// lct of an effective invariant divisor sum d_i D_i, globally or near the orbit of a cone.
/// The ratio A/ord is linear-fractional on each cone, so its minimum is attained on a ray.
pub fn lct(p: &ToricPair, d: &[Rat], at: &At) -> Result<Threshold> {
    if d.len() != p.rays().len() {
        return Err(ToricError::Invalid("divisor length".into()));
    }
    if let Some(i) = d.iter().position(|x| x.is_negative()) {
        return Err(ToricError::NegativeDivisor(i));
    }
    let rays: Vec<usize> = match at {
        At::Global => (0..p.rays().len()).collect(),
        At::Cone(s) => {
            if !p.fan().is_face(s) {
                return Err(ToricError::ConeNotInFan(s.clone()));
            }
            s.clone()
        }
    };
    Ok(rays
        .iter()
        .filter(|&&i| d[i].is_positive())
        .map(|&i| p.ray_a(i) / &d[i])
        .min()
        .map(Threshold::Finite)
        .unwrap_or(Threshold::Infinite))
}

/// Vertices m_sigma of the polytope of a nef divisor, one per maximal cone.
pub fn nef_vertices(p: &ToricPair, a: &[Rat]) -> Vec<Vec<Rat>> {
    (0..p.cones().len())
        .map(|c| {
            let m = crate::linalg::to_rat(&p.fan().cone_rays(c));
            let rhs: Vec<Rat> = p.cones()[c].iter().map(|&i| -a[i].clone()).collect();
            solve(&m, &rhs).expect("simplicial")
        })
        .collect()
}

/// Alpha invariant of (X, Delta) with respect to the complete series of a nef divisor,
/// restricted to torus-invariant members.
pub fn alpha_invariant(p: &ToricPair, l: &[Rat]) -> Result<Threshold> {
    p.require_projective()?;
    if !p.is_complete() {
        return Err(ToricError::NotComplete("alpha invariant needs a complete fan".into()));
    }
    require_klt(p)?;
    if !p.is_nef(l) {
        return Err(ToricError::NotNef);
    }
    let verts = nef_vertices(p, l);
    let mut best: Option<Rat> = None;
    for (i, v) in p.rays().iter().enumerate() {
        let width = verts.iter().map(|m| dot_ri(m, v)).max().expect("cones") + &l[i];
        if width.is_positive() {
            let r = p.ray_a(i) / width;
            if best.as_ref().is_none_or(|b| r < *b) {
                best = Some(r);
            }
        }
    }
    Ok(best.map(Threshold::Finite).unwrap_or(Threshold::Infinite))
}


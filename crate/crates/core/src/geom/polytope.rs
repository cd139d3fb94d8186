use super::GeomError;
use crate::linalg::{kernel, rank, subsets};
use crate::rat::{dot, Rat};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    Euclidean,
    /// Euclidean volume times d!.
    Lattice,
}

#[derive(Clone, Debug)]
pub struct Facet {
    /// Inward normal: <normal, x> >= offset on the polytope.
    pub normal: Vec<Rat>,
    pub offset: Rat,
    pub verts: Vec<usize>,
}

/// Convex hull of finitely many rational points, stored by its vertices.
#[derive(Clone, Debug)]
pub struct LatticePolytope {
    vertices: Vec<Vec<Rat>>,
    dim: usize,
}

fn affine_dim(pts: &[&Vec<Rat>]) -> usize {
    if pts.len() <= 1 {
        return 0;
    }
    let diffs: Vec<Vec<Rat>> = pts[1..].iter().map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect()).collect();
    rank(&diffs)
}

fn facets_of(points: &[Vec<Rat>]) -> Vec<Facet> {
    let n = points[0].len();
    let mut out: Vec<Facet> = Vec::new();
    for sub in subsets(points.len(), n) {
        let p0 = &points[sub[0]];
        let diffs: Vec<Vec<Rat>> = sub[1..].iter().map(|&i| points[i].iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
        let ker = kernel(&diffs, n);
        if ker.len() != 1 {
            continue;
        }
        let mut normal = ker[0].clone();
        let mut offset = dot(&normal, p0);
        let vals: Vec<Rat> = points.iter().map(|p| dot(&normal, p)).collect();
        let ge = vals.iter().all(|v| *v >= offset);
        let le = vals.iter().all(|v| *v <= offset);
        if !ge && !le {
            continue;
        }
        if !ge {
            normal = normal.iter().map(|x| -x).collect();
            offset = -offset;
        }
        let verts: Vec<usize> = (0..points.len()).filter(|&i| vals[i] == if ge { offset.clone() } else { -offset.clone() }).collect();
        if out.iter().any(|f| f.verts == verts) {
            continue;
        }
        out.push(Facet { normal, offset, verts });
    }
    out
}

impl LatticePolytope {
    /// Convex hull of the given points; redundant points are removed.
    pub fn new(points: Vec<Vec<Rat>>) -> Result<Self, GeomError> {
        if points.is_empty() {
            return Err(GeomError::Empty);
        }
        let n = points[0].len();
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(GeomError::RankMismatch { expected: n, found: p.len() });
        }
        let mut pts: Vec<Vec<Rat>> = Vec::new();
        for p in points {
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        let refs: Vec<&Vec<Rat>> = pts.iter().collect();
        let dim = affine_dim(&refs);
        if dim < n || pts.len() == n + 1 {
            // degenerate or a simplex: keep points that are not in the hull of the others
            let vertices = if dim < n { lower_dim_vertices(&pts, dim) } else { pts };
            return Ok(LatticePolytope { vertices, dim });
        }
        let facets = facets_of(&pts);
        let vertices: Vec<Vec<Rat>> = (0..pts.len())
            .filter(|&i| {
                let normals: Vec<Vec<Rat>> = facets.iter().filter(|f| f.verts.contains(&i)).map(|f| f.normal.clone()).collect();
                rank(&normals) == n
            })
            .map(|i| pts[i].clone())
            .collect();
        Ok(LatticePolytope { vertices, dim })
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Facets of a full-dimensional polytope.
    pub fn facets(&self) -> Vec<Facet> {
        if self.dim < self.ambient_dim() {
            return vec![];
        }
        facets_of(&self.vertices)
    }

    /// Pulling triangulation using the given vertex order; simplices as vertex index lists.
    pub fn triangulate(&self, order: &[usize]) -> Vec<Vec<usize>> {
        let n = self.ambient_dim();
        if self.dim < n {
            return vec![];
        }
        let facets = self.facets();
        let all: Vec<usize> = order.to_vec();
        let mut out = Vec::new();
        self.pull(&all, n, &facets, &mut out, Vec::new());
        out
    }

    fn pull(&self, face: &[usize], d: usize, facets: &[Facet], out: &mut Vec<Vec<usize>>, apex: Vec<usize>) {
        if face.len() == d + 1 {
            let mut s = apex;
            s.extend_from_slice(face);
            out.push(s);
            return;
        }
        let v = face[0];
        let mut subfaces: Vec<Vec<usize>> = Vec::new();
        for f in facets {
            let sub: Vec<usize> = face.iter().copied().filter(|i| f.verts.contains(i)).collect();
            if sub.contains(&v) || sub.len() < d {
                continue;
            }
            let refs: Vec<&Vec<Rat>> = sub.iter().map(|&i| &self.vertices[i]).collect();
            if affine_dim(&refs) != d - 1 {
                continue;
            }
            let mut key = sub.clone();
            key.sort();
            if subfaces.iter().any(|s| {
                let mut t = s.clone();
                t.sort();
                t == key
            }) {
                continue;
            }
            subfaces.push(sub);
        }
        for sub in subfaces {
            let mut a = apex.clone();
            a.push(v);
            self.pull(&sub, d - 1, facets, out, a);
        }
    }
}

fn lower_dim_vertices(pts: &[Vec<Rat>], dim: usize) -> Vec<Vec<Rat>> {
    // a point is redundant iff it lies in the hull of the others; test by LP
    use crate::lp::{feasible_point, Constraint, Rel};
    if pts.len() <= dim + 1 {
        return pts.to_vec();
    }
    let n = pts[0].len();
    let mut keep: Vec<Vec<Rat>> = pts.to_vec();
    let mut i = 0;
    while i < keep.len() {
        let others: Vec<&Vec<Rat>> = keep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).collect();
        let mut cons = Vec::new();
        for c in 0..n {
            cons.push(Constraint::new(others.iter().map(|p| p[c].clone()).collect(), Rel::Eq, keep[i][c].clone()));
        }
        cons.push(Constraint::new(vec![Rat::from_integer(1.into()); others.len()], Rel::Eq, Rat::from_integer(1.into())));
        if feasible_point(others.len(), false, &cons).is_some() {
            keep.remove(i);
        } else {
            i += 1;
        }
    }
    keep
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::from(1), |a, k| a * BigInt::from(k))
}

fn simplex_lattice_volume(pts: &[&Vec<Rat>]) -> Rat {
    let m: Vec<Vec<Rat>> = pts[1..].iter().map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect()).collect();
    det_rat(m).abs()
}

pub(crate) fn det_rat(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut det = Rat::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return Rat::zero() };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        let inv = m[c][c].recip();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let t = &m[c][j] * &f;
                m[i][j] -= t;
            }
        }
    }
    det
}

/// Exact volume. Polytopes that are not full-dimensional have volume 0.
pub fn polytope_volume(p: &LatticePolytope, normalization: Normalization) -> Rat {
    let order: Vec<usize> = (0..p.vertices.len()).collect();
    volume_with_order(p, normalization, &order)
}

pub(crate) fn volume_with_order(p: &LatticePolytope, normalization: Normalization, order: &[usize]) -> Rat {
    let n = p.ambient_dim();
    if p.dim < n {
        return Rat::zero();
    }
    let tri = p.triangulate(order);
    let lattice: Rat = tri.iter().map(|s| {
        let pts: Vec<&Vec<Rat>> = s.iter().map(|&i| &p.vertices[i]).collect();
        simplex_lattice_volume(&pts)
    }).fold(Rat::zero(), |a, b| a + b);
    match normalization {
        Normalization::Lattice => lattice,
        Normalization::Euclidean => lattice / Rat::from_integer(factorial(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ri, rvec};

    fn poly(v: &[&[i64]]) -> LatticePolytope {
        LatticePolytope::new(v.iter().map(|p| rvec(p)).collect()).unwrap()
    }

    #[test]
    fn basic_volumes() {
        assert_eq!(polytope_volume(&poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]), Normalization::Euclidean), ri(1));
        let t = poly(&[&[0, 0], &[1, 0], &[0, 1]]);
        assert_eq!(polytope_volume(&t, Normalization::Euclidean), rat(1, 2));
        assert_eq!(polytope_volume(&t, Normalization::Lattice), ri(1));
        let t3 = poly(&[&[0, 0], &[3, 0], &[0, 3]]);
        assert_eq!(polytope_volume(&t3, Normalization::Euclidean), rat(9, 2));
        assert_eq!(polytope_volume(&t3, Normalization::Lattice), ri(9));
    }

    #[test]
    fn redundant_points_removed() {
        let p = poly(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2], &[1, 1], &[1, 0]]);
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(polytope_volume(&p, Normalization::Euclidean), ri(4));
    }

    #[test]
    fn cube_and_octahedron() {
        let mut cube = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    cube.push(rvec(&[a, b, c]));
                }
            }
        }
        let c = LatticePolytope::new(cube).unwrap();
        assert_eq!(polytope_volume(&c, Normalization::Euclidean), ri(1));
        let o = poly(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]]);
        assert_eq!(polytope_volume(&o, Normalization::Euclidean), rat(4, 3));
    }

    #[test]
    fn degenerate_is_zero() {
        let p = poly(&[&[0, 0], &[1, 1], &[2, 2]]);
        assert_eq!(p.dim(), 1);
        assert_eq!(p.vertices().len(), 2);
        assert_eq!(polytope_volume(&p, Normalization::Lattice), ri(0));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(40))]
        #[test]
        fn triangulation_independent(pts in proptest::collection::vec(proptest::collection::vec(-4i64..=4, 3), 5..10), seed in 0u64..1000) {
            use rand::seq::SliceRandom;
            let p = LatticePolytope::new(pts.iter().map(|v| rvec(v)).collect()).unwrap();
            let k = p.vertices().len();
            let base: Vec<usize> = (0..k).collect();
            let mut order = base.clone();
            order.shuffle(&mut crate::random::rng(seed));
            let a = volume_with_order(&p, Normalization::Lattice, &base);
            let b = volume_with_order(&p, Normalization::Lattice, &order);
            proptest::prop_assert_eq!(a, b);
        }
    }
}

//! Normalized volumes of toric valuations on cone singularities, their minimization, and the
//! relative cone over a log Fano toric pair.

use crate::error::{Result, ToricError};
use crate::geom::Cone;
use crate::linalg::{det_i64, kernel, solve_any, to_rat};
use crate::rat::{dot_ri, fmt_rat, ri, to_f64, Rat};
use crate::toric::{Mode, Support, ToricPair};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

/// Germ of an affine toric variety at its torus-fixed point with an invariant boundary.
#[derive(Clone, Debug)]
pub struct ConeSingularity {
    cone: Cone,
    coeffs: Vec<Rat>,
    alpha: Vec<Rat>,
    dual: Vec<Vec<i64>>,
    // simplicial cones of a subdivision of the dual cone, with |det|
    dual_tri: Vec<(Vec<usize>, BigInt)>,
    tri: Vec<Vec<usize>>,
}

impl ConeSingularity {
    /// Rays must be primitive, distinct and extremal; K + D must be Q-Cartier and klt.
    pub fn new(rank: usize, rays: Vec<Vec<i64>>, coeffs: Vec<Rat>) -> Result<Self> {
        if coeffs.len() != rays.len() {
            return Err(ToricError::LengthMismatch);
        }
        for (i, b) in coeffs.iter().enumerate() {
            if b.is_negative() || *b >= Rat::one() {
                return Err(ToricError::CoefficientOutOfRange { ray: i, value: fmt_rat(b) });
            }
        }
        let cone = Cone::new(rank, rays.clone())?;
        if cone.rays() != rays.as_slice() {
            return Err(ToricError::Invalid("rays must be primitive and distinct".into()));
        }
        if !cone.is_full_dimensional() || !cone.is_strongly_convex() {
            return Err(ToricError::Invalid("cone must be full-dimensional and strongly convex".into()));
        }
        if cone.extremal().len() != rays.len() {
            return Err(ToricError::Invalid("every ray must be extremal".into()));
        }
        let rhs: Vec<Rat> = coeffs.iter().map(|b| Rat::one() - b).collect();
        let alpha = solve_any(&to_rat(&rays), &rhs, rank).ok_or_else(|| ToricError::NotKlt("K + D is not Q-Cartier".into()))?;
        let dual_cone = Cone::new(rank, cone.dual_rays().to_vec())?;
        let dual = dual_cone.rays().to_vec();
        let dual_tri = dual_cone
            .triangulate()
            .into_iter()
            .map(|s| {
                let m: Vec<Vec<i64>> = s.iter().map(|&j| dual[j].clone()).collect();
                let d = det_i64(&m).abs();
                (s, d)
            })
            .collect();
        let tri = cone.triangulate();
        Ok(ConeSingularity { cone, coeffs, alpha, dual, dual_tri, tri })
    }

    /// Germ of a toric pair at the fixed point of a maximal cone.
    pub fn from_pair_cone(p: &ToricPair, c: usize) -> Result<Self> {
        let cone = &p.cones()[c];
        let rays = cone.iter().map(|&i| p.rays()[i].clone()).collect();
        let b = cone.iter().map(|&i| p.coeffs()[i].clone()).collect();
        Self::new(p.rank(), rays, b)
    }

    /// Smooth point with empty boundary.
    pub fn smooth(n: usize) -> Self {
        let rays = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        Self::new(n, rays, vec![Rat::zero(); n]).expect("smooth cone")
    }

    pub fn rank(&self) -> usize {
        self.cone.rank()
    }
    pub fn rays(&self) -> &[Vec<i64>] {
        self.cone.rays()
    }
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }
    pub fn cone(&self) -> &Cone {
        &self.cone
    }
    /// Covector with A(xi) = <alpha, xi>.
    pub fn alpha(&self) -> &[Rat] {
        &self.alpha
    }
    pub fn dual_rays(&self) -> &[Vec<i64>] {
        &self.dual
    }

    pub fn log_discrepancy(&self, xi: &[Rat]) -> Rat {
        crate::rat::dot(&self.alpha, xi)
    }

    fn check_interior(&self, xi: &[Rat]) -> Result<Vec<Rat>> {
        if xi.len() != self.rank() {
            return Err(ToricError::RankMismatch { expected: self.rank(), found: xi.len() });
        }
        let vals: Vec<Rat> = self.dual.iter().map(|m| dot_ri(xi, m)).collect();
        if vals.iter().any(|v| !v.is_positive()) {
            return Err(ToricError::NotInterior);
        }
        Ok(vals)
    }

    fn vol_f64(&self, xi: &[f64], dual_f: &[Vec<f64>]) -> f64 {
        let vals: Vec<f64> = dual_f.iter().map(|m| m.iter().zip(xi).map(|(a, b)| a * b).sum()).collect();
        if vals.iter().any(|&v| v <= 0.0) {
            return f64::INFINITY;
        }
        self.dual_tri
            .iter()
            .map(|(s, d)| d.to_f64().unwrap_or(f64::INFINITY) / s.iter().map(|&j| vals[j]).product::<f64>())
            .sum()
    }
}

/// n! times the euclidean volume of {u in the dual cone : <xi, u> <= 1}.
pub fn valuation_volume(s: &ConeSingularity, xi: &[Rat]) -> Result<Rat> {
    let vals = s.check_interior(xi)?;
    Ok(s.dual_tri.iter().fold(Rat::zero(), |acc, (t, d)| {
        let den = t.iter().fold(Rat::one(), |p, &j| p * &vals[j]);
        acc + Rat::from_integer(d.clone()) / den
    }))
}

pub fn normalized_volume(s: &ConeSingularity, xi: &[Rat]) -> Result<Rat> {
    let v = valuation_volume(s, xi)?;
    let a = s.log_discrepancy(xi);
    Ok(num_traits::pow(a, s.rank()) * v)
}

#[derive(Clone, Debug, Serialize)]
pub struct NvolResult {
    /// decimal value of the exact normalized volume at the minimizer
    pub value: f64,
    /// estimated distance to the grid-converged optimum
    pub error_bound: f64,
    #[serde(serialize_with = "crate::rat::serde_str::rat")]
    pub exact: Rat,
    /// minimizer on the slice A = 1
    #[serde(serialize_with = "crate::rat::serde_str::rat_vec")]
    pub minimizer: Vec<Rat>,
    /// rigorous lower bound over the whole slice from the coarse grid
    #[serde(serialize_with = "crate::rat::serde_str::rat")]
    pub grid_certificate: Rat,
    pub refinements: usize,
}

struct Slice {
    // vertices v_i / A(v_i) of each simplicial piece, as f64 points
    pieces: Vec<Vec<Vec<f64>>>,
    dual_f: Vec<Vec<f64>>,
}

fn grid_points(n: usize, d: usize, interior: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, left: usize, interior: bool, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == n {
            if !interior || left > 0 {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let lo = usize::from(interior);
        for k in lo..=left {
            cur.push(k);
            rec(n, left - k, interior, cur, out);
            cur.pop();
        }
    }
    rec(n, d, interior, &mut cur, &mut out);
    out
}

fn coarse_depth(n: usize) -> usize {
    match n {
        0..=2 => 24,
        3 => 12,
        4 => 8,
        _ => 5,
    }
}

/// Exact lower bound for vol over the slice: on each box of the barycentric grid the
/// coordinates are dominated by the box's upper corner q, and vol is monotone decreasing
/// along the cone, so vol >= vol(q) there.
fn certificate(s: &ConeSingularity, d: usize) -> Rat {
    let n = s.rank();
    let a: Vec<Rat> = s.rays().iter().map(|v| dot_ri(&s.alpha, v)).collect();
    let mut best: Option<Rat> = None;
    for t in &s.tri {
        let mut boxes = Vec::new();
        let mut k = vec![0usize; n];
        loop {
            let sum: usize = k.iter().sum();
            if sum <= d && sum + n >= d {
                boxes.push(k.clone());
            }
            let mut j = 0;
            while j < n && k[j] + 1 == d {
                k[j] = 0;
                j += 1;
            }
            if j == n {
                break;
            }
            k[j] += 1;
        }
        let vals: Vec<Rat> = boxes
            .par_iter()
            .map(|k| {
                let sum: usize = k.iter().sum();
                let mut xi = vec![Rat::zero(); n];
                for (i, &ray) in t.iter().enumerate() {
                    let hi = (k[i] + 1).min(d + k[i] - sum);
                    let c = Rat::new(BigInt::from(hi), BigInt::from(d)) / &a[ray];
                    for (x, y) in xi.iter_mut().zip(&s.rays()[ray]) {
                        *x += &c * ri(*y);
                    }
                }
                valuation_volume(s, &xi).unwrap_or_else(|_| Rat::zero())
            })
            .collect();
        for v in vals {
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
    }
    best.unwrap_or_else(Rat::zero)
}

fn orthonormal_kernel(alpha: &[Rat]) -> Vec<Vec<f64>> {
    let ker = kernel(&[alpha.to_vec()], alpha.len());
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for k in ker {
        let mut v: Vec<f64> = k.iter().map(to_f64).collect();
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        basis.push(v.iter().map(|x| x / norm).collect());
    }
    basis
}

fn argmin(vals: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v < vals[best] {
            best = i;
        }
    }
    best
}

/// Minimizes A(xi)^n vol(xi) over the slice {A = 1} of the cone: a barycentric grid on every
/// simplicial piece, then local grids around the incumbent with halving radius until the local
/// spread falls below rel_tol, then rational rounding.
pub fn minimize_nvol(s: &ConeSingularity, rel_tol: f64) -> Result<NvolResult> {
    let n = s.rank();
    let a: Vec<Rat> = s.rays().iter().map(|v| dot_ri(&s.alpha, v)).collect();
    if a.iter().any(|x| !x.is_positive()) {
        return Err(ToricError::NotKlt("A is not positive on the cone".into()));
    }
    let slice = Slice {
        pieces: s
            .tri
            .iter()
            .map(|t| t.iter().map(|&i| s.rays()[i].iter().map(|&x| x as f64 / to_f64(&a[i])).collect()).collect())
            .collect(),
        dual_f: s.dual.iter().map(|m| m.iter().map(|&x| x as f64).collect()).collect(),
    };
    let d0 = coarse_depth(n);
    let grid = grid_points(n, d0, true);
    let mut cands: Vec<Vec<f64>> = Vec::new();
    for piece in &slice.pieces {
        for k in &grid {
            let mut xi = vec![0.0; n];
            for (w, p) in k.iter().zip(piece) {
                for (x, y) in xi.iter_mut().zip(p) {
                    *x += (*w as f64 / d0 as f64) * y;
                }
            }
            cands.push(xi);
        }
    }
    let vals: Vec<f64> = cands.par_iter().map(|x| s.vol_f64(x, &slice.dual_f)).collect();
    let mut best = cands[argmin(&vals)].clone();
    let mut fbest = vals[argmin(&vals)];

    let basis = orthonormal_kernel(&s.alpha);
    let scale = slice.pieces.iter().flatten().map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let mut h = scale / d0 as f64;
    let steps: Vec<Vec<f64>> = {
        let m = basis.len();
        let mut out = Vec::new();
        let mut t = vec![-2i32; m];
        loop {
            out.push(t.iter().map(|&x| x as f64 / 2.0).collect());
            let mut j = 0;
            while j < m && t[j] == 2 {
                t[j] = -2;
                j += 1;
            }
            if j == m {
                break;
            }
            t[j] += 1;
        }
        out
    };
    let mut refinements = 0;
    let mut spread = f64::INFINITY;
    while refinements < 400 {
        refinements += 1;
        let pts: Vec<Vec<f64>> = steps
            .iter()
            .map(|t| {
                let mut x = best.clone();
                for (c, b) in t.iter().zip(&basis) {
                    for (xi, bi) in x.iter_mut().zip(b) {
                        *xi += h * c * bi;
                    }
                }
                x
            })
            .collect();
        let vals: Vec<f64> = pts.par_iter().map(|x| s.vol_f64(x, &slice.dual_f)).collect();
        let i = argmin(&vals);
        let finite_max = vals.iter().copied().filter(|v| v.is_finite()).fold(f64::MIN, f64::max);
        if vals[i] < fbest {
            fbest = vals[i];
            best = pts[i].clone();
        } else {
            h /= 2.0;
            spread = (finite_max - fbest) / fbest;
            if spread < rel_tol * 1e-2 || h < 1e-14 * scale {
                break;
            }
        }
    }

    // rational rounding: small denominators first, then a fine dyadic one; keep the best exact value
    let mut exact_best: Option<(Rat, Vec<Rat>)> = None;
    let mut dens: Vec<i64> = (1..=64).collect();
    dens.push(1 << 20);
    dens.push(1 << 40);
    for den in dens {
        let xi: Vec<Rat> = best.iter().map(|&x| Rat::new(BigInt::from((x * den as f64).round() as i64), BigInt::from(den))).collect();
        let ax = s.log_discrepancy(&xi);
        if !ax.is_positive() {
            continue;
        }
        let xi: Vec<Rat> = xi.iter().map(|x| x / &ax).collect();
        if let Ok(v) = valuation_volume(s, &xi) {
            if to_f64(&v) <= fbest * (1.0 + rel_tol) && exact_best.as_ref().is_none_or(|(b, _)| v < *b) {
                exact_best = Some((v, xi));
            }
        }
    }
    let (exact, minimizer) = exact_best.ok_or_else(|| ToricError::Invalid("rounding left the cone".into()))?;
    let value = to_f64(&exact);
    let cert = certificate(s, d0);
    Ok(NvolResult {
        value,
        error_bound: value * rel_tol.max(if spread.is_finite() { spread } else { rel_tol }),
        exact,
        minimizer,
        grid_certificate: cert,
        refinements,
    })
}

/// The relative cone over a log Fano toric pair with its marked valuation and the identities
/// checked on the partial resolution.
#[derive(Clone, Debug)]
pub struct RelativeCone {
    pub singularity: ConeSingularity,
    /// the grading valuation (0, ..., 0, 1)
    pub e: Vec<i64>,
    pub lambda: Rat,
    pub a_e: Rat,
    /// -E ~ pi^* L on the partial resolution
    pub neg_e_is_pullback_of_l: bool,
    /// K + E ~ pi^* K on the partial resolution
    pub k_plus_e_is_pullback_of_k: bool,
    pub birational: bool,
}

/// sum c_rho D_rho is principal iff some integral m has <m, rho> = c_rho for every ray.
pub fn is_principal(rays: &[Vec<i64>], c: &[Rat]) -> bool {
    match solve_any(&to_rat(rays), c, rays[0].len()) {
        None => false,
        Some(m) => {
            // m may be non-unique only when rays do not span; here they always span
            m.iter().all(|x| x.is_integer())
        }
    }
}

/// Y = Spec of the section ring of L = -r(K + Delta) over Z. With `base = None`, Z is a point and X
/// must be complete; otherwise X must be supported on the single cone of `base`.
pub fn relative_cone(base: Option<&ToricPair>, x: &ToricPair, l: &[i64], r: i64) -> Result<RelativeCone> {
    let n = x.rank();
    if l.len() != x.rays().len() {
        return Err(ToricError::LengthMismatch);
    }
    if r <= 0 || x.mode() != Mode::Pair {
        return Err(ToricError::Invalid("r must be positive and the pair in pair mode".into()));
    }
    if x.coeffs().iter().any(|b| !(b * ri(r)).is_integer()) {
        return Err(ToricError::Invalid("r Delta is not integral".into()));
    }
    // L + r(K + Delta) principal on X
    let diff: Vec<Rat> = (0..l.len()).map(|i| ri(l[i]) - ri(r) * (Rat::one() - &x.coeffs()[i])).collect();
    if !is_principal(x.rays(), &diff) {
        return Err(ToricError::Invalid("L is not linearly equivalent to -r(K + Delta)".into()));
    }
    let lr: Vec<Rat> = l.iter().map(|&v| ri(v)).collect();
    let birational = match base {
        None => {
            if x.support() != Support::Complete {
                return Err(ToricError::NotComplete("X must be complete over a point".into()));
            }
            false
        }
        Some(z) => {
            if z.cones().len() != 1 || z.cones()[0].len() != n {
                return Err(ToricError::Invalid("base must be a full-dimensional affine germ".into()));
            }
            let zc = Cone::new(n, z.rays().to_vec())?;
            let xc = Cone::new(n, x.rays().to_vec())?;
            if !zc.same_set(&xc) {
                return Err(ToricError::Invalid("X is not proper and birational over Z".into()));
            }
            true
        }
    };
    if !x.is_ample(&lr) {
        return Err(ToricError::NotLogFano("-(K + Delta) is not ample over the base".into()));
    }
    let mut rays: Vec<Vec<i64>> = x.rays().iter().zip(l).map(|(v, &li)| {
        let mut w = v.clone();
        w.push(li);
        crate::rat::primitive(&w)
    }).collect();
    let mut coeffs: Vec<Rat> = x.coeffs().to_vec();
    let mut e = vec![0i64; n + 1];
    e[n] = 1;
    if birational {
        rays.push(e.clone());
        coeffs.push(Rat::one() - Rat::new(BigInt::one(), BigInt::from(r)));
    }
    // drop generators that are not extremal (none for ample L)
    let cone = Cone::new(n + 1, rays.clone())?;
    let ext = cone.extremal();
    let rays: Vec<Vec<i64>> = ext.iter().map(|&i| rays[i].clone()).collect();
    let coeffs: Vec<Rat> = ext.iter().map(|&i| coeffs[i].clone()).collect();
    let sing = ConeSingularity::new(n + 1, rays, coeffs)?;
    let a_e = sing.log_discrepancy(&crate::rat::rvec(&e));

    // partial resolution: cones over the cones of X together with E
    let mut yt: Vec<Vec<i64>> = x.rays().iter().zip(l).map(|(v, &li)| {
        let mut w = v.clone();
        w.push(li);
        w
    }).collect();
    yt.push(e.clone());
    let pullback = |d: &[Rat]| -> Result<Vec<Rat>> { yt.iter().map(|rho| pullback_coeff(x, d, &rho[..n])).collect() };
    // E + pi^* L
    let mut c = pullback(&lr)?;
    c[x.rays().len()] += Rat::one();
    let neg_e_is_pullback_of_l = is_principal(&yt, &c);
    // K + E - pi^* K, with K = minus the sum of all invariant prime divisors
    let pk = pullback(&vec![-Rat::one(); x.rays().len()])?;
    let mut c: Vec<Rat> = pk.iter().map(|v| -Rat::one() - v).collect();
    c[x.rays().len()] += Rat::one();
    let k_plus_e_is_pullback_of_k = is_principal(&yt, &c);
    Ok(RelativeCone {
        singularity: sing,
        e,
        lambda: Rat::new(BigInt::one(), BigInt::from(r)),
        a_e,
        neg_e_is_pullback_of_l,
        k_plus_e_is_pullback_of_k,
        birational,
    })
}

/// Coefficient along the divisor of a lattice vector v of the pullback of sum d_i D_i, i.e. the
/// value at v of its piecewise-linear function (0 at the origin).
fn pullback_coeff(x: &ToricPair, d: &[Rat], v: &[i64]) -> Result<Rat> {
    if v.iter().all(|&t| t == 0) {
        return Ok(Rat::zero());
    }
    let (c, mu) = x.locate(v).ok_or(ToricError::OutsideSupport)?;
    let det = x.fan().det(c);
    let s: Rat = x.cones()[c].iter().zip(&mu).map(|(&i, &m)| &d[i] * Rat::from_integer(BigInt::from(m))).sum();
    Ok(s / ri(det))
}

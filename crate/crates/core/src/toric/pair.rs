use super::fan::{Fan, SimplexData};
use crate::error::{Result, ToricError};
use crate::linalg::{gcd_maximal_minors, int_kernel, solve, to_rat, transpose};
use crate::lp::{feasible_point, Constraint, Rel};
use crate::rat::{fmt_rat, parse_rat, primitive, ri, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// 0 <= b_i < 1
    #[default]
    Pair,
    /// -1 < b_i < 1
    Subpair,
}

/// What the fan's support is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    Complete,
    /// a single maximal cone (affine germ)
    Affine,
    /// quasi-projective over its affinization; only interior walls carry curves
    Relative,
}

/// Raw JSON form of a pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairData {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    #[serde(default)]
    pub coeffs: BTreeMap<usize, String>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
}

/// Curve class of an interior wall.
#[derive(Clone, Debug)]
pub struct WallCurve {
    pub rays: Vec<usize>,
    /// (cone index, opposite ray) on both sides
    pub sides: [(usize, usize); 2],
    /// primitive relation sum r_i v_i = 0 over the n+1 involved rays, positive on the two opposite rays
    pub relation: Vec<(usize, i64)>,
    /// intersection numbers D_j . C for the involved rays (all others are zero)
    pub intersections: Vec<(usize, Rat)>,
}

impl WallCurve {
    pub fn degree(&self, a: &[Rat]) -> Rat {
        self.intersections.iter().fold(Rat::zero(), |acc, (j, x)| acc + &a[*j] * x)
    }
}

/// A simplicial toric variety with an invariant boundary.
#[derive(Clone, Debug)]
pub struct ToricPair {
    fan: Fan,
    coeffs: Vec<Rat>,
    mode: Mode,
    support: Support,
    witness: Option<Vec<Rat>>,
    simp: Vec<SimplexData>,
    alpha: Vec<Vec<Rat>>,
    walls: Vec<WallCurve>,
}

/// The piecewise-linear log discrepancy: one covector per maximal cone.
#[derive(Clone, Debug, PartialEq)]
pub struct LogDiscrepancyFunction {
    pub cones: Vec<Vec<usize>>,
    pub alphas: Vec<Vec<Rat>>,
}

/// A nonzero lattice point of the support with its log discrepancy.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePoint {
    pub v: Vec<i64>,
    pub a: Rat,
    /// rays of the smallest cone containing v
    pub face: Vec<usize>,
    pub cone: usize,
}

fn check_coeff(mode: Mode, i: usize, b: &Rat) -> Result<()> {
    let ok = match mode {
        Mode::Pair => *b >= Rat::zero() && *b < Rat::one(),
        Mode::Subpair => *b > -Rat::one() && *b < Rat::one(),
    };
    if ok {
        Ok(())
    } else {
        Err(ToricError::CoefficientOutOfRange { ray: i, value: fmt_rat(b) })
    }
}

impl ToricPair {
    /// Complete fan (or a single cone, read as an affine germ).
    pub fn new(rank: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>, coeffs: Vec<Rat>, mode: Mode) -> Result<Self> {
        Self::build(Fan::new(rank, rays, cones), coeffs, mode, true)
    }

    /// Fan that need not be complete; curves are the interior walls.
    pub fn new_relative(rank: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>, coeffs: Vec<Rat>, mode: Mode) -> Result<Self> {
        Self::build(Fan::new(rank, rays, cones), coeffs, mode, false)
    }

    pub fn from_fan(fan: Fan, coeffs: Vec<Rat>, mode: Mode, require_complete: bool) -> Result<Self> {
        Self::build(fan, coeffs, mode, require_complete)
    }

    fn build(fan: Fan, coeffs: Vec<Rat>, mode: Mode, require_complete: bool) -> Result<Self> {
        if coeffs.len() != fan.rays.len() {
            return Err(ToricError::Invalid(format!("{} coefficients for {} rays", coeffs.len(), fan.rays.len())));
        }
        for (i, b) in coeffs.iter().enumerate() {
            check_coeff(mode, i, b)?;
        }
        let simp = fan.check_structure()?;
        let support = if fan.cones.len() == 1 {
            Support::Affine
        } else if require_complete {
            fan.check_complete(&simp)?;
            Support::Complete
        } else {
            fan.check_faces_lp()?;
            if fan.walls().iter().all(|w| w.sides.len() == 2) {
                fan.check_complete(&simp)?;
                Support::Complete
            } else {
                Support::Relative
            }
        };
        let alpha = (0..fan.cones.len())
            .map(|c| {
                let m = to_rat(&fan.cone_rays(c));
                let rhs: Vec<Rat> = fan.cones[c].iter().map(|&i| Rat::one() - &coeffs[i]).collect();
                solve(&m, &rhs).expect("simplicial cone")
            })
            .collect();
        let walls = wall_curves(&fan);
        let mut p = ToricPair { fan, coeffs, mode, support, witness: None, simp, alpha, walls };
        p.witness = p.find_ample();
        Ok(p)
    }

    /// Parses and validates the JSON form; non-primitive rays are normalized with a warning.
    pub fn from_data(d: &PairData) -> Result<(Self, Vec<String>)> {
        let mut warnings = Vec::new();
        let mut rays = Vec::new();
        for (i, r) in d.rays.iter().enumerate() {
            if r.len() != d.rank {
                return Err(ToricError::RankMismatch { expected: d.rank, found: r.len() });
            }
            let p = primitive(r);
            if &p != r {
                warnings.push(format!("ray {i} {r:?} normalized to {p:?}"));
            }
            rays.push(p);
        }
        let mut coeffs = vec![Rat::zero(); rays.len()];
        for (k, v) in &d.coeffs {
            if *k >= rays.len() {
                return Err(ToricError::Invalid(format!("coefficient for unknown ray {k}")));
            }
            coeffs[*k] = parse_rat(v).ok_or_else(|| ToricError::Invalid(format!("bad rational {v:?} for ray {k}")))?;
        }
        let complete = d.complete.unwrap_or(true);
        let p = Self::build(Fan::new(d.rank, rays, d.max_cones.clone()), coeffs, d.mode, complete)?;
        Ok((p, warnings))
    }

    pub fn to_data(&self) -> PairData {
        PairData {
            rank: self.fan.rank,
            rays: self.fan.rays.clone(),
            max_cones: self.fan.cones.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, b)| !b.is_zero())
                .map(|(i, b)| (i, fmt_rat(b)))
                .collect(),
            mode: self.mode,
            complete: if self.support == Support::Relative { Some(false) } else { None },
        }
    }

    pub fn with_coeffs(&self, coeffs: Vec<Rat>, mode: Mode) -> Result<Self> {
        Self::build(self.fan.clone(), coeffs, mode, self.support != Support::Relative)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }
    pub fn rank(&self) -> usize {
        self.fan.rank
    }
    pub fn rays(&self) -> &[Vec<i64>] {
        &self.fan.rays
    }
    pub fn cones(&self) -> &[Vec<usize>] {
        &self.fan.cones
    }
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn support(&self) -> Support {
        self.support
    }
    pub fn is_complete(&self) -> bool {
        self.support == Support::Complete
    }
    pub fn witness(&self) -> Option<&[Rat]> {
        self.witness.as_deref()
    }
    pub fn is_projective(&self) -> bool {
        self.witness.is_some()
    }
    pub fn require_projective(&self) -> Result<()> {
        if self.is_projective() {
            Ok(())
        } else {
            Err(ToricError::NotProjective)
        }
    }
    pub fn simplex_data(&self) -> &[SimplexData] {
        &self.simp
    }
    pub fn walls(&self) -> &[WallCurve] {
        &self.walls
    }
    pub fn alpha(&self, cone: usize) -> &[Rat] {
        &self.alpha[cone]
    }
    /// Log discrepancy 1 - b_i of the ray divisor.
    pub fn ray_a(&self, i: usize) -> Rat {
        Rat::one() - &self.coeffs[i]
    }
    /// Coefficients of K + Delta written as sum (b_i - 1) D_i.
    pub fn canonical_coeffs(&self) -> Vec<Rat> {
        self.coeffs.iter().map(|b| b - Rat::one()).collect()
    }

    pub fn log_discrepancy(&self) -> LogDiscrepancyFunction {
        LogDiscrepancyFunction { cones: self.fan.cones.clone(), alphas: self.alpha.clone() }
    }

    /// Maximal cone containing v, with scaled barycentric coordinates.
    pub fn locate(&self, v: &[i64]) -> Option<(usize, Vec<i128>)> {
        self.fan.locate(&self.simp, v)
    }

    /// A(v) = <alpha_sigma, v>.
    pub fn evaluate(&self, v: &[i64]) -> Result<Rat> {
        if v.len() != self.rank() {
            return Err(ToricError::RankMismatch { expected: self.rank(), found: v.len() });
        }
        let (c, _) = self.locate(v).ok_or(ToricError::OutsideSupport)?;
        Ok(crate::rat::dot_ri(&self.alpha[c], v))
    }

    /// Smallest cone containing v (rays with positive barycentric coordinate).
    pub fn face_of(&self, v: &[i64]) -> Option<Vec<usize>> {
        let (c, mu) = self.locate(v)?;
        Some(self.fan.cones[c].iter().zip(&mu).filter(|(_, &m)| m > 0).map(|(&i, _)| i).collect())
    }

    /// Divisor sum a_i D_i is nef / ample, tested on wall curves.
    pub fn is_nef(&self, a: &[Rat]) -> bool {
        self.walls.iter().all(|w| !w.degree(a).is_negative())
    }
    pub fn is_ample(&self, a: &[Rat]) -> bool {
        self.walls.iter().all(|w| w.degree(a).is_positive())
    }

    fn find_ample(&self) -> Option<Vec<Rat>> {
        let n = self.fan.rays.len();
        if self.walls.is_empty() {
            return Some(vec![Rat::zero(); n]);
        }
        let cons: Vec<Constraint> = self
            .walls
            .iter()
            .map(|w| {
                let mut row = vec![Rat::zero(); n];
                for (j, x) in &w.intersections {
                    row[*j] = x.clone();
                }
                Constraint::new(row, Rel::Ge, Rat::one())
            })
            .collect();
        feasible_point(n, true, &cons)
    }

    /// Nonzero lattice points of the support with A(v) <= bound (or < bound when strict),
    /// each listed once. Requires A > 0 on every ray of the scanned cones.
    pub fn points_below(&self, bound: &Rat, strict: bool) -> Result<Vec<LatticePoint>> {
        self.points_below_in(bound, strict, &(0..self.fan.cones.len()).collect::<Vec<_>>())
    }

    pub fn points_below_in(&self, bound: &Rat, strict: bool, cones: &[usize]) -> Result<Vec<LatticePoint>> {
        let mut out = Vec::new();
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        for &c in cones {
            self.scan_cone(c, bound, strict, &mut out, &mut seen)?;
        }
        Ok(out)
    }

    fn scan_cone(&self, c: usize, bound: &Rat, strict: bool, out: &mut Vec<LatticePoint>, seen: &mut HashSet<Vec<i64>>) -> Result<()> {
        let n = self.rank();
        let cone = &self.fan.cones[c];
        let a: Vec<Rat> = cone.iter().map(|&i| self.ray_a(i)).collect();
        if a.iter().any(|x| !x.is_positive()) {
            return Err(ToricError::Unbounded);
        }
        if bound.is_negative() || (strict && bound.is_zero()) {
            return Ok(());
        }
        let mut lo = vec![0i64; n];
        let mut hi = vec![0i64; n];
        for (k, &i) in cone.iter().enumerate() {
            let t = bound / &a[k];
            for j in 0..n {
                let x = &t * ri(self.fan.rays[i][j]);
                lo[j] = lo[j].min(x.floor().to_integer().to_i64().expect("box"));
                hi[j] = hi[j].max(x.ceil().to_integer().to_i64().expect("box"));
            }
        }
        let den = a.iter().chain(std::iter::once(bound)).fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let w: Vec<i128> = a.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer().to_i128().unwrap()).collect();
        let sd = &self.simp[c];
        let bscaled = (bound * Rat::from_integer(den.clone()) * ri(sd.det)).to_integer().to_i128().unwrap();
        let denom = Rat::from_integer(den * BigInt::from(sd.det));
        let mut v = lo.clone();
        loop {
            if v.iter().any(|&x| x != 0) {
                let mu = sd.coords(&v);
                if mu.iter().all(|&x| x >= 0) {
                    let s: i128 = mu.iter().zip(&w).map(|(m, x)| m * x).sum();
                    if (strict && s < bscaled) || (!strict && s <= bscaled) {
                        if seen.insert(v.clone()) {
                            let face = cone.iter().zip(&mu).filter(|(_, &m)| m > 0).map(|(&i, _)| i).collect();
                            out.push(LatticePoint { v: v.clone(), a: Rat::from_integer(BigInt::from(s)) / &denom, face, cone: c });
                        }
                    }
                }
            }
            let mut j = 0;
            loop {
                if j == n {
                    return Ok(());
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

    /// Non-ray primitive lattice points (exceptional toric valuations) with A below the bound.
    pub fn exceptional_below(&self, bound: &Rat, strict: bool) -> Result<Vec<LatticePoint>> {
        Ok(self
            .points_below(bound, strict)?
            .into_iter()
            .filter(|p| p.face.len() >= 2 && crate::rat::primitive(&p.v) == p.v)
            .collect())
    }
}

fn wall_curves(fan: &Fan) -> Vec<WallCurve> {
    let n = fan.rank;
    let mut out = Vec::new();
    for w in fan.walls() {
        if w.sides.len() != 2 {
            continue;
        }
        let (c1, u) = w.sides[0];
        let (c2, u2) = w.sides[1];
        let mut involved = w.rays.clone();
        involved.push(u);
        involved.push(u2);
        let cols: Vec<Vec<i64>> = involved.iter().map(|&i| fan.rays[i].clone()).collect();
        let m = transpose(&cols);
        let mut rel = int_kernel(&m, n + 1).remove(0);
        if rel[n - 1] < 0 {
            rel = rel.iter().map(|x| -x).collect();
        }
        let wall_vecs: Vec<Vec<i64>> = w.rays.iter().map(|&i| fan.rays[i].clone()).collect();
        let mult_w = gcd_maximal_minors(&wall_vecs);
        let mult_s = BigInt::from(fan.det(c1));
        let du = Rat::new(mult_w, mult_s);
        let cu = rel[n - 1];
        let intersections = involved.iter().zip(&rel).map(|(&j, &r)| (j, &du * Rat::new(r.into(), cu.into()))).collect();
        out.push(WallCurve {
            rays: w.rays.clone(),
            sides: [(c1, u), (c2, u2)],
            relation: involved.iter().copied().zip(rel.iter().copied()).collect(),
            intersections,
        });
    }
    out
}

impl LogDiscrepancyFunction {
    /// Both covectors of every interior wall agree on the wall's rays.
    pub fn is_continuous(&self, fan: &Fan) -> bool {
        fan.walls().iter().filter(|w| w.sides.len() == 2).all(|w| {
            let (a, b) = (&self.alphas[w.sides[0].0], &self.alphas[w.sides[1].0]);
            w.rays.iter().all(|&i| crate::rat::dot_ri(a, &fan.rays[i]) == crate::rat::dot_ri(b, &fan.rays[i]))
        })
    }
}


//! Stringy E-functions of toric klt sub-pairs, restricted to t = uv.
//!
//! On a smooth subdivision with every invariant divisor D_j in the boundary,
//! E_st = sum over cones tau of (t-1)^(n - dim tau) prod_{j in tau} (t-1)/(t^{A_j}-1),
//! where A_j is the log discrepancy of D_j over the pair (crepant pullback). The exponent is the
//! log discrepancy: writing the pulled back boundary as sum a_j D_j the factor is
//! (t-1)/(t^{1-a_j}-1) and 1 - a_j = A_j.
//! Values live in Z[s] with s = t^(1/l); denominators are products of cyclotomic polynomials.

use crate::error::{Result, ToricError};
use crate::mmp::MmpRun;
use crate::rat::{fmt_rat, Rat};
use crate::toric::{Fan, ToricPair};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;

type Poly = Vec<BigInt>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn pmul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn padd(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    trim(out)
}

fn psub(a: &Poly, b: &Poly) -> Poly {
    padd(a, &b.iter().map(|x| -x).collect())
}

/// Exact division by a monic polynomial; None if the remainder is nonzero.
fn pdiv_monic(a: &Poly, m: &Poly) -> Option<Poly> {
    let a = trim(a.clone());
    if a.is_empty() {
        return Some(vec![]);
    }
    let dm = m.len() - 1;
    if a.len() - 1 < dm {
        return None;
    }
    let mut r = a;
    let mut q = vec![BigInt::zero(); r.len() - dm];
    for k in (0..q.len()).rev() {
        let c = r[k + dm].clone();
        if c.is_zero() {
            continue;
        }
        for (j, x) in m.iter().enumerate() {
            r[k + j] -= &c * x;
        }
        q[k] = c;
    }
    if r.iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some(trim(q))
}

fn monomial_minus_one(d: usize) -> Poly {
    let mut p = vec![BigInt::zero(); d + 1];
    p[0] = -BigInt::one();
    p[d] = BigInt::one();
    p
}

/// Cyclotomic polynomial Phi_d.
fn cyclotomic(d: usize, cache: &mut BTreeMap<usize, Poly>) -> Poly {
    if let Some(p) = cache.get(&d) {
        return p.clone();
    }
    let mut p = monomial_minus_one(d);
    for e in 1..d {
        if d % e == 0 {
            let f = cyclotomic(e, cache);
            p = pdiv_monic(&p, &f).expect("cyclotomic factor");
        }
    }
    cache.insert(d, p.clone());
    p
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}

fn ppow(a: &Poly, k: usize) -> Poly {
    (0..k).fold(vec![BigInt::one()], |acc, _| pmul(&acc, a))
}

fn eval_sign_at_infinity(p: &Poly) -> i32 {
    match p.last() {
        None => 0,
        Some(c) if c.is_positive() => 1,
        _ => -1,
    }
}

/// num(s)/den(s) with s = t^(1/l).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracPowerRationalFunction {
    pub l: u64,
    pub num: Vec<BigInt>,
    pub den: Vec<BigInt>,
}

impl FracPowerRationalFunction {
    pub fn new(l: u64, num: Vec<BigInt>, den: Vec<BigInt>) -> Result<Self> {
        let den = trim(den);
        if den.is_empty() {
            return Err(ToricError::Invalid("zero denominator".into()));
        }
        if l == 0 {
            return Err(ToricError::Invalid("l must be positive".into()));
        }
        Ok(Self { l, num: trim(num), den }.normalized())
    }

    /// Integer polynomial in t.
    pub fn polynomial(coeffs: &[i64]) -> Self {
        Self { l: 1, num: trim(coeffs.iter().map(|&c| BigInt::from(c)).collect()), den: vec![BigInt::one()] }.normalized()
    }

    fn normalized(self) -> Self {
        let Self { mut l, mut num, mut den } = self;
        if num.is_empty() {
            return Self { l: 1, num, den: vec![BigInt::one()] };
        }
        // cancel a polynomial gcd computed over Q with primitive parts
        let g = poly_gcd(&num, &den);
        if g.len() > 1 {
            num = pdiv_exact(&num, &g);
            den = pdiv_exact(&den, &g);
        }
        let c = num.iter().chain(den.iter()).fold(BigInt::zero(), |a, x| a.gcd(x));
        let sign = if den.last().is_some_and(|x| x.is_negative()) { -BigInt::one() } else { BigInt::one() };
        let c = c * sign;
        num = num.iter().map(|x| x / &c).collect();
        den = den.iter().map(|x| x / &c).collect();
        let mut g: u64 = 0;
        for p in [&num, &den] {
            for (i, x) in p.iter().enumerate() {
                if !x.is_zero() {
                    g = g.gcd(&(i as u64));
                }
            }
        }
        let g = g.gcd(&l);
        if g > 1 {
            let shrink = |p: &Poly| -> Poly { p.iter().step_by(g as usize).cloned().collect() };
            num = shrink(&num);
            den = shrink(&den);
            l /= g;
        }
        Self { l, num, den }
    }

    /// Same function written with s' = t^(1/l'), l | l'.
    fn lifted(&self, l: u64) -> (Poly, Poly) {
        let k = (l / self.l) as usize;
        let up = |p: &Poly| -> Poly {
            if p.is_empty() {
                return vec![];
            }
            let mut out = vec![BigInt::zero(); (p.len() - 1) * k + 1];
            for (i, x) in p.iter().enumerate() {
                out[i * k] = x.clone();
            }
            out
        };
        (up(&self.num), up(&self.den))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let l = self.l.lcm(&other.l);
        let (a, b) = self.lifted(l);
        let (c, d) = other.lifted(l);
        Self { l, num: psub(&pmul(&a, &d), &pmul(&c, &b)), den: pmul(&b, &d) }.normalized()
    }

    pub fn add(&self, other: &Self) -> Self {
        let l = self.l.lcm(&other.l);
        let (a, b) = self.lifted(l);
        let (c, d) = other.lifted(l);
        Self { l, num: padd(&pmul(&a, &d), &pmul(&c, &b)), den: pmul(&b, &d) }.normalized()
    }

    /// Value at t = 1 when finite.
    pub fn value_at_one(&self) -> Option<Rat> {
        let n: BigInt = self.num.iter().sum();
        let d: BigInt = self.den.iter().sum();
        if d.is_zero() {
            None
        } else {
            Some(Rat::new(n, d))
        }
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let s = t.powf(1.0 / self.l as f64);
        let ev = |p: &Poly| p.iter().rev().fold(0.0, |acc, c| acc * s + c.to_f64().unwrap_or(f64::NAN));
        ev(&self.num) / ev(&self.den)
    }

    /// Human-readable form in t.
    pub fn display(&self) -> String {
        let term = |c: &BigInt, e: usize| -> String {
            let ex = Rat::new(BigInt::from(e), BigInt::from(self.l));
            let mono = if e == 0 {
                String::new()
            } else if ex.is_one() {
                "t".into()
            } else if ex.is_integer() {
                format!("t^{}", fmt_rat(&ex))
            } else {
                format!("t^({})", fmt_rat(&ex))
            };
            match (c.is_one(), mono.is_empty()) {
                (_, true) => c.to_string(),
                (true, false) => mono,
                _ if *c == -BigInt::one() => format!("-{mono}"),
                _ => format!("{c}*{mono}"),
            }
        };
        let show = |p: &Poly| -> String {
            if p.is_empty() {
                return "0".into();
            }
            let parts: Vec<String> = p.iter().enumerate().rev().filter(|(_, c)| !c.is_zero()).map(|(e, c)| term(c, e)).collect();
            parts.join(" + ").replace("+ -", "- ")
        };
        if self.den == vec![BigInt::one()] {
            show(&self.num)
        } else {
            format!("({}) / ({})", show(&self.num), show(&self.den))
        }
    }
}

fn pdiv_exact(a: &Poly, b: &Poly) -> Poly {
    // b divides a over Q; a and b have integer coefficients
    let lb = b.last().expect("nonzero").clone();
    let mut r: Vec<Rat> = a.iter().map(|x| Rat::from_integer(x.clone())).collect();
    let db = b.len() - 1;
    let mut q = vec![Rat::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = &r[k + db] / Rat::from_integer(lb.clone());
        for (j, x) in b.iter().enumerate() {
            r[k + j] -= &c * Rat::from_integer(x.clone());
        }
        q[k] = c;
    }
    let den = q.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    q.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect()
}

fn content(p: &Poly) -> BigInt {
    p.iter().fold(BigInt::zero(), |a, x| a.gcd(x))
}

fn primitive_part(p: &Poly) -> Poly {
    let c = content(p);
    if c.is_zero() {
        return p.clone();
    }
    p.iter().map(|x| x / &c).collect()
}

/// gcd in Z[s] up to a constant, by primitive pseudo-remainders.
fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut a = primitive_part(&trim(a.clone()));
    let mut b = primitive_part(&trim(b.clone()));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = pseudo_rem(&a, &b);
        a = b;
        b = primitive_part(&r);
    }
    a
}

fn pseudo_rem(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = r[r.len() - 1].clone();
        r = r.iter().map(|x| x * &lb).collect();
        for (j, x) in b.iter().enumerate() {
            r[k + j] -= &c * x;
        }
        r = trim(r);
    }
    r
}

impl Serialize for FracPowerRationalFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw {
            l: u64,
            num: Vec<(serde_json::Value, usize)>,
            den: Vec<(serde_json::Value, usize)>,
            display: String,
        }
        let terms = |p: &Poly| -> Vec<(serde_json::Value, usize)> {
            p.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (c.to_i64().map(serde_json::Value::from).unwrap_or_else(|| serde_json::Value::from(c.to_string())), e))
                .collect()
        };
        Raw { l: self.l, num: terms(&self.num), den: terms(&self.den), display: self.display() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FracPowerRationalFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        struct Raw {
            l: u64,
            num: Vec<(serde_json::Value, usize)>,
            den: Vec<(serde_json::Value, usize)>,
        }
        let r = Raw::deserialize(d)?;
        let poly = |t: &[(serde_json::Value, usize)]| -> std::result::Result<Poly, D::Error> {
            let mut p = vec![BigInt::zero(); t.iter().map(|x| x.1 + 1).max().unwrap_or(0)];
            for (c, e) in t {
                let c: BigInt = match c {
                    serde_json::Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| D::Error::custom("bad coefficient"))?,
                    serde_json::Value::String(s) => s.parse().map_err(|_| D::Error::custom("bad coefficient"))?,
                    _ => return Err(D::Error::custom("bad coefficient")),
                };
                p[*e] += c;
            }
            Ok(p)
        };
        FracPowerRationalFunction::new(r.l, poly(&r.num)?, poly(&r.den)?).map_err(D::Error::custom)
    }
}

/// Sign of f - g as t -> infinity.
pub fn asymptotic_compare(f: &FracPowerRationalFunction, g: &FracPowerRationalFunction) -> Ordering {
    let d = f.sub(g);
    match eval_sign_at_infinity(&d.num) * eval_sign_at_infinity(&d.den) {
        0 => Ordering::Equal,
        x if x > 0 => Ordering::Greater,
        _ => Ordering::Less,
    }
}

/// Nonzero lattice points of the half-open parallelepiped of cone c.
fn box_points(fan: &Fan, c: usize) -> Vec<Vec<i64>> {
    let n = fan.rank;
    let rays = fan.cone_rays(c);
    let sd = fan.simplex_data(c).expect("simplicial");
    let det = sd.det.abs() as i128;
    if det == 1 {
        return vec![];
    }
    let lo: Vec<i64> = (0..n).map(|j| rays.iter().map(|r| r[j].min(0)).sum()).collect();
    let hi: Vec<i64> = (0..n).map(|j| rays.iter().map(|r| r[j].max(0)).sum()).collect();
    let mut out = Vec::new();
    let mut v = lo.clone();
    loop {
        let mu = sd.coords(&v);
        let scaled: Vec<i128> = mu.iter().map(|x| if sd.det < 0 { -x } else { *x }).collect();
        if scaled.iter().all(|&x| x >= 0 && x < det) && scaled.iter().any(|&x| x > 0) {
            out.push(v.clone());
        }
        let mut j = 0;
        loop {
            if j == n {
                return out;
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

/// How the resolution picks its next subdivision point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolutionChoice {
    /// the box point with the smallest coordinate sum in the first singular cone
    First,
    /// seeded random choices, followed by a few extra smooth blow-ups
    Random(u64),
}

/// Smooth subdivision of a simplicial fan by star subdivisions at parallelepiped points.
pub fn smooth_subdivision(fan: &Fan, choice: ResolutionChoice) -> Result<Fan> {
    use rand::seq::SliceRandom;
    use rand::Rng;
    let mut rng = crate::random::rng(match choice {
        ResolutionChoice::Random(s) => s,
        ResolutionChoice::First => 0,
    });
    let mut f = fan.clone();
    loop {
        let singular: Vec<usize> = (0..f.cones.len()).filter(|&c| f.det(c) != 1).collect();
        if singular.is_empty() {
            break;
        }
        let c = match choice {
            ResolutionChoice::First => singular[0],
            ResolutionChoice::Random(_) => *singular.choose(&mut rng).expect("nonempty"),
        };
        let mut pts = box_points(&f, c);
        pts.sort_by_key(|v| (v.iter().map(|x| x.abs()).sum::<i64>(), v.clone()));
        let v = match choice {
            ResolutionChoice::First => pts[0].clone(),
            ResolutionChoice::Random(_) => pts[rng.gen_range(0..pts.len())].clone(),
        };
        f = f.star_subdivide(&v)?;
    }
    if let ResolutionChoice::Random(_) = choice {
        for _ in 0..rng.gen_range(1..=3) {
            let c = rng.gen_range(0..f.cones.len());
            let cone = f.cones[c].clone();
            let k = rng.gen_range(2..=cone.len());
            let mut idx = cone.clone();
            idx.shuffle(&mut rng);
            let mut v = vec![0i64; f.rank];
            for &i in &idx[..k] {
                for (x, y) in v.iter_mut().zip(&f.rays[i]) {
                    *x += y;
                }
            }
            f = f.star_subdivide(&v)?;
        }
    }
    Ok(f)
}

/// E_st(X, Delta; t) for a complete klt sub-pair.
pub fn stringy_e(p: &ToricPair) -> Result<FracPowerRationalFunction> {
    stringy_e_with(p, ResolutionChoice::First)
}

pub fn stringy_e_with(p: &ToricPair, choice: ResolutionChoice) -> Result<FracPowerRationalFunction> {
    if !p.is_complete() {
        return Err(ToricError::NotComplete("stringy E-function needs a complete fan".into()));
    }
    for (i, b) in p.coeffs().iter().enumerate() {
        if *b >= Rat::one() {
            return Err(ToricError::NotKlt(format!("ray {i} has log discrepancy {}", fmt_rat(&(Rat::one() - b)))));
        }
    }
    let y = smooth_subdivision(p.fan(), choice)?;
    let a: Vec<Rat> = y.rays.iter().map(|v| p.evaluate(v)).collect::<Result<_>>()?;
    if let Some(i) = a.iter().position(|x| !x.is_positive()) {
        return Err(ToricError::NotKlt(format!("divisor {:?} has log discrepancy {}", y.rays[i], fmt_rat(&a[i]))));
    }
    let l = a.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom())).to_u64().ok_or_else(|| ToricError::Unrepresentable("denominator".into()))?;
    let ex: Vec<usize> = a.iter().map(|x| (x * Rat::from_integer(BigInt::from(l))).to_integer().to_usize().expect("exponent")).collect();
    let n = y.rank;
    let lz = l as usize;
    let t_minus_1 = monomial_minus_one(lz);
    let faces: Vec<Vec<usize>> = y.faces().into_iter().collect();
    // common denominator: prod Phi_d^(max multiplicity over faces)
    let mut cache = BTreeMap::new();
    let mut need: BTreeMap<usize, usize> = BTreeMap::new();
    let face_mult = |f: &[usize]| -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &j in f {
            for d in divisors(ex[j]) {
                *m.entry(d).or_insert(0) += 1;
            }
        }
        m
    };
    for f in &faces {
        for (d, k) in face_mult(f) {
            let e = need.entry(d).or_insert(0);
            *e = (*e).max(k);
        }
    }
    for &d in need.keys() {
        cyclotomic(d, &mut cache);
    }
    let den = need.iter().fold(vec![BigInt::one()], |acc, (d, k)| pmul(&acc, &ppow(&cache[d], *k)));
    let num = faces
        .par_iter()
        .map(|f| {
            let m = face_mult(f);
            let mut term = ppow(&t_minus_1, n);
            for (d, k) in &need {
                let have = m.get(d).copied().unwrap_or(0);
                term = pmul(&term, &ppow(&cache[d], k - have));
            }
            term
        })
        .reduce(Vec::new, |x, y| padd(&x, &y));
    FracPowerRationalFunction::new(l, num, den)
}

#[derive(Clone, Debug, Serialize)]
pub struct StepComparison {
    pub step: usize,
    pub result: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoLoopReport {
    pub values: Vec<FracPowerRationalFunction>,
    pub comparisons: Vec<StepComparison>,
    /// index pairs (i, j), i < j, with equal values
    pub duplicates: Vec<(usize, usize)>,
    pub pass: bool,
}

/// Strict decrease at each step of a sequence of pairs and pairwise distinctness.
pub fn verify_no_loop_pairs(pairs: &[ToricPair]) -> Result<NoLoopReport> {
    let values: Vec<FracPowerRationalFunction> = pairs.par_iter().map(stringy_e).collect::<Result<_>>()?;
    let comparisons: Vec<StepComparison> = values
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let o = asymptotic_compare(&w[0], &w[1]);
            StepComparison { step: i, result: format!("{o:?}"), pass: o == Ordering::Greater }
        })
        .collect();
    let mut duplicates = Vec::new();
    for j in 0..values.len() {
        for i in 0..j {
            if values[i] == values[j] {
                duplicates.push((i, j));
            }
        }
    }
    let pass = comparisons.iter().all(|c| c.pass) && duplicates.is_empty();
    Ok(NoLoopReport { values, comparisons, duplicates, pass })
}

/// The pairs of a run before and after each birational step.
pub fn verify_no_loop(run: &MmpRun) -> Result<NoLoopReport> {
    let mut pairs = vec![run.initial.clone()];
    pairs.extend(run.steps.iter().filter_map(|s| s.after.clone()));
    verify_no_loop_pairs(&pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(coeffs: &[i64]) -> FracPowerRationalFunction {
        FracPowerRationalFunction::polynomial(coeffs)
    }

    #[test]
    fn cyclotomics() {
        let mut c = BTreeMap::new();
        assert_eq!(cyclotomic(6, &mut c), vec![BigInt::from(1), BigInt::from(-1), BigInt::from(1)]);
        assert_eq!(cyclotomic(4, &mut c).len(), 3);
    }

    #[test]
    fn compare_examples() {
        assert_eq!(asymptotic_compare(&t(&[1, 0, 1]), &t(&[0, 0, 1])), Ordering::Greater);
        let f = FracPowerRationalFunction::new(2, vec![0.into(), 0.into(), 0.into(), 1.into()], vec![1.into()]).unwrap();
        assert_eq!(asymptotic_compare(&f, &t(&[5, 1])), Ordering::Greater);
        assert_eq!(asymptotic_compare(&f, &f), Ordering::Equal);
    }

    #[test]
    fn normalization_cancels() {
        // (t^2 - 1)/(t - 1) = t + 1
        let f = FracPowerRationalFunction::new(1, vec![(-1).into(), 0.into(), 1.into()], vec![(-1).into(), 1.into()]).unwrap();
        assert_eq!(f, t(&[1, 1]));
        // written in s = t^(1/2)
        let g = FracPowerRationalFunction::new(2, vec![1.into(), 0.into(), 1.into()], vec![1.into()]).unwrap();
        assert_eq!(g, t(&[1, 1]));
    }
}

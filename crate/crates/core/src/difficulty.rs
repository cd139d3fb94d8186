//! Difficulty ladders, the M-adic difficulty and the counting estimates behind explicit termination.

use crate::error::{Result, ToricError};
use crate::linalg::gcd_maximal_minors;
use crate::rat::{ceil_int, fmt_rat, Rat};
use crate::toric::{even_betti, terminalize, LatticePoint, Mode, ToricPair};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeSet;

/// S = [0,1] meet the monoid generated by 1 and the coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffMonoid {
    /// b_1 > ... > b_k
    pub generators: Vec<Rat>,
    /// sorted increasingly
    pub elements: Vec<Rat>,
}

impl CoeffMonoid {
    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
    pub fn contains(&self, x: &Rat) -> bool {
        self.elements.binary_search(x).is_ok()
    }
}

/// Distinct coefficients in (0,1); returned sorted decreasingly.
pub fn coefficient_monoid(coeffs: &[Rat]) -> Result<CoeffMonoid> {
    let mut gens: Vec<Rat> = Vec::new();
    for b in coeffs {
        if !b.is_positive() || *b >= Rat::one() {
            return Err(ToricError::DomainError(format!("coefficient {} is not in (0,1)", fmt_rat(b))));
        }
        if !gens.contains(b) {
            gens.push(b.clone());
        }
    }
    gens.sort_by(|a, b| b.cmp(a));
    let mut set: BTreeSet<Rat> = BTreeSet::new();
    set.insert(Rat::zero());
    let mut frontier = vec![Rat::zero()];
    let one = Rat::one();
    while let Some(x) = frontier.pop() {
        for g in gens.iter().chain(std::iter::once(&one)) {
            let y = &x + g;
            if y <= one && set.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    Ok(CoeffMonoid { generators: gens, elements: set.into_iter().collect() })
}

/// (rho_0, d_1, rho_1, ..., d_{k+1}, rho_{k+1}) for fixed coefficient levels b_1 > ... > b_k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifficultyVector {
    #[serde(serialize_with = "crate::rat::serde_str::rat_vec")]
    pub levels: Vec<Rat>,
    pub rhos: Vec<u64>,
    pub ds: Vec<u64>,
    pub k: usize,
    /// false when the fan is not smooth: the d-counts only see toric valuations
    pub exact: bool,
}

impl DifficultyVector {
    /// The interleaved sequence read as digits.
    pub fn digits(&self) -> Vec<u64> {
        let mut out = vec![self.rhos[0]];
        for i in 0..=self.k {
            out.push(self.ds[i]);
            out.push(self.rhos[i + 1]);
        }
        out
    }
    pub fn rho_sum(&self) -> u64 {
        self.rhos.iter().sum()
    }
}

fn is_echo(p: &ToricPair, pt: &LatticePoint) -> bool {
    if pt.face.len() != 2 {
        return false;
    }
    let (i, j) = (pt.face[0], pt.face[1]);
    let (bi, bj) = (&p.coeffs()[i], &p.coeffs()[j]);
    if bi.is_positive() == bj.is_positive() {
        return false;
    }
    gcd_maximal_minors(&[p.rays()[i].clone(), p.rays()[j].clone()]).is_one()
}

/// Exceptional toric valuations with A < 2 whose center is not a codimension one point of the
/// smooth locus of the boundary.
pub fn non_echo_points(p: &ToricPair) -> Result<Vec<LatticePoint>> {
    Ok(p.exceptional_below(&Rat::from_integer(2.into()), true)?.into_iter().filter(|x| !is_echo(p, x)).collect())
}

fn picard(p: &ToricPair) -> u64 {
    (p.rays().len() - p.rank()) as u64
}

/// Picard number of the orbit closure of a cone (complete fans).
pub fn stratum_picard(p: &ToricPair, tau: &[usize]) -> u64 {
    let mut star: BTreeSet<usize> = BTreeSet::new();
    for c in p.cones() {
        if tau.iter().all(|i| c.contains(i)) {
            star.extend(c.iter().copied().filter(|j| !tau.contains(j)));
        }
    }
    (star.len() + tau.len() - p.rank()) as u64
}

fn h_alg(p: &ToricPair) -> u64 {
    let n = p.rank();
    if n < 2 {
        return 0;
    }
    even_betti(p)[n - 2]
}

fn levels_of(p: &ToricPair) -> Vec<Rat> {
    let mut l: Vec<Rat> = p.coeffs().iter().filter(|b| b.is_positive()).cloned().collect();
    l.sort_by(|a, b| b.cmp(a));
    l.dedup();
    l
}

pub fn difficulty_vector(p: &ToricPair) -> Result<DifficultyVector> {
    difficulty_vector_at(p, &levels_of(p))
}

/// Difficulty vector with prescribed levels, so that pairs along a run stay comparable after a
/// boundary component disappears (its rho entry becomes 0).
pub fn difficulty_vector_at(p: &ToricPair, levels: &[Rat]) -> Result<DifficultyVector> {
    if p.mode() != Mode::Pair {
        return Err(ToricError::WrongMode);
    }
    if !p.is_complete() {
        return Err(ToricError::NotComplete("difficulty needs a complete fan".into()));
    }
    let s = coefficient_monoid(levels)?;
    let levels = s.generators.clone();
    let k = levels.len();
    for b in p.coeffs() {
        if b.is_positive() && !levels.contains(b) {
            return Err(ToricError::Invalid(format!("coefficient {} is not among the levels", fmt_rat(b))));
        }
    }
    let mut rhos = vec![picard(p)];
    for b in &levels {
        let r: u64 = (0..p.rays().len()).filter(|&i| p.coeffs()[i] == *b).map(|i| stratum_picard(p, &[i])).sum();
        rhos.push(r);
    }
    rhos.push(h_alg(p));
    let pts = non_echo_points(p)?;
    let two = Rat::from_integer(2.into());
    let mut ds = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let bi = if i < k { levels[i].clone() } else { Rat::zero() };
        let d: usize = s.elements.iter().filter(|eta| **eta >= bi).map(|eta| {
            let t = &two - eta;
            pts.iter().filter(|x| x.a < t).count()
        }).sum();
        ds.push(d as u64);
    }
    Ok(DifficultyVector { levels, rhos, ds, k, exact: p.fan().is_smooth() })
}

/// d(X, Delta): non-echo exceptional divisors with discrepancy < 1.
pub fn d_count(p: &ToricPair) -> Result<u64> {
    Ok(non_echo_points(p)?.len() as u64)
}

/// rho(X, Delta) = rho(X) + rho of the normalized boundary + h^alg_{2n-4}.
pub fn rho_pair(p: &ToricPair) -> u64 {
    let b: u64 = (0..p.rays().len()).filter(|&i| p.coeffs()[i].is_positive()).map(|i| stratum_picard(p, &[i])).sum();
    picard(p) + b + h_alg(p)
}

pub fn lex_compare(a: &DifficultyVector, b: &DifficultyVector) -> Result<Ordering> {
    if a.k != b.k {
        return Err(ToricError::LengthMismatch);
    }
    Ok(a.digits().cmp(&b.digits()))
}

pub fn delta_m(v: &DifficultyVector, m: &BigInt) -> BigInt {
    v.digits().iter().fold(BigInt::zero(), |acc, d| acc * m + BigInt::from(*d))
}

/// (2 + ceil(1/b_k) ceil(1/(1-b_1))) |S|; with no boundary b_k = 1 and b_1 = 0.
pub fn termination_m(s: &CoeffMonoid) -> BigInt {
    let (bk, b1) = match (s.generators.last(), s.generators.first()) {
        (Some(l), Some(f)) => (l.clone(), f.clone()),
        _ => (Rat::one(), Rat::zero()),
    };
    let x = ceil_int(&(Rat::one() / bk)) * ceil_int(&(Rat::one() / (Rat::one() - b1)));
    (BigInt::from(2) + x) * BigInt::from(s.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MadicCheck {
    pub holds: bool,
    pub equality: bool,
}

/// Checks sum M^-i c_i <= sum M^-i a_i under a_i >= b_i and
/// c_i - b_i <= (M-1) sum_{j<i} (a_j - b_j), and that equality happens only for a = b = c.
pub fn madic_check(a: &[Rat], b: &[Rat], c: &[Rat], m: &Rat) -> Result<MadicCheck> {
    if a.len() != b.len() || a.len() != c.len() {
        return Err(ToricError::LengthMismatch);
    }
    if *m <= Rat::one() {
        return Err(ToricError::DomainError("M must exceed 1".into()));
    }
    let mut acc = Rat::zero();
    for i in 0..a.len() {
        if a[i] < b[i] || &c[i] - &b[i] > (m - Rat::one()) * &acc {
            return Err(ToricError::HypothesisViolated(i));
        }
        acc += &a[i] - &b[i];
    }
    let mut lhs = Rat::zero();
    let mut rhs = Rat::zero();
    let mut w = Rat::one();
    for i in 0..a.len() {
        lhs += &w * &c[i];
        rhs += &w * &a[i];
        w /= m;
    }
    let equality = lhs == rhs;
    let same = a == b && b == c;
    Ok(MadicCheck { holds: lhs <= rhs && equality == same, equality })
}

/// e(X, Delta) plus the number of boundary components.
pub fn e_plus(p: &ToricPair) -> Result<u64> {
    let e = p.exceptional_below(&Rat::one(), false)?.len();
    Ok((e + p.coeffs().iter().filter(|b| b.is_positive()).count()) as u64)
}

/// rho + d at the toric terminalization: an upper bound for s(X, Delta).
pub fn s_value(p: &ToricPair) -> Result<u64> {
    let t = terminalize(p)?;
    Ok(rho_pair(&t.pair) + d_count(&t.pair)?)
}

/// Smallest N for which a log smooth pair meets the hypotheses of the e_+/s estimates:
/// b_i <= 1 - 1/N, at most N strata, each of Picard number at most N, and h^alg_{2n-4} <= N.
pub fn log_smooth_parameter(p: &ToricPair) -> Option<u64> {
    if !p.is_complete() || !p.fan().is_smooth() || p.mode() != Mode::Pair {
        return None;
    }
    let mut n: u64 = 1;
    for b in p.coeffs() {
        let x = ceil_int(&(Rat::one() / (Rat::one() - b)));
        n = n.max(x.try_into().ok()?);
    }
    let strata: Vec<Vec<usize>> = p
        .fan()
        .faces()
        .into_iter()
        .filter(|f| f.iter().all(|&i| p.coeffs()[i].is_positive()))
        .collect();
    n = n.max(strata.len() as u64);
    for f in &strata {
        n = n.max(stratum_picard(p, f));
    }
    Some(n.max(h_alg(p)))
}

#[derive(Clone, Debug, Serialize)]
pub struct DifficultyReport {
    pub vector: DifficultyVector,
    pub monoid: Vec<String>,
    #[serde(serialize_with = "crate::rat::serde_str::int")]
    pub m: BigInt,
    #[serde(serialize_with = "crate::rat::serde_str::int")]
    pub delta_m: BigInt,
    pub rho: u64,
    pub d: u64,
    pub e_plus: u64,
    /// value at the toric terminalization (an upper bound)
    pub s: u64,
    pub terminal: bool,
    pub log_smooth_n: Option<u64>,
}

pub fn difficulty_report(p: &ToricPair) -> Result<DifficultyReport> {
    let vector = difficulty_vector(p)?;
    let s = coefficient_monoid(&vector.levels)?;
    let m = termination_m(&s);
    Ok(DifficultyReport {
        delta_m: delta_m(&vector, &m),
        monoid: s.elements.iter().map(fmt_rat).collect(),
        m,
        rho: rho_pair(p),
        d: d_count(p)?,
        e_plus: e_plus(p)?,
        s: s_value(p)?,
        terminal: crate::toric::is_terminal(p)?,
        log_smooth_n: log_smooth_parameter(p),
        vector,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn monoid_small() {
        assert_eq!(coefficient_monoid(&[]).unwrap().len(), 2);
        assert_eq!(coefficient_monoid(&[rat(1, 2)]).unwrap().len(), 3);
        let s = coefficient_monoid(&[rat(1, 2), rat(2, 3)]).unwrap();
        assert_eq!(s.elements, vec![Rat::zero(), rat(1, 2), rat(2, 3), Rat::one()]);
        assert!(coefficient_monoid(&[Rat::one()]).is_err());
    }

    #[test]
    fn m_for_one_half() {
        let s = coefficient_monoid(&[rat(1, 2)]).unwrap();
        assert_eq!(termination_m(&s), BigInt::from(18));
    }
}

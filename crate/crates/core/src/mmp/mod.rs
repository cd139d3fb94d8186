//! Toric MMP: wall classification, extremal classes, single steps, runs and exhaustive
//! enumeration of runs.

mod canonical;
mod enumerate;

pub use canonical::canonical_form;
pub use enumerate::{enumerate_runs, Enumeration, RunSummary};

use crate::error::{Result, ToricError};
use crate::lp::{feasible_point, Constraint, Rel};
use crate::rat::{fmt_rat, ri, Rat};
use crate::toric::{Fan, PairData, Support, ToricPair};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum WallKind {
    Fibering,
    Divisorial,
    Flipping,
}

fn kind_of(rel: impl Iterator<Item = i64>) -> WallKind {
    match rel.filter(|&x| x < 0).count() {
        0 => WallKind::Fibering,
        1 => WallKind::Divisorial,
        _ => WallKind::Flipping,
    }
}

/// An interior wall with its curve class data.
#[derive(Clone, Debug, Serialize)]
pub struct WallData {
    pub rays: Vec<usize>,
    pub sides: [(usize, usize); 2],
    /// primitive relation over the n+1 involved rays
    pub relation: Vec<(usize, i64)>,
    #[serde(serialize_with = "crate::rat::serde_str::rat")]
    pub degree: Rat,
    pub kind: WallKind,
    pub flop: bool,
    /// index into the list of numerical classes
    pub class: usize,
}

/// A numerical class of wall curves.
#[derive(Clone, Debug, Serialize)]
pub struct CurveClass {
    pub walls: Vec<usize>,
    /// primitive integer relation over all rays, proportional to the intersection numbers D_j . C
    pub relation: Vec<i64>,
    /// (K + Delta) . C for the first wall curve of the class
    #[serde(serialize_with = "crate::rat::serde_str::rat")]
    pub degree: Rat,
    pub kind: WallKind,
    /// spans an extremal ray of the cone of curves
    pub extremal: bool,
}

impl CurveClass {
    pub fn negative_part(&self) -> Vec<usize> {
        (0..self.relation.len()).filter(|&j| self.relation[j] < 0).collect()
    }
    pub fn positive_part(&self) -> Vec<usize> {
        (0..self.relation.len()).filter(|&j| self.relation[j] > 0).collect()
    }
}

fn primitive_rat(v: &[Rat]) -> Vec<i64> {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    ints.iter().map(|x| (x / &g).to_i64().expect("relation fits in i64")).collect()
}

/// All interior walls with their classes.
pub fn wall_classes(p: &ToricPair) -> Result<(Vec<WallData>, Vec<CurveClass>)> {
    p.require_projective()?;
    let k = p.rays().len();
    let kd: Vec<Rat> = p.coeffs().iter().map(|b| b - Rat::one()).collect();
    let mut classes: Vec<CurveClass> = Vec::new();
    let mut walls = Vec::new();
    for (wi, w) in p.walls().iter().enumerate() {
        let mut full = vec![Rat::zero(); k];
        for (j, x) in &w.intersections {
            full[*j] = x.clone();
        }
        let rel = primitive_rat(&full);
        let degree = w.degree(&kd);
        let ci = match classes.iter().position(|c| c.relation == rel) {
            Some(ci) => {
                classes[ci].walls.push(wi);
                ci
            }
            None => {
                classes.push(CurveClass {
                    walls: vec![wi],
                    relation: rel.clone(),
                    degree: degree.clone(),
                    kind: kind_of(rel.iter().copied()),
                    extremal: false,
                });
                classes.len() - 1
            }
        };
        walls.push(WallData {
            rays: w.rays.clone(),
            sides: w.sides,
            relation: w.relation.clone(),
            flop: degree.is_zero(),
            kind: kind_of(w.relation.iter().map(|x| x.1)),
            degree,
            class: ci,
        });
    }
    // extremal iff some nef divisor vanishes exactly on the class
    let ext: Vec<bool> = (0..classes.len())
        .map(|ci| {
            let cons: Vec<Constraint> = classes
                .iter()
                .enumerate()
                .map(|(cj, c)| {
                    let row: Vec<Rat> = c.relation.iter().map(|&x| ri(x)).collect();
                    if cj == ci {
                        Constraint::new(row, Rel::Eq, Rat::zero())
                    } else {
                        Constraint::new(row, Rel::Ge, Rat::one())
                    }
                })
                .collect();
            feasible_point(k, true, &cons).is_some()
        })
        .collect();
    for (c, e) in classes.iter_mut().zip(ext) {
        c.extremal = e;
    }
    Ok((walls, classes))
}

pub fn mori_walls(p: &ToricPair) -> Result<Vec<WallData>> {
    Ok(wall_classes(p)?.0)
}

/// Extremal classes with negative (K + Delta)-degree, in wall order.
pub fn negative_classes(p: &ToricPair) -> Result<Vec<CurveClass>> {
    Ok(wall_classes(p)?.1.into_iter().filter(|c| c.extremal && c.degree.is_negative()).collect())
}

/// Replaces the cones (I \ {j}) + L, j in I+, by (I \ {j}) + L, j in I-, where I is the support
/// of the relation. With a single negative ray the ray disappears; its index is returned.
pub fn contract_fan(fan: &Fan, relation: &[i64]) -> Result<(Fan, Option<usize>)> {
    let plus: BTreeSet<usize> = (0..relation.len()).filter(|&j| relation[j] > 0).collect();
    let minus: BTreeSet<usize> = (0..relation.len()).filter(|&j| relation[j] < 0).collect();
    if minus.is_empty() {
        return Err(ToricError::Invalid("a fibering class has no birational contraction".into()));
    }
    let all: BTreeSet<usize> = plus.union(&minus).copied().collect();
    let mut links: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut keep = Vec::new();
    for c in &fan.cones {
        let cs: BTreeSet<usize> = c.iter().copied().collect();
        let missing: Vec<usize> = all.difference(&cs).copied().collect();
        if missing.len() == 1 && plus.contains(&missing[0]) {
            links.insert(cs.difference(&all).copied().collect());
        } else {
            keep.push(c.clone());
        }
    }
    if links.is_empty() {
        return Err(ToricError::NotExtremal);
    }
    for l in &links {
        for &j in &minus {
            let mut c: Vec<usize> = all.iter().copied().filter(|&x| x != j).chain(l.iter().copied()).collect();
            c.sort();
            if !keep.contains(&c) {
                keep.push(c);
            }
        }
    }
    let mut removed = None;
    let mut rays = fan.rays.clone();
    if minus.len() == 1 {
        let i = *minus.iter().next().expect("one ray");
        if keep.iter().any(|c| c.contains(&i)) {
            return Err(ToricError::NotExtremal);
        }
        rays.remove(i);
        for c in keep.iter_mut() {
            for x in c.iter_mut() {
                if *x > i {
                    *x -= 1;
                }
            }
        }
        removed = Some(i);
    }
    Ok((Fan::new(fan.rank, rays, keep), removed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StepKind {
    Divisorial,
    Flip,
    MoriFiberSpace,
}

#[derive(Clone, Debug)]
pub struct MmpStep {
    pub kind: StepKind,
    pub class: CurveClass,
    /// contracted ray (index in `before`, vector) for divisorial steps
    pub contracted: Option<(usize, Vec<i64>)>,
    pub before: ToricPair,
    pub after: Option<ToricPair>,
}

impl Serialize for MmpStep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("MmpStep", 5)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("relation", &self.class.relation)?;
        st.serialize_field("degree", &fmt_rat(&self.class.degree))?;
        st.serialize_field("contracted", &self.contracted)?;
        st.serialize_field("after", &self.after.as_ref().map(|p| p.to_data()))?;
        st.end()
    }
}

/// One step of the MMP contracting the given class.
pub fn mmp_step(p: &ToricPair, class: &CurveClass) -> Result<MmpStep> {
    if class.degree.is_zero() {
        return Err(ToricError::ZeroDegree);
    }
    if class.degree.is_positive() {
        return Err(ToricError::PositiveDegree);
    }
    if !class.extremal {
        return Err(ToricError::NotExtremal);
    }
    if class.kind == WallKind::Fibering {
        return Ok(MmpStep { kind: StepKind::MoriFiberSpace, class: class.clone(), contracted: None, before: p.clone(), after: None });
    }
    let (fan, removed) = contract_fan(p.fan(), &class.relation)?;
    let mut coeffs = p.coeffs().to_vec();
    if let Some(i) = removed {
        coeffs.remove(i);
    }
    let after = ToricPair::from_fan(fan, coeffs, p.mode(), p.support() == Support::Complete)?;
    if !after.is_projective() {
        return Err(ToricError::NotProjective);
    }
    let kind = if removed.is_some() { StepKind::Divisorial } else { StepKind::Flip };
    Ok(MmpStep { kind, class: class.clone(), contracted: removed.map(|i| (i, p.rays()[i].clone())), before: p.clone(), after: Some(after) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Strategy {
    First,
    Random(u64),
    Index(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Outcome {
    MinimalModel,
    MoriFiberSpace,
    BudgetExceeded,
}

#[derive(Clone, Debug, Serialize)]
pub struct MmpRun {
    pub strategy: Strategy,
    pub steps: Vec<MmpStep>,
    pub outcome: Outcome,
    #[serde(serialize_with = "ser_pair")]
    pub initial: ToricPair,
    #[serde(serialize_with = "ser_pair")]
    pub last: ToricPair,
}

fn ser_pair<S: serde::Serializer>(p: &ToricPair, s: S) -> std::result::Result<S::Ok, S::Error> {
    PairData::serialize(&p.to_data(), s)
}

impl MmpRun {
    pub fn birational_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.kind != StepKind::MoriFiberSpace).count()
    }
}

#[derive(Debug)]
pub enum RunError {
    Toric(ToricError),
    /// the partial run is returned, never truncated silently
    BudgetExceeded(Box<MmpRun>),
}

impl From<ToricError> for RunError {
    fn from(e: ToricError) -> Self {
        RunError::Toric(e)
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Toric(e) => write!(f, "{e}"),
            RunError::BudgetExceeded(r) => write!(f, "budget exceeded after {} steps", r.steps.len()),
        }
    }
}

impl std::error::Error for RunError {}

/// Runs the MMP with the given choice rule for at most `budget` steps.
pub fn mmp_run(p: &ToricPair, strategy: Strategy, budget: usize) -> std::result::Result<MmpRun, RunError> {
    let mut rng = crate::random::rng(match strategy {
        Strategy::Random(s) => s,
        _ => 0,
    });
    let mut cur = p.clone();
    let mut steps = Vec::new();
    loop {
        let neg = negative_classes(&cur)?;
        if neg.is_empty() {
            return Ok(MmpRun { strategy, steps, outcome: Outcome::MinimalModel, initial: p.clone(), last: cur });
        }
        if steps.len() >= budget {
            let run = MmpRun { strategy, steps, outcome: Outcome::BudgetExceeded, initial: p.clone(), last: cur };
            return Err(RunError::BudgetExceeded(Box::new(run)));
        }
        let pick = match strategy {
            Strategy::First => 0,
            Strategy::Random(_) => rng.gen_range(0..neg.len()),
            Strategy::Index(k) => k % neg.len(),
        };
        let step = mmp_step(&cur, &neg[pick])?;
        match step.after.clone() {
            None => {
                steps.push(step);
                return Ok(MmpRun { strategy, steps, outcome: Outcome::MoriFiberSpace, initial: p.clone(), last: cur });
            }
            Some(a) => {
                steps.push(step);
                cur = a;
            }
        }
    }
}

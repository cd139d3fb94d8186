use super::{canonical_form, mmp_step, negative_classes, Outcome, StepKind};
use crate::error::{Result, ToricError};
use crate::toric::ToricPair;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

/// One maximal run: step kinds with the state reached after each birational step.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RunSummary {
    pub steps: Vec<(StepKind, Option<usize>)>,
    pub outcome: Outcome,
}

impl RunSummary {
    pub fn birational_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.0 != StepKind::MoriFiberSpace).count()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Enumeration {
    pub runs: Vec<RunSummary>,
    /// number of distinct runs (exact even when `runs` is truncated)
    pub run_count: u128,
    pub truncated: bool,
    /// canonical forms of the visited states; index 0 is the input
    pub states: Vec<String>,
    /// every step between visited states: (from, kind, to); `to` is None for fiber spaces
    pub edges: Vec<(usize, StepKind, Option<usize>)>,
    /// the visited pairs, indexed like `states`
    #[serde(skip)]
    pub pairs: Vec<ToricPair>,
    pub expansions: usize,
    pub max_birational_steps: usize,
    pub budget_exceeded: bool,
}

type Suffixes = Arc<BTreeSet<RunSummary>>;

struct Search {
    budget: usize,
    max_runs: usize,
    expansions: usize,
    ids: HashMap<String, usize>,
    states: Vec<String>,
    pairs: Vec<ToricPair>,
    edges: Vec<(usize, StepKind, Option<usize>)>,
    memo: HashMap<usize, (Suffixes, u128, bool)>,
    active: HashSet<usize>,
    exceeded: bool,
}

impl Search {
    fn id(&mut self, key: String, p: &ToricPair) -> usize {
        if let Some(&i) = self.ids.get(&key) {
            return i;
        }
        self.pairs.push(p.clone());
        self.states.push(key.clone());
        self.ids.insert(key, self.states.len() - 1);
        self.states.len() - 1
    }

    fn visit(&mut self, p: &ToricPair, id: usize) -> Result<(Suffixes, u128, bool)> {
        if let Some(m) = self.memo.get(&id) {
            return Ok(m.clone());
        }
        if !self.active.insert(id) {
            return Err(ToricError::Invalid("the enumeration revisited a state on the current path".into()));
        }
        if self.expansions >= self.budget {
            self.exceeded = true;
            self.active.remove(&id);
            return Ok((Arc::new(BTreeSet::new()), 0, true));
        }
        self.expansions += 1;
        let neg = negative_classes(p)?;
        let mut out: BTreeSet<RunSummary> = BTreeSet::new();
        let mut count: u128 = 0;
        let mut trunc = false;
        if neg.is_empty() {
            out.insert(RunSummary { steps: vec![], outcome: Outcome::MinimalModel });
            count = 1;
        }
        let children: Vec<Result<(StepKind, Option<(ToricPair, String)>)>> = neg
            .par_iter()
            .map(|c| {
                let s = mmp_step(p, c)?;
                Ok((s.kind, s.after.map(|a| {
                    let k = canonical_form(&a);
                    (a, k)
                })))
            })
            .collect();
        // distinct children only; a repeated (kind, state) yields the same runs
        let mut seen: HashSet<(StepKind, Option<usize>)> = HashSet::new();
        for ch in children {
            let (kind, after) = ch?;
            match after {
                None => {
                    if seen.insert((kind, None)) {
                        self.edges.push((id, kind, None));
                        out.insert(RunSummary { steps: vec![(kind, None)], outcome: Outcome::MoriFiberSpace });
                        count += 1;
                    }
                }
                Some((a, key)) => {
                    let cid = self.id(key, &a);
                    if !seen.insert((kind, Some(cid))) {
                        continue;
                    }
                    self.edges.push((id, kind, Some(cid)));
                    let (suf, c, t) = self.visit(&a, cid)?;
                    count += c;
                    trunc |= t;
                    for r in suf.iter() {
                        if out.len() >= self.max_runs {
                            trunc = true;
                            break;
                        }
                        let mut steps = vec![(kind, Some(cid))];
                        steps.extend(r.steps.iter().cloned());
                        out.insert(RunSummary { steps, outcome: r.outcome });
                    }
                }
            }
        }
        self.active.remove(&id);
        let res = (Arc::new(out), count, trunc);
        self.memo.insert(id, res.clone());
        Ok(res)
    }
}

/// Depth-first enumeration of all maximal MMP runs, branching over every negative extremal class.
/// `budget` bounds the number of distinct states expanded; `max_runs` bounds the stored runs.
pub fn enumerate_runs(p: &ToricPair, budget: usize, max_runs: usize) -> Result<Enumeration> {
    let mut s = Search {
        budget,
        max_runs,
        expansions: 0,
        ids: HashMap::new(),
        states: Vec::new(),
        pairs: Vec::new(),
        edges: Vec::new(),
        memo: HashMap::new(),
        active: HashSet::new(),
        exceeded: false,
    };
    let root = s.id(canonical_form(p), p);
    let (runs, count, trunc) = s.visit(p, root)?;
    let runs: Vec<RunSummary> = runs.iter().cloned().collect();
    let e = Enumeration {
        max_birational_steps: runs.iter().map(|r| r.birational_steps()).max().unwrap_or(0),
        runs,
        run_count: count,
        truncated: trunc,
        states: s.states,
        edges: s.edges,
        pairs: s.pairs,
        expansions: s.expansions,
        budget_exceeded: s.exceeded,
    };
    if e.budget_exceeded {
        return Err(ToricError::BudgetExceeded(e.expansions));
    }
    Ok(e)
}

//! Composite checks over an MMP run or a full enumeration: difficulty monotonicity,
//! stringy no-loop, and run length against the explicit bounds.

use crate::bounds::{explicit_bound, BoundParams};
use crate::difficulty::{coefficient_monoid, d_count, delta_m, difficulty_vector, difficulty_vector_at, lex_compare, rho_pair, termination_m, DifficultyVector};
use crate::error::Result;
use crate::mmp::{enumerate_runs, mmp_run, Enumeration, MmpRun, RunError, StepKind, Strategy};
use crate::stringy::{asymptotic_compare, stringy_e};
use crate::toric::{is_terminal, ToricPair};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Flagged,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub details: Value,
}

impl Check {
    pub fn new(name: &str, status: Status, details: Value) -> Self {
        Check { name: name.into(), status, details }
    }
    pub fn from_bool(name: &str, ok: bool, details: Value) -> Self {
        Self::new(name, if ok { Status::Pass } else { Status::Fail }, details)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckSet {
    pub delta: bool,
    pub lex: bool,
    pub stringy: bool,
    pub bound: bool,
}

impl CheckSet {
    pub const ALL: CheckSet = CheckSet { delta: true, lex: true, stringy: true, bound: true };

    pub fn parse(csv: &str) -> std::result::Result<Self, String> {
        let mut s = CheckSet { delta: false, lex: false, stringy: false, bound: false };
        for t in csv.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match t {
                "delta" => s.delta = true,
                "lex" => s.lex = true,
                "stringy" => s.stringy = true,
                "bound" | "bounds" => s.bound = true,
                "all" => s = Self::ALL,
                other => return Err(format!("unknown check {other:?}")),
            }
        }
        Ok(s)
    }
}

/// A directed graph of pairs: a single run is a path, an enumeration a DAG.
pub struct StepGraph {
    pub pairs: Vec<ToricPair>,
    /// (from, kind, to) for birational steps
    pub edges: Vec<(usize, StepKind, usize)>,
    /// longest birational run
    pub max_steps: usize,
    pub budget_exceeded: bool,
}

impl StepGraph {
    pub fn from_run(run: &MmpRun) -> Self {
        let mut pairs = vec![run.initial.clone()];
        let mut edges = Vec::new();
        for s in &run.steps {
            if let Some(a) = &s.after {
                edges.push((pairs.len() - 1, s.kind, pairs.len()));
                pairs.push(a.clone());
            }
        }
        StepGraph { max_steps: edges.len(), pairs, edges, budget_exceeded: false }
    }

    pub fn from_enumeration(e: &Enumeration) -> Self {
        StepGraph {
            pairs: e.pairs.clone(),
            edges: e.edges.iter().filter_map(|(a, k, b)| b.map(|b| (*a, *k, b))).collect(),
            max_steps: e.max_birational_steps,
            budget_exceeded: e.budget_exceeded,
        }
    }
}

pub fn run_graph(p: &ToricPair, strategy: Strategy, budget: usize) -> std::result::Result<StepGraph, RunError> {
    match mmp_run(p, strategy, budget) {
        Ok(r) => Ok(StepGraph::from_run(&r)),
        Err(RunError::BudgetExceeded(r)) => {
            let mut g = StepGraph::from_run(&r);
            g.budget_exceeded = true;
            Ok(g)
        }
        Err(e) => Err(e),
    }
}

pub fn enumeration_graph(p: &ToricPair, budget: usize, max_runs: usize) -> Result<StepGraph> {
    Ok(StepGraph::from_enumeration(&enumerate_runs(p, budget, max_runs)?))
}

fn digits(v: &DifficultyVector) -> Value {
    json!(v.digits())
}

/// Runs the selected checks; the first violation of each is reported as its witness.
pub fn verify_graph(g: &StepGraph, set: CheckSet) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    out.push(Check::from_bool("terminates", !g.budget_exceeded, json!({ "max_steps": g.max_steps, "states": g.pairs.len() })));
    let p0 = &g.pairs[0];
    let levels = difficulty_vector(p0)?.levels;
    let m = termination_m(&coefficient_monoid(&levels)?);
    let need_vectors = set.delta || set.lex || set.bound;
    let vs: Vec<DifficultyVector> = if need_vectors {
        g.pairs.par_iter().map(|q| difficulty_vector_at(q, &levels)).collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    if set.lex {
        let mut bad = None;
        for (i, (a, k, b)) in g.edges.iter().enumerate() {
            if lex_compare(&vs[*a], &vs[*b])? != Ordering::Greater {
                bad = Some(json!({ "step": i, "kind": k, "before": digits(&vs[*a]), "after": digits(&vs[*b]) }));
                break;
            }
        }
        out.push(Check::from_bool("lex", bad.is_none(), bad.unwrap_or(json!({ "steps": g.edges.len() }))));
    }
    if set.delta {
        let ds: Vec<BigInt> = vs.iter().map(|v| delta_m(v, &m)).collect();
        let mut bad = None;
        for (i, (a, k, b)) in g.edges.iter().enumerate() {
            if ds[*a] <= ds[*b] {
                bad = Some(json!({ "step": i, "kind": k, "before": ds[*a].to_string(), "after": ds[*b].to_string() }));
                break;
            }
        }
        let details = bad.clone().unwrap_or(json!({ "M": m.to_string(), "initial": ds[0].to_string(), "steps": g.edges.len() }));
        out.push(Check::from_bool("delta", bad.is_none(), details));
    }
    if set.stringy {
        let es: Vec<_> = g.pairs.par_iter().map(stringy_e).collect::<Result<_>>()?;
        let mut bad = None;
        for (i, (a, k, b)) in g.edges.iter().enumerate() {
            let o = asymptotic_compare(&es[*a], &es[*b]);
            if o != Ordering::Greater {
                bad = Some(json!({ "step": i, "kind": k, "result": format!("{o:?}"), "before": es[*a].display(), "after": es[*b].display() }));
                break;
            }
        }
        // strict decrease in a total order already rules out repeats along a path;
        // a run is also checked for pairwise distinctness directly
        if bad.is_none() && g.edges.iter().enumerate().all(|(i, (a, _, b))| *a == i && *b == i + 1) {
            'outer: for j in 0..es.len() {
                for i in 0..j {
                    if es[i] == es[j] {
                        bad = Some(json!({ "duplicate": [i, j] }));
                        break 'outer;
                    }
                }
            }
        }
        out.push(Check::from_bool("stringy", bad.is_none(), bad.unwrap_or(json!({ "initial": es[0].display(), "steps": g.edges.len() }))));
    }
    if set.bound {
        let base = rho_pair(p0) + d_count(p0)?;
        let dm = delta_m(&vs[0], &m);
        let steps = BigInt::from(g.max_steps);
        out.push(Check::from_bool("bound_delta", steps <= dm, json!({ "max_steps": g.max_steps, "delta_m": dm.to_string() })));
        if is_terminal(p0)? {
            let params = BoundParams { b: levels.clone(), rho_d: Some(base), ..Default::default() };
            let b = explicit_bound("cor_terminal", &params)?;
            let ok = b.value.covers(&steps);
            out.push(Check::from_bool("bound_terminal", ok, json!({ "max_steps": g.max_steps, "bound": b.value })));
        } else {
            out.push(Check::new("bound_terminal", Status::Flagged, json!({ "reason": "initial pair is not terminal" })));
        }
    }
    Ok(out)
}

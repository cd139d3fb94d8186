use crate::input::{divisor, i64_csv, load, rat_csv, require_pair_mode, usize_csv, InputError, Loaded};
use crate::{Args, Outcome};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use toriclab::bounds::{describe, explicit_bound, verify_volume_bounds, BoundParams};
use toriclab::difficulty::difficulty_report;
use toriclab::mmp::{enumerate_runs, mmp_run, RunError, Strategy};
use toriclab::nvol::{minimize_nvol, relative_cone, ConeSingularity};
use toriclab::rat::{fmt_rat, parse_rat};
use toriclab::stringy::{stringy_e, stringy_e_with, ResolutionChoice};
use toriclab::toric::*;
use toriclab::verify::{enumeration_graph, run_graph, verify_graph, Check, CheckSet, Status};
use toriclab::Rat;

fn v<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn need_input(a: &Args) -> Result<Loaded, InputError> {
    let path = a.input.as_ref().ok_or_else(|| InputError::new("ArgError", format!("{} needs an input pair file", a.command)))?;
    load(path)
}

fn rats(x: &[Rat]) -> Vec<String> {
    x.iter().map(fmt_rat).collect()
}

/// --h, or the ample class found when checking projectivity.
fn polarization(a: &Args, p: &ToricPair) -> Result<Vec<Rat>, InputError> {
    match &a.h {
        Some(s) => divisor(s, p.rays().len(), "h"),
        None => p.witness().map(|w| w.to_vec()).ok_or_else(|| InputError::new("ValidationError", "fan is not projective; no polarization")),
    }
}

fn strategy(a: &Args) -> Result<Strategy, InputError> {
    match a.strategy.as_deref() {
        None => Ok(a.seed.map(Strategy::Random).unwrap_or(Strategy::First)),
        Some("first") => Ok(Strategy::First),
        Some("random") => Ok(Strategy::Random(a.seed.unwrap_or(0))),
        Some(s) => match s.strip_prefix("index:").map(str::parse::<usize>) {
            Some(Ok(k)) => Ok(Strategy::Index(k)),
            _ => Err(InputError::new("ArgError", format!("bad strategy {s:?}; use first, random or index:<k>"))),
        },
    }
}

pub fn run(a: &Args) -> Result<Outcome, InputError> {
    match a.command.as_str() {
        "bounds" => bounds(a),
        "stringy" => {
            let l = need_input(a)?;
            stringy(a, l)
        }
        cmd => {
            let l = need_input(a)?;
            require_pair_mode(&l.pair, cmd)?;
            match cmd {
                "check" => check(l),
                "invariants" => invariants(a, l),
                "nvol" => nvol(a, l),
                "mld" => mld_cmd(a, l),
                "lct" => lct_cmd(a, l),
                "alpha" => alpha(a, l),
                "mmp-run" => mmp_run_cmd(a, l),
                "mmp-enumerate" => enumerate(a, l),
                "difficulty" => difficulty(l),
                "cone" => cone(a, l),
                "verify" => verify(a, l),
                _ => unreachable!("command list checked in main"),
            }
        }
    }
}

fn outcome(l: Loaded, results: Value, checks: Vec<Check>) -> Outcome {
    Outcome { digest: Some(l.digest), warnings: l.warnings, results, checks }
}

fn klt_check(p: &ToricPair) -> Check {
    let bad: Vec<usize> = (0..p.rays().len()).filter(|&i| !p.ray_a(i).is_positive()).collect();
    Check::from_bool("klt", bad.is_empty(), json!({ "rays_with_nonpositive_a": bad }))
}

fn check(l: Loaded) -> Result<Outcome, InputError> {
    let p = &l.pair;
    let terminal = is_terminal(p)?;
    let results = json!({
        "rank": p.rank(),
        "rays": p.rays(),
        "max_cones": p.cones(),
        "support": p.support(),
        "mode": p.mode(),
        "smooth": p.fan().is_smooth(),
        "projective": p.is_projective(),
        "ample_witness": p.witness().map(rats),
        "log_discrepancies": (0..p.rays().len()).map(|i| fmt_rat(&p.ray_a(i))).collect::<Vec<_>>(),
        "terminal": terminal,
    });
    let checks = vec![
        klt_check(p),
        Check::new("projective", if p.is_projective() { Status::Pass } else { Status::Flagged }, json!({})),
        Check::new("terminal", if terminal { Status::Pass } else { Status::Flagged }, json!({})),
    ];
    Ok(outcome(l, results, checks))
}

fn invariants(a: &Args, l: Loaded) -> Result<Outcome, InputError> {
    let p = &l.pair;
    let top = topological_invariants(p)?;
    let num = if p.is_complete() && p.is_projective() {
        let h = polarization(a, p)?;
        Some(json!({ "h": rats(&h), "values": v(&numerical_invariants(p, &h)?) }))
    } else {
        None
    };
    let results = json!({
        "topological": v(&top),
        "numerical": num,
        "notes": ["h_alg uses the even Betti numbers of the complete simplicial fan"],
    });
    Ok(outcome(l, results, vec![]))
}

fn nvol(a: &Args, l: Loaded) -> Result<Outcome, InputError> {
    let p = &l.pair;
    let n = p.rank();
    let nn = (n as f64).powi(n as i32);
    let cones: Vec<usize> = match &a.cone {
        None => (0..p.cones().len()).collect(),
        Some(s) => {
            let mut want = usize_csv(s, "cone")?;
            want.sort();
            let c = p.cones().iter().position(|c| {
                let mut c = c.clone();
                c.sort();
                c == want
            });
            vec![c.ok_or_else(|| InputError::new("ArgError", format!("{want:?} is not a maximal cone")))?]
        }
    };
    let kk: Vec<Rat> = p.coeffs().iter().map(|b| b - Rat::one()).collect();
    let mut out = Vec::new();
    let mut upper_bad = None;
    let mut index_bad = None;
    for &c in &cones {
        let s = ConeSingularity::from_pair_cone(p, c)?;
        let r = minimize_nvol(&s, a.tol)?;
        if r.value > nn * (1.0 + a.tol) && upper_bad.is_none() {
            upper_bad = Some(json!({ "cone": p.cones()[c], "value": r.value }));
        }
        let limit = nn / (r.value * (1.0 - a.tol));
        let mut idx = Vec::new();
        for (name, d) in p.cones()[c]
            .iter()
            .map(|&i| {
                let mut d = vec![Rat::zero(); p.rays().len()];
                d[i] = Rat::one();
                (format!("D{i}"), d)
            })
            .chain(std::iter::once(("K+Delta".to_string(), kk.clone())))
        {
            let k = local_cartier_index(p, &d, c);
            if k.to_f64().unwrap_or(f64::INFINITY) > limit && index_bad.is_none() {
                index_bad = Some(json!({ "cone": p.cones()[c], "divisor": name, "index": k.to_string(), "limit": limit }));
            }
            idx.push(json!([name, k.to_string()]));
        }
        out.push(json!({ "cone": p.cones()[c], "nvol": v(&r), "cartier_indices": idx }));
    }
    let checks = vec![
        Check::from_bool("nvol_at_most_smooth", upper_bad.is_none(), upper_bad.unwrap_or(json!({ "n^n": nn }))),
        Check::from_bool("cartier_index_bound", index_bad.is_none(), index_bad.unwrap_or(json!({}))),
    ];
    Ok(outcome(l, json!({ "tol": a.tol, "points": out }), checks))
}

fn mld_cmd(a: &Args, l: Loaded) -> Result<Outcome, InputError> {
    let sigma = a.cone.as_deref().map(|s| usize_csv(s, "cone")).transpose()?.unwrap_or_default();
    let m = mld(&l.pair, &sigma)?;
    Ok(outcome(l, json!({ "cone": sigma, "mld": fmt_rat(&m) }), vec![]))
}

fn lct_cmd(a: &Args, l: Loaded) -> Result<Outcome, InputError> {
    let p = &l.pair;
    let d = divisor(a.d.as_deref().ok_or_else(|| InputError::new("ArgError", "lct needs --d"))?, p.rays().len(), "d")?;
    let at = match &a.cone {
        Some(s) => At::Cone(usize_csv(s, "cone")?),
        None => At::Global,
    };
    let t = lct(p, &d, &at)?;
    Ok(outcome(l, json!({ "d": rats(&d), "lct": t.to_string() }), vec![]))
}

fn alpha(a: &Args, l: Loaded) -> Result<Outcome, InputError> {
    let p = &l.pair;
    let h = polarization(a, p)?;
    let t = alpha_invariant(p, &h)?;
    let results = json!({ "h": rats(&h), "alpha": t.to_string(), "notes": ["torus-invariant members of the linear series only"] });
    Ok(outcome(l, results, vec![]))
}

/// Every emitted after-fan must reload without warnings and to the same data.
fn round_trip(pairs: &[&ToricPair]) -> Check {
    for (i, q) in pairs.iter().enumerate() {
        let text = serde_json::to_string(&q.to_data()).expect("pair data");
        match crate::input::parse_pair(&text) {
            Ok((back, w)) if w.is_empty() && back.to_data() == q.to_data() => {}
            Ok((_, w)) => return Check::from_bool("round_trip", false, json!({ "step": i, "warnings": w })),
            Err(e) => return Check::from_bool("round_trip", false, json!({ "step": i, "error": e.to_json() })),
        }
    }
    Check::from_bool("round_trip", true, json!({ "fans": pairs.len() }))
}

fn mmp_run_cmd(a: &Args, l: Loaded) -> Result<Outcome, InputError> {
    let (run, done) = match mmp_run(&l.pair, strategy(a)?, a.budget) {
        Ok(r) => (r, true),
        Err(RunError::BudgetExceeded(r)) => (*r, false),
        Err(RunError::Toric(e)) => return Err(e.into()),
    };
    let afters: Vec<&ToricPair> = run.steps.iter().filter_map(|s| s.after.as_ref()).collect();
    let checks = vec![
        Check::from_bool("terminates", done, json!({ "steps": run.steps.len(), "budget": a.budget })),
        round_trip(&afters),
    ];
    Ok(outcome(l, v(&run), checks))
}

fn enumerate(a: &Args, l: Loaded) -> Result<Outcome, InputError> {
    let e = enumerate_runs(&l.pair, a.budget, a.max_runs)?;
    let checks = vec![Check::from_bool(
        "terminates",
        !e.budget_exceeded,
        json!({ "max_birational_steps": e.max_birational_steps, "budget": a.budget }),
    )];
    Ok(outcome(l, v(&e), checks))
}

fn difficulty(l: Loaded) -> Result<Outcome, InputError> {
    let r = difficulty_report(&l.pair)?;
    Ok(outcome(l, v(&r), vec![]))
}

fn stringy(a: &Args, l: Loaded) -> Result<Outcome, InputError> {
    let e = stringy_e(&l.pair)?;
    let mut checks = vec![];
    if let Some(seed) = a.seed {
        let f = stringy_e_with(&l.pair, ResolutionChoice::Random(seed))?;
        let same = f == e;
        checks.push(Check::from_bool("resolution_independence", same, json!({ "seed": seed, "other": f.display() })));
    }
    let results = json!({ "e_st": v(&e), "value_at_1": e.value_at_one().map(|x| fmt_rat(&x)) });
    Ok(outcome(l, results, checks))
}

fn cone(a: &Args, l: Loaded) -> Result<Outcome, InputError> {
    let p = &l.pair;
    let lv = i64_csv(a.l.as_deref().ok_or_else(|| InputError::new("ArgError", "cone needs --l"))?, "l")?;
    let r = a.r.ok_or_else(|| InputError::new("ArgError", "cone needs --r"))?;
    let base = a.base.as_deref().map(load).transpose()?;
    let c = relative_cone(base.as_ref().map(|b| &b.pair), p, &lv, r)?;
    let nv = minimize_nvol(&c.singularity, a.tol)?;
    let results = json!({
        "rank": c.singularity.rank(),
        "rays": c.singularity.rays(),
        "coeffs": rats(c.singularity.coeffs()),
        "e": c.e,
        "lambda": fmt_rat(&c.lambda),
        "a_e": fmt_rat(&c.a_e),
        "birational": c.birational,
        "nvol": v(&nv),
    });
    let checks = vec![
        Check::from_bool("a_e_equals_lambda", c.a_e == c.lambda, json!({ "a_e": fmt_rat(&c.a_e), "lambda": fmt_rat(&c.lambda) })),
        Check::from_bool("minus_e_is_pullback_of_l", c.neg_e_is_pullback_of_l, json!({})),
        Check::from_bool("k_plus_e_is_pullback_of_k", c.k_plus_e_is_pullback_of_k, json!({})),
    ];
    Ok(outcome(l, results, checks))
}

fn bounds(a: &Args) -> Result<Outcome, InputError> {
    let mut o = Outcome::default();
    let mut results = serde_json::Map::new();
    if let Some(f) = &a.formula {
        let params = BoundParams {
            n: a.dim,
            big_n: a.big_n,
            b: a.b.as_deref().map(|s| rat_csv(s, "b")).transpose()?.unwrap_or_default(),
            rho_d: a.rho_d,
            eps: match &a.eps {
                Some(s) => Some(parse_rat(s).ok_or_else(|| InputError::new("ArgError", format!("bad --eps {s:?}")))?),
                None => None,
            },
            e_plus: a.e_plus,
            s: a.s_param,
            q: a.q,
        };
        let r = explicit_bound(f, &params).map_err(|e| match e {
            toriclab::ToricError::UnknownFormula(_) => InputError::new("UnknownFormula", e.to_string()),
            _ => InputError::new("DomainError", e.to_string()),
        })?;
        results.insert("formula".into(), v(&r));
        results.insert("summary".into(), json!(describe(&r.value)));
    }
    if let Some(path) = &a.input {
        let l = load(path)?;
        require_pair_mode(&l.pair, "bounds")?;
        let h = polarization(a, &l.pair)?;
        let r = verify_volume_bounds(&l.pair, &h, a.tol)?;
        o.checks.push(Check::from_bool("volume_bounds", r.pass, json!({ "failing_points": r.points.iter().filter(|x| !(x.lower_bound_ok && x.alpha_chain_ok && x.index_ok)).map(|x| &x.cone).collect::<Vec<_>>() })));
        results.insert("volume".into(), v(&r));
        o.digest = Some(l.digest);
        o.warnings = l.warnings;
    }
    if results.is_empty() {
        return Err(InputError::new("ArgError", "bounds needs --formula or an input pair"));
    }
    o.results = Value::Object(results);
    Ok(o)
}

fn verify(a: &Args, l: Loaded) -> Result<Outcome, InputError> {
    let set = match &a.checks {
        Some(s) => CheckSet::parse(s).map_err(|e| InputError::new("ArgError", e))?,
        None => CheckSet::ALL,
    };
    let enumerate = a.strategy.is_none() && a.seed.is_none();
    let g = if enumerate {
        enumeration_graph(&l.pair, a.budget, a.max_runs)?
    } else {
        run_graph(&l.pair, strategy(a)?, a.budget).map_err(|e| InputError::new("ValidationError", e.to_string()))?
    };
    let checks = verify_graph(&g, set)?;
    let results = json!({
        "mode": if enumerate { "enumeration" } else { "run" },
        "states": g.pairs.len(),
        "steps": g.edges.len(),
        "max_steps": g.max_steps,
        "edges": g.edges,
    });
    Ok(outcome(l, results, checks))
}

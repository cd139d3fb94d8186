//! toriclab command line: one JSON report per invocation on stdout.

mod commands;
mod input;

use clap::Parser;
use input::InputError;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;
use toriclab::verify::{Check, Status};

pub const COMMANDS: &[&str] = &[
    "check", "invariants", "nvol", "mld", "lct", "alpha", "mmp-run", "mmp-enumerate", "difficulty", "stringy", "cone", "bounds", "verify",
];

#[derive(Parser, Debug, Clone)]
#[command(name = "toriclab", version, about = "Exact computations on toric pairs: singularity invariants, MMP runs, termination certificates")]
pub struct Args {
    /// check | invariants | nvol | mld | lct | alpha | mmp-run | mmp-enumerate | difficulty | stringy | cone | bounds | verify
    pub command: String,
    /// pair JSON file, or - for stdin
    pub input: Option<PathBuf>,
    /// relative tolerance for numerical minimization
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// step budget for MMP runs and enumerations
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    /// worker threads
    #[arg(long)]
    pub jobs: Option<usize>,
    /// human-readable rendering instead of JSON
    #[arg(long)]
    pub pretty: bool,
    /// verify: comma separated subset of delta,lex,stringy,bound
    #[arg(long)]
    pub checks: Option<String>,
    /// bounds: formula id
    #[arg(long)]
    pub formula: Option<String>,
    #[arg(long = "N")]
    pub big_n: Option<u64>,
    /// dimension parameter of a bound
    #[arg(long = "n")]
    pub dim: Option<u64>,
    #[arg(long)]
    pub eps: Option<String>,
    /// boundary coefficients, comma separated
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long = "rho-d")]
    pub rho_d: Option<u64>,
    #[arg(long = "e-plus")]
    pub e_plus: Option<u64>,
    #[arg(long = "s")]
    pub s_param: Option<u64>,
    /// coefficient set [0,1] meet (1/q)Z
    #[arg(long)]
    pub q: Option<u64>,
    /// ample divisor: one coefficient per ray, or i:c entries
    #[arg(long)]
    pub h: Option<String>,
    /// divisor for lct: one coefficient per ray, or i:c entries
    #[arg(long)]
    pub d: Option<String>,
    /// ray indices of a cone
    #[arg(long)]
    pub cone: Option<String>,
    /// cone: integer coefficients of L = -r(K + Delta)
    #[arg(long)]
    pub l: Option<String>,
    #[arg(long)]
    pub r: Option<i64>,
    /// cone: base germ JSON for a birational fibration
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// first | random | index:<k>; verify checks a single run when this or --seed is given,
    /// otherwise every run
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long = "max-runs", default_value_t = 1000)]
    pub max_runs: usize,
}

#[derive(Serialize)]
struct Report {
    command: String,
    input: Option<String>,
    input_digest: Option<String>,
    warnings: Vec<String>,
    results: Value,
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<Value>,
    timing: Value,
}

/// What a command produces before the report is assembled.
#[derive(Default)]
pub struct Outcome {
    pub digest: Option<String>,
    pub warnings: Vec<String>,
    pub results: Value,
    pub checks: Vec<Check>,
}

fn render_pretty(r: &Report) -> String {
    let mut s = format!("command: {}\n", r.command);
    if let Some(i) = &r.input {
        s += &format!("input:   {i}\n");
    }
    if let Some(d) = &r.input_digest {
        s += &format!("sha256:  {d}\n");
    }
    for w in &r.warnings {
        s += &format!("warning: {w}\n");
    }
    if let Some(e) = &r.error {
        s += &format!("error:   {}\n", serde_json::to_string(e).unwrap_or_default());
    }
    if !r.checks.is_empty() {
        let w = r.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
        s += &format!("\n{:<w$}  status   details\n", "check");
        for c in &r.checks {
            let st = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Flagged => "flagged",
            };
            s += &format!("{:<w$}  {:<7}  {}\n", c.name, st, serde_json::to_string(&c.details).unwrap_or_default());
        }
    }
    s += "\nresults:\n";
    s += &serde_json::to_string_pretty(&r.results).unwrap_or_default();
    s += &format!("\n\n{} ms\n", r.timing["elapsed_ms"]);
    s
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(j) = args.jobs {
        // a second initialization is harmless; ignore its error
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let start = Instant::now();
    let out: Result<Outcome, InputError> = if COMMANDS.contains(&args.command.as_str()) {
        commands::run(&args)
    } else {
        Err(InputError::new("UnknownCommand", format!("unknown command {:?}; expected one of {}", args.command, COMMANDS.join(", "))))
    };
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    let input = args.input.as_ref().map(|p| p.display().to_string());
    let (report, code) = match out {
        Ok(o) => {
            let failed = o.checks.iter().any(|c| c.status == Status::Fail);
            let r = Report {
                command: args.command.clone(),
                input,
                input_digest: o.digest,
                warnings: o.warnings,
                results: o.results,
                checks: o.checks,
                error: None,
                timing: json!({ "elapsed_ms": elapsed }),
            };
            (r, if failed { 1 } else { 0 })
        }
        Err(e) => {
            let r = Report {
                command: args.command.clone(),
                input,
                input_digest: None,
                warnings: vec![],
                results: Value::Null,
                checks: vec![],
                error: Some(e.to_json()),
                timing: json!({ "elapsed_ms": elapsed }),
            };
            (r, 2)
        }
    };
    if args.pretty {
        print!("{}", render_pretty(&report));
    } else {
        println!("{}", serde_json::to_string(&report).expect("report serializes"));
    }
    ExitCode::from(code)
}

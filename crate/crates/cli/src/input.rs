use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::io::Read;
use std::path::Path;
use toriclab::rat::parse_rat;
use toriclab::toric::{Mode, PairData, ToricPair};
use toriclab::Rat;

/// An error that maps to exit code 2.
#[derive(Debug)]
pub struct InputError {
    pub kind: &'static str,
    pub message: String,
    pub extra: Value,
}

impl InputError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        InputError { kind, message: message.into(), extra: Value::Null }
    }
    pub fn to_json(&self) -> Value {
        let mut v = json!({ "kind": self.kind, "message": self.message });
        if let Value::Object(m) = &self.extra {
            for (k, x) in m {
                v[k] = x.clone();
            }
        }
        v
    }
}

impl From<toriclab::ToricError> for InputError {
    fn from(e: toriclab::ToricError) -> Self {
        InputError::new("ValidationError", e.to_string())
    }
}

pub struct Loaded {
    pub pair: ToricPair,
    pub digest: String,
    pub warnings: Vec<String>,
}

pub fn read_source(path: &Path) -> Result<String, InputError> {
    let mut s = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut s).map_err(|e| InputError::new("IoError", e.to_string()))?;
    } else {
        s = std::fs::read_to_string(path).map_err(|e| InputError::new("IoError", format!("{}: {e}", path.display())))?;
    }
    Ok(s)
}

pub fn digest(text: &str) -> String {
    let h = Sha256::digest(text.as_bytes());
    h.iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses pair JSON; missing or malformed fields become ParseError with line and column.
pub fn parse_pair(text: &str) -> Result<(ToricPair, Vec<String>), InputError> {
    let data: PairData = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        let field = msg.split('`').nth(1).map(str::to_string);
        InputError { kind: "ParseError", message: msg, extra: json!({ "line": e.line(), "column": e.column(), "field": field }) }
    })?;
    Ok(ToricPair::from_data(&data)?)
}

pub fn load(path: &Path) -> Result<Loaded, InputError> {
    let text = read_source(path)?;
    let (pair, warnings) = parse_pair(&text)?;
    Ok(Loaded { pair, digest: digest(&text), warnings })
}

pub fn require_pair_mode(p: &ToricPair, command: &str) -> Result<(), InputError> {
    if p.mode() == Mode::Subpair {
        return Err(InputError::new("ValidationError", format!("mode subpair is only accepted by stringy, not by {command}")));
    }
    Ok(())
}

pub fn rat_csv(s: &str, what: &str) -> Result<Vec<Rat>, InputError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse_rat(t).ok_or_else(|| InputError::new("ArgError", format!("bad rational {t:?} in --{what}"))))
        .collect()
}

pub fn usize_csv(s: &str, what: &str) -> Result<Vec<usize>, InputError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| InputError::new("ArgError", format!("bad index {t:?} in --{what}"))))
        .collect()
}

pub fn i64_csv(s: &str, what: &str) -> Result<Vec<i64>, InputError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| InputError::new("ArgError", format!("bad integer {t:?} in --{what}"))))
        .collect()
}

/// Divisor given as `i:c` pairs or as one coefficient per ray.
pub fn divisor(s: &str, nrays: usize, what: &str) -> Result<Vec<Rat>, InputError> {
    if s.contains(':') {
        let mut d = vec![Rat::from_integer(0.into()); nrays];
        for t in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (i, c) = t.split_once(':').ok_or_else(|| InputError::new("ArgError", format!("bad entry {t:?} in --{what}")))?;
            let i: usize = i.trim().parse().map_err(|_| InputError::new("ArgError", format!("bad ray index {i:?} in --{what}")))?;
            if i >= nrays {
                return Err(InputError::new("ArgError", format!("ray {i} out of range in --{what}")));
            }
            d[i] = parse_rat(c.trim()).ok_or_else(|| InputError::new("ArgError", format!("bad rational {c:?} in --{what}")))?;
        }
        return Ok(d);
    }
    let d = rat_csv(s, what)?;
    if d.len() != nrays {
        return Err(InputError::new("ArgError", format!("--{what} needs {nrays} coefficients, got {}", d.len())));
    }
    Ok(d)
}

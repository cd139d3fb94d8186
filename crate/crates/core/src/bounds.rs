//! Explicit termination and index bounds, evaluated exactly or as rigorous log10 brackets.

use crate::difficulty::{coefficient_monoid, termination_m, CoeffMonoid};
use crate::error::{Result, ToricError};
use crate::nvol::{minimize_nvol, ConeSingularity};
use crate::rat::{ceil_int, fmt_rat, to_f64, Rat};
use crate::toric::{alpha_invariant, divisor_volume, lc_volume_lower_bound, local_cartier_index, Threshold, ToricPair};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;

/// Exact values are kept up to this many decimal digits.
pub const DIGIT_CAP: u64 = 1_000_000;
const BITS: usize = 256;

fn scale() -> BigInt {
    BigInt::one() << BITS
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

/// Bracket of S * 2 atanh(un/ud) for 0 <= un/ud <= 1/3, S = 2^BITS.
fn atanh2_fixed(un: &BigInt, ud: &BigInt) -> (BigInt, BigInt) {
    let s = scale();
    let u_lo = (un * &s).div_floor(ud);
    let u_hi = ceil_div(&(un * &s), ud);
    let sq_lo = (&u_lo * &u_lo).div_floor(&s);
    let sq_hi = ceil_div(&(&u_hi * &u_hi), &s);
    let (mut p_lo, mut p_hi) = (u_lo, u_hi);
    let (mut sum_lo, mut sum_hi) = (BigInt::zero(), BigInt::zero());
    let mut j: u64 = 0;
    loop {
        let d = BigInt::from(2 * j + 1);
        sum_lo += p_lo.div_floor(&d);
        sum_hi += ceil_div(&p_hi, &d);
        p_lo = (&p_lo * &sq_lo).div_floor(&s);
        p_hi = ceil_div(&(&p_hi * &sq_hi), &s);
        j += 1;
        if p_hi <= BigInt::from(2) {
            // remaining terms shrink by a factor 9 at least
            sum_hi += &p_hi * 2 + 2;
            break;
        }
    }
    (sum_lo * 2, sum_hi * 2)
}

fn fixed_to_rat(x: &BigInt) -> Rat {
    Rat::new(x.clone(), scale())
}

fn ln2() -> (Rat, Rat) {
    let (a, b) = atanh2_fixed(&BigInt::one(), &BigInt::from(3));
    (fixed_to_rat(&a), fixed_to_rat(&b))
}

/// Rigorous bracket of ln x for rational x >= 1.
pub fn ln_bracket(x: &Rat) -> (Rat, Rat) {
    assert!(*x >= Rat::one(), "ln bracket needs x >= 1");
    let (p, q) = (x.numer().clone(), x.denom().clone());
    let mut k = p.bits() as i64 - q.bits() as i64;
    while (&q << k as usize) > p {
        k -= 1;
    }
    let t = &q << k as usize;
    let (zl, zh) = atanh2_fixed(&(&p - &t), &(&p + &t));
    let (l2l, l2h) = ln2();
    let kk = Rat::from_integer(BigInt::from(k));
    (&kk * l2l + fixed_to_rat(&zl), &kk * l2h + fixed_to_rat(&zh))
}

fn ln10() -> (Rat, Rat) {
    let (a, b) = ln_bracket(&Rat::new(BigInt::from(5), BigInt::from(4)));
    let (l2l, l2h) = ln2();
    (a + l2l * Rat::from_integer(3.into()), b + l2h * Rat::from_integer(3.into()))
}

fn round_out(lo: Rat, hi: Rat) -> (Rat, Rat) {
    let s = Rat::from_integer(scale());
    ((&lo * &s).floor() / &s, (&hi * &s).ceil() / &s)
}

/// Rigorous bracket of log10 x for rational x >= 1.
pub fn log10_rat_bracket(x: &Rat) -> (Rat, Rat) {
    let (a, b) = ln_bracket(x);
    let (t0, t1) = ln10();
    round_out(a / t1, b / t0)
}

/// Rigorous bracket of log10 x for an integer x >= 1.
pub fn log10_bracket(x: &BigInt) -> (Rat, Rat) {
    log10_rat_bracket(&Rat::from_integer(x.clone()))
}

fn pi_bracket() -> (Rat, Rat) {
    let digits: BigInt = "314159265358979323846264338327950288419716939937510".parse().expect("digits");
    let d = BigInt::from(10).pow(50);
    (Rat::new(digits.clone(), d.clone()), Rat::new(digits + 1, d))
}

/// log10 n! by Stirling's series with its alternating remainder:
/// ln n! = n ln n - n + ln(2 pi n)/2 + 1/(12n) - theta/(360 n^3), 0 < theta < 1.
pub fn log10_factorial_stirling(n: &BigInt) -> (Rat, Rat) {
    assert!(n.is_positive());
    let nr = Rat::from_integer(n.clone());
    let (lnl, lnh) = ln_bracket(&nr);
    let (pl, ph) = pi_bracket();
    let (lpl, lph) = ln_bracket(&pl);
    let (_, lph2) = ln_bracket(&ph);
    let lph = lph.max(lph2);
    let (l2l, l2h) = ln2();
    let half = Rat::new(1.into(), 2.into());
    let corr = Rat::one() / (Rat::from_integer(12.into()) * &nr);
    let tail = Rat::one() / (Rat::from_integer(360.into()) * &nr * &nr * &nr);
    let lo = &nr * &lnl - &nr + &half * (l2l + lpl + &lnl) + &corr - tail;
    let hi = &nr * &lnh - &nr + &half * (l2h + lph + &lnh) + &corr;
    let (t0, t1) = ln10();
    round_out(lo / t1, hi / t0)
}

/// Number of decimal digits of a positive integer.
pub fn digit_count(x: &BigInt) -> u64 {
    x.abs().to_str_radix(10).len() as u64
}

#[derive(Clone, Debug, PartialEq)]
pub enum BigMagnitude {
    Exact(BigInt),
    /// lo <= log10(value) <= hi
    Log10 { lo: Rat, hi: Rat },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    Incomparable,
}

fn cap_rat() -> Rat {
    Rat::from_integer(BigInt::from(DIGIT_CAP))
}

impl BigMagnitude {
    fn from_log(lo: Rat, hi: Rat) -> Result<Self> {
        if hi.to_integer().bits() as f64 * std::f64::consts::LOG10_2 > DIGIT_CAP as f64 {
            return Err(ToricError::Unrepresentable("log10 of the value has more than 10^6 digits".into()));
        }
        Ok(BigMagnitude::Log10 { lo, hi })
    }

    fn exact(x: BigInt) -> Result<Self> {
        if x.bits() as f64 * std::f64::consts::LOG10_2 > DIGIT_CAP as f64 {
            let (lo, hi) = log10_bracket(&x);
            return Self::from_log(lo, hi);
        }
        Ok(BigMagnitude::Exact(x))
    }

    /// Bracket of log10 of the value (value >= 1).
    pub fn log10(&self) -> (Rat, Rat) {
        match self {
            BigMagnitude::Exact(x) => log10_bracket(x),
            BigMagnitude::Log10 { lo, hi } => (lo.clone(), hi.clone()),
        }
    }

    pub fn as_exact(&self) -> Option<&BigInt> {
        match self {
            BigMagnitude::Exact(x) => Some(x),
            _ => None,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if let (BigMagnitude::Exact(a), BigMagnitude::Exact(b)) = (self, other) {
            if (a.bits() + b.bits()) as f64 * std::f64::consts::LOG10_2 <= DIGIT_CAP as f64 + 1.0 {
                return Self::exact(a * b);
            }
        }
        let (a0, a1) = self.log10();
        let (b0, b1) = other.log10();
        Self::from_log(a0 + b0, a1 + b1)
    }

    /// value^e for an exact exponent e >= 0.
    pub fn pow(&self, e: &BigInt) -> Result<Self> {
        if e.is_zero() {
            return Ok(BigMagnitude::Exact(BigInt::one()));
        }
        if let BigMagnitude::Exact(a) = self {
            if a.is_one() {
                return Ok(self.clone());
            }
            let est = a.bits() as f64 * std::f64::consts::LOG10_2 * e.to_f64().unwrap_or(f64::INFINITY);
            if est <= DIGIT_CAP as f64 {
                return Self::exact(a.pow(e.to_u32().expect("small exponent")));
            }
        }
        let (a0, a1) = self.log10();
        let er = Rat::from_integer(e.clone());
        Self::from_log(&er * a0, &er * a1)
    }

    /// Comparison with a nonnegative integer, interval semantics for brackets.
    pub fn compare_int(&self, x: &BigInt) -> Comparison {
        match self {
            BigMagnitude::Exact(a) => match a.cmp(x) {
                Ordering::Less => Comparison::Less,
                Ordering::Equal => Comparison::Equal,
                Ordering::Greater => Comparison::Greater,
            },
            BigMagnitude::Log10 { lo, hi } => {
                if !x.is_positive() {
                    return Comparison::Greater;
                }
                let (x0, x1) = log10_bracket(x);
                if *lo > x1 {
                    Comparison::Greater
                } else if *hi < x0 {
                    Comparison::Less
                } else {
                    Comparison::Incomparable
                }
            }
        }
    }

    /// The bound is known to be at least x.
    pub fn covers(&self, x: &BigInt) -> bool {
        matches!(self.compare_int(x), Comparison::Greater | Comparison::Equal)
    }
}

/// Decimal string with `sig` significant digits, truncated toward zero.
pub fn decimal(r: &Rat, sig: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let neg = r.is_negative();
    let a = r.abs();
    let int_digits = if a >= Rat::one() { digit_count(&a.to_integer()) as i64 } else { 0 };
    let frac = (sig as i64 - int_digits).max(0) as u32;
    let scaled = (a * Rat::from_integer(BigInt::from(10).pow(frac))).to_integer();
    let mut s = scaled.to_str_radix(10);
    if frac > 0 {
        while s.len() <= frac as usize {
            s.insert(0, '0');
        }
        s.insert(s.len() - frac as usize, '.');
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

fn sci(r: &Rat) -> String {
    let x = to_f64(r);
    format!("{x:.3e}")
}

impl Serialize for BigMagnitude {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        match self {
            BigMagnitude::Exact(x) => m.serialize_entry("exact", &x.to_string())?,
            BigMagnitude::Log10 { lo, hi } => {
                let two = Rat::from_integer(2.into());
                m.serialize_entry("log10", &decimal(&((lo + hi) / &two), 40))?;
                m.serialize_entry("err", &sci(&((hi - lo) / two)))?;
            }
        }
        m.end()
    }
}

fn product(lo: u64, hi: u64) -> BigInt {
    if hi - lo < 64 {
        return (lo..hi).fold(BigInt::one(), |a, k| a * k);
    }
    let mid = lo + (hi - lo) / 2;
    let (a, b) = rayon::join(|| product(lo, mid), || product(mid, hi));
    a * b
}

/// n! exactly when it has at most DIGIT_CAP digits, else a Stirling bracket.
pub fn factorial(n: &BigInt) -> Result<BigMagnitude> {
    if n.is_negative() {
        return Err(ToricError::DomainError("negative factorial".into()));
    }
    if *n <= BigInt::one() {
        return Ok(BigMagnitude::Exact(BigInt::one()));
    }
    let (lo, hi) = log10_factorial_stirling(n);
    if hi <= cap_rat() {
        let k = n.to_u64().expect("small");
        return Ok(BigMagnitude::Exact(product(2, k + 1)));
    }
    BigMagnitude::from_log(lo, hi)
}

fn exact_int(m: &BigMagnitude, what: &str) -> Result<BigInt> {
    m.as_exact().cloned().ok_or_else(|| ToricError::Unrepresentable(format!("{what} is too large to use as an exact exponent or argument")))
}

/// Parameters of the explicit bounds; each formula reads the ones it needs.
#[derive(Clone, Debug, Default, Serialize)]
pub struct BoundParams {
    /// dimension
    pub n: Option<u64>,
    #[serde(rename = "N")]
    pub big_n: Option<u64>,
    /// boundary coefficients
    #[serde(serialize_with = "crate::rat::serde_str::rat_vec")]
    pub b: Vec<Rat>,
    pub rho_d: Option<u64>,
    #[serde(serialize_with = "crate::rat::serde_str::opt_rat")]
    pub eps: Option<Rat>,
    pub e_plus: Option<u64>,
    pub s: Option<u64>,
    /// S = [0,1] meet (1/q)Z instead of the monoid of `b`
    pub q: Option<u64>,
}

pub const FORMULAS: &[&str] = &[
    "cor_terminal",
    "thm_4fold",
    "thm_4fold_boundary",
    "thm_3fold",
    "cor_index_big_boundary",
    "cor_index_big_canonical",
    "cor_index_3fold",
    "lem_fix_discrep",
    "lem_log_smooth_e",
    "lem_log_smooth_s",
];

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub formula: String,
    pub params: BoundParams,
    pub value: BigMagnitude,
    /// named intermediate quantities (e.g. M)
    pub intermediates: Vec<(String, BigMagnitude)>,
}

fn need<T: Clone>(x: &Option<T>, name: &str) -> Result<T> {
    x.clone().ok_or_else(|| ToricError::DomainError(format!("missing parameter {name}")))
}

fn positive(x: u64, name: &str) -> Result<BigInt> {
    if x == 0 {
        return Err(ToricError::DomainError(format!("{name} must be positive")));
    }
    Ok(BigInt::from(x))
}

fn ex(x: BigInt) -> BigMagnitude {
    BigMagnitude::Exact(x)
}

/// M = (2 + ceil(1/min S\0) ceil(1/(1 - max S\1))) |S|.
fn discrete_m(s: &CoeffMonoid) -> BigInt {
    let inner: Vec<&Rat> = s.elements.iter().filter(|x| !x.is_zero() && !x.is_one()).collect();
    let (mn, mx) = match (inner.first(), inner.last()) {
        (Some(a), Some(b)) => ((*a).clone(), (*b).clone()),
        _ => (Rat::one(), Rat::zero()),
    };
    (BigInt::from(2) + ceil_int(&(Rat::one() / mn)) * ceil_int(&(Rat::one() / (Rat::one() - mx)))) * BigInt::from(s.len())
}

pub fn explicit_bound(formula: &str, params: &BoundParams) -> Result<BoundReport> {
    let mut inter: Vec<(String, BigMagnitude)> = Vec::new();
    let value = match formula {
        "cor_terminal" => {
            let s = coefficient_monoid(&params.b)?;
            let k = s.generators.len() as u32;
            let m = termination_m(&s);
            inter.push(("M".into(), ex(m.clone())));
            inter.push(("|S|".into(), ex(BigInt::from(s.len()))));
            ex(m.pow(2 * k + 2) * BigInt::from(need(&params.rho_d, "rho_d")?))
        }
        "thm_4fold" | "thm_4fold_boundary" => {
            let n = positive(need(&params.big_n, "N")?, "N")?;
            let arg = (BigInt::from(2) * n).pow(9);
            let m = factorial(&arg)?;
            inter.push(("M".into(), m.clone()));
            let me = exact_int(&m, "M")?;
            m.pow(&me)?
        }
        "thm_3fold" => {
            let n = positive(need(&params.big_n, "N")?, "N")?;
            let f = factorial(&(n.pow(5) + BigInt::from(2) * &n))?;
            let e = BigInt::from(2).pow(n.pow(4).to_u32().ok_or_else(|| ToricError::Unrepresentable("2^(N^4)".into()))?);
            let m = f.pow(&e)?;
            inter.push(("M".into(), m.clone()));
            let mf = factorial(&exact_int(&m, "M")?)?;
            inter.push(("M!".into(), mf.clone()));
            let mfe = exact_int(&mf, "M!")?;
            let base = ex(n.clone()).mul(&mf)?;
            let expo = BigInt::from(8) * n.pow(8) * (mfe + 1);
            ex(BigInt::from(3)).mul(&base.pow(&expo)?)?
        }
        "cor_index_big_boundary" | "cor_index_big_canonical" => {
            let n = positive(need(&params.n, "n")?, "n")?;
            let big = positive(need(&params.big_n, "N")?, "N")?;
            let nn = n.pow(n.to_u32().expect("dimension"));
            factorial(&(nn * big.pow(2 * n.to_u32().expect("dimension") + 1)))?
        }
        "cor_index_3fold" => {
            let e = need(&params.e_plus, "e_plus")?;
            let eps = need(&params.eps, "eps")?;
            if !eps.is_positive() {
                return Err(ToricError::DomainError("eps must be positive".into()));
            }
            let c = ceil_int(&(Rat::from_integer(BigInt::from(e + 3)) / eps));
            let f = factorial(&c)?;
            inter.push(("ceil((e+3)/eps)!".into(), f.clone()));
            f.pow(&BigInt::from(2).pow((1 + e) as u32))?
        }
        "lem_fix_discrep" => {
            let s = match params.q {
                Some(q) => {
                    let q = positive(q, "q")?;
                    let qq = q.to_i64().ok_or_else(|| ToricError::Unrepresentable("q".into()))?;
                    let elements = (0..=qq).map(|i| Rat::new(i.into(), q.clone())).collect();
                    CoeffMonoid { generators: vec![], elements }
                }
                None => coefficient_monoid(&params.b)?,
            };
            let k = BigInt::from(need(&params.e_plus, "e_plus")?);
            let m = discrete_m(&s);
            inter.push(("M".into(), ex(m.clone())));
            let expo = BigInt::from(2) * (&k + 1) * (&k + 1) * BigInt::from(s.len());
            ex(m).pow(&expo)?.mul(&ex(BigInt::from(need(&params.s, "s")?)))?
        }
        "lem_log_smooth_e" => {
            let n = need(&params.n, "n")?;
            ex(positive(need(&params.big_n, "N")?, "N")?.pow(n as u32 + 1))
        }
        "lem_log_smooth_s" => {
            let n = need(&params.n, "n")?;
            ex(BigInt::from(3) * positive(need(&params.big_n, "N")?, "N")?.pow(2 * n as u32 + 3))
        }
        other => return Err(ToricError::UnknownFormula(other.into())),
    };
    Ok(BoundReport { formula: formula.into(), params: params.clone(), value, intermediates: inter })
}

#[derive(Clone, Debug, Serialize)]
pub struct PointCheck {
    pub cone: Vec<usize>,
    pub nvol: f64,
    pub nvol_with_boundary: f64,
    pub lower_bound_ok: bool,
    pub alpha_chain_ok: bool,
    /// (ray, local Cartier index of D_ray)
    pub indices: Vec<(usize, String)>,
    pub index_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeReport {
    #[serde(serialize_with = "crate::rat::serde_str::rat")]
    pub lc_volume_lower_bound: Rat,
    pub alpha: String,
    #[serde(serialize_with = "crate::rat::serde_str::rat")]
    pub vol_h: Rat,
    #[serde(serialize_with = "crate::rat::serde_str::rat")]
    pub alpha_chain: Rat,
    pub points: Vec<PointCheck>,
    pub pass: bool,
}

/// At every torus-fixed point: nvol(x, X) against the log canonical volume lower bound,
/// nvol(x, X, Delta) against alpha^n vol(H), and Cartier indices against n^n / nvol.
pub fn verify_volume_bounds(p: &ToricPair, h: &[Rat], tol: f64) -> Result<VolumeReport> {
    p.require_projective()?;
    if !p.is_complete() {
        return Err(ToricError::NotComplete("volume bounds need a complete fan".into()));
    }
    if !p.is_ample(h) {
        return Err(ToricError::NotAmple);
    }
    let delta = p.coeffs().to_vec();
    if !divisor_volume(p, &delta).is_positive() {
        return Err(ToricError::NotBig);
    }
    let lower = lc_volume_lower_bound(p, &delta, h).ok_or(ToricError::NotBig)?;
    let alpha = alpha_invariant(p, h)?;
    let vol_h = divisor_volume(p, h);
    let n = p.rank();
    let chain = match &alpha {
        Threshold::Finite(a) => num_traits::pow(a.clone(), n) * &vol_h,
        Threshold::Infinite => return Err(ToricError::Invalid("alpha invariant is infinite".into())),
    };
    let nn = (n as f64).powi(n as i32);
    let nr = p.rays().len();
    let mut points = Vec::new();
    for (c, cone) in p.cones().iter().enumerate() {
        let rays = p.fan().cone_rays(c);
        let zero = ConeSingularity::new(n, rays.clone(), vec![Rat::zero(); cone.len()])?;
        let with = ConeSingularity::new(n, rays, cone.iter().map(|&i| delta[i].clone()).collect())?;
        let v0 = minimize_nvol(&zero, tol)?.value;
        let v1 = minimize_nvol(&with, tol)?.value;
        let lower_bound_ok = v0 * (1.0 + tol) >= to_f64(&lower);
        let alpha_chain_ok = v1 * (1.0 + tol) >= to_f64(&chain);
        let mut indices = Vec::new();
        let mut index_ok = true;
        for &i in cone {
            let mut a = vec![Rat::zero(); nr];
            a[i] = Rat::one();
            let r = local_cartier_index(p, &a, c);
            if r.to_f64().unwrap_or(f64::INFINITY) > nn / (v1 * (1.0 - tol)) {
                index_ok = false;
            }
            indices.push((i, r.to_string()));
        }
        points.push(PointCheck { cone: cone.clone(), nvol: v0, nvol_with_boundary: v1, lower_bound_ok, alpha_chain_ok, indices, index_ok });
    }
    let pass = points.iter().all(|x| x.lower_bound_ok && x.alpha_chain_ok && x.index_ok);
    Ok(VolumeReport { lc_volume_lower_bound: lower, alpha: alpha.to_string(), vol_h, alpha_chain: chain, points, pass })
}

/// Run length against a bound: exact comparison, or the bracket's lower end must exceed it.
pub fn run_within_bound(steps: usize, bound: &BigMagnitude) -> bool {
    bound.covers(&BigInt::from(steps))
}

pub fn describe(m: &BigMagnitude) -> String {
    match m {
        BigMagnitude::Exact(x) => {
            let s = x.to_string();
            if s.len() > 60 {
                format!("{}...({} digits)", &s[..30], s.len())
            } else {
                s
            }
        }
        BigMagnitude::Log10 { lo, hi } => format!("10^[{}, {}]", decimal(lo, 20), decimal(hi, 20)),
    }
}

#[allow(dead_code)]
fn fmt(r: &Rat) -> String {
    fmt_rat(r)
}

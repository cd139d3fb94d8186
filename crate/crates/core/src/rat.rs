//! Rational helpers over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn ri(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rvec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| ri(x)).collect()
}

/// Parses "p/q", "p" or a plain decimal such as "0.5".
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rat::new(p, q));
    }
    if let Some((a, b)) = s.split_once('.') {
        if b.is_empty() || !b.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = a.starts_with('-');
        let whole: BigInt = if a.is_empty() || a == "-" { BigInt::zero() } else { a.parse().ok()? };
        let frac: BigInt = b.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), b.len());
        let f = Rat::new(frac, den);
        let w = Rat::from_integer(whole.abs());
        let v = w + f;
        return Some(if neg { -v } else { v });
    }
    let p: BigInt = s.parse().ok()?;
    Some(Rat::from_integer(p))
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // very large numerators: fall back through logs
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Nearby rational with denominator `den` (rounded to nearest).
pub fn from_f64_den(x: f64, den: i64) -> Rat {
    let n = (x * den as f64).round() as i64;
    rat(n, den)
}

pub fn ceil_int(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

pub fn floor_int(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_ri(a: &[Rat], b: &[i64]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, &y)| {
        if y == 0 {
            acc
        } else {
            acc + x * BigInt::from(y)
        }
    })
}

pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Divides by the gcd of the entries. Zero vectors are returned unchanged.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g <= 1 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive_from_rat(v: &[Rat]) -> Vec<i64> {
    let l = lcm_denoms(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    ints.iter()
        .map(|x| if g.is_zero() { 0 } else { (x / &g).to_i64().expect("entry overflows i64") })
        .collect()
}

pub fn is_positive(r: &Rat) -> bool {
    r.is_positive()
}

/// Serde adapters writing rationals and big integers as strings.
pub mod serde_str {
    use super::{fmt_rat, parse_rat, Rat};
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn rat<S: Serializer>(x: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(x))
    }
    pub fn de_rat<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s}")))
    }
    pub fn opt_rat<S: Serializer>(x: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(r) => s.serialize_some(&fmt_rat(r)),
            None => s.serialize_none(),
        }
    }
    pub fn rat_vec<S: Serializer>(x: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(x.iter().map(fmt_rat))
    }
    pub fn int<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }
    pub fn int_vec<S: Serializer>(x: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(x.iter().map(|v| v.to_string()))
    }
}

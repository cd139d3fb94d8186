use super::pair::{Mode, Support, ToricPair};
use crate::error::{Result, ToricError};
use crate::rat::Rat;
use num_traits::One;

#[derive(Clone, Debug)]
pub struct Terminalization {
    pub pair: ToricPair,
    /// inserted rays in insertion order with their log discrepancies
    pub inserted: Vec<(Vec<i64>, Rat)>,
}

/// No exceptional toric valuation with A <= 1.
pub fn is_terminal(p: &ToricPair) -> Result<bool> {
    Ok(p.exceptional_below(&Rat::one(), false)?.is_empty())
}

/// Extracts every toric divisor with A <= 1 by repeated star subdivision (smallest A first,
/// ties broken lexicographically). Each new ray gets coefficient 1 - A, so the log discrepancy
/// function is unchanged.
pub fn terminalize(p: &ToricPair) -> Result<Terminalization> {
    if p.mode() != Mode::Pair {
        return Err(ToricError::WrongMode);
    }
    let mut cur = p.clone();
    let mut inserted = Vec::new();
    loop {
        let mut pts = cur.exceptional_below(&Rat::one(), false)?;
        if pts.is_empty() {
            return Ok(Terminalization { pair: cur, inserted });
        }
        pts.sort_by(|a, b| a.a.cmp(&b.a).then_with(|| a.v.cmp(&b.v)));
        let q = pts.swap_remove(0);
        let fan = cur.fan().star_subdivide(&q.v)?;
        let mut coeffs = cur.coeffs().to_vec();
        coeffs.push(Rat::one() - &q.a);
        cur = ToricPair::from_fan(fan, coeffs, Mode::Pair, cur.support() == Support::Complete)?;
        inserted.push((q.v, q.a));
    }
}

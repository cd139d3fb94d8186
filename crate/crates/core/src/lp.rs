//! Exact two-phase simplex over Q with Bland's rule.

use crate::rat::Rat;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Rel,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rat>, rel: Rel, rhs: Rat) -> Self {
        Constraint { coeffs, rel, rhs }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpResult {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rat>>, // last entry is the rhs
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *x -= p * &f;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes cost·x from the current feasible basis. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rat], allowed: &[bool]) -> bool {
        loop {
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    let cb = &cost[self.basis[i]];
                    if !cb.is_zero() && !row[j].is_zero() {
                        r -= cb * &row[j];
                    }
                }
                if r.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return true };
            let mut best: Option<(usize, Rat)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[j].is_positive() {
                    let ratio = &row[self.ncols] / &row[j];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else { return false };
            self.pivot(r, j);
        }
    }

    fn value(&self, cost: &[Rat]) -> Rat {
        self.basis.iter().enumerate().fold(Rat::zero(), |acc, (i, &b)| acc + &cost[b] * &self.rows[i][self.ncols])
    }
}

/// Maximizes `objective` (or finds any feasible point when None) subject to the constraints.
/// Variables are sign-free when `free` is set, otherwise nonnegative.
pub fn solve_lp(nvars: usize, free: bool, cons: &[Constraint], objective: Option<&[Rat]>) -> LpResult {
    let nstruct = if free { 2 * nvars } else { nvars };
    let m = cons.len();
    let n_slack = cons.iter().filter(|c| c.rel != Rel::Eq).count();
    let n_art = cons.iter().filter(|c| {
        let flip = c.rhs.is_negative();
        !matches!((c.rel, flip), (Rel::Le, false) | (Rel::Ge, true))
    }).count();
    let ncols = nstruct + n_slack + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut is_art = vec![false; ncols];
    let mut slack_at = nstruct;
    let mut art_at = nstruct + n_slack;
    for c in cons {
        let mut row = vec![Rat::zero(); ncols + 1];
        let flip = c.rhs.is_negative();
        let sgn = if flip { -Rat::one() } else { Rat::one() };
        for (j, a) in c.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if free {
                row[2 * j] = a * &sgn;
                row[2 * j + 1] = -(a * &sgn);
            } else {
                row[j] = a * &sgn;
            }
        }
        row[ncols] = &c.rhs * &sgn;
        let rel = match (c.rel, flip) {
            (Rel::Le, true) => Rel::Ge,
            (Rel::Ge, true) => Rel::Le,
            (r, _) => r,
        };
        match rel {
            Rel::Le => {
                row[slack_at] = Rat::one();
                basis.push(slack_at);
                slack_at += 1;
            }
            Rel::Ge => {
                row[slack_at] = -Rat::one();
                slack_at += 1;
                row[art_at] = Rat::one();
                is_art[art_at] = true;
                basis.push(art_at);
                art_at += 1;
            }
            Rel::Eq => {
                row[art_at] = Rat::one();
                is_art[art_at] = true;
                basis.push(art_at);
                art_at += 1;
            }
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, ncols };
    if n_art > 0 {
        let cost: Vec<Rat> = (0..ncols).map(|j| if is_art[j] { -Rat::one() } else { Rat::zero() }).collect();
        let allowed = vec![true; ncols];
        t.optimize(&cost, &allowed);
        if t.value(&cost).is_negative() {
            return LpResult::Infeasible;
        }
        // drive artificials out of the basis
        let mut i = 0;
        while i < t.rows.len() {
            if is_art[t.basis[i]] {
                if let Some(j) = (0..ncols).find(|&j| !is_art[j] && !t.rows[i][j].is_zero()) {
                    t.pivot(i, j);
                    i += 1;
                } else {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            } else {
                i += 1;
            }
        }
    }
    let allowed: Vec<bool> = (0..ncols).map(|j| !is_art[j]).collect();
    let mut cost = vec![Rat::zero(); ncols];
    if let Some(obj) = objective {
        for (j, c) in obj.iter().enumerate() {
            if free {
                cost[2 * j] = c.clone();
                cost[2 * j + 1] = -c.clone();
            } else {
                cost[j] = c.clone();
            }
        }
        if !t.optimize(&cost, &allowed) {
            return LpResult::Unbounded;
        }
    }
    let mut full = vec![Rat::zero(); ncols];
    for (i, &b) in t.basis.iter().enumerate() {
        full[b] = t.rows[i][ncols].clone();
    }
    let x: Vec<Rat> = (0..nvars)
        .map(|j| if free { &full[2 * j] - &full[2 * j + 1] } else { full[j].clone() })
        .collect();
    let value = objective.map(|o| crate::rat::dot(o, &x)).unwrap_or_else(Rat::zero);
    LpResult::Optimal { x, value }
}

pub fn feasible_point(nvars: usize, free: bool, cons: &[Constraint]) -> Option<Vec<Rat>> {
    match solve_lp(nvars, free, cons, None) {
        LpResult::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

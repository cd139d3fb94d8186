//! Exact linear algebra over Q and Z.

use crate::rat::{ri, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Mat = Vec<Vec<Rat>>;

pub fn to_rat(m: &[Vec<i64>]) -> Mat {
    m.iter().map(|r| r.iter().map(|&x| ri(x)).collect()).collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Rat>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

pub fn rank_i64(m: &[Vec<i64>]) -> usize {
    rank(&to_rat(m))
}

/// Basis of {x : m x = 0}, where `ncols` is the length of x.
pub fn kernel(m: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); ncols];
            x[f] = Rat::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -a[i][f].clone();
            }
            x
        })
        .collect()
}

/// Solves a square system; None when singular.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Mat = a.iter().zip(b).map(|(r, x)| {
        let mut r = r.clone();
        r.push(x.clone());
        r
    }).collect();
    let piv = rref(&mut m);
    if piv.len() < n || piv.iter().any(|&p| p >= n) {
        return None;
    }
    Some(m.iter().map(|r| r[n].clone()).collect())
}

/// Any solution of a possibly non-square consistent system.
pub fn solve_any(a: &[Vec<Rat>], b: &[Rat], ncols: usize) -> Option<Vec<Rat>> {
    let mut m: Mat = a.iter().zip(b).map(|(r, x)| {
        let mut r = r.clone();
        r.push(x.clone());
        r
    }).collect();
    let piv = rref(&mut m);
    if piv.contains(&ncols) {
        return None;
    }
    let mut x = vec![Rat::zero(); ncols];
    for (i, &p) in piv.iter().enumerate() {
        x[p] = m[i][ncols].clone();
    }
    Some(x)
}

pub fn inverse(a: &[Vec<Rat>]) -> Option<Mat> {
    let n = a.len();
    let mut m: Mat = a.iter().enumerate().map(|(i, r)| {
        let mut r = r.clone();
        for j in 0..n {
            r.push(if i == j { Rat::one() } else { Rat::zero() });
        }
        r
    }).collect();
    let piv = rref(&mut m);
    if piv.len() < n || piv.iter().any(|&p| p >= n) {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(a: &[Vec<Rat>], x: &[Rat]) -> Vec<Rat> {
    a.iter().map(|r| crate::rat::dot(r, x)).collect()
}

/// Bareiss determinant over the integers.
pub fn det_big(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Determinant of a small integer matrix, i128 Bareiss with a big-integer fallback.
pub fn det_i64(m: &[Vec<i64>]) -> BigInt {
    match det_i128(m) {
        Some(d) => BigInt::from(d),
        None => det_big(&m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect::<Vec<_>>()),
    }
}

fn det_i128(m: &[Vec<i64>]) -> Option<i128> {
    let n = m.len();
    if n == 0 {
        return Some(1);
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else { return Some(0) };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j].checked_mul(a[k][k])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = v / prev;
            }
        }
        prev = a[k][k];
    }
    Some(sign * a[n - 1][n - 1])
}

pub fn det_small(m: &[Vec<i64>]) -> i64 {
    det_i64(m).to_i64().expect("determinant overflow")
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    combinations(n, k)
}

/// gcd of the maximal minors of the matrix whose rows are `vs` (k rows, n columns, k ≤ n):
/// the index of the lattice spanned by `vs` inside its saturation.
pub fn gcd_maximal_minors(vs: &[Vec<i64>]) -> BigInt {
    let k = vs.len();
    if k == 0 {
        return BigInt::one();
    }
    let n = vs[0].len();
    let mut g = BigInt::zero();
    for cols in combinations(n, k) {
        let sub: Vec<Vec<i64>> = vs.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
        g = g.gcd(&det_i64(&sub));
        if g.is_one() {
            break;
        }
    }
    g.abs()
}

/// Integer basis (not necessarily saturated) of the rational kernel of an integer matrix.
pub fn int_kernel(m: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    kernel(&to_rat(m), ncols).iter().map(|v| crate::rat::primitive_from_rat(v)).collect()
}

use crate::rat::fmt_rat;
use crate::toric::ToricPair;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Lexicographically smallest description of the pair over all signed permutations of the
/// coordinates. Pairs related by a general unimodular map may still get different forms.
/// Above rank 4 only the identity is used (the group gets too big to scan).
pub fn canonical_form(p: &ToricPair) -> String {
    let n = p.rank();
    let mut best: Option<String> = None;
    let (perms, nsigns) = if n <= 4 { (permutations(n), 1u32 << n) } else { (vec![(0..n).collect()], 1) };
    for perm in perms {
        for signs in 0u32..nsigns {
            let mut rays: Vec<(Vec<i64>, String, usize)> = p
                .rays()
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let w = (0..n).map(|j| if signs >> j & 1 == 1 { -v[perm[j]] } else { v[perm[j]] }).collect();
                    (w, fmt_rat(&p.coeffs()[i]), i)
                })
                .collect();
            rays.sort();
            let mut pos = vec![0; rays.len()];
            for (k, r) in rays.iter().enumerate() {
                pos[r.2] = k;
            }
            let mut cones: Vec<Vec<usize>> = p
                .cones()
                .iter()
                .map(|c| {
                    let mut d: Vec<usize> = c.iter().map(|&i| pos[i]).collect();
                    d.sort();
                    d
                })
                .collect();
            cones.sort();
            let key = format!("{:?}|{:?}", rays.iter().map(|r| (&r.0, &r.1)).collect::<Vec<_>>(), cones);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
    }
    best.unwrap_or_default()
}

//! Small dense exact linear algebra over `Q` (dimensions never exceed a
//! handful in this engine).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Q;

pub(crate) fn to_q(v: &[i64]) -> Vec<Q> {
    v.iter()
        .map(|&x| Q::from_integer(BigInt::from(x)))
        .collect()
}

/// Row-reduces `m` in place and returns the pivot columns.
fn row_reduce(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(crate) fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m).len()
}

/// Solves `Σ c_i · vectors[i] = target`. Returns `None` if the target is
/// not in the span; the vectors must be linearly independent.
pub(crate) fn coords_in_span(vectors: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    let n = target.len();
    let k = vectors.len();
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row: Vec<Q> = vectors.iter().map(|v| v[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = row_reduce(&mut m);
    if pivots.contains(&k) {
        return None;
    }
    debug_assert_eq!(pivots.len(), k, "vectors must be independent");
    let mut out = vec![Q::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        out[c] = m[r][k].clone();
    }
    Some(out)
}

/// Solves the square system `a · x = b`, `None` if singular.
pub(crate) fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut m);
    if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// Inverse of a square matrix, `None` if singular.
pub(crate) fn inverse(a: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let pivots = row_reduce(&mut m);
    if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub(crate) fn det_int(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    match n {
        0 => BigInt::one(),
        1 => BigInt::from(m[0][0]),
        _ => {
            let mut acc = BigInt::zero();
            for j in 0..n {
                if m[0][j] == 0 {
                    continue;
                }
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let term = BigInt::from(m[0][j]) * det_int(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

/// gcd of all maximal minors of the `k × n` integer matrix `rows`; the rows
/// extend to a lattice basis iff this is one.
pub(crate) fn maximal_minor_gcd(rows: &[Vec<i64>]) -> BigInt {
    let k = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if k == 0 {
        return BigInt::one();
    }
    let mut g = BigInt::zero();
    for cols in subsets(n, k) {
        let minor: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        g = g.gcd(&det_int(&minor));
    }
    g
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Decides whether the homogeneous strict system `⟨row, y⟩ > 0` (all rows)
/// has a real solution, by Fourier–Motzkin elimination.
pub(crate) fn strict_system_feasible(rows: &[Vec<Q>]) -> bool {
    let mut rows: Vec<Vec<Q>> = rows.to_vec();
    let vars = rows.first().map_or(0, Vec::len);
    for v in 0..vars {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut keep = Vec::new();
        for r in rows {
            if r[v].is_positive() {
                pos.push(r);
            } else if r[v].is_negative() {
                neg.push(r);
            } else {
                keep.push(r);
            }
        }
        for p in &pos {
            for n in &neg {
                // p[v] > 0, n[v] < 0: combine to cancel variable v
                let a = -n[v].clone();
                let b = p[v].clone();
                let combined: Vec<Q> = p.iter().zip(n).map(|(x, y)| x * &a + y * &b).collect();
                keep.push(combined);
            }
        }
        rows = dedup_rows(keep);
    }
    // remaining rows read 0 > 0
    rows.is_empty()
}

fn dedup_rows(mut rows: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    for r in rows.iter_mut() {
        // normalize by the first nonzero absolute value to curb growth
        if let Some(p) = r.iter().find(|x| !x.is_zero()).map(|x| x.abs()) {
            for x in r.iter_mut() {
                *x /= &p;
            }
        }
    }
    rows.sort();
    rows.dedup();
    rows
}

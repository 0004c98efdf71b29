//! Small integer-matrix helpers: gcds, determinants, and unimodular row reduction.

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::linalg::{self, q, Q};

pub fn gcd_vec(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact determinant of a square integer matrix.
pub fn det_i64(m: &[Vec<i64>]) -> i64 {
    if m.is_empty() {
        return 1;
    }
    let d = linalg::det(&linalg::from_i64(m));
    d.to_integer().to_i64().expect("determinant overflow")
}

/// Finds a unimodular `p` (rows x rows) such that `p * cols` is upper triangular,
/// where `cols` is given as a list of column vectors of length `rows`.
/// Returns `(p, p * cols)` with the transformed columns.
pub fn row_reduce_columns(rows: usize, cols: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut p: Vec<Vec<i64>> = (0..rows).map(|i| (0..rows).map(|j| i64::from(i == j)).collect()).collect();
    // a[i][j] = entry i of column j
    let k = cols.len();
    let mut a: Vec<Vec<i64>> = (0..rows).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let mut r = 0;
    for c in 0..k {
        if r == rows {
            break;
        }
        // Euclid on rows r..rows in column c
        loop {
            let nz: Vec<usize> = (r..rows).filter(|&i| a[i][c] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| a[i][c].abs()).unwrap();
            a.swap(r, piv);
            p.swap(r, piv);
            let mut done = true;
            for i in r + 1..rows {
                if a[i][c] != 0 {
                    let f = Integer::div_floor(&a[i][c], &a[r][c]);
                    for j in 0..k {
                        a[i][j] -= f * a[r][j];
                    }
                    for j in 0..rows {
                        p[i][j] -= f * p[r][j];
                    }
                    if a[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[r][c] != 0 {
            r += 1;
        }
    }
    let out_cols = (0..k).map(|j| (0..rows).map(|i| a[i][j]).collect()).collect();
    (p, out_cols)
}

/// Solves `<m, u_i> = d_i` for linearly independent `u_i` spanning `Q^n`; returns
/// the rational solution.
pub fn solve_dual(us: &[Vec<i64>], d: &[i64]) -> Option<Vec<Q>> {
    let n = us.first().map_or(0, |u| u.len());
    if us.len() != n {
        return None;
    }
    let a = linalg::from_i64(us);
    let inv = linalg::inverse(&a)?;
    Some(
        (0..n)
            .map(|i| {
                let mut s = Q::zero();
                for j in 0..n {
                    s += &inv[i][j] * q(d[j]);
                }
                s
            })
            .collect(),
    )
}

pub fn to_integer_vec(v: &[Q]) -> Option<Vec<i64>> {
    v.iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect()
}

/// All integer points of the box `lo <= x <= hi` in lexicographic order.
pub fn box_points(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = lo.to_vec();
    loop {
        out.push(cur.clone());
        let mut i = cur.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
        }
    }
}

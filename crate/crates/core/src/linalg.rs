//! Exact linear algebra over the rationals.
//!
//! Matrices are dense row-major `Vec<Vec<Q>>`. Subspaces are stored by a basis
//! in reduced row-echelon form, which is canonical: two subspaces are equal iff
//! their stored bases are equal.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub type QMat = Vec<Vec<Q>>;

pub fn zeros(rows: usize, cols: usize) -> QMat {
    vec![vec![Q::zero(); cols]; rows]
}

pub fn identity(n: usize) -> QMat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

pub fn from_i64(rows: &[Vec<i64>]) -> QMat {
    rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

pub fn mat_mul(a: &QMat, b: &QMat, inner: usize, cols: usize) -> QMat {
    let mut out = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for k in 0..inner {
            if row[k].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    out[i][j] += &row[k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn transpose(a: &QMat, cols: usize) -> QMat {
    let mut out = zeros(cols, a.len());
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            out[j][i] = x.clone();
        }
    }
    out
}

/// Reduces `m` in place to reduced row-echelon form, drops zero rows, and
/// returns the pivot columns.
pub fn rref(m: &mut QMat) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
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
        if !inv.is_one() {
            for x in m[r][c..].iter_mut() {
                *x *= &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

pub fn rank(m: &QMat) -> usize {
    if m.is_empty() || m[0].is_empty() {
        return 0;
    }
    let mut work = m.clone();
    rref(&mut work).len()
}

/// Basis of `{x : m x = 0}` for an `rows x cols` matrix.
pub fn kernel(m: &QMat, cols: usize) -> QMat {
    let mut work = m.clone();
    let pivots = rref(&mut work);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::one();
        for (row, &pc) in work.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

pub fn det(m: &QMat) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    d
}

pub fn inverse(m: &QMat) -> Option<QMat> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut aug: QMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Coordinates of `v` in the basis `rows` (rows linearly independent), if `v` lies in their span.
pub fn coordinates(rows: &QMat, v: &[Q]) -> Option<Vec<Q>> {
    let k = rows.len();
    let n = v.len();
    // solve c * rows = v, i.e. rows^T c = v
    let mut aug: QMat = (0..n)
        .map(|j| {
            let mut r: Vec<Q> = rows.iter().map(|row| row[j].clone()).collect();
            r.push(v[j].clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&k) {
        return None;
    }
    let mut c = vec![Q::zero(); k];
    for (row, &p) in aug.iter().zip(&pivots) {
        c[p] = row[k].clone();
    }
    Some(c)
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// A linear subspace of `Q^ambient`, stored by its RREF basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    basis: QMat,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: identity(ambient) }
    }

    pub fn from_rows(ambient: usize, rows: QMat) -> Self {
        let mut basis: QMat = rows.into_iter().filter(|r| !is_zero_vec(r)).collect();
        debug_assert!(basis.iter().all(|r| r.len() == ambient));
        rref(&mut basis);
        Subspace { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &QMat {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        if is_zero_vec(v) {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rank(&rows) == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        if other.is_zero() || self.is_full() {
            return self.clone();
        }
        if self.is_zero() || other.is_full() {
            return other.clone();
        }
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::from_rows(self.ambient, rows)
    }

    /// Annihilator in the dual space, with the dual basis identified with the standard basis.
    pub fn annihilator(&self) -> Subspace {
        if self.is_zero() {
            return Subspace::full(self.ambient);
        }
        Subspace::from_rows(self.ambient, kernel(&self.basis, self.ambient))
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.is_full() || other.is_zero() {
            return other.clone();
        }
        if other.is_full() || self.is_zero() {
            return self.clone();
        }
        self.annihilator().sum(&other.annihilator()).annihilator()
    }

    /// Kronecker product `self ⊗ other` inside `Q^(a*b)`.
    pub fn tensor(&self, other: &Subspace) -> Subspace {
        let amb = self.ambient * other.ambient;
        let mut rows = Vec::with_capacity(self.dim() * other.dim());
        for u in &self.basis {
            for w in &other.basis {
                let mut v = Vec::with_capacity(amb);
                for x in u {
                    for y in w {
                        v.push(x * y);
                    }
                }
                rows.push(v);
            }
        }
        Subspace::from_rows(amb, rows)
    }

    /// Image under `v ↦ v * m` (row-vector convention), `m` is `ambient x new_ambient`.
    pub fn image(&self, m: &QMat, new_ambient: usize) -> Subspace {
        Subspace::from_rows(new_ambient, mat_mul(&self.basis, m, self.ambient, new_ambient))
    }

    /// Picks rows of `self`'s basis that extend a basis of `within ∩ self` to one of `self`.
    pub fn complement_rows(&self, within: &Subspace) -> QMat {
        let mut acc = within.basis.clone();
        let mut r = acc.len();
        let mut out = Vec::new();
        for v in &self.basis {
            acc.push(v.clone());
            let nr = rank(&acc);
            if nr > r {
                out.push(v.clone());
                r = nr;
            } else {
                acc.pop();
            }
        }
        out
    }
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        Some(Q::from_integer(s.parse().ok()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let m = from_i64(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(rank(&m), 2);
        let k = kernel(&m, 3);
        assert_eq!(k.len(), 1);
        let prod = mat_mul(&m, &transpose(&k, 3), 3, 1);
        assert!(prod.iter().all(|r| r[0].is_zero()));
    }

    #[test]
    fn det_and_inverse() {
        let m = from_i64(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(det(&m), q(1));
        let inv = inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv, 2, 2), identity(2));
        assert!(inverse(&from_i64(&[vec![1, 2], vec![2, 4]])).is_none());
    }

    #[test]
    fn subspace_lattice_ops() {
        let a = Subspace::from_rows(3, from_i64(&[vec![1, 0, 0], vec![0, 1, 0]]));
        let b = Subspace::from_rows(3, from_i64(&[vec![0, 1, 0], vec![0, 0, 1]]));
        let i = a.intersect(&b);
        assert_eq!(i, Subspace::from_rows(3, from_i64(&[vec![0, 2, 0]])));
        assert!(a.sum(&b).is_full());
        assert_eq!(a.annihilator(), Subspace::from_rows(3, from_i64(&[vec![0, 0, 1]])));
        assert_eq!(a.tensor(&b).dim(), 4);
    }

    #[test]
    fn coordinates_roundtrip() {
        let rows = from_i64(&[vec![1, 1, 0], vec![0, 1, 1]]);
        let c = coordinates(&rows, &[q(2), q(3), q(1)]).unwrap();
        assert_eq!(c, vec![q(2), q(1)]);
        assert!(coordinates(&rows, &[q(1), q(0), q(0)]).is_none());
    }
}

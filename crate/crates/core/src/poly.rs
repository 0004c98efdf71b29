//! Dense univariate polynomials over Q: characteristic polynomials, gcds,
//! discriminants and factorization for the small degrees that occur as
//! vector-bundle ranks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::{self, q, QMat, Q};

/// Coefficients in ascending degree; empty = zero polynomial; last entry nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::new(vec![Q::one()])
    }

    /// `t - root`
    pub fn linear(root: &Q) -> Self {
        Poly::new(vec![-root.clone(), Q::one()])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        Poly::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Euclidean division `(quotient, remainder)`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quo = vec![Q::zero(); r.len() - dd];
        let lead = d.lead();
        for k in (0..quo.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            quo[k] = c;
        }
        (Poly::new(quo), Poly::new(r))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Discriminant via the Sylvester resultant of `p` and `p'`, up to the usual
    /// sign/leading-coefficient normalization (zero iff repeated roots).
    pub fn discriminant(&self) -> Q {
        let n = match self.degree() {
            Some(n) if n >= 1 => n,
            _ => return Q::zero(),
        };
        if n == 1 {
            return Q::one();
        }
        let dp = self.derivative();
        let m = n - 1;
        let size = n + m;
        let mut syl: QMat = linalg::zeros(size, size);
        let a: Vec<Q> = self.coeffs.iter().rev().cloned().collect();
        let b: Vec<Q> = dp.coeffs.iter().rev().cloned().collect();
        for i in 0..m {
            for (j, c) in a.iter().enumerate() {
                syl[i][i + j] = c.clone();
            }
        }
        for i in 0..n {
            for (j, c) in b.iter().enumerate() {
                syl[m + i][i + j] = c.clone();
            }
        }
        linalg::det(&syl) / self.lead()
    }

    /// Evaluates at a square matrix (Horner).
    pub fn eval_matrix(&self, a: &QMat) -> QMat {
        let n = a.len();
        let mut acc = linalg::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = linalg::mat_mul(&acc, a, n, n);
            for (i, row) in acc.iter_mut().enumerate() {
                row[i] += c;
            }
        }
        acc
    }
}

/// Characteristic polynomial `det(t·1 − a)` by Faddeev–LeVerrier.
pub fn char_poly(a: &QMat) -> Poly {
    let n = a.len();
    let mut c = vec![Q::zero(); n + 1];
    c[n] = Q::one();
    let mut m = linalg::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut mk = linalg::mat_mul(a, &m, n, n);
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        let am = linalg::mat_mul(a, &mk, n, n);
        let tr: Q = (0..n).map(|i| am[i][i].clone()).sum();
        c[n - k] = -tr / q(k as i64);
        m = mk;
    }
    Poly::new(c)
}

fn primitive_integer(p: &Poly) -> Vec<BigInt> {
    let lcm = p.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coeffs.iter().map(|c| (c * Q::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| x / &g).collect()
}

fn divisors(n: &BigInt, cap: usize) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n == 0 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
            if out.len() > cap {
                return None;
            }
        }
        d += 1;
        if d > 2_000_000 {
            return None;
        }
    }
    Some(out)
}

/// Rational roots of `p` (each listed once).
pub fn rational_roots(p: &Poly) -> Vec<Q> {
    let mut roots = Vec::new();
    let mut rem = p.clone();
    while rem.degree().unwrap_or(0) >= 1 && rem.coeffs[0].is_zero() {
        if !roots.contains(&Q::zero()) {
            roots.push(Q::zero());
        }
        rem = rem.div_rem(&Poly::linear(&Q::zero())).0;
    }
    if rem.degree().unwrap_or(0) == 0 {
        return roots;
    }
    let ints = primitive_integer(&rem);
    let (Some(ps), Some(qs)) = (divisors(&ints[0], 4096), divisors(ints.last().unwrap(), 4096)) else {
        return roots;
    };
    for pn in &ps {
        for qd in &qs {
            for sign in [1, -1] {
                let cand = Q::new(pn * sign, qd.clone());
                if !roots.contains(&cand) && rem.eval(&cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots
}

/// Factors a squarefree polynomial into monic irreducible factors over Q.
/// Returns `None` if a factor search exceeds the internal budget.
pub fn factor_squarefree(p: &Poly) -> Option<Vec<Poly>> {
    let mut factors = Vec::new();
    let mut rem = p.monic();
    for r in rational_roots(&rem) {
        let lin = Poly::linear(&r);
        rem = rem.div_rem(&lin).0;
        factors.push(lin);
    }
    let mut stack = vec![rem];
    while let Some(f) = stack.pop() {
        let deg = f.degree().unwrap_or(0);
        if deg == 0 {
            continue;
        }
        if deg <= 3 {
            factors.push(f.monic());
            continue;
        }
        match kronecker_split(&f)? {
            Some(g) => {
                let h = f.div_rem(&g).0;
                stack.push(g.monic());
                stack.push(h.monic());
            }
            None => factors.push(f.monic()),
        }
    }
    factors.sort_by_key(|f| (f.degree(), f.coeffs.clone()));
    Some(factors)
}

/// Looks for a nontrivial factor of degree 2..=deg/2 by Kronecker's method.
/// `Ok(None)` means irreducible; `None` means the budget was exceeded.
fn kronecker_split(f: &Poly) -> Option<Option<Poly>> {
    let ints = primitive_integer(f);
    let fi = Poly::new(ints.iter().map(|x| Q::from_integer(x.clone())).collect());
    let deg = fi.degree().unwrap();
    let mut budget: usize = 2_000_000;
    for d in 2..=deg / 2 {
        let points: Vec<Q> = (0..=d as i64).map(q).collect();
        let mut divs = Vec::new();
        for x in &points {
            let v = fi.eval(x).to_integer();
            let ds = divisors(&v, 4096)?;
            let mut signed: Vec<BigInt> = ds.to_vec();
            signed.extend(ds.iter().map(|x| -x));
            divs.push(signed);
        }
        let total: usize = divs.iter().map(Vec::len).product();
        if total > budget {
            return None;
        }
        budget -= total;
        let mut idx = vec![0usize; divs.len()];
        loop {
            let vals: Vec<Q> = idx.iter().zip(&divs).map(|(&i, ds)| Q::from_integer(ds[i].clone())).collect();
            let g = interpolate(&points, &vals);
            if g.degree() == Some(d) && g.coeffs.iter().all(|c| c.is_integer()) && fi.div_rem(&g).1.is_zero() {
                return Some(Some(g));
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < divs[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    Some(None)
}

fn interpolate(xs: &[Q], ys: &[Q]) -> Poly {
    let mut acc = Poly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = Poly::one();
        let mut denom = Q::one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                basis = basis.mul(&Poly::linear(xj));
                denom *= xi - xj;
            }
        }
        let scale = yi / denom;
        let term = Poly::new(basis.coeffs.iter().map(|c| c * &scale).collect());
        acc = add(&acc, &term);
    }
    acc
}

fn add(a: &Poly, b: &Poly) -> Poly {
    let n = a.coeffs.len().max(b.coeffs.len());
    Poly::new(
        (0..n)
            .map(|i| {
                a.coeffs.get(i).cloned().unwrap_or_else(Q::zero) + b.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_i64;

    fn p(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| q(x)).collect())
    }

    #[test]
    fn char_poly_of_2x2() {
        // [[1,2],[3,4]]: t^2 - 5t - 2
        let cp = char_poly(&from_i64(&[vec![1, 2], vec![3, 4]]));
        assert_eq!(cp, p(&[-2, -5, 1]));
    }

    #[test]
    fn discriminant_detects_repeats() {
        assert!(p(&[1, -2, 1]).discriminant().is_zero());
        assert!(!p(&[-2, -5, 1]).discriminant().is_zero());
        assert!(p(&[-2, -5, 1]).is_squarefree());
        assert!(!p(&[1, -2, 1]).is_squarefree());
    }

    #[test]
    fn roots_and_factors() {
        // (t-1)(2t+3)(t^2+1)
        let f = p(&[-1, 1]).mul(&p(&[3, 2])).mul(&p(&[1, 0, 1]));
        assert_eq!(rational_roots(&f), vec![crate::linalg::q_frac(-3, 2), q(1)]);
        let fs = factor_squarefree(&f).unwrap();
        assert_eq!(fs.len(), 3);
        // (t^2-2)(t^2-3) splits into two quadratics
        let g = p(&[-2, 0, 1]).mul(&p(&[-3, 0, 1]));
        let gs = factor_squarefree(&g).unwrap();
        assert_eq!(gs, vec![p(&[-3, 0, 1]), p(&[-2, 0, 1])]);
        // t^4 + 1 is irreducible
        assert_eq!(factor_squarefree(&p(&[1, 0, 0, 0, 1])).unwrap().len(), 1);
    }

    #[test]
    fn matrix_evaluation_cayley_hamilton() {
        let a = from_i64(&[vec![2, 1, 0], vec![0, 1, 4], vec![1, 0, 3]]);
        let cp = char_poly(&a);
        let z = cp.eval_matrix(&a);
        assert!(z.iter().flatten().all(Zero::is_zero));
    }
}

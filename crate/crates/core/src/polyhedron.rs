//! Exact feasibility of small rational polyhedra by Fourier–Motzkin elimination.

use num_traits::{Signed, Zero};

use crate::linalg::{rref, Q};

/// `coeffs · x + constant (>= | =) 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub constant: Q,
}

impl Constraint {
    pub fn new(coeffs: Vec<Q>, constant: Q) -> Self {
        Constraint { coeffs, constant }
    }
}

/// Whether `{x : eq_i(x) = 0, ineq_j(x) >= 0}` is nonempty.
pub fn is_feasible(vars: usize, eqs: &[Constraint], ineqs: &[Constraint]) -> bool {
    // Eliminate equalities: RREF on [A | b]
    let mut aug: Vec<Vec<Q>> = eqs
        .iter()
        .map(|c| {
            let mut r = c.coeffs.clone();
            r.push(c.constant.clone());
            r
        })
        .collect();
    let pivots = if aug.is_empty() { Vec::new() } else { rref(&mut aug) };
    if pivots.contains(&vars) {
        return false;
    }
    // x_p = -(sum_{free} a_f x_f + b) for pivot rows
    let free: Vec<usize> = (0..vars).filter(|v| !pivots.contains(v)).collect();
    let substitute = |c: &Constraint| -> Constraint {
        let mut coeffs: Vec<Q> = free.iter().map(|&f| c.coeffs[f].clone()).collect();
        let mut constant = c.constant.clone();
        for (row, &p) in aug.iter().zip(&pivots) {
            let a = &c.coeffs[p];
            if a.is_zero() {
                continue;
            }
            for (k, &f) in free.iter().enumerate() {
                coeffs[k] -= a * &row[f];
            }
            constant -= a * &row[vars];
        }
        Constraint { coeffs, constant }
    };
    let mut system: Vec<Constraint> = ineqs.iter().map(substitute).collect();
    let mut nvars = free.len();
    while nvars > 0 {
        let v = nvars - 1;
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for c in system {
            if c.coeffs[v].is_positive() {
                pos.push(c);
            } else if c.coeffs[v].is_negative() {
                neg.push(c);
            } else {
                rest.push(c);
            }
        }
        for p in &pos {
            for n in &neg {
                let a = p.coeffs[v].clone();
                let b = -n.coeffs[v].clone();
                let coeffs = (0..v).map(|i| &b * &p.coeffs[i] + &a * &n.coeffs[i]).collect();
                let constant = &b * &p.constant + &a * &n.constant;
                rest.push(normalize(Constraint { coeffs, constant }));
            }
        }
        for c in rest.iter_mut() {
            c.coeffs.truncate(v);
        }
        rest.sort();
        rest.dedup();
        system = rest;
        nvars = v;
    }
    system.iter().all(|c| !c.constant.is_negative())
}

fn normalize(c: Constraint) -> Constraint {
    let scale = c.coeffs.iter().chain(std::iter::once(&c.constant)).find(|x| !x.is_zero()).map(|x| x.abs());
    match scale {
        Some(s) => Constraint { coeffs: c.coeffs.iter().map(|x| x / &s).collect(), constant: &c.constant / &s },
        None => c,
    }
}

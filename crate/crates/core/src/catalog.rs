//! Built-in fans: projective spaces, products, Hirzebruch surfaces, the blown-up plane
//! and projectivized split bundles.

use crate::divisor::TorusDivisor;
use crate::error::{Error, Result};
use crate::lattice::Fan;

pub fn projective_space(n: usize) -> Fan {
    let mut rays: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    rays.push(vec![-1; n]);
    let cones = (0..=n).map(|skip| (0..=n).filter(|&r| r != skip).collect()).collect();
    Fan::build(rays, cones).expect("projective space")
}

/// Product fan; rays of factor `i` sit in the `i`-th block of coordinates.
pub fn product(factors: &[Fan]) -> Fan {
    let n: usize = factors.iter().map(Fan::rank).sum();
    let mut rays = Vec::new();
    let mut offsets = Vec::new();
    let mut shift = 0;
    for f in factors {
        offsets.push(rays.len());
        for u in f.rays() {
            let mut v = vec![0; n];
            v[shift..shift + f.rank()].copy_from_slice(u);
            rays.push(v);
        }
        shift += f.rank();
    }
    let mut cones: Vec<Vec<usize>> = vec![Vec::new()];
    for (f, &off) in factors.iter().zip(&offsets) {
        cones = cones
            .iter()
            .flat_map(|c| {
                f.max_cones().iter().map(move |m| {
                    let mut c = c.clone();
                    c.extend(m.rays().iter().map(|r| r + off));
                    c
                })
            })
            .collect();
    }
    Fan::build(rays, cones).expect("product of smooth complete fans")
}

/// `F_a`: rays `(1,0), (0,1), (-1,a), (0,-1)`.
pub fn hirzebruch(a: i64) -> Fan {
    Fan::build(
        vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
    .expect("Hirzebruch surface")
}

/// The plane blown up at a torus-fixed point.
pub fn blowup_p2() -> Fan {
    Fan::build(
        vec![vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
    .expect("blown-up plane")
}

/// Fan of `P(O(D_0) ⊕ ... ⊕ O(D_t))` over `base`: fiber rays `e_1..e_t, -Σe_i`, base rays lifted
/// by the coefficients of `D_i - D_0`.
pub fn projective_bundle(base: &Fan, summands: &[TorusDivisor]) -> Result<Fan> {
    base.require_smooth_complete()?;
    let t = summands
        .len()
        .checked_sub(1)
        .filter(|&t| t >= 1)
        .ok_or_else(|| Error::InvalidInput("a projective bundle needs at least two summands".into()))?;
    if summands.iter().any(|d| d.coeffs.len() != base.n_rays()) {
        return Err(Error::InvalidInput("summand length does not match the base fan".into()));
    }
    let n = base.rank() + t;
    let mut rays: Vec<Vec<i64>> = Vec::new();
    for (rho, u) in base.rays().iter().enumerate() {
        let mut v = u.clone();
        v.extend((1..=t).map(|i| summands[i].coeffs[rho] - summands[0].coeffs[rho]));
        rays.push(v);
    }
    let fiber0 = rays.len();
    for i in 0..t {
        let mut v = vec![0; n];
        v[base.rank() + i] = 1;
        rays.push(v);
    }
    let mut last = vec![0; n];
    last[base.rank()..].iter_mut().for_each(|x| *x = -1);
    rays.push(last);
    let mut cones = Vec::new();
    for c in base.max_cones() {
        for skip in 0..=t {
            let mut cone: Vec<usize> = c.rays().to_vec();
            cone.extend((0..=t).filter(|&i| i != skip).map(|i| fiber0 + i));
            cones.push(cone);
        }
    }
    Fan::build(rays, cones)
}

/// Parses catalog names: `Pn(3)` or `P3`, `P1xP2`, `Hirzebruch(2)` or `F2`, `BlowupP2`,
/// `ProjBundle(P2,(0,-1,-2))` (integer twists are multiples of the first prime divisor of the base).
pub fn fan_by_name(name: &str) -> Result<Fan> {
    let s: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    let unknown = || Error::UnknownCatalogEntry(name.to_string());
    if let Some(rest) = s.strip_prefix("ProjBundle(").and_then(|r| r.strip_suffix(')')) {
        let (base, twists) = rest.split_once(",(").ok_or_else(unknown)?;
        let base = fan_by_name(base)?;
        let twists = twists.strip_suffix(')').ok_or_else(unknown)?;
        let summands = twists
            .split(',')
            .map(|k| {
                let k: i64 = k.parse().map_err(|_| unknown())?;
                let mut c = vec![0; base.n_rays()];
                c[0] = k;
                Ok(TorusDivisor::new(c))
            })
            .collect::<Result<Vec<_>>>()?;
        return projective_bundle(&base, &summands);
    }
    if let Some(a) = s.strip_prefix("Hirzebruch(").and_then(|r| r.strip_suffix(')')) {
        return Ok(hirzebruch(a.parse().map_err(|_| unknown())?));
    }
    if let Some(n) = s.strip_prefix("Pn(").and_then(|r| r.strip_suffix(')')) {
        return Ok(projective_space(n.parse().map_err(|_| unknown())?));
    }
    if s == "BlowupP2" {
        return Ok(blowup_p2());
    }
    if let Some(a) = s.strip_prefix('F').filter(|a| !a.is_empty() && a.chars().all(|c| c.is_ascii_digit())) {
        return Ok(hirzebruch(a.parse().map_err(|_| unknown())?));
    }
    let parts: Vec<&str> = s.split(['x', '×']).collect();
    let factors = parts
        .iter()
        .map(|p| {
            p.strip_prefix('P')
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n >= 1)
                .map(projective_space)
                .ok_or_else(unknown)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(if factors.len() == 1 { factors.into_iter().next().unwrap() } else { product(&factors) })
}

/// Names listed by `catalog` with no argument.
pub const CATALOG_NAMES: &[&str] =
    &["P1", "P2", "P3", "P4", "P1xP1", "P1xP1xP1", "P2xP2", "F0", "F1", "F2", "BlowupP2", "ProjBundle(P2,(0,-1,-2))"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::{boundary_divisor, class_coordinates};

    #[test]
    fn catalog_fans_are_smooth_complete() {
        for name in CATALOG_NAMES {
            let f = fan_by_name(name).unwrap();
            assert!(f.is_smooth_complete(), "{name}");
        }
    }

    #[test]
    fn counts() {
        let p3 = fan_by_name("Pn(3)").unwrap();
        assert_eq!((p3.rank(), p3.n_rays(), p3.max_cones().len()), (3, 4, 4));
        assert_eq!(class_coordinates(&p3, &boundary_divisor(&p3)).unwrap(), vec![4]);
        let pb = fan_by_name("ProjBundle(P2,(0,-1,-2))").unwrap();
        assert_eq!((pb.rank(), pb.n_rays(), pb.max_cones().len()), (4, 6, 9));
        let p = fan_by_name("P1xP1xP1").unwrap();
        assert_eq!((p.rank(), p.n_rays(), p.max_cones().len()), (3, 6, 8));
        assert_eq!(fan_by_name("Hirzebruch(2)").unwrap(), fan_by_name("F2").unwrap());
        assert_eq!(fan_by_name("P1xP1").unwrap(), fan_by_name("F0").unwrap());
    }

    #[test]
    fn unknown_names() {
        for bad in ["Q3", "P0", "Hirzebruch(x)", "ProjBundle(P2,(0))", ""] {
            assert!(fan_by_name(bad).is_err(), "{bad}");
        }
    }
}

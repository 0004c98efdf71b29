//! Torus-invariant divisors: classes, Cartier data, sections, positivity and base loci.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat::{box_points, dot, solve_dual, to_integer_vec};
use crate::lattice::{Cone, Fan, FanMorphism, StarFan};
use crate::linalg::{self, q, Q};
use crate::polyhedron::{is_feasible, Constraint};

/// `D = sum_rho a_rho D_rho`, coefficients indexed by the fan's canonical ray order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusDivisor {
    pub coeffs: Vec<i64>,
}

/// Classes are carried by any torus-invariant representative; compare with [`same_class`].
pub type DivisorClass = TorusDivisor;

impl TorusDivisor {
    pub fn new(coeffs: Vec<i64>) -> Self {
        TorusDivisor { coeffs }
    }

    pub fn zero(n_rays: usize) -> Self {
        TorusDivisor { coeffs: vec![0; n_rays] }
    }

    pub fn prime(n_rays: usize, ray: usize) -> Self {
        let mut c = vec![0; n_rays];
        c[ray] = 1;
        TorusDivisor { coeffs: c }
    }

    pub fn add(&self, other: &TorusDivisor) -> TorusDivisor {
        TorusDivisor { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &TorusDivisor) -> TorusDivisor {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TorusDivisor {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> TorusDivisor {
        TorusDivisor { coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|&a| a >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&a| a == 0)
    }

    pub(crate) fn check(&self, fan: &Fan) -> Result<()> {
        if self.coeffs.len() != fan.n_rays() {
            return Err(Error::InvalidInput(format!(
                "divisor has {} coefficients but the fan has {} rays",
                self.coeffs.len(),
                fan.n_rays()
            )));
        }
        Ok(())
    }
}

/// `div(chi^m) = sum_rho <m, u_rho> D_rho`.
pub fn principal_divisor(fan: &Fan, m: &[i64]) -> TorusDivisor {
    TorusDivisor { coeffs: fan.rays().iter().map(|u| dot(m, u)).collect() }
}

pub fn boundary_divisor(fan: &Fan) -> TorusDivisor {
    TorusDivisor { coeffs: vec![1; fan.n_rays()] }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroup {
    pub rank: usize,
    /// Row `rho` is `u_rho`: the map `M -> Z^{rays}` whose image is the principal divisors.
    pub relations: Vec<Vec<i64>>,
}

pub fn divisor_class_group(fan: &Fan) -> Result<ClassGroup> {
    fan.require_smooth_complete()?;
    Ok(ClassGroup { rank: fan.n_rays() - fan.rank(), relations: fan.rays().to_vec() })
}

/// Characters `m_sigma` with `<m_sigma, u_rho> = -a_rho` for rho in sigma, one per maximal cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartierData {
    pub characters: Vec<Vec<i64>>,
}

fn local_characters(fan: &Fan, d: &TorusDivisor) -> Result<Vec<Vec<Q>>> {
    d.check(fan)?;
    fan.max_cones()
        .iter()
        .map(|c| {
            if c.dim() != fan.rank() {
                return Err(Error::NonFullDimensionalCone(c.0.clone()));
            }
            let us = fan.cone_generators(c);
            let rhs: Vec<i64> = c.0.iter().map(|&r| -d.coeffs[r]).collect();
            Ok(if fan.rank() == 0 { Vec::new() } else { solve_dual(&us, &rhs).expect("simplicial") })
        })
        .collect()
}

pub fn cartier_data(fan: &Fan, d: &TorusDivisor) -> Result<CartierData> {
    if !fan.is_smooth() {
        return Err(Error::RequiresSmooth);
    }
    let chars = local_characters(fan, d)?;
    Ok(CartierData { characters: chars.iter().map(|m| to_integer_vec(m).expect("smooth cone")).collect() })
}

/// Integer box containing `conv{m_sigma}`.
pub fn vertex_box(fan: &Fan, d: &TorusDivisor) -> Result<(Vec<i64>, Vec<i64>)> {
    let chars = local_characters(fan, d)?;
    let n = fan.rank();
    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    for m in &chars {
        for i in 0..n {
            lo[i] = lo[i].min(m[i].floor().to_integer().to_i64().expect("range"));
            hi[i] = hi[i].max(m[i].ceil().to_integer().to_i64().expect("range"));
        }
    }
    Ok((lo, hi))
}

pub fn is_section(fan: &Fan, d: &TorusDivisor, m: &[i64]) -> bool {
    fan.rays().iter().zip(&d.coeffs).all(|(u, a)| dot(m, u) >= -a)
}

/// Characters of `H^0(O(D))`, in lexicographic order.
pub fn global_sections(fan: &Fan, d: &TorusDivisor) -> Result<Vec<Vec<i64>>> {
    if !fan.is_complete() {
        return Err(Error::RequiresComplete);
    }
    let (lo, hi) = vertex_box(fan, d)?;
    Ok(box_points(&lo, &hi).into_iter().filter(|m| is_section(fan, d, m)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityFlags {
    pub nef: bool,
    pub ample: bool,
    pub semi_ample: bool,
}

pub fn positivity_flags(fan: &Fan, d: &TorusDivisor) -> Result<PositivityFlags> {
    fan.require_smooth_complete()?;
    let cd = cartier_data(fan, d)?;
    let mut nef = true;
    let mut ample = true;
    for (c, m) in fan.max_cones().iter().zip(&cd.characters) {
        for (r, u) in fan.rays().iter().enumerate() {
            if c.contains_ray(r) {
                continue;
            }
            let v = dot(m, u) + d.coeffs[r];
            nef &= v >= 0;
            ample &= v > 0;
        }
    }
    Ok(PositivityFlags { nef, ample: ample && nef, semi_ample: nef })
}

pub fn same_class(fan: &Fan, a: &TorusDivisor, b: &TorusDivisor) -> Result<bool> {
    Ok(class_coordinates(fan, a)? == class_coordinates(fan, b)?)
}

/// Coordinates of the class of `D` in `Z^{#rays - rank}`: add the principal divisor making
/// the coefficients on the first maximal cone vanish, then read the remaining rays.
pub fn class_coordinates(fan: &Fan, d: &TorusDivisor) -> Result<Vec<i64>> {
    fan.require_smooth_complete()?;
    let m0 = &cartier_data(fan, d)?.characters[0];
    let norm = d.add(&principal_divisor(fan, m0));
    let first = &fan.max_cones()[0];
    Ok((0..fan.n_rays()).filter(|r| !first.contains_ray(*r)).map(|r| norm.coeffs[r]).collect())
}

/// Inverse of [`class_coordinates`]: the normalized representative.
pub fn class_from_coordinates(fan: &Fan, coords: &[i64]) -> TorusDivisor {
    let first = &fan.max_cones()[0];
    let mut it = coords.iter();
    TorusDivisor {
        coeffs: (0..fan.n_rays())
            .map(|r| if first.contains_ray(r) { 0 } else { *it.next().expect("coordinate count") })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseLocusReport {
    /// Minimal cones whose orbit closures make up the locus.
    pub cones: Vec<Cone>,
    /// Minimum cone dimension; `rank + 1` encodes an empty locus.
    pub codimension: usize,
    pub whole_variety: bool,
    pub stabilized: bool,
}

impl BaseLocusReport {
    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    fn from_bad(fan: &Fan, bad: &BTreeSet<Cone>, stabilized: bool) -> Self {
        let cones: Vec<Cone> = fan
            .all_cones()
            .into_iter()
            .filter(|c| bad.contains(c) && !bad.iter().any(|b| b != c && b.is_face_of(c)))
            .collect();
        let codimension = cones.iter().map(Cone::dim).min().unwrap_or(fan.rank() + 1);
        BaseLocusReport { whole_variety: codimension == 0, cones, codimension, stabilized }
    }
}

fn bad_cones(fan: &Fan, d: &TorusDivisor) -> Result<BTreeSet<Cone>> {
    let sections = global_sections(fan, d)?;
    let mut zero_sets = BTreeSet::new();
    for m in &sections {
        let mask: u64 = fan
            .rays()
            .iter()
            .enumerate()
            .filter(|(r, u)| dot(m, u) == -d.coeffs[*r])
            .fold(0, |acc, (r, _)| acc | 1 << r);
        zero_sets.insert(mask);
    }
    Ok(fan
        .all_cones()
        .into_iter()
        .filter(|c| {
            let cm = c.0.iter().fold(0u64, |acc, &r| acc | 1 << r);
            !zero_sets.iter().any(|z| cm & z == cm)
        })
        .collect())
}

pub fn base_locus(fan: &Fan, d: &TorusDivisor) -> Result<BaseLocusReport> {
    let bad = bad_cones(fan, d)?;
    Ok(BaseLocusReport::from_bad(fan, &bad, true))
}

/// Cones `tau` whose orbit lies in every `Bs(kD)`: the face of the rational section
/// polytope cut out by `tau` is empty.
pub fn asymptotic_bad_cones(fan: &Fan, d: &TorusDivisor) -> Result<BTreeSet<Cone>> {
    d.check(fan)?;
    let n = fan.rank();
    let row = |r: usize| -> Constraint { Constraint::new(fan.ray(r).iter().map(|&x| q(x)).collect(), q(d.coeffs[r])) };
    let ineqs: Vec<Constraint> = (0..fan.n_rays()).map(row).collect();
    Ok(fan
        .all_cones()
        .into_iter()
        .filter(|c| {
            let eqs: Vec<Constraint> = c.0.iter().map(|&r| row(r)).collect();
            !is_feasible(n, &eqs, &ineqs)
        })
        .collect())
}

/// `Bs(D) ∩ Bs(2D) ∩ ... ∩ Bs(k_max D)`, flagged stabilized when it already equals the
/// asymptotic locus.
pub fn stable_base_locus(fan: &Fan, d: &TorusDivisor, k_max: u32) -> Result<BaseLocusReport> {
    if !fan.is_complete() {
        return Err(Error::RequiresComplete);
    }
    if k_max == 0 {
        return Err(Error::InvalidInput("k_max must be at least 1".into()));
    }
    let mut bad: Option<BTreeSet<Cone>> = None;
    for k in 1..=k_max {
        let bk = bad_cones(fan, &d.scale(k as i64))?;
        bad = Some(match bad {
            None => bk,
            Some(b) => b.intersection(&bk).cloned().collect(),
        });
    }
    let bad = bad.expect("k_max >= 1");
    let stabilized = bad == asymptotic_bad_cones(fan, d)?;
    Ok(BaseLocusReport::from_bad(fan, &bad, stabilized))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Iitaka {
    NegInfinity,
    Dim(usize),
}

fn affine_span_dim(points: &[Vec<i64>]) -> Option<usize> {
    let base = points.first()?;
    let diffs: Vec<Vec<i64>> = points[1..].iter().map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    Some(if diffs.is_empty() { 0 } else { linalg::rank(&linalg::from_i64(&diffs)) })
}

pub fn iitaka_dimension(fan: &Fan, d: &TorusDivisor, k_max: u32) -> Result<Iitaka> {
    let mut best = Iitaka::NegInfinity;
    for k in 1..=k_max.max(1) {
        if let Some(dim) = affine_span_dim(&global_sections(fan, &d.scale(k as i64))?) {
            best = best.max(Iitaka::Dim(dim));
            if dim == fan.rank() {
                break;
            }
        }
    }
    Ok(best)
}

/// Restriction of `O(D)` to the orbit closure of the star's cone, as a divisor on the star fan.
pub fn restrict_divisor(fan: &Fan, star: &StarFan, d: &TorusDivisor) -> Result<TorusDivisor> {
    fan.require_smooth_complete()?;
    d.check(fan)?;
    let mut shifted = d.clone();
    for (b, &r) in star.cone.0.iter().enumerate() {
        shifted = shifted.sub(&principal_divisor(fan, &star.lifts[b]).scale(d.coeffs[r]));
    }
    Ok(TorusDivisor { coeffs: star.ray_origin.iter().map(|&r| shifted.coeffs[r]).collect() })
}

pub fn restrict_divisor_class(fan: &Fan, d: &TorusDivisor, ray: usize) -> Result<(StarFan, TorusDivisor)> {
    fan.require_smooth_complete()?;
    let star = fan.star(&Cone(vec![ray]))?;
    let r = restrict_divisor(fan, &star, d)?;
    Ok((star, r))
}

/// `f^* O(D)` for a Cartier divisor on the target.
pub fn pullback_divisor(f: &FanMorphism, d: &TorusDivisor) -> Result<TorusDivisor> {
    let target = &f.target;
    if target.rank() == 0 {
        return Ok(TorusDivisor::zero(f.source.n_rays()));
    }
    let chars = local_characters(target, d)?;
    let mut coeffs = Vec::with_capacity(f.source.n_rays());
    for u in f.source.rays() {
        let v = f.apply(u);
        let vq: Vec<Q> = v.iter().map(|&x| q(x)).collect();
        let sigma = target
            .max_cones()
            .iter()
            .position(|c| {
                let gens = linalg::from_i64(&target.cone_generators(c));
                v.iter().all(|x| *x == 0)
                    || linalg::coordinates(&gens, &vq).is_some_and(|cs| cs.iter().all(|x| *x >= q(0)))
            })
            .ok_or_else(|| Error::ConeImageNotContained(vec![]))?;
        let val: Q = chars[sigma].iter().zip(&vq).map(|(a, b)| a * b).sum();
        if !val.is_integer() {
            return Err(Error::RequiresSmooth);
        }
        coeffs.push(-val.to_integer().to_i64().expect("range"));
    }
    Ok(TorusDivisor { coeffs })
}

/// Number of lattice points of `{m >= 0, sum m <= d}` in dimension `n`.
pub fn simplex_point_count(n: usize, d: i64) -> u64 {
    if d < 0 {
        return 0;
    }
    let (top, k) = (d as u64 + n as u64, n as u64);
    (0..k).fold(1u64, |acc, i| acc * (top - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Fan {
        Fan::build(vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    fn p1xp1() -> Fan {
        Fan::build(
            vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
            vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
        )
        .unwrap()
    }

    fn f2() -> Fan {
        Fan::build(
            vec![vec![1, 0], vec![0, 1], vec![-1, 2], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
        .unwrap()
    }

    fn p3() -> Fan {
        Fan::build(
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap()
    }

    fn d(f: &Fan, pairs: &[(&[i64], i64)]) -> TorusDivisor {
        let mut c = vec![0; f.n_rays()];
        for (u, a) in pairs {
            c[f.ray_index(u).unwrap()] = *a;
        }
        TorusDivisor::new(c)
    }

    #[test]
    fn class_group_ranks() {
        assert_eq!(divisor_class_group(&p3()).unwrap().rank, 1);
        assert_eq!(divisor_class_group(&p1xp1()).unwrap().rank, 2);
        assert_eq!(divisor_class_group(&f2()).unwrap().rank, 2);
    }

    #[test]
    fn cartier_data_on_p2() {
        let f = p2();
        let cd = cartier_data(&f, &d(&f, &[(&[1, 0], 1)])).unwrap();
        for (c, m) in f.max_cones().iter().zip(&cd.characters) {
            for &r in c.rays() {
                let expect = if f.ray(r) == [1, 0] { -1 } else { 0 };
                assert_eq!(dot(m, f.ray(r)), expect);
            }
        }
    }

    #[test]
    fn section_counts() {
        let f = p2();
        assert_eq!(global_sections(&f, &d(&f, &[(&[1, 0], 2)])).unwrap().len(), 6);
        assert!(global_sections(&f, &d(&f, &[(&[1, 0], -1)])).unwrap().is_empty());
        let g = p1xp1();
        assert_eq!(global_sections(&g, &d(&g, &[(&[1, 0], 1), (&[0, 1], 1)])).unwrap().len(), 4);
    }

    #[test]
    fn sections_match_padded_enumeration() {
        // oracle: brute force over a large box
        let f = f2();
        for coeffs in box_points(&[-1, -1, -1, -1], &[2, 2, 2, 2]) {
            let dv = TorusDivisor::new(coeffs);
            let brute: Vec<Vec<i64>> =
                box_points(&[-12, -12], &[12, 12]).into_iter().filter(|m| is_section(&f, &dv, m)).collect();
            assert_eq!(global_sections(&f, &dv).unwrap(), brute, "{dv:?}");
        }
    }

    #[test]
    fn positivity() {
        let f = p3();
        let flags = positivity_flags(&f, &boundary_divisor(&f)).unwrap();
        assert!(flags.nef && flags.ample && flags.semi_ample);
        let z = positivity_flags(&f, &TorusDivisor::zero(4)).unwrap();
        assert!(z.nef && !z.ample && z.semi_ample);
        let g = f2();
        // neighbours of (0,1) sum to 2*(0,1): self-intersection -2
        let neg = d(&g, &[(&[0, 1], 1)]);
        assert!(!positivity_flags(&g, &neg).unwrap().nef);
    }

    #[test]
    fn base_loci() {
        let f = p3();
        let bl = base_locus(&f, &d(&f, &[(&[1, 0, 0], 1)])).unwrap();
        assert!(bl.is_empty());
        assert_eq!(bl.codimension, 4);
        let g = f2();
        let r = g.ray_index(&[0, 1]).unwrap();
        let bl = base_locus(&g, &TorusDivisor::prime(4, r)).unwrap();
        assert_eq!(bl.cones, vec![Cone(vec![r])]);
        assert_eq!(bl.codimension, 1);
        let h = p2();
        let none = base_locus(&h, &d(&h, &[(&[1, 0], -1)])).unwrap();
        assert!(none.whole_variety);
        assert_eq!(none.codimension, 0);
    }

    #[test]
    fn stable_base_loci() {
        let f = p3();
        let s = stable_base_locus(&f, &boundary_divisor(&f), 12).unwrap();
        assert!(s.is_empty() && s.stabilized && s.codimension == 4);
        let g = f2();
        let s = stable_base_locus(&g, &boundary_divisor(&g), 6).unwrap();
        assert!(s.stabilized);
        // F2 anticanonical is nef, so the locus is empty
        assert!(s.is_empty());
        let h = p2();
        let s = stable_base_locus(&h, &d(&h, &[(&[1, 0], -1)]), 4).unwrap();
        assert!(s.whole_variety && s.stabilized);
        assert_eq!(iitaka_dimension(&h, &d(&h, &[(&[1, 0], -1)]), 4).unwrap(), Iitaka::NegInfinity);
    }

    #[test]
    fn iitaka() {
        let g = p1xp1();
        assert_eq!(iitaka_dimension(&g, &d(&g, &[(&[1, 0], 1)]), 4).unwrap(), Iitaka::Dim(1));
        let f = p3();
        assert_eq!(iitaka_dimension(&f, &d(&f, &[(&[1, 0, 0], 1)]), 2).unwrap(), Iitaka::Dim(3));
    }

    #[test]
    fn class_coordinates_detect_linear_equivalence() {
        let f = p2();
        let a = d(&f, &[(&[1, 0], 1)]);
        let b = d(&f, &[(&[0, 1], 1)]);
        assert!(same_class(&f, &a, &b).unwrap());
        assert!(!same_class(&f, &a, &a.scale(2)).unwrap());
        let coords = class_coordinates(&f, &a).unwrap();
        assert!(same_class(&f, &class_from_coordinates(&f, &coords), &a).unwrap());
    }

    #[test]
    fn restriction_of_classes() {
        let f = p3();
        let (star, r) = restrict_divisor_class(&f, &d(&f, &[(&[1, 0, 0], 2)]), 0).unwrap();
        assert_eq!(star.fan.n_rays(), 3);
        // degree 2 on P^2: 6 sections
        assert_eq!(global_sections(&star.fan, &r).unwrap().len(), 6);
        let g = p1xp1();
        let ray = g.ray_index(&[0, 1]).unwrap();
        let (star, r) = restrict_divisor_class(&g, &d(&g, &[(&[1, 0], 1)]), ray).unwrap();
        assert_eq!(global_sections(&star.fan, &r).unwrap().len(), 2);
    }

    #[test]
    fn pullback_along_projection() {
        let p1 = Fan::build(vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
        let g = p1xp1();
        let f = FanMorphism::build(g.clone(), p1, vec![vec![1, 0]]).unwrap();
        let pb = pullback_divisor(&f, &TorusDivisor::new(vec![0, 1])).unwrap();
        assert!(same_class(&g, &pb, &d(&g, &[(&[1, 0], 1)])).unwrap());
    }

    #[test]
    fn simplex_counts() {
        assert_eq!(simplex_point_count(2, 2), 6);
        assert_eq!(simplex_point_count(3, 1), 4);
        assert_eq!(simplex_point_count(2, -1), 0);
    }
}

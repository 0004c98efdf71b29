//! Lattices, simplicial fans, star fans and fan morphisms.
//!
//! A [`Fan`] stores its rays and maximal cones in canonical (lexicographic)
//! order, so two fans built from the same data in any order are identical.

use std::collections::{BTreeSet, HashMap};

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat::{dot, gcd_vec, row_reduce_columns};
use crate::linalg::{self, q, Q};
use crate::polyhedron::{is_feasible, Constraint};

/// A cone given by sorted indices into its fan's ray list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cone(pub Vec<usize>);

impl Cone {
    pub fn new(mut rays: Vec<usize>) -> Self {
        rays.sort_unstable();
        rays.dedup();
        Cone(rays)
    }

    pub fn rays(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn contains_ray(&self, r: usize) -> bool {
        self.0.binary_search(&r).is_ok()
    }

    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.0.iter().all(|r| other.contains_ray(*r))
    }

    pub fn intersect(&self, other: &Cone) -> Cone {
        Cone(self.0.iter().copied().filter(|r| other.contains_ray(*r)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fan {
    rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Cone>,
}

impl Fan {
    /// Validates and canonicalizes fan data. Returns the fan and the permutation
    /// `perm[input_index] = canonical_index` applied to the rays.
    pub fn build_with_permutation(
        rank: usize,
        rays: Vec<Vec<i64>>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<(Fan, Vec<usize>)> {
        for (i, r) in rays.iter().enumerate() {
            if r.len() != rank {
                return Err(Error::InvalidInput(format!("ray {i} has length {} but lattice rank is {rank}", r.len())));
            }
            if gcd_vec(r) != 1 {
                return Err(Error::NonPrimitiveRay { index: i });
            }
        }
        let mut order: Vec<usize> = (0..rays.len()).collect();
        order.sort_by(|&a, &b| rays[a].cmp(&rays[b]));
        for w in order.windows(2) {
            if rays[w[0]] == rays[w[1]] {
                return Err(Error::DuplicateRay { index: w[1].max(w[0]) });
            }
        }
        let mut perm = vec![0; rays.len()];
        for (canon, &orig) in order.iter().enumerate() {
            perm[orig] = canon;
        }
        let sorted_rays: Vec<Vec<i64>> = order.iter().map(|&i| rays[i].clone()).collect();
        let mut cones = Vec::new();
        for c in &max_cones {
            if let Some(&bad) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidInput(format!("cone references missing ray {bad}")));
            }
            let cone = Cone::new(c.iter().map(|&i| perm[i]).collect());
            let gens: Vec<Vec<i64>> = cone.0.iter().map(|&i| sorted_rays[i].clone()).collect();
            if cone.dim() != c.len() || linalg::rank(&linalg::from_i64(&gens)) != cone.dim() {
                return Err(Error::NotSimplicial { cone: c.clone() });
            }
            cones.push(cone);
        }
        cones.sort();
        cones.dedup();
        // keep only maximal cones
        let maximal: Vec<Cone> =
            cones.iter().filter(|c| !cones.iter().any(|d| d != *c && c.is_face_of(d))).cloned().collect();
        if maximal.is_empty() {
            return Err(Error::InvalidInput("fan has no cones".into()));
        }
        for r in 0..sorted_rays.len() {
            if !maximal.iter().any(|c| c.contains_ray(r)) {
                return Err(Error::InvalidInput(format!("ray {:?} lies in no cone", sorted_rays[r])));
            }
        }
        let fan = Fan { rank, rays: sorted_rays, max_cones: maximal };
        for i in 0..fan.max_cones.len() {
            for j in i + 1..fan.max_cones.len() {
                if !fan.meet_properly(&fan.max_cones[i], &fan.max_cones[j]) {
                    let back = |c: &Cone| -> Vec<usize> { c.0.iter().map(|&k| order[k]).collect() };
                    return Err(Error::FaceConditionViolated {
                        first: back(&fan.max_cones[i]),
                        second: back(&fan.max_cones[j]),
                    });
                }
            }
        }
        Ok((fan, perm))
    }

    pub fn build(rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        let rank = rays.first().map(Vec::len).unwrap_or(0);
        if rank == 0 {
            return Err(Error::InvalidInput("rays must have length >= 1".into()));
        }
        Ok(Self::build_with_permutation(rank, rays, max_cones)?.0)
    }

    /// The fan of a point: rank-0 lattice with the zero cone only.
    pub fn point() -> Fan {
        Fan { rank: 0, rays: Vec::new(), max_cones: vec![Cone(Vec::new())] }
    }

    /// Whether `a ∩ b` (as real cones) equals the cone on their common rays.
    fn meet_properly(&self, a: &Cone, b: &Cone) -> bool {
        let common = a.intersect(b);
        let only_a: Vec<usize> = a.0.iter().copied().filter(|r| !common.contains_ray(*r)).collect();
        if only_a.is_empty() {
            return true;
        }
        // variables: lambda over a's rays, mu over b's rays
        let na = a.dim();
        let nb = b.dim();
        let vars = na + nb;
        let mut eqs = Vec::new();
        for coord in 0..self.rank {
            let mut coeffs = vec![q(0); vars];
            for (k, &r) in a.0.iter().enumerate() {
                coeffs[k] = q(self.rays[r][coord]);
            }
            for (k, &r) in b.0.iter().enumerate() {
                coeffs[na + k] = q(-self.rays[r][coord]);
            }
            eqs.push(Constraint::new(coeffs, q(0)));
        }
        let mut norm = vec![q(0); vars];
        for (k, r) in a.0.iter().enumerate() {
            if !common.contains_ray(*r) {
                norm[k] = q(1);
            }
        }
        eqs.push(Constraint::new(norm, q(-1)));
        let ineqs: Vec<Constraint> = (0..vars)
            .map(|v| {
                let mut c = vec![q(0); vars];
                c[v] = q(1);
                Constraint::new(c, q(0))
            })
            .collect();
        !is_feasible(vars, &eqs, &ineqs)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    pub fn ray_index(&self, v: &[i64]) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    /// All cones of the fan (faces of maximal cones), sorted by dimension then lexicographically.
    pub fn all_cones(&self) -> Vec<Cone> {
        let mut set = BTreeSet::new();
        for c in &self.max_cones {
            let k = c.dim();
            for mask in 0u64..(1u64 << k) {
                let face: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| c.0[b]).collect();
                set.insert(Cone(face));
            }
        }
        let mut v: Vec<Cone> = set.into_iter().collect();
        v.sort_by(|a, b| (a.dim(), &a.0).cmp(&(b.dim(), &b.0)));
        v
    }

    pub fn contains_cone(&self, c: &Cone) -> bool {
        self.max_cones.iter().any(|m| c.is_face_of(m))
    }

    pub fn cone_generators(&self, c: &Cone) -> Vec<Vec<i64>> {
        c.0.iter().map(|&i| self.rays[i].clone()).collect()
    }

    fn cone_extends_to_basis(&self, c: &Cone) -> bool {
        if c.dim() == 0 {
            return true;
        }
        let (_, red) = row_reduce_columns(self.rank, &self.cone_generators(c));
        (0..c.dim()).all(|i| red[i][i].abs() == 1)
    }

    pub fn is_smooth(&self) -> bool {
        self.max_cones.iter().all(|c| self.cone_extends_to_basis(c))
    }

    pub fn is_complete(&self) -> bool {
        let n = self.rank;
        if n == 0 {
            return true;
        }
        if self.max_cones.iter().any(|c| c.dim() != n) {
            return false;
        }
        let mut facets: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (ci, c) in self.max_cones.iter().enumerate() {
            for skip in 0..n {
                let f: Vec<usize> = c.0.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &r)| r).collect();
                facets.entry(f).or_default().push(ci);
            }
        }
        if facets.values().any(|v| v.len() != 2) {
            return false;
        }
        // connectivity through shared facets
        let m = self.max_cones.len();
        let mut seen = vec![false; m];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for v in facets.values() {
                if v.contains(&c) {
                    for &d in v {
                        if !seen[d] {
                            seen[d] = true;
                            stack.push(d);
                        }
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_smooth_complete(&self) -> bool {
        self.is_smooth() && self.is_complete()
    }

    pub fn require_smooth_complete(&self) -> Result<()> {
        if self.is_smooth_complete() {
            Ok(())
        } else {
            Err(Error::RequiresSmoothComplete)
        }
    }

    /// Maximal cones as ray bitmasks (fans have at most 64 rays).
    pub fn max_cone_masks(&self) -> Vec<u64> {
        self.max_cones.iter().map(|c| c.0.iter().fold(0u64, |m, &r| m | 1 << r)).collect()
    }

    /// Indices of maximal cones containing `c`.
    pub fn max_cones_containing(&self, c: &Cone) -> Vec<usize> {
        (0..self.max_cones.len()).filter(|&i| c.is_face_of(&self.max_cones[i])).collect()
    }

    /// Star fan at `cone`: the fan of the orbit closure V(cone) in N / span(cone).
    pub fn star(&self, cone: &Cone) -> Result<StarFan> {
        if !self.contains_cone(cone) {
            return Err(Error::ConeNotInFan(cone.0.clone()));
        }
        if !self.is_smooth() {
            return Err(Error::RequiresSmooth);
        }
        let k = cone.dim();
        let n = self.rank;
        let (p, red) = row_reduce_columns(n, &self.cone_generators(cone));
        let quotient: Vec<Vec<i64>> = p[k..].to_vec();
        // dual characters: H^{-1} * P[0..k], H = top k x k block of red (columns = cone rays)
        let h: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| red[j][i]).collect()).collect();
        let hinv = linalg::inverse(&linalg::from_i64(&h)).expect("smooth cone");
        let lifts: Vec<Vec<i64>> = (0..k)
            .map(|a| {
                (0..n)
                    .map(|col| {
                        let mut s = Q::from_integer(0.into());
                        for b in 0..k {
                            s += &hinv[a][b] * q(p[b][col]);
                        }
                        crate::intmat::to_integer_vec(&[s]).expect("unimodular")[0]
                    })
                    .collect()
            })
            .collect();
        let project = |v: &[i64]| -> Vec<i64> { quotient.iter().map(|row| dot(row, v)).collect() };
        let containing = self.max_cones_containing(cone);
        let mut star_rays: Vec<usize> = Vec::new();
        for &ci in &containing {
            for &r in &self.max_cones[ci].0 {
                if !cone.contains_ray(r) && !star_rays.contains(&r) {
                    star_rays.push(r);
                }
            }
        }
        star_rays.sort_unstable();
        if n == k {
            return Ok(StarFan { fan: Fan::point(), cone: cone.clone(), quotient, lifts, ray_origin: Vec::new() });
        }
        let images: Vec<Vec<i64>> = star_rays.iter().map(|&r| project(&self.rays[r])).collect();
        let cones: Vec<Vec<usize>> = containing
            .iter()
            .map(|&ci| {
                self.max_cones[ci]
                    .0
                    .iter()
                    .filter(|r| !cone.contains_ray(**r))
                    .map(|r| star_rays.iter().position(|s| s == r).unwrap())
                    .collect()
            })
            .collect();
        let (fan, perm) = Fan::build_with_permutation(n - k, images, cones)?;
        let mut ray_origin = vec![0; star_rays.len()];
        for (i, &orig) in star_rays.iter().enumerate() {
            ray_origin[perm[i]] = orig;
        }
        Ok(StarFan { fan, cone: cone.clone(), quotient, lifts, ray_origin })
    }
}

/// The star fan at a cone together with the data linking it back to the ambient fan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarFan {
    pub fan: Fan,
    pub cone: Cone,
    /// Projection `N -> N / span(cone)`, one row per quotient coordinate.
    pub quotient: Vec<Vec<i64>>,
    /// Characters `m_a` with `<m_a, u_b> = delta_ab` for the cone's rays `u_b`.
    pub lifts: Vec<Vec<i64>>,
    /// `ray_origin[star_ray] = ambient ray index`.
    pub ray_origin: Vec<usize>,
}

impl StarFan {
    pub fn star_ray_of(&self, ambient_ray: usize) -> Option<usize> {
        self.ray_origin.iter().position(|&r| r == ambient_ray)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanMorphism {
    pub source: Fan,
    pub target: Fan,
    /// `target_rank x source_rank` integer matrix.
    pub matrix: Vec<Vec<i64>>,
    pub relative_dimension: isize,
    pub lattice_surjective: bool,
}

impl FanMorphism {
    pub fn build(source: Fan, target: Fan, matrix: Vec<Vec<i64>>) -> Result<Self> {
        if matrix.len() != target.rank() || matrix.iter().any(|r| r.len() != source.rank()) {
            return Err(Error::InvalidInput("morphism matrix has wrong shape".into()));
        }
        for c in source.max_cones() {
            let images: Vec<Vec<i64>> =
                c.0.iter().map(|&r| matrix.iter().map(|row| dot(row, source.ray(r))).collect()).collect();
            let ok = target.max_cones().iter().any(|t| {
                let gens = linalg::from_i64(&target.cone_generators(t));
                images.iter().all(|v| {
                    if v.iter().all(|x| *x == 0) {
                        return true;
                    }
                    if gens.is_empty() {
                        return false;
                    }
                    let vq: Vec<Q> = v.iter().map(|&x| q(x)).collect();
                    linalg::coordinates(&gens, &vq).is_some_and(|cs| cs.iter().all(|x| !x.is_negative()))
                })
            });
            if !ok {
                return Err(Error::ConeImageNotContained(c.0.clone()));
            }
        }
        let lattice_surjective = target.rank() == 0 || linalg::rank(&linalg::from_i64(&matrix)) == target.rank();
        Ok(FanMorphism {
            relative_dimension: source.rank() as isize - target.rank() as isize,
            lattice_surjective,
            source,
            target,
            matrix,
        })
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matrix.iter().map(|row| dot(row, v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Fan {
        Fan::build(vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    fn f2() -> Fan {
        Fan::build(
            vec![vec![1, 0], vec![0, 1], vec![-1, 2], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
        .unwrap()
    }

    #[test]
    fn p2_is_smooth_and_complete() {
        let f = p2();
        assert!(f.is_smooth() && f.is_complete());
        assert_eq!(f.rays()[0], vec![-1, -1]);
    }

    #[test]
    fn non_smooth_cone_is_constructible() {
        let f = Fan::build(vec![vec![1, 0], vec![1, 2]], vec![vec![0, 1]]).unwrap();
        assert!(!f.is_smooth());
        assert!(!f.is_complete());
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            Fan::build(vec![vec![2, 0], vec![0, 1]], vec![vec![0, 1]]),
            Err(Error::NonPrimitiveRay { index: 0 })
        );
        assert!(matches!(
            Fan::build(vec![vec![1, 0], vec![0, 1], vec![1, 1]], vec![vec![0, 1, 2]]),
            Err(Error::NotSimplicial { .. })
        ));
        assert!(matches!(
            Fan::build(vec![vec![1, 0], vec![1, 0]], vec![vec![0], vec![1]]),
            Err(Error::DuplicateRay { .. })
        ));
        // overlapping 2-cones
        assert!(matches!(
            Fan::build(vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![-1, 2]], vec![vec![0, 1], vec![2, 3]]),
            Err(Error::FaceConditionViolated { .. })
        ));
    }

    #[test]
    fn canonical_order_is_input_independent() {
        let a = p2();
        let b =
            Fan::build(vec![vec![-1, -1], vec![1, 0], vec![0, 1]], vec![vec![2, 0], vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hirzebruch_star_is_p1() {
        let f = f2();
        assert!(f.is_smooth() && f.is_complete());
        let r = f.ray_index(&[-1, 2]).unwrap();
        let s = f.star(&Cone(vec![r])).unwrap();
        assert_eq!(s.fan.rank(), 1);
        assert_eq!(s.fan.rays(), &[vec![-1], vec![1]]);
        assert!(s.fan.is_complete());
    }

    #[test]
    fn star_at_fixed_point_is_a_point() {
        let f = p2();
        let s = f.star(&f.max_cones()[0].clone()).unwrap();
        assert_eq!(s.fan.rank(), 0);
        assert_eq!(s.fan.max_cones().len(), 1);
    }

    #[test]
    fn affine_plane_is_not_complete() {
        let f = Fan::build(vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        assert!(f.is_smooth());
        assert!(!f.is_complete());
    }

    #[test]
    fn morphisms() {
        let p1 = Fan::build(vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
        let m = FanMorphism::build(f2(), p1.clone(), vec![vec![1, 0]]).unwrap();
        assert_eq!(m.relative_dimension, 1);
        let to_point = FanMorphism::build(p2(), Fan::point(), vec![]).unwrap();
        assert_eq!(to_point.relative_dimension, 2);
        // (x,y) -> y is not a map F2 -> P1 of fans
        assert!(FanMorphism::build(f2(), p1, vec![vec![0, 1]]).is_err());
    }
}

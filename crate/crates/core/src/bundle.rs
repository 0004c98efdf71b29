//! Torus-equivariant vector bundles given by Klyachko filtrations.
//!
//! Each ray carries a decreasing filtration `E^rho(j)` of a fixed fiber `Q^r`. A
//! filtration is stored by its steps `(j, W)`: `E(i) = W` for `j <= i < j_next`, the
//! full fiber below the first step, and the zero space from the last step on.

use std::collections::HashMap;

use dashmap::DashMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohomology::{CechComplex, CohomologyTable, FanEngine, MappingCone};
use crate::divisor::TorusDivisor;
use crate::error::{Error, Result};
use crate::intmat::{box_points, dot, solve_dual};
use crate::lattice::{Cone, Fan, StarFan};
use crate::linalg::{self, q, QMat, Subspace, Q};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Filtration {
    rank: usize,
    steps: Vec<(i64, Subspace)>,
}

impl Filtration {
    /// Canonicalizes raw steps. Returns `None` unless the data is decreasing and ends at zero.
    pub fn new(rank: usize, mut raw: Vec<(i64, Subspace)>) -> Option<Filtration> {
        raw.sort_by_key(|(j, _)| *j);
        if raw.windows(2).any(|w| w[0].0 == w[1].0) || raw.iter().any(|(_, w)| w.ambient() != rank) {
            return None;
        }
        let mut steps: Vec<(i64, Subspace)> = Vec::new();
        let mut prev = Subspace::full(rank);
        for (j, w) in raw {
            if !w.is_subspace_of(&prev) {
                return None;
            }
            if w.dim() < prev.dim() {
                steps.push((j, w.clone()));
                prev = w;
            }
        }
        if !prev.is_zero() {
            return None;
        }
        Some(Filtration { rank, steps })
    }

    /// Filtration with `E(j) = f(j)` on `lo..=hi`, full below `lo`; `f(hi)` must be zero.
    pub fn from_fn(rank: usize, lo: i64, hi: i64, mut f: impl FnMut(i64) -> Subspace) -> Filtration {
        let raw: Vec<(i64, Subspace)> = (lo..=hi).map(|j| (j, f(j))).collect();
        Filtration::new(rank, raw).expect("filtration data from a decreasing function")
    }

    /// `O(a D_rho)` on this ray: full up to `a`, zero after.
    pub fn line(a: i64) -> Filtration {
        Filtration { rank: 1, steps: vec![(a + 1, Subspace::zero(1))] }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn steps(&self) -> &[(i64, Subspace)] {
        &self.steps
    }

    pub fn first(&self) -> i64 {
        self.steps[0].0
    }

    pub fn last(&self) -> i64 {
        self.steps[self.steps.len() - 1].0
    }

    pub fn eval(&self, j: i64) -> Subspace {
        match self.steps.iter().rposition(|(s, _)| *s <= j) {
            None => Subspace::full(self.rank),
            Some(k) => self.steps[k].1.clone(),
        }
    }

    /// Indices `j` with `E(j) != E(j + 1)`.
    pub fn jump_positions(&self) -> Vec<i64> {
        self.steps.iter().map(|(s, _)| s - 1).collect()
    }

    /// Representative index with the same value: clamps into `[first - 1, last]`.
    pub fn clamp(&self, j: i64) -> i64 {
        j.clamp(self.first() - 1, self.last())
    }

    pub fn shift(&self, k: i64) -> Filtration {
        Filtration { rank: self.rank, steps: self.steps.iter().map(|(s, w)| (s + k, w.clone())).collect() }
    }

    /// Restriction to a subspace given by basis rows, in the coordinates of those rows.
    pub fn restrict_to(&self, rows: &QMat) -> Filtration {
        let k = rows.len();
        let span = Subspace::from_rows(self.rank, rows.clone());
        Filtration::from_fn(k, self.first() - 1, self.last(), |j| {
            let meet = self.eval(j).intersect(&span);
            Subspace::from_rows(
                k,
                meet.basis().iter().map(|v| linalg::coordinates(rows, v).expect("inside span")).collect(),
            )
        })
    }
}

/// Adapted decomposition on one maximal cone: pieces `V_chi` indexed by the jump
/// position of each ray of the cone.
/// Clamped filtration-index keys of the two complexes in a mapping cone.
type KeyPair = (Vec<i64>, Vec<i64>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptedDecomposition {
    pub cone: Cone,
    pub pieces: Vec<(Vec<i64>, QMat)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KlyachkoBundle {
    fan: Fan,
    rank: usize,
    filtrations: Vec<Filtration>,
    decompositions: Vec<AdaptedDecomposition>,
}

fn adapted_decomposition(cone: &Cone, filts: &[&Filtration], rank: usize) -> Option<AdaptedDecomposition> {
    let jumps: Vec<Vec<i64>> = filts.iter().map(|f| f.jump_positions()).collect();
    let lo: Vec<i64> = vec![0; filts.len()];
    let hi: Vec<i64> = jumps.iter().map(|j| j.len() as i64 - 1).collect();
    let meet = |chi: &[i64]| -> Subspace {
        filts.iter().zip(chi).fold(Subspace::full(rank), |acc, (f, &j)| acc.intersect(&f.eval(j)))
    };
    let mut pieces = Vec::new();
    let mut total = Vec::new();
    for idx in box_points(&lo, &hi) {
        let chi: Vec<i64> = idx.iter().zip(&jumps).map(|(&i, j)| j[i as usize]).collect();
        let w = meet(&chi);
        if w.is_zero() {
            continue;
        }
        let mut higher = Subspace::zero(rank);
        for i in 0..chi.len() {
            let mut up = chi.clone();
            up[i] += 1;
            higher = higher.sum(&meet(&up));
        }
        let piece = w.complement_rows(&higher);
        if !piece.is_empty() {
            total.extend(piece.iter().cloned());
            pieces.push((chi, piece));
        }
    }
    if total.len() != rank || linalg::rank(&total) != rank {
        return None;
    }
    // every filtration step must be spanned by the pieces of weight >= step
    for (i, f) in filts.iter().enumerate() {
        for (s, w) in f.steps() {
            let span: QMat =
                pieces.iter().filter(|(chi, _)| chi[i] >= *s).flat_map(|(_, p)| p.iter().cloned()).collect();
            if Subspace::from_rows(rank, span) != *w {
                return None;
            }
        }
    }
    Some(AdaptedDecomposition { cone: cone.clone(), pieces })
}

impl KlyachkoBundle {
    pub fn build(fan: &Fan, rank: usize, filtrations: Vec<Filtration>) -> Result<KlyachkoBundle> {
        if rank == 0 {
            return Err(Error::InvalidInput("bundle rank must be positive".into()));
        }
        if filtrations.len() != fan.n_rays() {
            return Err(Error::InvalidInput(format!(
                "{} filtrations given for {} rays",
                filtrations.len(),
                fan.n_rays()
            )));
        }
        if let Some(r) = filtrations.iter().position(|f| f.rank() != rank) {
            return Err(Error::InvalidInput(format!("filtration on ray {r} has the wrong rank")));
        }
        let decompositions = fan
            .max_cones()
            .iter()
            .map(|c| {
                let filts: Vec<&Filtration> = c.rays().iter().map(|&r| &filtrations[r]).collect();
                adapted_decomposition(c, &filts, rank).ok_or_else(|| Error::IncompatibleOnCone(c.0.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(KlyachkoBundle { fan: fan.clone(), rank, filtrations, decompositions })
    }

    /// Builds from raw `(j, subspace)` steps per ray.
    pub fn from_raw(fan: &Fan, rank: usize, raw: Vec<Vec<(i64, Subspace)>>) -> Result<KlyachkoBundle> {
        let filts = raw
            .into_iter()
            .enumerate()
            .map(|(ray, steps)| Filtration::new(rank, steps).ok_or(Error::NotDecreasing { ray }))
            .collect::<Result<Vec<_>>>()?;
        Self::build(fan, rank, filts)
    }

    pub fn line(fan: &Fan, d: &TorusDivisor) -> KlyachkoBundle {
        let filts = d.coeffs.iter().map(|&a| Filtration::line(a)).collect();
        Self::build(fan, 1, filts).expect("rank one data is always compatible")
    }

    pub fn trivial(fan: &Fan, rank: usize) -> KlyachkoBundle {
        let filts = vec![Filtration { rank, steps: vec![(1, Subspace::zero(rank))] }; fan.n_rays()];
        Self::build(fan, rank, filts).expect("trivial data is compatible")
    }

    /// Direct sum of line bundles.
    pub fn split(fan: &Fan, summands: &[TorusDivisor]) -> Result<KlyachkoBundle> {
        let mut it = summands.iter();
        let first = it.next().ok_or_else(|| Error::InvalidInput("empty direct sum".into()))?;
        it.try_fold(Self::line(fan, first), |acc, d| acc.direct_sum(&Self::line(fan, d)))
    }

    /// Tangent bundle: the fiber is `N ⊗ Q`, and `E^rho(1)` is the line through `u_rho`.
    pub fn tangent(fan: &Fan) -> Result<KlyachkoBundle> {
        let n = fan.rank();
        let filts = fan
            .rays()
            .iter()
            .map(|u| {
                let line = Subspace::from_rows(n, vec![u.iter().map(|&x| q(x)).collect()]);
                Filtration::new(n, vec![(1, line), (2, Subspace::zero(n))]).expect("decreasing")
            })
            .collect();
        Self::build(fan, n, filts)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn filtrations(&self) -> &[Filtration] {
        &self.filtrations
    }

    pub fn filtration(&self, ray: usize) -> &Filtration {
        &self.filtrations[ray]
    }

    pub fn decompositions(&self) -> &[AdaptedDecomposition] {
        &self.decompositions
    }

    /// The divisor of a rank-one bundle.
    pub fn as_divisor(&self) -> Option<TorusDivisor> {
        (self.rank == 1).then(|| TorusDivisor::new(self.filtrations.iter().map(|f| f.first() - 1).collect()))
    }

    fn same_fan(&self, other: &KlyachkoBundle) -> Result<()> {
        if self.fan != other.fan {
            return Err(Error::FanMismatch);
        }
        Ok(())
    }

    pub fn dual(&self) -> KlyachkoBundle {
        let r = self.rank;
        let filts = self
            .filtrations
            .iter()
            .map(|f| Filtration::from_fn(r, 1 - f.last(), 2 - f.first(), |j| f.eval(1 - j).annihilator()))
            .collect();
        Self::build(&self.fan, r, filts).expect("dual of compatible data is compatible")
    }

    pub fn tensor(&self, other: &KlyachkoBundle) -> Result<KlyachkoBundle> {
        self.same_fan(other)?;
        let r = self.rank * other.rank;
        let filts = self
            .filtrations
            .iter()
            .zip(&other.filtrations)
            .map(|(a, b)| {
                Filtration::from_fn(r, a.first() + b.first() - 1, a.last() + b.last() - 1, |j| {
                    (a.first() - 1..a.last())
                        .fold(Subspace::zero(r), |acc, p| acc.sum(&a.eval(p).tensor(&b.eval(j - p))))
                })
            })
            .collect();
        Self::build(&self.fan, r, filts)
    }

    pub fn direct_sum(&self, other: &KlyachkoBundle) -> Result<KlyachkoBundle> {
        self.same_fan(other)?;
        let (ra, rb) = (self.rank, other.rank);
        let r = ra + rb;
        let filts = self
            .filtrations
            .iter()
            .zip(&other.filtrations)
            .map(|(a, b)| {
                Filtration::from_fn(r, a.first().min(b.first()) - 1, a.last().max(b.last()), |j| {
                    let mut rows: QMat = a
                        .eval(j)
                        .basis()
                        .iter()
                        .map(|v| v.iter().cloned().chain(std::iter::repeat_n(Q::default(), rb)).collect())
                        .collect();
                    rows.extend(
                        b.eval(j)
                            .basis()
                            .iter()
                            .map(|v| std::iter::repeat_n(Q::default(), ra).chain(v.iter().cloned()).collect()),
                    );
                    Subspace::from_rows(r, rows)
                })
            })
            .collect();
        Self::build(&self.fan, r, filts)
    }

    pub fn end(&self) -> KlyachkoBundle {
        self.dual().tensor(self).expect("same fan")
    }

    /// `V ⊗ O(D)`.
    pub fn twist(&self, d: &TorusDivisor) -> KlyachkoBundle {
        let filts = self.filtrations.iter().zip(&d.coeffs).map(|(f, &a)| f.shift(a)).collect();
        Self::build(&self.fan, self.rank, filts).expect("twisting preserves compatibility")
    }

    /// The isomorphic bundle whose filtrations are moved by `v ↦ v g`; `None` if `g` is singular.
    pub fn change_fiber_basis(&self, g: &QMat) -> Option<KlyachkoBundle> {
        linalg::inverse(g)?;
        let r = self.rank;
        let filts = self
            .filtrations
            .iter()
            .map(|f| {
                let steps = f.steps().iter().map(|(j, w)| (*j, w.image(g, r))).collect();
                Filtration::new(r, steps).expect("image of a filtration")
            })
            .collect();
        Some(Self::build(&self.fan, r, filts).expect("isomorphic bundle"))
    }

    /// The sub-bundle on the fiber subspace spanned by `rows` (must be compatible).
    pub fn restrict_fiber(&self, rows: &QMat) -> Result<KlyachkoBundle> {
        let filts = self.filtrations.iter().map(|f| f.restrict_to(rows)).collect();
        Self::build(&self.fan, rows.len(), filts)
    }

    /// Degree-`m` global sections `∩_rho E^rho(-<m, u_rho>)`.
    pub fn sections_in_degree(&self, m: &[i64]) -> Subspace {
        self.fan
            .rays()
            .iter()
            .zip(&self.filtrations)
            .fold(Subspace::full(self.rank), |acc, (u, f)| acc.intersect(&f.eval(-dot(m, u))))
    }

    /// Box containing all characters with nonzero cohomology.
    pub fn support_box(&self, pad: i64) -> (Vec<i64>, Vec<i64>) {
        let n = self.fan.rank();
        let mut lo = vec![i64::MAX; n];
        let mut hi = vec![i64::MIN; n];
        for c in self.fan.max_cones() {
            let us = self.fan.cone_generators(c);
            let jumps: Vec<Vec<i64>> = c.rays().iter().map(|&r| self.filtrations[r].jump_positions()).collect();
            let zeros = vec![0; jumps.len()];
            let tops: Vec<i64> = jumps.iter().map(|j| j.len() as i64 - 1).collect();
            for idx in box_points(&zeros, &tops) {
                let rhs: Vec<i64> = idx.iter().zip(&jumps).map(|(&i, j)| -j[i as usize]).collect();
                let m = if n == 0 { Vec::new() } else { solve_dual(&us, &rhs).expect("full-dimensional cone") };
                for i in 0..n {
                    use num_traits::ToPrimitive;
                    lo[i] = lo[i].min(m[i].floor().to_integer().to_i64().expect("range"));
                    hi[i] = hi[i].max(m[i].ceil().to_integer().to_i64().expect("range"));
                }
            }
        }
        (lo.iter().map(|x| x - pad).collect(), hi.iter().map(|x| x + pad).collect())
    }

    fn clamped_key(&self, m: &[i64]) -> Vec<i64> {
        self.fan.rays().iter().zip(&self.filtrations).map(|(u, f)| f.clamp(-dot(m, u))).collect()
    }

    /// Degree-`m` Čech complex over the maximal cones, keyed by clamped filtration indices.
    pub fn complex_for_key(&self, engine: &FanEngine, key: &[i64], top: usize) -> CechComplex {
        CechComplex::build(&engine.nerve, self.rank, top, |mask| {
            (0..self.fan.n_rays())
                .filter(|r| mask >> r & 1 == 1)
                .fold(Subspace::full(self.rank), |acc, r| acc.intersect(&self.filtrations[r].eval(key[r])))
        })
    }

    pub fn cohomology(&self) -> Result<CohomologyTable> {
        let (lo, hi) = self.support_box(1);
        self.cohomology_over(&box_points(&lo, &hi))
    }

    /// Same computation over the support box enlarged by `padding`.
    pub fn cohomology_oracle(&self, padding: i64) -> Result<CohomologyTable> {
        let (lo, hi) = self.support_box(1 + padding);
        self.cohomology_over(&box_points(&lo, &hi))
    }

    fn cohomology_over(&self, chars: &[Vec<i64>]) -> Result<CohomologyTable> {
        self.fan.require_smooth_complete()?;
        let engine = FanEngine::for_fan(&self.fan);
        let n = self.fan.rank();
        let cache: DashMap<Vec<i64>, Vec<u64>> = DashMap::new();
        let keys: Vec<Vec<i64>> = chars.iter().map(|m| self.clamped_key(m)).collect();
        let mut distinct: Vec<Vec<i64>> = keys.clone();
        distinct.sort();
        distinct.dedup();
        distinct.par_iter().for_each(|k| {
            let h = self.complex_for_key(&engine, k, n + 1).cohomology(&engine.nerve, n);
            cache.insert(k.clone(), h.into_iter().map(|x| x as u64).collect());
        });
        let entries = chars.iter().zip(&keys).map(|(m, k)| (m.clone(), cache.get(k).unwrap().clone())).collect();
        Ok(CohomologyTable::from_characters(n, entries))
    }

    fn thickening_pair(&self, d: &TorusDivisor, m: u32) -> Result<KlyachkoBundle> {
        self.fan.require_smooth_complete()?;
        d.check(&self.fan)?;
        if !d.is_effective() {
            return Err(Error::DNotEffective);
        }
        Ok(self.twist(&d.scale(-(m as i64 + 1))))
    }

    /// `V ⊗ O_{D_m}` for effective `D`, via the mapping cone of `V(-(m+1)D) -> V`, together
    /// with the rank of the restriction `H^0(V) -> H^0(V ⊗ O_{D_m})`.
    pub fn thickening(&self, d: &TorusDivisor, m: u32) -> Result<Thickening> {
        let sub = self.thickening_pair(d, m)?;
        let engine = FanEngine::for_fan(&self.fan);
        let n = self.fan.rank();
        let (lo1, hi1) = self.support_box(1);
        let (lo2, hi2) = sub.support_box(1);
        let lo: Vec<i64> = lo1.iter().zip(&lo2).map(|(a, b)| *a.min(b)).collect();
        let hi: Vec<i64> = hi1.iter().zip(&hi2).map(|(a, b)| *a.max(b)).collect();
        let chars = box_points(&lo, &hi);
        let keys: Vec<(Vec<i64>, Vec<i64>)> = chars.iter().map(|c| (sub.clamped_key(c), self.clamped_key(c))).collect();
        let mut distinct = keys.clone();
        distinct.sort();
        distinct.dedup();
        let cache: DashMap<KeyPair, (Vec<u64>, u64)> = DashMap::new();
        distinct.par_iter().for_each(|(ka, kb)| {
            let a = sub.complex_for_key(&engine, ka, n + 1);
            let b = self.complex_for_key(&engine, kb, n + 1);
            let cone = MappingCone::new(&engine.nerve, &a, &b);
            let h = cone.cohomology(n).into_iter().map(|x| x as u64).collect();
            cache.insert((ka.clone(), kb.clone()), (h, cone.h0_map_rank() as u64));
        });
        let mut restriction_rank = 0;
        let entries = chars
            .iter()
            .zip(&keys)
            .map(|(c, k)| {
                let v = cache.get(k).expect("computed");
                restriction_rank += v.1;
                (c.clone(), v.0.clone())
            })
            .collect();
        let cohomology = CohomologyTable::from_characters(n, entries);
        let source_h0 = self.global_section_degrees()?.iter().map(|(_, s)| s.dim() as u64).sum();
        Ok(Thickening { surjective: restriction_rank == cohomology.h(0), cohomology, restriction_rank, source_h0 })
    }

    /// Invariant sections of `V ⊗ O_{D_m}`: for each basis element, its value in the fiber
    /// over every maximal cone (row-major, cones in fan order). Only cones meeting `supp D`
    /// carry meaningful values.
    pub fn thickening_invariant_sections(&self, d: &TorusDivisor, m: u32) -> Result<Vec<QMat>> {
        let sub = self.thickening_pair(d, m)?;
        let engine = FanEngine::for_fan(&self.fan);
        let n = self.fan.rank();
        let zero = vec![0; n];
        let a = sub.complex_for_key(&engine, &sub.clamped_key(&zero), n + 1);
        let b = self.complex_for_key(&engine, &self.clamped_key(&zero), n + 1);
        let reps = MappingCone::new(&engine.nerve, &a, &b).h0_representatives();
        let r = self.rank;
        Ok(reps.into_iter().map(|y| y.chunks(r).map(|c| c.to_vec()).collect()).collect())
    }

    /// Restriction to the invariant divisor of `ray`, as a bundle on the star fan.
    pub fn restrict(&self, ray: usize) -> Result<RestrictedBundle> {
        self.fan.require_smooth_complete()?;
        let star = self.fan.star(&Cone(vec![ray]))?;
        self.restrict_to_star(star)
    }

    /// Restriction along the star of a ray of a (possibly non-complete) smooth fan.
    pub fn restrict_to_star(&self, star: StarFan) -> Result<RestrictedBundle> {
        if star.cone.dim() != 1 {
            return Err(Error::InvalidInput("restriction is along a single ray".into()));
        }
        let ray = star.cone.0[0];
        let r = self.rank;
        let e = &self.filtrations[ray];
        // E(j) = C_j ⊕ E(j+1) over jump positions j, in increasing order of j
        let mut blocks: Vec<(i64, QMat)> = Vec::new();
        for j in e.jump_positions() {
            blocks.push((j, e.eval(j).complement_rows(&e.eval(j + 1))));
        }
        let basis: QMat = blocks.iter().flat_map(|(_, c)| c.iter().cloned()).collect();
        let offsets: Vec<usize> = blocks
            .iter()
            .scan(0, |acc, (_, c)| {
                let o = *acc;
                *acc += c.len();
                Some(o)
            })
            .collect();
        let m0 = &star.lifts[0];
        let filts = star
            .ray_origin
            .iter()
            .map(|&orig| {
                let f = &self.filtrations[orig];
                let t = dot(m0, self.fan.ray(orig));
                let lo = blocks.iter().map(|(j, _)| f.first() - j * t).min().unwrap() - 1;
                let hi = blocks.iter().map(|(j, _)| f.last() - j * t).max().unwrap();
                Filtration::from_fn(r, lo, hi, |k| {
                    let mut rows = Vec::new();
                    for ((j, c), &off) in blocks.iter().zip(&offsets) {
                        let meet = e.eval(*j).intersect(&f.eval(k + j * t));
                        for v in meet.basis() {
                            let coords = linalg::coordinates(&basis, v).expect("basis spans fiber");
                            let mut row = vec![Q::default(); r];
                            row[off..off + c.len()].clone_from_slice(&coords[off..off + c.len()]);
                            rows.push(row);
                        }
                    }
                    Subspace::from_rows(r, rows)
                })
            })
            .collect();
        let bundle = KlyachkoBundle::build(&star.fan, r, filts)
            .map_err(|err| Error::RestrictionInconsistent(err.to_string()))?;
        Ok(RestrictedBundle { bundle, star, basis })
    }

    /// `h^0` degree by degree: characters with nonzero sections and their dimensions.
    pub fn global_section_degrees(&self) -> Result<Vec<(Vec<i64>, Subspace)>> {
        self.fan.require_smooth_complete()?;
        let (lo, hi) = self.support_box(0);
        Ok(box_points(&lo, &hi)
            .into_par_iter()
            .filter_map(|m| {
                let s = self.sections_in_degree(&m);
                (!s.is_zero()).then_some((m, s))
            })
            .collect())
    }

    /// Structural key for comparing bundles up to the order of rays (used for equality
    /// checks after canonicalization).
    pub fn filtration_signature(&self) -> Vec<Vec<(i64, usize)>> {
        self.filtrations.iter().map(|f| f.steps().iter().map(|(j, w)| (*j, w.dim())).collect()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thickening {
    pub cohomology: CohomologyTable,
    /// Rank of `H^0(V) -> H^0(V ⊗ O_{D_m})`.
    pub restriction_rank: u64,
    pub source_h0: u64,
    pub surjective: bool,
}

/// A bundle restricted to an invariant divisor, with the fiber coordinates used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedBundle {
    pub bundle: KlyachkoBundle,
    pub star: StarFan,
    /// Row `k` is the ambient fiber vector used as the `k`-th restricted coordinate.
    pub basis: QMat,
}

/// `h^i(E ⊗ L^{-a})` over a range of `a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingScan {
    pub degree: usize,
    pub values: Vec<(i64, u64)>,
    pub all_zero: bool,
    pub first_nonzero: Option<i64>,
}

pub fn twisted_vanishing_scan(
    e: &KlyachkoBundle,
    l: &TorusDivisor,
    i: usize,
    a_range: std::ops::RangeInclusive<i64>,
) -> Result<VanishingScan> {
    let mut values = Vec::new();
    for a in a_range {
        let t = e.twist(&l.scale(-a)).cohomology()?;
        values.push((a, t.h(i)));
    }
    let first_nonzero = values.iter().find(|(_, h)| *h != 0).map(|(a, _)| *a);
    Ok(VanishingScan { degree: i, all_zero: first_nonzero.is_none(), first_nonzero, values })
}

/// Convenience: map from degree to section subspace, for lookups.
pub fn section_map(v: &KlyachkoBundle) -> Result<HashMap<Vec<i64>, Subspace>> {
    Ok(v.global_section_degrees()?.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::line_bundle_cohomology;
    use crate::divisor::restrict_divisor_class;

    fn p2() -> Fan {
        Fan::build(vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    fn p3() -> Fan {
        Fan::build(
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap()
    }

    fn o(f: &Fan, k: i64) -> TorusDivisor {
        let mut c = vec![0; f.n_rays()];
        c[0] = k;
        TorusDivisor::new(c)
    }

    #[test]
    fn thickening_matches_line_bundle_computation() {
        use crate::cohomology::twisted_thickening_cohomology;
        use crate::divisor::boundary_divisor;
        let f = p2();
        let delta = boundary_divisor(&f);
        for k in -2..=2 {
            for m in 0..3 {
                let l = o(&f, k);
                let t = KlyachkoBundle::line(&f, &l).thickening(&delta, m).unwrap();
                assert_eq!(t.cohomology.dims, twisted_thickening_cohomology(&f, &l, &delta, m).unwrap().dims);
            }
        }
        let g = p3();
        let t = KlyachkoBundle::trivial(&g, 2).thickening(&boundary_divisor(&g), 2).unwrap();
        assert_eq!((t.cohomology.h(0), t.restriction_rank, t.surjective), (2, 2, true));
        let secs = KlyachkoBundle::trivial(&g, 2).thickening_invariant_sections(&boundary_divisor(&g), 1).unwrap();
        assert_eq!(secs.len(), 2);
    }

    #[test]
    fn filtration_canonical_form() {
        let f = Filtration::new(2, vec![(0, Subspace::full(2)), (3, Subspace::zero(2))]).unwrap();
        assert_eq!(f.steps().len(), 1);
        assert_eq!(f.eval(2).dim(), 2);
        assert_eq!(f.eval(3).dim(), 0);
        let line = Subspace::from_rows(2, vec![vec![q(1), q(0)]]);
        let other = Subspace::from_rows(2, vec![vec![q(0), q(1)]]);
        assert!(Filtration::new(2, vec![(1, line), (2, other), (3, Subspace::zero(2))]).is_none());
        assert!(Filtration::new(1, vec![(1, Subspace::full(1))]).is_none());
    }

    #[test]
    fn rank_one_matches_line_bundles() {
        let f = p2();
        for k in -4..=3 {
            let d = o(&f, k);
            let v = KlyachkoBundle::line(&f, &d);
            assert_eq!(v.cohomology().unwrap(), line_bundle_cohomology(&f, &d).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn tangent_of_p2() {
        let f = p2();
        let t = KlyachkoBundle::tangent(&f).unwrap();
        assert_eq!(t.cohomology().unwrap().dims, vec![8, 0, 0]);
        assert_eq!(t.end().cohomology().unwrap().h(0), 1);
        assert_eq!(t.cohomology_oracle(2).unwrap(), t.cohomology().unwrap());
    }

    #[test]
    fn dual_and_sums() {
        let f = p2();
        let d = o(&f, 2);
        assert_eq!(KlyachkoBundle::line(&f, &d).dual(), KlyachkoBundle::line(&f, &d.neg()));
        let oo = KlyachkoBundle::trivial(&f, 1).direct_sum(&KlyachkoBundle::trivial(&f, 1)).unwrap();
        assert_eq!(oo.cohomology().unwrap().h(0), 2);
        let l1 = KlyachkoBundle::line(&f, &o(&f, 1));
        let l2 = KlyachkoBundle::line(&f, &o(&f, -2));
        assert_eq!(l1.tensor(&l2).unwrap(), KlyachkoBundle::line(&f, &o(&f, -1)));
    }

    #[test]
    fn incompatible_flags_are_rejected() {
        // three distinct lines in Q^2 on the three rays of one cone of P^3
        let f = p3();
        let lines = [vec![q(1), q(0)], vec![q(0), q(1)], vec![q(1), q(1)], vec![q(1), q(-1)]];
        let raw =
            lines.iter().map(|l| vec![(1, Subspace::from_rows(2, vec![l.clone()])), (2, Subspace::zero(2))]).collect();
        assert!(matches!(KlyachkoBundle::from_raw(&f, 2, raw), Err(Error::IncompatibleOnCone(_))));
    }

    #[test]
    fn restriction_matches_divisor_restriction() {
        let f = p3();
        for coeffs in [vec![2, 0, 0, 0], vec![1, -1, 2, 0], vec![0, 0, 0, -3]] {
            let d = TorusDivisor::new(coeffs);
            for ray in 0..4 {
                let (star, rd) = restrict_divisor_class(&f, &d, ray).unwrap();
                let rb = KlyachkoBundle::line(&f, &d).restrict(ray).unwrap();
                assert_eq!(rb.bundle, KlyachkoBundle::line(&star.fan, &rd));
            }
        }
    }

    #[test]
    fn restriction_of_sums_is_componentwise() {
        let f = p3();
        let v = KlyachkoBundle::split(&f, &[o(&f, 1), o(&f, -1)]).unwrap();
        let r = v.restrict(2).unwrap();
        let h = r.bundle.cohomology().unwrap();
        // O(1) ⊕ O(-1) on P^2
        assert_eq!(h.dims, vec![3, 0, 0]);
        let t = KlyachkoBundle::tangent(&f).unwrap().restrict(0).unwrap();
        assert_eq!(t.bundle.rank(), 3);
    }

    #[test]
    fn vanishing_scan() {
        let f = p2();
        let e = KlyachkoBundle::trivial(&f, 2);
        let s = twisted_vanishing_scan(&e, &o(&f, 1), 1, 1..=8).unwrap();
        assert!(s.all_zero);
        let t = KlyachkoBundle::tangent(&f).unwrap();
        let s = twisted_vanishing_scan(&t, &o(&f, 1), 1, 1..=4).unwrap();
        // dual to h^1(Omega(a - 3)), nonzero only for a = 3
        assert_eq!(s.first_nonzero, Some(3));
    }
}

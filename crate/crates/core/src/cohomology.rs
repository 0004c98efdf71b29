//! Čech cohomology of torus-equivariant sheaves, one character degree at a time.
//!
//! For a character `m` the degree-`m` part of the Čech complex over a cover by cones
//! has, over each intersection cone `tau`, a component that depends only on the
//! rays of `tau`. Components are given as subspaces of a fixed fiber `Q^r`
//! (`r = 1` for line bundles) and the differentials are signed inclusions.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use dashmap::DashMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divisor::{global_sections, vertex_box, TorusDivisor};
use crate::error::{Error, Result};
use crate::intmat::{box_points, dot};
use crate::lattice::Fan;
use crate::linalg::{self, QMat, Subspace, Q};

/// Nerve of a cover by cones: subsets of cover members, level `p` holding `(p+1)`-subsets.
#[derive(Debug, Clone)]
pub struct Nerve {
    /// Ray mask of the intersection cone of each subset, per level.
    pub cone_masks: Vec<Vec<u64>>,
    /// `cofaces[p][i]`: `(index at level p+1, sign is negative)`.
    cofaces: Vec<Vec<Vec<(usize, bool)>>>,
}

impl Nerve {
    /// Builds levels `0..=top` of the nerve of `cover` (given as ray masks).
    pub fn new(cover: &[u64], top: usize) -> Nerve {
        let m = cover.len();
        assert!(m <= 64, "cover too large");
        let mut levels: Vec<Vec<u64>> = Vec::new();
        let mut cur: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
        let mut subsets: Vec<Vec<Vec<usize>>> = Vec::new();
        for _ in 0..=top {
            if cur.is_empty() {
                break;
            }
            levels.push(cur.iter().map(|s| s.iter().fold(0u64, |a, &i| a | 1 << i)).collect());
            let next: Vec<Vec<usize>> = cur
                .iter()
                .flat_map(|s| {
                    let last = *s.last().unwrap();
                    (last + 1..m).map(move |c| {
                        let mut t = s.clone();
                        t.push(c);
                        t
                    })
                })
                .collect();
            subsets.push(std::mem::replace(&mut cur, next));
        }
        let cone_masks = subsets
            .iter()
            .map(|lvl| lvl.iter().map(|s| s.iter().fold(u64::MAX, |a, &i| a & cover[i])).collect())
            .collect();
        let index: Vec<HashMap<u64, usize>> =
            levels.iter().map(|l| l.iter().enumerate().map(|(i, &s)| (s, i)).collect()).collect();
        let cofaces = (0..levels.len())
            .map(|p| {
                levels[p]
                    .iter()
                    .map(|&s| {
                        if p + 1 >= levels.len() {
                            return Vec::new();
                        }
                        (0..m)
                            .filter(|c| s >> c & 1 == 0)
                            .map(|c| {
                                let k = (s & ((1u64 << c) - 1)).count_ones();
                                (index[p + 1][&(s | 1 << c)], k % 2 == 1)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Nerve { cone_masks, cofaces }
    }

    pub fn levels(&self) -> usize {
        self.cone_masks.len()
    }

    pub fn level_size(&self, p: usize) -> usize {
        self.cone_masks.get(p).map_or(0, Vec::len)
    }

    /// Applies the ambient Čech differential `d^p` to a row vector in `(Q^r)^{level p}`.
    pub fn apply_d(&self, p: usize, r: usize, v: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::default(); self.level_size(p + 1) * r];
        for (i, cof) in self.cofaces.get(p).into_iter().flatten().enumerate() {
            let block = &v[i * r..(i + 1) * r];
            if block.iter().all(num_traits::Zero::is_zero) {
                continue;
            }
            for &(j, neg) in cof {
                for (k, x) in block.iter().enumerate() {
                    if neg {
                        out[j * r + k] -= x;
                    } else {
                        out[j * r + k] += x;
                    }
                }
            }
        }
        out
    }
}

/// Degree-`m` Čech complex: per level, basis rows of the cochain space inside the ambient
/// `(Q^r)^{level}`.
#[derive(Debug, Clone)]
pub struct CechComplex {
    pub rank: usize,
    pub levels: Vec<QMat>,
}

impl CechComplex {
    /// `component(mask)` gives the subspace of `Q^r` over the cone with ray mask `mask`.
    pub fn build(nerve: &Nerve, r: usize, top: usize, mut component: impl FnMut(u64) -> Subspace) -> Self {
        let mut memo: HashMap<u64, Subspace> = HashMap::new();
        let levels = (0..=top)
            .map(|p| {
                let size = nerve.level_size(p);
                let mut rows = Vec::new();
                for i in 0..size {
                    let mask = nerve.cone_masks[p][i];
                    let sub = memo.entry(mask).or_insert_with(|| component(mask));
                    for b in sub.basis() {
                        let mut row = vec![Q::default(); size * r];
                        row[i * r..(i + 1) * r].clone_from_slice(b);
                        rows.push(row);
                    }
                }
                rows
            })
            .collect();
        CechComplex { rank: r, levels }
    }

    pub fn dim(&self, p: usize) -> usize {
        self.levels.get(p).map_or(0, Vec::len)
    }

    pub fn image(&self, nerve: &Nerve, p: usize) -> QMat {
        self.levels.get(p).map_or(Vec::new(), |l| l.iter().map(|v| nerve.apply_d(p, self.rank, v)).collect())
    }

    pub fn rank_d(&self, nerve: &Nerve, p: usize) -> usize {
        linalg::rank(&self.image(nerve, p))
    }

    /// `h^p` for `p = 0..=n`.
    pub fn cohomology(&self, nerve: &Nerve, n: usize) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=n).map(|p| self.rank_d(nerve, p)).collect();
        (0..=n).map(|p| self.dim(p) - ranks[p] - if p > 0 { ranks[p - 1] } else { 0 }).collect()
    }

    /// Whether `d^{p+1} d^p = 0` on every basis vector.
    pub fn d_squared_vanishes(&self, nerve: &Nerve) -> bool {
        (0..self.levels.len()).all(|p| {
            self.levels[p].iter().all(|v| {
                let dv = nerve.apply_d(p, self.rank, v);
                linalg::is_zero_vec(&nerve.apply_d(p + 1, self.rank, &dv))
            })
        })
    }
}

/// Mapping cone of a levelwise inclusion `a ⊆ b` of Čech complexes:
/// `cone^p = a^{p+1} ⊕ b^p`, `d(x, y) = (-d x, x + d y)`.
pub struct MappingCone<'a> {
    nerve: &'a Nerve,
    a: &'a CechComplex,
    b: &'a CechComplex,
}

impl<'a> MappingCone<'a> {
    pub fn new(nerve: &'a Nerve, a: &'a CechComplex, b: &'a CechComplex) -> Self {
        MappingCone { nerve, a, b }
    }

    fn amb(&self, p: usize) -> usize {
        self.nerve.level_size(p) * self.b.rank
    }

    /// Images of the basis of `cone^p` (`p >= -1`) in the ambient of `cone^{p+1}`.
    fn image(&self, p: isize) -> QMat {
        let r = self.b.rank;
        let mut out = Vec::new();
        let pa = (p + 1) as usize;
        for x in self.a.levels.get(pa).into_iter().flatten() {
            let mut row: Vec<Q> = self.nerve.apply_d(pa, r, x).into_iter().map(|v| -v).collect();
            row.extend(x.iter().cloned());
            out.push(row);
        }
        if p >= 0 {
            let pb = p as usize;
            for y in self.b.levels.get(pb).into_iter().flatten() {
                let mut row = vec![Q::default(); self.amb(pa + 1)];
                row.extend(self.nerve.apply_d(pb, r, y));
                out.push(row);
            }
        }
        out
    }

    fn dim(&self, p: isize) -> usize {
        self.a.dim((p + 1) as usize) + if p >= 0 { self.b.dim(p as usize) } else { 0 }
    }

    pub fn cohomology(&self, n: usize) -> Vec<usize> {
        let ranks: Vec<usize> = (-1..=n as isize).map(|p| linalg::rank(&self.image(p))).collect();
        (0..=n).map(|p| self.dim(p as isize) - ranks[p + 1] - ranks[p]).collect()
    }

    /// `b^0`-parts of cocycles whose classes form a basis of `H^0(cone)`.
    pub fn h0_representatives(&self) -> QMat {
        let img = self.image(0);
        let cols = self.amb(1) + self.amb(0);
        let a_amb = self.amb(1);
        let basis: QMat = self
            .a
            .levels
            .get(1)
            .into_iter()
            .flatten()
            .map(|x| {
                let mut row = x.clone();
                row.resize(a_amb + self.amb(0), Q::default());
                row
            })
            .chain(self.b.levels[0].iter().map(|y| {
                let mut row = vec![Q::default(); a_amb];
                row.extend(y.iter().cloned());
                row
            }))
            .collect();
        let coeffs = if img.is_empty() {
            linalg::identity(basis.len())
        } else {
            linalg::kernel(&linalg::transpose(&img, cols), img.len())
        };
        let mut acc = self.image(-1);
        let mut have = linalg::rank(&acc);
        let mut out = Vec::new();
        for c in coeffs {
            let mut v = vec![Q::default(); a_amb + self.amb(0)];
            for (coef, row) in c.iter().zip(&basis) {
                if !num_traits::Zero::is_zero(coef) {
                    for (t, s) in v.iter_mut().zip(row) {
                        *t += coef * s;
                    }
                }
            }
            acc.push(v.clone());
            let rk = linalg::rank(&acc);
            if rk > have {
                have = rk;
                out.push(v[a_amb..].to_vec());
            } else {
                acc.pop();
            }
        }
        out
    }

    /// Rank of `H^0(b) -> H^0(cone)`, `y ↦ (0, y)`.
    pub fn h0_map_rank(&self) -> usize {
        let boundaries = self.image(-1);
        let r = self.b.rank;
        let img0 = self.b.image(self.nerve, 0);
        let cols = self.amb(1);
        let kernel_coeffs =
            if img0.is_empty() { Vec::new() } else { linalg::kernel(&linalg::transpose(&img0, cols), img0.len()) };
        let base = linalg::rank(&boundaries);
        let mut stacked = boundaries;
        for c in kernel_coeffs {
            let mut row = vec![Q::default(); self.amb(1)];
            let mut y = vec![Q::default(); self.amb(0)];
            for (coef, basis_row) in c.iter().zip(&self.b.levels[0]) {
                if !num_traits::Zero::is_zero(coef) {
                    for (t, s) in y.iter_mut().zip(basis_row) {
                        *t += coef * s;
                    }
                }
            }
            debug_assert_eq!(y.len(), self.nerve.level_size(0) * r);
            row.extend(y);
            stacked.push(row);
        }
        linalg::rank(&stacked) - base
    }
}

/// Cohomology dimensions summed over characters, with the characters that contribute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyTable {
    /// `dims[i] = h^i`, `i = 0..=n`.
    pub dims: Vec<u64>,
    /// Characters with nonzero cohomology, in lexicographic order.
    pub by_character: Vec<(Vec<i64>, Vec<u64>)>,
}

impl CohomologyTable {
    pub fn from_characters(n: usize, entries: Vec<(Vec<i64>, Vec<u64>)>) -> Self {
        let mut dims = vec![0u64; n + 1];
        let mut by_character: Vec<(Vec<i64>, Vec<u64>)> =
            entries.into_iter().filter(|(_, h)| h.iter().any(|&x| x > 0)).collect();
        by_character.sort();
        for (_, h) in &by_character {
            for (d, x) in dims.iter_mut().zip(h) {
                *d += x;
            }
        }
        CohomologyTable { dims, by_character }
    }

    pub fn h(&self, i: usize) -> u64 {
        self.dims.get(i).copied().unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().enumerate().map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }

    /// Recomputes the Euler characteristic from the per-character breakdown.
    pub fn euler_consistent(&self) -> bool {
        let per: i64 = self
            .by_character
            .iter()
            .flat_map(|(_, h)| h.iter().enumerate().map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) }))
            .sum();
        per == self.euler_characteristic()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }
}

enum PatternCache {
    Dense(Vec<OnceLock<Vec<u64>>>),
    Sparse(DashMap<u64, Vec<u64>>),
}

/// Per-fan data shared by all cohomology computations: the nerve of the maximal-cone
/// cover and a cache of line-bundle complexes keyed by their negative-ray pattern.
pub struct FanEngine {
    pub fan: Fan,
    pub nerve: Nerve,
    line_cache: PatternCache,
}

impl FanEngine {
    fn new(fan: &Fan) -> Self {
        let nerve = Nerve::new(&fan.max_cone_masks(), fan.rank() + 2);
        let line_cache = if fan.n_rays() <= 16 {
            PatternCache::Dense((0..1usize << fan.n_rays()).map(|_| OnceLock::new()).collect())
        } else {
            PatternCache::Sparse(DashMap::new())
        };
        FanEngine { fan: fan.clone(), nerve, line_cache }
    }

    /// Shared engine for `fan`; engines are created once per distinct fan.
    pub fn for_fan(fan: &Fan) -> Arc<FanEngine> {
        static REGISTRY: OnceLock<Mutex<HashMap<Fan, Arc<FanEngine>>>> = OnceLock::new();
        let reg = REGISTRY.get_or_init(Default::default);
        let mut map = reg.lock().expect("engine registry poisoned");
        map.entry(fan.clone()).or_insert_with(|| Arc::new(FanEngine::new(fan))).clone()
    }

    /// Rays with `<m, u> < -a`.
    pub fn negative_mask(&self, d: &TorusDivisor, m: &[i64]) -> u64 {
        self.fan
            .rays()
            .iter()
            .zip(&d.coeffs)
            .enumerate()
            .filter(|(_, (u, a))| dot(m, u) < -**a)
            .fold(0, |acc, (r, _)| acc | 1 << r)
    }

    pub fn line_complex(&self, negative: u64) -> CechComplex {
        line_complex(&self.nerve, self.fan.rank() + 2, negative)
    }

    fn compute_line(&self, negative: u64) -> Vec<u64> {
        self.line_complex(negative).cohomology(&self.nerve, self.fan.rank()).into_iter().map(|x| x as u64).collect()
    }

    /// `h^i` of the degree-`m` part of `O(D)`, determined by the negative-ray pattern.
    pub fn line_degree(&self, negative: u64) -> Vec<u64> {
        match &self.line_cache {
            PatternCache::Dense(v) => v[negative as usize].get_or_init(|| self.compute_line(negative)).clone(),
            PatternCache::Sparse(map) => {
                if let Some(h) = map.get(&negative) {
                    return h.clone();
                }
                let h = self.compute_line(negative);
                map.insert(negative, h.clone());
                h
            }
        }
    }
}

/// The degree-`m` Čech complex of a line bundle whose negative rays are `negative`.
pub fn line_complex(nerve: &Nerve, top: usize, negative: u64) -> CechComplex {
    CechComplex::build(nerve, 1, top, |mask| if mask & negative == 0 { Subspace::full(1) } else { Subspace::zero(1) })
}

/// Characters in `conv{m_sigma}` dilated by `pad`.
pub fn support_box(fan: &Fan, d: &TorusDivisor, pad: i64) -> Result<Vec<Vec<i64>>> {
    let (lo, hi) = vertex_box(fan, d)?;
    let lo: Vec<i64> = lo.iter().map(|x| x - pad).collect();
    let hi: Vec<i64> = hi.iter().map(|x| x + pad).collect();
    Ok(box_points(&lo, &hi))
}

pub fn line_bundle_cohomology(fan: &Fan, d: &TorusDivisor) -> Result<CohomologyTable> {
    fan.require_smooth_complete()?;
    let engine = FanEngine::for_fan(fan);
    let chars = support_box(fan, d, 1)?;
    let entries: Vec<(Vec<i64>, Vec<u64>)> = chars
        .into_par_iter()
        .map(|m| {
            let h = engine.line_degree(engine.negative_mask(d, &m));
            (m, h)
        })
        .collect();
    Ok(CohomologyTable::from_characters(fan.rank(), entries))
}

/// The dimensions `h^i(O(D))` alone; skips the per-character table.
pub fn line_bundle_dims(fan: &Fan, d: &TorusDivisor) -> Result<Vec<u64>> {
    fan.require_smooth_complete()?;
    let engine = FanEngine::for_fan(fan);
    let n = fan.rank();
    let (lo, hi) = vertex_box(fan, d)?;
    let lo: Vec<i64> = lo.iter().map(|x| x - 1).collect();
    let hi: Vec<i64> = hi.iter().map(|x| x + 1).collect();
    if n == 0 {
        return Ok(engine.line_degree(0));
    }
    let add = |mut a: Vec<u64>, b: Vec<u64>| {
        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        a
    };
    // parallel over the first coordinate, odometer over the rest
    Ok((lo[0]..=hi[0])
        .into_par_iter()
        .map(|first| {
            let mut acc = vec![0u64; n + 1];
            let mut m = lo.clone();
            m[0] = first;
            loop {
                let h = engine.line_degree(engine.negative_mask(d, &m));
                acc.iter_mut().zip(h).for_each(|(x, y)| *x += y);
                let mut k = n - 1;
                loop {
                    if k == 0 {
                        return acc;
                    }
                    if m[k] < hi[k] {
                        m[k] += 1;
                        break;
                    }
                    m[k] = lo[k];
                    k -= 1;
                }
            }
        })
        .reduce(|| vec![0u64; n + 1], add))
}

/// Same computation as [`line_bundle_cohomology`] over a larger box and without the
/// shared cache, so it can validate the support-box bound.
pub fn cech_oracle(fan: &Fan, d: &TorusDivisor, padding: i64) -> Result<CohomologyTable> {
    CechOracle::new(fan)?.cohomology(d, padding)
}

/// [`cech_oracle`] with its own per-fan memo of complex cohomology, for sweeps over many
/// divisors on one fan.
pub struct CechOracle {
    fan: Fan,
    nerve: Nerve,
    memo: HashMap<u64, Vec<u64>>,
}

impl CechOracle {
    pub fn new(fan: &Fan) -> Result<CechOracle> {
        fan.require_smooth_complete()?;
        let nerve = Nerve::new(&fan.max_cone_masks(), fan.rank() + 1);
        Ok(CechOracle { fan: fan.clone(), nerve, memo: HashMap::new() })
    }

    pub fn cohomology(&mut self, d: &TorusDivisor, padding: i64) -> Result<CohomologyTable> {
        if padding < 0 {
            return Err(Error::InvalidInput("padding must be nonnegative".into()));
        }
        let fan = &self.fan;
        let chars = support_box(fan, d, 1 + padding)?;
        let mut entries = Vec::new();
        for m in chars {
            let negative = fan
                .rays()
                .iter()
                .zip(&d.coeffs)
                .enumerate()
                .filter(|(_, (u, a))| dot(&m, u) < -**a)
                .fold(0u64, |acc, (r, _)| acc | 1 << r);
            let nerve = &self.nerve;
            let h = self
                .memo
                .entry(negative)
                .or_insert_with(|| {
                    line_complex(nerve, fan.rank() + 1, negative)
                        .cohomology(nerve, fan.rank())
                        .into_iter()
                        .map(|x| x as u64)
                        .collect()
                })
                .clone();
            entries.push((m, h));
        }
        Ok(CohomologyTable::from_characters(fan.rank(), entries))
    }
}

fn check_effective(d: &TorusDivisor) -> Result<()> {
    if !d.is_effective() || d.is_zero() {
        return Err(Error::DNotEffective);
    }
    Ok(())
}

/// Union of the support boxes of several divisors.
fn union_box(fan: &Fan, divisors: &[&TorusDivisor]) -> Result<Vec<Vec<i64>>> {
    let mut lo = vec![i64::MAX; fan.rank()];
    let mut hi = vec![i64::MIN; fan.rank()];
    for d in divisors {
        let (l, h) = vertex_box(fan, d)?;
        for i in 0..fan.rank() {
            lo[i] = lo[i].min(l[i] - 1);
            hi[i] = hi[i].max(h[i] + 1);
        }
    }
    Ok(box_points(&lo, &hi))
}

/// Cohomology of `O(L)|_{D_m}` (the `m`-th thickening of the effective divisor `D`,
/// twisted by `L`), via the mapping cone of `Čech(L - (m+1)D) -> Čech(L)`.
pub fn twisted_thickening_cohomology(fan: &Fan, l: &TorusDivisor, d: &TorusDivisor, m: u32) -> Result<CohomologyTable> {
    fan.require_smooth_complete()?;
    check_effective(d)?;
    let engine = FanEngine::for_fan(fan);
    let sub = l.sub(&d.scale(m as i64 + 1));
    let n = fan.rank();
    let chars = union_box(fan, &[l, &sub])?;
    let mut memo: BTreeMap<(u64, u64), Vec<u64>> = BTreeMap::new();
    let keys: Vec<(Vec<i64>, (u64, u64))> = chars
        .into_iter()
        .map(|ch| {
            let k = (engine.negative_mask(&sub, &ch), engine.negative_mask(l, &ch));
            (ch, k)
        })
        .collect();
    for (_, k) in &keys {
        memo.entry(*k).or_default();
    }
    let computed: Vec<((u64, u64), Vec<u64>)> = memo
        .keys()
        .copied()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(na, nb)| {
            let a = engine.line_complex(na);
            let b = engine.line_complex(nb);
            let h = MappingCone::new(&engine.nerve, &a, &b).cohomology(n).into_iter().map(|x| x as u64).collect();
            ((na, nb), h)
        })
        .collect();
    let memo: HashMap<(u64, u64), Vec<u64>> = computed.into_iter().collect();
    Ok(CohomologyTable::from_characters(n, keys.into_iter().map(|(ch, k)| (ch, memo[&k].clone())).collect()))
}

pub fn thickening_cohomology(fan: &Fan, d: &TorusDivisor, m: u32) -> Result<CohomologyTable> {
    twisted_thickening_cohomology(fan, &TorusDivisor::zero(fan.n_rays()), d, m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionReport {
    pub rank: u64,
    pub source_dim: u64,
    pub target_dim: u64,
    pub surjective: bool,
}

/// The map `H^0(X, L) -> H^0(D, L|_D)` from `0 -> L(-D) -> L -> L|_D -> 0`.
pub fn restriction_map_on_sections(fan: &Fan, l: &TorusDivisor, d: &TorusDivisor) -> Result<RestrictionReport> {
    fan.require_smooth_complete()?;
    check_effective(d)?;
    let engine = FanEngine::for_fan(fan);
    let sub = l.sub(d);
    let target = twisted_thickening_cohomology(fan, l, d, 0)?;
    let mut rank = 0u64;
    let sections = global_sections(fan, l)?;
    for ch in &sections {
        let a = engine.line_complex(engine.negative_mask(&sub, ch));
        let b = engine.line_complex(engine.negative_mask(l, ch));
        rank += MappingCone::new(&engine.nerve, &a, &b).h0_map_rank() as u64;
    }
    Ok(RestrictionReport {
        rank,
        source_dim: sections.len() as u64,
        target_dim: target.h(0),
        surjective: rank == target.h(0),
    })
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

    fn p3() -> Fan {
        Fan::build(
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap()
    }

    fn hyperplane(f: &Fan, k: i64) -> TorusDivisor {
        let mut c = vec![0; f.n_rays()];
        c[0] = k;
        TorusDivisor::new(c)
    }

    #[test]
    fn projective_plane_tables() {
        let f = p2();
        let t = line_bundle_cohomology(&f, &hyperplane(&f, 2)).unwrap();
        assert_eq!(t.dims, vec![6, 0, 0]);
        let t = line_bundle_cohomology(&f, &hyperplane(&f, -3)).unwrap();
        assert_eq!(t.dims, vec![0, 0, 1]);
        let t = line_bundle_cohomology(&f, &TorusDivisor::zero(3)).unwrap();
        assert_eq!(t.dims, vec![1, 0, 0]);
        assert!(t.euler_consistent());
    }

    #[test]
    fn dims_match_full_table() {
        for f in [p2(), p3(), p1xp1()] {
            for a in -3..=3 {
                for b in -2..=2 {
                    let mut c = vec![0; f.n_rays()];
                    c[0] = a;
                    c[f.n_rays() - 1] = b;
                    let d = TorusDivisor::new(c);
                    assert_eq!(line_bundle_dims(&f, &d).unwrap(), line_bundle_cohomology(&f, &d).unwrap().dims);
                }
            }
        }
    }

    #[test]
    fn oracle_agrees() {
        let f = p2();
        let d = hyperplane(&f, 2);
        assert_eq!(cech_oracle(&f, &d, 3).unwrap(), line_bundle_cohomology(&f, &d).unwrap());
        let g = p1xp1();
        let d = TorusDivisor::new(vec![-1, 0, -1, 0]);
        assert!(cech_oracle(&g, &d, 2).unwrap().is_zero());
        let h = p3();
        assert_eq!(cech_oracle(&h, &hyperplane(&h, -4), 2).unwrap().dims, vec![0, 0, 0, 1]);
    }

    #[test]
    fn d_squared_is_zero() {
        let f = p3();
        let nerve = Nerve::new(&f.max_cone_masks(), 5);
        for neg in 0..16u64 {
            assert!(line_complex(&nerve, 4, neg).d_squared_vanishes(&nerve));
        }
    }

    #[test]
    fn refinement_by_all_cones_gives_same_cohomology() {
        let f = p2();
        let all: Vec<u64> = f.all_cones().iter().map(|c| c.rays().iter().fold(0u64, |a, &r| a | 1 << r)).collect();
        let fine = Nerve::new(&all, 3);
        let coarse = Nerve::new(&f.max_cone_masks(), 3);
        for neg in 0..8u64 {
            assert_eq!(
                line_complex(&fine, 3, neg).cohomology(&fine, 2),
                line_complex(&coarse, 3, neg).cohomology(&coarse, 2),
                "pattern {neg:b}"
            );
        }
    }

    #[test]
    fn thickenings() {
        let f = p2();
        let t = thickening_cohomology(&f, &hyperplane(&f, 1), 0).unwrap();
        assert_eq!(t.dims, vec![1, 0, 0]);
        assert!(thickening_cohomology(&f, &TorusDivisor::zero(3), 0).is_err());
        // a conic is a P^1
        let t = thickening_cohomology(&f, &hyperplane(&f, 2), 0).unwrap();
        assert_eq!(t.dims, vec![1, 0, 0]);
        // a cubic has genus 1
        let t = thickening_cohomology(&f, &hyperplane(&f, 3), 0).unwrap();
        assert_eq!(t.dims, vec![1, 1, 0]);
    }

    #[test]
    fn restriction_of_sections() {
        let f = p3();
        let r = restriction_map_on_sections(&f, &hyperplane(&f, 1), &TorusDivisor::prime(4, 1)).unwrap();
        assert_eq!((r.rank, r.surjective), (3, true));
        let r = restriction_map_on_sections(&f, &TorusDivisor::zero(4), &TorusDivisor::new(vec![1; 4])).unwrap();
        assert_eq!((r.rank, r.surjective), (1, true));
        let g = p2();
        let r = restriction_map_on_sections(&g, &hyperplane(&g, -1), &TorusDivisor::prime(3, 1)).unwrap();
        assert_eq!((r.rank, r.target_dim, r.surjective), (0, 0, true));
    }
}

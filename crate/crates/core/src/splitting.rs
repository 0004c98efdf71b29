//! Deciding whether an equivariant bundle splits into line bundles.
//!
//! A bundle of rank `r` splits iff some global endomorphism has `r` distinct
//! eigenvalues. The discriminant of the characteristic polynomial of the generic
//! endomorphism has total degree at most `r(r-1)` in the coordinates of
//! `H^0(End V)`, so if it vanishes on a grid with more than `r(r-1)` values per
//! coordinate it vanishes identically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bundle::KlyachkoBundle;
use crate::divisor::{class_coordinates, class_from_coordinates, TorusDivisor};
use crate::error::{Error, Result};
use crate::intmat::box_points;
use crate::linalg::{self, q, QMat, Subspace, Q};
use crate::poly::{char_poly, factor_squarefree, Poly};

/// A homogeneous global endomorphism: its character degree and its value at the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndomorphismSection {
    pub degree: Vec<i64>,
    pub matrix: QMat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndomorphismAlgebra {
    pub rank: usize,
    pub basis: Vec<EndomorphismSection>,
}

impl EndomorphismAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `sum_k c_k t^{m_k} M_k`; `t = None` is the identity point.
    pub fn evaluate(&self, coeffs: &[Q], t: Option<&[Q]>) -> QMat {
        let r = self.rank;
        let mut out = linalg::zeros(r, r);
        for (c, s) in coeffs.iter().zip(&self.basis) {
            if num_traits::Zero::is_zero(c) {
                continue;
            }
            let mut w = c.clone();
            if let Some(t) = t {
                for (ti, &e) in t.iter().zip(&s.degree) {
                    w *= num_traits::pow::Pow::pow(ti, e as i32);
                }
            }
            for i in 0..r {
                for j in 0..r {
                    out[i][j] += &w * &s.matrix[i][j];
                }
            }
        }
        out
    }

    /// The invariant (degree-zero) part.
    pub fn invariant_part(&self) -> EndomorphismAlgebra {
        EndomorphismAlgebra {
            rank: self.rank,
            basis: self.basis.iter().filter(|s| s.degree.iter().all(|&x| x == 0)).cloned().collect(),
        }
    }
}

fn sections_to_basis(r: usize, degree: Vec<i64>, sub: &Subspace) -> Vec<EndomorphismSection> {
    sub.basis()
        .iter()
        .map(|v| EndomorphismSection {
            degree: degree.clone(),
            matrix: (0..r).map(|i| v[i * r..(i + 1) * r].to_vec()).collect(),
        })
        .collect()
}

/// Basis of `H^0(End V)`, homogeneous by character degree.
pub fn endomorphism_algebra(v: &KlyachkoBundle) -> Result<EndomorphismAlgebra> {
    let e = v.end();
    let degrees = e.global_section_degrees()?;
    let basis = degrees.into_iter().flat_map(|(m, s)| sections_to_basis(v.rank(), m, &s)).collect();
    Ok(EndomorphismAlgebra { rank: v.rank(), basis })
}

/// Only the degree-zero part of `H^0(End V)`.
pub fn invariant_endomorphisms(v: &KlyachkoBundle) -> EndomorphismAlgebra {
    let n = v.fan().rank();
    let s = v.end().sections_in_degree(&vec![0; n]);
    EndomorphismAlgebra { rank: v.rank(), basis: sections_to_basis(v.rank(), vec![0; n], &s) }
}

/// Multiset of line-bundle classes, each with a normalized representative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandList {
    /// `(class coordinates, representative, multiplicity)`, sorted by coordinates.
    pub summands: Vec<(Vec<i64>, TorusDivisor, usize)>,
}

impl SummandList {
    pub fn from_classes(fan: &crate::lattice::Fan, classes: &[(TorusDivisor, usize)]) -> Result<Self> {
        let mut summands: Vec<(Vec<i64>, TorusDivisor, usize)> = Vec::new();
        for (d, mult) in classes {
            let c = class_coordinates(fan, d)?;
            match summands.iter_mut().find(|(k, _, _)| *k == c) {
                Some(entry) => entry.2 += mult,
                None => summands.push((c.clone(), class_from_coordinates(fan, &c), *mult)),
            }
        }
        summands.sort();
        Ok(SummandList { summands })
    }

    pub fn total_rank(&self) -> usize {
        self.summands.iter().map(|s| s.2).sum()
    }

    pub fn all_trivial(&self) -> bool {
        self.summands.iter().all(|(c, _, _)| c.iter().all(|&x| x == 0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Coefficients over the basis of the space that was searched.
    pub coefficients: Vec<i64>,
    pub space: SearchSpace,
    pub matrix: QMat,
    pub char_poly: Vec<Q>,
    pub discriminant: Q,
}

impl Witness {
    /// Recomputes the discriminant from the matrix alone.
    pub fn recheck(&self) -> bool {
        let p = char_poly(&self.matrix);
        p.coeffs() == self.char_poly.as_slice() && !num_traits::Zero::is_zero(&p.discriminant())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchSpace {
    /// All of `H^0(End V)`.
    Full,
    /// Degree-zero endomorphisms; an equivariant bundle splits iff it splits equivariantly.
    Invariant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonSplitCertificate {
    pub space: SearchSpace,
    pub dimension: usize,
    /// Values `0..grid_size` per coordinate were all evaluated.
    pub grid_size: usize,
    pub degree_bound: usize,
    pub points_checked: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitVerdict {
    Split { summands: SummandList, witness: Witness },
    NonSplit(NonSplitCertificate),
    Inconclusive { reason: String },
}

impl SplitVerdict {
    pub fn is_split(&self) -> bool {
        matches!(self, SplitVerdict::Split { .. })
    }

    pub fn is_non_split(&self) -> bool {
        matches!(self, SplitVerdict::NonSplit(_))
    }
}

const RANDOM_SAMPLES: usize = 64;
const GRID_POINT_LIMIT: u64 = 1_000_000;
/// The full algebra is only searched exhaustively when small; the invariant part suffices.
const FULL_GRID_POINT_LIMIT: u64 = 4_096;

struct Candidate {
    coeffs: Vec<i64>,
    matrix: QMat,
    poly: Poly,
    rational: bool,
}

fn try_point(alg: &EndomorphismAlgebra, coeffs: &[i64]) -> Option<Candidate> {
    let cq: Vec<Q> = coeffs.iter().map(|&c| q(c)).collect();
    let matrix = alg.evaluate(&cq, None);
    let poly = char_poly(&matrix);
    if !poly.is_squarefree() {
        return None;
    }
    let rational = crate::poly::rational_roots(&poly).len() == alg.rank;
    Some(Candidate { coeffs: coeffs.to_vec(), matrix, poly, rational })
}

fn grid_count(size: usize, dim: usize) -> Option<u64> {
    (size as u64).checked_pow(dim as u32)
}

/// First grid point (lexicographic in `0..size`) with distinct eigenvalues; `Err` if the grid is too large.
fn grid_search(alg: &EndomorphismAlgebra, size: usize, limit: u64) -> std::result::Result<Option<Candidate>, ()> {
    let d = alg.dim();
    match grid_count(size, d) {
        Some(c) if c <= limit => {}
        _ => return Err(()),
    }
    let hi = vec![size as i64 - 1; d];
    let points = box_points(&vec![0; d], &hi);
    Ok(points.par_iter().find_map_first(|p| try_point(alg, p)))
}

fn verdict_from(v: &KlyachkoBundle, alg: &EndomorphismAlgebra, c: Candidate, space: SearchSpace) -> SplitVerdict {
    let discriminant = c.poly.discriminant();
    let witness =
        Witness { coefficients: c.coeffs, space, matrix: c.matrix, char_poly: c.poly.coeffs().to_vec(), discriminant };
    let _ = alg;
    match extract_blocks(v, &witness.matrix) {
        Ok(blocks) => match SummandList::from_classes(v.fan(), &blocks) {
            Ok(summands) => SplitVerdict::Split { summands, witness },
            Err(e) => SplitVerdict::Inconclusive { reason: e.to_string() },
        },
        Err(e) => SplitVerdict::Inconclusive { reason: format!("witness found but extraction failed: {e}") },
    }
}

/// Searches for an endomorphism with distinct eigenvalues, or certifies that none exists.
pub fn splitting_test(v: &KlyachkoBundle, grid_size: usize, seed: u64) -> SplitVerdict {
    let r = v.rank();
    let degree_bound = r * (r - 1);
    let cert_size = grid_size.max(degree_bound + 1);
    let inv = invariant_endomorphisms(v);
    if r == 1 {
        let c = try_point(&inv, &[1]).expect("identity of a line bundle");
        return verdict_from(v, &inv, c, SearchSpace::Invariant);
    }
    // random samples in the invariant part, preferring rational eigenvalues
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = grid_size.max(1) as i64;
    let mut fallback = None;
    for _ in 0..RANDOM_SAMPLES {
        let coeffs: Vec<i64> = (0..inv.dim()).map(|_| rng.gen_range(-g..=g)).collect();
        if let Some(c) = try_point(&inv, &coeffs) {
            if c.rational {
                return verdict_from(v, &inv, c, SearchSpace::Invariant);
            }
            fallback.get_or_insert(c);
        }
    }
    if let Some(c) = fallback {
        return verdict_from(v, &inv, c, SearchSpace::Invariant);
    }
    let full = match endomorphism_algebra(v) {
        Ok(a) => a,
        Err(e) => return SplitVerdict::Inconclusive { reason: e.to_string() },
    };
    // exhaustive grid: on the full algebra when feasible, else on the invariant part
    let spaces = [(&full, SearchSpace::Full, FULL_GRID_POINT_LIMIT), (&inv, SearchSpace::Invariant, GRID_POINT_LIMIT)];
    for (alg, space, limit) in spaces {
        match grid_search(alg, cert_size, limit) {
            Ok(Some(c)) => return verdict_from(v, alg, c, space),
            Ok(None) => {
                return SplitVerdict::NonSplit(NonSplitCertificate {
                    space,
                    dimension: alg.dim(),
                    grid_size: cert_size,
                    degree_bound,
                    points_checked: grid_count(cert_size, alg.dim()).unwrap_or(u64::MAX),
                })
            }
            Err(()) => continue,
        }
    }
    SplitVerdict::Inconclusive {
        reason: format!(
            "no witness among {RANDOM_SAMPLES} samples and the certification grid ({cert_size}^{}) is too large",
            inv.dim()
        ),
    }
}

/// Left kernel `{x : x m = 0}` of a square matrix.
fn left_kernel(m: &QMat) -> QMat {
    let n = m.len();
    linalg::kernel(&linalg::transpose(m, n), n)
}

/// Splits the fiber into `ker f(h)` over the irreducible factors `f` of the characteristic
/// polynomial of `h`; each block must be a sum of copies of a single line bundle.
pub fn extract_blocks(v: &KlyachkoBundle, h: &QMat) -> Result<Vec<(TorusDivisor, usize)>> {
    let p = char_poly(h);
    if !p.is_squarefree() {
        return Err(Error::EigenvaluesNotDistinct);
    }
    let factors = factor_squarefree(&p).ok_or(Error::IrrationalEigenvalues)?;
    let mut out = Vec::new();
    let mut total = Vec::new();
    for f in &factors {
        let rows = left_kernel(&f.eval_matrix(h));
        let block = v.restrict_fiber(&rows).map_err(|_| Error::IrrationalEigenvalues)?;
        let mut coeffs = Vec::with_capacity(v.fan().n_rays());
        for filt in block.filtrations() {
            if filt.steps().len() != 1 {
                return Err(Error::IrrationalEigenvalues);
            }
            coeffs.push(filt.first() - 1);
        }
        total.extend(rows.iter().cloned());
        out.push((TorusDivisor::new(coeffs), rows.len()));
    }
    if linalg::rank(&total) != v.rank() {
        return Err(Error::RestrictionInconsistent("eigenspaces do not span the fiber".into()));
    }
    // the filtrations must be the direct sum of their restrictions to the blocks
    for (ray, filt) in v.filtrations().iter().enumerate() {
        for (j, w) in filt.steps() {
            let mut dim = 0;
            for f in &factors {
                let rows = left_kernel(&f.eval_matrix(h));
                dim += w.intersect(&Subspace::from_rows(v.rank(), rows)).dim();
            }
            if dim != w.dim() {
                return Err(Error::RestrictionInconsistent(format!("ray {ray} step {j} does not decompose")));
            }
        }
    }
    Ok(out)
}

/// Rank-one summands from an endomorphism with distinct rational eigenvalues.
pub fn extract_summands(v: &KlyachkoBundle, h: &QMat) -> Result<Vec<KlyachkoBundle>> {
    let blocks = extract_blocks(v, h)?;
    if blocks.iter().any(|(_, m)| *m != 1) {
        return Err(Error::IrrationalEigenvalues);
    }
    Ok(blocks.into_iter().map(|(d, _)| KlyachkoBundle::line(v.fan(), &d)).collect())
}

pub fn chern_class_summands(verdict: &SplitVerdict) -> Result<SummandList> {
    match verdict {
        SplitVerdict::Split { summands, .. } => Ok(summands.clone()),
        _ => Err(Error::NotCertifiedSplit),
    }
}

/// Char poly of a witness is the same at the identity and at `t = (2, 3, 5, ...)`.
pub fn char_poly_is_constant(alg: &EndomorphismAlgebra, coeffs: &[Q]) -> bool {
    const PRIMES: [i64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    let n = alg.basis.first().map_or(0, |s| s.degree.len());
    let t: Vec<Q> = PRIMES.iter().cycle().take(n).map(|&p| q(p)).collect();
    char_poly(&alg.evaluate(coeffs, None)) == char_poly(&alg.evaluate(coeffs, Some(&t)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialityReport {
    /// `None` when the splitting test was inconclusive.
    pub trivial: Option<bool>,
    pub verdict: SplitVerdict,
    pub h0: u64,
    pub h0_equals_rank: bool,
}

pub fn triviality_test(v: &KlyachkoBundle, grid_size: usize, seed: u64) -> Result<TrivialityReport> {
    let verdict = splitting_test(v, grid_size, seed);
    let h0: u64 = v.global_section_degrees()?.iter().map(|(_, s)| s.dim() as u64).sum();
    let trivial = match &verdict {
        SplitVerdict::Split { summands, .. } => Some(summands.all_trivial()),
        SplitVerdict::NonSplit(_) => Some(false),
        SplitVerdict::Inconclusive { .. } => None,
    };
    Ok(TrivialityReport { trivial, verdict, h0, h0_equals_rank: h0 == v.rank() as u64 })
}

/// Values at the identity of a basis of global sections, one row per section.
fn section_frame(v: &KlyachkoBundle) -> Result<QMat> {
    Ok(v.global_section_degrees()?.into_iter().flat_map(|(_, s)| s.basis().clone()).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCheck {
    pub rays: (usize, usize),
    pub both_trivial: bool,
    /// Matrix taking the second route's frame to the first's, in the ambient fiber.
    pub transition: Option<QMat>,
    pub compatible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub per_ray: Vec<(usize, Option<bool>)>,
    pub pairs: Vec<PairCheck>,
    pub boundary_trivial: bool,
}

fn double_route(v: &KlyachkoBundle, first: usize, second: usize, grid: usize, seed: u64) -> Result<(bool, QMat)> {
    let r1 = v.restrict(first)?;
    let s = r1.star.star_ray_of(second).ok_or_else(|| Error::ConeNotInFan(vec![first, second]))?;
    let r2 = r1.bundle.restrict(s)?;
    let trivial = triviality_test(&r2.bundle, grid, seed)?.trivial == Some(true);
    // frame rows in the ambient fiber of V
    let to_ambient = linalg::mat_mul(&r2.basis, &r1.basis, v.rank(), v.rank());
    let frame = section_frame(&r2.bundle)?;
    let frame = if frame.is_empty() { frame } else { linalg::mat_mul(&frame, &to_ambient, v.rank(), v.rank()) };
    Ok((trivial, frame))
}

/// Per-ray triviality of `V|_{D_rho}` and agreement of trivializations on each `D_rho ∩ D_rho'`.
pub fn boundary_report(v: &KlyachkoBundle, grid_size: usize, seed: u64) -> Result<BoundaryReport> {
    let fan = v.fan();
    fan.require_smooth_complete()?;
    let per_ray: Vec<(usize, Option<bool>)> = (0..fan.n_rays())
        .into_par_iter()
        .map(|ray| Ok((ray, triviality_test(&v.restrict(ray)?.bundle, grid_size, seed)?.trivial)))
        .collect::<Result<_>>()?;
    let pairs_idx: Vec<(usize, usize)> =
        fan.all_cones().into_iter().filter(|c| c.dim() == 2).map(|c| (c.rays()[0], c.rays()[1])).collect();
    let pairs: Vec<PairCheck> = pairs_idx
        .into_par_iter()
        .map(|(a, b)| {
            let (t1, f1) = double_route(v, a, b, grid_size, seed)?;
            let (t2, f2) = double_route(v, b, a, grid_size, seed)?;
            let both_trivial = t1 && t2;
            let transition = if both_trivial && f1.len() == v.rank() && f2.len() == v.rank() {
                linalg::inverse(&f2).map(|inv| linalg::mat_mul(&inv, &f1, v.rank(), v.rank()))
            } else {
                None
            };
            let compatible = transition.as_ref().is_some_and(|t| linalg::inverse(t).is_some());
            Ok(PairCheck { rays: (a, b), both_trivial, transition, compatible })
        })
        .collect::<Result<_>>()?;
    let boundary_trivial = per_ray.iter().all(|(_, t)| *t == Some(true)) && pairs.iter().all(|p| p.compatible);
    Ok(BoundaryReport { per_ray, pairs, boundary_trivial })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThickeningVerdict {
    /// An invariant endomorphism of `V ⊗ O_{D_m}` with distinct eigenvalues at a fixed point of `D`.
    Split {
        chart: usize,
        witness: Witness,
    },
    /// All sections of `End V ⊗ O_{D_m}` are invariant and none on the grid has distinct eigenvalues.
    NonSplit(NonSplitCertificate),
    Inconclusive {
        reason: String,
    },
}

impl ThickeningVerdict {
    pub fn is_split(&self) -> bool {
        matches!(self, ThickeningVerdict::Split { .. })
    }

    pub fn is_non_split(&self) -> bool {
        matches!(self, ThickeningVerdict::NonSplit(_))
    }
}

/// Sections of `End V ⊗ O_{D_m}` as matrices at the fixed point of each maximal cone meeting `supp D`.
fn divisor_endomorphisms(v: &KlyachkoBundle, d: &TorusDivisor, m: u32) -> Result<(Vec<usize>, Vec<Vec<QMat>>)> {
    let r = v.rank();
    let charts: Vec<usize> = v
        .fan()
        .max_cones()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.rays().iter().any(|&ray| d.coeffs[ray] > 0))
        .map(|(i, _)| i)
        .collect();
    let secs = v.end().thickening_invariant_sections(d, m)?;
    let per_section = secs
        .into_iter()
        .map(|s| charts.iter().map(|&c| (0..r).map(|i| s[c][i * r..(i + 1) * r].to_vec()).collect()).collect())
        .collect();
    Ok((charts, per_section))
}

fn combine(sections: &[Vec<QMat>], chart: usize, coeffs: &[i64], r: usize) -> QMat {
    let mut out = linalg::zeros(r, r);
    for (c, s) in coeffs.iter().zip(sections) {
        if *c == 0 {
            continue;
        }
        for i in 0..r {
            for j in 0..r {
                out[i][j] += q(*c) * &s[chart][i][j];
            }
        }
    }
    out
}

/// Splitting of `V` restricted to the `m`-th thickening of an effective divisor `D`.
pub fn split_test_on_thickening(
    v: &KlyachkoBundle,
    d: &TorusDivisor,
    m: u32,
    grid_size: usize,
    seed: u64,
) -> ThickeningVerdict {
    let r = v.rank();
    let (charts, sections) = match divisor_endomorphisms(v, d, m) {
        Ok(x) => x,
        Err(e) => return ThickeningVerdict::Inconclusive { reason: e.to_string() },
    };
    if charts.is_empty() {
        return ThickeningVerdict::Inconclusive { reason: "divisor is zero".into() };
    }
    let dim = sections.len();
    let found = |coeffs: &[i64]| -> Option<Witness> {
        let h = combine(&sections, 0, coeffs, r);
        let p = char_poly(&h);
        if !p.is_squarefree() {
            return None;
        }
        // the characteristic polynomial is constant along the connected divisor
        if (1..charts.len()).any(|c| char_poly(&combine(&sections, c, coeffs, r)) != p) {
            return None;
        }
        Some(Witness {
            coefficients: coeffs.to_vec(),
            space: SearchSpace::Invariant,
            matrix: h,
            discriminant: p.discriminant(),
            char_poly: p.coeffs().to_vec(),
        })
    };
    let split = |w: Witness| ThickeningVerdict::Split { chart: charts[0], witness: w };
    if r == 1 {
        return match (0..dim).find_map(|k| {
            let mut c = vec![0; dim];
            c[k] = 1;
            found(&c)
        }) {
            Some(w) => split(w),
            None => ThickeningVerdict::Inconclusive { reason: "no nonvanishing invariant section".into() },
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = grid_size.max(1) as i64;
    for _ in 0..RANDOM_SAMPLES {
        let coeffs: Vec<i64> = (0..dim).map(|_| rng.gen_range(-g..=g)).collect();
        if let Some(w) = found(&coeffs) {
            return split(w);
        }
    }
    let degree_bound = r * (r - 1);
    let size = grid_size.max(degree_bound + 1);
    let count = match grid_count(size, dim) {
        Some(c) if c <= GRID_POINT_LIMIT => c,
        _ => return ThickeningVerdict::Inconclusive { reason: format!("grid {size}^{dim} too large") },
    };
    let points = box_points(&vec![0; dim], &vec![size as i64 - 1; dim]);
    if let Some(w) = points.par_iter().find_map_first(|p| found(p)) {
        return split(w);
    }
    let total = match v.end().thickening(d, m) {
        Ok(t) => t.cohomology.h(0) as usize,
        Err(e) => return ThickeningVerdict::Inconclusive { reason: e.to_string() },
    };
    if total != dim {
        return ThickeningVerdict::Inconclusive {
            reason: format!(
                "{total} sections of which only {dim} are invariant; grid search covered the invariant part"
            ),
        };
    }
    ThickeningVerdict::NonSplit(NonSplitCertificate {
        space: SearchSpace::Full,
        dimension: dim,
        grid_size: size,
        degree_bound,
        points_checked: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Fan;

    fn p1() -> Fan {
        Fan::build(vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap()
    }

    fn p2() -> Fan {
        Fan::build(vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    fn o(f: &Fan, k: i64) -> TorusDivisor {
        let mut c = vec![0; f.n_rays()];
        c[0] = k;
        TorusDivisor::new(c)
    }

    fn classes(v: &SplitVerdict) -> Vec<(Vec<i64>, usize)> {
        chern_class_summands(v).unwrap().summands.into_iter().map(|(c, _, m)| (c, m)).collect()
    }

    #[test]
    fn algebra_dimensions() {
        let f = p2();
        assert_eq!(endomorphism_algebra(&KlyachkoBundle::trivial(&f, 2)).unwrap().dim(), 4);
        assert_eq!(endomorphism_algebra(&KlyachkoBundle::tangent(&f).unwrap()).unwrap().dim(), 1);
        let v = KlyachkoBundle::split(&f, &[o(&f, 0), o(&f, 1)]).unwrap();
        let alg = endomorphism_algebra(&v).unwrap();
        assert_eq!(alg.dim(), 5);
        assert_eq!(alg.dim() as u64, v.end().cohomology().unwrap().h(0));
    }

    #[test]
    fn split_and_non_split() {
        let f = p2();
        let v = KlyachkoBundle::split(&f, &[o(&f, 1), o(&f, 2)]).unwrap();
        let verdict = splitting_test(&v, 4, 7);
        assert!(verdict.is_split());
        let one = class_coordinates(&f, &o(&f, 1)).unwrap();
        let two = class_coordinates(&f, &o(&f, 2)).unwrap();
        assert_eq!(classes(&verdict), vec![(one, 1), (two, 1)]);
        if let SplitVerdict::Split { witness, .. } = &verdict {
            assert!(witness.recheck());
        }
        let t = splitting_test(&KlyachkoBundle::tangent(&f).unwrap(), 4, 7);
        assert!(t.is_non_split(), "{t:?}");
        let g = p1();
        let oo = splitting_test(&KlyachkoBundle::trivial(&g, 2), 4, 7);
        assert_eq!(classes(&oo), vec![(vec![0], 2)]);
    }

    #[test]
    fn repeated_eigenvalues_are_rejected() {
        let f = p2();
        let v = KlyachkoBundle::trivial(&f, 2);
        assert_eq!(extract_summands(&v, &linalg::identity(2)), Err(Error::EigenvaluesNotDistinct));
    }

    #[test]
    fn diagonal_witness_recovers_factors() {
        let f = p2();
        let v = KlyachkoBundle::split(&f, &[o(&f, 1), o(&f, 2)]).unwrap();
        let h = vec![vec![q(0), q(0)], vec![q(0), q(1)]];
        let mut s: Vec<_> = extract_summands(&v, &h).unwrap().iter().map(|b| b.as_divisor().unwrap()).collect();
        s.sort_by_key(|d| d.coeffs.clone());
        assert_eq!(s, vec![o(&f, 1), o(&f, 2)]);
    }

    #[test]
    fn triviality() {
        let f = p2();
        assert_eq!(triviality_test(&KlyachkoBundle::trivial(&f, 3), 4, 1).unwrap().trivial, Some(true));
        let v = KlyachkoBundle::split(&f, &[o(&f, 1), o(&f, -1)]).unwrap();
        assert_eq!(triviality_test(&v, 4, 1).unwrap().trivial, Some(false));
        assert_eq!(triviality_test(&KlyachkoBundle::tangent(&f).unwrap(), 4, 1).unwrap().trivial, Some(false));
    }

    #[test]
    fn shuffled_sum_is_recovered() {
        let f = p2();
        let v = KlyachkoBundle::split(&f, &[o(&f, -1), o(&f, 0), o(&f, 2)]).unwrap();
        let g: QMat = [[1, 2, 0], [0, 1, -1], [3, 0, 1]].iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        let w = v.change_fiber_basis(&g).unwrap();
        assert_ne!(w.filtrations(), v.filtrations());
        let got = classes(&splitting_test(&w, 4, 3));
        let want: Vec<_> = [-1, 0, 2].iter().map(|&k| (class_coordinates(&f, &o(&f, k)).unwrap(), 1)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn boundary_of_trivial_and_tangent() {
        let f = p2();
        let rep = boundary_report(&KlyachkoBundle::trivial(&f, 2), 4, 0).unwrap();
        assert!(rep.boundary_trivial);
        assert_eq!(rep.pairs.len(), 3);
        let rep = boundary_report(&KlyachkoBundle::tangent(&f).unwrap(), 4, 0).unwrap();
        assert!(!rep.boundary_trivial);
        assert!(rep.per_ray.iter().all(|(_, t)| *t == Some(false)));
    }

    #[test]
    fn splitting_on_boundary_thickenings() {
        use crate::divisor::boundary_divisor;
        let f = Fan::build(
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap();
        let delta = boundary_divisor(&f);
        let v = KlyachkoBundle::split(&f, &[o(&f, 1), o(&f, 2)]).unwrap();
        for m in 0..2 {
            assert!(split_test_on_thickening(&v, &delta, m, 4, 5).is_split());
        }
        let t = KlyachkoBundle::tangent(&f).unwrap();
        for m in 0..3 {
            assert!(split_test_on_thickening(&t, &delta, m, 4, 5).is_non_split());
        }
    }

    #[test]
    fn witness_char_poly_is_constant_on_the_torus() {
        let f = p2();
        let v = KlyachkoBundle::split(&f, &[o(&f, 0), o(&f, 1)]).unwrap();
        let alg = endomorphism_algebra(&v).unwrap();
        let coeffs: Vec<Q> = (1..=alg.dim() as i64).map(q).collect();
        assert!(char_poly_is_constant(&alg, &coeffs));
    }
}

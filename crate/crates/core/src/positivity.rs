//! Partial-ampleness certificates and bounded vanishing scans.
//!
//! Certificates combine two hypotheses: a bound on the cohomological dimension of the
//! complement of `supp D`, and the codimension of the stable base locus of `O(D)`. Scans
//! only corroborate or refute; they never certify.

use std::collections::BTreeMap;

use dashmap::DashMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohomology::line_bundle_dims;
use crate::divisor::{
    class_coordinates, class_from_coordinates, iitaka_dimension, positivity_flags, restrict_divisor, stable_base_locus,
    Iitaka, TorusDivisor,
};
use crate::error::{Error, Result};
use crate::intmat::box_points;
use crate::lattice::{Cone, Fan};
use crate::linalg::{self};

pub const DEFAULT_A_MAX: i64 = 8;
pub const DEFAULT_M_MAX: i64 = 12;
pub const DEFAULT_BOX: (i64, i64) = (-3, 3);
pub const DEFAULT_K_MAX: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Codim {
    Finite(usize),
    Infinite,
}

impl std::fmt::Display for Codim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Codim::Finite(c) => write!(f, "{c}"),
            Codim::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CdProvenance {
    /// `supp D` is the whole toric boundary, whose complement is the torus.
    DerivedForFullBoundary,
    UserAsserted {
        justification: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdAssertion {
    pub value: usize,
    pub justification: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdBound {
    pub value: usize,
    pub provenance: CdProvenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SblocRecord {
    pub codim: Codim,
    pub stabilized: bool,
    pub k_max: u32,
    pub cones: Vec<Cone>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QAmpleCertificate {
    pub divisor: TorusDivisor,
    pub class: Vec<i64>,
    pub dim: usize,
    pub cd: CdBound,
    pub sbloc: SblocRecord,
    pub c: usize,
    pub q: usize,
    pub trace: Vec<String>,
}

impl QAmpleCertificate {
    /// Recomputes `c` and `q` from the recorded hypotheses.
    pub fn recheck(&self) -> bool {
        let by_cd = self.dim.saturating_sub(self.cd.value);
        let c = match self.sbloc.codim {
            Codim::Finite(k) => by_cd.min(k),
            Codim::Infinite => by_cd,
        };
        self.sbloc.stabilized && c >= 1 && self.c == c && self.q == self.dim - c
    }
}

fn supports_full_boundary(d: &TorusDivisor) -> bool {
    d.coeffs.iter().all(|&a| a >= 1)
}

pub fn q_ample_certificate(
    fan: &Fan,
    d: &TorusDivisor,
    cd_input: Option<&CdAssertion>,
    k_max: u32,
) -> Result<QAmpleCertificate> {
    fan.require_smooth_complete()?;
    if !d.is_effective() {
        return Err(Error::DNotEffective);
    }
    let n = fan.rank();
    let mut trace = Vec::new();
    let cd = if supports_full_boundary(d) {
        trace.push("supp D is the whole boundary; its complement is a torus, so cd = 0".to_string());
        CdBound { value: 0, provenance: CdProvenance::DerivedForFullBoundary }
    } else if let Some(a) = cd_input {
        trace.push(format!("cd(X \\ supp D) <= {} asserted: {}", a.value, a.justification));
        CdBound { value: a.value, provenance: CdProvenance::UserAsserted { justification: a.justification.clone() } }
    } else {
        return Err(Error::CdUnavailable);
    };
    let bl = stable_base_locus(fan, d, k_max)?;
    if !bl.stabilized {
        return Err(Error::SblocNotStabilized { k_max });
    }
    let codim = if bl.is_empty() { Codim::Infinite } else { Codim::Finite(bl.codimension) };
    trace.push(format!("stable base locus stabilized by k = {k_max}, codimension {codim}"));
    let by_cd = n.saturating_sub(cd.value);
    let c = match codim {
        Codim::Finite(k) => by_cd.min(k),
        Codim::Infinite => by_cd,
    };
    if c == 0 {
        return Err(Error::InvalidInput(format!("hypotheses only give c = 0 on a rank {n} fan")));
    }
    trace.push(format!("c = min({n} - {}, {codim}) = {c}", cd.value));
    trace.push(format!("O(D) is {}-ample", n - c));
    Ok(QAmpleCertificate {
        class: class_coordinates(fan, d)?,
        divisor: d.clone(),
        dim: n,
        cd,
        sbloc: SblocRecord { codim, stabilized: true, k_max, cones: bl.cones },
        c,
        q: n - c,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    /// Class coordinates of the test sheaf (or of the scanned class).
    pub class: Vec<i64>,
    pub degree: usize,
    pub twist: i64,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingReport {
    pub theorem: String,
    /// Cohomological degrees scanned.
    pub degrees: Vec<usize>,
    /// Inclusive twist range.
    pub twists: (i64, i64),
    pub classes_checked: usize,
    pub violations: Vec<Violation>,
}

impl VanishingReport {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `h^i` of line bundles on one fan, memoized by class.
pub struct ClassCohomology {
    fan: Fan,
    ray_classes: Vec<Vec<i64>>,
    cache: DashMap<Vec<i64>, Vec<u64>>,
}

impl ClassCohomology {
    pub fn new(fan: &Fan) -> Result<Self> {
        fan.require_smooth_complete()?;
        let ray_classes = (0..fan.n_rays())
            .map(|r| class_coordinates(fan, &TorusDivisor::prime(fan.n_rays(), r)))
            .collect::<Result<_>>()?;
        Ok(ClassCohomology { fan: fan.clone(), ray_classes, cache: DashMap::new() })
    }

    pub fn class_of(&self, d: &TorusDivisor) -> Vec<i64> {
        let k = self.fan.n_rays() - self.fan.rank();
        let mut out = vec![0; k];
        for (a, c) in d.coeffs.iter().zip(&self.ray_classes) {
            for (o, x) in out.iter_mut().zip(c) {
                *o += a * x;
            }
        }
        out
    }

    pub fn dims_of_class(&self, class: &[i64]) -> Vec<u64> {
        if let Some(h) = self.cache.get(class) {
            return h.clone();
        }
        let h = line_bundle_dims(&self.fan, &class_from_coordinates(&self.fan, class)).expect("smooth complete");
        self.cache.insert(class.to_vec(), h.clone());
        h
    }

    pub fn dims(&self, d: &TorusDivisor) -> Vec<u64> {
        self.dims_of_class(&self.class_of(d))
    }
}

/// Distinct classes of divisors with every coefficient in `[lo, hi]`, sorted by coordinates.
pub fn classes_in_box(fan: &Fan, lo: i64, hi: i64) -> Result<Vec<Vec<i64>>> {
    let cc = ClassCohomology::new(fan)?;
    let k = fan.n_rays();
    let mut seen = std::collections::BTreeSet::new();
    for p in box_points(&vec![lo; k], &vec![hi; k]) {
        seen.insert(cc.class_of(&TorusDivisor::new(p)));
    }
    Ok(seen.into_iter().collect())
}

/// For each test class `F` and `i > q`, scans `h^i(F + mL)` for `m = 0..=m_max`; a class still
/// nonzero at `m_max` is reported.
pub fn q_ample_falsifier(
    fan: &Fan,
    l: &TorusDivisor,
    q: usize,
    m_max: i64,
    test_classes: &[Vec<i64>],
) -> Result<VanishingReport> {
    let cc = ClassCohomology::new(fan)?;
    let n = fan.rank();
    let lc = cc.class_of(l);
    let degrees: Vec<usize> = (q + 1..=n).collect();
    let mut violations: Vec<Violation> = test_classes
        .par_iter()
        .flat_map_iter(|f| {
            let at = |m: i64| -> Vec<u64> {
                let c: Vec<i64> = f.iter().zip(&lc).map(|(a, b)| a + m * b).collect();
                cc.dims_of_class(&c)
            };
            let top = at(m_max);
            degrees
                .iter()
                .filter(|&&i| top[i] != 0)
                .map(|&i| Violation { class: f.clone(), degree: i, twist: m_max, value: top[i] })
                .collect::<Vec<_>>()
        })
        .collect();
    violations.sort();
    Ok(VanishingReport {
        theorem: "q-ample-falsifier".into(),
        degrees,
        twists: (0, m_max),
        classes_checked: test_classes.len(),
        violations,
    })
}

/// First twist after which `h^i(F + mL)` reads zero for every `i > q` up to `m_max`.
pub fn falsifier_onset(fan: &Fan, l: &TorusDivisor, q: usize, m_max: i64, f: &[i64]) -> Result<Option<i64>> {
    let cc = ClassCohomology::new(fan)?;
    let lc = cc.class_of(l);
    let mut onset = None;
    for m in 0..=m_max {
        let c: Vec<i64> = f.iter().zip(&lc).map(|(a, b)| a + m * b).collect();
        let h = cc.dims_of_class(&c);
        if h.iter().skip(q + 1).all(|&x| x == 0) {
            onset.get_or_insert(m);
        } else {
            onset = None;
        }
    }
    Ok(onset)
}

fn scan_negative_powers(
    fan: &Fan,
    l: &TorusDivisor,
    degrees: Vec<usize>,
    a_max: i64,
    theorem: &str,
) -> Result<VanishingReport> {
    let cc = ClassCohomology::new(fan)?;
    let class = cc.class_of(l);
    let mut violations = Vec::new();
    if !degrees.is_empty() {
        for a in 1..=a_max {
            let h = cc.dims(&l.scale(-a));
            for &i in &degrees {
                if h[i] != 0 {
                    violations.push(Violation { class: class.clone(), degree: i, twist: -a, value: h[i] });
                }
            }
        }
    }
    Ok(VanishingReport { theorem: theorem.into(), degrees, twists: (-a_max, -1), classes_checked: 1, violations })
}

/// `h^i(L^{-a}) = 0` for `i <= dim X - q - 1`, `1 <= a <= a_max`; requires `L` nef.
pub fn verify_semiample_vanishing(fan: &Fan, l: &TorusDivisor, q: usize, a_max: i64) -> Result<VanishingReport> {
    if !positivity_flags(fan, l)?.nef {
        return Err(Error::RequiresNef);
    }
    let n = fan.rank();
    let degrees: Vec<usize> = (0..n.saturating_sub(q)).collect();
    scan_negative_powers(fan, l, degrees, a_max, "semiample-vanishing")
}

/// `h^i(Z, L^{-1}) = 0` for `i < dim Z - q`, where `Z` is the toric variety of `fan`.
pub fn verify_fsplit_vanishing(fan: &Fan, l: &TorusDivisor, q: usize) -> Result<VanishingReport> {
    let n = fan.rank();
    let degrees: Vec<usize> = (0..n.saturating_sub(q)).collect();
    scan_negative_powers(fan, l, degrees, 1, "fsplit-vanishing")
}

/// The same check on the invariant divisor `D_ray`, with `L` restricted to it.
pub fn verify_fsplit_vanishing_on_ray(fan: &Fan, ray: usize, l: &TorusDivisor, q: usize) -> Result<VanishingReport> {
    let star = fan.star(&Cone::new(vec![ray]))?;
    let lr = restrict_divisor(fan, &star, l)?;
    verify_fsplit_vanishing(&star.fan, &lr, q)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatsCheck {
    pub dim: usize,
    pub q: usize,
    pub kappa: Iitaka,
    pub holds: bool,
}

/// `dim X <= q + kappa(L)` for a semi-ample `L`.
pub fn mats_inequality_check(fan: &Fan, l: &TorusDivisor, q: usize, k_max: u32) -> Result<MatsCheck> {
    if !positivity_flags(fan, l)?.nef {
        return Err(Error::RequiresNef);
    }
    let bl = stable_base_locus(fan, l, k_max)?;
    if !bl.stabilized {
        return Err(Error::SblocNotStabilized { k_max });
    }
    let kappa = iitaka_dimension(fan, l, k_max)?;
    let n = fan.rank();
    let holds = match kappa {
        Iitaka::Dim(k) => n <= q + k,
        Iitaka::NegInfinity => false,
    };
    Ok(MatsCheck { dim: n, q, kappa, holds })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PicRestriction {
    pub ray: usize,
    /// Row `i` is the restriction of the `i`-th class basis vector, in the star's class coordinates.
    pub matrix: Vec<Vec<i64>>,
    pub source_rank: usize,
    pub target_rank: usize,
    pub kernel_rank: usize,
    pub cokernel_rank: usize,
    pub injective: bool,
    /// Square with determinant `±1`.
    pub iso: bool,
}

/// Matrix of `Pic(X) -> Pic(D_ray)` in class coordinates.
pub fn pic_restriction_check(fan: &Fan, ray: usize) -> Result<PicRestriction> {
    fan.require_smooth_complete()?;
    let star = fan.star(&Cone::new(vec![ray]))?;
    let k = fan.n_rays() - fan.rank();
    let k2 = star.fan.n_rays() - star.fan.rank();
    let mut matrix = Vec::with_capacity(k);
    for i in 0..k {
        let mut e = vec![0; k];
        e[i] = 1;
        let d = class_from_coordinates(fan, &e);
        let r = restrict_divisor(fan, &star, &d)?;
        matrix.push(if k2 == 0 { Vec::new() } else { class_coordinates(&star.fan, &r)? });
    }
    let rank = if k2 == 0 { 0 } else { linalg::rank(&linalg::from_i64(&matrix)) };
    let iso = k == k2 && (k == 0 || crate::intmat::det_i64(&matrix).abs() == 1);
    Ok(PicRestriction {
        ray,
        source_rank: k,
        target_rank: k2,
        kernel_rank: k - rank,
        cokernel_rank: k2 - rank,
        injective: rank == k,
        iso,
        matrix,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SSplitScan {
    /// No class in the box violates the vanishing; not a proof.
    VerifiedInBox {
        s: usize,
        lo: i64,
        hi: i64,
        classes_checked: usize,
    },
    Counterexample {
        s: usize,
        class: Vec<i64>,
        representative: TorusDivisor,
        degree: usize,
        value: u64,
    },
}

impl SSplitScan {
    pub fn verified(&self) -> bool {
        matches!(self, SSplitScan::VerifiedInBox { .. })
    }
}

/// Looks for a class with representative in `[lo, hi]^rays` and `h^j != 0` for some `1 <= j <= s`.
pub fn s_split_scan(fan: &Fan, s: usize, lo: i64, hi: i64) -> Result<SSplitScan> {
    let cc = ClassCohomology::new(fan)?;
    let classes = classes_in_box(fan, lo, hi)?;
    let n = fan.rank();
    let top = s.min(n);
    if top == 0 {
        return Ok(SSplitScan::VerifiedInBox { s, lo, hi, classes_checked: classes.len() });
    }
    let hit = classes.par_iter().find_map_first(|c| {
        let h = cc.dims_of_class(c);
        (1..=top).find(|&j| h[j] != 0).map(|j| (c.clone(), j, h[j]))
    });
    Ok(match hit {
        Some((class, degree, value)) => {
            SSplitScan::Counterexample { s, representative: class_from_coordinates(fan, &class), class, degree, value }
        }
        None => SSplitScan::VerifiedInBox { s, lo, hi, classes_checked: classes.len() },
    })
}

/// Per-degree table `h^i(D)` for every class in a box; used by reports.
pub fn class_table(fan: &Fan, lo: i64, hi: i64) -> Result<BTreeMap<Vec<i64>, Vec<u64>>> {
    let cc = ClassCohomology::new(fan)?;
    Ok(classes_in_box(fan, lo, hi)?
        .into_iter()
        .map(|c| {
            let h = cc.dims_of_class(&c);
            (c, h)
        })
        .collect())
}

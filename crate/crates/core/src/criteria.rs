//! Inference rules over computed or asserted hypotheses, producing re-checkable
//! certificate trees.
//!
//! Every leaf holds a [`Check`] that can be re-evaluated from its serialized inputs. A rule
//! node aggregates its hypotheses; cross-checks run the direct decision procedure on the
//! same input and are reported alongside, without affecting the rule's status.

use serde::{Deserialize, Serialize};

use crate::bundle::KlyachkoBundle;
use crate::catalog::{product, projective_space};
use crate::divisor::{
    base_locus, boundary_divisor, iitaka_dimension, positivity_flags, restrict_divisor, same_class, stable_base_locus,
    Iitaka, TorusDivisor,
};
use crate::error::{Error, Result};
use crate::lattice::{Cone, Fan, FanMorphism};
use crate::positivity::{
    mats_inequality_check, pic_restriction_check, q_ample_certificate, s_split_scan, CdAssertion, ClassCohomology,
    Codim, SSplitScan,
};
use crate::splitting::{
    boundary_report, split_test_on_thickening, splitting_test, triviality_test, SplitVerdict, ThickeningVerdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Certified,
    RefutedHypothesis,
    Inconclusive,
    /// Every hypothesis holds, some only on a bounded scan.
    InconclusivePositive,
}

/// How a leaf's outcome feeds the rule: a hypothesis must hold, a side of an equivalence
/// only has to be decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Hypothesis,
    Side,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub fact: String,
    pub value: String,
    pub justification: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanParams {
    pub seed: u64,
    pub grid: usize,
    pub k_max: u32,
    pub a_max: i64,
    pub m_max: i64,
    pub box_lo: i64,
    pub box_hi: i64,
    pub m_thick: u32,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams { seed: 0, grid: 4, k_max: 6, a_max: 8, m_max: 12, box_lo: -3, box_hi: 3, m_thick: 1 }
    }
}

/// Re-evaluable evidence for one leaf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum Check {
    Effective {
        divisor: TorusDivisor,
    },
    Nef {
        fan: Fan,
        divisor: TorusDivisor,
    },
    LinearEquivalence {
        fan: Fan,
        left: TorusDivisor,
        right: TorusDivisor,
    },
    QAmple {
        fan: Fan,
        divisor: TorusDivisor,
        cd: Option<CdAssertion>,
        k_max: u32,
        at_most: usize,
    },
    /// `H^1(D, End(V)|_D ⊗ L^{-a}) = 0` for `a` in `[from, to]`.
    H1OnDivisor {
        bundle: KlyachkoBundle,
        divisor: TorusDivisor,
        line: TorusDivisor,
        from: i64,
        to: i64,
    },
    /// `H^i(L^{-a}) = 0` for the listed `i` and all `a >= 1`; scanned up to `a_max` unless
    /// `L` is nef with Iitaka dimension above every listed degree.
    NegativeVanishing {
        fan: Fan,
        line: TorusDivisor,
        degrees: Vec<usize>,
        a_max: i64,
        k_max: u32,
    },
    SSplit {
        fan: Fan,
        s: usize,
        lo: i64,
        hi: i64,
    },
    DivisorSSplit {
        fan: Fan,
        divisor: TorusDivisor,
        s: usize,
        lo: i64,
        hi: i64,
    },
    SplitOnThickening {
        bundle: KlyachkoBundle,
        divisor: TorusDivisor,
        m: u32,
        grid: usize,
        seed: u64,
    },
    TrivialOnDivisor {
        bundle: KlyachkoBundle,
        divisor: TorusDivisor,
        grid: usize,
        seed: u64,
    },
    RestrictionSurjective {
        bundle: KlyachkoBundle,
        divisor: TorusDivisor,
        m: u32,
    },
    Split {
        bundle: KlyachkoBundle,
        grid: usize,
        seed: u64,
    },
    Trivial {
        bundle: KlyachkoBundle,
        grid: usize,
        seed: u64,
    },
    PicInjective {
        fan: Fan,
        ray: usize,
    },
    Mats {
        fan: Fan,
        line: TorusDivisor,
        q: usize,
        k_max: u32,
    },
    BaseLocusCodim {
        fan: Fan,
        divisor: TorusDivisor,
        at_least: usize,
        stable: bool,
        k_max: u32,
    },
    DimensionAtLeast {
        fan: Fan,
        bound: usize,
    },
    AtMost {
        left: String,
        left_value: i64,
        right: String,
        right_value: i64,
    },
    Submersion {
        morphism: FanMorphism,
        min_relative_dimension: usize,
    },
    /// Toric varieties are F-split compatibly with every reduced invariant divisor.
    ToricFSplit {
        divisor: Option<TorusDivisor>,
    },
    Asserted {
        assertion: Assertion,
    },
    Missing {
        what: String,
    },
    OutOfScope {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    /// `None`: undecided.
    pub holds: Option<bool>,
    /// Established only on a bounded scan.
    pub bounded: bool,
    pub detail: String,
}

fn decided(holds: bool, detail: impl Into<String>) -> Outcome {
    Outcome { holds: Some(holds), bounded: false, detail: detail.into() }
}

fn scanned(holds: bool, detail: impl Into<String>) -> Outcome {
    Outcome { holds: Some(holds), bounded: holds, detail: detail.into() }
}

fn undecided(detail: impl Into<String>) -> Outcome {
    Outcome { holds: None, bounded: false, detail: detail.into() }
}

fn prime_ray(d: &TorusDivisor) -> Option<usize> {
    let nz: Vec<usize> = (0..d.coeffs.len()).filter(|&r| d.coeffs[r] != 0).collect();
    (nz.len() == 1 && d.coeffs[nz[0]] == 1).then(|| nz[0])
}

fn is_reduced(d: &TorusDivisor) -> bool {
    d.coeffs.iter().all(|&a| a == 0 || a == 1)
}

fn is_boundary(d: &TorusDivisor) -> bool {
    d.coeffs.iter().all(|&a| a == 1)
}

fn split_outcome(v: &SplitVerdict, what: &str) -> Outcome {
    match v {
        SplitVerdict::Split { summands, .. } => decided(
            true,
            format!("{what} splits: {:?}", summands.summands.iter().map(|s| (&s.0, s.2)).collect::<Vec<_>>()),
        ),
        SplitVerdict::NonSplit(c) => decided(
            false,
            format!(
                "{what} does not split: grid {}^{} on a {} space of dimension {}",
                c.grid_size,
                c.dimension,
                space_name(c.space),
                c.dimension
            ),
        ),
        SplitVerdict::Inconclusive { reason } => undecided(reason.clone()),
    }
}

fn space_name(s: crate::splitting::SearchSpace) -> &'static str {
    match s {
        crate::splitting::SearchSpace::Full => "full",
        crate::splitting::SearchSpace::Invariant => "invariant",
    }
}

impl Check {
    pub fn evaluate(&self) -> Outcome {
        self.try_evaluate().unwrap_or_else(|e| undecided(format!("error: {e}")))
    }

    fn try_evaluate(&self) -> Result<Outcome> {
        Ok(match self {
            Check::Effective { divisor } => {
                decided(divisor.is_effective(), format!("coefficients {:?}", divisor.coeffs))
            }
            Check::Nef { fan, divisor } => {
                let f = positivity_flags(fan, divisor)?;
                decided(f.nef, format!("nef = {}, ample = {}", f.nef, f.ample))
            }
            Check::LinearEquivalence { fan, left, right } => {
                let same = same_class(fan, left, right)?;
                decided(same, format!("{:?} ~ {:?}: {same}", left.coeffs, right.coeffs))
            }
            Check::QAmple { fan, divisor, cd, k_max, at_most } => {
                match q_ample_certificate(fan, divisor, cd.as_ref(), *k_max) {
                    Ok(cert) if cert.q <= *at_most => {
                        decided(true, format!("certified {}-ample (c = {})", cert.q, cert.c))
                    }
                    Ok(cert) => undecided(format!("certificate only gives q = {} > {at_most}", cert.q)),
                    Err(e) => undecided(e.to_string()),
                }
            }
            Check::H1OnDivisor { bundle, divisor, line, from, to } => {
                let end = bundle.end();
                for a in *from..=*to {
                    let h1 = end.twist(&line.scale(-a)).thickening(divisor, 0)?.cohomology.h(1);
                    if h1 != 0 {
                        return Ok(decided(false, format!("h^1 = {h1} at a = {a}")));
                    }
                }
                scanned(true, format!("h^1 = 0 for a in [{from}, {to}]; a > {to} unverified"))
            }
            Check::NegativeVanishing { fan, line, degrees, a_max, k_max } => {
                let top = degrees.iter().max().copied();
                if positivity_flags(fan, line)?.nef {
                    if let (Iitaka::Dim(k), Some(t)) = (iitaka_dimension(fan, line, *k_max)?, top) {
                        if k > t {
                            return Ok(decided(true, format!("semi-ample with Iitaka dimension {k}")));
                        }
                    }
                }
                let cc = ClassCohomology::new(fan)?;
                for a in 1..=*a_max {
                    let h = cc.dims(&line.scale(-a));
                    if let Some(&i) = degrees.iter().find(|&&i| h[i] != 0) {
                        return Ok(decided(false, format!("h^{i}(L^-{a}) = {}", h[i])));
                    }
                }
                scanned(true, format!("zero for a in [1, {a_max}]"))
            }
            Check::SSplit { fan, s, lo, hi } => match s_split_scan(fan, *s, *lo, *hi)? {
                SSplitScan::VerifiedInBox { classes_checked, .. } => {
                    scanned(true, format!("{classes_checked} classes in [{lo}, {hi}] verified"))
                }
                SSplitScan::Counterexample { class, degree, value, .. } => {
                    decided(false, format!("class {class:?} has h^{degree} = {value}"))
                }
            },
            Check::DivisorSSplit { fan, divisor, s, lo, hi } => match prime_ray(divisor) {
                Some(ray) => {
                    let star = fan.star(&Cone::new(vec![ray]))?;
                    Check::SSplit { fan: star.fan, s: *s, lo: *lo, hi: *hi }.try_evaluate()?
                }
                None => undecided("only invariant prime divisors are scanned"),
            },
            Check::SplitOnThickening { bundle, divisor, m, grid, seed } => match (prime_ray(divisor), m) {
                (Some(ray), 0) => split_outcome(&splitting_test(&bundle.restrict(ray)?.bundle, *grid, *seed), "V|D"),
                _ => match split_test_on_thickening(bundle, divisor, *m, *grid, *seed) {
                    ThickeningVerdict::Split { chart, .. } => {
                        decided(true, format!("V|D_{m} splits: invariant witness at the fixed point of cone {chart}"))
                    }
                    ThickeningVerdict::NonSplit(c) => decided(
                        false,
                        format!("V|D_{m} does not split: all {} sections invariant, grid {}", c.dimension, c.grid_size),
                    ),
                    ThickeningVerdict::Inconclusive { reason } => undecided(reason),
                },
            },
            Check::TrivialOnDivisor { bundle, divisor, grid, seed } => {
                if let Some(ray) = prime_ray(divisor) {
                    let t = triviality_test(&bundle.restrict(ray)?.bundle, *grid, *seed)?;
                    match t.trivial {
                        Some(b) => decided(b, format!("V|D trivial: {b}")),
                        None => undecided("splitting test on D inconclusive"),
                    }
                } else if is_boundary(divisor) {
                    let rep = boundary_report(bundle, *grid, *seed)?;
                    if rep.per_ray.iter().any(|(_, t)| t.is_none()) {
                        undecided("some boundary component undecided")
                    } else {
                        decided(rep.boundary_trivial, format!("boundary trivial: {}", rep.boundary_trivial))
                    }
                } else {
                    undecided("triviality is decided on prime invariant divisors and the full boundary")
                }
            }
            Check::RestrictionSurjective { bundle, divisor, m } => {
                let t = bundle.end().thickening(divisor, *m)?;
                decided(
                    t.surjective,
                    format!("H^0(End V) -> H^0(End V|D_{m}): rank {} of {}", t.restriction_rank, t.cohomology.h(0)),
                )
            }
            Check::Split { bundle, grid, seed } => split_outcome(&splitting_test(bundle, *grid, *seed), "V"),
            Check::Trivial { bundle, grid, seed } => match triviality_test(bundle, *grid, *seed)?.trivial {
                Some(b) => decided(b, format!("V trivial: {b}")),
                None => undecided("splitting test inconclusive"),
            },
            Check::PicInjective { fan, ray } => {
                let r = pic_restriction_check(fan, *ray)?;
                decided(r.injective, format!("restriction matrix {:?}, kernel rank {}", r.matrix, r.kernel_rank))
            }
            Check::Mats { fan, line, q, k_max } => {
                let m = mats_inequality_check(fan, line, *q, *k_max)?;
                decided(m.holds, format!("dim {} <= {} + {:?}", m.dim, m.q, m.kappa))
            }
            Check::BaseLocusCodim { fan, divisor, at_least, stable, k_max } => {
                let bl = if *stable { stable_base_locus(fan, divisor, *k_max)? } else { base_locus(fan, divisor)? };
                if !bl.stabilized {
                    undecided(format!("stable base locus not stabilized by k = {k_max}"))
                } else if bl.is_empty() {
                    decided(true, "empty, codimension infinite")
                } else {
                    decided(bl.codimension >= *at_least, format!("codimension {}", bl.codimension))
                }
            }
            Check::DimensionAtLeast { fan, bound } => {
                decided(fan.rank() >= *bound, format!("dimension {}", fan.rank()))
            }
            Check::AtMost { left, left_value, right, right_value } => {
                decided(left_value <= right_value, format!("{left} = {left_value}, {right} = {right_value}"))
            }
            Check::Submersion { morphism, min_relative_dimension } => {
                let rel = morphism.relative_dimension;
                let rays_ok = morphism.source.rays().iter().all(|u| {
                    let img = morphism.apply(u);
                    img.iter().all(|&x| x == 0) || morphism.target.ray_index(&img).is_some()
                });
                let ok = morphism.lattice_surjective && rays_ok && rel >= *min_relative_dimension as isize;
                decided(
                    ok,
                    format!(
                        "relative dimension {rel}, lattice surjective {}, rays map to rays or 0: {rays_ok}",
                        morphism.lattice_surjective
                    ),
                )
            }
            Check::ToricFSplit { divisor } => match divisor {
                Some(d) if !is_reduced(d) => undecided("divisor is not reduced"),
                _ => decided(
                    true,
                    "smooth complete toric varieties are F-split compatibly with reduced invariant divisors",
                ),
            },
            Check::Asserted { assertion } => {
                decided(true, format!("asserted {} = {}: {}", assertion.fact, assertion.value, assertion.justification))
            }
            Check::Missing { what } => undecided(format!("missing: {what}")),
            Check::OutOfScope { reason } => undecided(format!("out of computational scope: {reason}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub role: Role,
    pub check: Check,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateTree {
    pub rule: String,
    pub statement: String,
    pub status: Status,
    pub conclusion: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Evidence>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CertificateTree>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cross_checks: Vec<CertificateTree>,
}

fn leaf_status(role: Role, o: &Outcome) -> Status {
    match (role, o.holds) {
        (_, None) => Status::Inconclusive,
        (Role::Hypothesis, Some(false)) => Status::RefutedHypothesis,
        (_, Some(_)) if o.bounded => Status::InconclusivePositive,
        (_, Some(_)) => Status::Certified,
    }
}

fn aggregate(children: &[CertificateTree]) -> Status {
    let has = |s: Status| children.iter().any(|c| c.status == s);
    if has(Status::RefutedHypothesis) {
        Status::RefutedHypothesis
    } else if has(Status::Inconclusive) {
        Status::Inconclusive
    } else if has(Status::InconclusivePositive) {
        Status::InconclusivePositive
    } else {
        Status::Certified
    }
}

impl CertificateTree {
    pub fn leaf(label: &str, statement: &str, role: Role, check: Check) -> CertificateTree {
        let outcome = check.evaluate();
        let status = leaf_status(role, &outcome);
        CertificateTree {
            rule: label.into(),
            statement: statement.into(),
            status,
            conclusion: outcome.detail.clone(),
            evidence: Some(Evidence { role, check, outcome }),
            children: Vec::new(),
            cross_checks: Vec::new(),
        }
    }

    fn node(rule: &str, statement: &str, children: Vec<CertificateTree>, conclusion: String) -> CertificateTree {
        CertificateTree {
            rule: rule.into(),
            statement: statement.into(),
            status: aggregate(&children),
            conclusion,
            evidence: None,
            children,
            cross_checks: Vec::new(),
        }
    }

    /// Value of the first leaf with the given label.
    pub fn find(&self, label: &str) -> Option<&CertificateTree> {
        if self.rule == label {
            return Some(self);
        }
        self.children.iter().chain(&self.cross_checks).find_map(|c| c.find(label))
    }

    fn side_value(&self, label: &str) -> Option<bool> {
        self.find(label).and_then(|c| c.evidence.as_ref()).and_then(|e| e.outcome.holds)
    }

    /// Re-evaluates every leaf and re-aggregates; true if every status and outcome is reproduced.
    pub fn recheck(&self) -> bool {
        let children_ok = self.children.iter().chain(&self.cross_checks).all(CertificateTree::recheck);
        let own_ok = match &self.evidence {
            Some(ev) => {
                let o = ev.check.evaluate();
                o == ev.outcome && leaf_status(ev.role, &o) == self.status
            }
            None => self.children.is_empty() || aggregate(&self.children) == self.status,
        };
        children_ok && own_ok
    }
}

/// Inputs for [`apply_rule`]. `line` defaults to `divisor`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleContext {
    pub fan: Option<Fan>,
    pub divisor: Option<TorusDivisor>,
    pub line: Option<TorusDivisor>,
    pub bundle: Option<KlyachkoBundle>,
    pub morphism: Option<FanMorphism>,
    /// Divisor on the target of `morphism`.
    pub target_divisor: Option<TorusDivisor>,
    pub q: Option<usize>,
    pub s: Option<usize>,
    pub c: Option<i64>,
    pub d: Option<i64>,
    pub assertions: Vec<Assertion>,
    pub params: ScanParams,
}

impl RuleContext {
    fn need<'a, T>(&self, v: &'a Option<T>, what: &str) -> Result<&'a T> {
        v.as_ref().ok_or_else(|| Error::MissingContext(what.into()))
    }

    fn assertion(&self, fact: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.fact == fact)
    }

    fn cd(&self) -> Option<CdAssertion> {
        self.assertion("cd").and_then(|a| {
            a.value.parse().ok().map(|value| CdAssertion { value, justification: a.justification.clone() })
        })
    }

    fn line_or_divisor(&self) -> Result<&TorusDivisor> {
        match &self.line {
            Some(l) => Ok(l),
            None => self.need(&self.divisor, "divisor"),
        }
    }

    /// A computed fact if possible, else the assertion named `fact`, else a missing leaf.
    fn computed_or_asserted(&self, computed: Option<Check>, fact: &str) -> Check {
        computed.unwrap_or_else(|| match self.assertion(fact) {
            Some(a) => Check::Asserted { assertion: a.clone() },
            None => Check::Missing { what: format!("assertion '{fact}'") },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RuleInfo {
    pub id: &'static str,
    pub statement: &'static str,
    pub hypotheses: &'static [&'static str],
    pub conclusion: &'static str,
    pub in_scope: bool,
}

pub const RULES: &[RuleInfo] = &[
    RuleInfo {
        id: "q-ample-certificate",
        statement: "cd(X - supp D) <= n - c and codim sbloc(O(D)) >= c, c >= 1, give O(D) (n - c)-ample",
        hypotheses: &["D effective", "cd bound (derived for full boundary support, else asserted)", "stable base locus codimension"],
        conclusion: "O(D) is q-ample",
        in_scope: true,
    },
    RuleInfo {
        id: "split-via-divisor",
        statement: "L q-ample with q <= n - 2, D in |dL|, H^1(D, End(V)|D ⊗ L^-a) = 0 for a >= c, d >= c and V|D split give V split",
        hypotheses: &["D ~ dL", "D (n-2)-ample", "D arbitrary (toric F-split)", "H^1 vanishing on D for a >= c", "d >= c", "V|D splits"],
        conclusion: "V splits",
        in_scope: true,
    },
    RuleInfo {
        id: "split-via-1-split-divisor",
        statement: "D 1-split and O(D) (n - 2)-ample give: V splits iff V|D splits",
        hypotheses: &["D arbitrary (toric F-split)", "D (n-2)-ample", "D 1-split"],
        conclusion: "V splits iff V|D splits",
        in_scope: true,
    },
    RuleInfo {
        id: "split-relative",
        statement: "X 2-split, f: X -> Y, D relatively ample with relative dimension >= 4 (or f smooth and D pulled back from a (dim Y - 4)-positive divisor): V|D split gives V split",
        hypotheses: &["X 2-split", "relative hypotheses on f and D", "V|D splits"],
        conclusion: "V splits",
        in_scope: true,
    },
    RuleInfo {
        id: "s-split-lift",
        statement: "D effective q-ample and s-split with s <= n - (q + 1) give X s-split",
        hypotheses: &["D q-ample", "D s-split", "s <= n - q - 1"],
        conclusion: "X is s-split",
        in_scope: true,
    },
    RuleInfo {
        id: "s-split-raise",
        statement: "D effective q-ample and s-split with q <= s <= n - (q + 1) give X (s + 1)-split",
        hypotheses: &["D q-ample", "D s-split", "q <= s", "s <= n - q - 1"],
        conclusion: "X is (s+1)-split",
        in_scope: true,
    },
    RuleInfo {
        id: "trivial-from-vanishing",
        statement: "L (n - 2)-ample with H^i(L^-a) = 0 for a >= 1, i = 0, 1, 2, and D in |L|: V trivial iff V|D trivial",
        hypotheses: &["D ~ L", "L (n-2)-ample", "H^i(L^-a) = 0, i <= 2"],
        conclusion: "V trivial iff V|D trivial",
        in_scope: true,
    },
    RuleInfo {
        id: "trivial-semiample",
        statement: "L semi-ample and (n - 3)-ample, D in |L|: V trivial iff V|D trivial",
        hypotheses: &["L semi-ample", "L (n-3)-ample"],
        conclusion: "V trivial iff V|D trivial",
        in_scope: true,
    },
    RuleInfo {
        id: "trivial-fsplit-divisor",
        statement: "D effective, (n - 3)-ample and F-split: V trivial iff V|D trivial",
        hypotheses: &["D effective", "D (n-3)-ample", "D F-split"],
        conclusion: "V trivial iff V|D trivial",
        in_scope: true,
    },
    RuleInfo {
        id: "trivial-anticanonical",
        statement: "anticanonical bundle (n - 3)-ample and X F-split along the boundary: V trivial iff V|boundary trivial",
        hypotheses: &["boundary (n-3)-ample", "X F-split by the boundary"],
        conclusion: "V trivial iff V|boundary trivial",
        in_scope: true,
    },
    RuleInfo {
        id: "toric-split-thickening",
        statement: "dim X >= 3 and codim Bs(anticanonical) >= 3: V splits iff V on the m-th boundary thickening splits, m large",
        hypotheses: &["dim >= 3", "base locus codimension >= 3", "H^0(End V) onto H^0(End V on the thickening)"],
        conclusion: "V splits iff V on the thickening splits",
        in_scope: true,
    },
    RuleInfo {
        id: "toric-trivial-boundary",
        statement: "dim X >= 3 and codim Bs(anticanonical) >= 3: V trivial iff V|boundary trivial",
        hypotheses: &["dim >= 3", "base locus codimension >= 3"],
        conclusion: "V trivial iff V|boundary trivial",
        in_scope: true,
    },
    RuleInfo {
        id: "pullback-q-ample",
        statement: "f smooth surjective of relative dimension delta, M q-ample on Y: f*M is (delta + q)-ample",
        hypotheses: &["f submersion", "M q-ample"],
        conclusion: "f*M is (delta+q)-ample",
        in_scope: true,
    },
    RuleInfo {
        id: "semiample-vanishing",
        statement: "L semi-ample and q-ample, q <= n - 1: H^i(L^-a) = 0 for i <= n - q - 1, a >= 1",
        hypotheses: &["L semi-ample", "L q-ample"],
        conclusion: "H^i(L^-a) = 0, i <= n-q-1",
        in_scope: true,
    },
    RuleInfo {
        id: "dimension-bound",
        statement: "L semi-ample and q-ample: n <= q + kappa(L)",
        hypotheses: &["L semi-ample", "L q-ample"],
        conclusion: "n <= q + kappa(L)",
        in_scope: true,
    },
    RuleInfo {
        id: "relative-ample-positivity",
        statement: "relatively ample line bundles for fibrations with large fibers",
        hypotheses: &[],
        conclusion: "-",
        in_scope: false,
    },
    RuleInfo {
        id: "probabilistic-splitting",
        statement: "splitting statements for generic divisors",
        hypotheses: &[],
        conclusion: "-",
        in_scope: false,
    },
    RuleInfo {
        id: "minuscule-products",
        statement: "splitting on products of minuscule homogeneous varieties",
        hypotheses: &[],
        conclusion: "-",
        in_scope: false,
    },
    RuleInfo {
        id: "products-with-quadrics",
        statement: "splitting on products of projective spaces and quadrics",
        hypotheses: &[],
        conclusion: "-",
        in_scope: false,
    },
];

pub fn rule_info(id: &str) -> Result<&'static RuleInfo> {
    RULES.iter().find(|r| r.id == id).ok_or_else(|| Error::UnknownRule(id.into()))
}

fn q_ample_leaf(ctx: &RuleContext, fan: &Fan, d: &TorusDivisor, at_most: usize) -> CertificateTree {
    CertificateTree::leaf(
        "q-ample",
        &format!("O(D) is {at_most}-ample"),
        Role::Hypothesis,
        Check::QAmple { fan: fan.clone(), divisor: d.clone(), cd: ctx.cd(), k_max: ctx.params.k_max, at_most },
    )
}

fn split_cross_check(ctx: &RuleContext, v: &KlyachkoBundle) -> CertificateTree {
    CertificateTree::leaf(
        "direct-split",
        "splitting test on X",
        Role::Side,
        Check::Split { bundle: v.clone(), grid: ctx.params.grid, seed: ctx.params.seed },
    )
}

fn trivial_cross_check(ctx: &RuleContext, v: &KlyachkoBundle) -> CertificateTree {
    CertificateTree::leaf(
        "direct-trivial",
        "triviality test on X",
        Role::Side,
        Check::Trivial { bundle: v.clone(), grid: ctx.params.grid, seed: ctx.params.seed },
    )
}

fn trivial_side(ctx: &RuleContext, v: &KlyachkoBundle, d: &TorusDivisor) -> CertificateTree {
    CertificateTree::leaf(
        "restricted-trivial",
        "V|D is trivial",
        Role::Side,
        Check::TrivialOnDivisor { bundle: v.clone(), divisor: d.clone(), grid: ctx.params.grid, seed: ctx.params.seed },
    )
}

fn equivalence_conclusion(tree: &CertificateTree, side: &str, yes: &str, no: &str) -> String {
    match tree.side_value(side) {
        Some(true) => yes.into(),
        Some(false) => no.into(),
        None => "undecided".into(),
    }
}

fn finish_equivalence(mut tree: CertificateTree, side: &str, yes: &str, no: &str) -> CertificateTree {
    tree.conclusion = equivalence_conclusion(&tree, side, yes, no);
    tree
}

/// Evaluates a rule on the given context.
pub fn apply_rule(id: &str, ctx: &RuleContext) -> Result<CertificateTree> {
    let info = rule_info(id)?;
    if !info.in_scope {
        return Ok(CertificateTree::node(
            id,
            info.statement,
            vec![CertificateTree::leaf(
                "scope",
                "computable instance",
                Role::Hypothesis,
                Check::OutOfScope { reason: info.statement.into() },
            )],
            "inconclusive: out of computational scope".into(),
        ));
    }
    let p = &ctx.params;
    let fan = match (&ctx.fan, &ctx.morphism) {
        (Some(f), _) => f.clone(),
        (None, Some(m)) => m.source.clone(),
        _ => return Err(Error::MissingContext("fan".into())),
    };
    fan.require_smooth_complete()?;
    let n = fan.rank();
    let tree = match id {
        "q-ample-certificate" => {
            let d = ctx.need(&ctx.divisor, "divisor")?;
            let at_most = ctx.q.unwrap_or(n);
            let children = vec![
                CertificateTree::leaf(
                    "effective",
                    "D is effective",
                    Role::Hypothesis,
                    Check::Effective { divisor: d.clone() },
                ),
                q_ample_leaf(ctx, &fan, d, at_most),
            ];
            let q = q_ample_certificate(&fan, d, ctx.cd().as_ref(), p.k_max).ok().map(|c| c.q);
            let conclusion = match q {
                Some(q) => format!("O(D) is {q}-ample"),
                None => "no certificate".into(),
            };
            CertificateTree::node(id, info.statement, children, conclusion)
        }
        "split-via-divisor" => {
            let v = ctx.need(&ctx.bundle, "bundle")?;
            let d = ctx.need(&ctx.divisor, "divisor")?;
            let l = ctx.line_or_divisor()?;
            let c = *ctx.need(&ctx.c, "c")?;
            let mult = ctx.d.unwrap_or(1);
            let children = vec![
                CertificateTree::leaf(
                    "linear-equivalence",
                    "D is linearly equivalent to dL",
                    Role::Hypothesis,
                    Check::LinearEquivalence { fan: fan.clone(), left: d.clone(), right: l.scale(mult) },
                ),
                q_ample_leaf(ctx, &fan, d, n.saturating_sub(2)),
                CertificateTree::leaf(
                    "f-split",
                    "X is F-split, so D may be arbitrary",
                    Role::Hypothesis,
                    Check::ToricFSplit { divisor: None },
                ),
                CertificateTree::leaf(
                    "h1-vanishing",
                    "H^1(D, End(V)|D ⊗ L^-a) = 0 for a >= c",
                    Role::Hypothesis,
                    Check::H1OnDivisor {
                        bundle: v.clone(),
                        divisor: d.clone(),
                        line: l.clone(),
                        from: c,
                        to: p.a_max.max(c),
                    },
                ),
                CertificateTree::leaf(
                    "d-at-least-c",
                    "d >= c",
                    Role::Hypothesis,
                    Check::AtMost { left: "c".into(), left_value: c, right: "d".into(), right_value: mult },
                ),
                CertificateTree::leaf(
                    "restricted-split",
                    "V|D splits",
                    Role::Hypothesis,
                    Check::SplitOnThickening {
                        bundle: v.clone(),
                        divisor: d.clone(),
                        m: 0,
                        grid: p.grid,
                        seed: p.seed,
                    },
                ),
            ];
            let mut t = CertificateTree::node(id, info.statement, children, "V splits".into());
            t.cross_checks.push(split_cross_check(ctx, v));
            t
        }
        "split-via-1-split-divisor" => {
            let v = ctx.need(&ctx.bundle, "bundle")?;
            let d = ctx.need(&ctx.divisor, "divisor")?;
            let one_split = ctx.computed_or_asserted(
                prime_ray(d).map(|_| Check::DivisorSSplit {
                    fan: fan.clone(),
                    divisor: d.clone(),
                    s: 1,
                    lo: p.box_lo,
                    hi: p.box_hi,
                }),
                "divisor-1-split",
            );
            let children = vec![
                CertificateTree::leaf(
                    "f-split",
                    "X is F-split, so D may be arbitrary",
                    Role::Hypothesis,
                    Check::ToricFSplit { divisor: None },
                ),
                q_ample_leaf(ctx, &fan, d, n.saturating_sub(2)),
                CertificateTree::leaf("divisor-1-split", "D is 1-split", Role::Hypothesis, one_split),
                CertificateTree::leaf(
                    "restricted-split",
                    "V|D splits",
                    Role::Side,
                    Check::SplitOnThickening {
                        bundle: v.clone(),
                        divisor: d.clone(),
                        m: 0,
                        grid: p.grid,
                        seed: p.seed,
                    },
                ),
            ];
            let mut t = finish_equivalence(
                CertificateTree::node(id, info.statement, children, String::new()),
                "restricted-split",
                "V splits",
                "V does not split",
            );
            t.cross_checks.push(split_cross_check(ctx, v));
            t
        }
        "split-relative" => {
            let v = ctx.need(&ctx.bundle, "bundle")?;
            let d = ctx.need(&ctx.divisor, "divisor")?;
            let f = ctx.need(&ctx.morphism, "morphism")?;
            let mut children = vec![CertificateTree::leaf(
                "x-2-split",
                "X is 2-split",
                Role::Hypothesis,
                Check::SSplit { fan: fan.clone(), s: 2, lo: p.box_lo, hi: p.box_hi },
            )];
            if f.relative_dimension >= 4 {
                children.push(CertificateTree::leaf(
                    "relative-dimension",
                    "dim X - dim Y >= 4",
                    Role::Hypothesis,
                    Check::Submersion { morphism: f.clone(), min_relative_dimension: 4 },
                ));
                children.push(CertificateTree::leaf(
                    "relatively-ample",
                    "D is relatively ample",
                    Role::Hypothesis,
                    ctx.computed_or_asserted(None, "relatively-ample"),
                ));
            } else {
                children.push(CertificateTree::leaf(
                    "smooth-morphism",
                    "f is smooth",
                    Role::Hypothesis,
                    Check::Submersion { morphism: f.clone(), min_relative_dimension: 0 },
                ));
                let dy = ctx.need(&ctx.target_divisor, "target divisor")?;
                children.push(CertificateTree::leaf(
                    "pulled-back",
                    "D is the preimage of D_Y",
                    Role::Hypothesis,
                    Check::LinearEquivalence {
                        fan: fan.clone(),
                        left: d.clone(),
                        right: crate::divisor::pullback_divisor(f, dy)?,
                    },
                ));
                children.push(CertificateTree::leaf(
                    "target-positive",
                    "D_Y is smooth and (dim Y - 4)-positive",
                    Role::Hypothesis,
                    ctx.computed_or_asserted(None, "target-divisor-positive"),
                ));
            }
            children.push(CertificateTree::leaf(
                "restricted-split",
                "V|D splits",
                Role::Hypothesis,
                Check::SplitOnThickening { bundle: v.clone(), divisor: d.clone(), m: 0, grid: p.grid, seed: p.seed },
            ));
            let mut t = CertificateTree::node(id, info.statement, children, "V splits".into());
            t.cross_checks.push(split_cross_check(ctx, v));
            t
        }
        "s-split-lift" | "s-split-raise" => {
            let d = ctx.need(&ctx.divisor, "divisor")?;
            let s = *ctx.need(&ctx.s, "s")?;
            let q = match ctx.q {
                Some(q) => Some(q),
                None => q_ample_certificate(&fan, d, ctx.cd().as_ref(), p.k_max).ok().map(|c| c.q),
            };
            let d_split = ctx.computed_or_asserted(
                prime_ray(d).map(|_| Check::DivisorSSplit {
                    fan: fan.clone(),
                    divisor: d.clone(),
                    s,
                    lo: p.box_lo,
                    hi: p.box_hi,
                }),
                "divisor-s-split",
            );
            let mut children = vec![
                q_ample_leaf(ctx, &fan, d, q.unwrap_or(0)),
                CertificateTree::leaf("divisor-s-split", &format!("D is {s}-split"), Role::Hypothesis, d_split),
            ];
            let qv = q.map_or(i64::MAX, |q| q as i64);
            children.push(CertificateTree::leaf(
                "s-bound",
                "s <= n - q - 1",
                Role::Hypothesis,
                Check::AtMost {
                    left: "s".into(),
                    left_value: s as i64,
                    right: "n - q - 1".into(),
                    right_value: n as i64 - qv.min(n as i64) - 1,
                },
            ));
            let target = if id == "s-split-raise" {
                children.push(CertificateTree::leaf(
                    "q-bound",
                    "q <= s",
                    Role::Hypothesis,
                    Check::AtMost { left: "q".into(), left_value: qv, right: "s".into(), right_value: s as i64 },
                ));
                s + 1
            } else {
                s
            };
            let mut t = CertificateTree::node(id, info.statement, children, format!("X is {target}-split"));
            t.cross_checks.push(CertificateTree::leaf(
                "direct-s-split",
                "bounded scan on X",
                Role::Side,
                Check::SSplit { fan: fan.clone(), s: target, lo: p.box_lo, hi: p.box_hi },
            ));
            t
        }
        "trivial-from-vanishing" => {
            let v = ctx.need(&ctx.bundle, "bundle")?;
            let d = ctx.need(&ctx.divisor, "divisor")?;
            let l = ctx.line_or_divisor()?;
            let children = vec![
                CertificateTree::leaf(
                    "linear-equivalence",
                    "D is in |L|",
                    Role::Hypothesis,
                    Check::LinearEquivalence { fan: fan.clone(), left: d.clone(), right: l.clone() },
                ),
                q_ample_leaf(ctx, &fan, d, n.saturating_sub(2)),
                CertificateTree::leaf(
                    "negative-vanishing",
                    "H^i(L^-a) = 0 for a >= 1, i = 0, 1, 2",
                    Role::Hypothesis,
                    Check::NegativeVanishing {
                        fan: fan.clone(),
                        line: l.clone(),
                        degrees: vec![0, 1, 2],
                        a_max: p.a_max,
                        k_max: p.k_max,
                    },
                ),
                trivial_side(ctx, v, d),
            ];
            let mut t = finish_equivalence(
                CertificateTree::node(id, info.statement, children, String::new()),
                "restricted-trivial",
                "V is trivial",
                "V is not trivial",
            );
            t.cross_checks.push(trivial_cross_check(ctx, v));
            t
        }
        "trivial-semiample" => {
            let v = ctx.need(&ctx.bundle, "bundle")?;
            let d = ctx.need(&ctx.divisor, "divisor")?;
            let l = ctx.line_or_divisor()?;
            let children = vec![
                CertificateTree::leaf(
                    "semi-ample",
                    "L is semi-ample",
                    Role::Hypothesis,
                    Check::Nef { fan: fan.clone(), divisor: l.clone() },
                ),
                CertificateTree::leaf(
                    "linear-equivalence",
                    "D is in |L|",
                    Role::Hypothesis,
                    Check::LinearEquivalence { fan: fan.clone(), left: d.clone(), right: l.clone() },
                ),
                q_ample_leaf(ctx, &fan, d, n.saturating_sub(3)),
                trivial_side(ctx, v, d),
            ];
            let mut t = finish_equivalence(
                CertificateTree::node(id, info.statement, children, String::new()),
                "restricted-trivial",
                "V is trivial",
                "V is not trivial",
            );
            t.cross_checks.push(trivial_cross_check(ctx, v));
            t
        }
        "trivial-fsplit-divisor" | "trivial-anticanonical" => {
            let v = ctx.need(&ctx.bundle, "bundle")?;
            let d = if id == "trivial-anticanonical" {
                boundary_divisor(&fan)
            } else {
                ctx.need(&ctx.divisor, "divisor")?.clone()
            };
            let children = vec![
                CertificateTree::leaf(
                    "effective",
                    "D is effective",
                    Role::Hypothesis,
                    Check::Effective { divisor: d.clone() },
                ),
                q_ample_leaf(ctx, &fan, &d, n.saturating_sub(3)),
                CertificateTree::leaf(
                    "f-split",
                    "D is F-split",
                    Role::Hypothesis,
                    Check::ToricFSplit { divisor: Some(d.clone()) },
                ),
                trivial_side(ctx, v, &d),
            ];
            let mut t = finish_equivalence(
                CertificateTree::node(id, info.statement, children, String::new()),
                "restricted-trivial",
                "V is trivial",
                "V is not trivial",
            );
            t.cross_checks.push(trivial_cross_check(ctx, v));
            t
        }
        "toric-split-thickening" | "toric-trivial-boundary" => {
            let v = ctx.need(&ctx.bundle, "bundle")?;
            let delta = boundary_divisor(&fan);
            let mut children = vec![
                CertificateTree::leaf(
                    "dimension",
                    "dim X >= 3",
                    Role::Hypothesis,
                    Check::DimensionAtLeast { fan: fan.clone(), bound: 3 },
                ),
                CertificateTree::leaf(
                    "anticanonical-base-locus",
                    "codim Bs(anticanonical) >= 3",
                    Role::Hypothesis,
                    Check::BaseLocusCodim {
                        fan: fan.clone(),
                        divisor: delta.clone(),
                        at_least: 3,
                        stable: false,
                        k_max: p.k_max,
                    },
                ),
            ];
            if id == "toric-split-thickening" {
                children.push(CertificateTree::leaf(
                    "restriction-surjective",
                    "H^0(End V) maps onto sections on the thickening",
                    Role::Hypothesis,
                    Check::RestrictionSurjective { bundle: v.clone(), divisor: delta.clone(), m: p.m_thick },
                ));
                children.push(CertificateTree::leaf(
                    "thickening-split",
                    "V on the boundary thickening splits",
                    Role::Side,
                    Check::SplitOnThickening {
                        bundle: v.clone(),
                        divisor: delta,
                        m: p.m_thick,
                        grid: p.grid,
                        seed: p.seed,
                    },
                ));
                let mut t = finish_equivalence(
                    CertificateTree::node(id, info.statement, children, String::new()),
                    "thickening-split",
                    "V splits",
                    "V does not split",
                );
                t.cross_checks.push(split_cross_check(ctx, v));
                t
            } else {
                children.push(trivial_side(ctx, v, &delta));
                let mut t = finish_equivalence(
                    CertificateTree::node(id, info.statement, children, String::new()),
                    "restricted-trivial",
                    "V is trivial",
                    "V is not trivial",
                );
                t.cross_checks.push(trivial_cross_check(ctx, v));
                t
            }
        }
        "pullback-q-ample" => {
            let f = ctx.need(&ctx.morphism, "morphism")?;
            let m = ctx.need(&ctx.target_divisor, "target divisor")?;
            let delta = f.relative_dimension.max(0) as usize;
            let qy = ctx.q.or_else(|| q_ample_certificate(&f.target, m, ctx.cd().as_ref(), p.k_max).ok().map(|c| c.q));
            let children = vec![
                CertificateTree::leaf(
                    "submersion",
                    "f is smooth and surjective",
                    Role::Hypothesis,
                    Check::Submersion { morphism: f.clone(), min_relative_dimension: 0 },
                ),
                q_ample_leaf(ctx, &f.target, m, qy.unwrap_or(0)),
            ];
            let conclusion = match qy {
                Some(q) => format!("f*M is {}-ample", delta + q),
                None => "no certificate on the target".into(),
            };
            CertificateTree::node(id, info.statement, children, conclusion)
        }
        "semiample-vanishing" | "dimension-bound" => {
            let l = ctx.line_or_divisor()?;
            let q = match ctx.q {
                Some(q) => q,
                None => q_ample_certificate(&fan, l, ctx.cd().as_ref(), p.k_max).map(|c| c.q).unwrap_or(n),
            };
            let children = vec![
                CertificateTree::leaf(
                    "semi-ample",
                    "L is semi-ample",
                    Role::Hypothesis,
                    Check::Nef { fan: fan.clone(), divisor: l.clone() },
                ),
                q_ample_leaf(ctx, &fan, l, q),
            ];
            let (conclusion, cross) = if id == "semiample-vanishing" {
                let degrees: Vec<usize> = (0..n.saturating_sub(q)).collect();
                (
                    format!("H^i(L^-a) = 0 for i <= {}", n as i64 - q as i64 - 1),
                    CertificateTree::leaf(
                        "direct-vanishing",
                        "scan of H^i(L^-a)",
                        Role::Side,
                        Check::NegativeVanishing {
                            fan: fan.clone(),
                            line: l.clone(),
                            degrees,
                            a_max: p.a_max,
                            k_max: 0,
                        },
                    ),
                )
            } else {
                (
                    format!("{n} <= {q} + kappa(L)"),
                    CertificateTree::leaf(
                        "direct-kappa",
                        "Iitaka dimension",
                        Role::Side,
                        Check::Mats { fan: fan.clone(), line: l.clone(), q, k_max: p.k_max },
                    ),
                )
            };
            let mut t = CertificateTree::node(id, info.statement, children, conclusion);
            t.cross_checks.push(cross);
            t
        }
        _ => unreachable!("registered rule without an evaluator"),
    };
    Ok(tree)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agreement {
    pub on_x: Option<bool>,
    pub on_boundary: Option<bool>,
    /// `None` when either side is undecided.
    pub agree: Option<bool>,
}

impl Agreement {
    fn new(on_x: Option<bool>, on_boundary: Option<bool>) -> Self {
        let agree = on_x.zip(on_boundary).map(|(a, b)| a == b);
        Agreement { on_x, on_boundary, agree }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitToricReport {
    pub dim: usize,
    pub anticanonical_base_locus_codim: Codim,
    pub hypotheses_hold: bool,
    pub thickening: u32,
    pub restriction_surjective: bool,
    pub split: Agreement,
    pub trivial: Agreement,
}

/// Both sides of the toric splitting and triviality equivalences, computed independently.
pub fn check_split_toric(
    fan: &Fan,
    v: &KlyachkoBundle,
    m_thick: u32,
    grid: usize,
    seed: u64,
) -> Result<SplitToricReport> {
    fan.require_smooth_complete()?;
    if v.fan() != fan {
        return Err(Error::FanMismatch);
    }
    let delta = boundary_divisor(fan);
    let bl = base_locus(fan, &delta)?;
    let codim = if bl.is_empty() { Codim::Infinite } else { Codim::Finite(bl.codimension) };
    let hypotheses_hold = fan.rank() >= 3 && codim >= Codim::Finite(3);
    let split_x = match splitting_test(v, grid, seed) {
        SplitVerdict::Split { .. } => Some(true),
        SplitVerdict::NonSplit(_) => Some(false),
        SplitVerdict::Inconclusive { .. } => None,
    };
    let split_d = match split_test_on_thickening(v, &delta, m_thick, grid, seed) {
        ThickeningVerdict::Split { .. } => Some(true),
        ThickeningVerdict::NonSplit(_) => Some(false),
        ThickeningVerdict::Inconclusive { .. } => None,
    };
    let trivial_x = triviality_test(v, grid, seed)?.trivial;
    let rep = boundary_report(v, grid, seed)?;
    let trivial_d = if rep.per_ray.iter().any(|(_, t)| t.is_none()) { None } else { Some(rep.boundary_trivial) };
    Ok(SplitToricReport {
        dim: fan.rank(),
        anticanonical_base_locus_codim: codim,
        hypotheses_hold,
        thickening: m_thick,
        restriction_surjective: v.end().thickening(&delta, m_thick)?.surjective,
        split: Agreement::new(split_x, split_d),
        trivial: Agreement::new(trivial_x, trivial_d),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionPlan {
    pub factor_dims: Vec<usize>,
    /// `(factor, rays of the product fan to restrict along)`; cutting `P^n` down to the
    /// coordinate plane `P^2`.
    pub restrictions: Vec<(usize, Vec<usize>)>,
    pub target_dims: Vec<usize>,
    pub reduced_tests: u64,
    pub full_tests: u64,
}

/// Reduces splitting on `P^{n_1} x ... x P^{n_t}` to a product of planes.
pub fn reduction_plan_products(factor_dims: &[usize]) -> Result<ReductionPlan> {
    if factor_dims.is_empty() {
        return Err(Error::InvalidInput("no factors".into()));
    }
    if let Some(&n) = factor_dims.iter().find(|&&n| n < 2) {
        return Err(Error::FactorTooSmall(n));
    }
    let fans: Vec<Fan> = factor_dims.iter().map(|&n| projective_space(n)).collect();
    let total = product(&fans);
    let mut offset = 0;
    let mut restrictions = Vec::new();
    for (i, &n) in factor_dims.iter().enumerate() {
        // coordinate rays e_3, ..., e_n of factor i
        let rays = (2..n)
            .map(|k| {
                let mut v = vec![0; total.rank()];
                v[offset + k] = 1;
                total.ray_index(&v).expect("coordinate ray")
            })
            .collect();
        restrictions.push((i, rays));
        offset += n;
    }
    Ok(ReductionPlan {
        factor_dims: factor_dims.to_vec(),
        restrictions,
        target_dims: vec![2; factor_dims.len()],
        reduced_tests: 3u64.pow(factor_dims.len() as u32),
        full_tests: factor_dims.iter().map(|&n| n as u64 + 1).product(),
    })
}

/// Restricts `v` (on the product fan of the plan) along every divisor in the plan.
pub fn execute_plan(plan: &ReductionPlan, v: &KlyachkoBundle) -> Result<KlyachkoBundle> {
    let fans: Vec<Fan> = plan.factor_dims.iter().map(|&n| projective_space(n)).collect();
    if *v.fan() != product(&fans) {
        return Err(Error::FanMismatch);
    }
    let ambient = v.fan().clone();
    let mut cur = v.clone();
    // current index of each ambient ray, `None` once restricted away
    let mut index: Vec<Option<usize>> = (0..ambient.n_rays()).map(Some).collect();
    for ray in plan.restrictions.iter().flat_map(|(_, r)| r.iter().copied()) {
        let here = index[ray].ok_or_else(|| Error::InvalidInput("ray restricted twice".into()))?;
        let r = cur.restrict(here)?;
        index = index.iter().map(|i| i.and_then(|i| r.star.star_ray_of(i))).collect();
        cur = r.bundle;
    }
    Ok(cur)
}

/// Restriction of a divisor along a ray, for rules that need `L|_D`.
pub fn restrict_to_ray(fan: &Fan, ray: usize, d: &TorusDivisor) -> Result<(Fan, TorusDivisor)> {
    let star = fan.star(&Cone::new(vec![ray]))?;
    let r = restrict_divisor(fan, &star, d)?;
    Ok((star.fan, r))
}

//! Line-oriented model files.
//!
//! ```text
//! # comment
//! [fan P2]
//! ray 1 0
//! ray 0 1
//! ray -1 -1
//! cone 0 1
//! cone 1 2
//! cone 2 0
//!
//! [divisor partialD]
//! coeffs 1 1 1
//!
//! [divisor L]
//! coeffs 0 0 1
//!
//! [bundle TP2]
//! tangent
//!
//! [assert]
//! cd L = 0 : complement of a line in P^2 is affine
//!
//! [config]
//! seed = 7
//! ```
//!
//! Ray indices in `cone`, `coeffs` and `step` lines follow the order of the `ray` lines of the
//! fan; the loader moves them to the canonical order. Sections other than `[fan]` take an
//! optional `fan NAME` line, required when the model has several fans. Bundles are given as
//! `tangent`, `trivial`, `sum D1 D2 ...` or by `rank R` plus `step RAY J v ; v ; ...` lines
//! (`-` for the zero space), one per filtration step.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::bundle::KlyachkoBundle;
use crate::catalog::fan_by_name;
use crate::criteria::{Assertion, ScanParams};
use crate::divisor::{boundary_divisor, class_from_coordinates, TorusDivisor};
use crate::error::Error;
use crate::lattice::{Fan, FanMorphism};
use crate::linalg::{fmt_q, parse_q, Subspace, Q};

/// Facts that may be asserted rather than computed.
pub const ASSERTABLE: &[&str] =
    &["cd", "divisor-1-split", "divisor-s-split", "relatively-ample", "target-divisor-positive"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedDivisor {
    pub fan: String,
    pub divisor: TorusDivisor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedClass {
    pub fan: String,
    pub coords: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedBundle {
    pub fan: String,
    pub bundle: KlyachkoBundle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedMorphism {
    pub source: String,
    pub target: String,
    pub morphism: FanMorphism,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelAssertion {
    pub fact: String,
    pub subject: Option<String>,
    pub value: String,
    pub justification: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Model {
    pub fans: BTreeMap<String, Fan>,
    pub divisors: BTreeMap<String, NamedDivisor>,
    pub classes: BTreeMap<String, NamedClass>,
    pub bundles: BTreeMap<String, NamedBundle>,
    pub morphisms: BTreeMap<String, NamedMorphism>,
    pub assertions: Vec<ModelAssertion>,
    pub config: ScanParams,
}

/// All errors found while loading a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelErrors(pub Vec<Error>);

impl fmt::Display for ModelErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ModelErrors {}

fn lookup_err(kind: &str, name: &str) -> Error {
    Error::InvalidInput(format!("model has no {kind} named `{name}`"))
}

impl Model {
    pub fn fan(&self, name: &str) -> crate::Result<&Fan> {
        self.fans.get(name).ok_or_else(|| lookup_err("fan", name))
    }

    /// The only fan, or the named one.
    pub fn default_fan(&self, name: Option<&str>) -> crate::Result<(&String, &Fan)> {
        match name {
            Some(n) => self.fans.get_key_value(n).ok_or_else(|| lookup_err("fan", n)),
            None if self.fans.len() == 1 => Ok(self.fans.iter().next().expect("one fan")),
            None => Err(Error::InvalidInput("model has several fans; name one".into())),
        }
    }

    /// A divisor by name, or a class by name through its representative.
    pub fn divisor(&self, name: &str) -> crate::Result<NamedDivisor> {
        if let Some(d) = self.divisors.get(name) {
            return Ok(d.clone());
        }
        let c = self.classes.get(name).ok_or_else(|| lookup_err("divisor or class", name))?;
        let fan = self.fan(&c.fan)?;
        Ok(NamedDivisor { fan: c.fan.clone(), divisor: class_from_coordinates(fan, &c.coords) })
    }

    pub fn bundle(&self, name: &str) -> crate::Result<&NamedBundle> {
        self.bundles.get(name).ok_or_else(|| lookup_err("bundle", name))
    }

    pub fn morphism(&self, name: &str) -> crate::Result<&NamedMorphism> {
        self.morphisms.get(name).ok_or_else(|| lookup_err("morphism", name))
    }

    /// Assertions about `subject`, plus those without a subject.
    pub fn assertions_for(&self, subject: Option<&str>) -> Vec<Assertion> {
        self.assertions
            .iter()
            .filter(|a| a.subject.is_none() || a.subject.as_deref() == subject)
            .map(|a| Assertion { fact: a.fact.clone(), value: a.value.clone(), justification: a.justification.clone() })
            .collect()
    }

    /// Canonical text; rays in canonical order, bundles as raw filtration steps.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, fan) in &self.fans {
            let _ = writeln!(out, "[fan {name}]");
            for u in fan.rays() {
                let _ = writeln!(out, "ray {}", join(u));
            }
            for c in fan.max_cones() {
                let _ = writeln!(out, "cone {}", join(c.rays()));
            }
            out.push('\n');
        }
        for (name, d) in &self.divisors {
            let _ = writeln!(out, "[divisor {name}]\nfan {}\ncoeffs {}\n", d.fan, join(&d.divisor.coeffs));
        }
        for (name, c) in &self.classes {
            let _ = writeln!(out, "[class {name}]\nfan {}\ncoords {}\n", c.fan, join(&c.coords));
        }
        for (name, b) in &self.bundles {
            let _ = writeln!(out, "[bundle {name}]\nfan {}\nrank {}", b.fan, b.bundle.rank());
            for (ray, f) in b.bundle.filtrations().iter().enumerate() {
                for (j, w) in f.steps() {
                    let _ = writeln!(out, "step {ray} {j} {}", fmt_subspace(w));
                }
            }
            out.push('\n');
        }
        for (name, m) in &self.morphisms {
            let _ = writeln!(out, "[morphism {name}]\nsource {}\ntarget {}", m.source, m.target);
            for row in &m.morphism.matrix {
                let _ = writeln!(out, "row {}", join(row));
            }
            out.push('\n');
        }
        if !self.assertions.is_empty() {
            out.push_str("[assert]\n");
            for a in &self.assertions {
                let subject = a.subject.as_ref().map(|s| format!(" {s}")).unwrap_or_default();
                let _ = writeln!(out, "{}{subject} = {} : {}", a.fact, a.value, a.justification);
            }
            out.push('\n');
        }
        let c = &self.config;
        let _ = writeln!(
            out,
            "[config]\nseed = {}\ngrid = {}\nkmax = {}\namax = {}\nmmax = {}\nbox_lo = {}\nbox_hi = {}\nmthick = {}",
            c.seed, c.grid, c.k_max, c.a_max, c.m_max, c.box_lo, c.box_hi, c.m_thick
        );
        out
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn fmt_subspace(w: &Subspace) -> String {
    if w.is_zero() {
        return "-".into();
    }
    w.basis().iter().map(|row| row.iter().map(fmt_q).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join(" ; ")
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(s, t)| (line[..s].chars().count() + 1, t)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Fan,
    Divisor,
    Class,
    Bundle,
    Morphism,
    Assert,
    Config,
}

#[derive(Debug)]
struct Entry<'a> {
    line: usize,
    key: (usize, &'a str),
    args: Vec<(usize, &'a str)>,
    raw: &'a str,
}

#[derive(Debug)]
struct Section<'a> {
    kind: Kind,
    name: String,
    line: usize,
    entries: Vec<Entry<'a>>,
}

struct Loader {
    errors: Vec<Error>,
}

fn parse_err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn validation(name: &str, reason: impl Into<String>) -> Error {
    Error::Validation { name: name.into(), reason: reason.into() }
}

impl Loader {
    fn int(&mut self, line: usize, (col, tok): (usize, &str)) -> Option<i64> {
        match tok.parse::<BigInt>() {
            Ok(b) => match b.to_i64() {
                Some(v) => Some(v),
                None => {
                    self.errors.push(parse_err(line, col, format!("integer {tok} is outside the supported range")));
                    None
                }
            },
            Err(_) => {
                self.errors.push(parse_err(line, col, format!("expected an integer, found `{tok}`")));
                None
            }
        }
    }

    fn ints(&mut self, e: &Entry) -> Option<Vec<i64>> {
        let v: Vec<Option<i64>> = e.args.iter().map(|&t| self.int(e.line, t)).collect();
        v.into_iter().collect()
    }

    fn index(&mut self, line: usize, t: (usize, &str), bound: usize) -> Option<usize> {
        let v = self.int(line, t)?;
        if v < 0 || v as usize >= bound {
            self.errors.push(parse_err(line, t.0, format!("index {v} out of range 0..{bound}")));
            return None;
        }
        Some(v as usize)
    }

    fn sections<'a>(&mut self, text: &'a str) -> Vec<Section<'a>> {
        let mut sections: Vec<Section<'a>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            if trimmed.starts_with('[') {
                let col = content.find('[').map_or(1, |c| c + 1);
                let Some(inner) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) else {
                    self.errors.push(parse_err(line, col, "unterminated section header"));
                    continue;
                };
                let mut parts = inner.split_whitespace();
                let kind = match parts.next() {
                    Some("fan") => Kind::Fan,
                    Some("divisor") => Kind::Divisor,
                    Some("class") => Kind::Class,
                    Some("bundle") => Kind::Bundle,
                    Some("morphism") => Kind::Morphism,
                    Some("assert") => Kind::Assert,
                    Some("config") => Kind::Config,
                    other => {
                        self.errors.push(parse_err(
                            line,
                            col + 1,
                            format!("unknown section `{}`", other.unwrap_or("")),
                        ));
                        continue;
                    }
                };
                let name = parts.next().unwrap_or("").to_string();
                let named = !matches!(kind, Kind::Assert | Kind::Config);
                if named == name.is_empty() || parts.next().is_some() {
                    let msg = if named { "section needs exactly one name" } else { "section takes no name" };
                    self.errors.push(parse_err(line, col, msg));
                    continue;
                }
                sections.push(Section { kind, name, line, entries: Vec::new() });
                continue;
            }
            let toks = tokens(content);
            let Some(section) = sections.last_mut() else {
                self.errors.push(parse_err(line, toks[0].0, "content outside of a section"));
                continue;
            };
            section.entries.push(Entry { line, key: toks[0], args: toks[1..].to_vec(), raw: content });
        }
        sections
    }
}

/// Reads and validates a model file.
pub fn load_model(path: &Path) -> Result<Model, ModelErrors> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ModelErrors(vec![Error::InvalidInput(format!("cannot read {}: {e}", path.display()))]))?;
    parse_model(&text)
}

struct FanInfo {
    fan: Fan,
    /// File ray index to canonical index.
    perm: Vec<usize>,
}

/// Parses and validates model text, collecting every error found.
pub fn parse_model(text: &str) -> Result<Model, ModelErrors> {
    let mut ld = Loader { errors: Vec::new() };
    let sections = ld.sections(text);
    let mut model = Model::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for s in sections.iter().filter(|s| !s.name.is_empty()) {
        if let Some(first) = seen.insert(s.name.clone(), s.line) {
            ld.errors.push(validation(&s.name, format!("name already used on line {first} (line {})", s.line)));
        }
    }

    let mut fans: HashMap<String, FanInfo> = HashMap::new();
    for s in sections.iter().filter(|s| s.kind == Kind::Fan) {
        if let Some(info) = load_fan(&mut ld, s) {
            model.fans.insert(s.name.clone(), info.fan.clone());
            fans.insert(s.name.clone(), info);
        }
    }

    let default_fan = (fans.len() == 1).then(|| fans.keys().next().cloned()).flatten();
    let fan_of = |ld: &mut Loader, s: &Section| -> Option<String> {
        let named = s.entries.iter().find(|e| e.key.1 == "fan");
        match named {
            Some(e) => match e.args.as_slice() {
                [(_, n)] if fans.contains_key(*n) => Some(n.to_string()),
                [(col, n)] => {
                    ld.errors.push(parse_err(e.line, *col, format!("unknown fan `{n}`")));
                    None
                }
                _ => {
                    ld.errors.push(parse_err(e.line, e.key.0, "`fan` takes one name"));
                    None
                }
            },
            None => default_fan.clone().or_else(|| {
                ld.errors.push(validation(&s.name, "no `fan` line and the model does not have exactly one fan"));
                None
            }),
        }
    };

    for s in sections.iter().filter(|s| s.kind == Kind::Divisor) {
        let Some(fname) = fan_of(&mut ld, s) else {
            continue;
        };
        let info = &fans[&fname];
        let Some(e) = single(&mut ld, s, "coeffs") else {
            continue;
        };
        let Some(c) = ld.ints(e) else { continue };
        if c.len() != info.fan.n_rays() {
            ld.errors.push(Error::Located {
                line: e.line,
                source: Box::new(validation(
                    &s.name,
                    format!("{} coefficients for {} rays", c.len(), info.fan.n_rays()),
                )),
            });
            continue;
        }
        let mut coeffs = vec![0; c.len()];
        for (i, a) in c.into_iter().enumerate() {
            coeffs[info.perm[i]] = a;
        }
        model.divisors.insert(s.name.clone(), NamedDivisor { fan: fname, divisor: TorusDivisor::new(coeffs) });
    }

    for s in sections.iter().filter(|s| s.kind == Kind::Class) {
        let Some(fname) = fan_of(&mut ld, s) else {
            continue;
        };
        let info = &fans[&fname];
        let Some(e) = single(&mut ld, s, "coords") else {
            continue;
        };
        let Some(c) = ld.ints(e) else { continue };
        let want = info.fan.n_rays() - info.fan.rank();
        if c.len() != want {
            ld.errors.push(Error::Located {
                line: e.line,
                source: Box::new(validation(&s.name, format!("{} class coordinates, expected {want}", c.len()))),
            });
            continue;
        }
        model.classes.insert(s.name.clone(), NamedClass { fan: fname, coords: c });
    }

    for s in sections.iter().filter(|s| s.kind == Kind::Bundle) {
        let Some(fname) = fan_of(&mut ld, s) else {
            continue;
        };
        if let Some(b) = load_bundle(&mut ld, s, &fans[&fname], &model.divisors, &fname) {
            model.bundles.insert(s.name.clone(), NamedBundle { fan: fname, bundle: b });
        }
    }

    for s in sections.iter().filter(|s| s.kind == Kind::Morphism) {
        let mut ends = [None, None];
        let mut rows = Vec::new();
        for e in &s.entries {
            match (e.key.1, e.args.as_slice()) {
                ("source" | "target", [(col, n)]) => {
                    let slot = (e.key.1 == "target") as usize;
                    if fans.contains_key(*n) {
                        ends[slot] = Some(n.to_string());
                    } else {
                        ld.errors.push(parse_err(e.line, *col, format!("unknown fan `{n}`")));
                    }
                }
                ("row", _) => rows.push(ld.ints(e)),
                _ => ld.errors.push(parse_err(e.line, e.key.0, format!("unexpected `{}` in morphism", e.key.1))),
            }
        }
        let (Some(src), Some(tgt)) = (ends[0].clone(), ends[1].clone()) else {
            ld.errors.push(validation(&s.name, "morphism needs `source` and `target`"));
            continue;
        };
        let Some(matrix) = rows.into_iter().collect::<Option<Vec<_>>>() else {
            continue;
        };
        match FanMorphism::build(fans[&src].fan.clone(), fans[&tgt].fan.clone(), matrix) {
            Ok(m) => {
                model.morphisms.insert(s.name.clone(), NamedMorphism { source: src, target: tgt, morphism: m });
            }
            Err(e) => {
                ld.errors.push(Error::Located { line: s.line, source: Box::new(validation(&s.name, e.to_string())) })
            }
        }
    }

    for s in sections.iter().filter(|s| s.kind == Kind::Assert) {
        for e in &s.entries {
            if let Some(a) = parse_assertion(&mut ld, e, &model) {
                model.assertions.push(a);
            }
        }
    }

    for s in sections.iter().filter(|s| s.kind == Kind::Config) {
        for e in &s.entries {
            let rest: Vec<(usize, &str)> = e.args.iter().copied().filter(|t| t.1 != "=").collect();
            let [val] = rest.as_slice() else {
                ld.errors.push(parse_err(e.line, e.key.0, "expected `key = value`"));
                continue;
            };
            if e.key.1 == "seed" {
                match val.1.parse::<u64>() {
                    Ok(seed) => model.config.seed = seed,
                    Err(_) => ld.errors.push(parse_err(
                        e.line,
                        val.0,
                        format!("seed must be an unsigned 64-bit integer, found `{}`", val.1),
                    )),
                }
                continue;
            }
            let Some(v) = ld.int(e.line, *val) else {
                continue;
            };
            let c = &mut model.config;
            let nonneg = |ld: &mut Loader| {
                if v < 0 {
                    ld.errors.push(parse_err(e.line, val.0, "value must be non-negative"));
                }
                v.max(0)
            };
            match e.key.1 {
                "grid" => c.grid = nonneg(&mut ld) as usize,
                "kmax" => c.k_max = nonneg(&mut ld) as u32,
                "amax" => c.a_max = v,
                "mmax" => c.m_max = v,
                "box" => {
                    let b = nonneg(&mut ld);
                    c.box_lo = -b;
                    c.box_hi = b;
                }
                "box_lo" => c.box_lo = v,
                "box_hi" => c.box_hi = v,
                "mthick" => c.m_thick = nonneg(&mut ld) as u32,
                other => ld.errors.push(parse_err(e.line, e.key.0, format!("unknown config key `{other}`"))),
            }
        }
    }

    if ld.errors.is_empty() {
        Ok(model)
    } else {
        Err(ModelErrors(ld.errors))
    }
}

fn single<'s, 'a>(ld: &mut Loader, s: &'s Section<'a>, key: &str) -> Option<&'s Entry<'a>> {
    for e in s.entries.iter().filter(|e| e.key.1 != key && e.key.1 != "fan") {
        ld.errors.push(parse_err(e.line, e.key.0, format!("unexpected `{}`", e.key.1)));
    }
    let found: Vec<&Entry> = s.entries.iter().filter(|e| e.key.1 == key).collect();
    match found.as_slice() {
        [e] => Some(e),
        _ => {
            ld.errors.push(validation(&s.name, format!("expected exactly one `{key}` line")));
            None
        }
    }
}

fn load_fan(ld: &mut Loader, s: &Section) -> Option<FanInfo> {
    let mut rays = Vec::new();
    let mut ray_lines = Vec::new();
    let mut cones = Vec::new();
    let mut cone_lines = Vec::new();
    let before = ld.errors.len();
    for e in &s.entries {
        match e.key.1 {
            "ray" => {
                if let Some(v) = ld.ints(e) {
                    rays.push(v);
                    ray_lines.push(e.line);
                }
            }
            "cone" => {
                if let Some(v) = ld.ints(e) {
                    if let Some(pos) = v.iter().position(|&x| x < 0) {
                        ld.errors.push(parse_err(e.line, e.args[pos].0, "negative ray index"));
                        continue;
                    }
                    cones.push(v.into_iter().map(|x| x as usize).collect::<Vec<_>>());
                    cone_lines.push(e.line);
                }
            }
            other => ld.errors.push(parse_err(e.line, e.key.0, format!("unexpected `{other}` in fan"))),
        }
    }
    if ld.errors.len() > before {
        return None;
    }
    let rank = rays.first().map_or(0, Vec::len);
    if let Some(i) = rays.iter().position(|r| r.len() != rank) {
        ld.errors.push(Error::Located {
            line: ray_lines[i],
            source: Box::new(validation(
                &s.name,
                format!("ray {i} has length {} but the first ray has {rank}", rays[i].len()),
            )),
        });
        return None;
    }
    match Fan::build_with_permutation(rank, rays, cones) {
        Ok((fan, perm)) => Some(FanInfo { fan, perm }),
        Err(e) => {
            let line = match &e {
                Error::NonPrimitiveRay { index } | Error::DuplicateRay { index } => ray_lines[*index],
                Error::NotSimplicial { cone } | Error::FaceConditionViolated { first: cone, .. } => cone_lines
                    .iter()
                    .zip(&s.entries.iter().filter(|e| e.key.1 == "cone").collect::<Vec<_>>())
                    .find(|(_, en)| {
                        let idx: Vec<usize> = en.args.iter().filter_map(|t| t.1.parse().ok()).collect();
                        let mut a = idx.clone();
                        a.sort();
                        let mut b = cone.clone();
                        b.sort();
                        a == b
                    })
                    .map_or(s.line, |(l, _)| *l),
                _ => s.line,
            };
            ld.errors.push(Error::Located { line, source: Box::new(e) });
            None
        }
    }
}

fn parse_vectors(ld: &mut Loader, e: &Entry, from: usize, rank: usize) -> Option<Subspace> {
    let toks = &e.args[from..];
    if let [(_, "-")] = toks {
        return Some(Subspace::zero(rank));
    }
    let mut rows: Vec<Vec<Q>> = vec![Vec::new()];
    for &(col, t) in toks {
        if t == ";" {
            rows.push(Vec::new());
            continue;
        }
        match parse_q(t) {
            Some(x) => rows.last_mut().expect("nonempty").push(x),
            None => {
                ld.errors.push(parse_err(e.line, col, format!("expected a rational number, found `{t}`")));
                return None;
            }
        }
    }
    if rows.iter().any(|r| r.len() != rank) {
        ld.errors.push(parse_err(e.line, e.key.0, format!("every vector needs {rank} entries")));
        return None;
    }
    Some(Subspace::from_rows(rank, rows))
}

fn load_bundle(
    ld: &mut Loader,
    s: &Section,
    info: &FanInfo,
    divisors: &BTreeMap<String, NamedDivisor>,
    fname: &str,
) -> Option<KlyachkoBundle> {
    let fan = &info.fan;
    let located = |e: Error| Error::Located { line: s.line, source: Box::new(validation(&s.name, e.to_string())) };
    let body: Vec<&Entry> = s.entries.iter().filter(|e| e.key.1 != "fan").collect();
    let rank_line = body.iter().find(|e| e.key.1 == "rank");
    let rank = match rank_line {
        Some(e) => match e.args.as_slice() {
            [t] => Some(ld.index(e.line, *t, usize::MAX)?),
            _ => {
                ld.errors.push(parse_err(e.line, e.key.0, "`rank` takes one integer"));
                return None;
            }
        },
        None => None,
    };
    let kinds: Vec<&str> = body.iter().map(|e| e.key.1).filter(|k| *k != "rank" && *k != "step").collect();
    let steps: Vec<&&Entry> = body.iter().filter(|e| e.key.1 == "step").collect();
    if kinds.len() > 1 || (!kinds.is_empty() && !steps.is_empty()) {
        ld.errors.push(validation(&s.name, "give exactly one of `tangent`, `trivial`, `sum` or `step` data"));
        return None;
    }
    let result = match kinds.first() {
        Some(&"tangent") => KlyachkoBundle::tangent(fan),
        Some(&"trivial") => Ok(KlyachkoBundle::trivial(fan, rank.unwrap_or(1).max(1))),
        Some(&"sum") => {
            let e = body.iter().find(|e| e.key.1 == "sum").expect("present");
            let mut ds = Vec::new();
            for &(col, n) in &e.args {
                match divisors.get(n) {
                    Some(d) if d.fan == fname => ds.push(d.divisor.clone()),
                    Some(_) => {
                        ld.errors.push(parse_err(e.line, col, format!("divisor `{n}` lives on another fan")));
                        return None;
                    }
                    None => {
                        ld.errors.push(parse_err(e.line, col, format!("unknown divisor `{n}`")));
                        return None;
                    }
                }
            }
            KlyachkoBundle::split(fan, &ds)
        }
        Some(other) => {
            let e = body.iter().find(|e| e.key.1 == *other).expect("present");
            ld.errors.push(parse_err(e.line, e.key.0, format!("unexpected `{other}` in bundle")));
            return None;
        }
        None => {
            let Some(rank) = rank.filter(|&r| r > 0) else {
                ld.errors.push(validation(&s.name, "raw bundle data needs a positive `rank`"));
                return None;
            };
            let mut raw: Vec<Vec<(i64, Subspace)>> = vec![Vec::new(); fan.n_rays()];
            for e in steps {
                if e.args.len() < 3 {
                    ld.errors.push(parse_err(e.line, e.key.0, "expected `step RAY J vectors`"));
                    return None;
                }
                let ray = ld.index(e.line, e.args[0], fan.n_rays())?;
                let j = ld.int(e.line, e.args[1])?;
                let w = parse_vectors(ld, e, 2, rank)?;
                raw[info.perm[ray]].push((j, w));
            }
            KlyachkoBundle::from_raw(fan, rank, raw)
        }
    };
    if let (Ok(b), Some(r)) = (&result, rank) {
        if b.rank() != r {
            ld.errors.push(located(Error::InvalidInput(format!("declared rank {r} but data has rank {}", b.rank()))));
            return None;
        }
    }
    match result {
        Ok(b) => Some(b),
        Err(e) => {
            ld.errors.push(located(e));
            None
        }
    }
}

fn parse_assertion(ld: &mut Loader, e: &Entry, model: &Model) -> Option<ModelAssertion> {
    let (head, justification) = match e.raw.split_once(':') {
        Some((h, j)) if !j.trim().is_empty() => (h, j.trim().to_string()),
        _ => {
            ld.errors.push(parse_err(e.line, e.key.0, "assertion needs `: justification`"));
            return None;
        }
    };
    let Some((lhs, value)) = head.split_once('=') else {
        ld.errors.push(parse_err(e.line, e.key.0, "expected `fact [subject] = value : justification`"));
        return None;
    };
    let value = value.trim().to_string();
    let lhs: Vec<&str> = lhs.split_whitespace().collect();
    let (fact, subject) = match lhs.as_slice() {
        [f] => (f.to_string(), None),
        [f, s] => (f.to_string(), Some(s.to_string())),
        _ => {
            ld.errors.push(parse_err(e.line, e.key.0, "expected `fact [subject] = value : justification`"));
            return None;
        }
    };
    let invalid = |reason: String| Error::Located { line: e.line, source: Box::new(validation(&fact, reason)) };
    if !ASSERTABLE.contains(&fact.as_str()) {
        ld.errors.push(invalid(format!("`{fact}` is not an assertable fact (allowed: {})", ASSERTABLE.join(", "))));
        return None;
    }
    if value.is_empty() {
        ld.errors.push(invalid("empty value".into()));
        return None;
    }
    if let Some(subj) = &subject {
        let known = model.divisors.contains_key(subj)
            || model.classes.contains_key(subj)
            || model.morphisms.contains_key(subj)
            || model.fans.contains_key(subj)
            || model.bundles.contains_key(subj);
        if !known {
            ld.errors.push(invalid(format!("unknown subject `{subj}`")));
            return None;
        }
    }
    if fact == "cd" {
        if value.parse::<usize>().is_err() {
            ld.errors.push(invalid(format!("cd value `{value}` is not a non-negative integer")));
            return None;
        }
        if let Some(d) = subject.as_ref().and_then(|s| model.divisors.get(s)) {
            if d.divisor.coeffs.iter().all(|&a| a > 0) {
                ld.errors.push(invalid("cd is computed when the support is the whole boundary".into()));
                return None;
            }
        }
    }
    Some(ModelAssertion { fact, subject, value, justification })
}

/// Model for a catalog entry: the fan, `Delta`, `D0, D1, ...`, and the bundles `O`, `O2`,
/// `SplitD0 = O(D0) + O(-D0)`, the tangent bundle `TX` and its dual `OmegaX`.
pub fn catalog_model(name: &str) -> crate::Result<Model> {
    let fan = fan_by_name(name)?;
    let fname = name.split_whitespace().collect::<String>();
    let mut model = Model::default();
    model.divisors.insert("Delta".into(), NamedDivisor { fan: fname.clone(), divisor: boundary_divisor(&fan) });
    for r in 0..fan.n_rays() {
        model.divisors.insert(
            format!("D{r}"),
            NamedDivisor { fan: fname.clone(), divisor: TorusDivisor::prime(fan.n_rays(), r) },
        );
    }
    let tangent = KlyachkoBundle::tangent(&fan)?;
    let d0 = TorusDivisor::prime(fan.n_rays(), 0);
    let bundles = [
        ("O", KlyachkoBundle::trivial(&fan, 1)),
        ("O2", KlyachkoBundle::trivial(&fan, 2)),
        ("SplitD0", KlyachkoBundle::split(&fan, &[d0.clone(), d0.scale(-1)])?),
        ("OmegaX", tangent.dual()),
        ("TX", tangent),
    ];
    for (name, b) in bundles {
        model.bundles.insert(name.into(), NamedBundle { fan: fname.clone(), bundle: b });
    }
    model.fans.insert(fname, fan);
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::class_coordinates;

    const P2: &str = "\
# plane
[fan P2]
ray -1 -1
ray 1 0
ray 0 1
cone 0 1
cone 1 2
cone 2 0

[divisor partialD]
coeffs 1 1 1

[divisor L]
coeffs 0 0 1

[bundle TP2]
tangent

[bundle V]
rank 2
step 0 1 1 1
step 0 2 -
step 1 1 1 0
step 1 2 -
step 2 1 0 1
step 2 2 -

[assert]
cd L = 0 : complement of a line is affine space

[config]
seed = 7
grid = 4
";

    #[test]
    fn load_and_remap() {
        let m = parse_model(P2).unwrap();
        let fan = m.fan("P2").unwrap();
        assert_eq!(fan.rays()[0], vec![-1, -1]);
        // `L` is the divisor of the ray (0,1), which is canonical index 1
        assert_eq!(m.divisors["L"].divisor.coeffs, vec![0, 1, 0]);
        assert_eq!(class_coordinates(fan, &m.divisors["partialD"].divisor).unwrap(), vec![3]);
        // raw data in file order describes the tangent bundle with ray lines rescaled
        assert_eq!(m.bundles["V"].bundle, m.bundles["TP2"].bundle);
        assert_eq!(m.config.seed, 7);
        assert_eq!(m.assertions_for(Some("L"))[0].fact, "cd");
    }

    #[test]
    fn round_trip() {
        let m = parse_model(P2).unwrap();
        let text = m.to_text();
        let back = parse_model(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);
        let p3 = catalog_model("Pn(3)").unwrap();
        assert_eq!(parse_model(&p3.to_text()).unwrap(), p3);
        let pb = catalog_model("ProjBundle(P2,(0,-1,-2))").unwrap();
        assert_eq!(parse_model(&pb.to_text()).unwrap(), pb);
    }

    #[test]
    fn located_errors() {
        let dup = P2.replace("[divisor L]", "[divisor partialD]");
        let errs = parse_model(&dup).unwrap_err().0;
        assert!(errs.iter().any(|e| matches!(e, Error::Validation { name, .. } if name == "partialD")));

        let bad_ray = P2.replace("ray 1 0", "ray 2 0");
        let errs = parse_model(&bad_ray).unwrap_err().0;
        assert!(
            matches!(&errs[0], Error::Located { line: 4, source } if matches!(**source, Error::NonPrimitiveRay { index: 1 })),
            "{errs:?}"
        );

        let bad_int = P2.replace("ray 0 1", "ray 0 x1");
        assert_eq!(
            parse_model(&bad_int).unwrap_err().0[0],
            Error::Parse { line: 5, col: 7, msg: "expected an integer, found `x1`".into() }
        );

        let huge = P2.replace("seed = 7", "seed = 99999999999999999999999");
        assert!(matches!(parse_model(&huge).unwrap_err().0[0], Error::Parse { line: 32, col: 8, .. }));

        let computable = P2.replace("cd L", "cd partialD");
        assert!(parse_model(&computable).is_err());
        let unknown_fact = P2.replace("cd L = 0", "ample L = yes");
        assert!(parse_model(&unknown_fact).is_err());
    }

    #[test]
    fn incompatible_raw_bundle_is_rejected() {
        let text = "\
[fan P3]
ray 1 0 0
ray 0 1 0
ray 0 0 1
ray -1 -1 -1
cone 0 1 2
cone 0 1 3
cone 0 2 3
cone 1 2 3
[bundle W]
rank 2
step 0 1 1 0
step 0 2 -
step 1 1 0 1
step 1 2 -
step 2 1 1 1
step 2 2 -
step 3 1 1 2
step 3 2 -
";
        let errs = parse_model(text).unwrap_err().0;
        assert!(matches!(&errs[0], Error::Located { line: 10, .. }), "{errs:?}");
    }
}

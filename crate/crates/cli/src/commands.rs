use serde_json::{json, Value};
use torsplit_core::bundle::KlyachkoBundle;
use torsplit_core::catalog::CATALOG_NAMES;
use torsplit_core::cohomology::line_bundle_cohomology;
use torsplit_core::criteria::{apply_rule, check_split_toric, reduction_plan_products, RuleContext, RULES};
use torsplit_core::divisor::{base_locus, class_coordinates, iitaka_dimension, positivity_flags, stable_base_locus};
use torsplit_core::model::NamedDivisor;
use torsplit_core::positivity::{classes_in_box, q_ample_certificate, q_ample_falsifier, verify_semiample_vanishing};
use torsplit_core::report::{Outcome, Report};
use torsplit_core::splitting::{boundary_report, splitting_test, triviality_test};
use torsplit_core::{
    catalog_model, CdAssertion, CertificateTree, CohomologyTable, Error, Fan, Model, Result, ScanParams, SplitVerdict,
    Status,
};

use crate::Cmd;

pub struct Ctx<'a> {
    pub model: Option<&'a Model>,
    pub fan: Option<&'a str>,
    pub params: &'a ScanParams,
}

impl<'a> Ctx<'a> {
    fn model(&self) -> Result<&'a Model> {
        self.model.ok_or_else(|| Error::InvalidInput("this command needs --model or --catalog".into()))
    }

    fn fan(&self) -> Result<&'a Fan> {
        Ok(self.model()?.default_fan(self.fan)?.1)
    }

    fn divisor(&self, name: &str) -> Result<(&'a Fan, NamedDivisor)> {
        let m = self.model()?;
        let d = m.divisor(name)?;
        Ok((m.fan(&d.fan)?, d))
    }

    fn bundle(&self, name: &str) -> Result<&'a KlyachkoBundle> {
        Ok(&self.model()?.bundle(name)?.bundle)
    }

    fn cd_for(&self, subject: &str) -> Option<CdAssertion> {
        let m = self.model?;
        m.assertions_for(Some(subject))
            .into_iter()
            .find(|a| a.fact == "cd")
            .and_then(|a| a.value.parse().ok().map(|value| CdAssertion { value, justification: a.justification }))
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable result")
}

fn dims_line(t: &CohomologyTable) -> String {
    t.dims.iter().enumerate().map(|(i, h)| format!("h^{i} = {h}")).collect::<Vec<_>>().join("  ")
}

fn verdict_lines(v: &SplitVerdict) -> (Vec<String>, bool) {
    match v {
        SplitVerdict::Split { summands, witness } => {
            let mut lines = vec!["verdict  split".to_string()];
            for (coords, rep, mult) in &summands.summands {
                lines.push(format!("  O({:?}) class {coords:?} multiplicity {mult}", rep.coeffs));
            }
            lines.push(format!(
                "  witness in {:?} space, char poly degree {}",
                witness.space,
                witness.char_poly.len() - 1
            ));
            (lines, true)
        }
        SplitVerdict::NonSplit(c) => (
            vec![
                "verdict  non-split".into(),
                format!(
                    "  discriminant vanishes on the grid {{0..{}}}^{} of the {:?} space (degree bound {}, {} points)",
                    c.grid_size - 1,
                    c.dimension,
                    c.space,
                    c.degree_bound,
                    c.points_checked
                ),
            ],
            true,
        ),
        SplitVerdict::Inconclusive { reason } => (vec!["verdict  inconclusive".into(), format!("  {reason}")], false),
    }
}

fn tree_lines(t: &CertificateTree, depth: usize, out: &mut Vec<String>) {
    let pad = "  ".repeat(depth);
    let status = serde_json::to_value(t.status).expect("status");
    out.push(format!("{pad}[{}] {}: {}", status.as_str().unwrap_or(""), t.rule, t.conclusion));
    for c in &t.children {
        tree_lines(c, depth + 1, out);
    }
    if !t.cross_checks.is_empty() {
        out.push(format!("{pad}  cross-checks (not used in the status):"));
        for c in &t.cross_checks {
            tree_lines(c, depth + 2, out);
        }
    }
}

pub fn run(cmd: &Cmd, ctx: &Ctx, r: &mut Report) -> Result<()> {
    let p = ctx.params;
    match cmd {
        Cmd::Cohomology { divisor, bundle, characters } => {
            let (table, what) = match (divisor, bundle) {
                (Some(d), None) => {
                    let (fan, nd) = ctx.divisor(d)?;
                    (line_bundle_cohomology(fan, &nd.divisor)?, format!("O({d})"))
                }
                (None, Some(b)) => (ctx.bundle(b)?.cohomology()?, b.clone()),
                _ => return Err(Error::InvalidInput("give exactly one of --divisor and --bundle".into())),
            };
            r.table.push(format!("{what}: {}", dims_line(&table)));
            if *characters {
                for (m, h) in &table.by_character {
                    r.table.push(format!("  {m:?}: {h:?}"));
                }
            }
            r.results = if *characters { to_json(&table) } else { json!({ "dims": table.dims }) };
        }
        Cmd::BaseLocus { divisor, stable } => {
            let (fan, nd) = ctx.divisor(divisor)?;
            let bl =
                if *stable { stable_base_locus(fan, &nd.divisor, p.k_max)? } else { base_locus(fan, &nd.divisor)? };
            if bl.is_empty() {
                r.table.push("empty".into());
            } else if bl.whole_variety {
                r.table.push("whole variety".into());
            } else {
                r.table.push(format!("codimension {}", bl.codimension));
                for c in &bl.cones {
                    r.table.push(format!("  V({:?})", c.rays()));
                }
            }
            if *stable {
                r.table.push(format!("stabilized by k = {}: {}", p.k_max, bl.stabilized));
                if !bl.stabilized {
                    r.outcome = Outcome::Inconclusive;
                }
            }
            r.results = to_json(&bl);
        }
        Cmd::Positivity { divisor, q } => {
            let (fan, nd) = ctx.divisor(divisor)?;
            let d = &nd.divisor;
            let flags = positivity_flags(fan, d)?;
            let class = class_coordinates(fan, d)?;
            let kappa = iitaka_dimension(fan, d, p.k_max)?;
            r.table.push(format!("class {class:?}"));
            r.table.push(format!("nef {}  ample {}  semi-ample {}", flags.nef, flags.ample, flags.semi_ample));
            r.table.push(format!("Iitaka dimension {kappa:?} (k <= {})", p.k_max));
            let mut res = json!({ "class": class, "flags": to_json(&flags), "iitaka": to_json(&kappa) });
            if let Some(q) = q {
                let classes = classes_in_box(fan, p.box_lo, p.box_hi)?;
                let fals = q_ample_falsifier(fan, d, *q, p.m_max, &classes)?;
                r.table.push(format!(
                    "falsifier q = {q}: {} classes in [{}, {}], {} violations at twist {}",
                    fals.classes_checked,
                    p.box_lo,
                    p.box_hi,
                    fals.violations.len(),
                    p.m_max
                ));
                for v in fals.violations.iter().take(10) {
                    r.table.push(format!("  h^{}({:?} + {}L) = {}", v.degree, v.class, v.twist, v.value));
                }
                res["falsifier"] = to_json(&fals);
                if flags.nef {
                    let van = verify_semiample_vanishing(fan, d, *q, p.a_max)?;
                    r.table.push(format!(
                        "negative-twist vanishing in degrees {:?} for a in [1, {}]: {}",
                        van.degrees,
                        p.a_max,
                        if van.consistent() { "holds" } else { "fails" }
                    ));
                    res["vanishing"] = to_json(&van);
                }
            }
            r.results = res;
        }
        Cmd::QAmpleCert { divisor } => {
            let (fan, nd) = ctx.divisor(divisor)?;
            match q_ample_certificate(fan, &nd.divisor, ctx.cd_for(divisor).as_ref(), p.k_max) {
                Ok(cert) => {
                    r.table.push(format!("O({divisor}) is {}-ample", cert.q));
                    r.table.push(format!("  cd(X - supp D) <= {} ({:?})", cert.cd.value, cert.cd.provenance));
                    r.table.push(format!(
                        "  stable base locus codimension {} (k <= {})",
                        cert.sbloc.codim, cert.sbloc.k_max
                    ));
                    r.table.push(format!("  c = {}, n = {}", cert.c, cert.dim));
                    r.table.push(format!("  recheck: {}", cert.recheck()));
                    r.results = to_json(&cert);
                }
                Err(e) => {
                    r.table.push(format!("no certificate: {e}"));
                    r.outcome = Outcome::Inconclusive;
                    r.results = json!({ "error": e.to_string() });
                }
            }
        }
        Cmd::SplitTest { bundle } => {
            let v = splitting_test(ctx.bundle(bundle)?, p.grid, p.seed);
            let (lines, decided) = verdict_lines(&v);
            r.table.extend(lines);
            if !decided {
                r.outcome = Outcome::Inconclusive;
            }
            r.results = to_json(&v);
        }
        Cmd::TrivialTest { bundle } => {
            let t = triviality_test(ctx.bundle(bundle)?, p.grid, p.seed)?;
            r.table.push(match t.trivial {
                Some(b) => format!("trivial {b}"),
                None => "trivial undecided".into(),
            });
            r.table.push(format!("h^0 = {}, equals rank: {}", t.h0, t.h0_equals_rank));
            if t.trivial.is_none() {
                r.outcome = Outcome::Inconclusive;
            }
            r.results = to_json(&t);
        }
        Cmd::BoundaryReport { bundle } => {
            let rep = boundary_report(ctx.bundle(bundle)?, p.grid, p.seed)?;
            for (ray, t) in &rep.per_ray {
                r.table.push(format!("D_{ray}: trivial {}", t.map_or("undecided".to_string(), |b| b.to_string())));
            }
            for pc in &rep.pairs {
                r.table.push(format!(
                    "D_{} ∩ D_{}: both trivial {}, compatible {}",
                    pc.rays.0, pc.rays.1, pc.both_trivial, pc.compatible
                ));
            }
            r.table.push(format!("boundary trivial {}", rep.boundary_trivial));
            if rep.per_ray.iter().any(|(_, t)| t.is_none()) {
                r.outcome = Outcome::Inconclusive;
            }
            r.results = to_json(&rep);
        }
        Cmd::CheckSplitToric { bundle } => {
            let v = ctx.bundle(bundle)?;
            let rep = check_split_toric(v.fan(), v, p.m_thick, p.grid, p.seed)?;
            let show = |x: Option<bool>| x.map_or("undecided".to_string(), |b| b.to_string());
            r.table.push(format!(
                "dimension {}, codim Bs(anticanonical) {}, hypotheses hold {}",
                rep.dim, rep.anticanonical_base_locus_codim, rep.hypotheses_hold
            ));
            r.table.push(format!(
                "thickening order {}, End sections restrict onto: {}",
                rep.thickening, rep.restriction_surjective
            ));
            r.table.push(format!(
                "split:   on X {}  on boundary {}  agree {}",
                show(rep.split.on_x),
                show(rep.split.on_boundary),
                show(rep.split.agree)
            ));
            r.table.push(format!(
                "trivial: on X {}  on boundary {}  agree {}",
                show(rep.trivial.on_x),
                show(rep.trivial.on_boundary),
                show(rep.trivial.agree)
            ));
            if rep.split.agree.is_none() || rep.trivial.agree.is_none() {
                r.outcome = Outcome::Inconclusive;
            }
            r.results = to_json(&rep);
        }
        Cmd::ApplyRule { rule: None, .. } => {
            for info in RULES {
                let scope = if info.in_scope { "" } else { " (out of computational scope)" };
                r.table.push(format!("{}{scope}", info.id));
                r.table.push(format!("  {}", info.statement));
            }
            r.results = to_json(&RULES);
        }
        Cmd::ApplyRule { rule: Some(rule), divisor, line, bundle, morphism, target_divisor, q, s, c, d } => {
            let model = ctx.model()?;
            let mut rc = RuleContext { q: *q, s: *s, c: *c, d: *d, params: p.clone(), ..Default::default() };
            let mut subject = None;
            if let Some(name) = divisor {
                let (fan, nd) = ctx.divisor(name)?;
                rc.fan = Some(fan.clone());
                rc.divisor = Some(nd.divisor);
                subject = Some(name.as_str());
            }
            if let Some(name) = line {
                rc.line = Some(ctx.divisor(name)?.1.divisor);
            }
            if let Some(name) = bundle {
                let v = ctx.bundle(name)?;
                rc.fan.get_or_insert_with(|| v.fan().clone());
                rc.bundle = Some(v.clone());
            }
            if let Some(name) = morphism {
                rc.morphism = Some(model.morphism(name)?.morphism.clone());
            }
            if let Some(name) = target_divisor {
                rc.target_divisor = Some(ctx.divisor(name)?.1.divisor);
            }
            if rc.fan.is_none() && rc.morphism.is_none() {
                rc.fan = Some(ctx.fan()?.clone());
            }
            rc.assertions = model.assertions_for(subject);
            let tree = apply_rule(rule, &rc)?;
            tree_lines(&tree, 0, &mut r.table);
            if !matches!(tree.status, Status::Certified | Status::RefutedHypothesis) {
                r.outcome = Outcome::Inconclusive;
            }
            r.results = to_json(&tree);
        }
        Cmd::ReduceProducts { dims } => {
            let plan = reduction_plan_products(dims)?;
            for (factor, rays) in &plan.restrictions {
                r.table
                    .push(format!("factor {factor} (P^{}): restrict along rays {rays:?}", plan.factor_dims[*factor]));
            }
            r.table.push(format!("target: product of {} planes", plan.target_dims.len()));
            r.table.push(format!("restriction tests: {} instead of {}", plan.reduced_tests, plan.full_tests));
            r.results = to_json(&plan);
        }
        Cmd::Catalog { name: None } => {
            r.table.extend(CATALOG_NAMES.iter().map(|s| s.to_string()));
            r.results = to_json(&CATALOG_NAMES);
        }
        Cmd::Catalog { name: Some(name) } => {
            let m = catalog_model(name)?;
            r.table.extend(m.to_text().lines().map(str::to_string));
            r.results = json!({ "model": m.to_text() });
        }
        Cmd::Selftest => {
            let results = crate::selftest::run(p);
            let mut all = true;
            for (name, ok, detail) in &results {
                all &= *ok;
                r.table.push(format!("{} {name}: {detail}", if *ok { "pass" } else { "FAIL" }));
            }
            r.table.push(format!("{} of {} checks passed", results.iter().filter(|x| x.1).count(), results.len()));
            if !all {
                r.outcome = Outcome::Inconclusive;
            }
            r.results =
                Value::Array(results.iter().map(|(n, ok, d)| json!({ "check": n, "pass": ok, "detail": d })).collect());
        }
    }
    Ok(())
}

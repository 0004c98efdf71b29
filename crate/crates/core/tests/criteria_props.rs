mod common;

use common::*;
use proptest::prelude::*;
use torsplit_core::divisor::boundary_divisor;
use torsplit_core::splitting::splitting_test;
use torsplit_core::splitting::triviality_test;
use torsplit_core::{
    apply_rule, catalog_model, CertificateTree, KlyachkoBundle, RuleContext, ScanParams, Status, TorusDivisor,
};

const SPLIT_RULES: &[&str] = &["split-via-divisor", "split-via-1-split-divisor", "toric-split-thickening"];
const TRIVIAL_RULES: &[&str] = &[
    "trivial-from-vanishing",
    "trivial-semiample",
    "trivial-fsplit-divisor",
    "trivial-anticanonical",
    "toric-trivial-boundary",
];

fn contexts(bundle: &KlyachkoBundle, params: &ScanParams) -> Vec<RuleContext> {
    let f = bundle.fan().clone();
    let n = f.n_rays();
    [boundary_divisor(&f), TorusDivisor::prime(n, 0)]
        .into_iter()
        .map(|d| RuleContext {
            fan: Some(f.clone()),
            line: Some(d.clone()),
            divisor: Some(d),
            bundle: Some(bundle.clone()),
            q: Some(0),
            s: Some(1),
            c: Some(1),
            d: Some(1),
            params: params.clone(),
            ..RuleContext::default()
        })
        .collect()
}

fn small_params() -> ScanParams {
    ScanParams { k_max: 4, a_max: 4, m_max: 6, box_lo: -2, box_hi: 2, ..ScanParams::default() }
}

fn trees(bundle: &KlyachkoBundle, params: &ScanParams) -> Vec<(&'static str, CertificateTree)> {
    let mut out = Vec::new();
    for ctx in contexts(bundle, params) {
        for id in SPLIT_RULES.iter().chain(TRIVIAL_RULES) {
            if let Ok(t) = apply_rule(id, &ctx) {
                out.push((*id, t));
            }
        }
    }
    out
}

#[test]
fn no_false_certificates_over_the_catalog() {
    let params = small_params();
    for name in ["P2", "P3", "P1xP1", "F1"] {
        let model = catalog_model(name).unwrap();
        for (bname, b) in &model.bundles {
            let v = &b.bundle;
            let split = splitting_test(v, 4, 0).is_split();
            let trivial = triviality_test(v, 4, 0).unwrap().trivial == Some(true);
            for (id, t) in trees(v, &params) {
                if t.status != Status::Certified {
                    continue;
                }
                let truth = if SPLIT_RULES.contains(&id) { split } else { trivial };
                let claim = match t.conclusion.as_str() {
                    "V splits" | "V is trivial" => true,
                    "V does not split" | "V is not trivial" => false,
                    other => panic!("{id}: unexpected conclusion {other}"),
                };
                assert_eq!(claim, truth, "{name} {bname}: {id} certified a false conclusion");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn trees_round_trip_and_recheck(
        f in prop::sample::select(&["P2", "P1xP1"][..]).prop_map(fan),
        cs in prop::collection::vec(prop::collection::vec(-1i64..=1, 4), 1..3),
    ) {
        let ds: Vec<TorusDivisor> = cs.iter().map(|c| TorusDivisor::new(c[..f.n_rays()].to_vec())).collect();
        let v = KlyachkoBundle::split(&f, &ds).unwrap();
        for (_, t) in trees(&v, &small_params()) {
            let json = serde_json::to_string(&t).unwrap();
            let back: CertificateTree = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(&back, &t);
            prop_assert!(back.recheck());
        }
    }

    #[test]
    fn larger_boxes_never_refute_a_certificate(
        f in prop::sample::select(&["P2", "P1xP1"][..]).prop_map(fan),
        cs in prop::collection::vec(prop::collection::vec(-1i64..=1, 4), 1..3),
        grow in 1i64..3,
    ) {
        let ds: Vec<TorusDivisor> = cs.iter().map(|c| TorusDivisor::new(c[..f.n_rays()].to_vec())).collect();
        let v = KlyachkoBundle::split(&f, &ds).unwrap();
        let small = trees(&v, &small_params());
        let wide = ScanParams { box_lo: -2 - grow, box_hi: 2 + grow, ..small_params() };
        let large = trees(&v, &wide);
        prop_assert_eq!(small.len(), large.len());
        for ((id, a), (_, b)) in small.iter().zip(&large) {
            if a.status == Status::Certified {
                prop_assert_ne!(b.status, Status::RefutedHypothesis, "{}", id);
            }
        }
    }
}

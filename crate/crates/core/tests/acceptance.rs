//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torsplit_core::bundle::KlyachkoBundle;
use torsplit_core::catalog::fan_by_name;
use torsplit_core::cohomology::{line_bundle_cohomology, line_bundle_dims, thickening_cohomology, CechOracle};
use torsplit_core::criteria::{reduction_plan_products, ScanParams};
use torsplit_core::divisor::{boundary_divisor, class_coordinates};
use torsplit_core::model::{catalog_model, parse_model};
use torsplit_core::positivity::{
    classes_in_box, pic_restriction_check, q_ample_certificate, q_ample_falsifier, s_split_scan, CdProvenance, Codim,
    SSplitScan,
};
use torsplit_core::report::Report;
use torsplit_core::splitting::{boundary_report, chern_class_summands, splitting_test, triviality_test};
use torsplit_core::{Fan, SplitVerdict, TorusDivisor};

type Outcome = Result<String, String>;

fn grid(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut c = vec![lo; n];
    loop {
        out.push(c.clone());
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            if c[k] < hi {
                c[k] += 1;
                break;
            }
            c[k] = lo;
            k += 1;
        }
    }
}

fn fan(name: &str) -> Fan {
    fan_by_name(name).expect("catalog fan")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const ORACLE_FANS: &[&str] = &["P1", "P2", "P3", "P1xP1", "P1xP1xP1", "F0", "F1", "F2", "BlowupP2"];

fn oracle_equivalence() -> Outcome {
    let mut total = 0;
    for name in ORACLE_FANS {
        let f = fan(name);
        let mut oracle = CechOracle::new(&f).map_err(|e| e.to_string())?;
        for c in grid(f.n_rays(), -3, 3) {
            let d = TorusDivisor::new(c);
            let fast = line_bundle_cohomology(&f, &d).map_err(|e| e.to_string())?;
            let slow = oracle.cohomology(&d, 3).map_err(|e| e.to_string())?;
            ensure(fast == slow, || format!("{name} {:?}: {:?} vs oracle {:?}", d.coeffs, fast.dims, slow.dims))?;
            total += 1;
        }
    }
    Ok(format!("{total} divisors on {} fans, per-character tables identical", ORACLE_FANS.len()))
}

fn serre_duality() -> Outcome {
    let mut total = 0;
    for name in ORACLE_FANS {
        let f = fan(name);
        let n = f.rank();
        let k = boundary_divisor(&f).scale(-1);
        for c in grid(f.n_rays(), -3, 3) {
            let d = TorusDivisor::new(c);
            let h = line_bundle_dims(&f, &d).map_err(|e| e.to_string())?;
            let dual = line_bundle_dims(&f, &k.sub(&d)).map_err(|e| e.to_string())?;
            ensure((0..=n).all(|i| h[i] == dual[n - i]), || format!("{name} {:?}: {h:?} vs {dual:?}", d.coeffs))?;
            total += 1;
        }
    }
    Ok(format!("h^i(D) = h^(n-i)(-Delta-D) on {total} divisors"))
}

fn thickening_identity() -> Outcome {
    for name in ["P3", "P1xP1xP1"] {
        let f = fan(name);
        let delta = boundary_divisor(&f);
        for m in 0..=5 {
            let h = thickening_cohomology(&f, &delta, m).map_err(|e| e.to_string())?;
            ensure(h.dims[0] == 1, || format!("{name} m = {m}: h^0 = {}", h.dims[0]))?;
        }
    }
    Ok("h^0(O on the m-th boundary thickening) = 1 for m = 0..5 on P3 and P1xP1xP1".into())
}

fn q_ample_consistency() -> Outcome {
    for name in ["P3", "P1xP1xP1"] {
        let f = fan(name);
        let delta = boundary_divisor(&f);
        let cert = q_ample_certificate(&f, &delta, None, 6).map_err(|e| e.to_string())?;
        ensure(cert.q == 0 && cert.cd.value == 0, || format!("{name}: q = {}, cd = {}", cert.q, cert.cd.value))?;
        ensure(cert.cd.provenance == CdProvenance::DerivedForFullBoundary, || format!("{name}: cd not derived"))?;
        ensure(cert.sbloc.codim == Codim::Infinite && cert.recheck(), || {
            format!("{name}: sbloc {}", cert.sbloc.codim)
        })?;
        let classes = classes_in_box(&f, -3, 3).map_err(|e| e.to_string())?;
        let rep = q_ample_falsifier(&f, &delta, 0, 12, &classes).map_err(|e| e.to_string())?;
        ensure(rep.violations.is_empty(), || format!("{name}: {} violations", rep.violations.len()))?;
    }
    Ok("q = 0 with derived cd = 0 on P3 and P1xP1xP1; falsifier q = 0, m_max = 12, box [-3,3]: no violations".into())
}

fn expected_classes(f: &Fan, ds: &[TorusDivisor]) -> Vec<Vec<i64>> {
    let mut v: Vec<Vec<i64>> = ds.iter().map(|d| class_coordinates(f, d).unwrap()).collect();
    v.sort();
    v
}

fn splitting_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20261016);
    let mut count = 0;
    for name in ["P2", "P3"] {
        let f = fan(name);
        for _ in 0..25 {
            let r = rng.gen_range(1..=4);
            let ds: Vec<TorusDivisor> =
                (0..r).map(|_| TorusDivisor::new((0..f.n_rays()).map(|_| rng.gen_range(-2..=2)).collect())).collect();
            let v = KlyachkoBundle::split(&f, &ds).map_err(|e| e.to_string())?;
            let verdict = splitting_test(&v, 4, count);
            let got = chern_class_summands(&verdict).map_err(|e| format!("{name} {ds:?}: {e} ({verdict:?})"))?;
            let mut classes: Vec<Vec<i64>> =
                got.summands.iter().flat_map(|(c, _, m)| std::iter::repeat_n(c.clone(), *m)).collect();
            classes.sort();
            let want = expected_classes(&f, &ds);
            ensure(classes == want, || format!("{name}: recovered {classes:?}, expected {want:?}"))?;
            count += 1;
        }
        let t = KlyachkoBundle::tangent(&f).map_err(|e| e.to_string())?;
        ensure(matches!(splitting_test(&t, 4, 0), SplitVerdict::NonSplit(_)), || {
            format!("T_{name} not certified non-split")
        })?;
    }
    Ok(format!("{count} random sums recovered exactly; T_P2 and T_P3 certified non-split"))
}

fn boundary_triviality() -> Outcome {
    let mut lines = Vec::new();
    let p3_file = include_str!("../../../models/p3.model");
    for name in ["P3", "P1xP1xP1"] {
        let mut model = catalog_model(name).map_err(|e| e.to_string())?;
        if name == "P3" {
            let extra = parse_model(p3_file).map_err(|e| e.to_string())?;
            model.bundles.extend(extra.bundles.into_iter().map(|(k, v)| (format!("file:{k}"), v)));
        }
        for (bname, b) in &model.bundles {
            let on_x = triviality_test(&b.bundle, 4, 0).map_err(|e| e.to_string())?.trivial;
            let rep = boundary_report(&b.bundle, 4, 0).map_err(|e| e.to_string())?;
            let decided = rep.per_ray.iter().all(|(_, t)| t.is_some());
            ensure(decided && on_x == Some(rep.boundary_trivial), || {
                format!("{name}/{bname}: on X {on_x:?}, boundary {} (decided {decided})", rep.boundary_trivial)
            })?;
            lines.push(format!("{name}/{bname}={}", rep.boundary_trivial));
        }
    }
    Ok(format!("boundary verdict equals triviality on X for {}", lines.join(", ")))
}

fn reduction_counts() -> Outcome {
    let a = reduction_plan_products(&[3, 4]).map_err(|e| e.to_string())?;
    let b = reduction_plan_products(&[2, 2, 2]).map_err(|e| e.to_string())?;
    ensure((a.reduced_tests, a.full_tests) == (9, 20), || format!("(3,4): {} vs {}", a.reduced_tests, a.full_tests))?;
    ensure((b.reduced_tests, b.full_tests) == (27, 27), || {
        format!("(2,2,2): {} vs {}", b.reduced_tests, b.full_tests)
    })?;
    Ok("(3,4): 9 vs 20; (2,2,2): 27 vs 27".into())
}

fn int_det(m: &[Vec<i64>]) -> i64 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| *x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * int_det(&minor)
        })
        .sum()
}

fn picard_restriction() -> Outcome {
    for name in ["P4", "P2xP2"] {
        let f = fan(name);
        for ray in 0..f.n_rays() {
            let r = pic_restriction_check(&f, ray).map_err(|e| e.to_string())?;
            let square = r.matrix.len() == r.source_rank && r.source_rank == r.target_rank;
            ensure(square && int_det(&r.matrix).abs() == 1 && r.iso, || format!("{name} ray {ray}: {:?}", r.matrix))?;
        }
    }
    let f = fan("P1xP1");
    for ray in 0..f.n_rays() {
        let r = pic_restriction_check(&f, ray).map_err(|e| e.to_string())?;
        ensure(!r.injective && r.kernel_rank == 1, || format!("P1xP1 ray {ray}: injective {}", r.injective))?;
    }
    Ok("P4 and P2xP2: unimodular square restriction matrices; P1xP1 fibers: kernel of rank 1".into())
}

/// `h^i` of `O(a, b)` on `P^1 x P^1` by the Künneth formula.
fn kunneth_p1p1(a: i64, b: i64, i: usize) -> u64 {
    let h0 = |k: i64| (k + 1).max(0) as u64;
    let h1 = |k: i64| (-k - 1).max(0) as u64;
    match i {
        0 => h0(a) * h0(b),
        1 => h0(a) * h1(b) + h1(a) * h0(b),
        2 => h1(a) * h1(b),
        _ => 0,
    }
}

fn s_split() -> Outcome {
    let f = fan("P3");
    match s_split_scan(&f, 2, -5, 5).map_err(|e| e.to_string())? {
        // the class of a divisor on P3 is its degree, so coefficients in [-5,5] give degrees -20..=20
        SSplitScan::VerifiedInBox { classes_checked, .. } => {
            ensure(classes_checked == 41, || format!("{classes_checked} classes"))?
        }
        other => return Err(format!("P3 s = 2: {other:?}")),
    }
    let g = fan("P1xP1");
    match s_split_scan(&g, 1, -5, 5).map_err(|e| e.to_string())? {
        SSplitScan::Counterexample { representative, degree, value, .. } => {
            // bidegree from the rays of each factor
            let deg = |axis: usize| -> i64 {
                g.rays().iter().zip(&representative.coeffs).filter(|(u, _)| u[axis] != 0).map(|(_, a)| a).sum()
            };
            let expect = kunneth_p1p1(deg(0), deg(1), degree);
            ensure(degree == 1 && value == expect && value > 0, || {
                format!("h^{degree} = {value}, Künneth gives {expect}")
            })?;
            Ok(format!(
                "P3 verified for s = 2 on 41 classes; P1xP1 counterexample O({}, {}) with h^1 = {value}",
                deg(0),
                deg(1)
            ))
        }
        other => Err(format!("P1xP1 s = 1: {other:?}")),
    }
}

fn machine_reports() -> Vec<String> {
    let params = ScanParams { seed: 11, ..ScanParams::default() };
    let mut out = Vec::new();
    let mut push = |cmd: &str, value: serde_json::Value| {
        let mut r = Report::new(&[cmd.to_string()], None, &params);
        r.results = value;
        out.push(r.render_tree());
    };
    let p3 = fan("P3");
    let h = TorusDivisor::prime(4, 0);
    let v = KlyachkoBundle::split(&p3, &[h.clone(), h.scale(-1), h.scale(2)]).unwrap();
    push("split-test", serde_json::to_value(splitting_test(&v, 4, params.seed)).unwrap());
    push(
        "split-test",
        serde_json::to_value(splitting_test(&KlyachkoBundle::tangent(&p3).unwrap(), 4, params.seed)).unwrap(),
    );
    push("boundary-report", serde_json::to_value(boundary_report(&v, 4, params.seed).unwrap()).unwrap());
    push(
        "q-ample-cert",
        serde_json::to_value(q_ample_certificate(&p3, &boundary_divisor(&p3), None, 6).unwrap()).unwrap(),
    );
    push("s-split", serde_json::to_value(s_split_scan(&fan("P1xP1"), 1, -2, 2).unwrap()).unwrap());
    push("reduce-products", serde_json::to_value(reduction_plan_products(&[3, 4]).unwrap()).unwrap());
    push("cohomology", serde_json::to_value(line_bundle_cohomology(&p3, &h.scale(-5)).unwrap()).unwrap());
    out
}

fn determinism() -> Outcome {
    let a = machine_reports();
    let b = machine_reports();
    ensure(a == b, || "machine reports differ between runs".into())?;
    Ok(format!("{} machine-format reports byte-identical across runs", a.len()))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("cohomology oracle equivalence", oracle_equivalence),
        ("Serre duality", serre_duality),
        ("thickening sections", thickening_identity),
        ("q-ampleness certificate consistency", q_ample_consistency),
        ("splitting decision soundness", splitting_soundness),
        ("boundary triviality agreement", boundary_triviality),
        ("reduction counts", reduction_counts),
        ("Picard restriction", picard_restriction),
        ("s-split scan", s_split),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = run();
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Invariant suite over the built-in catalog.

use torsplit_core::bundle::KlyachkoBundle;
use torsplit_core::catalog::{fan_by_name, CATALOG_NAMES};
use torsplit_core::cohomology::{cech_oracle, line_bundle_cohomology};
use torsplit_core::divisor::{boundary_divisor, class_coordinates};
use torsplit_core::positivity::q_ample_certificate;
use torsplit_core::splitting::splitting_test;
use torsplit_core::{catalog_model, parse_model, Fan, Result, ScanParams, SplitVerdict, TorusDivisor};

type Check = (String, bool, String);

fn samples(fan: &Fan) -> Vec<TorusDivisor> {
    let n = fan.n_rays();
    let delta = boundary_divisor(fan);
    let mut d01 = TorusDivisor::prime(n, 0);
    d01.coeffs[1] -= 1;
    vec![TorusDivisor::new(vec![0; n]), delta.clone(), delta.scale(-1), TorusDivisor::prime(n, 0), d01]
}

fn record(out: &mut Vec<Check>, name: String, r: Result<(bool, String)>) {
    match r {
        Ok((ok, detail)) => out.push((name, ok, detail)),
        Err(e) => out.push((name, false, format!("error: {e}"))),
    }
}

fn serre(fan: &Fan) -> Result<(bool, String)> {
    let n = fan.rank();
    let k = boundary_divisor(fan).scale(-1);
    for d in samples(fan) {
        let h = line_bundle_cohomology(fan, &d)?.dims;
        let dual = line_bundle_cohomology(fan, &k.sub(&d))?.dims;
        if (0..=n).any(|i| h[i] != dual[n - i]) {
            return Ok((false, format!("{:?}: {h:?} vs dual {dual:?}", d.coeffs)));
        }
    }
    Ok((true, "h^i(D) = h^(n-i)(K - D) on sample divisors".into()))
}

fn oracle(fan: &Fan) -> Result<(bool, String)> {
    for d in samples(fan) {
        let fast = line_bundle_cohomology(fan, &d)?.dims;
        let slow = cech_oracle(fan, &d, 1)?.dims;
        if fast != slow {
            return Ok((false, format!("{:?}: {fast:?} vs {slow:?}", d.coeffs)));
        }
    }
    Ok((true, "engine matches the direct Čech computation".into()))
}

fn rank_one(fan: &Fan) -> Result<(bool, String)> {
    for d in samples(fan) {
        let a = line_bundle_cohomology(fan, &d)?.dims;
        let b = KlyachkoBundle::line(fan, &d).cohomology()?.dims;
        if a != b {
            return Ok((false, format!("{:?}: {a:?} vs {b:?}", d.coeffs)));
        }
    }
    Ok((true, "rank-one bundles agree with line bundle cohomology".into()))
}

fn split_sum(fan: &Fan, p: &ScanParams) -> Result<(bool, String)> {
    let n = fan.n_rays();
    let zero = TorusDivisor::new(vec![0; n]);
    let d0 = TorusDivisor::prime(n, 0);
    let v = KlyachkoBundle::split(fan, &[zero.clone(), d0.clone()])?;
    match splitting_test(&v, p.grid, p.seed) {
        SplitVerdict::Split { summands, .. } => {
            let mut got: Vec<Vec<i64>> = summands.summands.iter().map(|s| s.0.clone()).collect();
            let mut want = vec![class_coordinates(fan, &zero)?, class_coordinates(fan, &d0)?];
            got.sort();
            want.sort();
            Ok((got == want, format!("summand classes {got:?}")))
        }
        other => Ok((false, format!("O + O(D_0) not recognised as split: {other:?}"))),
    }
}

pub fn run(p: &ScanParams) -> Vec<Check> {
    let mut out = Vec::new();
    for name in CATALOG_NAMES {
        let fan = match fan_by_name(name) {
            Ok(f) => f,
            Err(e) => {
                out.push((format!("{name} builds"), false, e.to_string()));
                continue;
            }
        };
        out.push((format!("{name} smooth complete"), fan.is_smooth_complete(), format!("{} rays", fan.n_rays())));
        record(
            &mut out,
            format!("{name} model round-trip"),
            catalog_model(name).map(|m| match parse_model(&m.to_text()) {
                Ok(back) => (back == m, "serialize then parse gives the same model".into()),
                Err(e) => (false, e.to_string()),
            }),
        );
        record(&mut out, format!("{name} Serre duality"), serre(&fan));
        if fan.rank() <= 3 {
            record(&mut out, format!("{name} Čech oracle"), oracle(&fan));
        }
        record(&mut out, format!("{name} rank one"), rank_one(&fan));
        record(&mut out, format!("{name} split sum"), split_sum(&fan, p));
    }
    for name in ["P2", "P3"] {
        let r = fan_by_name(name).and_then(|f| KlyachkoBundle::tangent(&f)).map(|t| {
            let v = splitting_test(&t, p.grid, p.seed);
            (matches!(v, SplitVerdict::NonSplit(_)), "certified non-split".to_string())
        });
        record(&mut out, format!("{name} tangent bundle"), r);
    }
    record(
        &mut out,
        "seeded search is deterministic".into(),
        fan_by_name("P1xP1").and_then(|f| {
            let n = f.n_rays();
            let v = KlyachkoBundle::split(&f, &[TorusDivisor::prime(n, 0), TorusDivisor::prime(n, 1).scale(2)])?;
            Ok((splitting_test(&v, p.grid, p.seed) == splitting_test(&v, p.grid, p.seed), "identical verdicts".into()))
        }),
    );
    record(
        &mut out,
        "P3 boundary certificate".into(),
        fan_by_name("P3").and_then(|f| {
            let c = q_ample_certificate(&f, &boundary_divisor(&f), None, p.k_max)?;
            Ok((c.q == 0 && c.recheck(), format!("q = {}", c.q)))
        }),
    );
    out
}

mod common;

use common::*;
use proptest::prelude::*;
use torsplit_core::cohomology::line_bundle_cohomology;
use torsplit_core::divisor::{class_coordinates, restrict_divisor_class};
use torsplit_core::linalg::q;
use torsplit_core::splitting::splitting_test;
use torsplit_core::{Fan, KlyachkoBundle, SplitVerdict, Subspace, TorusDivisor};

const SURFACES: &[&str] = &["P2", "P1xP1", "F1", "F2", "BlowupP2"];

/// Per ray: first jump, gap to the second jump (0 means both at once), and the line kept in between.
type RayData = (i64, i64, (i64, i64));

fn rank_two(f: &Fan, data: &[RayData]) -> KlyachkoBundle {
    let raw = (0..f.n_rays())
        .map(|r| {
            let (a, gap, (x, y)) = data[r % data.len()];
            let line = if (x, y) == (0, 0) { vec![q(1), q(0)] } else { vec![q(x), q(y)] };
            if gap == 0 {
                vec![(a, Subspace::zero(2))]
            } else {
                vec![(a, Subspace::from_rows(2, vec![line])), (a + gap, Subspace::zero(2))]
            }
        })
        .collect();
    KlyachkoBundle::from_raw(f, 2, raw).expect("rank two data on a surface is compatible")
}

fn surface_bundle() -> impl Strategy<Value = KlyachkoBundle> {
    (
        prop::sample::select(SURFACES).prop_map(fan),
        prop::collection::vec((-1i64..=2, 0i64..=2, (-1i64..=1, -1i64..=1)), 5),
    )
        .prop_map(|(f, data)| rank_two(&f, &data))
}

fn dims(v: &KlyachkoBundle) -> Vec<u64> {
    v.cohomology().unwrap().dims
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn duals_and_tensors_have_expected_ranks(v in surface_bundle(), d in prop::collection::vec(-1i64..=1, 6)) {
        let l = KlyachkoBundle::line(v.fan(), &TorusDivisor::new(d[..v.fan().n_rays()].to_vec()));
        prop_assert_eq!(v.dual().rank(), 2);
        prop_assert_eq!(v.dual().dual().filtration_signature(), v.filtration_signature());
        prop_assert_eq!(v.tensor(&v).unwrap().rank(), 4);
        prop_assert_eq!(v.tensor(&l).unwrap().rank(), 2);
        prop_assert_eq!(v.end().rank(), 4);
    }

    #[test]
    fn cohomology_is_additive(a in surface_bundle(), d in prop::collection::vec(-2i64..=2, 6)) {
        let l = KlyachkoBundle::line(a.fan(), &TorusDivisor::new(d[..a.fan().n_rays()].to_vec()));
        let sum = a.direct_sum(&l).unwrap();
        let want: Vec<u64> = dims(&a).iter().zip(dims(&l)).map(|(x, y)| x + y).collect();
        prop_assert_eq!(dims(&sum), want);
    }

    #[test]
    fn rank_one_matches_line_cohomology((f, d) in fan_and_divisor(-3, 3)) {
        prop_assert_eq!(dims(&KlyachkoBundle::line(&f, &d)), line_bundle_cohomology(&f, &d).unwrap().dims);
    }

    #[test]
    fn simple_bundles_do_not_split(v in surface_bundle()) {
        let h0 = v.end().cohomology().unwrap().h(0);
        prop_assert!(h0 >= 1);
        if h0 == 1 {
            prop_assert!(splitting_test(&v, 4, 0).is_non_split());
        }
    }

    #[test]
    fn restriction_commutes_with_sums_and_duals(
        f in prop::sample::select(SURFACES).prop_map(fan),
        da in prop::collection::vec((-1i64..=2, 0i64..=2, (-1i64..=1, -1i64..=1)), 5),
        db in prop::collection::vec((-1i64..=2, 0i64..=2, (-1i64..=1, -1i64..=1)), 5),
        ray in any::<prop::sample::Index>(),
    ) {
        let (a, b) = (rank_two(&f, &da), rank_two(&f, &db));
        let ray = ray.index(f.n_rays());
        let sum = a.direct_sum(&b).unwrap().restrict(ray).unwrap().bundle;
        let ra = a.restrict(ray).unwrap().bundle;
        let rb = b.restrict(ray).unwrap().bundle;
        prop_assert_eq!(dims(&sum), dims(&ra.direct_sum(&rb).unwrap()));
        prop_assert_eq!(dims(&a.dual().restrict(ray).unwrap().bundle), dims(&ra.dual()));
    }

    #[test]
    fn restricted_sums_split_into_restricted_classes(
        f in prop::sample::select(&["P2", "P3", "P1xP1", "F1", "P1xP1xP1"][..]).prop_map(fan),
        coeffs in prop::collection::vec(prop::collection::vec(-2i64..=2, 8), 1..4),
        ray in any::<prop::sample::Index>(),
    ) {
        let n = f.n_rays();
        let ds: Vec<TorusDivisor> = coeffs.iter().map(|c| TorusDivisor::new(c[..n].to_vec())).collect();
        let r = ray.index(n);
        let restricted = KlyachkoBundle::split(&f, &ds).unwrap().restrict(r).unwrap();
        let mut want: Vec<Vec<i64>> = ds
            .iter()
            .map(|d| {
                let (star, rd) = restrict_divisor_class(&f, d, r).unwrap();
                class_coordinates(&star.fan, &rd).unwrap()
            })
            .collect();
        want.sort();
        match splitting_test(&restricted.bundle, 4, 0) {
            SplitVerdict::Split { summands, .. } => {
                let got: Vec<Vec<i64>> =
                    summands.summands.iter().flat_map(|(c, _, m)| std::iter::repeat_n(c.clone(), *m)).collect();
                prop_assert_eq!(got, want);
            }
            other => prop_assert!(false, "restriction of a split bundle not split: {:?}", other),
        }
    }
}

use proptest::prelude::*;
use torsplit_core::linalg::q;
use torsplit_core::model::{ModelAssertion, NamedBundle, NamedDivisor};
use torsplit_core::report::model_hash;
use torsplit_core::{catalog_model, parse_model, KlyachkoBundle, Model, Report, ScanParams, Subspace, TorusDivisor};

type RayData = (i64, i64, (i64, i64));

fn model_with(name: &str, divisors: &[Vec<i64>], rays: &[RayData], seed: u64, grid: usize, cd: Option<usize>) -> Model {
    let mut m = catalog_model(name).unwrap();
    let fname = m.fans.keys().next().unwrap().clone();
    let f = m.fans[&fname].clone();
    let n = f.n_rays();
    for (i, c) in divisors.iter().enumerate() {
        m.divisors
            .insert(format!("R{i}"), NamedDivisor { fan: fname.clone(), divisor: TorusDivisor::new(c[..n].to_vec()) });
    }
    let raw = (0..n)
        .map(|r| {
            let (a, gap, (x, y)) = rays[r % rays.len()];
            let line = if (x, y) == (0, 0) { vec![q(0), q(1)] } else { vec![q(x), q(y)] };
            if gap == 0 {
                vec![(a, Subspace::zero(2))]
            } else {
                vec![(a, Subspace::from_rows(2, vec![line])), (a + gap, Subspace::zero(2))]
            }
        })
        .collect();
    let bundle = KlyachkoBundle::from_raw(&f, 2, raw).unwrap();
    m.bundles.insert("W".into(), NamedBundle { fan: fname.clone(), bundle });
    if let Some(v) = cd {
        let mut partial = vec![0; n];
        partial[0] = 1;
        m.divisors.insert("Part".into(), NamedDivisor { fan: fname, divisor: TorusDivisor::new(partial) });
        m.assertions.push(ModelAssertion {
            fact: "cd".into(),
            subject: Some("Part".into()),
            value: v.to_string(),
            justification: "affine complement".into(),
        });
    }
    m.config.seed = seed;
    m.config.grid = grid;
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn models_round_trip_through_text(
        name in prop::sample::select(&["P2", "P1xP1", "F1", "BlowupP2"][..]),
        divisors in prop::collection::vec(prop::collection::vec(-9i64..=9, 5), 0..4),
        rays in prop::collection::vec((-3i64..=3, 0i64..=2, (-2i64..=2, -2i64..=2)), 5),
        seed in any::<u64>(),
        grid in 1usize..9,
        cd in prop::option::of(0usize..2),
    ) {
        let m = model_with(name, &divisors, &rays, seed, grid, cd);
        let text = m.to_text();
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(model_hash(&back), model_hash(&m));
        let cmd = vec!["cohomology".to_string()];
        let params = ScanParams { seed, ..ScanParams::default() };
        prop_assert_eq!(Report::new(&cmd, Some(&back), &params).render_tree(), Report::new(&cmd, Some(&m), &params).render_tree());
    }

    #[test]
    fn distinct_models_hash_apart(
        divisors in prop::collection::vec(-9i64..=9, 5),
        bump in 0usize..3,
    ) {
        let rays = [(0, 1, (1, 1))];
        let a = model_with("P2", std::slice::from_ref(&divisors), &rays, 0, 4, None);
        let mut changed = divisors.clone();
        changed[bump] += 1;
        let b = model_with("P2", &[changed], &rays, 0, 4, None);
        prop_assert_ne!(model_hash(&a), model_hash(&b));
    }
}

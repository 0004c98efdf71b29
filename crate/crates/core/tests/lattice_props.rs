mod common;

use std::collections::HashMap;

use common::*;
use proptest::prelude::*;
use torsplit_core::catalog::CATALOG_NAMES;
use torsplit_core::Fan;

#[test]
fn facets_are_shared_by_two_maximal_cones() {
    for name in CATALOG_NAMES {
        let f = fan(name);
        let n = f.rank();
        assert!(f.max_cones().len() > n, "{name}");
        let mut facets: HashMap<Vec<usize>, usize> = HashMap::new();
        for c in f.max_cones() {
            for skip in c.rays() {
                let facet: Vec<usize> = c.rays().iter().copied().filter(|r| r != skip).collect();
                *facets.entry(facet).or_default() += 1;
            }
        }
        assert!(facets.values().all(|&k| k == 2), "{name}");
        assert_eq!(2 * facets.len(), f.max_cones().len() * n, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stars_are_smooth_complete(f in small_fan(), pick in any::<prop::sample::Index>()) {
        let cones = f.all_cones();
        let c = &cones[pick.index(cones.len())];
        let star = f.star(c).unwrap();
        prop_assert!(star.fan.is_smooth_complete());
        prop_assert_eq!(star.fan.rank(), f.rank() - c.dim());
    }

    #[test]
    fn build_is_order_independent(f in small_fan(), seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..f.n_rays()).collect();
        order.shuffle(&mut rng);
        let mut pos = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let rays: Vec<Vec<i64>> = order.iter().map(|&i| f.ray(i).to_vec()).collect();
        let mut cones: Vec<Vec<usize>> = f.max_cones().iter().map(|c| c.rays().iter().map(|&r| pos[r]).collect()).collect();
        cones.shuffle(&mut rng);
        let (g, perm) = Fan::build_with_permutation(f.rank(), rays, cones).unwrap();
        prop_assert_eq!(&g, &f);
        for (input, &canon) in perm.iter().enumerate() {
            prop_assert_eq!(g.ray(canon), f.ray(order[input]));
        }
    }
}

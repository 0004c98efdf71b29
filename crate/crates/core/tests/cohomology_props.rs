mod common;

use common::*;
use proptest::prelude::*;
use torsplit_core::cohomology::{line_bundle_cohomology, line_complex, thickening_cohomology, CechComplex, Nerve};
use torsplit_core::divisor::positivity_flags;
use torsplit_core::linalg::q;
use torsplit_core::{Subspace, TorusDivisor};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn line_differentials_square_to_zero(f in small_fan(), negative in any::<u64>()) {
        let nerve = Nerve::new(&f.max_cone_masks(), f.rank() + 2);
        let mask = negative & ((1u64 << f.n_rays()) - 1);
        prop_assert!(line_complex(&nerve, f.rank() + 2, mask).d_squared_vanishes(&nerve));
    }

    #[test]
    fn filtered_differentials_square_to_zero(
        f in small_fan(),
        lines in prop::collection::vec(prop::collection::vec(-2i64..=2, 2), 8),
        full in any::<u8>(),
    ) {
        // one subspace of Q^2 per ray; a cone's stalk is the intersection over its rays
        let walls: Vec<Subspace> = (0..f.n_rays())
            .map(|r| {
                if full >> (r % 8) & 1 == 1 || lines[r % 8].iter().all(|&x| x == 0) {
                    Subspace::full(2)
                } else {
                    Subspace::from_rows(2, vec![lines[r % 8].iter().map(|&x| q(x)).collect()])
                }
            })
            .collect();
        let nerve = Nerve::new(&f.max_cone_masks(), f.rank() + 1);
        let cx = CechComplex::build(&nerve, 2, f.rank() + 1, |mask| {
            (0..f.n_rays()).filter(|r| mask >> r & 1 == 1).fold(Subspace::full(2), |s, r| s.intersect(&walls[r]))
        });
        prop_assert!(cx.d_squared_vanishes(&nerve));
    }

    #[test]
    fn thickening_euler_characteristic_is_additive(
        f in small_fan(),
        coeffs in prop::collection::vec(0i64..=1, 8),
        m in 0u32..3,
    ) {
        let d = TorusDivisor::new(coeffs.iter().cycle().take(f.n_rays()).copied().collect());
        prop_assume!(!d.is_zero());
        let chi = |x: &TorusDivisor| line_bundle_cohomology(&f, x).unwrap().euler_characteristic();
        let thick = thickening_cohomology(&f, &d, m).unwrap();
        prop_assert!(thick.euler_consistent());
        let zero = TorusDivisor::zero(f.n_rays());
        prop_assert_eq!(thick.euler_characteristic(), chi(&zero) - chi(&d.scale(-(m as i64) - 1)));
    }

    #[test]
    fn nef_line_bundles_have_no_higher_cohomology((f, d) in fan_and_divisor(-1, 3)) {
        if positivity_flags(&f, &d).unwrap().nef {
            let h = line_bundle_cohomology(&f, &d).unwrap();
            prop_assert!((1..=f.rank()).all(|i| h.h(i) == 0), "{:?}", h.dims);
        }
    }
}

use num_complex::Complex64;
use proptest::prelude::*;
use qcspectra::thermo::{
    entropy, ifs_attractor, lyapunov, maximizer, maximizer_at, moran_dimension, phi, pressure, DiskEntry, DiskSystem,
    IfsSystem, MovedSystem, ProbabilityVector, RadiiSource,
};
use std::sync::Arc;

fn origin() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn moduli() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..0.7, 2..7)
}

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n)
}

fn spiral_system(ms: &[f64], m: Complex64, k: f64) -> MovedSystem {
    MovedSystem::new(DiskSystem::with_moduli(ms).unwrap(), RadiiSource::IdealizedSpiral { m, k })
}

fn jensen_gap(sys: &MovedSystem, p: &ProbabilityVector, lambda: Complex64, d: f64) -> f64 {
    pressure(sys, lambda, d).unwrap() - (entropy(p) - d * lyapunov(sys, p, lambda).unwrap().re)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn jensen_gap_nonnegative_with_equality_at_maximizer(
        (ms, w) in moduli().prop_flat_map(|ms| { let n = ms.len(); (Just(ms), weights(n)) }),
        d in 0.05f64..1.5,
        lr in 0.0f64..0.25,
        la in -3.1f64..3.1,
    ) {
        let sys = spiral_system(&ms, Complex64::from_polar(0.3, 0.7), 0.3);
        let lambda = Complex64::from_polar(lr, la);
        let p = ProbabilityVector::from_weights(&w).unwrap();
        prop_assert!(jensen_gap(&sys, &p, lambda, d) >= -1e-12);
        let best = maximizer_at(&sys, lambda, d).unwrap();
        prop_assert!(jensen_gap(&sys, &best, lambda, d).abs() < 1e-10);
    }

    #[test]
    fn equivalences_at_zero(ms in moduli(), ds in prop::collection::vec(0.01f64..2.0, 20)) {
        let sys = MovedSystem::stationary(DiskSystem::with_moduli(&ms).unwrap());
        let root = moran_dimension(&sys, origin()).unwrap().dimension;
        for d in ds {
            // the three predicates use different tolerances right at the root
            if (d - root).abs() < 1e-8 {
                continue;
            }
            let i = d <= root;
            let ii = pressure(&sys, origin(), d).unwrap() >= -1e-10;
            let p = maximizer_at(&sys, origin(), d).unwrap();
            let iii = entropy(&p) - d * lyapunov(&sys, &p, origin()).unwrap().re >= -1e-10;
            prop_assert_eq!(i, ii);
            prop_assert_eq!(ii, iii);
        }
    }

    #[test]
    fn pressure_strictly_decreasing(ms in moduli(), d1 in 0.01f64..1.4, gap in 0.01f64..0.5) {
        let sys = MovedSystem::stationary(DiskSystem::with_moduli(&ms).unwrap());
        prop_assert!(pressure(&sys, origin(), d1 + gap).unwrap() < pressure(&sys, origin(), d1).unwrap());
    }

    #[test]
    fn phi_at_zero_on_jensen_equality(ms in moduli()) {
        let sys = MovedSystem::stationary(DiskSystem::with_moduli(&ms).unwrap());
        let delta = moran_dimension(&sys, origin()).unwrap().dimension;
        prop_assume!(delta <= 1.0);
        let p = maximizer(&sys, delta).unwrap();
        let l0 = lyapunov(&sys, &p, origin()).unwrap();
        prop_assert_eq!(l0.im, 0.0);
        prop_assert!(l0.re > 0.0);
        prop_assert!((phi(&sys, &p, origin()).unwrap() - (1.0 - delta)).norm() < 1e-12);
    }

    #[test]
    fn moran_invariant_under_permutation_and_phase(
        ms in moduli(),
        shift in 0usize..6,
        phases in prop::collection::vec(-3.1f64..3.1, 6),
    ) {
        let base = MovedSystem::stationary(DiskSystem::with_moduli(&ms).unwrap());
        let mut rotated = ms.clone();
        let len = rotated.len();
        rotated.rotate_left(shift % len);
        let perm = MovedSystem::stationary(DiskSystem::with_moduli(&rotated).unwrap());
        let a = moran_dimension(&base, origin()).unwrap().dimension;
        prop_assert!((a - moran_dimension(&perm, origin()).unwrap().dimension).abs() < 1e-12);

        let mods = ms.clone();
        let phased = MovedSystem::new(
            DiskSystem::with_moduli(&ms).unwrap(),
            RadiiSource::Custom(Arc::new(move |j, l: Complex64| {
                Ok(Complex64::from_polar(mods[j], phases[j] * l.norm()))
            })),
        );
        let b = moran_dimension(&phased, Complex64::new(0.0, 0.4)).unwrap().dimension;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn attractor_depths_telescope(
        maps in prop::collection::vec(((0.05f64..0.45), (-3.1f64..3.1), (-1.0f64..1.0), (-1.0f64..1.0)), 2..4),
        d in 1usize..7,
    ) {
        let ifs = IfsSystem::new(
            maps.iter().map(|&(r, a, x, y)| (Complex64::from_polar(r, a), Complex64::new(x, y))).collect(),
        )
        .unwrap();
        let coarse = ifs_attractor(&ifs, d).unwrap();
        let fine = ifs_attractor(&ifs, d + 1).unwrap();
        let far = fine
            .points
            .iter()
            .map(|p| coarse.points.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        prop_assert!(far <= coarse.hausdorff_bound + fine.hausdorff_bound + 1e-12);
    }
}

#[test]
fn disjointness_is_enforced() {
    let e = |x, r| DiskEntry { x, r };
    assert!(DiskSystem::new(vec![e(-0.3, 0.2), e(0.3, 0.2)], 2.0).is_ok());
    assert!(DiskSystem::new(vec![e(-0.1, 0.2), e(0.1, 0.2)], 2.0).is_err());
    assert!(DiskSystem::new(vec![e(0.8, 0.3)], 1.0).is_err());
}

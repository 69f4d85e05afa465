use std::f64::consts::PI;

use nls_periodic_rh::datum::{DatumFile, DatumKind};
use nls_periodic_rh::nls::{delta_invariance, evolve, evolve_report, real_ksamples, EvolutionConfig};
use nls_periodic_rh::{Error, InitialDatum, Lambda};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mass_is_conserved(seed in 0u64..1000, plus in any::<bool>(), tf in 0.0f64..1.0) {
        let lambda = if plus { Lambda::Plus } else { Lambda::Minus };
        let d = InitialDatum::random_band_limited(seed, 4, PI, lambda).unwrap();
        let r = evolve_report(&d, &EvolutionConfig::new(PI, lambda, tf)).unwrap();
        prop_assert!(r.mass_drift() <= 1e-10);
    }

    #[test]
    fn evolution_round_trips_through_json(seed in 0u64..1000) {
        let d = InitialDatum::random_band_limited(seed, 3, 2.0, Lambda::Minus).unwrap();
        let out = evolve(&d, &EvolutionConfig::new(2.0, Lambda::Minus, 0.05)).unwrap();
        let file: DatumFile = serde_json::from_str(&out.to_json().unwrap()).unwrap();
        prop_assert_eq!(file.kind, DatumKind::Samples);
        prop_assert_eq!(file.data.len(), 64);
        let back = InitialDatum::from_file(&file).unwrap();
        prop_assert!((back.eval(0.3) - out.eval(0.3)).norm() <= 1e-14);
    }
}

#[test]
fn discriminant_drift_shrinks_under_refinement() {
    for (seed, lambda) in [(2, Lambda::Plus), (5, Lambda::Minus)] {
        let d = InitialDatum::random_band_limited(seed, 4, PI, lambda).unwrap();
        let cfg = EvolutionConfig::new(PI, lambda, 0.1);
        let ks = real_ksamples(32, 10.0);
        let coarse = delta_invariance(&d, &cfg, &ks).unwrap();
        let fine = delta_invariance(&d, &cfg.refined(), &ks).unwrap();
        assert!(coarse <= 1e-6, "{coarse}");
        assert!(coarse >= 3.0 * fine, "{coarse} -> {fine}");
    }
}

#[test]
fn large_steps_are_refused() {
    let d = InitialDatum::constant(nls_periodic_rh::Complex64::new(3.0, 0.0), PI, Lambda::Minus).unwrap();
    let mut cfg = EvolutionConfig::new(PI, Lambda::Minus, 1.0);
    cfg.dt = 0.05;
    assert!(matches!(evolve(&d, &cfg), Err(Error::InvalidInput(_))));
}

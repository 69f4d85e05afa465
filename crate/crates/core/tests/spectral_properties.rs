use std::f64::consts::PI;

use nls_periodic_rh::cuts::in_excluded_disk;
use nls_periodic_rh::{Complex64, InitialDatum, Lambda, SpectralData};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn lambda_of(flag: bool) -> Lambda {
    if flag {
        Lambda::Plus
    } else {
        Lambda::Minus
    }
}

/// a, b for constant data from the explicit solution of the x-problem.
fn constant_ab(q0: f64, l: f64, lam: f64, k: Complex64) -> (Complex64, Complex64) {
    let r = (k * k - lam * q0 * q0).sqrt();
    let e = (Complex64::i() * k * l).exp();
    let sinc = if r.norm() * l < 1e-6 { c(l, 0.0) } else { (r * l).sin() / r };
    (e * ((r * l).cos() - Complex64::i() * k * sinc), -q0 * e * sinc)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn determinant_identity(seed in 0u64..1000, plus in any::<bool>(), re in -15.0f64..15.0, im in -3.0f64..3.0) {
        let d = InitialDatum::random_band_limited(seed, 3, PI, lambda_of(plus)).unwrap();
        let sd = SpectralData::new(d);
        prop_assert!(sd.det_residual(c(re, im)).unwrap() <= 1e-8);
    }

    #[test]
    fn schwarz_conjugates_are_consistent(seed in 0u64..1000, re in -10.0f64..10.0, im in -2.0f64..2.0) {
        let d = InitialDatum::random_band_limited(seed, 3, 2.0, Lambda::Minus).unwrap();
        let sd = SpectralData::new(d);
        let k = c(re, im);
        let v = sd.abab(k).unwrap();
        prop_assert!((v.a_bar - sd.a(k.conj()).unwrap().conj()).norm() <= 1e-12 * v.a_bar.norm().max(1.0));
        prop_assert!((v.b_bar - sd.b(k.conj()).unwrap().conj()).norm() <= 1e-12 * v.b_bar.norm().max(1.0));
    }

    #[test]
    fn constant_data_match_closed_forms(
        q0 in 0.1f64..2.0, l in 0.5f64..4.0, plus in any::<bool>(),
        re in -20.0f64..20.0, im in -3.0f64..3.0,
    ) {
        let lambda = lambda_of(plus);
        prop_assume!(im.abs() * l <= 40.0);
        let sd = SpectralData::new(InitialDatum::constant(c(q0, 0.0), l, lambda).unwrap());
        let k = c(re, im);
        let (a, b) = constant_ab(q0, l, lambda.value(), k);
        let scale = a.norm().max(b.norm());
        prop_assert!((sd.a(k).unwrap() - a).norm() <= 1e-8 * scale);
        prop_assert!((sd.b(k).unwrap() - b).norm() <= 1e-8 * scale);
    }

    #[test]
    fn discriminant_is_step_count_independent(seed in 0u64..1000, re in -8.0f64..8.0, im in -1.5f64..1.5) {
        let d = InitialDatum::random_band_limited(seed, 3, PI, Lambda::Plus).unwrap();
        let sd = SpectralData::new(d);
        let k = c(re, im);
        let l = sd.period();
        let disc = |n: usize| {
            let a = sd.integrate_fixed(k, n).unwrap()[1];
            let ab = sd.integrate_fixed(k.conj(), n).unwrap()[1].conj();
            let e = (Complex64::i() * k * l).exp();
            a / e + ab * e
        };
        let accurate = sd.discriminant(k).unwrap();
        let tol = 1e-8 * accurate.norm().max(1.0);
        prop_assert!((disc(512) - accurate).norm() <= tol);
        prop_assert!((disc(1024) - accurate).norm() <= tol);
    }
}

#[test]
fn spectral_functions_decay_like_one_over_k() {
    let d = InitialDatum::random_band_limited(4, 3, PI, Lambda::Plus).unwrap();
    let sd = SpectralData::new(d);
    let mut prev = None;
    for n in [8, 16, 32, 64, 128] {
        let k = c((n as f64 + 0.5) * PI / sd.period(), 0.0);
        assert!(!in_excluded_disk(sd.period(), k));
        let a = sd.a(k).unwrap();
        let b = sd.b(k).unwrap();
        let size = (a - 1.0).norm().max(b.norm());
        // |k| size stays bounded and does not grow under doubling
        assert!(size * k.norm() < 5.0, "n = {n}: {size}");
        if let Some(p) = prev {
            assert!(size < 0.75 * p, "no decay at n = {n}: {size} vs {p}");
        }
        prev = Some(size);
    }
}

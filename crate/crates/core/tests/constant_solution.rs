use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use nls_periodic_rh::constant::{constant_demo_report, ConstantParams};
use nls_periodic_rh::cuts::{build_cuts, in_excluded_disk, locate_zeros};
use nls_periodic_rh::jump::RhProblem;
use nls_periodic_rh::roots::{Rect, RootConfig};
use nls_periodic_rh::{Complex64, EvalPoint, Lambda, Mat2, SpectralData};
use proptest::prelude::*;

fn sets() -> [ConstantParams; 3] {
    [
        ConstantParams::new(1.0, PI, Lambda::Plus).unwrap(),
        ConstantParams::new(0.7, 2.0, Lambda::Minus).unwrap(),
        ConstantParams::new(2.0, 1.0, Lambda::Plus).unwrap(),
    ]
}

fn problem(p: &ConstantParams) -> RhProblem {
    let sd = Arc::new(SpectralData::new(p.datum()));
    let q = 1.2 * p.q0;
    let z = locate_zeros(&sd, Rect::new(-q, q, -q, q), &RootConfig::default()).unwrap();
    RhProblem::new(sd.clone(), build_cuts(&sd, &z).unwrap()).unwrap()
}

#[test]
fn rebuilt_mtilde_has_the_prescribed_jumps() {
    for p in sets() {
        let rh = problem(&p);
        let (x, t) = (0.35 * p.period, 0.6);
        for piece in &rh.contour().pieces {
            for u in [0.15, 0.5, 0.85] {
                let k = piece.sample(u);
                if k.norm() > 30.0 {
                    continue;
                }
                let n = piece.plus_normal();
                let plus = p.mtilde_from(x, t, k, Some(n)).unwrap();
                let minus = p.mtilde_from(x, t, k, Some(-n)).unwrap();
                let v = rh.jump_matrix(piece, &EvalPoint::new(x, t, k)).unwrap().entries;
                let err = (minus - plus * v).max_abs();
                assert!(err <= 1e-8 * plus.max_abs().max(1.0), "{} at {k}: {err:.2e}", piece.label);
            }
        }
    }
}

#[test]
fn mtilde_tends_to_identity_on_the_diagonal() {
    for p in sets() {
        let mut prev = f64::INFINITY;
        for r in [10.0, 100.0, 1000.0] {
            let mut k = Complex64::from_polar(r, FRAC_PI_4);
            if in_excluded_disk(p.period, k) {
                k += 0.5 * PI / p.period;
            }
            let dev = (p.mtilde(0.2, 0.4, k).unwrap() - Mat2::identity()).max_abs();
            assert!(dev < prev && dev * r < 10.0, "|k| = {r}: {dev}");
            prev = dev;
        }
    }
}

#[test]
fn mtilde_has_schwarz_symmetry() {
    for p in sets() {
        let lam = p.lam();
        for k in [Complex64::new(0.8, 1.3), Complex64::new(-2.1, 0.4), Complex64::new(3.0, -2.5)] {
            let m = p.mtilde(0.3, 0.5, k).unwrap();
            let mb = p.mtilde(0.3, 0.5, k.conj()).unwrap();
            let tol = 1e-9 * m.max_abs().max(1.0);
            assert!((m.get(0, 0) - mb.get(1, 1).conj()).norm() <= tol);
            assert!((m.get(0, 1) - lam * mb.get(1, 0).conj()).norm() <= tol);
        }
    }
}

#[test]
fn demo_report_lists_both_routes() {
    let p = ConstantParams::new(1.0, PI, Lambda::Plus).unwrap();
    let report = constant_demo_report(&p, &[0.0, 1.0], &[0.0, 0.5]).unwrap();
    let grid = report["q"].as_array().unwrap();
    assert_eq!(grid.len(), 4);
    for row in grid {
        assert!(row.get("q_delta").is_some() && row.get("q_limit").is_some());
    }
    assert!(report["residuals"]["q_vs_exact"].as_f64().unwrap() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn delta_infinity_matches_closed_form(q0 in 0.2f64..2.0, l in 0.5f64..4.0, plus in any::<bool>(), x in 0.0f64..1.0, t in 0.0f64..1.0) {
        let lambda = if plus { Lambda::Plus } else { Lambda::Minus };
        let p = ConstantParams::new(q0, l, lambda).unwrap();
        prop_assert!(p.delta_infinity(x * l, t).unwrap().discrepancy <= 1e-8);
    }

    #[test]
    fn recovered_q_is_the_phase_rotation(q0 in 0.2f64..2.0, l in 0.5f64..4.0, plus in any::<bool>(), x in 0.0f64..1.0, t in 0.0f64..1.0) {
        let lambda = if plus { Lambda::Plus } else { Lambda::Minus };
        let p = ConstantParams::new(q0, l, lambda).unwrap();
        let r = p.recover_q(x * l, t).unwrap();
        let exact = q0 * Complex64::from_polar(1.0, -2.0 * lambda.value() * q0 * q0 * t);
        prop_assert!((r.from_delta - exact).norm() <= 1e-8);
        prop_assert!(r.route_disagreement() <= 1e-6);
    }
}

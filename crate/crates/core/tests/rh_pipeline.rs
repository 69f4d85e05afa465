//! Zeros, cuts, Γ̃ and jumps for random band-limited data of both signs.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use nls_periodic_rh::branch::Side;
use nls_periodic_rh::cuts::{build_cuts, default_search_box, four_minus_delta_sq, locate_zeros, BranchPoint};
use nls_periodic_rh::jump::{write_jump_jsonl, RhProblem};
use nls_periodic_rh::roots::{winding_on_rect, Rect, RootConfig};
use nls_periodic_rh::{Complex64, EvalPoint, InitialDatum, Lambda, Mat2, SpectralData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Setup {
    rect: Rect,
    zeros: Vec<BranchPoint>,
    rh: RhProblem,
}

fn setup(lambda: Lambda) -> &'static Setup {
    static PLUS: OnceLock<Setup> = OnceLock::new();
    static MINUS: OnceLock<Setup> = OnceLock::new();
    let cell = if lambda == Lambda::Plus { &PLUS } else { &MINUS };
    cell.get_or_init(|| {
        let d = InitialDatum::random_band_limited(21, 3, PI, lambda).unwrap();
        let sd = Arc::new(SpectralData::new(d));
        let rect = default_search_box(&sd, 3);
        let zeros = locate_zeros(&sd, rect, &RootConfig::default()).unwrap();
        let cuts = build_cuts(&sd, &zeros).unwrap();
        Setup { rect, zeros, rh: RhProblem::new(sd, cuts).unwrap() }
    })
}

const BOTH: [Lambda; 2] = [Lambda::Plus, Lambda::Minus];

#[test]
fn zero_set_is_conjugation_symmetric() {
    for lambda in BOTH {
        let s = setup(lambda);
        assert!(!s.zeros.is_empty());
        for z in &s.zeros {
            let mirror = s
                .zeros
                .iter()
                .filter(|w| w.order == z.order)
                .map(|w| (w.location - z.location.conj()).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(mirror < 1e-6, "{lambda:?}: no mirror for {:?}", z.location);
        }
    }
}

#[test]
fn orders_add_up_to_the_winding_number() {
    for lambda in BOTH {
        let s = setup(lambda);
        let sd = s.rh.spectral();
        let f = |k: Complex64| four_minus_delta_sq(sd, k);
        let w = winding_on_rect(&f, &s.rect, &RootConfig::default()).unwrap();
        let total: i64 = s.zeros.iter().map(|z| z.order as i64).sum();
        assert_eq!(w, total, "{lambda:?}");
    }
}

#[test]
fn branch_flips_sign_across_every_cut() {
    for lambda in BOTH {
        let s = setup(lambda);
        let branch = s.rh.gamma().branch();
        assert!(!branch.cuts().segments.is_empty(), "{lambda:?}: no cuts");
        for seg in &branch.cuts().segments {
            for u in [0.2, 0.5, 0.8] {
                let k = seg.from + (seg.to - seg.from) * u;
                let l = branch.eval(k, Side::Left).unwrap();
                let r = branch.eval(k, Side::Right).unwrap();
                assert!((l + r).norm() <= 1e-10, "{lambda:?} at {k}: {l} + {r}");
            }
        }
    }
}

#[test]
fn gamma_satisfies_its_defining_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for lambda in BOTH {
        let s = setup(lambda);
        let g = s.rh.gamma();
        let sd = s.rh.spectral();
        let lam = lambda.value();
        for _ in 0..40 {
            let k = Complex64::new(rng.random_range(-6.0..6.0), rng.random_range(-1.5..1.5));
            if g.branch().segment_at(k).is_some() {
                continue;
            }
            let v = sd.abab(k).unwrap();
            let e = (Complex64::i() * k * sd.period()).exp();
            let root = g.branch().eval(k, Side::Off).unwrap();
            let gamma = g.value_from(k, None).unwrap();
            let lhs = Complex64::i() * root;
            let rhs = v.a_bar * e - v.a / e - 2.0 * lam * e * v.b_bar * gamma;
            let scale = (v.a_bar * e).norm() + (v.a / e).norm() + root.norm();
            assert!((lhs - rhs).norm() <= 1e-10 * scale, "{lambda:?} at {k}");
        }
    }
}

#[test]
fn gamma_sides_sum_to_the_even_part() {
    for lambda in BOTH {
        let s = setup(lambda);
        let g = s.rh.gamma();
        let sd = s.rh.spectral();
        for seg in &g.cuts().segments {
            let k = seg.from + (seg.to - seg.from) * 0.43;
            let n = seg.plus_normal();
            let sum = g.value_from(k, Some(n)).unwrap() + g.value_from(k, Some(-n)).unwrap();
            let v = sd.abab(k).unwrap();
            let e = (Complex64::i() * k * sd.period()).exp();
            let expect = lambda.value() * (v.a_bar * e - v.a / e) / (e * v.b_bar);
            assert!((sum - expect).norm() <= 1e-9 * expect.norm().max(1.0), "{lambda:?} at {k}");
        }
    }
}

fn sample_points(rh: &RhProblem) -> Vec<(usize, Complex64)> {
    let mut out = Vec::new();
    for (i, piece) in rh.contour().pieces.iter().enumerate() {
        for u in [0.21, 0.5, 0.83] {
            out.push((i, piece.sample(u)));
        }
    }
    out
}

#[test]
fn jumps_are_unimodular_on_every_piece() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for lambda in BOTH {
        let s = setup(lambda);
        let pieces = &s.rh.contour().pieces;
        let mut labels = std::collections::BTreeSet::new();
        for (i, k) in sample_points(&s.rh) {
            let p = EvalPoint::new(rng.random_range(0.0..PI), rng.random_range(0.0..1.0), k);
            let j = s.rh.jump_matrix(&pieces[i], &p).unwrap();
            assert!(j.det_residual() <= 1e-9, "{lambda:?} {} at {k}: {}", j.label, j.det_residual());
            labels.insert(j.label.to_string());
        }
        assert!(labels.len() >= 4, "{labels:?}");
    }
}

#[test]
fn jumps_conjugate_with_the_theta_phase() {
    for lambda in BOTH {
        let s = setup(lambda);
        let pieces = &s.rh.contour().pieces;
        for (i, k) in sample_points(&s.rh) {
            if k.norm() > 8.0 {
                continue;
            }
            let at = EvalPoint::new(0.7, 0.3, k);
            let origin = EvalPoint::new(0.0, 0.0, k);
            let v = s.rh.jump_matrix(&pieces[i], &at).unwrap().entries;
            let v0 = s.rh.jump_matrix(&pieces[i], &origin).unwrap().entries;
            let th = at.theta();
            let e = (-Complex64::i() * th).exp();
            let expect = Mat2::diag(e, 1.0 / e) * v0 * Mat2::diag(1.0 / e, e);
            assert!((v - expect).max_abs() <= 1e-9 * v.max_abs().max(1.0), "{lambda:?} at {k}");
        }
    }
}

#[test]
fn contour_and_jump_files_are_well_formed() {
    let s = setup(Lambda::Minus);
    let json = s.rh.contour().to_json();
    let pieces = json["pieces"].as_array().unwrap();
    assert_eq!(pieces.len(), s.rh.contour().pieces.len());
    for p in pieces {
        let ray = p["geometry"] == "ray";
        assert_eq!(ray, p["from"].is_null() || p["to"].is_null());
    }
    let records: Vec<_> = sample_points(&s.rh)
        .into_iter()
        .take(6)
        .map(|(i, k)| s.rh.jump_matrix(&s.rh.contour().pieces[i], &EvalPoint::new(0.1, 0.2, k)).unwrap())
        .collect();
    let mut buf = Vec::new();
    write_jump_jsonl(&records, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), records.len());
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["entries"].as_array().unwrap().len(), 8);
    }
}

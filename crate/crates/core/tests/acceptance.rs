//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;
use std::time::Instant;

use nls_periodic_rh::branch::{Side, SqrtBranch};
use nls_periodic_rh::constant::ConstantParams;
use nls_periodic_rh::contour::PieceLabel;
use nls_periodic_rh::cuts::{build_cuts, default_search_box, in_excluded_disk, locate_zeros, CutSet};
use nls_periodic_rh::jump::RhProblem;
use nls_periodic_rh::nls::{delta_invariance, evolve, real_ksamples, EvolutionConfig};
use nls_periodic_rh::roots::{Rect, RootConfig};
use nls_periodic_rh::spectral::{solve_mu, SolverConfig};
use nls_periodic_rh::{Complex64, EvalPoint, InitialDatum, Lambda, Mat2, SpectralData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const TOL_CLOSED_AB: f64 = 1e-8;
const TOL_DET: f64 = 1e-8;
const TOL_ZERO: f64 = 1e-6;
const TOL_GAMMA: f64 = 1e-9;
const TOL_JUMP: f64 = 1e-9;
const TOL_COMPOSITE: f64 = 1e-10;
const TOL_ORIGIN: f64 = 1e-8;
const TOL_DELTA: f64 = 1e-8;
const TOL_Q: f64 = 1e-8;
const TOL_ROUTE: f64 = 1e-6;
const TOL_EVOLVE: f64 = 1e-10;
const TOL_DRIFT: f64 = 1e-6;
const MIN_REFINEMENT_GAIN: f64 = 3.0;
const RUNTIME_LIMIT_1: f64 = 60.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// a, b for constant data, written out independently of the library.
fn constant_ab(q0: Complex64, l: f64, lam: f64, k: Complex64) -> (Complex64, Complex64) {
    let r = (k * k - lam * q0.norm_sqr()).sqrt();
    let e = (Complex64::i() * k * l).exp();
    // sin(Lr)/r is even in r, so the branch of r is immaterial
    let sinc = if r.norm() * l < 1e-6 { c(l, 0.0) } else { (r * l).sin() / r };
    (e * ((r * l).cos() - Complex64::i() * k * sinc), -q0 * e * sinc)
}

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn constant_sets() -> [ConstantParams; 2] {
    [
        ConstantParams::new(1.0, PI, Lambda::Plus).unwrap(),
        ConstantParams::new(0.7, 2.0, Lambda::Minus).unwrap(),
    ]
}

/// Spectral data and the cut of constant data.
fn constant_pipeline(p: &ConstantParams) -> (Arc<SpectralData>, CutSet) {
    let sd = Arc::new(SpectralData::new(p.datum()));
    let q = 1.2 * p.q0;
    let z = locate_zeros(&sd, Rect::new(-q, q, -q, q), &RootConfig::default()).unwrap();
    let cuts = build_cuts(&sd, &z).unwrap();
    (sd, cuts)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut used = 0usize;
    for p in constant_sets() {
        let datum = p.datum();
        let lam = p.lam();
        for i in 0..41 {
            for j in 0..21 {
                let k = c(-20.0 + i as f64, -3.0 + 0.3 * j as f64);
                let (_, b_bar_exact) = {
                    let (a, b) = constant_ab(c(p.q0, 0.0), p.period, lam, k.conj());
                    (a.conj(), b.conj())
                };
                if b_bar_exact.norm() < 1e-10 {
                    continue;
                }
                let (a, b) = solve_mu(&datum, k).map_err(|e| e.to_string())?;
                let (ae, be) = constant_ab(c(p.q0, 0.0), p.period, lam, k);
                // relative to the size of the column (a, b)
                let scale = ae.norm().max(be.norm());
                worst = worst.max((a - ae).norm() / scale).max((b - be).norm() / scale);
                used += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= TOL_CLOSED_AB && secs <= RUNTIME_LIMIT_1,
        format!("max rel err {worst:.2e} over {used} points in {secs:.1} s"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 1..=5u64 {
        let lambda = if seed % 2 == 1 { Lambda::Plus } else { Lambda::Minus };
        let d = InitialDatum::random_band_limited(seed, 4, PI, lambda).unwrap();
        let sd = SpectralData::new(d);
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        for _ in 0..200 {
            let k = c(rng.random_range(-20.0..20.0), rng.random_range(-3.0..3.0));
            worst = worst.max(sd.det_residual(k).map_err(|e| e.to_string())?);
        }
    }
    check(worst <= TOL_DET, format!("max det residual {worst:.2e} over 5 data x 200 k"))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut report = Vec::new();
    for p in [
        ConstantParams::new(1.0, PI, Lambda::Plus).unwrap(),
        ConstantParams::new(0.7, 2.0, Lambda::Minus).unwrap(),
    ] {
        let sd = SpectralData::new(p.datum());
        let lam = p.lam();
        let l = p.period;
        let rect = default_search_box(&sd, 6);
        let zeros = locate_zeros(&sd, rect, &RootConfig::default()).map_err(|e| e.to_string())?;
        let (lp, lm) = p.lambda_pm();
        let mut expect: Vec<(Complex64, u32)> = vec![(lp, 1), (lm, 1)];
        for n in 1..=5 {
            let v = (c(n as f64 * n as f64 * PI * PI + lam * l * l * p.q0 * p.q0, 0.0)).sqrt() / l;
            expect.push((v, 2));
            expect.push((-v, 2));
        }
        for (z, order) in expect {
            let hit = zeros
                .iter()
                .filter(|b| b.order == order)
                .map(|b| (b.location - z).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(hit);
        }
        report.push(format!("{} zeros", zeros.len()));
    }
    check(
        worst <= TOL_ZERO,
        format!("max distance to expected zero {worst:.2e} ({})", report.join(", ")),
    )
}

fn criterion_4() -> Outcome {
    // |Im k| L reaches 80 sin(pi/4) pi ~ 178 on the diagonal ray
    let config = SolverConfig {
        conditioning_bound: 200.0,
        ..SolverConfig::default()
    };
    let data = [
        InitialDatum::random_band_limited(11, 3, PI, Lambda::Plus).unwrap(),
        InitialDatum::constant(c(0.3, 0.0), PI, Lambda::Minus).unwrap(),
    ];
    let mut worst = 0.0f64;
    for d in data {
        let sd = Arc::new(SpectralData::with_config(d, config));
        let zeros = locate_zeros(&sd, default_search_box(&sd, 4), &RootConfig::default())
            .map_err(|e| e.to_string())?;
        let cuts = build_cuts(&sd, &zeros).map_err(|e| e.to_string())?;
        let branch = SqrtBranch::new(sd.clone(), cuts).map_err(|e| e.to_string())?;
        let l = sd.period();
        for r in [20.0, 40.0, 80.0] {
            for arg in [0.0, FRAC_PI_4] {
                let mut k = Complex64::from_polar(r, arg);
                if in_excluded_disk(l, k) {
                    // midpoint between neighbouring disks
                    let n = (k.re * l / PI).floor();
                    k = c((n + 0.5) * PI / l, k.im);
                }
                let root = branch.eval(k, Side::Off).map_err(|e| e.to_string())?;
                let s = 2.0 * (k * l).sin();
                let dev = (root / s - 1.0).norm() * k.norm();
                worst = worst.max(dev / 0.5);
            }
        }
    }
    check(
        worst <= 1.0,
        format!("max |ratio - 1| |k| / 0.5 = {worst:.2e} at |k| in {{20, 40, 80}}"),
    )
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in constant_sets() {
        let (sd, cuts) = constant_pipeline(&p);
        let rh = RhProblem::new(sd, cuts).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let k = c(rng.random_range(-4.0..4.0), rng.random_range(-2.0..2.0));
            if p.on_cut(k) {
                continue;
            }
            let g = rh.gamma().value_from(k, None).map_err(|e| e.to_string())?;
            let r = k * (1.0 - p.lam() * p.q0 * p.q0 / (k * k)).sqrt();
            let exact = -p.lam() * Complex64::i() * (k - r) / p.q0;
            worst = worst.max((g - exact).norm() / exact.norm().max(1.0));
        }
    }
    check(worst <= TOL_GAMMA, format!("max gamma error {worst:.2e} on 100 points"))
}

/// The D1 cut factor and the first axis jump transcribed directly, fed with
/// closed-form a, b and boundary values of Γ̃.
fn composite_oracle(p: &ConstantParams, pt: &EvalPoint, plus: Complex64) -> Mat2 {
    let k = pt.k;
    let lam = p.lam();
    let (a, b) = constant_ab(c(p.q0, 0.0), p.period, lam, k);
    let (ab, bb) = {
        let (x, y) = constant_ab(c(p.q0, 0.0), p.period, lam, k.conj());
        (x.conj(), y.conj())
    };
    let gp = p.gamma(k, Some(plus)).unwrap();
    let gm = p.gamma(k, Some(-plus)).unwrap();
    let gbm = p.gamma(k.conj(), Some((-plus).conj())).unwrap().conj();
    let e2 = (2.0 * Complex64::i() * k * p.period).exp();
    let p2 = (2.0 * Complex64::i() * pt.theta()).exp();
    let den = |g: Complex64| a + lam * bb * g * e2;
    let vd1 = Mat2::new(den(gp) / den(gm), (gm - gp) * e2 / p2, c(0.0, 0.0), den(gm) / den(gp));
    let big = a - lam * b * gbm;
    let v1 = Mat2::new(
        (big - lam * gm * (ab * gbm - bb) * e2) / big,
        -gm * e2 / p2,
        lam * gbm * p2 / (big * den(gm)),
        a / den(gm),
    );
    vd1 * v1
}

fn criterion_6() -> Outcome {
    let mut worst_closed = 0.0f64;
    let mut worst_det = 0.0f64;
    let mut samples = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for p in constant_sets() {
        let (sd, cuts) = constant_pipeline(&p);
        let rh = RhProblem::new(sd, cuts).map_err(|e| e.to_string())?;
        for piece in rh.contour().pieces.clone() {
            for s in [0.13, 0.37, 0.5, 0.71, 0.94] {
                let k = piece.sample(s);
                let pt = EvalPoint::new(rng.random_range(0.0..p.period), rng.random_range(0.0..1.0), k);
                let generic = rh.jump_matrix(&piece, &pt).map_err(|e| e.to_string())?;
                let closed = p.closed_jump(piece.label, &pt).map_err(|e| e.to_string())?;
                let scale = closed.max_abs().max(1.0);
                worst_closed = worst_closed.max((generic.entries - closed).max_abs() / scale);
                worst_det = worst_det.max(generic.det_residual());
                samples += 1;
            }
        }
    }
    // composite factorisation on the focusing cut along iR+
    let p = ConstantParams::new(0.7, 2.0, Lambda::Minus).unwrap();
    let (sd, cuts) = constant_pipeline(&p);
    let rh = RhProblem::new(sd, cuts).map_err(|e| e.to_string())?;
    let mut worst_comp = 0.0f64;
    for piece in rh.contour().pieces_with(PieceLabel::V1Cut) {
        for s in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let pt = EvalPoint::new(0.4, 0.6, piece.sample(s));
            let generic = rh.jump_matrix(piece, &pt).map_err(|e| e.to_string())?;
            let oracle = composite_oracle(&p, &pt, piece.plus_normal());
            worst_comp = worst_comp.max((generic.entries - oracle).max_abs() / oracle.max_abs().max(1.0));
        }
    }
    check(
        worst_closed <= TOL_JUMP && worst_det <= TOL_JUMP && worst_comp <= TOL_COMPOSITE,
        format!(
            "closed-form {worst_closed:.2e}, det {worst_det:.2e} over {samples} points; composite {worst_comp:.2e}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in constant_sets() {
        let (sd, cuts) = constant_pipeline(&p);
        let rh = RhProblem::new(sd, cuts).map_err(|e| e.to_string())?;
        for _ in 0..3 {
            let (x, t) = (rng.random_range(0.0..p.period), rng.random_range(0.0..1.0));
            worst = worst.max(rh.verify_origin_consistency(x, t).map_err(|e| e.to_string())?);
        }
    }
    check(worst <= TOL_ORIGIN, format!("max |product - I| {worst:.2e}"))
}

fn criterion_8() -> Outcome {
    let mut plemelj = 0.0f64;
    let mut dinf = 0.0f64;
    let mut c0_err = 0.0f64;
    for p in constant_sets() {
        let n = p.lambda_pm().0 / p.q0 * Complex64::i();
        for s in [-0.8, -0.3, 0.1, 0.55, 0.9] {
            let k = p.lambda_pm().0 * s;
            let (x, t) = (0.3 * p.period, 0.5);
            let dp = p.delta_from(x, t, k, Some(n)).map_err(|e| e.to_string())?;
            let dm = p.delta_from(x, t, k, Some(-n)).map_err(|e| e.to_string())?;
            let f = p.f_function(x, t, k).map_err(|e| e.to_string())?;
            plemelj = plemelj.max((dp * dm - f).norm() / f.norm());
        }
        for t in [0.0, 0.5, 1.0] {
            dinf = dinf.max(p.delta_infinity(0.2, t).map_err(|e| e.to_string())?.discrepancy);
        }
        let expected = if p.lambda == Lambda::Plus { c(0.0, 0.0) } else { c(0.0, -FRAC_PI_4) };
        c0_err = c0_err.max((p.c0().map_err(|e| e.to_string())? - expected).norm());
    }
    check(
        plemelj <= TOL_DELTA && dinf <= TOL_DELTA && c0_err <= TOL_DELTA,
        format!("plemelj {plemelj:.2e}, delta_inf {dinf:.2e}, c0 {c0_err:.2e}"),
    )
}

fn criterion_9() -> Outcome {
    let sets = [
        ConstantParams::new(1.0, PI, Lambda::Plus).unwrap(),
        ConstantParams::new(0.7, 2.0, Lambda::Minus).unwrap(),
        ConstantParams::new(2.0, 1.0, Lambda::Plus).unwrap(),
    ];
    let mut err = 0.0f64;
    let mut route = 0.0f64;
    for p in sets {
        for i in 0..5 {
            for j in 0..5 {
                let (x, t) = (p.period * i as f64 / 5.0, 0.25 * j as f64);
                let r = p.recover_q(x, t).map_err(|e| e.to_string())?;
                let exact = p.q0 * Complex64::from_polar(1.0, -2.0 * p.lam() * p.q0 * p.q0 * t);
                err = err.max((r.from_delta - exact).norm());
                route = route.max(r.route_disagreement());
            }
        }
    }
    check(
        err <= TOL_Q && route <= TOL_ROUTE,
        format!("q error {err:.2e}, route disagreement {route:.2e} on 3 x 25 points"),
    )
}

fn criterion_10() -> Outcome {
    let mut evolve_err = 0.0f64;
    for p in constant_sets() {
        let cfg = EvolutionConfig::new(p.period, p.lambda, 1.0);
        let out = evolve(&p.datum(), &cfg).map_err(|e| e.to_string())?;
        let exact = p.q0 * Complex64::from_polar(1.0, -2.0 * p.lam() * p.q0 * p.q0);
        for v in out.sample(cfg.modes) {
            evolve_err = evolve_err.max((v - exact).norm());
        }
    }
    let d = InitialDatum::random_band_limited(10, 4, PI, Lambda::Plus).unwrap();
    let cfg = EvolutionConfig::new(PI, Lambda::Plus, 0.1);
    let ks = real_ksamples(32, 10.0);
    let drift = delta_invariance(&d, &cfg, &ks).map_err(|e| e.to_string())?;
    let refined = delta_invariance(&d, &cfg.refined(), &ks).map_err(|e| e.to_string())?;
    let gain = drift / refined;
    check(
        evolve_err <= TOL_EVOLVE && drift <= TOL_DRIFT && gain >= MIN_REFINEMENT_GAIN,
        format!("constant evolution {evolve_err:.2e}, drift {drift:.2e} -> {refined:.2e} (x{gain:.2})"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("constant-data spectral functions", criterion_1),
        ("determinant identity", criterion_2),
        ("zero catalogue", criterion_3),
        ("branch fixing", criterion_4),
        ("gamma closed form", criterion_5),
        ("jump matrices", criterion_6),
        ("origin consistency", criterion_7),
        ("delta machinery", criterion_8),
        ("end-to-end constant solution", criterion_9),
        ("oracle consistency", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

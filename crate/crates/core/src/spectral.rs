//! Spectral functions a(k), b(k) of a periodic datum and the discriminant.
//!
//! The pair (mu1, mu2) solves the final-value problem
//!
//! ```text
//! mu1' = -2ik mu1 + q0(x) mu2,   mu2' = lambda conj(q0(x)) mu1,
//! mu1(L) = 0,  mu2(L) = 1,
//! ```
//!
//! integrated from x = L down to x = 0, and a(k) = mu2(0), b(k) = mu1(0).
//! The integrator is the fourth-order two-point Gauss Magnus scheme with an
//! exact 2x2 exponential per step. It is exact for constant potentials, so
//! the large diagonal term -2ik never limits the step size by itself.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::datum::InitialDatum;
use crate::error::{Error, Result};
use crate::mat2::Mat2;

const GAUSS_C1: f64 = 0.5 - 0.288_675_134_594_812_9; // 1/2 - sqrt(3)/6
const GAUSS_C2: f64 = 0.5 + 0.288_675_134_594_812_9;
const SQRT3_OVER_12: f64 = 0.144_337_567_297_406_43;

/// A point (x, t, k) at which x,t-dependent quantities are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    pub x: f64,
    pub t: f64,
    pub k: Complex64,
}

impl EvalPoint {
    pub fn new(x: f64, t: f64, k: Complex64) -> Self {
        EvalPoint { x, t, k }
    }

    pub fn theta(&self) -> Complex64 {
        theta(self)
    }
}

/// theta(x, t, k) = k x + 2 k^2 t.
pub fn theta(p: &EvalPoint) -> Complex64 {
    p.k * p.x + 2.0 * p.k * p.k * p.t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Reject k with |Im k| * L above this bound.
    pub conditioning_bound: f64,
    /// Richardson error target per unit length, relative to max(1, |mu|).
    pub tol_per_length: f64,
    pub max_steps: usize,
    /// Tolerance for the unit-determinant identity.
    pub identity_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            conditioning_bound: 40.0,
            tol_per_length: 1e-12,
            max_steps: 1 << 20,
            identity_tol: 1e-8,
        }
    }
}

/// Result of one final-value solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuSolution {
    pub a: Complex64,
    pub b: Complex64,
    /// Richardson estimate of the absolute error in (a, b).
    pub error_estimate: f64,
    pub steps: usize,
}

/// Evaluator of a(k), b(k) and the discriminant for one datum.
///
/// Potential values at the Gauss nodes are tabulated once per step count and
/// solves are memoised per k; both caches are guarded so one instance can be
/// shared across threads.
#[derive(Debug)]
pub struct SpectralData {
    datum: InitialDatum,
    config: SolverConfig,
    tables: Mutex<HashMap<usize, Arc<Vec<[Complex64; 2]>>>>,
    cache: Mutex<HashMap<(u64, u64), MuSolution>>,
}

impl Clone for SpectralData {
    fn clone(&self) -> Self {
        SpectralData::with_config(self.datum.clone(), self.config)
    }
}

impl SpectralData {
    pub fn new(datum: InitialDatum) -> Self {
        Self::with_config(datum, SolverConfig::default())
    }

    pub fn with_config(datum: InitialDatum, config: SolverConfig) -> Self {
        SpectralData {
            datum,
            config,
            tables: Mutex::new(HashMap::new()),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn datum(&self) -> &InitialDatum {
        &self.datum
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn period(&self) -> f64 {
        self.datum.period()
    }

    pub fn lambda(&self) -> f64 {
        self.datum.lambda().value()
    }

    pub fn cached_points(&self) -> usize {
        self.cache.lock().unwrap().len()
    }

    fn initial_steps(&self) -> usize {
        if self.datum.as_constant().is_some() {
            2
        } else {
            (8 * (self.datum.max_mode() as usize + 1)).next_power_of_two().max(16)
        }
    }

    fn node_table(&self, steps: usize) -> Arc<Vec<[Complex64; 2]>> {
        if let Some(t) = self.tables.lock().unwrap().get(&steps) {
            return t.clone();
        }
        let l = self.datum.period();
        let h = -l / steps as f64;
        let table: Vec<[Complex64; 2]> = (0..steps)
            .map(|j| {
                let x0 = l + h * j as f64;
                [self.datum.eval(x0 + GAUSS_C1 * h), self.datum.eval(x0 + GAUSS_C2 * h)]
            })
            .collect();
        let table = Arc::new(table);
        self.tables.lock().unwrap().insert(steps, table.clone());
        table
    }

    fn check_conditioning(&self, k: Complex64) -> Result<()> {
        let product = k.im.abs() * self.datum.period();
        if !(k.re.is_finite() && k.im.is_finite()) || product > self.config.conditioning_bound {
            return Err(Error::Conditioning {
                k,
                product,
                bound: self.config.conditioning_bound,
            });
        }
        Ok(())
    }

    /// Fixed-step Magnus integration from x = L to x = 0; returns (b, a).
    pub fn integrate_fixed(&self, k: Complex64, steps: usize) -> Result<[Complex64; 2]> {
        self.check_conditioning(k)?;
        let lambda = self.lambda();
        let h = -self.datum.period() / steps as f64;
        let diag = Complex64::new(0.0, -2.0) * k;
        let zero = Complex64::new(0.0, 0.0);
        let mut mu = [zero, Complex64::new(1.0, 0.0)];
        if self.datum.is_zero() {
            return Ok(mu);
        }
        let table = self.node_table(steps);
        for [q1, q2] in table.iter() {
            let a1 = Mat2::new(diag, *q1, q1.conj() * lambda, zero);
            let a2 = Mat2::new(diag, *q2, q2.conj() * lambda, zero);
            let comm = a2 * a1 - a1 * a2;
            let s = 0.5 * h;
            let s2 = SQRT3_OVER_12 * h * h;
            let omega = Mat2::new(
                (a1.0[0][0] + a2.0[0][0]) * s + comm.0[0][0] * s2,
                (a1.0[0][1] + a2.0[0][1]) * s + comm.0[0][1] * s2,
                (a1.0[1][0] + a2.0[1][0]) * s + comm.0[1][0] * s2,
                comm.0[1][1] * s2,
            );
            mu = omega.exp().apply(mu);
        }
        if !(mu[0].re.is_finite() && mu[0].im.is_finite() && mu[1].re.is_finite() && mu[1].im.is_finite()) {
            return Err(Error::StepFailure { k, steps });
        }
        Ok(mu)
    }

    /// a(k), b(k) with Richardson step doubling until the error estimate
    /// drops below `tol_per_length * L * max(1, |mu|)`.
    pub fn solve(&self, k: Complex64) -> Result<MuSolution> {
        let key = (k.re.to_bits(), k.im.to_bits());
        if let Some(s) = self.cache.lock().unwrap().get(&key) {
            return Ok(*s);
        }
        let sol = self.solve_uncached(k)?;
        self.cache.lock().unwrap().insert(key, sol);
        Ok(sol)
    }

    fn solve_uncached(&self, k: Complex64) -> Result<MuSolution> {
        self.check_conditioning(k)?;
        let tol = self.config.tol_per_length * self.datum.period();
        let mut steps = self.initial_steps();
        let mut coarse = self.integrate_fixed(k, steps)?;
        while 2 * steps <= self.config.max_steps {
            steps *= 2;
            let fine = self.integrate_fixed(k, steps)?;
            let err = ((fine[0] - coarse[0]).norm()).max((fine[1] - coarse[1]).norm()) / 15.0;
            let scale = fine[0].norm().max(fine[1].norm()).max(1.0);
            if err <= tol * scale {
                let b = fine[0] + (fine[0] - coarse[0]) / 15.0;
                let a = fine[1] + (fine[1] - coarse[1]) / 15.0;
                return Ok(MuSolution {
                    a,
                    b,
                    error_estimate: err,
                    steps,
                });
            }
            coarse = fine;
        }
        Err(Error::StepFailure { k, steps })
    }

    pub fn a(&self, k: Complex64) -> Result<Complex64> {
        Ok(self.solve(k)?.a)
    }

    pub fn b(&self, k: Complex64) -> Result<Complex64> {
        Ok(self.solve(k)?.b)
    }

    /// Schwarz conjugate conj(a(conj k)), from its own solve at conj k.
    pub fn a_bar(&self, k: Complex64) -> Result<Complex64> {
        Ok(self.solve(k.conj())?.a.conj())
    }

    pub fn b_bar(&self, k: Complex64) -> Result<Complex64> {
        Ok(self.solve(k.conj())?.b.conj())
    }

    /// (a, b, a_bar, b_bar) at k.
    pub fn abab(&self, k: Complex64) -> Result<SpectralValues> {
        let s = self.solve(k)?;
        let sb = self.solve(k.conj())?;
        Ok(SpectralValues {
            k,
            a: s.a,
            b: s.b,
            a_bar: sb.a.conj(),
            b_bar: sb.b.conj(),
        })
    }

    /// Delta(k) = a(k) e^{-ikL} + conj(a(conj k)) e^{ikL}.
    pub fn discriminant(&self, k: Complex64) -> Result<Complex64> {
        let a = self.a(k)?;
        let a_bar = self.a_bar(k)?;
        let e = (Complex64::i() * k * self.period()).exp();
        Ok(a / e + a_bar * e)
    }

    /// Residual of a a_bar - lambda b b_bar = 1, normalised by the size of the
    /// two products so that it measures relative cancellation error.
    pub fn det_residual(&self, k: Complex64) -> Result<f64> {
        let v = self.abab(k)?;
        Ok(v.det_residual(self.lambda()))
    }

    /// Evaluate a batch of points in parallel; failures are recorded per point.
    pub fn evaluate_batch(&self, kset: &[Complex64]) -> Vec<SpectralRecord> {
        kset.par_iter()
            .map(|&k| {
                let outcome = self.abab(k).map(|v| (v.a, v.b, v.det_residual(self.lambda())));
                match outcome {
                    Ok((a, b, residual)) => SpectralRecord {
                        k,
                        a,
                        b,
                        det_residual: residual,
                        failure: None,
                    },
                    Err(e) => SpectralRecord {
                        k,
                        a: Complex64::new(f64::NAN, f64::NAN),
                        b: Complex64::new(f64::NAN, f64::NAN),
                        det_residual: f64::NAN,
                        failure: Some(e.to_string()),
                    },
                }
            })
            .collect()
    }
}

/// a, b and their Schwarz conjugates at one k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralValues {
    pub k: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub a_bar: Complex64,
    pub b_bar: Complex64,
}

impl SpectralValues {
    pub fn det_residual(&self, lambda: f64) -> f64 {
        let p = self.a * self.a_bar;
        let q = self.b * self.b_bar * lambda;
        let scale = p.norm().max(q.norm()).max(1.0);
        (p - q - 1.0).norm() / scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRecord {
    pub k: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub det_residual: f64,
    pub failure: Option<String>,
}

/// Result of [`spectral_functions`]: the populated evaluator and one record per k.
#[derive(Debug)]
pub struct SpectralBatch {
    pub data: SpectralData,
    pub records: Vec<SpectralRecord>,
}

impl SpectralBatch {
    pub fn max_residual(&self) -> f64 {
        self.records
            .iter()
            .filter(|r| r.failure.is_none())
            .map(|r| r.det_residual)
            .fold(0.0, f64::max)
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.failure.is_some()).count()
    }

    /// CSV columns: k_re, k_im, a_re, a_im, b_re, b_im, det_residual.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k_re", "k_im", "a_re", "a_im", "b_re", "b_im", "det_residual"])?;
        for r in &self.records {
            w.write_record(
                [r.k.re, r.k.im, r.a.re, r.a.im, r.b.re, r.b.im, r.det_residual]
                    .iter()
                    .map(|v| format!("{v:.17e}")),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// (a(k), b(k)) for a single k with default solver settings.
pub fn solve_mu(datum: &InitialDatum, k: Complex64) -> Result<(Complex64, Complex64)> {
    let s = SpectralData::new(datum.clone()).solve(k)?;
    Ok((s.a, s.b))
}

pub fn spectral_functions(datum: &InitialDatum, kset: &[Complex64]) -> Result<SpectralBatch> {
    if kset.is_empty() {
        return Err(Error::InvalidInput("empty k set".into()));
    }
    let data = SpectralData::new(datum.clone());
    let records = data.evaluate_batch(kset);
    Ok(SpectralBatch { data, records })
}

/// Closed-form a, b for constant data: r = sqrt(k^2 - lambda q0^2),
/// a = e^{ikL}(cos Lr - ik sin(Lr)/r), b = -q0 e^{ikL} sin(Lr)/r.
/// Both are even in r, so the branch of r is immaterial.
pub fn constant_ab(q0: Complex64, period: f64, lambda: f64, k: Complex64) -> (Complex64, Complex64) {
    let r = (k * k - lambda * q0.norm_sqr()).sqrt();
    let lr = r * period;
    let sinc = if lr.norm() < 1e-8 {
        Complex64::new(period, 0.0) * (1.0 - lr * lr / 6.0)
    } else {
        lr.sin() / r
    };
    let e = (Complex64::i() * k * period).exp();
    let a = e * (lr.cos() - Complex64::i() * k * sinc);
    let b = -q0 * e * sinc;
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::Lambda;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn theta_values() {
        assert_eq!(theta(&EvalPoint::new(0.0, 0.0, c(5.0, 0.0))), c(0.0, 0.0));
        assert_eq!(theta(&EvalPoint::new(1.0, 0.0, c(2.0, 0.0))), c(2.0, 0.0));
        let v = theta(&EvalPoint::new(1.0, 1.0, c(1.0, 1.0)));
        assert!((v - c(1.0, 5.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_potential_gives_trivial_data() {
        let d = InitialDatum::zero(2.0, Lambda::Plus).unwrap();
        for k in [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)] {
            let (a, b) = solve_mu(&d, k).unwrap();
            assert_eq!(a, c(1.0, 0.0));
            assert_eq!(b, c(0.0, 0.0));
        }
        let sd = SpectralData::new(d);
        let k = c(0.7, 0.3);
        let delta = sd.discriminant(k).unwrap();
        assert!((delta - 2.0 * (k * 2.0).cos()).norm() < 1e-14);
    }

    #[test]
    fn constant_potential_matches_closed_form() {
        for (q0, l, lam) in [(1.0, std::f64::consts::PI, Lambda::Plus), (0.7, 2.0, Lambda::Minus)] {
            let d = InitialDatum::constant(c(q0, 0.0), l, lam).unwrap();
            let sd = SpectralData::new(d);
            for k in [c(0.3, 0.0), c(-1.7, 0.4), c(5.0, -2.0), c(0.0, 1.1)] {
                let s = sd.solve(k).unwrap();
                let (a, b) = constant_ab(c(q0, 0.0), l, lam.value(), k);
                assert!((s.a - a).norm() <= 1e-12 * a.norm().max(1.0), "a at {k}");
                assert!((s.b - b).norm() <= 1e-12 * b.norm().max(1.0), "b at {k}");
            }
        }
    }

    #[test]
    fn conditioning_guard() {
        let d = InitialDatum::constant(c(1.0, 0.0), 1.0, Lambda::Plus).unwrap();
        let sd = SpectralData::new(d);
        assert!(matches!(sd.solve(c(0.0, -41.0)), Err(Error::Conditioning { .. })));
        assert!(sd.solve(c(0.0, -39.0)).is_ok());
    }

    #[test]
    fn batch_flags_failures_without_aborting() {
        let d = InitialDatum::constant(c(1.0, 0.0), 1.0, Lambda::Plus).unwrap();
        let batch = spectral_functions(&d, &[c(0.5, 0.0), c(0.0, 100.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(batch.failures(), 1);
        assert!(batch.records[1].failure.is_some());
        assert!(batch.max_residual() < 1e-12);
        assert!(spectral_functions(&d, &[]).is_err());
    }

    #[test]
    fn csv_header() {
        let d = InitialDatum::zero(1.0, Lambda::Plus).unwrap();
        let batch = spectral_functions(&d, &[c(0.0, 0.0)]).unwrap();
        let mut buf = Vec::new();
        batch.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k_re,k_im,a_re,a_im,b_re,b_im,det_residual\n"));
        assert_eq!(text.lines().count(), 2);
    }
}

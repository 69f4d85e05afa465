//! Split-step Fourier evolution of `i q_t + q_xx - 2 lambda q |q|^2 = 0` on one period.
//!
//! Used only as an independent witness: the discriminant must not move under the flow.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::datum::{InitialDatum, Lambda};
use crate::error::{Error, Result};
use crate::spectral::SpectralData;

/// Relative size a mode outside the grid band may have before the datum counts as unresolved.
pub const RESOLUTION_TAIL: f64 = 1e-12;
/// Upper bound on `dt * max|q|^2`.
pub const STABILITY_LIMIT: f64 = 0.1;
/// Blow-up guard as a multiple of the initial sup norm.
pub const BLOW_UP_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolutionConfig {
    /// Grid size; a power of two.
    pub modes: usize,
    pub dt: f64,
    pub final_time: f64,
    pub lambda: Lambda,
    pub period: f64,
}

impl EvolutionConfig {
    pub fn new(period: f64, lambda: Lambda, final_time: f64) -> Self {
        EvolutionConfig {
            modes: 64,
            dt: 1e-3,
            final_time,
            lambda,
            period,
        }
    }

    /// Halved step on a doubled grid.
    pub fn refined(&self) -> Self {
        EvolutionConfig {
            modes: self.modes * 2,
            dt: self.dt / 2.0,
            ..*self
        }
    }

    fn validate(&self, datum: &InitialDatum) -> Result<()> {
        if !self.modes.is_power_of_two() || self.modes < 4 {
            return Err(Error::InvalidInput(format!(
                "mode count must be a power of two >= 4, got {}",
                self.modes
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidInput(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.final_time >= 0.0 && self.final_time.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "final time must be nonnegative, got {}",
                self.final_time
            )));
        }
        if (self.period - datum.period()).abs() > 1e-14 * self.period || self.lambda != datum.lambda() {
            return Err(Error::InvalidInput(
                "evolution period and lambda must match the datum".into(),
            ));
        }
        let m = datum.max_abs();
        if self.dt * m * m > STABILITY_LIMIT {
            return Err(Error::InvalidInput(format!(
                "dt * max|q|^2 = {:.3e} exceeds {STABILITY_LIMIT}",
                self.dt * m * m
            )));
        }
        let peak = datum.modes().iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
        let half = (self.modes / 2) as i64;
        for (n, c) in datum.modes() {
            if n.abs() >= half && c.norm() > RESOLUTION_TAIL * peak {
                return Err(Error::Resolution(format!(
                    "mode {n} of size {:.3e} is not representable on {} points",
                    c.norm(),
                    self.modes
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionReport {
    pub datum: InitialDatum,
    pub steps: usize,
    /// Step actually used: `final_time / steps`.
    pub dt: f64,
    pub mass_initial: f64,
    pub mass_final: f64,
}

impl EvolutionReport {
    pub fn mass_drift(&self) -> f64 {
        (self.mass_final - self.mass_initial).abs() / self.mass_initial.max(1e-300)
    }
}

/// Evolves `datum` to `cfg.final_time` and returns the state as uniform samples.
pub fn evolve(datum: &InitialDatum, cfg: &EvolutionConfig) -> Result<InitialDatum> {
    evolve_report(datum, cfg).map(|r| r.datum)
}

/// Strang splitting: half linear step, full nonlinear rotation, half linear step.
pub fn evolve_report(datum: &InitialDatum, cfg: &EvolutionConfig) -> Result<EvolutionReport> {
    cfg.validate(datum)?;
    let n = cfg.modes;
    let steps = ((cfg.final_time / cfg.dt).ceil() as usize).max(1);
    let dt = cfg.final_time / steps as f64;
    let lam = cfg.lambda.value();

    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let w = 2.0 * PI / cfg.period;
    let half_linear: Vec<Complex64> = (0..n)
        .map(|j| {
            let m = if 2 * j <= n { j as f64 } else { j as f64 - n as f64 };
            let xi = w * m;
            Complex64::from_polar(1.0, -xi * xi * dt / 2.0)
        })
        .collect();

    let mut q = datum.sample(n);
    let mass = |q: &[Complex64]| q.iter().map(|c| c.norm_sqr()).sum::<f64>() * cfg.period / n as f64;
    let mass_initial = mass(&q);
    let sup0 = q.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let guard = BLOW_UP_FACTOR * sup0.max(f64::MIN_POSITIVE);
    let scale = 1.0 / n as f64;

    let linear = |q: &mut Vec<Complex64>| {
        forward.process(q);
        for (c, f) in q.iter_mut().zip(&half_linear) {
            *c *= f * scale;
        }
        inverse.process(q);
    };

    for _ in 0..steps {
        linear(&mut q);
        let mut sup = 0.0f64;
        for c in q.iter_mut() {
            let m2 = c.norm_sqr();
            *c *= Complex64::from_polar(1.0, -2.0 * lam * m2 * dt);
            sup = sup.max(m2.sqrt());
        }
        if !(sup <= guard) {
            return Err(Error::BlowUp { max_abs: sup, guard });
        }
        linear(&mut q);
    }

    let mass_final = mass(&q);
    Ok(EvolutionReport {
        datum: InitialDatum::samples(q, cfg.period, cfg.lambda)?,
        steps,
        dt,
        mass_initial,
        mass_final,
    })
}

/// Max over `ksamples` of `|Delta_t(k) - Delta_0(k)| / (1 + |Delta_0(k)|)`.
pub fn delta_invariance(datum: &InitialDatum, cfg: &EvolutionConfig, ksamples: &[Complex64]) -> Result<f64> {
    let evolved = evolve(datum, cfg)?;
    let before = Arc::new(SpectralData::new(datum.clone()));
    let after = Arc::new(SpectralData::new(evolved));
    let drifts = ksamples
        .par_iter()
        .map(|&k| {
            let d0 = before.discriminant(k)?;
            let d1 = after.discriminant(k)?;
            Ok((d1 - d0).norm() / (1.0 + d0.norm()))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(drifts.into_iter().fold(0.0, f64::max))
}

/// `count` equispaced real points in `[-kmax, kmax]`.
pub fn real_ksamples(count: usize, kmax: f64) -> Vec<Complex64> {
    if count == 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    (0..count)
        .map(|j| Complex64::new(-kmax + 2.0 * kmax * j as f64 / (count - 1) as f64, 0.0))
        .collect()
}

//! The branch of √(4 - Δ²) fixed by √(4 - Δ²) ~ 2 sin(kL) at infinity and
//! single-valued off the cut set.
//!
//! Values are obtained by continuation from an anchor A on ℝ beyond every
//! cut (midway between two excluded disks, where the sign is read off from
//! 2 sin(AL)). The path climbs vertically to a horizontal trunk at
//! Im k = ±H above all cuts, runs along it, and descends vertically to the
//! target. Such paths never cross a cut. Tracking uses a cheap fixed-step
//! Δ; the returned value is the accurate root with the tracked sign.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::cuts::{CutSegment, CutSet};
use crate::error::{Error, Result};
use crate::spectral::SpectralData;

/// Which boundary value to take on a cut. Left and right refer to the cut
/// segment's orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Side {
    Off,
    Left,
    Right,
}

/// Points closer than this (relative to max(1, |k|)) to a cut count as on it.
pub const ON_CUT_TOL: f64 = 1e-12;
/// Offset used to define one-sided limits.
const SIDE_OFFSET: f64 = 1e-8;
/// Trunk points per π/L.
const TRUNK_DENSITY: f64 = 8.0;

pub struct SqrtBranch {
    sd: Arc<SpectralData>,
    cuts: CutSet,
    anchor: f64,
    height: f64,
    spacing: f64,
    /// Tracked values at A + j*spacing ± iH, keyed by (upper, j).
    trunk: Mutex<HashMap<(bool, i64), Complex64>>,
}

impl SqrtBranch {
    pub fn new(sd: Arc<SpectralData>, cuts: CutSet) -> Result<Self> {
        let l = sd.period();
        let reach = cuts
            .points
            .iter()
            .map(|p| p.location.re.abs())
            .fold(cuts.max_abs_re(), f64::max);
        let n_anchor = (reach * l / PI).floor() + 1.0;
        let anchor = (n_anchor + 0.5) * PI / l;
        let height = cuts.max_abs_im() + PI / (4.0 * l);
        if height * l > sd.config().conditioning_bound {
            return Err(Error::InvalidInput(format!(
                "cut set reaches |Im k| = {height:.3}, beyond the conditioning bound"
            )));
        }
        Ok(SqrtBranch {
            sd,
            cuts,
            anchor,
            height,
            spacing: PI / (TRUNK_DENSITY * l),
            trunk: Mutex::new(HashMap::new()),
        })
    }

    pub fn spectral(&self) -> &Arc<SpectralData> {
        &self.sd
    }

    pub fn cuts(&self) -> &CutSet {
        &self.cuts
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    /// The cut segment through k, if any.
    pub fn segment_at(&self, k: Complex64) -> Option<&CutSegment> {
        self.cuts.segment_at(k, ON_CUT_TOL * k.norm().max(1.0))
    }

    /// √(4 - Δ²) at k; on a cut `side` selects the boundary value.
    pub fn eval(&self, k: Complex64, side: Side) -> Result<Complex64> {
        match (self.segment_at(k), side) {
            (None, _) => self.eval_from(k, None),
            (Some(_), Side::Off) => Err(Error::OnCut { at: k }),
            (Some(seg), Side::Left) => self.eval_from(k, Some(seg.plus_normal())),
            (Some(seg), Side::Right) => self.eval_from(k, Some(-seg.plus_normal())),
        }
    }

    /// Limit of √(4 - Δ²) as k is approached from direction `dir` (a unit
    /// vector); with `None` k must lie off the cuts.
    pub fn eval_from(&self, k: Complex64, dir: Option<Complex64>) -> Result<Complex64> {
        let scale = k.norm().max(1.0);
        for p in &self.cuts.points {
            if p.is_odd() && (k - p.location).norm() <= 1e-10 * scale {
                return Err(Error::BranchPointProximity { at: p.location });
            }
        }
        let probe = match dir {
            Some(d) => k + d * (SIDE_OFFSET * scale),
            None => {
                if self.segment_at(k).is_some() {
                    return Err(Error::OnCut { at: k });
                }
                k
            }
        };
        let tracked = self.track_to(probe)?;
        let d = self.sd.discriminant(k)?;
        let root = (4.0 - d * d).sqrt();
        Ok(if (root * tracked.conj()).re >= 0.0 { root } else { -root })
    }

    /// 4 - Δ² from a fixed-step solve; accurate near known zeros, where the
    /// sign decision is delicate.
    fn coarse(&self, k: Complex64) -> Result<Complex64> {
        let near_zero = self
            .cuts
            .points
            .iter()
            .any(|p| (k - p.location).norm() < 0.1 * PI / self.sd.period());
        let d = if near_zero || self.sd.datum().as_constant().is_some() {
            self.sd.discriminant(k)?
        } else {
            let l = self.sd.period();
            let steps = ((4.0 * k.norm() * l) as usize)
                .max(16 * (self.sd.datum().max_mode() as usize + 1))
                .next_power_of_two()
                .max(32);
            let a = self.sd.integrate_fixed(k, steps)?[1];
            let a_bar = self.sd.integrate_fixed(k.conj(), steps)?[1].conj();
            let e = (Complex64::i() * k * l).exp();
            a / e + a_bar * e
        };
        Ok(4.0 - d * d)
    }

    /// Continues the root `s` (with s² ≈ f(from)) along the segment to `to`,
    /// bisecting until the phase of 4 - Δ² moves by less than π/2 per step.
    fn continue_along(&self, from: Complex64, f_from: Complex64, s: Complex64, to: Complex64, steps: usize) -> Result<(Complex64, Complex64)> {
        let mut z = from;
        let mut fz = f_from;
        let mut root = s;
        let n = steps.max(1);
        for j in 1..=n {
            let target = from + (to - from) * (j as f64 / n as f64);
            let (f_t, r_t) = self.step(z, fz, root, target, 0)?;
            z = target;
            fz = f_t;
            root = r_t;
        }
        Ok((fz, root))
    }

    fn step(&self, z: Complex64, fz: Complex64, root: Complex64, target: Complex64, depth: usize) -> Result<(Complex64, Complex64)> {
        let ft = self.coarse(target)?;
        if ft.norm() == 0.0 {
            return Err(Error::BranchPointProximity { at: target });
        }
        // phase and log-modulus separately: |f|² overflows for |Im k| L near 180
        let turn = ((ft / ft.norm()) * (fz / fz.norm()).conj()).arg();
        let growth = ft.norm().ln() - fz.norm().ln();
        if turn.abs() < PI / 2.0 && growth.abs() < 2.0 {
            let r = ft.sqrt();
            let r = if (r * root.conj()).re >= 0.0 { r } else { -r };
            return Ok((ft, r));
        }
        if depth > 40 {
            return Err(Error::BranchPointProximity { at: target });
        }
        let mid = 0.5 * (z + target);
        let (fm, rm) = self.step(z, fz, root, mid, depth + 1)?;
        self.step(mid, fm, rm, target, depth + 1)
    }

    fn segment_steps(&self, a: Complex64, b: Complex64) -> usize {
        ((b - a).norm() / self.spacing).ceil() as usize
    }

    /// Tracked value at trunk point j (upper or lower trunk).
    fn trunk_value(&self, upper: bool, j: i64) -> Result<Complex64> {
        if let Some(v) = self.trunk.lock().unwrap().get(&(upper, j)) {
            return Ok(*v);
        }
        let h = if upper { self.height } else { -self.height };
        let (prev_z, prev_root) = if j == 0 {
            let a = Complex64::new(self.anchor, 0.0);
            let fa = self.coarse(a)?;
            let guide = Complex64::new(2.0 * (self.anchor * self.sd.period()).sin(), 0.0);
            let ra = fa.sqrt();
            let ra = if (ra * guide.conj()).re >= 0.0 { ra } else { -ra };
            (a, ra)
        } else {
            let step = if j > 0 { j - 1 } else { j + 1 };
            let z = Complex64::new(self.anchor + step as f64 * self.spacing, h);
            (z, self.trunk_value(upper, step)?)
        };
        let target = Complex64::new(self.anchor + j as f64 * self.spacing, h);
        let f_prev = self.coarse(prev_z)?;
        let n = self.segment_steps(prev_z, target);
        let (_, r) = self.continue_along(prev_z, f_prev, prev_root, target, n)?;
        self.trunk.lock().unwrap().insert((upper, j), r);
        Ok(r)
    }

    /// Tracked (coarse) root at k, reached along anchor, trunk, descent.
    fn track_to(&self, k: Complex64) -> Result<Complex64> {
        let upper = k.im >= 0.0;
        let h = if upper { self.height } else { -self.height };
        let j = ((k.re - self.anchor) / self.spacing).round() as i64;
        // fill the trunk iteratively to avoid deep recursion
        let dir = j.signum();
        let mut i = 0;
        while i != j {
            self.trunk_value(upper, i)?;
            i += dir;
        }
        let rj = self.trunk_value(upper, j)?;
        let tj = Complex64::new(self.anchor + j as f64 * self.spacing, h);
        let above = Complex64::new(k.re, h);
        let f_tj = self.coarse(tj)?;
        let (f_above, r_above) = self.continue_along(tj, f_tj, rj, above, 1)?;
        let n = self.segment_steps(above, k).max(1);
        let (_, r) = self.continue_along(above, f_above, r_above, k, n)?;
        Ok(r)
    }
}

/// √(4 - Δ²) at k for one-off evaluations.
pub fn sqrt_branch(sd: &Arc<SpectralData>, cuts: &CutSet, k: Complex64, side: Side) -> Result<Complex64> {
    SqrtBranch::new(sd.clone(), cuts.clone())?.eval(k, side)
}

//! Γ̃ = λ/(2e^{ikL} b̄) (ā e^{ikL} - a e^{-ikL} - i√(4 - Δ²)) and its poles.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::branch::{Side, SqrtBranch};
use crate::contour::Quadrant;
use crate::cuts::CutSet;
use crate::error::{Error, Result};
use crate::roots::{find_roots, Rect, RootConfig};
use crate::spectral::SpectralData;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaValue {
    pub k: Complex64,
    pub side: Side,
    pub value: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleData {
    pub location: Complex64,
    pub residue: Complex64,
    pub quadrant: Quadrant,
    /// The Schwarz image p̄ where the conjugate residue condition sits.
    pub conjugate_partner: Complex64,
}

#[derive(Serialize)]
struct PoleRecord {
    location: [f64; 2],
    residue: [f64; 2],
    quadrant: Quadrant,
}

pub fn poles_to_json(poles: &[PoleData]) -> serde_json::Value {
    let recs: Vec<PoleRecord> = poles
        .iter()
        .map(|p| PoleRecord {
            location: [p.location.re, p.location.im],
            residue: [p.residue.re, p.residue.im],
            quadrant: p.quadrant,
        })
        .collect();
    serde_json::to_value(recs).expect("plain records serialize")
}

/// |2e^{ikL} b̄| below this times the numerator's term sizes is a pole candidate.
const POLE_THRESHOLD: f64 = 1e-8;
/// Numerator size (relative) below which a b̄ zero is removable.
const REMOVABLE_TOL: f64 = 1e-6;

/// Γ̃ evaluator bound to a datum and its cut set.
pub struct GammaTilde {
    branch: SqrtBranch,
}

/// Pieces of Γ̃ at one point.
struct Parts {
    num: Complex64,
    den: Complex64,
    /// Size of the terms forming the numerator, for relative tests.
    size: f64,
}

impl GammaTilde {
    pub fn new(sd: Arc<SpectralData>, cuts: CutSet) -> Result<Self> {
        Ok(GammaTilde {
            branch: SqrtBranch::new(sd, cuts)?,
        })
    }

    pub fn branch(&self) -> &SqrtBranch {
        &self.branch
    }

    pub fn spectral(&self) -> &Arc<SpectralData> {
        self.branch.spectral()
    }

    pub fn cuts(&self) -> &CutSet {
        self.branch.cuts()
    }

    fn parts(&self, k: Complex64, dir: Option<Complex64>) -> Result<Parts> {
        let sd = self.spectral();
        let v = sd.abab(k)?;
        let e = (Complex64::i() * k * sd.period()).exp();
        let s = self.branch.eval_from(k, dir)?;
        let t1 = v.a_bar * e;
        let t2 = v.a / e;
        Ok(Parts {
            num: t1 - t2 - Complex64::i() * s,
            den: 2.0 * e * v.b_bar,
            size: t1.norm() + t2.norm() + s.norm(),
        })
    }

    /// Γ̃ at k, approached from `dir` when k lies on a cut.
    pub fn value_from(&self, k: Complex64, dir: Option<Complex64>) -> Result<Complex64> {
        let sd = self.spectral();
        if sd.datum().is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let lambda = sd.lambda();
        let p = self.parts(k, dir)?;
        // compare like with like: both sides carry the growth of e^{ikL}
        if p.den.norm() >= POLE_THRESHOLD * p.size {
            return Ok(lambda * p.num / p.den);
        }
        if p.num.norm() > REMOVABLE_TOL * p.size {
            return Err(Error::PoleProximity { at: k });
        }
        // 0/0: Γ̃ is analytic here, so use the mean over a small circle
        let rho = 1e-4 * k.norm().max(1.0);
        if self.cuts().segments.iter().any(|s| s.distance(k) < 2.0 * rho) {
            return Err(Error::PoleProximity { at: k });
        }
        let n = 16;
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let z = k + Complex64::from_polar(rho, 2.0 * PI * (j as f64 + 0.5) / n as f64);
            let q = self.parts(z, None)?;
            sum += lambda * q.num / q.den;
        }
        Ok(sum / n as f64)
    }

    /// The product b̄Γ̃, finite at poles of Γ̃.
    pub fn b_bar_gamma(&self, k: Complex64, dir: Option<Complex64>) -> Result<Complex64> {
        let sd = self.spectral();
        if sd.datum().is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let p = self.parts(k, dir)?;
        let e = (Complex64::i() * k * sd.period()).exp();
        Ok(sd.lambda() * p.num / (2.0 * e))
    }

    /// Schwarz conjugate Γ̃̄(k) = conj Γ̃(k̄), with the side mirrored.
    pub fn bar_from(&self, k: Complex64, dir: Option<Complex64>) -> Result<Complex64> {
        Ok(self.value_from(k.conj(), dir.map(|d| d.conj()))?.conj())
    }

    /// Γ̃ at k; on a cut, `side` is relative to the cut segment's orientation.
    pub fn gamma(&self, k: Complex64, side: Side) -> Result<GammaValue> {
        let dir = match (self.branch.segment_at(k), side) {
            (None, _) => None,
            (Some(_), Side::Off) => return Err(Error::OnCut { at: k }),
            (Some(s), Side::Left) => Some(s.plus_normal()),
            (Some(s), Side::Right) => Some(-s.plus_normal()),
        };
        Ok(GammaValue {
            k,
            side,
            value: self.value_from(k, dir)?,
        })
    }

    /// Residue of Γ̃ at p from trapezoid quadrature on a circle of radius
    /// rho, doubling nodes from 64 until consecutive values agree.
    pub fn circle_residue(&self, p: Complex64, rho: f64) -> Result<Complex64> {
        let mut n = 64;
        let mut prev: Option<Complex64> = None;
        let mut cache: Vec<Complex64> = Vec::new();
        while n <= 4096 {
            // reuse the previous nodes (every other node of the doubled set)
            let mut vals = Vec::with_capacity(n);
            for j in 0..n {
                if j % 2 == 0 && !cache.is_empty() {
                    vals.push(cache[j / 2]);
                    continue;
                }
                let w = Complex64::from_polar(rho, 2.0 * PI * j as f64 / n as f64);
                vals.push(self.value_from(p + w, None)? * w);
            }
            let r = vals.iter().sum::<Complex64>() / n as f64;
            if let Some(q) = prev {
                if (r - q).norm() <= 1e-10 * r.norm().max(1e-300) {
                    return Ok(r);
                }
            }
            prev = Some(r);
            cache = vals;
            n *= 2;
        }
        Err(Error::Quadrature(format!("residue at {p} did not converge")))
    }

    /// Simple poles of Γ̃ in `region` ∩ (D₁ ∪ D₃): zeros of b̄ where the
    /// numerator does not vanish.
    pub fn find_poles(&self, region: Rect, cfg: &RootConfig) -> Result<Vec<PoleData>> {
        let sd = self.spectral();
        if sd.datum().is_zero() {
            return Ok(Vec::new());
        }
        let f = |k: Complex64| sd.b_bar(k);
        let zeros = find_roots(&f, region, cfg)?;
        let scale = region.size().max(1.0);
        let gap = 1e-6 * scale;
        let mut poles = Vec::new();
        for (i, z) in zeros.iter().enumerate() {
            let k = z.location;
            let quadrant = match Quadrant::of(k) {
                Some(q @ (Quadrant::D1 | Quadrant::D3)) if k.re.abs() > gap && k.im.abs() > gap => q,
                _ => continue,
            };
            if self.cuts().segments.iter().any(|s| s.distance(k) <= gap) {
                return Err(Error::PoleOnContour { at: k });
            }
            let parts = self.parts(k, None)?;
            if parts.num.norm() <= REMOVABLE_TOL * parts.size {
                continue;
            }
            if z.order > 1 {
                return Err(Error::HigherOrderPole {
                    at: k,
                    r1: Complex64::new(f64::NAN, 0.0),
                    r2: Complex64::new(f64::NAN, 0.0),
                });
            }
            // radius: well inside the quadrant, away from cuts and other zeros
            let mut rho = k.re.abs().min(k.im.abs()).min(0.1 * PI / sd.period());
            for s in &self.cuts().segments {
                rho = rho.min(s.distance(k));
            }
            for (j, w) in zeros.iter().enumerate() {
                if j != i {
                    rho = rho.min((w.location - k).norm());
                }
            }
            let rho = 0.25 * rho;
            let r1 = self.circle_residue(k, rho)?;
            let r2 = self.circle_residue(k, 0.5 * rho)?;
            if (r1 - r2).norm() > 1e-8 * r1.norm() {
                return Err(Error::HigherOrderPole { at: k, r1, r2 });
            }
            poles.push(PoleData {
                location: k,
                residue: r1,
                quadrant,
                conjugate_partner: k.conj(),
            });
        }
        Ok(poles)
    }
}

/// Γ̃ at k for one-off evaluations.
pub fn gamma(sd: &Arc<SpectralData>, cuts: &CutSet, k: Complex64, side: Side) -> Result<GammaValue> {
    GammaTilde::new(sd.clone(), cuts.clone())?.gamma(k, side)
}

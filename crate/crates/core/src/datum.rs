//! Periodic initial data q0(x) on [0, L) and their file format.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign of the cubic term: +1 is defocusing, -1 is focusing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lambda {
    Plus,
    Minus,
}

impl Lambda {
    pub fn value(self) -> f64 {
        match self {
            Lambda::Plus => 1.0,
            Lambda::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if v == 1.0 {
            Ok(Lambda::Plus)
        } else if v == -1.0 {
            Ok(Lambda::Minus)
        } else {
            Err(Error::InvalidDatum(format!("lambda must be +1 or -1, got {v}")))
        }
    }
}

/// How the potential was supplied.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Constant(Complex64),
    /// Uniform samples on [0, L), trigonometrically interpolated.
    Samples(Vec<Complex64>),
    /// Coefficients c_n for n = -M..=M of q(x) = sum c_n exp(2 pi i n x / L).
    Fourier(Vec<Complex64>),
}

/// A periodic potential together with its period and nonlinearity sign.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialDatum {
    period: f64,
    lambda: Lambda,
    potential: Potential,
    // (n, c_n) with c_n != 0; the evaluation representation for every kind
    modes: Vec<(i64, Complex64)>,
}

impl InitialDatum {
    pub fn constant(q0: Complex64, period: f64, lambda: Lambda) -> Result<Self> {
        check_period(period)?;
        check_finite(&[q0])?;
        let modes = if q0 == Complex64::new(0.0, 0.0) {
            Vec::new()
        } else {
            vec![(0, q0)]
        };
        Ok(InitialDatum {
            period,
            lambda,
            potential: Potential::Constant(q0),
            modes,
        })
    }

    pub fn zero(period: f64, lambda: Lambda) -> Result<Self> {
        Self::constant(Complex64::new(0.0, 0.0), period, lambda)
    }

    pub fn samples(values: Vec<Complex64>, period: f64, lambda: Lambda) -> Result<Self> {
        check_period(period)?;
        check_finite(&values)?;
        if values.len() < 4 {
            return Err(Error::InvalidDatum(format!(
                "at least 4 samples required, got {}",
                values.len()
            )));
        }
        let modes = samples_to_modes(&values);
        Ok(InitialDatum {
            period,
            lambda,
            potential: Potential::Samples(values),
            modes,
        })
    }

    pub fn fourier(coefficients: Vec<Complex64>, period: f64, lambda: Lambda) -> Result<Self> {
        check_period(period)?;
        check_finite(&coefficients)?;
        if coefficients.len() % 2 != 1 {
            return Err(Error::InvalidDatum(
                "fourier coefficient list must have odd length 2M+1".into(),
            ));
        }
        let m = (coefficients.len() / 2) as i64;
        let modes = coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(i, c)| (i as i64 - m, *c))
            .collect();
        Ok(InitialDatum {
            period,
            lambda,
            potential: Potential::Fourier(coefficients),
            modes,
        })
    }

    /// Deterministic random band-limited datum with modes |n| <= `modes`.
    ///
    /// Coefficients are `0.3 * exp(-|n|) * (u + i v)` with u, v uniform on [-1, 1].
    pub fn random_band_limited(seed: u64, modes: usize, period: f64, lambda: Lambda) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = modes as i64;
        let coeffs = (-m..=m)
            .map(|n| {
                let amp = 0.3 * (-(n.abs() as f64)).exp();
                let u: f64 = rng.random_range(-1.0..1.0);
                let v: f64 = rng.random_range(-1.0..1.0);
                Complex64::new(u, v) * amp
            })
            .collect();
        Self::fourier(coeffs, period, lambda)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// Nonzero Fourier modes (n, c_n).
    pub fn modes(&self) -> &[(i64, Complex64)] {
        &self.modes
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    /// The constant value if the potential has only the zero mode.
    pub fn as_constant(&self) -> Option<Complex64> {
        match self.modes.as_slice() {
            [] => Some(Complex64::new(0.0, 0.0)),
            [(0, c)] => Some(*c),
            _ => None,
        }
    }

    pub fn max_mode(&self) -> i64 {
        self.modes.iter().map(|(n, _)| n.abs()).max().unwrap_or(0)
    }

    /// Mean of |q|^2 over a period (Parseval).
    pub fn mean_square(&self) -> f64 {
        self.modes.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    /// Max |q0(x)| estimated on a grid fine enough for the mode content.
    pub fn max_abs(&self) -> f64 {
        if let Some(c) = self.as_constant() {
            return c.norm();
        }
        let n = 16 * (self.max_mode() as usize + 1);
        (0..n)
            .map(|j| self.eval(self.period * j as f64 / n as f64).norm())
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let w = 2.0 * PI / self.period;
        self.modes
            .iter()
            .map(|(n, c)| c * Complex64::from_polar(1.0, w * (*n as f64) * x))
            .sum()
    }

    /// Samples on the uniform grid x_j = j L / n.
    pub fn sample(&self, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| self.eval(self.period * j as f64 / n as f64))
            .collect()
    }

    pub fn to_file(&self) -> DatumFile {
        let (kind, data) = match &self.potential {
            Potential::Constant(c) => (DatumKind::Constant, vec![[c.re, c.im]]),
            Potential::Samples(v) => (DatumKind::Samples, v.iter().map(|c| [c.re, c.im]).collect()),
            Potential::Fourier(v) => (DatumKind::Fourier, v.iter().map(|c| [c.re, c.im]).collect()),
        };
        DatumFile {
            period: self.period,
            lambda: self.lambda.value(),
            kind,
            data,
        }
    }

    pub fn from_file(file: &DatumFile) -> Result<Self> {
        let lambda = Lambda::from_value(file.lambda)?;
        let values: Vec<Complex64> = file.data.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        match file.kind {
            DatumKind::Constant => match values.as_slice() {
                [c] => Self::constant(*c, file.period, lambda),
                _ => Err(Error::InvalidDatum(
                    "constant datum needs exactly one (re, im) pair".into(),
                )),
            },
            DatumKind::Samples => Self::samples(values, file.period, lambda),
            DatumKind::Fourier => Self::fourier(values, file.period, lambda),
        }
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: DatumFile = serde_json::from_str(&text)?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatumKind {
    Constant,
    Samples,
    Fourier,
}

/// On-disk JSON layout of an initial datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatumFile {
    #[serde(rename = "L")]
    pub period: f64,
    pub lambda: f64,
    pub kind: DatumKind,
    pub data: Vec<[f64; 2]>,
}

fn check_period(period: f64) -> Result<()> {
    if period.is_finite() && period > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDatum(format!("period must be > 0, got {period}")))
    }
}

fn check_finite(values: &[Complex64]) -> Result<()> {
    if values.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidDatum("non-finite potential value".into()))
    }
}

/// Trigonometric interpolant of uniform samples. The Nyquist mode of an
/// even-length grid is split evenly between +N/2 and -N/2.
fn samples_to_modes(values: &[Complex64]) -> Vec<(i64, Complex64)> {
    let n = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let peak = buf.iter().map(|c| c.norm() * scale).fold(0.0, f64::max);
    let mut modes = Vec::new();
    for (j, c) in buf.into_iter().enumerate() {
        let c = c * scale;
        // FFT round-off in modes the samples do not carry
        if c.norm() <= 1e-15 * peak {
            continue;
        }
        let j = j as i64;
        let n = n as i64;
        if 2 * j < n {
            modes.push((j, c));
        } else if 2 * j > n {
            modes.push((j - n, c));
        } else {
            modes.push((j, c * 0.5));
            modes.push((-j, c * 0.5));
        }
    }
    modes.retain(|(_, c)| c.norm() > 0.0);
    modes.sort_by_key(|(n, _)| *n);
    modes
}

//! Python module `nls_rh`: data, spectral functions, the Riemann-Hilbert
//! problem, the constant-data solution and the split-step oracle.

use std::sync::Arc;

use nls_periodic_rh::branch::Side;
use nls_periodic_rh::constant::{constant_demo_report, ConstantParams};
use nls_periodic_rh::cuts::{build_cuts, default_search_box, locate_zeros, BranchPoint};
use nls_periodic_rh::datum::DatumFile;
use nls_periodic_rh::jump::RhProblem;
use nls_periodic_rh::nls::{delta_invariance, evolve_report, real_ksamples, EvolutionConfig};
use nls_periodic_rh::roots::{Rect, RootConfig};
use nls_periodic_rh::spectral::SolverConfig;
use nls_periodic_rh::{Complex64, Error, EvalPoint, InitialDatum, Lambda, Mat2, SpectralData};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidDatum(_) | Error::InvalidInput(_) | Error::Conditioning { .. } | Error::Json(_) => {
            PyValueError::new_err(e.to_string())
        }
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

fn lambda_of(v: f64) -> PyResult<Lambda> {
    Lambda::from_value(v).map_err(py_err)
}

fn rect_of(sd: &SpectralData, search_box: Option<(f64, f64, f64, f64)>, disks: usize) -> PyResult<Rect> {
    match search_box {
        None => Ok(default_search_box(sd, disks)),
        Some((a, b, c, d)) if a < b && c < d => Ok(Rect::new(a, b, c, d)),
        Some(b) => Err(PyValueError::new_err(format!("box needs re0<re1, im0<im1: {b:?}"))),
    }
}

fn rows(m: &Mat2) -> [[Complex64; 2]; 2] {
    [[m.get(0, 0), m.get(0, 1)], [m.get(1, 0), m.get(1, 1)]]
}

fn zero_list(zeros: &[BranchPoint]) -> Vec<(Complex64, u32)> {
    zeros.iter().map(|z| (z.location, z.order)).collect()
}

/// Initial datum q(x, 0) on one period, with the sign λ of the nonlinearity.
#[pyclass(name = "Datum", frozen, module = "nls_rh", skip_from_py_object)]
#[derive(Clone)]
struct PyDatum(InitialDatum);

#[pymethods]
impl PyDatum {
    #[staticmethod]
    fn constant(q0: Complex64, period: f64, lam: f64) -> PyResult<Self> {
        InitialDatum::constant(q0, period, lambda_of(lam)?).map(PyDatum).map_err(py_err)
    }

    /// Seeded band-limited datum with modes |n| <= `modes`.
    #[staticmethod]
    fn random(seed: u64, modes: usize, period: f64, lam: f64) -> PyResult<Self> {
        InitialDatum::random_band_limited(seed, modes, period, lambda_of(lam)?)
            .map(PyDatum)
            .map_err(py_err)
    }

    /// Coefficients of modes -N..=N for an odd-length list.
    #[staticmethod]
    fn fourier(coefficients: Vec<Complex64>, period: f64, lam: f64) -> PyResult<Self> {
        InitialDatum::fourier(coefficients, period, lambda_of(lam)?).map(PyDatum).map_err(py_err)
    }

    /// Equispaced samples on [0, L).
    #[staticmethod]
    fn samples(values: Vec<Complex64>, period: f64, lam: f64) -> PyResult<Self> {
        InitialDatum::samples(values, period, lambda_of(lam)?).map(PyDatum).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: DatumFile = serde_json::from_str(text).map_err(|e| py_err(e.into()))?;
        InitialDatum::from_file(&file).map(PyDatum).map_err(py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(py_err)
    }

    #[getter]
    fn period(&self) -> f64 {
        self.0.period()
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.0.lambda().value()
    }

    fn __call__(&self, x: f64) -> Complex64 {
        self.0.eval(x)
    }

    fn sample(&self, n: usize) -> Vec<Complex64> {
        self.0.sample(n)
    }

    fn __repr__(&self) -> String {
        format!(
            "Datum(L={}, lambda={}, modes={})",
            self.0.period(),
            self.0.lambda().value(),
            self.0.modes().len()
        )
    }
}

/// a(k), b(k) and the discriminant for one datum; values are cached.
#[pyclass(name = "Spectral", frozen, module = "nls_rh")]
struct PySpectral(Arc<SpectralData>);

#[pymethods]
impl PySpectral {
    #[new]
    #[pyo3(signature = (datum, conditioning_bound = None))]
    fn new(datum: &PyDatum, conditioning_bound: Option<f64>) -> Self {
        let mut cfg = SolverConfig::default();
        if let Some(b) = conditioning_bound {
            cfg.conditioning_bound = b;
        }
        PySpectral(Arc::new(SpectralData::with_config(datum.0.clone(), cfg)))
    }

    fn a(&self, k: Complex64) -> PyResult<Complex64> {
        self.0.a(k).map_err(py_err)
    }

    fn b(&self, k: Complex64) -> PyResult<Complex64> {
        self.0.b(k).map_err(py_err)
    }

    fn a_bar(&self, k: Complex64) -> PyResult<Complex64> {
        self.0.a_bar(k).map_err(py_err)
    }

    fn b_bar(&self, k: Complex64) -> PyResult<Complex64> {
        self.0.b_bar(k).map_err(py_err)
    }

    fn discriminant(&self, k: Complex64) -> PyResult<Complex64> {
        self.0.discriminant(k).map_err(py_err)
    }

    fn det_residual(&self, k: Complex64) -> PyResult<f64> {
        self.0.det_residual(k).map_err(py_err)
    }

    /// Zeros of 4 - Δ² as (location, order) pairs.
    #[pyo3(signature = (search_box = None, disks = 4))]
    fn zeros(&self, search_box: Option<(f64, f64, f64, f64)>, disks: usize) -> PyResult<Vec<(Complex64, u32)>> {
        let rect = rect_of(&self.0, search_box, disks)?;
        locate_zeros(&self.0, rect, &RootConfig::default()).map(|z| zero_list(&z)).map_err(py_err)
    }
}

/// The contour, Γ̃ and jump matrices built from one datum.
#[pyclass(name = "Problem", frozen, module = "nls_rh")]
struct PyProblem {
    rh: RhProblem,
    zeros: Vec<BranchPoint>,
    rect: Rect,
}

#[pymethods]
impl PyProblem {
    #[new]
    #[pyo3(signature = (datum, search_box = None, disks = 4))]
    fn new(py: Python<'_>, datum: &PyDatum, search_box: Option<(f64, f64, f64, f64)>, disks: usize) -> PyResult<Self> {
        let sd = Arc::new(SpectralData::new(datum.0.clone()));
        let rect = rect_of(&sd, search_box, disks)?;
        py.detach(|| {
            let zeros = locate_zeros(&sd, rect, &RootConfig::default())?;
            let rh = RhProblem::new(sd.clone(), build_cuts(&sd, &zeros)?)?;
            Ok(PyProblem { rh, zeros, rect })
        })
        .map_err(py_err)
    }

    fn zeros(&self) -> Vec<(Complex64, u32)> {
        zero_list(&self.zeros)
    }

    /// Cut segments as (from, to) pairs.
    fn cuts(&self) -> Vec<(Complex64, Complex64)> {
        self.rh.gamma().cuts().segments.iter().map(|s| (s.from, s.to)).collect()
    }

    fn contour_json(&self) -> String {
        self.rh.contour().to_json().to_string()
    }

    /// Branch of sqrt(Δ² - 4); `side` is the approach direction on a cut.
    #[pyo3(signature = (k, side = None))]
    fn sqrt(&self, k: Complex64, side: Option<Complex64>) -> PyResult<Complex64> {
        let branch = self.rh.gamma().branch();
        match side {
            None => branch.eval(k, Side::Off),
            Some(d) => branch.eval_from(k, Some(d)),
        }
        .map_err(py_err)
    }

    #[pyo3(signature = (k, side = None))]
    fn gamma(&self, k: Complex64, side: Option<Complex64>) -> PyResult<Complex64> {
        self.rh.gamma().value_from(k, side).map_err(py_err)
    }

    /// Jump matrix at k on whichever piece contains it.
    fn jump(&self, x: f64, t: f64, k: Complex64) -> PyResult<(String, [[Complex64; 2]; 2])> {
        let j = self.rh.jump_at(&EvalPoint::new(x, t, k)).map_err(py_err)?;
        Ok((j.label.to_string(), rows(&j.entries)))
    }

    /// Max deviation from I of the cyclic jump product around k = 0.
    fn origin_consistency(&self, x: f64, t: f64) -> PyResult<f64> {
        self.rh.verify_origin_consistency(x, t).map_err(py_err)
    }

    /// Poles of Γ̃ in the upper half of the search box as (location, residue).
    fn poles(&self, py: Python<'_>) -> PyResult<Vec<(Complex64, Complex64)>> {
        let r = self.rect;
        let upper = Rect::new(r.re0, r.re1, 0.0, r.im1);
        py.detach(|| self.rh.gamma().find_poles(upper, &RootConfig::default()))
            .map(|ps| ps.iter().map(|p| (p.location, p.residue)).collect())
            .map_err(py_err)
    }
}

/// Closed-form solution for q(x, 0) = q0 > 0.
#[pyclass(name = "ConstantSolution", frozen, module = "nls_rh")]
struct PyConstant(ConstantParams);

#[pymethods]
impl PyConstant {
    #[new]
    fn new(q0: f64, period: f64, lam: f64) -> PyResult<Self> {
        ConstantParams::new(q0, period, lambda_of(lam)?).map(PyConstant).map_err(py_err)
    }

    /// δ∞ as (quadrature, closed form).
    fn delta_infinity(&self, x: f64, t: f64) -> PyResult<(Complex64, Complex64)> {
        self.0.delta_infinity(x, t).map(|d| (d.quadrature, d.closed_form)).map_err(py_err)
    }

    fn c0(&self) -> PyResult<Complex64> {
        self.0.c0().map_err(py_err)
    }

    /// q(x, t) recovered from δ∞.
    fn q(&self, x: f64, t: f64) -> PyResult<Complex64> {
        self.0.recover_q(x, t).map(|r| r.from_delta).map_err(py_err)
    }

    /// q(x, t) from δ∞, from the large-k limit, and the exact value.
    fn recover_q(&self, x: f64, t: f64) -> PyResult<(Complex64, Complex64, Complex64)> {
        self.0.recover_q(x, t).map(|r| (r.from_delta, r.from_limit, r.exact)).map_err(py_err)
    }

    fn mtilde(&self, x: f64, t: f64, k: Complex64) -> PyResult<[[Complex64; 2]; 2]> {
        self.0.mtilde(x, t, k).map(|m| rows(&m)).map_err(py_err)
    }

    fn report_json(&self, xs: Vec<f64>, ts: Vec<f64>) -> PyResult<String> {
        constant_demo_report(&self.0, &xs, &ts).map(|v| v.to_string()).map_err(py_err)
    }
}

fn config(d: &InitialDatum, final_time: f64, dt: f64, modes: usize) -> EvolutionConfig {
    EvolutionConfig { modes, dt, final_time, lambda: d.lambda(), period: d.period() }
}

/// Split-step evolution to `final_time`; returns the datum and the mass drift.
#[pyfunction]
#[pyo3(signature = (datum, final_time, dt = 1e-3, modes = 64))]
fn evolve(py: Python<'_>, datum: &PyDatum, final_time: f64, dt: f64, modes: usize) -> PyResult<(PyDatum, f64)> {
    let cfg = config(&datum.0, final_time, dt, modes);
    py.detach(|| evolve_report(&datum.0, &cfg))
        .map(|r| {
            let drift = r.mass_drift();
            (PyDatum(r.datum), drift)
        })
        .map_err(py_err)
}

/// Max relative change of Δ(k) on real samples in [-kmax, kmax] over the evolution.
#[pyfunction]
#[pyo3(signature = (datum, final_time, dt = 1e-3, modes = 64, samples = 32, kmax = 10.0))]
fn delta_drift(
    py: Python<'_>,
    datum: &PyDatum,
    final_time: f64,
    dt: f64,
    modes: usize,
    samples: usize,
    kmax: f64,
) -> PyResult<f64> {
    let cfg = config(&datum.0, final_time, dt, modes);
    py.detach(|| delta_invariance(&datum.0, &cfg, &real_ksamples(samples, kmax))).map_err(py_err)
}

#[pymodule]
fn nls_rh(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDatum>()?;
    m.add_class::<PySpectral>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PyConstant>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(delta_drift, m)?)?;
    Ok(())
}

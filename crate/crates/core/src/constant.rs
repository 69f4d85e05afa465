//! Closed-form solution for constant initial data q(x,0) = q₀ > 0.
//!
//! The jump across the axes is removed by the quadrant factors of m̂, the
//! remaining cut jump (0 f; -1/f 0) is made constant by the scalar δ, and
//! the constant-jump problem is solved by m̌ built from a fourth root.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::contour::PieceLabel;
use crate::datum::{InitialDatum, Lambda};
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::spectral::EvalPoint;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantParams {
    pub q0: f64,
    pub period: f64,
    pub lambda: Lambda,
}

impl ConstantParams {
    pub fn new(q0: f64, period: f64, lambda: Lambda) -> Result<Self> {
        if !(q0 > 0.0 && q0.is_finite()) {
            return Err(Error::InvalidDatum(format!("q0 must be positive, got {q0}")));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidDatum(format!("period must be positive, got {period}")));
        }
        Ok(ConstantParams { q0, period, lambda })
    }

    pub fn datum(&self) -> InitialDatum {
        InitialDatum::constant(c(self.q0, 0.0), self.period, self.lambda).expect("validated parameters")
    }

    pub fn lam(&self) -> f64 {
        self.lambda.value()
    }

    /// The simple zeros (λ⁺, λ⁻) of 4 - Δ².
    pub fn lambda_pm(&self) -> (Complex64, Complex64) {
        match self.lambda {
            Lambda::Plus => (c(self.q0, 0.0), c(-self.q0, 0.0)),
            Lambda::Minus => (c(0.0, self.q0), c(0.0, -self.q0)),
        }
    }

    /// Unit vector along the cut, oriented from λ⁻ to λ⁺.
    fn cut_direction(&self) -> Complex64 {
        match self.lambda {
            Lambda::Plus => c(1.0, 0.0),
            Lambda::Minus => I,
        }
    }

    /// Parameter s ∈ (-1, 1) of a point on the cut, k = s λ⁺.
    fn cut_parameter(&self, k: Complex64) -> Option<f64> {
        let s = k / self.lambda_pm().0;
        let tol = 1e-12 * k.norm().max(1.0);
        (s.im.abs() * self.q0 <= tol && s.re.abs() < 1.0).then_some(s.re)
    }

    pub fn on_cut(&self, k: Complex64) -> bool {
        self.cut_parameter(k).is_some()
    }

    /// r(k) = √(k² - λq₀²) with r ~ k at infinity, analytic off the cut.
    pub fn r(&self, k: Complex64) -> Complex64 {
        k * (1.0 - self.lam() * self.q0 * self.q0 / (k * k)).sqrt()
    }

    /// r at k, or its boundary value from direction `dir` on the cut.
    pub fn r_from(&self, k: Complex64, dir: Option<Complex64>) -> Result<Complex64> {
        match (self.on_cut(k), dir) {
            (false, _) => Ok(self.r(k)),
            (true, None) => Err(Error::OnCut { at: k }),
            (true, Some(d)) => {
                let s = (k * k - self.lam() * self.q0 * self.q0).sqrt();
                let guide = self.r(k + d * 1e-7 * self.q0.max(1.0));
                Ok(if (s * guide.conj()).re >= 0.0 { s } else { -s })
            }
        }
    }

    /// Boundary value r₊ on the cut (+ = left of λ⁻ → λ⁺).
    pub fn r_plus(&self, k: Complex64) -> Result<Complex64> {
        self.r_from(k, Some(self.cut_direction() * I))
    }

    /// Γ̃ = -λi(k - r)/q₀.
    pub fn gamma(&self, k: Complex64, dir: Option<Complex64>) -> Result<Complex64> {
        Ok(-self.lam() * I * (k - self.r_from(k, dir)?) / self.q0)
    }

    /// Closed-form jump matrices for the six pieces of the constant-data
    /// contour. Other labels do not occur and are rejected.
    pub fn closed_jump(&self, label: PieceLabel, p: &EvalPoint) -> Result<Mat2> {
        let (q0, l, lam) = (self.q0, self.period, self.lam());
        let k = p.k;
        let phase = p.theta() - k * l;
        let ep = (2.0 * I * phase).exp();
        let em = (-2.0 * I * phase).exp();
        let wrong = || Error::WrongPiece { label: label.to_string(), k };
        use PieceLabel::*;
        match label {
            V1 | V2 | V3 | V4 => {
                if self.on_cut(k) {
                    return Err(wrong());
                }
                let r = self.r(k);
                let el = (I * l * r).exp();
                let d11 = 2.0 * lam * r * (k - r) / (q0 * q0);
                let off = lam * I * (k - r) / q0;
                let low = I * (k - r) / q0;
                let one = c(1.0, 0.0);
                Ok(match label {
                    V1 => Mat2::new(d11, off * em, low * ep * el * el, el * (r * (l * r).cos() - I * k * (l * r).sin()) / r),
                    V2 => Mat2::new(d11, off * em / (el * el), low * ep * el * el, one),
                    V3 => Mat2::new(d11, off * em / (el * el), low * ep, (r * (l * r).cos() + I * k * (l * r).sin()) / (el * r)),
                    _ => Mat2::new(d11, off * em, low * ep, one),
                })
            }
            V2Cut | V4Cut if self.lambda == Lambda::Plus => {
                let x = self.cut_parameter(k).ok_or_else(wrong)?;
                let fr = c((q0 * q0 - (x * q0).powi(2)).max(0.0).sqrt(), 0.0);
                let zero = c(0.0, 0.0);
                Ok(if label == V2Cut {
                    Mat2::new(zero, (fr + I * k) * em / q0, -(fr - I * k) * ep / q0, (-2.0 * l * fr).exp())
                } else {
                    Mat2::new(zero, -(fr - I * k) * em / q0, (fr + I * k) * ep / q0, c(1.0, 0.0))
                })
            }
            V1Cut | V3Cut if self.lambda == Lambda::Minus => {
                let y = self.cut_parameter(k).ok_or_else(wrong)?;
                let fr = c((q0 * q0 - (y * q0).powi(2)).max(0.0).sqrt(), 0.0);
                let zero = c(0.0, 0.0);
                Ok(if label == V1Cut {
                    let e = (2.0 * I * l * fr).exp();
                    Mat2::new(zero, I * (fr - k) * em / q0, I * (fr + k) * ep / q0, (1.0 + e) / 2.0 + k * (1.0 - e) / (2.0 * fr))
                } else {
                    let e = (-2.0 * I * l * fr).exp();
                    Mat2::new(zero, -I * (fr + k) * em / q0, -I * (fr - k) * ep / q0, (1.0 + e) / 2.0 + k * (1.0 - e) / (2.0 * fr))
                })
            }
            _ => Err(wrong()),
        }
    }
}

/// Agreement required between successive Gauss-Legendre rules.
const QUAD_TOL: f64 = 1e-11;
const QUAD_MAX_NODES: usize = 8192;
/// Off-cut δ needs a side below this distance from the cut.
const CUT_GUARD: f64 = 1e-6;

/// δ∞ from quadrature next to its closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaInfinity {
    pub quadrature: Complex64,
    pub closed_form: Complex64,
    pub discrepancy: f64,
}

/// q(x,t) from δ∞ next to the large-k limit of 2ik m̃₁₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveredQ {
    pub x: f64,
    pub t: f64,
    pub from_delta: Complex64,
    pub from_limit: Complex64,
    pub exact: Complex64,
}

impl RecoveredQ {
    pub fn route_disagreement(&self) -> f64 {
        (self.from_delta - self.from_limit).norm()
    }

    pub fn error(&self) -> f64 {
        (self.from_delta - self.exact).norm()
    }
}

/// The closed-form constant-data solution bound to one set of parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCaseSolution {
    pub params: ConstantParams,
}

impl ConstantParams {
    /// Cut point s(φ) = λ⁺ sin φ, φ ∈ (-π/2, π/2). With this substitution
    /// ds / r₊(s) = -i dφ for both signs of λ.
    fn cut_point(&self, phi: f64) -> Complex64 {
        self.lambda_pm().0 * phi.sin()
    }

    /// ln f along the cut: the principal log of -2iλr₊/q₀ (constant in
    /// argument along the cut) plus the exponent -2i(θ - sL).
    fn ln_f(&self, x: f64, t: f64, s: Complex64) -> Result<Complex64> {
        let rp = self.r_plus(s)?;
        let theta = EvalPoint::new(x, t, s).theta();
        Ok((-2.0 * I * self.lam() * rp / self.q0).ln() - 2.0 * I * (theta - s * self.period))
    }

    /// ln f at s(φ), using r₊(s(φ)) = iλ⁺ cos φ so that the endpoints stay
    /// finite under rounding.
    fn ln_f_phi(&self, x: f64, t: f64, phi: f64) -> Complex64 {
        let s = self.cut_point(phi);
        let rp = I * self.lambda_pm().0 * phi.cos();
        let theta = EvalPoint::new(x, t, s).theta();
        (-2.0 * I * self.lam() * rp / self.q0).ln() - 2.0 * I * (theta - s * self.period)
    }

    /// d(ln f)/ds along the cut.
    fn ln_f_derivative(&self, x: f64, t: f64, s: Complex64) -> Result<Complex64> {
        // d ln r₊ / ds = s / r₊²
        let rp = self.r_plus(s)?;
        Ok(s / (rp * rp) - 2.0 * I * (x - self.period + 4.0 * s * t))
    }

    /// ∫ over the cut in φ with endpoint grading.
    fn phi_integral<F: Fn(f64) -> Result<Complex64>>(&self, f: F) -> Result<Complex64> {
        let err = std::cell::Cell::new(None);
        let v = crate::quadrature::integrate_graded(
            |g| {
                let phi = 0.5 * std::f64::consts::PI * g;
                match f(phi) {
                    Ok(v) => v * (0.5 * std::f64::consts::PI),
                    Err(e) => {
                        err.set(Some(e));
                        c(0.0, 0.0)
                    }
                }
            },
            QUAD_TOL,
            32,
            QUAD_MAX_NODES,
        )?;
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }

    /// f(k) = -2iλ r₊(k)/q₀ e^{-2i(θ - kL)} for k strictly inside the cut.
    pub fn f_function(&self, x: f64, t: f64, k: Complex64) -> Result<Complex64> {
        if !self.on_cut(k) {
            return Err(Error::InvalidInput(format!("{k} is not inside the cut")));
        }
        Ok(self.ln_f(x, t, k)?.exp())
    }

    /// Quadrant factor F with m̂ = m̃ F in the quadrant of k. `r` is the
    /// value of r(k) to use (a boundary value on the cut).
    fn hat_factor_with(&self, x: f64, t: f64, k: Complex64, r: Complex64, quadrant: crate::contour::Quadrant) -> Mat2 {
        use crate::contour::Quadrant::*;
        let (q0, l, lam) = (self.q0, self.period, self.lam());
        let phase = EvalPoint::new(x, t, k).theta() - k * l;
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let upper = |extra: Complex64| {
            Mat2::new(
                2.0 * lam * r * (k - r) / (q0 * q0),
                I * lam * (k - r) * (-2.0 * I * (phase + extra)).exp() / q0,
                zero,
                (k + r) / (2.0 * r),
            )
        };
        match quadrant {
            D1 => Mat2::new(one, zero, I * q0 * (2.0 * I * (phase + l * r)).exp() / (2.0 * lam * r), one),
            D2 => upper(zero).inverse(),
            D3 => Mat2::new(one, zero, I * q0 * (2.0 * I * phase).exp() / (2.0 * lam * r), one),
            D4 => upper(l * r).inverse(),
        }
    }

    /// The factor F of m̂ = m̃ F at a point of an open quadrant.
    pub fn hat_transform(&self, x: f64, t: f64, k: Complex64) -> Result<Mat2> {
        let quadrant = crate::contour::Quadrant::of(k)
            .ok_or_else(|| Error::InvalidInput(format!("{k} lies on an axis")))?;
        Ok(self.hat_factor_with(x, t, k, self.r(k), quadrant))
    }

    /// δ(x,t,k) off the cut; on (or within 1e-6 of) the cut a side is
    /// required, given as the direction of approach.
    pub fn delta_from(&self, x: f64, t: f64, k: Complex64, dir: Option<Complex64>) -> Result<Complex64> {
        let (lp, lm) = self.lambda_pm();
        for e in [lp, lm] {
            if (k - e).norm() <= 1e-12 * self.q0.max(1.0) {
                return Err(Error::BranchPointProximity { at: e });
            }
        }
        let seg = crate::cuts::CutSegment {
            from: lm,
            to: lp,
            geometry: crate::cuts::CutGeometry::Real,
        };
        let dist = seg.distance(k);
        if self.on_cut(k) {
            let d = dir.ok_or(Error::OnCut { at: k })?;
            return self.delta_on_cut(x, t, k, d);
        }
        if dist < CUT_GUARD * self.q0 && dir.is_none() {
            return Err(Error::OnCut { at: k });
        }
        let r = self.r(k);
        let integrand = |phi: f64| self.ln_f_phi(x, t, phi) / (self.cut_point(phi) - k);
        let integral = if dist < 0.5 * self.q0 {
            // locate the nearest cut point in graded coordinates
            let z = k / self.lambda_pm().0;
            let phi_star = z.re.clamp(-1.0, 1.0).asin();
            let d_s = dist / self.q0;
            let d_phi = (d_s / phi_star.cos().max(1e-300)).min((2.0 * d_s).sqrt());
            let to_u = |phi: f64| crate::quadrature::graded_inverse(phi / FRAC_PI_2);
            let u_star = to_u(phi_star);
            let width = (to_u((phi_star + d_phi).min(FRAC_PI_2)) - u_star)
                .abs()
                .max((u_star - to_u((phi_star - d_phi).max(-FRAC_PI_2))).abs());
            crate::quadrature::integrate_graded_near(
                |g| integrand(FRAC_PI_2 * g) * FRAC_PI_2,
                u_star,
                width,
                QUAD_TOL,
                1024,
            )?
        } else {
            self.phi_integral(|phi| Ok(integrand(phi)))?
        };
        Ok((-r / (2.0 * std::f64::consts::PI) * integral).exp())
    }

    pub fn delta_function(&self, x: f64, t: f64, k: Complex64) -> Result<Complex64> {
        self.delta_from(x, t, k, None)
    }

    /// Boundary values of δ by the Plemelj formulas: with g = ln f / r₊,
    /// δ± = exp(r± (±g/2 + H)) where H is the principal-value Cauchy
    /// integral of g. The principal value of ∫dφ/(sin φ - sin φ₀) vanishes,
    /// so H needs only the subtracted, regular integrand.
    fn delta_on_cut(&self, x: f64, t: f64, k: Complex64, dir: Complex64) -> Result<Complex64> {
        let lp = self.lambda_pm().0;
        let s0 = self.cut_parameter(k).expect("checked on cut");
        let k = lp * s0;
        let h0 = self.ln_f(x, t, k)?;
        let dh0 = self.ln_f_derivative(x, t, k)?;
        let pv = self.phi_integral(|phi| {
            let s = self.cut_point(phi);
            let ds = s - k;
            if ds.norm() < 1e-9 * self.q0 {
                return Ok(dh0);
            }
            Ok((self.ln_f_phi(x, t, phi) - h0) / ds)
        })?;
        // H = (1/2πi) PV∫ g/(s - k) ds = -(1/2π) PV∫ ln f/(s - k) dφ
        let h = -pv / (2.0 * std::f64::consts::PI);
        let rp = self.r_plus(k)?;
        let plus_side = (dir * (self.cut_direction() * I).conj()).re > 0.0;
        Ok(if plus_side { (h0 / 2.0 + rp * h).exp() } else { (h0 / 2.0 - rp * h).exp() })
    }

    /// δ∞ = exp((1/2π)∫ ln f dφ) by quadrature, with the closed form
    /// e^{-iλq₀²t} (times e^{-iπ/4} when λ = -1).
    pub fn delta_infinity(&self, x: f64, t: f64) -> Result<DeltaInfinity> {
        let integral = self.phi_integral(|phi| Ok(self.ln_f_phi(x, t, phi)))?;
        let quadrature = (integral / (2.0 * std::f64::consts::PI)).exp();
        let mut closed_form = (-I * self.lam() * self.q0 * self.q0 * t).exp();
        if self.lambda == Lambda::Minus {
            closed_form *= (-I * std::f64::consts::FRAC_PI_4).exp();
        }
        Ok(DeltaInfinity {
            quadrature,
            closed_form,
            discrepancy: (quadrature - closed_form).norm(),
        })
    }

    /// c₀ = -(1/2πi)∫ (ln(-2iλr₊) - ln q₀)/r₊ ds by quadrature.
    pub fn c0(&self) -> Result<Complex64> {
        let integral = self.phi_integral(|phi| {
            let rp = I * self.lambda_pm().0 * phi.cos();
            Ok((-2.0 * I * self.lam() * rp).ln() - self.q0.ln())
        })?;
        Ok(integral / (2.0 * std::f64::consts::PI))
    }

    /// Q = ((k - λ⁺)/(k - λ⁻))^{1/4} with Q → 1 at infinity; on the cut the
    /// side is the direction of approach.
    fn q_from(&self, k: Complex64, dir: Option<Complex64>) -> Result<Complex64> {
        let (lp, lm) = self.lambda_pm();
        let w = (k - lp) / (k - lm);
        if !self.on_cut(k) {
            return Ok(w.powf(0.25));
        }
        let d = dir.ok_or(Error::OnCut { at: k })?;
        let probe = k + d * 1e-7 * self.q0;
        let wp = (probe - lp) / (probe - lm);
        let arg = if wp.im >= 0.0 { std::f64::consts::PI } else { -std::f64::consts::PI };
        Ok(Complex64::from_polar(w.norm().powf(0.25), arg / 4.0))
    }

    pub fn mcheck_from(&self, k: Complex64, dir: Option<Complex64>) -> Result<Mat2> {
        let q = self.q_from(k, dir)?;
        let s = 0.5 * (q + 1.0 / q);
        let d = 0.5 * (q - 1.0 / q);
        Ok(Mat2::new(s, I * d, -I * d, s))
    }

    pub fn mcheck(&self, k: Complex64) -> Result<Mat2> {
        self.mcheck_from(k, None)
    }

    /// m̂ = δ∞^{σ₃} m̌ δ^{-σ₃}.
    pub fn mhat_from(&self, x: f64, t: f64, k: Complex64, dir: Option<Complex64>) -> Result<Mat2> {
        let dinf = self.delta_infinity(x, t)?.quadrature;
        self.mhat_with(x, t, k, dir, dinf)
    }

    fn mhat_with(&self, x: f64, t: f64, k: Complex64, dir: Option<Complex64>, dinf: Complex64) -> Result<Mat2> {
        let d = self.delta_from(x, t, k, dir)?;
        let m = self.mcheck_from(k, dir)?;
        Ok(Mat2::diag(dinf, 1.0 / dinf) * m * Mat2::diag(1.0 / d, d))
    }

    /// m̃ = m̂ F⁻¹ at k, approached from `dir` when k is on the contour.
    pub fn mtilde_from(&self, x: f64, t: f64, k: Complex64, dir: Option<Complex64>) -> Result<Mat2> {
        let dinf = self.delta_infinity(x, t)?.quadrature;
        self.mtilde_with(x, t, k, dir, dinf)
    }

    fn mtilde_with(&self, x: f64, t: f64, k: Complex64, dir: Option<Complex64>, dinf: Complex64) -> Result<Mat2> {
        let probe = match dir {
            Some(d) => k + d * 1e-9 * k.norm().max(1.0),
            None => k,
        };
        let quadrant = crate::contour::Quadrant::of(probe)
            .ok_or_else(|| Error::InvalidInput(format!("{k} lies on the contour; give a side")))?;
        let r = self.r_from(k, dir)?;
        let f = self.hat_factor_with(x, t, k, r, quadrant);
        Ok(self.mhat_with(x, t, k, dir, dinf)? * f.inverse())
    }

    pub fn mtilde(&self, x: f64, t: f64, k: Complex64) -> Result<Mat2> {
        self.mtilde_from(x, t, k, None)
    }

    /// q(x,t) two ways: (λ⁺ - λ⁻)/2 δ∞² with quadrature δ∞, and
    /// 2ik m̃₁₂ at |k| = 10², 10³, 10⁴ on arg k = π/4, Richardson
    /// extrapolated in 1/|k|.
    pub fn recover_q(&self, x: f64, t: f64) -> Result<RecoveredQ> {
        let (lp, lm) = self.lambda_pm();
        let dinf = self.delta_infinity(x, t)?.quadrature;
        let from_delta = (lp - lm) / 2.0 * dinf * dinf;
        let ray = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let vals: Vec<Complex64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&rad| {
                let k = ray * rad;
                Ok(2.0 * I * k * self.mtilde_with(x, t, k, None, dinf)?.get(0, 1))
            })
            .collect::<Result<_>>()?;
        let r1 = (10.0 * vals[1] - vals[0]) / 9.0;
        let r2 = (10.0 * vals[2] - vals[1]) / 9.0;
        let from_limit = (100.0 * r2 - r1) / 99.0;
        Ok(RecoveredQ {
            x,
            t,
            from_delta,
            from_limit,
            exact: self.q0 * (-2.0 * I * self.lam() * self.q0 * self.q0 * t).exp(),
        })
    }

    pub fn solution(&self) -> ConstantCaseSolution {
        ConstantCaseSolution { params: *self }
    }
}

/// `constant-demo` report: δ∞ and q on a grid, both routes, with residuals.
pub fn constant_demo_report(p: &ConstantParams, xs: &[f64], ts: &[f64]) -> Result<serde_json::Value> {
    let mut dinf = Vec::new();
    let mut grid = Vec::new();
    let mut max_err: f64 = 0.0;
    let mut max_route: f64 = 0.0;
    let mut max_dinf: f64 = 0.0;
    for &t in ts {
        let d = p.delta_infinity(0.0, t)?;
        max_dinf = max_dinf.max(d.discrepancy);
        dinf.push(serde_json::json!({
            "t": t,
            "quadrature": [d.quadrature.re, d.quadrature.im],
            "closed_form": [d.closed_form.re, d.closed_form.im],
            "discrepancy": d.discrepancy,
        }));
        for &x in xs {
            let q = p.recover_q(x, t)?;
            max_err = max_err.max(q.error());
            max_route = max_route.max(q.route_disagreement());
            grid.push(serde_json::json!({
                "x": x,
                "t": t,
                "q_delta": [q.from_delta.re, q.from_delta.im],
                "q_limit": [q.from_limit.re, q.from_limit.im],
                "q_exact": [q.exact.re, q.exact.im],
            }));
        }
    }
    let c0 = p.c0()?;
    Ok(serde_json::json!({
        "params": { "q0": p.q0, "L": p.period, "lambda": p.lam() },
        "c0": [c0.re, c0.im],
        "delta_infinity": dinf,
        "q": grid,
        "residuals": {
            "delta_infinity": max_dinf,
            "q_vs_exact": max_err,
            "route_disagreement": max_route,
        },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params() -> [ConstantParams; 2] {
        [
            ConstantParams::new(1.0, PI, Lambda::Plus).unwrap(),
            ConstantParams::new(0.7, 2.0, Lambda::Minus).unwrap(),
        ]
    }

    #[test]
    fn f_at_the_origin() {
        let p = ConstantParams::new(1.0, PI, Lambda::Plus).unwrap();
        assert!((p.f_function(PI, 0.0, c(0.0, 0.0)).unwrap() - 2.0).norm() < 1e-14);
        let p = ConstantParams::new(1.0, PI, Lambda::Minus).unwrap();
        assert!((p.f_function(PI, 0.0, c(0.0, 0.0)).unwrap() - c(0.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn hat_factor_decays_into_the_quadrant() {
        for p in params() {
            let f = p.hat_transform(0.3, 0.2, c(1.0, 10.0)).unwrap();
            assert!((f - Mat2::identity()).max_abs() < 1e-8);
        }
    }

    #[test]
    fn delta_has_plemelj_product() {
        for p in params() {
            let k = p.lambda_pm().0 * 0.37;
            let n = p.cut_direction() * I;
            let plus = p.delta_from(0.4, 0.3, k, Some(n)).unwrap();
            let minus = p.delta_from(0.4, 0.3, k, Some(-n)).unwrap();
            let f = p.f_function(0.4, 0.3, k).unwrap();
            assert!((plus * minus - f).norm() < 1e-8 * f.norm());
        }
    }

    #[test]
    fn mhat_jump_on_the_cut() {
        for p in params() {
            let k = p.lambda_pm().0 * -0.52;
            let n = p.cut_direction() * I;
            let (x, t) = (0.6, 0.25);
            let mp = p.mhat_from(x, t, k, Some(n)).unwrap();
            let mm = p.mhat_from(x, t, k, Some(-n)).unwrap();
            let f = p.f_function(x, t, k).unwrap();
            let v = Mat2::new(c(0.0, 0.0), f, -1.0 / f, c(0.0, 0.0));
            // f carries r from the side n, so that side is the reference value
            assert!((mm - mp * v).max_abs() < 1e-8);
        }
    }

    #[test]
    fn delta_tends_to_delta_infinity() {
        for p in params() {
            let dinf = p.delta_infinity(0.2, 0.5).unwrap();
            assert!(dinf.discrepancy < 1e-10);
            let d = p.delta_function(0.2, 0.5, c(300.0, 200.0)).unwrap();
            assert!((d - dinf.quadrature).norm() < 1e-2);
        }
    }

    #[test]
    fn delta_infinity_is_independent_of_x() {
        for p in params() {
            let a = p.delta_infinity(0.1, 0.7).unwrap().quadrature;
            let b = p.delta_infinity(0.9, 0.7).unwrap().quadrature;
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn c0_values() {
        let [plus, minus] = params();
        assert!(plus.c0().unwrap().norm() < 1e-10);
        assert!((minus.c0().unwrap() - c(0.0, -PI / 4.0)).norm() < 1e-10);
    }

    #[test]
    fn mcheck_is_unimodular_with_constant_jump() {
        for p in params() {
            let m = p.mcheck(c(0.3, -1.7)).unwrap();
            assert!((m.det() - 1.0).norm() < 1e-13);
            let n = p.cut_direction() * I;
            let mp = p.mcheck_from(c(0.0, 0.0), Some(n)).unwrap();
            let mm = p.mcheck_from(c(0.0, 0.0), Some(-n)).unwrap();
            let j = Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0));
            assert!((mm - mp * j).max_abs() < 1e-13);
        }
    }

    #[test]
    fn recovered_q_matches_the_phase_rotation() {
        for p in params() {
            for (x, t) in [(0.0, 0.0), (0.5, 1.0)] {
                let r = p.recover_q(x, t).unwrap();
                let exact = p.q0 * Complex64::from_polar(1.0, -2.0 * p.lam() * p.q0 * p.q0 * t);
                assert!((r.exact - exact).norm() < 1e-15);
                assert!(r.error() < 1e-10, "{}", r.error());
                assert!(r.route_disagreement() < 1e-6);
            }
        }
    }

    #[test]
    fn delta_vanishes_like_a_quarter_power_at_the_endpoint() {
        for p in params() {
            let (lp, _) = p.lambda_pm();
            let out = p.cut_direction();
            let d = |eps: f64| p.delta_function(0.3, 0.2, lp + out * eps).unwrap().norm().ln();
            // closer than the cut guard a side would be required
            let slope = (d(1e-4) - d(1e-5)) / (1e-4f64.ln() - 1e-5f64.ln());
            assert!((slope.abs() - 0.25).abs() < 0.02, "slope {slope}");
        }
    }

    #[test]
    fn closed_jumps_are_unimodular() {
        for p in params() {
            let pt = EvalPoint::new(0.3, 0.4, c(2.5, 0.0));
            assert!((p.closed_jump(PieceLabel::V1, &pt).unwrap().det() - 1.0).norm() < 1e-12);
        }
    }
}

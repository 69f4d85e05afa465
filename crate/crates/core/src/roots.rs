//! Zeros of analytic functions in rectangles by the argument principle.
//!
//! Winding numbers are accumulated from unwrapped phase increments along an
//! adaptively refined boundary polygon. The same samples give the power sums
//! of the enclosed zeros, which are used to detect a single cluster before
//! falling back to subdivision. Clusters are then located from moments on a
//! circle, which stay accurate for multiple zeros where Newton loses half
//! the digits.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Axis-aligned rectangle [re0, re1] x [im0, im1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Rect {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Self {
        Rect { re0, re1, im0, im1 }
    }

    pub fn width(&self) -> f64 {
        self.re1 - self.re0
    }

    pub fn height(&self) -> f64 {
        self.im1 - self.im0
    }

    pub fn size(&self) -> f64 {
        self.width().max(self.height())
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re0 - slack && z.re <= self.re1 + slack && z.im >= self.im0 - slack && z.im <= self.im1 + slack
    }

    /// Counter-clockwise corners starting at the lower left.
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re0, self.im0),
            Complex64::new(self.re1, self.im0),
            Complex64::new(self.re1, self.im1),
            Complex64::new(self.re0, self.im1),
        ]
    }

    /// Halves along the longer side at fraction `frac`.
    fn split(&self, frac: f64) -> [Rect; 2] {
        if self.width() >= self.height() {
            let xm = self.re0 + frac * self.width();
            [Rect::new(self.re0, xm, self.im0, self.im1), Rect::new(xm, self.re1, self.im0, self.im1)]
        } else {
            let ym = self.im0 + frac * self.height();
            [Rect::new(self.re0, self.re1, self.im0, ym), Rect::new(self.re0, self.re1, ym, self.im1)]
        }
    }

    fn inflate(&self, eps: f64) -> Rect {
        Rect::new(self.re0 - eps, self.re1 + eps, self.im0 - eps, self.im1 + eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    /// Accept a winding number within this distance of an integer.
    pub winding_tol: f64,
    /// Initial samples per edge.
    pub edge_samples: usize,
    /// Maximum bisection depth per boundary segment.
    pub max_refine: usize,
    pub max_depth: usize,
    pub max_retries: usize,
    /// Zeros closer than this are reported as one zero of combined order.
    pub merge_tol: f64,
    /// Newton stops once |f| is below this (or the step stalls).
    pub residual_tol: f64,
    /// Relative accuracy of f values; sets how far noise splits a multiple zero.
    pub relative_noise: f64,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig {
            winding_tol: 0.05,
            edge_samples: 16,
            max_refine: 40,
            max_depth: 40,
            max_retries: 6,
            merge_tol: 1e-6,
            residual_tol: 1e-10,
            relative_noise: 1e-12,
        }
    }
}

/// A zero with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub location: Complex64,
    pub order: u32,
}

struct Sample {
    z: Complex64,
    log: Complex64,
}

/// Boundary data of a closed polygon: winding number and the first two
/// power sums of the enclosed zeros.
struct ContourData {
    winding: f64,
    s1: Complex64,
    s2: Complex64,
}

/// Signal that f (nearly) vanishes on the path.
struct OnPath;

fn small_step(a: Complex64, b: Complex64) -> bool {
    let ratio = b / a;
    ratio.arg().abs() < PI / 4.0 && ratio.norm().ln().abs() < 1.0
}

/// Appends the refined samples of the segment (a, b], excluding a. A segment
/// is accepted once both halves show small phase and modulus changes; the
/// midpoint test catches zeros passed symmetrically between two samples.
fn refine_segment<F>(f: &F, a: (Complex64, Complex64), b: (Complex64, Complex64), depth: usize, cfg: &RootConfig, out: &mut Vec<(Complex64, Complex64)>) -> Result<std::result::Result<(), OnPath>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let zm = 0.5 * (a.0 + b.0);
    let fm = f(zm)?;
    if fm.norm() == 0.0 || !fm.re.is_finite() || !fm.im.is_finite() {
        return Ok(Err(OnPath));
    }
    if small_step(a.1, fm) && small_step(fm, b.1) {
        out.push((zm, fm));
        out.push(b);
        return Ok(Ok(()));
    }
    if depth >= cfg.max_refine {
        return Ok(Err(OnPath));
    }
    let m = (zm, fm);
    if let Err(e) = refine_segment(f, a, m, depth + 1, cfg, out)? {
        return Ok(Err(e));
    }
    refine_segment(f, m, b, depth + 1, cfg, out)
}

fn polygon_data<F>(f: &F, vertices: &[Complex64], cfg: &RootConfig) -> Result<std::result::Result<ContourData, OnPath>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let n = vertices.len();
    let mut coarse = Vec::new();
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        // sample from the lexicographically smaller end so that an edge shared
        // by two boxes yields bit-identical points (and cache hits)
        let forward = (a.re, a.im) <= (b.re, b.im);
        let (lo, hi) = if forward { (a, b) } else { (b, a) };
        let m = cfg.edge_samples;
        for j in 0..m {
            let t = if forward { j } else { m - j };
            coarse.push(lo + (hi - lo) * (t as f64 / m as f64));
        }
    }
    let values: Vec<Complex64> = coarse.par_iter().map(|&z| f(z)).collect::<Result<_>>()?;
    if values.iter().any(|v| v.norm() == 0.0 || !v.re.is_finite() || !v.im.is_finite()) {
        return Ok(Err(OnPath));
    }
    let mut pts: Vec<(Complex64, Complex64)> = vec![(coarse[0], values[0])];
    for i in 0..coarse.len() {
        let a = (coarse[i], values[i]);
        let j = (i + 1) % coarse.len();
        let b = (coarse[j], values[j]);
        if let Err(e) = refine_segment(f, a, b, 0, cfg, &mut pts)? {
            return Ok(Err(e));
        }
    }
    // pts closes the loop: last point equals the first vertex
    let mut samples = Vec::with_capacity(pts.len());
    let mut log = Complex64::new(pts[0].1.norm().ln(), pts[0].1.arg());
    samples.push(Sample { z: pts[0].0, log });
    for w in pts.windows(2) {
        let ratio = w[1].1 / w[0].1;
        log += Complex64::new(ratio.norm().ln(), ratio.arg());
        samples.push(Sample { z: w[1].0, log });
    }
    let total = samples.last().unwrap().log - samples[0].log;
    let winding = total.im / (2.0 * PI);
    let n_wind = winding.round();
    // power sums via integration by parts against the unwrapped logarithm
    let z0 = samples[0].z;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut i0 = Complex64::new(0.0, 0.0);
    let mut i1 = Complex64::new(0.0, 0.0);
    for w in samples.windows(2) {
        let dz = w[1].z - w[0].z;
        i0 += dz * (w[0].log + w[1].log) * 0.5;
        i1 += dz * (w[0].z * w[0].log + w[1].z * w[1].log) * 0.5;
    }
    let s1 = (z0 * two_pi_i * n_wind - i0) / two_pi_i;
    let s2 = (z0 * z0 * two_pi_i * n_wind - 2.0 * i1) / two_pi_i;
    Ok(Ok(ContourData { winding, s1, s2 }))
}

fn rounded_winding(w: f64, at: Complex64, cfg: &RootConfig) -> Result<i64> {
    let r = w.round();
    if (w - r).abs() > cfg.winding_tol {
        return Err(Error::AmbiguousWinding { at, value: w });
    }
    Ok(r as i64)
}

/// Winding number of f around the circle |z - center| = radius.
pub fn winding_on_circle<F>(f: &F, center: Complex64, radius: f64, cfg: &RootConfig) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let m = 32;
    let verts: Vec<Complex64> = (0..m)
        .map(|j| center + Complex64::from_polar(radius, 2.0 * PI * j as f64 / m as f64))
        .collect();
    match polygon_data(f, &verts, &RootConfig { edge_samples: 2, ..*cfg })? {
        Ok(d) => rounded_winding(d.winding, center, cfg),
        Err(OnPath) => Err(Error::AmbiguousWinding { at: center, value: f64::NAN }),
    }
}

/// Winding number of f around the boundary of `rect`.
pub fn winding_on_rect<F>(f: &F, rect: &Rect, cfg: &RootConfig) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    match polygon_data(f, &rect.corners(), cfg)? {
        Ok(d) => rounded_winding(d.winding, Complex64::new(rect.re0, rect.im0), cfg),
        Err(OnPath) => Err(Error::ZeroOnBoundary { retries: 0 }),
    }
}

fn central_derivative<F>(f: &F, z: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    Ok((f(z + h)? - f(z - h)?) / (2.0 * h))
}

/// Multiplicity-corrected Newton iteration z <- z - m f / f' with a central
/// difference derivative.
pub fn newton<F>(f: &F, start: Complex64, multiplicity: u32, scale: f64, cfg: &RootConfig) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let mut z = start;
    let mut fz = f(z)?;
    let m = multiplicity.max(1) as f64;
    for _ in 0..60 {
        if fz.norm() == 0.0 {
            break;
        }
        let h = 1e-6 * scale.max(z.norm()).max(1e-3);
        let d = central_derivative(f, z, h)?;
        if d.norm() == 0.0 {
            break;
        }
        let step = fz / d * m;
        let mut trial = z - step;
        let mut ft = f(trial)?;
        // damp steps that increase |f|
        let mut damp = 0;
        while ft.norm() > fz.norm() && damp < 8 {
            trial = z - step * 0.5f64.powi(damp + 1);
            ft = f(trial)?;
            damp += 1;
        }
        if ft.norm() > fz.norm() {
            break;
        }
        let moved = (trial - z).norm();
        z = trial;
        fz = ft;
        if moved <= 1e-15 * scale.max(z.norm()) || (fz.norm() < cfg.residual_tol && moved < 1e-12 * scale.max(1.0)) {
            break;
        }
    }
    Ok(z)
}

/// Zero count and power sums Σ (z_i - center)^p, p = 1..=max_power, of the
/// zeros inside a circle, from `n` equispaced samples. The derivative along
/// the circle is taken spectrally, so the trapezoid sums converge
/// geometrically.
pub struct CircleMoments {
    pub count: f64,
    pub sums: Vec<Complex64>,
    pub min_abs: f64,
    pub max_abs: f64,
}

pub fn circle_moments<F>(f: &F, center: Complex64, radius: f64, n: usize, max_power: usize) -> Result<CircleMoments>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let nodes: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
        .collect();
    let values: Vec<Complex64> = nodes
        .par_iter()
        .map(|&w| f(center + w * radius))
        .collect::<Result<_>>()?;
    let min_abs = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !(min_abs > 0.0) || !max_abs.is_finite() {
        return Ok(CircleMoments {
            count: f64::NAN,
            sums: Vec::new(),
            min_abs,
            max_abs,
        });
    }
    // f is entire, so only nonnegative frequencies are present on the circle
    let mut planner = rustfft::FftPlanner::new();
    let mut coef = values.clone();
    planner.plan_fft_forward(n).process(&mut coef);
    let mut deriv: Vec<Complex64> = coef
        .iter()
        .enumerate()
        .map(|(m, c)| c * Complex64::new(0.0, m as f64) / n as f64)
        .collect();
    planner.plan_fft_inverse(n).process(&mut deriv);
    let scale = Complex64::new(0.0, -1.0 / n as f64);
    let mut count = Complex64::new(0.0, 0.0);
    let mut sums = vec![Complex64::new(0.0, 0.0); max_power];
    for j in 0..n {
        let ratio = deriv[j] / values[j];
        count += ratio;
        let w = nodes[j] * radius;
        let mut wp = ratio;
        for s in sums.iter_mut() {
            wp *= w;
            *s += wp;
        }
    }
    Ok(CircleMoments {
        count: (count * scale).re,
        sums: sums.into_iter().map(|s| s * scale).collect(),
        min_abs,
        max_abs,
    })
}

/// Roots of the monic polynomial whose roots have power sums `p` (Newton's
/// identities, then Durand-Kerner).
fn roots_from_power_sums(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len();
    let one = Complex64::new(1.0, 0.0);
    // elementary symmetric polynomials
    let mut e = vec![one; n + 1];
    for k in 1..=n {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[k - i] * p[i - 1] * sign;
        }
        e[k] = acc / k as f64;
    }
    // w^n - e1 w^(n-1) + e2 w^(n-2) - ...
    let coeffs: Vec<Complex64> = (0..=n)
        .map(|k| if k % 2 == 0 { e[k] } else { -e[k] })
        .collect();
    let eval = |w: Complex64| coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c);
    let bound = 1.0 + coeffs[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(0.5 * bound, 0.4 + 2.0 * PI * j as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut den = one;
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                continue;
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved <= 1e-16 * bound {
            break;
        }
    }
    z
}

/// Resolves a cluster of `expected` zeros near `approx` from moments on a
/// circle of radius at most `rmax`. Zeros closer than `merge_tol` are merged;
/// isolated simple zeros are polished by Newton. Returns None when no
/// circle with exactly `expected` zeros and converged sums was found.
pub fn resolve_cluster<F>(f: &F, approx: Complex64, expected: u32, rmax: f64, scale: f64, cfg: &RootConfig) -> Result<Option<Vec<Root>>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let mut radius = rmax;
    for _ in 0..4 {
        if let Some((sums, eta)) = moments_on_circle(f, approx, expected, radius, cfg)? {
            // recentre on the cluster and repeat for better conditioning
            let shift = sums[0] / expected as f64;
            let center = approx + shift;
            let (sums, eta) = if shift.norm() > 0.05 * radius {
                match moments_on_circle(f, center, expected, radius, cfg)? {
                    Some(s) => s,
                    None => return Ok(None),
                }
            } else {
                (shift_sums(&sums, shift), eta)
            };
            let ws = roots_from_power_sums(&sums);
            if ws.iter().any(|w| !(w.norm() < radius)) {
                return Ok(None);
            }
            return Ok(Some(group_and_polish(f, center, &ws, eta, radius, scale, cfg)?));
        }
        radius /= 3.0;
    }
    Ok(None)
}

/// Power sums about `c + shift` from power sums about `c` (binomial expansion).
fn shift_sums(sums: &[Complex64], shift: Complex64) -> Vec<Complex64> {
    let n = sums.len();
    let count = n as f64;
    let mut out = Vec::with_capacity(n);
    for p in 1..=n {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut binom = 1.0;
        for j in 0..=p {
            let pj = if j == 0 { Complex64::new(count, 0.0) } else { sums[j - 1] };
            acc += pj * (-shift).powu((p - j) as u32) * binom;
            binom *= (p - j) as f64 / (j + 1) as f64;
        }
        out.push(acc);
    }
    out
}

fn moments_on_circle<F>(f: &F, center: Complex64, expected: u32, radius: f64, cfg: &RootConfig) -> Result<Option<(Vec<Complex64>, f64)>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let powers = expected as usize;
    let mut n = 64;
    let mut prev = circle_moments(f, center, radius, n, powers)?;
    if !prev.count.is_finite() {
        return Ok(None);
    }
    while n < 512 {
        n *= 2;
        let cur = circle_moments(f, center, radius, n, powers)?;
        if !cur.count.is_finite() {
            return Ok(None);
        }
        let diff = cur
            .sums
            .iter()
            .zip(&prev.sums)
            .enumerate()
            .map(|(p, (a, b))| (a - b).norm() / radius.powi(p as i32 + 1))
            .fold((cur.count - prev.count).abs(), f64::max);
        if diff < 1e-9 {
            if (cur.count - expected as f64).abs() > 1e-3 {
                return Ok(None);
            }
            let eta = cfg.relative_noise * cur.max_abs / cur.min_abs;
            return Ok(Some((cur.sums, eta)));
        }
        prev = cur;
    }
    Ok(None)
}

/// Groups numerically coincident roots. An m-fold zero perturbed by relative
/// noise eta splits by about eta^(1/m) times the circle radius, so groups of
/// m roots within that distance (or merge_tol) are merged, largest first.
fn group_and_polish<F>(f: &F, center: Complex64, ws: &[Complex64], eta: f64, radius: f64, scale: f64, cfg: &RootConfig) -> Result<Vec<Root>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let n = ws.len();
    let mut assigned = vec![false; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for m in (2..=n).rev() {
        let reach = cfg.merge_tol.max(2.0 * eta.powf(1.0 / m as f64) * radius);
        for i in 0..n {
            if assigned[i] {
                continue;
            }
            let mut near: Vec<(f64, usize)> = (0..n)
                .filter(|&j| !assigned[j])
                .map(|j| ((ws[j] - ws[i]).norm(), j))
                .filter(|(d, _)| *d < reach)
                .collect();
            if near.len() >= m {
                near.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                let g: Vec<usize> = near[..m].iter().map(|(_, j)| *j).collect();
                for &j in &g {
                    assigned[j] = true;
                }
                groups.push(g);
            }
        }
    }
    groups.extend((0..n).filter(|&i| !assigned[i]).map(|i| vec![i]));
    let mut roots = Vec::with_capacity(groups.len());
    for g in &groups {
        let mean = g.iter().map(|&i| ws[i]).sum::<Complex64>() / g.len() as f64;
        let mut location = center + mean;
        if g.len() == 1 {
            let gap = ws
                .iter()
                .map(|w| (w - mean).norm())
                .filter(|d| *d > 0.0)
                .fold(f64::INFINITY, f64::min);
            let polished = newton(f, location, 1, scale, cfg)?;
            // keep the polish only if it stayed with this zero
            if (polished - location).norm() < 0.25 * gap.min(1e-2 * scale) {
                location = polished;
            }
        }
        roots.push(Root {
            location,
            order: g.len() as u32,
        });
    }
    Ok(roots)
}

/// Order of the zero at `z`: the winding number on circles of decreasing
/// radius, accepted once two consecutive radii agree.
pub fn classify_order<F>(f: &F, z: Complex64, scale: f64, cfg: &RootConfig) -> Result<u32>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let mut radius = 1e-2 * scale;
    let mut last: Option<i64> = None;
    for _ in 0..8 {
        let m = circle_moments(f, z, radius, 128, 0)?;
        if m.count.is_finite() && (m.count - m.count.round()).abs() < cfg.winding_tol {
            let w = m.count.round() as i64;
            if last == Some(w) && w >= 0 {
                return Ok(w as u32);
            }
            last = Some(w);
        } else {
            last = None;
        }
        radius /= 4.0;
    }
    Err(Error::AmbiguousWinding {
        at: z,
        value: last.map(|w| w as f64).unwrap_or(f64::NAN),
    })
}

/// All zeros of f inside `rect`, sorted lexicographically by (re, im).
pub fn find_roots<F>(f: &F, rect: Rect, cfg: &RootConfig) -> Result<Vec<Root>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let scale = rect.size().max(1.0);
    let mut outer = rect;
    let mut data = None;
    for retry in 0..=cfg.max_retries {
        match polygon_data(f, &outer.corners(), cfg)? {
            Ok(d) => {
                data = Some(d);
                break;
            }
            Err(OnPath) => {
                if retry == cfg.max_retries {
                    return Err(Error::ZeroOnBoundary { retries: retry });
                }
                outer = outer.inflate(1e-3 * scale * (retry as f64 + 1.0));
            }
        }
    }
    let data = data.expect("set in loop");
    let n = rounded_winding(data.winding, Complex64::new(outer.re0, outer.im0), cfg)?;
    let mut roots = search(f, outer, data, n, 0, scale, cfg)?;
    roots.sort_by(|a, b| {
        a.location
            .re
            .partial_cmp(&b.location.re)
            .unwrap()
            .then(a.location.im.partial_cmp(&b.location.im).unwrap())
    });
    let total: i64 = roots.iter().map(|r| r.order as i64).sum();
    if total != n {
        return Err(Error::WindingInconsistent {
            parent: n,
            children: total,
        });
    }
    Ok(roots)
}

/// Largest cluster resolved from circle moments without subdivision.
const MAX_CLUSTER: i64 = 6;

const SPLITS: [f64; 4] = [0.4873, 0.5391, 0.4411, 0.5583];

fn search<F>(f: &F, rect: Rect, data: ContourData, n: i64, depth: usize, scale: f64, cfg: &RootConfig) -> Result<Vec<Root>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    if n <= 0 {
        return Ok(Vec::new());
    }
    let nf = n as f64;
    let centroid = data.s1 / nf;
    let spread = (data.s2 / nf - centroid * centroid).norm().sqrt();
    let tiny = rect.size() < 10.0 * cfg.merge_tol;
    if n <= MAX_CLUSTER && (n == 1 || spread < 0.1 * rect.size() || tiny) {
        if let Some(found) = resolve_cluster(f, centroid, n as u32, 0.3 * rect.size(), scale, cfg)? {
            if found.iter().all(|r| rect.contains(r.location, 1e-9 * scale)) {
                return Ok(found);
            }
        }
    }
    if depth >= cfg.max_depth {
        return Err(Error::LimitNonConvergent(format!(
            "zero search did not isolate {n} zeros near {centroid}"
        )));
    }
    for &frac in SPLITS.iter() {
        let children = rect.split(frac);
        let outcome: Vec<Result<std::result::Result<ContourData, OnPath>>> = children
            .par_iter()
            .map(|c| polygon_data(f, &c.corners(), cfg))
            .collect();
        let mut datas = Vec::with_capacity(2);
        let mut on_path = false;
        for o in outcome {
            match o? {
                Ok(d) => datas.push(d),
                Err(OnPath) => on_path = true,
            }
        }
        if on_path {
            continue;
        }
        let counts: Vec<i64> = datas
            .iter()
            .zip(children.iter())
            .map(|(d, c)| rounded_winding(d.winding, Complex64::new(c.re0, c.im0), cfg))
            .collect::<Result<_>>()?;
        let sum: i64 = counts.iter().sum();
        if sum != n {
            return Err(Error::WindingInconsistent {
                parent: n,
                children: sum,
            });
        }
        let parts: Vec<Result<Vec<Root>>> = children
            .into_par_iter()
            .zip(datas.into_par_iter())
            .zip(counts.into_par_iter())
            .map(|((c, d), m)| search(f, c, d, m, depth + 1, scale, cfg))
            .collect();
        let mut roots = Vec::new();
        for p in parts {
            roots.extend(p?);
        }
        return Ok(roots);
    }
    Err(Error::ZeroOnBoundary {
        retries: SPLITS.len(),
    })
}

//! Gauss-Legendre rules and an endpoint-graded variant for integrands with
//! logarithmic or inverse-square-root endpoint behaviour.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Cached rule; nodes by Newton iteration on P_n from Tricomi's initial guess.
    pub fn get(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(r) = cache.lock().unwrap().get(&n) {
            return r.clone();
        }
        let rule = Arc::new(Self::compute(n));
        cache.lock().unwrap().insert(n, rule.clone());
        rule
    }

    fn compute(n: usize) -> GaussLegendre {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of f over [a, b].
    pub fn integrate<F: Fn(f64) -> Complex64>(&self, a: f64, b: f64, f: F) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| f(mid + half * x) * *w)
            .sum::<Complex64>()
            * half
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Smooth map of [-1, 1] onto itself whose derivative vanishes to second
/// order at both ends: g(u) = u (15 - 10 u^2 + 3 u^4) / 8.
pub fn graded_map(u: f64) -> (f64, f64) {
    let u2 = u * u;
    let g = u * (15.0 - 10.0 * u2 + 3.0 * u2 * u2) / 8.0;
    let dg = 15.0 / 8.0 * (1.0 - u2) * (1.0 - u2);
    (g, dg)
}

/// Integral over [-1, 1] with the graded substitution and Gauss-Legendre
/// node doubling until two successive rules agree to `tol * max(1, |I|)`.
pub fn integrate_graded<F>(f: F, tol: f64, start: usize, max_nodes: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let eval = |n: usize| {
        GaussLegendre::get(n).integrate(-1.0, 1.0, |u| {
            let (g, dg) = graded_map(u);
            f(g) * dg
        })
    };
    let mut n = start.max(8);
    let mut prev = eval(n);
    while 2 * n <= max_nodes {
        n *= 2;
        let cur = eval(n);
        if (cur - prev).norm() <= tol * cur.norm().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!(
        "no {tol:e} agreement with {max_nodes} nodes"
    )))
}

/// Inverse of `graded_map` on [-1, 1] by bisection.
pub fn graded_inverse(g: f64) -> f64 {
    let g = g.clamp(-1.0, 1.0);
    let (mut lo, mut hi) = (-1.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if graded_map(mid).0 < g {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Like `integrate_graded`, for integrands with a near-singularity at
/// graded coordinate `u_star` on scale `width`: composite Gauss-Legendre
/// panels whose breakpoints approach u_star geometrically. The node count
/// per panel doubles from 16 until the totals agree.
pub fn integrate_graded_near<F>(f: F, u_star: f64, width: f64, tol: f64, max_nodes: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let w = width.clamp(1e-14, 1.0);
    let mut breaks = vec![-1.0, 1.0, u_star.clamp(-1.0, 1.0)];
    let mut h = w;
    while h < 2.0 {
        breaks.push(u_star - h);
        breaks.push(u_star + h);
        h *= 4.0;
    }
    let mut breaks: Vec<f64> = breaks.into_iter().filter(|b| (-1.0..=1.0).contains(b)).collect();
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let eval = |n: usize| {
        let rule = GaussLegendre::get(n);
        breaks
            .windows(2)
            .map(|p| {
                rule.integrate(p[0], p[1], |u| {
                    let (g, dg) = graded_map(u);
                    f(g) * dg
                })
            })
            .sum::<Complex64>()
    };
    let mut n = 16;
    let mut prev = eval(n);
    while 2 * n <= max_nodes {
        n *= 2;
        let cur = eval(n);
        if (cur - prev).norm() <= tol * cur.norm().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!(
        "no {tol:e} agreement with {max_nodes} nodes per panel"
    )))
}

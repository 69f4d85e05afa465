//! Zeros of 4 - Δ², their multiplicities, and the branch cuts joining the
//! odd-order ones.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::{self, Rect, RootConfig};
use crate::spectral::SpectralData;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchKind {
    Real,
    Imaginary,
    Generic,
}

/// A zero of 4 - Δ² with its order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub location: Complex64,
    pub order: u32,
    pub kind: BranchKind,
    /// |4 - Δ²| at the reported location.
    pub residual: f64,
}

impl BranchPoint {
    pub fn is_odd(&self) -> bool {
        self.order % 2 == 1
    }
}

/// Excluded disk |k - nπ/L| < π/(4L).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub index: i64,
    pub center: f64,
    pub radius: f64,
}

impl Disk {
    pub fn new(index: i64, period: f64) -> Self {
        Disk {
            index,
            center: index as f64 * PI / period,
            radius: PI / (4.0 * period),
        }
    }

    pub fn contains(&self, k: Complex64) -> bool {
        (k - self.center).norm() < self.radius
    }
}

pub fn excluded_disks(period: f64, n_range: std::ops::RangeInclusive<i64>) -> Vec<Disk> {
    n_range.map(|n| Disk::new(n, period)).collect()
}

/// True when k lies in some excluded disk.
pub fn in_excluded_disk(period: f64, k: Complex64) -> bool {
    let n = (k.re * period / PI).round() as i64;
    Disk::new(n, period).contains(k)
}

/// Default zero-search rectangle: |Re k| <= Nπ/L + π/(2L) and
/// |Im k| <= max(1.5 max|q0|, π/(4L)).
pub fn default_search_box(sd: &SpectralData, n_disks: usize) -> Rect {
    let l = sd.period();
    let re = n_disks as f64 * PI / l + PI / (2.0 * l);
    let im = (1.5 * sd.datum().max_abs()).max(PI / (4.0 * l));
    Rect::new(-re, re, -im, im)
}

/// 4 - Δ(k)².
pub fn four_minus_delta_sq(sd: &SpectralData, k: Complex64) -> Result<Complex64> {
    let d = sd.discriminant(k)?;
    Ok(4.0 - d * d)
}

/// Tolerance under which a zero counts as lying on an axis.
fn axis_tol(scale: f64) -> f64 {
    1e-9 * scale.max(1.0)
}

fn kind_of(z: Complex64, scale: f64) -> BranchKind {
    let tol = axis_tol(scale);
    if z.im.abs() <= tol {
        BranchKind::Real
    } else if z.re.abs() <= tol {
        BranchKind::Imaginary
    } else {
        BranchKind::Generic
    }
}

/// All zeros of 4 - Δ² in `rect` with their orders, lexicographically
/// sorted. Zeros within the axis tolerance of ℝ or iℝ are snapped onto it.
pub fn locate_zeros(sd: &SpectralData, rect: Rect, cfg: &RootConfig) -> Result<Vec<BranchPoint>> {
    let bound = sd.config().conditioning_bound;
    let worst = rect.im0.abs().max(rect.im1.abs()) * sd.period();
    if worst > bound {
        return Err(Error::InvalidInput(format!(
            "search box reaches |Im k| L = {worst:.3}, beyond the conditioning bound {bound}"
        )));
    }
    let f = |k: Complex64| four_minus_delta_sq(sd, k);
    let found = roots::find_roots(&f, rect, cfg)?;
    let scale = rect.size();
    let tol = axis_tol(scale);
    let mut out = Vec::with_capacity(found.len());
    for r in found {
        let mut z = r.location;
        if z.im.abs() <= tol {
            z.im = 0.0;
        }
        if z.re.abs() <= tol {
            z.re = 0.0;
        }
        let residual = f(z)?.norm();
        out.push(BranchPoint {
            location: z,
            order: r.order,
            kind: kind_of(z, scale),
            residual,
        });
    }
    Ok(out)
}

/// Order of the zero of 4 - Δ² at `point`.
pub fn classify_order(sd: &SpectralData, point: Complex64, cfg: &RootConfig) -> Result<u32> {
    let f = |k: Complex64| four_minus_delta_sq(sd, k);
    roots::classify_order(&f, point, 1.0, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CutGeometry {
    /// Subinterval of ℝ, oriented to the right.
    Real,
    /// Vertical segment, oriented upward.
    Vertical,
}

/// A branch cut. `from` and `to` follow the orientation; the + side is on
/// the left of the direction of travel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutSegment {
    pub from: Complex64,
    pub to: Complex64,
    pub geometry: CutGeometry,
}

impl CutSegment {
    pub fn direction(&self) -> Complex64 {
        let d = self.to - self.from;
        d / d.norm()
    }

    /// Unit normal pointing to the + (left) side.
    pub fn plus_normal(&self) -> Complex64 {
        self.direction() * Complex64::i()
    }

    /// Distance from k to the segment.
    pub fn distance(&self, k: Complex64) -> f64 {
        let d = self.to - self.from;
        let s = ((k - self.from) * d.conj()).re / d.norm_sqr();
        let p = self.from + d * s.clamp(0.0, 1.0);
        (k - p).norm()
    }

    /// True when k is in the open segment within `tol`.
    pub fn contains(&self, k: Complex64, tol: f64) -> bool {
        self.distance(k) <= tol && (k - self.from).norm() > tol && (k - self.to).norm() > tol
    }
}

/// Branch cuts of √(4 - Δ²) together with the branch points found.
#[derive(Debug, Clone, PartialEq)]
pub struct CutSet {
    pub segments: Vec<CutSegment>,
    pub points: Vec<BranchPoint>,
}

impl CutSet {
    pub fn empty() -> Self {
        CutSet {
            segments: Vec::new(),
            points: Vec::new(),
        }
    }

    /// Endpoints of all cuts.
    pub fn endpoints(&self) -> Vec<Complex64> {
        self.segments.iter().flat_map(|s| [s.from, s.to]).collect()
    }

    /// Largest |Im| over the cut endpoints.
    pub fn max_abs_im(&self) -> f64 {
        self.endpoints().iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_re(&self) -> f64 {
        self.endpoints().iter().map(|z| z.re.abs()).fold(0.0, f64::max)
    }

    /// The segment containing k, if any.
    pub fn segment_at(&self, k: Complex64, tol: f64) -> Option<&CutSegment> {
        self.segments.iter().find(|s| s.contains(k, tol))
    }

    /// Zeros CSV: re, im, order.
    pub fn write_zeros_csv<W: Write>(&self, out: W) -> Result<()> {
        write_zeros_csv(&self.points, out)
    }
}

pub fn write_zeros_csv<W: Write>(points: &[BranchPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re", "im", "order"])?;
    for p in points {
        w.write_record([
            format!("{:.17e}", p.location.re),
            format!("{:.17e}", p.location.im),
            p.order.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Cut set from the zeros of 4 - Δ². Odd-order zeros sharing a vertical line
/// are joined consecutively in Im (a lone conjugate pair gives one segment
/// through ℝ); odd-order real zeros are joined consecutively across gaps
/// where |Δ| > 2. Even-order zeros get no cut.
pub fn build_cuts(sd: &SpectralData, points: &[BranchPoint]) -> Result<CutSet> {
    let scale = points
        .iter()
        .map(|p| p.location.norm())
        .fold(1.0, f64::max);
    let tol = axis_tol(scale);
    let odd: Vec<Complex64> = points.iter().filter(|p| p.is_odd()).map(|p| p.location).collect();
    let mut real: Vec<f64> = odd.iter().filter(|z| z.im.abs() <= tol).map(|z| z.re).collect();
    real.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut off: Vec<Complex64> = odd.iter().copied().filter(|z| z.im.abs() > tol).collect();
    off.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));

    let mut segments = Vec::new();
    let mut i = 0;
    while i < real.len() {
        if i + 1 >= real.len() {
            return Err(Error::UnpairedZero { at: Complex64::new(real[i], 0.0) });
        }
        let mid = 0.5 * (real[i] + real[i + 1]);
        let d = sd.discriminant(Complex64::new(mid, 0.0))?;
        if d.re.abs() <= 2.0 {
            return Err(Error::UnpairedZero { at: Complex64::new(real[i], 0.0) });
        }
        segments.push(CutSegment {
            from: Complex64::new(real[i], 0.0),
            to: Complex64::new(real[i + 1], 0.0),
            geometry: CutGeometry::Real,
        });
        i += 2;
    }

    let mut j = 0;
    while j < off.len() {
        let x0 = off[j].re;
        let mut line = vec![off[j]];
        let mut m = j + 1;
        while m < off.len() && (off[m].re - x0).abs() <= tol {
            line.push(off[m]);
            m += 1;
        }
        if line.len() % 2 == 1 {
            return Err(Error::UnpairedZero { at: line[line.len() - 1] });
        }
        line.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        let x = line.iter().map(|z| z.re).sum::<f64>() / line.len() as f64;
        for pair in line.chunks(2) {
            segments.push(CutSegment {
                from: Complex64::new(x, pair[0].im),
                to: Complex64::new(x, pair[1].im),
                geometry: CutGeometry::Vertical,
            });
        }
        j = m;
    }
    check_overlaps(&segments, points, tol)?;
    Ok(CutSet {
        segments,
        points: points.to_vec(),
    })
}

fn check_overlaps(segments: &[CutSegment], points: &[BranchPoint], tol: f64) -> Result<()> {
    for (i, a) in segments.iter().enumerate() {
        for b in &segments[i + 1..] {
            if let Some(at) = intersection(a, b, tol) {
                return Err(Error::OverlappingCuts { at });
            }
        }
        // a cut may not run through another odd-order zero
        for p in points.iter().filter(|p| p.is_odd()) {
            if a.contains(p.location, tol) {
                return Err(Error::OverlappingCuts { at: p.location });
            }
        }
    }
    Ok(())
}

fn intersection(a: &CutSegment, b: &CutSegment, tol: f64) -> Option<Complex64> {
    use CutGeometry::*;
    match (a.geometry, b.geometry) {
        (Real, Real) => {
            let lo = a.from.re.max(b.from.re);
            let hi = a.to.re.min(b.to.re);
            (hi > lo + tol).then(|| Complex64::new(0.5 * (lo + hi), 0.0))
        }
        (Vertical, Vertical) => {
            if (a.from.re - b.from.re).abs() > tol {
                return None;
            }
            let lo = a.from.im.max(b.from.im);
            let hi = a.to.im.min(b.to.im);
            (hi > lo + tol).then(|| Complex64::new(a.from.re, 0.5 * (lo + hi)))
        }
        (Real, Vertical) | (Vertical, Real) => {
            let (r, v) = if a.geometry == Real { (a, b) } else { (b, a) };
            let x = v.from.re;
            let crosses = v.from.im < -tol && v.to.im > tol;
            (crosses && x > r.from.re - tol && x < r.to.re + tol).then(|| Complex64::new(x, 0.0))
        }
    }
}

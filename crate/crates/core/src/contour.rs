//! The oriented jump contour ℝ ∪ iℝ ∪ 𝒞 split into labeled pieces.
//!
//! Axis orientation: ℝ₊ points right and iℝ₋ points up (toward 0), ℝ₋ points
//! left and iℝ₊ points down (toward 0). The + side is the left of the
//! direction of travel, so ℝ₊ and iℝ₊ have D₁ on their + side while ℝ₋ and
//! iℝ₋ have D₃. Off-axis vertical cuts point up.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::cuts::{CutGeometry, CutSet};
use crate::error::{Error, Result};

/// The twelve jump cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PieceLabel {
    V1,
    V2,
    V3,
    V4,
    VD1Cut,
    VD2Cut,
    VD3Cut,
    VD4Cut,
    V1Cut,
    V2Cut,
    V3Cut,
    V4Cut,
}

impl PieceLabel {
    pub const ALL: [PieceLabel; 12] = [
        PieceLabel::V1,
        PieceLabel::V2,
        PieceLabel::V3,
        PieceLabel::V4,
        PieceLabel::VD1Cut,
        PieceLabel::VD2Cut,
        PieceLabel::VD3Cut,
        PieceLabel::VD4Cut,
        PieceLabel::V1Cut,
        PieceLabel::V2Cut,
        PieceLabel::V3Cut,
        PieceLabel::V4Cut,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PieceLabel::V1 => "v1",
            PieceLabel::V2 => "v2",
            PieceLabel::V3 => "v3",
            PieceLabel::V4 => "v4",
            PieceLabel::VD1Cut => "vD1cut",
            PieceLabel::VD2Cut => "vD2cut",
            PieceLabel::VD3Cut => "vD3cut",
            PieceLabel::VD4Cut => "vD4cut",
            PieceLabel::V1Cut => "v1cut",
            PieceLabel::V2Cut => "v2cut",
            PieceLabel::V3Cut => "v3cut",
            PieceLabel::V4Cut => "v4cut",
        }
    }

    /// True for pieces lying on a branch cut.
    pub fn on_cut(self) -> bool {
        !matches!(self, PieceLabel::V1 | PieceLabel::V2 | PieceLabel::V3 | PieceLabel::V4)
    }
}

impl fmt::Display for PieceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PieceLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PieceLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown piece label {s:?}")))
    }
}

impl Serialize for PieceLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quadrant {
    D1,
    D2,
    D3,
    D4,
}

impl Quadrant {
    /// Open quadrant containing k, if any.
    pub fn of(k: Complex64) -> Option<Quadrant> {
        match (k.re, k.im) {
            (re, im) if re > 0.0 && im > 0.0 => Some(Quadrant::D1),
            (re, im) if re < 0.0 && im > 0.0 => Some(Quadrant::D2),
            (re, im) if re < 0.0 && im < 0.0 => Some(Quadrant::D3),
            (re, im) if re > 0.0 && im < 0.0 => Some(Quadrant::D4),
            _ => None,
        }
    }
}

/// One oriented piece. `from`/`to` are `None` at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub label: PieceLabel,
    /// For axis pieces, the quadrant on the + side; otherwise the one
    /// containing the piece.
    pub quadrant: Quadrant,
    pub from: Option<Complex64>,
    pub to: Option<Complex64>,
    pub direction: Complex64,
}

impl Piece {
    pub fn plus_normal(&self) -> Complex64 {
        self.direction * Complex64::i()
    }

    pub fn is_ray(&self) -> bool {
        self.from.is_none() || self.to.is_none()
    }

    /// Finite endpoint of a ray, or `from` of a segment.
    fn base(&self) -> Complex64 {
        self.from.or(self.to).expect("piece has a finite end")
    }

    /// Distance from k to the piece.
    pub fn distance(&self, k: Complex64) -> f64 {
        let base = self.base();
        let s = ((k - base) * self.direction.conj()).re;
        let (lo, hi) = match (self.from, self.to) {
            (Some(a), Some(b)) => (0.0, (b - a).norm()),
            // ray starting at `from`
            (Some(_), None) => (0.0, f64::INFINITY),
            // ray arriving at `to` from infinity
            (None, Some(_)) => (f64::NEG_INFINITY, 0.0),
            (None, None) => unreachable!(),
        };
        let p = base + self.direction * s.clamp(lo, hi);
        (k - p).norm()
    }

    /// Open-piece membership within `tol`.
    pub fn contains(&self, k: Complex64, tol: f64) -> bool {
        self.distance(k) <= tol
            && self.from.is_none_or(|a| (k - a).norm() > tol)
            && self.to.is_none_or(|b| (k - b).norm() > tol)
    }

    /// A representative interior point, used for tests and sampling.
    pub fn sample(&self, s: f64) -> Complex64 {
        match (self.from, self.to) {
            (Some(a), Some(b)) => a + (b - a) * s,
            (Some(a), None) => a + self.direction * (s / (1.0 - s)),
            (None, Some(b)) => b - self.direction * ((1.0 - s) / s),
            (None, None) => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub pieces: Vec<Piece>,
    /// Branch points and self-intersections.
    pub star_points: Vec<Complex64>,
}

/// Relative tolerance for piece membership.
pub const PIECE_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Contour {
    /// The piece through k. Points within tolerance of a star point or of two
    /// pieces are rejected.
    pub fn locate(&self, k: Complex64) -> Result<&Piece> {
        let tol = PIECE_TOL * k.norm().max(1.0);
        if let Some(s) = self.star_points.iter().find(|s| (k - **s).norm() <= tol) {
            return Err(Error::InvalidInput(format!("{k} is a star point ({s})")));
        }
        let mut hits = self.pieces.iter().filter(|p| p.contains(k, tol));
        match (hits.next(), hits.next()) {
            (Some(p), None) => Ok(p),
            (None, _) => Err(Error::InvalidInput(format!("{k} is not on the contour"))),
            (Some(_), Some(_)) => Err(Error::InvalidInput(format!("{k} is on more than one piece"))),
        }
    }

    pub fn pieces_with(&self, label: PieceLabel) -> impl Iterator<Item = &Piece> {
        self.pieces.iter().filter(move |p| p.label == label)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pt = |z: Option<Complex64>| match z {
            Some(z) => serde_json::json!([z.re, z.im]),
            None => serde_json::Value::Null,
        };
        serde_json::json!({
            "star_points": self.star_points.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "pieces": self.pieces.iter().map(|p| serde_json::json!({
                "label": p.label,
                "quadrant": p.quadrant,
                "geometry": if p.is_ray() { "ray" } else { "segment" },
                "from": pt(p.from),
                "to": pt(p.to),
                "direction": [p.direction.re, p.direction.im],
            })).collect::<Vec<_>>(),
        })
    }
}

/// Splits ℝ and iℝ at the origin, cut endpoints and cut crossings, labels
/// every piece, and adds the off-axis cut pieces.
pub fn assemble_contour(cuts: &CutSet) -> Result<Contour> {
    let scale = cuts.endpoints().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    let real_cuts: Vec<(f64, f64)> = cuts
        .segments
        .iter()
        .filter(|s| s.geometry == CutGeometry::Real)
        .map(|s| (s.from.re.min(s.to.re), s.from.re.max(s.to.re)))
        .collect();
    let vertical: Vec<(f64, f64, f64)> = cuts
        .segments
        .iter()
        .filter(|s| s.geometry == CutGeometry::Vertical)
        .map(|s| (s.from.re, s.from.im.min(s.to.im), s.from.im.max(s.to.im)))
        .collect();
    let on_imag: Vec<(f64, f64)> = vertical
        .iter()
        .filter(|v| v.0.abs() <= tol)
        .map(|v| (v.1, v.2))
        .collect();

    let mut star = vec![c(0.0, 0.0)];
    star.extend(cuts.points.iter().filter(|p| p.is_odd()).map(|p| p.location));
    let mut real_breaks: Vec<f64> = real_cuts.iter().flat_map(|&(a, b)| [a, b]).collect();
    for v in &vertical {
        if v.1 < -tol && v.2 > tol && v.0.abs() > tol {
            real_breaks.push(v.0);
            star.push(c(v.0, 0.0));
        }
    }
    let imag_breaks: Vec<f64> = on_imag.iter().flat_map(|&(a, b)| [a, b]).collect();
    let inside = |iv: &[(f64, f64)], y: f64| iv.iter().any(|&(a, b)| y > a && y < b);

    let mut pieces = Vec::new();
    // positive half-axes: breakpoints sorted away from the origin
    let mut axis = |breaks: &[f64], sign: f64, unit: Complex64, cut_set: &[(f64, f64)], plain: PieceLabel, cut: PieceLabel, quadrant: Quadrant, toward_origin: bool| {
        let mut pts: Vec<f64> = breaks.iter().map(|b| b * sign).filter(|b| *b > tol).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() <= tol);
        let mut bounds = vec![0.0];
        bounds.extend(pts);
        for (i, lo) in bounds.iter().enumerate() {
            let hi = bounds.get(i + 1).copied();
            let mid = match hi {
                Some(h) => 0.5 * (lo + h),
                None => lo + 1.0,
            };
            let label = if inside(cut_set, mid * sign) { cut } else { plain };
            let near = Some(unit * *lo);
            let far = hi.map(|h| unit * h);
            let (from, to, direction) = if toward_origin { (far, near, -unit) } else { (near, far, unit) };
            pieces.push(Piece { label, quadrant, from, to, direction });
        }
    };
    axis(&imag_breaks, 1.0, c(0.0, 1.0), &on_imag, PieceLabel::V1, PieceLabel::V1Cut, Quadrant::D1, true);
    axis(&real_breaks, 1.0, c(1.0, 0.0), &real_cuts, PieceLabel::V2, PieceLabel::V2Cut, Quadrant::D1, false);
    axis(&imag_breaks, -1.0, c(0.0, -1.0), &on_imag, PieceLabel::V3, PieceLabel::V3Cut, Quadrant::D3, true);
    axis(&real_breaks, -1.0, c(-1.0, 0.0), &real_cuts, PieceLabel::V4, PieceLabel::V4Cut, Quadrant::D3, false);

    for &(x, lo, hi) in vertical.iter().filter(|v| v.0.abs() > tol) {
        let up = c(0.0, 1.0);
        let (upper, lower) = if x > 0.0 {
            ((PieceLabel::VD1Cut, Quadrant::D1), (PieceLabel::VD4Cut, Quadrant::D4))
        } else {
            ((PieceLabel::VD2Cut, Quadrant::D2), (PieceLabel::VD3Cut, Quadrant::D3))
        };
        let mut push = |a: f64, b: f64, (label, quadrant): (PieceLabel, Quadrant)| {
            pieces.push(Piece { label, quadrant, from: Some(c(x, a)), to: Some(c(x, b)), direction: up });
        };
        if lo < -tol && hi > tol {
            push(lo, 0.0, lower);
            push(0.0, hi, upper);
        } else if hi <= tol {
            push(lo, hi, lower);
        } else {
            push(lo, hi, upper);
        }
    }

    star.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    star.dedup_by(|a, b| (*a - *b).norm() <= tol);
    Ok(Contour { pieces, star_points: star })
}

//! Jump matrices on every piece of the contour, residue-condition
//! coefficients at the poles of Γ̃, and the origin consistency check.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::contour::{assemble_contour, Contour, Piece, PieceLabel, Quadrant};
use crate::cuts::CutSet;
use crate::error::{Error, Result};
use crate::gamma::{GammaTilde, PoleData};
use crate::mat2::Mat2;
use crate::spectral::{EvalPoint, SpectralData, SpectralValues};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpMatrix {
    pub label: PieceLabel,
    pub point: EvalPoint,
    pub entries: Mat2,
}

impl JumpMatrix {
    pub fn det_residual(&self) -> f64 {
        (self.entries.det() - 1.0).norm()
    }
}

#[derive(Serialize)]
struct JumpRecord {
    label: PieceLabel,
    x: f64,
    t: f64,
    k: [f64; 2],
    entries: [f64; 8],
    det_residual: f64,
}

/// Writes one JSON object per line.
pub fn write_jump_jsonl<W: Write>(records: &[JumpMatrix], mut out: W) -> Result<()> {
    for j in records {
        let rec = JumpRecord {
            label: j.label,
            x: j.point.x,
            t: j.point.t,
            k: [j.point.k.re, j.point.k.im],
            entries: j.entries.to_floats(),
            det_residual: j.det_residual(),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Coefficient of a residue condition: Res [m̃]_target equals the other
/// column of m̃ times `coefficient`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueConditionData {
    pub pole: PoleData,
    /// Where the condition sits (the pole or its conjugate).
    pub at: Complex64,
    pub coefficient: Complex64,
    pub target_column: u8,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Values entering the jump formulas at one k.
#[derive(Clone, Copy)]
struct Local {
    v: SpectralValues,
    lambda: f64,
    /// e^{2ikL}
    e2: Complex64,
    /// e^{2iθ}
    p2: Complex64,
}

impl Local {
    fn v1(&self, g: Complex64, gb: Complex64) -> Mat2 {
        let Local { v, lambda: l, e2, p2 } = *self;
        let big_a = v.a - l * v.b * gb;
        let bp = v.a + l * v.b_bar * g * e2;
        Mat2::new(
            (big_a - l * g * (v.a_bar * gb - v.b_bar) * e2) / big_a,
            -g * e2 / p2,
            l * gb * p2 / (big_a * bp),
            v.a / bp,
        )
    }

    fn v2(&self, g: Complex64, gb: Complex64) -> Mat2 {
        let Local { v, lambda: l, e2, p2 } = *self;
        let bp = v.a + l * v.b_bar * g * e2;
        let cp = v.a_bar + l * v.b * gb / e2;
        Mat2::new(
            1.0 - l * g * gb,
            -(v.a_bar * g * e2 + v.b) / (p2 * cp),
            l * (v.a * gb / e2 + v.b_bar) * p2 / bp,
            1.0 / (bp * cp),
        )
    }

    fn v3(&self, g: Complex64, gb: Complex64) -> Mat2 {
        let Local { v, lambda: l, e2, p2 } = *self;
        let dm = v.a_bar - l * v.b_bar * g;
        let cp = v.a_bar + l * v.b * gb / e2;
        Mat2::new(
            (dm - l * gb * (v.a * g - v.b) / e2) / dm,
            -g / (p2 * dm * cp),
            l * gb * p2 / e2,
            v.a_bar / cp,
        )
    }

    fn v4(&self, g: Complex64, gb: Complex64) -> Mat2 {
        let Local { v, lambda: l, p2, .. } = *self;
        let big_a = v.a - l * v.b * gb;
        let dm = v.a_bar - l * v.b_bar * g;
        Mat2::new(
            (1.0 - l * g * gb) / (big_a * dm),
            -(v.a * g - v.b) / (p2 * dm),
            l * (v.a_bar * gb - v.b_bar) * p2 / big_a,
            Complex64::new(1.0, 0.0),
        )
    }

    fn vd1(&self, gp: Complex64, gm: Complex64) -> Mat2 {
        let Local { v, lambda: l, e2, p2 } = *self;
        let ratio = (v.a + l * v.b_bar * gp * e2) / (v.a + l * v.b_bar * gm * e2);
        Mat2::new(ratio, (gm - gp) * e2 / p2, Complex64::new(0.0, 0.0), 1.0 / ratio)
    }

    fn vd2(&self, gbp: Complex64, gbm: Complex64) -> Mat2 {
        let Local { v, lambda: l, p2, .. } = *self;
        let one = Complex64::new(1.0, 0.0);
        let low = l * (gbm - gbp) * p2 / ((v.a - l * v.b * gbm) * (v.a - l * v.b * gbp));
        Mat2::new(one, Complex64::new(0.0, 0.0), low, one)
    }

    fn vd3(&self, gp: Complex64, gm: Complex64) -> Mat2 {
        let Local { v, lambda: l, p2, .. } = *self;
        let one = Complex64::new(1.0, 0.0);
        let up = (gm - gp) / (p2 * (v.a_bar - l * v.b_bar * gm) * (v.a_bar - l * v.b_bar * gp));
        Mat2::new(one, up, Complex64::new(0.0, 0.0), one)
    }

    fn vd4(&self, gbp: Complex64, gbm: Complex64) -> Mat2 {
        let Local { v, lambda: l, e2, p2 } = *self;
        let ratio = (v.a_bar + l * v.b * gbm / e2) / (v.a_bar + l * v.b * gbp / e2);
        Mat2::new(ratio, Complex64::new(0.0, 0.0), l * (gbm - gbp) * p2 / e2, 1.0 / ratio)
    }
}

/// All Riemann-Hilbert data of one datum: Γ̃, the contour and the jumps.
pub struct RhProblem {
    gamma: GammaTilde,
    contour: Contour,
}

impl RhProblem {
    pub fn new(sd: Arc<SpectralData>, cuts: CutSet) -> Result<Self> {
        let contour = assemble_contour(&cuts)?;
        Ok(RhProblem {
            gamma: GammaTilde::new(sd, cuts)?,
            contour,
        })
    }

    pub fn gamma(&self) -> &GammaTilde {
        &self.gamma
    }

    pub fn contour(&self) -> &Contour {
        &self.contour
    }

    pub fn spectral(&self) -> &Arc<SpectralData> {
        self.gamma.spectral()
    }

    fn local(&self, p: &EvalPoint) -> Result<Local> {
        let sd = self.spectral();
        let k = p.k;
        Ok(Local {
            v: sd.abab(k)?,
            lambda: sd.lambda(),
            e2: (2.0 * Complex64::i() * k * sd.period()).exp(),
            p2: (2.0 * Complex64::i() * p.theta()).exp(),
        })
    }

    /// (Γ̃, Γ̃̄) at k from direction `dir`.
    fn gammas(&self, k: Complex64, dir: Option<Complex64>) -> Result<(Complex64, Complex64)> {
        let wrap = |e: Error| match e {
            Error::PoleProximity { at } => Error::PoleOnContour { at },
            e => e,
        };
        Ok((
            self.gamma.value_from(k, dir).map_err(wrap)?,
            self.gamma.bar_from(k, dir).map_err(wrap)?,
        ))
    }

    /// The jump matrix of `piece` at p. p.k must lie on the piece.
    pub fn jump_matrix(&self, piece: &Piece, p: &EvalPoint) -> Result<JumpMatrix> {
        let k = p.k;
        let tol = crate::contour::PIECE_TOL * k.norm().max(1.0);
        if !piece.contains(k, tol) {
            return Err(Error::WrongPiece { label: piece.label.to_string(), k });
        }
        let loc = self.local(p)?;
        let plus = Some(piece.plus_normal());
        let minus = Some(-piece.plus_normal());
        let cut_sides = || -> Result<_> { Ok((self.gammas(k, plus)?, self.gammas(k, minus)?)) };
        use PieceLabel::*;
        let entries = match piece.label {
            V1 | V2 | V3 | V4 => {
                let (g, gb) = self.gammas(k, None)?;
                match piece.label {
                    V1 => loc.v1(g, gb),
                    V2 => loc.v2(g, gb),
                    V3 => loc.v3(g, gb),
                    _ => loc.v4(g, gb),
                }
            }
            VD1Cut | VD2Cut | VD3Cut | VD4Cut => {
                let ((gp, gbp), (gm, gbm)) = cut_sides()?;
                match piece.label {
                    VD1Cut => loc.vd1(gp, gm),
                    VD2Cut => loc.vd2(gbp, gbm),
                    VD3Cut => loc.vd3(gp, gm),
                    _ => loc.vd4(gbp, gbm),
                }
            }
            V1Cut | V2Cut | V3Cut | V4Cut => {
                let ((gp, _), (gm, gbm)) = cut_sides()?;
                match piece.label {
                    V1Cut => loc.vd1(gp, gm) * loc.v1(gm, gbm),
                    V2Cut => loc.vd1(gp, gm) * loc.v2(gm, gbm),
                    V3Cut => loc.vd3(gp, gm) * loc.v3(gm, gbm),
                    _ => loc.vd3(gp, gm) * loc.v4(gm, gbm),
                }
            }
        };
        Ok(JumpMatrix { label: piece.label, point: *p, entries })
    }

    /// Jump at p on whichever piece contains p.k.
    pub fn jump_at(&self, p: &EvalPoint) -> Result<JumpMatrix> {
        let piece = *self.contour.locate(p.k)?;
        self.jump_matrix(&piece, p)
    }

    /// Jump at p, requiring p.k to lie on a piece with the given label.
    pub fn jump_labeled(&self, label: PieceLabel, p: &EvalPoint) -> Result<JumpMatrix> {
        let piece = *self.contour.locate(p.k)?;
        if piece.label != label {
            return Err(Error::WrongPiece { label: label.to_string(), k: p.k });
        }
        self.jump_matrix(&piece, p)
    }

    /// The two residue conditions attached to `pole` and its conjugate.
    pub fn residue_coefficients(&self, pole: &PoleData, x: f64, t: f64) -> Result<[ResidueConditionData; 2]> {
        let sd = self.spectral();
        let l = sd.lambda();
        let res = pole.residue;
        let p = EvalPoint::new(x, t, pole.location);
        let pb = EvalPoint::new(x, t, pole.conjugate_partner);
        let at_p = self.local(&p)?;
        let at_pb = self.local(&pb)?;
        // b̄Γ̃ at the pole and bΓ̃̄ at its conjugate stay finite
        let bg = self.gamma.b_bar_gamma(p.k, None)?;
        let bgb = self.gamma.b_bar_gamma(pb.k.conj(), None)?.conj();
        let (first, second) = match pole.quadrant {
            Quadrant::D1 => {
                let v = at_p.v;
                let c1 = (v.a + l * bg * at_p.e2) * v.a_bar * at_p.e2 / at_p.p2 * res;
                let w = at_pb.v;
                let c2 = l * (w.a_bar + l * bgb / at_pb.e2) * w.a / at_pb.e2 * at_pb.p2 * res.conj();
                (c1, c2)
            }
            Quadrant::D3 => {
                let v = at_p.v;
                let c1 = v.a / at_p.p2 / (v.a_bar - l * bg) * res;
                let w = at_pb.v;
                let c2 = l * w.a_bar * at_pb.p2 / (w.a - l * bgb) * res.conj();
                (c1, c2)
            }
            q => {
                return Err(Error::InvalidInput(format!(
                    "residue conditions need a pole in D1 or D3, got {q:?}"
                )))
            }
        };
        Ok([
            ResidueConditionData { pole: *pole, at: p.k, coefficient: first, target_column: 2 },
            ResidueConditionData { pole: *pole, at: pb.k, coefficient: second, target_column: 1 },
        ])
    }

    /// Product of the four jumps around the origin, extrapolated to k = 0,
    /// minus the identity (max-abs entry norm). Pieces ending at the origin
    /// enter as is, pieces leaving it inverted, ordered ℝ₋, iℝ₋, ℝ₊, iℝ₊.
    pub fn verify_origin_consistency(&self, x: f64, t: f64) -> Result<f64> {
        let product = |eps: f64| -> Result<Mat2> {
            let mut m = Mat2::identity();
            for dir in [c(-1.0, 0.0), c(0.0, -1.0), c(1.0, 0.0), c(0.0, 1.0)] {
                let k = dir * eps;
                let piece = *self.contour.locate(k)?;
                let j = self.jump_matrix(&piece, &EvalPoint::new(x, t, k))?.entries;
                let leaving = (piece.direction - dir).norm() < 1e-12;
                m = m * if leaving { j.inverse() } else { j };
            }
            Ok(m)
        };
        let eps = [1e-3, 1e-4, 1e-5];
        let f: Vec<Mat2> = eps.iter().map(|&e| product(e)).collect::<Result<_>>()?;
        let rich = |a: Mat2, b: Mat2, r: f64| -> Mat2 { (b.scale(Complex64::new(r, 0.0)) - a).scale(Complex64::new(1.0 / (r - 1.0), 0.0)) };
        let r1 = rich(f[0], f[1], 10.0);
        let r2 = rich(f[1], f[2], 10.0);
        let limit = rich(r1, r2, 100.0);
        let spread = (r2 - r1).max_abs();
        if !limit.is_finite() || spread > 1e-2 {
            return Err(Error::LimitNonConvergent(format!("origin product spread {spread:.3e}")));
        }
        Ok((limit - Mat2::identity()).max_abs())
    }
}

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid initial datum: {0}")]
    InvalidDatum(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("ill-conditioned spectral parameter k = {k}: |Im k|*L = {product:.3} exceeds {bound}")]
    Conditioning { k: Complex64, product: f64, bound: f64 },

    #[error("integrator failed to reach tolerance at k = {k} with {steps} steps")]
    StepFailure { k: Complex64, steps: usize },

    #[error("function vanishes on the boundary of the search box after {retries} perturbations")]
    ZeroOnBoundary { retries: usize },

    #[error("winding numbers inconsistent: parent box {parent}, children sum {children}")]
    WindingInconsistent { parent: i64, children: i64 },

    #[error("winding number not close to an integer near {at} (got {value:.4})")]
    AmbiguousWinding { at: Complex64, value: f64 },

    #[error("odd-order zero at {at} could not be paired; enlarge the search box")]
    UnpairedZero { at: Complex64 },

    #[error("branch cut segments overlap near {at}")]
    OverlappingCuts { at: Complex64 },

    #[error("evaluation too close to a branch point at {at}")]
    BranchPointProximity { at: Complex64 },

    #[error("point {at} lies on a branch cut; a side must be specified")]
    OnCut { at: Complex64 },

    #[error("evaluation too close to a pole of the reflection ratio at {at}")]
    PoleProximity { at: Complex64 },

    #[error("pole at {at} is not simple (residues disagree: {r1} vs {r2})")]
    HigherOrderPole { at: Complex64, r1: Complex64, r2: Complex64 },

    #[error("point {k} does not lie on contour piece {label}")]
    WrongPiece { label: String, k: Complex64 },

    #[error("pole of the reflection ratio on the contour at {at}")]
    PoleOnContour { at: Complex64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("limit did not converge: {0}")]
    LimitNonConvergent(String),

    #[error("resolution violation: {0}")]
    Resolution(String),

    #[error("solution blow-up: max|q| = {max_abs:.3e} exceeds guard {guard:.3e}")]
    BlowUp { max_abs: f64, guard: f64 },

    #[error("route disagreement: {0}")]
    Disagreement(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Riemann-Hilbert data for the x-periodic nonlinear Schrodinger equation
//! `i q_t + q_xx - 2 lambda q |q|^2 = 0` computed from the initial datum alone.

pub mod branch;
pub mod constant;
pub mod contour;
pub mod cuts;
pub mod datum;
pub mod error;
pub mod gamma;
pub mod jump;
pub mod mat2;
pub mod nls;
pub mod quadrature;
pub mod roots;
pub mod spectral;

pub use datum::{InitialDatum, Lambda};
pub use error::{Error, Result};
pub use mat2::Mat2;
pub use num_complex::Complex64;
pub use spectral::{EvalPoint, SpectralData};

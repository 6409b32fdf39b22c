//! Numerical kernels: differentiation, grids, quadrature and the separable
//! Hankel/Fourier transforms used by the spectral pipeline.

pub mod diff;
pub mod grid;
pub mod quadrature;
pub mod scalar;
pub mod transform;

#[cfg(test)]
pub(crate) mod oracle;

use thiserror::Error;

pub use diff::{derivative, derivative_complex, ComplexMap, DifferentiationScheme, RealMap};
pub use grid::{AxisGrid, AxisRecipe, CylGrid};
pub use quadrature::{integrate_cylindrical, integrate_samples};
pub use scalar::{ComplexScalar, Dual, Scalar};
pub use transform::{
    bessel_j, fourier_axis, hankel_transform, hankel_transform_order1, CylSamples, SeparableTransform,
    TruncationPolicy,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("step {step:e} vanishes next to x = {x:e}")]
    StepUnderflow { x: f64, step: f64 },
    #[error("invalid step {0:e}: must be positive and finite")]
    InvalidStep(f64),
    #[error("{scheme} is not applicable: {reason}")]
    SchemeNotApplicable {
        scheme: &'static str,
        reason: &'static str,
    },
    #[error("samples do not decay at the grid edge: edge/peak = {ratio:.3e} exceeds {limit:.3e}")]
    Truncation { ratio: f64, limit: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

//! The pulse family: potential, fields, energy densities and Maxwell checks.

mod fields;
mod params;
mod potential;
mod residuals;

use thiserror::Error;

use crate::numerics::NumericsError;

pub use fields::{em_fields, energy_density, EnergyDensitySample, FieldSample};
pub use params::{Branch, EdeptParams, PhysicalConstants, SpacetimePoint};
pub use potential::{cylindrical_fields, denominator, vector_potential, CylFields, PsiJet};
pub use residuals::{maxwell_residuals, random_cloud, worst_residuals, MaxwellResiduals, ResidualTriple};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("out of range: {0} is not finite")]
    OutOfRange(&'static str),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Length scale used to size finite-difference steps: `max(g1, g2) + r + |τ|`.
pub fn local_length(params: &EdeptParams, point: &SpacetimePoint) -> f64 {
    params.max_g() + point.r() + point.tau(params.constants().c()).abs()
}

//! Momentum-space photon state built from the classical field: positive
//! frequency extraction, helicity decomposition, norm and energy.

pub mod basis;
pub mod export;
pub mod pipeline;
pub mod validate;

use thiserror::Error;

use crate::field::FieldError;
use crate::numerics::NumericsError;

pub use basis::{hdot, polarization_basis, PolarizationBasis};
pub use export::write_spectrum_csv;
pub use pipeline::{
    default_position_grid, evolve_reconstruct, helicity_amplitudes, norm_and_energy, positive_frequency_spectrum,
    sector_spectrum, spectral_energy, transversality_residuals, FieldKind, FieldSlice, HelicityAmplitudes, ModeGrid,
    ModeNode, Reconstructed, SectorProfiles, SpectralAmplitude, SpectralSetup,
};
pub use validate::{
    converged_norm, detection_rate_discrepancy, direct_transform_check, point_cloud, round_trip_error, spectral_relations,
    validate_spectrum, NormStudy, SpectrumReport, SpectrumTolerances,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("wavevector must be nonzero")]
    ZeroWavevector,
    #[error("transversality {residual:.3e} exceeds {tolerance:.1e} at k_rho = {k_rho:e}, k_z = {k_z:e}")]
    Transversality {
        k_rho: f64,
        k_z: f64,
        residual: f64,
        tolerance: f64,
    },
    #[error("norm not converged under mode doubling: {coarse:e} -> {fine:e} (relative change {rel:.3e})")]
    NotConverged { coarse: f64, fine: f64, rel: f64 },
    #[error("spectrum and mode grid disagree: expected {expected} nodes, got {got}")]
    Mismatch { expected: usize, got: usize },
    #[error("{0}")]
    Grid(String),
}

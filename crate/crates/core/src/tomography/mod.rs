//! ℓ₂ state tomography from a complete set of mutually unbiased stabilizer
//! bases.

mod mub;
mod pipeline;
mod projection;

pub use mub::{mub_family, MubBasis, MubFamily, MUB_MAX_QUBITS};
pub use pipeline::{
    estimate_coefficients, exact_coefficients, fofe_coefficients, reconstruct, tomography_pipeline,
    CoefficientTable, TomographyResult,
};
pub use projection::{psd_project, simplex_project, EIGEN_TOL};

//! Fidelity estimation for pure target states.
//!
//! The crate implements three estimators of `F = ⟨ψ|ρ|ψ⟩`:
//!
//! * α-DFE: importance sampling of Pauli points from the `ℓ_{2α}` distribution
//!   of the target's Pauli coefficients, with single-Pauli measurements.
//! * FOFE: the target is split as `|ψ⟩ = D(φ)|ψ̆⟩`; Pauli points are drawn from
//!   the phase-stripped state `ψ̆` and a one-ancilla Hadamard test with
//!   classical post-processing handles the diagonal phase.
//! * NLDFE: Pauli coefficients are grouped by local measurement frame and each
//!   group is post-processed through its Walsh–Hadamard spectrum.
//!
//! Around them sit Pauli-norm and stabilizer-entropy analytics
//! ([`magic`]), structure-exploiting samplers ([`samplers`]) and MUB state
//! tomography ([`tomography`]).
//!
//! Numeric kernels are generic over [`Real`] (`f32` or `f64`); the Monte Carlo
//! drivers work in `f64`, and the aliases below name the `f64` instances.

pub mod error;
pub mod estimation;
pub mod f2;
pub mod linalg;
pub mod magic;
pub mod pauli;
pub mod rng;
pub mod samplers;
pub mod scalar;
pub mod stats;
pub mod states;
pub mod tomography;
pub mod wht;

pub use error::{Error, Result};
pub use scalar::Real;

pub type StateVector64 = states::StateVector<f64>;
pub type StateVector32 = states::StateVector<f32>;
pub type DensityState64 = states::DensityState<f64>;
pub type CoeffVector64 = pauli::CoeffVector<f64>;
pub type CMatrix64 = linalg::CMatrix<f64>;
pub type RealMPS64 = states::RealMPS<f64>;

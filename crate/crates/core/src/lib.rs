//! Adiabatic state transfer through the dark state of a four-level tripod
//! system, and the loss of qubit coherence under dephasing noise.
//!
//! The library covers the closed-system Hamiltonian and its eigenframe,
//! drive paths and geometric phases, noise models with their accumulated
//! phase variance, coherence and fidelity, a filter-function path optimizer,
//! and brute-force oracles used to cross-check every closed form.

pub mod adiabatic;
pub mod error;
pub mod fidelity;
pub mod noise;
pub mod optimizer;
pub mod oracle;
pub mod path;
pub mod quadrature;
pub mod quantum;

pub use adiabatic::{
    closed_system_coherence, geometric_phase, geometric_phase_between, validity_check, ProtocolParams, ValidityEntry,
    ValidityReport,
};
pub use error::{Error, Result};
pub use fidelity::{
    asymptotic_exponent, coherence, fidelity, ncycle_comparison, no_transfer_exponent, no_transfer_fidelity,
    CoherenceTrace, FidelityReport, NcycleRow, Regime,
};
pub use noise::{
    boson_second_moment, cavity_second_moment_closed_form, lorentzian_variance_closed_form, phase_variance, BosonBath,
    BosonMode, CavityShot, Lorentzian, NoiseSpec, Symmetry,
};
pub use num_complex::Complex64;
pub use optimizer::{
    bloch_area, decay_time_ratio, derivative_conditions, design_phase_profile, filter_function, short_time_coefficient,
    solve_optimal_path, variance_via_filter, ProfileShape,
};
pub use path::{DrivePath, FourierCoefficients, PathShape, PhaseProfile};
pub use quantum::{ComplexMatrix4, EigenFrame, StateVector4};

/// Library version, echoed in run summaries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

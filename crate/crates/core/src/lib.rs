//! Exact diagonalization of disordered spin-1/2 Heisenberg chains, and the
//! effective qubit-qubit couplings such a chain mediates when used as a
//! "spin bus" between probe qubits.
//!
//! The crate is organized bottom-up:
//!
//! * [`basis`]: fixed-magnetization bitstring bases and elementary operator
//!   actions on them.
//! * [`model`]: system descriptions (bonds, fields, probe attachments) and
//!   sector Hamiltonians, dense or matrix-free.
//! * [`solve`]: per-sector eigensolvers with certified residuals, dense and
//!   Lanczos.
//! * [`couplings`]: local moments, first- and second-order effective
//!   couplings, gap decompositions, and validation of the effective models
//!   against exact spectra.
//! * [`disorder`]: seeded disorder ensembles, observable evaluation and
//!   statistics, reproducible bit for bit at any thread count.
//! * [`scaling`]: finite-size sweeps and the fits they feed.
//! * [`fmt`]: the fixed-precision number formatting every artifact uses.
//!
//! Units: energies are measured in the reference exchange coupling, fields
//! are the dimensionless ratio of Zeeman energy to that coupling, and
//! Planck's constant is 1 throughout.

/// Crate version, baked in for run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod basis;
pub mod couplings;
pub mod disorder;
pub mod error;
pub mod fmt;
pub mod model;
pub mod scaling;
pub mod solve;

pub use basis::{all_sectors, binomial, spin_z, Axis, OperatorTerm, SectorBasis, MAX_SITES};
pub use couplings::{
    detect_flip, fidelity, gap_decomposition, j1_components, j2_approx_even, j2_approx_odd,
    j2_exact, local_moments, sigma_x_element, sigma_zz_correlation, validate_effective,
    validation_scaling, EffectiveValidation, FlipState, GapDecomposition, J1Components,
    J2Component, J2Exact, ValidationScaling,
};
pub use disorder::{
    flipped_fraction, halfnormal_gap_check, run_ensemble, sample_spec, sensitivity_sweep,
    DisorderConfig, EnsembleResult, HalfNormalCheck, Observable, SensitivitySweep,
    SweepParameter, MAX_REDRAWS,
};
pub use error::{Error, Result};
pub use fmt::{sig15, F64};
pub use model::{
    apply_hamiltonian, attach_qubits, build_sector_matrix, make_chain, make_ring,
    make_uniform, make_uniform_chain, make_uniform_ring, make_with_boundary, AttachedSystem,
    Boundary, SectorHamiltonian, SpinSystemSpec, DENSE_DIM_CAP, PERTURBATION_WARN_THRESHOLD,
};
pub use scaling::{
    combined_sweep, end_moment_sweep, energy_per_bond_sweep, fit_gap_scaling,
    fit_moment_scaling, gap_sweep, scaling_to_csv, GapFit, MomentFit, ScalingRow,
    SWEEP_MAX_SITES,
};
pub use solve::{
    full_spectrum, lowest_k, Completeness, Level, SolverOptions, Spectrum,
};

//! Spectra of the one-step unitary.
//!
//! Every coin is a real rotation, so `U` is real orthogonal and its
//! eigenvalues `e^{iω}` are the eigenvalues of `U` whose real parts `cos ω` are
//! the eigenvalues of the symmetric block-tridiagonal matrix `(U + Uᵀ)/2`.
//! [`PhaseCounter`] counts them by Sylvester inertia in `O(N)` per energy,
//! which is what the disorder-ensemble DOS uses. The dense route through
//! [`build_step_matrix`] and [`eigenphases`] produces full spectra for
//! edge-state detection and symmetry checks, and serves as the reference for
//! the counter.

mod count;
mod dos;
mod matrix;
mod symmetry;

pub use count::PhaseCounter;
pub use dos::{
    clean_dos, default_edge_tolerance, dos_ensemble, dos_sample, DosBins, DosConfig, DosHistogram,
    DosSampleCounts,
};
pub use matrix::{
    build_step_matrix, build_step_matrix_with_cap, eigenphases, spectrum_of_field, Spectrum,
    SpectrumSource, DEFAULT_DENSE_CAP,
};
pub use symmetry::{
    check_quadruplet_symmetry, circular_multiset_distance, detect_edge_states, EdgeStateCounts,
    SymmetryReport,
};

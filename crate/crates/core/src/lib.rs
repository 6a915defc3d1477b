//! Two-state discrete-time quantum walks on a ring with chiral coins.
//!
//! The one-step unitary is `U = S · (Σₙ |n⟩⟨n| ⊗ C(θₙ))` with the real rotation
//! coin `C(θ) = [[cos θ, −sin θ], [sin θ, cos θ]]` and a shift that moves the
//! right-mover one site up and the left-mover one site down. Disorder enters
//! only through the coin angles, so chiral symmetry and the bipartite
//! structure of `U` survive every realization.
//!
//! The crate is `no_std` (it needs `alloc`). Parallel ensembles, file formats
//! and the command line live in the `qwalk` crate.
//!
//! Module map:
//!
//! * [`coin`], [`lattice`], [`field`], [`walk`]: operators, states, disorder
//!   realizations and the time step.
//! * [`dynamics`]: observables, trajectories and ensemble averages.
//! * [`spectral`]: dense unitary, eigenphases, eigenphase counting, density of
//!   states and edge-state detection.
//! * [`transfer`]: transfer matrices and Lyapunov exponents.
//! * [`scaling`]: critical forms of the DOS and localization length and their
//!   fits.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod coin;
pub mod dynamics;
mod error;
pub mod field;
pub mod lattice;
mod math;
pub mod rng;
pub mod scaling;
pub mod spectral;
pub mod stats;
pub mod transfer;
pub mod walk;

pub use num_complex::Complex64;

pub use coin::{make_coin, make_reflecting_coin, CoinMatrix, Rotation, WallSign};
pub use error::{Error, Result};
pub use field::{CoinField, DisorderMode, Wall};
pub use lattice::{initial_state, Chirality, WalkerState};
pub use walk::{dispersion, step, Boundary};

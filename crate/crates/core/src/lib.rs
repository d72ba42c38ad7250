//! Stark-chirped rapid adiabatic passage (SCRAP) in an atom-cavity system.
//!
//! The crate models a two-level atom crossing a cavity mode and a
//! far-detuned Stark beam. In the single-excitation block {|+,0>, |-,1>}
//! the dynamics reduces to a 2x2 time-dependent Hamiltonian which is
//! integrated numerically ([`propagator`]). Single-pass propagators are then
//! composed over joint atom/cavity spaces ([`protocols`]) to generate Fock
//! states, atom-photon and atom-atom entanglement, and to move qubit states
//! between atoms and between cavities. [`analysis`] holds the diagnostics.

// Range checks are written so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod hamiltonian;
pub mod propagator;
pub mod protocols;
pub mod pulse;
pub mod state;

pub use error::{Error, Result};
pub use hamiltonian::{eigensystem, sample_hamiltonian, validate_rwa, EigenSample, HamiltonianSample, Mat2, RwaWarning, SystemParams};
pub use propagator::{
    evolve, propagate, propagate_unitary, propagate_unitary_path, track_adiabatic, IntegratorOptions,
    IntegratorWarning, TrackedEigenbasis, Trajectory, UnitaryPath,
};
pub use protocols::{PassMode, PassSpec};
pub use pulse::{cavity_rabi, stark_shift, PulsePath, PulseSchedule};
pub use state::{JointState, Subsystem};

pub use num_complex::Complex64;

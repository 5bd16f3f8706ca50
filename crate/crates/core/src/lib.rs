//! Pulse-level emulator of a neutral-atom quantum processor.
//!
//! The crate models the full desk-scale pipeline of a tweezer-array machine:
//!
//! - [`register`] — atom-array geometries and the unit-disk graphs they induce
//! - [`assembly`] — stochastic tweezer loading and optimal rearrangement into
//!   a defect-free sub-register
//! - [`statevec`] — dense state vectors over mixed 2/3-level atoms, operator
//!   application, expectation values and imperfect readout sampling
//! - [`hamiltonian`] — time-dependent Ising and XY Hamiltonians driven by
//!   piecewise waveforms, with a norm-preserving Schrödinger integrator
//! - [`gates`] — digital gates synthesized from pulse parameters and Rydberg
//!   blockade, circuit execution and fidelity scoring
//! - [`routing`] — SWAP-insertion routing of random circuits onto constrained
//!   connectivity graphs and gate-count overhead benchmarking
//! - [`variational`] — hybrid quantum-classical loop solving Maximum
//!   Independent Set on unit-disk graphs, with a brute-force oracle
//! - [`fermion`] — Jordan-Wigner mapping of fermionic operators to Pauli
//!   strings with matrix-level anticommutation checks
//!
//! Units are fixed crate-wide: lengths in µm, angular frequencies in rad/µs,
//! times in µs, ħ = 1 (energies in rad/µs).

pub mod assembly;
pub mod error;
pub mod fermion;
pub mod gates;
pub mod hamiltonian;
pub mod linalg;
pub mod nelder_mead;
pub mod pauli;
pub mod register;
pub mod routing;
pub mod seeds;
pub mod statevec;
pub mod variational;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec, C64};
pub use register::{Register, UnitDiskGraph};
pub use statevec::{QuantumState, ReadoutModel};


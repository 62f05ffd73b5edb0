//! Simulation of a dual-Kretschmann plasmonic beamsplitter used as a
//! refractive-index sensor, comparing two-photon (Hong-Ou-Mandel) probing
//! against a coherent-state benchmark through Fisher information.
//!
//! The layers of the crate follow the data flow:
//!
//! * [`materials`] loads and interpolates optical constants.
//! * [`tmm`] computes the complex transmission/reflection of the layer stack.
//! * [`quantum_stats`] maps `(T, R, φ_tr)` to photon-count distributions.
//! * [`estimation`] turns distributions into Fisher information, enhancement
//!   ratios and an uncertainty budget.
//! * [`continuum`] repeats the moment calculation for finite-bandwidth
//!   wavepackets.
//! * [`cli`] drives sweeps and writes CSV/JSON outputs.

pub mod cli;
pub mod continuum;
pub mod estimation;
pub mod materials;
pub mod quantum_stats;
pub mod tmm;

pub use num_complex::Complex64;

//! Giant atoms coupled to a one-dimensional waveguide.
//!
//! The crate builds the geometry-dependent Lindblad master equation for a few
//! two-level emitters that touch the waveguide at several connection points,
//! and computes what can be measured on it: dressed single-excitation states
//! and their transition rates, steady states and time evolution, two-qubit
//! concurrence, and the statistics of the emitted light (g², Mandel Q).
//!
//! An independent route to the same master equation is provided by composing
//! SLH triplets of the individual connection points ([`slh`]).
//!
//! All rates and energies are in units of the per-point decay rate γ₀ (ħ = 1);
//! positions are stored as phase coordinates κx in radians.
//!
//! ```
//! use wqed_core::{layout::{make_layout, LayoutKind}, liouvillian::{build_model, DriveSpec}};
//! use wqed_core::{evolve::steady_state, observables::concurrence};
//!
//! let layout = make_layout(LayoutKind::Nested, 0.01 * std::f64::consts::PI, 1.0).unwrap();
//! let model = build_model(&layout.couplings(), &DriveSpec::resonant(1.5)).unwrap();
//! let ss = steady_state(&model).unwrap();
//! assert!(concurrence(&ss.rho).unwrap() > 0.99);
//! ```

pub mod error;
pub mod evolve;
pub mod layout;
pub mod linalg;
pub mod liouvillian;
pub mod observables;
pub mod runner;
pub mod slh;
pub mod spectral;

pub use error::{Error, ErrorKind, Result};
pub use evolve::{decompose, propagate, steady_state, SteadyState, Trajectory};
pub use layout::{coupling_set, make_layout, AtomLayout, AtomSpec, CouplingSet, LayoutKind};
pub use linalg::{CMatrix, CVector, C64};
pub use liouvillian::{build_model, DensityMatrix, DriveConvention, DriveSpec, LindbladModel};
pub use observables::{concurrence, field_amplitudes, g2_tau, g2_zero, intensity, mandel_q, Direction, FieldAmplitudes};
pub use runner::{load_config, run_scenario, sweep, write_tables, ScenarioConfig, SweepResult, Table};
pub use slh::{build_network, to_lindblad, SlhTriplet};
pub use spectral::{dressed_states, drive_couplings, transition_rates, DressedPair, RateQuartet};

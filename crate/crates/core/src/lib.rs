//! Geometric (holonomic) coherent control of chiral molecules.
//!
//! The crate synthesizes holonomic pulse schedules (NHQC, NHQC+) and a
//! shortcut-to-adiabaticity comparator, propagates the chirality-dependent
//! three-level Hamiltonian and its four-level trapped-ion qudit embedding,
//! and runs the discrimination, robustness and tomography experiments.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below are the concrete types used by the CLI and the tests.
//!
//! Basis ordering is fixed once, in [`chiralmodel`]: three-level operators
//! use `(|1>, |2>, |0>)`, the qudit uses `(|1_L>, |1_R>, |2>, |0>)`.

pub mod chiralmodel;
pub mod error;
pub mod experiments;
pub mod holonomy;
pub mod noise;
pub mod pulsegen;
pub mod scalar;
pub mod statecore;

pub use chiralmodel::{Chirality, DriveParams};
pub use error::{Error, Result};
pub use pulsegen::{LoopPath, PulseSchedule, Scheme};
pub use scalar::Real;
pub use statecore::{Operator, StateVector, TimeGrid};

pub type StateVector64 = StateVector<f64>;
pub type Operator64 = Operator<f64>;
pub type TimeGrid64 = TimeGrid<f64>;
pub type PulseSchedule64 = PulseSchedule<f64>;
pub type LoopPath64 = LoopPath<f64>;
pub type NoiseSpec64 = noise::NoiseSpec<f64>;
pub type ExperimentParams64 = experiments::ExperimentParams<f64>;
pub type DiscriminationResult64 = experiments::DiscriminationResult<f64>;
pub type SweepResult64 = experiments::SweepResult<f64>;

pub type StateVector32 = StateVector<f32>;
pub type Operator32 = Operator<f32>;
pub type PulseSchedule32 = PulseSchedule<f32>;

/// Version string recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default number of integrator steps per cyclic evolution.
pub const DEFAULT_STEPS: usize = 2000;

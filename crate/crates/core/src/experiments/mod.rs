//! Discrimination protocol, contrast, robustness sweeps, traces, gate
//! fidelity and process tomography.

mod discrimination;
mod output;
mod sweeps;
mod tomography;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulsegen::{default_nhqcplus_path, nhqc_schedule, nhqcplus_schedule, sta_schedule, PulseSchedule, Scheme};
use crate::scalar::Real;
use crate::statecore::TimeGrid;

pub use discrimination::{
    contrast, detection_pulse, discriminate_schedule, discriminate_schedule_qudit, noisy_population_trace, phase_scan,
    population_trace, prepare_initial, run_discrimination, DiscriminationResult, TracePoint,
};
pub use output::{
    amplitude_trace_csv, trace_csv, RunManifest, AMPLITUDE_CSV_HEADER, SWEEP_CSV_HEADER, TRACE_CSV_HEADER,
};
pub use sweeps::{
    default_alpha_grid, default_delta_grid, offset_sweep, random_noise_sweep, PointSummary, SweepKind, SweepPoint,
    SweepResult, SweepRow, DEFAULT_OFFSET_NOISE, DEFAULT_TRIALS,
};
pub use tomography::{gate_fidelity, process_chi, qpt, shot_sampling, QptResult};

/// Level read out by the contrast metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum DetectLevel {
    #[serde(rename = "1")]
    One,
    #[default]
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "0")]
    Zero,
}

impl DetectLevel {
    /// Three-level basis index.
    pub fn index(self) -> usize {
        match self {
            DetectLevel::One => crate::chiralmodel::LEVEL_1,
            DetectLevel::Two => crate::chiralmodel::LEVEL_2,
            DetectLevel::Zero => crate::chiralmodel::LEVEL_0,
        }
    }
}

/// Physical parameters shared by every experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentParams<T: Real> {
    pub scheme: Scheme,
    pub theta: T,
    /// Relative phase of the two drives.
    pub phi: T,
    pub gamma: T,
    /// Relative phase of the initial superposition.
    pub phi0: T,
    pub duration: T,
    pub steps: usize,
}

impl<T: Real> ExperimentParams<T> {
    /// `theta = 3pi/4`, `gamma = pi`, `phi = phi0 = pi/2`, `T = 4pi`
    /// (unit peak Rabi frequency for NHQC), 2000 steps.
    pub fn new(scheme: Scheme) -> Self {
        Self {
            scheme,
            theta: T::lit(0.75 * PI),
            phi: T::lit(0.5 * PI),
            gamma: T::lit(PI),
            phi0: T::lit(0.5 * PI),
            duration: T::lit(4.0 * PI),
            steps: crate::DEFAULT_STEPS,
        }
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }

    pub fn grid(&self) -> Result<TimeGrid<T>> {
        TimeGrid::new(self.duration, self.steps)
    }

    /// Noise-free schedule of `self.scheme`.
    pub fn schedule(&self) -> Result<PulseSchedule<T>> {
        for (name, v) in [
            ("theta", self.theta),
            ("phi", self.phi),
            ("gamma", self.gamma),
            ("phi0", self.phi0),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite")));
            }
        }
        let grid = self.grid()?;
        match self.scheme {
            Scheme::Nhqc => nhqc_schedule(self.theta, self.phi, self.gamma, grid),
            Scheme::NhqcPlus => {
                let path = default_nhqcplus_path(self.gamma, self.duration)?;
                nhqcplus_schedule(self.theta, self.phi, self.gamma, &path, grid)
            }
            Scheme::Sta => sta_schedule(self.theta, self.phi, self.gamma, grid),
        }
    }
}

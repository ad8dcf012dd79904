//! Pulse schedules for the NHQC, NHQC+ and STA schemes, plus checkers
//! for the geometric-evolution conditions.
//!
//! A [`PulseSchedule`] stores the control waveforms `Omega(t)`, `Phi(t)`,
//! `Delta(t)` sampled on a [`TimeGrid`]. Schedules produced by the
//! generators also keep the closed-form waveforms, and the propagator
//! evaluates those between samples; per-sample envelope noise multiplies
//! the closed form through linearly interpolated factors. Schedules built
//! from bare samples (e.g. read back from CSV) interpolate the complex
//! coupling `Omega e^{i Phi}` and the detuning linearly.

mod checks;
mod export;
mod path;
mod synthesis;

use std::fmt;
use std::sync::Arc;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::chiralmodel::{coupled_hamiltonian, dark_bright_basis, Chirality, LEVEL_0};
use crate::error::{Error, Result};
use crate::scalar::{cis, cplx, Real};
#[cfg(test)]
use crate::statecore::CMatrix;
use crate::statecore::{gauss_nodes, propagate, CVector, Operator, Propagation, StateVector, TimeGrid};

pub(crate) use checks::moving_vector;
pub use checks::{check_parallel_transport, check_zero_dynamical_phase, nhqc_frame_path};
pub use export::{format_real, ScheduleSidecar, SCHEDULE_CSV_HEADER};
pub use path::LoopPath;
pub use synthesis::{
    default_nhqcplus_path, inverse_engineer, nhqc_schedule, nhqcplus_schedule, sta_schedule, NHQCPLUS_DEFAULT_ARC,
    NHQCPLUS_DEFAULT_RIPPLE, STA_DEFAULT_ARC,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "NHQC")]
    Nhqc,
    #[serde(rename = "NHQC+")]
    NhqcPlus,
    #[serde(rename = "STA")]
    Sta,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Nhqc, Scheme::NhqcPlus, Scheme::Sta];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Nhqc => "NHQC",
            Scheme::NhqcPlus => "NHQC+",
            Scheme::Sta => "STA",
        }
    }

    /// Lower-case token used in file names.
    pub fn slug(self) -> &'static str {
        match self {
            Scheme::Nhqc => "nhqc",
            Scheme::NhqcPlus => "nhqcplus",
            Scheme::Sta => "sta",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NHQC" => Ok(Scheme::Nhqc),
            "NHQC+" | "NHQCPLUS" | "NHQC_PLUS" => Ok(Scheme::NhqcPlus),
            "STA" => Ok(Scheme::Sta),
            other => Err(Error::Parse(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Closed-form controls `t -> (Omega, Phi, Delta)`.
pub type ControlFn<T> = Arc<dyn Fn(T) -> (T, T, T) + Send + Sync>;

/// Sampled control waveforms of one cyclic evolution.
#[derive(Clone)]
pub struct PulseSchedule<T: Real> {
    scheme: Scheme,
    grid: TimeGrid<T>,
    theta: T,
    phi: T,
    gamma: T,
    omega: Vec<T>,
    phase: Vec<T>,
    detuning: Vec<T>,
    segment_boundaries: Vec<T>,
    analytic: Option<ControlFn<T>>,
    envelope: Option<Vec<T>>,
}

impl<T: Real> fmt::Debug for PulseSchedule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PulseSchedule")
            .field("scheme", &self.scheme)
            .field("grid", &self.grid)
            .field("theta", &self.theta)
            .field("phi", &self.phi)
            .field("gamma", &self.gamma)
            .field("analytic", &self.analytic.is_some())
            .field("noisy", &self.envelope.is_some())
            .finish_non_exhaustive()
    }
}

/// Equality of the sampled data; the closed-form source is not compared.
impl<T: Real> PartialEq for PulseSchedule<T> {
    fn eq(&self, other: &Self) -> bool {
        self.scheme == other.scheme
            && self.grid == other.grid
            && self.theta == other.theta
            && self.phi == other.phi
            && self.gamma == other.gamma
            && self.omega == other.omega
            && self.phase == other.phase
            && self.detuning == other.detuning
            && self.segment_boundaries == other.segment_boundaries
    }
}

impl<T: Real> PulseSchedule<T> {
    /// Assembles a schedule and checks the per-scheme invariants.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        scheme: Scheme,
        grid: TimeGrid<T>,
        theta: T,
        phi: T,
        gamma: T,
        omega: Vec<T>,
        phase: Vec<T>,
        detuning: Vec<T>,
        segment_boundaries: Vec<T>,
    ) -> Result<Self> {
        for (name, v) in [("omega", &omega), ("phi", &phase), ("delta", &detuning)] {
            Error::check_dim(grid.len(), v.len()).map_err(|_| {
                Error::InvalidArgument(format!("{name} has {} samples, grid expects {}", v.len(), grid.len()))
            })?;
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} contains non-finite samples")));
            }
        }
        if omega.iter().any(|&w| w < T::zero()) {
            return Err(Error::InvalidArgument("Rabi envelope must be non-negative".into()));
        }
        let resonant = detuning.iter().all(|&d| d == T::zero());
        match scheme {
            Scheme::Nhqc | Scheme::Sta if !resonant => {
                return Err(Error::ContractViolation(format!(
                    "{scheme} schedules must be resonant (Delta = 0)"
                )))
            }
            Scheme::NhqcPlus if resonant => {
                return Err(Error::ContractViolation(
                    "NHQC+ schedules must carry a nonzero detuning".into(),
                ))
            }
            _ => {}
        }
        Ok(Self {
            scheme,
            grid,
            theta,
            phi,
            gamma,
            omega,
            phase,
            detuning,
            segment_boundaries,
            analytic: None,
            envelope: None,
        })
    }

    /// Samples closed-form controls on `grid` and keeps them for propagation.
    #[allow(clippy::too_many_arguments)]
    pub fn from_analytic(
        scheme: Scheme,
        grid: TimeGrid<T>,
        theta: T,
        phi: T,
        gamma: T,
        controls: ControlFn<T>,
        segment_boundaries: Vec<T>,
    ) -> Result<Self> {
        let n = grid.len();
        let (mut omega, mut phase, mut detuning) =
            (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for t in grid.times() {
            let (w, p, d) = controls(t);
            omega.push(w);
            phase.push(p);
            detuning.push(d);
        }
        let mut s = Self::new(
            scheme,
            grid,
            theta,
            phi,
            gamma,
            omega,
            phase,
            detuning,
            segment_boundaries,
        )?;
        s.analytic = Some(controls);
        Ok(s)
    }

    /// Whether the propagator sees closed-form controls.
    pub fn is_analytic(&self) -> bool {
        self.analytic.is_some()
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn duration(&self) -> T {
        self.grid.duration()
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn omega(&self) -> &[T] {
        &self.omega
    }

    pub fn phase(&self) -> &[T] {
        &self.phase
    }

    pub fn detuning(&self) -> &[T] {
        &self.detuning
    }

    pub fn segment_boundaries(&self) -> &[T] {
        &self.segment_boundaries
    }

    /// Copy whose envelope is multiplied by non-negative per-sample
    /// factors; between samples the factors are interpolated linearly.
    pub fn scale_envelope(&self, factors: &[T]) -> Result<Self> {
        Error::check_dim(self.grid.len(), factors.len())?;
        if factors.iter().any(|f| !f.is_finite() || *f < T::zero()) {
            return Err(Error::InvalidArgument(
                "envelope factors must be finite and non-negative".into(),
            ));
        }
        let mut out = self.clone();
        for (w, f) in out.omega.iter_mut().zip(factors) {
            *w *= *f;
        }
        out.envelope = Some(match &self.envelope {
            Some(old) => old.iter().zip(factors).map(|(a, b)| *a * *b).collect(),
            None => factors.to_vec(),
        });
        Ok(out)
    }

    /// Per-sample envelope factors applied so far, if any.
    pub fn envelope_factors(&self) -> Option<&[T]> {
        self.envelope.as_deref()
    }

    /// Copy with a replaced envelope; the closed-form source is dropped.
    pub fn with_omega(&self, omega: Vec<T>) -> Result<Self> {
        Self::new(
            self.scheme,
            self.grid,
            self.theta,
            self.phi,
            self.gamma,
            omega,
            self.phase.clone(),
            self.detuning.clone(),
            self.segment_boundaries.clone(),
        )
    }

    /// Same waveforms driving a different relative phase `phi`.
    pub fn with_phi(&self, phi: T) -> Self {
        Self { phi, ..self.clone() }
    }

    /// `Omega_j e^{i Phi_j}` at grid point `j`.
    pub fn coupling(&self, j: usize) -> Complex<T> {
        cis(self.phase[j]) * cplx(self.omega[j])
    }

    /// Coupling `Omega e^{i Phi}` and detuning at time `t`.
    pub fn controls_at(&self, t: T) -> (Complex<T>, T) {
        let n = self.grid.steps();
        let pos = (t / self.grid.dt()).max(T::zero());
        let j = pos.floor().to_usize().unwrap_or(0).min(n - 1);
        let frac = (pos - T::lit(j as f64)).min(T::one());
        if let Some(f) = &self.analytic {
            let (w, p, d) = f(t);
            let factor = match &self.envelope {
                Some(e) => e[j] * (T::one() - frac) + e[j + 1] * frac,
                None => T::one(),
            };
            return (cis(p) * cplx(w * factor), d);
        }
        let w0 = cplx(T::one() - frac);
        let w1 = cplx(frac);
        let coupling = self.coupling(j) * w0 + self.coupling(j + 1) * w1;
        let detuning = self.detuning[j] * (T::one() - frac) + self.detuning[j + 1] * frac;
        (coupling, detuning)
    }

    /// Three-level Hamiltonian of enantiomer `c` at time `t`.
    pub fn hamiltonian(&self, c: Chirality, t: T) -> Operator<T> {
        let (coupling, detuning) = self.controls_at(t);
        coupled_hamiltonian(c, self.theta, self.phi, coupling, detuning)
    }

    /// Hamiltonian at grid point `j`, without interpolation.
    pub fn sample_hamiltonian(&self, c: Chirality, j: usize) -> Operator<T> {
        coupled_hamiltonian(c, self.theta, self.phi, self.coupling(j), self.detuning[j])
    }

    /// Propagates `psi0` (three-level) under this schedule.
    ///
    /// The drive only couples `|B_c>` to `|0>`, and in that pair the
    /// generator `[[0, Omega e^{i Phi}/2], [c.c., Delta]]` is the same for
    /// both enantiomers, so the evolution is integrated as a two-level
    /// problem with closed-form exponentials (same fourth-order step as
    /// [`propagate`]) and mapped back; the dark state is carried unchanged.
    pub fn evolve(&self, c: Chirality, psi0: &StateVector<T>) -> Result<Propagation<T>> {
        Error::check_dim(3, psi0.dim())?;
        let (dark, bright) = dark_bright_basis(c, self.theta, self.phi);
        let (d, b) = (dark.amplitudes(), bright.amplitudes());
        let a_dark = d.dotc(psi0.amplitudes());
        let mut pair = [b.dotc(psi0.amplitudes()), psi0.amplitude(LEVEL_0)];
        let mut u2 = [[cplx(T::one()), cplx(T::zero())], [cplx(T::zero()), cplx(T::one())]];
        let grid = &self.grid;
        let dt = grid.dt();
        let nodes = gauss_nodes::<T>();
        let s3 = T::lit(3.0f64.sqrt());
        let a1 = (T::lit(3.0) - T::lit(2.0) * s3) / T::lit(12.0);
        let a2 = (T::lit(3.0) + T::lit(2.0) * s3) / T::lit(12.0);
        let half = T::lit(0.5);
        let assemble = |pair: &[Complex<T>; 2]| {
            let mut v = d * a_dark + b * pair[0];
            v[LEVEL_0] += pair[1];
            v
        };
        let mut states = Vec::with_capacity(grid.len());
        states.push(psi0.clone());
        for j in 0..grid.steps() {
            let t = grid.time(j);
            let (g1, d1) = self.controls_at(t + nodes[0] * dt);
            let (g2, d2) = self.controls_at(t + nodes[1] * dt);
            let (g1, g2) = (g1 * cplx(half), g2 * cplx(half));
            let early = pair_exponential(g1 * cplx(a2) + g2 * cplx(a1), d1 * a2 + d2 * a1, dt);
            let late = pair_exponential(g1 * cplx(a1) + g2 * cplx(a2), d1 * a1 + d2 * a2, dt);
            let step = mul2(&late, &early);
            pair = [
                step[0][0] * pair[0] + step[0][1] * pair[1],
                step[1][0] * pair[0] + step[1][1] * pair[1],
            ];
            u2 = mul2(&step, &u2);
            let v = assemble(&pair);
            let drift = (v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()) - T::one()).abs();
            if drift > T::tol(1e-10) {
                return Err(Error::NumericalFailure(format!(
                    "norm drift {:e} at step {j}",
                    drift.as_f64()
                )));
            }
            states.push(StateVector::new(v)?);
        }
        let basis = [b.clone(), {
            let mut e = CVector::zeros(3);
            e[LEVEL_0] = cplx(T::one());
            e
        }];
        let mut u = d * d.adjoint();
        for (r, vr) in basis.iter().enumerate() {
            for (k, vk) in basis.iter().enumerate() {
                u += vr * vk.adjoint() * u2[r][k];
            }
        }
        let propagator = Operator::unitary(u)
            .map_err(|_| Error::NumericalFailure("accumulated propagator lost unitarity".into()))?;
        Ok(Propagation { states, propagator })
    }

    /// Reference propagation of the full three-level Hamiltonian.
    pub fn evolve_full(&self, c: Chirality, psi0: &StateVector<T>) -> Result<Propagation<T>> {
        propagate(|t| Ok(self.hamiltonian(c, t)), &self.grid, psi0)
    }

    /// Full three-level propagator `U(T, 0)`.
    pub fn propagator(&self, c: Chirality) -> Result<Operator<T>> {
        let psi0 = StateVector::basis(3, 0)?;
        Ok(self.evolve(c, &psi0)?.propagator)
    }

    /// `int_0^T Omega dt` over `[t_a, t_b]` by the trapezoid rule on samples.
    pub fn pulse_area(&self, t_a: T, t_b: T) -> T {
        let dt = self.grid.dt();
        let half = T::lit(0.5);
        (0..self.grid.steps())
            .filter(|&j| {
                let mid = self.grid.midpoint(j);
                mid > t_a && mid < t_b
            })
            .fold(T::zero(), |acc, j| {
                acc + (self.omega[j] + self.omega[j + 1]) * half * dt
            })
    }
}

type Mat2<T> = [[Complex<T>; 2]; 2];

fn mul2<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = [[cplx(T::zero()); 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (k, z) in row.iter_mut().enumerate() {
            *z = a[r][0] * b[0][k] + a[r][1] * b[1][k];
        }
    }
    out
}

/// `exp(-i dt [[0, g], [g*, delta]])`.
fn pair_exponential<T: Real>(g: Complex<T>, delta: T, dt: T) -> Mat2<T> {
    let half_delta = delta * T::lit(0.5);
    let n = (g.norm_sqr() + half_delta * half_delta).sqrt();
    let (sn, cs) = ((n * dt).sin(), (n * dt).cos());
    let sinc = if n > T::zero() { sn / n } else { dt };
    let i = Complex::new(T::zero(), T::one());
    let global = cis(-half_delta * dt);
    [
        [
            global * (cplx(cs) + i * cplx(sinc * half_delta)),
            global * (-i * g * cplx(sinc)),
        ],
        [
            global * (-i * g.conj() * cplx(sinc)),
            global * (cplx(cs) - i * cplx(sinc * half_delta)),
        ],
    ]
}

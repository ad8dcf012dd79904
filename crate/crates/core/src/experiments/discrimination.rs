use nalgebra::Complex;

use super::{DetectLevel, ExperimentParams};
use crate::chiralmodel::{
    qudit_embed, qudit_embed_state, qudit_index_map, qudit_restrict_state, Chirality, LEVEL_0, LEVEL_1, LEVEL_2,
    QUDIT_0,
};
use crate::error::{Error, Result};
use crate::noise::{apply_noise, NoiseDescriptor, NoiseSpec};
use crate::pulsegen::{PulseSchedule, Scheme};
use crate::scalar::{cis, cplx, Real};
use crate::statecore::{propagate, CMatrix, Operator, StateVector, TimeGrid};

/// Final populations of one enantiomer run.
#[derive(Debug, Clone)]
pub struct DiscriminationResult<T: Real> {
    pub chirality: Chirality,
    pub scheme: Scheme,
    /// `(P_1, P_2, P_0)` in three-level basis order.
    pub populations: [T; 3],
    pub final_state: StateVector<T>,
    pub noise: NoiseDescriptor,
    /// Envelope samples clipped to zero by the stochastic channel.
    pub clipped: usize,
}

impl<T: Real> DiscriminationResult<T> {
    pub fn p1(&self) -> T {
        self.populations[LEVEL_1]
    }

    pub fn p2(&self) -> T {
        self.populations[LEVEL_2]
    }

    pub fn p0(&self) -> T {
        self.populations[LEVEL_0]
    }
}

/// One sample of a population trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint<T: Real> {
    pub t: T,
    pub p1: T,
    pub p2: T,
    pub p0: T,
    /// `P_1 + P_2`.
    pub ptotal: T,
    pub amplitudes: [Complex<T>; 3],
}

/// `(|1> + e^{i phi0}|2>)/sqrt2`.
pub fn prepare_initial<T: Real>(phi0: T) -> StateVector<T> {
    let r = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    StateVector::from_slice(&[cplx(r), cis(phi0) * cplx(r), cplx(T::zero())]).expect("normalized by construction")
}

fn result_from_state<T: Real>(
    s: &PulseSchedule<T>,
    c: Chirality,
    state: StateVector<T>,
    noise: NoiseDescriptor,
    clipped: usize,
) -> Result<DiscriminationResult<T>> {
    let p = state.populations();
    let populations = [p[0], p[1], p[2]];
    let total = populations[0] + populations[1] + populations[2];
    if (total - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::NumericalFailure(format!(
            "populations sum to {}",
            total.as_f64()
        )));
    }
    Ok(DiscriminationResult {
        chirality: c,
        scheme: s.scheme(),
        populations,
        final_state: state,
        noise,
        clipped,
    })
}

/// Runs enantiomer `c` through an already prepared (possibly noisy) schedule.
pub fn discriminate_schedule<T: Real>(
    s: &PulseSchedule<T>,
    c: Chirality,
    phi0: T,
    noise: NoiseDescriptor,
    clipped: usize,
) -> Result<DiscriminationResult<T>> {
    let run = s.evolve(c, &prepare_initial(phi0))?;
    result_from_state(s, c, run.final_state().clone(), noise, clipped)
}

/// Same protocol in the four-level qudit encoding; populations are those
/// of the three levels `c` occupies.
pub fn discriminate_schedule_qudit<T: Real>(
    s: &PulseSchedule<T>,
    c: Chirality,
    phi0: T,
    noise: NoiseDescriptor,
    clipped: usize,
) -> Result<DiscriminationResult<T>> {
    let psi0 = qudit_embed_state(c, &prepare_initial(phi0))?;
    let run = propagate(|t| qudit_embed(c, &s.hamiltonian(c, t)), s.grid(), &psi0)?;
    let out = run.final_state();
    let map = qudit_index_map(c);
    let spectator = (0..4)
        .filter(|k| !map.contains(k))
        .map(|k| out.population(k))
        .fold(T::zero(), |a, b| a + b);
    if spectator > T::tol(1e-10) {
        return Err(Error::NumericalFailure(format!(
            "spectator level acquired population {:e}",
            spectator.as_f64()
        )));
    }
    result_from_state(s, c, qudit_restrict_state(c, out)?, noise, clipped)
}

/// Builds the schedule for `params`, applies `noise` and runs enantiomer `c`.
pub fn run_discrimination<T: Real>(
    params: &ExperimentParams<T>,
    c: Chirality,
    noise: &NoiseSpec<T>,
) -> Result<DiscriminationResult<T>> {
    let (s, clipped) = apply_noise(&params.schedule()?, noise)?;
    discriminate_schedule(&s, c, params.phi0, noise.descriptor(), clipped)
}

/// `xi = |P_det(L) - P_det(R)|`.
pub fn contrast<T: Real>(
    left: &DiscriminationResult<T>,
    right: &DiscriminationResult<T>,
    detect: DetectLevel,
) -> Result<T> {
    if left.chirality != Chirality::L || right.chirality != Chirality::R {
        return Err(Error::ContractViolation(
            "contrast expects an L run and an R run".into(),
        ));
    }
    if left.noise != right.noise || left.scheme != right.scheme {
        return Err(Error::ContractViolation(
            "contrast needs both enantiomers under the same schedule and noise realization".into(),
        ));
    }
    let k = detect.index();
    Ok((left.populations[k] - right.populations[k]).abs().min(T::one()))
}

/// Populations at every grid point of a noise-free run.
pub fn population_trace<T: Real>(params: &ExperimentParams<T>, c: Chirality) -> Result<Vec<TracePoint<T>>> {
    noisy_population_trace(params, c, &NoiseSpec::none())
}

/// [`population_trace`] under one noise realization.
pub fn noisy_population_trace<T: Real>(
    params: &ExperimentParams<T>,
    c: Chirality,
    noise: &NoiseSpec<T>,
) -> Result<Vec<TracePoint<T>>> {
    let (s, _) = apply_noise(&params.schedule()?, noise)?;
    let run = s.evolve(c, &prepare_initial(params.phi0))?;
    Ok(run
        .states
        .iter()
        .enumerate()
        .map(|(j, psi)| {
            let (p1, p2, p0) = (
                psi.population(LEVEL_1),
                psi.population(LEVEL_2),
                psi.population(LEVEL_0),
            );
            TracePoint {
                t: s.grid().time(j),
                p1,
                p2,
                p0,
                ptotal: p1 + p2,
                amplitudes: [psi.amplitude(0), psi.amplitude(1), psi.amplitude(2)],
            }
        })
        .collect())
}

/// Resonant constant pi pulse between `|1_c>` and `|0>` of the qudit.
pub fn detection_pulse<T: Real>(psi: &StateVector<T>, c: Chirality, grid: &TimeGrid<T>) -> Result<StateVector<T>> {
    Error::check_dim(4, psi.dim())?;
    let half_rabi = T::pi() / grid.duration() * T::lit(0.5);
    let mut m = CMatrix::zeros(4, 4);
    m[(c.qudit_level(), QUDIT_0)] = cplx(half_rabi);
    m[(QUDIT_0, c.qudit_level())] = cplx(half_rabi);
    let h = Operator::hermitian(m)?;
    let run = propagate(|_| Ok(h.clone()), grid, psi)?;
    Ok(run.final_state().clone())
}

/// `xi(phi)` at `samples` equally spaced drive phases in `[0, 2 pi)` with
/// the initial phase held at `params.phi0`.
pub fn phase_scan<T: Real>(params: &ExperimentParams<T>, samples: usize, detect: DetectLevel) -> Result<Vec<(T, T)>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("phase scan needs at least one sample".into()));
    }
    let base = params.schedule()?;
    let none = NoiseSpec::<T>::none().descriptor();
    (0..samples)
        .map(|j| {
            let phi = T::two_pi() * T::lit(j as f64) / T::lit(samples as f64);
            let s = base.with_phi(phi);
            let l = discriminate_schedule(&s, Chirality::L, params.phi0, none, 0)?;
            let r = discriminate_schedule(&s, Chirality::R, params.phi0, none, 0)?;
            Ok((phi, contrast(&l, &r, detect)?))
        })
        .collect()
}

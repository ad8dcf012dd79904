//! Schedule generators.
//!
//! All three schemes act on the two-level `{|B_c>, |0>}` subspace only;
//! the dark state never couples, and the same waveforms serve both
//! enantiomers because the chirality lives entirely in `|B_c>`.
//!
//! NHQC and STA act as the gate `|D><D| + e^{i gamma}|B><B|` on
//! `span{|1>, |2>}`. NHQC+ and STA are inverse-engineered from the moving
//! basis vector `|zeta_1> = sin(k/2)|B> + cos(k/2) e^{-i beta}|0>`: writing
//! the solution as `e^{i chi(t)}|zeta_1(t)>` and substituting into the
//! Schrodinger equation gives, with `c = cos(k/2)`,
//!
//! ```text
//! Omega e^{i(Phi - beta)} = -2 chi' tan(k/2) + i k'
//! Delta                   = beta' - chi' cos(k) / c^2
//! ```
//!
//! The remaining freedom is the phase rate `chi'`:
//!
//! * NHQC+: `chi' = b c^2`, so the instantaneous dynamical phase is
//!   `c^2 (beta' - b)` and vanishes on average when the path's geometric
//!   phase `int c^2 beta'` equals the total phase `b int c^2 = gamma`;
//! * STA: `Delta = 0` forces `chi' = c^2 beta' / cos(k)`; the gate phase
//!   then carries a dynamical part, which is what makes it the fragile
//!   comparator.

use std::sync::Arc;

use nalgebra::Complex;

use super::path::trapezoid;
use super::{check_zero_dynamical_phase, ControlFn, LoopPath, PulseSchedule, Scheme};
use crate::chiralmodel::Chirality;
use crate::error::{Error, Result};
use crate::scalar::{modulus, phase, Real};
use crate::statecore::TimeGrid;

/// Default loop arc `A` of the NHQC+ path `k = pi - A sin^2(pi t/T)`.
pub const NHQCPLUS_DEFAULT_ARC: f64 = 0.75 * std::f64::consts::PI;
/// Default amplitude of the zero-mean ripple added to `beta(t)` for NHQC+.
pub const NHQCPLUS_DEFAULT_RIPPLE: f64 = 0.5;
/// Loop arc of the STA comparator; must stay below `pi/2` so `cos k < 0`.
pub const STA_DEFAULT_ARC: f64 = std::f64::consts::FRAC_PI_3;

const QUADRATURE_SAMPLES: usize = 20_000;

/// Resonant two-segment NHQC schedule.
///
/// Each segment is a sine-squared pulse of area `pi`. Segment 1 uses phase
/// `0`, segment 2 phase `pi + gamma`; in the `{B, 0}` subspace this gives
/// `-i(e^{i Phi_2}|B><0| + h.c.) * -i(e^{i Phi_1}|B><0| + h.c.)
///  = e^{i gamma}|B><B| + e^{-i gamma}|0><0|`, i.e. the target holonomy
/// without any global phase on `span{|1>, |2>}`.
pub fn nhqc_schedule<T: Real>(theta: T, phi: T, gamma: T, grid: TimeGrid<T>) -> Result<PulseSchedule<T>> {
    let duration = grid.duration();
    let half = duration * T::lit(0.5);
    let peak = T::two_pi() / half;
    let phase2 = T::pi() + gamma;
    let controls: ControlFn<T> = Arc::new(move |t: T| {
        let w = peak * (T::pi() * t / half).sin().powi(2);
        (w, if t < half { T::zero() } else { phase2 }, T::zero())
    });
    let schedule = PulseSchedule::from_analytic(
        Scheme::Nhqc,
        grid,
        theta,
        phi,
        gamma,
        controls,
        vec![T::zero(), half, duration],
    )?;
    for (a, b) in [(T::zero(), half), (half, duration)] {
        let area = schedule.pulse_area(a, b);
        if (area - T::pi()).abs() > T::tol(1e-9) {
            return Err(Error::Resolution(format!(
                "segment [{}, {}] has area {} instead of pi; use an even, finer grid",
                a.as_f64(),
                b.as_f64(),
                area.as_f64()
            )));
        }
    }
    Ok(schedule)
}

/// Inverse-engineered NHQC+ schedule for `path`, checked for the
/// pure-geometric condition.
pub fn nhqcplus_schedule<T: Real>(
    theta: T,
    phi: T,
    gamma: T,
    path: &LoopPath<T>,
    grid: TimeGrid<T>,
) -> Result<PulseSchedule<T>> {
    let schedule = inverse_engineer(theta, phi, gamma, path, grid)?;
    let residual = check_zero_dynamical_phase(&schedule, path, Chirality::L)?;
    if residual > T::tol(1e-6) {
        return Err(Error::ConditionViolation(format!(
            "dynamical phase {:e} exceeds 1e-6; the path's geometric phase must equal gamma",
            residual.as_f64()
        )));
    }
    Ok(schedule)
}

/// Inverse engineering with the NHQC+ phase-rate rule `chi' = b cos^2(k/2)`,
/// without the pure-geometric check.
pub fn inverse_engineer<T: Real>(
    theta: T,
    phi: T,
    gamma: T,
    path: &LoopPath<T>,
    grid: TimeGrid<T>,
) -> Result<PulseSchedule<T>> {
    check_path_grid(path, &grid)?;
    let weight = trapezoid(path.duration(), QUADRATURE_SAMPLES, |t| path.excited_weight(t));
    if !(weight > T::zero()) {
        return Err(Error::SingularPath("loop never leaves the bright state".into()));
    }
    let rate = gamma / weight;
    for (j, t) in grid.times().into_iter().enumerate() {
        let k = path.k(t);
        if j > 0 && j < grid.steps() && k.sin().abs() < T::lit(1e-6) && k.cos() > T::zero() {
            return Err(Error::SingularPath(format!(
                "path reaches the excited pole at t = {}",
                t.as_f64()
            )));
        }
    }
    let p = path.clone();
    let controls: ControlFn<T> = Arc::new(move |t: T| {
        let k = p.k(t);
        let rotated = Complex::new(-rate * k.sin(), p.k_dot(t));
        (
            modulus(rotated),
            p.beta(t) + phase(rotated),
            p.beta_dot(t) - rate * k.cos(),
        )
    });
    PulseSchedule::from_analytic(
        Scheme::NhqcPlus,
        grid,
        theta,
        phi,
        gamma,
        controls,
        vec![T::zero(), grid.duration()],
    )
}

/// Resonant shortcut-to-adiabaticity comparator.
///
/// Same moving-basis ansatz with `k = pi - A sin^2(pi t/T)`,
/// `beta = b t` and `A < pi/2`, but constrained to `Delta = 0`. The slope
/// `b` is chosen so that the accumulated phase is `gamma - 2 pi`, which is
/// the gate `|D><D| + e^{i gamma}|B><B|` at nominal amplitude.
pub fn sta_schedule<T: Real>(theta: T, phi: T, gamma: T, grid: TimeGrid<T>) -> Result<PulseSchedule<T>> {
    let duration = grid.duration();
    let arc = T::lit(STA_DEFAULT_ARC);
    let w = T::pi() / duration;
    let half = T::lit(0.5);
    let k = move |t: T| T::pi() - arc * (w * t).sin().powi(2);
    let k_dot = move |t: T| -arc * w * (T::lit(2.0) * w * t).sin();
    let weight = trapezoid(duration, QUADRATURE_SAMPLES, |t| {
        let kt = k(t);
        (kt * half).cos().powi(2) / kt.cos()
    });
    let wrapped = gamma - T::two_pi() * (gamma / T::two_pi()).floor();
    let target = if wrapped > T::zero() {
        wrapped - T::two_pi()
    } else {
        T::zero()
    };
    let slope = target / weight;
    let controls: ControlFn<T> = Arc::new(move |t: T| {
        let rotated = Complex::new(-slope * k(t).tan(), k_dot(t));
        (modulus(rotated), slope * t + phase(rotated), T::zero())
    });
    PulseSchedule::from_analytic(
        Scheme::Sta,
        grid,
        theta,
        phi,
        gamma,
        controls,
        vec![T::zero(), duration],
    )
}

/// Default NHQC+ path for a target phase `gamma` on `grid`.
pub fn default_nhqcplus_path<T: Real>(gamma: T, duration: T) -> Result<LoopPath<T>> {
    LoopPath::nhqcplus_default(
        duration,
        gamma,
        T::lit(NHQCPLUS_DEFAULT_ARC),
        T::lit(NHQCPLUS_DEFAULT_RIPPLE),
    )
}

fn check_path_grid<T: Real>(path: &LoopPath<T>, grid: &TimeGrid<T>) -> Result<()> {
    if (path.duration() - grid.duration()).abs() > T::tol(1e-12) * grid.duration() {
        return Err(Error::InvalidArgument(format!(
            "path duration {} differs from grid duration {}",
            path.duration().as_f64(),
            grid.duration().as_f64()
        )));
    }
    Ok(())
}

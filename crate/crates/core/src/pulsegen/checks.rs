use nalgebra::Complex;

use super::path::LoopPath;
use super::{PulseSchedule, Scheme};
use crate::chiralmodel::{dark_bright_basis, Chirality, LEVEL_0};
use crate::error::{Error, Result};
use crate::scalar::{cis, cplx, modulus, Real};
use crate::statecore::{CVector, StateVector};

/// `sin(k/2)|B> + cos(k/2) e^{-i beta}|0>`.
pub(crate) fn moving_vector<T: Real>(bright: &StateVector<T>, k: T, beta: T) -> CVector<T> {
    let half = T::lit(0.5);
    let mut v = bright.amplitudes() * cplx((k * half).sin());
    v[LEVEL_0] += cis(-beta) * cplx((k * half).cos());
    v
}

/// Largest `|<zeta_m(t)|H(t)|zeta_n(t)>|` over the grid for the NHQC
/// frame `{|D>, |zeta_1(t)>}`.
///
/// The frame is rebuilt from the schedule's own samples (cumulative pulse
/// area and segment phases), so amplitude errors move the frame with the
/// pulse; the condition tests the phase structure of the drive.
pub fn check_parallel_transport<T: Real>(s: &PulseSchedule<T>, c: Chirality) -> Result<T> {
    if s.scheme() != Scheme::Nhqc {
        return Err(Error::ContractViolation(format!(
            "parallel-transport check applies to NHQC schedules, got {}",
            s.scheme()
        )));
    }
    let (dark, bright) = dark_bright_basis(c, s.theta(), s.phi());
    let grid = s.grid();
    let boundary = s
        .segment_boundaries()
        .get(1)
        .copied()
        .unwrap_or(s.duration() * T::lit(0.5));
    let half = T::lit(0.5);
    let dt = grid.dt();
    let mut area = T::zero();
    let mut boundary_area = None;
    let mut worst = T::zero();
    for j in 0..grid.len() {
        if j > 0 {
            area += (s.omega()[j - 1] + s.omega()[j]) * half * dt;
        }
        let t = grid.time(j);
        let (k, beta) = if t < boundary {
            (T::pi() - area, s.phase()[j] + T::frac_pi_2())
        } else {
            let a0 = *boundary_area.get_or_insert(area);
            (area - a0, s.phase()[j] - T::frac_pi_2())
        };
        let zeta1 = moving_vector(&bright, k, beta);
        let h = s.sample_hamiltonian(c, j);
        let frame = [dark.amplitudes().clone(), zeta1];
        for m in &frame {
            let hm = h.matrix().adjoint() * m;
            for n in &frame {
                worst = worst.max(modulus(hm.dotc(n)));
            }
        }
    }
    Ok(worst)
}

/// Orange-slice loop traced by an NHQC schedule at nominal amplitude.
pub fn nhqc_frame_path<T: Real>(s: &PulseSchedule<T>) -> Result<LoopPath<T>> {
    if s.scheme() != Scheme::Nhqc {
        return Err(Error::ContractViolation(
            "orange-slice frame needs an NHQC schedule".into(),
        ));
    }
    LoopPath::orange_slice(s.duration(), s.gamma(), s.phase()[0])
}

/// Largest `|int_0^T <mu_m|H|mu_n> dt|` for the auxiliary frame
/// `{|D>, |zeta_1(t)>}` of `path` (trapezoid rule on the schedule grid).
pub fn check_zero_dynamical_phase<T: Real>(s: &PulseSchedule<T>, path: &LoopPath<T>, c: Chirality) -> Result<T> {
    if s.scheme() != Scheme::NhqcPlus {
        return Err(Error::ContractViolation(format!(
            "zero-dynamical-phase check applies to NHQC+ schedules, got {}",
            s.scheme()
        )));
    }
    Ok(integrated_frame_hamiltonian(s, path, c)
        .iter()
        .fold(T::zero(), |acc, z| acc.max(modulus(*z))))
}

/// `int_0^T <mu_m|H|mu_n> dt` for `m, n` in `{0, 1}` (row-major).
pub(crate) fn integrated_frame_hamiltonian<T: Real>(
    s: &PulseSchedule<T>,
    path: &LoopPath<T>,
    c: Chirality,
) -> [Complex<T>; 4] {
    let (dark, bright) = dark_bright_basis(c, s.theta(), s.phi());
    let grid = s.grid();
    let dt = grid.dt();
    let mut acc = [Complex::new(T::zero(), T::zero()); 4];
    for j in 0..grid.len() {
        let t = grid.time(j);
        let weight = if j == 0 || j == grid.steps() {
            dt * T::lit(0.5)
        } else {
            dt
        };
        let zeta1 = moving_vector(&bright, path.k(t), path.beta(t));
        let h = s.sample_hamiltonian(c, j);
        let frame = [dark.amplitudes().clone(), zeta1];
        for (m, bra) in frame.iter().enumerate() {
            let hb = h.matrix() * bra;
            for (n, ket) in frame.iter().enumerate() {
                // <mu_m|H|mu_n> = conj(<mu_n|H|mu_m>) for hermitian H
                acc[2 * m + n] += hb.dotc(ket).conj() * cplx(weight);
            }
        }
    }
    acc
}

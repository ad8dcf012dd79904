//! Target holonomies, geometric and dynamical phases, and the moving-frame
//! generators `A - H` that drive the frame coefficients.
//!
//! The target gate for enantiomer `c` is
//! `U_c = |D_c><D_c| + e^{i gamma}|B_c><B_c| + eps |0><0|`. At
//! `theta = 3pi/4`, `gamma = pi` its `span{|1>, |2>}` block is
//! `-(1/sqrt2) [[1, ±e^{-i phi}], [±e^{i phi}, -1]]`, i.e. the familiar
//! printed matrix up to an overall sign; gates are therefore always
//! compared with the global-phase-insensitive [`block_fidelity`]. The
//! excited-level phase `eps` is irrelevant to discrimination and is set to
//! `1` in the target.

use nalgebra::Complex;

use crate::chiralmodel::{dark_bright_basis, Chirality, LEVEL_0, LEVEL_1, LEVEL_2};
use crate::error::{Error, Result};
use crate::pulsegen::{LoopPath, PulseSchedule};
use crate::scalar::{cis, cplx, phase, Real};
use crate::statecore::{gauss_nodes, magnus4_step, trace_fidelity, CMatrix, CVector, Operator, StateVector, TimeGrid};

/// Moving frame `{|zeta_0> = |D_c>, |zeta_1(t)>}` of a cyclic evolution.
#[derive(Debug, Clone)]
pub struct CyclicBasisFrame<T: Real> {
    chirality: Chirality,
    dark: StateVector<T>,
    bright: StateVector<T>,
    path: LoopPath<T>,
}

impl<T: Real> CyclicBasisFrame<T> {
    pub fn new(c: Chirality, theta: T, phi: T, path: LoopPath<T>) -> Self {
        let (dark, bright) = dark_bright_basis(c, theta, phi);
        Self {
            chirality: c,
            dark,
            bright,
            path,
        }
    }

    /// Frame matching a schedule's drive parameters.
    pub fn for_schedule(s: &PulseSchedule<T>, c: Chirality, path: LoopPath<T>) -> Self {
        Self::new(c, s.theta(), s.phi(), path)
    }

    pub fn chirality(&self) -> Chirality {
        self.chirality
    }

    pub fn path(&self) -> &LoopPath<T> {
        &self.path
    }

    pub fn zeta0(&self) -> &StateVector<T> {
        &self.dark
    }

    pub fn bright(&self) -> &StateVector<T> {
        &self.bright
    }

    pub fn zeta1(&self, t: T) -> StateVector<T> {
        StateVector::new(self.zeta1_raw(t)).expect("moving basis vector is normalized")
    }

    fn zeta1_raw(&self, t: T) -> CVector<T> {
        crate::pulsegen::moving_vector(&self.bright, self.path.k(t), self.path.beta(t))
    }

    /// `d/dt |zeta_1>` by the chain rule through `(k, beta)`.
    pub fn zeta1_dot(&self, t: T) -> CVector<T> {
        let half = T::lit(0.5);
        let (k, beta) = (self.path.k(t), self.path.beta(t));
        let (k_dot, beta_dot) = (self.path.k_dot(t), self.path.beta_dot(t));
        let (s, c) = ((k * half).sin(), (k * half).cos());
        let mut v = self.bright.amplitudes() * cplx(half * k_dot * c);
        let excited = cis(-beta) * Complex::new(-half * k_dot * s, -beta_dot * c);
        v[LEVEL_0] += excited;
        v
    }

    /// `||zeta_1(T) - zeta_1(0)||`.
    pub fn closure_defect(&self) -> T {
        let d = self.zeta1_raw(self.path.duration()) - self.zeta1_raw(T::zero());
        d.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    fn basis(&self, t: T) -> [CVector<T>; 2] {
        [self.dark.amplitudes().clone(), self.zeta1_raw(t)]
    }
}

/// Accumulated phases of the moving basis vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolonomyPhases<T: Real> {
    pub geometric: T,
    pub dynamical: T,
}

/// `|D_c><D_c| + e^{i gamma}|B_c><B_c| + |0><0|`.
pub fn target_unitary<T: Real>(theta: T, phi: T, gamma: T, c: Chirality) -> Operator<T> {
    let (d, b) = dark_bright_basis(c, theta, phi);
    let mut m = d.amplitudes() * d.amplitudes().adjoint() + b.amplitudes() * b.amplitudes().adjoint() * cis(gamma);
    m[(LEVEL_0, LEVEL_0)] = Complex::new(T::one(), T::zero());
    Operator::unitary(m).expect("projector sum is unitary")
}

/// The `span{|1>, |2>}` block of a three-level operator.
pub fn qubit_block<T: Real>(u: &Operator<T>) -> CMatrix<T> {
    let idx = [LEVEL_1, LEVEL_2];
    CMatrix::from_fn(2, 2, |r, k| u.get(idx[r], idx[k]))
}

/// Global-phase-insensitive fidelity of the `span{|1>, |2>}` blocks.
pub fn block_fidelity<T: Real>(u: &Operator<T>, target: &Operator<T>) -> Result<T> {
    Error::check_dim(3, u.dim())?;
    Error::check_dim(3, target.dim())?;
    trace_fidelity(&qubit_block(target), &qubit_block(u))
}

/// Geometric phase `int i<zeta_1|d/dt zeta_1> dt`, wrapped to `[0, 2 pi)`.
///
/// Evaluated as the discrete connection `-sum_j arg <zeta_1(t_j)|zeta_1(t_{j+1})>`,
/// which converges to the integral for smooth loops and stays exact across
/// gauge jumps of `beta` (the NHQC loop jumps by `gamma` at the excited pole).
pub fn geometric_phase<T: Real>(frame: &CyclicBasisFrame<T>, grid: &TimeGrid<T>) -> Result<T> {
    let defect = frame.closure_defect();
    if defect > T::tol(1e-10) {
        return Err(Error::ContractViolation(format!(
            "frame is not cyclic (|zeta_1(T) - zeta_1(0)| = {:e})",
            defect.as_f64()
        )));
    }
    if (grid.duration() - frame.path.duration()).abs() > T::tol(1e-12) * grid.duration() {
        return Err(Error::InvalidArgument("grid and loop durations differ".into()));
    }
    let mut prev = frame.zeta1_raw(T::zero());
    let mut total = T::zero();
    for j in 1..grid.len() {
        let next = frame.zeta1_raw(grid.time(j));
        total -= phase(prev.dotc(&next));
        prev = next;
    }
    Ok(wrap_phase(total))
}

/// Dynamical phase `int <zeta_1|H|zeta_1> dt` (trapezoid on the schedule grid).
pub fn dynamical_phase<T: Real>(s: &PulseSchedule<T>, frame: &CyclicBasisFrame<T>, c: Chirality) -> Result<T> {
    if c != frame.chirality {
        return Err(Error::InconsistentParameters(
            "frame built for the other enantiomer".into(),
        ));
    }
    let grid = s.grid();
    let dt = grid.dt();
    let mut sum = T::zero();
    for j in 0..grid.len() {
        let w = if j == 0 || j == grid.steps() {
            dt * T::lit(0.5)
        } else {
            dt
        };
        let z = frame.zeta1_raw(grid.time(j));
        let hz = s.sample_hamiltonian(c, j).matrix() * &z;
        sum += z.dotc(&hz).re * w;
    }
    Ok(sum)
}

/// Both phases for one schedule/frame pair.
pub fn holonomy_phases<T: Real>(
    s: &PulseSchedule<T>,
    frame: &CyclicBasisFrame<T>,
    c: Chirality,
) -> Result<HolonomyPhases<T>> {
    Ok(HolonomyPhases {
        geometric: geometric_phase(frame, s.grid())?,
        dynamical: dynamical_phase(s, frame, c)?,
    })
}

/// Connection `A_mn = i<zeta_m|d/dt zeta_n>` and projected Hamiltonian
/// `H_mn = <zeta_m|H(t)|zeta_n>` at time `t`.
pub fn evolution_generators<T: Real>(
    frame: &CyclicBasisFrame<T>,
    s: &PulseSchedule<T>,
    c: Chirality,
    t: T,
) -> Result<(Operator<T>, Operator<T>)> {
    if c != frame.chirality {
        return Err(Error::InconsistentParameters(
            "frame built for the other enantiomer".into(),
        ));
    }
    let basis = frame.basis(t);
    let zero = CVector::zeros(3);
    let derivs = [zero, frame.zeta1_dot(t)];
    let h = s.hamiltonian(c, t);
    let i = Complex::new(T::zero(), T::one());
    let a = CMatrix::from_fn(2, 2, |m, n| i * basis[m].dotc(&derivs[n]));
    let hm = CMatrix::from_fn(2, 2, |m, n| basis[m].dotc(&(h.matrix() * &basis[n])));
    Ok((Operator::general(a)?, Operator::general(hm)?))
}

/// Integrates `d alpha/dt = i (A - H) alpha` on the schedule grid with the
/// same fourth-order step as [`crate::statecore::propagate`] and returns
/// `alpha(t_j)` for every grid point.
pub fn integrate_frame_coefficients<T: Real>(
    frame: &CyclicBasisFrame<T>,
    s: &PulseSchedule<T>,
    c: Chirality,
    alpha0: [Complex<T>; 2],
) -> Result<Vec<[Complex<T>; 2]>> {
    let grid = s.grid();
    let dt = grid.dt();
    let mut alpha = CVector::from_column_slice(&alpha0);
    let mut out = Vec::with_capacity(grid.len());
    out.push(alpha0);
    let nodes = gauss_nodes::<T>();
    // Schrodinger form: d alpha/dt = -i K alpha with K = H - A
    let generator = |t: T| -> Result<CMatrix<T>> {
        let (a, h) = evolution_generators(frame, s, c, t)?;
        let k = h.matrix() - a.matrix();
        Ok((&k + k.adjoint()) * cplx(T::lit(0.5)))
    };
    for j in 0..grid.steps() {
        let t = grid.time(j);
        let k1 = generator(t + nodes[0] * dt)?;
        let k2 = generator(t + nodes[1] * dt)?;
        alpha = magnus4_step(&k1, &k2, dt) * alpha;
        out.push([alpha[0], alpha[1]]);
    }
    Ok(out)
}

/// Wraps an angle into `[0, 2 pi)`.
pub fn wrap_phase<T: Real>(x: T) -> T {
    let two_pi = T::two_pi();
    let r = x - two_pi * (x / two_pi).floor();
    if r >= two_pi {
        T::zero()
    } else {
        r
    }
}

/// Smallest distance between two angles on the circle.
pub fn phase_distance<T: Real>(a: T, b: T) -> T {
    let d = wrap_phase(a - b);
    d.min(T::two_pi() - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulsegen::{default_nhqcplus_path, nhqc_frame_path, nhqc_schedule, nhqcplus_schedule};
    use crate::statecore::max_abs;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    const THETA: f64 = 3.0 * PI / 4.0;

    fn grid() -> TimeGrid<f64> {
        TimeGrid::new(4.0 * PI, 2000).unwrap()
    }

    #[test]
    fn trivial_holonomy_is_identity() {
        for c in Chirality::BOTH {
            let u = target_unitary(1.1, 0.4, 0.0, c);
            assert!(max_abs(&(u.matrix() - CMatrix::identity(3, 3))) < 1e-15);
        }
    }

    #[test]
    fn printed_gate_up_to_sign() {
        let phi = 0.7;
        for c in Chirality::BOTH {
            let u = target_unitary(THETA, phi, PI, c);
            let sign = c.sign() as f64;
            let printed = [
                [cplx(FRAC_1_SQRT_2), cis(-phi) * cplx(sign * FRAC_1_SQRT_2)],
                [cis(phi) * cplx(sign * FRAC_1_SQRT_2), cplx(-FRAC_1_SQRT_2)],
            ];
            for r in 0..2 {
                for k in 0..2 {
                    assert!((u.get(r, k) + printed[r][k]).norm() < 1e-15, "{c} ({r},{k})");
                }
            }
            assert!(u.get(0, LEVEL_0).norm() == 0.0 && u.get(LEVEL_0, 1).norm() == 0.0);
        }
        let l = target_unitary(THETA, phi, PI, Chirality::L);
        let r = target_unitary(THETA, phi, PI, Chirality::R);
        assert!((l.get(0, 1) + r.get(0, 1)).norm() < 1e-15);
    }

    #[test]
    fn chirality_conjugation_relation() {
        let flip = CMatrix::from_diagonal(&CVector::from_column_slice(&[cplx(-1.0), cplx(1.0), cplx(1.0)]));
        for (theta, phi, gamma) in [(0.4, 1.2, 2.0), (THETA, 0.0, PI), (2.5, -0.9, 0.3)] {
            let l = target_unitary(theta, phi, gamma, Chirality::L);
            let r = target_unitary(theta, phi, gamma, Chirality::R);
            let conj = Operator::unitary(&flip * l.matrix() * &flip).unwrap();
            assert!((crate::statecore::unitary_fidelity(&conj, &r).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn target_sends_initial_state_to_chiral_levels() {
        let phi0 = 1.3;
        let psi = StateVector::from_slice(&[cplx(1.0), cis(phi0), cplx(0.0)]).unwrap();
        let out_l = psi.apply(&target_unitary(THETA, phi0, PI, Chirality::L)).unwrap();
        let out_r = psi.apply(&target_unitary(THETA, phi0, PI, Chirality::R)).unwrap();
        assert!(out_l.population(LEVEL_1) >= 1.0 - 1e-12);
        assert!(out_r.population(LEVEL_2) >= 1.0 - 1e-12);
    }

    #[test]
    fn constant_frame_has_no_phase() {
        let path = LoopPath::new(5.0, |_| PI, |_| 0.3).unwrap();
        let frame = CyclicBasisFrame::new(Chirality::L, 1.0, 0.2, path);
        assert!(
            geometric_phase(&frame, &TimeGrid::new(5.0, 100).unwrap())
                .unwrap()
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn non_cyclic_frame_is_rejected() {
        let path = LoopPath::unconstrained(5.0, |t| 2.0 + 0.1 * t, |_| 0.0, |_| 0.1, |_| 0.0);
        let frame = CyclicBasisFrame::new(Chirality::L, 1.0, 0.2, path);
        assert!(matches!(
            geometric_phase(&frame, &TimeGrid::new(5.0, 100).unwrap()),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn dynamical_phase_of_static_half_frame() {
        // static |zeta_1> = (|B> + e^{-i beta}|0>)/sqrt2 under a constant resonant drive
        let (omega, big_phi, beta, duration) = (0.8, 0.5, 0.2, 3.0);
        let grid = TimeGrid::new(duration, 300).unwrap();
        let s = PulseSchedule::new(
            crate::pulsegen::Scheme::Nhqc,
            grid,
            THETA,
            0.0,
            PI,
            vec![omega; grid.len()],
            vec![big_phi; grid.len()],
            vec![0.0; grid.len()],
            vec![0.0, duration],
        )
        .unwrap();
        let path = LoopPath::unconstrained(duration, |_| PI / 2.0, move |_| beta, |_| 0.0, |_| 0.0);
        let frame = CyclicBasisFrame::for_schedule(&s, Chirality::R, path);
        let dyn_phase = dynamical_phase(&s, &frame, Chirality::R).unwrap();
        let closed_form = omega * duration / 2.0 * (big_phi - beta).cos();
        assert!((dyn_phase - closed_form).abs() < 1e-12);

        let zero = s.with_omega(vec![0.0; grid.len()]).unwrap();
        assert_eq!(dynamical_phase(&zero, &frame, Chirality::R).unwrap(), 0.0);
    }

    #[test]
    fn nhqc_dynamical_phase_vanishes() {
        let s = nhqc_schedule(THETA, 0.0, PI, grid()).unwrap();
        for c in Chirality::BOTH {
            let frame = CyclicBasisFrame::for_schedule(&s, c, nhqc_frame_path(&s).unwrap());
            assert!(dynamical_phase(&s, &frame, c).unwrap().abs() <= 1e-6);
        }
    }

    #[test]
    fn connection_is_hermitian_and_nhqc_decoupled() {
        let s = nhqc_schedule(THETA, 0.3, PI / 2.0, grid()).unwrap();
        let frame = CyclicBasisFrame::for_schedule(&s, Chirality::L, nhqc_frame_path(&s).unwrap());
        for t in s.grid().times().into_iter().step_by(37) {
            let (a, h) = evolution_generators(&frame, &s, Chirality::L, t).unwrap();
            assert!(a.hermiticity_defect() < 1e-12);
            let diff = a.matrix() - h.matrix();
            assert!(diff[(0, 1)].norm() <= 1e-8 && diff[(1, 0)].norm() <= 1e-8);
        }
    }

    #[test]
    fn frame_picture_reproduces_propagation() {
        let duration = 4.0 * PI;
        let path = default_nhqcplus_path(PI, duration).unwrap();
        let s = nhqcplus_schedule(THETA, 0.4, PI, &path, grid()).unwrap();
        for c in Chirality::BOTH {
            let frame = CyclicBasisFrame::for_schedule(&s, c, path.clone());
            let psi0 = StateVector::from_slice(&[cplx(0.6), Complex::new(0.0, 0.8), cplx(0.0)]).unwrap();
            let z0 = frame.zeta0().amplitudes().clone();
            let z1 = frame.zeta1(0.0).amplitudes().clone();
            let alpha0 = [z0.dotc(psi0.amplitudes()), z1.dotc(psi0.amplitudes())];
            let alphas = integrate_frame_coefficients(&frame, &s, c, alpha0).unwrap();
            let u = s.propagator(c).unwrap();
            let out = psi0.apply(&u).unwrap();
            let expected = [z0.dotc(out.amplitudes()), z1.dotc(out.amplitudes())];
            let last = alphas.last().unwrap();
            for m in 0..2 {
                assert!(
                    (last[m] - expected[m]).norm() < 1e-6,
                    "{c} m={m}: {} vs {}",
                    last[m],
                    expected[m]
                );
            }
        }
    }

    #[test]
    fn solid_angle_oracle() {
        let duration = 6.0;
        for arc in [0.4, 1.3, 2.2] {
            let w = PI / duration;
            let path = LoopPath::new(
                duration,
                move |t: f64| PI - arc * (w * t).sin().powi(2),
                move |t| 2.0 * w * t,
            )
            .unwrap();
            let frame = CyclicBasisFrame::new(Chirality::R, THETA, 0.9, path);
            let gamma = geometric_phase(&frame, &TimeGrid::new(duration, 4000).unwrap()).unwrap();
            // S = int_0^{2pi} d beta int_0^{k(beta)} sin k' dk' by a 2D midpoint rule
            let (nb, nk) = (800, 800);
            let mut solid = 0.0;
            for i in 0..nb {
                let beta = (i as f64 + 0.5) * 2.0 * PI / nb as f64;
                let k_max = PI - arc * (beta / 2.0).sin().powi(2);
                let dk = k_max / nk as f64;
                let inner: f64 = (0..nk).map(|j| ((j as f64 + 0.5) * dk).sin() * dk).sum();
                solid += inner * 2.0 * PI / nb as f64;
            }
            assert!(
                phase_distance(gamma, -solid / 2.0) < 1e-4,
                "arc {arc}: {gamma} vs {}",
                wrap_phase(-solid / 2.0)
            );
        }
    }

    #[test]
    fn orange_slice_phase_matches_propagation() {
        for gamma0 in [PI / 2.0, PI, 1.5 * PI] {
            let s = nhqc_schedule(THETA, 0.2, gamma0, grid()).unwrap();
            let frame = CyclicBasisFrame::for_schedule(&s, Chirality::L, nhqc_frame_path(&s).unwrap());
            let geometric = geometric_phase(&frame, s.grid()).unwrap();
            let u = s.propagator(Chirality::L).unwrap();
            let (d, b) = (frame.zeta0().amplitudes(), frame.bright().amplitudes());
            let extracted = phase(b.dotc(&(u.matrix() * b)) / d.dotc(&(u.matrix() * d)));
            assert!(
                phase_distance(geometric, extracted) < 1e-4,
                "{gamma0}: {geometric} vs {extracted}"
            );
            assert!(phase_distance(geometric, gamma0) < 1e-4);
        }
    }

    #[test]
    fn geometric_phase_ignores_time_warp() {
        let duration = 4.0 * PI;
        let path = default_nhqcplus_path(1.1, duration).unwrap();
        let warp = move |t: f64| t + 0.12 * duration / (2.0 * PI) * (2.0 * PI * t / duration).sin();
        let (p1, p2) = (path.clone(), path.clone());
        let warped = LoopPath::new(duration, move |t| p1.k(warp(t)), move |t| p2.beta(warp(t))).unwrap();
        let g = grid();
        let plain = geometric_phase(&CyclicBasisFrame::new(Chirality::L, THETA, 0.0, path), &g).unwrap();
        let bent = geometric_phase(&CyclicBasisFrame::new(Chirality::L, THETA, 0.0, warped), &g).unwrap();
        assert!(phase_distance(plain, bent) < 1e-4);
        assert!(phase_distance(plain, 1.1) < 1e-4);
    }

    #[test]
    fn wrapping() {
        assert!((wrap_phase(-PI / 2.0) - 1.5 * PI).abs() < 1e-15);
        assert!((phase_distance(0.1, 2.0 * PI - 0.1) - 0.2).abs() < 1e-12);
    }
}

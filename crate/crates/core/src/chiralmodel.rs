//! Chirality-dependent three-level Hamiltonians, the dark/bright basis and
//! the four-level trapped-ion qudit embedding.
//!
//! Level ordering used by every operator in the crate:
//!
//! * three-level molecule: `(|1>, |2>, |0>)`, see [`LEVEL_1`], [`LEVEL_2`], [`LEVEL_0`];
//! * four-level qudit: `(|1_L>, |1_R>, |2>, |0>)`, see [`QUDIT_1L`] .. [`QUDIT_0`].
//!
//! The two enantiomers differ only in the sign of the `|1> <-> |0>` coupling:
//!
//! ```text
//!          | 0        0        ±Ω1/2 |
//! H(t)  =  | 0        0         Ω2/2 |      Ω1 = Ω sin(θ/2) e^{iΦ}
//!          | ±Ω1*/2   Ω2*/2     Δ    |      Ω2 = Ω cos(θ/2) e^{i(Φ+φ)}
//! ```
//!
//! with `+` for L and `-` for R.

use std::fmt;
use std::sync::Arc;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cis, cplx, modulus, Real};
use crate::statecore::{CMatrix, CVector, Operator, StateVector};

pub const LEVEL_1: usize = 0;
pub const LEVEL_2: usize = 1;
pub const LEVEL_0: usize = 2;

pub const QUDIT_1L: usize = 0;
pub const QUDIT_1R: usize = 1;
pub const QUDIT_2: usize = 2;
pub const QUDIT_0: usize = 3;

/// Static bias field of the qudit experiment (metadata only, not simulated).
pub const QUDIT_BIAS_FIELD_GAUSS: f64 = 5.6;
/// Zeeman splitting of the qudit levels (metadata only, not simulated).
pub const QUDIT_ZEEMAN_SPLITTING_MHZ: f64 = 7.84;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chirality {
    L,
    R,
}

impl Chirality {
    pub const BOTH: [Chirality; 2] = [Chirality::L, Chirality::R];

    /// Sign of the `|1> <-> |0>` coupling: `+1` for L, `-1` for R.
    pub fn sign(self) -> i8 {
        match self {
            Chirality::L => 1,
            Chirality::R => -1,
        }
    }

    pub fn signed<T: Real>(self, x: T) -> T {
        match self {
            Chirality::L => x,
            Chirality::R => -x,
        }
    }

    /// Index of this enantiomer's `|1>` level inside the qudit.
    pub fn qudit_level(self) -> usize {
        match self {
            Chirality::L => QUDIT_1L,
            Chirality::R => QUDIT_1R,
        }
    }
}

impl fmt::Display for Chirality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chirality::L => f.write_str("L"),
            Chirality::R => f.write_str("R"),
        }
    }
}

type Waveform<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Drive parameters: static mixing angle `theta` and relative phase `phi`,
/// plus time-dependent envelope `omega`, common phase `phase` and detuning
/// `detuning` (all in units of the maximal Rabi frequency).
#[derive(Clone)]
pub struct DriveParams<T: Real> {
    pub theta: T,
    pub phi: T,
    pub omega: Waveform<T>,
    pub phase: Waveform<T>,
    pub detuning: Waveform<T>,
}

impl<T: Real> DriveParams<T> {
    pub fn new(
        theta: T,
        phi: T,
        omega: impl Fn(T) -> T + Send + Sync + 'static,
        phase: impl Fn(T) -> T + Send + Sync + 'static,
        detuning: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            theta,
            phi,
            omega: Arc::new(omega),
            phase: Arc::new(phase),
            detuning: Arc::new(detuning),
        }
    }

    pub fn constant(theta: T, phi: T, omega: T, phase: T, detuning: T) -> Self {
        Self::new(theta, phi, move |_| omega, move |_| phase, move |_| detuning)
    }
}

impl<T: Real> fmt::Debug for DriveParams<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriveParams")
            .field("theta", &self.theta.as_f64())
            .field("phi", &self.phi.as_f64())
            .finish_non_exhaustive()
    }
}

/// Three-level Hamiltonian at time `t`.
pub fn enantiomer_hamiltonian<T: Real>(c: Chirality, p: &DriveParams<T>, t: T) -> Result<Operator<T>> {
    let omega = (p.omega)(t);
    if omega < T::zero() {
        return Err(Error::InvalidArgument(format!(
            "negative Rabi envelope {} at t = {}",
            omega.as_f64(),
            t.as_f64()
        )));
    }
    let coupling = cis((p.phase)(t)) * cplx(omega);
    Ok(coupled_hamiltonian(c, p.theta, p.phi, coupling, (p.detuning)(t)))
}

/// Three-level Hamiltonian from the complex common coupling `Ω e^{iΦ}`.
///
/// Schedules interpolate this complex coupling between samples, so it is
/// the primitive the propagator works with.
pub fn coupled_hamiltonian<T: Real>(c: Chirality, theta: T, phi: T, coupling: Complex<T>, detuning: T) -> Operator<T> {
    let half = T::lit(0.5);
    let (s, co) = ((theta * half).sin(), (theta * half).cos());
    let o1 = coupling * cplx(c.signed(s) * half);
    let o2 = coupling * cis(phi) * cplx(co * half);
    let z = Complex::new(T::zero(), T::zero());
    let m = CMatrix::from_row_slice(3, 3, &[z, z, o1, z, z, o2, o1.conj(), o2.conj(), cplx(detuning)]);
    Operator::hermitian(m).expect("coupled Hamiltonian is hermitian by construction")
}

/// Dark and bright states `(|D_c>, |B_c>)` inside `span{|1>, |2>}`.
pub fn dark_bright_basis<T: Real>(c: Chirality, theta: T, phi: T) -> (StateVector<T>, StateVector<T>) {
    let half = T::lit(0.5);
    let (s, co) = ((theta * half).sin(), (theta * half).cos());
    let e = cis(phi);
    let z = Complex::new(T::zero(), T::zero());
    let (d1, b1) = match c {
        Chirality::L => (-co, s),
        Chirality::R => (co, -s),
    };
    let dark = CVector::from_column_slice(&[cplx(d1), e * cplx(s), z]);
    let bright = CVector::from_column_slice(&[cplx(b1), e * cplx(co), z]);
    (
        StateVector::new(dark).expect("unit dark state"),
        StateVector::new(bright).expect("unit bright state"),
    )
}

/// Unitary whose columns are `(|D_c>, |B_c>, |0>)`.
pub fn dark_bright_transform<T: Real>(c: Chirality, theta: T, phi: T) -> CMatrix<T> {
    let (d, b) = dark_bright_basis(c, theta, phi);
    let mut w = CMatrix::zeros(3, 3);
    w.set_column(0, d.amplitudes());
    w.set_column(1, b.amplitudes());
    w[(LEVEL_0, 2)] = Complex::new(T::one(), T::zero());
    w
}

/// Re-expresses a three-level Hamiltonian in the `(D, B, |0>)` frame.
///
/// Fails if the dark state is not decoupled, i.e. if `h` was not built
/// with the same `(c, theta, phi)`.
pub fn to_dark_bright_frame<T: Real>(h: &Operator<T>, c: Chirality, theta: T, phi: T) -> Result<Operator<T>> {
    Error::check_dim(3, h.dim())?;
    let w = dark_bright_transform(c, theta, phi);
    let m = w.adjoint() * h.matrix() * &w;
    let residual = (0..3)
        .filter(|&k| k != 0)
        .map(|k| modulus(m[(0, k)]).max(modulus(m[(k, 0)])))
        .fold(modulus(m[(0, 0)]), T::max);
    if residual > T::tol(1e-10) {
        return Err(Error::InconsistentParameters(format!(
            "dark state couples with strength {:e}",
            residual.as_f64()
        )));
    }
    // Clean rounding-level asymmetry before re-flagging.
    let sym = (&m + m.adjoint()) * cplx(T::lit(0.5));
    Operator::hermitian(sym)
}

/// Embeds a three-level operator of enantiomer `c` into the qudit.
///
/// `|1>` maps onto `|1_L>` or `|1_R>`; the other Zeeman level is left
/// with a zero row and column.
pub fn qudit_embed<T: Real>(c: Chirality, h3: &Operator<T>) -> Result<Operator<T>> {
    Error::check_dim(3, h3.dim())?;
    let map = qudit_index_map(c);
    let mut m = CMatrix::zeros(4, 4);
    for r in 0..3 {
        for k in 0..3 {
            m[(map[r], map[k])] = h3.get(r, k);
        }
    }
    if h3.is_hermitian() {
        Operator::hermitian(m)
    } else {
        Operator::general(m)
    }
}

/// Qudit index of each three-level basis state for enantiomer `c`.
pub fn qudit_index_map(c: Chirality) -> [usize; 3] {
    [c.qudit_level(), QUDIT_2, QUDIT_0]
}

/// Lifts a three-level state into the qudit.
pub fn qudit_embed_state<T: Real>(c: Chirality, psi: &StateVector<T>) -> Result<StateVector<T>> {
    Error::check_dim(3, psi.dim())?;
    let map = qudit_index_map(c);
    let mut v = CVector::zeros(4);
    for (k, &target) in map.iter().enumerate() {
        v[target] = psi.amplitude(k);
    }
    StateVector::new(v)
}

/// Projects a qudit state back onto the three levels of enantiomer `c`.
pub fn qudit_restrict_state<T: Real>(c: Chirality, psi: &StateVector<T>) -> Result<StateVector<T>> {
    Error::check_dim(4, psi.dim())?;
    let map = qudit_index_map(c);
    StateVector::normalized(CVector::from_iterator(3, map.iter().map(|&k| psi.amplitude(k))))
}

//! Dense complex linear algebra and time-ordered propagation for the small
//! (d <= 4) Hilbert spaces used throughout the crate.
//!
//! Propagation uses the piecewise-constant midpoint exponential: every step
//! applies `exp(-i H(t_{j+1/2}) dt)`, evaluated exactly through the
//! eigendecomposition of the hermitian generator. The scheme is unitary by
//! construction and second-order accurate in `dt`.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{cis, cplx, modulus, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    amplitudes: CVector<T>,
}

impl<T: Real> StateVector<T> {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amplitudes: CVector<T>) -> Result<Self> {
        check_dim_range(amplitudes.len())?;
        let norm2 = norm_sqr(&amplitudes);
        if (norm2 - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::InvalidArgument(format!(
                "state norm^2 = {} differs from 1",
                norm2.as_f64()
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: CVector<T>) -> Result<Self> {
        check_dim_range(amplitudes.len())?;
        let norm2 = norm_sqr(&amplitudes);
        if norm2 <= T::zero() || !norm2.is_finite() {
            return Err(Error::InvalidArgument("zero or non-finite state".into()));
        }
        let scale = Complex::new(T::one() / norm2.sqrt(), T::zero());
        Ok(Self {
            amplitudes: amplitudes * scale,
        })
    }

    pub fn from_slice(amplitudes: &[Complex<T>]) -> Result<Self> {
        Self::normalized(CVector::from_column_slice(amplitudes))
    }

    /// Computational basis state `index` of a `dim`-level system.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim_range(dim)?;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = CVector::zeros(dim);
        v[index] = Complex::new(T::one(), T::zero());
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize) -> Complex<T> {
        self.amplitudes[i]
    }

    pub fn population(&self, i: usize) -> T {
        self.amplitudes[i].norm_sqr()
    }

    pub fn populations(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        Error::check_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn apply(&self, op: &Operator<T>) -> Result<Self> {
        Error::check_dim(op.dim(), self.dim())?;
        Ok(Self {
            amplitudes: &op.matrix * &self.amplitudes,
        })
    }
}

fn norm_sqr<T: Real>(v: &CVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
}

fn check_dim_range(dim: usize) -> Result<()> {
    if (2..=4).contains(&dim) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "Hilbert-space dimension {dim} outside 2..=4"
        )))
    }
}

/// Dense operator with optional hermitian / unitary flags.
///
/// Flags are only set by constructors that verified the property, so a
/// flagged operator can be trusted by the propagator.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Real> {
    matrix: CMatrix<T>,
    hermitian: bool,
    unitary: bool,
}

impl<T: Real> Operator<T> {
    pub fn general(matrix: CMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument("operator must be square".into()));
        }
        Ok(Self {
            matrix,
            hermitian: false,
            unitary: false,
        })
    }

    /// Flags `matrix` as hermitian; fails when `||H - H^dag||_max > 1e-12`.
    pub fn hermitian(matrix: CMatrix<T>) -> Result<Self> {
        let op = Self::general(matrix)?;
        let dev = op.hermiticity_defect();
        if dev > T::tol(1e-12) {
            return Err(Error::ContractViolation(format!(
                "matrix is not hermitian (defect {:e})",
                dev.as_f64()
            )));
        }
        Ok(Self { hermitian: true, ..op })
    }

    /// Flags `matrix` as unitary; fails when `||U^dag U - I||_max > 1e-10`.
    pub fn unitary(matrix: CMatrix<T>) -> Result<Self> {
        let op = Self::general(matrix)?;
        let dev = op.unitarity_defect();
        if dev > T::tol(1e-10) {
            return Err(Error::ContractViolation(format!(
                "matrix is not unitary (defect {:e})",
                dev.as_f64()
            )));
        }
        Ok(Self { unitary: true, ..op })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
            hermitian: true,
            unitary: false,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
            hermitian: true,
            unitary: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.matrix[(row, col)]
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }

    /// Operator product `self * rhs`; unitarity is preserved.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        Error::check_dim(self.dim(), rhs.dim())?;
        Ok(Self {
            matrix: &self.matrix * &rhs.matrix,
            hermitian: false,
            unitary: self.unitary && rhs.unitary,
        })
    }

    /// `||H - H^dag||_max`.
    pub fn hermiticity_defect(&self) -> T {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// `||U^dag U - I||_max`.
    pub fn unitarity_defect(&self) -> T {
        let d = self.dim();
        max_abs(&(self.matrix.adjoint() * &self.matrix - CMatrix::identity(d, d)))
    }

    /// Real eigenvalues (ascending) of a hermitian-flagged operator.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        if !self.hermitian {
            return Err(Error::ContractViolation(
                "eigenvalues requested for a non-hermitian operator".into(),
            ));
        }
        let mut vals: Vec<T> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        Ok(vals)
    }
}

pub(crate) fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)))
}

/// Uniform sampling of `[0, T]` with `steps` intervals (`steps + 1` points).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T: Real> {
    duration: T,
    steps: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(duration: T, steps: usize) -> Result<Self> {
        if !(duration > T::zero()) || !duration.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid duration must be positive and finite, got {}",
                duration.as_f64()
            )));
        }
        if steps < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 steps, got {steps}"
            )));
        }
        Ok(Self { duration, steps })
    }

    pub fn duration(&self) -> T {
        self.duration
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> T {
        self.duration / T::lit(self.steps as f64)
    }

    /// `t_j = j T / n`.
    pub fn time(&self, j: usize) -> T {
        self.duration * T::lit(j as f64) / T::lit(self.steps as f64)
    }

    pub fn midpoint(&self, j: usize) -> T {
        self.duration * T::lit(j as f64 + 0.5) / T::lit(self.steps as f64)
    }

    pub fn times(&self) -> Vec<T> {
        (0..=self.steps).map(|j| self.time(j)).collect()
    }

    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.duration, self.steps * factor)
    }
}

/// `exp(-i H dt)` for a hermitian-flagged generator, via eigendecomposition.
pub fn step_unitary<T: Real>(h: &Operator<T>, dt: T) -> Result<Operator<T>> {
    if !h.is_hermitian() {
        return Err(Error::ContractViolation(
            "step_unitary requires a hermitian-flagged generator".into(),
        ));
    }
    if !(dt > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {}",
            dt.as_f64()
        )));
    }
    Ok(Operator {
        matrix: exp_hermitian(h.matrix(), -dt),
        hermitian: false,
        unitary: true,
    })
}

/// `exp(i s H)` for hermitian `H`.
pub(crate) fn exp_hermitian<T: Real>(h: &CMatrix<T>, s: T) -> CMatrix<T> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = cis(*lambda * s);
        for z in scaled.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    scaled * v.adjoint()
}

/// Trajectory and accumulated propagator of a time-ordered evolution.
#[derive(Debug, Clone)]
pub struct Propagation<T: Real> {
    pub states: Vec<StateVector<T>>,
    pub propagator: Operator<T>,
}

impl<T: Real> Propagation<T> {
    pub fn final_state(&self) -> &StateVector<T> {
        self.states.last().expect("trajectory always has grid.len() states")
    }
}

/// Gauss nodes `1/2 -+ sqrt(3)/6` of the fourth-order step.
pub(crate) fn gauss_nodes<T: Real>() -> [T; 2] {
    let r = T::lit(3.0f64.sqrt() / 6.0);
    [T::lit(0.5) - r, T::lit(0.5) + r]
}

/// One fourth-order commutator-free Magnus step
/// `exp(-i dt (a1 H1 + a2 H2)) exp(-i dt (a2 H1 + a1 H2))`, with `H1`, `H2`
/// the generator at the two Gauss nodes of `[t, t + dt]` and
/// `a1,2 = (3 -+ 2 sqrt3) / 12`.
pub fn magnus4_step<T: Real>(h1: &CMatrix<T>, h2: &CMatrix<T>, dt: T) -> CMatrix<T> {
    let s3 = T::lit(3.0f64.sqrt());
    let a1 = cplx((T::lit(3.0) - T::lit(2.0) * s3) / T::lit(12.0));
    let a2 = cplx((T::lit(3.0) + T::lit(2.0) * s3) / T::lit(12.0));
    let early = h1 * a2 + h2 * a1;
    let late = h1 * a1 + h2 * a2;
    exp_hermitian(&late, -dt) * exp_hermitian(&early, -dt)
}

/// Time-ordered propagation with the fourth-order commutator-free Magnus
/// rule.
///
/// `hamiltonian` is sampled at the two Gauss nodes of every step. Returns
/// `psi(t_j)` for all grid points together with `U(T, 0)`.
pub fn propagate<T, F>(mut hamiltonian: F, grid: &TimeGrid<T>, psi0: &StateVector<T>) -> Result<Propagation<T>>
where
    T: Real,
    F: FnMut(T) -> Result<Operator<T>>,
{
    let d = psi0.dim();
    let dt = grid.dt();
    let nodes = gauss_nodes::<T>();
    let mut states = Vec::with_capacity(grid.len());
    states.push(psi0.clone());
    let mut u = CMatrix::<T>::identity(d, d);
    let mut psi = psi0.amplitudes.clone();
    for j in 0..grid.steps() {
        let t = grid.time(j);
        let h1 = hamiltonian(t + nodes[0] * dt)?;
        let h2 = hamiltonian(t + nodes[1] * dt)?;
        for h in [&h1, &h2] {
            Error::check_dim(d, h.dim())?;
            if !h.is_hermitian() {
                return Err(Error::ContractViolation(
                    "propagate requires hermitian-flagged generators".into(),
                ));
            }
        }
        let step = magnus4_step(h1.matrix(), h2.matrix(), dt);
        psi = &step * psi;
        u = &step * u;
        let drift = (norm_sqr(&psi) - T::one()).abs();
        if drift > T::tol(1e-10) {
            return Err(Error::NumericalFailure(format!(
                "norm drift {:e} at step {j}",
                drift.as_f64()
            )));
        }
        states.push(StateVector {
            amplitudes: psi.clone(),
        });
    }
    let propagator = Operator {
        matrix: u,
        hermitian: false,
        unitary: true,
    };
    let defect = propagator.unitarity_defect();
    if defect > T::tol(1e-8) {
        return Err(Error::NumericalFailure(format!(
            "accumulated propagator lost unitarity ({:e})",
            defect.as_f64()
        )));
    }
    Ok(Propagation { states, propagator })
}

/// `|<psi|phi>|^2`.
pub fn state_fidelity<T: Real>(psi: &StateVector<T>, phi: &StateVector<T>) -> Result<T> {
    let overlap = psi.inner(phi)?;
    Ok(overlap.norm_sqr().min(T::one()))
}

/// Global-phase-insensitive gate fidelity `|Tr(U^dag V)|^2 / d^2`.
pub fn unitary_fidelity<T: Real>(u: &Operator<T>, v: &Operator<T>) -> Result<T> {
    if !u.is_unitary() || !v.is_unitary() {
        return Err(Error::ContractViolation(
            "unitary_fidelity requires unitary-flagged operators".into(),
        ));
    }
    trace_fidelity(u.matrix(), v.matrix())
}

/// `|Tr(A^dag B)|^2 / d^2` without any unitarity requirement; used for
/// restricted (possibly leaky) blocks of a propagator.
pub fn trace_fidelity<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<T> {
    Error::check_dim(a.nrows(), b.nrows())?;
    Error::check_dim(a.ncols(), b.ncols())?;
    let d = T::lit(a.nrows() as f64);
    let tr = (a.adjoint() * b).trace();
    Ok((tr.norm_sqr() / (d * d)).min(T::one()))
}

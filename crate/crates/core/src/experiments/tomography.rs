//! Gate fidelity, process tomography on `span{|1>, |2>}` and finite-shot
//! readout.

use nalgebra::{Complex, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};

use super::ExperimentParams;
use crate::chiralmodel::{Chirality, LEVEL_1, LEVEL_2};
use crate::error::{Error, Result};
use crate::holonomy::{block_fidelity, qubit_block, target_unitary};
use crate::noise::{apply_noise, NoiseSpec};
use crate::scalar::{cplx, modulus, Real};
use crate::statecore::{CMatrix, CVector, StateVector};

/// Reconstructed process of one gate.
#[derive(Debug, Clone)]
pub struct QptResult<T: Real> {
    /// Process matrix in the Pauli basis `{I, X, Y, Z}`, unit trace.
    pub chi: CMatrix<T>,
    pub ideal_chi: CMatrix<T>,
    /// `Tr(chi_ideal chi)`.
    pub fidelity: T,
    /// Eigenvalues of `chi`, ascending.
    pub eigenvalues: Vec<T>,
}

/// Block fidelity of the simulated gate against the target holonomy.
pub fn gate_fidelity<T: Real>(params: &ExperimentParams<T>, c: Chirality, noise: &NoiseSpec<T>) -> Result<T> {
    let (s, _) = apply_noise(&params.schedule()?, noise)?;
    let u = s.propagator(c)?;
    block_fidelity(&u, &target_unitary(params.theta, params.phi, params.gamma, c))
}

fn pauli<T: Real>() -> [CMatrix<T>; 4] {
    let (o, l, i) = (cplx(T::zero()), cplx(T::one()), Complex::new(T::zero(), T::one()));
    [
        CMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

/// Tomography inputs `|0>, |1>, |+>, |+i>` of the qubit.
fn qubit_inputs<T: Real>() -> [CVector<T>; 4] {
    let r = cplx(T::lit(std::f64::consts::FRAC_1_SQRT_2));
    let (o, l, i) = (cplx(T::zero()), cplx(T::one()), Complex::new(T::zero(), T::one()));
    [
        CVector::from_column_slice(&[l, o]),
        CVector::from_column_slice(&[o, l]),
        CVector::from_column_slice(&[r, r]),
        CVector::from_column_slice(&[r, i * r]),
    ]
}

/// Linear-inversion process matrix from the channel outputs on
/// `|0>, |1>, |+>, |+i>` (in that order), normalized to unit trace.
pub fn process_chi<T: Real>(outputs: &[CMatrix<T>; 4]) -> Result<CMatrix<T>> {
    for o in outputs {
        Error::check_dim(2, o.nrows())?;
        Error::check_dim(2, o.ncols())?;
    }
    let i = Complex::new(T::zero(), T::one());
    let half = cplx(T::lit(0.5));
    let diag_sum = &outputs[0] + &outputs[1];
    let one_plus_i = cplx(T::one()) + i;
    let one_minus_i = cplx(T::one()) - i;
    // images of the matrix units |a><b|
    let units = [
        [
            outputs[0].clone(),
            &outputs[2] + &outputs[3] * i - &diag_sum * (one_plus_i * half),
        ],
        [
            &outputs[2] - &outputs[3] * i - &diag_sum * (one_minus_i * half),
            outputs[1].clone(),
        ],
    ];
    let p = pauli::<T>();
    // E(|a><b|)_{rs} = sum_mn chi_mn (P_m)_{ra} conj((P_n)_{sb})
    let mut system = CMatrix::zeros(16, 16);
    let mut rhs = CVector::zeros(16);
    for a in 0..2 {
        for b in 0..2 {
            for r in 0..2 {
                for s in 0..2 {
                    let row = 8 * a + 4 * b + 2 * r + s;
                    rhs[row] = units[a][b][(r, s)];
                    for m in 0..4 {
                        for n in 0..4 {
                            system[(row, 4 * m + n)] = p[m][(r, a)] * p[n][(s, b)].conj();
                        }
                    }
                }
            }
        }
    }
    let x = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NumericalFailure("tomography system is singular".into()))?;
    let chi = CMatrix::from_fn(4, 4, |m, n| x[4 * m + n]);
    let trace = chi.trace();
    if !(modulus(trace) > T::tol(1e-12)) {
        return Err(Error::NumericalFailure("process matrix has zero trace".into()));
    }
    Ok(chi / trace)
}

/// Process matrix of the unitary `u` (2 x 2), unit trace.
pub fn unitary_chi<T: Real>(u: &CMatrix<T>) -> Result<CMatrix<T>> {
    Error::check_dim(2, u.nrows())?;
    let p = pauli::<T>();
    let coeffs = CVector::from_iterator(4, p.iter().map(|pm| (pm.adjoint() * u).trace() * cplx(T::lit(0.5))));
    let chi = &coeffs * coeffs.adjoint();
    let trace = chi.trace();
    Ok(chi / trace)
}

/// Process tomography of the simulated gate on `span{|1>, |2>}`.
pub fn qpt<T: Real>(params: &ExperimentParams<T>, c: Chirality, noise: &NoiseSpec<T>) -> Result<QptResult<T>> {
    let (s, _) = apply_noise(&params.schedule()?, noise)?;
    let inputs = qubit_inputs::<T>();
    let mut outputs: [CMatrix<T>; 4] = Default::default();
    for (out, input) in outputs.iter_mut().zip(&inputs) {
        let mut v = CVector::zeros(3);
        v[LEVEL_1] = input[0];
        v[LEVEL_2] = input[1];
        let run = s.evolve(c, &StateVector::new(v)?)?;
        let f = run.final_state();
        let kept = CVector::from_column_slice(&[f.amplitude(LEVEL_1), f.amplitude(LEVEL_2)]);
        *out = &kept * kept.adjoint();
    }
    let chi = process_chi(&outputs)?;
    let ideal_chi = unitary_chi(&qubit_block(&target_unitary(params.theta, params.phi, params.gamma, c)))?;
    finish(chi, ideal_chi)
}

fn finish<T: Real>(chi: CMatrix<T>, ideal_chi: CMatrix<T>) -> Result<QptResult<T>> {
    let sym = (&chi + chi.adjoint()) * cplx(T::lit(0.5));
    let mut eigenvalues: Vec<T> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    if eigenvalues[0] < -T::lit(1e-8) {
        return Err(Error::NumericalFailure(format!(
            "process matrix has negative eigenvalue {:e}",
            eigenvalues[0].as_f64()
        )));
    }
    let fidelity = (&ideal_chi * &chi).trace().re;
    Ok(QptResult {
        chi,
        ideal_chi,
        fidelity,
        eigenvalues,
    })
}

/// Multinomial readout of `n_shots` from `populations` by sequential
/// binomial draws on a ChaCha20 stream.
pub fn shot_sampling(populations: &[f64], n_shots: u64, seed: u64) -> Result<Vec<u64>> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    if populations.is_empty() || populations.iter().any(|p| !p.is_finite() || *p < -1e-12) {
        return Err(Error::InvalidArgument(
            "populations must be finite and non-negative".into(),
        ));
    }
    let total: f64 = populations.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("populations sum to {total}, not 1")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut counts = Vec::with_capacity(populations.len());
    let (mut shots_left, mut mass_left) = (n_shots, 1.0f64);
    for (k, &p) in populations.iter().enumerate() {
        if k + 1 == populations.len() {
            counts.push(shots_left);
            break;
        }
        let q = if mass_left > 0.0 {
            (p.max(0.0) / mass_left).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let n = Binomial::new(shots_left, q)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .sample(&mut rng);
        counts.push(n);
        shots_left -= n;
        mass_left -= p.max(0.0);
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulsegen::Scheme;
    use crate::statecore::max_abs;
    use proptest::prelude::*;

    fn apply_channel(chi: &CMatrix<f64>, rho: &CMatrix<f64>) -> CMatrix<f64> {
        let p = pauli::<f64>();
        let mut out = CMatrix::zeros(2, 2);
        for m in 0..4 {
            for n in 0..4 {
                out += &p[m] * rho * p[n].adjoint() * chi[(m, n)];
            }
        }
        out
    }

    #[test]
    fn identity_channel_is_reconstructed() {
        let outputs = qubit_inputs::<f64>().map(|v| &v * v.adjoint());
        let chi = process_chi(&outputs).unwrap();
        let ideal = unitary_chi(&CMatrix::identity(2, 2)).unwrap();
        let result = finish(chi, ideal).unwrap();
        assert!((result.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_reproduces_channel_outputs() {
        // amplitude damping, a non-unitary channel with a known action
        let g: f64 = 0.3;
        let k0 = CMatrix::from_row_slice(2, 2, &[cplx(1.0), cplx(0.0), cplx(0.0), cplx((1.0 - g).sqrt())]);
        let k1 = CMatrix::from_row_slice(2, 2, &[cplx(0.0), cplx(g.sqrt()), cplx(0.0), cplx(0.0)]);
        let channel = |rho: &CMatrix<f64>| &k0 * rho * k0.adjoint() + &k1 * rho * k1.adjoint();
        let outputs = qubit_inputs::<f64>().map(|v| channel(&(&v * v.adjoint())));
        let chi = process_chi(&outputs).unwrap();
        assert!((chi.trace().re - 1.0).abs() < 1e-12);
        let psi = CVector::from_column_slice(&[Complex::new(0.3, 0.4), Complex::new(-0.5, 0.6)]);
        let psi = &psi / Complex::new(psi.norm(), 0.0);
        let rho = &psi * psi.adjoint();
        assert!(max_abs(&(apply_channel(&chi, &rho) - channel(&rho))) < 1e-12);
    }

    #[test]
    fn ideal_gates_have_unit_process_fidelity() {
        for scheme in Scheme::ALL {
            let params = ExperimentParams::<f64> {
                steps: 600,
                ..ExperimentParams::new(scheme)
            };
            for c in Chirality::BOTH {
                let r = qpt(&params, c, &NoiseSpec::none()).unwrap();
                assert!(r.fidelity >= 0.9999, "{scheme} {c}: {}", r.fidelity);
                assert!((r.chi.trace().re - 1.0).abs() < 1e-10);
                assert!(max_abs(&(&r.chi - r.chi.adjoint())) < 1e-8);
                assert!(r.eigenvalues[0] >= -1e-8);
            }
        }
    }

    #[test]
    fn noisy_tomography_keeps_unit_trace() {
        let params = ExperimentParams::<f64> {
            steps: 400,
            ..ExperimentParams::new(Scheme::NhqcPlus)
        };
        for seed in [1, 2, 3] {
            let noise = NoiseSpec::stochastic(0.5, 0.5, seed).with_delta(0.1);
            let r = qpt(&params, Chirality::L, &noise).unwrap();
            assert!((r.chi.trace().re - 1.0).abs() < 1e-10);
            assert!(r.fidelity < 1.0);
        }
    }

    #[test]
    fn gate_fidelity_drops_under_offset() {
        let params = ExperimentParams::<f64> {
            steps: 600,
            ..ExperimentParams::new(Scheme::Nhqc)
        };
        let ideal = gate_fidelity(&params, Chirality::L, &NoiseSpec::none()).unwrap();
        let off = gate_fidelity(&params, Chirality::L, &NoiseSpec::offset(0.2)).unwrap();
        assert!(ideal >= 1.0 - 1e-6);
        assert!(off < 1.0);
    }

    #[test]
    fn shots_examples() {
        assert_eq!(shot_sampling(&[1.0, 0.0, 0.0], 17, 3).unwrap(), vec![17, 0, 0]);
        let n = 1_000_000u64;
        let counts = shot_sampling(&[0.5, 0.5, 0.0], n, 11).unwrap();
        let five_sigma = 5.0 * (n as f64 / 4.0).sqrt();
        for k in &counts[..2] {
            assert!((*k as f64 - n as f64 / 2.0).abs() < five_sigma);
        }
        assert_eq!(counts[2], 0);
        assert_eq!(
            shot_sampling(&[0.2, 0.3, 0.5], 1000, 9).unwrap(),
            shot_sampling(&[0.2, 0.3, 0.5], 1000, 9).unwrap()
        );
    }

    #[test]
    fn shots_reject_bad_distributions() {
        assert!(shot_sampling(&[0.5, 0.6], 10, 0).is_err());
        assert!(shot_sampling(&[1.0], 0, 0).is_err());
        assert!(shot_sampling(&[-0.1, 1.1], 10, 0).is_err());
    }

    proptest! {
        #[test]
        fn shot_counts_sum_to_n(a in 0.0f64..1.0, b in 0.0f64..1.0, n in 1u64..10_000, seed in any::<u64>()) {
            let total = a + b + 1e-3;
            let pops = [a / total, b / total, 1e-3 / total];
            let counts = shot_sampling(&pops, n, seed).unwrap();
            prop_assert_eq!(counts.iter().sum::<u64>(), n);
        }
    }
}

//! Seeded control-noise channels acting on pulse envelopes.
//!
//! The noisy envelope is `Omega'(t_j) = Omega(t_j) (1 + delta) (1 + alpha g_j + beta u_j)`
//! with `g_j ~ N(0, 0.2^2)` and `u_j ~ U(-0.2, 0.2)`. Negative factors are
//! clipped to zero and counted.
//!
//! Randomness comes from ChaCha20 (`rand_chacha`). Every trial owns a
//! seed derived from `(master seed, point index, trial index)` by selecting
//! ChaCha20 stream `point << 32 | trial` of the master key and taking its
//! first word, so trials can run in any order or in parallel. Both
//! variates are drawn at every sample regardless of the weights, so one
//! trial seed gives the same `(g_j, u_j)` sequence on every grid point of
//! a weight sweep.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulsegen::PulseSchedule;
use crate::scalar::Real;

/// Name of the generator recorded in run manifests.
pub const PRNG_ALGORITHM: &str = "ChaCha20";
/// Standard deviation of the Gaussian channel.
pub const GAUSSIAN_SIGMA: f64 = 0.2;
/// Half-width of the uniform channel.
pub const UNIFORM_HALF_WIDTH: f64 = 0.2;

/// Offset and stochastic noise of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec<T: Real> {
    /// Signed systematic amplitude offset.
    pub delta: T,
    /// Weight of the Gaussian channel.
    pub alpha: T,
    /// Weight of the uniform channel.
    pub beta: T,
    /// Trial seed feeding the stochastic channels.
    pub seed: u64,
    /// Draw independently at every grid point (otherwise one draw per run).
    pub per_sample: bool,
}

impl<T: Real> Default for NoiseSpec<T> {
    fn default() -> Self {
        Self::none()
    }
}

impl<T: Real> NoiseSpec<T> {
    pub fn none() -> Self {
        Self {
            delta: T::zero(),
            alpha: T::zero(),
            beta: T::zero(),
            seed: 0,
            per_sample: true,
        }
    }

    pub fn offset(delta: T) -> Self {
        Self { delta, ..Self::none() }
    }

    pub fn stochastic(alpha: T, beta: T, seed: u64) -> Self {
        Self {
            alpha,
            beta,
            seed,
            ..Self::none()
        }
    }

    pub fn with_delta(self, delta: T) -> Self {
        Self { delta, ..self }
    }

    pub fn is_stochastic(&self) -> bool {
        self.alpha != T::zero() || self.beta != T::zero()
    }

    pub fn descriptor(&self) -> NoiseDescriptor {
        NoiseDescriptor {
            delta: self.delta.as_f64(),
            alpha: self.alpha.as_f64(),
            beta: self.beta.as_f64(),
            seed: self.seed,
            per_sample: self.per_sample,
        }
    }
}

/// Precision-independent record of a [`NoiseSpec`], attached to results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseDescriptor {
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    pub per_sample: bool,
}

/// Envelope factors of one stochastic draw.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization<T: Real> {
    pub factors: Vec<T>,
    pub clipped: usize,
}

/// Seed of trial `trial` at sweep point `point`.
pub fn trial_seed(master: u64, point: u32, trial: u32) -> u64 {
    let mut rng = ChaCha20Rng::seed_from_u64(master);
    rng.set_stream((u64::from(point) << 32) | u64::from(trial));
    rng.next_u64()
}

/// `Omega' = (1 + delta) Omega`; `delta = 0` returns the schedule unchanged.
pub fn apply_offset<T: Real>(s: &PulseSchedule<T>, delta: T) -> Result<PulseSchedule<T>> {
    if !(T::one() + delta > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "offset {} would make the envelope non-positive",
            delta.as_f64()
        )));
    }
    if delta == T::zero() {
        return Ok(s.clone());
    }
    s.scale_envelope(&vec![T::one() + delta; s.grid().len()])
}

/// Draws the factors `1 + alpha g_j + beta u_j` for `len` samples.
pub fn stochastic_factors<T: Real>(spec: &NoiseSpec<T>, len: usize) -> NoiseRealization<T> {
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let gauss = Normal::new(0.0, GAUSSIAN_SIGMA).expect("positive sigma");
    let flat = Uniform::new_inclusive(-UNIFORM_HALF_WIDTH, UNIFORM_HALF_WIDTH).expect("ordered bounds");
    let (alpha, beta) = (spec.alpha.as_f64(), spec.beta.as_f64());
    let draw = |rng: &mut ChaCha20Rng| {
        let g: f64 = gauss.sample(rng);
        let u: f64 = rng.sample(flat);
        1.0 + alpha * g + beta * u
    };
    let raw: Vec<f64> = if spec.per_sample {
        (0..len).map(|_| draw(&mut rng)).collect()
    } else {
        vec![draw(&mut rng); len]
    };
    let clipped = raw.iter().filter(|f| **f < 0.0).count();
    NoiseRealization {
        factors: raw.into_iter().map(|f| T::lit(f.max(0.0))).collect(),
        clipped,
    }
}

/// Applies the stochastic channels of `spec` (ignoring its offset).
pub fn apply_stochastic<T: Real>(s: &PulseSchedule<T>, spec: &NoiseSpec<T>) -> Result<(PulseSchedule<T>, usize)> {
    if !spec.is_stochastic() {
        return Ok((s.clone(), 0));
    }
    let draw = stochastic_factors(spec, s.grid().len());
    Ok((s.scale_envelope(&draw.factors)?, draw.clipped))
}

/// Offset followed by the stochastic channels.
pub fn apply_noise<T: Real>(s: &PulseSchedule<T>, spec: &NoiseSpec<T>) -> Result<(PulseSchedule<T>, usize)> {
    apply_stochastic(&apply_offset(s, spec.delta)?, spec)
}

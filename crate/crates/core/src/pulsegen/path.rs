use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

type PathFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Cyclic path `(k(t), beta(t))` of the moving basis vector
/// `|zeta_1(t)> = sin(k/2)|B> + cos(k/2) e^{-i beta}|0>`.
///
/// The path starts and ends on the bright state: `k(0) = k(T) = pi`.
/// Derivatives are carried alongside the path; constructors without
/// analytic derivatives fall back to central differences.
#[derive(Clone)]
pub struct LoopPath<T: Real> {
    duration: T,
    k: PathFn<T>,
    beta: PathFn<T>,
    k_dot: PathFn<T>,
    beta_dot: PathFn<T>,
}

impl<T: Real> fmt::Debug for LoopPath<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LoopPath")
            .field("duration", &self.duration.as_f64())
            .field("k(0)", &(self.k)(T::zero()).as_f64())
            .field("beta(0)", &(self.beta)(T::zero()).as_f64())
            .finish_non_exhaustive()
    }
}

impl<T: Real> LoopPath<T> {
    /// Path with analytic derivatives; checks the cyclic boundary condition.
    pub fn with_derivatives(
        duration: T,
        k: impl Fn(T) -> T + Send + Sync + 'static,
        beta: impl Fn(T) -> T + Send + Sync + 'static,
        k_dot: impl Fn(T) -> T + Send + Sync + 'static,
        beta_dot: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        let path = Self {
            duration,
            k: Arc::new(k),
            beta: Arc::new(beta),
            k_dot: Arc::new(k_dot),
            beta_dot: Arc::new(beta_dot),
        };
        path.check_boundary()?;
        Ok(path)
    }

    /// Path whose derivatives are taken by central differences.
    pub fn new(
        duration: T,
        k: impl Fn(T) -> T + Send + Sync + 'static,
        beta: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        let k: PathFn<T> = Arc::new(k);
        let beta: PathFn<T> = Arc::new(beta);
        let h = duration * T::lit(1e-6);
        let (kk, bb) = (k.clone(), beta.clone());
        let path = Self {
            duration,
            k_dot: Arc::new(move |t| central_difference(&*kk, t, h)),
            beta_dot: Arc::new(move |t| central_difference(&*bb, t, h)),
            k,
            beta,
        };
        path.check_boundary()?;
        Ok(path)
    }

    /// Path for loops that need not start on the bright state (e.g. loops
    /// around a pole used to test the geometric-phase routine).
    pub fn unconstrained(
        duration: T,
        k: impl Fn(T) -> T + Send + Sync + 'static,
        beta: impl Fn(T) -> T + Send + Sync + 'static,
        k_dot: impl Fn(T) -> T + Send + Sync + 'static,
        beta_dot: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            duration,
            k: Arc::new(k),
            beta: Arc::new(beta),
            k_dot: Arc::new(k_dot),
            beta_dot: Arc::new(beta_dot),
        }
    }

    fn check_boundary(&self) -> Result<()> {
        if !(self.duration > T::zero()) {
            return Err(Error::InvalidArgument("loop duration must be positive".into()));
        }
        let tol = T::tol(1e-12);
        let (k0, k1) = (self.k(T::zero()), self.k(self.duration));
        if (k0 - T::pi()).abs() > tol || (k1 - T::pi()).abs() > tol {
            return Err(Error::ContractViolation(format!(
                "loop must satisfy k(0) = k(T) = pi, got {} and {}",
                k0.as_f64(),
                k1.as_f64()
            )));
        }
        Ok(())
    }

    /// Default NHQC+ loop: `k(t) = pi - A sin^2(pi t/T)` and
    /// `beta(t) = b t + w sin^2(2 pi t/T)`.
    ///
    /// `b` is fixed so that the geometric phase `int cos^2(k/2) beta' dt`
    /// equals `gamma`. The `w` ripple has a derivative that is odd about
    /// `T/2` while `cos^2(k/2)` is even, so it moves the instantaneous
    /// dynamical phase without changing its integral.
    pub fn nhqcplus_default(duration: T, gamma: T, arc: T, ripple: T) -> Result<Self> {
        if !(arc > T::zero() && arc < T::pi()) {
            return Err(Error::InvalidArgument(format!(
                "loop arc must lie in (0, pi), got {}",
                arc.as_f64()
            )));
        }
        let slope = gamma / bright_weight_integral(duration, arc);
        let pi = T::pi();
        let two = T::lit(2.0);
        let w = pi / duration;
        Self::with_derivatives(
            duration,
            move |t| pi - arc * (w * t).sin().powi(2),
            move |t| slope * t + ripple * (two * w * t).sin().powi(2),
            move |t| -arc * w * (two * w * t).sin(),
            move |t| slope + ripple * two * w * (T::lit(4.0) * w * t).sin(),
        )
    }

    /// Two-segment "orange slice" loop traced by the NHQC schedule with
    /// sine-squared envelopes: `k` runs `pi -> 0` on `[0, T/2]` and back on
    /// `[T/2, T]`; `beta` jumps by `gamma` where the loop touches `|0>`.
    pub fn orange_slice(duration: T, gamma: T, base_phase: T) -> Result<Self> {
        let half = duration * T::lit(0.5);
        let pi = T::pi();
        let two_pi = T::two_pi();
        let area = move |t: T| {
            let u = t / half;
            pi * (u - (two_pi * u).sin() / two_pi)
        };
        let rate = move |t: T| two_pi / half * (pi * t / half).sin().powi(2);
        let beta1 = base_phase + T::frac_pi_2();
        let beta2 = base_phase + gamma + T::frac_pi_2();
        Self::with_derivatives(
            duration,
            move |t| if t <= half { pi - area(t) } else { area(t - half) },
            move |t| if t < half { beta1 } else { beta2 },
            move |t| if t <= half { -rate(t) } else { rate(t - half) },
            |_| T::zero(),
        )
    }

    pub fn duration(&self) -> T {
        self.duration
    }

    pub fn k(&self, t: T) -> T {
        (self.k)(t)
    }

    pub fn beta(&self, t: T) -> T {
        (self.beta)(t)
    }

    pub fn k_dot(&self, t: T) -> T {
        (self.k_dot)(t)
    }

    pub fn beta_dot(&self, t: T) -> T {
        (self.beta_dot)(t)
    }

    /// `cos^2(k(t)/2)`, the `|0>` weight of the moving basis vector.
    pub fn excited_weight(&self, t: T) -> T {
        (self.k(t) * T::lit(0.5)).cos().powi(2)
    }

    /// Geometric phase `int cos^2(k/2) beta' dt` by quadrature of the
    /// analytic connection; valid for paths with continuous `beta`.
    pub fn connection_integral(&self, samples: usize) -> T {
        trapezoid(self.duration, samples, |t| self.excited_weight(t) * self.beta_dot(t))
    }
}

fn central_difference<T: Real>(f: &dyn Fn(T) -> T, t: T, h: T) -> T {
    (f(t + h) - f(t - h)) / (h + h)
}

/// `int_0^T cos^2(k/2) dt` for `k = pi - A sin^2(pi t / T)`.
pub(crate) fn bright_weight_integral<T: Real>(duration: T, arc: T) -> T {
    let w = T::pi() / duration;
    let half = T::lit(0.5);
    trapezoid(duration, 20_000, |t| (half * arc * (w * t).sin().powi(2)).sin().powi(2))
}

/// Composite trapezoid rule on `[0, T]` with `n` intervals.
pub(crate) fn trapezoid<T: Real>(duration: T, n: usize, f: impl Fn(T) -> T) -> T {
    let h = duration / T::lit(n as f64);
    let half = T::lit(0.5);
    let mut sum = (f(T::zero()) + f(duration)) * half;
    for j in 1..n {
        sum += f(h * T::lit(j as f64));
    }
    sum * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn boundary_condition_enforced() {
        assert!(LoopPath::new(1.0, |_| PI, |_| 0.0).is_ok());
        assert!(matches!(
            LoopPath::new(1.0, |t: f64| PI - t, |_| 0.0),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn default_path_is_cyclic_and_carries_gamma() {
        let path = LoopPath::nhqcplus_default(10.0, PI, 2.0, 0.4).unwrap();
        assert!((path.k(0.0) - PI).abs() < 1e-12);
        assert!((path.k(10.0) - PI).abs() < 1e-12);
        assert!((path.connection_integral(20_000) - PI).abs() < 1e-9);
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let path = LoopPath::<f64>::nhqcplus_default(7.0, 1.2, 1.5, 0.3).unwrap();
        let k = path.clone();
        let numeric = LoopPath::new(7.0, move |t| k.k(t), {
            let p = path.clone();
            move |t| p.beta(t)
        })
        .unwrap();
        for t in [0.3, 1.7, 3.5, 6.2] {
            assert!((path.k_dot(t) - numeric.k_dot(t)).abs() < 1e-7);
            assert!((path.beta_dot(t) - numeric.beta_dot(t)).abs() < 1e-7);
        }
    }

    #[test]
    fn orange_slice_touches_excited_state_at_half_time() {
        let path = LoopPath::orange_slice(8.0, PI / 2.0, 0.0).unwrap();
        assert!(path.k(4.0).abs() < 1e-12);
        assert!((path.beta(4.5) - path.beta(3.5) - PI / 2.0).abs() < 1e-15);
        assert!((path.k(2.0) - PI / 2.0).abs() < 1e-12);
    }
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::discrimination::discriminate_schedule;
use super::output::{format_row, SWEEP_CSV_HEADER};
use super::{contrast, DetectLevel, ExperimentParams};
use crate::chiralmodel::Chirality;
use crate::error::{Error, Result};
use crate::noise::{apply_noise, trial_seed, NoiseSpec};
use crate::pulsegen::Scheme;
use crate::scalar::Real;

/// Repetitions per sweep point.
pub const DEFAULT_TRIALS: usize = 20;

/// Stochastic weights `(alpha, beta)` applied on top of every offset-sweep
/// trial, so that the repetitions differ.
pub const DEFAULT_OFFSET_NOISE: (f64, f64) = (0.1, 0.1);

/// `-0.20, -0.16, ..., +0.20`.
pub fn default_delta_grid() -> Vec<f64> {
    (-5..=5).map(|i| f64::from(i) / 25.0).collect()
}

/// Gaussian weights `0, 0.2, ..., 1.0`.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=5).map(|i| f64::from(i) / 5.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Offset,
    Random,
}

/// Noise parameters of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint<T: Real> {
    pub delta: T,
    pub alpha: T,
    pub beta: T,
}

/// One trial at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T: Real> {
    pub point: usize,
    pub trial: usize,
    pub xi: T,
    pub left: [T; 3],
    pub right: [T; 3],
    /// Trial seed of the stochastic channels.
    pub seed: u64,
    pub clipped: usize,
}

/// Mean and standard error of `xi` at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSummary<T: Real> {
    pub point: SweepPoint<T>,
    pub mean: T,
    pub std_err: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T: Real> {
    pub scheme: Scheme,
    pub kind: SweepKind,
    pub points: Vec<SweepPoint<T>>,
    pub trials: usize,
    pub master_seed: u64,
    /// Point-major, trial-minor.
    pub rows: Vec<SweepRow<T>>,
}

impl<T: Real> SweepResult<T> {
    pub fn summary(&self) -> Vec<PointSummary<T>> {
        self.points
            .iter()
            .enumerate()
            .map(|(p, point)| {
                let xs: Vec<T> = self.rows.iter().filter(|r| r.point == p).map(|r| r.xi).collect();
                let n = T::lit(xs.len() as f64);
                let mean = xs.iter().fold(T::zero(), |a, b| a + *b) / n;
                let std_err = if xs.len() > 1 {
                    let var = xs.iter().fold(T::zero(), |a, x| a + (*x - mean).powi(2)) / (n - T::one());
                    (var / n).sqrt()
                } else {
                    T::zero()
                };
                PointSummary {
                    point: *point,
                    mean,
                    std_err,
                }
            })
            .collect()
    }

    /// Rows in the published sweep schema.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 300);
        out.push_str(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let p = &self.points[r.point];
            let reals = [p.delta, p.alpha, p.beta];
            let pops = [
                r.xi, r.left[0], r.left[1], r.left[2], r.right[0], r.right[1], r.right[2],
            ];
            out.push_str(&format_row(self.scheme.name(), &reals, r.trial, &pops, r.seed));
            out.push('\n');
        }
        out
    }
}

fn run_sweep<T: Real>(
    params: &ExperimentParams<T>,
    kind: SweepKind,
    points: Vec<SweepPoint<T>>,
    trials: usize,
    master_seed: u64,
    detect: DetectLevel,
) -> Result<SweepResult<T>> {
    if trials == 0 || points.is_empty() {
        return Err(Error::InvalidArgument(
            "sweep needs at least one point and one trial".into(),
        ));
    }
    if points.len() > u32::MAX as usize || trials > u32::MAX as usize {
        return Err(Error::InvalidArgument("sweep too large for the seed derivation".into()));
    }
    let base = params.schedule()?;
    let rows = (0..points.len() * trials)
        .into_par_iter()
        .map(|idx| {
            let (p, trial) = (idx / trials, idx % trials);
            let point = points[p];
            let seed = trial_seed(master_seed, p as u32, trial as u32);
            let spec = NoiseSpec {
                delta: point.delta,
                alpha: point.alpha,
                beta: point.beta,
                seed,
                per_sample: true,
            };
            // one realization drives both enantiomers
            let (s, clipped) = apply_noise(&base, &spec)?;
            let d = spec.descriptor();
            let l = discriminate_schedule(&s, Chirality::L, params.phi0, d, clipped)?;
            let r = discriminate_schedule(&s, Chirality::R, params.phi0, d, clipped)?;
            Ok(SweepRow {
                point: p,
                trial,
                xi: contrast(&l, &r, detect)?,
                left: l.populations,
                right: r.populations,
                seed,
                clipped,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        scheme: params.scheme,
        kind,
        points,
        trials,
        master_seed,
        rows,
    })
}

/// Systematic-offset sweep with optional stochastic noise `(alpha, beta)`
/// on top of every trial.
pub fn offset_sweep<T: Real>(
    params: &ExperimentParams<T>,
    deltas: &[T],
    trials: usize,
    alpha: T,
    beta: T,
    master_seed: u64,
    detect: DetectLevel,
) -> Result<SweepResult<T>> {
    let points = deltas.iter().map(|&delta| SweepPoint { delta, alpha, beta }).collect();
    run_sweep(params, SweepKind::Offset, points, trials, master_seed, detect)
}

/// Stochastic-noise sweep over `(alpha, beta)` weights at zero offset.
pub fn random_noise_sweep<T: Real>(
    params: &ExperimentParams<T>,
    weights: &[(T, T)],
    trials: usize,
    master_seed: u64,
    detect: DetectLevel,
) -> Result<SweepResult<T>> {
    let points = weights
        .iter()
        .map(|&(alpha, beta)| SweepPoint {
            delta: T::zero(),
            alpha,
            beta,
        })
        .collect();
    run_sweep(params, SweepKind::Random, points, trials, master_seed, detect)
}

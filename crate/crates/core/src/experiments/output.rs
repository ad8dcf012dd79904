//! CSV schemas and the JSON run manifest.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DetectLevel, ExperimentParams, TracePoint};
use crate::noise::PRNG_ALGORITHM;
use crate::pulsegen::{format_real, NHQCPLUS_DEFAULT_ARC, NHQCPLUS_DEFAULT_RIPPLE, STA_DEFAULT_ARC};
use crate::scalar::Real;

pub const SWEEP_CSV_HEADER: &str = "scheme,delta,alpha,beta,trial,xi,p1_L,p2_L,p0_L,p1_R,p2_R,p0_R,seed";
pub const TRACE_CSV_HEADER: &str = "t,p1,p2,p0,ptotal";
/// State amplitudes along a trace, for trajectory plots.
pub const AMPLITUDE_CSV_HEADER: &str = "t,re1,im1,re2,im2,re0,im0";

pub(crate) fn format_row<T: Real>(scheme: &str, point: &[T; 3], trial: usize, values: &[T; 7], seed: u64) -> String {
    let mut fields = Vec::with_capacity(13);
    fields.push(scheme.to_string());
    fields.extend(point.iter().map(|x| format_real(x.as_f64())));
    fields.push(trial.to_string());
    fields.extend(values.iter().map(|x| format_real(x.as_f64())));
    fields.push(seed.to_string());
    fields.join(",")
}

pub fn trace_csv<T: Real>(trace: &[TracePoint<T>]) -> String {
    let mut out = String::from(TRACE_CSV_HEADER);
    out.push('\n');
    for p in trace {
        let row = [p.t, p.p1, p.p2, p.p0, p.ptotal].map(|x| format_real(x.as_f64()));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn amplitude_trace_csv<T: Real>(trace: &[TracePoint<T>]) -> String {
    let mut out = String::from(AMPLITUDE_CSV_HEADER);
    out.push('\n');
    for p in trace {
        let mut row = vec![format_real(p.t.as_f64())];
        for a in &p.amplitudes {
            row.push(format_real(a.re.as_f64()));
            row.push(format_real(a.im.as_f64()));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Everything needed to reproduce the files of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    pub schemes: Vec<String>,
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
    pub phi0: f64,
    pub duration: f64,
    pub steps: usize,
    pub integrator: String,
    pub prng: String,
    pub seed: u64,
    pub detect: DetectLevel,
    /// Fixed shape constants of the generated schedules.
    pub schedule_constants: BTreeMap<String, f64>,
    #[serde(default)]
    pub grids: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub settings: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, params: &ExperimentParams<f64>, seed: u64, detect: DetectLevel) -> Self {
        let schedule_constants = BTreeMap::from([
            ("nhqcplus_arc".to_string(), NHQCPLUS_DEFAULT_ARC),
            ("nhqcplus_ripple".to_string(), NHQCPLUS_DEFAULT_RIPPLE),
            ("sta_arc".to_string(), STA_DEFAULT_ARC),
        ]);
        Self {
            version: crate::VERSION.to_string(),
            command: command.to_string(),
            schemes: vec![params.scheme.name().to_string()],
            theta: params.theta,
            phi: params.phi,
            gamma: params.gamma,
            phi0: params.phi0,
            duration: params.duration,
            steps: params.steps,
            integrator: "commutator-free Magnus, 4th order".to_string(),
            prng: PRNG_ALGORITHM.to_string(),
            seed,
            detect,
            schedule_constants,
            grids: BTreeMap::new(),
            settings: BTreeMap::new(),
            files: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

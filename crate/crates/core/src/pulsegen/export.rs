//! Schedule CSV (`t,omega,phi,delta`) and its JSON sidecar.

use serde::{Deserialize, Serialize};

use super::{PulseSchedule, Scheme};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::statecore::TimeGrid;

pub const SCHEDULE_CSV_HEADER: &str = "t,omega,phi,delta";

/// Everything about a schedule that is not a sampled waveform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSidecar {
    pub scheme: Scheme,
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
    pub duration: f64,
    pub steps: usize,
    pub segment_boundaries: Vec<f64>,
}

/// Fixed-width scientific notation with 17 significant digits, enough to
/// round-trip any `f64` exactly.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

impl<T: Real> PulseSchedule<T> {
    pub fn sidecar(&self) -> ScheduleSidecar {
        ScheduleSidecar {
            scheme: self.scheme,
            theta: self.theta.as_f64(),
            phi: self.phi.as_f64(),
            gamma: self.gamma.as_f64(),
            duration: self.duration().as_f64(),
            steps: self.grid.steps(),
            segment_boundaries: self.segment_boundaries.iter().map(|x| x.as_f64()).collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.grid.len() * 96);
        out.push_str(SCHEDULE_CSV_HEADER);
        out.push('\n');
        for j in 0..self.grid.len() {
            let row =
                [self.grid.time(j), self.omega[j], self.phase[j], self.detuning[j]].map(|x| format_real(x.as_f64()));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Rebuilds a schedule from its CSV and sidecar.
    pub fn from_csv(csv: &str, sidecar: &ScheduleSidecar) -> Result<Self> {
        let mut lines = csv.lines();
        match lines.next() {
            Some(h) if h.trim() == SCHEDULE_CSV_HEADER => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header `{SCHEDULE_CSV_HEADER}`, found {other:?}"
                )))
            }
        }
        let grid = TimeGrid::new(T::lit(sidecar.duration), sidecar.steps)?;
        let mut cols: [Vec<T>; 3] = Default::default();
        let mut rows = 0;
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::Parse(format!("row {}: expected 4 fields", i + 2)));
            }
            let mut vals = [0.0f64; 4];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = f
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", i + 2)))?;
            }
            let expected_t = grid.time(rows).as_f64();
            if (vals[0] - expected_t).abs() > 1e-9 * sidecar.duration.max(1.0) {
                return Err(Error::Parse(format!(
                    "row {}: time {} off the grid (expected {expected_t})",
                    i + 2,
                    vals[0]
                )));
            }
            for (col, v) in cols.iter_mut().zip(&vals[1..]) {
                col.push(T::lit(*v));
            }
            rows += 1;
        }
        let [omega, phase, detuning] = cols;
        PulseSchedule::new(
            sidecar.scheme,
            grid,
            T::lit(sidecar.theta),
            T::lit(sidecar.phi),
            T::lit(sidecar.gamma),
            omega,
            phase,
            detuning,
            sidecar.segment_boundaries.iter().map(|&x| T::lit(x)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulsegen::{default_nhqcplus_path, nhqc_schedule, nhqcplus_schedule, sta_schedule};
    use std::f64::consts::PI;

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let grid = TimeGrid::new(4.0 * PI, 200).unwrap();
        let path = default_nhqcplus_path(PI, 4.0 * PI).unwrap();
        let schedules = [
            nhqc_schedule(3.0 * PI / 4.0, 0.3, PI, grid).unwrap(),
            nhqcplus_schedule(3.0 * PI / 4.0, 0.3, PI, &path, grid).unwrap(),
            sta_schedule(3.0 * PI / 4.0, 0.3, PI, grid).unwrap(),
        ];
        for s in schedules {
            let csv = s.to_csv();
            let sidecar: ScheduleSidecar = serde_json::from_str(&serde_json::to_string(&s.sidecar()).unwrap()).unwrap();
            let parsed = PulseSchedule::<f64>::from_csv(&csv, &sidecar).unwrap();
            assert_eq!(parsed, s);
            assert_eq!(parsed.to_csv(), csv);
        }
    }

    #[test]
    fn rejects_wrong_header() {
        let grid = TimeGrid::new(1.0, 4).unwrap();
        let s = nhqc_schedule(1.0, 0.0, 0.0, grid).unwrap();
        let csv = s.to_csv().replacen("t,omega", "time,omega", 1);
        assert!(matches!(
            PulseSchedule::<f64>::from_csv(&csv, &s.sidecar()),
            Err(Error::Parse(_))
        ));
    }
}

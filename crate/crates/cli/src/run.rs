use std::fs;
use std::path::Path;

use holochiral::experiments::{
    amplitude_trace_csv, contrast, gate_fidelity, noisy_population_trace, offset_sweep, qpt, random_noise_sweep,
    run_discrimination, trace_csv, RunManifest, SWEEP_CSV_HEADER,
};
use holochiral::noise::apply_noise;
use holochiral::pulsegen::format_real;
use holochiral::{Chirality, Scheme};
use serde_json::json;

use crate::config::{Command, RunConfig};
use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Files written (relative to the output directory) and summary lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub files: Vec<String>,
    pub summary: Vec<String>,
}

struct Sink<'a> {
    dir: &'a Path,
    report: Report,
}

impl Sink<'_> {
    fn write(&mut self, name: String, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(&name);
        fs::write(&path, contents).map_err(|source| CliError::Io { path, source })?;
        self.report.files.push(name);
        Ok(())
    }

    fn say(&mut self, line: String) {
        self.report.summary.push(line);
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

/// Runs `cfg`, writing every artifact plus `manifest.json` into `cfg.out`.
pub fn execute(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out).map_err(|source| CliError::Io {
        path: cfg.out.clone(),
        source,
    })?;
    let mut sink = Sink {
        dir: &cfg.out,
        report: Report::default(),
    };
    let noise = cfg.noise();
    match cfg.command {
        Command::EmitPulses => {
            for &scheme in &cfg.schemes {
                let (s, clipped) = apply_noise(&cfg.params(scheme).schedule()?, &noise)?;
                let stem = format!("pulses_{}", scheme.slug());
                sink.write(format!("{stem}.csv"), &s.to_csv())?;
                let sidecar = serde_json::to_value(s.sidecar()).expect("sidecar serializes");
                sink.write(format!("{stem}.json"), &pretty(&sidecar))?;
                sink.say(format!("{scheme}: {} samples, {clipped} clipped", s.grid().len()));
            }
        }
        Command::Discriminate => {
            let mut csv = format!("{SWEEP_CSV_HEADER}\n");
            for &scheme in &cfg.schemes {
                let p = cfg.params(scheme);
                let l = run_discrimination(&p, Chirality::L, &noise)?;
                let r = run_discrimination(&p, Chirality::R, &noise)?;
                let xi = contrast(&l, &r, cfg.detect)?;
                let mut row = vec![scheme.name().to_string()];
                row.extend([cfg.delta, cfg.alpha, cfg.beta].map(format_real));
                row.push("0".into());
                row.extend(
                    std::iter::once(xi)
                        .chain(l.populations)
                        .chain(r.populations)
                        .map(format_real),
                );
                row.push(cfg.seed.to_string());
                csv.push_str(&row.join(","));
                csv.push('\n');
                sink.say(format!(
                    "{scheme}: xi = {xi:.9} (P1_L = {:.9}, P2_R = {:.9})",
                    l.p1(),
                    r.p2()
                ));
            }
            sink.write("discrimination.csv".into(), &csv)?;
        }
        Command::Trace => {
            for &scheme in &cfg.schemes {
                for c in Chirality::BOTH {
                    let trace = noisy_population_trace(&cfg.params(scheme), c, &noise)?;
                    let stem = format!("{}_{c}", scheme.slug());
                    sink.write(format!("trace_{stem}.csv"), &trace_csv(&trace))?;
                    sink.write(format!("amplitudes_{stem}.csv"), &amplitude_trace_csv(&trace))?;
                    let dip = trace.iter().map(|p| p.ptotal).fold(f64::INFINITY, f64::min);
                    sink.say(format!("{scheme} {c}: min P_total = {dip:.6}"));
                }
            }
        }
        Command::SweepOffset | Command::SweepRandom => {
            for &scheme in &cfg.schemes {
                let p = cfg.params(scheme);
                let (result, kind) = if cfg.command == Command::SweepOffset {
                    let r = offset_sweep(&p, &cfg.deltas, cfg.trials, cfg.alpha, cfg.beta, cfg.seed, cfg.detect)?;
                    (r, "offset")
                } else {
                    (
                        random_noise_sweep(&p, &cfg.weights, cfg.trials, cfg.seed, cfg.detect)?,
                        "random",
                    )
                };
                sink.write(format!("sweep_{kind}_{}.csv", scheme.slug()), &result.to_csv())?;
                let means: Vec<String> = result.summary().iter().map(|s| format!("{:.4}", s.mean)).collect();
                sink.say(format!("{scheme}: mean xi per point [{}]", means.join(", ")));
            }
        }
        Command::GateFidelity => {
            let mut csv = String::from("scheme,chirality,fidelity\n");
            for &scheme in &cfg.schemes {
                for c in Chirality::BOTH {
                    let f = gate_fidelity(&cfg.params(scheme), c, &noise)?;
                    csv.push_str(&format!("{},{c},{}\n", scheme.name(), format_real(f)));
                    sink.say(format!("{scheme} {c}: fidelity = {f:.9}"));
                }
            }
            sink.write("gate_fidelity.csv".into(), &csv)?;
        }
        Command::Qpt => {
            for &scheme in &cfg.schemes {
                for c in Chirality::BOTH {
                    let r = qpt(&cfg.params(scheme), c, &noise)?;
                    let parts = |m: &holochiral::statecore::CMatrix<f64>| {
                        let n = m.nrows();
                        let grid = |f: &dyn Fn(usize, usize) -> f64| {
                            (0..n)
                                .map(|i| (0..n).map(|j| f(i, j)).collect::<Vec<_>>())
                                .collect::<Vec<_>>()
                        };
                        json!({ "re": grid(&|i, j| m[(i, j)].re), "im": grid(&|i, j| m[(i, j)].im) })
                    };
                    let doc = json!({
                        "scheme": scheme.name(),
                        "chirality": c.to_string(),
                        "basis": ["I", "X", "Y", "Z"],
                        "fidelity": r.fidelity,
                        "eigenvalues": r.eigenvalues,
                        "chi": parts(&r.chi),
                        "ideal_chi": parts(&r.ideal_chi),
                    });
                    sink.write(format!("qpt_{}_{c}.json", scheme.slug()), &pretty(&doc))?;
                    sink.say(format!("{scheme} {c}: process fidelity = {:.9}", r.fidelity));
                }
            }
        }
    }
    let manifest = manifest(cfg, &sink.report.files);
    sink.write(MANIFEST_FILE.into(), &manifest.to_json())?;
    Ok(sink.report)
}

fn manifest(cfg: &RunConfig, files: &[String]) -> RunManifest {
    let first = cfg.schemes.first().copied().unwrap_or(Scheme::NhqcPlus);
    let mut m = RunManifest::new(cfg.command.name(), &cfg.params(first), cfg.seed, cfg.detect);
    m.schemes = cfg.schemes.iter().map(|s| s.name().to_string()).collect();
    match cfg.command {
        Command::SweepOffset => {
            m.grids.insert("delta".into(), cfg.deltas.clone());
        }
        Command::SweepRandom => {
            m.grids
                .insert("alpha".into(), cfg.weights.iter().map(|w| w.0).collect());
            m.grids.insert("beta".into(), cfg.weights.iter().map(|w| w.1).collect());
        }
        _ => {}
    }
    let sweep = matches!(cfg.command, Command::SweepOffset | Command::SweepRandom);
    m.settings.insert(
        "noise".into(),
        json!({ "delta": cfg.delta, "alpha": cfg.alpha, "beta": cfg.beta }),
    );
    if sweep {
        m.settings.insert("trials".into(), json!(cfg.trials));
    }
    m.settings.insert("config".into(), json!(cfg.to_toml()));
    m.files = files.to_vec();
    m.files.push(MANIFEST_FILE.into());
    m
}

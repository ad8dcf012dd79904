//! Run configuration: strict TOML with pi-shorthand angles.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use holochiral::experiments::{
    default_alpha_grid, default_delta_grid, DetectLevel, DEFAULT_OFFSET_NOISE, DEFAULT_TRIALS,
};
use holochiral::{ExperimentParams64, NoiseSpec64, Scheme};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    EmitPulses,
    Discriminate,
    Trace,
    SweepOffset,
    SweepRandom,
    GateFidelity,
    Qpt,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::EmitPulses => "emit-pulses",
            Command::Discriminate => "discriminate",
            Command::Trace => "trace",
            Command::SweepOffset => "sweep-offset",
            Command::SweepRandom => "sweep-random",
            Command::GateFidelity => "gate-fidelity",
            Command::Qpt => "qpt",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Validated, fully defaulted configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub schemes: Vec<Scheme>,
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
    pub phi0: f64,
    pub duration: f64,
    pub steps: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub detect: DetectLevel,
    /// Noise of single runs; the stochastic weights of offset sweeps.
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub trials: usize,
    pub deltas: Vec<f64>,
    /// `(alpha, beta)` points of the random sweep.
    pub weights: Vec<(f64, f64)>,
}

impl RunConfig {
    /// Defaults for `command`; noise weights depend on it.
    pub fn defaults(command: Command) -> Self {
        let (alpha, beta) = if command == Command::SweepOffset {
            DEFAULT_OFFSET_NOISE
        } else {
            (0.0, 0.0)
        };
        Self {
            command,
            schemes: Scheme::ALL.to_vec(),
            theta: 0.75 * PI,
            phi: 0.5 * PI,
            gamma: PI,
            phi0: 0.5 * PI,
            duration: 4.0 * PI,
            steps: holochiral::DEFAULT_STEPS,
            seed: 42,
            out: PathBuf::from("out"),
            detect: DetectLevel::Two,
            delta: 0.0,
            alpha,
            beta,
            trials: DEFAULT_TRIALS,
            deltas: default_delta_grid(),
            weights: default_alpha_grid().into_iter().map(|a| (a, 0.0)).collect(),
        }
    }

    pub fn params(&self, scheme: Scheme) -> ExperimentParams64 {
        ExperimentParams64 {
            scheme,
            theta: self.theta,
            phi: self.phi,
            gamma: self.gamma,
            phi0: self.phi0,
            duration: self.duration,
            steps: self.steps,
        }
    }

    pub fn noise(&self) -> NoiseSpec64 {
        NoiseSpec64 {
            delta: self.delta,
            alpha: self.alpha,
            beta: self.beta,
            seed: self.seed,
            per_sample: true,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &str, why: &str| Err(CliError::Config(format!("`{key}`: {why}")));
        if self.schemes.is_empty() {
            return bad("scheme", "at least one scheme required");
        }
        for (key, v) in [
            ("theta", self.theta),
            ("phi", self.phi),
            ("gamma", self.gamma),
            ("phi0", self.phi0),
        ] {
            if !v.is_finite() {
                return bad(key, "must be finite");
            }
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return bad("duration", &format!("must be finite and > 0, got {}", self.duration));
        }
        if self.steps < 2 {
            return bad("steps", "must be at least 2");
        }
        for (key, v) in [
            ("noise.delta", self.delta),
            ("noise.alpha", self.alpha),
            ("noise.beta", self.beta),
        ] {
            if !v.is_finite() {
                return bad(key, "must be finite");
            }
        }
        if self.delta <= -1.0 {
            return bad("noise.delta", "must exceed -1 (the envelope would vanish or flip)");
        }
        if self.alpha < 0.0 || self.beta < 0.0 {
            return bad("noise", "alpha and beta must be non-negative");
        }
        if self.trials == 0 {
            return bad("sweep.trials", "must be at least 1");
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !d.is_finite() || *d <= -1.0) {
            return bad("sweep.deltas", "needs finite values above -1");
        }
        if self.weights.is_empty() || self.weights.iter().any(|(a, b)| !(*a >= 0.0 && *b >= 0.0)) {
            return bad("sweep.weights", "needs non-negative (alpha, beta) pairs");
        }
        Ok(())
    }

    /// TOML that parses back to exactly this configuration.
    pub fn to_toml(&self) -> String {
        let file = ConfigFile {
            command: Some(self.command),
            scheme: Some(SchemeList(self.schemes.clone())),
            theta: Some(Angle(self.theta)),
            phi: Some(Angle(self.phi)),
            gamma: Some(Angle(self.gamma)),
            phi0: Some(Angle(self.phi0)),
            duration: Some(Angle(self.duration)),
            steps: Some(self.steps),
            seed: Some(Seed(self.seed)),
            out: Some(self.out.clone()),
            detect: Some(detect_number(self.detect)),
            noise: Some(NoiseTable {
                delta: Some(self.delta),
                alpha: Some(self.alpha),
                beta: Some(self.beta),
            }),
            sweep: Some(SweepTable {
                trials: Some(self.trials),
                deltas: Some(self.deltas.clone()),
                weights: Some(self.weights.iter().map(|&(a, b)| [a, b]).collect()),
            }),
        };
        toml::to_string(&file).expect("config serializes")
    }
}

fn detect_number(d: DetectLevel) -> u8 {
    match d {
        DetectLevel::One => 1,
        DetectLevel::Two => 2,
        DetectLevel::Zero => 0,
    }
}

/// Parses `"3pi/4"`, `"-pi/2"`, `"2*pi"`, `"0.25π"` or a plain number.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .replace('π', "pi");
    let err = || format!("cannot read `{text}` as an angle (use radians or e.g. \"3pi/4\")");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d.parse::<f64>().map_err(|_| err())?)),
        None => (s.as_str(), None),
    };
    let value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let k = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| err())?,
            };
            k * PI
        }
        None => num.parse::<f64>().map_err(|_| err())?,
    };
    let value = match den {
        Some(0.0) => return Err(err()),
        Some(d) => value / d,
        None => value,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(err())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Angle(f64);

impl Serialize for Angle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Angle;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number of radians or a pi expression such as \"3pi/4\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                parse_angle(v).map(Angle).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// TOML integers are signed; larger seeds travel as strings.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Seed(u64);

impl Serialize for Seed {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Seed {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Seed;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative integer seed")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Seed, E> {
                u64::try_from(v)
                    .map(Seed)
                    .map_err(|_| E::custom("seed must be non-negative"))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Seed, E> {
                Ok(Seed(v))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Seed, E> {
                v.parse()
                    .map(Seed)
                    .map_err(|_| E::custom(format!("`{v}` is not a u64 seed")))
            }
        }
        d.deserialize_any(V)
    }
}

/// `"NHQC"`, `"all"` or a list of scheme names.
#[derive(Debug, Clone, PartialEq)]
struct SchemeList(Vec<Scheme>);

impl Serialize for SchemeList {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|x| x.name()))
    }
}

fn scheme_by_name(name: &str) -> Option<Scheme> {
    Scheme::ALL
        .into_iter()
        .find(|s| s.name().eq_ignore_ascii_case(name) || s.slug().eq_ignore_ascii_case(name))
}

impl<'de> Deserialize<'de> for SchemeList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = SchemeList;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("\"NHQC\", \"NHQC+\", \"STA\", \"all\" or a list of these")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<SchemeList, E> {
                if v.eq_ignore_ascii_case("all") {
                    return Ok(SchemeList(Scheme::ALL.to_vec()));
                }
                scheme_by_name(v)
                    .map(|s| SchemeList(vec![s]))
                    .ok_or_else(|| E::custom(format!("unknown scheme `{v}`")))
            }
            fn visit_seq<A: de::SeqAccess<'de>>(self, mut seq: A) -> Result<SchemeList, A::Error> {
                let mut out = Vec::new();
                while let Some(name) = seq.next_element::<String>()? {
                    let s =
                        scheme_by_name(&name).ok_or_else(|| de::Error::custom(format!("unknown scheme `{name}`")))?;
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
                Ok(SchemeList(out))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseTable {
    delta: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepTable {
    trials: Option<usize>,
    deltas: Option<Vec<f64>>,
    weights: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<Command>,
    scheme: Option<SchemeList>,
    theta: Option<Angle>,
    phi: Option<Angle>,
    gamma: Option<Angle>,
    phi0: Option<Angle>,
    duration: Option<Angle>,
    steps: Option<usize>,
    seed: Option<Seed>,
    out: Option<PathBuf>,
    detect: Option<u8>,
    noise: Option<NoiseTable>,
    sweep: Option<SweepTable>,
}

/// Parses and validates a config document; `command` must be present.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_config_for(text, None)
}

/// As [`parse_config`]; `command` fills in a missing `command` key and
/// must agree with it when both are given.
pub fn parse_config_for(text: &str, command: Option<Command>) -> Result<RunConfig, CliError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let command = match (file.command, command) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Config(format!(
                "`command`: config says `{a}` but `{b}` was requested"
            )))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(CliError::Config("missing required key `command`".into())),
    };
    let mut cfg = RunConfig::defaults(command);
    macro_rules! take {
        ($src:expr => $($field:ident),*) => {
            $(if let Some(v) = $src.$field { cfg.$field = v.into(); })*
        };
    }
    if let Some(s) = file.scheme {
        cfg.schemes = s.0;
    }
    for (slot, v) in [
        (&mut cfg.theta, file.theta),
        (&mut cfg.phi, file.phi),
        (&mut cfg.gamma, file.gamma),
        (&mut cfg.phi0, file.phi0),
        (&mut cfg.duration, file.duration),
    ] {
        if let Some(Angle(x)) = v {
            *slot = x;
        }
    }
    take!(file => steps, out);
    if let Some(Seed(s)) = file.seed {
        cfg.seed = s;
    }
    if let Some(d) = file.detect {
        cfg.detect = match d {
            0 => DetectLevel::Zero,
            1 => DetectLevel::One,
            2 => DetectLevel::Two,
            _ => return Err(CliError::Config(format!("`detect`: level must be 0, 1 or 2, got {d}"))),
        };
    }
    if let Some(n) = file.noise {
        take!(n => delta, alpha, beta);
    }
    if let Some(s) = file.sweep {
        take!(s => trials, deltas);
        if let Some(w) = s.weights {
            cfg.weights = w.into_iter().map(|[a, b]| (a, b)).collect();
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

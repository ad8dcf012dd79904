use std::f64::consts::PI;

use holochiral::experiments::{
    contrast, default_alpha_grid, discriminate_schedule, discriminate_schedule_qudit, gate_fidelity,
    random_noise_sweep, run_discrimination, DetectLevel, ExperimentParams,
};
use holochiral::noise::{apply_noise, trial_seed, NoiseSpec};
use holochiral::{Chirality, ExperimentParams64, NoiseSpec64, Scheme};

#[test]
fn gates_hold_across_durations() {
    for duration in [5.0, 10.0, 20.0] {
        for scheme in Scheme::ALL {
            let p = ExperimentParams64 {
                duration,
                ..ExperimentParams64::new(scheme)
            };
            for c in Chirality::BOTH {
                let f = gate_fidelity(&p, c, &NoiseSpec64::none()).unwrap();
                assert!(f >= 1.0 - 1e-6, "{scheme} {c} T={duration}: {f}");
            }
            let l = run_discrimination(&p, Chirality::L, &NoiseSpec64::none()).unwrap();
            let r = run_discrimination(&p, Chirality::R, &NoiseSpec64::none()).unwrap();
            assert!(contrast(&l, &r, DetectLevel::Two).unwrap() >= 1.0 - 1e-6);
        }
    }
}

#[test]
fn other_gate_parameters() {
    for (theta, phi, gamma) in [(PI / 3.0, 0.4, PI / 2.0), (0.9, -1.2, 1.5 * PI)] {
        for scheme in Scheme::ALL {
            let p = ExperimentParams64 {
                theta,
                phi,
                gamma,
                ..ExperimentParams64::new(scheme)
            };
            for c in Chirality::BOTH {
                let f = gate_fidelity(&p, c, &NoiseSpec64::none()).unwrap();
                assert!(f >= 1.0 - 1e-6, "{scheme} {c}: {f}");
            }
        }
    }
}

#[test]
fn single_precision_pipeline() {
    for scheme in Scheme::ALL {
        let p = ExperimentParams::<f32>::new(scheme);
        let l = run_discrimination(&p, Chirality::L, &NoiseSpec::none()).unwrap();
        let r = run_discrimination(&p, Chirality::R, &NoiseSpec::none()).unwrap();
        let xi = contrast(&l, &r, DetectLevel::Two).unwrap();
        assert!(xi >= 1.0 - 1e-3, "{scheme}: {xi}");
        let f = gate_fidelity(&p, Chirality::L, &NoiseSpec::none()).unwrap();
        assert!(f >= 1.0 - 1e-3, "{scheme}: {f}");
    }
}

#[test]
fn contrast_degrades_with_random_noise() {
    let p = ExperimentParams64 {
        steps: 500,
        ..ExperimentParams64::new(Scheme::NhqcPlus)
    };
    let weights: Vec<(f64, f64)> = default_alpha_grid().into_iter().map(|a| (a, 0.0)).collect();
    let summary = random_noise_sweep(&p, &weights, 20, 11, DetectLevel::Two)
        .unwrap()
        .summary();
    assert!(
        summary[0].mean >= 1.0 - 1e-6 && summary[0].std_err <= 1e-9,
        "alpha = 0 is noise-free"
    );
    for w in summary.windows(2) {
        let slack = 2.0 * (w[0].std_err.powi(2) + w[1].std_err.powi(2)).sqrt();
        assert!(w[1].mean <= w[0].mean + slack, "{:?} -> {:?}", w[0], w[1]);
    }
    assert!(summary.last().unwrap().mean < summary[0].mean);
}

/// Each sweep row equals an explicit run of both enantiomers under one
/// realization drawn from the row's seed.
#[test]
fn sweep_rows_share_one_realization() {
    let p = ExperimentParams64 {
        steps: 400,
        ..ExperimentParams64::new(Scheme::Nhqc)
    };
    let weights = [(0.5, 0.5)];
    let sweep = random_noise_sweep(&p, &weights, 3, 5, DetectLevel::Two).unwrap();
    let base = p.schedule().unwrap();
    for row in &sweep.rows {
        assert_eq!(row.seed, trial_seed(5, 0, row.trial as u32));
        let spec = NoiseSpec64::stochastic(0.5, 0.5, row.seed);
        let (s, clipped) = apply_noise(&base, &spec).unwrap();
        let l = discriminate_schedule(&s, Chirality::L, p.phi0, spec.descriptor(), clipped).unwrap();
        let r = discriminate_schedule(&s, Chirality::R, p.phi0, spec.descriptor(), clipped).unwrap();
        assert_eq!(l.populations, row.left);
        assert_eq!(r.populations, row.right);
        // an independent realization for R would differ
        let (s2, _) = apply_noise(&base, &NoiseSpec64::stochastic(0.5, 0.5, row.seed ^ 1)).unwrap();
        let r2 = discriminate_schedule(&s2, Chirality::R, p.phi0, spec.descriptor(), 0).unwrap();
        assert_ne!(r2.populations, row.right);
    }
}

#[test]
fn qudit_encoding_matches_three_level_model() {
    let p = ExperimentParams64 {
        steps: 800,
        ..ExperimentParams64::new(Scheme::NhqcPlus)
    };
    let noise = NoiseSpec64::offset(-0.12);
    let (s, _) = apply_noise(&p.schedule().unwrap(), &noise).unwrap();
    for c in Chirality::BOTH {
        let three = discriminate_schedule(&s, c, p.phi0, noise.descriptor(), 0).unwrap();
        let four = discriminate_schedule_qudit(&s, c, p.phi0, noise.descriptor(), 0).unwrap();
        for k in 0..3 {
            assert!(
                (three.populations[k] - four.populations[k]).abs() < 1e-9,
                "{c} level {k}"
            );
        }
    }
}

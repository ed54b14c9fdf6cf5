//! Command implementations: detect, sweep, montecarlo, factors.

use std::fs;


use specedge::analysis::{monte_carlo_scale, MonteCarloConfig};
use specedge::detect::{
    conjugate_sum, detect_edges, grid_points, predicted_scale, DetectionResult, ThresholdPolicy,
};
use specedge::factor::ConcentrationFactor;
use specedge::periodic_distance;
use specedge::spectral::{add_white_noise, analytic_coefficients, SpectralData};

use crate::config::{BetaChoice, ExperimentConfig, FactorChoice};
use crate::table::{self, SweepRow};
use crate::{manifest, CliError};

pub struct DetectOutcome {
    pub result: DetectionResult,
    pub resolved_beta: f64,
    pub plateau_rms: f64,
    pub plateau_max: f64,
    pub amp_error: f64,
}

pub fn build_factor(cfg: &ExperimentConfig, beta: f64) -> Result<ConcentrationFactor, CliError> {
    let f = match cfg.factor {
        FactorChoice::Classical => ConcentrationFactor::classical(cfg.n_modes)?,
        FactorChoice::NoiseAdapted => ConcentrationFactor::noise_adapted(cfg.eta, beta, cfg.n_modes)?,
        FactorChoice::Truncated => {
            ConcentrationFactor::truncated(cfg.eta, beta, cfg.k0, cfg.n0, cfg.n_modes)?
        }
        FactorChoice::Regularized => {
            ConcentrationFactor::regularized(cfg.eta, beta, cfg.k0, cfg.n_modes, cfg.eps_reg)?
        }
    };
    Ok(f)
}

fn coefficients(cfg: &ExperimentConfig) -> Result<SpectralData, CliError> {
    let signal = cfg.signal_spec()?;
    let clean = analytic_coefficients(&signal, cfg.n_modes)?;
    if cfg.add_noise {
        Ok(add_white_noise(&clean, cfg.eta, cfg.seed)?)
    } else {
        Ok(clean)
    }
}

/// Arguments for the predicted small scale. The scale is a property of the
/// kernel: factors designed for noise power eta carry the eta-scale even on
/// noiseless input (their plateau floor is set by the design, not by the
/// realization). The classical factor carries no beta; the equal-weights
/// convention applies, and its eta-scale only matters when noise is present.
fn scale_params(cfg: &ExperimentConfig, beta: f64) -> (f64, f64) {
    if cfg.factor == FactorChoice::Classical {
        (if cfg.add_noise { cfg.eta } else { 0.0 }, 1.0)
    } else {
        (cfg.eta, beta)
    }
}

/// Run the full pipeline once and write the five artifacts.
pub fn run_detect(cfg: &ExperimentConfig) -> Result<DetectOutcome, CliError> {
    fs::create_dir_all(&cfg.out_dir)?;
    let outcome = run_pipeline(cfg, true)?;

    let derived = detect_derived(&outcome);
    manifest::write(&cfg.out_dir.join("manifest.txt"), cfg, &derived)?;
    Ok(outcome)
}

fn detect_derived(outcome: &DetectOutcome) -> Vec<(String, String)> {
    vec![
        ("beta_resolved".into(), table::fmt_f64(outcome.resolved_beta)),
        (
            "epsilon_predicted".into(),
            table::fmt_f64(outcome.result.epsilon_predicted),
        ),
        (
            "threshold_used".into(),
            table::fmt_f64(outcome.result.threshold_used),
        ),
        ("edges_detected".into(), outcome.result.edges.len().to_string()),
        ("plateau_rms".into(), table::fmt_f64(outcome.plateau_rms)),
        ("plateau_max".into(), table::fmt_f64(outcome.plateau_max)),
        ("amp_error".into(), table::fmt_f64(outcome.amp_error)),
        ("command".into(), "detect".into()),
    ]
}

fn run_pipeline(cfg: &ExperimentConfig, write_artifacts: bool) -> Result<DetectOutcome, CliError> {
    let beta = cfg.resolved_beta()?;
    let data = coefficients(cfg)?;
    let factor = build_factor(cfg, beta)?;
    let grid = grid_points(cfg.grid_size);
    let samples = conjugate_sum(&data, &factor, &grid)?;
    let (scale_eta, scale_beta) = scale_params(cfg, beta);
    let eps = predicted_scale(scale_eta, scale_beta, cfg.n_modes)?;
    let policy = ThresholdPolicy {
        c_abs: cfg.c_abs,
        c_rel: cfg.c_rel,
    };
    let result = detect_edges(&grid, &samples, cfg.n_modes, eps, &policy)?;

    // plateau and amplitude-error diagnostics against the configured signal
    let jumps = cfg.jumps.clone();
    let (mut sq, mut count, mut peak) = (0.0, 0usize, 0.0f64);
    for (x, v) in grid.iter().zip(&samples) {
        if jumps.iter().all(|(z, _)| periodic_distance(*x, *z) > 10.0 * eps) {
            sq += v * v;
            count += 1;
            peak = peak.max(v.abs());
        }
    }
    let plateau_rms = if count > 0 {
        (sq / count as f64).sqrt()
    } else {
        0.0
    };
    let amp_error = jumps
        .iter()
        .map(|&(z, a)| {
            let (i, _) = grid
                .iter()
                .enumerate()
                .min_by(|p, q| periodic_distance(*p.1, z).total_cmp(&periodic_distance(*q.1, z)))
                .expect("nonempty grid");
            (samples[i] - a).abs()
        })
        .fold(0.0f64, f64::max);

    if write_artifacts {
        table::write_coefficients(&cfg.out_dir.join("coefficients.csv"), &data)?;
        table::write_factor(&cfg.out_dir.join("factor.csv"), &factor)?;
        table::write_samples(&cfg.out_dir.join("samples.csv"), &result)?;
        table::write_edges(&cfg.out_dir.join("edges.csv"), &result)?;
    }

    Ok(DetectOutcome {
        result,
        resolved_beta: beta,
        plateau_rms,
        plateau_max: peak,
        amp_error,
    })
}

pub const SWEEP_PARAMS: &[&str] = &["eta", "N", "n_modes", "beta", "k0"];

fn apply_sweep_value(cfg: &ExperimentConfig, param: &str, value: f64) -> Result<ExperimentConfig, CliError> {
    let mut sub = cfg.clone();
    match param {
        "eta" => {
            if !(value.is_finite() && value > 0.0) {
                return Err(CliError::config("swept eta values must be > 0"));
            }
            sub.eta = value;
        }
        "N" | "n_modes" => {
            if value < 2.0 || value.fract() != 0.0 {
                return Err(CliError::config("swept N values must be integers >= 2"));
            }
            sub.n_modes = value as usize;
            if cfg.n0 == cfg.n_modes {
                sub.n0 = sub.n_modes;
            }
            if cfg.grid_size == 8 * cfg.n_modes {
                sub.grid_size = 8 * sub.n_modes;
            }
        }
        "beta" => {
            if !(value.is_finite() && value > 0.0) {
                return Err(CliError::config("swept beta values must be > 0"));
            }
            sub.beta = BetaChoice::Fixed(value);
        }
        "k0" => {
            if !(value.is_finite() && value >= 0.0) {
                return Err(CliError::config("swept k0 values must be >= 0"));
            }
            sub.k0 = value;
        }
        other => {
            return Err(CliError::config(format!(
                "sweep parameter must be one of {SWEEP_PARAMS:?}, got '{other}'"
            )))
        }
    }
    Ok(sub)
}

/// One pipeline run per value, each in its own subdirectory, plus a summary
/// table at the sweep root.
pub fn run_sweep(cfg: &ExperimentConfig, param: &str, values: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    if values.is_empty() {
        return Err(CliError::config("sweep value list is empty"));
    }
    fs::create_dir_all(&cfg.out_dir)?;
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let mut sub = apply_sweep_value(cfg, param, value)?;
        sub.out_dir = cfg.out_dir.join(format!("sub_{param}_{value:e}"));
        fs::create_dir_all(&sub.out_dir)?;
        let outcome = run_pipeline(&sub, true)?;
        let derived = detect_derived(&outcome);
        manifest::write(&sub.out_dir.join("manifest.txt"), &sub, &derived)?;
        rows.push(SweepRow {
            value,
            plateau_rms: outcome.plateau_rms,
            plateau_max: outcome.plateau_max,
            amp_error: outcome.amp_error,
            epsilon_predicted: outcome.result.epsilon_predicted,
        });
    }
    table::write_sweep_summary(&cfg.out_dir.join("summary.csv"), param, &rows)?;
    manifest::write(
        &cfg.out_dir.join("manifest.txt"),
        cfg,
        &[
            ("command".into(), "sweep".into()),
            ("sweep_param".into(), param.into()),
            (
                "sweep_values".into(),
                values
                    .iter()
                    .map(|v| format!("{v:e}"))
                    .collect::<Vec<_>>()
                    .join(","),
            ),
        ],
    )?;
    Ok(rows)
}

/// Seeded Monte Carlo over fresh noise realizations; writes the trial table.
pub fn run_montecarlo(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if !cfg.add_noise || cfg.eta <= 0.0 {
        return Err(CliError::config(
            "montecarlo requires add_noise = true and eta > 0",
        ));
    }
    fs::create_dir_all(&cfg.out_dir)?;
    let beta = cfg.resolved_beta()?;
    let signal = cfg.signal_spec()?;
    let mut mc = MonteCarloConfig::new(cfg.trials, cfg.seed);
    mc.grid_size = Some(cfg.grid_size);
    mc.policy = ThresholdPolicy {
        c_abs: cfg.c_abs,
        c_rel: cfg.c_rel,
    };
    let summary = monte_carlo_scale(&signal, cfg.n_modes, cfg.eta, |e, n| {
        match cfg.factor {
            FactorChoice::Classical => ConcentrationFactor::classical(n),
            FactorChoice::NoiseAdapted => ConcentrationFactor::noise_adapted(e, beta, n),
            FactorChoice::Truncated => ConcentrationFactor::truncated(e, beta, cfg.k0, cfg.n0, n),
            FactorChoice::Regularized => {
                ConcentrationFactor::regularized(e, beta, cfg.k0, n, cfg.eps_reg)
            }
        }
    }, &mc)?;
    table::write_montecarlo(&cfg.out_dir.join("trials.csv"), &summary)?;
    manifest::write(
        &cfg.out_dir.join("manifest.txt"),
        cfg,
        &[
            ("command".into(), "montecarlo".into()),
            ("beta_resolved".into(), table::fmt_f64(beta)),
            (
                "epsilon_predicted".into(),
                table::fmt_f64(summary.epsilon_predicted),
            ),
            (
                "detection_rate".into(),
                table::fmt_f64(summary.detection_rate),
            ),
            ("plateau_rms".into(), table::fmt_f64(summary.plateau_rms)),
        ],
    )?;
    println!(
        "montecarlo: {} trials, detection rate {:.3}, plateau rms {:.4e} -> {}",
        cfg.trials,
        summary.detection_rate,
        summary.plateau_rms,
        cfg.out_dir.display()
    );
    Ok(())
}

/// Dump the configured factor as a two-column table.
pub fn run_factors(cfg: &ExperimentConfig) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.out_dir)?;
    let beta = cfg.resolved_beta()?;
    let factor = build_factor(cfg, beta)?;
    let path = cfg.out_dir.join("factor.csv");
    table::write_factor(&path, &factor)?;
    println!("factor table -> {}", path.display());
    Ok(())
}

/// Shared post-run report line for `detect`.
pub fn print_detect_report(cfg: &ExperimentConfig, outcome: &DetectOutcome) {
    println!(
        "detect: {} edges (threshold {:.4e}, epsilon {:.4e}) -> {}",
        outcome.result.edges.len(),
        outcome.result.threshold_used,
        outcome.result.epsilon_predicted,
        cfg.out_dir.display()
    );
    for e in &outcome.result.edges {
        println!("  edge at {:+.6} amplitude {:+.6}", e.location, e.amplitude);
    }
}

/// Parse `--values` lists like `1e-3,1e-4`.
pub fn parse_values(s: &str) -> Result<Vec<f64>, CliError> {
    let mut values = vec![];
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        values.push(
            part.parse::<f64>()
                .map_err(|_| CliError::config(format!("cannot parse sweep value '{part}'")))?,
        );
    }
    Ok(values)
}

//! Diagnostics and verification: the four kernel error scales, the energy
//! functionals driving the factor design, the balancing rule for `beta`,
//! and a seeded Monte Carlo harness for the scale-separation laws.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::detect::{conjugate_sum, detect_edges, grid_points, predicted_scale, ThresholdPolicy};
use crate::error::Error;
use crate::factor::{ConcentrationFactor, FactorFamily};
use crate::quad::{integrate, SIMPSON_TOL};
use crate::signal::SignalSpec;
use crate::spectral::{add_white_noise, analytic_coefficients};
use crate::{periodic_distance, PI, TAU};

/// The four computable error scales of a sampled factor, from the quadrature
/// defect (`eps0`), the endpoint weight (`eps1`), the weighted variation sum
/// (`eps2`) and the first sample (`eps3`). Their sum bounds the detector's
/// away-from-jump scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonDiagnostics {
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps_total: f64,
}

/// Discrete error-scale diagnostics of a factor:
///
/// ```text
/// eps0 = (1/N) * TV(s_k / (k/N))
/// eps1 = |s_N| / N
/// eps2 = (1/N) * sum_{k=2}^{N} |s_k - s_{k-1}| / (k/N)
/// eps3 = |s_1|
/// ```
pub fn epsilon_diagnostics(factor: &ConcentrationFactor) -> EpsilonDiagnostics {
    let n = factor.n_modes();
    let nf = n as f64;
    let s = factor.values();
    let ratio = |k: usize| s[k - 1] * nf / k as f64;

    let mut tv = 0.0;
    for k in 1..n {
        tv += libm::fabs(ratio(k + 1) - ratio(k));
    }
    let eps0 = tv / nf;
    let eps1 = libm::fabs(s[n - 1]) / nf;
    let mut eps2 = 0.0;
    for k in 2..=n {
        eps2 += libm::fabs(s[k - 1] - s[k - 2]) / k as f64;
    }
    let eps3 = libm::fabs(s[0]);
    EpsilonDiagnostics {
        eps0,
        eps1,
        eps2,
        eps3,
        eps_total: eps0 + eps1 + eps2 + eps3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyVariant {
    /// Regular-part energy as `(1/N^3) int sigma^2 / xi^4`.
    L2Regular,
    /// Regular-part energy as `(1/N) int |sigma| / xi^2`, the variation-like
    /// weighting that leads to the truncated factor.
    BvRegular,
}

/// Energies of the three components the conjugate sum mixes, plus the
/// effective sizes used to balance `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    /// `(1/N) int (sigma/xi)^2` — jump contribution.
    pub e_jump: f64,
    /// Regular-part energy in the chosen variant. Both variants integrate
    /// from `max(1/N, k0/N)`: the continuous integrands blow up at 0 for
    /// factors with `sigma ~ xi`, while the discrete sums they model start
    /// at `k = 1`.
    pub e_regular: f64,
    /// `eta N int sigma^2` — noise contribution.
    pub e_noise: f64,
    /// `2 sqrt(e_noise)`: two standard deviations of the noise term.
    pub e_noise_eff: f64,
    /// `sqrt(eta) * beta`: the far-from-jump leakage scale (zero for
    /// families without a `beta`).
    pub e_jump_eff: f64,
    pub variant: EnergyVariant,
}

/// Evaluate the energy functionals of a factor under per-mode noise power
/// `eta`. Families with a closed-form profile are integrated adaptively;
/// custom tables fall back to the discrete sums the integrals approximate.
pub fn energy_report(
    factor: &ConcentrationFactor,
    eta: f64,
    variant: EnergyVariant,
) -> Result<EnergyReport, Error> {
    if !eta.is_finite() || eta < 0.0 {
        return Err(Error::invalid("eta", format!("need eta >= 0, got {eta}")));
    }
    let n = factor.n_modes();
    let nf = n as f64;

    let (e_jump, e_regular, e_noise) = if factor.family() == FactorFamily::CustomTable {
        let s = factor.values();
        let mut ej = 0.0;
        let mut er = 0.0;
        let mut en = 0.0;
        for k in 1..=n {
            let v = s[k - 1];
            let kf = k as f64;
            ej += (v / kf) * (v / kf);
            en += v * v;
            er += match variant {
                EnergyVariant::L2Regular => v * v / (kf * kf * kf * kf),
                EnergyVariant::BvRegular => libm::fabs(v) / (kf * kf),
            };
        }
        (ej, er, eta * en)
    } else {
        let (lo, hi) = factor.support();
        let ej = integrate(
            |xi| {
                let r = factor.profile_over_xi(xi).unwrap_or(0.0);
                r * r
            },
            lo,
            hi,
            SIMPSON_TOL,
        ) / nf;
        let en = eta
            * nf
            * integrate(
                |xi| {
                    let s = factor.profile(xi).unwrap_or(0.0);
                    s * s
                },
                lo,
                hi,
                SIMPSON_TOL,
            );
        let lo_r = libm::fmax(1.0 / nf, lo);
        let er = match variant {
            EnergyVariant::L2Regular => {
                integrate(
                    |xi| {
                        let s = factor.profile(xi).unwrap_or(0.0);
                        s * s / (xi * xi * xi * xi)
                    },
                    lo_r,
                    hi,
                    SIMPSON_TOL,
                ) / (nf * nf * nf)
            }
            EnergyVariant::BvRegular => {
                integrate(
                    |xi| {
                        let s = factor.profile(xi).unwrap_or(0.0);
                        libm::fabs(s) / (xi * xi)
                    },
                    lo_r,
                    hi,
                    SIMPSON_TOL,
                ) / nf
            }
        };
        (ej, er, en)
    };

    Ok(EnergyReport {
        e_jump,
        e_regular,
        e_noise,
        e_noise_eff: 2.0 * libm::sqrt(e_noise),
        e_jump_eff: libm::sqrt(eta) * factor.params().beta,
        variant,
    })
}

/// The balancing rule `beta = pi * eta^(-1/6)`, from minimizing
/// `e_noise_eff + e_jump_eff` in the regime `sqrt(eta) beta N >> 1`.
pub fn beta_policy(eta: f64) -> Result<f64, Error> {
    if !(eta.is_finite() && eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(
            "eta",
            format!("beta policy applies for 0 < eta < 1, got {eta}"),
        ));
    }
    Ok(PI * libm::pow(eta, -1.0 / 6.0))
}

/// The objective `2 sqrt(E_noise(beta)) + sqrt(eta) * beta` minimized by
/// [`optimize_beta`], with the noise energy of the noise-adapted factor
/// evaluated by quadrature (no asymptotics).
pub fn beta_objective(eta: f64, n: usize, beta: f64) -> Result<f64, Error> {
    let factor = ConcentrationFactor::noise_adapted(eta, beta, n)?;
    let e_noise = eta
        * n as f64
        * integrate(
            |xi| {
                let s = factor.profile(xi).unwrap_or(0.0);
                s * s
            },
            0.0,
            1.0,
            SIMPSON_TOL,
        );
    Ok(2.0 * libm::sqrt(e_noise) + libm::sqrt(eta) * beta)
}

const BETA_GRID: usize = 100;

/// Minimize [`beta_objective`] over a bracket by golden section (relative
/// tolerance 1e-4), after a 100-point log-grid scan that both brackets the
/// minimizer and rejects brackets whose minimum sits on the boundary.
pub fn optimize_beta(eta: f64, n: usize, bracket: (f64, f64)) -> Result<f64, Error> {
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::invalid(
            "bracket",
            format!("need 0 < beta_lo < beta_hi, got ({lo}, {hi})"),
        ));
    }
    let log_lo = libm::log(lo);
    let log_hi = libm::log(hi);
    let grid: Vec<f64> = (0..BETA_GRID)
        .map(|i| libm::exp(log_lo + (log_hi - log_lo) * i as f64 / (BETA_GRID - 1) as f64))
        .collect();
    let mut best = 0usize;
    let mut best_val = f64::INFINITY;
    for (i, &b) in grid.iter().enumerate() {
        let v = beta_objective(eta, n, b)?;
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    if best == 0 || best == BETA_GRID - 1 {
        return Err(Error::NoInteriorMinimum {
            boundary_beta: grid[best],
            objective: best_val,
        });
    }

    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let inv_phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = beta_objective(eta, n, c)?;
    let mut fd = beta_objective(eta, n, d)?;
    while (b - a) > 1e-4 * a {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = beta_objective(eta, n, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = beta_objective(eta, n, d)?;
        }
    }
    let beta_star = 0.5 * (a + b);
    // returned beta must not lose to any scan point
    if beta_objective(eta, n, beta_star)? <= best_val {
        Ok(beta_star)
    } else {
        Ok(grid[best])
    }
}

/// Configuration for [`monte_carlo_scale`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloConfig {
    pub trials: u32,
    pub seed: u64,
    /// Evaluation grid size; defaults to `8N`.
    pub grid_size: Option<usize>,
    pub policy: ThresholdPolicy,
    /// A jump counts as detected when an edge lies within this distance;
    /// defaults to two grid cells.
    pub match_window: Option<f64>,
}

impl MonteCarloConfig {
    pub fn new(trials: u32, seed: u64) -> Self {
        MonteCarloConfig {
            trials,
            seed,
            grid_size: None,
            policy: ThresholdPolicy::default(),
            match_window: None,
        }
    }
}

/// Per-trial observables.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u32,
    /// Sample value at the grid point nearest each true jump.
    pub jump_estimates: Vec<f64>,
    pub plateau_rms: f64,
    pub plateau_max: f64,
    pub jumps_detected: u32,
}

/// Aggregate over trials for one true jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpStats {
    pub location: f64,
    pub true_amplitude: f64,
    pub mean_estimate: f64,
    pub std_estimate: f64,
    pub detection_rate: f64,
}

/// Monte Carlo summary: per-trial rows plus aggregates. The plateau is the
/// set of grid points farther than `10 * epsilon_predicted` from every jump.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub records: Vec<TrialRecord>,
    pub jumps: Vec<JumpStats>,
    /// Pooled RMS of the plateau samples over all trials.
    pub plateau_rms: f64,
    /// Largest plateau |K| seen in any trial.
    pub plateau_max: f64,
    /// Fraction of (trial, jump) pairs with a matching detected edge.
    pub detection_rate: f64,
    pub epsilon_predicted: f64,
    pub grid_size: usize,
    pub match_window: f64,
}

/// Run `trials` independent noise realizations (seeds `seed + trial`) of the
/// full pipeline and report jump-amplitude statistics, plateau size, and the
/// detection rate under the given policy.
pub fn monte_carlo_scale<F>(
    signal: &SignalSpec,
    n: usize,
    eta: f64,
    build_factor: F,
    cfg: &MonteCarloConfig,
) -> Result<MonteCarloSummary, Error>
where
    F: Fn(f64, usize) -> Result<ConcentrationFactor, Error>,
{
    if cfg.trials == 0 {
        return Err(Error::invalid("trials", "need at least one trial".into()));
    }
    let factor = build_factor(eta, n)?;
    if factor.n_modes() != n {
        return Err(Error::invalid(
            "factor",
            format!("builder produced N = {}, expected {n}", factor.n_modes()),
        ));
    }
    // families without a beta fall back to the equal-weights convention
    let beta_eff = if factor.params().beta > 0.0 {
        factor.params().beta
    } else {
        1.0
    };
    let eps = predicted_scale(eta, beta_eff, n)?;

    let grid_size = cfg.grid_size.unwrap_or(8 * n);
    let grid = grid_points(grid_size);
    let h = TAU / grid_size as f64;
    let match_window = cfg.match_window.unwrap_or(2.0 * h);

    let jumps = signal.jumps();
    let nearest_idx: Vec<usize> = jumps
        .iter()
        .map(|j| {
            let mut best = 0;
            let mut dist = f64::INFINITY;
            for (i, &x) in grid.iter().enumerate() {
                let d = periodic_distance(x, j.location);
                if d < dist {
                    dist = d;
                    best = i;
                }
            }
            best
        })
        .collect();
    let plateau_idx: Vec<usize> = (0..grid_size)
        .filter(|&i| {
            jumps
                .iter()
                .all(|j| periodic_distance(grid[i], j.location) > 10.0 * eps)
        })
        .collect();

    let base = analytic_coefficients(signal, n)?;
    let mut records = Vec::with_capacity(cfg.trials as usize);
    let mut detected_per_jump = vec![0u32; jumps.len()];
    for trial in 0..cfg.trials {
        let data = add_white_noise(&base, eta, cfg.seed.wrapping_add(trial as u64))?;
        let samples = conjugate_sum(&data, &factor, &grid)?;

        let jump_estimates: Vec<f64> = nearest_idx.iter().map(|&i| samples[i]).collect();
        let mut sq = 0.0;
        let mut peak = 0.0f64;
        for &i in &plateau_idx {
            let v = samples[i];
            sq += v * v;
            peak = peak.max(libm::fabs(v));
        }
        let plateau_rms = if plateau_idx.is_empty() {
            0.0
        } else {
            libm::sqrt(sq / plateau_idx.len() as f64)
        };

        let detection = detect_edges(&grid, &samples, n, eps, &cfg.policy)?;
        let mut jumps_detected = 0;
        for (ji, j) in jumps.iter().enumerate() {
            let hit = detection
                .edges
                .iter()
                .any(|e| periodic_distance(e.location, j.location) <= match_window);
            if hit {
                detected_per_jump[ji] += 1;
                jumps_detected += 1;
            }
        }

        records.push(TrialRecord {
            trial,
            jump_estimates,
            plateau_rms,
            plateau_max: peak,
            jumps_detected,
        });
    }

    let trials_f = cfg.trials as f64;
    let mut jump_stats = Vec::with_capacity(jumps.len());
    for (ji, j) in jumps.iter().enumerate() {
        let mean = records.iter().map(|r| r.jump_estimates[ji]).sum::<f64>() / trials_f;
        let var = if cfg.trials > 1 {
            records
                .iter()
                .map(|r| {
                    let d = r.jump_estimates[ji] - mean;
                    d * d
                })
                .sum::<f64>()
                / (trials_f - 1.0)
        } else {
            0.0
        };
        jump_stats.push(JumpStats {
            location: j.location,
            true_amplitude: j.amplitude,
            mean_estimate: mean,
            std_estimate: libm::sqrt(var),
            detection_rate: detected_per_jump[ji] as f64 / trials_f,
        });
    }
    let total_detected: u32 = detected_per_jump.iter().sum();
    let detection_rate = if jumps.is_empty() {
        1.0
    } else {
        total_detected as f64 / (trials_f * jumps.len() as f64)
    };

    let ms = records.iter().map(|r| r.plateau_rms * r.plateau_rms).sum::<f64>() / trials_f;
    let plateau_rms = libm::sqrt(ms);
    let plateau_max = records.iter().map(|r| r.plateau_max).fold(0.0, f64::max);

    Ok(MonteCarloSummary {
        records,
        jumps: jump_stats,
        plateau_rms,
        plateau_max,
        detection_rate,
        epsilon_predicted: eps,
        grid_size,
        match_window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic_number(n: usize) -> f64 {
        (1..=n).map(|k| 1.0 / k as f64).sum()
    }

    #[test]
    fn classical_diagnostics_are_explicit() {
        let n = 128;
        let f = ConcentrationFactor::classical(n).unwrap();
        let d = epsilon_diagnostics(&f);
        assert!(d.eps0 <= 1e-12, "constant ratio sequence, eps0 = {}", d.eps0);
        assert!((d.eps1 - 1.0 / n as f64).abs() < 1e-15);
        assert!((d.eps3 - 1.0 / n as f64).abs() < 1e-15);
        let expect = (harmonic_number(n) - 1.0) / n as f64;
        assert!((d.eps2 - expect).abs() < 1e-12);
        assert!((d.eps_total - (d.eps0 + d.eps1 + d.eps2 + d.eps3)).abs() < 1e-16);
    }

    #[test]
    fn truncated_first_mode_is_dead() {
        let f = ConcentrationFactor::truncated(2e-5, 19.0, 8.0 * PI, 1000, 1000).unwrap();
        let d = epsilon_diagnostics(&f);
        assert_eq!(d.eps3, 0.0);
    }

    #[test]
    fn noise_adapted_eps0_tracks_the_noise_scale() {
        let eta: f64 = 1e-4;
        let beta = 10.0;
        let f = ConcentrationFactor::noise_adapted(eta, beta, 1000).unwrap();
        let d = epsilon_diagnostics(&f);
        let a = eta.sqrt() * beta;
        let c = d.eps0 / a;
        assert!(c <= 1.0, "eps0 = {} = {c} * sqrt(eta) beta", d.eps0);
    }

    #[test]
    fn eps2_of_classical_follows_log_over_n() {
        let mut xs = vec![];
        let mut ys = vec![];
        for n in [64usize, 128, 256, 512, 1024] {
            let d = epsilon_diagnostics(&ConcentrationFactor::classical(n).unwrap());
            xs.push(libm::log(libm::log(n as f64) / n as f64));
            ys.push(libm::log(d.eps2));
        }
        let slope = fit_slope(&xs, &ys);
        assert!((slope - 1.0).abs() <= 0.2, "slope {slope}");
    }

    pub(super) fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let mut num = 0.0;
        let mut den = 0.0;
        for (x, y) in xs.iter().zip(ys) {
            num += (x - mx) * (y - my);
            den += (x - mx) * (x - mx);
        }
        num / den
    }

    #[test]
    fn classical_energies() {
        let n = 64;
        let f = ConcentrationFactor::classical(n).unwrap();
        let r = energy_report(&f, 1e-4, EnergyVariant::L2Regular).unwrap();
        assert!((r.e_jump - 1.0 / n as f64).abs() < 1e-10);
        // eta N int xi^2 = eta N / 3
        assert!((r.e_noise - 1e-4 * n as f64 / 3.0).abs() < 1e-10);
        let defect = r.e_noise_eff * r.e_noise_eff - 4.0 * r.e_noise;
        assert!(defect.abs() <= 1e-14 * r.e_noise);
    }

    #[test]
    fn noise_energy_reaches_its_asymptotic_ratio() {
        // E_noise * beta / sqrt(eta) settles once sqrt(eta) beta N >= 10
        let mut ratios = vec![];
        for (eta, beta, n) in [
            (1e-4, 1.0, 1000),
            (1e-4, 10.0, 1000),
            (1e-2, 1.0, 500),
            (2e-5, 19.0, 1000),
        ] {
            assert!(f64::sqrt(eta) * beta * n as f64 >= 10.0);
            let f = ConcentrationFactor::noise_adapted(eta, beta, n).unwrap();
            let r = energy_report(&f, eta, EnergyVariant::L2Regular).unwrap();
            ratios.push(r.e_noise * beta / libm::sqrt(eta));
        }
        let max = ratios.iter().fold(0.0f64, |m, &v| m.max(v));
        let min = ratios.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        assert!(max / min <= 1.25, "ratios {ratios:?}");
    }

    #[test]
    fn energies_scale_homogeneously() {
        let n = 64;
        let table: Vec<f64> = (1..=n).map(|k| 0.1 + (k as f64 / n as f64)).collect();
        let scaled: Vec<f64> = table.iter().map(|v| 3.0 * v).collect();
        let f1 = ConcentrationFactor::custom(table, false).unwrap();
        let f3 = ConcentrationFactor::custom(scaled, false).unwrap();
        let eta = 1e-3;
        let a = energy_report(&f1, eta, EnergyVariant::BvRegular).unwrap();
        let b = energy_report(&f3, eta, EnergyVariant::BvRegular).unwrap();
        assert!((b.e_jump / a.e_jump - 9.0).abs() < 1e-12);
        assert!((b.e_noise / a.e_noise - 9.0).abs() < 1e-12);
        assert!((b.e_regular / a.e_regular - 3.0).abs() < 1e-12);
    }

    #[test]
    fn beta_policy_values() {
        assert!((beta_policy(2e-5).unwrap() - 19.07).abs() < 0.01);
        assert!((beta_policy(4.5e-5).unwrap() - 16.66).abs() < 0.01);
        let eta = libm::pow(PI, 6.0) * 1e-6;
        assert!((beta_policy(eta).unwrap() - 10.0).abs() < 1e-12);
        assert!(beta_policy(1.0).is_err());
        assert!(beta_policy(0.0).is_err());
    }

    #[test]
    fn optimizer_beats_the_grid_and_the_policy_point() {
        let eta = 1e-4;
        let n = 1000;
        let beta_star = optimize_beta(eta, n, (0.5, 50.0)).unwrap();
        let g_star = beta_objective(eta, n, beta_star).unwrap();
        for i in 0..100 {
            let b = 0.5 * libm::exp(libm::log(100.0) * i as f64 / 99.0);
            assert!(g_star <= beta_objective(eta, n, b).unwrap() + 1e-12);
        }
        let policy = beta_policy(eta).unwrap();
        assert!(g_star <= beta_objective(eta, n, policy).unwrap());
    }

    #[test]
    fn optimizer_flags_boundary_minima() {
        // objective is increasing on [20, 50] for eta = 1e-4
        let err = optimize_beta(1e-4, 1000, (20.0, 50.0)).unwrap_err();
        match err {
            Error::NoInteriorMinimum { boundary_beta, .. } => {
                assert!((boundary_beta - 20.0).abs() < 1e-9)
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn doubling_the_objective_moves_no_minimum() {
        let eta = 1e-5;
        let n = 500;
        let mut best_plain = (f64::INFINITY, 0.0);
        let mut best_doubled = (f64::INFINITY, 0.0);
        for i in 0..60 {
            let b = 0.5 * libm::exp(libm::log(60.0) * i as f64 / 59.0);
            let g = beta_objective(eta, n, b).unwrap();
            if g < best_plain.0 {
                best_plain = (g, b);
            }
            if 2.0 * g < best_doubled.0 {
                best_doubled = (2.0 * g, b);
            }
        }
        assert_eq!(best_plain.1, best_doubled.1);
    }

    #[test]
    fn monte_carlo_without_noise_has_zero_variance() {
        let summary = monte_carlo_scale(
            &SignalSpec::sawtooth(),
            64,
            0.0,
            |_, n| ConcentrationFactor::classical(n),
            &MonteCarloConfig::new(3, 11),
        )
        .unwrap();
        assert_eq!(summary.records.len(), 3);
        for j in &summary.jumps {
            assert_eq!(j.std_estimate, 0.0);
        }
        assert_eq!(summary.detection_rate, 1.0);
        let r0 = &summary.records[0];
        for r in &summary.records {
            assert_eq!(r.jump_estimates, r0.jump_estimates);
            assert_eq!(r.plateau_rms, r0.plateau_rms);
        }
    }
}

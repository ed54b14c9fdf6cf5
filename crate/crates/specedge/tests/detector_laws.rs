//! Scale-separation laws of the conjugate-sum detector on catalog signals.

use specedge::analysis::{epsilon_diagnostics, monte_carlo_scale, MonteCarloConfig};
use specedge::detect::{conjugate_sum, default_grid, predicted_scale};
use specedge::factor::ConcentrationFactor;
use specedge::periodic_distance;
use specedge::signal::{Harmonic, Jump, SignalSpec, SmoothPart};
use specedge::spectral::analytic_coefficients;

const PI: f64 = std::f64::consts::PI;

fn plateau_max(grid: &[f64], samples: &[f64], jumps: &[Jump], exclusion: f64) -> f64 {
    grid.iter()
        .zip(samples)
        .filter(|(x, _)| {
            jumps
                .iter()
                .all(|j| periodic_distance(**x, j.location) > exclusion)
        })
        .map(|(_, s)| s.abs())
        .fold(0.0, f64::max)
}

#[test]
#[allow(clippy::needless_range_loop)]
fn translation_equivariance_on_the_grid() {
    let n = 96;
    let grid = default_grid(n);
    let h = grid[1] - grid[0];
    let shift_cells = 150usize;
    let delta = shift_cells as f64 * h;

    let base = SignalSpec::sawtooth();
    let shifted = SignalSpec::new(
        vec![Jump {
            location: delta,
            amplitude: 1.0,
        }],
        SmoothPart::Zero,
    )
    .unwrap();
    let factor = ConcentrationFactor::classical(n).unwrap();
    let k0 = conjugate_sum(&analytic_coefficients(&base, n).unwrap(), &factor, &grid).unwrap();
    let k1 = conjugate_sum(&analytic_coefficients(&shifted, n).unwrap(), &factor, &grid).unwrap();

    let g = grid.len();
    for i in 0..g {
        let j = (i + shift_cells) % g;
        assert!(
            (k1[j] - k0[i]).abs() <= 1e-10,
            "shift mismatch at cell {i}: {} vs {}",
            k1[j],
            k0[i]
        );
    }
}

#[test]
fn detector_output_is_even_about_a_sawtooth_jump() {
    let n = 128;
    let grid = default_grid(n);
    let data = analytic_coefficients(&SignalSpec::sawtooth(), n).unwrap();
    let factor = ConcentrationFactor::classical(n).unwrap();
    let k = conjugate_sum(&data, &factor, &grid).unwrap();
    let g = grid.len();
    // grid index of -x_i is g - i - 2 (x = pi has no mirror image; skip it)
    for i in 0..g - 1 {
        let j = g - i - 2;
        assert!((k[i] - k[j]).abs() <= 1e-12, "cell {i}");
    }
}

#[test]
fn even_symmetry_up_to_the_small_scale_for_composite_signals() {
    let n = 256;
    let signal = SignalSpec::new(
        vec![Jump {
            location: 0.5,
            amplitude: 1.0,
        }],
        SmoothPart::Harmonics {
            terms: vec![Harmonic {
                mode: 1,
                cos_amp: 1.0,
                sin_amp: 0.0,
            }],
        },
    )
    .unwrap();
    let grid = default_grid(n);
    let data = analytic_coefficients(&signal, n).unwrap();
    let factor = ConcentrationFactor::classical(n).unwrap();
    let k = conjugate_sum(&data, &factor, &grid).unwrap();
    let eps = predicted_scale(0.0, 1.0, n).unwrap();

    let h = grid[1] - grid[0];
    let center = ((0.5 + PI) / h - 1.0).round() as usize;
    for offset in 1..(grid.len() / 4) {
        let plus = k[(center + offset) % grid.len()];
        let minus = k[(center + grid.len() - offset) % grid.len()];
        assert!(
            (plus - minus).abs() <= 5.0 * eps,
            "offset {offset}: {plus} vs {minus}"
        );
    }
}

#[test]
fn concentration_at_jumps_and_plateau_bound() {
    // both branches of the scale-separation law, constants reported
    for n in [128usize, 512] {
        let signal = SignalSpec::new(
            vec![
                Jump {
                    location: -PI / 2.0,
                    amplitude: 1.0,
                },
                Jump {
                    location: PI / 2.0,
                    amplitude: -0.5,
                },
            ],
            SmoothPart::Harmonics {
                terms: vec![Harmonic {
                    mode: 2,
                    cos_amp: 0.3,
                    sin_amp: 0.1,
                }],
            },
        )
        .unwrap();
        let eps = predicted_scale(0.0, 1.0, n).unwrap();
        let grid = default_grid(n);
        let data = analytic_coefficients(&signal, n).unwrap();
        let factor = ConcentrationFactor::classical(n).unwrap();
        let k = conjugate_sum(&data, &factor, &grid).unwrap();

        for j in signal.jumps() {
            let (i, _) = grid
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    periodic_distance(*a.1, j.location)
                        .total_cmp(&periodic_distance(*b.1, j.location))
                })
                .unwrap();
            let err = (k[i] - j.amplitude).abs();
            let c = err / eps;
            println!("N = {n}: |K - [f]| at jump {} = {err:.3e} ({c:.2} eps)", j.location);
            assert!(err <= 5.0 * eps, "concentration constant {c}");
        }
        let p = plateau_max(&grid, &k, signal.jumps(), 10.0 * eps);
        println!("N = {n}: plateau max = {p:.3e} ({:.2} eps)", p / eps);
        assert!(p <= 5.0 * eps, "plateau constant {}", p / eps);
    }
}

#[test]
fn epsilon_diagnostics_bound_the_classical_plateau() {
    // eps_total of the classical factor dominates the observed plateau
    for n in [64usize, 256, 1024] {
        let d = epsilon_diagnostics(&ConcentrationFactor::classical(n).unwrap());
        let grid = default_grid(n);
        let data = analytic_coefficients(&SignalSpec::sawtooth(), n).unwrap();
        let factor = ConcentrationFactor::classical(n).unwrap();
        let k = conjugate_sum(&data, &factor, &grid).unwrap();
        let eps = predicted_scale(0.0, 1.0, n).unwrap();
        let p = plateau_max(&grid, &k, &[Jump { location: 0.0, amplitude: 1.0 }], 10.0 * eps);
        assert!(
            p <= 3.0 * d.eps_total,
            "N = {n}: plateau {p} vs eps_total {}",
            d.eps_total
        );
    }
}

#[test]
fn monte_carlo_separates_scales_in_noise() {
    // the detector-level claim: jump estimates near 1, plateau near eps_eta,
    // and the jump found every trial within the theory's localization scale
    let n = 1000;
    let eta = 1e-4;
    let beta = specedge::analysis::beta_policy(eta).unwrap();
    let eps = predicted_scale(eta, beta, n).unwrap();
    let mut cfg = MonteCarloConfig::new(20, 7);
    cfg.match_window = Some(eps);
    let summary = monte_carlo_scale(
        &SignalSpec::sawtooth(),
        n,
        eta,
        |e, nn| ConcentrationFactor::noise_adapted(e, beta, nn),
        &cfg,
    )
    .unwrap();
    assert!((summary.jumps[0].mean_estimate - 1.0).abs() <= 3.0 * eps);
    assert!(summary.plateau_rms <= 5.0 * eps);
    assert!(summary.plateau_max <= 2.0 * eps);
    assert_eq!(summary.detection_rate, 1.0);
}

//! Detect the sawtooth jump from noisy spectral data.

use specedge::analysis::beta_policy;
use specedge::detect::{
    conjugate_sum, default_grid, detect_edges, predicted_scale, ThresholdPolicy,
};
use specedge::factor::ConcentrationFactor;
use specedge::signal::SignalSpec;
use specedge::spectral::{add_white_noise, analytic_coefficients};

fn main() -> Result<(), specedge::Error> {
    let n = 1000;
    let eta = 1e-4;
    let signal = SignalSpec::sawtooth();
    let data = add_white_noise(&analytic_coefficients(&signal, n)?, eta, 42)?;
    let beta = beta_policy(eta)?;
    let factor = ConcentrationFactor::noise_adapted(eta, beta, n)?;
    let grid = default_grid(n);
    let samples = conjugate_sum(&data, &factor, &grid)?;
    let eps = predicted_scale(eta, beta, n)?;
    let result = detect_edges(&grid, &samples, n, eps, &ThresholdPolicy::default())?;
    for edge in &result.edges {
        println!("jump at {:+.4} of size {:+.4}", edge.location, edge.amplitude);
    }
    Ok(())
}

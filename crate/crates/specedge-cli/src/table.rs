//! CSV artifact writers. All numeric cells use 17 significant digits so
//! doubles round-trip exactly and regression diffs are byte-stable.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use specedge::analysis::MonteCarloSummary;
use specedge::detect::DetectionResult;
use specedge::factor::ConcentrationFactor;
use specedge::spectral::SpectralData;

use crate::CliError;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_coefficients(path: &Path, data: &SpectralData) -> Result<(), CliError> {
    let n = data.n_modes() as i64;
    let mut out = String::new();
    writeln!(out, "# spectral coefficients").unwrap();
    writeln!(
        out,
        "# n_modes = {}, noise_variance = {}, seed = {}",
        data.n_modes(),
        data.noise_variance()
            .map_or("none".to_string(), fmt_f64),
        data.seed().map_or("none".to_string(), |s| s.to_string()),
    )
    .unwrap();
    writeln!(out, "k,re,im").unwrap();
    for k in -n..=n {
        let c = data.coeff(k);
        writeln!(out, "{k},{},{}", fmt_f64(c.re), fmt_f64(c.im)).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_factor(path: &Path, factor: &ConcentrationFactor) -> Result<(), CliError> {
    let p = factor.params();
    let mut out = String::new();
    writeln!(
        out,
        "# family = {}, n_modes = {}, eta = {}, beta = {}, k0 = {}, n0 = {}, eps_reg = {}, norm_constant = {}",
        factor.family().as_str(),
        factor.n_modes(),
        fmt_f64(p.eta),
        fmt_f64(p.beta),
        fmt_f64(p.k0),
        p.n0,
        fmt_f64(p.epsilon_reg),
        fmt_f64(factor.norm_constant()),
    )
    .unwrap();
    writeln!(out, "k,s_k").unwrap();
    for k in 1..=factor.n_modes() {
        writeln!(out, "{k},{}", fmt_f64(factor.value(k))).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

/// Detector output: parameter header, `x,k_value` rows, then the edge list
/// as a trailing section.
pub fn write_samples(path: &Path, result: &DetectionResult) -> Result<(), CliError> {
    let mut out = String::new();
    writeln!(
        out,
        "# detector samples: epsilon_predicted = {}, threshold = {}, edges = {}",
        fmt_f64(result.epsilon_predicted),
        fmt_f64(result.threshold_used),
        result.edges.len(),
    )
    .unwrap();
    writeln!(out, "x,k_value").unwrap();
    for (x, v) in result.grid.iter().zip(&result.samples) {
        writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*v)).unwrap();
    }
    writeln!(out, "# edges").unwrap();
    writeln!(out, "location,amplitude").unwrap();
    for e in &result.edges {
        writeln!(out, "{},{}", fmt_f64(e.location), fmt_f64(e.amplitude)).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_edges(path: &Path, result: &DetectionResult) -> Result<(), CliError> {
    let mut out = String::new();
    writeln!(out, "# detected edges").unwrap();
    writeln!(out, "location,amplitude").unwrap();
    for e in &result.edges {
        writeln!(out, "{},{}", fmt_f64(e.location), fmt_f64(e.amplitude)).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

pub struct SweepRow {
    pub value: f64,
    pub plateau_rms: f64,
    pub plateau_max: f64,
    pub amp_error: f64,
    pub epsilon_predicted: f64,
}

pub fn write_sweep_summary(path: &Path, param: &str, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut out = String::new();
    writeln!(out, "# sweep over {param}").unwrap();
    writeln!(out, "value,plateau_rms,plateau_max,amp_error,epsilon_predicted").unwrap();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.value),
            fmt_f64(r.plateau_rms),
            fmt_f64(r.plateau_max),
            fmt_f64(r.amp_error),
            fmt_f64(r.epsilon_predicted),
        )
        .unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

/// One row per trial, then an aggregate row with `trial = -1` carrying the
/// mean estimates, pooled plateau RMS, worst plateau max, and the detection
/// rate.
pub fn write_montecarlo(path: &Path, summary: &MonteCarloSummary) -> Result<(), CliError> {
    let mut out = String::new();
    writeln!(
        out,
        "# monte carlo: trials = {}, grid_size = {}, epsilon_predicted = {}, match_window = {}",
        summary.records.len(),
        summary.grid_size,
        fmt_f64(summary.epsilon_predicted),
        fmt_f64(summary.match_window),
    )
    .unwrap();
    let jumps = summary.jumps.len();
    let estimate_cols: Vec<String> = (1..=jumps).map(|j| format!("estimate_{j}")).collect();
    writeln!(
        out,
        "trial,{},plateau_rms,plateau_max,jumps_detected",
        estimate_cols.join(",")
    )
    .unwrap();
    for r in &summary.records {
        let est: Vec<String> = r.jump_estimates.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(
            out,
            "{},{},{},{},{}",
            r.trial,
            est.join(","),
            fmt_f64(r.plateau_rms),
            fmt_f64(r.plateau_max),
            r.jumps_detected,
        )
        .unwrap();
    }
    writeln!(
        out,
        "# aggregate row: trial = -1, mean estimates, pooled rms, max plateau, detection rate"
    )
    .unwrap();
    let means: Vec<String> = summary
        .jumps
        .iter()
        .map(|j| fmt_f64(j.mean_estimate))
        .collect();
    writeln!(
        out,
        "-1,{},{},{},{}",
        means.join(","),
        fmt_f64(summary.plateau_rms),
        fmt_f64(summary.plateau_max),
        fmt_f64(summary.detection_rate),
    )
    .unwrap();
    fs::write(path, out)?;
    Ok(())
}

//! The run manifest: a re-runnable `key = value` echo of every resolved
//! parameter, with derived quantities and preset notes as comments.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::{BetaChoice, ExperimentConfig, SignalChoice, TermKind};
use crate::table::fmt_f64;
use crate::CliError;

pub fn render(cfg: &ExperimentConfig, derived: &[(String, String)]) -> Result<String, CliError> {
    let mut out = String::new();
    writeln!(out, "# specedge run manifest (re-runnable configuration)").unwrap();
    for note in &cfg.notes {
        writeln!(out, "# note: {note}").unwrap();
    }
    for (key, value) in derived {
        writeln!(out, "# derived: {key} = {value}").unwrap();
    }

    match cfg.signal {
        SignalChoice::Sawtooth => writeln!(out, "signal = sawtooth").unwrap(),
        SignalChoice::Custom => {
            writeln!(out, "signal = custom").unwrap();
            let jumps: Vec<String> = cfg
                .jumps
                .iter()
                .map(|(l, a)| format!("{}:{}", fmt_f64(*l), fmt_f64(*a)))
                .collect();
            writeln!(out, "jumps = {}", jumps.join(",")).unwrap();
        }
    }
    if !cfg.smooth.is_empty() {
        let terms: Vec<String> = cfg
            .smooth
            .iter()
            .map(|t| {
                format!(
                    "{}:{}:{}",
                    match t.kind {
                        TermKind::Cos => "cos",
                        TermKind::Sin => "sin",
                    },
                    t.mode,
                    fmt_f64(t.amplitude)
                )
            })
            .collect();
        writeln!(out, "smooth = {}", terms.join(",")).unwrap();
    }
    writeln!(out, "n_modes = {}", cfg.n_modes).unwrap();
    writeln!(out, "eta = {}", fmt_f64(cfg.eta)).unwrap();
    writeln!(out, "add_noise = {}", cfg.add_noise).unwrap();
    writeln!(out, "seed = {}", cfg.seed).unwrap();
    writeln!(out, "factor = {}", cfg.factor.as_str()).unwrap();
    // beta is echoed resolved so a re-run needs no policy lookup
    let beta = match cfg.beta {
        BetaChoice::Auto => cfg.resolved_beta()?,
        BetaChoice::Fixed(b) => b,
    };
    writeln!(out, "beta = {}", fmt_f64(beta)).unwrap();
    writeln!(out, "k0 = {}", fmt_f64(cfg.k0)).unwrap();
    writeln!(out, "n0 = {}", cfg.n0).unwrap();
    writeln!(out, "eps_reg = {}", fmt_f64(cfg.eps_reg)).unwrap();
    writeln!(out, "grid_size = {}", cfg.grid_size).unwrap();
    writeln!(out, "c_abs = {}", fmt_f64(cfg.c_abs)).unwrap();
    writeln!(out, "c_rel = {}", fmt_f64(cfg.c_rel)).unwrap();
    writeln!(out, "trials = {}", cfg.trials).unwrap();
    writeln!(out, "out_dir = {}", cfg.out_dir.display()).unwrap();
    Ok(out)
}

pub fn write(path: &Path, cfg: &ExperimentConfig, derived: &[(String, String)]) -> Result<(), CliError> {
    fs::write(path, render(cfg, derived)?)?;
    Ok(())
}

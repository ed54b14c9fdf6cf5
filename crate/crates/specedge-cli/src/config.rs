//! Experiment configuration: flat `key = value` files, presets, and
//! command-line overrides, merged in that order.

use std::collections::BTreeMap;
use std::path::PathBuf;

use specedge::analysis::beta_policy;
use specedge::signal::{Harmonic, Jump, SignalSpec, SmoothPart};
use specedge::Error;

use crate::CliError;

pub const PI: f64 = std::f64::consts::PI;

/// The configuration keys, in canonical manifest order.
pub const KEYS: &[&str] = &[
    "signal", "jumps", "smooth", "n_modes", "eta", "add_noise", "seed", "factor", "beta", "k0",
    "n0", "eps_reg", "grid_size", "c_abs", "c_rel", "trials", "out_dir",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalChoice {
    Sawtooth,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorChoice {
    Classical,
    NoiseAdapted,
    Truncated,
    Regularized,
}

impl FactorChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            FactorChoice::Classical => "classical",
            FactorChoice::NoiseAdapted => "noise_adapted",
            FactorChoice::Truncated => "truncated",
            FactorChoice::Regularized => "regularized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaChoice {
    /// `pi * eta^(-1/6)`
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothTerm {
    pub kind: TermKind,
    pub mode: u32,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    Cos,
    Sin,
}

/// A partially-specified configuration; later overlays win.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverlay {
    pub signal: Option<String>,
    pub jumps: Option<String>,
    pub smooth: Option<String>,
    pub n_modes: Option<usize>,
    pub eta: Option<f64>,
    pub add_noise: Option<bool>,
    pub seed: Option<u64>,
    pub factor: Option<String>,
    pub beta: Option<String>,
    pub k0: Option<f64>,
    pub n0: Option<usize>,
    pub eps_reg: Option<f64>,
    pub grid_size: Option<usize>,
    pub c_abs: Option<f64>,
    pub c_rel: Option<f64>,
    pub trials: Option<u32>,
    pub out_dir: Option<PathBuf>,
    pub notes: Vec<String>,
}

impl ConfigOverlay {
    pub fn merge(mut self, later: ConfigOverlay) -> ConfigOverlay {
        macro_rules! take {
            ($field:ident) => {
                if later.$field.is_some() {
                    self.$field = later.$field;
                }
            };
        }
        take!(signal);
        take!(jumps);
        take!(smooth);
        take!(n_modes);
        take!(eta);
        take!(add_noise);
        take!(seed);
        take!(factor);
        take!(beta);
        take!(k0);
        take!(n0);
        take!(eps_reg);
        take!(grid_size);
        take!(c_abs);
        take!(c_rel);
        take!(trials);
        take!(out_dir);
        self.notes.extend(later.notes);
        self
    }

    /// Parse a flat `key = value` file; `#` starts a comment, unknown keys
    /// are rejected.
    pub fn parse(text: &str) -> Result<ConfigOverlay, CliError> {
        let mut map: BTreeMap<&str, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim().to_string();
            if !KEYS.contains(&key) {
                return Err(CliError::config(format!(
                    "line {}: unknown key '{key}'",
                    lineno + 1
                )));
            }
            if map.insert(key, value).is_some() {
                return Err(CliError::config(format!(
                    "line {}: duplicate key '{key}'",
                    lineno + 1
                )));
            }
        }

        let mut o = ConfigOverlay::default();
        for (key, value) in map {
            match key {
                "signal" => o.signal = Some(value),
                "jumps" => o.jumps = Some(value),
                "smooth" => o.smooth = Some(value),
                "n_modes" => o.n_modes = Some(parse_num(key, &value)?),
                "eta" => o.eta = Some(parse_num(key, &value)?),
                "add_noise" => o.add_noise = Some(parse_bool(key, &value)?),
                "seed" => o.seed = Some(parse_num(key, &value)?),
                "factor" => o.factor = Some(value),
                "beta" => o.beta = Some(value),
                "k0" => o.k0 = Some(parse_k0(&value)?),
                "n0" => o.n0 = Some(parse_num(key, &value)?),
                "eps_reg" => o.eps_reg = Some(parse_num(key, &value)?),
                "grid_size" => o.grid_size = Some(parse_num(key, &value)?),
                "c_abs" => o.c_abs = Some(parse_num(key, &value)?),
                "c_rel" => o.c_rel = Some(parse_num(key, &value)?),
                "trials" => o.trials = Some(parse_num(key, &value)?),
                "out_dir" => o.out_dir = Some(PathBuf::from(value)),
                _ => unreachable!("key list checked above"),
            }
        }
        Ok(o)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::config(format!("key '{key}': cannot parse '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::config(format!(
            "key '{key}': expected true/false, got '{value}'"
        ))),
    }
}

/// `k0` accepts plain numbers and the convenience forms `8pi` / `8*pi`.
fn parse_k0(value: &str) -> Result<f64, CliError> {
    let v = value.trim();
    if let Some(mult) = v.strip_suffix("pi").map(|m| m.trim_end_matches('*').trim()) {
        if mult.is_empty() {
            return Ok(PI);
        }
        return mult
            .parse::<f64>()
            .map(|m| m * PI)
            .map_err(|_| CliError::config(format!("key 'k0': cannot parse '{value}'")));
    }
    parse_num("k0", v)
}

/// A fully-resolved experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub signal: SignalChoice,
    pub jumps: Vec<(f64, f64)>,
    pub smooth: Vec<SmoothTerm>,
    pub n_modes: usize,
    pub eta: f64,
    pub add_noise: bool,
    pub seed: u64,
    pub factor: FactorChoice,
    pub beta: BetaChoice,
    pub k0: f64,
    pub n0: usize,
    pub eps_reg: f64,
    pub grid_size: usize,
    pub c_abs: f64,
    pub c_rel: f64,
    pub trials: u32,
    pub out_dir: PathBuf,
    pub notes: Vec<String>,
}

impl ExperimentConfig {
    /// Resolve an overlay against the defaults, validating every
    /// precondition of the operations the configuration feeds.
    pub fn resolve(o: &ConfigOverlay) -> Result<ExperimentConfig, CliError> {
        let signal = match o.signal.as_deref().unwrap_or("sawtooth") {
            "sawtooth" => SignalChoice::Sawtooth,
            "custom" => SignalChoice::Custom,
            other => {
                return Err(CliError::config(format!(
                    "signal must be 'sawtooth' or 'custom', got '{other}'"
                )))
            }
        };
        let jumps = match (&o.jumps, signal) {
            (Some(s), SignalChoice::Custom) => parse_jumps(s)?,
            (Some(_), SignalChoice::Sawtooth) => {
                return Err(CliError::config("key 'jumps' requires signal = custom"))
            }
            (None, SignalChoice::Custom) => {
                return Err(CliError::config("signal = custom requires a 'jumps' list"))
            }
            (None, SignalChoice::Sawtooth) => vec![(0.0, 1.0)],
        };
        let smooth = match &o.smooth {
            Some(s) => parse_smooth(s)?,
            None => vec![],
        };

        let n_modes = o.n_modes.unwrap_or(128);
        if n_modes < 2 {
            return Err(CliError::config("n_modes must be >= 2"));
        }
        let eta = o.eta.unwrap_or(0.0);
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(CliError::config("eta must be finite and >= 0"));
        }
        let add_noise = o.add_noise.unwrap_or(eta > 0.0);
        if add_noise && eta == 0.0 {
            return Err(CliError::config("add_noise = true requires eta > 0"));
        }

        let factor = match o.factor.as_deref().unwrap_or(if eta > 0.0 {
            "noise_adapted"
        } else {
            "classical"
        }) {
            "classical" | "classical_linear" => FactorChoice::Classical,
            "noise_adapted" => FactorChoice::NoiseAdapted,
            "truncated" | "truncated_optimal" => FactorChoice::Truncated,
            "regularized" | "regularized_optimal" => FactorChoice::Regularized,
            other => {
                return Err(CliError::config(format!(
                    "factor must be classical | noise_adapted | truncated | regularized, got '{other}'"
                )))
            }
        };
        if factor != FactorChoice::Classical && eta <= 0.0 {
            return Err(CliError::config(format!(
                "factor = {} requires eta > 0",
                factor.as_str()
            )));
        }

        let beta = match o.beta.as_deref().unwrap_or("auto") {
            "auto" => BetaChoice::Auto,
            v => BetaChoice::Fixed(
                v.parse()
                    .map_err(|_| CliError::config(format!("beta must be 'auto' or a number, got '{v}'")))?,
            ),
        };
        if let BetaChoice::Fixed(b) = beta {
            if !(b.is_finite() && b > 0.0) {
                return Err(CliError::config("beta must be > 0"));
            }
        }

        let k0 = o.k0.unwrap_or(0.0);
        if !(k0.is_finite() && k0 >= 0.0) {
            return Err(CliError::config("k0 must be finite and >= 0"));
        }
        let n0 = o.n0.unwrap_or(n_modes);
        if factor == FactorChoice::Truncated {
            if k0 >= n0 as f64 {
                return Err(CliError::config(format!(
                    "precondition violated: k0 < N0 (k0 = {k0}, n0 = {n0})"
                )));
            }
            if n0 > n_modes {
                return Err(CliError::config(format!(
                    "precondition violated: N0 <= N (n0 = {n0}, n_modes = {n_modes})"
                )));
            }
        }
        if factor == FactorChoice::Regularized && k0 >= n_modes as f64 {
            return Err(CliError::config("precondition violated: k0 < N"));
        }
        let eps_reg = o.eps_reg.unwrap_or(0.01);
        if factor == FactorChoice::Regularized && !(eps_reg.is_finite() && eps_reg > 0.0) {
            return Err(CliError::config("eps_reg must be > 0"));
        }

        let grid_size = o.grid_size.unwrap_or(8 * n_modes);
        if grid_size < 2 * n_modes {
            return Err(CliError::config(format!(
                "precondition violated: grid spacing must satisfy h <= pi/N (grid_size >= {})",
                2 * n_modes
            )));
        }

        let c_abs = o.c_abs.unwrap_or(1.5);
        let c_rel = o.c_rel.unwrap_or(0.3);
        if !(c_abs.is_finite() && c_abs >= 0.0 && c_rel.is_finite() && c_rel >= 0.0) {
            return Err(CliError::config("c_abs and c_rel must be finite and >= 0"));
        }
        let trials = o.trials.unwrap_or(100);
        if trials == 0 {
            return Err(CliError::config("trials must be >= 1"));
        }

        Ok(ExperimentConfig {
            signal,
            jumps,
            smooth,
            n_modes,
            eta,
            add_noise,
            seed: o.seed.unwrap_or(0),
            factor,
            beta,
            k0,
            n0,
            eps_reg,
            grid_size,
            c_abs,
            c_rel,
            trials,
            out_dir: o.out_dir.clone().unwrap_or_else(|| PathBuf::from("specedge-out")),
            notes: o.notes.clone(),
        })
    }

    pub fn signal_spec(&self) -> Result<SignalSpec, Error> {
        let jumps = self
            .jumps
            .iter()
            .map(|&(location, amplitude)| Jump {
                location,
                amplitude,
            })
            .collect();
        let smooth = if self.smooth.is_empty() {
            SmoothPart::Zero
        } else {
            SmoothPart::Harmonics {
                terms: self
                    .smooth
                    .iter()
                    .map(|t| Harmonic {
                        mode: t.mode,
                        cos_amp: if t.kind == TermKind::Cos { t.amplitude } else { 0.0 },
                        sin_amp: if t.kind == TermKind::Sin { t.amplitude } else { 0.0 },
                    })
                    .collect(),
            }
        };
        SignalSpec::new(jumps, smooth)
    }

    /// The beta actually applied (`auto` resolves against `eta`).
    pub fn resolved_beta(&self) -> Result<f64, CliError> {
        match self.beta {
            BetaChoice::Fixed(b) => Ok(b),
            BetaChoice::Auto => {
                if self.factor == FactorChoice::Classical {
                    Ok(1.0)
                } else {
                    beta_policy(self.eta).map_err(CliError::from)
                }
            }
        }
    }
}

/// `"loc:amp,loc:amp"` with locations in radians.
pub fn parse_jumps(s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut jumps = vec![];
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (loc, amp) = part
            .split_once(':')
            .ok_or_else(|| CliError::config(format!("jumps entry '{part}': expected loc:amp")))?;
        jumps.push((
            parse_num::<f64>("jumps", loc.trim())?,
            parse_num::<f64>("jumps", amp.trim())?,
        ));
    }
    if jumps.is_empty() {
        return Err(CliError::config("jumps list is empty"));
    }
    Ok(jumps)
}

/// `"cos:1:1.0,sin:2:0.5"` — kind, integer mode, amplitude.
pub fn parse_smooth(s: &str) -> Result<Vec<SmoothTerm>, CliError> {
    let mut terms = vec![];
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let fields: Vec<&str> = part.split(':').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(CliError::config(format!(
                "smooth entry '{part}': expected kind:mode:amplitude"
            )));
        }
        let kind = match fields[0] {
            "cos" => TermKind::Cos,
            "sin" => TermKind::Sin,
            other => {
                return Err(CliError::config(format!(
                    "smooth entry '{part}': kind must be cos or sin, got '{other}'"
                )))
            }
        };
        terms.push(SmoothTerm {
            kind,
            mode: parse_num("smooth", fields[1])?,
            amplitude: parse_num("smooth", fields[2])?,
        });
    }
    Ok(terms)
}

/// Built-in experiment presets.
pub fn preset(name: &str) -> Result<ConfigOverlay, CliError> {
    let mut o = ConfigOverlay::default();
    match name {
        // noiseless input, the factor's eta swept over {1e-3, 1e-4}
        "fig1" => {
            o.signal = Some("sawtooth".into());
            o.n_modes = Some(1000);
            o.eta = Some(1e-3);
            o.add_noise = Some(false);
            o.factor = Some("noise_adapted".into());
            o.beta = Some("1".into());
            o.seed = Some(1001);
            o.notes = vec![
                "preset fig1: the factor responds to eta, the input spectrum is noiseless; \
                 sweep eta over 1e-3,1e-4"
                    .into(),
                "preset fig1: n_modes fixed at 1000".into(),
            ];
        }
        // noisy sawtooth, beta = pi * eta^(-1/6)
        "fig2" => {
            o.signal = Some("sawtooth".into());
            o.n_modes = Some(1000);
            o.eta = Some(1e-4);
            o.add_noise = Some(true);
            o.factor = Some("noise_adapted".into());
            o.beta = Some("auto".into());
            o.seed = Some(2002);
            o.notes = vec![
                "preset fig2: noisy sawtooth; sweep eta over 1e-3,1e-4,1e-5 for the panels".into(),
            ];
        }
        "fig3-case1" | "fig3-case2" => {
            let (eta, k0) = if name == "fig3-case1" {
                (2e-5, "8pi")
            } else {
                (4.5e-5, "6pi")
            };
            o.signal = Some("custom".into());
            o.jumps = Some("0.0:1.0".into());
            o.smooth = Some("cos:1:1.0,sin:2:0.5".into());
            o.n_modes = Some(1000);
            o.eta = Some(eta);
            o.add_noise = Some(true);
            o.factor = Some("truncated".into());
            o.beta = Some("auto".into());
            o.k0 = Some(parse_k0(k0)?);
            o.n0 = Some(1000);
            o.seed = Some(if name == "fig3-case1" { 3003 } else { 3004 });
            o.notes = vec![
                "preset fig3: smooth part fixed to the canonical choice cos x + 0.5 sin 2x".into(),
                "preset fig3: n_modes = n0 = 1000; modes above the band cutoff carry zero \
                 weight, so larger n_modes is equivalent"
                    .into(),
            ];
        }
        other => {
            return Err(CliError::config(format!(
                "unknown preset '{other}' (use fig1, fig2, fig3-case1, fig3-case2)"
            )))
        }
    }
    Ok(o)
}

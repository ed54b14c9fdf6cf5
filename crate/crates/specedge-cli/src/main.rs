use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use specedge_cli::config::{preset, ConfigOverlay, ExperimentConfig};
use specedge_cli::runner;
use specedge_cli::CliError;

/// Detect jump discontinuities from truncated Fourier data using
/// concentration kernels, optionally adapted to spectral white noise.
#[derive(Parser)]
#[command(name = "specedge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the detection pipeline once and write coefficient, factor,
    /// sample, and edge tables plus a re-runnable manifest.
    Detect(RunArgs),
    /// Run the pipeline over a list of values of one parameter and write a
    /// summary table (plateau size, amplitude error, predicted scale).
    Sweep(SweepArgs),
    /// Seeded Monte Carlo over fresh noise realizations.
    Montecarlo(RunArgs),
    /// Dump the configured concentration factor as a two-column table.
    Factors(RunArgs),
}

/// Configuration sources, later ones winning: preset, config file, flags.
/// Every flag mirrors a config key of the same name.
#[derive(Args)]
struct RunArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in experiment: fig1, fig2, fig3-case1, fig3-case2.
    #[arg(long)]
    preset: Option<String>,
    /// sawtooth | custom
    #[arg(long)]
    signal: Option<String>,
    /// Jump list "loc:amp,loc:amp" (radians), for signal = custom.
    #[arg(long)]
    jumps: Option<String>,
    /// Smooth part "cos:1:1.0,sin:2:0.5".
    #[arg(long)]
    smooth: Option<String>,
    #[arg(long = "n_modes")]
    n_modes: Option<usize>,
    /// Per-mode noise power.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long = "add_noise")]
    add_noise: Option<bool>,
    #[arg(long)]
    seed: Option<u64>,
    /// classical | noise_adapted | truncated | regularized
    #[arg(long)]
    factor: Option<String>,
    /// "auto" (pi * eta^(-1/6)) or a number.
    #[arg(long)]
    beta: Option<String>,
    /// Lower mode cutoff; accepts "8pi".
    #[arg(long)]
    k0: Option<String>,
    #[arg(long)]
    n0: Option<usize>,
    #[arg(long = "eps_reg")]
    eps_reg: Option<f64>,
    #[arg(long = "grid_size")]
    grid_size: Option<usize>,
    #[arg(long = "c_abs")]
    c_abs: Option<f64>,
    #[arg(long = "c_rel")]
    c_rel: Option<f64>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long = "out_dir")]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Parameter to sweep: eta | N | beta | k0.
    #[arg(long)]
    param: String,
    /// Comma-separated value list.
    #[arg(long)]
    values: String,
}

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut overlay = ConfigOverlay::default();
        if let Some(name) = &self.preset {
            overlay = overlay.merge(preset(name)?);
        }
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            overlay = overlay.merge(ConfigOverlay::parse(&text)?);
        }
        let flags = ConfigOverlay {
            signal: self.signal.clone(),
            jumps: self.jumps.clone(),
            smooth: self.smooth.clone(),
            n_modes: self.n_modes,
            eta: self.eta,
            add_noise: self.add_noise,
            seed: self.seed,
            factor: self.factor.clone(),
            beta: self.beta.clone(),
            k0: match &self.k0 {
                Some(v) => Some(parse_k0_flag(v)?),
                None => None,
            },
            n0: self.n0,
            eps_reg: self.eps_reg,
            grid_size: self.grid_size,
            c_abs: self.c_abs,
            c_rel: self.c_rel,
            trials: self.trials,
            out_dir: self.out_dir.clone(),
            notes: vec![],
        };
        ExperimentConfig::resolve(&overlay.merge(flags))
    }
}

fn parse_k0_flag(v: &str) -> Result<f64, CliError> {
    // reuse the config-file grammar by feeding a one-line config
    let overlay = ConfigOverlay::parse(&format!("k0 = {v}"))?;
    Ok(overlay.k0.expect("parsed k0"))
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Detect(args) => {
            let cfg = args.resolve()?;
            let outcome = runner::run_detect(&cfg)?;
            runner::print_detect_report(&cfg, &outcome);
            Ok(())
        }
        Command::Sweep(args) => {
            let cfg = args.run.resolve()?;
            let values = runner::parse_values(&args.values)?;
            let rows = runner::run_sweep(&cfg, &args.param, &values)?;
            println!(
                "sweep over {}: {} runs -> {}",
                args.param,
                rows.len(),
                cfg.out_dir.display()
            );
            for r in &rows {
                println!(
                    "  {} = {:e}: plateau max {:.4e}, rms {:.4e}, amp error {:.4e}, epsilon {:.4e}",
                    args.param, r.value, r.plateau_max, r.plateau_rms, r.amp_error, r.epsilon_predicted
                );
            }
            Ok(())
        }
        Command::Montecarlo(args) => runner::run_montecarlo(&args.resolve()?),
        Command::Factors(args) => runner::run_factors(&args.resolve()?),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

//! `admsim`: runs the adaptive demodulation experiments and writes CSV.

mod commands;
mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "admsim", version, about = "Adaptive demodulation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file.
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Named preset shipped with the binary (see `admsim presets`).
    #[arg(long, global = true)]
    preset: Option<String>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Symbol pairs per Monte Carlo point.
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for Monte Carlo.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Single 16-DAPSK ring ratio; replaces any ring ratio list.
    #[arg(long = "ring-ratio", global = true)]
    ring_ratio: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bit-error rate curves, analytic and/or Monte Carlo.
    Ber,
    /// Amplitude thresholds of the simplified 16-DAPSK scheme.
    Thresholds,
    /// SNR breakpoints of the adaptive scheme.
    Regions,
    /// Spectral efficiency over Rayleigh fading.
    SpecEff,
    /// End-to-end run through the LT code.
    E2e,
    /// Bit labels of each phase difference.
    MappingDump,
    /// List the built-in presets.
    Presets,
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match (&cli.config, &cli.preset) {
        (Some(p), _) => config::load_file(p)?,
        (None, Some(n)) => config::load_preset(n)?,
        (None, None) => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.trials {
        cfg.trials = t;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.to_string_lossy().into_owned());
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    if let Some(r) = cli.ring_ratio {
        cfg.ring_ratio = r;
        cfg.ring_ratios = None;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::Presets = cli.command {
        for n in config::preset_names() {
            println!("{n}");
        }
        return Ok(());
    }
    let cfg = resolve(&cli)?;
    if let Some(w) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let bytes = match cli.command {
        Command::Ber => commands::ber(&cfg)?,
        Command::Thresholds => commands::thresholds(&cfg)?,
        Command::Regions => commands::regions(&cfg)?,
        Command::SpecEff => commands::spec_eff(&cfg)?,
        Command::MappingDump => commands::mapping_dump(&cfg)?,
        Command::E2e => return commands::e2e(&cfg),
        Command::Presets => unreachable!(),
    };
    output::emit(&bytes, cfg.out.as_deref().map(Path::new))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("admsim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

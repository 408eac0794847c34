use clap::{Args, Parser, Subcommand};
use mesoqed::moments::GaussianEnvelopes;
use mesoqed_cli::commands::{self, DEFAULT_R_RANGE, DEFAULT_Z_RANGE};
use mesoqed_cli::config::{parse_orientation, RunConfig, SweepRange};
use mesoqed_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mesoqed", version, about = "Decay rates of mesoscopic quantum dots near plasmonic nanostructures")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Named parameter preset applied before the config file.
    #[arg(long, global = true, default_value = "paper")]
    preset: String,

    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Free-space wavelength [nm].
    #[arg(long, global = true)]
    lambda0: Option<f64>,

    /// Signed Λ/μ [nm].
    #[arg(long, global = true, allow_hyphen_values = true)]
    ratio: Option<f64>,

    /// Nanowire radius [nm].
    #[arg(long, global = true)]
    radius: Option<f64>,

    /// Sweep range MIN:MAX:STEP [nm].
    #[arg(long, global = true)]
    range: Option<String>,

    /// Emitter orientation at the wire: axial or radial.
    #[arg(long, global = true)]
    orientation: Option<String>,

    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Rate ladder and channels against height above the planar interface.
    InterfaceSweep,
    /// Plasmon rates and background against distance from the wire surface.
    NanowireSweep,
    /// Guided plasmon of the wire.
    Dispersion,
    /// Normalized mode field on an (r, z) grid.
    FieldMap {
        /// Radial grid MIN:MAX:STEP [nm].
        #[arg(long)]
        r_range: Option<String>,
        /// Axial grid MIN:MAX:STEP [nm].
        #[arg(long)]
        z_range: Option<String>,
    },
    /// Symmetry-allowed moments and neglected-moment estimates.
    Moments {
        /// Parity table: lens, symmetric or unconstrained.
        #[arg(long, default_value = "lens")]
        table: String,
        /// Electron density HWHM [nm].
        #[arg(long, default_value_t = 2.0)]
        sigma_e: f64,
        /// Hole-to-electron mass ratio.
        #[arg(long, default_value_t = 5.0)]
        mass_ratio: f64,
        /// Electron-hole center offset [nm].
        #[arg(long, default_value_t = 2.5, allow_hyphen_values = true)]
        shift: f64,
    },
    /// Figures of merit as JSON.
    Report,
}

fn resolve(c: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::preset(&c.preset)?;
    if let Some(path) = &c.config {
        cfg.apply_file(path)?;
    }
    if let Some(v) = c.lambda0 {
        cfg.lambda0 = v;
    }
    if let Some(v) = c.ratio {
        cfg.ratio = v;
    }
    if let Some(v) = c.radius {
        cfg.radius = v;
    }
    if let Some(v) = &c.range {
        cfg.range = Some(v.parse()?);
    }
    if let Some(v) = &c.orientation {
        cfg.orientation = parse_orientation(v)?;
    }
    if let Some(v) = c.tol {
        cfg.tol = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_range(s: &Option<String>, default: SweepRange) -> Result<SweepRange, CliError> {
    s.as_deref().map(str::parse).unwrap_or(Ok(default))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(&cli.common)?;
    let doc = match &cli.command {
        Command::InterfaceSweep => commands::interface_sweep(&cfg)?,
        Command::NanowireSweep => commands::nanowire_sweep(&cfg)?,
        Command::Dispersion => commands::dispersion(&cfg)?,
        Command::FieldMap { r_range, z_range } => commands::field_map(
            &cfg,
            parse_range(r_range, DEFAULT_R_RANGE)?,
            parse_range(z_range, DEFAULT_Z_RANGE)?,
        )?,
        Command::Moments { table, sigma_e, mass_ratio, shift } => {
            let env = GaussianEnvelopes { sigma_e: *sigma_e, mass_ratio: *mass_ratio, shift: *shift };
            commands::moments(&cfg, table, &env)?
        }
        Command::Report => commands::report(&cfg)?,
    };
    match &cli.common.out {
        Some(path) => std::fs::write(path, doc)?,
        None => print!("{doc}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

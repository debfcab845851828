//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::{parse_config, Purpose, RunConfig, Value};
use crate::error::CliError;
use crate::output::{emit, render};
use crate::selfcheck::{format_table, run_suite, Mutation};

#[derive(Debug, Parser)]
#[command(
    name = "magnus",
    version,
    about = "Optical Magnus effect: beam deflection, transverse force and trap shaking"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deflection angle, momentum change and force, analytic and numeric
    Deflect,
    /// Sweep detuning or displacement (or the radiant profile with --axis profile)
    Scan,
    /// Displacement where the transverse force vanishes
    Equilibrium,
    /// Radiant intensity in the plane of the dipole
    Profile,
    /// Trap shaking by a rotating magnetic field
    Shake,
    /// Focal-plane intensity map and spot size
    Focal,
    /// Run the invariant suite
    Selfcheck {
        #[arg(long, hide = true)]
        inject_phase_flip: bool,
    },
}

/// Flags shared by every subcommand. Each overrides the same key of the
/// config file.
#[derive(Debug, Default, Args)]
pub struct Options {
    /// TOML file with any of the keys below (dashes become underscores)
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// gauss or tophat
    #[arg(long, global = true)]
    pub shape: Option<String>,
    /// Angular width w_theta or r_theta, radians
    #[arg(long, global = true)]
    pub width: Option<String>,
    /// Laser detuning in units of the half linewidth
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub detuning: Option<String>,
    /// Handedness of the dipole, +1 or -1
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma: Option<String>,
    /// Dipole displacement along x in units of 1/k
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kd: Option<String>,
    /// N, NxM, adaptive, adaptive:TOL or adaptive:TOL:MAX_NODES
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// csv or json
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Output file (default: standard output)
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<String>,
    /// Scan axis: detuning, displacement or profile
    #[arg(long, global = true)]
    pub axis: Option<String>,
    /// Scan range FROM:TO
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// Number of scan or profile points
    #[arg(long, global = true)]
    pub points: Option<String>,
    /// Trap laser wavelength, e.g. 0.8um
    #[arg(long, global = true)]
    pub wavelength: Option<String>,
    /// Trap waist, e.g. 2um
    #[arg(long, global = true)]
    pub waist: Option<String>,
    /// Trap depth, e.g. 20uK or joules
    #[arg(long, global = true)]
    pub depth: Option<String>,
    /// Atomic mass, e.g. 88u
    #[arg(long, global = true)]
    pub mass: Option<String>,
    /// Field rotation rate, e.g. 6.9kHz, 4e4rad/s or 0.5trap
    #[arg(long = "omega-b", global = true)]
    pub omega_b: Option<String>,
    /// Spin projection m_j, +1 or -1
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mj: Option<String>,
    /// Rotating field magnitude, e.g. 2G
    #[arg(long = "b-field", global = true)]
    pub b_field: Option<String>,
    /// Integration step, e.g. 0.7us
    #[arg(long, global = true)]
    pub dt: Option<String>,
    /// Integration time, e.g. 3ms
    #[arg(long = "t-max", global = true)]
    pub t_max: Option<String>,
    /// gaussian or harmonic trap potential
    #[arg(long, global = true)]
    pub potential: Option<String>,
}

impl Options {
    fn overrides(&self) -> RunConfig {
        let v = |s: &Option<String>| s.clone().map(Value::from);
        RunConfig {
            shape: self.shape.clone(),
            width: v(&self.width),
            detuning: v(&self.detuning),
            sigma: v(&self.sigma),
            kd: v(&self.kd),
            grid: self.grid.clone(),
            format: self.format.clone(),
            out: self.out.clone(),
            axis: self.axis.clone(),
            range: self.range.clone(),
            points: v(&self.points),
            wavelength: v(&self.wavelength),
            waist: v(&self.waist),
            depth: v(&self.depth),
            mass: v(&self.mass),
            omega_b: v(&self.omega_b),
            mj: v(&self.mj),
            b_field: v(&self.b_field),
            dt: v(&self.dt),
            t_max: v(&self.t_max),
            potential: self.potential.clone(),
        }
    }

    /// File settings with the command-line flags on top.
    pub fn merged(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                    path: path.display().to_string(),
                    source: e,
                })?;
                parse_config(&text)?
            }
            None => RunConfig::default(),
        };
        Ok(self.overrides().over(file))
    }
}

/// Runs one subcommand; the caller maps the error to an exit code.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let purpose = match cli.command {
        Command::Scan => Purpose::Scan,
        Command::Profile => Purpose::Profile,
        _ => Purpose::Other,
    };
    let resolved = cli.options.merged()?.resolve(purpose)?;
    let table = match cli.command {
        Command::Deflect => commands::deflect(&resolved)?,
        Command::Scan => commands::scan(&resolved)?,
        Command::Equilibrium => commands::equilibrium(&resolved)?,
        Command::Profile => commands::profile(&resolved)?,
        Command::Shake => commands::shake(&resolved)?,
        Command::Focal => commands::focal(&resolved)?,
        Command::Selfcheck { inject_phase_flip } => {
            let checks = run_suite(
                resolved.grid,
                Mutation {
                    flip_radiation_phase: inject_phase_flip,
                },
            );
            print!("{}", format_table(&checks));
            return match checks.iter().find(|c| !c.passed()) {
                Some(c) => Err(CliError::SelfcheckFailed(c.name.to_string())),
                None => Ok(()),
            };
        }
    };
    if resolved.out.is_some() {
        for (k, v) in &table.summary.0 {
            eprintln!("{k} = {}", v.to_csv());
        }
    }
    emit(
        &render(&table, &resolved.echo(), resolved.format),
        resolved.out.as_deref(),
    )
}

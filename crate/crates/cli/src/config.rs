//! Run configuration: a flat TOML file, command-line overrides on top, then
//! validation into typed parameters before anything is computed.

use std::f64::consts::PI;
use std::path::PathBuf;

use magnus_core::dynamics::{trap_frequency, DriveSpec, Potential, TrapSpec};
use magnus_core::{BeamShape, Handedness, QuadratureSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::units::{
    format_grid, parse_grid, parse_number, parse_omega, parse_quantity, parse_range, Dimension,
};

/// A value as written in the file: a bare number or a string such as
/// `"0.8um"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

/// Everything a run can be configured with. All keys are optional; unknown
/// keys are an error.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub shape: Option<String>,
    pub width: Option<Value>,
    pub detuning: Option<Value>,
    pub sigma: Option<Value>,
    pub kd: Option<Value>,
    pub grid: Option<String>,
    pub format: Option<String>,
    pub out: Option<String>,
    pub axis: Option<String>,
    pub range: Option<String>,
    pub points: Option<Value>,
    pub wavelength: Option<Value>,
    pub waist: Option<Value>,
    pub depth: Option<Value>,
    pub mass: Option<Value>,
    pub omega_b: Option<Value>,
    pub mj: Option<Value>,
    pub b_field: Option<Value>,
    pub dt: Option<Value>,
    pub t_max: Option<Value>,
    pub potential: Option<String>,
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(
            self, base, shape, width, detuning, sigma, kd, grid, format, out, axis, range, points,
            wavelength, waist, depth, mass, omega_b, mj, b_field, dt, t_max, potential
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Detuning,
    Displacement,
    Profile,
}

/// Which subcommand the configuration is resolved for; only affects
/// defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Scan,
    Profile,
    Other,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub shape: BeamShape,
    pub detuning: f64,
    pub sigma: Handedness,
    pub kd: f64,
    pub grid: QuadratureSpec,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub axis: Axis,
    pub range: (f64, f64),
    pub points: usize,
    pub trap: TrapSpec,
    pub drive: DriveSpec,
    pub dt: f64,
    pub t_max: f64,
    pub potential: Potential,
}

fn invalid(key: &'static str, reason: impl Into<String>) -> CliError {
    CliError::Invalid {
        key,
        reason: reason.into(),
    }
}

fn number(key: &'static str, v: &Option<Value>, default: f64) -> Result<f64, CliError> {
    match v {
        None => Ok(default),
        Some(Value::Number(x)) if x.is_finite() => Ok(*x),
        Some(Value::Number(x)) => Err(invalid(key, format!("must be finite, got {x}"))),
        Some(Value::Text(s)) => parse_number(s).map_err(|e| CliError::Unit { key, source: e }),
    }
}

fn quantity(
    key: &'static str,
    v: &Option<Value>,
    dim: Dimension,
    default: f64,
) -> Result<f64, CliError> {
    match v {
        Some(Value::Text(s)) => {
            parse_quantity(s, dim).map_err(|e| CliError::Unit { key, source: e })
        }
        other => number(key, other, default),
    }
}

fn integer(key: &'static str, v: &Option<Value>, default: i64) -> Result<i64, CliError> {
    let x = number(key, v, default as f64)?;
    if x.fract() != 0.0 || x.abs() > 1e9 {
        return Err(invalid(key, format!("must be an integer, got {x}")));
    }
    Ok(x as i64)
}

impl RunConfig {
    pub fn resolve(&self, purpose: Purpose) -> Result<Resolved, CliError> {
        let width = quantity("width", &self.width, Dimension::Angle, 0.2)?;
        let shape = match self.shape.as_deref().unwrap_or("gauss") {
            "gauss" | "gaussian" => BeamShape::gaussian(width),
            "tophat" => BeamShape::tophat(width),
            other => {
                return Err(invalid(
                    "shape",
                    format!("expected gauss or tophat, got `{other}`"),
                ))
            }
        }?;
        let detuning = number("detuning", &self.detuning, 1.0)?;
        let sigma = Handedness::from_sign(integer("sigma", &self.sigma, 1)?.clamp(-2, 2) as i32)?;
        let kd = number("kd", &self.kd, 0.0)?;
        let grid = match &self.grid {
            Some(s) => parse_grid(s).map_err(|e| CliError::Unit {
                key: "grid",
                source: e,
            })?,
            None => QuadratureSpec::default(),
        };
        if let QuadratureSpec::Fixed { n_theta, n_phi } = grid {
            if n_theta < 2 || n_phi < 2 {
                return Err(invalid(
                    "grid",
                    format!("a fixed rule needs at least 2x2 nodes, got {n_theta}x{n_phi}"),
                ));
            }
        }
        let format = match self.format.as_deref().unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => {
                return Err(invalid(
                    "format",
                    format!("expected csv or json, got `{other}`"),
                ))
            }
        };
        let axis = match self.axis.as_deref() {
            None if purpose == Purpose::Profile => Axis::Profile,
            None | Some("detuning") => Axis::Detuning,
            Some("displacement") | Some("kd") => Axis::Displacement,
            Some("profile") => Axis::Profile,
            Some(other) => {
                return Err(invalid(
                    "axis",
                    format!("expected detuning, displacement or profile, got `{other}`"),
                ))
            }
        };
        let range = match &self.range {
            Some(_) if axis == Axis::Profile => {
                return Err(invalid("range", "profiles always span theta in -pi/2:pi/2"))
            }
            Some(s) => parse_range(s).map_err(|e| CliError::Unit {
                key: "range",
                source: e,
            })?,
            None => match axis {
                Axis::Detuning => (-3.0, 3.0),
                Axis::Displacement => {
                    let s = sigma.sign();
                    if s > 0.0 {
                        (0.0, 2.0)
                    } else {
                        (-2.0, 0.0)
                    }
                }
                Axis::Profile => (-PI / 2.0, PI / 2.0),
            },
        };
        let default_points = match (purpose, axis) {
            (_, Axis::Profile) => 181,
            (Purpose::Scan, _) => 41,
            _ => 41,
        };
        let points = integer("points", &self.points, default_points)?;
        let min_points = if axis == Axis::Profile { 16 } else { 2 };
        if points < min_points || points > 100_000 {
            return Err(invalid(
                "points",
                format!("must be in {min_points}..=100000, got {points}"),
            ));
        }

        let example = TrapSpec::sr88_example();
        let trap = TrapSpec::new(
            quantity(
                "wavelength",
                &self.wavelength,
                Dimension::Length,
                example.wavelength,
            )?,
            quantity("waist", &self.waist, Dimension::Length, example.waist)?,
            quantity("depth", &self.depth, Dimension::Energy, example.depth)?,
            quantity("mass", &self.mass, Dimension::Mass, example.mass)?,
        )?;
        let omega = trap_frequency(&trap);
        let omega_b = match &self.omega_b {
            None => omega,
            Some(Value::Number(x)) => *x,
            Some(Value::Text(s)) => parse_omega(s)
                .map_err(|e| CliError::Unit {
                    key: "omega_b",
                    source: e,
                })?
                .resolve(omega),
        };
        let mj = integer("mj", &self.mj, 1)?;
        if mj == 0 {
            return Err(invalid(
                "mj",
                "m_j = 0 is not trapped by a purely circular coupling",
            ));
        }
        let drive = DriveSpec::new(
            omega_b,
            mj.clamp(-2, 2) as i32,
            quantity("b_field", &self.b_field, Dimension::MagneticField, 2e-4)?,
        )?;
        let fastest = omega.max(drive.omega_b);
        let dt = quantity("dt", &self.dt, Dimension::Time, 2.0 * PI / fastest / 200.0)?;
        if !(dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        let t_max = quantity(
            "t_max",
            &self.t_max,
            Dimension::Time,
            20.0 * 2.0 * PI / drive.omega_b,
        )?;
        if !(t_max > 0.0) {
            return Err(invalid("t_max", format!("must be positive, got {t_max}")));
        }
        if t_max / dt > 1e8 {
            return Err(invalid(
                "t_max",
                format!("t_max/dt = {:.3e} exceeds 1e8 steps", t_max / dt),
            ));
        }
        let potential = match self.potential.as_deref().unwrap_or("gaussian") {
            "gauss" | "gaussian" => Potential::Gaussian,
            "harmonic" => Potential::Harmonic,
            other => {
                return Err(invalid(
                    "potential",
                    format!("expected gaussian or harmonic, got `{other}`"),
                ))
            }
        };
        Ok(Resolved {
            shape,
            detuning,
            sigma,
            kd,
            grid,
            format,
            out: self.out.as_ref().map(PathBuf::from),
            axis,
            range,
            points: points as usize,
            trap,
            drive,
            dt,
            t_max,
            potential,
        })
    }
}

/// The resolved configuration as echoed into every output, SI for the
/// dynamics keys.
#[derive(Debug, Clone, Serialize)]
pub struct Echo {
    pub shape: &'static str,
    pub width: f64,
    pub detuning: f64,
    pub sigma: i32,
    pub kd: f64,
    pub grid: String,
    pub format: Format,
    pub axis: Axis,
    pub range: [f64; 2],
    pub points: usize,
    pub wavelength: f64,
    pub waist: f64,
    pub depth: f64,
    pub mass: f64,
    pub omega_b: f64,
    pub mj: i32,
    pub b_field: f64,
    pub dt: f64,
    pub t_max: f64,
    pub potential: &'static str,
}

impl Resolved {
    pub fn echo(&self) -> Echo {
        Echo {
            shape: match self.shape {
                BeamShape::Gaussian { .. } => "gauss",
                BeamShape::Tophat { .. } => "tophat",
            },
            width: self.shape.width(),
            detuning: self.detuning,
            sigma: self.sigma.sign() as i32,
            kd: self.kd,
            grid: format_grid(&self.grid),
            format: self.format,
            axis: self.axis,
            range: [self.range.0, self.range.1],
            points: self.points,
            wavelength: self.trap.wavelength,
            waist: self.trap.waist,
            depth: self.trap.depth,
            mass: self.trap.mass,
            omega_b: self.drive.omega_b,
            mj: self.drive.m_j,
            b_field: self.drive.b_field,
            dt: self.dt,
            t_max: self.t_max,
            potential: match self.potential {
                Potential::Gaussian => "gaussian",
                Potential::Harmonic => "harmonic",
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_win() {
        let file = parse_config("width = 0.4\nshape = \"tophat\"\nwaist = \"3um\"").unwrap();
        let cli = RunConfig {
            width: Some(Value::Text("0.3".into())),
            ..RunConfig::default()
        };
        let r = cli.over(file).resolve(Purpose::Other).unwrap();
        assert_eq!(r.shape, BeamShape::tophat(0.3).unwrap());
        assert!((r.trap.waist - 3e-6).abs() < 1e-20);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            parse_config("widht = 0.2"),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn invalid_values_name_the_key() {
        let bad = |toml: &str| {
            parse_config(toml)
                .unwrap()
                .resolve(Purpose::Other)
                .unwrap_err()
                .to_string()
        };
        assert!(
            bad("width = 2.0").contains("w_theta"),
            "{}",
            bad("width = 2.0")
        );
        assert!(bad("sigma = 0").contains("sigma"));
        assert!(bad("mj = 0").contains("mj"));
        assert!(bad("waist = \"2 uK\"").contains("waist"));
        assert!(bad("points = 1.5").contains("points"));
        assert!(bad("grid = \"1\"").contains("grid"));
    }

    #[test]
    fn default_step_resolves_the_fastest_motion() {
        let r = RunConfig::default().resolve(Purpose::Other).unwrap();
        let limit = magnus_core::dynamics::max_step(&r.trap, &r.drive);
        assert!(r.dt < limit);
        assert!((r.t_max * r.drive.omega_b / (2.0 * PI) - 20.0).abs() < 1e-9);
    }
}

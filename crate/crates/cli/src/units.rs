//! Parsing of numbers with explicit unit suffixes (`0.8um`, `20uK`, `2G`).
//!
//! A bare number is read in the SI base unit of the quantity. Angles are
//! radians only; a `deg` suffix is rejected rather than converted.

use std::f64::consts::PI;
use std::fmt;

use magnus_core::constants::{ATOMIC_MASS_UNIT, BOLTZMANN};
use magnus_core::{AdaptiveOptions, QuadratureSpec};
use thiserror::Error;

/// Longest input accepted by the parsers in this module.
pub const MAX_INPUT_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    /// Trap depths: joules, or a temperature times `k_B`.
    Energy,
    Mass,
    MagneticField,
    AngularFrequency,
    Time,
    Angle,
}

impl Dimension {
    fn units(&self) -> &'static [(&'static str, f64)] {
        const TWO_PI: f64 = 2.0 * PI;
        match self {
            Dimension::Length => &[
                ("m", 1.0),
                ("mm", 1e-3),
                ("um", 1e-6),
                ("µm", 1e-6),
                ("nm", 1e-9),
            ],
            Dimension::Energy => &[
                ("J", 1.0),
                ("K", BOLTZMANN),
                ("mK", BOLTZMANN * 1e-3),
                ("uK", BOLTZMANN * 1e-6),
                ("µK", BOLTZMANN * 1e-6),
                ("nK", BOLTZMANN * 1e-9),
            ],
            Dimension::Mass => &[
                ("kg", 1.0),
                ("g", 1e-3),
                ("u", ATOMIC_MASS_UNIT),
                ("amu", ATOMIC_MASS_UNIT),
            ],
            Dimension::MagneticField => &[
                ("T", 1.0),
                ("mT", 1e-3),
                ("uT", 1e-6),
                ("G", 1e-4),
                ("mG", 1e-7),
            ],
            Dimension::AngularFrequency => &[
                ("rad/s", 1.0),
                ("Hz", TWO_PI),
                ("kHz", TWO_PI * 1e3),
                ("MHz", TWO_PI * 1e6),
            ],
            Dimension::Time => &[
                ("s", 1.0),
                ("ms", 1e-3),
                ("us", 1e-6),
                ("µs", 1e-6),
                ("ns", 1e-9),
            ],
            Dimension::Angle => &[("rad", 1.0)],
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Length => "length",
            Dimension::Energy => "energy",
            Dimension::Mass => "mass",
            Dimension::MagneticField => "magnetic field",
            Dimension::AngularFrequency => "angular frequency",
            Dimension::Time => "time",
            Dimension::Angle => "angle",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("empty value")]
    Empty,
    #[error("value is {0} bytes long, the limit is {MAX_INPUT_LEN}")]
    TooLong(usize),
    #[error("`{0}` is not a number")]
    BadNumber(String),
    #[error("`{0}` is not finite")]
    NotFinite(String),
    #[error("unknown {dimension} unit `{unit}` (accepted: {accepted})")]
    UnknownUnit {
        unit: String,
        dimension: Dimension,
        accepted: String,
    },
    #[error("range `{0}` must look like FROM:TO with FROM < TO")]
    BadRange(String),
    #[error("grid `{0}` must be N, NxM, adaptive, adaptive:TOL or adaptive:TOL:MAX_NODES")]
    BadGrid(String),
}

fn check_len(input: &str) -> Result<&str, UnitError> {
    if input.len() > MAX_INPUT_LEN {
        return Err(UnitError::TooLong(input.len()));
    }
    let s = input.trim();
    if s.is_empty() {
        return Err(UnitError::Empty);
    }
    Ok(s)
}

/// Splits `"1.5e-3 mK"` into `("1.5e-3", "mK")`.
fn split_number(s: &str) -> (&str, &str) {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
        i += 1;
    }
    // exponent only if digits follow, so that units cannot be swallowed
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    (&s[..i], s[i..].trim())
}

/// Parses a plain finite number.
pub fn parse_number(input: &str) -> Result<f64, UnitError> {
    let s = check_len(input)?;
    let v: f64 = s.parse().map_err(|_| UnitError::BadNumber(s.to_string()))?;
    if !v.is_finite() {
        return Err(UnitError::NotFinite(s.to_string()));
    }
    Ok(v)
}

fn number_and_unit(input: &str) -> Result<(f64, &str), UnitError> {
    let s = check_len(input)?;
    let (num, unit) = split_number(s);
    if num.is_empty() || num == "+" || num == "-" {
        return Err(UnitError::BadNumber(s.to_string()));
    }
    Ok((parse_number(num)?, unit))
}

/// Parses a quantity and converts it to SI.
pub fn parse_quantity(input: &str, dimension: Dimension) -> Result<f64, UnitError> {
    let (v, unit) = number_and_unit(input)?;
    if unit.is_empty() {
        return Ok(v);
    }
    let factor = dimension
        .units()
        .iter()
        .find(|(name, _)| *name == unit)
        .map(|(_, f)| *f)
        .ok_or_else(|| UnitError::UnknownUnit {
            unit: unit.to_string(),
            dimension,
            accepted: dimension
                .units()
                .iter()
                .map(|(n, _)| *n)
                .collect::<Vec<_>>()
                .join(", "),
        })?;
    let si = v * factor;
    if !si.is_finite() {
        return Err(UnitError::NotFinite(input.trim().to_string()));
    }
    Ok(si)
}

/// Drive rate, either absolute or as a multiple of the trap frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaSpec {
    /// rad/s.
    Absolute(f64),
    /// Multiple of the radial trap frequency, written `0.5trap`.
    TrapMultiple(f64),
}

impl OmegaSpec {
    pub fn resolve(&self, trap_frequency: f64) -> f64 {
        match *self {
            OmegaSpec::Absolute(w) => w,
            OmegaSpec::TrapMultiple(m) => m * trap_frequency,
        }
    }
}

pub fn parse_omega(input: &str) -> Result<OmegaSpec, UnitError> {
    let (v, unit) = number_and_unit(input)?;
    if unit == "trap" {
        return Ok(OmegaSpec::TrapMultiple(v));
    }
    parse_quantity(input, Dimension::AngularFrequency).map(OmegaSpec::Absolute)
}

/// Parses `FROM:TO` with `FROM < TO`.
pub fn parse_range(input: &str) -> Result<(f64, f64), UnitError> {
    let s = check_len(input)?;
    let bad = || UnitError::BadRange(s.to_string());
    // the separator is the first ':' after the leading character, so "-2:2" splits
    let (from, to) = s.split_once(':').ok_or_else(bad)?;
    let from = parse_number(from).map_err(|_| bad())?;
    let to = parse_number(to).map_err(|_| bad())?;
    if !(from < to) {
        return Err(bad());
    }
    Ok((from, to))
}

/// Parses a quadrature setting.
///
/// `N` or `NxM` selects a fixed `N × M` rule (`cos θ` × `φ` nodes).
/// `adaptive[:TOL[:MAX_NODES]]` doubles the rule until two estimates agree
/// to `TOL`, giving up past `MAX_NODES` per axis.
pub fn parse_grid(input: &str) -> Result<QuadratureSpec, UnitError> {
    let s = check_len(input)?;
    let bad = || UnitError::BadGrid(s.to_string());
    let count = |t: &str| -> Result<usize, UnitError> {
        let n: usize = t.trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        Ok(n)
    };
    if let Some(rest) = s.strip_prefix("adaptive") {
        let mut opts = AdaptiveOptions::default();
        if rest.is_empty() {
            return Ok(QuadratureSpec::Adaptive(opts));
        }
        let rest = rest.strip_prefix(':').ok_or_else(bad)?;
        let (tol, max) = match rest.split_once(':') {
            Some((t, m)) => (t, Some(m)),
            None => (rest, None),
        };
        opts.rel_tol = parse_number(tol).map_err(|_| bad())?;
        if !(opts.rel_tol > 0.0) {
            return Err(bad());
        }
        if let Some(m) = max {
            opts.max_nodes = count(m)?;
        }
        return Ok(QuadratureSpec::Adaptive(opts));
    }
    let (n_theta, n_phi) = match s.split_once('x') {
        Some((a, b)) => (count(a)?, count(b)?),
        None => {
            let n = count(s)?;
            (n, n)
        }
    };
    Ok(QuadratureSpec::Fixed { n_theta, n_phi })
}

/// Inverse of [`parse_grid`], used when echoing the resolved config.
pub fn format_grid(spec: &QuadratureSpec) -> String {
    match spec {
        QuadratureSpec::Fixed { n_theta, n_phi } => format!("{n_theta}x{n_phi}"),
        QuadratureSpec::Adaptive(o) => format!("adaptive:{:e}:{}", o.rel_tol, o.max_nodes),
    }
}

//! One-dimensional motion of an atom in a Gaussian tweezer whose center is
//! shaken by a rotating magnetic field. SI units throughout.
//!
//! A state with B-referenced projection `m_j` is trapped at
//! `x_eq(t) = -m_j·λbar·cos(ω_B t)`; the drive is applied by moving the trap
//! center rather than as an explicit force.

use std::f64::consts::{PI, SQRT_2};

use crate::constants::{amu_to_kg, kelvin_to_joule, BOHR_MAGNETON, HBAR};
use crate::error::{invalid, Error, Result};

/// Optical tweezer parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapSpec {
    /// Laser wavelength, m.
    pub wavelength: f64,
    /// 1/e² intensity radius at the focus, m.
    pub waist: f64,
    /// Trap depth `U₀`, J.
    pub depth: f64,
    /// Atomic mass, kg.
    pub mass: f64,
}

impl TrapSpec {
    pub fn new(wavelength: f64, waist: f64, depth: f64, mass: f64) -> Result<Self> {
        for (name, v) in [
            ("wavelength", wavelength),
            ("waist", waist),
            ("depth", depth),
            ("mass", mass),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(Self {
            wavelength,
            waist,
            depth,
            mass,
        })
    }

    /// 0.8 µm light, 2 µm waist, 20 µK deep, holding an atom of 88 u.
    pub fn sr88_example() -> Self {
        Self {
            wavelength: 0.8e-6,
            waist: 2e-6,
            depth: kelvin_to_joule(20e-6),
            mass: amu_to_kg(88.0),
        }
    }

    /// `λ/2π`, m.
    pub fn reduced_wavelength(&self) -> f64 {
        self.wavelength / (2.0 * PI)
    }
}

/// Radial trap frequency `√(4U₀/(m w₀²))`, rad/s.
pub fn trap_frequency(trap: &TrapSpec) -> f64 {
    (4.0 * trap.depth / (trap.mass * trap.waist * trap.waist)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeEstimate {
    /// Resonant drive cycles until the oscillation energy reaches `U₀`.
    pub n_cycles: f64,
    /// Speed at that moment, m/s.
    pub exit_speed: f64,
    /// Time to escape, s.
    pub escape_time: f64,
}

/// Driven harmonic oscillator with force `mω²λbar cos ωt`: the amplitude
/// grows as `ωλbar t/2` and the atom leaves once `½mω²x² = U₀`, i.e. at
/// amplitude `w₀/√2`.
pub fn resonant_escape_estimate(trap: &TrapSpec) -> EscapeEstimate {
    let omega = trap_frequency(trap);
    let lbar = trap.reduced_wavelength();
    let amplitude = trap.waist / SQRT_2;
    let escape_time = 2.0 * amplitude / (omega * lbar);
    EscapeEstimate {
        n_cycles: amplitude / (PI * lbar),
        exit_speed: omega * amplitude,
        escape_time,
    }
}

/// Rotating-field drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// Rotation rate of `B` in the yz plane, rad/s.
    pub omega_b: f64,
    /// B-referenced spin projection, one of -1, 0, 1.
    pub m_j: i32,
    /// Field magnitude, T.
    pub b_field: f64,
}

impl DriveSpec {
    pub fn new(omega_b: f64, m_j: i32, b_field: f64) -> Result<Self> {
        if !(omega_b > 0.0 && omega_b.is_finite()) {
            return Err(invalid(
                "omega_b",
                format!("must be positive, got {omega_b}"),
            ));
        }
        if m_j.abs() > 1 {
            return Err(invalid("m_j", format!("must be -1, 0 or 1, got {m_j}")));
        }
        if !(b_field >= 0.0 && b_field.is_finite()) {
            return Err(invalid(
                "b_field",
                format!("must be non-negative, got {b_field}"),
            ));
        }
        Ok(Self {
            omega_b,
            m_j,
            b_field,
        })
    }

    pub fn is_trapped(&self) -> bool {
        self.m_j != 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    /// `-U₀ exp(-2s²/w₀²)`.
    Gaussian,
    /// `-U₀ + ½mω²s²`, the harmonic control.
    Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShakeSetup {
    pub potential: Potential,
    /// Shaking amplitude, m. Defaults to `λbar`.
    pub drive_amplitude: Option<f64>,
    /// Initial position, m. Defaults to the trap center at `t = 0`.
    pub initial_position: Option<f64>,
}

impl Default for ShakeSetup {
    fn default() -> Self {
        Self {
            potential: Potential::Gaussian,
            drive_amplitude: None,
            initial_position: None,
        }
    }
}

impl ShakeSetup {
    pub fn harmonic() -> Self {
        Self {
            potential: Potential::Harmonic,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    /// `½mv² + U + U₀`, J.
    pub energies: Vec<f64>,
    pub escape_time: Option<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Drive cycles completed at escape.
    pub fn escape_cycles(&self, omega_b: f64) -> Option<f64> {
        self.escape_time.map(|t| t * omega_b / (2.0 * PI))
    }
}

/// Largest step accepted by [`simulate`].
pub fn max_step(trap: &TrapSpec, drive: &DriveSpec) -> f64 {
    2.0 * PI / (100.0 * trap_frequency(trap).max(drive.omega_b))
}

struct Model {
    depth: f64,
    mass: f64,
    inv_w2: f64,
    omega2: f64,
    potential: Potential,
    amplitude: f64,
    omega_b: f64,
}

impl Model {
    fn center(&self, t: f64) -> f64 {
        self.amplitude * (self.omega_b * t).cos()
    }

    fn potential(&self, x: f64, t: f64) -> f64 {
        let s = x - self.center(t);
        match self.potential {
            Potential::Gaussian => -self.depth * (-2.0 * s * s * self.inv_w2).exp(),
            Potential::Harmonic => -self.depth + 0.5 * self.mass * self.omega2 * s * s,
        }
    }

    fn acceleration(&self, x: f64, t: f64) -> f64 {
        let s = x - self.center(t);
        match self.potential {
            Potential::Gaussian => {
                -4.0 * self.depth * self.inv_w2 / self.mass * s * (-2.0 * s * s * self.inv_w2).exp()
            }
            Potential::Harmonic => -self.omega2 * s,
        }
    }
}

/// Integrates `m ẍ = -∂U/∂x` with classical fourth-order Runge–Kutta at a
/// fixed step, starting at rest. Stops at escape: total energy above `U₀`
/// or `|x| > 3w₀`.
pub fn simulate(
    trap: &TrapSpec,
    drive: &DriveSpec,
    setup: &ShakeSetup,
    dt: f64,
    t_max: f64,
) -> Result<Trajectory> {
    if !drive.is_trapped() {
        return Err(Error::Untrapped);
    }
    let limit = max_step(trap, drive);
    if !(dt > 0.0) || dt > limit {
        return Err(Error::StepTooLarge { dt, limit });
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(invalid("t_max", format!("must be positive, got {t_max}")));
    }
    let omega = trap_frequency(trap);
    let model = Model {
        depth: trap.depth,
        mass: trap.mass,
        inv_w2: 1.0 / (trap.waist * trap.waist),
        omega2: omega * omega,
        potential: setup.potential,
        amplitude: -(drive.m_j as f64) * setup.drive_amplitude.unwrap_or(trap.reduced_wavelength()),
        omega_b: drive.omega_b,
    };
    let energy =
        |x: f64, v: f64, t: f64| 0.5 * model.mass * v * v + model.potential(x, t) + model.depth;
    let escaped = |x: f64, e: f64| e > model.depth || x.abs() > 3.0 * trap.waist;

    // t_max/dt within rounding of an integer must not gain an extra step
    let ratio = t_max / dt;
    let steps = if (ratio - ratio.round()).abs() < 1e-9 * ratio {
        ratio.round()
    } else {
        ratio.ceil()
    } as usize;
    let mut traj = Trajectory::default();
    let mut x = setup.initial_position.unwrap_or(model.center(0.0));
    let mut v = 0.0;
    let record = |traj: &mut Trajectory, t: f64, x: f64, v: f64| -> bool {
        let e = energy(x, v, t);
        traj.times.push(t);
        traj.positions.push(x);
        traj.velocities.push(v);
        traj.energies.push(e);
        if escaped(x, e) {
            traj.escape_time = Some(t);
            return true;
        }
        false
    };
    if record(&mut traj, 0.0, x, v) {
        return Ok(traj);
    }
    for n in 0..steps {
        let t = n as f64 * dt;
        let h = 0.5 * dt;
        let k1x = v;
        let k1v = model.acceleration(x, t);
        let k2x = v + h * k1v;
        let k2v = model.acceleration(x + h * k1x, t + h);
        let k3x = v + h * k2v;
        let k3v = model.acceleration(x + h * k2x, t + h);
        let k4x = v + dt * k3v;
        let k4v = model.acceleration(x + dt * k3x, t + dt);
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if record(&mut traj, (n + 1) as f64 * dt, x, v) {
            break;
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adiabaticity {
    /// Larmor frequency over rotation rate, `(μ_B B/ħ)/ω_B`.
    pub ratio: f64,
    /// Ratio above 100.
    pub adiabatic: bool,
}

pub const ADIABATIC_THRESHOLD: f64 = 100.0;

pub fn adiabaticity_check(drive: &DriveSpec) -> Adiabaticity {
    let ratio = BOHR_MAGNETON * drive.b_field / HBAR / drive.omega_b;
    Adiabaticity {
        ratio,
        adiabatic: ratio > ADIABATIC_THRESHOLD,
    }
}

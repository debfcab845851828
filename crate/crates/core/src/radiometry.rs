//! Radiant intensities of the incident, scattered and interference fields,
//! beam power, mean wavevector, and the energy-conservation solve for the
//! scattered amplitude.
//!
//! The vacuum impedance is set to one, so `J = |E|²/2`.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{invalid, Error, Result};
use crate::fields::{BeamShape, Dipole, Direction, Handedness, IncidentBeam, RVec3};
use crate::quadrature::{Domain, Estimate, QuadratureSpec};

/// Radiant intensity components at one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiantComponents {
    pub j_in: f64,
    pub j_sc: f64,
    pub j_if: f64,
}

impl RadiantComponents {
    pub fn total(&self) -> f64 {
        self.j_in + self.j_sc + self.j_if
    }
}

/// Incident intensity alone.
pub fn incident_intensity(beam: &IncidentBeam, dir: Direction) -> f64 {
    0.5 * beam.scalar_amplitude(dir.theta).powi(2)
}

/// Interference term `Re[E_in*·E_sc]`, displacement phase included.
pub fn interference_intensity(beam: &IncidentBeam, dip: &Dipole, dir: Direction) -> f64 {
    if beam.scalar_amplitude(dir.theta) == 0.0 {
        return 0.0;
    }
    beam.field(dir).dot_conj(&dip.field(dir)).re
}

pub fn scattered_intensity(dip: &Dipole, dir: Direction) -> f64 {
    0.5 * dip.field(dir).norm_sqr()
}

pub fn radiant_components(beam: &IncidentBeam, dip: &Dipole, dir: Direction) -> RadiantComponents {
    RadiantComponents {
        j_in: incident_intensity(beam, dir),
        j_sc: scattered_intensity(dip, dir),
        j_if: interference_intensity(beam, dip, dir),
    }
}

/// Angular factor `f(Ω, Δ)` of the closed-form interference term, for either
/// handedness: `[γ(cosθ cos²φ + sin²φ) - σΔ sinθ cosφ]/√(γ²+Δ²)`.
pub fn interference_shape_factor(dir: Direction, detuning: f64, handedness: Handedness) -> f64 {
    let (st, ct) = dir.theta.sin_cos();
    let (sp, cp) = dir.phi.sin_cos();
    let sigma = handedness.sign();
    ((ct * cp * cp + sp * sp) - sigma * detuning * st * cp) / (1.0 + detuning * detuning).sqrt()
}

/// Closed form `J_if = -E₀ E_sc g(θ) f(Ω,Δ)/√2` for an undisplaced dipole.
pub fn interference_analytic(beam: &IncidentBeam, dip: &Dipole, dir: Direction) -> Result<f64> {
    if dip.displacement_kd() != 0.0 {
        return Err(invalid(
            "kd",
            "the closed-form interference term holds for an undisplaced dipole only",
        ));
    }
    let f = interference_shape_factor(dir, dip.detuning(), dip.handedness());
    Ok(-beam.scalar_amplitude(dir.theta) * dip.scattered_amplitude() * f / SQRT_2)
}

/// Domain on which the incident field is nonzero.
pub fn beam_domain(shape: &BeamShape) -> Domain {
    Domain::Cap {
        theta_max: shape.support(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamPower {
    pub numeric: Estimate<f64>,
    /// Exact for the tophat, leading order in `w_θ` for the Gaussian.
    pub analytic: f64,
}

/// Closed-form beam power (leading order for the Gaussian).
pub fn beam_power_analytic(beam: &IncidentBeam) -> f64 {
    let peak = 0.5 * beam.amplitude().powi(2);
    match beam.shape() {
        BeamShape::Gaussian { w_theta } => peak * PI * w_theta * w_theta / 2.0,
        BeamShape::Tophat { r_theta } => peak * 4.0 * PI * (0.5 * r_theta).sin().powi(2),
    }
}

pub fn beam_power_numeric(beam: &IncidentBeam, quad: &QuadratureSpec) -> Result<Estimate<f64>> {
    quad.integrate(beam_domain(&beam.shape()), |d| incident_intensity(beam, d))
}

pub fn beam_power(beam: &IncidentBeam, quad: &QuadratureSpec) -> Result<BeamPower> {
    Ok(BeamPower {
        numeric: beam_power_numeric(beam, quad)?,
        analytic: beam_power_analytic(beam),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanWavevector {
    /// `∫u J_in dΩ / P` in units of `k`.
    pub numeric: RVec3,
    /// Closed-form z component (leading order for the Gaussian).
    pub analytic_z: f64,
    pub achieved_tol: Option<f64>,
}

pub fn incident_mean_k(beam: &IncidentBeam, quad: &QuadratureSpec) -> Result<MeanWavevector> {
    let domain = beam_domain(&beam.shape());
    let power = beam_power_numeric(beam, quad)?;
    let moment = quad.integrate(domain, |d| d.unit_vector() * incident_intensity(beam, d))?;
    let analytic_z = match beam.shape() {
        BeamShape::Gaussian { w_theta } => 1.0 - w_theta * w_theta / 4.0,
        BeamShape::Tophat { r_theta } => (0.5 * r_theta).cos().powi(2),
    };
    Ok(MeanWavevector {
        numeric: moment.value / power.value,
        analytic_z,
        achieved_tol: worst_tol(&[power.achieved_tol, moment.achieved_tol]),
    })
}

pub(crate) fn worst_tol(tols: &[Option<f64>]) -> Option<f64> {
    tols.iter().flatten().copied().reduce(f64::max)
}

/// Total power scattered by a unit-amplitude circular dipole, `∫|E|²/2 dΩ`.
/// Exactly `4π/3`; computed by quadrature so the amplitude solve stays on one
/// numerical footing.
pub fn unit_scattered_power(
    handedness: Handedness,
    quad: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    let unit = Dipole::new(handedness, 0.0, 1.0, 0.0)?;
    quad.integrate(Domain::Full, |d| scattered_intensity(&unit, d))
}

/// Scattered amplitude together with the integrals it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSolution {
    pub scattered_amplitude: f64,
    /// `∫J_sc dΩ` per unit `E_sc²`.
    pub scattered_coefficient: f64,
    /// `∫J_if dΩ` per unit `E_sc`.
    pub interference_coefficient: f64,
    pub achieved_tol: Option<f64>,
}

/// Enforces `∫(J_if + J_sc) dΩ = 0`: with `∫J_sc = a E_sc²` and
/// `∫J_if = b E_sc`, `E_sc = -b/a`.
pub fn solve_scattered_amplitude_with(
    beam: &IncidentBeam,
    dipole: &Dipole,
    quad: &QuadratureSpec,
) -> Result<AmplitudeSolution> {
    let unit = dipole.with_scattered_amplitude(1.0);
    let a = quad.integrate(Domain::Full, |d| scattered_intensity(&unit, d))?;
    let b = quad.integrate(beam_domain(&beam.shape()), |d| {
        interference_intensity(beam, &unit, d)
    })?;
    if !(b.value < 0.0) {
        return Err(Error::DegenerateBeam {
            interference: b.value,
        });
    }
    Ok(AmplitudeSolution {
        scattered_amplitude: -b.value / a.value,
        scattered_coefficient: a.value,
        interference_coefficient: b.value,
        achieved_tol: worst_tol(&[a.achieved_tol, b.achieved_tol]),
    })
}

pub fn solve_scattered_amplitude(
    beam: &IncidentBeam,
    detuning: f64,
    handedness: Handedness,
    kd: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let dipole = Dipole::new(handedness, detuning, 1.0, kd)?;
    Ok(solve_scattered_amplitude_with(beam, &dipole, quad)?.scattered_amplitude)
}

/// Leading-order `E_sc/E₀` from energy conservation (exact for the tophat
/// at `kd = 0`).
pub fn amplitude_ratio_analytic(shape: &BeamShape, detuning: f64) -> f64 {
    let sin_alpha = 1.0 / (1.0 + detuning * detuning).sqrt();
    let pre = 3.0 * sin_alpha / (4.0 * SQRT_2);
    match *shape {
        BeamShape::Gaussian { w_theta } => pre * w_theta * w_theta,
        BeamShape::Tophat { r_theta } => {
            pre * (0.5 * r_theta).sin().powi(2) * (r_theta.cos() + 3.0)
        }
    }
}

/// Dipole with its amplitude fixed by energy conservation.
pub fn solved_dipole(
    beam: &IncidentBeam,
    detuning: f64,
    handedness: Handedness,
    kd: f64,
    quad: &QuadratureSpec,
) -> Result<(Dipole, AmplitudeSolution)> {
    let dipole = Dipole::new(handedness, detuning, 1.0, kd)?;
    let sol = solve_scattered_amplitude_with(beam, &dipole, quad)?;
    Ok((
        dipole.with_scattered_amplitude(sol.scattered_amplitude),
        sol,
    ))
}

//! Beam deflection, transverse force and the equilibrium displacement of the
//! dipole.
//!
//! Sign convention: `δθ > 0` exactly when the force on the atom points to
//! `-x`, i.e. when the beam is deflected towards `+x`. Forces are in units of
//! `P/c`, so `force_x = -δθ`.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fields::{BeamShape, Dipole, Handedness, IncidentBeam, RVec3};
use crate::quadrature::{Domain, QuadratureSpec, SphericalGrid};
use crate::radiometry::{
    beam_domain, beam_power_numeric, interference_intensity, scattered_intensity, solved_dipole,
    worst_tol,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Numeric,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeflectionResult {
    delta_k: RVec3,
    delta_theta: f64,
    force_x: f64,
    method: Method,
    scattered_amplitude: Option<f64>,
    achieved_tol: Option<f64>,
}

impl DeflectionResult {
    /// Binds the deflection angle and the force to the x component of `δ⟨k⟩`.
    fn from_delta_k(delta_k: RVec3, method: Method) -> Self {
        let delta_theta = delta_k.x;
        Self {
            delta_k,
            delta_theta,
            force_x: -delta_theta,
            method,
            scattered_amplitude: None,
            achieved_tol: None,
        }
    }

    /// Change of the mean wavevector, units of `k`.
    pub fn delta_k(&self) -> RVec3 {
        self.delta_k
    }

    pub fn delta_theta(&self) -> f64 {
        self.delta_theta
    }

    /// Transverse force in units of `P/c`.
    pub fn force_x(&self) -> f64 {
        self.force_x
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// `E_sc/E₀` used by the numeric path.
    pub fn scattered_amplitude(&self) -> Option<f64> {
        self.scattered_amplitude
    }

    pub fn achieved_tol(&self) -> Option<f64> {
        self.achieved_tol
    }
}

/// Leading-order deflection in the small-width, small-`kd` limit.
///
/// The z component reads the undefined ratio `γ/δ` of the closed form as
/// `γ/Δ`, which gives `-(3/2) sin²α w_θ²` (Gauss) and `-(3/4) sin²α r_θ²`
/// (tophat), both equal to `-∫J_sc dΩ / P` at leading order.
pub fn deflection_analytic(
    shape: &BeamShape,
    detuning: f64,
    handedness: Handedness,
    kd: f64,
) -> DeflectionResult {
    let sigma = handedness.sign();
    let lorentz = detuning / (1.0 + detuning * detuning);
    let sin2_alpha = 1.0 / (1.0 + detuning * detuning);
    let (width4, z) = match *shape {
        BeamShape::Gaussian { w_theta } => (w_theta.powi(4), -1.5 * sin2_alpha * w_theta * w_theta),
        BeamShape::Tophat { r_theta } => (
            r_theta.powi(4) / 4.0,
            -0.75 * sin2_alpha * r_theta * r_theta,
        ),
    };
    let dtheta = sigma * 0.75 * lorentz * width4 * (1.0 - sigma * kd);
    DeflectionResult::from_delta_k(RVec3::new(dtheta, 0.0, z), Method::Analytic)
}

/// `δ⟨k⟩ = ∫u_Ω J_if dΩ / P` with the amplitude fixed by energy conservation.
/// A displaced dipole enters only through the phase of its scattered field.
pub fn deflection_numeric(
    beam: &IncidentBeam,
    detuning: f64,
    handedness: Handedness,
    kd: f64,
    quad: &QuadratureSpec,
) -> Result<DeflectionResult> {
    let (dipole, sol) = solved_dipole(beam, detuning, handedness, kd, quad)?;
    deflection_for_dipole(beam, &dipole, quad).map(|mut r| {
        r.achieved_tol = worst_tol(&[r.achieved_tol, sol.achieved_tol]);
        r
    })
}

/// Deflection for a dipole whose amplitude is already known.
pub fn deflection_for_dipole(
    beam: &IncidentBeam,
    dipole: &Dipole,
    quad: &QuadratureSpec,
) -> Result<DeflectionResult> {
    let power = beam_power_numeric(beam, quad)?;
    let moment = quad.integrate(beam_domain(&beam.shape()), |d| {
        d.unit_vector() * interference_intensity(beam, dipole, d)
    })?;

    // The scattered light alone carries no net momentum. Its pattern is a
    // trigonometric polynomial of degree 3, integrated exactly by this rule;
    // an adaptive rule cannot settle on a value that is exactly zero.
    let exact = SphericalGrid::new(8, 8, Domain::Full)?;
    let sc_moment = exact.integrate(|d| d.unit_vector() * scattered_intensity(dipole, d));
    let sc_power = exact.integrate(|d| scattered_intensity(dipole, d));
    let residual = sc_moment.norm();
    if residual > 1e-9 * sc_power.max(f64::MIN_POSITIVE) {
        return Err(Error::Inconsistent {
            what: "scattered momentum",
            value: residual,
        });
    }

    let mut result = DeflectionResult::from_delta_k(moment.value / power.value, Method::Numeric);
    result.scattered_amplitude = Some(dipole.scattered_amplitude() / beam.amplitude());
    result.achieved_tol = worst_tol(&[power.achieved_tol, moment.achieved_tol]);
    Ok(result)
}

/// Which force law the root finder uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForceModel {
    Analytic,
    Numeric(QuadratureSpec),
}

/// Position `kd*` where the transverse force vanishes, searched on `[0, 2σ]`.
pub fn equilibrium_displacement(
    beam: &IncidentBeam,
    detuning: f64,
    handedness: Handedness,
    model: ForceModel,
) -> Result<f64> {
    if detuning == 0.0 || !detuning.is_finite() {
        return Err(invalid(
            "detuning",
            "the transverse force vanishes identically on resonance",
        ));
    }
    let force = |kd: f64| -> Result<f64> {
        match model {
            ForceModel::Analytic => {
                Ok(deflection_analytic(&beam.shape(), detuning, handedness, kd).force_x())
            }
            ForceModel::Numeric(quad) => {
                Ok(deflection_numeric(beam, detuning, handedness, kd, &quad)?.force_x())
            }
        }
    };
    find_root(force, 0.0, 2.0 * handedness.sign(), 1e-12, 1e-10)
}

/// Bracketed root finding: Illinois-modified secant steps, falling back to
/// bisection whenever the secant step leaves the bracket or stalls.
pub fn find_root<F>(mut f: F, a: f64, b: f64, f_tol: f64, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (a, b);
    let (mut f_lo, mut f_hi) = (f(lo)?, f(hi)?);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoRoot {
            lo: a,
            hi: b,
            f_lo,
            f_hi,
        });
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let mut x = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        let (left, right) = if lo < hi { (lo, hi) } else { (hi, lo) };
        if !(x > left && x < right) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x)?;
        if fx.abs() < f_tol {
            return Ok(x);
        }
        if fx.signum() == f_hi.signum() {
            hi = x;
            f_hi = fx;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        } else {
            lo = x;
            f_lo = fx;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        }
        if (hi - lo).abs() < x_tol {
            return Ok(0.5 * (lo + hi));
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Quantity swept by [`scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanAxis {
    /// Detuning from `from` to `to` (units of `γ`) at fixed `kd`.
    Detuning { from: f64, to: f64, kd: f64 },
    /// Displacement `kd` from `from` to `to` at fixed detuning.
    Displacement { from: f64, to: f64, detuning: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub detuning: f64,
    pub kd: f64,
    pub analytic: DeflectionResult,
    pub numeric: DeflectionResult,
}

/// Evenly spaced values from `from` to `to`, endpoints included.
pub fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    let step = (to - from) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                to
            } else {
                from + step * i as f64
            }
        })
        .collect()
}

pub fn scan(
    beam: &IncidentBeam,
    handedness: Handedness,
    axis: ScanAxis,
    n_points: usize,
    quad: &QuadratureSpec,
) -> Result<Vec<ScanRow>> {
    if n_points < 2 {
        return Err(invalid(
            "points",
            format!("need at least 2, got {n_points}"),
        ));
    }
    let (from, to) = match axis {
        ScanAxis::Detuning { from, to, .. } | ScanAxis::Displacement { from, to, .. } => (from, to),
    };
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(invalid(
            "range",
            format!("need a finite range from < to, got {from}..{to}"),
        ));
    }
    linspace(from, to, n_points)
        .into_par_iter()
        .map(|v| {
            let (detuning, kd) = match axis {
                ScanAxis::Detuning { kd, .. } => (v, kd),
                ScanAxis::Displacement { detuning, .. } => (detuning, v),
            };
            Ok(ScanRow {
                detuning,
                kd,
                analytic: deflection_analytic(&beam.shape(), detuning, handedness, kd),
                numeric: deflection_numeric(beam, detuning, handedness, kd, quad)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    /// Polar angle; negative values stand for `(|θ|, φ = π)`.
    pub theta: f64,
    pub j_in: f64,
    pub j_total: f64,
}

/// Radiant intensity in the plane of the dipole (`φ = 0` and `φ = π`),
/// normalized to the on-axis incident intensity. Samples `θ` evenly on
/// `[-π/2, π/2]`.
pub fn radiant_profile(
    beam: &IncidentBeam,
    detuning: f64,
    handedness: Handedness,
    n_theta: usize,
    quad: &QuadratureSpec,
) -> Result<Vec<ProfilePoint>> {
    if n_theta < 16 {
        return Err(invalid(
            "points",
            format!("need at least 16, got {n_theta}"),
        ));
    }
    let (dipole, _) = solved_dipole(beam, detuning, handedness, 0.0, quad)?;
    let norm = 0.5 * beam.amplitude().powi(2);
    let half = std::f64::consts::FRAC_PI_2;
    Ok(linspace(-half, half, n_theta)
        .into_iter()
        .map(|theta| {
            let dir = if theta < 0.0 {
                crate::Direction::new(-theta, std::f64::consts::PI)
            } else {
                crate::Direction::new(theta, 0.0)
            };
            let c = crate::radiometry::radiant_components(beam, &dipole, dir);
            ProfilePoint {
                theta,
                j_in: c.j_in / norm,
                j_total: c.total() / norm,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn analytic_maxima() {
        let g = deflection_analytic(
            &BeamShape::gaussian(0.6).unwrap(),
            1.0,
            Handedness::Plus,
            0.0,
        );
        assert_relative_eq!(g.delta_theta(), 3.0 * 0.6f64.powi(4) / 8.0, epsilon = 1e-15);
        assert_relative_eq!(g.delta_theta(), 0.0486, epsilon = 1e-12);
        let t = deflection_analytic(&BeamShape::tophat(0.6).unwrap(), 1.0, Handedness::Plus, 0.0);
        assert_relative_eq!(t.delta_theta(), 0.01215, epsilon = 1e-12);
        assert_eq!(t.force_x(), -t.delta_theta());
    }

    #[test]
    fn analytic_force_vanishes_at_kd_sigma() {
        let shape = BeamShape::tophat(0.3).unwrap();
        for d in [-2.0, 0.5, 3.0] {
            assert_eq!(
                deflection_analytic(&shape, d, Handedness::Plus, 1.0).delta_theta(),
                0.0
            );
            assert_eq!(
                deflection_analytic(&shape, d, Handedness::Minus, -1.0).delta_theta(),
                0.0
            );
        }
    }

    #[test]
    fn analytic_handedness_mirror_is_exact() {
        let shape = BeamShape::gaussian(0.3).unwrap();
        for d in [-1.5, 0.3, 2.0] {
            let p = deflection_analytic(&shape, d, Handedness::Plus, 0.0);
            let m = deflection_analytic(&shape, d, Handedness::Minus, 0.0);
            assert_eq!(p.delta_theta(), -m.delta_theta());
        }
    }

    #[test]
    fn root_finder_linear_is_exact() {
        let r = find_root(|x| Ok(1.0 - x), 0.0, 2.0, 1e-12, 1e-10).unwrap();
        assert_eq!(r, 1.0);
        let r = find_root(|x| Ok((x - 0.3f64).powi(3)), 0.0, 2.0, 1e-14, 1e-12).unwrap();
        assert!((r - 0.3).abs() < 1e-4);
        assert!(matches!(
            find_root(|x| Ok(x * x + 1.0), 0.0, 2.0, 1e-12, 1e-10),
            Err(Error::NoRoot { .. })
        ));
    }

    #[test]
    fn equilibrium_requires_detuning() {
        let beam = IncidentBeam::unit(BeamShape::gaussian(0.2).unwrap()).unwrap();
        assert!(
            equilibrium_displacement(&beam, 0.0, Handedness::Plus, ForceModel::Analytic).is_err()
        );
    }

    #[test]
    fn analytic_equilibrium() {
        let beam = IncidentBeam::unit(BeamShape::gaussian(0.2).unwrap()).unwrap();
        let kd =
            equilibrium_displacement(&beam, -1.0, Handedness::Plus, ForceModel::Analytic).unwrap();
        assert_eq!(kd, 1.0);
        let kd =
            equilibrium_displacement(&beam, 2.0, Handedness::Minus, ForceModel::Analytic).unwrap();
        assert_eq!(kd, -1.0);
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(-5.0, 5.0, 2), vec![-5.0, 5.0]);
        let v = linspace(0.0, 2.0, 5);
        assert_eq!(v, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}

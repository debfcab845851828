//! Directions on the unit sphere, complex field vectors, the incident angular
//! spectra and the far field of a circular dipole.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{invalid, Result};

pub type RVec3 = Vector3<f64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A propagation direction `(θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn unit_vector(&self) -> RVec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        RVec3::new(st * cp, st * sp, ct)
    }
}

/// Complex amplitude vector of a monochromatic field component.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CVec3 {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

impl CVec3 {
    pub const ZERO: CVec3 = CVec3 {
        x: Complex64::new(0.0, 0.0),
        y: Complex64::new(0.0, 0.0),
        z: Complex64::new(0.0, 0.0),
    };

    pub fn new(x: Complex64, y: Complex64, z: Complex64) -> Self {
        Self { x, y, z }
    }

    pub fn from_real(v: &RVec3) -> Self {
        Self::new(v.x.into(), v.y.into(), v.z.into())
    }

    /// Hermitian inner product `Σ conj(selfᵢ)·otherᵢ`.
    pub fn dot_conj(&self, other: &CVec3) -> Complex64 {
        self.x.conj() * other.x + self.y.conj() * other.y + self.z.conj() * other.z
    }

    /// Bilinear product with a real vector (no conjugation).
    pub fn dot_real(&self, v: &RVec3) -> Complex64 {
        self.x * v.x + self.y * v.y + self.z * v.z
    }

    pub fn cross_real(&self, v: &RVec3) -> CVec3 {
        CVec3::new(
            self.y * v.z - self.z * v.y,
            self.z * v.x - self.x * v.z,
            self.x * v.y - self.y * v.x,
        )
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x.norm_sqr() + self.y.norm_sqr() + self.z.norm_sqr()
    }

    pub fn scale(&self, c: Complex64) -> CVec3 {
        CVec3::new(self.x * c, self.y * c, self.z * c)
    }

    pub fn re(&self) -> RVec3 {
        RVec3::new(self.x.re, self.y.re, self.z.re)
    }

    pub fn im(&self) -> RVec3 {
        RVec3::new(self.x.im, self.y.im, self.z.im)
    }
}

impl Add for CVec3 {
    type Output = CVec3;
    fn add(self, o: CVec3) -> CVec3 {
        CVec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for CVec3 {
    type Output = CVec3;
    fn sub(self, o: CVec3) -> CVec3 {
        CVec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for CVec3 {
    type Output = CVec3;
    fn mul(self, s: f64) -> CVec3 {
        CVec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Complex64> for CVec3 {
    type Output = CVec3;
    fn mul(self, s: Complex64) -> CVec3 {
        self.scale(s)
    }
}

impl Neg for CVec3 {
    type Output = CVec3;
    fn neg(self) -> CVec3 {
        CVec3::new(-self.x, -self.y, -self.z)
    }
}

/// The x̂ polarization carried along when ẑ is rotated onto `u_Ω` about
/// `ẑ × u_Ω`.
pub fn polarization_vector(dir: Direction) -> RVec3 {
    let (st, ct) = dir.theta.sin_cos();
    let (sp, cp) = dir.phi.sin_cos();
    RVec3::new(ct * cp * cp + sp * sp, (ct - 1.0) * sp * cp, -st * cp)
}

/// Angular profile of the incident beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamShape {
    /// Amplitude `exp(-θ²/w²)`, `w` the 1/e² half-width of the angular intensity.
    Gaussian { w_theta: f64 },
    /// Uniform amplitude inside a cone of half-angle `r_theta`.
    Tophat { r_theta: f64 },
}

impl BeamShape {
    pub fn gaussian(w_theta: f64) -> Result<Self> {
        let shape = BeamShape::Gaussian { w_theta };
        shape.validate()?;
        Ok(shape)
    }

    pub fn tophat(r_theta: f64) -> Result<Self> {
        let shape = BeamShape::Tophat { r_theta };
        shape.validate()?;
        Ok(shape)
    }

    pub fn validate(&self) -> Result<()> {
        let (name, width) = match *self {
            BeamShape::Gaussian { w_theta } => ("w_theta", w_theta),
            BeamShape::Tophat { r_theta } => ("r_theta", r_theta),
        };
        if !(width > 0.0 && width < FRAC_PI_2) {
            return Err(invalid(
                name,
                format!("angular width must lie in (0, pi/2), got {width}"),
            ));
        }
        Ok(())
    }

    /// Angular width `w_θ` or `r_θ`.
    pub fn width(&self) -> f64 {
        match *self {
            BeamShape::Gaussian { w_theta } => w_theta,
            BeamShape::Tophat { r_theta } => r_theta,
        }
    }

    /// Polar angle beyond which the angular spectrum vanishes.
    pub fn support(&self) -> f64 {
        match *self {
            BeamShape::Gaussian { .. } => FRAC_PI_2,
            BeamShape::Tophat { r_theta } => r_theta,
        }
    }

    /// Real amplitude envelope at polar angle `theta`, unit on axis.
    pub fn envelope(&self, theta: f64) -> f64 {
        match *self {
            BeamShape::Gaussian { w_theta } if theta <= FRAC_PI_2 => {
                (-(theta * theta) / (w_theta * w_theta)).exp()
            }
            BeamShape::Tophat { r_theta } if theta <= r_theta => 1.0,
            _ => 0.0,
        }
    }

    pub fn with_width(&self, width: f64) -> Result<Self> {
        match self {
            BeamShape::Gaussian { .. } => BeamShape::gaussian(width),
            BeamShape::Tophat { .. } => BeamShape::tophat(width),
        }
    }
}

/// An x-polarized focused beam described by its angular spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentBeam {
    shape: BeamShape,
    amplitude: f64,
}

impl IncidentBeam {
    pub fn new(shape: BeamShape, amplitude: f64) -> Result<Self> {
        shape.validate()?;
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(invalid(
                "amplitude",
                format!("must be positive, got {amplitude}"),
            ));
        }
        Ok(Self { shape, amplitude })
    }

    /// Unit-amplitude beam.
    pub fn unit(shape: BeamShape) -> Result<Self> {
        Self::new(shape, 1.0)
    }

    pub fn shape(&self) -> BeamShape {
        self.shape
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Real field amplitude along `u_x(Ω)`.
    pub fn scalar_amplitude(&self, theta: f64) -> f64 {
        self.amplitude * self.shape.envelope(theta)
    }

    pub fn field(&self, dir: Direction) -> CVec3 {
        let a = self.scalar_amplitude(dir.theta);
        if a == 0.0 {
            return CVec3::ZERO;
        }
        CVec3::from_real(&(polarization_vector(dir) * a))
    }
}

/// Rotation sense of the induced dipole, `u_± = (x̂ ∓ iẑ)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Handedness {
    Plus,
    Minus,
}

impl Handedness {
    pub fn from_sign(sigma: i32) -> Result<Self> {
        match sigma {
            1 => Ok(Handedness::Plus),
            -1 => Ok(Handedness::Minus),
            other => Err(invalid("sigma", format!("must be +1 or -1, got {other}"))),
        }
    }

    pub fn sign(&self) -> f64 {
        match self {
            Handedness::Plus => 1.0,
            Handedness::Minus => -1.0,
        }
    }

    pub fn flipped(&self) -> Self {
        match self {
            Handedness::Plus => Handedness::Minus,
            Handedness::Minus => Handedness::Plus,
        }
    }

    pub fn spherical_unit(&self) -> CVec3 {
        CVec3::new(
            FRAC_1_SQRT_2.into(),
            0.0.into(),
            Complex64::new(0.0, -self.sign() * FRAC_1_SQRT_2),
        )
    }
}

/// Phase `α ∈ (0, π)` of the steady-state induced dipole relative to the
/// driving field, `cot α = -Δ/γ`. Takes `Δ/γ`.
pub fn bloch_phase(delta_over_gamma: f64) -> f64 {
    1.0f64.atan2(-delta_over_gamma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saturation {
    pub s: f64,
    pub coherent_fraction: f64,
}

impl Saturation {
    pub fn incoherent_fraction(&self) -> f64 {
        1.0 - self.coherent_fraction
    }
}

/// Detuning-weighted saturation parameter and the coherent share of the
/// scattered light.
pub fn saturation(intensity_over_isat: f64, delta_over_gamma: f64) -> Result<Saturation> {
    if !(intensity_over_isat >= 0.0 && intensity_over_isat.is_finite()) {
        return Err(invalid(
            "intensity",
            format!("must be non-negative, got {intensity_over_isat}"),
        ));
    }
    let s = intensity_over_isat / (1.0 + delta_over_gamma * delta_over_gamma);
    Ok(Saturation {
        s,
        coherent_fraction: 1.0 / (1.0 + s),
    })
}

/// A coherently driven circular dipole located at `x = kd / k`.
///
/// The phase `α` is always derived from the detuning. The radiated far field
/// carries an explicit factor `i`: with it, the forward scattered wave is out
/// of phase with a resonant drive and attenuates the beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dipole {
    handedness: Handedness,
    detuning: f64,
    scattered_amplitude: f64,
    displacement_kd: f64,
    radiation_phase: Complex64,
}

impl Dipole {
    pub fn new(
        handedness: Handedness,
        detuning: f64,
        scattered_amplitude: f64,
        displacement_kd: f64,
    ) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(invalid("detuning", "must be finite"));
        }
        if !(scattered_amplitude >= 0.0 && scattered_amplitude.is_finite()) {
            return Err(invalid(
                "scattered_amplitude",
                format!("must be non-negative, got {scattered_amplitude}"),
            ));
        }
        if !displacement_kd.is_finite() {
            return Err(invalid("kd", "must be finite"));
        }
        Ok(Self {
            handedness,
            detuning,
            scattered_amplitude,
            displacement_kd,
            radiation_phase: I,
        })
    }

    /// Replaces the factor `i` of the radiated field by `-i`. Only exists so
    /// the self-check can demonstrate that it catches this error.
    #[doc(hidden)]
    pub fn with_flipped_radiation_phase(mut self) -> Self {
        self.radiation_phase = -self.radiation_phase;
        self
    }

    #[doc(hidden)]
    pub fn radiation_phase_flipped(&self) -> bool {
        self.radiation_phase.im < 0.0
    }

    pub fn handedness(&self) -> Handedness {
        self.handedness
    }

    /// Detuning in units of `γ`.
    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn scattered_amplitude(&self) -> f64 {
        self.scattered_amplitude
    }

    pub fn displacement_kd(&self) -> f64 {
        self.displacement_kd
    }

    pub fn alpha(&self) -> f64 {
        bloch_phase(self.detuning)
    }

    pub fn with_scattered_amplitude(mut self, amplitude: f64) -> Self {
        self.scattered_amplitude = amplitude;
        self
    }

    pub fn with_displacement(mut self, kd: f64) -> Self {
        self.displacement_kd = kd;
        self
    }

    /// Far-field angular amplitude `E_sc·i·e^{iα}·((u_Ω×u_σ)×u_Ω)·e^{-i kd sinθ cosφ}`.
    pub fn field(&self, dir: Direction) -> CVec3 {
        let u = dir.unit_vector();
        let p = self.handedness.spherical_unit();
        // (u × p) × u = p - (u·p) u for unit u
        let transverse = p - CVec3::from_real(&u).scale(p.dot_real(&u));
        let phase = self.radiation_phase
            * Complex64::from_polar(1.0, self.alpha() - self.displacement_kd * u.x);
        transverse.scale(phase * self.scattered_amplitude)
    }
}

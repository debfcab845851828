//! Deflection of a focused laser beam by the circular dipole it induces in an
//! atom, the transverse reaction force on that atom, and the spin-dependent
//! trap displacement that follows from it.
//!
//! The optics modules work in dimensionless units: lengths in units of `1/k`,
//! detunings in units of the half linewidth `γ`, the vacuum impedance set to
//! one, and forces reported in units of `P/c`. Only [`dynamics`] uses SI
//! units.

pub mod constants;
pub mod deflection;
pub mod dynamics;
mod error;
pub mod fields;
pub mod focal;
pub mod quadrature;
pub mod radiometry;

pub use error::{Error, Result};
pub use fields::{
    bloch_phase, polarization_vector, saturation, BeamShape, CVec3, Dipole, Direction, Handedness,
    IncidentBeam, RVec3,
};
pub use quadrature::{AdaptiveOptions, Domain, Estimate, QuadratureSpec, SphericalGrid};

/// Crate version, embedded in every exported record.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

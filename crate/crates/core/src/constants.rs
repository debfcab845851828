//! Physical constants (CODATA 2018, exact where SI defines them) and unit
//! conversions used by the dynamics module.

pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// One gauss in tesla.
pub const GAUSS: f64 = 1e-4;

pub fn kelvin_to_joule(t: f64) -> f64 {
    BOLTZMANN * t
}

pub fn joule_to_kelvin(e: f64) -> f64 {
    e / BOLTZMANN
}

pub fn amu_to_kg(m: f64) -> f64 {
    ATOMIC_MASS_UNIT * m
}

pub fn gauss_to_tesla(b: f64) -> f64 {
    GAUSS * b
}

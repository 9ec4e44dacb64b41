//! Physical constants, fixed at compile time.

/// Faraday constant, C·mol⁻¹.
pub const FARADAY: f64 = 96485.33;

/// Universal gas constant, J·mol⁻¹·K⁻¹.
pub const GAS_CONSTANT: f64 = 8.31446;

/// Molar mass of O2, kg·mol⁻¹.
pub const M_O2: f64 = 0.032;

/// Molar mass of N2, kg·mol⁻¹.
pub const M_N2: f64 = 0.028;

/// Standard atmosphere, Pa.
pub const ATM: f64 = 101_325.0;

pub fn kelvin_from_celsius(t_celsius: f64) -> f64 {
    t_celsius + 273.15
}

pub fn celsius_from_kelvin(t_kelvin: f64) -> f64 {
    t_kelvin - 273.15
}

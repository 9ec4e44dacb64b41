//! O2/N2 mixture conversions between mole (volume) fraction, mass fraction
//! and partial pressure.

use crate::constants::{GAS_CONSTANT, M_N2, M_O2};
use crate::error::{Error, Result};

/// Converts an oxygen mole (volume) fraction into a mass fraction for an
/// O2/N2 binary mixture. C_O2 + C_N2 = 1 holds by construction.
pub fn mass_fraction_from_volume_fraction(x_o2: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x_o2) {
        return Err(Error::Domain {
            context: "mass_fraction_from_volume_fraction",
            message: format!("mole fraction {x_o2} outside [0, 1]"),
        });
    }
    Ok(x_o2 * M_O2 / (x_o2 * M_O2 + (1.0 - x_o2) * M_N2))
}

/// Inverse of [`mass_fraction_from_volume_fraction`].
pub fn volume_fraction_from_mass_fraction(c_o2: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c_o2) {
        return Err(Error::Domain {
            context: "volume_fraction_from_mass_fraction",
            message: format!("mass fraction {c_o2} outside [0, 1]"),
        });
    }
    Ok(c_o2 / M_O2 / (c_o2 / M_O2 + (1.0 - c_o2) / M_N2))
}

/// Partial pressure of a species from its mass fraction by the ideal gas law:
/// p_j = C_j * rho * R * T / M_j.
pub fn partial_pressure_from_mass_fraction(c_j: f64, rho: f64, t: f64, m_j: f64) -> Result<f64> {
    if c_j < 0.0 {
        return Err(Error::Domain {
            context: "partial_pressure_from_mass_fraction",
            message: format!("mass fraction {c_j} is negative"),
        });
    }
    if rho <= 0.0 || t <= 0.0 {
        return Err(Error::Domain {
            context: "partial_pressure_from_mass_fraction",
            message: format!("nonpositive density {rho} or temperature {t}"),
        });
    }
    Ok(c_j * rho * GAS_CONSTANT * t / m_j)
}

/// Ideal-gas density of an O2/N2 mixture at (T, p_total). Opt-in helper;
/// the solver otherwise treats the air density as a direct input.
pub fn air_density_ideal_gas(t: f64, p_total: f64, x_o2: f64) -> Result<f64> {
    if t <= 0.0 || p_total <= 0.0 {
        return Err(Error::Domain {
            context: "air_density_ideal_gas",
            message: format!("nonpositive temperature {t} or pressure {p_total}"),
        });
    }
    if !(0.0..=1.0).contains(&x_o2) {
        return Err(Error::Domain {
            context: "air_density_ideal_gas",
            message: format!("mole fraction {x_o2} outside [0, 1]"),
        });
    }
    let m_mix = x_o2 * M_O2 + (1.0 - x_o2) * M_N2;
    Ok(p_total * m_mix / (GAS_CONSTANT * t))
}

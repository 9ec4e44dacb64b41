//! Domain types describing the cathode geometry, materials and operating
//! point, together with aggregated input validation.

use crate::error::{Error, Result, Violation};

/// Cathode geometry. h1 is the electrolyte/cathode interface, h2 the external
/// boundary. The catalyst/backing interface h_b is a solution output
/// (delta_c = h_b - h1), not an input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CathodeGeometry {
    /// Coordinate of the electrolyte/cathode interface, m.
    pub h1: f64,
    /// Coordinate of the cathode external boundary, m.
    pub h2: f64,
}

impl CathodeGeometry {
    pub fn from_thickness(thickness: f64) -> Self {
        CathodeGeometry {
            h1: 0.0,
            h2: thickness,
        }
    }

    /// Electrode thickness h2 - h1, m.
    pub fn thickness(&self) -> f64 {
        self.h2 - self.h1
    }
}

/// Parameterized exchange current density model:
/// i0 = prefactor * p_O2^beta * exp(-E_a / (R T)),
/// with the Butler-Volmer symmetry factors carried along so that a whole
/// kinetic relation can be swapped in from configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeCurrentModel {
    /// A·m⁻²·Pa⁻ᵝ
    pub prefactor: f64,
    /// Pressure exponent beta, dimensionless.
    pub pressure_exponent: f64,
    /// Activation energy, J·mol⁻¹.
    pub activation_energy: f64,
    /// Coefficient multiplying F·eta/(R T) in the forward exponential.
    pub forward_symmetry: f64,
    /// Coefficient multiplying F·eta/(R T) in the backward exponential.
    pub backward_symmetry: f64,
}

impl ExchangeCurrentModel {
    /// The LSCF cathode relation: 1.47e6 * p_O2^0.2 * exp(-85859/(R T)),
    /// with symmetry factors (1.2, 1.0).
    pub fn lscf() -> Self {
        ExchangeCurrentModel {
            prefactor: 1.47e6,
            pressure_exponent: 0.2,
            activation_energy: 85_859.0,
            forward_symmetry: 1.2,
            backward_symmetry: 1.0,
        }
    }
}

/// Effective material properties of the cathode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialSet {
    /// Effective electron conductivity, S·m⁻¹.
    pub sigma_el: f64,
    /// Effective ion conductivity, S·m⁻¹.
    pub sigma_ion: f64,
    /// Air density, kg·m⁻³.
    pub rho_a: f64,
    /// Effective O2-N2 diffusivity, m²·s⁻¹.
    pub d2: f64,
    /// Double-phase-boundary area density, m²·m⁻³.
    pub a_dpb: f64,
    pub exchange_model: ExchangeCurrentModel,
}

impl MaterialSet {
    /// A plausible LSCF-like effective property set, resolved at 800 °C. The
    /// underlying measured values are not tabulated here, so this set is
    /// representative, not a reproduction target.
    pub fn lscf_like() -> Self {
        MaterialModel::lscf_like().resolve(1073.15)
    }
}

/// Temperature-dependent material description: a [`MaterialSet`] measured at a
/// reference temperature plus a thermal-activation energy for the ion
/// conductivity. [`MaterialModel::resolve`] produces the effective property
/// set for a given operating temperature; all other properties are treated as
/// temperature-independent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialModel {
    /// Properties at `reference_temperature`.
    pub base: MaterialSet,
    /// Temperature at which `base` holds, K.
    pub reference_temperature: f64,
    /// Activation energy of the ion conductivity, J·mol⁻¹. Zero makes the
    /// ion conductivity constant.
    pub sigma_ion_activation_energy: f64,
}

impl MaterialModel {
    /// Effective properties at temperature `t` [K]:
    /// sigma_ion(t) = sigma_ion(t_ref) · exp(−E_a/R · (1/t − 1/t_ref)).
    pub fn resolve(&self, t: f64) -> MaterialSet {
        let mut set = self.base;
        let arg = -self.sigma_ion_activation_energy / crate::constants::GAS_CONSTANT
            * (1.0 / t - 1.0 / self.reference_temperature);
        set.sigma_ion *= arg.exp();
        set
    }

    /// An LSCF-like temperature-dependent property set referenced at 800 °C.
    pub fn lscf_like() -> Self {
        MaterialModel {
            base: MaterialSet {
                sigma_el: 3.0e3,
                sigma_ion: 0.2,
                rho_a: 0.327,
                d2: 2.0e-5,
                a_dpb: 3.28e6,
                exchange_model: ExchangeCurrentModel::lscf(),
            },
            reference_temperature: 1073.15,
            sigma_ion_activation_energy: 1.21e5,
        }
    }
}

/// A single operating point of the cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Temperature, K.
    pub temperature: f64,
    /// Cell current density, A·m⁻².
    pub j_cell: f64,
    /// Terminal electron potential at h2, V.
    pub v2: f64,
    /// Oxygen volume (mole) fraction at h2, dimensionless.
    pub x_o2_bulk: f64,
    /// Total pressure, Pa.
    pub p_total: f64,
}

/// Validates geometry, materials and operating point together, reporting
/// every violation. Never clamps.
pub fn validate(
    geometry: &CathodeGeometry,
    materials: &MaterialSet,
    operating: &OperatingPoint,
) -> Result<()> {
    let mut violations = Vec::new();
    let mut require = |ok: bool, field: &str, constraint: &str| {
        if !ok {
            violations.push(Violation {
                field: field.to_string(),
                constraint: constraint.to_string(),
            });
        }
    };

    require(
        geometry.thickness() > 0.0,
        "geometry.thickness",
        "h2 must exceed h1",
    );
    require(
        materials.sigma_el > 0.0,
        "materials.sigma_el",
        "must be strictly positive",
    );
    require(
        materials.sigma_ion > 0.0,
        "materials.sigma_ion",
        "must be strictly positive",
    );
    require(
        materials.rho_a > 0.0,
        "materials.rho_a",
        "must be strictly positive",
    );
    require(
        materials.d2 > 0.0,
        "materials.d2",
        "must be strictly positive",
    );
    require(
        materials.a_dpb > 0.0,
        "materials.a_dpb",
        "must be strictly positive",
    );
    require(
        materials.exchange_model.prefactor > 0.0,
        "materials.exchange_model.prefactor",
        "must be strictly positive",
    );
    require(
        materials.exchange_model.activation_energy >= 0.0,
        "materials.exchange_model.activation_energy",
        "must be non-negative",
    );
    require(
        materials.exchange_model.forward_symmetry > 0.0,
        "materials.exchange_model.forward_symmetry",
        "must be strictly positive",
    );
    require(
        materials.exchange_model.backward_symmetry > 0.0,
        "materials.exchange_model.backward_symmetry",
        "must be strictly positive",
    );
    require(
        operating.temperature > 0.0,
        "operating.temperature",
        "must be strictly positive",
    );
    require(
        operating.j_cell >= 0.0,
        "operating.j_cell",
        "must be non-negative",
    );
    require(
        operating.x_o2_bulk > 0.0 && operating.x_o2_bulk < 1.0,
        "operating.x_o2_bulk",
        "must lie strictly inside (0, 1)",
    );
    require(
        operating.p_total > 0.0,
        "operating.p_total",
        "must be strictly positive",
    );

    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(violations))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::kelvin_from_celsius;

    fn lscf_operating() -> OperatingPoint {
        OperatingPoint {
            temperature: kelvin_from_celsius(800.0),
            j_cell: 2000.0,
            v2: 0.3,
            x_o2_bulk: 0.21,
            p_total: 101_325.0,
        }
    }

    #[test]
    fn lscf_case_is_valid() {
        let geometry = CathodeGeometry::from_thickness(5e-5);
        assert!(validate(&geometry, &MaterialSet::lscf_like(), &lscf_operating()).is_ok());
    }

    #[test]
    fn inverted_geometry_rejected() {
        let geometry = CathodeGeometry { h1: 5e-5, h2: 0.0 };
        let err = validate(&geometry, &MaterialSet::lscf_like(), &lscf_operating()).unwrap_err();
        match err {
            Error::Validation(violations) => {
                assert!(violations.iter().any(|v| v.field == "geometry.thickness"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn zero_ion_conductivity_rejected() {
        let geometry = CathodeGeometry::from_thickness(5e-5);
        let mut materials = MaterialSet::lscf_like();
        materials.sigma_ion = 0.0;
        let err = validate(&geometry, &materials, &lscf_operating()).unwrap_err();
        match err {
            Error::Validation(violations) => {
                assert!(violations.iter().any(|v| v.field == "materials.sigma_ion"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn validate_is_idempotent() {
        let geometry = CathodeGeometry::from_thickness(5e-5);
        let materials = MaterialSet::lscf_like();
        let operating = lscf_operating();
        assert!(validate(&geometry, &materials, &operating).is_ok());
        assert!(validate(&geometry, &materials, &operating).is_ok());
    }
}

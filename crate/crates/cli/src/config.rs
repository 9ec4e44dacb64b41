//! TOML configuration schema. Every dimensional key carries its unit in the
//! name; temperatures are given in °C and converted to K on ingestion.

use serde::Deserialize;
use sofc_cathode::constants::kelvin_from_celsius;
use sofc_cathode::{
    CathodeGeometry, ExchangeCurrentModel, MaterialModel, MaterialSet, OperatingPoint,
    SolverSettings,
};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub geometry: GeometrySection,
    pub materials: MaterialsSection,
    pub operating: OperatingSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub sensitivity: SensitivitySection,
    #[serde(default)]
    pub compare: CompareSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    /// Cathode thickness h2 - h1, m.
    pub thickness_m: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsSection {
    /// Effective electron conductivity, S·m⁻¹.
    pub sigma_el_s_per_m: f64,
    /// Effective ion conductivity at the reference temperature, S·m⁻¹.
    pub sigma_ion_s_per_m: f64,
    /// Temperature at which sigma_ion_s_per_m holds, °C.
    pub sigma_ion_reference_temperature_c: f64,
    /// Thermal activation energy of the ion conductivity, J·mol⁻¹.
    /// Zero makes the ion conductivity temperature-independent.
    #[serde(default)]
    pub sigma_ion_activation_energy_j_per_mol: f64,
    /// Air density, kg·m⁻³.
    pub rho_a_kg_per_m3: f64,
    /// Effective O2-N2 diffusivity, m²·s⁻¹.
    pub d2_m2_per_s: f64,
    /// Double-phase-boundary area density, m²·m⁻³.
    pub a_dpb_per_m: f64,
    pub exchange_current: ExchangeCurrentSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExchangeCurrentSection {
    /// A·m⁻²·Pa⁻ᵝ.
    pub prefactor_a_per_m2: f64,
    /// Pressure exponent beta, dimensionless.
    pub pressure_exponent: f64,
    /// Activation energy, J·mol⁻¹.
    pub activation_energy_j_per_mol: f64,
    /// Coefficient multiplying F·eta/(R T) in the forward exponential.
    pub forward_symmetry: f64,
    /// Coefficient multiplying F·eta/(R T) in the backward exponential.
    pub backward_symmetry: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingSection {
    /// Operating temperature, °C.
    pub temperature_c: f64,
    /// Cell current density, A·m⁻².
    pub j_cell_a_per_m2: f64,
    /// Terminal electron potential at the external boundary, V.
    pub v2_v: f64,
    /// Oxygen volume (mole) fraction in the feed air, dimensionless.
    pub x_o2_bulk: f64,
    /// Total pressure, Pa.
    pub p_total_pa: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// Nodal points over the active layer.
    pub nodes: usize,
    /// Relative convergence tolerance of the fixed-point iteration.
    pub tol: f64,
    /// Iteration cap.
    pub max_iter: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverSettings::default();
        SolverSection {
            nodes: s.nodes,
            tol: s.tol,
            max_iter: s.max_iter,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Grid temperatures, °C.
    pub temperatures_c: Vec<f64>,
    /// Grid current densities, A·m⁻².
    pub current_densities_a_per_m2: Vec<f64>,
    /// Cell-current shares for the penetration summary, each in (0, 1).
    pub current_fractions: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            temperatures_c: vec![700.0, 750.0, 800.0, 850.0, 900.0, 950.0],
            current_densities_a_per_m2: vec![200.0, 500.0, 1000.0, 1500.0, 2000.0],
            current_fractions: vec![0.9, 0.95, 0.99],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    /// Sharpness exponent of the manufactured benchmark, > 1.
    pub alpha: f64,
    /// Node counts of the convergence study.
    pub node_counts: Vec<usize>,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            alpha: 8.0,
            node_counts: vec![20, 50, 100, 200],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensitivitySection {
    /// Oxygen volume fractions to scan, each in (0, 1).
    pub x_o2_bulk: Vec<f64>,
}

impl Default for SensitivitySection {
    fn default() -> Self {
        SensitivitySection {
            x_o2_bulk: vec![0.05, 0.10, 0.15, 0.21, 0.30, 0.40, 0.50],
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    /// Measurement CSV path, resolved relative to the config file. Columns:
    /// j_cell_a_per_m2, sigma_eta_v, and optionally temperature_c and
    /// x_o2_bulk per row.
    pub measured_csv: Option<String>,
}

impl Config {
    pub fn geometry(&self) -> CathodeGeometry {
        CathodeGeometry::from_thickness(self.geometry.thickness_m)
    }

    pub fn material_model(&self) -> MaterialModel {
        let m = &self.materials;
        MaterialModel {
            base: MaterialSet {
                sigma_el: m.sigma_el_s_per_m,
                sigma_ion: m.sigma_ion_s_per_m,
                rho_a: m.rho_a_kg_per_m3,
                d2: m.d2_m2_per_s,
                a_dpb: m.a_dpb_per_m,
                exchange_model: ExchangeCurrentModel {
                    prefactor: m.exchange_current.prefactor_a_per_m2,
                    pressure_exponent: m.exchange_current.pressure_exponent,
                    activation_energy: m.exchange_current.activation_energy_j_per_mol,
                    forward_symmetry: m.exchange_current.forward_symmetry,
                    backward_symmetry: m.exchange_current.backward_symmetry,
                },
            },
            reference_temperature: kelvin_from_celsius(m.sigma_ion_reference_temperature_c),
            sigma_ion_activation_energy: m.sigma_ion_activation_energy_j_per_mol,
        }
    }

    pub fn operating(&self) -> OperatingPoint {
        let o = &self.operating;
        OperatingPoint {
            temperature: kelvin_from_celsius(o.temperature_c),
            j_cell: o.j_cell_a_per_m2,
            v2: o.v2_v,
            x_o2_bulk: o.x_o2_bulk,
            p_total: o.p_total_pa,
        }
    }

    /// Solver settings after applying the command-line overrides.
    pub fn solver_settings(&self, nodes: Option<usize>, tol: Option<f64>) -> SolverSettings {
        SolverSettings {
            nodes: nodes.unwrap_or(self.solver.nodes),
            tol: tol.unwrap_or(self.solver.tol),
            max_iter: self.solver.max_iter,
            ..SolverSettings::default()
        }
    }
}

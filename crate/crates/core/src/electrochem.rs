//! Pointwise electrochemical kinetics: exchange current density,
//! concentration and (modified) activation overpotentials, the Butler-Volmer
//! charge-transfer current, and the psi profile of the dual formulation.

use crate::constants::{FARADAY, GAS_CONSTANT, M_O2};
use crate::domain::{ExchangeCurrentModel, MaterialSet, OperatingPoint};
use crate::error::{Error, Result};
use crate::gas::mass_fraction_from_volume_fraction;

/// Default cap on the forward Butler-Volmer exponent. Far beyond any physical
/// overpotential; exceeding it signals divergence of the outer iteration.
pub const DEFAULT_OVERFLOW_CAP: f64 = 500.0;

/// Bundles everything the pointwise kinetics needs.
#[derive(Debug, Clone)]
pub struct KineticsContext {
    pub materials: MaterialSet,
    pub operating: OperatingPoint,
    /// Oxygen mass fraction at h2, converted from operating.x_o2_bulk.
    pub c_o2_bulk: f64,
    /// Cap on the forward Butler-Volmer exponent.
    pub overflow_cap: f64,
}

impl KineticsContext {
    pub fn new(materials: MaterialSet, operating: OperatingPoint) -> Result<Self> {
        let c_o2_bulk = mass_fraction_from_volume_fraction(operating.x_o2_bulk)?;
        Ok(KineticsContext {
            materials,
            operating,
            c_o2_bulk,
            overflow_cap: DEFAULT_OVERFLOW_CAP,
        })
    }

    pub fn with_overflow_cap(mut self, cap: f64) -> Self {
        self.overflow_cap = cap;
        self
    }
}

/// Exchange current density i0 = prefactor * p_O2^beta * exp(-E_a/(R T)),
/// A·m⁻².
pub fn exchange_current_density(p_o2: f64, t: f64, model: &ExchangeCurrentModel) -> Result<f64> {
    if p_o2 < 0.0 {
        return Err(Error::Domain {
            context: "exchange_current_density",
            message: format!("negative partial pressure {p_o2}"),
        });
    }
    if t <= 0.0 {
        return Err(Error::Domain {
            context: "exchange_current_density",
            message: format!("nonpositive temperature {t}"),
        });
    }
    Ok(model.prefactor
        * p_o2.powf(model.pressure_exponent)
        * (-model.activation_energy / (GAS_CONSTANT * t)).exp())
}

/// Concentration overpotential eta_conc = (R T / 4F) ln(C_bulk / C), V.
///
/// Negative values are permitted (C above bulk can occur in unphysical trial
/// states during iteration); nonpositive mass fractions are a domain error
/// and signal oxygen depletion upstream.
pub fn concentration_overpotential(c_o2: f64, c_o2_bulk: f64, t: f64) -> Result<f64> {
    if c_o2 <= 0.0 || c_o2_bulk <= 0.0 {
        return Err(Error::LimitingCurrent {
            c_o2: c_o2.min(c_o2_bulk),
            location: "concentration_overpotential",
        });
    }
    Ok(GAS_CONSTANT * t / (4.0 * FARADAY) * (c_o2_bulk / c_o2).ln())
}

/// Modified activation overpotential eta_act = |phi_ion - phi_el - eta_conc|.
/// Always non-negative; the absolute value is exactly what removes the
/// negative charge-transfer current of the classical formulation.
pub fn activation_overpotential_modified(phi_ion: f64, phi_el: f64, eta_conc: f64) -> f64 {
    (phi_ion - phi_el - eta_conc).abs()
}

/// The Butler-Volmer bracket exp(f F eta/RT) - exp(-b F eta/RT), with an
/// overflow guard on the forward exponent.
fn bv_bracket(eta_act: f64, t: f64, model: &ExchangeCurrentModel, cap: f64) -> Result<f64> {
    let f_rt = FARADAY / (GAS_CONSTANT * t);
    let forward = model.forward_symmetry * f_rt * eta_act;
    if forward > cap {
        return Err(Error::KineticsOverflow {
            exponent: forward,
            cap,
        });
    }
    Ok(forward.exp() - (-model.backward_symmetry * f_rt * eta_act).exp())
}

/// Volumetric charge-transfer current
/// i_ct = i0 * A_dpb * [exp(f F eta/RT) - exp(-b F eta/RT)], A·m⁻³.
pub fn charge_transfer_current(
    eta_act: f64,
    i0: f64,
    a_dpb: f64,
    t: f64,
    model: &ExchangeCurrentModel,
    overflow_cap: f64,
) -> Result<f64> {
    Ok(i0 * a_dpb * bv_bracket(eta_act, t, model, overflow_cap)?)
}

/// The psi profile of the dual formulation: the charge-transfer current with
/// the bulk mass fraction factored out, so that
/// i_ct = (C_O2_bulk)^beta * psi.
pub fn psi_profile(c_o2_reduced: f64, eta_act: f64, ctx: &KineticsContext) -> Result<f64> {
    if c_o2_reduced <= 0.0 {
        return Err(Error::LimitingCurrent {
            c_o2: c_o2_reduced,
            location: "psi_profile",
        });
    }
    let model = &ctx.materials.exchange_model;
    let t = ctx.operating.temperature;
    let reduced_pressure = c_o2_reduced * ctx.materials.rho_a * GAS_CONSTANT * t / M_O2;
    Ok(model.prefactor
        * reduced_pressure.powf(model.pressure_exponent)
        * (-model.activation_energy / (GAS_CONSTANT * t)).exp()
        * ctx.materials.a_dpb
        * bv_bracket(eta_act, t, model, ctx.overflow_cap)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::kelvin_from_celsius;
    use crate::gas::partial_pressure_from_mass_fraction;

    fn lscf_context() -> KineticsContext {
        KineticsContext::new(
            MaterialSet::lscf_like(),
            OperatingPoint {
                temperature: kelvin_from_celsius(800.0),
                j_cell: 2000.0,
                v2: 0.3,
                x_o2_bulk: 0.21,
                p_total: 101_325.0,
            },
        )
        .unwrap()
    }

    #[test]
    fn exchange_current_zero_pressure() {
        let i0 = exchange_current_density(0.0, 1073.15, &ExchangeCurrentModel::lscf()).unwrap();
        assert_eq!(i0, 0.0);
    }

    #[test]
    fn exchange_current_power_law() {
        let model = ExchangeCurrentModel::lscf();
        let i0 = exchange_current_density(1.0e4, 1073.15, &model).unwrap();
        let i0_doubled = exchange_current_density(2.0e4, 1073.15, &model).unwrap();
        let ratio = i0_doubled / i0;
        assert!((ratio - 2f64.powf(0.2)).abs() < 1e-12);
    }

    #[test]
    fn exchange_current_lscf_reference() {
        let i0 =
            exchange_current_density(21_278.0, 1073.15, &ExchangeCurrentModel::lscf()).unwrap();
        assert!((i0 - 7.1e2).abs() / 7.1e2 < 1e-2, "i0 = {i0}");
    }

    #[test]
    fn exchange_current_log_affine_in_ln_p_and_inverse_t() {
        let model = ExchangeCurrentModel::lscf();
        // slope in ln p should equal beta
        let pressures = [1.0e3, 3.0e3, 1.0e4, 3.0e4, 1.0e5];
        for pair in pressures.windows(2) {
            let i_a = exchange_current_density(pair[0], 1073.15, &model).unwrap();
            let i_b = exchange_current_density(pair[1], 1073.15, &model).unwrap();
            let slope = (i_b.ln() - i_a.ln()) / (pair[1].ln() - pair[0].ln());
            assert!((slope - model.pressure_exponent).abs() < 1e-10);
        }
        // slope in 1/T should equal -E_a/R
        let temperatures = [900.0, 1000.0, 1100.0, 1200.0];
        for pair in temperatures.windows(2) {
            let i_a = exchange_current_density(1.0e4, pair[0], &model).unwrap();
            let i_b = exchange_current_density(1.0e4, pair[1], &model).unwrap();
            let slope = (i_b.ln() - i_a.ln()) / (1.0 / pair[1] - 1.0 / pair[0]);
            assert!(
                (slope + model.activation_energy / GAS_CONSTANT).abs()
                    / (model.activation_energy / GAS_CONSTANT)
                    < 1e-10
            );
        }
    }

    #[test]
    fn concentration_overpotential_cases() {
        let t = 1073.15;
        assert_eq!(concentration_overpotential(0.2, 0.2, t).unwrap(), 0.0);
        let halved = concentration_overpotential(0.1165, 0.233, t).unwrap();
        assert!((halved - 0.01602).abs() < 1e-4, "halved = {halved}");
        assert!(concentration_overpotential(0.3, 0.2, t).unwrap() < 0.0);
        assert!(concentration_overpotential(0.0, 0.2, t).is_err());
    }

    #[test]
    fn activation_overpotential_absolute_value() {
        assert_eq!(activation_overpotential_modified(0.3, 0.3, 0.0), 0.0);
        assert!((activation_overpotential_modified(0.29, 0.3, 0.0) - 0.01).abs() < 1e-15);
        let eta = activation_overpotential_modified(0.5, 0.3, 0.05);
        assert!((eta - 0.15).abs() < 1e-15);
    }

    #[test]
    fn charge_transfer_zero_overpotential() {
        let model = ExchangeCurrentModel::lscf();
        let i = charge_transfer_current(0.0, 712.0, 1.0e6, 1073.15, &model, 500.0).unwrap();
        assert_eq!(i, 0.0);
    }

    #[test]
    fn charge_transfer_reference_value() {
        let model = ExchangeCurrentModel::lscf();
        let i = charge_transfer_current(0.05, 712.0, 1.0e6, 1073.15, &model, 500.0).unwrap();
        assert!((i - 9.48e8).abs() / 9.48e8 < 1e-2, "i = {i}");
    }

    #[test]
    fn charge_transfer_linearization() {
        let model = ExchangeCurrentModel::lscf();
        let t = 1073.15;
        let eta = 1e-7;
        let i = charge_transfer_current(eta, 712.0, 1.0e6, t, &model, 500.0).unwrap();
        let slope = 712.0 * 1.0e6 * 2.2 * FARADAY / (GAS_CONSTANT * t);
        assert!((i / eta - slope).abs() / slope < 1e-5);
    }

    #[test]
    fn charge_transfer_monotone_in_overpotential() {
        let model = ExchangeCurrentModel::lscf();
        let mut last = 0.0;
        for k in 1..40 {
            let eta = k as f64 * 0.005;
            let i = charge_transfer_current(eta, 712.0, 1.0e6, 1073.15, &model, 500.0).unwrap();
            assert!(i > last, "not increasing at eta = {eta}");
            last = i;
        }
    }

    #[test]
    fn charge_transfer_overflow_guard() {
        let model = ExchangeCurrentModel::lscf();
        let err = charge_transfer_current(5.0, 712.0, 1.0e6, 1073.15, &model, 50.0).unwrap_err();
        assert_eq!(err.name(), "kinetics_overflow");
    }

    #[test]
    fn psi_factorization_identity() {
        let ctx = lscf_context();
        let t = ctx.operating.temperature;
        let beta = ctx.materials.exchange_model.pressure_exponent;
        for k in 1..30 {
            let c = 0.005 * k as f64;
            let eta = 0.002 * k as f64;
            let p = partial_pressure_from_mass_fraction(c, ctx.materials.rho_a, t, M_O2).unwrap();
            let i0 = exchange_current_density(p, t, &ctx.materials.exchange_model).unwrap();
            let direct = charge_transfer_current(
                eta,
                i0,
                ctx.materials.a_dpb,
                t,
                &ctx.materials.exchange_model,
                ctx.overflow_cap,
            )
            .unwrap();
            let psi = psi_profile(c / ctx.c_o2_bulk, eta, &ctx).unwrap();
            let factored = ctx.c_o2_bulk.powf(beta) * psi;
            assert!(
                (direct - factored).abs() <= 1e-12 * direct.abs().max(1e-300),
                "c = {c}, eta = {eta}: {direct} vs {factored}"
            );
        }
    }

    #[test]
    fn psi_at_unit_reduced_fraction_recovers_bulk_kinetics() {
        let ctx = lscf_context();
        let t = ctx.operating.temperature;
        let p_bulk =
            partial_pressure_from_mass_fraction(ctx.c_o2_bulk, ctx.materials.rho_a, t, M_O2)
                .unwrap();
        let i0 = exchange_current_density(p_bulk, t, &ctx.materials.exchange_model).unwrap();
        let direct = charge_transfer_current(
            0.03,
            i0,
            ctx.materials.a_dpb,
            t,
            &ctx.materials.exchange_model,
            ctx.overflow_cap,
        )
        .unwrap();
        let beta = ctx.materials.exchange_model.pressure_exponent;
        let factored = ctx.c_o2_bulk.powf(beta) * psi_profile(1.0, 0.03, &ctx).unwrap();
        assert!((direct - factored).abs() < 1e-10 * direct);
    }
}

//! Manufactured verification benchmark. A family of closed-form fields with
//! power-law current split j_ion = j (1-z)^alpha is made an exact solution by
//! adding a source to the charge-transfer integrand; the numerical solver is
//! then graded against those fields on a sequence of meshes.

use crate::constants::{FARADAY, M_O2};
use crate::domain::{validate, CathodeGeometry, MaterialSet, OperatingPoint};
use crate::electrochem::{
    activation_overpotential_modified, charge_transfer_current, concentration_overpotential,
    exchange_current_density, KineticsContext,
};
use crate::error::{Error, Result};
use crate::gas::partial_pressure_from_mass_fraction;
use crate::mesh::{FieldSet, Mesh};
use crate::quadrature::build_spline;
use crate::solver::{
    interface_values, residual_between, solve_with_source, CathodeSolution, InterfaceValues,
    SolverSettings, SolverState,
};

/// A fully specified benchmark instance. `delta_c_exact` is the thickness at
/// which the manufactured fields satisfy the global charge balance; it is
/// determined once by [`benchmark_delta_c`] and then frozen into the case.
#[derive(Debug, Clone, Copy)]
pub struct BenchmarkCase {
    /// Power-law exponent of the manufactured current split (> 1).
    pub alpha: f64,
    pub geometry: CathodeGeometry,
    pub materials: MaterialSet,
    pub operating: OperatingPoint,
    /// Exact active layer thickness, m.
    pub delta_c_exact: f64,
}

impl BenchmarkCase {
    /// Builds a case by solving the thickness consistency condition for the
    /// given inputs.
    pub fn new(
        alpha: f64,
        geometry: CathodeGeometry,
        materials: MaterialSet,
        operating: OperatingPoint,
    ) -> Result<Self> {
        if alpha <= 1.0 {
            return Err(Error::Domain {
                context: "BenchmarkCase",
                message: format!("alpha {alpha} must exceed 1"),
            });
        }
        let delta_c_exact = benchmark_delta_c(alpha, &geometry, &materials, &operating)?;
        Ok(BenchmarkCase {
            alpha,
            geometry,
            materials,
            operating,
            delta_c_exact,
        })
    }
}

/// Manufactured fields evaluated on a set of rescaled coordinates.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub fields: FieldSet,
    pub interface: InterfaceValues,
    pub delta_c: f64,
}

fn exact_fields_at_delta(
    alpha: f64,
    geometry: &CathodeGeometry,
    materials: &MaterialSet,
    operating: &OperatingPoint,
    ctx: &KineticsContext,
    delta: f64,
    z: &[f64],
) -> Result<ExactSolution> {
    let interface = interface_values(geometry, materials, operating, delta, ctx.c_o2_bulk)?;
    let j = operating.j_cell;
    let t = operating.temperature;
    let n = z.len();
    let mut fields = FieldSet {
        z: z.to_vec(),
        phi_el: vec![0.0; n],
        phi_ion: vec![0.0; n],
        c_o2: vec![0.0; n],
        eta_act: vec![0.0; n],
        eta_conc: vec![0.0; n],
        i_ct: vec![0.0; n],
        lambda: vec![0.0; n],
    };
    let diffusion = 4.0 * FARADAY * materials.rho_a * materials.d2;
    for i in 0..n {
        let u = 1.0 - z[i];
        let ua = u.powf(alpha);
        fields.lambda[i] = j * (1.0 - ua);
        fields.phi_ion[i] =
            interface.phi_b + delta * j / (materials.sigma_ion * (1.0 + alpha)) * u * ua;
        fields.phi_el[i] =
            interface.v_b + delta * j / materials.sigma_el * (u - u * ua / (1.0 + alpha));
        fields.c_o2[i] =
            interface.c_o2_b - M_O2 * j * delta / diffusion * u * (1.0 - ua / (1.0 + alpha));
        if fields.c_o2[i] <= 0.0 {
            return Err(Error::LimitingCurrent {
                c_o2: fields.c_o2[i],
                location: "benchmark exact fields",
            });
        }
        fields.eta_conc[i] = concentration_overpotential(fields.c_o2[i], ctx.c_o2_bulk, t)?;
        fields.eta_act[i] = activation_overpotential_modified(
            fields.phi_ion[i],
            fields.phi_el[i],
            fields.eta_conc[i],
        );
        let p_o2 =
            partial_pressure_from_mass_fraction(fields.c_o2[i], materials.rho_a, t, M_O2)?;
        let i0 = exchange_current_density(p_o2, t, &materials.exchange_model)?;
        fields.i_ct[i] = charge_transfer_current(
            fields.eta_act[i],
            i0,
            materials.a_dpb,
            t,
            &materials.exchange_model,
            ctx.overflow_cap,
        )?;
    }
    Ok(ExactSolution {
        fields,
        interface,
        delta_c: delta,
    })
}

/// Manufactured fields of a frozen case.
pub fn exact_solution(case: &BenchmarkCase, z: &[f64]) -> Result<ExactSolution> {
    let ctx = KineticsContext::new(case.materials, case.operating)?;
    exact_fields_at_delta(
        case.alpha,
        &case.geometry,
        &case.materials,
        &case.operating,
        &ctx,
        case.delta_c_exact,
        z,
    )
}

/// Finds the thickness at which the manufactured fields satisfy the global
/// charge balance delta * int_0^1 i_ct dz = j_cell, by damped fixed-point
/// iteration on a fine quadrature mesh.
pub fn benchmark_delta_c(
    alpha: f64,
    geometry: &CathodeGeometry,
    materials: &MaterialSet,
    operating: &OperatingPoint,
) -> Result<f64> {
    validate(geometry, materials, operating)?;
    if operating.j_cell <= 0.0 {
        return Err(Error::Domain {
            context: "benchmark_delta_c",
            message: "the benchmark needs a positive cell current".to_string(),
        });
    }
    let ctx = KineticsContext::new(*materials, *operating)?;
    let mesh = Mesh::uniform(801)?;
    let j = operating.j_cell;
    // Seed well below any plausible fixed point: the manufactured
    // overpotentials scale with the trial thickness, so approaching from
    // below keeps the kinetics in range even for stiff parameter sets.
    let mut delta = geometry.thickness() * 1e-3;
    for _ in 0..400 {
        let exact = match exact_fields_at_delta(
            alpha, geometry, materials, operating, &ctx, delta, mesh.z(),
        ) {
            Ok(exact) => exact,
            // An overshoot past the overflow guard is recoverable: pull the
            // trial thickness back and continue.
            Err(Error::KineticsOverflow { .. }) | Err(Error::LimitingCurrent { .. }) => {
                delta *= 0.5;
                continue;
            }
            Err(other) => return Err(other),
        };
        let spline = build_spline(mesh.z(), &exact.fields.i_ct, Default::default())?;
        let total = spline.definite_integral();
        if total <= 0.0 {
            return Err(Error::NoCurrentProduction { value: total });
        }
        let target = j / total;
        if !target.is_finite() || target <= 0.0 {
            return Err(Error::NoCurrentProduction { value: total });
        }
        let rel = (target - delta).abs() / delta;
        if rel < 1e-13 {
            if delta > geometry.thickness() {
                return Err(Error::DeltaExceedsElectrode {
                    delta_c: delta,
                    electrode_thickness: geometry.thickness(),
                });
            }
            return Ok(delta);
        }
        // The field amplitudes grow with the trial thickness, so the map is
        // stiff in log space; a strongly damped geometric update keeps it
        // contractive.
        if delta >= geometry.thickness() && target > geometry.thickness() {
            return Err(Error::DeltaExceedsElectrode {
                delta_c: target,
                electrode_thickness: geometry.thickness(),
            });
        }
        delta *= (target / delta).powf(0.2);
        delta = delta.min(geometry.thickness());
    }
    Err(Error::Domain {
        context: "benchmark_delta_c",
        message: "thickness consistency iteration did not converge".to_string(),
    })
}

/// The nodal source that makes the manufactured fields an exact solution:
/// the charge balance requires the augmented integrand i_ct + g to equal
/// d(Lambda)/dz / delta = j alpha (1-z)^(alpha-1) / delta at the exact
/// fields, so g = j alpha (1-z)^(alpha-1) / delta - i_ct_exact.
pub fn source_term(case: &BenchmarkCase, z: &[f64]) -> Result<Vec<f64>> {
    let exact = exact_solution(case, z)?;
    let j = case.operating.j_cell;
    Ok(z.iter()
        .zip(&exact.fields.i_ct)
        .map(|(zi, i_ct)| {
            j * case.alpha / case.delta_c_exact * (1.0 - zi).powf(case.alpha - 1.0) - i_ct
        })
        .collect())
}

/// Runs the solver on the benchmark problem (with the manufactured source
/// injected) at the given node count.
pub fn solve_benchmark(case: &BenchmarkCase, settings: &SolverSettings) -> Result<CathodeSolution> {
    let mesh = Mesh::uniform(settings.nodes)?;
    let source = source_term(case, mesh.z())?;
    solve_with_source(
        &case.geometry,
        &case.materials,
        &case.operating,
        settings,
        Some(&source),
    )
}

/// Residual of one fixed-point update started from the exact fields: at the
/// exact solution the map should be stationary up to quadrature error.
pub fn exact_fixed_point_residual(
    case: &BenchmarkCase,
    settings: &SolverSettings,
) -> Result<f64> {
    let mesh = Mesh::uniform(settings.nodes)?;
    let exact = exact_solution(case, mesh.z())?;
    let source = source_term(case, mesh.z())?;
    let ctx = KineticsContext::new(case.materials, case.operating)?
        .with_overflow_cap(settings.overflow_cap);
    let state = SolverState {
        delta_c: exact.delta_c,
        phi_el: exact.fields.phi_el.clone(),
        phi_ion: exact.fields.phi_ion.clone(),
        c_o2: exact.fields.c_o2.clone(),
    };
    let out = crate::solver::step(
        &state,
        &mesh,
        &case.geometry,
        &ctx,
        settings,
        Some(&source),
    )?;
    Ok(residual_between(&state, &out.state))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FieldErrors {
    /// max_i |num_i - exact_i| / max_j |exact_j|
    pub max_rel: f64,
    /// mean_i |num_i - exact_i| / max_j |exact_j|
    pub mean_rel: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct AccuracyRow {
    pub nodes: usize,
    pub phi_el: FieldErrors,
    pub phi_ion: FieldErrors,
    pub c_o2: FieldErrors,
    pub j_el: FieldErrors,
    /// |delta_num - delta_exact| / delta_exact
    pub delta_c_rel: f64,
    pub iterations: usize,
}

impl AccuracyRow {
    /// Worst max-relative error across all graded fields and the thickness.
    pub fn worst(&self) -> f64 {
        self.phi_el
            .max_rel
            .max(self.phi_ion.max_rel)
            .max(self.c_o2.max_rel)
            .max(self.j_el.max_rel)
            .max(self.delta_c_rel)
    }
}

#[derive(Debug, Clone)]
pub struct AccuracyStudy {
    pub rows: Vec<AccuracyRow>,
}

fn grade(num: &[f64], exact: &[f64]) -> FieldErrors {
    let scale = exact.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut max_abs = 0.0f64;
    let mut sum_abs = 0.0f64;
    for (a, b) in num.iter().zip(exact) {
        let d = (a - b).abs();
        max_abs = max_abs.max(d);
        sum_abs += d;
    }
    FieldErrors {
        max_rel: max_abs / scale,
        mean_rel: sum_abs / (num.len() as f64 * scale),
    }
}

/// Solves the benchmark at each node count and grades the result against the
/// manufactured fields.
pub fn run_accuracy_study(case: &BenchmarkCase, node_counts: &[usize]) -> Result<AccuracyStudy> {
    let mut rows = Vec::with_capacity(node_counts.len());
    for &nodes in node_counts {
        let settings = SolverSettings {
            nodes,
            ..SolverSettings::default()
        };
        let solution = solve_benchmark(case, &settings)?;
        let exact = exact_solution(case, &solution.fields.z)?;
        rows.push(AccuracyRow {
            nodes,
            phi_el: grade(&solution.fields.phi_el, &exact.fields.phi_el),
            phi_ion: grade(&solution.fields.phi_ion, &exact.fields.phi_ion),
            c_o2: grade(&solution.fields.c_o2, &exact.fields.c_o2),
            j_el: grade(&solution.fields.lambda, &exact.fields.lambda),
            delta_c_rel: (solution.delta_c - case.delta_c_exact).abs() / case.delta_c_exact,
            iterations: solution.iterations,
        });
    }
    Ok(AccuracyStudy { rows })
}

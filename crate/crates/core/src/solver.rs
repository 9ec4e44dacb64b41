//! The cathode solver: analytic backing-zone profiles, integral
//! representations of the catalyst-zone fields, and the fixed-point loop
//! that determines the active layer thickness together with the fields.

use crate::constants::{FARADAY, GAS_CONSTANT, M_O2};
use crate::domain::{validate, CathodeGeometry, MaterialSet, OperatingPoint};
use crate::electrochem::{
    activation_overpotential_modified, charge_transfer_current, concentration_overpotential,
    exchange_current_density, KineticsContext, DEFAULT_OVERFLOW_CAP,
};
use crate::error::{Error, Result};
use crate::gas::partial_pressure_from_mass_fraction;
use crate::mesh::{FieldSet, Mesh};
use crate::quadrature::{build_spline, EndCondition};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Node count of the uniform mesh on [0, 1].
    pub nodes: usize,
    /// Convergence threshold on the max relative change across all fields
    /// and the thickness.
    pub tol: f64,
    /// Iteration cap.
    pub max_iter: usize,
    /// Relaxation factor in (0, 1]. Plain successive substitution at 1.0;
    /// the solver drops to 0.5 on its own after a residual increase.
    pub relaxation: f64,
    /// Cap on the forward Butler-Volmer exponent.
    pub overflow_cap: f64,
    pub end_condition: EndCondition,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            nodes: 100,
            tol: 1e-10,
            max_iter: 2000,
            relaxation: 1.0,
            overflow_cap: DEFAULT_OVERFLOW_CAP,
            end_condition: EndCondition::default(),
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Domain {
                context: "SolverSettings",
                message: format!("tol {} outside (0, 1)", self.tol),
            });
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::Domain {
                context: "SolverSettings",
                message: format!("relaxation {} outside (0, 1]", self.relaxation),
            });
        }
        if self.max_iter == 0 {
            return Err(Error::Domain {
                context: "SolverSettings",
                message: "max_iter must be positive".to_string(),
            });
        }
        Ok(())
    }
}

/// Interface constants at the catalyst/backing boundary h_b = h1 + delta_c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceValues {
    /// Electron potential at h_b, V.
    pub v_b: f64,
    /// Oxygen mass fraction at h_b.
    pub c_o2_b: f64,
    /// Ion potential throughout the backing zone, V.
    pub phi_b: f64,
}

/// Closed-form backing-zone values:
/// V_b  = V2 + (j/sigma_el)(h2 - h_b),
/// C_b  = C_bulk - M_O2 j (h2 - h_b) / (4 F rho_a D2),
/// phi_b = V_b + eta_conc(C_b).
pub fn interface_values(
    geometry: &CathodeGeometry,
    materials: &MaterialSet,
    operating: &OperatingPoint,
    delta_c: f64,
    c_o2_bulk: f64,
) -> Result<InterfaceValues> {
    if !(delta_c > 0.0 && delta_c <= geometry.thickness()) {
        return Err(Error::DeltaExceedsElectrode {
            delta_c,
            electrode_thickness: geometry.thickness(),
        });
    }
    let backing = geometry.thickness() - delta_c;
    let j = operating.j_cell;
    let v_b = operating.v2 + j / materials.sigma_el * backing;
    let c_o2_b = c_o2_bulk - M_O2 * j * backing / (4.0 * FARADAY * materials.rho_a * materials.d2);
    if c_o2_b <= 0.0 {
        return Err(Error::LimitingCurrent {
            c_o2: c_o2_b,
            location: "backing zone (h_b)",
        });
    }
    let phi_b = v_b + concentration_overpotential(c_o2_b, c_o2_bulk, operating.temperature)?;
    Ok(InterfaceValues { v_b, c_o2_b, phi_b })
}

/// Analytic profiles on the backing zone [h_b, h2].
#[derive(Debug, Clone, Copy)]
pub struct BackingProfile {
    pub geometry: CathodeGeometry,
    pub materials: MaterialSet,
    pub j_cell: f64,
    pub v2: f64,
    pub c_o2_bulk: f64,
    pub phi_b: f64,
}

impl BackingProfile {
    pub fn j_el(&self) -> f64 {
        self.j_cell
    }

    pub fn j_ion(&self) -> f64 {
        0.0
    }

    pub fn j_o2_flux(&self) -> f64 {
        -M_O2 * self.j_cell / (4.0 * FARADAY)
    }

    pub fn phi_el(&self, y: f64) -> f64 {
        self.v2 + self.j_cell / self.materials.sigma_el * (self.geometry.h2 - y)
    }

    pub fn phi_ion(&self, _y: f64) -> f64 {
        self.phi_b
    }

    pub fn c_o2(&self, y: f64) -> f64 {
        self.c_o2_bulk
            - M_O2 * self.j_cell * (self.geometry.h2 - y)
                / (4.0 * FARADAY * self.materials.rho_a * self.materials.d2)
    }
}

/// The iterated unknowns of the fixed-point loop.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub delta_c: f64,
    pub phi_el: Vec<f64>,
    pub phi_ion: Vec<f64>,
    pub c_o2: Vec<f64>,
}

/// Converged catalyst-layer solution.
#[derive(Debug, Clone)]
pub struct CathodeSolution {
    pub fields: FieldSet,
    /// Active layer thickness, m. Zero only for the j_cell = 0 equilibrium.
    pub delta_c: f64,
    pub v_b: f64,
    pub phi_b: f64,
    pub c_o2_b: f64,
    pub iterations: usize,
    pub final_residual: f64,
    /// Number of automatic relaxation reductions during the run.
    pub relaxation_fallbacks: usize,
    pub j_cell: f64,
    /// Oxygen mass fraction at h2 used by this solution.
    pub c_o2_bulk: f64,
}

impl CathodeSolution {
    pub fn is_equilibrium(&self) -> bool {
        self.j_cell == 0.0
    }

    /// Electron current at each node, A·m⁻² (identity j_el = Lambda).
    pub fn j_el(&self) -> &[f64] {
        &self.fields.lambda
    }

    /// Ion current at each node, A·m⁻² (identity j_ion = j_cell - Lambda).
    pub fn j_ion(&self) -> Vec<f64> {
        self.fields.lambda.iter().map(|l| self.j_cell - l).collect()
    }

    /// Oxygen mass flux at each node, kg·m⁻²·s⁻¹
    /// (identity J_O2 = -(M_O2 / 4F) Lambda).
    pub fn j_o2_flux(&self) -> Vec<f64> {
        self.fields
            .lambda
            .iter()
            .map(|l| -M_O2 / (4.0 * FARADAY) * l)
            .collect()
    }

    /// Physical coordinate of each node, m.
    pub fn y(&self, geometry: &CathodeGeometry) -> Vec<f64> {
        self.fields
            .z
            .iter()
            .map(|z| geometry.h1 + self.delta_c * z)
            .collect()
    }

    /// Sum of activation and concentration overpotentials at the electrolyte
    /// interface (z = 0), V.
    pub fn total_overpotential(&self) -> f64 {
        self.fields.eta_act[0] + self.fields.eta_conc[0]
    }
}

/// BC-consistent initial guess: delta at half the electrode thickness,
/// all fields linear.
pub fn initialize_fields(
    settings: &SolverSettings,
    geometry: &CathodeGeometry,
    materials: &MaterialSet,
    operating: &OperatingPoint,
    ctx: &KineticsContext,
) -> Result<SolverState> {
    let mesh = Mesh::uniform(settings.nodes)?;
    let delta_c = geometry.thickness() / 2.0;
    let interface = interface_values(geometry, materials, operating, delta_c, ctx.c_o2_bulk)?;
    let j = operating.j_cell;
    let c_slope = M_O2 * j * delta_c / (4.0 * FARADAY * materials.rho_a * materials.d2);
    let phi_el: Vec<f64> = mesh
        .z()
        .iter()
        .map(|z| interface.v_b + j * delta_c / materials.sigma_el * (1.0 - z))
        .collect();
    let phi_ion: Vec<f64> = mesh
        .z()
        .iter()
        .map(|z| interface.phi_b + j * delta_c / materials.sigma_ion * (1.0 - z))
        .collect();
    let c_o2: Vec<f64> = mesh
        .z()
        .iter()
        .map(|z| interface.c_o2_b - c_slope * (1.0 - z))
        .collect();
    if c_o2.iter().any(|c| *c <= 0.0) {
        return Err(Error::LimitingCurrent {
            c_o2: c_o2[0],
            location: "initial guess",
        });
    }
    Ok(SolverState {
        delta_c,
        phi_el,
        phi_ion,
        c_o2,
    })
}

pub(crate) struct StepOutput {
    pub state: SolverState,
    pub eta_act: Vec<f64>,
    pub eta_conc: Vec<f64>,
    pub i_ct: Vec<f64>,
    pub lambda: Vec<f64>,
    pub interface: InterfaceValues,
    /// Thickness from the charge balance before the trust-region safeguard.
    pub delta_raw: f64,
    /// True when the mass-fraction update was floored somewhere.
    pub depleted: bool,
    /// Smallest raw (unfloored) mass fraction of this step.
    pub c_min_raw: f64,
}

/// One pass of stages 3-7: kinetics, thickness update, mass fraction,
/// overpotentials, potentials. `source` is the optional benchmark source
/// added to the charge-transfer integrand at each node.
pub(crate) fn step(
    state: &SolverState,
    mesh: &Mesh,
    geometry: &CathodeGeometry,
    ctx: &KineticsContext,
    settings: &SolverSettings,
    source: Option<&[f64]>,
) -> Result<StepOutput> {
    let z = mesh.z();
    let n = z.len();
    let materials = &ctx.materials;
    let operating = &ctx.operating;
    let t = operating.temperature;
    let j = operating.j_cell;

    // Stage 3: kinetics from the current iterate.
    let mut eta_act = vec![0.0; n];
    let mut i_ct = vec![0.0; n];
    let mut integrand = vec![0.0; n];
    for i in 0..n {
        let eta_conc_i = concentration_overpotential(state.c_o2[i], ctx.c_o2_bulk, t)?;
        eta_act[i] =
            activation_overpotential_modified(state.phi_ion[i], state.phi_el[i], eta_conc_i);
        let p_o2 = partial_pressure_from_mass_fraction(state.c_o2[i], materials.rho_a, t, M_O2)?;
        let i0 = exchange_current_density(p_o2, t, &materials.exchange_model)?;
        i_ct[i] = charge_transfer_current(
            eta_act[i],
            i0,
            materials.a_dpb,
            t,
            &materials.exchange_model,
            settings.overflow_cap,
        )?;
        integrand[i] = i_ct[i] + source.map_or(0.0, |g| g[i]);
    }

    // Stage 4: thickness from the global charge balance, then Lambda.
    let integrand_spline = build_spline(z, &integrand, settings.end_condition)?;
    let total = integrand_spline.definite_integral();
    if total <= 0.0 {
        return Err(Error::NoCurrentProduction { value: total });
    }
    let delta_raw = j / total;
    if !delta_raw.is_finite() || delta_raw <= 0.0 {
        return Err(Error::NoCurrentProduction { value: total });
    }
    // Trust region on the thickness update: early iterates overshoot wildly
    // because the fields have not equilibrated yet. The raw value is kept and
    // checked against the electrode at convergence, so an out-of-range fixed
    // point is still an error, never a silent clamp.
    let delta_c = delta_raw
        .clamp(0.5 * state.delta_c, 2.0 * state.delta_c)
        .min(geometry.thickness());
    // Lambda is always normalized with the raw thickness so that
    // Lambda(1) = j_cell exactly; this keeps every downstream field bounded
    // by physical scales even while the trust region is active.
    let lambda: Vec<f64> = integrand_spline
        .cumulative_integral()
        .into_iter()
        .map(|v| delta_raw * v)
        .collect();

    let interface = interface_values(geometry, materials, operating, delta_c, ctx.c_o2_bulk)?;

    // Stage 5: oxygen mass fraction from the tail integral of Lambda.
    // Transient trial states can drive the raw value negative long before
    // the iteration has settled; those are floored (and flagged) so the loop
    // can recover, and only a converged state at the floor is reported as a
    // limiting current.
    let lambda_spline = build_spline(z, &lambda, settings.end_condition)?;
    let lambda_tail = lambda_spline.tail_integrals();
    let c_factor = M_O2 * delta_c / (4.0 * FARADAY * materials.rho_a * materials.d2);
    let c_floor = 1e-6 * interface.c_o2_b;
    let mut c_min_raw = f64::INFINITY;
    let c_o2: Vec<f64> = lambda_tail
        .iter()
        .map(|q| {
            let raw = interface.c_o2_b - c_factor * q;
            c_min_raw = c_min_raw.min(raw);
            raw.max(c_floor)
        })
        .collect();
    let depleted = c_min_raw < c_floor;

    // Stage 6: concentration overpotential on the updated mass fraction.
    let mut eta_conc = vec![0.0; n];
    for i in 0..n {
        eta_conc[i] = concentration_overpotential(c_o2[i], ctx.c_o2_bulk, t)?;
    }

    // Stage 7: potentials from the integral representations.
    let phi_el: Vec<f64> = lambda_tail
        .iter()
        .map(|q| interface.v_b + delta_c / materials.sigma_el * q)
        .collect();
    let ion_integrand: Vec<f64> = lambda.iter().map(|l| j - l).collect();
    let ion_spline = build_spline(z, &ion_integrand, settings.end_condition)?;
    let ion_tail = ion_spline.tail_integrals();
    let phi_ion: Vec<f64> = ion_tail
        .iter()
        .map(|q| interface.phi_b + delta_c / materials.sigma_ion * q)
        .collect();

    Ok(StepOutput {
        state: SolverState {
            delta_c,
            phi_el,
            phi_ion,
            c_o2,
        },
        eta_act,
        eta_conc,
        i_ct,
        lambda,
        interface,
        delta_raw,
        depleted,
        c_min_raw,
    })
}

fn field_residual(old: &[f64], new: &[f64]) -> f64 {
    let scale = new.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    old.iter()
        .zip(new)
        .fold(0.0f64, |m, (a, b)| m.max((b - a).abs()))
        / scale
}

pub(crate) fn residual_between(old: &SolverState, new: &SolverState) -> f64 {
    let delta_res = (new.delta_c - old.delta_c).abs() / new.delta_c.abs().max(1e-300);
    field_residual(&old.phi_el, &new.phi_el)
        .max(field_residual(&old.phi_ion, &new.phi_ion))
        .max(field_residual(&old.c_o2, &new.c_o2))
        .max(delta_res)
}

fn blend(old: &SolverState, new: &SolverState, omega: f64) -> SolverState {
    let mix = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter()
            .zip(b)
            .map(|(x, y)| (1.0 - omega) * x + omega * y)
            .collect()
    };
    SolverState {
        delta_c: (1.0 - omega) * old.delta_c + omega * new.delta_c,
        phi_el: mix(&old.phi_el, &new.phi_el),
        phi_ion: mix(&old.phi_ion, &new.phi_ion),
        c_o2: mix(&old.c_o2, &new.c_o2),
    }
}

/// One raw update of the fixed-point map (no relaxation applied), together
/// with the residual against the input state.
pub fn iterate_once(
    state: &SolverState,
    mesh: &Mesh,
    geometry: &CathodeGeometry,
    ctx: &KineticsContext,
    settings: &SolverSettings,
) -> Result<(SolverState, f64)> {
    let out = step(state, mesh, geometry, ctx, settings, None)?;
    let residual = residual_between(state, &out.state);
    Ok((out.state, residual))
}

/// Solves the cathode sub-problem with the active layer thickness as part of
/// the solution.
pub fn solve(
    geometry: &CathodeGeometry,
    materials: &MaterialSet,
    operating: &OperatingPoint,
    settings: &SolverSettings,
) -> Result<CathodeSolution> {
    solve_with_source(geometry, materials, operating, settings, None)
}

/// As [`solve`], with an optional nodal source added to the charge-transfer
/// integrand (used by the manufactured benchmark).
pub(crate) fn solve_with_source(
    geometry: &CathodeGeometry,
    materials: &MaterialSet,
    operating: &OperatingPoint,
    settings: &SolverSettings,
    source: Option<&[f64]>,
) -> Result<CathodeSolution> {
    validate(geometry, materials, operating)?;
    settings.validate()?;
    let ctx = KineticsContext::new(*materials, *operating)?.with_overflow_cap(settings.overflow_cap);
    let mesh = Mesh::uniform(settings.nodes)?;
    if let Some(g) = source {
        if g.len() != mesh.len() {
            return Err(Error::Domain {
                context: "solve_with_source",
                message: format!("source length {} != mesh length {}", g.len(), mesh.len()),
            });
        }
    }

    if operating.j_cell == 0.0 {
        return Ok(equilibrium_solution(&mesh, operating, &ctx));
    }

    let mut state = initialize_fields(settings, geometry, materials, operating, &ctx)?;
    let mut omega = settings.relaxation;
    let mut fallbacks = 0usize;
    let mut steady = 0usize;
    let mut history = Vec::with_capacity(settings.max_iter);
    let mut previous_residual = f64::INFINITY;

    for iteration in 1..=settings.max_iter {
        let out = step(&state, &mesh, geometry, &ctx, settings, source)?;
        let residual = residual_between(&state, &out.state);
        history.push(residual);

        if residual <= settings.tol {
            if out.depleted {
                return Err(Error::LimitingCurrent {
                    c_o2: out.c_min_raw,
                    location: "converged catalyst layer",
                });
            }
            // The converged thickness must be in range with the safeguard
            // inactive; otherwise the true fixed point lies outside the
            // electrode.
            let drift = (out.delta_raw - out.state.delta_c).abs() / out.state.delta_c;
            if out.delta_raw > geometry.thickness() || drift > 100.0 * settings.tol {
                return Err(Error::DeltaExceedsElectrode {
                    delta_c: out.delta_raw,
                    electrode_thickness: geometry.thickness(),
                });
            }
            return Ok(assemble(out, &mesh, operating, &ctx, iteration, residual, fallbacks));
        }
        // Progressive fallback: each residual increase halves the relaxation
        // factor, down to a floor that still moves the iterate. Sustained
        // decrease earns the factor back so well-behaved stretches are not
        // stuck at the floor.
        if residual > previous_residual {
            if omega > 1.0 / 64.0 {
                omega *= 0.5;
                fallbacks += 1;
            }
            steady = 0;
        } else {
            steady += 1;
            if steady >= 10 && omega < settings.relaxation {
                omega = (2.0 * omega).min(settings.relaxation);
                steady = 0;
            }
        }
        previous_residual = residual;
        state = blend(&state, &out.state, omega);
    }

    Err(Error::MaxIterations {
        iterations: settings.max_iter,
        residual: *history.last().unwrap(),
        history,
    })
}

fn assemble(
    out: StepOutput,
    mesh: &Mesh,
    operating: &OperatingPoint,
    ctx: &KineticsContext,
    iterations: usize,
    final_residual: f64,
    relaxation_fallbacks: usize,
) -> CathodeSolution {
    CathodeSolution {
        fields: FieldSet {
            z: mesh.z().to_vec(),
            phi_el: out.state.phi_el,
            phi_ion: out.state.phi_ion,
            c_o2: out.state.c_o2,
            eta_act: out.eta_act,
            eta_conc: out.eta_conc,
            i_ct: out.i_ct,
            lambda: out.lambda,
        },
        delta_c: out.state.delta_c,
        v_b: out.interface.v_b,
        phi_b: out.interface.phi_b,
        c_o2_b: out.interface.c_o2_b,
        iterations,
        final_residual,
        relaxation_fallbacks,
        j_cell: operating.j_cell,
        c_o2_bulk: ctx.c_o2_bulk,
    }
}

fn equilibrium_solution(
    mesh: &Mesh,
    operating: &OperatingPoint,
    ctx: &KineticsContext,
) -> CathodeSolution {
    let n = mesh.len();
    CathodeSolution {
        fields: FieldSet {
            z: mesh.z().to_vec(),
            phi_el: vec![operating.v2; n],
            phi_ion: vec![operating.v2; n],
            c_o2: vec![ctx.c_o2_bulk; n],
            eta_act: vec![0.0; n],
            eta_conc: vec![0.0; n],
            i_ct: vec![0.0; n],
            lambda: vec![0.0; n],
        },
        delta_c: 0.0,
        v_b: operating.v2,
        phi_b: operating.v2,
        c_o2_b: ctx.c_o2_bulk,
        iterations: 0,
        final_residual: 0.0,
        relaxation_fallbacks: 0,
        j_cell: 0.0,
        c_o2_bulk: ctx.c_o2_bulk,
    }
}

/// Deviations between the converged integral-representation fields and the
/// algebraically exact closed forms. These measure pure quadrature error.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormReport {
    pub phi_el_max_rel: f64,
    pub phi_ion_max_rel: f64,
}

pub fn closed_form_checks(
    solution: &CathodeSolution,
    geometry: &CathodeGeometry,
    materials: &MaterialSet,
    operating: &OperatingPoint,
) -> ClosedFormReport {
    if solution.is_equilibrium() {
        return ClosedFormReport {
            phi_el_max_rel: 0.0,
            phi_ion_max_rel: 0.0,
        };
    }
    let j = solution.j_cell;
    let t = operating.temperature;
    let c_bulk = solution.c_o2_bulk;
    let diffusion_factor = 4.0 * FARADAY * materials.rho_a * materials.d2 / M_O2;
    let backing = geometry.thickness() - solution.delta_c;

    let mut phi_el_dev = 0.0f64;
    let mut phi_el_scale = 0.0f64;
    let mut phi_ion_dev = 0.0f64;
    let mut phi_ion_scale = 0.0f64;
    for (i, z) in solution.fields.z.iter().enumerate() {
        let c = solution.fields.c_o2[i];
        let phi_el_cf = operating.v2 + diffusion_factor / materials.sigma_el * (c_bulk - c);
        phi_el_dev = phi_el_dev.max((solution.fields.phi_el[i] - phi_el_cf).abs());
        phi_el_scale = phi_el_scale.max(phi_el_cf.abs());

        let phi_ion_cf = operating.v2
            + GAS_CONSTANT * t / (4.0 * FARADAY) * (c_bulk / solution.c_o2_b).ln()
            - diffusion_factor / materials.sigma_ion * (c_bulk - c)
            + j / materials.sigma_ion * solution.delta_c * (1.0 - z)
            + j * backing * (1.0 / materials.sigma_el + 1.0 / materials.sigma_ion);
        phi_ion_dev = phi_ion_dev.max((solution.fields.phi_ion[i] - phi_ion_cf).abs());
        phi_ion_scale = phi_ion_scale.max(phi_ion_cf.abs());
    }
    ClosedFormReport {
        phi_el_max_rel: phi_el_dev / phi_el_scale.max(1e-300),
        phi_ion_max_rel: phi_ion_dev / phi_ion_scale.max(1e-300),
    }
}

/// For each fraction f, the smallest k with Lambda(k) >= f * j_cell, found by
/// bisection on the spline of Lambda, and the corresponding thickness
/// k * delta_c.
pub fn current_fraction_thicknesses(
    solution: &CathodeSolution,
    fractions: &[f64],
) -> Result<Vec<CurrentFraction>> {
    for f in fractions {
        if !(*f > 0.0 && *f < 1.0) {
            return Err(Error::Domain {
                context: "current_fraction_thicknesses",
                message: format!("fraction {f} outside (0, 1)"),
            });
        }
    }
    if solution.is_equilibrium() {
        return Err(Error::Domain {
            context: "current_fraction_thicknesses",
            message: "undefined for the zero-current equilibrium".to_string(),
        });
    }
    let spline = build_spline(
        &solution.fields.z,
        &solution.fields.lambda,
        EndCondition::default(),
    )?;
    let mut out = Vec::with_capacity(fractions.len());
    for &fraction in fractions {
        let target = fraction * solution.j_cell;
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if spline.eval(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let k = 0.5 * (lo + hi);
        out.push(CurrentFraction {
            fraction,
            k,
            thickness: k * solution.delta_c,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentFraction {
    pub fraction: f64,
    /// Fraction of the active layer span.
    pub k: f64,
    /// k * delta_c, m.
    pub thickness: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::kelvin_from_celsius;

    fn reference_setup() -> (CathodeGeometry, MaterialSet, OperatingPoint) {
        (
            CathodeGeometry::from_thickness(5e-5),
            MaterialSet::lscf_like(),
            OperatingPoint {
                temperature: kelvin_from_celsius(800.0),
                j_cell: 2000.0,
                v2: 0.3,
                x_o2_bulk: 0.21,
                p_total: 101_325.0,
            },
        )
    }

    #[test]
    fn interface_values_equilibrium() {
        let (geometry, materials, mut operating) = reference_setup();
        operating.j_cell = 0.0;
        let ctx = KineticsContext::new(materials, operating).unwrap();
        let iv =
            interface_values(&geometry, &materials, &operating, 2e-5, ctx.c_o2_bulk).unwrap();
        assert_eq!(iv.v_b, operating.v2);
        assert_eq!(iv.c_o2_b, ctx.c_o2_bulk);
        assert_eq!(iv.phi_b, operating.v2);
    }

    #[test]
    fn interface_values_zero_backing_zone() {
        let (geometry, materials, operating) = reference_setup();
        let ctx = KineticsContext::new(materials, operating).unwrap();
        let iv = interface_values(
            &geometry,
            &materials,
            &operating,
            geometry.thickness(),
            ctx.c_o2_bulk,
        )
        .unwrap();
        assert_eq!(iv.v_b, operating.v2);
        assert_eq!(iv.c_o2_b, ctx.c_o2_bulk);
    }

    #[test]
    fn interface_values_limiting_current() {
        let (geometry, mut materials, mut operating) = reference_setup();
        materials.d2 = 1e-8;
        operating.j_cell = 5e5;
        let ctx = KineticsContext::new(materials, operating).unwrap();
        let err = interface_values(&geometry, &materials, &operating, 1e-6, ctx.c_o2_bulk)
            .unwrap_err();
        assert_eq!(err.name(), "limiting_current");
    }

    #[test]
    fn initial_guess_honors_boundary_conditions() {
        let (geometry, materials, operating) = reference_setup();
        let settings = SolverSettings::default();
        let ctx = KineticsContext::new(materials, operating).unwrap();
        let state =
            initialize_fields(&settings, &geometry, &materials, &operating, &ctx).unwrap();
        let iv = interface_values(
            &geometry,
            &materials,
            &operating,
            state.delta_c,
            ctx.c_o2_bulk,
        )
        .unwrap();
        let n = state.c_o2.len();
        assert!((state.c_o2[n - 1] - iv.c_o2_b).abs() < 1e-15);
        assert!((state.phi_el[n - 1] - iv.v_b).abs() < 1e-15);
        assert!((state.phi_ion[n - 1] - iv.phi_b).abs() < 1e-15);
    }

    #[test]
    fn solve_reference_case_converges() {
        let (geometry, materials, operating) = reference_setup();
        let settings = SolverSettings::default();
        let solution = solve(&geometry, &materials, &operating, &settings).unwrap();
        assert!(solution.final_residual <= settings.tol);
        assert!(solution.delta_c > 0.0 && solution.delta_c <= geometry.thickness());
        // Global charge balance by construction of the thickness update.
        let n = solution.fields.len();
        assert!(
            (solution.fields.lambda[n - 1] - operating.j_cell).abs()
                <= 1e-10 * operating.j_cell
        );
        assert_eq!(solution.fields.lambda[0], 0.0);
        assert!(solution.fields.eta_act.iter().all(|e| *e >= 0.0));
        assert!(solution.fields.i_ct.iter().all(|i| *i >= 0.0));
    }

    #[test]
    fn fixed_point_is_stationary() {
        let (geometry, materials, operating) = reference_setup();
        let settings = SolverSettings::default();
        let solution = solve(&geometry, &materials, &operating, &settings).unwrap();
        let ctx = KineticsContext::new(materials, operating).unwrap();
        let mesh = Mesh::uniform(settings.nodes).unwrap();
        let state = SolverState {
            delta_c: solution.delta_c,
            phi_el: solution.fields.phi_el.clone(),
            phi_ion: solution.fields.phi_ion.clone(),
            c_o2: solution.fields.c_o2.clone(),
        };
        let (_, residual) = iterate_once(&state, &mesh, &geometry, &ctx, &settings).unwrap();
        assert!(residual <= 100.0 * settings.tol, "residual = {residual}");
    }

    #[test]
    fn zero_current_equilibrium() {
        let (geometry, materials, mut operating) = reference_setup();
        operating.j_cell = 0.0;
        let solution =
            solve(&geometry, &materials, &operating, &SolverSettings::default()).unwrap();
        assert!(solution.is_equilibrium());
        assert!(solution.fields.phi_el.iter().all(|v| *v == operating.v2));
        assert!(solution.fields.eta_act.iter().all(|e| *e == 0.0));
        assert_eq!(solution.total_overpotential(), 0.0);
    }

    #[test]
    fn closed_form_zero_current() {
        let (geometry, materials, mut operating) = reference_setup();
        operating.j_cell = 0.0;
        let solution =
            solve(&geometry, &materials, &operating, &SolverSettings::default()).unwrap();
        let report = closed_form_checks(&solution, &geometry, &materials, &operating);
        assert_eq!(report.phi_el_max_rel, 0.0);
        assert_eq!(report.phi_ion_max_rel, 0.0);
    }

    #[test]
    fn current_fractions_monotone() {
        let (geometry, materials, operating) = reference_setup();
        let solution =
            solve(&geometry, &materials, &operating, &SolverSettings::default()).unwrap();
        let ks = current_fraction_thicknesses(&solution, &[0.9, 0.95, 0.99]).unwrap();
        assert!(ks[0].k < ks[1].k && ks[1].k < ks[2].k);
        assert!(ks[2].k < 1.0);
        let nearly_all = current_fraction_thicknesses(&solution, &[0.999_999]).unwrap();
        assert!(nearly_all[0].k > ks[2].k && nearly_all[0].k <= 1.0);
    }

    #[test]
    fn current_fractions_reject_bad_input() {
        let (geometry, materials, operating) = reference_setup();
        let solution =
            solve(&geometry, &materials, &operating, &SolverSettings::default()).unwrap();
        assert!(current_fraction_thicknesses(&solution, &[1.5]).is_err());
    }
}

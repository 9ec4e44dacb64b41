//! Dual formulation: the active layer thickness is prescribed and the bulk
//! oxygen mass fraction that sustains it becomes the recovered unknown.
//!
//! The charge-transfer current factors as i_ct = C_O2_bulk^beta * psi where
//! psi depends only on the reduced mass fraction C/C_O2_bulk and the
//! overpotential, so the global charge balance
//! j_cell = delta_c * C_O2_bulk^beta * int_0^1 psi dz
//! determines C_O2_bulk. Direct fixed-point iteration on that update is
//! repelling (a lower bulk raises the concentration overpotential, which
//! raises psi and pushes the bulk lower still), so the solver instead
//! converges the field profiles at a frozen bulk value and drives the scalar
//! balance to zero by bracketed bisection.

use crate::constants::{FARADAY, GAS_CONSTANT, M_O2};
use crate::domain::{validate, CathodeGeometry, MaterialSet, OperatingPoint};
use crate::electrochem::{activation_overpotential_modified, psi_profile, KineticsContext};
use crate::error::{Error, Result};
use crate::mesh::{FieldSet, Mesh};
use crate::quadrature::build_spline;
use crate::solver::{CathodeSolution, SolverSettings};

/// Result of the fixed-thickness solve.
#[derive(Debug, Clone)]
pub struct FixedDeltaSolution {
    pub solution: CathodeSolution,
    /// Recovered oxygen mass fraction at h2.
    pub c_o2_bulk: f64,
    /// The same value expressed as a volume (mole) fraction.
    pub x_o2_bulk: f64,
}

/// Field profiles iterated at a frozen bulk value.
#[derive(Debug, Clone)]
struct DualState {
    c_red: Vec<f64>,
    phi_el: Vec<f64>,
    phi_ion: Vec<f64>,
}

struct InnerOutput {
    state: DualState,
    eta_act: Vec<f64>,
    eta_conc: Vec<f64>,
    psi: Vec<f64>,
    psi_total: f64,
    /// Normalized cumulative current, lambda(1) = j_cell.
    lambda: Vec<f64>,
    v_b: f64,
    phi_b: f64,
    c_b: f64,
    depleted: bool,
    c_min_raw: f64,
}

struct Workspace<'a> {
    mesh: &'a Mesh,
    geometry: &'a CathodeGeometry,
    materials: &'a MaterialSet,
    operating: &'a OperatingPoint,
    ctx: &'a KineticsContext,
    settings: &'a SolverSettings,
    delta_c: f64,
    /// Mass-fraction drop across the backing zone; independent of the bulk.
    backing_drop: f64,
    iterations: usize,
    fallbacks: usize,
}

/// Solves the cathode sub-problem with `delta_c` prescribed; the bulk oxygen
/// mass fraction is recovered from the global charge balance. The
/// `operating.x_o2_bulk` field only seeds the search.
pub fn solve_fixed_delta(
    geometry: &CathodeGeometry,
    materials: &MaterialSet,
    operating: &OperatingPoint,
    delta_c: f64,
    settings: &SolverSettings,
) -> Result<FixedDeltaSolution> {
    validate(geometry, materials, operating)?;
    settings.validate()?;
    if !(delta_c > 0.0 && delta_c <= geometry.thickness()) {
        return Err(Error::DeltaExceedsElectrode {
            delta_c,
            electrode_thickness: geometry.thickness(),
        });
    }
    if operating.j_cell == 0.0 {
        return Err(Error::Domain {
            context: "solve_fixed_delta",
            message: "the bulk mass fraction is indeterminate at zero current".to_string(),
        });
    }
    let beta = materials.exchange_model.pressure_exponent;
    if beta <= 0.0 {
        return Err(Error::Domain {
            context: "solve_fixed_delta",
            message: format!("pressure exponent {beta} must be positive for the bulk recovery"),
        });
    }

    let ctx = KineticsContext::new(*materials, *operating)?.with_overflow_cap(settings.overflow_cap);
    let mesh = Mesh::uniform(settings.nodes)?;
    let backing_drop = M_O2 * operating.j_cell * (geometry.thickness() - delta_c)
        / (4.0 * FARADAY * materials.rho_a * materials.d2);
    let mut ws = Workspace {
        mesh: &mesh,
        geometry,
        materials,
        operating,
        ctx: &ctx,
        settings,
        delta_c,
        backing_drop,
        iterations: 0,
        fallbacks: 0,
    };

    // The balance function f(c) = ln(raw(c) / c), where raw is the bulk value
    // the charge balance implies for field profiles converged at frozen c.
    // f is negative below the root and positive above it.
    let c_min = (1.01 * backing_drop).max(1e-12);
    let c_max = 0.999_999;
    if c_min >= c_max {
        return Err(Error::LimitingCurrent {
            c_o2: c_max - backing_drop,
            location: "backing zone (dual recovery)",
        });
    }
    let seed = ctx.c_o2_bulk.clamp(c_min, c_max);
    let mut state = initialize(&ws, seed)?;

    // The absolute value in the activation overpotential creates a spurious
    // upward crossing of the balance below the physical solution; the
    // physical root is the downward (rightmost) one. Scan a log grid for the
    // rightmost + -> - sign change, then bisect.
    const GRID: usize = 48;
    let ratio = (c_max / c_min).powf(1.0 / (GRID - 1) as f64);
    let mut grid = Vec::with_capacity(GRID);
    let mut c = c_min;
    for k in 0..GRID {
        grid.push(if k + 1 == GRID { c_max } else { c });
        c *= ratio;
    }
    let f_grid: Vec<Option<f64>> = grid
        .iter()
        .map(|&c| {
            // A fresh linear profile keeps the warm start from dragging a
            // stale branch across the scan.
            initialize(&ws, c)
                .and_then(|mut s| balance(&mut ws, c, &mut s))
                .ok()
        })
        .collect();
    let mut bracket = None;
    for i in (0..GRID - 1).rev() {
        if let (Some(fl), Some(fr)) = (f_grid[i], f_grid[i + 1]) {
            if fl >= 0.0 && fr < 0.0 {
                bracket = Some((grid[i], grid[i + 1]));
                break;
            }
        }
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| Error::Domain {
        context: "solve_fixed_delta",
        message: format!(
            "no bulk mass fraction in ({c_min:.3e}, {c_max:.3e}) balances the prescribed thickness"
        ),
    })?;

    // Bisection in log space; lo carries f >= 0, hi carries f < 0.
    for _ in 0..200 {
        if (hi - lo) / hi < 1e-13 {
            break;
        }
        let mid = (lo * hi).sqrt();
        let f = balance(&mut ws, mid, &mut state)?;
        if f >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c_root = (lo * hi).sqrt();

    // Final converged profiles at the recovered bulk.
    let out = inner_solve(&mut ws, c_root, &mut state)?;
    if out.depleted {
        return Err(Error::LimitingCurrent {
            c_o2: out.c_min_raw,
            location: "converged catalyst layer (dual)",
        });
    }
    Ok(assemble(out, &ws, c_root))
}

/// Evaluates the balance function at one bulk value (diagnostic helper).
#[doc(hidden)]
pub fn probe_balance(
    geometry: &CathodeGeometry,
    materials: &MaterialSet,
    operating: &OperatingPoint,
    delta_c: f64,
    settings: &SolverSettings,
    c_bulk: f64,
) -> Result<f64> {
    let ctx = KineticsContext::new(*materials, *operating)?.with_overflow_cap(settings.overflow_cap);
    let mesh = Mesh::uniform(settings.nodes)?;
    let backing_drop = M_O2 * operating.j_cell * (geometry.thickness() - delta_c)
        / (4.0 * FARADAY * materials.rho_a * materials.d2);
    let mut ws = Workspace {
        mesh: &mesh,
        geometry,
        materials,
        operating,
        ctx: &ctx,
        settings,
        delta_c,
        backing_drop,
        iterations: 0,
        fallbacks: 0,
    };
    let mut state = initialize(&ws, c_bulk)?;
    balance(&mut ws, c_bulk, &mut state)
}

/// Converges the fields at frozen bulk and returns ln(raw / c_bulk).
fn balance(ws: &mut Workspace, c_bulk: f64, state: &mut DualState) -> Result<f64> {
    let out = inner_solve(ws, c_bulk, state)?;
    let beta = ws.materials.exchange_model.pressure_exponent;
    let raw =
        (ws.operating.j_cell / (ws.delta_c * out.psi_total)).powf(1.0 / beta);
    Ok((raw / c_bulk).ln())
}

fn initialize(ws: &Workspace, c_bulk: f64) -> Result<DualState> {
    let j = ws.operating.j_cell;
    let materials = ws.materials;
    let delta_c = ws.delta_c;
    let backing = ws.geometry.thickness() - delta_c;
    let v_b = ws.operating.v2 + j / materials.sigma_el * backing;
    let c_b = c_bulk - ws.backing_drop;
    if c_b <= 0.0 {
        return Err(Error::LimitingCurrent {
            c_o2: c_b,
            location: "dual initial guess (h_b)",
        });
    }
    let rt_4f = GAS_CONSTANT * ws.operating.temperature / (4.0 * FARADAY);
    let phi_b = v_b + rt_4f * (c_bulk / c_b).ln();
    let slope = M_O2 * j * delta_c / (4.0 * FARADAY * materials.rho_a * materials.d2);
    let c_red: Vec<f64> = ws
        .mesh
        .z()
        .iter()
        .map(|z| ((c_b - slope * (1.0 - z)) / c_bulk).max(1e-6 * c_b / c_bulk))
        .collect();
    let phi_el: Vec<f64> = ws
        .mesh
        .z()
        .iter()
        .map(|z| v_b + j * delta_c / materials.sigma_el * (1.0 - z))
        .collect();
    let phi_ion: Vec<f64> = ws
        .mesh
        .z()
        .iter()
        .map(|z| phi_b + j * delta_c / materials.sigma_ion * (1.0 - z))
        .collect();
    Ok(DualState {
        c_red,
        phi_el,
        phi_ion,
    })
}

/// Converges the field profiles at frozen bulk, warm-starting from `state`.
fn inner_solve(ws: &mut Workspace, c_bulk: f64, state: &mut DualState) -> Result<InnerOutput> {
    let mut omega = ws.settings.relaxation;
    let mut steady = 0usize;
    let mut previous_residual = f64::INFINITY;
    let mut history = Vec::new();
    for _ in 0..ws.settings.max_iter {
        let out = inner_step(ws, c_bulk, state)?;
        ws.iterations += 1;
        let residual = residual_between(state, &out.state);
        history.push(residual);
        if residual <= ws.settings.tol {
            *state = out.state.clone();
            return Ok(out);
        }
        if residual > previous_residual {
            if omega > 1.0 / 64.0 {
                omega *= 0.5;
                ws.fallbacks += 1;
            }
            steady = 0;
        } else {
            steady += 1;
            if steady >= 10 && omega < ws.settings.relaxation {
                omega = (2.0 * omega).min(ws.settings.relaxation);
                steady = 0;
            }
        }
        previous_residual = residual;
        *state = blend(state, &out.state, omega);
    }
    Err(Error::MaxIterations {
        iterations: ws.settings.max_iter,
        residual: *history.last().unwrap(),
        history,
    })
}

/// One pass of the field update at frozen bulk. Lambda is normalized so that
/// Lambda(1) = j_cell exactly, which keeps every field bounded by physical
/// scales regardless of the trial state.
fn inner_step(ws: &Workspace, c_bulk: f64, state: &DualState) -> Result<InnerOutput> {
    let z = ws.mesh.z();
    let n = z.len();
    let materials = ws.materials;
    let t = ws.operating.temperature;
    let j = ws.operating.j_cell;
    let rt_4f = GAS_CONSTANT * t / (4.0 * FARADAY);

    let mut eta_act = vec![0.0; n];
    let mut psi = vec![0.0; n];
    for i in 0..n {
        let eta_conc_i = -rt_4f * state.c_red[i].ln();
        eta_act[i] =
            activation_overpotential_modified(state.phi_ion[i], state.phi_el[i], eta_conc_i);
        psi[i] = psi_profile(state.c_red[i], eta_act[i], ws.ctx)?;
    }

    let psi_spline = build_spline(z, &psi, ws.settings.end_condition)?;
    let psi_total = psi_spline.definite_integral();
    if psi_total <= 0.0 {
        return Err(Error::NoCurrentProduction { value: psi_total });
    }
    let lambda: Vec<f64> = psi_spline
        .cumulative_integral()
        .into_iter()
        .map(|v| j * v / psi_total)
        .collect();

    let backing = ws.geometry.thickness() - ws.delta_c;
    let v_b = ws.operating.v2 + j / materials.sigma_el * backing;
    let c_b_raw = c_bulk - ws.backing_drop;
    let c_b = c_b_raw.max(1e-6 * c_bulk);
    let mut depleted = c_b_raw < c_b;
    let mut c_min_raw = c_b_raw;
    let c_red_b = c_b / c_bulk;
    let phi_b = v_b - rt_4f * c_red_b.ln();

    let lambda_spline = build_spline(z, &lambda, ws.settings.end_condition)?;
    let lambda_tail = lambda_spline.tail_integrals();
    let c_factor =
        M_O2 * ws.delta_c / (4.0 * FARADAY * materials.rho_a * materials.d2 * c_bulk);
    let c_floor = 1e-6 * c_red_b;
    let c_red: Vec<f64> = lambda_tail
        .iter()
        .map(|q| {
            let raw = c_red_b - c_factor * q;
            c_min_raw = c_min_raw.min(raw * c_bulk);
            raw.max(c_floor)
        })
        .collect();
    depleted = depleted || c_red.iter().any(|c| *c <= c_floor);
    let mut eta_conc = vec![0.0; n];
    for i in 0..n {
        eta_conc[i] = -rt_4f * c_red[i].ln();
    }
    let phi_el: Vec<f64> = lambda_tail
        .iter()
        .map(|q| v_b + ws.delta_c / materials.sigma_el * q)
        .collect();
    let ion_integrand: Vec<f64> = lambda.iter().map(|l| j - l).collect();
    let ion_spline = build_spline(z, &ion_integrand, ws.settings.end_condition)?;
    let phi_ion: Vec<f64> = ion_spline
        .tail_integrals()
        .iter()
        .map(|q| phi_b + ws.delta_c / materials.sigma_ion * q)
        .collect();

    Ok(InnerOutput {
        state: DualState {
            c_red,
            phi_el,
            phi_ion,
        },
        eta_act,
        eta_conc,
        psi,
        psi_total,
        lambda,
        v_b,
        phi_b,
        c_b,
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

fn residual_between(old: &DualState, new: &DualState) -> f64 {
    field_residual(&old.phi_el, &new.phi_el)
        .max(field_residual(&old.phi_ion, &new.phi_ion))
        .max(field_residual(&old.c_red, &new.c_red))
}

fn blend(old: &DualState, new: &DualState, omega: f64) -> DualState {
    let mix = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter()
            .zip(b)
            .map(|(x, y)| (1.0 - omega) * x + omega * y)
            .collect()
    };
    DualState {
        c_red: mix(&old.c_red, &new.c_red),
        phi_el: mix(&old.phi_el, &new.phi_el),
        phi_ion: mix(&old.phi_ion, &new.phi_ion),
    }
}

fn assemble(out: InnerOutput, ws: &Workspace, c_bulk: f64) -> FixedDeltaSolution {
    let beta = ws.materials.exchange_model.pressure_exponent;
    let scale = c_bulk.powf(beta);
    let c_o2: Vec<f64> = out.state.c_red.iter().map(|c| c * c_bulk).collect();
    let i_ct: Vec<f64> = out.psi.iter().map(|p| scale * p).collect();
    let x_o2_bulk = crate::gas::volume_fraction_from_mass_fraction(c_bulk).unwrap_or(f64::NAN);
    FixedDeltaSolution {
        solution: CathodeSolution {
            fields: FieldSet {
                z: ws.mesh.z().to_vec(),
                phi_el: out.state.phi_el,
                phi_ion: out.state.phi_ion,
                c_o2,
                eta_act: out.eta_act,
                eta_conc: out.eta_conc,
                i_ct,
                lambda: out.lambda,
            },
            delta_c: ws.delta_c,
            v_b: out.v_b,
            phi_b: out.phi_b,
            c_o2_b: out.c_b,
            iterations: ws.iterations,
            final_residual: 0.0,
            relaxation_fallbacks: ws.fallbacks,
            j_cell: ws.operating.j_cell,
            c_o2_bulk: c_bulk,
        },
        c_o2_bulk: c_bulk,
        x_o2_bulk,
    }
}

//! Parameter sweeps over (temperature, current density) grids. Points are
//! independent, so the map is data-parallel; with the `parallel` feature the
//! default path fans out over rayon, and a sequential path is always
//! available for comparison and for builds without the feature.

use crate::domain::{CathodeGeometry, MaterialModel, MaterialSet, OperatingPoint};
use crate::error::Result;
use crate::solver::{
    current_fraction_thicknesses, solve, CathodeSolution, CurrentFraction, SolverSettings,
};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every item, preserving order. Parallel when the `parallel`
/// feature is enabled.
pub fn map_points<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sequential variant of [`map_points`], available in every build.
pub fn map_points_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// Temperature, K.
    pub temperature: f64,
    /// Cell current density, A·m⁻².
    pub j_cell: f64,
}

/// Summary of a converged point.
#[derive(Debug, Clone)]
pub struct PointSummary {
    pub delta_c: f64,
    /// Total overpotential eta_act + eta_conc at z = 0, V.
    pub total_overpotential: f64,
    pub c_o2_min: f64,
    pub iterations: usize,
    pub final_residual: f64,
    /// Fractions of the active layer carrying the requested shares of the
    /// cell current.
    pub current_fractions: Vec<CurrentFraction>,
}

/// A sweep point failure, reduced to the stable error name plus the display
/// message so rows stay serializable.
#[derive(Debug, Clone)]
pub struct PointFailure {
    pub error: &'static str,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub outcome: std::result::Result<PointSummary, PointFailure>,
}

#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub geometry: CathodeGeometry,
    pub materials: MaterialModel,
    /// Template operating point; temperature and j_cell are overridden per
    /// grid point.
    pub operating: OperatingPoint,
    pub settings: SolverSettings,
    pub temperatures: Vec<f64>,
    pub current_densities: Vec<f64>,
    /// Current shares for the penetration-depth summary, each in (0, 1).
    pub fractions: Vec<f64>,
}

impl SweepRequest {
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut points = Vec::with_capacity(self.temperatures.len() * self.current_densities.len());
        for &temperature in &self.temperatures {
            for &j_cell in &self.current_densities {
                points.push(SweepPoint {
                    temperature,
                    j_cell,
                });
            }
        }
        points
    }

    fn solve_point(&self, point: &SweepPoint) -> std::result::Result<PointSummary, PointFailure> {
        let operating = OperatingPoint {
            temperature: point.temperature,
            j_cell: point.j_cell,
            ..self.operating
        };
        let materials = self.materials.resolve(point.temperature);
        summarize_point(&self.geometry, &materials, &operating, &self.settings, &self.fractions)
            .map_err(|e| PointFailure {
                error: e.name(),
                message: e.to_string(),
            })
    }
}

fn summarize_point(
    geometry: &CathodeGeometry,
    materials: &MaterialSet,
    operating: &OperatingPoint,
    settings: &SolverSettings,
    fractions: &[f64],
) -> Result<PointSummary> {
    let solution = solve(geometry, materials, operating, settings)?;
    Ok(summarize(&solution, fractions)?)
}

fn summarize(solution: &CathodeSolution, fractions: &[f64]) -> Result<PointSummary> {
    let current_fractions = if fractions.is_empty() || solution.is_equilibrium() {
        Vec::new()
    } else {
        current_fraction_thicknesses(solution, fractions)?
    };
    let c_o2_min = solution
        .fields
        .c_o2
        .iter()
        .fold(f64::INFINITY, |m, v| m.min(*v));
    Ok(PointSummary {
        delta_c: solution.delta_c,
        total_overpotential: solution.total_overpotential(),
        c_o2_min,
        iterations: solution.iterations,
        final_residual: solution.final_residual,
        current_fractions,
    })
}

/// Runs the sweep with the default (possibly parallel) map. Point failures
/// become failed rows, not a failed sweep.
pub fn run_sweep(request: &SweepRequest) -> Vec<SweepRow> {
    let points = request.points();
    map_points(&points, |point| SweepRow {
        point: *point,
        outcome: request.solve_point(point),
    })
}

/// Runs the sweep strictly sequentially.
pub fn run_sweep_sequential(request: &SweepRequest) -> Vec<SweepRow> {
    let points = request.points();
    map_points_sequential(&points, |point| SweepRow {
        point: *point,
        outcome: request.solve_point(point),
    })
}

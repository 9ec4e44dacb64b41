//! Isothermal one-dimensional model of an SOFC cathode with coupled charge
//! transport and oxygen diffusion, Butler-Volmer kinetics with a
//! non-negative activation overpotential, and an active layer thickness that
//! is part of the solution rather than an input.
//!
//! Units are SI throughout: m, K, Pa, V, A·m⁻² (area currents), A·m⁻³
//! (volumetric currents), kg·m⁻³, m²·s⁻¹; gas composition as mass or volume
//! fractions (dimensionless).

pub mod benchmark;
pub mod constants;
pub mod domain;
pub mod dual;
pub mod electrochem;
pub mod error;
pub mod gas;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod sweep;

pub use domain::{CathodeGeometry, ExchangeCurrentModel, MaterialModel, MaterialSet, OperatingPoint};
pub use error::{Error, Result};
pub use mesh::{FieldSet, Mesh};
pub use solver::{solve, CathodeSolution, SolverSettings};

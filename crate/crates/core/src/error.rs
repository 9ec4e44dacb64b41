//! Error types shared across the crate.

use std::fmt;

/// A single configuration violation: which field and which constraint failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub constraint: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.constraint)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("domain error in {context}: {message}")]
    Domain {
        context: &'static str,
        message: String,
    },

    /// Oxygen is fully depleted before the catalyst layer is reached.
    #[error(
        "limiting current exceeded: oxygen mass fraction {c_o2} is not positive at {location}"
    )]
    LimitingCurrent { c_o2: f64, location: &'static str },

    /// The thickness update left the admissible interval (0, h2 - h1].
    #[error(
        "active layer thickness {delta_c:e} m outside (0, {electrode_thickness:e}] m; \
         the operating point is infeasible for this electrode"
    )]
    DeltaExceedsElectrode {
        delta_c: f64,
        electrode_thickness: f64,
    },

    #[error("fixed-point iteration did not converge after {iterations} iterations \
             (last residual {residual:e})")]
    MaxIterations {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    /// Forward Butler-Volmer exponent exceeded the configured cap; the outer
    /// iteration is diverging.
    #[error("Butler-Volmer exponent {exponent} exceeds cap {cap}; iteration diverged")]
    KineticsOverflow { exponent: f64, cap: f64 },

    /// The charge-transfer integral is not positive, so no thickness produces
    /// the requested current.
    #[error("charge transfer integral {value:e} is not positive")]
    NoCurrentProduction { value: f64 },

    #[error("spline construction failed: {0}")]
    Spline(String),
}

impl Error {
    /// Stable machine-readable name, used in sweep tables and CLI exit paths.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Validation(_) => "validation",
            Error::Domain { .. } => "domain",
            Error::LimitingCurrent { .. } => "limiting_current",
            Error::DeltaExceedsElectrode { .. } => "delta_exceeds_electrode",
            Error::MaxIterations { .. } => "max_iterations",
            Error::KineticsOverflow { .. } => "kinetics_overflow",
            Error::NoCurrentProduction { .. } => "no_current",
            Error::Spline(_) => "spline",
        }
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;

//! Computational mesh on the rescaled catalyst-layer coordinate z in [0, 1]
//! and the per-node field container.

use crate::error::{Error, Result};

/// Minimum node count: cubic-spline quadrature needs enough knots.
pub const MIN_NODES: usize = 8;

/// Uniform mesh on [0, 1]. z = 0 is the electrolyte side of the catalyst
/// layer, z = 1 the catalyst/backing interface.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    z: Vec<f64>,
}

impl Mesh {
    pub fn uniform(n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::Domain {
                context: "Mesh::uniform",
                message: format!("node count {n} below minimum {MIN_NODES}"),
            });
        }
        let h = 1.0 / (n - 1) as f64;
        let mut z: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        z[n - 1] = 1.0;
        Ok(Mesh { z })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }
}

/// Converged nodal profiles over the catalyst layer.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSet {
    /// Rescaled coordinates, shared by all profiles.
    pub z: Vec<f64>,
    /// Electron potential, V.
    pub phi_el: Vec<f64>,
    /// Ion potential, V.
    pub phi_ion: Vec<f64>,
    /// Oxygen mass fraction.
    pub c_o2: Vec<f64>,
    /// Activation overpotential, V (non-negative by the modified definition).
    pub eta_act: Vec<f64>,
    /// Concentration overpotential, V.
    pub eta_conc: Vec<f64>,
    /// Charge-transfer current, A·m⁻³.
    pub i_ct: Vec<f64>,
    /// Cumulative current from the electrolyte interface, A·m⁻²;
    /// lambda[0] = 0 always.
    pub lambda: Vec<f64>,
}

impl FieldSet {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

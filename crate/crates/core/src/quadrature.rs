//! Cubic-spline interpolation of nodal integrands with exact analytical
//! integration of the spline pieces.

use crate::error::{Error, Result};

/// Spline end conditions. Not-a-knot is the default: natural end conditions
/// cap the global integration order at O(h^3) for integrands with nonzero
/// end curvature, while not-a-knot retains O(h^4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EndCondition {
    /// Zero second derivative at both ends.
    Natural,
    /// Third-derivative continuity at the second and second-to-last knots.
    #[default]
    NotAKnot,
}

/// A C2 piecewise cubic through the data. On interval i the curve is
/// a + b t + c t^2 + d t^3 with t = x - knots[i].
#[derive(Debug, Clone)]
pub struct SplineCurve {
    knots: Vec<f64>,
    coeffs: Vec<[f64; 4]>,
}

/// Builds a cubic spline through (knots, values). Knots must be strictly
/// increasing with at least 4 entries.
pub fn build_spline(knots: &[f64], values: &[f64], end: EndCondition) -> Result<SplineCurve> {
    let n = knots.len();
    if n < 4 {
        return Err(Error::Spline(format!("need at least 4 knots, got {n}")));
    }
    if values.len() != n {
        return Err(Error::Spline(format!(
            "knots ({n}) and values ({}) length mismatch",
            values.len()
        )));
    }
    if knots.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Spline(
            "knots must be strictly increasing".to_string(),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Spline("non-finite value in input".to_string()));
    }

    let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
    let m = second_derivatives(knots, values, &h, end);

    let mut coeffs = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let a = values[i];
        let b = (values[i + 1] - values[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
        let c = m[i] / 2.0;
        let d = (m[i + 1] - m[i]) / (6.0 * h[i]);
        coeffs.push([a, b, c, d]);
    }
    Ok(SplineCurve {
        knots: knots.to_vec(),
        coeffs,
    })
}

/// Solves the tridiagonal system for the nodal second derivatives.
fn second_derivatives(knots: &[f64], values: &[f64], h: &[f64], end: EndCondition) -> Vec<f64> {
    let n = knots.len();
    // Interior unknowns m[1..n-1]; the end values are recovered afterwards.
    let k = n - 2;
    let mut sub = vec![0.0; k];
    let mut diag = vec![0.0; k];
    let mut sup = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for i in 1..n - 1 {
        let j = i - 1;
        sub[j] = h[i - 1];
        diag[j] = 2.0 * (h[i - 1] + h[i]);
        sup[j] = h[i];
        rhs[j] = 6.0
            * ((values[i + 1] - values[i]) / h[i] - (values[i] - values[i - 1]) / h[i - 1]);
    }

    match end {
        EndCondition::Natural => {
            // m[0] = m[n-1] = 0; the interior system is unchanged.
        }
        EndCondition::NotAKnot => {
            // m0 expressed through m1, m2 via d0 = d1, and symmetrically at
            // the far end; fold into the first/last interior rows.
            // m0 = ((h0 + h1) m1 - h0 m2) / h1
            diag[0] += sub[0] * (h[0] + h[1]) / h[1];
            sup[0] -= sub[0] * h[0] / h[1];
            sub[0] = 0.0;
            let last = k - 1;
            let hn2 = h[n - 2];
            let hn3 = h[n - 3];
            // m[n-1] = ((hn2 + hn3) m[n-2] - hn2 m[n-3]) / hn3
            diag[last] += sup[last] * (hn2 + hn3) / hn3;
            sub[last] -= sup[last] * hn2 / hn3;
            sup[last] = 0.0;
        }
    }

    // Thomas algorithm.
    let mut c_star = vec![0.0; k];
    let mut d_star = vec![0.0; k];
    c_star[0] = sup[0] / diag[0];
    d_star[0] = rhs[0] / diag[0];
    for j in 1..k {
        let denom = diag[j] - sub[j] * c_star[j - 1];
        c_star[j] = sup[j] / denom;
        d_star[j] = (rhs[j] - sub[j] * d_star[j - 1]) / denom;
    }
    let mut interior = vec![0.0; k];
    interior[k - 1] = d_star[k - 1];
    for j in (0..k - 1).rev() {
        interior[j] = d_star[j] - c_star[j] * interior[j + 1];
    }

    let mut m = vec![0.0; n];
    m[1..n - 1].copy_from_slice(&interior);
    if end == EndCondition::NotAKnot {
        m[0] = ((h[0] + h[1]) * m[1] - h[0] * m[2]) / h[1];
        m[n - 1] = ((h[n - 2] + h[n - 3]) * m[n - 2] - h[n - 2] * m[n - 3]) / h[n - 3];
    }
    m
}

impl SplineCurve {
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Evaluates the spline at x (clamped extrapolation of the end pieces).
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.interval_of(x);
        let t = x - self.knots[i];
        let [a, b, c, d] = self.coeffs[i];
        a + t * (b + t * (c + t * d))
    }

    fn interval_of(&self, x: f64) -> usize {
        let n = self.knots.len();
        match self.knots[..n - 1].partition_point(|&k| k <= x) {
            0 => 0,
            i => i - 1,
        }
    }

    /// Closed-form integral of piece i over its full width.
    fn piece_integral(&self, i: usize) -> f64 {
        let h = self.knots[i + 1] - self.knots[i];
        let [a, b, c, d] = self.coeffs[i];
        h * (a + h * (b / 2.0 + h * (c / 3.0 + h * d / 4.0)))
    }

    /// I[i] = integral of the spline from knots[0] to knots[i]; I[0] = 0.
    pub fn cumulative_integral(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.knots.len());
        let mut acc = 0.0;
        out.push(0.0);
        for i in 0..self.coeffs.len() {
            acc += self.piece_integral(i);
            out.push(acc);
        }
        out
    }

    /// Q[i] = integral of the spline from knots[i] to the last knot;
    /// Q[last] = 0.
    pub fn tail_integrals(&self) -> Vec<f64> {
        let cumulative = self.cumulative_integral();
        let total = cumulative[cumulative.len() - 1];
        cumulative.into_iter().map(|v| total - v).collect()
    }

    /// Integral of the spline over the whole knot span.
    pub fn definite_integral(&self) -> f64 {
        (0..self.coeffs.len()).map(|i| self.piece_integral(i)).sum()
    }
}

//! External potentials V(q) for the Hamiltonian H = p^2/2 + V(q).

use crate::error::PropagateError;
use crate::grid::PhaseGrid;

/// Symbolic potential with an analytic derivative where one exists.
/// Tabulated potentials must supply both V and V' sampled on the q axis;
/// the derivative is never obtained by differencing the values.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Free,
    /// V = omega^2 q^2 / 2.
    Harmonic { omega: f64 },
    /// V = a q^2 / 2 + b q^4 / 4 with b > 0.
    Quartic { a: f64, b: f64 },
    /// V and V' sampled on the q axis of the grid in use.
    Tabulated { values: Vec<f64>, derivative: Vec<f64> },
}

impl Potential {
    pub fn harmonic(omega: f64) -> Self {
        Potential::Harmonic { omega }
    }

    pub fn quartic(a: f64, b: f64) -> Self {
        Potential::Quartic { a, b }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, Potential::Tabulated { .. })
    }

    /// V(q) for analytic kinds. Valid for any real q, also outside the grid.
    pub fn value(&self, q: f64) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Harmonic { omega } => 0.5 * omega * omega * q * q,
            Potential::Quartic { a, b } => 0.5 * a * q * q + 0.25 * b * q.powi(4),
            Potential::Tabulated { .. } => f64::NAN,
        }
    }

    /// V'(q) for analytic kinds.
    pub fn derivative(&self, q: f64) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Harmonic { omega } => omega * omega * q,
            Potential::Quartic { a, b } => a * q + b * q.powi(3),
            Potential::Tabulated { .. } => f64::NAN,
        }
    }

    /// V sampled on the grid's q axis.
    pub fn values_on(&self, grid: &PhaseGrid) -> Result<Vec<f64>, PropagateError> {
        let out = match self {
            Potential::Tabulated { values, .. } => {
                if values.len() != grid.n_q() {
                    return Err(PropagateError::TabulatedLength {
                        expected: grid.n_q(),
                        found: values.len(),
                    });
                }
                values.clone()
            }
            _ => (0..grid.n_q()).map(|j| self.value(grid.q_at(j))).collect(),
        };
        if let Some(&bad) = out.iter().find(|v| !v.is_finite()) {
            return Err(PropagateError::NonFinitePotential(bad));
        }
        Ok(out)
    }

    /// V' sampled on the grid's q axis.
    pub fn derivatives_on(&self, grid: &PhaseGrid) -> Result<Vec<f64>, PropagateError> {
        let out = match self {
            Potential::Tabulated { derivative, .. } => {
                if derivative.len() != grid.n_q() {
                    return Err(PropagateError::TabulatedLength {
                        expected: grid.n_q(),
                        found: derivative.len(),
                    });
                }
                derivative.clone()
            }
            _ => (0..grid.n_q())
                .map(|j| self.derivative(grid.q_at(j)))
                .collect(),
        };
        if let Some(&bad) = out.iter().find(|v| !v.is_finite()) {
            return Err(PropagateError::NonFinitePotential(bad));
        }
        Ok(out)
    }
}

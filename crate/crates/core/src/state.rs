//! Complex amplitude fields over a [`PhaseGrid`], tagged with their active
//! representation, plus the Hilbert-space inner product and expectation
//! values against the phase-space density |amp|^2.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::StateError;
use crate::grid::{PhaseGrid, Representation};

/// Relative slack allowed on norm^2 before [`expectation`] refuses a state.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// A phase-space wave function: a complex field over the grid, with axis 0
/// the q-like coordinate of the active representation and axis 1 the p-like
/// coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct KvnState {
    grid: PhaseGrid,
    rep: Representation,
    amp: Array2<Complex64>,
}

impl KvnState {
    pub fn new(
        grid: PhaseGrid,
        rep: Representation,
        amp: Array2<Complex64>,
    ) -> Result<Self, StateError> {
        if amp.dim() != grid.shape() {
            return Err(StateError::ShapeMismatch {
                expected: grid.shape(),
                found: amp.dim(),
            });
        }
        let s = KvnState { grid, rep, amp };
        s.check_finite()?;
        Ok(s)
    }

    /// Build a state in QP from a closure over the (q, p) coordinates.
    pub fn from_fn<F>(grid: PhaseGrid, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64,
    {
        let amp = Array2::from_shape_fn(grid.shape(), |(j, m)| f(grid.q_at(j), grid.p_at(m)));
        KvnState {
            grid,
            rep: Representation::QP,
            amp,
        }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn rep(&self) -> Representation {
        self.rep
    }

    pub fn amp(&self) -> &Array2<Complex64> {
        &self.amp
    }

    pub fn amp_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.amp
    }

    pub fn into_amp(self) -> Array2<Complex64> {
        self.amp
    }

    /// Same field reinterpreted under a new tag. Internal: callers go
    /// through the unitary transforms in [`crate::transform`].
    pub(crate) fn with_rep(self, rep: Representation) -> Self {
        KvnState { rep, ..self }
    }

    pub fn check_finite(&self) -> Result<(), StateError> {
        if self.amp.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(StateError::NonFinite)
        }
    }

    /// Cell weight of the active representation.
    pub fn cell_volume(&self) -> f64 {
        self.grid.cell_volume(self.rep)
    }

    /// norm^2 = sum |amp|^2 * cell volume.
    pub fn norm_sq(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Rescale so that norm^2 = 1. Errors on the zero state.
    pub fn normalize(&mut self) -> Result<(), StateError> {
        let n2 = self.norm_sq();
        if n2 <= 0.0 {
            return Err(StateError::ZeroState);
        }
        let s = Complex64::from(1.0 / n2.sqrt());
        self.amp.mapv_inplace(|z| z * s);
        Ok(())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.amp.mapv_inplace(|z| z * c);
        out
    }
}

/// Scalar product `<a|b> = sum conj(a) * b * cell`, conjugate on the first
/// argument. Both states must share grid and representation.
pub fn inner_product(a: &KvnState, b: &KvnState) -> Result<Complex64, StateError> {
    if a.grid != b.grid {
        return Err(StateError::GridMismatch);
    }
    if a.rep != b.rep {
        return Err(StateError::RepresentationMismatch(a.rep, b.rep));
    }
    let dot: Complex64 = a
        .amp
        .iter()
        .zip(b.amp.iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(dot * a.cell_volume())
}

/// Overlap fidelity |<a|b>|^2 / (|a|^2 |b|^2).
pub fn fidelity(a: &KvnState, b: &KvnState) -> Result<f64, StateError> {
    let ov = inner_product(a, b)?;
    Ok(ov.norm_sqr() / (a.norm_sq() * b.norm_sq()))
}

/// Expectation of a multiplication operator against the density |amp|^2.
///
/// `f` is sampled on the grid of the active representation, axis order
/// matching the amplitude field. The state must already be normalized;
/// an unnormalized state is reported, never silently rescaled.
pub fn expectation(s: &KvnState, f: &Array2<f64>) -> Result<f64, StateError> {
    if f.dim() != s.grid.shape() {
        return Err(StateError::FieldShape {
            expected: s.grid.shape(),
            found: f.dim(),
        });
    }
    let n2 = s.norm_sq();
    if (n2 - 1.0).abs() > NORM_TOLERANCE {
        return Err(StateError::Unnormalized(n2));
    }
    let acc: f64 = s
        .amp
        .iter()
        .zip(f.iter())
        .map(|(z, v)| z.norm_sqr() * v)
        .sum();
    Ok(acc * s.cell_volume())
}

/// Expectation of a function of the axis coordinates in the active
/// representation.
pub fn expectation_fn<F>(s: &KvnState, f: F) -> Result<f64, StateError>
where
    F: Fn(f64, f64) -> f64,
{
    let a0 = s.grid.axis0_values(s.rep);
    let a1 = s.grid.axis1_values(s.rep);
    let field = Array2::from_shape_fn(s.grid.shape(), |(j, m)| f(a0[j], a1[m]));
    expectation(s, &field)
}

/// Optional phase field stamped onto a Gaussian packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseSpec {
    /// Real positive packet.
    None,
    /// S = a*q + b*p.
    Linear { a: f64, b: f64 },
    /// S = c*q*p, the generic phase used in representation-inequivalence
    /// demonstrations.
    Bilinear { c: f64 },
}

impl PhaseSpec {
    pub fn eval(&self, q: f64, p: f64) -> f64 {
        match *self {
            PhaseSpec::None => 0.0,
            PhaseSpec::Linear { a, b } => a * q + b * p,
            PhaseSpec::Bilinear { c } => c * q * p,
        }
    }
}

/// Parameters of a Gaussian phase-space packet in QP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub center_q: f64,
    pub center_p: f64,
    pub sigma_q: f64,
    pub sigma_p: f64,
    pub phase: PhaseSpec,
}

impl Default for GaussianSpec {
    fn default() -> Self {
        GaussianSpec {
            center_q: 0.0,
            center_p: 0.0,
            sigma_q: 1.0,
            sigma_p: 1.0,
            phase: PhaseSpec::None,
        }
    }
}

/// Normalized Gaussian packet `exp(-(q-q0)^2/(4 sq^2) - (p-p0)^2/(4 sp^2))
/// * exp(i S)` in QP, so |amp|^2 has standard deviations (sq, sp).
pub fn gaussian_state(grid: PhaseGrid, spec: GaussianSpec) -> Result<KvnState, StateError> {
    let mut s = KvnState::from_fn(grid, |q, p| {
        let eq = (q - spec.center_q) / spec.sigma_q;
        let ep = (p - spec.center_p) / spec.sigma_p;
        let env = (-(eq * eq + ep * ep) / 4.0).exp();
        Complex64::from_polar(env, spec.phase.eval(q, p))
    });
    s.normalize()?;
    Ok(s)
}

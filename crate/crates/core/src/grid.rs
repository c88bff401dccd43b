//! Uniform phase-space grids and the four commuting-pair representations.
//!
//! One degree of freedom is discretized on an `n_q x n_p` rectangle. Each
//! axis carries a Fourier-dual axis (`lambda_q` for `q`, `lambda_p` for `p`)
//! whose spacing obeys `dlambda * dx * n = 2*pi` exactly, so the partial
//! Fourier transforms between representations are unitary grid operations
//! rather than approximations.

use crate::error::GridError;

/// Smallest admissible axis size. Below this the dual grid is too coarse to
/// carry any dynamics.
pub const MIN_POINTS: usize = 8;

/// The four commuting coordinate pairs a state can be expressed in.
///
/// The first letter names the axis-0 coordinate, the second the axis-1
/// coordinate. `L` marks the Fourier-dual (lambda) partner of an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// (q, p): both multiplication operators are classical observables.
    QP,
    /// (q, lambda_p): position and the conjugate of momentum.
    QLp,
    /// (lambda_q, p): the conjugate of position and momentum.
    LqP,
    /// (lambda_q, lambda_p): both conjugate coordinates.
    LqLp,
}

impl Representation {
    pub const ALL: [Representation; 4] = [
        Representation::QP,
        Representation::QLp,
        Representation::LqP,
        Representation::LqLp,
    ];

    /// Axis 0 carries lambda_q instead of q.
    pub fn axis0_dual(self) -> bool {
        matches!(self, Representation::LqP | Representation::LqLp)
    }

    /// Axis 1 carries lambda_p instead of p.
    pub fn axis1_dual(self) -> bool {
        matches!(self, Representation::QLp | Representation::LqLp)
    }

    pub fn axis_labels(self) -> (&'static str, &'static str) {
        match self {
            Representation::QP => ("q", "p"),
            Representation::QLp => ("q", "lambda_p"),
            Representation::LqP => ("lambda_q", "p"),
            Representation::LqLp => ("lambda_q", "lambda_p"),
        }
    }
}

/// Uniform rectangular discretization of one (q, p) phase-space degree of
/// freedom, with the induced dual grids.
///
/// Primal axes sample `[min, max)` left-closed; dual axes hold the signed
/// FFT frequencies in transform order (`0, d, .., (n/2-1)d, -n/2*d, .., -d`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    n_q: usize,
    n_p: usize,
    q_min: f64,
    q_max: f64,
    p_min: f64,
    p_max: f64,
}

fn check_axis(n: usize, min: f64, max: f64) -> Result<(), GridError> {
    if !min.is_finite() {
        return Err(GridError::NonFiniteBound(min));
    }
    if !max.is_finite() {
        return Err(GridError::NonFiniteBound(max));
    }
    if n % 2 != 0 {
        return Err(GridError::OddSize(n));
    }
    if n < MIN_POINTS {
        return Err(GridError::TooSmall(n));
    }
    if max <= min {
        return Err(GridError::BadRange(min, max));
    }
    Ok(())
}

impl PhaseGrid {
    pub fn new(
        n_q: usize,
        n_p: usize,
        q_range: (f64, f64),
        p_range: (f64, f64),
    ) -> Result<Self, GridError> {
        check_axis(n_q, q_range.0, q_range.1)?;
        check_axis(n_p, p_range.0, p_range.1)?;
        Ok(PhaseGrid {
            n_q,
            n_p,
            q_min: q_range.0,
            q_max: q_range.1,
            p_min: p_range.0,
            p_max: p_range.1,
        })
    }

    /// Square grid over symmetric ranges, the common test configuration.
    pub fn symmetric(n: usize, q_half: f64, p_half: f64) -> Result<Self, GridError> {
        PhaseGrid::new(n, n, (-q_half, q_half), (-p_half, p_half))
    }

    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / self.n_q as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.n_p as f64
    }

    /// Dual spacing of the q axis: `2*pi / (n_q * dq)`.
    pub fn dlambda_q(&self) -> f64 {
        std::f64::consts::TAU / (self.n_q as f64 * self.dq())
    }

    /// Dual spacing of the p axis: `2*pi / (n_p * dp)`.
    pub fn dlambda_p(&self) -> f64 {
        std::f64::consts::TAU / (self.n_p as f64 * self.dp())
    }

    pub fn q_at(&self, j: usize) -> f64 {
        self.q_min + j as f64 * self.dq()
    }

    pub fn p_at(&self, m: usize) -> f64 {
        self.p_min + m as f64 * self.dp()
    }

    /// Signed dual frequency at transform index `k` for an axis of `n`
    /// points with dual spacing `d`.
    fn lambda_at(n: usize, d: f64, k: usize) -> f64 {
        if k < n / 2 {
            k as f64 * d
        } else {
            (k as f64 - n as f64) * d
        }
    }

    pub fn lambda_q_at(&self, k: usize) -> f64 {
        Self::lambda_at(self.n_q, self.dlambda_q(), k)
    }

    pub fn lambda_p_at(&self, k: usize) -> f64 {
        Self::lambda_at(self.n_p, self.dlambda_p(), k)
    }

    pub fn q_values(&self) -> Vec<f64> {
        (0..self.n_q).map(|j| self.q_at(j)).collect()
    }

    pub fn p_values(&self) -> Vec<f64> {
        (0..self.n_p).map(|m| self.p_at(m)).collect()
    }

    pub fn lambda_q_values(&self) -> Vec<f64> {
        (0..self.n_q).map(|k| self.lambda_q_at(k)).collect()
    }

    pub fn lambda_p_values(&self) -> Vec<f64> {
        (0..self.n_p).map(|k| self.lambda_p_at(k)).collect()
    }

    /// Coordinate values along axis 0 in the given representation.
    pub fn axis0_values(&self, rep: Representation) -> Vec<f64> {
        if rep.axis0_dual() {
            self.lambda_q_values()
        } else {
            self.q_values()
        }
    }

    /// Coordinate values along axis 1 in the given representation.
    pub fn axis1_values(&self, rep: Representation) -> Vec<f64> {
        if rep.axis1_dual() {
            self.lambda_p_values()
        } else {
            self.p_values()
        }
    }

    /// Quadrature weight of one cell in the given representation.
    ///
    /// The continuum 1/sqrt(2*pi) of each partial Fourier transform is
    /// absorbed here, which is what makes norms representation-independent.
    pub fn cell_volume(&self, rep: Representation) -> f64 {
        let w0 = if rep.axis0_dual() {
            self.dlambda_q()
        } else {
            self.dq()
        };
        let w1 = if rep.axis1_dual() {
            self.dlambda_p()
        } else {
            self.dp()
        };
        w0 * w1
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_q, self.n_p)
    }
}

/// Construct a grid, verifying the type invariants.
///
/// Thin functional wrapper over [`PhaseGrid::new`].
pub fn make_grid(
    n_q: usize,
    n_p: usize,
    q_range: (f64, f64),
    p_range: (f64, f64),
) -> Result<PhaseGrid, GridError> {
    PhaseGrid::new(n_q, n_p, q_range, p_range)
}

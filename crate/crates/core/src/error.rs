//! Error types shared across the crate.

use thiserror::Error;

use crate::grid::Representation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid size {0} is too small (need at least {min} points per axis)", min = crate::grid::MIN_POINTS)]
    TooSmall(usize),
    #[error("grid size {0} must be even")]
    OddSize(usize),
    #[error("axis range ({0}, {1}) is inverted or degenerate")]
    BadRange(f64, f64),
    #[error("axis bound {0} is not finite")]
    NonFiniteBound(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("amplitude field has shape {found:?}, grid expects {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("state contains a non-finite amplitude")]
    NonFinite,
    #[error("states live on different grids")]
    GridMismatch,
    #[error("states are in different representations ({0:?} vs {1:?})")]
    RepresentationMismatch(Representation, Representation),
    #[error("state must be in the {expected:?} representation, found {found:?}")]
    WrongRepresentation {
        expected: Representation,
        found: Representation,
    },
    #[error("state is not normalized (norm^2 = {0})")]
    Unnormalized(f64),
    #[error("state is identically zero")]
    ZeroState,
    #[error("field shape {found:?} does not match the grid shape {expected:?}")]
    FieldShape {
        expected: (usize, usize),
        found: (usize, usize),
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagateError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("tabulated potential supplies {found} samples, the q axis has {expected}")]
    TabulatedLength { expected: usize, found: usize },
    #[error("potential is not finite at q = {0}")]
    NonFinitePotential(f64),
    #[error("exact transport is only available for the free and harmonic potentials")]
    UnsupportedPotential,
    #[error("step count must be positive")]
    ZeroSteps,
    #[error("dt must be finite")]
    NonFiniteDt,
    #[error("record_every must be positive")]
    ZeroRecordEvery,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("phase floor must be positive, got {0}")]
    BadPhaseFloor(f64),
    #[error("continuity residual needs at least 3 snapshots, got {0}")]
    TooFewSnapshots(usize),
    #[error("snapshot times are not uniformly spaced")]
    NonUniformTimes,
    #[error("current exceeds the imaginary-residue budget (max |Im J| = {0:.3e})")]
    ImaginaryResidue(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmError {
    #[error("spatial grid needs at least {min} points, got {0}", min = crate::grid::MIN_POINTS)]
    TooFewPoints(usize),
    #[error("spatial grid size {0} must be even")]
    OddSize(usize),
    #[error("domain length must be positive and finite, got {0}")]
    BadLength(f64),
    #[error("field has {found} grid points, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("field contains a non-finite value")]
    NonFinite,
    #[error("states live on different spatial grids")]
    GridMismatch,
    #[error("continuity residual needs at least 3 snapshots, got {0}")]
    TooFewSnapshots(usize),
    #[error("mode wavenumber must be positive for a transverse oscillator, got {0}")]
    LongitudinalMode(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HybridError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Propagate(#[from] PropagateError),
    #[error("kappa = {0} is outside [0, 1]")]
    KappaOutOfRange(f64),
    #[error("hbar must be positive, got {0}")]
    BadHbar(f64),
    #[error("tabulated potentials are not supported by the hybrid stepper")]
    TabulatedUnsupported,
    #[error("the phase-space transform of a density matrix is undefined at kappa = 0")]
    KappaZero,
    #[error("density matrix is {found} x {found}, the grid carries {expected} position points")]
    SizeMismatch { expected: usize, found: usize },
    #[error("phase grid is not the scaled Fourier dual of the position grid: {0}")]
    IncompatibleGrid(String),
    #[error("density matrix violates hermiticity (max |rho - rho^H| = {0:.3e})")]
    NotHermitian(f64),
    #[error("density matrix trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("imaginary residue {0:.3e} exceeds the budget for a real phase-space field")]
    ImaginaryResidue(f64),
    #[error("wave function must be normalized (norm^2 = {0})")]
    Unnormalized(f64),
}

//! Numerical tolerances used by the library's own consistency checks and by
//! the acceptance suite.
//!
//! Everything here is pinned: tests reference these constants instead of
//! burying magic numbers in assertions.

/// Norm preservation of a single representation change, relative.
/// One FFT pass per axis costs a few ulp; 1e-12 leaves four digits of slack.
pub const UNITARITY_REL: f64 = 1e-12;

/// Relative L2 defect of any closed loop of representation changes.
pub const ROUND_TRIP_REL: f64 = 1e-12;

/// Spectral conjugate-pair identity: <lambda_p> in QLp against <-i d/dp>
/// computed by spectral differentiation in QP.
pub const CONJUGATE_PAIR: f64 = 1e-10;

/// Grid quadrature of Gaussian moments on a well-resolved grid.
pub const GAUSSIAN_QUADRATURE: f64 = 1e-8;

/// L-infinity distance between a split-step density and the exact
/// characteristics transport, Gaussian data, free potential.
pub const TRANSPORT_LINF: f64 = 1e-6;

/// Fidelity defect 1 - |<oracle|evolved>|^2 for the harmonic quarter turn.
pub const HARMONIC_FIDELITY_DEFECT: f64 = 1e-6;

/// Fidelity defect after one full harmonic period.
pub const PERIOD_FIDELITY_DEFECT: f64 = 1e-5;

/// Relative norm drift over a full propagation run.
pub const NORM_DRIFT: f64 = 1e-10;

/// Forward-then-backward free transport must return the initial state.
pub const REVERSIBILITY: f64 = 1e-10;

/// Energy expectation drift over 1000 split steps at the test step sizes.
pub const ENERGY_DRIFT: f64 = 1e-8;

/// QP densities of equal-modulus, different-phase initial states must
/// coincide at this level at all recorded times.
pub const PHASE_DECOUPLING: f64 = 1e-12;

/// The same pair expressed in (q, lambda_p) must differ by more than this
/// in L-infinity: phase features are visible there.
pub const QLP_SEPARATION_MIN: f64 = 1e-3;

/// Strang splitting is second order: halving dt twice divides the error by
/// about 16. Accepted band for the measured ratio.
pub const SECOND_ORDER_RATIO: (f64, f64) = (12.0, 20.0);

/// Runge-Kutta 4 reference: halving dt divides the error by about 16.
pub const FOURTH_ORDER_RATIO: (f64, f64) = (12.0, 20.0);

/// Imaginary residue allowed on a quantity that is real by construction.
pub const IMAG_RESIDUE: f64 = 1e-12;

/// Unwrapped phase against its analytic form on the mask.
pub const PHASE_UNWRAP: f64 = 1e-8;

/// Spectral current against an independent sixth-order finite-difference
/// evaluation.
pub const CURRENT_FD: f64 = 1e-6;

/// Per-mode Maxwell stepping: relative energy and L2-norm drift over 1e4
/// steps, and the divergence residuals' drift over the same run.
pub const EM_CONSERVATION: f64 = 1e-12;

/// Plane-wave phase error per period of exact per-mode stepping.
pub const PLANE_WAVE_PHASE: f64 = 1e-10;

/// Forward-then-backward Maxwell step.
pub const EM_REVERSIBILITY: f64 = 1e-13;

/// RK4 oracle against the exact per-mode stepper at dt = 1e-3 on a single
/// plane wave.
pub const EM_ORACLE_PLANE_WAVE: f64 = 1e-8;

/// Mapped mode-oscillator energy conservation along the classical flow.
pub const OSCILLATOR_ENERGY: f64 = 1e-10;

/// kappa = 0 hybrid stepping against the classical stepper (same phase
/// tables by construction).
pub const CLASSICAL_BRANCH_MATCH: f64 = 1e-13;

/// kappa = 1e-6 hybrid density against the classical branch, L-infinity,
/// 100 steps.
pub const SMALL_KAPPA_LINF: f64 = 1e-5;

/// Harmonic potential: kappa = 1 and kappa = 0 density evolutions coincide.
pub const QUADRATIC_EQUIVALENCE: f64 = 1e-8;

/// kappa = 1 density evolution against the wave-function oracle mapped to
/// phase space, L-infinity.
pub const KAPPA_ONE_ORACLE_LINF: f64 = 1e-5;

/// Norm drift of the hybrid stepper over 1000 steps, any kappa.
pub const HYBRID_NORM_DRIFT: f64 = 1e-10;

/// Commutator witness: <[q_Q, p_Q]> - i*hbar*kappa*<1> on smooth states.
pub const COMMUTATOR_WITNESS: f64 = 1e-10;

/// Phase-space field realness and unit-integral preservation in time.
pub const WIGNER_REAL_NORM: f64 = 1e-8;

/// Harmonic ground state mapped through the phase-space transform against
/// (1/pi) exp(-(q^2+p^2)).
pub const WIGNER_GROUND: f64 = 1e-6;

/// Phase-space transform against direct quadrature of the same kernel.
pub const WIGNER_QUADRATURE: f64 = 1e-6;

/// Positivity floor for classically transported positive data; set by the
/// spectral interpolation, not by the transport itself.
pub const POSITIVITY_FLOOR: f64 = -1e-6;

/// A run is declared nonpositive once min W crosses this absolute level.
pub const NEGATIVITY_THRESHOLD: f64 = -1e-3;

/// Relative variant of the negativity threshold, three orders above
/// quadrature noise at the tested grid sizes.
pub const NEGATIVITY_THRESHOLD_REL: f64 = 1e-3;

/// Purity drift of the pure-state wave-function oracle.
pub const PURITY_DRIFT: f64 = 1e-10;

/// Free-packet spreading law and other closed-form oracle comparisons.
pub const ORACLE_CLOSED_FORM: f64 = 1e-6;

/// Snapshot agreement across thread counts in the scenario runner.
pub const THREAD_TOLERANCE: f64 = 1e-13;

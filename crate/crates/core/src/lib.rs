//! Phase-space wave mechanics on a Hilbert space.
//!
//! Classical transport, free-space Maxwell dynamics in six-component spinor
//! form, and a kappa-interpolated quantum-classical propagator whose
//! phase-space wave function is the Wigner function, all on uniform FFT
//! grids with exactly unitary representation changes.

pub mod characteristics;
pub mod diagnostics;
pub mod em;
pub mod error;
pub mod grid;
pub mod hybrid;
pub mod potential;
pub mod propagate;
pub mod state;
pub mod tolerances;
pub mod transform;

pub use error::{DiagnosticsError, EmError, GridError, HybridError, PropagateError, StateError};
pub use grid::{make_grid, PhaseGrid, Representation};
pub use potential::Potential;
pub use state::{
    expectation, expectation_fn, fidelity, gaussian_state, inner_product, GaussianSpec, KvnState,
    PhaseSpec,
};
pub use transform::{to_representation, SpectralPlan};

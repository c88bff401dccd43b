//! Density, phase, current and continuity diagnostics, and the
//! superselection projection that strips phases from a state.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::DiagnosticsError;
use crate::grid::Representation;
use crate::potential::Potential;
use crate::propagate::Trajectory;
use crate::state::KvnState;
use crate::transform::{d_dlambda_p, d_dq};

/// Default amplitude floor below which a phase is considered meaningless.
pub const DEFAULT_PHASE_FLOOR: f64 = 1e-6;

/// Pointwise density rho = |amp|^2 in the state's active representation.
pub fn density(s: &KvnState) -> Array2<f64> {
    s.amp().mapv(|z| z.norm_sqr())
}

/// Integral of the density over the active representation's cells.
pub fn density_integral(s: &KvnState) -> f64 {
    s.norm_sq()
}

/// Amplitude/phase split rho, S with psi = sqrt(rho) exp(i S) on the mask.
#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    pub rho: Array2<f64>,
    /// Unwrapped phase in radians; only meaningful where `mask` is true.
    pub phase: Array2<f64>,
    /// True where rho exceeds `phase_floor * max(rho)`.
    pub mask: Array2<bool>,
}

fn wrap_to_pi(d: f64) -> f64 {
    d - std::f64::consts::TAU * (d / std::f64::consts::TAU).round()
}

/// Polar decomposition with branch cuts resolved by nearest-neighbor
/// unwrapping. Path order is fixed: each axis-0 lane is unwrapped from its
/// first entry, then the first axis-0 row is unwrapped across axis 1 and
/// the resulting offsets shift whole lanes. Phases should only ever be
/// compared through differences on the mask.
pub fn polar(s: &KvnState, phase_floor: f64) -> Result<PolarDecomposition, DiagnosticsError> {
    if !(phase_floor > 0.0) {
        return Err(DiagnosticsError::BadPhaseFloor(phase_floor));
    }
    let rho = density(s);
    let rho_max = rho.iter().cloned().fold(0.0, f64::max);
    if rho_max <= 0.0 {
        return Err(DiagnosticsError::State(crate::error::StateError::ZeroState));
    }
    let (n0, n1) = rho.dim();
    let mut phase = s.amp().mapv(|z| z.arg());

    // unwrap each axis-0 lane downward from its first entry
    for m in 0..n1 {
        for i in 1..n0 {
            let step = wrap_to_pi(phase[(i, m)] - phase[(i - 1, m)]);
            phase[(i, m)] = phase[(i - 1, m)] + step;
        }
    }
    // align lanes through the unwrapped first row
    let mut row_anchor = phase[(0, 0)];
    for m in 1..n1 {
        let step = wrap_to_pi(phase[(0, m)] - row_anchor);
        let target = row_anchor + step;
        let shift = target - phase[(0, m)];
        row_anchor = target;
        if shift != 0.0 {
            for i in 0..n0 {
                phase[(i, m)] += shift;
            }
        }
    }

    let threshold = phase_floor * rho_max;
    let mask = rho.mapv(|r| r > threshold);
    Ok(PolarDecomposition { rho, phase, mask })
}

/// Density current of a (q, lambda_p) state,
/// `J = i (psi* d_q d_lambda_p psi - (d_q d_lambda_p psi*) psi)`,
/// evaluated with spectral derivatives. The two terms are conjugate up to
/// the grid's unpaired edge frequencies; the imaginary residue is checked
/// against a relative budget and then discarded.
pub fn current_qlp(s: &KvnState) -> Result<Array2<f64>, DiagnosticsError> {
    if s.rep() != Representation::QLp {
        return Err(DiagnosticsError::State(
            crate::error::StateError::WrongRepresentation {
                expected: Representation::QLp,
                found: s.rep(),
            },
        ));
    }
    let mixed = d_dq(&d_dlambda_p(s)?)?;
    let conj_state = KvnState::new(*s.grid(), s.rep(), s.amp().mapv(|z| z.conj()))
        .map_err(DiagnosticsError::State)?;
    let mixed_conj = d_dq(&d_dlambda_p(&conj_state)?)?;

    let mut max_im: f64 = 0.0;
    let mut term_scale: f64 = 0.0;
    let mut j_field = Array2::zeros(s.grid().shape());
    for ((idx, z), (d, dc)) in s
        .amp()
        .indexed_iter()
        .zip(mixed.amp().iter().zip(mixed_conj.amp().iter()))
    {
        let t1 = z.conj() * d;
        let t2 = dc * z;
        let val = Complex64::i() * (t1 - t2);
        max_im = max_im.max(val.im.abs());
        term_scale = term_scale.max(t1.norm() + t2.norm());
        j_field[idx] = val.re;
    }
    // The two terms come from independent derivative passes, so their
    // cancellation is limited by the spectral noise floor: rounding spread
    // over all modes and amplified by the largest derivative multipliers.
    let g = s.grid();
    let lambda_q_max = 0.5 * g.n_q() as f64 * g.dlambda_q();
    let p_abs_max = g.p_min().abs().max(g.p_max().abs());
    let amp_max = s.amp().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let noise_scale = lambda_q_max * p_abs_max * amp_max * amp_max;
    if max_im > 1e-12 * term_scale.max(noise_scale).max(1.0) {
        return Err(DiagnosticsError::ImaginaryResidue(max_im));
    }
    Ok(j_field)
}

/// Residuals of the transport law `d rho / dt = -J` along a (q, lambda_p)
/// trajectory: `max_grid |central-difference d rho/dt + J|` per interior
/// snapshot. The potential enters the dynamics only through a real
/// multiplier that cancels in the density derivative, so the residual
/// itself never evaluates it.
#[derive(Debug, Clone)]
pub struct ContinuityReport {
    /// One residual per interior snapshot (the first and last have no
    /// centered time derivative).
    pub per_snapshot: Vec<f64>,
    pub max: f64,
}

pub fn continuity_residual(
    trajectory: &Trajectory,
    _potential: &Potential,
) -> Result<ContinuityReport, DiagnosticsError> {
    let snaps = &trajectory.snapshots;
    if snaps.len() < 3 {
        return Err(DiagnosticsError::TooFewSnapshots(snaps.len()));
    }
    for s in snaps {
        if s.rep() != Representation::QLp {
            return Err(DiagnosticsError::State(
                crate::error::StateError::WrongRepresentation {
                    expected: Representation::QLp,
                    found: s.rep(),
                },
            ));
        }
    }
    let times = &trajectory.times;
    let dt = times[1] - times[0];
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs().max(1e-300) {
            return Err(DiagnosticsError::NonUniformTimes);
        }
    }

    let densities: Vec<Array2<f64>> = snaps.iter().map(density).collect();
    let mut per_snapshot = Vec::with_capacity(snaps.len() - 2);
    let mut max: f64 = 0.0;
    for n in 1..snaps.len() - 1 {
        let j_field = current_qlp(&snaps[n])?;
        let mut res: f64 = 0.0;
        for ((drho_next, drho_prev), j) in densities[n + 1]
            .iter()
            .zip(densities[n - 1].iter())
            .zip(j_field.iter())
        {
            let dot = (drho_next - drho_prev) / (2.0 * dt);
            res = res.max((dot + j).abs());
        }
        per_snapshot.push(res);
        max = max.max(res);
    }
    Ok(ContinuityReport { per_snapshot, max })
}

/// Superselection projection psi -> sqrt(rho): keeps the pointwise modulus,
/// discards every phase. Idempotent and norm-preserving.
pub fn superselect(s: &KvnState) -> KvnState {
    let amp = s.amp().mapv(|z| Complex64::new(z.norm(), 0.0));
    KvnState::new(*s.grid(), s.rep(), amp).expect("modulus of a finite field is finite")
}

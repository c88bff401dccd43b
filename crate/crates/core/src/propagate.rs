//! Strang-split spectral time stepping for phase-space wave functions.
//!
//! The generator of H = p^2/2 + V(q) splits into two pieces, each diagonal
//! in one mixed representation: the potential piece multiplies by
//! `exp(+i (dt/2) V'(q) lambda_p)` in (q, lambda_p) and the kinetic piece
//! multiplies by `exp(-i dt p lambda_q)` in (lambda_q, p). Both sub-flows
//! are exactly unitary, so the composed step conserves the norm to rounding
//! and the density is transported along second-order-accurate classical
//! characteristics.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::PropagateError;
use crate::grid::{PhaseGrid, Representation};
use crate::potential::Potential;
use crate::state::{expectation, KvnState};
use crate::transform::SpectralPlan;

/// Operator splitting scheme. Only the symmetric second-order splitting is
/// implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Splitting {
    #[default]
    Strang,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    pub steps: usize,
    pub splitting: Splitting,
    pub record_every: usize,
}

impl StepperConfig {
    pub fn new(dt: f64, steps: usize, record_every: usize) -> Self {
        StepperConfig {
            dt,
            steps,
            splitting: Splitting::Strang,
            record_every,
        }
    }

    fn validate(&self) -> Result<(), PropagateError> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(PropagateError::NonFiniteDt);
        }
        if self.steps == 0 {
            return Err(PropagateError::ZeroSteps);
        }
        if self.record_every == 0 {
            return Err(PropagateError::ZeroRecordEvery);
        }
        Ok(())
    }
}

/// Snapshots of an evolution, recorded every `record_every` steps starting
/// from the initial state. All snapshots share the representation the
/// initial state was handed over in.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<KvnState>,
    /// State after the full run (equals the last snapshot when the step
    /// count is a multiple of the recording interval).
    pub final_state: KvnState,
    /// Some per-step phase increment exceeded pi somewhere on the grid, so
    /// the sub-flows may alias for states with support there.
    pub aliasing_warning: bool,
}

/// Precomputed phase tables for one (grid, generator, dt) triple.
///
/// The potential half-step table lives on the (q, lambda_p) layout, the
/// kinetic full-step table on (lambda_q, p). Reused across steps; building
/// one of these is the only place the complex exponentials are evaluated.
pub struct SplitEngine {
    grid: PhaseGrid,
    plan: SpectralPlan,
    dt: f64,
    pot_half: Array2<Complex64>,
    pot_full: Array2<Complex64>,
    kin_full: Array2<Complex64>,
    aliasing_ok: bool,
}

impl SplitEngine {
    /// Engine for the classical transport generator of H = p^2/2 + V(q).
    pub fn liouville(
        grid: &PhaseGrid,
        potential: &Potential,
        dt: f64,
    ) -> Result<Self, PropagateError> {
        if !dt.is_finite() {
            return Err(PropagateError::NonFiniteDt);
        }
        let vp = potential.derivatives_on(grid)?;
        Self::from_potential_phase(grid, dt, |j, k| {
            0.5 * dt * vp[j] * grid.lambda_p_at(k)
        })
    }

    /// Engine with a caller-supplied potential half-step phase angle
    /// `theta(j, k)` on the (q, lambda_p) layout; the sub-flow multiplies
    /// by `exp(i theta)`. The kinetic table is always `exp(-i dt p
    /// lambda_q)`.
    pub(crate) fn from_potential_phase<F>(
        grid: &PhaseGrid,
        dt: f64,
        theta: F,
    ) -> Result<Self, PropagateError>
    where
        F: Fn(usize, usize) -> f64,
    {
        // Phases on the unpaired Nyquist mode of a dual axis are dropped:
        // every other dual frequency comes in conjugate pairs, and keeping
        // the odd one motionless is what lets real phase-space fields stay
        // real under the flow.
        let (nq, np) = grid.shape();
        let mut max_pot_phase: f64 = 0.0;
        let mut pot_half = Array2::zeros((nq, np));
        let mut pot_full = Array2::zeros((nq, np));
        for j in 0..nq {
            for k in 0..np {
                let th = if k == np / 2 { 0.0 } else { theta(j, k) };
                if !th.is_finite() {
                    return Err(PropagateError::NonFinitePotential(grid.q_at(j)));
                }
                max_pot_phase = max_pot_phase.max((2.0 * th).abs());
                pot_half[(j, k)] = Complex64::from_polar(1.0, th);
                pot_full[(j, k)] = Complex64::from_polar(1.0, 2.0 * th);
            }
        }
        let mut max_kin_phase: f64 = 0.0;
        let mut kin_full = Array2::zeros((nq, np));
        for k in 0..nq {
            for m in 0..np {
                let th = if k == nq / 2 {
                    0.0
                } else {
                    -dt * grid.p_at(m) * grid.lambda_q_at(k)
                };
                max_kin_phase = max_kin_phase.max(th.abs());
                kin_full[(k, m)] = Complex64::from_polar(1.0, th);
            }
        }
        Ok(SplitEngine {
            grid: *grid,
            plan: SpectralPlan::new(grid),
            dt,
            pot_half,
            pot_full,
            kin_full,
            aliasing_ok: max_pot_phase < std::f64::consts::PI
                && max_kin_phase < std::f64::consts::PI,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    /// False when some per-step phase increment reaches pi somewhere on the
    /// grid. Evolution still runs; rows with negligible amplitude at the
    /// offending cells are unaffected.
    pub fn aliasing_ok(&self) -> bool {
        self.aliasing_ok
    }

    fn mul_table(amp: &mut Array2<Complex64>, table: &Array2<Complex64>) {
        amp.zip_mut_with(table, |z, t| *z *= t);
    }

    /// Kinetic sub-flow applied to a field currently in QLp layout:
    /// QLp -> LqP, multiply, LqP -> QLp.
    fn kinetic_cycle(&self, amp: &mut Array2<Complex64>) {
        self.plan.convert(amp, Representation::QLp, Representation::LqP);
        Self::mul_table(amp, &self.kin_full);
        self.plan.convert(amp, Representation::LqP, Representation::QLp);
    }

    /// One Strang step. The state may be handed over in any representation;
    /// the result comes back in the same one.
    pub fn step(&self, s: &KvnState) -> Result<KvnState, PropagateError> {
        let home = s.rep();
        let mut amp = s.amp().clone();
        self.plan.convert(&mut amp, home, Representation::QLp);
        Self::mul_table(&mut amp, &self.pot_half);
        self.kinetic_cycle(&mut amp);
        Self::mul_table(&mut amp, &self.pot_half);
        self.plan.convert(&mut amp, Representation::QLp, home);
        let out = KvnState::new(*s.grid(), home, amp)?;
        Ok(out)
    }

    /// Run `cfg.steps` Strang steps, recording every `cfg.record_every`.
    /// Half-steps of consecutive steps inside a recording block are fused
    /// into full-step tables; snapshots land exactly on step boundaries.
    pub fn evolve(&self, s0: &KvnState, cfg: &StepperConfig) -> Result<Trajectory, PropagateError> {
        cfg.validate()?;
        let home = s0.rep();
        let mut times = vec![0.0];
        let mut snapshots = vec![s0.clone()];

        let mut amp = s0.amp().clone();
        let mut done = 0usize;
        while done < cfg.steps {
            let block = cfg.record_every.min(cfg.steps - done);
            self.plan.convert(&mut amp, home, Representation::QLp);
            Self::mul_table(&mut amp, &self.pot_half);
            for i in 0..block {
                self.kinetic_cycle(&mut amp);
                if i + 1 < block {
                    Self::mul_table(&mut amp, &self.pot_full);
                }
            }
            Self::mul_table(&mut amp, &self.pot_half);
            self.plan.convert(&mut amp, Representation::QLp, home);
            done += block;
            if done % cfg.record_every == 0 || done == cfg.steps {
                let snap = KvnState::new(self.grid, home, amp.clone())?;
                times.push(done as f64 * self.dt);
                snapshots.push(snap);
            }
        }
        let final_state = snapshots.last().expect("at least the initial snapshot").clone();
        Ok(Trajectory {
            times,
            snapshots,
            final_state,
            aliasing_warning: !self.aliasing_ok,
        })
    }
}

/// One Strang step of the classical Liouville flow. `dt` may be zero or
/// negative; zero is the identity and negative steps run time backwards.
pub fn liouville_step(
    s: &KvnState,
    potential: &Potential,
    dt: f64,
) -> Result<KvnState, PropagateError> {
    SplitEngine::liouville(s.grid(), potential, dt)?.step(s)
}

/// Evolve under the classical Liouville flow, recording snapshots.
pub fn evolve(
    s: &KvnState,
    potential: &Potential,
    cfg: &StepperConfig,
) -> Result<Trajectory, PropagateError> {
    SplitEngine::liouville(s.grid(), potential, cfg.dt)?.evolve(s, cfg)
}

/// True when every per-step phase increment stays below pi across the grid.
pub fn aliasing_guard_ok(
    grid: &PhaseGrid,
    potential: &Potential,
    dt: f64,
) -> Result<bool, PropagateError> {
    Ok(SplitEngine::liouville(grid, potential, dt)?.aliasing_ok())
}

/// Expectation of H(q, p) = p^2/2 + V(q) against the density of a
/// normalized QP state.
pub fn energy_expectation(s: &KvnState, potential: &Potential) -> Result<f64, PropagateError> {
    if s.rep() != Representation::QP {
        return Err(PropagateError::State(
            crate::error::StateError::WrongRepresentation {
                expected: Representation::QP,
                found: s.rep(),
            },
        ));
    }
    let v = potential.values_on(s.grid())?;
    let g = s.grid();
    let field = Array2::from_shape_fn(g.shape(), |(j, m)| {
        let p = g.p_at(m);
        0.5 * p * p + v[j]
    });
    Ok(expectation(s, &field)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristics::exact_transport;
    use crate::grid::make_grid;
    use crate::state::{expectation_fn, fidelity, gaussian_state, GaussianSpec, PhaseSpec};
    use crate::tolerances as tol;
    use approx::assert_abs_diff_eq;

    fn grid() -> PhaseGrid {
        // roomy box: transported tails must clear the periodic boundary
        // for the tightest assertions below
        make_grid(128, 128, (-12.0, 12.0), (-12.0, 12.0)).unwrap()
    }

    fn packet(q0: f64, p0: f64) -> KvnState {
        gaussian_state(
            grid(),
            GaussianSpec {
                center_q: q0,
                center_p: p0,
                ..GaussianSpec::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_dt_is_the_identity() {
        let s = packet(0.0, 1.0);
        let out = liouville_step(&s, &Potential::harmonic(1.0), 0.0).unwrap();
        let diff: f64 = s
            .amp()
            .iter()
            .zip(out.amp().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-15);
    }

    #[test]
    fn free_packet_centroid_drifts_at_its_momentum() {
        let s = packet(0.0, 1.0);
        let cfg = StepperConfig::new(0.01, 100, 100);
        let tr = evolve(&s, &Potential::Free, &cfg).unwrap();
        let q = expectation_fn(&tr.final_state, |q, _| q).unwrap();
        let p = expectation_fn(&tr.final_state, |_, p| p).unwrap();
        assert_abs_diff_eq!(q, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-8);

        // density agrees with the exact characteristics transport
        let oracle = exact_transport(&s, &Potential::Free, 1.0).unwrap();
        let linf = tr
            .final_state
            .amp()
            .iter()
            .zip(oracle.amp().iter())
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
            .fold(0.0, f64::max);
        assert!(linf < tol::TRANSPORT_LINF, "L-inf {linf}");
    }

    #[test]
    fn harmonic_quarter_turn_matches_the_rotated_state() {
        let s = packet(0.0, 1.0);
        let t = std::f64::consts::FRAC_PI_2;
        let steps = (t / 1e-3).round() as usize;
        let cfg = StepperConfig::new(t / steps as f64, steps, steps);
        let tr = evolve(&s, &Potential::harmonic(1.0), &cfg).unwrap();
        let oracle = exact_transport(&s, &Potential::harmonic(1.0), t).unwrap();
        let f = fidelity(&tr.final_state, &oracle).unwrap();
        assert!(
            f >= 1.0 - tol::HARMONIC_FIDELITY_DEFECT,
            "fidelity defect {}",
            1.0 - f
        );
        // the rotated packet sits at (1, 0)
        let q = expectation_fn(&tr.final_state, |q, _| q).unwrap();
        assert_abs_diff_eq!(q, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn norm_is_conserved_over_a_long_run() {
        let s = packet(1.0, 0.0);
        let cfg = StepperConfig::new(1e-3, 1000, 500);
        for v in [
            Potential::Free,
            Potential::harmonic(1.0),
            Potential::quartic(1.0, 0.5),
        ] {
            let tr = evolve(&s, &v, &cfg).unwrap();
            assert_abs_diff_eq!(tr.final_state.norm_sq(), 1.0, epsilon = tol::NORM_DRIFT);
        }
    }

    #[test]
    fn harmonic_period_returns_the_state() {
        let s = packet(1.5, 0.0);
        let t = std::f64::consts::TAU;
        let steps = 1000;
        let cfg = StepperConfig::new(t / steps as f64, steps, steps);
        let tr = evolve(&s, &Potential::harmonic(1.0), &cfg).unwrap();
        let f = fidelity(&tr.final_state, &s).unwrap();
        assert!(
            f >= 1.0 - tol::PERIOD_FIDELITY_DEFECT,
            "fidelity defect {}",
            1.0 - f
        );
    }

    #[test]
    fn free_flow_reverses_exactly() {
        let s = packet(0.0, 2.0);
        let engine = SplitEngine::liouville(s.grid(), &Potential::Free, 0.01).unwrap();
        let back = SplitEngine::liouville(s.grid(), &Potential::Free, -0.01).unwrap();
        let mut cur = s.clone();
        for _ in 0..50 {
            cur = engine.step(&cur).unwrap();
        }
        for _ in 0..50 {
            cur = back.step(&cur).unwrap();
        }
        let diff: f64 = s
            .amp()
            .iter()
            .zip(cur.amp().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < tol::REVERSIBILITY, "round trip L-inf {diff}");
    }

    #[test]
    fn energy_expectation_is_conserved() {
        // small dt: the leapfrog shadow-Hamiltonian error stays inside the
        // budget over the whole run
        for (v, dt) in [
            (Potential::harmonic(1.0), 1e-4),
            (Potential::quartic(1.0, 0.5), 1e-5),
        ] {
            let s = packet(1.0, 0.5);
            let e0 = energy_expectation(&s, &v).unwrap();
            let cfg = StepperConfig::new(dt, 1000, 1000);
            let tr = evolve(&s, &v, &cfg).unwrap();
            let e1 = energy_expectation(&tr.final_state, &v).unwrap();
            assert!(
                (e1 - e0).abs() < tol::ENERGY_DRIFT,
                "drift {} at dt {dt}",
                (e1 - e0).abs()
            );
        }
    }

    #[test]
    fn amplitude_and_phase_decouple_in_qp() {
        let flat = packet(0.5, 0.0);
        let phased = gaussian_state(
            grid(),
            GaussianSpec {
                center_q: 0.5,
                phase: PhaseSpec::Bilinear { c: 1.0 },
                ..GaussianSpec::default()
            },
        )
        .unwrap();
        let cfg = StepperConfig::new(0.01, 60, 20);
        let a = evolve(&flat, &Potential::harmonic(1.0), &cfg).unwrap();
        let b = evolve(&phased, &Potential::harmonic(1.0), &cfg).unwrap();
        for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
            let linf = sa
                .amp()
                .iter()
                .zip(sb.amp().iter())
                .map(|(x, y)| (x.norm_sqr() - y.norm_sqr()).abs())
                .fold(0.0, f64::max);
            assert!(linf < tol::PHASE_DECOUPLING, "QP densities split by {linf}");
        }
    }

    #[test]
    fn strang_error_is_second_order() {
        // tight packet on a roomy box: every orbit that carries visible
        // density must stay inside the p range, or boundary wrap pollutes
        // the convergence measurement below the dt^2 signal
        let g = make_grid(128, 128, (-10.0, 10.0), (-10.0, 10.0)).unwrap();
        let s = gaussian_state(
            g,
            GaussianSpec {
                center_q: 1.0,
                sigma_q: 0.5,
                sigma_p: 0.5,
                ..GaussianSpec::default()
            },
        )
        .unwrap();
        let v = Potential::quartic(1.0, 0.5);
        let total = 0.4;
        let density = |st: &KvnState| st.amp().mapv(|z| z.norm_sqr());
        let run = |dt: f64| {
            let steps = (total / dt).round() as usize;
            let cfg = StepperConfig::new(total / steps as f64, steps, steps);
            density(&evolve(&s, &v, &cfg).unwrap().final_state)
        };
        let err = |dt: f64| {
            let coarse = run(dt);
            let fine = run(dt / 4.0);
            coarse
                .iter()
                .zip(fine.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let e1 = err(0.02);
        let e2 = err(0.005);
        let ratio = e1 / e2;
        assert!(
            ratio >= tol::SECOND_ORDER_RATIO.0 && ratio <= tol::SECOND_ORDER_RATIO.1,
            "ratio {ratio} (errors {e1:.3e} / {e2:.3e})"
        );
    }

    #[test]
    fn aliasing_guard_flags_coarse_steps() {
        let g = grid();
        assert!(aliasing_guard_ok(&g, &Potential::harmonic(1.0), 1e-3).unwrap());
        assert!(!aliasing_guard_ok(&g, &Potential::harmonic(1.0), 1.0).unwrap());
        // quartic forces are huge at the grid edge; the guard reports it
        assert!(!aliasing_guard_ok(&g, &Potential::quartic(1.0, 0.5), 0.02).unwrap());
    }

    #[test]
    fn evolve_validates_its_config() {
        let s = packet(0.0, 0.0);
        let v = Potential::Free;
        assert!(matches!(
            evolve(&s, &v, &StepperConfig::new(0.0, 10, 1)),
            Err(PropagateError::NonFiniteDt)
        ));
        assert!(matches!(
            evolve(&s, &v, &StepperConfig::new(0.1, 0, 1)),
            Err(PropagateError::ZeroSteps)
        ));
        assert!(matches!(
            evolve(&s, &v, &StepperConfig::new(0.1, 10, 0)),
            Err(PropagateError::ZeroRecordEvery)
        ));
    }

    #[test]
    fn fused_blocks_match_single_steps() {
        let s = packet(0.7, -0.3);
        let v = Potential::quartic(0.5, 0.2);
        let engine = SplitEngine::liouville(s.grid(), &v, 1e-3).unwrap();
        let mut manual = s.clone();
        for _ in 0..7 {
            manual = engine.step(&manual).unwrap();
        }
        let tr = engine.evolve(&s, &StepperConfig::new(1e-3, 7, 7)).unwrap();
        let diff: f64 = manual
            .amp()
            .iter()
            .zip(tr.final_state.amp().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12, "fusion drift {diff}");
    }
}

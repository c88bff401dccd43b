//! Kappa-interpolated quantum-classical dynamics on the phase grid.
//!
//! The generator is `hbar p lambda_q + (1/kappa) (U(q - hbar kappa
//! lambda_p / 2) - U(q + hbar kappa lambda_p / 2))` acting through
//! `i hbar d/dt`. Its kinetic piece is the classical one; its potential
//! piece is diagonal in (q, lambda_p) where it multiplies by a pure phase,
//! so the same Strang machinery used for classical transport applies at
//! every kappa. At kappa = 0 the difference quotient has a removable
//! singularity and the analytic limit `-U'(q) lambda_p` is installed
//! instead, which makes the classical branch share the classical stepper's
//! phase tables verbatim. At kappa = 1 the flow is the quantum Moyal flow
//! and the (q, p) amplitude is the Wigner function of the evolving state.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::HybridError;
use crate::grid::{PhaseGrid, Representation};
use crate::potential::Potential;
use crate::propagate::{SplitEngine, StepperConfig, Trajectory};
use crate::state::{expectation_fn, inner_product, KvnState};
use crate::transform::{apply_multiplier_in, to_representation};

/// Interpolation parameters: kappa = 1 is quantum, kappa = 0 classical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridParams {
    hbar: f64,
    kappa: f64,
}

impl HybridParams {
    pub fn new(hbar: f64, kappa: f64) -> Result<Self, HybridError> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(HybridError::BadHbar(hbar));
        }
        if !(0.0..=1.0).contains(&kappa) || kappa.is_nan() {
            return Err(HybridError::KappaOutOfRange(kappa));
        }
        Ok(HybridParams { hbar, kappa })
    }

    pub fn classical(hbar: f64) -> Result<Self, HybridError> {
        Self::new(hbar, 0.0)
    }

    pub fn quantum(hbar: f64) -> Result<Self, HybridError> {
        Self::new(hbar, 1.0)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

/// Strang stepper for the interpolated generator.
pub struct HybridStepper {
    engine: SplitEngine,
    params: HybridParams,
}

impl HybridStepper {
    pub fn new(
        grid: &PhaseGrid,
        potential: &Potential,
        params: HybridParams,
        dt: f64,
    ) -> Result<Self, HybridError> {
        let engine = build_engine(grid, potential, params, dt)?;
        Ok(HybridStepper { engine, params })
    }

    pub fn params(&self) -> HybridParams {
        self.params
    }

    pub fn aliasing_ok(&self) -> bool {
        self.engine.aliasing_ok()
    }

    pub fn step(&self, s: &KvnState) -> Result<KvnState, HybridError> {
        Ok(self.engine.step(s)?)
    }

    pub fn evolve(&self, s0: &KvnState, cfg: &StepperConfig) -> Result<Trajectory, HybridError> {
        Ok(self.engine.evolve(s0, cfg)?)
    }
}

fn build_engine(
    grid: &PhaseGrid,
    potential: &Potential,
    params: HybridParams,
    dt: f64,
) -> Result<SplitEngine, HybridError> {
    if !potential.is_analytic() {
        return Err(HybridError::TabulatedUnsupported);
    }
    let engine = if params.kappa == 0.0 {
        SplitEngine::liouville(grid, potential, dt)?
    } else {
        let hk = params.hbar * params.kappa;
        let shift = 0.5 * hk;
        SplitEngine::from_potential_phase(grid, dt, |j, k| {
            let q = grid.q_at(j);
            let lam = grid.lambda_p_at(k);
            let du = potential.value(q - shift * lam) - potential.value(q + shift * lam);
            -0.5 * dt * du / hk
        })?
    };
    Ok(engine)
}

/// One Strang step of the interpolated flow.
pub fn hqc_step(
    s: &KvnState,
    potential: &Potential,
    params: HybridParams,
    dt: f64,
) -> Result<KvnState, HybridError> {
    HybridStepper::new(s.grid(), potential, params, dt)?.step(s)
}

/// Expectation of `q_Q = q - (hbar kappa / 2) lambda_p`, evaluated in the
/// representation where both terms multiply.
pub fn q_quantum_expectation(s: &KvnState, params: HybridParams) -> Result<f64, HybridError> {
    let c = 0.5 * params.hbar * params.kappa;
    let t = to_representation(s, Representation::QLp);
    expectation_fn(&t, |q, lam| q - c * lam).map_err(HybridError::State)
}

/// Expectation of `p_Q = p + (hbar kappa / 2) lambda_q`.
pub fn p_quantum_expectation(s: &KvnState, params: HybridParams) -> Result<f64, HybridError> {
    let c = 0.5 * params.hbar * params.kappa;
    let t = to_representation(s, Representation::LqP);
    expectation_fn(&t, |lam, p| p + c * lam).map_err(HybridError::State)
}

/// Expectation of `U'(q_Q)`: `q_Q` multiplies in (q, lambda_p), so the
/// derivative of the potential is evaluated at the shifted argument there.
pub fn force_quantum_expectation(
    s: &KvnState,
    potential: &Potential,
    params: HybridParams,
) -> Result<f64, HybridError> {
    if !potential.is_analytic() {
        return Err(HybridError::TabulatedUnsupported);
    }
    let c = 0.5 * params.hbar * params.kappa;
    let t = to_representation(s, Representation::QLp);
    expectation_fn(&t, |q, lam| potential.derivative(q - c * lam)).map_err(HybridError::State)
}

/// Apply the operator `q_Q` to a state.
pub fn apply_q_quantum(s: &KvnState, params: HybridParams) -> KvnState {
    let c = 0.5 * params.hbar * params.kappa;
    apply_multiplier_in(s, Representation::QLp, |q, lam| {
        Complex64::from(q - c * lam)
    })
}

/// Apply the operator `p_Q` to a state.
pub fn apply_p_quantum(s: &KvnState, params: HybridParams) -> KvnState {
    let c = 0.5 * params.hbar * params.kappa;
    apply_multiplier_in(s, Representation::LqP, |lam, p| {
        Complex64::from(p + c * lam)
    })
}

/// `<psi| [q_Q, p_Q] |psi>`, which the operator algebra fixes at
/// `i hbar kappa <psi|psi>`.
pub fn commutator_witness(s: &KvnState, params: HybridParams) -> Result<Complex64, HybridError> {
    let qp = apply_q_quantum(&apply_p_quantum(s, params), params);
    let pq = apply_p_quantum(&apply_q_quantum(s, params), params);
    let a = inner_product(s, &qp).map_err(HybridError::State)?;
    let b = inner_product(s, &pq).map_err(HybridError::State)?;
    Ok(a - b)
}

/// Pure-state density matrix rho(x, x') = psi(x) conj(psi(x')) on a uniform
/// position grid, or any hermitian unit-trace matrix supplied directly.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    x_min: f64,
    dx: f64,
    rho: Array2<Complex64>,
}

impl DensityMatrix {
    pub fn new(rho: Array2<Complex64>, x_min: f64, dx: f64) -> Result<Self, HybridError> {
        let n = rho.dim().0;
        if rho.dim().1 != n {
            return Err(HybridError::SizeMismatch {
                expected: n,
                found: rho.dim().1,
            });
        }
        let mut herm_defect: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                herm_defect = herm_defect.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
                scale = scale.max(rho[(i, j)].norm());
            }
        }
        if herm_defect > 1e-10 * scale.max(1.0) {
            return Err(HybridError::NotHermitian(herm_defect));
        }
        let dm = DensityMatrix { x_min, dx, rho };
        let tr = dm.trace();
        if (tr - 1.0).abs() > 1e-8 {
            return Err(HybridError::BadTrace(tr));
        }
        Ok(dm)
    }

    /// rho = |psi><psi| for a normalized wave function sampled on the grid.
    pub fn from_wave_function(
        psi: &[Complex64],
        x_min: f64,
        dx: f64,
    ) -> Result<Self, HybridError> {
        let n2: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
        if (n2 - 1.0).abs() > 1e-8 {
            return Err(HybridError::Unnormalized(n2));
        }
        let n = psi.len();
        let rho = Array2::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj());
        DensityMatrix::new(rho, x_min, dx)
    }

    pub fn n(&self) -> usize {
        self.rho.dim().0
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn rho(&self) -> &Array2<Complex64> {
        &self.rho
    }

    /// Continuum-weighted trace `sum_j rho_jj dx`.
    pub fn trace(&self) -> f64 {
        (0..self.n()).map(|j| self.rho[(j, j)].re).sum::<f64>() * self.dx
    }

    /// tr(rho^2) with the same weighting; 1 for a pure state.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dx * self.dx
    }
}

/// Real phase-space field on a QP grid, the (q, p) amplitude of a hybrid
/// state. May be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    pub grid: PhaseGrid,
    pub values: Array2<f64>,
}

impl WignerField {
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume(Representation::QP)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Interpret the field as a QP state for phase-space propagation.
    pub fn into_state(self) -> KvnState {
        let amp = self.values.mapv(Complex64::from);
        KvnState::new(self.grid, Representation::QP, amp).expect("real field is finite")
    }
}

/// Phase grid matched to one position grid: the q axis is the position
/// axis and the p axis is its Fourier dual scaled by `hbar * kappa`.
pub fn wigner_grid(
    n: usize,
    x_min: f64,
    x_max: f64,
    hbar_kappa: f64,
) -> Result<PhaseGrid, crate::error::GridError> {
    let dx = (x_max - x_min) / n as f64;
    let dp = std::f64::consts::PI * hbar_kappa / (n as f64 * dx);
    let p_half = 0.5 * n as f64 * dp;
    PhaseGrid::new(n, n, (x_min, x_max), (-p_half, p_half))
}

fn check_wigner_grid(
    grid: &PhaseGrid,
    dm: &DensityMatrix,
    hbar_kappa: f64,
) -> Result<(), HybridError> {
    if grid.n_q() != dm.n() {
        return Err(HybridError::SizeMismatch {
            expected: grid.n_q(),
            found: dm.n(),
        });
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-9);
    if !close(grid.q_min(), dm.x_min()) || !close(grid.dq(), dm.dx()) {
        return Err(HybridError::IncompatibleGrid(format!(
            "q axis [{}, dq {}] vs position axis [{}, dx {}]",
            grid.q_min(),
            grid.dq(),
            dm.x_min(),
            dm.dx()
        )));
    }
    let dp_expect = std::f64::consts::PI * hbar_kappa / (dm.n() as f64 * dm.dx());
    if !close(grid.dp(), dp_expect) || !close(grid.p_min(), -0.5 * dm.n() as f64 * dp_expect) {
        return Err(HybridError::IncompatibleGrid(format!(
            "p axis spacing {} vs scaled dual {}",
            grid.dp(),
            dp_expect
        )));
    }
    Ok(())
}

/// Phase-space transform of a density matrix:
/// `W(q, p) = (1 / 2 pi hbar kappa) Integral dy rho(q - y/2, q + y/2)
/// exp(i p y / hbar kappa)`,
/// discretized with y on the doubled-step offset grid. Offsets leaving the
/// position box read zero: wrapping them would fold the matrix diagonal
/// into a ghost copy of the state at the periodic seam. Zero extension
/// keeps the offsets in conjugate pairs, so the result stays real, and the
/// zero-offset term alone carries the integral, so it still equals the
/// trace exactly.
pub fn wigner_from_density(
    dm: &DensityMatrix,
    params: HybridParams,
    grid: &PhaseGrid,
) -> Result<WignerField, HybridError> {
    if params.kappa == 0.0 {
        return Err(HybridError::KappaZero);
    }
    let hk = params.hbar * params.kappa;
    check_wigner_grid(grid, dm, hk)?;
    let n = dm.n();
    let dy = 2.0 * dm.dx();
    let scale = dy / (std::f64::consts::TAU * hk);

    let mut planner = FftPlanner::<f64>::new();
    let inv = planner.plan_fft_inverse(n);

    let mut values = Array2::zeros((n, n));
    let mut max_im: f64 = 0.0;
    let mut max_re: f64 = 0.0;
    let mut lane: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for (m, slot) in lane.iter_mut().enumerate() {
            // signed offset in units of dx
            let off = if m < n / 2 { m as isize } else { m as isize - n as isize };
            let a = j as isize - off;
            let b = j as isize + off;
            *slot = if a >= 0 && a < n as isize && b >= 0 && b < n as isize {
                dm.rho()[(a as usize, b as usize)]
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        inv.process(&mut lane);
        for (k, v) in lane.iter().enumerate() {
            // transform index k carries p = p_min + ((k + n/2) % n) dp
            let col = (k + n / 2) % n;
            let w = v * scale;
            max_im = max_im.max(w.im.abs());
            max_re = max_re.max(w.re.abs());
            values[(j, col)] = w.re;
        }
    }
    if max_im > 1e-10 * max_re.max(1.0) {
        return Err(HybridError::ImaginaryResidue(max_im));
    }
    let field = WignerField {
        grid: *grid,
        values,
    };
    let defect = (field.integral() - dm.trace()).abs();
    if defect > 1e-8 {
        return Err(HybridError::BadTrace(field.integral()));
    }
    Ok(field)
}

/// Smallest value and integrated negative part of a phase-space field.
pub fn negativity(w: &WignerField) -> (f64, f64) {
    let min = w.min();
    let mass = -w
        .values
        .iter()
        .map(|&v| v.min(0.0))
        .sum::<f64>()
        * w.grid.cell_volume(Representation::QP);
    (min, mass)
}

/// Split-operator propagation of a 1-D quantum wave function, used as the
/// independent reference for the kappa = 1 flow. Kinetic factor
/// `exp(-i dt hbar k^2 / 2)` in momentum space, potential factor
/// `exp(-i dt V(x) / hbar)` in position space, Strang ordering.
pub struct SchrodingerOracle {
    x_min: f64,
    dx: f64,
    v: Vec<f64>,
    hbar: f64,
}

impl SchrodingerOracle {
    pub fn new(
        n: usize,
        x_min: f64,
        dx: f64,
        potential: &Potential,
        hbar: f64,
    ) -> Result<Self, HybridError> {
        if !potential.is_analytic() {
            return Err(HybridError::TabulatedUnsupported);
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(HybridError::BadHbar(hbar));
        }
        let v = (0..n)
            .map(|j| potential.value(x_min + j as f64 * dx))
            .collect();
        Ok(SchrodingerOracle {
            x_min,
            dx,
            v,
            hbar,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Evolve `psi0` by `steps` of `dt`, returning snapshots every
    /// `record_every` steps (always including t = 0 and the final step).
    pub fn evolve(
        &self,
        psi0: &[Complex64],
        dt: f64,
        steps: usize,
        record_every: usize,
    ) -> Result<Vec<(f64, Vec<Complex64>)>, HybridError> {
        let n = self.v.len();
        if psi0.len() != n {
            return Err(HybridError::SizeMismatch {
                expected: n,
                found: psi0.len(),
            });
        }
        let n2: f64 = psi0.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dx;
        if (n2 - 1.0).abs() > 1e-8 {
            return Err(HybridError::Unnormalized(n2));
        }
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let dk = std::f64::consts::TAU / (n as f64 * self.dx);
        let kin: Vec<Complex64> = (0..n)
            .map(|k| {
                let ks = if k < n / 2 {
                    k as f64 * dk
                } else {
                    (k as f64 - n as f64) * dk
                };
                Complex64::from_polar(1.0 / n as f64, -dt * self.hbar * ks * ks / 2.0)
            })
            .collect();
        let pot_half: Vec<Complex64> = self
            .v
            .iter()
            .map(|&v| Complex64::from_polar(1.0, -0.5 * dt * v / self.hbar))
            .collect();

        let mut psi: Vec<Complex64> = psi0.to_vec();
        let mut out = vec![(0.0, psi.clone())];
        for step in 0..steps {
            for (z, ph) in psi.iter_mut().zip(&pot_half) {
                *z *= ph;
            }
            fft.process(&mut psi);
            for (z, ph) in psi.iter_mut().zip(&kin) {
                *z *= ph;
            }
            inv.process(&mut psi);
            for (z, ph) in psi.iter_mut().zip(&pot_half) {
                *z *= ph;
            }
            let done = step + 1;
            if done % record_every == 0 || done == steps {
                if !psi.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                    return Err(HybridError::State(crate::error::StateError::NonFinite));
                }
                out.push((done as f64 * dt, psi.clone()));
            }
        }
        Ok(out)
    }

    /// Density-matrix trajectory of a pure-state evolution.
    pub fn density_trajectory(
        &self,
        psi0: &[Complex64],
        dt: f64,
        steps: usize,
        record_every: usize,
    ) -> Result<Vec<(f64, DensityMatrix)>, HybridError> {
        self.evolve(psi0, dt, steps, record_every)?
            .into_iter()
            .map(|(t, psi)| {
                DensityMatrix::from_wave_function(&psi, self.x_min, self.dx).map(|dm| (t, dm))
            })
            .collect()
    }
}

/// Normalized harmonic-oscillator coherent state on a position grid:
/// ground width for unit mass and frequency, displaced to (q0, p0).
pub fn coherent_wave_function(
    n: usize,
    x_min: f64,
    dx: f64,
    q0: f64,
    p0: f64,
    hbar: f64,
) -> Vec<Complex64> {
    let mut psi: Vec<Complex64> = (0..n)
        .map(|j| {
            let x = x_min + j as f64 * dx;
            let arg = -(x - q0) * (x - q0) / (2.0 * hbar);
            Complex64::from_polar(arg.exp(), p0 * x / hbar)
        })
        .collect();
    let norm: f64 = (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt();
    for z in &mut psi {
        *z /= norm;
    }
    psi
}

/// Even two-packet superposition `phi0(x - a) + phi0(x + a)`, normalized.
pub fn cat_wave_function(n: usize, x_min: f64, dx: f64, a: f64, hbar: f64) -> Vec<Complex64> {
    let mut psi: Vec<Complex64> = (0..n)
        .map(|j| {
            let x = x_min + j as f64 * dx;
            let l = (-(x - a) * (x - a) / (2.0 * hbar)).exp();
            let r = (-(x + a) * (x + a) / (2.0 * hbar)).exp();
            Complex64::from(l + r)
        })
        .collect();
    let norm: f64 = (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt();
    for z in &mut psi {
        *z /= norm;
    }
    psi
}

/// Extract the real phase-space field carried by a QP hybrid state.
pub fn wigner_field_from_state(s: &KvnState) -> Result<WignerField, HybridError> {
    if s.rep() != Representation::QP {
        return Err(HybridError::State(
            crate::error::StateError::WrongRepresentation {
                expected: Representation::QP,
                found: s.rep(),
            },
        ));
    }
    let mut max_im: f64 = 0.0;
    let mut max_re: f64 = 0.0;
    for z in s.amp().iter() {
        max_im = max_im.max(z.im.abs());
        max_re = max_re.max(z.re.abs());
    }
    if max_im > 1e-8 * max_re.max(1.0) {
        return Err(HybridError::ImaginaryResidue(max_im));
    }
    Ok(WignerField {
        grid: *s.grid(),
        values: s.amp().mapv(|z| z.re),
    })
}

/// Minimum-value histories of the classical and quantum flows started from
/// the same positive phase-space Gaussian.
#[derive(Debug, Clone)]
pub struct PositivityReport {
    pub times: Vec<f64>,
    pub min_classical: Vec<f64>,
    pub min_quantum: Vec<f64>,
    /// Smallest value the classical run ever takes.
    pub classical_floor: f64,
    /// Smallest value the quantum run ever takes.
    pub quantum_min: f64,
    /// First recorded time at which the quantum run crossed the
    /// negativity threshold, if it did.
    pub quantum_crossing_time: Option<f64>,
    /// Threshold used for the crossing, relative to the initial maximum.
    pub threshold: f64,
}

/// Evolve the same initial field at kappa = 0 and kappa = 1 and record the
/// pointwise minima. Classical transport preserves the sign of the data up
/// to interpolation ringing; the quantum flow is free to push below zero.
pub fn positivity_report(
    potential: &Potential,
    initial: &KvnState,
    hbar: f64,
    horizon: f64,
    dt: f64,
    record_every: usize,
) -> Result<PositivityReport, HybridError> {
    let w0 = wigner_field_from_state(initial)?;
    let threshold = -crate::tolerances::NEGATIVITY_THRESHOLD_REL * w0.max();
    let steps = (horizon / dt).round().max(1.0) as usize;
    let cfg = StepperConfig::new(dt, steps, record_every);

    let run = |kappa: f64| -> Result<(Vec<f64>, Vec<f64>), HybridError> {
        let params = HybridParams::new(hbar, kappa)?;
        let stepper = HybridStepper::new(initial.grid(), potential, params, dt)?;
        let tr = stepper.evolve(initial, &cfg)?;
        let mins = tr
            .snapshots
            .iter()
            .map(|s| s.amp().iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
            .collect();
        Ok((tr.times, mins))
    };

    let (times, min_classical) = run(0.0)?;
    let (_, min_quantum) = run(1.0)?;
    let classical_floor = min_classical.iter().cloned().fold(f64::INFINITY, f64::min);
    let quantum_min = min_quantum.iter().cloned().fold(f64::INFINITY, f64::min);
    let quantum_crossing_time = times
        .iter()
        .zip(&min_quantum)
        .find(|(_, &m)| m < threshold)
        .map(|(&t, _)| t);
    Ok(PositivityReport {
        times,
        min_classical,
        min_quantum,
        classical_floor,
        quantum_min,
        quantum_crossing_time,
        threshold,
    })
}

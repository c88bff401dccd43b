//! Unitary changes of representation and spectral derivatives.
//!
//! The transform of a wave function onto a dual (lambda) axis uses the
//! kernel `exp(-i x lambda) / sqrt(2*pi)`, so the operator `-i d/dx` acts as
//! multiplication by `lambda` in the transformed representation, and the
//! split-propagator sub-flows below are multiplications by
//! `exp(+i (dt/2) V'(q) lambda_p)` and `exp(-i dt p lambda_q)`. The inverse
//! uses the conjugate kernel. On the grid the kernel becomes an FFT with the
//! axis-offset phase `exp(-i x_min lambda_k)` and the continuum
//! `1/sqrt(2*pi)` absorbed into the cell weights, which makes every
//! transform exactly unitary and every round trip the identity up to
//! rounding.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::StateError;
use crate::grid::{PhaseGrid, Representation};
use crate::state::KvnState;

const SQRT_TAU: f64 = 2.506628274631000502415765284811; // sqrt(2*pi)

/// One axis worth of forward/backward transform machinery.
pub(crate) struct AxisTransform {
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
    /// scale * exp(-i x_min lambda_k), applied after the forward FFT.
    to_dual_phase: Vec<Complex64>,
    /// scale * exp(+i x_min lambda_k), applied before the inverse FFT.
    from_dual_phase: Vec<Complex64>,
}

impl AxisTransform {
    fn new(n: usize, x_min: f64, dx: f64, dlambda: f64, planner: &mut FftPlanner<f64>) -> Self {
        let to_scale = dx / SQRT_TAU;
        let from_scale = dlambda / SQRT_TAU;
        let lambda = |k: usize| {
            if k < n / 2 {
                k as f64 * dlambda
            } else {
                (k as f64 - n as f64) * dlambda
            }
        };
        let to_dual_phase = (0..n)
            .map(|k| Complex64::from_polar(to_scale, -x_min * lambda(k)))
            .collect();
        let from_dual_phase = (0..n)
            .map(|k| Complex64::from_polar(from_scale, x_min * lambda(k)))
            .collect();
        AxisTransform {
            fft_fwd: planner.plan_fft_forward(n),
            fft_inv: planner.plan_fft_inverse(n),
            to_dual_phase,
            from_dual_phase,
        }
    }

    fn to_dual_lane(&self, lane: &mut [Complex64]) {
        self.fft_fwd.process(lane);
        for (z, ph) in lane.iter_mut().zip(&self.to_dual_phase) {
            *z *= ph;
        }
    }

    fn from_dual_lane(&self, lane: &mut [Complex64]) {
        for (z, ph) in lane.iter_mut().zip(&self.from_dual_phase) {
            *z *= ph;
        }
        self.fft_inv.process(lane);
    }
}

/// Cached FFT plans and offset phases for both axes of one grid.
pub struct SpectralPlan {
    grid: PhaseGrid,
    q_axis: AxisTransform,
    p_axis: AxisTransform,
}

/// Run `f` over every axis-1 lane (contiguous rows) in parallel.
fn for_each_row<F>(amp: &mut Array2<Complex64>, f: F)
where
    F: Fn(&mut [Complex64]) + Sync,
{
    amp.axis_iter_mut(Axis(0))
        .into_par_iter()
        .for_each(|mut row| f(row.as_slice_mut().expect("rows are contiguous")));
}

/// Run `f` over every axis-0 lane (strided columns) in parallel, staging
/// each through a contiguous scratch buffer.
fn for_each_col<F>(amp: &mut Array2<Complex64>, f: F)
where
    F: Fn(&mut [Complex64]) + Sync,
{
    amp.axis_iter_mut(Axis(1)).into_par_iter().for_each(|mut col| {
        let mut buf: Vec<Complex64> = col.iter().copied().collect();
        f(&mut buf);
        for (c, b) in col.iter_mut().zip(&buf) {
            *c = *b;
        }
    });
}

impl SpectralPlan {
    pub fn new(grid: &PhaseGrid) -> Self {
        let mut planner = FftPlanner::new();
        SpectralPlan {
            grid: *grid,
            q_axis: AxisTransform::new(
                grid.n_q(),
                grid.q_min(),
                grid.dq(),
                grid.dlambda_q(),
                &mut planner,
            ),
            p_axis: AxisTransform::new(
                grid.n_p(),
                grid.p_min(),
                grid.dp(),
                grid.dlambda_p(),
                &mut planner,
            ),
        }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    /// q -> lambda_q along axis 0.
    pub fn q_to_dual(&self, amp: &mut Array2<Complex64>) {
        for_each_col(amp, |lane| self.q_axis.to_dual_lane(lane));
    }

    /// lambda_q -> q along axis 0.
    pub fn q_from_dual(&self, amp: &mut Array2<Complex64>) {
        for_each_col(amp, |lane| self.q_axis.from_dual_lane(lane));
    }

    /// p -> lambda_p along axis 1.
    pub fn p_to_dual(&self, amp: &mut Array2<Complex64>) {
        for_each_row(amp, |lane| self.p_axis.to_dual_lane(lane));
    }

    /// lambda_p -> p along axis 1.
    pub fn p_from_dual(&self, amp: &mut Array2<Complex64>) {
        for_each_row(amp, |lane| self.p_axis.from_dual_lane(lane));
    }

    /// Move a raw field between representations in place.
    pub fn convert(&self, amp: &mut Array2<Complex64>, from: Representation, to: Representation) {
        match (from.axis0_dual(), to.axis0_dual()) {
            (false, true) => self.q_to_dual(amp),
            (true, false) => self.q_from_dual(amp),
            _ => {}
        }
        match (from.axis1_dual(), to.axis1_dual()) {
            (false, true) => self.p_to_dual(amp),
            (true, false) => self.p_from_dual(amp),
            _ => {}
        }
    }
}

/// Express a state in another representation. Unitary: the norm is
/// preserved to machine precision, and any closed loop of transforms is the
/// identity to the same accuracy.
pub fn to_representation(s: &KvnState, target: Representation) -> KvnState {
    if s.rep() == target {
        return s.clone();
    }
    let plan = SpectralPlan::new(s.grid());
    to_representation_with(&plan, s, target)
}

/// Same as [`to_representation`] with a caller-held plan, for hot loops.
pub fn to_representation_with(
    plan: &SpectralPlan,
    s: &KvnState,
    target: Representation,
) -> KvnState {
    let from = s.rep();
    let mut out = s.clone();
    plan.convert(out.amp_mut(), from, target);
    out.with_rep(target)
}

/// Multiply by a function of the target representation's coordinates:
/// transform there, scale each cell, transform back. This is how operators
/// diagonal in some representation act on a state held in another.
pub fn apply_multiplier_in<F>(s: &KvnState, rep: Representation, f: F) -> KvnState
where
    F: Fn(f64, f64) -> Complex64,
{
    let plan = SpectralPlan::new(s.grid());
    let home = s.rep();
    let mut t = to_representation_with(&plan, s, rep);
    let a0 = t.grid().axis0_values(rep);
    let a1 = t.grid().axis1_values(rep);
    for ((j, m), z) in t.amp_mut().indexed_iter_mut() {
        *z *= f(a0[j], a1[m]);
    }
    to_representation_with(&plan, &t, home)
}

/// Dual-frequency multipliers for a spectral derivative: `i lambda_k`, with
/// the unpaired Nyquist mode zeroed so differentiation commutes with
/// complex conjugation on the grid.
fn derivative_multipliers(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    (0..n)
        .map(|k| {
            if k == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, values[k])
            }
        })
        .collect()
}

/// d/dq along axis 0, for states whose axis 0 is the primal q coordinate
/// (QP or QLp).
pub fn d_dq(s: &KvnState) -> Result<KvnState, StateError> {
    if s.rep().axis0_dual() {
        return Err(StateError::WrongRepresentation {
            expected: Representation::QP,
            found: s.rep(),
        });
    }
    let plan = SpectralPlan::new(s.grid());
    let mul = derivative_multipliers(&s.grid().lambda_q_values());
    let mut out = s.clone();
    plan.q_to_dual(out.amp_mut());
    for ((k, _), z) in out.amp_mut().indexed_iter_mut() {
        *z *= mul[k];
    }
    plan.q_from_dual(out.amp_mut());
    Ok(out)
}

/// d/dp along axis 1, for states whose axis 1 is the primal p coordinate
/// (QP or LqP).
pub fn d_dp(s: &KvnState) -> Result<KvnState, StateError> {
    if s.rep().axis1_dual() {
        return Err(StateError::WrongRepresentation {
            expected: Representation::QP,
            found: s.rep(),
        });
    }
    let plan = SpectralPlan::new(s.grid());
    let mul = derivative_multipliers(&s.grid().lambda_p_values());
    let mut out = s.clone();
    plan.p_to_dual(out.amp_mut());
    for ((_, k), z) in out.amp_mut().indexed_iter_mut() {
        *z *= mul[k];
    }
    plan.p_from_dual(out.amp_mut());
    Ok(out)
}

/// d/dlambda_p along axis 1, for states whose axis 1 is the dual lambda_p
/// coordinate (QLp or LqLp). The dual variable of lambda_p is p itself, so
/// the multiplier is `-i p_m` on the primal side.
pub fn d_dlambda_p(s: &KvnState) -> Result<KvnState, StateError> {
    if !s.rep().axis1_dual() {
        return Err(StateError::WrongRepresentation {
            expected: Representation::QLp,
            found: s.rep(),
        });
    }
    let plan = SpectralPlan::new(s.grid());
    let p = s.grid().p_values();
    let mut out = s.clone();
    plan.p_from_dual(out.amp_mut());
    for ((_, m), z) in out.amp_mut().indexed_iter_mut() {
        *z *= Complex64::new(0.0, -p[m]);
    }
    plan.p_to_dual(out.amp_mut());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::state::{expectation_fn, gaussian_state, GaussianSpec, PhaseSpec};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    fn rel_diff(a: &KvnState, b: &KvnState) -> f64 {
        let num: f64 = a
            .amp()
            .iter()
            .zip(b.amp().iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        let den: f64 = a.amp().iter().map(|x| x.norm_sqr()).sum();
        (num / den).sqrt()
    }

    /// Direct O(n^2) summation of the `exp(-i p lambda)` kernel along axis 1.
    fn slow_p_to_dual(s: &KvnState) -> Array2<Complex64> {
        let g = s.grid();
        let (nq, np) = g.shape();
        let mut out = Array2::zeros((nq, np));
        for j in 0..nq {
            for k in 0..np {
                let lam = g.lambda_p_at(k);
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..np {
                    acc += s.amp()[(j, m)] * Complex64::from_polar(1.0, -g.p_at(m) * lam);
                }
                out[(j, k)] = acc * (g.dp() / SQRT_TAU);
            }
        }
        out
    }

    #[test]
    fn matches_direct_summation_of_the_kernel() {
        let g = make_grid(16, 16, (-4.0, 4.0), (-3.0, 5.0)).unwrap();
        let s = gaussian_state(
            g,
            GaussianSpec {
                center_p: 1.0,
                phase: PhaseSpec::Linear { a: 0.4, b: 0.9 },
                ..GaussianSpec::default()
            },
        )
        .unwrap();
        let fast = to_representation(&s, Representation::QLp);
        let slow = slow_p_to_dual(&s);
        let err: f64 = fast
            .amp()
            .iter()
            .zip(slow.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "kernel mismatch {err}");
    }

    #[test]
    fn one_hot_momentum_column_becomes_a_pure_phase() {
        let g = make_grid(16, 16, (-4.0, 4.0), (-4.0, 4.0)).unwrap();
        let m0 = 11; // p0 = -4 + 11 * 0.5 = 1.5
        let p0 = g.p_at(m0);
        let mut amp = Array2::zeros(g.shape());
        for j in 0..g.n_q() {
            amp[(j, m0)] = Complex64::new(1.0, 0.0);
        }
        let s = KvnState::new(g, Representation::QP, amp).unwrap();
        let t = to_representation(&s, Representation::QLp);
        let scale = g.dp() / SQRT_TAU;
        for k in 0..g.n_p() {
            let expected = Complex64::from_polar(scale, -p0 * g.lambda_p_at(k));
            let got = t.amp()[(0, k)];
            assert_abs_diff_eq!(got.re, expected.re, epsilon = 1e-13);
            assert_abs_diff_eq!(got.im, expected.im, epsilon = 1e-13);
            // constant modulus across the dual axis
            assert_abs_diff_eq!(got.norm(), scale, epsilon = 1e-13);
        }
    }

    #[test]
    fn gaussian_is_self_dual_with_unit_width() {
        // |psi|^2 widths (sq, sp) = (1/sqrt2, 1/sqrt2) amplitude
        // exp(-(q^2+p^2)/2); its lambda_p profile is again exp(-lambda^2/2).
        let g = make_grid(64, 64, (-10.0, 10.0), (-10.0, 10.0)).unwrap();
        let s = KvnState::from_fn(g, |q, p| Complex64::from((-(q * q + p * p) / 2.0).exp()));
        let t = to_representation(&s, Representation::QLp);
        let norm = |x: f64| x * x;
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..g.n_p() {
            let lam = g.lambda_p_at(k);
            let w = t.amp()[(g.n_q() / 2, k)].norm_sqr();
            num += norm(lam) * w;
            den += w;
        }
        // second moment of exp(-lambda^2) is 1/2, i.e. width 1/sqrt2 in
        // density terms, width 1 at the amplitude level
        assert_abs_diff_eq!(num / den, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn transforms_preserve_norm_and_round_trip() {
        let g = make_grid(32, 48, (-6.0, 6.0), (-5.0, 7.0)).unwrap();
        let s = gaussian_state(
            g,
            GaussianSpec {
                center_q: 0.5,
                center_p: -1.0,
                phase: PhaseSpec::Bilinear { c: 0.8 },
                ..GaussianSpec::default()
            },
        )
        .unwrap();
        for &a in &Representation::ALL {
            let sa = to_representation(&s, a);
            assert_abs_diff_eq!(sa.norm_sq(), 1.0, epsilon = 1e-12);
            for &b in &Representation::ALL {
                if a == b {
                    continue;
                }
                let sb = to_representation(&sa, b);
                assert_abs_diff_eq!(sb.norm_sq(), 1.0, epsilon = 1e-12);
                let back = to_representation(&sb, a);
                assert!(rel_diff(&sa, &back) < 1e-12);
            }
        }
    }

    #[test]
    fn lambda_p_expectation_agrees_with_spectral_momentum_derivative() {
        // <lambda_p> in QLp against <-i d/dp> in QP; exact conjugate pair.
        let g = make_grid(64, 64, (-8.0, 8.0), (-8.0, 8.0)).unwrap();
        let mut s = KvnState::from_fn(g, |q, p| {
            Complex64::from_polar((-(q * q + p * p) / 4.0).exp(), 0.4 * p + 0.2 * p * p)
        });
        s.normalize().unwrap();

        let qlp = to_representation(&s, Representation::QLp);
        let lhs = expectation_fn(&qlp, |_, lam| lam).unwrap();

        let ds = d_dp(&s).unwrap();
        let rhs = crate::state::inner_product(&s, &ds.scaled(Complex64::new(0.0, -1.0))).unwrap();
        assert_abs_diff_eq!(rhs.im, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(lhs, rhs.re, epsilon = 1e-10);
        // the packet's mean phase gradient is 0.4 + 0.4 <p> = 0.4
        assert_abs_diff_eq!(lhs, 0.4, epsilon = 1e-6);
    }

    #[test]
    fn dual_derivative_inverts_the_kernel_sign() {
        // d/dlambda_p of the transform of f(p) pulls down -i p.
        let g = make_grid(32, 64, (-6.0, 6.0), (-8.0, 8.0)).unwrap();
        let mut s = KvnState::from_fn(g, |q, p| Complex64::from((-(q * q + p * p) / 3.0).exp()));
        s.normalize().unwrap();
        let qlp = to_representation(&s, Representation::QLp);
        let d = d_dlambda_p(&qlp).unwrap();

        // reference: multiply by -i p in QP, then transform
        let mut r = s.clone();
        for ((_, m), z) in r.amp_mut().indexed_iter_mut() {
            *z *= Complex64::new(0.0, -g.p_at(m));
        }
        let r = to_representation(&r, Representation::QLp);
        assert!(rel_diff(&d, &r) < 1e-12);
    }
}

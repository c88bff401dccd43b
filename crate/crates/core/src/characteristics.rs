//! Closed-form transport along classical characteristics, used as an
//! independent reference for the split stepper.
//!
//! For the free particle the backward flow map is (q - p t, p), a per-row
//! translation. For the harmonic oscillator it is a rigid rotation in
//! (q, p/omega), realized as a composition of three spectral shears, each
//! of which is an exact translation of the band-limited interpolant. Both
//! cases evaluate psi0 at the backward-transported points without any time
//! stepping.

use num_complex::Complex64;

use crate::error::PropagateError;
use crate::grid::Representation;
use crate::potential::Potential;
use crate::state::KvnState;
use crate::transform::SpectralPlan;

/// Largest rotation angle handled by a single three-shear pass. Kept well
/// below pi/2 so the shear coefficient tan(theta/2) stays moderate.
const MAX_SHEAR_ANGLE: f64 = 1.5;

/// Transport `s0` for time `t` along the exact classical flow of the given
/// potential. Supports `Free` and `Harmonic`; `t` may be negative.
pub fn exact_transport(
    s0: &KvnState,
    potential: &Potential,
    t: f64,
) -> Result<KvnState, PropagateError> {
    match potential {
        Potential::Free => Ok(free_transport(s0, t)),
        Potential::Harmonic { omega } => Ok(harmonic_transport(s0, *omega, t)),
        _ => Err(PropagateError::UnsupportedPotential),
    }
}

/// psi(q, p, t) = psi0(q - p t, p): one exact kinetic flow of angle t.
fn free_transport(s0: &KvnState, t: f64) -> KvnState {
    let plan = SpectralPlan::new(s0.grid());
    let home = s0.rep();
    let g = *s0.grid();
    let nyq = g.n_q() / 2;
    let mut amp = s0.amp().clone();
    plan.convert(&mut amp, home, Representation::LqP);
    for ((k, m), z) in amp.indexed_iter_mut() {
        if k != nyq {
            *z *= Complex64::from_polar(1.0, -t * g.p_at(m) * g.lambda_q_at(k));
        }
    }
    plan.convert(&mut amp, Representation::LqP, home);
    KvnState::new(g, home, amp).expect("phases keep the field finite")
}

/// Rigid rotation of the field in (q, p/omega) by the backward angle
/// omega*t, split into chunks of three shears each.
fn harmonic_transport(s0: &KvnState, omega: f64, t: f64) -> KvnState {
    let theta = omega * t;
    let chunks = (theta.abs() / MAX_SHEAR_ANGLE).ceil() as usize;
    if chunks == 0 {
        return s0.clone();
    }
    let step = theta / chunks as f64;
    let half_tan = (step / 2.0).tan();
    let sine = step.sin();

    let plan = SpectralPlan::new(s0.grid());
    let home = s0.rep();
    let g = *s0.grid();
    let mut amp = s0.amp().clone();

    let nyq_q = g.n_q() / 2;
    let nyq_p = g.n_p() / 2;
    // x-shear: psi(q, p) <- psi(q - tan(step/2) p/omega, p)
    let shear_q = |amp: &mut ndarray::Array2<Complex64>| {
        plan.convert(amp, Representation::QLp, Representation::LqP);
        for ((k, m), z) in amp.indexed_iter_mut() {
            if k != nyq_q {
                *z *= Complex64::from_polar(
                    1.0,
                    -half_tan * (g.p_at(m) / omega) * g.lambda_q_at(k),
                );
            }
        }
        plan.convert(amp, Representation::LqP, Representation::QLp);
    };

    plan.convert(&mut amp, home, Representation::QLp);
    for _ in 0..chunks {
        shear_q(&mut amp);
        // y-shear: psi(q, p) <- psi(q, p + sin(step) omega q)
        for ((j, k), z) in amp.indexed_iter_mut() {
            if k != nyq_p {
                *z *= Complex64::from_polar(1.0, sine * omega * g.q_at(j) * g.lambda_p_at(k));
            }
        }
        shear_q(&mut amp);
    }
    plan.convert(&mut amp, Representation::QLp, home);
    KvnState::new(g, home, amp).expect("phases keep the field finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::state::{expectation_fn, gaussian_state, GaussianSpec};
    use approx::assert_abs_diff_eq;

    fn packet(q0: f64, p0: f64, sigma: f64) -> KvnState {
        let g = make_grid(128, 128, (-12.0, 12.0), (-12.0, 12.0)).unwrap();
        gaussian_state(
            g,
            GaussianSpec {
                center_q: q0,
                center_p: p0,
                sigma_q: sigma,
                sigma_p: sigma,
                ..GaussianSpec::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_time_is_the_identity() {
        let s = packet(1.0, -0.5, 1.0);
        for v in [Potential::Free, Potential::harmonic(2.0)] {
            let out = exact_transport(&s, &v, 0.0).unwrap();
            let diff: f64 = s
                .amp()
                .iter()
                .zip(out.amp().iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-14);
        }
    }

    #[test]
    fn free_mass_travels_ballistically() {
        let s = packet(0.0, 1.0, 0.5);
        let out = exact_transport(&s, &Potential::Free, 2.0).unwrap();
        let q = expectation_fn(&out, |q, _| q).unwrap();
        let p = expectation_fn(&out, |_, p| p).unwrap();
        assert_abs_diff_eq!(q, 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn harmonic_half_period_reflects_the_centroid() {
        let s = packet(1.0, 0.0, 0.7);
        let out = exact_transport(&s, &Potential::harmonic(1.0), std::f64::consts::PI).unwrap();
        let q = expectation_fn(&out, |q, _| q).unwrap();
        let p = expectation_fn(&out, |_, p| p).unwrap();
        assert_abs_diff_eq!(q, -1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(p, 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(out.norm_sq(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn harmonic_full_period_restores_the_state() {
        let s = packet(1.2, 0.8, 0.8);
        let out =
            exact_transport(&s, &Potential::harmonic(1.0), std::f64::consts::TAU).unwrap();
        let diff: f64 = s
            .amp()
            .iter()
            .zip(out.amp().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-9, "period defect {diff}");
    }

    #[test]
    fn scaled_rotation_respects_omega() {
        // omega = 2: a quarter period t = pi/4 maps (q0, 0) to (0, -2 q0)
        let s = packet(1.0, 0.0, 0.5);
        let out =
            exact_transport(&s, &Potential::harmonic(2.0), std::f64::consts::FRAC_PI_4).unwrap();
        let q = expectation_fn(&out, |q, _| q).unwrap();
        let p = expectation_fn(&out, |_, p| p).unwrap();
        assert_abs_diff_eq!(q, 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(p, -2.0, epsilon = 1e-7);
    }

    #[test]
    fn unsupported_potentials_are_rejected() {
        let s = packet(0.0, 0.0, 1.0);
        assert!(matches!(
            exact_transport(&s, &Potential::quartic(1.0, 0.5), 1.0),
            Err(PropagateError::UnsupportedPotential)
        ));
    }
}

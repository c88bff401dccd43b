//! Property tests for the structural invariants: unitarity, round trips,
//! inner-product symmetry, projection idempotence, reversibility.

use kvns_core::diagnostics::superselect;
use kvns_core::em::{em_step, EmState, SpatialGrid};
use kvns_core::grid::{make_grid, Representation};
use kvns_core::state::{inner_product, KvnState};
use kvns_core::transform::to_representation;
use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;

/// Arbitrary complex field over a small grid. Unitarity is an exact grid
/// property, so rough random data is fine here.
fn arb_state() -> impl Strategy<Value = KvnState> {
    let sizes = prop_oneof![Just((8usize, 16usize)), Just((16, 16)), Just((32, 8))];
    (
        sizes,
        -3.0..0.0f64,
        0.5..4.0f64,
        -2.0..2.0f64,
        0.5..5.0f64,
        any::<u64>(),
    )
        .prop_map(|((nq, np), q0, qw, p0, pw, seed)| {
            let grid = make_grid(nq, np, (q0, q0 + qw), (p0, p0 + pw)).unwrap();
            // cheap deterministic pseudo-random field from the seed
            let mut x = seed | 1;
            let mut next = move || {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                (x as f64 / u64::MAX as f64) * 2.0 - 1.0
            };
            let amp = Array2::from_shape_fn((nq, np), |_| Complex64::new(next(), next()));
            KvnState::new(grid, Representation::QP, amp).unwrap()
        })
}

fn rel_l2(a: &KvnState, b: &KvnState) -> f64 {
    let num: f64 = a
        .amp()
        .iter()
        .zip(b.amp().iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    let den: f64 = a.amp().iter().map(|x| x.norm_sqr()).sum::<f64>().max(1e-300);
    (num / den).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_transform_is_unitary(s in arb_state()) {
        let n0 = s.norm_sq();
        for rep in Representation::ALL {
            let t = to_representation(&s, rep);
            let rel = (t.norm_sq() - n0).abs() / n0.max(1e-300);
            prop_assert!(rel < 1e-12, "norm drift {rel} into {rep:?}");
        }
    }

    #[test]
    fn round_trips_are_the_identity(s in arb_state()) {
        for a in Representation::ALL {
            let sa = to_representation(&s, a);
            for b in Representation::ALL {
                let back = to_representation(&to_representation(&sa, b), a);
                prop_assert!(rel_l2(&sa, &back) < 1e-12);
            }
        }
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(a in arb_state(), b in arb_state()) {
        // only comparable when the random grids coincide
        if a.grid() == b.grid() {
            let ab = inner_product(&a, &b).unwrap();
            let ba = inner_product(&b, &a).unwrap();
            prop_assert!((ab - ba.conj()).norm() < 1e-10 * (1.0 + ab.norm()));
        }
    }

    #[test]
    fn superselection_is_idempotent_and_isometric(s in arb_state()) {
        let once = superselect(&s);
        let twice = superselect(&once);
        prop_assert_eq!(once.amp(), twice.amp());
        let rel = (once.norm_sq() - s.norm_sq()).abs() / s.norm_sq().max(1e-300);
        prop_assert!(rel < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn em_stepping_reverses(seed in any::<u64>(), dt in 0.001..0.5f64) {
        let grid = SpatialGrid::new(32, std::f64::consts::TAU).unwrap();
        let mut x = seed | 1;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        let field = Array2::from_shape_fn((6, 32), |_| Complex64::new(next(), next()));
        let s = EmState::new(grid, field).unwrap();
        let back = em_step(&em_step(&s, dt).unwrap(), -dt).unwrap();
        let diff: f64 = s
            .field()
            .iter()
            .zip(back.field().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        prop_assert!(diff < 1e-12, "reversal defect {diff}");

        let e0 = s.energy();
        let e1 = em_step(&s, dt).unwrap().energy();
        prop_assert!((e1 - e0).abs() < 1e-12 * e0.max(1.0));
    }
}

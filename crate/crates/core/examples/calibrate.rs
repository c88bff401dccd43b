use kvns_core::hybrid::*;
use kvns_core::potential::Potential;
use kvns_core::propagate::StepperConfig;
use std::time::Instant;

fn main() {
    let n = 128;
    let hbar = 0.125f64;
    let half = 3.0f64;
    let g = wigner_grid(n, -half, half, hbar).unwrap();
    let params = HybridParams::quantum(hbar).unwrap();
    let v = Potential::quartic(1.0, 0.5);
    let psi0 = coherent_wave_function(n, -half, g.dq(), 0.2, 0.0, hbar);
    let dm0 = DensityMatrix::from_wave_function(&psi0, -half, g.dq()).unwrap();
    let s0 = wigner_from_density(&dm0, params, &g).unwrap().into_state();
    let t_star = 3.5f64;

    let oracle = SchrodingerOracle::new(n, -half, g.dq(), &v, hbar).unwrap();
    let dt_ref = 2.5e-5;
    let steps_ref = (t_star / dt_ref).round() as usize;
    let dms = oracle.density_trajectory(&psi0, dt_ref, steps_ref, steps_ref).unwrap();
    let w_ref = wigner_from_density(&dms.last().unwrap().1, params, &g).unwrap();

    for dt in [5e-4f64, 2.5e-4, 1.25e-4] {
        let steps = (t_star / dt).round() as usize;
        let t0 = Instant::now();
        let stepper = HybridStepper::new(&g, &v, params, dt).unwrap();
        let tr = stepper.evolve(&s0, &StepperConfig::new(dt, steps, steps)).unwrap();
        let w = wigner_field_from_state(&tr.final_state).unwrap();
        let linf = w.values.iter().zip(w_ref.values.iter())
            .map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("hqc dt={dt:.2e}: L-inf vs oracle = {linf:.3e}  ({:.1?})", t0.elapsed());
    }
    // oracle self-convergence to confirm the reference is converged
    let dms2 = oracle.density_trajectory(&psi0, 5e-5, (t_star/5e-5).round() as usize, (t_star/5e-5).round() as usize).unwrap();
    let w2 = wigner_from_density(&dms2.last().unwrap().1, params, &g).unwrap();
    let d: f64 = w2.values.iter().zip(w_ref.values.iter()).map(|(a,b)| (a-b).abs()).fold(0.0, f64::max);
    println!("oracle dt 5e-5 vs 2.5e-5: {d:.3e}");
}

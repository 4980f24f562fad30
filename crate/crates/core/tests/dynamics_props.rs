use husimi::states::{
    analytic_moments, coherent_state, eigen_residual, grid_for_coherent, moments, squeezing_series,
};
use husimi::trajectory::{reference_epsilon, solve_epsilon, solve_epsilon_at, wronskian_residual, FrequencyProfile, TrajectorySample};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wronskian_holds_for_steps(omega1 in 0.2f64..3.0, t_switch in 0.0f64..2.0) {
        let p = FrequencyProfile::step(omega1, t_switch).unwrap();
        let traj = solve_epsilon(&p, 8.0, 0.1, 1e-10).unwrap();
        prop_assert!(wronskian_residual(&traj) < 1e-9);
    }

    #[test]
    fn wronskian_holds_for_modulation(kappa in 0.0f64..0.9, nu in 0.5f64..3.0) {
        let p = FrequencyProfile::modulated(kappa, nu).unwrap();
        let traj = solve_epsilon(&p, 8.0, 0.1, 1e-10).unwrap();
        prop_assert!(wronskian_residual(&traj) < 1e-9);
    }

    #[test]
    fn step_matches_closed_form(omega1 in 0.3f64..3.0, t in 0.0f64..6.0) {
        let p = FrequencyProfile::step(omega1, 0.0).unwrap();
        let s = solve_epsilon_at(&p, &[t], 1e-11).unwrap();
        let (e, d) = reference_epsilon(&p, t).unwrap();
        prop_assert!((s.eps[0] - e).norm() < 1e-8);
        prop_assert!((s.deps[0] - d).norm() < 1e-8);
    }

    #[test]
    fn robertson_bound_along_trajectories(omega1 in 0.3f64..3.0, t in 0.0f64..10.0) {
        let p = FrequencyProfile::step(omega1, 0.0).unwrap();
        let (e, d) = reference_epsilon(&p, t).unwrap();
        let m = analytic_moments(&TrajectorySample::new(t, e, d).unwrap());
        prop_assert!(m.satisfies_robertson(1e-12));
        prop_assert!(m.schrodinger_residual < 1e-12);
    }

    #[test]
    fn coherent_states_saturate_the_bound(re in -2.0f64..2.0, im in -2.0f64..2.0, t in 0.0f64..3.0) {
        let p = FrequencyProfile::free();
        let (e, d) = reference_epsilon(&p, t).unwrap();
        let s = TrajectorySample::new(t, e, d).unwrap();
        let alpha = C64::new(re, im);
        let wf = coherent_state(alpha, &s, &grid_for_coherent(alpha, &s).unwrap()).unwrap();
        prop_assert!((wf.norm_sq() - 1.0).abs() < 1e-6);
        prop_assert!(eigen_residual(&wf, alpha).unwrap() < 1e-6);
        let m = moments(&wf).unwrap();
        prop_assert!(m.schrodinger_residual < 1e-7);
    }
}

#[test]
fn squeezing_is_periodic_for_the_step() {
    let p = FrequencyProfile::step(2.0, 0.0).unwrap();
    let traj = solve_epsilon(&p, 10.0, 0.05, 1e-10).unwrap();
    for pt in squeezing_series(&traj) {
        let c = (2.0 * pt.t).cos();
        let s = (2.0 * pt.t).sin();
        assert!((pt.sigma_x - 0.5 * (c * c + 0.25 * s * s)).abs() < 1e-9);
    }
}

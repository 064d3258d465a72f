use bathforge::estimate::{classical_fisher, optimize_time, qfi, simulate_estimation};
use bathforge::filters::ControlKind;
use bathforge::num::linear_fit;
use bathforge::presets::{correlation_time_problem, ESTIMATION_TIME_RANGE};

const G_TAU: [f64; 3] = [5.0, 10.0, 20.0];

#[test]
fn free_error_grows_linearly_in_coupling() {
    let scaled: Vec<f64> = G_TAU
        .iter()
        .map(|&g| {
            let p = correlation_time_problem(ControlKind::Free, g, 10_000);
            let r = optimize_time(&p, ESTIMATION_TIME_RANGE).unwrap();
            assert!(!r.at_boundary);
            r.scaled_bound()
        })
        .collect();
    let (_, _, r2) = linear_fit(&G_TAU, &scaled);
    assert!(r2 > 0.95, "{scaled:?}");
    assert!(scaled.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn dynamical_control_keeps_the_error_flat() {
    let scaled: Vec<f64> = G_TAU
        .iter()
        .map(|&g| {
            let p = correlation_time_problem(ControlKind::Cpmg { n_pulses: 8 }, g, 10_000);
            optimize_time(&p, ESTIMATION_TIME_RANGE).unwrap().scaled_bound()
        })
        .collect();
    let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0_f64), |(a, b), v| (a.min(*v), b.max(*v)));
    assert!(lo >= 1.0 && hi <= 5.0 && hi / lo <= 1.5, "{scaled:?}");
}

#[test]
fn pure_probe_saturates_the_quantum_bound() {
    let p = correlation_time_problem(ControlKind::Cpmg { n_pulses: 4 }, 3.0, 100);
    for t in [0.1, 1.0, 4.0] {
        let (q, c) = (qfi(&p, t).unwrap(), classical_fisher(&p, t).unwrap());
        assert!((q / c - 1.0).abs() < 1e-6);
    }
}

#[test]
fn maximum_likelihood_tracks_the_bound() {
    for g in G_TAU {
        let p = correlation_time_problem(ControlKind::Cpmg { n_pulses: 8 }, g, 10_000);
        let r = optimize_time(&p, ESTIMATION_TIME_RANGE).unwrap();
        let sim = simulate_estimation(&p, r.t_opt, 7).unwrap();
        let ratio = sim.rms_relative_error / r.relative_error_bound;
        assert!((ratio - 1.0).abs() <= 0.25, "g tau_c = {g}: ratio {ratio}");
        assert!(sim.rms_relative_error >= 0.8 * r.relative_error_bound);
    }
}

#[test]
fn simulation_is_reproducible() {
    let p = correlation_time_problem(ControlKind::Free, 5.0, 1_000);
    let a = simulate_estimation(&p, 0.05, 99).unwrap();
    let b = simulate_estimation(&p, 0.05, 99).unwrap();
    let c = simulate_estimation(&p, 0.05, 100).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

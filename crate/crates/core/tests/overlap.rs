use std::time::Instant;

use bathforge::filters::{ControlProtocol, FilterFunction};
use bathforge::kk::{decoherence_rate, infer_spectrum, lorentzian_rate, measurement_thermodynamics};
use bathforge::presets;
use bathforge::spectra::{BathSpectrum, Flat, ThermalBath};
use proptest::prelude::*;

fn filter(p: ControlProtocol<f64>) -> FilterFunction<f64> {
    FilterFunction::new(p).unwrap()
}

#[test]
fn unit_controls_have_unit_filter_mass() {
    let mut protocols = vec![ControlProtocol::free(3.0), ControlProtocol::drive(1.7, 3.0)];
    protocols.extend([1, 2, 4, 8, 16].map(|n| ControlProtocol::cpmg(n, 3.0)));
    for p in protocols {
        let start = Instant::now();
        let mass = decoherence_rate(&filter(p), &Flat(1.0)).unwrap();
        assert!((mass - 1.0).abs() < 1e-6, "{p:?}: {mass}");
        assert!(start.elapsed().as_secs_f64() < 1.0);
    }
}

#[test]
fn overlap_matches_closed_form_lorentzian() {
    let (g, tau) = (0.8, 0.6);
    let bath = BathSpectrum::lorentzian(g, tau).unwrap();
    for p in [ControlProtocol::free(4.0), ControlProtocol::cpmg(8, 4.0), ControlProtocol::cpmg(3, 0.5)] {
        let f = filter(p);
        let exact = lorentzian_rate(&f, g, tau).unwrap();
        let quad = decoherence_rate(&f, &bath).unwrap();
        assert!((quad / exact - 1.0).abs() < 1e-8, "{p:?}: {quad} vs {exact}");
    }
}

#[test]
fn long_free_evolution_reaches_the_golden_rule() {
    let (g, tau) = (1.0, 1.0);
    let f = filter(ControlProtocol::free(100.0 * tau));
    let r = decoherence_rate(&f, &BathSpectrum::lorentzian(g, tau).unwrap()).unwrap();
    let g0 = g * g * tau / std::f64::consts::PI;
    // R / G(0) = 1 - (tau/t)(1 - e^{-t/tau}).
    let deficit = 0.01 * -(-100.0_f64).exp_m1();
    assert!((r / g0 - (1.0 - deficit)).abs() < 1e-9);
    assert!(deficit <= 0.01);
}

#[test]
fn narrowband_scan_recovers_a_lorentzian() {
    let (truth, grid, measurements) = presets::inversion_measurements().unwrap();
    let est = infer_spectrum(&measurements, &grid, presets::INVERSION_REGULARIZATION).unwrap();
    let worst = grid
        .iter()
        .zip(&est.values)
        .filter(|(w, _)| w.abs() <= 3.0)
        .map(|(w, v)| (v / truth.evaluate(*w).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 0.05, "worst relative error {worst}");
}

#[test]
fn measurement_interval_heats_and_cools() {
    let bath = presets::zeno_bath().unwrap();
    let w0 = presets::ZENO_OMEGA0;
    let short = measurement_thermodynamics(&bath, w0, 0.01).unwrap();
    let matched = measurement_thermodynamics(&bath, w0, 3.0).unwrap();
    let long = measurement_thermodynamics(&bath, w0, 1000.0).unwrap();
    assert!(short.t_eff > bath.temperature);
    assert!(matched.t_eff < bath.temperature);
    assert!((long.t_eff / bath.temperature - 1.0).abs() < 0.02, "{}", long.t_eff);
}

#[test]
fn hot_lorentzian_is_rejected() {
    let bath = ThermalBath::new(BathSpectrum::lorentzian(1.0, 1.0).unwrap(), 1.0).unwrap();
    assert!(decoherence_rate(&filter(ControlProtocol::free(1.0)), &bath).is_err());
}

fn protocol() -> impl Strategy<Value = ControlProtocol<f64>> {
    let t = 0.05..50.0_f64;
    prop_oneof![
        t.clone().prop_map(ControlProtocol::free),
        (1usize..12, t.clone()).prop_map(|(n, t)| ControlProtocol::cpmg(n, t)),
        (-5.0..5.0_f64, t.clone()).prop_map(|(r, t)| ControlProtocol::drive(r, t)),
        (0u8..3, 0.1..1.0_f64, t).prop_map(|(p, a, t)| ControlProtocol::sin_p(p, a, t)),
    ]
}

fn spectrum() -> impl Strategy<Value = BathSpectrum<f64>> {
    prop_oneof![
        (0.0..2.0_f64, 0.05..5.0_f64).prop_map(|(g, t)| BathSpectrum::lorentzian(g, t).unwrap()),
        (0.0..1.0_f64, 0.1..10.0_f64).prop_map(|(e, w)| BathSpectrum::ohmic(e, w).unwrap()),
        (0.0..1e-2_f64, 0.5..10.0_f64).prop_map(|(a, c)| BathSpectrum::blackbody(a, c).unwrap()),
        (0.5..5.0_f64, 0.0..1.0_f64).prop_map(|(w, g)| BathSpectrum::band_gap(w, g).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn overlaps_are_nonnegative(p in protocol(), s in spectrum()) {
        let r = decoherence_rate(&filter(p), &s).unwrap();
        prop_assert!(r >= 0.0 && r.is_finite());
    }

    #[test]
    fn filters_are_nonnegative(p in protocol(), w in -100.0..100.0_f64) {
        prop_assert!(filter(p).evaluate(w) >= 0.0);
    }

    #[test]
    fn thermal_spectra_obey_detailed_balance(
        eta in 0.01..1.0_f64, wc in 0.5..10.0_f64, temp in 0.1..10.0_f64, w in 0.01..20.0_f64,
    ) {
        let bath = ThermalBath::new(BathSpectrum::ohmic(eta, wc).unwrap(), temp).unwrap();
        let up = bath.evaluate(-w).unwrap();
        let down = bath.evaluate(w).unwrap();
        prop_assert!((up - (-w / temp).exp() * down).abs() <= 1e-12 * down.max(1e-300));
    }
}

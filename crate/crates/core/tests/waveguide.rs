use bathforge::num::{linear_fit, logspace};
use bathforge::presets::rb87_exchange;
use bathforge::solve::scan_then_refine;
use bathforge::waveguide::{
    casimir_shape, nonadditivity_ratio, rddi_strength_range, tem_pair_energy, two_atom_dynamics, BandEdgeConfig,
    Geometry, TEMLineConfig, Zone,
};

fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    linear_fit(&lx, &ly).0
}

#[test]
fn strength_diverges_as_inverse_square_root_at_the_edge() {
    let detuning = logspace(1e-6, 1e-2, 25);
    let delta: Vec<f64> = detuning
        .iter()
        .map(|d| {
            let cfg = BandEdgeConfig { omega_a: 1.0 - d, omega_co: 1.0, gamma_fs: 1.0, lambda_a: 1.0 };
            rddi_strength_range(&cfg).unwrap().delta
        })
        .collect();
    assert!((log_slope(&detuning, &delta) + 0.5).abs() <= 0.02);
}

#[test]
fn strength_and_range_scale_linearly() {
    let base = BandEdgeConfig { omega_a: 0.6_f64, omega_co: 1.0, gamma_fs: 1.0, lambda_a: 1.0 };
    let r = rddi_strength_range(&base).unwrap();
    let scaled = rddi_strength_range(&BandEdgeConfig { gamma_fs: 3.5, lambda_a: 0.25, ..base }).unwrap();
    assert!((scaled.delta / r.delta - 3.5).abs() < 1e-14);
    assert!((scaled.xi / r.xi - 0.25).abs() < 1e-14);
    let far = rddi_strength_range(&BandEdgeConfig { omega_a: 1e-12, ..base }).unwrap();
    assert!((far.delta - 1.0).abs() < 1e-11 && (far.xi - 1.0).abs() < 1e-11);
}

#[test]
fn lossless_exchange_is_a_rabi_swap() {
    let delta = 1.7;
    let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.013).collect();
    for s in two_atom_dynamics(delta, 0.0, &grid).unwrap() {
        assert!((s.p1 - (delta * s.t).cos().powi(2)).abs() < 1e-10);
    }
    let uncoupled = two_atom_dynamics(0.0, 0.8, &grid).unwrap();
    assert!(uncoupled.iter().all(|s| s.concurrence == 0.0 && (s.p1 - (-0.8 * s.t).exp()).abs() < 1e-15));
}

fn peak_concurrence(delta: f64, gamma: f64) -> f64 {
    let half = std::f64::consts::FRAC_PI_2 / delta;
    let grid: Vec<f64> = (0..=200).map(|i| half * i as f64 / 200.0).collect();
    let c = |t: f64| Ok(two_atom_dynamics(delta, gamma, &[t])?[0].concurrence);
    scan_then_refine(c, &grid, half * 1e-12).unwrap().1
}

#[test]
fn rubidium_exchange_reaches_the_reported_band() {
    let (delta, gamma) = rb87_exchange();
    let peak = peak_concurrence(delta, gamma);
    assert!((0.90..=0.99).contains(&peak), "{peak}");
}

#[test]
fn stronger_exchange_entangles_more() {
    let ratios = logspace(0.1, 100.0, 16);
    let c: Vec<f64> = ratios
        .iter()
        .map(|r| {
            let t = std::f64::consts::FRAC_PI_4 / r;
            two_atom_dynamics(*r, 1.0, &[t]).unwrap()[0].concurrence
        })
        .collect();
    assert!(c.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn far_zone_closed_form_is_inverse_cube() {
    let x = logspace(10.0, 1e4, 20);
    let f: Vec<f64> = x.iter().map(|v| casimir_shape(*v, Zone::Far).unwrap()).collect();
    assert!((log_slope(&x, &f) + 3.0).abs() <= 0.01);
    assert_eq!(casimir_shape(1e-300_f64, Zone::Near).unwrap(), std::f64::consts::PI);
}

#[test]
fn tem_mode_sum_is_attractive_with_inverse_cube_tail() {
    let cfg = TEMLineConfig::new(1.0, 0.02, 1e-3).unwrap();
    assert!(cfg.tem_dominant());
    let z = logspace(30.0, 300.0, 12);
    let u: Vec<f64> = z.iter().map(|z| tem_pair_energy(&cfg, *z).unwrap()).collect();
    assert!(u.iter().all(|v| *v < 0.0));
    assert!((log_slope(&z, &u) + 3.0).abs() <= 0.15);
    let ratio = tem_pair_energy(&cfg, 50.0).unwrap() / tem_pair_energy(&cfg, 100.0).unwrap();
    assert!((ratio / 8.0 - 1.0).abs() <= 0.1);
    for near in logspace(1e-4, 1.0, 9) {
        assert!(tem_pair_energy(&cfg, near).unwrap() < 0.0);
    }
}

#[test]
fn one_dimensional_nonadditivity_is_enhanced() {
    let (alpha, z, a) = (2e-3_f64, 5.0_f64, 0.05_f64);
    let r3 = nonadditivity_ratio(alpha, z, Geometry::FreeSpace3D).unwrap();
    let r1 = nonadditivity_ratio(alpha, z, Geometry::TEM1D { a }).unwrap();
    assert!((r1 / r3 - (z / a).powi(2)).abs() <= 1e-12 * (z / a).powi(2));
    let thinner = nonadditivity_ratio(alpha, z, Geometry::TEM1D { a: a / 2.0 }).unwrap();
    assert!((thinner / r1 - 4.0).abs() < 1e-12);
}

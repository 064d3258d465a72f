use std::f64::consts::PI;

use bathforge::collective::{
    dominance_ratio, evolve, evolve_with, ghz_fidelity, lamb_shift_rate, DephasingKernel, DickeState,
};
use bathforge::num::linear_fit;
use bathforge::spectra::{BathSpectrum, ThermalBath};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |a, i| a * (n - i) as f64 / (i + 1) as f64)
}

/// Symmetric Dicke vector with `k` down spins in the full `2^N` space.
fn dicke_vector(n: usize, k: usize) -> Vec<f64> {
    let norm = binomial(n, k).sqrt();
    (0..1usize << n).map(|b| if b.count_ones() as usize == k { 1.0 / norm } else { 0.0 }).collect()
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> DickeState<f64> {
    let d = n + 1;
    let a: Vec<C> = (0..d * d).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let mut rho = vec![C::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            rho[i * d + j] = (0..d).map(|k| a[i * d + k] * a[j * d + k].conj()).sum();
        }
    }
    let tr: f64 = (0..d).map(|i| rho[i * d + i].re).sum();
    DickeState::from_matrix(n, rho.into_iter().map(|z| z / tr).collect()).unwrap()
}

/// Full-space propagation: single-qubit precession, pairwise `ZZ` phases for
/// `f L_z^2`, and pairwise dephasing factors for `exp(-gamma (m - m')^2)`.
fn brute_force(state: &DickeState<f64>, precession: f64, f: f64, gamma: f64) -> DickeState<f64> {
    let n = state.n_qubits();
    let dim = 1usize << n;
    let basis: Vec<Vec<f64>> = (0..=n).map(|k| dicke_vector(n, k)).collect();
    let mut full = vec![C::new(0.0, 0.0); dim * dim];
    for (k, bk) in basis.iter().enumerate() {
        for (l, bl) in basis.iter().enumerate() {
            let r = state.get(k, l);
            for a in (0..dim).filter(|a| bk[*a] != 0.0) {
                for b in (0..dim).filter(|b| bl[*b] != 0.0) {
                    full[a * dim + b] += r * bk[a] * bl[b];
                }
            }
        }
    }
    let z = |b: usize, i: usize| if b >> i & 1 == 0 { 1.0 } else { -1.0 };
    for a in 0..dim {
        for b in 0..dim {
            let mut phase = 0.0;
            let mut damp = 0.0;
            for i in 0..n {
                phase -= precession * (z(a, i) - z(b, i));
                for j in 0..n {
                    phase -= f * (z(a, i) * z(a, j) - z(b, i) * z(b, j));
                    damp += gamma * (z(a, i) - z(b, i)) * (z(a, j) - z(b, j));
                }
            }
            full[a * dim + b] *= C::from_polar((-damp).exp(), phase);
        }
    }
    let d = n + 1;
    let mut out = vec![C::new(0.0, 0.0); d * d];
    for k in 0..d {
        for l in 0..d {
            let mut acc = C::new(0.0, 0.0);
            for a in (0..dim).filter(|a| basis[k][*a] != 0.0) {
                for b in (0..dim).filter(|b| basis[l][*b] != 0.0) {
                    acc += basis[k][a] * full[a * dim + b] * basis[l][b];
                }
            }
            out[k * d + l] = acc;
        }
    }
    DickeState::from_matrix(n, out).unwrap()
}

#[test]
fn dicke_evolution_matches_full_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=8 {
        let s = random_state(n, &mut rng);
        let (prec, f, gamma) = (rng.random_range(0.0..3.0), rng.random_range(0.0..1.0), rng.random_range(0.0..0.05));
        let a = evolve_with(&s, prec, f, gamma);
        let b = brute_force(&s, prec, f, gamma);
        let dev = a.matrix().iter().zip(b.matrix()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(dev <= 1e-10, "n = {n}: {dev}");
    }
}

/// GHZ fidelity of a full-space pure state against the cat on the
/// equatorial axis `phi`, maximized over the relative phase.
fn full_space_cat_fidelity(psi: &[C], n: usize, phi: f64) -> f64 {
    let dim = 1usize << n;
    let single = |sign: f64, up: bool| -> C {
        if up {
            C::new(2f64.sqrt().recip(), 0.0)
        } else {
            C::from_polar(sign * 2f64.sqrt().recip(), phi)
        }
    };
    let overlap = |sign: f64| -> C {
        (0..dim)
            .map(|b| {
                let amp: C = (0..n).map(|i| single(sign, b >> i & 1 == 0)).product();
                amp.conj() * psi[b]
            })
            .sum()
    };
    let (a, b) = (overlap(1.0), overlap(-1.0));
    0.5 * (a.norm_sqr() + b.norm_sqr()) + (a * b.conj()).norm()
}

#[test]
fn twisting_forms_a_cat_in_full_space() {
    for n in 2..=10 {
        let dim = 1usize << n;
        let f = PI / 8.0;
        let psi: Vec<C> = (0..dim)
            .map(|b| {
                let m = n as f64 - 2.0 * b.count_ones() as f64;
                C::from_polar((dim as f64).sqrt().recip(), -f * m * m)
            })
            .collect();
        let full = full_space_cat_fidelity(&psi, n, PI * n as f64 / 2.0);
        let dicke = ghz_fidelity(&evolve_with(&DickeState::x_polarized(n).unwrap(), 0.0, f, 0.0)).unwrap();
        assert!(full > 1.0 - 1e-9 && dicke > 1.0 - 1e-9, "n = {n}: {full} {dicke}");
    }
}

#[test]
fn random_evolutions_stay_physical() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let bath = ThermalBath::new(BathSpectrum::ohmic(0.02, 4.0).unwrap(), 0.3).unwrap();
    let kernel = DephasingKernel::from_bath(bath).unwrap();
    let grid: Vec<(f64, f64, f64)> = (0..40)
        .map(|i| {
            let t = 0.05 * (1.0 + i as f64);
            (t, kernel.lamb_phase(t).unwrap(), kernel.decoherence_exponent(t).unwrap())
        })
        .collect();
    for _ in 0..1000 {
        let n = rng.random_range(1..=8);
        let s = random_state(n, &mut rng);
        let (t, f, g) = grid[rng.random_range(0..grid.len())];
        let out = evolve_with(&s, 1.3 * t, f, g);
        assert!((out.trace() - 1.0).abs() <= 1e-14);
        for i in 0..=n {
            assert_eq!(out.get(i, i), s.get(i, i));
            for j in 0..=n {
                assert_eq!(out.get(i, j), out.get(j, i).conj());
            }
        }
        assert!(out.min_eigenvalue() >= -1e-10);
    }
}

#[test]
fn markovian_kernels_compose() {
    let s = DickeState::x_polarized(5).unwrap();
    let k = DephasingKernel::markovian(0.3, 0.02).unwrap();
    let two_step = evolve(&evolve(&s, &k, 1.1, 0.7).unwrap(), &k, 1.1, 1.9).unwrap();
    let one_step = evolve(&s, &k, 1.1, 2.6).unwrap();
    let dev = two_step.matrix().iter().zip(one_step.matrix()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(dev < 1e-14);

    // With memory the kernel is not additive in time.
    let bath = ThermalBath::new(BathSpectrum::ohmic(0.05, 2.0).unwrap(), 0.0).unwrap();
    let k = DephasingKernel::from_bath(bath).unwrap();
    let two_step = evolve(&evolve(&s, &k, 1.1, 0.7).unwrap(), &k, 1.1, 1.9).unwrap();
    let one_step = evolve(&s, &k, 1.1, 2.6).unwrap();
    let dev = two_step.matrix().iter().zip(one_step.matrix()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(dev > 1e-4);
}

#[test]
fn decoherence_lowers_the_peak_cat_fidelity() {
    let n = 4;
    let bath = ThermalBath::new(BathSpectrum::ohmic(0.05, 5.0).unwrap(), 0.5).unwrap();
    let s = DickeState::x_polarized(n).unwrap();
    let times: Vec<f64> = (1..=120).map(|i| i as f64 * 0.025).collect();
    let peaks: Vec<f64> = [0.0, 0.01, 0.1, 1.0]
        .iter()
        .map(|&kappa| {
            let k = DephasingKernel::with_suppression(bath.clone(), kappa).unwrap();
            times.iter().map(|&t| ghz_fidelity(&evolve(&s, &k, 0.0, t).unwrap()).unwrap()).fold(0.0, f64::max)
        })
        .collect();
    assert!(peaks.windows(2).all(|w| w[1] < w[0]), "{peaks:?}");
}

#[test]
fn lamb_phase_grows_at_the_principal_value_rate() {
    let (eta, wc) = (0.03_f64, 2.0_f64);
    let spectrum = BathSpectrum::ohmic(eta, wc).unwrap();
    let k = DephasingKernel::from_bath(ThermalBath::new(spectrum.clone(), 0.0).unwrap()).unwrap();
    let t = 1e3 / wc;
    let rate = lamb_shift_rate(&spectrum).unwrap();
    assert!((k.lamb_phase(t).unwrap() / t / rate - 1.0).abs() < 0.005);
}

#[test]
fn symmetric_tabulated_spectrum_has_no_lamb_shift() {
    let grid: Vec<f64> = (0..201).map(|i| -5.0 + 0.05 * i as f64).collect();
    let values: Vec<f64> = grid.iter().map(|w| w.abs() * (-w * w).exp()).collect();
    let t = bathforge::spectra::Tabulated::new(grid, values, bathforge::spectra::Interpolation::Linear).unwrap();
    assert!(lamb_shift_rate(&BathSpectrum::Tabulated(t)).unwrap().abs() < 1e-10);
}

#[test]
fn dominance_grows_linearly_in_cutoff_over_temperature() {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (wc, temp) in [(1.0, 0.5), (3.0, 0.5), (6.0, 0.4), (10.0, 0.3), (20.0, 1.0)] {
        let bath = ThermalBath::new(BathSpectrum::ohmic(0.1, wc).unwrap(), temp).unwrap();
        let d = dominance_ratio(&bath).unwrap();
        x.push(wc / temp);
        y.push(d.ratio);
    }
    let (slope, intercept, _) = linear_fit(&x, &y);
    assert!((slope - 1.0 / (2.0 * PI)).abs() < 1e-6, "{slope}");
    assert!(intercept.abs() < 1e-6);
    let crossover = ThermalBath::new(BathSpectrum::ohmic(0.1, 2.0 * PI * 0.7).unwrap(), 0.7).unwrap();
    assert!((dominance_ratio(&crossover).unwrap().ratio - 1.0).abs() < 1e-8);
}

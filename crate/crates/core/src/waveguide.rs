//! Band-edge dipole-dipole exchange and TEM-line dispersion forces.
//!
//! Proportionality constants are set to one throughout; only ratios, signs
//! and exponents carry physical content. Units take `c = 1`.

use crate::error::{domain, invalid, Error, Result};
use crate::num::{cst, f64_of, Real};
use crate::quad::{Quadrature, Segment};

/// Free-space linewidth of the Rb-87 D1 line, `2 pi x 5.75 MHz`.
pub const RB87_D1_GAMMA: f64 = std::f64::consts::TAU * 5.75e6;
/// Time for one complete excitation transfer in the band-edge exchange example.
pub const RB87_EXCHANGE_TIME: f64 = 1.8e-9;

/// Atom of frequency `omega_a` inside the gap of a guide with band edge `omega_co`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdgeConfig<T> {
    pub omega_a: T,
    pub omega_co: T,
    pub gamma_fs: T,
    pub lambda_a: T,
}

/// Exchange strength and range of the resonant dipole-dipole interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RddiScaling<T> {
    pub delta: T,
    pub xi: T,
}

/// `delta = gamma_fs / sqrt(1 - omega_a/omega_co)`, `xi = lambda_a / sqrt(1 - omega_a/omega_co)`.
pub fn rddi_strength_range<T: Real>(config: &BandEdgeConfig<T>) -> Result<RddiScaling<T>> {
    let BandEdgeConfig { omega_a, omega_co, gamma_fs, lambda_a } = *config;
    if !(omega_co > T::zero()) || !(omega_a > T::zero()) {
        return Err(invalid("omega_a", "frequencies must be positive"));
    }
    if !(gamma_fs >= T::zero()) || !(lambda_a > T::zero()) {
        return Err(invalid("gamma_fs", "need gamma_fs >= 0 and lambda_a > 0"));
    }
    if omega_a >= omega_co {
        return Err(domain(
            "omega_a",
            f64_of(omega_a),
            format!("no bound photon below the band edge at {}", f64_of(omega_co)),
        ));
    }
    let root = (T::one() - omega_a / omega_co).sqrt();
    Ok(RddiScaling { delta: gamma_fs / root, xi: lambda_a / root })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeSample<T> {
    pub t: T,
    pub p1: T,
    pub p2: T,
    /// Population returned to the ground state by free-space emission.
    pub ground: T,
    pub concurrence: T,
}

/// Two atoms sharing one excitation (initially on atom 1), exchanging at rate
/// `delta` and each decaying at `gamma_fs`:
/// `c1 = e^{-gamma t/2} cos(delta t)`, `c2 = -i e^{-gamma t/2} sin(delta t)`.
/// Concurrence of the resulting X state is `2 |c1 c2|`.
pub fn two_atom_dynamics<T: Real>(delta: T, gamma_fs: T, t_grid: &[T]) -> Result<Vec<ExchangeSample<T>>> {
    if !(delta >= T::zero()) || !(gamma_fs >= T::zero()) {
        return Err(invalid("delta", "exchange and decay rates must be >= 0"));
    }
    Ok(t_grid
        .iter()
        .map(|&t| {
            let survive = (-gamma_fs * t).exp();
            let (s, c) = (delta * t).sin_cos();
            let (p1, p2) = (survive * c * c, survive * s * s);
            ExchangeSample {
                t,
                p1,
                p2,
                ground: -(-gamma_fs * t).exp_m1(),
                concurrence: (cst::<T>(2.0) * survive * (s * c).abs()).min(T::one()),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Near,
    Far,
}

/// Closed-form distance dependence of the TEM-mediated pair potential:
/// `pi + 16 pi x ln x` for `x < 0.1`, `x^-3 / (2 pi)^3` for `x >= 10`, with `x = z/lambda_e`.
pub fn casimir_shape<T: Real>(z_over_lambda: T, zone: Zone) -> Result<T> {
    let x = z_over_lambda;
    match zone {
        Zone::Near if x > T::zero() && x < cst(0.1) => Ok(T::PI() + cst::<T>(16.0) * T::PI() * x * x.ln()),
        Zone::Near => Err(domain("z_over_lambda", f64_of(x), "near-zone form holds for 0 < z/lambda_e < 0.1")),
        Zone::Far if x >= cst(10.0) => Ok(T::one() / (T::TAU() * x).powi(3)),
        Zone::Far => Err(domain("z_over_lambda", f64_of(x), "far-zone form holds for z/lambda_e >= 10")),
    }
}

/// Transmission line of transverse size `a` holding atoms with a single
/// resonance at wavelength `lambda_e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TEMLineConfig<T> {
    pub lambda_e: T,
    pub a: T,
    pub alpha0: T,
}

impl<T: Real> TEMLineConfig<T> {
    pub fn new(lambda_e: T, a: T, alpha0: T) -> Result<Self> {
        if !(lambda_e > T::zero()) || !(a > T::zero()) || !(alpha0 > T::zero()) {
            return Err(invalid("lambda_e", "lambda_e, a and alpha0 must be positive"));
        }
        Ok(TEMLineConfig { lambda_e, a, alpha0 })
    }

    pub fn omega_e(&self) -> T {
        T::TAU() / self.lambda_e
    }

    /// `alpha0 / (1 - omega^2/omega_e^2)`.
    pub fn polarizability(&self, omega: T) -> T {
        let r = omega / self.omega_e();
        self.alpha0 / (T::one() - r * r)
    }

    /// Thin-line regime where the TEM mode dominates the interaction.
    pub fn tem_dominant(&self) -> bool {
        self.a <= self.lambda_e * cst(0.1)
    }
}

/// Regulator cutoff `k_max` in units of `1/lambda_e`.
const K_MAX_LAMBDA: f64 = 1e3;

/// Vacuum pair energy mediated by the TEM mode, in units of
/// `(alpha0/a^2)^2 omega_e^3`.
///
/// The mode sum is evaluated on the imaginary frequency axis, where the
/// squared polarizability is `alpha0^2/(1 + x^2)^2` and the propagator is
/// `e^{-2 x s}` with `x = kappa/omega_e`, `s = omega_e z`:
/// `U = -(alpha0/a^2)^2 omega_e^3 4 int_0^inf x^2 e^{-2 s x}/(1 + x^2)^2 dx`.
/// An exponential regulator `e^{-k/k_max}` is removed by Richardson
/// extrapolation over `k_max` and `2 k_max`.
pub fn tem_pair_energy<T: Real>(config: &TEMLineConfig<T>, z: T) -> Result<T> {
    if !(z > T::zero()) || !z.is_finite() {
        return Err(domain("z", f64_of(z), "separation must be positive"));
    }
    let we = config.omega_e();
    let s = we * z;
    let x_max = cst::<T>(K_MAX_LAMBDA) / (config.lambda_e * we);
    let quad = Quadrature::with_rel_tol(cst(1e-11));
    let regulated = |cut: T| -> Result<T> {
        let f = |x: T| -> Result<T> {
            let d = T::one() + x * x;
            Ok(x * x / (d * d) * (-(s + s) * x - x / cut).exp())
        };
        // Split where the exponential has decayed by e^-1 to keep the tail map well scaled.
        let knee = T::one().max(T::one() / (s + s));
        let segs =
            [Segment::between(T::zero(), knee, false, false), Segment::between(knee, T::infinity(), false, false)];
        Ok(quad.integrate_segments(f, &segs)?.value)
    };
    let i1 = regulated(x_max)?;
    let i2 = regulated(x_max + x_max)?;
    let value = i2 + i2 - i1;
    if (i2 - i1).abs() > cst::<T>(0.05) * value.abs() {
        return Err(Error::Divergent(format!(
            "regulator extrapolation did not settle ({} vs {})",
            f64_of(i1),
            f64_of(i2)
        )));
    }
    let prefactor = config.alpha0 / (config.a * config.a);
    Ok(-prefactor * prefactor * we * we * we * cst::<T>(4.0) * value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry<T> {
    FreeSpace3D,
    TEM1D { a: T },
}

/// Three-body to two-body energy ratio: `alpha/z^3` in free space,
/// `alpha/(a^2 z)` in a TEM line.
pub fn nonadditivity_ratio<T: Real>(alpha0: T, z: T, geometry: Geometry<T>) -> Result<T> {
    if !(alpha0 > T::zero()) || !(z > T::zero()) {
        return Err(invalid("alpha0", "alpha0 and z must be positive"));
    }
    match geometry {
        Geometry::FreeSpace3D => Ok(alpha0 / (z * z * z)),
        Geometry::TEM1D { a } if a > T::zero() => Ok(alpha0 / (a * a * z)),
        Geometry::TEM1D { .. } => Err(invalid("a", "transverse size must be positive")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn quarter_detuning_doubles_strength_and_range() {
        let cfg = BandEdgeConfig { omega_a: 3.0, omega_co: 4.0, gamma_fs: 0.7, lambda_a: 1.3 };
        let r = rddi_strength_range(&cfg).unwrap();
        assert!((r.delta - 1.4_f64).abs() < 1e-15 && (r.xi - 2.6).abs() < 1e-15);
        let bad = BandEdgeConfig { omega_a: 4.0, ..cfg };
        assert!(matches!(rddi_strength_range(&bad), Err(Error::Domain { .. })));
    }

    #[test]
    fn lossless_exchange() {
        let d = 2.0_f64;
        let s = two_atom_dynamics(d, 0.0, &[0.3, FRAC_PI_4 / d]).unwrap();
        assert!((s[0].p1 - (0.6_f64).cos().powi(2)).abs() < 1e-15);
        assert!((s[1].concurrence - 1.0).abs() < 1e-15);
    }

    #[test]
    fn probability_is_conserved() {
        let grid: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        for s in two_atom_dynamics(1.3, 0.4, &grid).unwrap() {
            assert!((s.p1 + s.p2 + s.ground - 1.0).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&s.concurrence));
        }
    }

    #[test]
    fn zone_windows() {
        assert!((casimir_shape(10.0_f64, Zone::Far).unwrap() - 1e-3 / (2.0 * PI).powi(3)).abs() < 1e-18);
        assert!(casimir_shape(5.0_f64, Zone::Far).is_err());
        assert!(casimir_shape(0.5_f64, Zone::Near).is_err());
        assert!((casimir_shape(1e-9_f64, Zone::Near).unwrap() - PI).abs() < 1e-5);
    }

    #[test]
    fn tem_energy_limits_match_zone_forms() {
        let cfg = TEMLineConfig::new(1.0_f64, 0.01, 1e-3).unwrap();
        let unit = -(1e-3_f64 / 1e-4).powi(2) * (2.0 * PI).powi(3);
        let far = tem_pair_energy(&cfg, 50.0).unwrap() / unit;
        assert!((far / casimir_shape(50.0, Zone::Far).unwrap() - 1.0).abs() < 0.01, "{far}");
        let near = tem_pair_energy(&cfg, 1e-7).unwrap() / unit;
        // At contact the regulator leaves a (ln k_max)/k_max residue.
        assert!((near - PI).abs() < 0.01 * PI, "{near}");
    }

    #[test]
    fn ratios() {
        let r3 = nonadditivity_ratio(2.0_f64, 3.0, Geometry::FreeSpace3D).unwrap();
        let r1 = nonadditivity_ratio(2.0_f64, 3.0, Geometry::TEM1D { a: 3.0 }).unwrap();
        assert!((r1 - r3).abs() < 1e-15);
    }
}

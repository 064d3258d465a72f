//! State-transfer fidelity through a noisy channel under `sin^p` boundary
//! modulation: `F(T) = 1 - int F_T(omega) G(omega) domega`.

use crate::error::{invalid, Result};
use crate::filters::{ControlProtocol, FilterFunction};
use crate::kk::decoherence_rate;
use crate::num::Real;
use crate::spectra::SpectralDensity;

/// Transfer through a channel coupled to the remaining modes with spectrum `bath`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferChannel<T, S> {
    pub bath: S,
    pub transfer_time: T,
    pub p: u8,
    pub alpha0: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferOutcome<T> {
    pub fidelity: T,
    /// Raw overlap `int F_T G`, before clamping.
    pub infidelity: T,
    /// False when the overlap exceeds one and the weak-coupling formula fails.
    pub in_regime: bool,
}

/// `1 - int F_T G` with the `sin^p` filter centred on the channel resonance.
/// The filter carries the modulation energy, `int F_T = int alpha^2 dt / T`.
pub fn transfer_fidelity<T, S>(channel: &TransferChannel<T, S>) -> Result<TransferOutcome<T>>
where
    T: Real,
    S: SpectralDensity<T>,
{
    let filter = FilterFunction::new(ControlProtocol::sin_p(channel.p, channel.alpha0, channel.transfer_time))?;
    let overlap = decoherence_rate(&filter, &channel.bath)?;
    let in_regime = overlap <= T::one();
    Ok(TransferOutcome {
        fidelity: if in_regime { T::one() - overlap } else { T::zero() },
        infidelity: overlap,
        in_regime,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffRow<T> {
    pub p: u8,
    pub transfer_time: T,
    /// Clamped to `[0, 1]`.
    pub infidelity: T,
    pub in_regime: bool,
    /// Lowest infidelity among the `p` values at this transfer time.
    pub best: bool,
}

/// Infidelity over a grid of transfer times for each `p`, rows ordered by
/// time then by `p`.
pub fn tradeoff_curve<T, S>(bath: &S, times: &[T], p_values: &[u8], alpha0: T) -> Result<Vec<TradeoffRow<T>>>
where
    T: Real,
    S: SpectralDensity<T> + Clone,
{
    if times.is_empty() || p_values.is_empty() {
        return Err(invalid("grid", "transfer-time grid and p list must be nonempty"));
    }
    let mut rows = Vec::with_capacity(times.len() * p_values.len());
    for &t in times {
        let start = rows.len();
        for &p in p_values {
            let ch = TransferChannel { bath: bath.clone(), transfer_time: t, p, alpha0 };
            let out = transfer_fidelity(&ch)?;
            rows.push(TradeoffRow {
                p,
                transfer_time: t,
                infidelity: out.infidelity.min(T::one()),
                in_regime: out.in_regime,
                best: false,
            });
        }
        let best = (start..rows.len())
            .min_by(|&a, &b| rows[a].infidelity.partial_cmp(&rows[b].infidelity).unwrap_or(std::cmp::Ordering::Equal))
            .expect("nonempty block");
        rows[best].best = true;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{BathSpectrum, Flat};

    #[test]
    fn empty_bath_is_perfect() {
        let ch = TransferChannel { bath: Flat(0.0_f64), transfer_time: 3.0, p: 2, alpha0: 1.0 };
        let out = transfer_fidelity(&ch).unwrap();
        assert_eq!(out.fidelity, 1.0);
        assert!(out.in_regime);
    }

    #[test]
    fn flat_bath_is_ordered_by_modulation_energy() {
        let rows = tradeoff_curve(&Flat(0.01_f64), &[1.0, 2.0], &[0, 1, 2], 1.0).unwrap();
        let energy = [1.0, 0.5, 0.375];
        for r in &rows {
            assert!((r.infidelity - 0.01 * energy[r.p as usize]).abs() < 1e-10);
            assert_eq!(r.best, r.p == 2);
        }
    }

    #[test]
    fn strong_coupling_is_flagged() {
        let ch = TransferChannel { bath: Flat(2.0_f64), transfer_time: 1.0, p: 0, alpha0: 1.0 };
        let out = transfer_fidelity(&ch).unwrap();
        assert_eq!(out.fidelity, 0.0);
        assert!(!out.in_regime);
    }

    #[test]
    fn tail_chopping_on_a_gapped_bath() {
        let inner = BathSpectrum::lorentzian(0.05_f64, 1.0).unwrap();
        let bath = BathSpectrum::band_limited(inner, 2.0, 40.0).unwrap();
        let t = 30.0;
        let inf = |p| {
            transfer_fidelity(&TransferChannel { bath: bath.clone(), transfer_time: t, p, alpha0: 1.0 })
                .unwrap()
                .infidelity
        };
        let (i0, i1, i2) = (inf(0), inf(1), inf(2));
        assert!(i2 < i1 && i1 < i0, "{i0} {i1} {i2}");
        assert!(i2 * 10.0 <= i0);
    }
}

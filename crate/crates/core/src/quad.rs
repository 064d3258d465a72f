//! Globally adaptive Gauss–Kronrod quadrature.
//!
//! Integrals are split into an initial list of segments (user breakpoints,
//! infinite tails, endpoint square-root singularities) and refined by
//! repeatedly bisecting the segment with the largest error estimate until the
//! total error estimate satisfies `max(abs_tol, rel_tol * |I|)`.
//!
//! Infinite tails are mapped onto `(0, 1]` with `x = a + (1 - s) / s`, and
//! integrable `1/sqrt` endpoint singularities with `x = a + u^2`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::num::{cst, f64_of, Real};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// How a segment's own coordinate maps onto the integration variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentMap<T> {
    /// Plain finite interval.
    Identity,
    /// `[a, +inf)` via `x = a + (1 - s)/s`, `s` in `(0, 1]`.
    UpperTail(T),
    /// `(-inf, b]` via `x = b - (1 - s)/s`.
    LowerTail(T),
    /// Finite `[a, b]` with an inverse-square-root singularity at `a`: `x = a + u^2`.
    SqrtLeft(T),
    /// Finite `[a, b]` with an inverse-square-root singularity at `b`: `x = b - u^2`.
    SqrtRight(T),
}

impl<T: Real> SegmentMap<T> {
    #[inline]
    fn apply(&self, s: T) -> (T, T) {
        match *self {
            SegmentMap::Identity => (s, T::one()),
            SegmentMap::UpperTail(a) => (a + (T::one() - s) / s, T::one() / (s * s)),
            SegmentMap::LowerTail(b) => (b - (T::one() - s) / s, T::one() / (s * s)),
            SegmentMap::SqrtLeft(a) => (a + s * s, s + s),
            SegmentMap::SqrtRight(b) => (b - s * s, s + s),
        }
    }
}

/// A segment of the integration domain in its mapped coordinate.
#[derive(Debug, Clone, Copy)]
pub struct Segment<T> {
    pub map: SegmentMap<T>,
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Segment<T> {
    /// Builds the segment covering `[a, b]` in the original variable.
    /// Either end may be infinite. `singular_left`/`singular_right` request the
    /// square-root substitution at a finite end.
    pub fn between(a: T, b: T, singular_left: bool, singular_right: bool) -> Self {
        match (a.is_infinite(), b.is_infinite()) {
            (false, true) => Segment { map: SegmentMap::UpperTail(a), lo: T::zero(), hi: T::one() },
            (true, false) => Segment { map: SegmentMap::LowerTail(b), lo: T::zero(), hi: T::one() },
            (true, true) => panic!("doubly infinite segment must be split first"),
            (false, false) if singular_left => {
                Segment { map: SegmentMap::SqrtLeft(a), lo: T::zero(), hi: (b - a).sqrt() }
            }
            (false, false) if singular_right => {
                Segment { map: SegmentMap::SqrtRight(b), lo: T::zero(), hi: (b - a).sqrt() }
            }
            _ => Segment { map: SegmentMap::Identity, lo: a, hi: b },
        }
    }
}

/// Result of a quadrature together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
    pub segments: usize,
}

/// Tolerances and budget for [`Quadrature::integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_segments: usize,
}

impl<T: Real> Default for Quadrature<T> {
    fn default() -> Self {
        Quadrature { rel_tol: cst(1e-10), abs_tol: T::zero(), max_segments: 200_000 }
    }
}

struct Piece<T> {
    seg: Segment<T>,
    value: T,
    error: T,
    key: f64,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl<T> Eq for Piece<T> {}
impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

/// One 21-point Gauss–Kronrod evaluation with the QUADPACK error heuristic.
fn gk21<T, F>(f: &F, seg: &Segment<T>) -> Result<(T, T)>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    let center = (seg.lo + seg.hi) * cst(0.5);
    let half = (seg.hi - seg.lo) * cst(0.5);
    let eval = |s: T| -> Result<T> {
        let (x, jac) = seg.map.apply(s);
        let v = f(x)?;
        Ok(if jac == T::zero() || v == T::zero() { T::zero() } else { v * jac })
    };

    let fc = eval(center)?;
    let mut res_k = fc * cst(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half * cst(XGK[j]);
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += cst::<T>(WGK[j]) * (f1 + f2);
        res_abs += cst::<T>(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += cst::<T>(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * cst(0.5);
    let mut res_asc = cst::<T>(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc += cst::<T>(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != T::zero() && err != T::zero() {
        let scale = (cst::<T>(200.0) * err / res_asc).powf(cst(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor = cst::<T>(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (cst::<T>(50.0) * T::epsilon()) && floor > err {
        err = floor;
    }
    if !value.is_finite() {
        return Err(Error::Quadrature {
            lo: f64_of(seg.lo),
            hi: f64_of(seg.hi),
            estimate: f64_of(value),
            residual: f64::INFINITY,
        });
    }
    Ok((value, err))
}

impl<T: Real> Quadrature<T> {
    pub fn with_rel_tol(rel_tol: T) -> Self {
        Quadrature { rel_tol, ..Self::default() }
    }

    /// Integrates `f` over the union of `segments`.
    pub fn integrate_segments<F>(&self, f: F, segments: &[Segment<T>]) -> Result<Estimate<T>>
    where
        F: Fn(T) -> Result<T>,
    {
        let mut heap = BinaryHeap::with_capacity(segments.len() * 2);
        let mut frozen_value = T::zero();
        let mut frozen_error = T::zero();
        let mut evaluations = 0usize;
        for seg in segments {
            if seg.hi <= seg.lo {
                continue;
            }
            let (value, error) = gk21(&f, seg)?;
            evaluations += 21;
            heap.push(Piece { seg: *seg, value, error, key: f64_of(error) });
        }

        loop {
            let (mut total, mut total_err) = (frozen_value, frozen_error);
            for p in heap.iter() {
                total += p.value;
                total_err += p.error;
            }
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if total_err <= tol {
                return Ok(Estimate { value: total, error: total_err, evaluations, segments: heap.len() });
            }
            let count = heap.len();
            let worst = match heap.pop() {
                Some(p) => p,
                None => {
                    return Err(Error::Quadrature {
                        lo: f64::NAN,
                        hi: f64::NAN,
                        estimate: f64_of(total),
                        residual: f64_of(total_err),
                    })
                }
            };
            if count >= self.max_segments {
                return Err(Error::Quadrature {
                    lo: f64_of(worst.seg.map.apply(worst.seg.lo).0),
                    hi: f64_of(worst.seg.map.apply(worst.seg.hi).0),
                    estimate: f64_of(total),
                    residual: f64_of(total_err),
                });
            }
            let mid = (worst.seg.lo + worst.seg.hi) * cst(0.5);
            let width = worst.seg.hi - worst.seg.lo;
            let scale = worst.seg.lo.abs().max(worst.seg.hi.abs()).max(T::min_positive_value());
            if width <= cst::<T>(64.0) * T::epsilon() * scale {
                // Cannot be resolved further in this precision.
                frozen_value += worst.value;
                frozen_error += worst.error;
                if heap.is_empty() || frozen_error > tol {
                    return Err(Error::Quadrature {
                        lo: f64_of(worst.seg.map.apply(worst.seg.lo).0),
                        hi: f64_of(worst.seg.map.apply(worst.seg.hi).0),
                        estimate: f64_of(total),
                        residual: f64_of(total_err),
                    });
                }
                continue;
            }
            for half in [
                Segment { map: worst.seg.map, lo: worst.seg.lo, hi: mid },
                Segment { map: worst.seg.map, lo: mid, hi: worst.seg.hi },
            ] {
                let (value, error) = gk21(&f, &half)?;
                evaluations += 21;
                heap.push(Piece { seg: half, value, error, key: f64_of(error) });
            }
        }
    }

    /// Integrates `f` over `[points[0], points[last]]`, using every point as an
    /// initial breakpoint. Endpoints may be infinite; a doubly infinite range is
    /// split at zero unless a finite breakpoint is supplied.
    pub fn integrate<F>(&self, f: F, points: &[T]) -> Result<Estimate<T>>
    where
        F: Fn(T) -> Result<T>,
    {
        self.integrate_with_singularities(f, points, &[])
    }

    /// As [`Quadrature::integrate`], with integrable `1/sqrt` singularities at
    /// the listed points (which are added as breakpoints).
    pub fn integrate_with_singularities<F>(&self, f: F, points: &[T], singular: &[T]) -> Result<Estimate<T>>
    where
        F: Fn(T) -> Result<T>,
    {
        let segments = segments_from_points(points, singular);
        self.integrate_segments(f, &segments)
    }
}

/// Sorts, deduplicates and splits breakpoints into initial segments.
pub fn segments_from_points<T: Real>(points: &[T], singular: &[T]) -> Vec<Segment<T>> {
    assert!(points.len() >= 2, "need at least the two integration limits");
    let lo = points.iter().copied().fold(T::infinity(), T::min);
    let hi = points.iter().copied().fold(T::neg_infinity(), T::max);
    let mut pts: Vec<T> =
        points.iter().chain(singular.iter()).copied().filter(|p| !p.is_nan() && *p >= lo && *p <= hi).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    pts.dedup();
    if lo.is_infinite() && hi.is_infinite() && pts.len() == 2 {
        pts.insert(1, T::zero());
    }
    let is_singular = |x: T| singular.contains(&x);
    pts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if a.is_infinite() && b.is_infinite() {
                unreachable!("split above");
            }
            // A tail segment that starts on a singular point gets an extra
            // finite piece so that both maps can be applied.
            Segment::between(a, b, is_singular(a) && a.is_finite(), is_singular(b) && b.is_finite())
        })
        .flat_map(|seg| split_singular_tail(seg, &is_singular))
        .collect()
}

fn split_singular_tail<T: Real>(seg: Segment<T>, is_singular: &dyn Fn(T) -> bool) -> Vec<Segment<T>> {
    match seg.map {
        SegmentMap::UpperTail(a) if is_singular(a) => {
            let w = a.abs().max(T::one());
            vec![Segment::between(a, a + w, true, false), Segment::between(a + w, T::infinity(), false, false)]
        }
        SegmentMap::LowerTail(b) if is_singular(b) => {
            let w = b.abs().max(T::one());
            vec![Segment::between(T::neg_infinity(), b - w, false, false), Segment::between(b - w, b, false, true)]
        }
        _ => vec![seg],
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((-x, w));
        if 2 * i + 1 != n {
            rule.push((x, w));
        }
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

/// Shared 32-point Gauss–Legendre rule.
pub fn gauss_legendre_32() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_high_degree_polynomials() {
        // The 21-point Kronrod extension integrates degree 31 exactly.
        let q = Quadrature::<f64>::default();
        let est = q.integrate(|x| Ok(x.powi(30) + 3.0 * x.powi(7)), &[-1.0, 1.0]).unwrap();
        assert!((est.value - 2.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn semi_infinite_and_doubly_infinite_tails() {
        let q = Quadrature::<f64>::default();
        let e = q.integrate(|x| Ok((-x).exp()), &[0.0, f64::INFINITY]).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        let g = q.integrate(|x| Ok((-x * x).exp()), &[f64::NEG_INFINITY, f64::INFINITY]).unwrap();
        assert!((g.value - std::f64::consts::PI.sqrt()).abs() < 1e-11);
        let l = q.integrate(|x| Ok(1.0 / (1.0 + x * x)), &[f64::NEG_INFINITY, -1.0, 1.0, f64::INFINITY]).unwrap();
        assert!((l.value - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn inverse_sqrt_endpoint_singularities() {
        let q = Quadrature::<f64>::default();
        let left = q.integrate_with_singularities(|x| Ok(1.0 / (x - 2.0).sqrt()), &[2.0, 6.0], &[2.0]).unwrap();
        assert!((left.value - 4.0).abs() < 1e-12);
        let right = q.integrate_with_singularities(|x| Ok(1.0 / (1.0 - x).sqrt()), &[0.0, 1.0], &[1.0]).unwrap();
        assert!((right.value - 2.0).abs() < 1e-12);
        // Singular start of an infinite tail: int_1^inf dx / (sqrt(x-1) x) = pi.
        let tail = q
            .integrate_with_singularities(|x| Ok(1.0 / ((x - 1.0).sqrt() * x)), &[1.0, f64::INFINITY], &[1.0])
            .unwrap();
        assert!((tail.value - std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn oscillatory_integrand_with_breakpoints() {
        let q = Quadrature::<f64>::default();
        let pts: Vec<f64> = (0..=200).map(|k| k as f64 * std::f64::consts::PI).collect();
        let e = q.integrate(|x| Ok(x.sin().powi(2)), &pts).unwrap();
        assert!((e.value - 100.0 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn exhausted_budget_reports_the_offending_interval() {
        let q = Quadrature { rel_tol: 1e-12, abs_tol: 0.0, max_segments: 8 };
        match q.integrate(|x: f64| Ok((1.0 / x).sin()), &[1e-6, 1.0]) {
            Err(Error::Quadrature { lo, hi, .. }) => assert!(lo < hi && hi <= 1.0),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn integrand_errors_propagate() {
        let q = Quadrature::<f64>::default();
        let r = q.integrate(|x| if x > 0.5 { Err(Error::Divergent("probe".into())) } else { Ok(x) }, &[0.0, 1.0]);
        assert_eq!(r, Err(Error::Divergent("probe".into())));
    }

    #[test]
    fn gauss_legendre_weights_and_moments() {
        for n in [1usize, 2, 7, 24, 32] {
            let rule = gauss_legendre(n);
            assert_eq!(rule.len(), n);
            let w: f64 = rule.iter().map(|r| r.1).sum();
            assert!((w - 2.0).abs() < 1e-13, "n = {n}");
            let deg = 2 * n - 2;
            let m: f64 = rule.iter().map(|r| r.1 * r.0.powi(deg as i32)).sum();
            assert!((m - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn works_in_single_precision() {
        let q = Quadrature::<f32>::with_rel_tol(1e-5);
        let e = q.integrate(|x| Ok(x.cos()), &[0.0, std::f32::consts::FRAC_PI_2]).unwrap();
        assert!((e.value - 1.0).abs() < 1e-5);
    }
}

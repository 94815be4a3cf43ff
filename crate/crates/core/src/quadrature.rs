//! Adaptive quadrature for thermal integrals with a `1/sinh^2(beta omega / 2)`
//! kernel.
//!
//! The integral is mapped to `x = beta * omega`, which makes the kernel
//! temperature independent, and then evaluated with globally adaptive
//! 21-point Gauss-Kronrod bisection. The error estimate of each panel is the
//! difference between the Kronrod and the embedded 10-point Gauss result.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Smallest admissible dimensionless cutoff `x_max = beta * omega_max`.
pub const MIN_X_MAX: f64 = 30.0;

/// Number of equal panels the thermal window is split into before
/// adaptive refinement starts.
const INITIAL_PANELS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Target relative error of the integral.
    pub rel_tol: f64,
    /// Upper cutoff of the dimensionless variable `x = beta * omega`.
    pub x_max: f64,
    /// Maximum number of panels before giving up.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            x_max: 45.0,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, x_max: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            rel_tol,
            x_max,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Result<Self> {
        Self::new(rel_tol, self.x_max, self.max_subdivisions)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1e-2) {
            return Err(Error::validation("rel_tol", format!("must lie in (0, 1e-2), got {}", self.rel_tol)));
        }
        if !(self.x_max >= MIN_X_MAX) || !self.x_max.is_finite() {
            return Err(Error::validation("x_max", format!("must be >= {MIN_X_MAX}, got {}", self.x_max)));
        }
        if self.max_subdivisions < INITIAL_PANELS {
            return Err(Error::validation(
                "max_subdivisions",
                format!("must be at least {INITIAL_PANELS}"),
            ));
        }
        Ok(())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of the per-panel error estimates.
    pub error: f64,
    pub panels: usize,
    /// Bound on the relative weight of the kernel beyond the cutoff,
    /// `4 exp(-x_cut)`.
    pub tail_bound: f64,
}

/// `1 / sinh^2(x / 2)` evaluated without overflow for large `x`.
pub fn sinh2_kernel(x: f64) -> f64 {
    let em1 = (-x).exp_m1();
    4.0 * (-x).exp() / (em1 * em1)
}

/// Integrates `g(omega) / sinh^2(beta omega / 2)` over `(0, x_max / beta]`.
///
/// `g` must behave like `omega^3` (or faster) at the origin.
pub fn thermal_integral<F>(g: F, beta: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> Result<f64>,
{
    thermal_integral_window(g, beta, spec.x_max / beta, &[], spec)
}

/// Like [`thermal_integral`] with an explicit upper limit `omega_max` and
/// panel breakpoints (angular frequencies) where the integrand has narrow
/// structure.
pub fn thermal_integral_window<F>(
    g: F,
    beta: f64,
    omega_max: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral>
where
    F: Fn(f64) -> Result<f64>,
{
    spec.validate()?;
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be positive and finite, got {beta}")));
    }
    if !(omega_max > 0.0) {
        return Err(Error::Domain(format!("upper limit must be positive, got {omega_max}")));
    }
    let x_cut = (beta * omega_max).min(spec.x_max);
    let mut edges: Vec<f64> = (0..=INITIAL_PANELS)
        .map(|i| x_cut * i as f64 / INITIAL_PANELS as f64)
        .collect();
    edges.extend(
        breakpoints
            .iter()
            .map(|w| beta * w)
            .filter(|&x| x > 0.0 && x < x_cut),
    );
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let integrand = |x: f64| -> Result<f64> {
        let omega = x / beta;
        let value = g(omega).map_err(|e| Error::Integrand {
            omega,
            source: Box::new(e),
        })?;
        Ok(value * sinh2_kernel(x) / beta)
    };
    let mut out = adaptive_gk21(integrand, &edges, spec.rel_tol, spec.max_subdivisions)?;
    out.tail_bound = 4.0 * (-x_cut).exp();
    Ok(out)
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64, max_panels: usize) -> Result<Integral>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(b > a) {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    adaptive_gk21(f, &[a, b], rel_tol, max_panels)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive_gk21<F>(f: F, edges: &[f64], rel_tol: f64, max_panels: usize) -> Result<Integral>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut heap = BinaryHeap::with_capacity(max_panels + 1);
    for w in edges.windows(2) {
        heap.push(gk21(&f, w[0], w[1])?);
    }
    let mut count = heap.len();
    loop {
        // Re-summing from scratch keeps the totals free of cancellation drift.
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= rel_tol * value.abs() || error == 0.0 {
            return Ok(Integral {
                value,
                error,
                panels: count,
                tail_bound: 0.0,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if count >= max_panels || !(mid > worst.a && mid < worst.b) {
            return Err(Error::Convergence {
                estimate: value,
                error,
                panels: count,
            });
        }
        heap.push(gk21(&f, worst.a, mid)?);
        heap.push(gk21(&f, mid, worst.b)?);
        count += 1;
    }
}

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

fn gk21<F>(f: &F, a: f64, b: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(10).enumerate() {
        let dx = half * x;
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += wk * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const ZETA3: f64 = 1.202_056_903_159_594_3;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn power(n: i32) -> impl Fn(f64) -> Result<f64> {
        move |w: f64| Ok(w.powi(n))
    }

    /// `int_0^inf w^n / sinh^2(w/2) dw = 4 n! zeta(n)` via
    /// `1/sinh^2(y) = 4 sum_k k exp(-2 k y)`, summed term by term.
    fn series_oracle(n: i32) -> f64 {
        let factorial: f64 = (1..=n).map(f64::from).product();
        let zeta: f64 = (1..200_000).map(|k| (k as f64).powi(-n)).sum();
        4.0 * factorial * zeta
    }

    #[test]
    fn kernel_is_stable() {
        assert!(rel(sinh2_kernel(1e-3), 1.0 / (5e-4f64).sinh().powi(2)) < 1e-12);
        assert!(rel(sinh2_kernel(3.0), 1.0 / 1.5f64.sinh().powi(2)) < 1e-14);
        assert!(rel(sinh2_kernel(700.0), 4.0 * (-700.0f64).exp()) < 1e-12);
        assert!(sinh2_kernel(2000.0) == 0.0);
    }

    #[test]
    fn cubic_moment() {
        let expected = 24.0 * ZETA3;
        assert!(rel(series_oracle(3), expected) < 1e-9);
        let r = thermal_integral(power(3), 1.0, &QuadratureSpec::default()).unwrap();
        assert!(rel(r.value, expected) < 1e-8, "{}", r.value);
        assert!(rel(r.value, 28.849_37) < 1e-6);
    }

    #[test]
    fn eighth_moment() {
        let expected = 256.0 / 15.0 * PI.powi(8);
        assert!(rel(series_oracle(8), expected) < 1e-12);
        let r = thermal_integral(power(8), 1.0, &QuadratureSpec::default()).unwrap();
        assert!(rel(r.value, expected) < 1e-8);
        assert!(rel(r.value, 1.619_37e5) < 1e-5);
    }

    #[test]
    fn zero_integrand() {
        let r = thermal_integral(|_| Ok(0.0), 3.0, &QuadratureSpec::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn scaling_law() {
        let spec = QuadratureSpec::default();
        for n in [3, 4, 5, 8] {
            let unit = thermal_integral(power(n), 1.0, &spec).unwrap().value;
            for beta in [0.01, 0.7, 42.0, 1059.6] {
                let scaled = thermal_integral(power(n), beta, &spec).unwrap().value;
                assert!(rel(scaled, beta.powi(-n - 1) * unit) < 1e-9, "n={n} beta={beta}");
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.0, 45.0, 2000).is_err());
        assert!(QuadratureSpec::new(0.05, 45.0, 2000).is_err());
        assert!(QuadratureSpec::new(1e-9, 29.0, 2000).is_err());
        assert!(QuadratureSpec::new(1e-9, 30.0, 2000).is_ok());
    }

    #[test]
    fn convergence_failure_carries_estimate() {
        let spec = QuadratureSpec::new(1e-12, 45.0, 8).unwrap();
        let rough = |w: f64| Ok(w.powi(3) * (1.0 + (40.0 * w).sin().abs()));
        match thermal_integral(rough, 1.0, &spec) {
            Err(Error::Convergence { estimate, error, panels }) => {
                assert!(estimate > 0.0 && error > 0.0 && panels == 8);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn integrand_error_carries_omega() {
        let g = |w: f64| {
            if w > 2.0 {
                Err(Error::Domain("boom".into()))
            } else {
                Ok(w.powi(3))
            }
        };
        match thermal_integral(g, 1.0, &QuadratureSpec::default()) {
            Err(Error::Integrand { omega, source }) => {
                assert!(omega > 2.0);
                assert!(matches!(*source, Error::Domain(_)));
            }
            other => panic!("expected integrand error, got {other:?}"),
        }
    }

    #[test]
    fn narrow_peak_needs_breakpoint() {
        // Lorentzian of width 1e-6 at omega = 3: area ~ pi
        let g = |w: f64| Ok(w.powi(3) * 1e-6 / ((w - 3.0).powi(2) + 1e-12));
        let spec = QuadratureSpec::default();
        let with = thermal_integral_window(g, 1.0, 45.0, &[3.0], &spec).unwrap().value;
        let expected = PI * 27.0 * sinh2_kernel(3.0);
        assert!(rel(with, expected) < 1e-4, "{with} vs {expected}");
    }

    #[test]
    fn finite_interval() {
        let r = integrate(|x: f64| Ok(x.cos()), 0.0, 1.0, 1e-12, 100).unwrap();
        assert!(rel(r.value, 1f64.sin()) < 1e-13);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn monotone_in_integrand(a in 0.0f64..3.0, b in 0.01f64..2.0, beta in 0.1f64..50.0) {
            let spec = QuadratureSpec::default();
            let lo = thermal_integral(|w| Ok(a * w.powi(3)), beta, &spec).unwrap().value;
            let hi = thermal_integral(|w| Ok(a * w.powi(3) + b * w.powi(4) / (1.0 + w)), beta, &spec)
                .unwrap()
                .value;
            prop_assert!(hi >= lo);
        }
    }
}

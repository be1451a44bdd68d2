//! Adaptive Gauss–Kronrod quadrature over a list of starting panels.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values a quadrature rule can accumulate.
pub trait Quad: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Quad for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Quad for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

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
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
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

/// One 21-point Kronrod panel.
#[derive(Debug, Clone, Copy)]
pub struct Panel<T> {
    pub a: f64,
    pub b: f64,
    pub value: T,
    pub error: f64,
    /// Estimate of `∫|f|`, used for the roundoff floor.
    pub abs_integral: f64,
}

pub fn gk21<T: Quad, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Result<Panel<T>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = T::zero();
    let mut resabs = WGK[10] * fc.magnitude();
    let mut fv = [T::zero(); 21];
    fv[20] = fc;
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod = kronrod + (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        resasc += WGK[j] * ((fv[2 * j] - mean).magnitude() + (fv[2 * j + 1] - mean).magnitude());
    }
    let value = kronrod * half;
    let raw = ((kronrod - gauss) * half).magnitude();
    let resasc = resasc * half.abs();
    let mut error = raw;
    if resasc > 0.0 && raw > 0.0 {
        error = resasc * (200.0 * raw / resasc).powf(1.5).min(1.0);
    }
    let abs_integral = resabs * half.abs();
    if !(value.magnitude().is_finite() && error.is_finite()) {
        return Err(Error::NonConvergence {
            method: "Gauss-Kronrod panel (non-finite integrand)",
            residual: f64::INFINITY,
        });
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        abs_integral,
    })
}

/// Sum of panels, their error estimates and the work spent.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

struct Queued<T>(Panel<T>);

impl<T> PartialEq for Queued<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Queued<T> {}
impl<T> PartialOrd for Queued<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Queued<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .total_cmp(&other.0.error)
            .then_with(|| other.0.a.total_cmp(&self.0.a))
    }
}

/// Tolerances and work limit for [`integrate_panels`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64, max_panels: usize) -> Self {
        Self {
            abs,
            rel,
            max_panels,
        }
    }
}

/// Globally adaptive bisection starting from `edges` (sorted breakpoints).
/// The worst panel is split until the summed error meets
/// `max(abs, rel·|I|)`, the roundoff floor `50ε∫|f|`, or only
/// roundoff-limited panels remain. The final sum
/// runs left to right so results do not depend on the heap order.
pub fn integrate_panels<T: Quad, F: FnMut(f64) -> T>(
    mut f: F,
    edges: &[f64],
    tol: Tolerance,
) -> Result<QuadResult<T>> {
    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Panel<T>> = Vec::new();
    for w in edges.windows(2) {
        if w[1] > w[0] {
            heap.push(Queued(gk21(&mut f, w[0], w[1])?));
        }
    }
    let mut count = heap.len();
    let mut total_err: f64 = heap.iter().map(|q| q.0.error).sum();
    let mut running = heap.iter().fold(T::zero(), |acc, q| acc + q.0.value);
    let mut abs_total: f64 = heap.iter().map(|q| q.0.abs_integral).sum();
    loop {
        let floor = 50.0 * f64::EPSILON * abs_total;
        let target = tol.abs.max(tol.rel * running.magnitude()).max(floor);
        if total_err <= target {
            break;
        }
        let Some(Queued(worst)) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        let roundoff = 50.0 * f64::EPSILON * worst.abs_integral;
        if worst.error <= roundoff || !(mid > worst.a && mid < worst.b) {
            // Cannot improve this panel any further.
            total_err -= worst.error;
            settled.push(worst);
            continue;
        }
        if count >= tol.max_panels {
            return Err(Error::PanelBudget {
                budget: tol.max_panels,
                worst_start: worst.a,
                worst_end: worst.b,
                worst_error: worst.error,
            });
        }
        let left = gk21(&mut f, worst.a, mid)?;
        let right = gk21(&mut f, mid, worst.b)?;
        total_err += left.error + right.error - worst.error;
        running = running + left.value + right.value - worst.value;
        abs_total += left.abs_integral + right.abs_integral - worst.abs_integral;
        count += 1;
        heap.push(Queued(left));
        heap.push(Queued(right));
    }
    let mut all: Vec<Panel<T>> = heap.into_iter().map(|q| q.0).chain(settled).collect();
    all.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = T::zero();
    let mut error = 0.0;
    let mut abs_integral = 0.0;
    for p in &all {
        value = value + p.value;
        error += p.error;
        abs_integral += p.abs_integral;
    }
    Ok(QuadResult {
        value,
        error: error + 50.0 * f64::EPSILON * abs_integral,
        panels: count,
    })
}

/// Convenience wrapper for a single interval.
pub fn integrate<T: Quad, F: FnMut(f64) -> T>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult<T>> {
    integrate_panels(f, &[a, b], tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        // Kronrod-21 integrates degree ≤ 31 exactly.
        let mut f = |x: f64| x.powi(30) + 3.0 * x.powi(7);
        let p = gk21(&mut f, -1.0, 2.0).unwrap();
        let exact = (2f64.powi(31) + 1.0) / 31.0 + 3.0 * (2f64.powi(8) - 1.0) / 8.0;
        assert!((p.value / exact - 1.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, Tolerance::new(1e-12, 0.0, 10_000)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
        assert!((r.value - 2.0).abs() <= r.error.max(1e-12));
    }

    #[test]
    fn complex_oscillatory() {
        let w = 40.0;
        let r = integrate(
            |t: f64| Complex64::new(0.0, w * t).exp(),
            0.0,
            3.0,
            Tolerance::new(1e-13, 0.0, 10_000),
        )
        .unwrap();
        let exact = (Complex64::new(0.0, 3.0 * w).exp() - 1.0) / Complex64::new(0.0, w);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn budget_is_reported() {
        let err = integrate(|x: f64| (1.0 / x).sin() / x, 1e-9, 1.0, Tolerance::new(1e-14, 0.0, 20)).unwrap_err();
        assert!(matches!(err, Error::PanelBudget { budget: 20, .. }));
    }

    #[test]
    fn breakpoints_are_respected() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 0.0 };
        let r = integrate_panels(f, &[0.0, 0.3, 1.0], Tolerance::new(1e-14, 0.0, 10)).unwrap();
        assert!((r.value - 0.3).abs() < 1e-15);
    }
}

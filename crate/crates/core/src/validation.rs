//! Self-checks: special-function identities, closed forms against
//! quadrature, hemisphere identities, asymptotic fits and the Landau
//! criterion. Each check reports the measured deviation and its tolerance.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::condensate::{bogoliubov_omega, free_energy, Condensate, CondensateParams, Mode};
use crate::error::Result;
use crate::phase_integral::{
    integrate_closed_exponential, integrate_closed_uniform_acceleration, integrate_numeric, RegulatorKind,
    RegulatorSpec, Window,
};
use crate::specfun::{bessel_k1, log_gamma, lower_incomplete_gamma};
use crate::spectrum::{
    cherenkov_rate, exponential_spectrum, exponential_spectrum_windowed, fit_line, fit_power_law, prefactor,
    total_energy, uniform_acceleration_spectrum, EnergyGrid, Hemisphere, SpectrumSource,
};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    /// Informational checks report but never fail the suite.
    pub informational: bool,
    pub note: String,
}

impl Check {
    fn within(name: &'static str, measured: f64, tolerance: f64, note: impl Into<String>) -> Self {
        Self {
            name,
            passed: measured <= tolerance,
            measured,
            tolerance,
            informational: false,
            note: note.into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    /// Seed of the Monte Carlo Cherenkov oracle.
    pub seed: u64,
    pub monte_carlo_samples: usize,
    /// Relative perturbation applied to K₁ before it is checked. Only for
    /// testing that the suite notices a broken special function.
    pub k1_perturbation: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            monte_carlo_samples: 4_000_000,
            k1_perturbation: 0.0,
        }
    }
}

/// Runs every check in a fixed order.
pub fn run_suite(opts: &ValidationOptions) -> Result<Vec<Check>> {
    Ok(vec![
        gamma_imaginary_axis()?,
        bessel_k1_integral(opts.k1_perturbation)?,
        incomplete_gamma_recurrence()?,
        exponential_window_quadrature()?,
        planck_reproduction()?,
        hemisphere_identities()?,
        acceleration_quadrature()?,
        acceleration_axis_zero()?,
        infrared_exponent_full_line()?,
        infrared_exponent_window()?,
        acceleration_uv_slope_check()?,
        window_uv_envelope()?,
        landau_criterion()?,
        cherenkov_monte_carlo_check(opts.seed, opts.monte_carlo_samples)?,
        weak_acceleration_scaling()?,
        divergence_detection()?,
        regulator_dependence()?.check(),
    ])
}

fn unit_condensate() -> Condensate {
    Condensate::new(CondensateParams::natural(1.0)).expect("natural parameters are valid")
}

/// `k` with `ω_k = omega`.
pub fn wavenumber_for_omega(omega: f64) -> f64 {
    (2.0 * ((1.0 + omega * omega).sqrt() - 1.0)).sqrt()
}

pub fn gamma_imaginary_axis() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for i in 0..=400 {
        let x = 0.05 + (20.0 - 0.05) * i as f64 / 400.0;
        let g2 = (2.0 * log_gamma(Complex64::new(0.0, x))?.re).exp();
        worst = worst.max((g2 * x * (PI * x).sinh() / PI - 1.0).abs());
    }
    Ok(Check::within("gamma_imaginary_axis", worst, 1e-9, "|Γ(ix)|² x sinh(πx) = π on [0.05, 20]"))
}

/// `K₁(x) = ∫₀^∞ e^{−x cosh t} cosh t dt` by the trapezoid rule.
fn k1_trapezoid(x: f64) -> f64 {
    let h: f64 = 0.005;
    let mut acc = 0.5 * (-x).exp();
    let mut t = h;
    loop {
        let v = (-x * t.cosh()).exp() * t.cosh();
        acc += v;
        if v < 1e-30 * acc {
            break;
        }
        t += h;
    }
    acc * h
}

pub fn bessel_k1_integral(perturbation: f64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        let x = 10f64.powf(-2.0 + 3.5 * i as f64 / 40.0);
        let v = bessel_k1(x)? * (1.0 + perturbation);
        worst = worst.max((v / k1_trapezoid(x) - 1.0).abs());
    }
    Ok(Check::within("bessel_k1_integral", worst, 1e-9, "K₁ against its integral representation on [0.01, 30]"))
}

pub fn incomplete_gamma_recurrence() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for &s in &[Complex64::new(0.0, -0.7), Complex64::new(0.0, -3.0), Complex64::new(1.5, 2.0)] {
        for &z in &[Complex64::new(0.0, 0.5), Complex64::new(0.0, -4.0), Complex64::new(0.0, 20.0)] {
            let lhs = lower_incomplete_gamma(s + 1.0, z)?;
            let zs = (s * z.ln()).exp();
            let rhs = s * lower_incomplete_gamma(s, z)? - zs * (-z).exp();
            worst = worst.max((lhs - rhs).norm() / lhs.norm().max(zs.norm()));
        }
    }
    Ok(Check::within("incomplete_gamma_recurrence", worst, 1e-9, "γ(s+1, z) = sγ(s, z) − zˢe^{−z}"))
}

pub const EXP_OMEGAS: [f64; 5] = [0.2, 0.5, 1.0, 2.0, 5.0];
pub const EXP_BETAS: [f64; 5] = [-3.0, -1.2, -0.4, 0.7, 3.0];
pub const EXP_WINDOWS: [(f64, f64); 4] = [(0.0, 2.0), (-1.0, 3.0), (-3.0, 0.5), (1.0, 6.0)];

/// Largest relative difference between the incomplete-gamma closed form and
/// adaptive quadrature over `EXP_OMEGAS × EXP_BETAS × EXP_WINDOWS` with `Γ₀ = 1`.
pub fn exponential_window_deviation() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &omega in &EXP_OMEGAS {
        let k = wavenumber_for_omega(omega);
        let mode = Mode::new(k, 0.0)?;
        for &beta in &EXP_BETAS {
            let zeta0 = beta / k;
            let traj = Trajectory::exponential_decay(zeta0, 1.0)?;
            for &(a, b) in &EXP_WINDOWS {
                let window = Window::new(a, b)?;
                let closed = integrate_closed_exponential(&mode, zeta0, 1.0, window)?;
                let numeric = integrate_numeric(&mode, &traj, window, &RegulatorSpec::none(), 1e-12)?;
                worst = worst.max((closed.value - numeric.value).norm() / closed.value.norm());
            }
        }
    }
    Ok(worst)
}

pub fn exponential_window_quadrature() -> Result<Check> {
    Ok(Check::within(
        "exponential_window_quadrature",
        exponential_window_deviation()?,
        1e-6,
        "incomplete-γ closed form vs adaptive quadrature, 5×5×4 grid",
    ))
}

pub const PLANCK_OMEGAS: [f64; 6] = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0];

/// `|I|²` of the full-line exponential path from an exponential-regulator
/// ladder, against the Planck form, as the largest relative deviation.
pub fn planck_deviation() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &omega in &PLANCK_OMEGAS {
        let k = wavenumber_for_omega(omega);
        let mode = Mode::new(k, 0.0)?;
        for beta in [1.0, -1.0] {
            let traj = Trajectory::exponential_decay(beta / k, 1.0)?;
            let reg = RegulatorSpec::geometric(RegulatorKind::Exponential, 0.05 * omega, 0.5, 6, 5)?;
            let v = integrate_numeric(&mode, &traj, Window::full(), &reg, 1e-11)?;
            let x = 2.0 * PI * omega;
            let planck = if beta > 0.0 { 1.0 / x.exp_m1() } else { -1.0 / (-x).exp_m1() };
            let expect = 2.0 * PI / omega * planck;
            worst = worst.max((v.norm_sqr() / expect - 1.0).abs());
        }
    }
    Ok(worst)
}

pub fn planck_reproduction() -> Result<Check> {
    Ok(Check::within(
        "planck_reproduction",
        planck_deviation()?,
        0.01,
        "regulated full-line |I|² vs (2π/ωΓ₀)·Planck factor, ω/Γ₀ ∈ [0.1, 5]",
    ))
}

/// Worst deviation of the hemisphere ratio and of the Bose identity.
pub fn hemisphere_deviation() -> Result<(f64, f64)> {
    let cond = unit_condensate();
    let (mut ratio, mut bose): (f64, f64) = (0.0, 0.0);
    for &k in &[0.01, 0.3, 1.0, 3.0, 10.0] {
        for &rate in &[0.2, 1.0, 5.0] {
            let up = exponential_spectrum(&cond, rate, k, 0.7, Hemisphere::Upper)?;
            let lo = exponential_spectrum(&cond, rate, k, 0.7, Hemisphere::Lower)?;
            let w = up.omega;
            let expect = (-2.0 * PI * w / rate).exp();
            ratio = ratio.max((up.dn_dk_domega / lo.dn_dk_domega / expect - 1.0).abs());
            let mode = Mode::new(k, 0.7)?;
            let diff = prefactor(&cond) * mode.energy_ratio() * 2.0 * PI / (w * rate) * k * k;
            bose = bose.max(((lo.dn_dk_domega - up.dn_dk_domega) / diff - 1.0).abs());
        }
    }
    Ok((ratio, bose))
}

pub fn hemisphere_identities() -> Result<Check> {
    let (ratio, bose) = hemisphere_deviation()?;
    Ok(Check::within(
        "hemisphere_identities",
        ratio.max(bose),
        1e-9,
        format!("upper/lower = e^(-2πω/Γ₀) off by {ratio:.1e}; Bose difference off by {bose:.1e}"),
    ))
}

pub const ACCEL_KS: [f64; 3] = [0.5, 1.0, 2.0];
pub const ACCEL_THETAS: [f64; 5] = [0.0, 0.5, 1.0, 2.2, PI];

/// Largest relative difference between the regulated numeric integral for
/// hyperbolic motion (`a = 1`) and `i(2/a)K₁(μ) sinh σ`.
pub fn acceleration_deviation() -> Result<f64> {
    let traj = Trajectory::uniform_acceleration(1.0)?;
    let mut worst: f64 = 0.0;
    for &k in &ACCEL_KS {
        for &theta in &ACCEL_THETAS {
            let mode = Mode::new(k, theta)?;
            let gap = mode.omega - mode.kz().abs();
            let reg = RegulatorSpec::geometric(RegulatorKind::Gaussian, 0.02 * gap * gap, 0.5, 5, 4)?;
            let numeric = integrate_numeric(&mode, &traj, Window::full(), &reg, 1e-11)?;
            let closed = integrate_closed_uniform_acceleration(&mode, 1.0)?;
            worst = worst.max((numeric.value - closed.value).norm() / closed.value.norm());
        }
    }
    Ok(worst)
}

pub fn acceleration_quadrature() -> Result<Check> {
    Ok(Check::within(
        "acceleration_quadrature",
        acceleration_deviation()?,
        1e-5,
        "regulated quadrature vs i(2/a)K₁(μ)sinh σ",
    ))
}

pub fn acceleration_axis_zero() -> Result<Check> {
    let cond = unit_condensate();
    let mut worst: f64 = 0.0;
    for &k in &[0.1, 1.0, 5.0] {
        worst = worst.max(uniform_acceleration_spectrum(&cond, 1.0, k, 0.5 * PI)?.dn_dk_domega.abs());
    }
    Ok(Check::within("acceleration_axis_zero", worst, 0.0, "no emission at θ = π/2"))
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Power-law fit of the full-line exponential spectrum (`Γ₀ = 1`) on
/// `k ∈ [10⁻⁴, 10⁻²]`, upper hemisphere at `θ = 0.3`.
pub fn infrared_fit_full_line() -> Result<crate::spectrum::PowerLawFit> {
    let cond = unit_condensate();
    let ks = log_grid(1e-4, 1e-2, 12);
    let dn: Vec<f64> = ks
        .iter()
        .map(|&k| exponential_spectrum(&cond, 1.0, k, 0.3, Hemisphere::Upper).map(|p| p.dn_dk_domega))
        .collect::<Result<_>>()?;
    fit_power_law(&ks, &dn)
}

pub fn infrared_exponent_full_line() -> Result<Check> {
    let fit = infrared_fit_full_line()?;
    Ok(Check::within(
        "infrared_exponent_full_line",
        (fit.exponent - 1.0).abs(),
        0.03,
        format!("dn ∝ k^{:.4}", fit.exponent),
    ))
}

/// Exponent of the finite-window (`[0, 5]`, `Γ₀ = ζ₀ = 1`) spectrum on
/// `k ∈ [10⁻⁴, 10⁻²]`.
pub fn infrared_fit_window() -> Result<crate::spectrum::PowerLawFit> {
    let cond = unit_condensate();
    let window = Window::new(0.0, 5.0)?;
    let ks = log_grid(1e-4, 1e-2, 12);
    let dn: Vec<f64> = ks
        .iter()
        .map(|&k| exponential_spectrum_windowed(&cond, 1.0, 1.0, window, k, 0.3).map(|p| p.dn_dk_domega))
        .collect::<Result<_>>()?;
    fit_power_law(&ks, &dn)
}

pub fn infrared_exponent_window() -> Result<Check> {
    let fit = infrared_fit_window()?;
    Ok(Check::within(
        "infrared_exponent_window",
        (fit.exponent - 3.0).abs(),
        0.05,
        format!("dn ∝ k^{:.4}", fit.exponent),
    ))
}

/// Slope of `ln dE` against `k²` for hyperbolic motion on the axis,
/// `k ∈ [6, 12]` (three to six coherence lengths), at acceleration `a`.
pub fn acceleration_uv_slope(a: f64) -> Result<f64> {
    let cond = unit_condensate();
    let ks: Vec<f64> = (0..=12).map(|i| 6.0 + 0.5 * i as f64).collect();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for &k in &ks {
        let p = uniform_acceleration_spectrum(&cond, a, k, 0.0)?;
        x.push(k * k);
        y.push(p.de_dk_domega.ln());
    }
    Ok(fit_line(&x, &y)?.0)
}

pub fn acceleration_uv_slope_check() -> Result<Check> {
    let slope = acceleration_uv_slope(1.0)?;
    Ok(Check::within(
        "acceleration_uv_slope",
        (slope + 1.0).abs(),
        0.02,
        format!("d ln dE / d k² = {slope:.4} at a = 1"),
    ))
}

/// Envelope exponent of the finite-window spectrum at high `k`: the maximum
/// of `dn` in each of eight logarithmic bins on `[20, 320]`, fitted to a
/// power law.
pub fn window_uv_envelope_exponent() -> Result<f64> {
    let cond = unit_condensate();
    let window = Window::new(0.0, 5.0)?;
    let edges = log_grid(20.0, 320.0, 9);
    let mut centers = Vec::new();
    let mut maxima = Vec::new();
    for w in edges.windows(2) {
        let mut best: f64 = 0.0;
        for i in 0..400 {
            let k = w[0] + (w[1] - w[0]) * (i as f64 + 0.5) / 400.0;
            best = best.max(exponential_spectrum_windowed(&cond, 1.0, 1.0, window, k, 0.0)?.dn_dk_domega);
        }
        centers.push((w[0] * w[1]).sqrt());
        maxima.push(best);
    }
    Ok(fit_power_law(&centers, &maxima)?.exponent)
}

pub fn window_uv_envelope() -> Result<Check> {
    let p = window_uv_envelope_exponent()?;
    Ok(Check::within(
        "window_uv_envelope",
        (p + 2.0).abs(),
        0.1,
        format!("envelope ∝ k^{p:.4}"),
    ))
}

pub fn landau_criterion() -> Result<Check> {
    let cond = unit_condensate();
    let mut zero_violation: f64 = 0.0;
    for v in [0.0, 0.3, 0.9, 1.0] {
        zero_violation = zero_violation.max(cherenkov_rate(&cond, v, 50.0)?.abs());
    }
    let rates: Vec<f64> = [1.2, 1.5, 2.0]
        .iter()
        .map(|&v| cherenkov_rate(&cond, v, 50.0))
        .collect::<Result<_>>()?;
    let monotone = rates[0] > 0.0 && rates.windows(2).all(|w| w[1] > w[0]);
    let mut check = Check::within(
        "landau_criterion",
        zero_violation,
        0.0,
        format!("rates at v = 1.2, 1.5, 2: {:.4e}, {:.4e}, {:.4e}", rates[0], rates[1], rates[2]),
    );
    check.passed &= monotone;
    Ok(check)
}

/// Brute-force estimate of the Cherenkov rate: `k` uniform in a cube, the
/// Doppler delta replaced by a normalized Gaussian of width `sigma`.
/// Returns the estimate and its standard error.
pub fn cherenkov_monte_carlo(
    cond: &Condensate,
    speed: f64,
    k_max: f64,
    sigma: f64,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = speed.abs();
    let cone = if v > 1.0 { 2.0 * (v * v - 1.0).sqrt() } else { 0.0 };
    let half = cone.min(k_max) + 12.0 * sigma;
    let volume = (2.0 * half).powi(3);
    let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
    let weight = prefactor(cond) * 2.0 * PI;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let kx: f64 = rng.gen_range(-half..half);
        let ky: f64 = rng.gen_range(-half..half);
        let kz: f64 = rng.gen_range(-half..half);
        let k = (kx * kx + ky * ky + kz * kz).sqrt();
        let f = if k == 0.0 || k > k_max {
            0.0
        } else {
            let d = (bogoliubov_omega(k) - kz * v) / sigma;
            weight * free_energy(k) * norm * (-0.5 * d * d).exp()
        };
        sum += f;
        sum_sq += f * f;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    (volume * mean, volume * (var / n).sqrt())
}

pub fn cherenkov_monte_carlo_check(seed: u64, samples: usize) -> Result<Check> {
    let cond = unit_condensate();
    let mut worst: f64 = 0.0;
    let mut note = String::new();
    for (i, v) in [1.2, 1.5, 2.0].into_iter().enumerate() {
        let exact = cherenkov_rate(&cond, v, 50.0)?;
        let (mc, se) = cherenkov_monte_carlo(&cond, v, 50.0, 0.02, samples, seed.wrapping_add(i as u64));
        let z = (mc - exact).abs() / se;
        worst = worst.max(z);
        note.push_str(&format!("v={v}: z={z:.2} "));
    }
    Ok(Check::within("cherenkov_monte_carlo", worst, 3.0, note.trim_end().to_string()))
}

/// `E(4a)/E(a)` for weak hyperbolic motion, `a = 2.5·10⁻⁴`.
pub fn weak_acceleration_ratio() -> Result<(f64, f64, f64)> {
    let cond = unit_condensate();
    let a = 2.5e-4;
    let energy = |acc: f64| -> Result<f64> {
        let src = SpectrumSource::new(
            Trajectory::uniform_acceleration(acc)?,
            Window::full(),
            RegulatorSpec::none(),
            1e-10,
        );
        Ok(total_energy(&cond, &src, 12.0 * acc.sqrt(), &EnergyGrid::default())?.total)
    };
    let (e1, e4) = (energy(a)?, energy(4.0 * a)?);
    Ok((e4 / e1, e1, e4))
}

pub fn weak_acceleration_scaling() -> Result<Check> {
    let (ratio, e1, _) = weak_acceleration_ratio()?;
    Ok(Check::within(
        "weak_acceleration_scaling",
        (ratio - 2.0).abs() / 2.0,
        0.05,
        format!("E(4a)/E(a) = {ratio:.5}; E(a)/sqrt(a) = {:.5}", e1 / 2.5e-4f64.sqrt()),
    ))
}

/// Full-line exponential path: energy reports at `k_max` and `2k_max`.
pub fn divergence_reports(k_max: f64) -> Result<(crate::spectrum::EnergyReport, crate::spectrum::EnergyReport)> {
    let cond = unit_condensate();
    let src = SpectrumSource::new(
        Trajectory::exponential_decay(1.0, 1.0)?,
        Window::full(),
        RegulatorSpec::none(),
        1e-10,
    );
    let grid = EnergyGrid::default();
    Ok((
        total_energy(&cond, &src, k_max, &grid)?,
        total_energy(&cond, &src, 2.0 * k_max, &grid)?,
    ))
}

pub fn divergence_detection() -> Result<Check> {
    let (r1, r2) = divergence_reports(10.0)?;
    let drift = (r2.upper - r1.upper).abs();
    let bar = r1.truncation_error + r2.truncation_error;
    let mut check = Check::within(
        "divergence_detection",
        drift,
        bar,
        format!(
            "lower flagged: {}, upper flagged: {}, upper drift under cutoff doubling {drift:.2e}",
            r1.lower_divergent, r1.upper_divergent
        ),
    );
    check.passed &= r1.lower_divergent && !r1.upper_divergent;
    Ok(check)
}

/// One grid point of the regulator comparison.
#[derive(Debug, Clone, Serialize)]
pub struct RegulatorComparison {
    pub omega_over_gamma: f64,
    pub hemisphere: Hemisphere,
    pub exponential: Option<(Complex64, f64)>,
    pub gaussian: Option<(Complex64, f64)>,
}

impl RegulatorComparison {
    /// `|ΔI| / (σ_exp + σ_gauss)` when both ladders converged.
    pub fn separation(&self) -> Option<f64> {
        let (e, se) = self.exponential?;
        let (g, sg) = self.gaussian?;
        Some((e - g).norm() / (se + sg))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegulatorDiagnostic {
    pub points: Vec<RegulatorComparison>,
}

impl RegulatorDiagnostic {
    pub fn resolved_differences(&self) -> usize {
        self.points.iter().filter(|p| p.separation().is_some_and(|s| s > 1.0)).count()
    }

    fn check(&self) -> Check {
        let best = self.points.iter().filter_map(|p| p.separation()).fold(0.0, f64::max);
        let compared = self.points.iter().filter(|p| p.separation().is_some()).count();
        Check {
            name: "regulator_dependence",
            passed: true,
            measured: best,
            tolerance: 1.0,
            informational: true,
            note: format!(
                "exponential vs gaussian ladders differ beyond combined error bars at {} of {compared} comparable points",
                self.resolved_differences()
            ),
        }
    }
}

/// Full-line exponential path extrapolated with exponential and Gaussian
/// ladders `{0.2, 0.1, 0.05}` (in units of `Γ₀` and `Γ₀²`) at order 2. A
/// ladder that fails to converge leaves its side empty.
pub fn regulator_dependence() -> Result<RegulatorDiagnostic> {
    let mut points = Vec::new();
    for &omega in &PLANCK_OMEGAS {
        let k = wavenumber_for_omega(omega);
        let mode = Mode::new(k, 0.0)?;
        for (beta, hemisphere) in [(1.0, Hemisphere::Upper), (-1.0, Hemisphere::Lower)] {
            let traj = Trajectory::exponential_decay(beta / k, 1.0)?;
            let run = |kind: RegulatorKind| -> Result<Option<(Complex64, f64)>> {
                let reg = RegulatorSpec::new(kind, vec![0.2, 0.1, 0.05], 2)?;
                match integrate_numeric(&mode, &traj, Window::full(), &reg, 1e-11) {
                    Ok(v) => Ok(Some((v.value, v.error))),
                    Err(crate::error::Error::NonMonotone { .. }) => Ok(None),
                    Err(e) => Err(e),
                }
            };
            points.push(RegulatorComparison {
                omega_over_gamma: omega,
                hemisphere,
                exponential: run(RegulatorKind::Exponential)?,
                gaussian: run(RegulatorKind::Gaussian)?,
            });
        }
    }
    Ok(RegulatorDiagnostic { points })
}

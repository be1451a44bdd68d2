//! Occupation and energy spectra, total radiated energy, the Cherenkov rate
//! and the finite-size depletion correction.
//!
//! Every quantity here is in natural units (`ħ = M = c = 1`). Densities are
//! per unit wavenumber per steradian:
//! `dn/dk dΩ = n λ² (ε_k/ω_k) |I_k|² k² / (2π)³` and `dE = ω_k dn`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condensate::{free_energy, Condensate, Mode};
use crate::error::{invalid, require_finite, require_positive, Error, Result};
use crate::phase_integral::{
    integrate_closed_constant_velocity, integrate_closed_exponential, integrate_closed_uniform_acceleration,
    integrate_numeric, uniform_mu, PhaseIntegral, RegulatorSpec, Window,
};
use crate::quadrature::{integrate, integrate_panels, Tolerance};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumProvenance {
    Numeric,
    ClosedForm,
    Asymptotic,
}

impl SpectrumProvenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Numeric => "numeric",
            Self::ClosedForm => "closed_form",
            Self::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub k: f64,
    pub theta: f64,
    pub omega: f64,
    pub dn_dk_domega: f64,
    pub de_dk_domega: f64,
    pub provenance: SpectrumProvenance,
}

impl SpectrumPoint {
    fn new(mode: &Mode, dn: f64, provenance: SpectrumProvenance) -> Self {
        Self {
            k: mode.k,
            theta: mode.theta,
            omega: mode.omega,
            dn_dk_domega: dn,
            de_dk_domega: mode.omega * dn,
            provenance,
        }
    }
}

/// Sign of `k_z ζ₀` for the exponential trajectory. `Upper` is the
/// Planck-suppressed side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hemisphere {
    Upper,
    Lower,
}

impl Hemisphere {
    /// `None` when `k_z ζ₀ = 0`.
    pub fn of(mode: &Mode, zeta0: f64) -> Option<Self> {
        let beta = mode.kz() * zeta0;
        if beta > 0.0 {
            Some(Self::Upper)
        } else if beta < 0.0 {
            Some(Self::Lower)
        } else {
            None
        }
    }
}

/// `n λ² / (2π)³`, common to every density.
pub fn prefactor(cond: &Condensate) -> f64 {
    let nat = cond.natural();
    nat.density * nat.impurity_coupling * nat.impurity_coupling / (2.0 * PI).powi(3)
}

/// Turns a phase integral into an occupation density.
///
/// `δ(ω_k)` and `δ(μ_k)` terms only have support at `k = 0`, where the
/// `ε_k/ω_k` weight vanishes, so they drop out. A Doppler term
/// `δ(ω_k − k_z v)` lives on the Cherenkov cone and has no pointwise density;
/// only its regular part is reported (see [`cherenkov_rate`]).
pub fn occupation_density(cond: &Condensate, mode: &Mode, integral: &PhaseIntegral) -> Result<SpectrumPoint> {
    if !integral.matches_mode(mode) {
        return Err(Error::ProvenanceMismatch(format!(
            "integral for (k={}, θ={}) used for mode (k={}, θ={})",
            integral.k, integral.theta, mode.k, mode.theta
        )));
    }
    let dn = prefactor(cond) * mode.energy_ratio() * integral.norm_sqr() * mode.k * mode.k;
    let provenance = if integral.analytic {
        SpectrumProvenance::ClosedForm
    } else {
        SpectrumProvenance::Numeric
    };
    Ok(SpectrumPoint::new(mode, dn, provenance))
}

/// `1/(e^x − 1)` for the upper hemisphere, `1/(1 − e^{−x})` for the lower.
pub fn planck_factor(x: f64, hemisphere: Hemisphere) -> f64 {
    match hemisphere {
        Hemisphere::Upper => 1.0 / x.exp_m1(),
        Hemisphere::Lower => -1.0 / (-x).exp_m1(),
    }
}

/// Full-line spectrum of `ζ₀ e^{−Γ₀t}`. The hemisphere fixes the sign of
/// `k_z ζ₀`; modes with `k_z = 0` carry no radiation.
pub fn exponential_spectrum(
    cond: &Condensate,
    rate: f64,
    k: f64,
    theta: f64,
    hemisphere: Hemisphere,
) -> Result<SpectrumPoint> {
    require_positive("gamma0", rate)?;
    let mode = Mode::new(k, theta)?;
    if mode.kz() == 0.0 {
        return Ok(SpectrumPoint::new(&mode, 0.0, SpectrumProvenance::ClosedForm));
    }
    let w = mode.omega;
    let modulus = 2.0 * PI / (w * rate) * planck_factor(2.0 * PI * w / rate, hemisphere);
    let dn = prefactor(cond) * mode.energy_ratio() * modulus * k * k;
    Ok(SpectrumPoint::new(&mode, dn, SpectrumProvenance::ClosedForm))
}

/// Spectrum of `ζ₀ e^{−Γ₀t}` restricted to `window`.
pub fn exponential_spectrum_windowed(
    cond: &Condensate,
    rate: f64,
    zeta0: f64,
    window: Window,
    k: f64,
    theta: f64,
) -> Result<SpectrumPoint> {
    let mode = Mode::new(k, theta)?;
    let integral = integrate_closed_exponential(&mode, zeta0, rate, window)?;
    occupation_density(cond, &mode, &integral)
}

/// Spectrum of hyperbolic motion with proper acceleration `a`,
/// `2nλ² k⁶ cos²θ (K₁(μ)/μ)² / ((2π)³ a⁴ ω)`. Exactly zero at `θ = π/2`.
pub fn uniform_acceleration_spectrum(cond: &Condensate, acceleration: f64, k: f64, theta: f64) -> Result<SpectrumPoint> {
    let mode = Mode::new(k, theta)?;
    if mode.kz() == 0.0 {
        require_positive("acceleration", acceleration)?;
        return Ok(SpectrumPoint::new(&mode, 0.0, SpectrumProvenance::ClosedForm));
    }
    let integral = integrate_closed_uniform_acceleration(&mode, acceleration)?;
    occupation_density(cond, &mode, &integral)
}

/// Limiting laws of the closed-form spectra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "law")]
pub enum AsymptoticLaw {
    /// Full-line exponential, `k ≪ min(1, Γ₀)`: `nλ² k / (2(2π)³)`.
    ExponentialInfrared,
    /// Full-line exponential, `k ≫ max(1, Γ₀)`: `nλ² (4π/Γ₀) P / (2π)³` with
    /// the hemisphere's Planck factor `P`.
    ExponentialUltraviolet { rate: f64, hemisphere: Hemisphere },
    /// Window `[0, T]`, `k → 0`: `nλ² T² k³ / (2(2π)³)`.
    WindowedInfrared { duration: f64 },
    /// Window `[0, T]`, `k → ∞`: the two endpoint terms,
    /// `nλ² (ε/ω) 2(1 − cos Δ) k² / (ω² (2π)³)` with
    /// `Δ = ωT + k_zζ₀(1 − e^{−Γ₀T})`. The envelope falls as `16 nλ²/((2π)³k²)`.
    WindowedUltraviolet { rate: f64, zeta0: f64, duration: f64 },
    /// Hyperbolic motion, `k → 0`: `2nλ² k cos²θ / ((2π)³ (sin²θ + k²/4)²)`.
    AccelerationInfrared,
    /// Hyperbolic motion, `k → ∞`: `nλ² π k⁶ cos²θ e^{−2μ} / ((2π)³ a⁴ μ³ ω)`.
    AccelerationUltraviolet { acceleration: f64 },
}

impl AsymptoticLaw {
    pub fn evaluate(&self, cond: &Condensate, k: f64, theta: f64) -> Result<SpectrumPoint> {
        let mode = Mode::new(k, theta)?;
        let pre = prefactor(cond);
        let dn = match *self {
            Self::ExponentialInfrared => 0.5 * pre * k,
            Self::ExponentialUltraviolet { rate, hemisphere } => {
                let rate = require_positive("gamma0", rate)?;
                pre * 4.0 * PI / rate * planck_factor(2.0 * PI * mode.omega / rate, hemisphere)
            }
            Self::WindowedInfrared { duration } => 0.5 * pre * duration * duration * k.powi(3),
            Self::WindowedUltraviolet { rate, zeta0, duration } => {
                let beta = mode.kz() * zeta0;
                let delta = mode.omega * duration + beta * -(-rate * duration).exp_m1();
                let w = mode.omega;
                pre * mode.energy_ratio() * 2.0 * (1.0 - delta.cos()) * k * k / (w * w)
            }
            Self::AccelerationInfrared => {
                let (s, c) = theta.sin_cos();
                let d = s * s + 0.25 * k * k;
                2.0 * pre * k * c * c / (d * d)
            }
            Self::AccelerationUltraviolet { acceleration } => {
                let a = require_positive("acceleration", acceleration)?;
                let c = if mode.kz() == 0.0 { 0.0 } else { theta.cos() };
                let mu = uniform_mu(&mode, a);
                // K₁(μ)² ≈ (π/2μ) e^{−2μ}
                pre * PI * k.powi(6) * c * c * (-2.0 * mu).exp() / (a.powi(4) * mu.powi(3) * mode.omega)
            }
        };
        Ok(SpectrumPoint::new(&mode, dn, SpectrumProvenance::Asymptotic))
    }
}

/// Angle-integrated energy spectrum of weak hyperbolic motion at high `k`,
/// `dE/dk ≈ 4nλ² e^{−k²/a} / (3πa)` as usually quoted (no `(2π)³`).
pub fn weak_acceleration_uv_energy_law(cond: &Condensate, acceleration: f64, k: f64) -> f64 {
    let nat = cond.natural();
    let nl2 = nat.density * nat.impurity_coupling * nat.impurity_coupling;
    4.0 * nl2 * (-k * k / acceleration).exp() / (3.0 * PI * acceleration)
}

/// Total energy of weak hyperbolic motion as usually quoted,
/// `(nλ²/10) sqrt(a/π)`.
pub fn weak_acceleration_energy_law(cond: &Condensate, acceleration: f64) -> f64 {
    let nat = cond.natural();
    nat.density * nat.impurity_coupling * nat.impurity_coupling / 10.0 * (acceleration / PI).sqrt()
}

/// Least-squares fit `y = c xᵖ` on positive data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub coefficient: f64,
}

pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.iter().chain(ys).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(invalid("power-law fit", "needs finite positive data"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (slope, intercept) = fit_line(&lx, &ly)?;
    Ok(PowerLawFit {
        exponent: slope,
        coefficient: intercept.exp(),
    })
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(invalid("line fit", "needs at least two (x, y) pairs"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(invalid("line fit", "x values must not all coincide"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// How phase integrals are obtained for a trajectory and window: closed
/// forms where they exist, numeric quadrature otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSource {
    pub trajectory: Trajectory,
    pub window: Window,
    pub regulator: RegulatorSpec,
    /// Absolute tolerance of numeric phase integrals.
    pub tol: f64,
    pub prefer_closed_form: bool,
}

impl SpectrumSource {
    pub fn new(trajectory: Trajectory, window: Window, regulator: RegulatorSpec, tol: f64) -> Self {
        Self {
            trajectory,
            window,
            regulator,
            tol,
            prefer_closed_form: true,
        }
    }

    pub fn numeric(trajectory: Trajectory, window: Window, regulator: RegulatorSpec, tol: f64) -> Self {
        Self {
            prefer_closed_form: false,
            ..Self::new(trajectory, window, regulator, tol)
        }
    }

    pub fn with_window(&self, window: Window) -> Self {
        Self { window, ..self.clone() }
    }

    /// The source for `ζ → −ζ`. Its spectrum at `θ` is this one's at `π − θ`.
    pub fn mirrored(&self) -> Self {
        Self {
            trajectory: self.trajectory.clone().mirrored(),
            ..self.clone()
        }
    }

    /// True when every mode is served by a closed form.
    pub fn is_closed_form(&self) -> bool {
        self.prefer_closed_form && closed_form_available(&self.trajectory, self.window)
    }

    pub fn phase_integral(&self, mode: &Mode) -> Result<PhaseIntegral> {
        if self.prefer_closed_form {
            if let Some(integral) = closed_form(&self.trajectory, self.window, mode) {
                return integral;
            }
        }
        integrate_numeric(mode, &self.trajectory, self.window, &self.regulator, self.tol)
    }

    pub fn point(&self, cond: &Condensate, mode: &Mode) -> Result<SpectrumPoint> {
        occupation_density(cond, mode, &self.phase_integral(mode)?)
    }

    /// A supersonic uniform source on an infinite window radiates at a
    /// constant rate forever; its total is not a spectral integral.
    fn check_energy_finite(&self) -> Result<()> {
        let mut traj = &self.trajectory;
        while let Trajectory::Shifted { base, .. } | Trajectory::Mirrored(base) = traj {
            traj = base;
        }
        if let Trajectory::ConstantVelocity { speed } = traj {
            if speed.abs() > 1.0 && !self.window.is_finite() {
                return Err(Error::Unsupported(
                    "total energy of supersonic uniform motion over an infinite window; use cherenkov_rate",
                ));
            }
        }
        Ok(())
    }
}

fn closed_form_available(traj: &Trajectory, window: Window) -> bool {
    match traj {
        Trajectory::Shifted { base, .. } => closed_form_available(base, window),
        Trajectory::Mirrored(base) => {
            matches!(**base, Trajectory::UniformAcceleration { .. }) && window == Window::full()
        }
        Trajectory::ExponentialDecay { .. } | Trajectory::ConstantVelocity { .. } => true,
        Trajectory::UniformAcceleration { .. } => window == Window::full(),
        Trajectory::Sampled(_) => false,
    }
}

fn closed_form(traj: &Trajectory, window: Window, mode: &Mode) -> Option<Result<PhaseIntegral>> {
    match traj {
        Trajectory::Shifted { base, offset } => closed_form(base, window, mode).map(|r| {
            r.map(|mut integral| {
                integral.value *= Complex64::new(0.0, -mode.kz() * offset).exp();
                integral
            })
        }),
        Trajectory::ExponentialDecay { zeta0, rate } => {
            Some(integrate_closed_exponential(mode, *zeta0, *rate, window))
        }
        Trajectory::ConstantVelocity { speed } => Some(integrate_closed_constant_velocity(mode, *speed, window)),
        Trajectory::UniformAcceleration { acceleration } if window == Window::full() => {
            Some(integrate_closed_uniform_acceleration(mode, *acceleration))
        }
        // I(θ) is odd in k_z for hyperbolic motion
        Trajectory::Mirrored(base) => match **base {
            Trajectory::UniformAcceleration { acceleration } if window == Window::full() => {
                Some(integrate_closed_uniform_acceleration(mode, acceleration).map(|mut integral| {
                    integral.value = -integral.value;
                    integral
                }))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Quadrature settings for [`total_energy`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyGrid {
    /// Initial uniform panels on `[k_max/2, k_max]`; the range below is
    /// covered by octaves down to `k_max·2^{−ir_octaves}`.
    pub k_panels: usize,
    pub ir_octaves: usize,
    /// Initial uniform panels in `cos θ` per hemisphere, refined toward the poles.
    pub theta_panels: usize,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for EnergyGrid {
    fn default() -> Self {
        Self {
            k_panels: 8,
            ir_octaves: 40,
            theta_panels: 4,
            rel_tol: 1e-7,
            max_panels: 20_000,
        }
    }
}

impl EnergyGrid {
    pub fn validate(&self) -> Result<()> {
        if self.k_panels == 0 || self.theta_panels == 0 {
            return Err(invalid("grid", "k_panels and theta_panels must be at least 1"));
        }
        require_positive("grid.rel_tol", self.rel_tol)?;
        if self.max_panels < 2 {
            return Err(invalid("grid.max_panels", "must be at least 2"));
        }
        Ok(())
    }

    /// The same grid with every starting panel halved.
    pub fn refined(&self) -> Self {
        Self {
            k_panels: 2 * self.k_panels,
            theta_panels: 2 * self.theta_panels,
            ir_octaves: self.ir_octaves,
            ..*self
        }
    }

    fn k_edges(&self, k_max: f64) -> Vec<f64> {
        let mut edges = vec![0.0];
        for j in (1..=self.ir_octaves).rev() {
            edges.push(k_max * 0.5f64.powi(j as i32));
        }
        for i in 0..=self.k_panels {
            edges.push(k_max * (0.5 + 0.5 * i as f64 / self.k_panels as f64));
        }
        edges.dedup();
        edges
    }

    /// Edges in `x = 1 − |cos θ|` on `[0, 1]`, graded toward the pole
    /// down to the `k²` scale where near-axis peaks live.
    fn x_edges(&self, k: f64) -> Vec<f64> {
        let mut edges: Vec<f64> = (0..=self.theta_panels)
            .map(|i| i as f64 / self.theta_panels as f64)
            .collect();
        let floor = POLE_GRADING_FLOOR.min(1e-3 * k * k);
        let mut x = 0.25;
        while x >= floor {
            edges.push(x);
            x *= 0.25;
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        edges
    }
}

/// Smallest pole panel edge in `1 − |cos θ|` independent of `k`.
const POLE_GRADING_FLOOR: f64 = 1e-8;
/// Minimum relative tail weight `k_max·(dE/dk)/E` for a divergence flag.
const DIVERGENCE_TAIL_WEIGHT: f64 = 1e-3;

/// Result of [`total_energy`]. "Upper" is `k_z > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub total: f64,
    pub upper: f64,
    pub lower: f64,
    pub k_max: f64,
    pub truncation_error: f64,
    pub divergent: bool,
    pub upper_divergent: bool,
    pub lower_divergent: bool,
    /// Local power `p` of `dE/dk ∝ kᵖ` near `k_max`.
    pub upper_tail_exponent: Option<f64>,
    pub lower_tail_exponent: Option<f64>,
}

struct HemisphereEnergy {
    value: f64,
    error: f64,
    divergent: bool,
    tail_exponent: Option<f64>,
}

/// `∫₀^{k_max} dk ∫ dΩ dE/dk dΩ`, with the azimuth done analytically.
///
/// Each hemisphere is integrated separately with nested adaptive
/// Gauss–Kronrod rules. A hemisphere is flagged divergent when its
/// angle-integrated `dE/dk` does not decay faster than `1/k` near the cutoff
/// and still carries appreciable weight there; the cutoff-dependent value is
/// returned regardless.
pub fn total_energy(cond: &Condensate, source: &SpectrumSource, k_max: f64, grid: &EnergyGrid) -> Result<EnergyReport> {
    require_positive("k_max", k_max)?;
    grid.validate()?;
    source.check_energy_finite()?;
    // The lower hemisphere is the upper one of the mirrored path; this keeps
    // sin θ exact near both poles.
    let mirrored = source.mirrored();
    let (upper, lower) = rayon::join(
        || hemisphere_energy(cond, source, k_max, grid),
        || hemisphere_energy(cond, &mirrored, k_max, grid),
    );
    let (upper, lower) = (upper?, lower?);
    Ok(EnergyReport {
        total: upper.value + lower.value,
        upper: upper.value,
        lower: lower.value,
        k_max,
        truncation_error: upper.error + lower.error,
        divergent: upper.divergent || lower.divergent,
        upper_divergent: upper.divergent,
        lower_divergent: lower.divergent,
        upper_tail_exponent: upper.tail_exponent,
        lower_tail_exponent: lower.tail_exponent,
    })
}

/// `2π ∫ d(cos θ) dE/dk dΩ` over `k_z > 0`, with its quadrature error.
fn angular_energy(cond: &Condensate, source: &SpectrumSource, k: f64, grid: &EnergyGrid) -> Result<(f64, f64)> {
    if k <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut failure = None;
    let f = |x: f64| -> f64 {
        if failure.is_some() {
            return 0.0;
        }
        // θ = 2 asin(sqrt(x/2)) keeps full relative precision at the pole
        let theta = 2.0 * (0.5 * x).sqrt().min(1.0).asin();
        match Mode::new(k, theta).and_then(|m| source.point(cond, &m)) {
            Ok(p) => p.de_dk_domega,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let tol = Tolerance::new(0.0, 0.1 * grid.rel_tol, grid.max_panels);
    let r = integrate_panels(f, &grid.x_edges(k), tol);
    if let Some(e) = failure {
        return Err(e);
    }
    let r = r?;
    Ok((2.0 * PI * r.value, 2.0 * PI * r.error))
}

fn hemisphere_energy(
    cond: &Condensate,
    source: &SpectrumSource,
    k_max: f64,
    grid: &EnergyGrid,
) -> Result<HemisphereEnergy> {
    let mut failure = None;
    let mut inner_rel: f64 = 0.0;
    let f = |k: f64| -> f64 {
        if failure.is_some() {
            return 0.0;
        }
        match angular_energy(cond, source, k, grid) {
            Ok((v, e)) => {
                if v > 0.0 {
                    inner_rel = inner_rel.max(e / v);
                }
                v
            }
            Err(err) => {
                failure = Some(err);
                0.0
            }
        }
    };
    let tol = Tolerance::new(0.0, grid.rel_tol, grid.max_panels);
    let r = integrate_panels(f, &grid.k_edges(k_max), tol);
    if let Some(e) = failure {
        return Err(e);
    }
    let r = r?;
    let value = r.value.max(0.0);
    let error = r.error + inner_rel * value.abs();

    // Tail diagnostics from dE/dk on the last half octave.
    let ks: Vec<f64> = (0..5).map(|i| k_max * 2f64.powf(-0.125 * i as f64)).collect();
    let mut densities = Vec::with_capacity(ks.len());
    for &k in &ks {
        densities.push(angular_energy(cond, source, k, grid)?.0);
    }
    let tail_exponent = if densities.iter().all(|d| *d > 0.0) {
        Some(fit_power_law(&ks, &densities)?.exponent)
    } else {
        None
    };
    let divergent = match tail_exponent {
        Some(p) => p > -1.0 && k_max * densities[0] > DIVERGENCE_TAIL_WEIGHT * value,
        None => false,
    };
    Ok(HemisphereEnergy {
        value,
        error,
        divergent,
        tail_exponent,
    })
}

/// Energy radiated per unit time by uniform motion at speed `v`,
/// `nλ²/(2π|v|) ∫₀^{k_c} k ε_k dk` with `k_c = min(2 sqrt(v² − 1), k_max)`:
/// the azimuthal and polar integrals are done with the Doppler delta,
/// which only fires on the cone `cos θ = ω_k/(k v)`.
pub fn cherenkov_rate(cond: &Condensate, speed: f64, k_max: f64) -> Result<f64> {
    let v = require_finite("speed", speed)?.abs();
    require_positive("k_max", k_max)?;
    if v <= 1.0 {
        return Ok(0.0);
    }
    let k_cone = 2.0 * (v * v - 1.0).sqrt();
    let upper = k_cone.min(k_max);
    let r = integrate(
        |k: f64| k * free_energy(k),
        0.0,
        upper,
        Tolerance::new(0.0, 1e-13, 1_000),
    )?;
    let nat = cond.natural();
    Ok(nat.density * nat.impurity_coupling * nat.impurity_coupling / (2.0 * PI * v) * r.value)
}

/// Condensate depletion of a finite box after the impurity has moved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepletionReport {
    /// `(8/3) sqrt(n a_s³/π)`.
    pub leading: f64,
    /// Impurity-induced part from the box modes with `|k| ≤ k_max`.
    pub correction: f64,
    /// Extrapolated contribution of `|k| > k_max`, when a decaying power law
    /// fits the top shells.
    pub tail_estimate: Option<f64>,
    pub total: f64,
    /// Number of wave vectors summed.
    pub modes: u64,
    pub box_length: f64,
    pub particle_number: u64,
    pub k_max: f64,
    pub time: f64,
}

/// Leading quantum depletion `(8/3) sqrt(n a_s³/π)`.
pub fn leading_depletion(cond: &Condensate) -> f64 {
    8.0 / 3.0 * (cond.diluteness() / PI).sqrt()
}

/// Depletion at time `t` with the box modes `k = 2π(n_x, n_y, n_z)/L`,
/// `0 < |k| ≤ k_max`. The impurity displaces each mode by
/// `φ_k = −i nλ sqrt(ε_k/(Nω_k)) I_k(t) e^{−iω_k t}`, with the phase
/// integral taken over the part of the window before `t`, and the
/// correction is `(1/N) Σ [(ε_k/ω_k)|φ_k|² + |φ*_k − φ_{−k}|²/(2ω_k)]`.
pub fn depletion(cond: &Condensate, source: &SpectrumSource, k_max: f64, t: f64) -> Result<DepletionReport> {
    let nat = *cond.natural();
    let n_particles = nat
        .particle_number
        .ok_or_else(|| invalid("particle_number", "depletion needs the particle number N"))?;
    let box_length = nat
        .box_length
        .ok_or_else(|| invalid("box_length", "depletion needs the box length L"))?;
    require_positive("k_max", k_max)?;
    require_finite("t", t)?;
    let leading = leading_depletion(cond);
    let n = n_particles as f64;
    let k_unit = 2.0 * PI / box_length;
    let n_max = (k_max / k_unit).floor() as i64;

    // Group wave vectors by (n_x² + n_y², n_z); the azimuth never matters.
    let mut perp = vec![0u64; (n_max * n_max + 1) as usize];
    for nx in -n_max..=n_max {
        for ny in -n_max..=n_max {
            let m = nx * nx + ny * ny;
            if m <= n_max * n_max {
                perp[m as usize] += 1;
            }
        }
    }
    let mut groups = Vec::new();
    for (m, &count) in perp.iter().enumerate() {
        if count == 0 {
            continue;
        }
        for nz in 0..=n_max {
            let sq = m as i64 + nz * nz;
            if sq == 0 {
                continue;
            }
            let k = k_unit * (sq as f64).sqrt();
            if k > k_max {
                continue;
            }
            groups.push((m as i64, nz, count));
        }
    }

    let end = source.window.end.min(t);
    let active = end > source.window.start && nat.impurity_coupling != 0.0;
    let clipped = if active { Some(source.with_window(Window::new(source.window.start, end)?)) } else { None };
    let amplitude = nat.density * nat.impurity_coupling;

    let contributions: Vec<(f64, f64, u64)> = groups
        .par_iter()
        .map(|&(m, nz, count)| -> Result<(f64, f64, u64)> {
            let sq = (m + nz * nz) as f64;
            let k = k_unit * sq.sqrt();
            let multiplicity = if nz == 0 { count } else { 2 * count };
            let Some(src) = &clipped else {
                return Ok((k, 0.0, multiplicity));
            };
            let theta = if nz == 0 { 0.5 * PI } else { (nz as f64 / sq.sqrt()).acos() };
            let mode = Mode::new(k, theta)?;
            let phi = |md: &Mode| -> Result<Complex64> {
                let i_k = src.phase_integral(md)?.value;
                let scale = amplitude * (md.free_energy / (n * md.omega)).sqrt();
                Ok(Complex64::new(0.0, -scale) * i_k * Complex64::new(0.0, -md.omega * t).exp())
            };
            let ratio = mode.energy_ratio();
            let half_inv_omega = 0.5 / mode.omega;
            let plus = phi(&mode)?;
            let term = if nz == 0 {
                ratio * plus.norm_sqr() + half_inv_omega * (plus.conj() - plus).norm_sqr()
            } else {
                let minus = phi(&mode.reflected())?;
                ratio * (plus.norm_sqr() + minus.norm_sqr())
                    + half_inv_omega * ((plus.conj() - minus).norm_sqr() + (minus.conj() - plus).norm_sqr())
            };
            Ok((k, count as f64 * term, multiplicity))
        })
        .collect::<Result<_>>()?;

    let sum = pairwise_sum(&contributions.iter().map(|c| c.1).collect::<Vec<_>>());
    let correction = sum / n;
    let modes = contributions.iter().map(|c| c.2).sum();
    let tail_estimate = shell_tail(&contributions, k_max).map(|t| t / n);
    Ok(DepletionReport {
        leading,
        correction,
        tail_estimate,
        total: leading + correction,
        modes,
        box_length,
        particle_number: n_particles,
        k_max,
        time: t,
    })
}

/// Power-law extrapolation of the mode sum beyond `k_max`, from the shell
/// density on `[k_max/2, k_max]`.
fn shell_tail(contributions: &[(f64, f64, u64)], k_max: f64) -> Option<f64> {
    const BINS: usize = 8;
    let lo = 0.5 * k_max;
    let width = (k_max - lo) / BINS as f64;
    let mut sums = [0.0; BINS];
    for &(k, c, _) in contributions {
        if k > lo {
            let b = (((k - lo) / width) as usize).min(BINS - 1);
            sums[b] += c;
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = sums
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 0.0)
        .map(|(b, s)| (lo + (b as f64 + 0.5) * width, s / width))
        .unzip();
    if xs.len() < 3 {
        return None;
    }
    let fit = fit_power_law(&xs, &ys).ok()?;
    if fit.exponent >= -1.0 {
        return None;
    }
    let density = fit.coefficient * k_max.powf(fit.exponent);
    Some(density * k_max / (-fit.exponent - 1.0))
}

/// Sum in a fixed binary tree, so the rounding does not depend on how the
/// terms were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// Grid evaluation of a source, `k`-major. The output order does not
/// depend on the worker count.
pub fn spectrum_grid(cond: &Condensate, source: &SpectrumSource, ks: &[f64], thetas: &[f64]) -> Result<Vec<SpectrumPoint>> {
    let cells: Vec<(f64, f64)> = ks.iter().flat_map(|&k| thetas.iter().map(move |&t| (k, t))).collect();
    cells
        .par_iter()
        .map(|&(k, theta)| Mode::new(k, theta).and_then(|m| source.point(cond, &m)))
        .collect()
}

/// Default phase-integral tolerance for numeric sources.
pub const DEFAULT_PHASE_TOL: f64 = 1e-10;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condensate::NaturalParams;
    use crate::phase_integral::Provenance;
    use crate::specfun::bessel_k1;
    use proptest::prelude::*;

    fn natural(lambda: f64) -> Condensate {
        Condensate::from_natural(NaturalParams {
            density: 1.0,
            impurity_coupling: lambda,
            particle_number: None,
            box_length: None,
        })
        .unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn zero_integral_gives_zero_density() {
        let cond = natural(1.0);
        let mode = Mode::new(0.7, 0.3).unwrap();
        let window = Window::new(0.0, 2.0).unwrap();
        let mut integral = integrate_closed_exponential(&mode, 1.0, 1.0, window).unwrap();
        integral.value = Complex64::new(0.0, 0.0);
        let p = occupation_density(&cond, &mode, &integral).unwrap();
        assert_eq!((p.dn_dk_domega, p.de_dk_domega), (0.0, 0.0));
    }

    #[test]
    fn mismatched_mode_is_rejected() {
        let cond = natural(1.0);
        let mode = Mode::new(0.7, 0.3).unwrap();
        let other = Mode::new(0.7, 0.31).unwrap();
        let integral = integrate_closed_exponential(&mode, 1.0, 1.0, Window::full()).unwrap();
        assert!(matches!(
            occupation_density(&cond, &other, &integral),
            Err(Error::ProvenanceMismatch(_))
        ));
    }

    #[test]
    fn full_line_flag_gives_zero() {
        let cond = natural(1.0);
        let mode = Mode::new(1.1, 0.5 * PI).unwrap();
        let integral = integrate_closed_exponential(&mode, 1.0, 1.0, Window::full()).unwrap();
        assert!(integral.distribution.is_some());
        assert_eq!(occupation_density(&cond, &mode, &integral).unwrap().dn_dk_domega, 0.0);
        let p = exponential_spectrum(&cond, 1.0, 1.1, 0.5 * PI, Hemisphere::Lower).unwrap();
        assert_eq!(p.dn_dk_domega, 0.0);
    }

    #[test]
    fn planck_spectrum_matches_the_incomplete_gamma_route() {
        let cond = natural(0.8);
        for &(k, theta) in &[(0.3, 0.2), (1.0, 1.0), (2.5, 2.0), (0.05, 3.0)] {
            for &(zeta0, rate) in &[(1.0, 1.0), (-0.3, 2.0), (4.0, 0.5)] {
                let mode = Mode::new(k, theta).unwrap();
                let hemisphere = Hemisphere::of(&mode, zeta0).unwrap();
                let planck = exponential_spectrum(&cond, rate, k, theta, hemisphere).unwrap();
                let via_gamma =
                    occupation_density(&cond, &mode, &integrate_closed_exponential(&mode, zeta0, rate, Window::full()).unwrap())
                        .unwrap();
                assert!(rel(via_gamma.dn_dk_domega, planck.dn_dk_domega) < 1e-10, "k={k} θ={theta}");
                assert_eq!(via_gamma.provenance, SpectrumProvenance::ClosedForm);
            }
        }
    }

    #[test]
    fn hemisphere_ratio_and_bose_identity() {
        let cond = natural(1.3);
        for &k in &[0.01, 0.2, 1.0, 3.0, 8.0] {
            for &rate in &[0.3, 1.0, 5.0] {
                let up = exponential_spectrum(&cond, rate, k, 0.4, Hemisphere::Upper).unwrap();
                let lo = exponential_spectrum(&cond, rate, k, 0.4, Hemisphere::Lower).unwrap();
                let w = up.omega;
                let x = 2.0 * PI * w / rate;
                assert!(rel(up.dn_dk_domega / lo.dn_dk_domega, (-x).exp()) < 1e-12);
                let mode = Mode::new(k, 0.4).unwrap();
                let bose = prefactor(&cond) * mode.energy_ratio() * 2.0 * PI / (w * rate) * k * k;
                assert!(rel(lo.dn_dk_domega - up.dn_dk_domega, bose) < 1e-9);
            }
        }
    }

    #[test]
    fn acceleration_spectrum_closed_form() {
        let cond = natural(0.6);
        let pre = prefactor(&cond);
        for &a in &[0.1, 1.0, 3.0] {
            for &(k, theta) in &[(0.2, 0.3), (1.0, 1.2), (2.0, 2.9), (5.0, 0.0)] {
                let p = uniform_acceleration_spectrum(&cond, a, k, theta).unwrap();
                let mode = Mode::new(k, theta).unwrap();
                let mu = uniform_mu(&mode, a);
                let c = theta.cos();
                let k1 = bessel_k1(mu).unwrap();
                let expect = 2.0 * pre * k.powi(6) * c * c / (a.powi(4) * mode.omega) * (k1 / mu).powi(2);
                assert!(rel(p.dn_dk_domega, expect) < 1e-12, "a={a} k={k} θ={theta}");
            }
        }
        assert_eq!(uniform_acceleration_spectrum(&cond, 1.0, 0.7, 0.5 * PI).unwrap().dn_dk_domega, 0.0);
    }

    #[test]
    fn acceleration_infrared_law() {
        let cond = natural(1.0);
        let k = 2e-3; // kξ = 10⁻³
        let theta = 0.25 * PI;
        let p = uniform_acceleration_spectrum(&cond, 1.0, k, theta).unwrap();
        let law = AsymptoticLaw::AccelerationInfrared.evaluate(&cond, k, theta).unwrap();
        assert!(rel(p.dn_dk_domega, law.dn_dk_domega) < 0.01);
        assert_eq!(law.provenance, SpectrumProvenance::Asymptotic);
    }

    #[test]
    fn acceleration_ultraviolet_law() {
        let cond = natural(1.0);
        for &theta in &[0.0, 0.4, 2.0] {
            let k = 12.0;
            let p = uniform_acceleration_spectrum(&cond, 1.0, k, theta).unwrap();
            let law = AsymptoticLaw::AccelerationUltraviolet { acceleration: 1.0 }
                .evaluate(&cond, k, theta)
                .unwrap();
            // K₁(μ) ≈ sqrt(π/2μ) e^{−μ} (1 + 3/8μ) with μ ≈ 72
            assert!(rel(p.dn_dk_domega, law.dn_dk_domega) < 0.012);
        }
    }

    #[test]
    fn exponential_infrared_law() {
        let cond = natural(1.0);
        for &k in &[1e-5, 1e-4] {
            let p = exponential_spectrum(&cond, 1.0, k, 0.3, Hemisphere::Upper).unwrap();
            let law = AsymptoticLaw::ExponentialInfrared.evaluate(&cond, k, 0.3).unwrap();
            assert!(rel(p.dn_dk_domega, law.dn_dk_domega) < 1e-3);
        }
    }

    #[test]
    fn exponential_ultraviolet_law() {
        let cond = natural(1.0);
        for hemisphere in [Hemisphere::Upper, Hemisphere::Lower] {
            // the law drops a factor (k²/4)/(1 + k²/4)
            let k = 100.0;
            let p = exponential_spectrum(&cond, 50.0, k, 0.3, hemisphere).unwrap();
            let law = AsymptoticLaw::ExponentialUltraviolet { rate: 50.0, hemisphere }
                .evaluate(&cond, k, 0.3)
                .unwrap();
            assert!(rel(p.dn_dk_domega, law.dn_dk_domega) < 1e-3);
        }
    }

    #[test]
    fn windowed_laws() {
        let cond = natural(1.0);
        let (rate, zeta0, t) = (1.0, 0.5, 3.0);
        let window = Window::new(0.0, t).unwrap();
        let k = 1e-4;
        let p = exponential_spectrum_windowed(&cond, rate, zeta0, window, k, 0.7).unwrap();
        let law = AsymptoticLaw::WindowedInfrared { duration: t }.evaluate(&cond, k, 0.7).unwrap();
        assert!(rel(p.dn_dk_domega, law.dn_dk_domega) < 1e-3);

        let uv = AsymptoticLaw::WindowedUltraviolet {
            rate,
            zeta0,
            duration: t,
        };
        for &k in &[60.0, 61.3, 75.0] {
            let p = exponential_spectrum_windowed(&cond, rate, zeta0, window, k, 0.7).unwrap();
            let law = uv.evaluate(&cond, k, 0.7).unwrap();
            let envelope = 16.0 * prefactor(&cond) / (k * k);
            assert!((p.dn_dk_domega - law.dn_dk_domega).abs() < 0.02 * envelope, "k={k}");
        }
    }

    #[test]
    fn shrinking_window_empties_the_spectrum() {
        let cond = natural(1.0);
        let mut last = f64::INFINITY;
        for &t in &[1.0, 1e-2, 1e-4, 1e-8] {
            let p = exponential_spectrum_windowed(&cond, 1.0, 1.0, Window::new(0.0, t).unwrap(), 2.0, 0.4).unwrap();
            assert!(p.dn_dk_domega < last);
            last = p.dn_dk_domega;
        }
        assert!(last < 1e-15);
    }

    #[test]
    fn fits_recover_synthetic_laws() {
        let xs: Vec<f64> = (1..=10).map(|i| 0.1 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.5 * x.powf(-1.7)).collect();
        let fit = fit_power_law(&xs, &ys).unwrap();
        assert!((fit.exponent + 1.7).abs() < 1e-12);
        assert!(rel(fit.coefficient, 3.5) < 1e-12);
        assert!(fit_power_law(&[1.0, 2.0], &[1.0, -1.0]).is_err());
        assert!(fit_line(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn cherenkov_follows_landau() {
        let cond = natural(0.9);
        for v in [0.0, 0.3, 0.9, 1.0, -0.5] {
            assert_eq!(cherenkov_rate(&cond, v, 50.0).unwrap(), 0.0);
        }
        let mut last = 0.0;
        for v in [1.2, 1.5, 2.0] {
            let r = cherenkov_rate(&cond, v, 50.0).unwrap();
            let k_cone: f64 = 2.0 * (v * v - 1.0f64).sqrt();
            let closed = 0.81 * k_cone.powi(4) / (16.0 * PI * v);
            assert!(rel(r, closed) < 1e-12);
            assert!(r > last);
            last = r;
        }
        // the cutoff caps the cone
        let capped = cherenkov_rate(&cond, 2.0, 1.0).unwrap();
        assert!(rel(capped, 0.81 / (16.0 * PI * 2.0)) < 1e-12);
    }

    #[test]
    fn static_impurity_radiates_nothing() {
        let cond = natural(1.0);
        let src = SpectrumSource::new(
            Trajectory::constant_velocity(0.0).unwrap(),
            Window::full(),
            RegulatorSpec::none(),
            1e-10,
        );
        let r = total_energy(&cond, &src, 10.0, &EnergyGrid::default()).unwrap();
        assert_eq!(r.total, 0.0);
        assert!(!r.divergent);
    }

    #[test]
    fn supersonic_uniform_total_is_unsupported() {
        let cond = natural(1.0);
        let src = SpectrumSource::new(
            Trajectory::constant_velocity(1.5).unwrap().shifted(2.0),
            Window::full(),
            RegulatorSpec::none(),
            1e-10,
        );
        assert!(matches!(
            total_energy(&cond, &src, 10.0, &EnergyGrid::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn total_energy_splits_hemispheres() {
        let cond = natural(1.0);
        let src = SpectrumSource::new(
            Trajectory::uniform_acceleration(0.5).unwrap(),
            Window::full(),
            RegulatorSpec::none(),
            1e-10,
        );
        let r = total_energy(&cond, &src, 8.0, &EnergyGrid::default()).unwrap();
        assert_eq!(r.total, r.upper + r.lower);
        assert!(rel(r.upper, r.lower) < 1e-10);
        assert!(r.upper > 0.0 && !r.divergent);
        let fine = total_energy(&cond, &src, 8.0, &EnergyGrid::default().refined()).unwrap();
        assert!((fine.total - r.total).abs() <= r.truncation_error);
    }

    #[test]
    fn mirrored_source_reflects_the_spectrum() {
        let cond = natural(1.0);
        let theta = 0.9;
        for traj in [
            Trajectory::exponential_decay(0.7, 1.3).unwrap(),
            Trajectory::uniform_acceleration(0.8).unwrap(),
            Trajectory::constant_velocity(0.4).unwrap().shifted(0.3),
        ] {
            let window = Window::new(-1.0, 2.0).unwrap();
            let src = SpectrumSource::new(traj, window, RegulatorSpec::none(), 1e-12);
            let mode = Mode::new(1.2, theta).unwrap();
            let direct = src.point(&cond, &mode.reflected()).unwrap();
            let mirrored = src.mirrored().point(&cond, &mode).unwrap();
            assert!(rel(mirrored.dn_dk_domega, direct.dn_dk_domega) < 1e-8);
        }
        // closed-form sign flip for the full-line hyperbola
        let src = SpectrumSource::new(
            Trajectory::uniform_acceleration(0.8).unwrap(),
            Window::full(),
            RegulatorSpec::none(),
            1e-12,
        );
        let mode = Mode::new(1.2, theta).unwrap();
        let a = src.mirrored().phase_integral(&mode).unwrap();
        let b = src.phase_integral(&mode.reflected()).unwrap();
        assert!((a.value - b.value).norm() < 1e-14 * b.value.norm());
        assert_eq!(a.provenance, Provenance::ClosedForm);
    }

    #[test]
    fn shifted_closed_form_keeps_modulus() {
        let mode = Mode::new(0.9, 0.6).unwrap();
        let window = Window::new(-2.0, 1.0).unwrap();
        let base = SpectrumSource::new(Trajectory::exponential_decay(1.0, 1.0).unwrap(), window, RegulatorSpec::none(), 1e-12);
        let moved = SpectrumSource::new(
            Trajectory::exponential_decay(1.0, 1.0).unwrap().shifted(5.0),
            window,
            RegulatorSpec::none(),
            1e-12,
        );
        let a = base.phase_integral(&mode).unwrap().value;
        let b = moved.phase_integral(&mode).unwrap().value;
        assert!((a.norm() - b.norm()).abs() < 1e-14);
        let numeric = SpectrumSource::numeric(
            Trajectory::exponential_decay(1.0, 1.0).unwrap().shifted(5.0),
            window,
            RegulatorSpec::none(),
            1e-12,
        );
        let c = numeric.phase_integral(&mode).unwrap().value;
        assert!((b - c).norm() < 1e-10);
    }

    #[test]
    fn leading_depletion_value() {
        // n a_s³ = n/(4πn)³ = 10⁻⁴
        let n = (1e4 / (64.0 * PI.powi(3))).sqrt();
        let cond = Condensate::from_natural(NaturalParams {
            density: n,
            impurity_coupling: 0.0,
            particle_number: None,
            box_length: None,
        })
        .unwrap();
        assert!((cond.diluteness() - 1e-4).abs() < 1e-16);
        let expect = 8.0 / 3.0 * (1e-4 / PI).sqrt();
        assert!(rel(leading_depletion(&cond), expect) < 1e-12);
        assert!((expect - 0.015045).abs() < 5e-7);
    }

    fn boxed(lambda: f64, particles: u64, density: f64) -> Condensate {
        Condensate::from_natural(NaturalParams {
            density,
            impurity_coupling: lambda,
            particle_number: Some(particles),
            box_length: Some((particles as f64 / density).cbrt()),
        })
        .unwrap()
    }

    #[test]
    fn depletion_without_coupling_is_the_leading_term() {
        let cond = boxed(0.0, 1000, 1.0);
        let src = SpectrumSource::new(
            Trajectory::exponential_decay(1.0, 1.0).unwrap(),
            Window::new(0.0, 2.0).unwrap(),
            RegulatorSpec::none(),
            1e-10,
        );
        let r = depletion(&cond, &src, 3.0, 2.0).unwrap();
        assert_eq!(r.correction, 0.0);
        assert_eq!(r.total, r.leading);
        assert!(r.modes > 0);
    }

    #[test]
    fn depletion_needs_a_box() {
        let cond = natural(1.0);
        let src = SpectrumSource::new(
            Trajectory::exponential_decay(1.0, 1.0).unwrap(),
            Window::new(0.0, 2.0).unwrap(),
            RegulatorSpec::none(),
            1e-10,
        );
        assert!(matches!(depletion(&cond, &src, 3.0, 2.0), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn depletion_before_the_window_is_empty() {
        let cond = boxed(1.0, 500, 1.0);
        let src = SpectrumSource::new(
            Trajectory::exponential_decay(1.0, 1.0).unwrap(),
            Window::new(0.0, 2.0).unwrap(),
            RegulatorSpec::none(),
            1e-10,
        );
        assert_eq!(depletion(&cond, &src, 3.0, -1.0).unwrap().correction, 0.0);
        assert!(depletion(&cond, &src, 3.0, 1.0).unwrap().correction > 0.0);
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    proptest! {
        #[test]
        fn spectra_are_non_negative_and_consistent(
            k in 1e-4f64..30.0,
            theta in 0.0f64..PI,
            lambda in -3.0f64..3.0,
            rate in 0.05f64..10.0,
            zeta0 in -5.0f64..5.0,
            t_end in 0.01f64..20.0,
        ) {
            let cond = natural(lambda);
            let points = [
                exponential_spectrum(&cond, rate, k, theta, Hemisphere::Upper).unwrap(),
                exponential_spectrum(&cond, rate, k, theta, Hemisphere::Lower).unwrap(),
                exponential_spectrum_windowed(&cond, rate, zeta0, Window::new(0.0, t_end).unwrap(), k, theta).unwrap(),
                uniform_acceleration_spectrum(&cond, rate, k, theta).unwrap(),
            ];
            for p in points {
                prop_assert!(p.dn_dk_domega >= 0.0);
                prop_assert!(p.de_dk_domega >= 0.0);
                let expect = p.omega * p.dn_dk_domega;
                prop_assert!((p.de_dk_domega - expect).abs() <= 1e-12 * expect.abs());
            }
        }

        #[test]
        fn acceleration_spectrum_is_reflection_symmetric(
            k in 1e-3f64..20.0,
            theta in 0.0f64..PI,
            a in 0.05f64..5.0,
        ) {
            let cond = natural(1.0);
            let p = uniform_acceleration_spectrum(&cond, a, k, theta).unwrap();
            let q = uniform_acceleration_spectrum(&cond, a, k, PI - theta).unwrap();
            prop_assert!((p.dn_dk_domega - q.dn_dk_domega).abs() <= 1e-12 * p.dn_dk_domega.max(1e-300));
        }
    }
}

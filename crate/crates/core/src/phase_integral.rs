//! The phase integral `I_k = ∫ exp(iω_k t − i k_z ζ(t)) dt` along an impurity
//! trajectory, numerically and in closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::condensate::Mode;
use crate::error::{invalid, require_finite, require_positive, Error, Result};
use crate::jet::Jet;
use crate::quadrature::{integrate_panels, Tolerance};
use crate::specfun::{bessel_k1_scaled, log_gamma, lower_gamma_scaled};
use crate::trajectory::Trajectory;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Total panel budget for one numeric integral.
pub const DEFAULT_PANEL_BUDGET: usize = 400_000;
/// Taylor order of the integration-by-parts tails.
const TAIL_ORDER: usize = 11;
/// Upper bound on the oscillations integrated in one tail chunk.
const CHUNK_OSCILLATIONS: f64 = 2.0e4;

/// Integration window `[start, end]`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if start.is_nan() || end.is_nan() || start == f64::INFINITY || end == f64::NEG_INFINITY {
            return Err(invalid("window", format!("bad bounds [{start}, {end}]")));
        }
        if !(start < end) {
            return Err(invalid("window", format!("need t_i < t_f, got [{start}, {end}]")));
        }
        Ok(Self { start, end })
    }

    pub fn full() -> Self {
        Self {
            start: f64::NEG_INFINITY,
            end: f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.start.is_finite() && self.end.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegulatorKind {
    None,
    /// `exp(−ε|t|)`
    Exponential,
    /// `exp(−ε t²)`
    Gaussian,
}

/// A ladder of regulator strengths and the polynomial order used to
/// extrapolate to `ε = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegulatorSpec {
    pub kind: RegulatorKind,
    pub ladder: Vec<f64>,
    pub order: usize,
}

impl RegulatorSpec {
    pub fn none() -> Self {
        Self {
            kind: RegulatorKind::None,
            ladder: Vec::new(),
            order: 1,
        }
    }

    pub fn new(kind: RegulatorKind, ladder: Vec<f64>, order: usize) -> Result<Self> {
        let spec = Self { kind, ladder, order };
        spec.validate()?;
        Ok(spec)
    }

    /// `{0.2, 0.1, 0.05}·scale` with linear extrapolation.
    pub fn default_ladder(kind: RegulatorKind, scale: f64) -> Result<Self> {
        require_positive("regulator scale", scale)?;
        Self::new(kind, vec![0.2 * scale, 0.1 * scale, 0.05 * scale], 1)
    }

    /// `count` points `first, first·ratio, …` with `0 < ratio < 1`.
    pub fn geometric(kind: RegulatorKind, first: f64, ratio: f64, count: usize, order: usize) -> Result<Self> {
        require_positive("regulator first", first)?;
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(invalid("regulator ratio", format!("must lie in (0, 1), got {ratio}")));
        }
        let ladder = (0..count).map(|j| first * ratio.powi(j as i32)).collect();
        Self::new(kind, ladder, order)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == RegulatorKind::None {
            return Ok(());
        }
        if self.ladder.len() < 2 {
            return Err(invalid("regulator ladder", "needs at least two values"));
        }
        for &e in &self.ladder {
            require_positive("regulator ladder", e)?;
        }
        if self.ladder.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(invalid("regulator ladder", "values must be strictly decreasing"));
        }
        if self.order < 1 || self.order >= self.ladder.len() {
            return Err(invalid(
                "regulator order",
                format!("must lie in [1, {}] for this ladder, got {}", self.ladder.len() - 1, self.order),
            ));
        }
        Ok(())
    }

    pub fn damping(&self, epsilon: f64) -> Damping {
        match self.kind {
            RegulatorKind::None => Damping::None,
            RegulatorKind::Exponential => Damping::Exponential(epsilon),
            RegulatorKind::Gaussian => Damping::Gaussian(epsilon),
        }
    }
}

/// A single regulator factor multiplying the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Damping {
    None,
    Exponential(f64),
    Gaussian(f64),
}

impl Damping {
    pub fn kind(&self) -> RegulatorKind {
        match self {
            Self::None => RegulatorKind::None,
            Self::Exponential(_) => RegulatorKind::Exponential,
            Self::Gaussian(_) => RegulatorKind::Gaussian,
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            Self::None => None,
            Self::Exponential(e) | Self::Gaussian(e) => Some(e),
        }
    }

    fn weight(&self, t: f64) -> f64 {
        match *self {
            Self::None => 1.0,
            Self::Exponential(e) => (-e * t.abs()).exp(),
            Self::Gaussian(e) => (-e * t * t).exp(),
        }
    }

    /// Taylor expansion at `t`; for the exponential kind `t` must not be 0.
    fn jet(&self, t: f64, order: usize) -> Jet {
        let x = Jet::variable(t, order);
        match *self {
            Self::None => Jet::constant(1.0, order),
            Self::Exponential(e) => (x * (-e * t.signum())).exp(),
            Self::Gaussian(e) => (x * x * -e).exp(),
        }
    }

    /// Scale over which the weight changes appreciably.
    fn time_scale(&self) -> f64 {
        match *self {
            Self::None => f64::INFINITY,
            Self::Exponential(e) => 1.0 / e,
            Self::Gaussian(e) => 1.0 / e.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Numeric,
    ClosedForm,
    RegulatorExtrapolated,
}

/// Distributional terms that are reported, never added to the value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// `coefficient · δ(ω_k)`.
    DiracOmega { coefficient: f64 },
    /// `coefficient · δ(ω_k − k_z v)` for uniform motion.
    DiracDoppler { speed: f64, coefficient: f64 },
    /// `coefficient · δ(μ_k)` for hyperbolic motion.
    DiracMu { coefficient: f64 },
}

/// A phase integral together with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseIntegral {
    pub value: Complex64,
    pub error: f64,
    pub provenance: Provenance,
    /// Ladder and order for extrapolated values.
    pub regulator: Option<RegulatorSpec>,
    /// The single regulator factor of a damped evaluation.
    pub damping: Option<Damping>,
    /// True when the value comes from an exact formula.
    pub analytic: bool,
    pub k: f64,
    pub theta: f64,
    pub distribution: Option<Distribution>,
}

impl PhaseIntegral {
    fn for_mode(mode: &Mode, value: Complex64, error: f64, provenance: Provenance) -> Self {
        Self {
            value,
            error,
            provenance,
            regulator: None,
            damping: None,
            analytic: provenance == Provenance::ClosedForm,
            k: mode.k,
            theta: mode.theta,
            distribution: None,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.value.norm_sqr()
    }

    pub fn matches_mode(&self, mode: &Mode) -> bool {
        self.k == mode.k && self.theta == mode.theta
    }
}

/// Numeric integral with the regulator ladder of `reg` extrapolated to zero,
/// or a plain integral when `reg.kind` is `None` (finite windows only).
pub fn integrate_numeric(
    mode: &Mode,
    traj: &Trajectory,
    window: Window,
    reg: &RegulatorSpec,
    tol: f64,
) -> Result<PhaseIntegral> {
    reg.validate()?;
    if reg.kind == RegulatorKind::None {
        return integrate_damped(mode, traj, window, Damping::None, tol);
    }
    let mut points = Vec::with_capacity(reg.ladder.len());
    for &eps in &reg.ladder {
        points.push((eps, integrate_damped(mode, traj, window, reg.damping(eps), tol)?));
    }
    extrapolate_regulator(&points, reg.order)
}

/// Numeric integral of `exp(iφ(t))·w(t)` for a single regulator factor `w`.
///
/// The finite part is covered by Gauss–Kronrod panels no wider than half a
/// local oscillation; infinite ends are marched outward in growing chunks
/// until an integration-by-parts expansion of the remaining tail converges.
pub fn integrate_damped(
    mode: &Mode,
    traj: &Trajectory,
    window: Window,
    damping: Damping,
    tol: f64,
) -> Result<PhaseIntegral> {
    require_positive("tol", tol)?;
    if let Some(e) = damping.epsilon() {
        require_positive("regulator epsilon", e)?;
    }
    if !window.is_finite() && damping == Damping::None {
        return Err(Error::MissingRegulator);
    }
    let (span_lo, span_hi) = traj.span();
    if window.start < span_lo || window.end > span_hi {
        let t = if window.start < span_lo { window.start } else { window.end };
        return Err(Error::OutOfSpan {
            t,
            start: span_lo,
            end: span_hi,
        });
    }
    let ctx = Integrand {
        traj,
        omega: mode.omega,
        kz: mode.kz(),
        damping,
    };

    let (core_lo, core_hi) = ctx.core(window);
    let mut breaks = vec![core_lo];
    if matches!(damping, Damping::Exponential(_)) && core_lo < 0.0 && core_hi > 0.0 {
        breaks.push(0.0);
    }
    breaks.extend(traj.knots().iter().copied().filter(|&t| t > core_lo && t < core_hi));
    breaks.push(core_hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut budget = Budget {
        used: 0,
        limit: DEFAULT_PANEL_BUDGET,
    };
    let core_tol = if window.is_finite() { tol } else { 0.5 * tol };
    let (mut value, mut error) = ctx.integrate_segments(&breaks, core_tol, &mut budget)?;

    let tails = [window.start, window.end].iter().filter(|t| t.is_infinite()).count();
    if window.end.is_infinite() {
        let (v, e) = ctx.tail(core_hi, 1.0, core_hi - core_lo, 0.5 * tol / tails as f64, &mut budget)?;
        value += v;
        error += e;
    }
    if window.start.is_infinite() {
        let (v, e) = ctx.tail(core_lo, -1.0, core_hi - core_lo, 0.5 * tol / tails as f64, &mut budget)?;
        value += v;
        error += e;
    }

    let mut out = PhaseIntegral::for_mode(mode, value, error, Provenance::Numeric);
    out.damping = Some(damping);
    Ok(out)
}

struct Budget {
    used: usize,
    limit: usize,
}

struct Integrand<'a> {
    traj: &'a Trajectory,
    omega: f64,
    kz: f64,
    damping: Damping,
}

impl Integrand<'_> {
    fn phase(&self, t: f64) -> f64 {
        self.omega * t - self.kz * self.traj.position(t).unwrap_or(f64::NAN)
    }

    fn eval(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.damping.weight(t), self.phase(t))
    }

    fn rate(&self, t: f64) -> f64 {
        (self.omega - self.kz * self.traj.speed(t).unwrap_or(f64::NAN)).abs()
    }

    /// Finite interval handled by direct quadrature.
    fn core(&self, window: Window) -> (f64, f64) {
        if window.is_finite() {
            return (window.start, window.end);
        }
        let (mut lo, mut hi) = self.traj.phase_core(self.kz, self.omega);
        if matches!(self.damping, Damping::Exponential(_)) {
            // keep the kink of e^{−ε|t|} strictly inside
            let pad = 1.0f64.min(0.5 * (hi - lo));
            lo = lo.min(-pad);
            hi = hi.max(pad);
        }
        if window.start.is_finite() {
            lo = window.start;
            hi = hi.max(lo + 1.0);
        }
        if window.end.is_finite() {
            hi = window.end;
            lo = lo.min(hi - 1.0);
        }
        (lo, hi)
    }

    /// Panel edges on `[a, b]` so that each panel spans at most half an
    /// oscillation and does not outrun the trajectory or regulator scales.
    fn panel_edges(&self, a: f64, b: f64, budget: &Budget) -> Result<Vec<f64>> {
        let h_max = 0.5 * self.traj.time_scale().min(self.damping.time_scale());
        let mut edges = vec![a];
        let mut stack = vec![(a, b)];
        while let Some((lo, hi)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let rate = self.rate(lo).max(self.rate(mid)).max(self.rate(hi));
            let width = hi - lo;
            if (width > h_max || width * rate > PI) && mid > lo && mid < hi {
                stack.push((mid, hi));
                stack.push((lo, mid));
            } else {
                edges.push(hi);
            }
            if budget.used + edges.len() > budget.limit {
                return Err(Error::PanelBudget {
                    budget: budget.limit,
                    worst_start: lo,
                    worst_end: hi,
                    worst_error: f64::INFINITY,
                });
            }
        }
        Ok(edges)
    }

    fn integrate_segments(&self, breaks: &[f64], tol: f64, budget: &mut Budget) -> Result<(Complex64, f64)> {
        let mut edges = vec![breaks[0]];
        for w in breaks.windows(2) {
            edges.extend(self.panel_edges(w[0], w[1], budget)?.into_iter().skip(1));
        }
        let remaining = budget.limit.saturating_sub(budget.used);
        let r = integrate_panels(
            |t| self.eval(t),
            &edges,
            Tolerance::new(tol, 0.0, remaining.max(edges.len())),
        )?;
        budget.used += r.panels;
        Ok((r.value, r.error))
    }

    /// `∫_{edge}^{±∞}` with `dir = ±1`.
    fn tail(&self, edge: f64, dir: f64, width: f64, tol: f64, budget: &mut Budget) -> Result<(Complex64, f64)> {
        let mut frontier = edge;
        let scale = self.traj.time_scale().min(self.damping.time_scale());
        let mut chunk = width.min(2.0 * scale).max(1e-3 * width);
        let mut value = ZERO;
        let mut error = 0.0;
        for step in 0u32.. {
            if let Some((v, e)) = self.asymptotic_tail(frontier, dir, 0.25 * tol) {
                return Ok((value + v, error + e));
            }
            if step > 200 || !frontier.is_finite() || frontier.abs() > 1e15 {
                return Err(Error::NonConvergence {
                    method: "phase integral tail",
                    residual: frontier,
                });
            }
            let mut len = chunk;
            while len * self.rate(frontier + dir * len) > CHUNK_OSCILLATIONS * PI && len > 1e-6 * chunk {
                len *= 0.5;
            }
            let next = frontier + dir * len;
            let (a, b) = if dir > 0.0 { (frontier, next) } else { (next, frontier) };
            let share = 0.75 * tol / ((step + 2) as f64).powi(2);
            let (v, e) = self.integrate_segments(&[a, b], share, budget)?;
            value += v;
            error += e;
            frontier = next;
            chunk = 2.0 * len;
        }
        unreachable!()
    }

    /// Integration by parts: with `q = 1/(iφ')`, `h₀ = w`, `h_{n+1} = (h_n q)'`,
    /// `∫_b^∞ e^{iφ} w = −e^{iφ(b)} Σ (−1)ⁿ h_n q` and
    /// `∫_{−∞}^a e^{iφ} w = e^{iφ(a)} Σ (−1)ⁿ h_n q`, truncated at the
    /// smallest term.
    fn asymptotic_tail(&self, t: f64, dir: f64, tol: f64) -> Option<(Complex64, f64)> {
        let order = TAIL_ORDER;
        let pos = self.traj.position_jet(t, order + 1).ok()?;
        let phase = Jet::variable(t, order + 1) * self.omega - pos * self.kz;
        let dphi = phase.derivative();
        if dphi.value().norm() == 0.0 {
            return None;
        }
        let q = (dphi.scale(I)).recip();
        let mut h = self.damping.jet(t, order);
        let mut terms = Vec::with_capacity(order + 1);
        for n in 0..=order {
            terms.push(h.value() * q.value());
            if n < order {
                h = (h * q).derivative();
            }
        }
        let (m, smallest) = terms
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| (n, c.norm()))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        if !(smallest <= tol) || terms[..m].iter().any(|c| !c.norm().is_finite()) {
            return None;
        }
        // terms must be shrinking up to the truncation point
        if terms[..=m].windows(2).any(|w| w[1].norm() > w[0].norm() && w[1].norm() > tol) {
            return None;
        }
        let mut sum = ZERO;
        for (n, c) in terms[..m].iter().enumerate() {
            sum += if n % 2 == 0 { *c } else { -*c };
        }
        let unit = Complex64::from_polar(1.0, phase.value().re);
        Some((-dir * unit * sum, smallest))
    }
}

/// Closed form for `ζ(t) = ζ₀ e^{−Γ₀ t}` on any window.
///
/// With `s = −iω/Γ₀`, `b = i k_z ζ₀` and `F(t) = b^{−s} γ(s, b e^{−Γ₀ t})`,
/// `I = [F(t_i) − F(t_f)]/Γ₀`. `F(−∞) = b^{−s}Γ(s)` and `F(+∞) = 0`; the
/// latter is the regularized limit, so windows reaching `+∞` are marked as
/// regulator-extrapolated.
pub fn integrate_closed_exponential(mode: &Mode, zeta0: f64, rate: f64, window: Window) -> Result<PhaseIntegral> {
    require_finite("zeta0", zeta0)?;
    require_positive("gamma0", rate)?;
    let omega = mode.omega;
    let beta = mode.kz() * zeta0;
    let provenance = if window.end.is_infinite() {
        Provenance::RegulatorExtrapolated
    } else {
        Provenance::ClosedForm
    };

    if beta == 0.0 {
        // ∫ e^{iωt} dt: regular part plus π δ(ω) per infinite end
        let io = I * omega;
        let upper = if window.end.is_finite() { (io * window.end).exp() / io } else { ZERO };
        let lower = if window.start.is_finite() { (io * window.start).exp() / io } else { ZERO };
        let infinite_ends = [window.start, window.end].iter().filter(|t| t.is_infinite()).count();
        let mut out = PhaseIntegral::for_mode(mode, upper - lower, 0.0, provenance);
        out.analytic = true;
        if infinite_ends > 0 {
            out.distribution = Some(Distribution::DiracOmega {
                coefficient: PI * infinite_ends as f64,
            });
        }
        return Ok(out);
    }

    let s = Complex64::new(0.0, -omega / rate);
    // ln b^{−s} = (iω/Γ) ln|β| − sgn(β) πω/(2Γ)
    let ln_b_pow = Complex64::new(-beta.signum() * PI * omega / (2.0 * rate), omega / rate * beta.abs().ln());
    let f_minus_inf = (ln_b_pow + log_gamma(s)?).exp();
    let f_at = |t: f64| -> Result<Complex64> {
        let eta = (-rate * t).exp();
        if !eta.is_finite() {
            return Ok(f_minus_inf);
        }
        let z = Complex64::new(0.0, beta * eta);
        Ok((I * omega * t).exp() * lower_gamma_scaled(s, z)?)
    };
    let fi = if window.start.is_finite() { f_at(window.start)? } else { f_minus_inf };
    let ff = if window.end.is_finite() { f_at(window.end)? } else { ZERO };
    let value = (fi - ff) / rate;
    let error = 1e-12 * (fi.norm() + ff.norm()) / rate;
    let mut out = PhaseIntegral::for_mode(mode, value, error, provenance);
    out.analytic = true;
    Ok(out)
}

/// Closed form for hyperbolic motion: the regular part
/// `i (2/a) K₁(μ) sinh σ` with `μ = (k/a) sqrt(sin²θ + k²/4)` and
/// `sinh σ = k_z/(aμ)`. The accompanying `δ(μ)` term is only flagged.
pub fn integrate_closed_uniform_acceleration(mode: &Mode, acceleration: f64) -> Result<PhaseIntegral> {
    let a = require_positive("acceleration", acceleration)?;
    let mu = uniform_mu(mode, a);
    let kz = mode.kz();
    let sinh_sigma = kz / (a * mu);
    let cosh_sigma = mode.omega / (a * mu);
    let k1 = bessel_k1_scaled(mu)? * (-mu).exp();
    let value = I * (2.0 / a) * k1 * sinh_sigma;
    let mut out = PhaseIntegral::for_mode(mode, value, 1e-12 * value.norm(), Provenance::ClosedForm);
    out.distribution = Some(Distribution::DiracMu {
        coefficient: 2.0 * PI / a * cosh_sigma,
    });
    Ok(out)
}

/// `μ_k` for hyperbolic motion in natural units.
pub fn uniform_mu(mode: &Mode, acceleration: f64) -> f64 {
    let s = mode.theta.sin();
    mode.k / acceleration * (s * s + 0.25 * mode.k * mode.k).sqrt()
}

/// Closed form for uniform motion over the full line: a pure
/// `2π δ(ω_k − k_z v)` with no regular part. On a finite window the
/// Fourier kernel is returned.
pub fn integrate_closed_constant_velocity(mode: &Mode, speed: f64, window: Window) -> Result<PhaseIntegral> {
    require_finite("speed", speed)?;
    let big_omega = mode.omega - mode.kz() * speed;
    if window.is_finite() {
        let io = I * big_omega;
        let value = if big_omega == 0.0 {
            Complex64::new(window.end - window.start, 0.0)
        } else {
            ((io * window.end).exp() - (io * window.start).exp()) / io
        };
        let mut out = PhaseIntegral::for_mode(mode, value, 0.0, Provenance::ClosedForm);
        out.error = 1e-15 * (window.end - window.start).abs().max(1.0);
        return Ok(out);
    }
    let ends = [window.start, window.end].iter().filter(|t| t.is_infinite()).count();
    let io = I * big_omega;
    let value = if ends == 2 {
        ZERO
    } else if window.end.is_finite() {
        (io * window.end).exp() / io
    } else {
        -(io * window.start).exp() / io
    };
    let mut out = PhaseIntegral::for_mode(mode, value, 0.0, Provenance::RegulatorExtrapolated);
    out.analytic = true;
    out.distribution = Some(Distribution::DiracDoppler {
        speed,
        coefficient: PI * ends as f64,
    });
    Ok(out)
}

/// Polynomial extrapolation of `I(ε)` to `ε = 0` from the last `order + 1`
/// ladder points (Neville). The error estimate is the change between the
/// last two orders plus the largest input error.
pub fn extrapolate_regulator(points: &[(f64, PhaseIntegral)], order: usize) -> Result<PhaseIntegral> {
    if points.len() < 2 {
        return Err(invalid("regulator ladder", "needs at least two points"));
    }
    if order < 1 || order >= points.len() {
        return Err(invalid(
            "regulator order",
            format!("must lie in [1, {}], got {order}", points.len() - 1),
        ));
    }
    let first = &points[0].1;
    let kind = first.damping.map(|d| d.kind());
    for (eps, p) in points {
        require_positive("regulator epsilon", *eps)?;
        if p.k != first.k || p.theta != first.theta {
            return Err(Error::ProvenanceMismatch(format!(
                "ladder mixes modes (k={}, θ={}) and (k={}, θ={})",
                first.k, first.theta, p.k, p.theta
            )));
        }
        if p.damping.map(|d| d.kind()) != kind {
            return Err(Error::ProvenanceMismatch("ladder mixes regulator kinds".into()));
        }
        if let Some(e) = p.damping.and_then(|d| d.epsilon()) {
            if e != *eps {
                return Err(Error::ProvenanceMismatch(format!(
                    "ladder point ε = {eps} carries an integral evaluated at ε = {e}"
                )));
            }
        }
    }
    if points.windows(2).any(|w| !(w[1].0 < w[0].0)) {
        return Err(invalid("regulator ladder", "ε values must be strictly decreasing"));
    }

    let input_error = points.iter().map(|(_, p)| p.error).fold(0.0, f64::max);
    let residuals: Vec<f64> = points.windows(2).map(|w| (w[1].1.value - w[0].1.value).norm()).collect();
    let noise = 10.0 * input_error;
    if residuals.windows(2).any(|r| r[1] > r[0] && r[1] > noise) {
        return Err(Error::NonMonotone { residuals });
    }

    let n = points.len();
    let hi = neville_at_zero(&points[n - order - 1..]);
    let lo = neville_at_zero(&points[n - order..]);
    let value = hi;
    let error = (hi - lo).norm() + input_error;

    let ladder: Vec<f64> = points.iter().map(|(e, _)| *e).collect();
    Ok(PhaseIntegral {
        value,
        error,
        provenance: Provenance::RegulatorExtrapolated,
        regulator: Some(RegulatorSpec {
            kind: kind.unwrap_or(RegulatorKind::None),
            ladder,
            order,
        }),
        damping: None,
        analytic: false,
        k: first.k,
        theta: first.theta,
        distribution: first.distribution,
    })
}

fn neville_at_zero(points: &[(f64, PhaseIntegral)]) -> Complex64 {
    let x: Vec<f64> = points.iter().map(|(e, _)| *e).collect();
    let mut p: Vec<Complex64> = points.iter().map(|(_, v)| v.value).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (x[i], x[i + level]);
            p[i] = (p[i] * xj - p[i + 1] * xi) / (xj - xi);
        }
    }
    p[0]
}

//! Impurity trajectories confined to the z axis, in natural units (`c = 1`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_finite, require_positive, Error, Result};
use crate::jet::Jet;

/// A prescribed impurity path `ζ(t) ẑ`.
#[derive(Debug, Clone, PartialEq)]
pub enum Trajectory {
    /// `ζ(t) = v t`.
    ConstantVelocity { speed: f64 },
    /// `ζ(t) = ζ₀ exp(−Γ₀ t)` with `Γ₀ > 0`.
    ExponentialDecay { zeta0: f64, rate: f64 },
    /// Hyperbolic motion `ζ(t) = (1/a) sqrt(1 + (a t)²)`.
    UniformAcceleration { acceleration: f64 },
    Sampled(SampledPath),
    /// Any trajectory displaced by a constant offset.
    Shifted { base: Box<Trajectory>, offset: f64 },
    /// `−ζ(t)` of the base path.
    Mirrored(Box<Trajectory>),
}

impl Trajectory {
    pub fn constant_velocity(speed: f64) -> Result<Self> {
        Ok(Self::ConstantVelocity {
            speed: require_finite("speed", speed)?,
        })
    }

    pub fn exponential_decay(zeta0: f64, rate: f64) -> Result<Self> {
        let zeta0 = require_finite("zeta0", zeta0)?;
        if zeta0 == 0.0 {
            return Err(invalid("zeta0", "must be non-zero"));
        }
        Ok(Self::ExponentialDecay {
            zeta0,
            rate: require_positive("gamma0", rate)?,
        })
    }

    pub fn uniform_acceleration(acceleration: f64) -> Result<Self> {
        Ok(Self::UniformAcceleration {
            acceleration: require_positive("acceleration", acceleration)?,
        })
    }

    /// The same path displaced by `offset` along z.
    pub fn shifted(self, offset: f64) -> Self {
        Self::Shifted {
            base: Box::new(self),
            offset,
        }
    }

    /// The path reflected through `ζ = 0`. Exponential and uniform paths
    /// stay in their own family.
    pub fn mirrored(self) -> Self {
        match self {
            Self::ConstantVelocity { speed } => Self::ConstantVelocity { speed: -speed },
            Self::ExponentialDecay { zeta0, rate } => Self::ExponentialDecay { zeta0: -zeta0, rate },
            Self::Shifted { base, offset } => Self::Shifted {
                base: Box::new(base.mirrored()),
                offset: -offset,
            },
            Self::Mirrored(base) => *base,
            other => Self::Mirrored(Box::new(other)),
        }
    }

    pub fn position(&self, t: f64) -> Result<f64> {
        require_finite("t", t)?;
        Ok(match self {
            Self::ConstantVelocity { speed } => speed * t,
            Self::ExponentialDecay { zeta0, rate } => zeta0 * (-rate * t).exp(),
            Self::UniformAcceleration { acceleration: a } => (1.0 + (a * t).powi(2)).sqrt() / a,
            Self::Sampled(path) => path.eval(t)?.0,
            Self::Shifted { base, offset } => base.position(t)? + offset,
            Self::Mirrored(base) => -base.position(t)?,
        })
    }

    /// `dζ/dt`.
    pub fn speed(&self, t: f64) -> Result<f64> {
        require_finite("t", t)?;
        Ok(match self {
            Self::ConstantVelocity { speed } => *speed,
            Self::ExponentialDecay { zeta0, rate } => -rate * zeta0 * (-rate * t).exp(),
            Self::UniformAcceleration { acceleration: a } => {
                let at = a * t;
                at / (1.0 + at * at).sqrt()
            }
            Self::Sampled(path) => path.eval(t)?.1,
            Self::Shifted { base, .. } => base.speed(t)?,
            Self::Mirrored(base) => -base.speed(t)?,
        })
    }

    /// Taylor jet of `ζ(t + h)` in `h`.
    pub fn position_jet(&self, t: f64, order: usize) -> Result<Jet> {
        require_finite("t", t)?;
        let h = Jet::variable(t, order);
        Ok(match self {
            Self::ConstantVelocity { speed } => h * *speed,
            Self::ExponentialDecay { zeta0, rate } => (h * -rate).exp() * *zeta0,
            Self::UniformAcceleration { acceleration: a } => {
                let at = h * *a;
                (at * at + 1.0).sqrt() * (1.0 / a)
            }
            Self::Sampled(path) => path.jet(t, order)?,
            Self::Shifted { base, offset } => base.position_jet(t, order)? + *offset,
            Self::Mirrored(base) => -base.position_jet(t, order)?,
        })
    }

    /// The potential `V(ζ)` that drives this path for an impurity of mass `m_imp`.
    pub fn classical_potential(&self, zeta: f64, m_imp: f64) -> Result<f64> {
        require_finite("zeta", zeta)?;
        require_positive("impurity_mass", m_imp)?;
        match self {
            Self::ExponentialDecay { rate, .. } => Ok(-0.5 * m_imp * rate * rate * zeta * zeta),
            Self::UniformAcceleration { acceleration: a } => {
                if zeta == 0.0 {
                    return Err(invalid("zeta", "the 1/ζ² potential is singular at ζ = 0"));
                }
                Ok(0.5 * m_imp / (a * zeta).powi(2))
            }
            Self::Mirrored(base) => base.classical_potential(-zeta, m_imp),
            _ => Err(Error::Unsupported("classical_potential")),
        }
    }

    /// Characteristic time over which the velocity changes; infinite for
    /// uniform motion.
    pub fn time_scale(&self) -> f64 {
        match self {
            Self::ConstantVelocity { .. } => f64::INFINITY,
            Self::ExponentialDecay { rate, .. } => 1.0 / rate,
            Self::UniformAcceleration { acceleration } => 1.0 / acceleration,
            Self::Sampled(path) => path.min_spacing() * 4.0,
            Self::Shifted { base, .. } | Self::Mirrored(base) => base.time_scale(),
        }
    }

    /// Time span on which the trajectory is defined.
    pub fn span(&self) -> (f64, f64) {
        match self {
            Self::Sampled(path) => (path.start(), path.end()),
            Self::Shifted { base, .. } | Self::Mirrored(base) => base.span(),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Interior nodes where the path is only piecewise smooth.
    pub fn knots(&self) -> &[f64] {
        match self {
            Self::Sampled(path) => &path.times,
            Self::Shifted { base, .. } | Self::Mirrored(base) => base.knots(),
            _ => &[],
        }
    }

    /// An interval that contains every stationary point of the phase
    /// `ω t − k_z ζ(t)` together with the region where the velocity is still
    /// changing appreciably. Outside it the phase is monotone.
    pub fn phase_core(&self, kz: f64, omega: f64) -> (f64, f64) {
        match self {
            Self::ConstantVelocity { .. } => (-1.0, 1.0),
            Self::ExponentialDecay { zeta0, rate } => {
                let tau = 1.0 / rate;
                let mut lo = -4.0 * tau;
                let mut hi = 4.0 * tau;
                let beta = kz * zeta0;
                if beta < 0.0 {
                    // ω + βΓ e^{−Γt} = 0
                    let t_star = -(omega / (-beta * rate)).ln() / rate;
                    lo = lo.min(t_star - 4.0 * tau);
                    hi = hi.max(t_star + 4.0 * tau);
                }
                (lo, hi)
            }
            Self::UniformAcceleration { acceleration } => (-4.0 / acceleration, 4.0 / acceleration),
            Self::Sampled(path) => (path.start(), path.end()),
            Self::Shifted { base, .. } => base.phase_core(kz, omega),
            Self::Mirrored(base) => base.phase_core(-kz, omega),
        }
    }

    /// Kinematic summary over `[t_start, t_end]`; the bounds may be infinite.
    pub fn diagnostics(&self, t_start: f64, t_end: f64) -> Result<TrajectoryDiagnostics> {
        if !(t_start < t_end) {
            return Err(invalid("window", format!("need t_start < t_end, got [{t_start}, {t_end}]")));
        }
        let base = self.unshifted();
        let (max_speed, gamma0) = match base {
            Self::ConstantVelocity { speed } => (speed.abs(), None),
            Self::ExponentialDecay { zeta0, rate } => {
                let s = if t_start.is_finite() {
                    (rate * zeta0 * (-rate * t_start).exp()).abs()
                } else {
                    f64::INFINITY
                };
                (s, Some(*rate))
            }
            Self::UniformAcceleration { acceleration } => {
                let tmax = t_start.abs().max(t_end.abs());
                let s = if tmax.is_finite() {
                    self.speed(tmax)?.abs()
                } else {
                    1.0
                };
                (s, Some(*acceleration))
            }
            Self::Sampled(path) => {
                let lo = t_start.max(path.start());
                let hi = t_end.min(path.end());
                let n = 64 * path.times.len();
                let mut best: f64 = 0.0;
                for i in 0..=n {
                    let t = lo + (hi - lo) * i as f64 / n as f64;
                    best = best.max(path.eval(t)?.1.abs());
                }
                (best, None)
            }
            Self::Shifted { .. } | Self::Mirrored(_) => unreachable!(),
        };
        let uniform = matches!(base, Self::UniformAcceleration { .. });
        Ok(TrajectoryDiagnostics {
            max_speed,
            acceleration_parameter: gamma0,
            acceleration_length: gamma0.map(|g| 1.0 / g),
            unruh_temperature: gamma0.map(|g| g / (2.0 * PI)),
            acceleration_temperature: if uniform { gamma0.map(|a| 0.5 * a) } else { None },
        })
    }

    fn unshifted(&self) -> &Self {
        match self {
            Self::Shifted { base, .. } | Self::Mirrored(base) => base.unshifted(),
            other => other,
        }
    }
}

/// Kinematic scales of a trajectory in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDiagnostics {
    pub max_speed: f64,
    /// `Γ₀ = a/c`.
    pub acceleration_parameter: Option<f64>,
    /// `l_a = c²/a`.
    pub acceleration_length: Option<f64>,
    /// `k_B T_U = ħΓ₀/2π`.
    pub unruh_temperature: Option<f64>,
    /// `k_B T = ħa/2c` for hyperbolic motion.
    pub acceleration_temperature: Option<f64>,
}

/// Clamped cubic spline through sampled `(t, ζ)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(invalid("samples", "time and position columns differ in length"));
        }
        if times.len() < 2 {
            return Err(invalid("samples", "need at least two samples"));
        }
        for (&t, &z) in times.iter().zip(&values) {
            require_finite("samples", t)?;
            require_finite("samples", z)?;
        }
        if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(invalid(
                "samples",
                format!("times must be strictly increasing ({} then {})", w[0], w[1]),
            ));
        }
        let second = clamped_second_derivatives(&times, &values);
        Ok(Self {
            times,
            values,
            second,
        })
    }

    /// Parses a two-column `t, ζ` CSV. A non-numeric first row is a header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| invalid("samples", e.to_string()))?;
            if record.len() != 2 {
                return Err(invalid(
                    "samples",
                    format!("row {} has {} columns, expected 2", row + 1, record.len()),
                ));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(t), Ok(z)) => {
                    times.push(t);
                    values.push(z);
                }
                _ if row == 0 => continue,
                _ => {
                    return Err(invalid(
                        "samples",
                        format!("row {} is not numeric: {:?}", row + 1, record),
                    ))
                }
            }
        }
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    fn min_spacing(&self) -> f64 {
        self.times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    fn locate(&self, t: f64) -> Result<usize> {
        if t < self.start() || t > self.end() {
            return Err(Error::OutOfSpan {
                t,
                start: self.start(),
                end: self.end(),
            });
        }
        let idx = self.times.partition_point(|&x| x <= t);
        Ok(idx.saturating_sub(1).min(self.times.len() - 2))
    }

    /// Taylor coefficients of the cubic piece containing `t`, expanded at `t`.
    fn local_taylor(&self, t: f64) -> Result<[f64; 4]> {
        let i = self.locate(t)?;
        let (x0, x1) = (self.times[i], self.times[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let h = x1 - x0;
        let a = x1 - t;
        let b = t - x0;
        let value = m0 * a.powi(3) / (6.0 * h)
            + m1 * b.powi(3) / (6.0 * h)
            + (y0 / h - m0 * h / 6.0) * a
            + (y1 / h - m1 * h / 6.0) * b;
        let d1 = -m0 * a * a / (2.0 * h) + m1 * b * b / (2.0 * h) + (y1 - y0) / h
            - (m1 - m0) * h / 6.0;
        let d2 = (m0 * a + m1 * b) / h;
        let d3 = (m1 - m0) / h;
        Ok([value, d1, d2 / 2.0, d3 / 6.0])
    }

    /// `(ζ, dζ/dt)` at `t`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let c = self.local_taylor(t)?;
        Ok((c[0], c[1]))
    }

    fn jet(&self, t: f64, order: usize) -> Result<Jet> {
        Ok(Jet::from_taylor(&self.local_taylor(t)?, order))
    }
}

/// Second derivatives of the clamped spline. End slopes come from the
/// interpolating polynomial through the (up to) four outermost samples, so
/// the clamping keeps the interior O(h⁴) accuracy.
fn clamped_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 2 {
        return vec![0.0; 2];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let m = n.min(4);
    let slope0 = lagrange_slope(&x[..m], &y[..m], x[0]);
    let slope_n = lagrange_slope(&x[n - m..], &y[n - m..], x[n - 1]);

    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    diag[0] = 2.0 * h[0];
    sup[0] = h[0];
    rhs[0] = 6.0 * ((y[1] - y[0]) / h[0] - slope0);
    for i in 1..n - 1 {
        sub[i] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        sup[i] = h[i];
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
    }
    sub[n - 1] = h[n - 2];
    diag[n - 1] = 2.0 * h[n - 2];
    rhs[n - 1] = 6.0 * (slope_n - (y[n - 1] - y[n - 2]) / h[n - 2]);

    // Thomas algorithm
    for i in 1..n {
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n];
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
    }
    m
}

/// Derivative at `at` of the polynomial through `(xs, ys)`.
fn lagrange_slope(xs: &[f64], ys: &[f64], at: f64) -> f64 {
    let mut slope = 0.0;
    for j in 0..xs.len() {
        let denom: f64 = (0..xs.len())
            .filter(|&m| m != j)
            .map(|m| xs[j] - xs[m])
            .product();
        let mut numer = 0.0;
        for skip in (0..xs.len()).filter(|&m| m != j) {
            numer += (0..xs.len())
                .filter(|&m| m != j && m != skip)
                .map(|m| at - xs[m])
                .product::<f64>();
        }
        slope += ys[j] * numer / denom;
    }
    slope
}

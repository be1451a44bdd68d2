//! Run configuration: a strict TOML schema and its translation into library
//! objects. Every quantity is read in the units of the `[condensate]` block.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use bogolon::phase_integral::{RegulatorKind, RegulatorSpec, Window};
use bogolon::spectrum::{EnergyGrid, SpectrumSource, DEFAULT_PHASE_TOL};
use bogolon::trajectory::SampledPath;
use bogolon::{Condensate, CondensateParams, Trajectory};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub condensate: CondensateParams,
    pub trajectory: TrajectoryConfig,
    pub window: WindowConfig,
    #[serde(default)]
    pub regulator: RegulatorConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depletion: Option<DepletionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrajectoryConfig {
    ConstantVelocity {
        speed: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<f64>,
    },
    ExponentialDecay {
        zeta0: f64,
        gamma0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<f64>,
    },
    UniformAcceleration {
        acceleration: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<f64>,
    },
    /// Two-column `t, ζ` CSV; a relative path is taken from the config file's
    /// directory.
    Sampled {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<f64>,
    },
}

/// `t_i`, `t_f`; TOML's `inf` and `-inf` select the full line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegulatorConfig {
    pub kind: RegulatorKind,
    /// Strengths in inverse time (exponential) or inverse time squared
    /// (gaussian), strictly decreasing.
    pub ladder: Vec<f64>,
    pub order: usize,
    /// Absolute tolerance of each numeric phase integral.
    pub tolerance: f64,
    /// Use closed forms where the trajectory and window admit one.
    pub closed_form: bool,
}

impl Default for RegulatorConfig {
    fn default() -> Self {
        Self {
            kind: RegulatorKind::None,
            ladder: Vec::new(),
            order: 2,
            tolerance: DEFAULT_PHASE_TOL,
            closed_form: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub k_min: f64,
    pub k_max: f64,
    #[serde(default = "default_k_count")]
    pub k_count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
    /// Uniform in `[0, π]`, both ends included.
    #[serde(default = "default_theta_count")]
    pub theta_count: usize,
    /// Explicit polar angles; overrides `theta_count`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
}

fn default_k_count() -> usize {
    32
}

fn default_spacing() -> Spacing {
    Spacing::Log
}

fn default_theta_count() -> usize {
    9
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Natural,
    Physical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Significant digits of CSV numbers.
    pub precision: usize,
    pub units: Units,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            path: None,
            precision: 17,
            units: Units::Natural,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    /// Wavenumber cutoff.
    pub k_max: f64,
    #[serde(default)]
    pub quadrature: EnergyGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepletionConfig {
    /// Box modes with `|k| ≤ k_max` are summed.
    pub k_max: f64,
    /// Evaluation time; the phase integral runs from the window start to here.
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Acceleration,
    Gamma0,
    Zeta0,
    /// Window length `T`, keeping the start fixed.
    Duration,
    Speed,
    ImpurityCoupling,
    /// Each value is one regulator strength; the rows form an extrapolation table.
    RegulatorEpsilon,
}

impl SweepParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParameter::Acceleration => "acceleration",
            SweepParameter::Gamma0 => "gamma0",
            SweepParameter::Zeta0 => "zeta0",
            SweepParameter::Duration => "duration",
            SweepParameter::Speed => "speed",
            SweepParameter::ImpurityCoupling => "impurity_coupling",
            SweepParameter::RegulatorEpsilon => "regulator_epsilon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    #[default]
    Spectrum,
    Energy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    #[serde(default)]
    pub observable: Observable,
}

/// A config with its library objects built and validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub condensate: Condensate,
    pub source: SpectrumSource,
    pub ks: Vec<f64>,
    pub thetas: Vec<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        if let TrajectoryConfig::Sampled { path: samples, .. } = &mut config.trajectory {
            if samples.is_relative() {
                if let Some(dir) = path.parent() {
                    *samples = dir.join(&*samples);
                }
            }
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    /// Builds and validates every library object the config describes.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let condensate = Condensate::new(self.condensate)?;
        let trajectory = self.trajectory.build(&condensate)?;
        let window = Window::new(
            condensate.time_to_natural(self.window.start),
            condensate.time_to_natural(self.window.end),
        )?;
        let regulator = self.regulator.build(&condensate)?;
        if !(self.regulator.tolerance > 0.0 && self.regulator.tolerance.is_finite()) {
            return Err(CliError::Config(format!(
                "regulator.tolerance must be finite and > 0, got {}",
                self.regulator.tolerance
            )));
        }
        let mut source = SpectrumSource::new(trajectory, window, regulator, self.regulator.tolerance);
        source.prefer_closed_form = self.regulator.closed_form;
        if !source.is_closed_form() && !window.is_finite() && source.regulator.kind == RegulatorKind::None {
            return Err(CliError::Config(
                "regulator.kind: an infinite window without a closed form needs a regulator ladder".into(),
            ));
        }
        let ks = self.grid.wavenumbers()?.into_iter().map(|k| condensate.wavenumber_to_natural(k)).collect();
        let thetas = self.grid.angles()?;
        if self.output.precision == 0 || self.output.precision > 17 {
            return Err(CliError::Config(format!(
                "output.precision must lie in [1, 17], got {}",
                self.output.precision
            )));
        }
        if let Some(energy) = &self.energy {
            positive("energy.k_max", energy.k_max)?;
            energy.quadrature.validate()?;
        }
        if let Some(depletion) = &self.depletion {
            positive("depletion.k_max", depletion.k_max)?;
            if !depletion.time.is_finite() {
                return Err(CliError::Config("depletion.time must be finite".into()));
            }
        }
        if let Some(sweep) = &self.sweep {
            self.check_sweep(sweep)?;
        }
        Ok(Resolved {
            condensate,
            source,
            ks,
            thetas,
        })
    }

    fn check_sweep(&self, sweep: &SweepConfig) -> Result<(), CliError> {
        if sweep.values.is_empty() {
            return Err(CliError::Config("sweep.values must not be empty".into()));
        }
        if sweep.values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Config("sweep.values must be finite".into()));
        }
        let applies = match sweep.parameter {
            SweepParameter::Acceleration => matches!(self.trajectory, TrajectoryConfig::UniformAcceleration { .. }),
            SweepParameter::Gamma0 | SweepParameter::Zeta0 => {
                matches!(self.trajectory, TrajectoryConfig::ExponentialDecay { .. })
            }
            SweepParameter::Speed => matches!(self.trajectory, TrajectoryConfig::ConstantVelocity { .. }),
            SweepParameter::Duration => self.window.start.is_finite(),
            SweepParameter::ImpurityCoupling => true,
            SweepParameter::RegulatorEpsilon => self.regulator.kind != RegulatorKind::None,
        };
        if !applies {
            return Err(CliError::Config(format!(
                "sweep.parameter `{}` does not apply to this trajectory, window or regulator",
                sweep.parameter.as_str()
            )));
        }
        if sweep.parameter == SweepParameter::RegulatorEpsilon {
            let mut ladder = sweep.values.clone();
            ladder.sort_by(|a, b| b.total_cmp(a));
            RegulatorSpec::new(self.regulator.kind, ladder, self.regulator.order.min(sweep.values.len() - 1).max(1))?;
        } else {
            for &v in &sweep.values {
                self.with_parameter(sweep.parameter, v).resolve_without_sweep()?;
            }
        }
        Ok(())
    }

    fn resolve_without_sweep(&self) -> Result<Resolved, CliError> {
        Self {
            sweep: None,
            ..self.clone()
        }
        .resolve()
    }

    /// A copy with one swept parameter replaced.
    pub fn with_parameter(&self, parameter: SweepParameter, value: f64) -> Self {
        let mut out = self.clone();
        out.sweep = None;
        match (parameter, &mut out.trajectory) {
            (SweepParameter::Acceleration, TrajectoryConfig::UniformAcceleration { acceleration, .. }) => {
                *acceleration = value
            }
            (SweepParameter::Gamma0, TrajectoryConfig::ExponentialDecay { gamma0, .. }) => *gamma0 = value,
            (SweepParameter::Zeta0, TrajectoryConfig::ExponentialDecay { zeta0, .. }) => *zeta0 = value,
            (SweepParameter::Speed, TrajectoryConfig::ConstantVelocity { speed, .. }) => *speed = value,
            (SweepParameter::Duration, _) => out.window.end = out.window.start + value,
            (SweepParameter::ImpurityCoupling, _) => out.condensate.impurity_coupling = value,
            _ => {}
        }
        out
    }
}

fn positive(field: &str, value: f64) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::Config(format!("{field} must be finite and > 0, got {value}")))
    }
}

impl TrajectoryConfig {
    fn offset(&self) -> Option<f64> {
        match self {
            TrajectoryConfig::ConstantVelocity { offset, .. }
            | TrajectoryConfig::ExponentialDecay { offset, .. }
            | TrajectoryConfig::UniformAcceleration { offset, .. }
            | TrajectoryConfig::Sampled { offset, .. } => *offset,
        }
    }

    pub fn build(&self, cond: &Condensate) -> Result<Trajectory, CliError> {
        let base = match self {
            TrajectoryConfig::ConstantVelocity { speed, .. } => {
                Trajectory::constant_velocity(cond.velocity_to_natural(*speed))?
            }
            TrajectoryConfig::ExponentialDecay { zeta0, gamma0, .. } => {
                Trajectory::exponential_decay(cond.length_to_natural(*zeta0), cond.rate_to_natural(*gamma0))?
            }
            TrajectoryConfig::UniformAcceleration { acceleration, .. } => {
                Trajectory::uniform_acceleration(cond.acceleration_to_natural(*acceleration))?
            }
            TrajectoryConfig::Sampled { path, .. } => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("trajectory.path: cannot read {}: {e}", path.display()))
                })?;
                let raw = SampledPath::from_csv(&text)?;
                let times = raw.times().iter().map(|&t| cond.time_to_natural(t)).collect();
                let values = raw.values().iter().map(|&z| cond.length_to_natural(z)).collect();
                Trajectory::Sampled(SampledPath::new(times, values)?)
            }
        };
        Ok(match self.offset() {
            Some(offset) => {
                if !offset.is_finite() {
                    return Err(CliError::Config("trajectory.offset must be finite".into()));
                }
                base.shifted(cond.length_to_natural(offset))
            }
            None => base,
        })
    }
}

impl RegulatorConfig {
    fn build(&self, cond: &Condensate) -> Result<RegulatorSpec, CliError> {
        if self.kind == RegulatorKind::None {
            return Ok(RegulatorSpec::none());
        }
        let ladder = self.ladder.iter().map(|&e| self.to_natural(cond, e)).collect();
        Ok(RegulatorSpec::new(self.kind, ladder, self.order)?)
    }

    /// Converts one regulator strength to natural units.
    pub fn to_natural(&self, cond: &Condensate, epsilon: f64) -> f64 {
        match self.kind {
            RegulatorKind::Gaussian => {
                let t = cond.units().time;
                epsilon * t * t
            }
            _ => cond.rate_to_natural(epsilon),
        }
    }
}

impl GridConfig {
    /// Wavenumbers in the config's units, ascending.
    pub fn wavenumbers(&self) -> Result<Vec<f64>, CliError> {
        positive("grid.k_min", self.k_min)?;
        positive("grid.k_max", self.k_max)?;
        if self.k_max < self.k_min {
            return Err(CliError::Config(format!(
                "grid.k_max ({}) is below grid.k_min ({})",
                self.k_max, self.k_min
            )));
        }
        if self.k_count == 0 {
            return Err(CliError::Config("grid.k_count must be at least 1".into()));
        }
        if self.k_count == 1 {
            return Ok(vec![self.k_min]);
        }
        let last = (self.k_count - 1) as f64;
        Ok((0..self.k_count)
            .map(|i| {
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.k_min + f * (self.k_max - self.k_min),
                    Spacing::Log => self.k_min * (self.k_max / self.k_min).powf(f),
                }
            })
            .collect())
    }

    pub fn angles(&self) -> Result<Vec<f64>, CliError> {
        if let Some(thetas) = &self.thetas {
            if thetas.is_empty() {
                return Err(CliError::Config("grid.thetas must not be empty".into()));
            }
            if let Some(bad) = thetas.iter().find(|t| !(**t >= 0.0 && **t <= PI)) {
                return Err(CliError::Config(format!("grid.thetas: {bad} lies outside [0, π]")));
            }
            return Ok(thetas.clone());
        }
        match self.theta_count {
            0 => Err(CliError::Config("grid.theta_count must be at least 1".into())),
            1 => Ok(vec![0.0]),
            n => Ok((0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect()),
        }
    }
}

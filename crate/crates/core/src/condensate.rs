//! Condensate parameters, the unit convention and the Bogoliubov dispersion.
//!
//! Physical inputs are stored as given. Every computation downstream runs in
//! natural units with `ħ = M = c = 1`, so that `gn = 1`, the coherence length
//! is `ξ = 1/2` and the free-particle energy is `k²/2`. [`Condensate`] owns the
//! conversion in both directions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Result};

/// Default upper bound on the diluteness `n a_s³`.
pub const DEFAULT_DILUTENESS_THRESHOLD: f64 = 1e-2;

/// Microscopic inputs in any consistent unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondensateParams {
    /// Boson mass `M`.
    pub mass: f64,
    /// Contact coupling `g` (energy × volume).
    pub coupling: f64,
    /// Number density `n`.
    pub density: f64,
    /// Impurity coupling `λ` (energy × volume). May be zero or negative.
    pub impurity_coupling: f64,
    /// Reduced Planck constant in the chosen units.
    pub hbar: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particle_number: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_length: Option<f64>,
}

impl CondensateParams {
    /// The dimensionless reference condensate: `ħ = M = 1`, `g = n = 1`.
    pub fn natural(impurity_coupling: f64) -> Self {
        Self {
            mass: 1.0,
            coupling: 1.0,
            density: 1.0,
            impurity_coupling,
            hbar: 1.0,
            particle_number: None,
            box_length: None,
        }
    }

    fn validate(&self) -> Result<()> {
        require_positive("mass", self.mass)?;
        require_positive("coupling", self.coupling)?;
        require_positive("density", self.density)?;
        require_positive("hbar", self.hbar)?;
        if !self.impurity_coupling.is_finite() {
            return Err(invalid("impurity_coupling", "must be finite"));
        }
        if let Some(n) = self.particle_number {
            if n == 0 {
                return Err(invalid("particle_number", "must be at least 1"));
            }
        }
        if let Some(l) = self.box_length {
            require_positive("box_length", l)?;
        }
        if let (Some(n_particles), Some(l)) = (self.particle_number, self.box_length) {
            let implied = n_particles as f64 / (l * l * l);
            if ((implied - self.density) / self.density).abs() > 1e-12 {
                return Err(invalid(
                    "density",
                    format!("N/L³ = {implied} disagrees with density {}", self.density),
                ));
            }
        }
        Ok(())
    }
}

/// Conversion factors from natural units to the caller's units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitScales {
    /// `ħ/(Mc)`, the natural length (twice the coherence length).
    pub length: f64,
    /// `ħ/(Mc²)`.
    pub time: f64,
    /// `Mc²`.
    pub energy: f64,
    pub mass: f64,
    pub hbar: f64,
}

/// Scales derived from a [`CondensateParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    pub sound_speed: f64,
    pub coherence_length: f64,
    /// Born scattering length from `g = 4πħ²a_s/M`.
    pub scattering_length: f64,
    pub units: UnitScales,
}

/// Computes `c = sqrt(gn/M)`, `ξ = ħ/(2Mc)` and `a_s = gM/(4πħ²)`.
pub fn derive_scales(params: &CondensateParams) -> Result<DerivedScales> {
    params.validate()?;
    let c = (params.coupling * params.density / params.mass).sqrt();
    let xi = params.hbar / (2.0 * params.mass * c);
    let a_s = params.coupling * params.mass / (4.0 * PI * params.hbar * params.hbar);
    Ok(DerivedScales {
        sound_speed: c,
        coherence_length: xi,
        scattering_length: a_s,
        units: UnitScales {
            length: params.hbar / (params.mass * c),
            time: params.hbar / (params.mass * c * c),
            energy: params.mass * c * c,
            mass: params.mass,
            hbar: params.hbar,
        },
    })
}

/// The parameters that survive nondimensionalisation. `gn = 1` always.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalParams {
    pub density: f64,
    pub impurity_coupling: f64,
    pub particle_number: Option<u64>,
    pub box_length: Option<f64>,
}

impl NaturalParams {
    /// `g` in natural units, equal to `1/n`.
    pub fn coupling(&self) -> f64 {
        1.0 / self.density
    }

    /// `n a_s³` with `a_s = g/(4π)`.
    pub fn diluteness(&self) -> f64 {
        let a_s = self.coupling() / (4.0 * PI);
        self.density * a_s * a_s * a_s
    }
}

/// A validated condensate with both its physical and natural descriptions.
#[derive(Debug, Clone, PartialEq)]
pub struct Condensate {
    params: CondensateParams,
    scales: DerivedScales,
    natural: NaturalParams,
    diluteness_threshold: f64,
}

impl Condensate {
    pub fn new(params: CondensateParams) -> Result<Self> {
        let scales = derive_scales(&params)?;
        let u = scales.units;
        let volume = u.length * u.length * u.length;
        let natural = NaturalParams {
            density: params.density * volume,
            impurity_coupling: params.impurity_coupling / (u.energy * volume),
            particle_number: params.particle_number,
            box_length: params.box_length.map(|l| l / u.length),
        };
        Ok(Self {
            params,
            scales,
            natural,
            diluteness_threshold: DEFAULT_DILUTENESS_THRESHOLD,
        })
    }

    /// Builds a condensate directly in natural units.
    pub fn from_natural(natural: NaturalParams) -> Result<Self> {
        Self::new(CondensateParams {
            mass: 1.0,
            coupling: 1.0 / natural.density,
            density: natural.density,
            impurity_coupling: natural.impurity_coupling,
            hbar: 1.0,
            particle_number: natural.particle_number,
            box_length: natural.box_length,
        })
    }

    pub fn with_diluteness_threshold(mut self, threshold: f64) -> Result<Self> {
        self.diluteness_threshold = require_positive("diluteness_threshold", threshold)?;
        Ok(self)
    }

    pub fn params(&self) -> &CondensateParams {
        &self.params
    }

    pub fn scales(&self) -> &DerivedScales {
        &self.scales
    }

    pub fn natural(&self) -> &NaturalParams {
        &self.natural
    }

    pub fn units(&self) -> &UnitScales {
        &self.scales.units
    }

    pub fn diluteness(&self) -> f64 {
        let a = self.scales.scattering_length;
        self.params.density * a * a * a
    }

    /// True when `n a_s³` exceeds the configured threshold. The condensate is
    /// still usable; callers decide whether to warn or abort.
    pub fn diluteness_violated(&self) -> bool {
        self.diluteness() >= self.diluteness_threshold
    }

    /// Recovers physical parameters from the natural description and the
    /// unit scales. Inverse of [`Condensate::new`].
    pub fn params_from_natural(natural: &NaturalParams, units: &UnitScales) -> CondensateParams {
        let volume = units.length.powi(3);
        let c = units.length / units.time;
        CondensateParams {
            mass: units.mass,
            coupling: units.mass * c * c / (natural.density / volume),
            density: natural.density / volume,
            impurity_coupling: natural.impurity_coupling * units.energy * volume,
            hbar: units.hbar,
            particle_number: natural.particle_number,
            box_length: natural.box_length.map(|l| l * units.length),
        }
    }

    pub fn wavenumber_to_natural(&self, k: f64) -> f64 {
        k * self.units().length
    }

    pub fn wavenumber_from_natural(&self, k: f64) -> f64 {
        k / self.units().length
    }

    pub fn time_to_natural(&self, t: f64) -> f64 {
        t / self.units().time
    }

    pub fn length_to_natural(&self, x: f64) -> f64 {
        x / self.units().length
    }

    pub fn velocity_to_natural(&self, v: f64) -> f64 {
        v / self.scales.sound_speed
    }

    pub fn rate_to_natural(&self, rate: f64) -> f64 {
        rate * self.units().time
    }

    pub fn acceleration_to_natural(&self, a: f64) -> f64 {
        let u = self.units();
        a * u.time * u.time / u.length
    }

    pub fn frequency_from_natural(&self, omega: f64) -> f64 {
        omega / self.units().time
    }

    pub fn energy_from_natural(&self, e: f64) -> f64 {
        e * self.units().energy
    }

    pub fn power_from_natural(&self, p: f64) -> f64 {
        p * self.units().energy / self.units().time
    }

    /// Builds a mode from a physical wavenumber.
    pub fn make_mode(&self, k: f64, theta: f64) -> Result<Mode> {
        Mode::new(self.wavenumber_to_natural(k), theta)
    }
}

/// Free-particle energy `k²/2` in natural units.
pub fn free_energy(k: f64) -> f64 {
    0.5 * k * k
}

/// Bogoliubov frequency `ω_k = k sqrt(1 + k²/4)` in natural units.
pub fn bogoliubov_omega(k: f64) -> f64 {
    k * (1.0 + 0.25 * k * k).sqrt()
}

/// A single excitation mode in natural units. The azimuth is never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: f64,
    pub theta: f64,
    pub free_energy: f64,
    pub omega: f64,
    pub bogoliubov_angle: f64,
}

impl Mode {
    pub fn new(k: f64, theta: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(invalid("k", format!("must be > 0 (zero mode excluded), got {k}")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(invalid("theta", format!("must lie in [0, π], got {theta}")));
        }
        let eps = free_energy(k);
        let omega = bogoliubov_omega(k);
        Ok(Self {
            k,
            theta,
            free_energy: eps,
            omega,
            bogoliubov_angle: (1.0 / (omega + eps + 1.0)).atanh(),
        })
    }

    /// `k cos θ`, the component along the trajectory axis.
    pub fn kz(&self) -> f64 {
        // cos(π/2) is not exactly zero in floating point
        if self.theta == 0.5 * PI {
            0.0
        } else {
            self.k * self.theta.cos()
        }
    }

    /// `ε_k/ω_k`, evaluated without cancellation.
    pub fn energy_ratio(&self) -> f64 {
        0.5 * self.k / (1.0 + 0.25 * self.k * self.k).sqrt()
    }

    /// The same mode reflected through the xy plane.
    pub fn reflected(&self) -> Self {
        Self {
            theta: PI - self.theta,
            ..*self
        }
    }
}
